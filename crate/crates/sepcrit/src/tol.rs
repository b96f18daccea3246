//! Central tolerance constants. Every validator reports measured
//! residuals against these; nothing else in the crate hardcodes a
//! threshold.

/// Tolerances for density-matrix validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max allowed entry of |ρ − ρ†|.
    pub hermiticity: f64,
    /// Max allowed |Tr ρ − 1|.
    pub trace: f64,
    /// Smallest eigenvalue must not fall below this (negative) floor.
    pub eigenvalue_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-10,
            trace: 1e-10,
            eigenvalue_floor: -1e-10,
        }
    }
}

/// A measurement family passes validation when every defining equality
/// holds to within this residual.
pub const FAMILY_RESIDUAL: f64 = 1e-10;

/// Orthonormality residual allowed for operator bases and MUB vectors.
pub const BASIS_ORTHONORMALITY: f64 = 1e-12;

/// A criterion reports ENTANGLED when its margin exceeds this; an order
/// above accumulated eigensolver/contraction error at desk dimensions.
pub const MARGIN_THRESHOLD: f64 = 1e-9;

/// Default cap on candidates enumerated by the exhaustive selection
/// search.
pub const SELECTION_CAP: u64 = 1_000_000;

/// Inputs to the Hermitian eigensolver must be Hermitian within this.
pub const EIGEN_HERMITICITY: f64 = 1e-10;

/// PSD floor used when bisecting for the largest feasible simplex scale.
pub const MAX_T_PSD_FLOOR: f64 = -1e-12;
