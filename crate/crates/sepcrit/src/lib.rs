//! Multipartite entanglement detection via unbiased and symmetric
//! informationally complete measurements.
//!
//! The crate builds three kinds of measurement families on C^d
//! (mutually unbiased bases, MUBs; mutually unbiased measurements,
//! MUMs, with efficiency κ; and general symmetric informationally
//! complete POVMs, GSIC-POVMs, with parameter a) and evaluates separability
//! criteria for multipartite density matrices on
//! C^{d₁} ⊗ C^{d₂} ⊗ ⋯ ⊗ C^{d_m} (m even). Each criterion compares a
//! measurement correlation sum of the operator
//!
//! ```text
//! Δρ = (1/2^{m−2}) (Q_II − Q_I),
//! ```
//!
//! the signed combination of even|even and odd|odd bipartition marginal
//! products, against a bound that any fully separable state must obey.
//! A violation certifies entanglement; applied after coarse-graining to
//! a fixed k-partition it certifies k-nonseparability.
//!
//! # Modules
//!
//! - [`tensor`]: dense complex matrices, Kronecker products, partial
//!   trace, subsystem permutation, Hermitian eigenvalues, density-matrix
//!   validation.
//! - [`measurements`]: MUB/MUM/GSIC constructors and validators.
//! - [`partitions`]: bipartition classes, Δρ, the separable-ensemble
//!   expansion oracle, coarse-graining.
//! - [`criteria`]: the three criteria with selection search and
//!   violation margins.
//! - [`states`]: benchmark states (GHZ, W, Bell, isotropic, random
//!   separable/mixed) and the partial-transpose oracle.
//! - [`schema`]: JSON documents for states and measurement families.
//! - [`cli`]: the `sepcrit` command-line frontend.
//!
//! # Example
//!
//! ```
//! use sepcrit::criteria::{evaluate_thm1, BoundMode, SearchPolicy, Verdict};
//! use sepcrit::measurements::build_mub_prime;
//! use sepcrit::states::bell;
//!
//! let rho = bell();
//! let mubs = vec![build_mub_prime(2).unwrap(), build_mub_prime(2).unwrap()];
//! let report = evaluate_thm1(
//!     &rho,
//!     &mubs,
//!     SearchPolicy::default(),
//!     BoundMode::Proof,
//! )
//! .unwrap();
//! assert_eq!(report.verdict, Verdict::Entangled);
//! assert!((report.margin - 1.0).abs() < 1e-10);
//! ```
//!
//! The runnable programs under `examples/` walk through each capability:
//! `build_measurements`, `bell_detection`, `mixed_dimensions`,
//! `knonseparability`, `noise_scan`, `ppt_crosscheck`,
//! `purity_identities`, `selection_search`.

pub mod cli;
pub mod criteria;
pub mod measurements;
pub mod partitions;
pub mod schema;
pub mod states;
pub mod tensor;
pub mod tol;

pub use num_complex::Complex64;
