//! Benchmark states and independent verification oracles.
//!
//! Generators are deterministic functions of (seed, parameters); Haar
//! sampling uses normalized complex-Gaussian vectors from a seeded
//! ChaCha stream, so fixed seeds reproduce identical matrices
//! bit-for-bit.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::tensor::{kron, CMatrix, DensityMatrix, Shape, TensorError};

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("mixing weight {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("ensemble needs at least one term")]
    NoTerms,
    #[error("partial transpose needs a bipartite shape, got {0} subsystems")]
    NotBipartite(usize),
    #[error("transpose block must be 0 or 1, got {0}")]
    BadBlock(usize),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// A fully separable mixture ρ = Σ_k p_k ρ_k¹ ⊗ ⋯ ⊗ ρ_k^m together with
/// its exact ensemble decomposition.
#[derive(Debug, Clone)]
pub struct SeparableEnsemble {
    pub weights: Vec<f64>,
    /// `factors[k][i]` is the k-th term's pure state on subsystem i.
    pub factors: Vec<Vec<DensityMatrix>>,
}

/// |GHZ⟩ = (1/√d) Σ_j |j⟩^{⊗n} as a pure density matrix.
pub fn ghz(n: usize, d: usize) -> DensityMatrix {
    assert!(
        n >= 2 && d >= 2,
        "ghz needs n ≥ 2 parties of dimension d ≥ 2"
    );
    let total = d.pow(n as u32);
    let mut v = vec![C64::new(0.0, 0.0); total];
    let amp = 1.0 / (d as f64).sqrt();
    // |j⟩^{⊗n} sits at flat index j·(d^n − 1)/(d − 1)
    let step = (total - 1) / (d - 1);
    for j in 0..d {
        v[j * step] = C64::new(amp, 0.0);
    }
    DensityMatrix::from_parts_unchecked(CMatrix::outer(&v), Shape::new(vec![d; n]).unwrap())
}

/// Two-qubit |Φ⁺⟩⟨Φ⁺|.
pub fn bell() -> DensityMatrix {
    ghz(2, 2)
}

/// Equal superposition of the n single-excitation qubit basis states.
pub fn w_state(n: usize) -> DensityMatrix {
    assert!(n >= 2, "w_state needs n ≥ 2 parties");
    let total = 1usize << n;
    let mut v = vec![C64::new(0.0, 0.0); total];
    let amp = 1.0 / (n as f64).sqrt();
    for k in 0..n {
        v[1 << (n - 1 - k)] = C64::new(amp, 0.0);
    }
    DensityMatrix::from_parts_unchecked(CMatrix::outer(&v), Shape::new(vec![2; n]).unwrap())
}

/// p·|Φ⁺⟩⟨Φ⁺| + (1−p)·I/d² on shape (d, d).
pub fn isotropic(d: usize, p: f64) -> Result<DensityMatrix, StateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(StateError::InvalidProbability(p));
    }
    assert!(d >= 2);
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    let amp = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        v[j * (d + 1)] = C64::new(amp, 0.0);
    }
    let mut mat = CMatrix::outer(&v).scaled_re(p);
    let bg = (1.0 - p) / ((d * d) as f64);
    for i in 0..d * d {
        let z = mat.get(i, i);
        mat.set(i, i, z + bg);
    }
    Ok(DensityMatrix::from_parts_unchecked(
        mat,
        Shape::new(vec![d, d]).unwrap(),
    ))
}

/// p·ρ + (1−p)·I/D.
pub fn add_white_noise(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix, StateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(StateError::InvalidProbability(p));
    }
    let total = rho.dim();
    let mut mat = rho.mat().scaled_re(p);
    let bg = (1.0 - p) / total as f64;
    for i in 0..total {
        let z = mat.get(i, i);
        mat.set(i, i, z + bg);
    }
    Ok(DensityMatrix::from_parts_unchecked(
        mat,
        rho.shape().clone(),
    ))
}

/// Haar-random unit vector via normalized complex Gaussians.
pub fn haar_vector(dim: usize, rng: &mut impl Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Square matrix of independent complex Gaussians.
pub fn random_ginibre_with(dim: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Hilbert-Schmidt random full-rank mixed state, ρ = GG†/Tr(GG†).
pub fn random_mixed_with(shape: &Shape, rng: &mut impl Rng) -> DensityMatrix {
    let total = shape.total();
    let g = random_ginibre_with(total, rng);
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::from_parts_unchecked(gg.scaled_re(1.0 / tr), shape.clone())
}

/// Seeded wrapper around [`random_mixed_with`].
pub fn random_mixed(shape: &Shape, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_mixed_with(shape, &mut rng)
}

/// Fully separable state with Haar-random pure factors and
/// uniform-simplex weights; returns both the assembled state and its
/// ensemble so the Δρ expansion can be cross-checked exactly.
pub fn random_separable(
    shape: &Shape,
    terms: usize,
    seed: u64,
) -> Result<(DensityMatrix, SeparableEnsemble), StateError> {
    if terms == 0 {
        return Err(StateError::NoTerms);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<f64> = (0..terms).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }

    let mut factors = Vec::with_capacity(terms);
    for _ in 0..terms {
        let term: Vec<DensityMatrix> = shape
            .dims()
            .iter()
            .map(|&d| {
                let v = haar_vector(d, &mut rng);
                DensityMatrix::from_parts_unchecked(
                    CMatrix::outer(&v),
                    Shape::new(vec![d]).unwrap(),
                )
            })
            .collect();
        factors.push(term);
    }

    let total = shape.total();
    let mut mat = CMatrix::zeros(total);
    for (k, term) in factors.iter().enumerate() {
        let mut prod = term[0].mat().clone();
        for f in &term[1..] {
            prod = kron(&prod, f.mat());
        }
        mat.add_scaled(&prod, weights[k]);
    }
    let rho = DensityMatrix::from_parts_unchecked(mat, shape.clone());
    Ok((rho, SeparableEnsemble { weights, factors }))
}

/// Partial transpose of a bipartite state over the chosen block.
pub fn partial_transpose(
    rho: &DensityMatrix,
    transpose_block: usize,
) -> Result<CMatrix, StateError> {
    let dims = rho.shape().dims();
    if dims.len() != 2 {
        return Err(StateError::NotBipartite(dims.len()));
    }
    if transpose_block > 1 {
        return Err(StateError::BadBlock(transpose_block));
    }
    let (d1, d2) = (dims[0], dims[1]);
    let full = rho.mat();
    let idx = |a: usize, b: usize| a * d2 + b;
    let out = CMatrix::from_fn(d1 * d2, |r, c| {
        let (i1, i2) = (r / d2, r % d2);
        let (j1, j2) = (c / d2, c % d2);
        if transpose_block == 0 {
            full.get(idx(j1, i2), idx(i1, j2))
        } else {
            full.get(idx(i1, j2), idx(j1, i2))
        }
    });
    Ok(out)
}

/// Minimum eigenvalue of the partial transpose; negative ⇒ entangled
/// (NPT). For more than two subsystems, coarse-grain to a bipartition
/// first; this refuses ambiguous shapes rather than guessing.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix, transpose_block: usize) -> Result<f64, StateError> {
    let pt = partial_transpose(rho, transpose_block)?;
    Ok(pt.hermitian_eigenvalues()?[0])
}
