//! Dense complex matrix algebra and multipartite index manipulation.
//!
//! Everything here is a pure function of its inputs; matrices are plain
//! row-major `Vec<Complex64>` buffers at desk scale (total dimension
//! ≤ 64 or so), so no sparse or structured storage is attempted.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use thiserror::Error;

use crate::tol::{self, Tolerances};

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("matrix dimensions do not match: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("subsystem index {index} out of range for {count} subsystems")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("duplicate subsystem index {0}")]
    DuplicateIndex(usize),
    #[error("keep set must be nonempty")]
    EmptyKeep,
    #[error("{0:?} is not a permutation of 0..{1}")]
    NotAPermutation(Vec<usize>, usize),
    #[error("subsystem dimensions must all be at least 2, got {0}")]
    BadSubsystemDim(usize),
    #[error("shape must have at least one subsystem")]
    EmptyShape,
    #[error("row data is ragged or does not match the declared dimension")]
    RaggedRows,
}

/// Dense complex square matrix, entries in row-major order.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMatrix { dim, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, TensorError> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(TensorError::RaggedRows);
        }
        Ok(CMatrix {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Real diagonal matrix.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, C64::new(x, 0.0));
        }
        m
    }

    /// Rank-one projector |v⟩⟨v|.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn scaled(&self, s: C64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scaled_re(&self, s: f64) -> Self {
        self.scaled(C64::new(s, 0.0))
    }

    /// self += s · other
    pub fn add_scaled(&mut self, other: &CMatrix, s: f64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    /// Max entrywise |self − self†|.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut r = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                r = r.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        r
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Hilbert-Schmidt inner product Tr(self† · other).
    pub fn hs_inner(&self, other: &CMatrix) -> C64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Re Tr(self · other); exact for products of Hermitian matrices.
    pub fn trace_product_re(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                let b = other.get(j, i);
                acc += a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    /// ⟨v|self|v⟩.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        assert_eq!(self.dim, v.len());
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim {
            let row: C64 = v
                .iter()
                .enumerate()
                .map(|(j, vj)| self.get(i, j) * vj)
                .sum();
            acc += v[i].conj() * row;
        }
        acc
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        kron(self, other)
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>, TensorError> {
        let residual = self.hermiticity_residual();
        if residual > tol::EIGEN_HERMITICITY {
            return Err(TensorError::NotHermitian { residual });
        }
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j));
        let eig = SymmetricEigen::new(m);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    /// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues
    /// and the matching orthonormal eigenvectors as columns.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, CMatrix), TensorError> {
        let residual = self.hermiticity_residual();
        if residual > tol::EIGEN_HERMITICITY {
            return Err(TensorError::NotHermitian { residual });
        }
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j));
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs = CMatrix::from_fn(self.dim, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok((vals, vecs))
    }

    pub fn min_eigenvalue(&self) -> Result<f64, TensorError> {
        Ok(self.hermitian_eigenvalues()?[0])
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

/// Kronecker product: (a ⊗ b)(i·db+k, j·db+l) = a(i,j)·b(k,l).
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (da, db) = (a.dim, b.dim);
    let dim = da * db;
    let mut out = CMatrix::zeros(dim);
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j);
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + k, j * db + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Ordered subsystem dimensions d₁,…,d_m of a multipartite system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self, TensorError> {
        if dims.is_empty() {
            return Err(TensorError::EmptyShape);
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(TensorError::BadSubsystemDim(d));
        }
        Ok(Shape { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides: index = Σ_j x_j · stride_j.
    pub fn strides(&self) -> Vec<usize> {
        let m = self.dims.len();
        let mut s = vec![1usize; m];
        for j in (0..m.saturating_sub(1)).rev() {
            s[j] = s[j + 1] * self.dims[j + 1];
        }
        s
    }

    /// Decompose a flat index into the multi-index (x₁,…,x_m).
    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.dims.len()];
        for j in (0..self.dims.len()).rev() {
            out[j] = index % self.dims[j];
            index /= self.dims[j];
        }
        out
    }
}

/// Which density-matrix invariant failed, with the measured residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InvariantFailure {
    ShapeMismatch {
        matrix_dim: usize,
        shape_total: usize,
    },
    Hermiticity {
        residual: f64,
    },
    Trace {
        residual: f64,
    },
    Positivity {
        min_eigenvalue: f64,
    },
}

impl fmt::Display for InvariantFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantFailure::ShapeMismatch {
                matrix_dim,
                shape_total,
            } => {
                write!(
                    f,
                    "shape mismatch: matrix dim {matrix_dim} vs shape total {shape_total}"
                )
            }
            InvariantFailure::Hermiticity { residual } => {
                write!(f, "hermiticity residual {residual:.3e}")
            }
            InvariantFailure::Trace { residual } => {
                write!(f, "trace residual {residual:.3e}")
            }
            InvariantFailure::Positivity { min_eigenvalue } => {
                write!(f, "min eigenvalue {min_eigenvalue:.3e}")
            }
        }
    }
}

/// Validation error naming every failed invariant and its residual.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationReport {
    pub failures: Vec<InvariantFailure>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not a valid density matrix: ")?;
        for (i, fail) in self.failures.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{fail}")?;
        }
        Ok(())
    }
}

/// A validated density matrix: Hermitian, unit trace, positive
/// semidefinite, with a subsystem shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    shape: Shape,
}

impl DensityMatrix {
    /// Wrap without re-validating; for operations that preserve the
    /// invariants (partial trace, permutation, convex mixing).
    pub(crate) fn from_parts_unchecked(mat: CMatrix, shape: Shape) -> Self {
        debug_assert_eq!(mat.dim(), shape.total());
        DensityMatrix { mat, shape }
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.mat.trace_product_re(&self.mat)
    }

    /// Reduced state of a single subsystem.
    pub fn reduced(&self, subsystem: usize) -> Result<DensityMatrix, TensorError> {
        partial_trace(self, &[subsystem])
    }

    /// Same matrix under a re-interpreted shape (entries untouched).
    pub(crate) fn reshaped(&self, shape: Shape) -> Result<DensityMatrix, TensorError> {
        if shape.total() != self.mat.dim() {
            return Err(TensorError::DimensionMismatch(
                shape.total(),
                self.mat.dim(),
            ));
        }
        Ok(DensityMatrix {
            mat: self.mat.clone(),
            shape,
        })
    }
}

/// Validate all density-matrix invariants at the default tolerances.
pub fn validate_density(mat: CMatrix, shape: Shape) -> Result<DensityMatrix, ValidationReport> {
    validate_density_with(mat, shape, &Tolerances::default())
}

/// Validate with explicit tolerances, reporting every failed invariant.
pub fn validate_density_with(
    mat: CMatrix,
    shape: Shape,
    tols: &Tolerances,
) -> Result<DensityMatrix, ValidationReport> {
    let mut failures = Vec::new();
    if mat.dim() != shape.total() {
        failures.push(InvariantFailure::ShapeMismatch {
            matrix_dim: mat.dim(),
            shape_total: shape.total(),
        });
    }
    let herm = mat.hermiticity_residual();
    if herm > tols.hermiticity {
        failures.push(InvariantFailure::Hermiticity { residual: herm });
    }
    let trace_residual = (mat.trace() - C64::new(1.0, 0.0)).norm();
    if trace_residual > tols.trace {
        failures.push(InvariantFailure::Trace {
            residual: trace_residual,
        });
    }
    // Positivity is checked on the Hermitian part so that a report can
    // still quote a spectrum when hermiticity itself failed.
    let herm_part = CMatrix::from_fn(mat.dim(), |i, j| {
        (mat.get(i, j) + mat.get(j, i).conj()) * 0.5
    });
    let min_eig = herm_part
        .hermitian_eigenvalues()
        .map(|v| v[0])
        .unwrap_or(f64::NEG_INFINITY);
    if min_eig < tols.eigenvalue_floor {
        failures.push(InvariantFailure::Positivity {
            min_eigenvalue: min_eig,
        });
    }
    if failures.is_empty() {
        Ok(DensityMatrix { mat, shape })
    } else {
        Err(ValidationReport { failures })
    }
}

fn check_subsystems(indices: &[usize], count: usize) -> Result<(), TensorError> {
    let mut seen = vec![false; count];
    for &i in indices {
        if i >= count {
            return Err(TensorError::IndexOutOfRange { index: i, count });
        }
        if seen[i] {
            return Err(TensorError::DuplicateIndex(i));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Reduced state on the kept subsystems (0-based), in their original
/// relative order. Implemented by direct index arithmetic over the
/// multi-index decomposition so subsystem ordering stays explicit.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix, TensorError> {
    if keep.is_empty() {
        return Err(TensorError::EmptyKeep);
    }
    let dims = rho.shape().dims();
    let m = dims.len();
    check_subsystems(keep, m)?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (0..m).filter(|j| !keep.contains(j)).collect();

    let strides = rho.shape().strides();
    // Flat offsets contributed by every kept (resp. traced) multi-index.
    let offsets = |subs: &[usize]| -> Vec<usize> {
        let sub_dims: Vec<usize> = subs.iter().map(|&j| dims[j]).collect();
        let total: usize = sub_dims.iter().product();
        let mut out = Vec::with_capacity(total);
        for mut flat in 0..total {
            let mut off = 0;
            for p in (0..subs.len()).rev() {
                off += (flat % sub_dims[p]) * strides[subs[p]];
                flat /= sub_dims[p];
            }
            out.push(off);
        }
        out
    };
    let keep_off = offsets(&keep);
    let traced_off = if traced.is_empty() {
        vec![0]
    } else {
        offsets(&traced)
    };

    let dk = keep_off.len();
    let full = rho.mat();
    let n = full.dim();
    let mut out = CMatrix::zeros(dk);
    for (a, &ra) in keep_off.iter().enumerate() {
        for (b, &rb) in keep_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += full.data[(ra + t) * n + (rb + t)];
            }
            out.set(a, b, acc);
        }
    }
    let new_shape = Shape::new(keep.iter().map(|&j| dims[j]).collect())?;
    Ok(DensityMatrix::from_parts_unchecked(out, new_shape))
}

/// Relabel subsystems: position `i` of the result holds subsystem
/// `perm[i]` of the input. Pure index shuffling, so applying a
/// permutation and then its inverse restores the input exactly.
pub fn permute_subsystems(
    rho: &DensityMatrix,
    perm: &[usize],
) -> Result<DensityMatrix, TensorError> {
    let dims = rho.shape().dims();
    let m = dims.len();
    if perm.len() != m {
        return Err(TensorError::NotAPermutation(perm.to_vec(), m));
    }
    check_subsystems(perm, m).map_err(|_| TensorError::NotAPermutation(perm.to_vec(), m))?;

    let new_dims: Vec<usize> = perm.iter().map(|&j| dims[j]).collect();
    let new_shape = Shape::new(new_dims)?;
    let old_strides = rho.shape().strides();
    let total = rho.dim();

    // old_index[r'] for every new flat index r'.
    let mut old_index = Vec::with_capacity(total);
    for r in 0..total {
        let multi = new_shape.unravel(r);
        let old: usize = multi
            .iter()
            .enumerate()
            .map(|(i, &x)| x * old_strides[perm[i]])
            .sum();
        old_index.push(old);
    }

    let full = rho.mat();
    let out = CMatrix::from_fn(total, |i, j| full.data[old_index[i] * total + old_index[j]]);
    Ok(DensityMatrix::from_parts_unchecked(out, new_shape))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma_x() -> CMatrix {
        CMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]).unwrap()
    }

    fn sigma_y() -> CMatrix {
        CMatrix::from_rows(&[vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]]).unwrap()
    }

    fn sigma_z() -> CMatrix {
        CMatrix::diag(&[1.0, -1.0])
    }

    #[test]
    fn kron_identities() {
        let i2 = CMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), CMatrix::identity(4));
        let p = CMatrix::diag(&[1.0, 0.0]);
        assert_eq!(kron(&p, &p), CMatrix::diag(&[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_pauli_entries() {
        // σx ⊗ σz expanded by hand: entry (0,2) = 1, entry (1,3) = −1.
        let k = kron(&sigma_x(), &sigma_z());
        assert_eq!(k.get(0, 2), c(1., 0.));
        assert_eq!(k.get(1, 3), c(-1., 0.));
        assert_eq!(k.get(0, 0), c(0., 0.));
    }

    proptest! {
        // Associativity is exact on integer-valued matrices.
        #[test]
        fn kron_associative(
            a in proptest::collection::vec(-3i8..=3, 4),
            b in proptest::collection::vec(-3i8..=3, 4),
            cc in proptest::collection::vec(-3i8..=3, 9),
        ) {
            let m = |v: &[i8], d: usize| CMatrix::from_fn(d, |i, j| c(v[i * d + j] as f64, 0.0));
            let (ma, mb, mc) = (m(&a, 2), m(&b, 2), m(&cc, 3));
            let left = kron(&kron(&ma, &mb), &mc);
            let right = kron(&ma, &kron(&mb, &mc));
            prop_assert_eq!(left, right);
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let rho1 = CMatrix::diag(&[0.25, 0.75]);
        let rho2 = CMatrix::diag(&[0.6, 0.3, 0.1]);
        let joint = validate_density(kron(&rho1, &rho2), Shape::new(vec![2, 3]).unwrap()).unwrap();
        let red = partial_trace(&joint, &[0]).unwrap();
        assert!(red.mat().max_abs_diff(&rho1) < 1e-12);
        let red2 = partial_trace(&joint, &[1]).unwrap();
        assert!(red2.mat().max_abs_diff(&rho2) < 1e-12);
    }

    #[test]
    fn partial_trace_bell_marginal() {
        let bell = states::bell();
        let red = partial_trace(&bell, &[0]).unwrap();
        assert!(red.mat().max_abs_diff(&CMatrix::diag(&[0.5, 0.5])) < 1e-12);
    }

    #[test]
    fn partial_trace_ghz3_outer_pair() {
        // Tracing the middle qubit of GHZ₃ leaves ½(|00⟩⟨00| + |11⟩⟨11|).
        let ghz = states::ghz(3, 2);
        let red = partial_trace(&ghz, &[0, 2]).unwrap();
        let expected = CMatrix::diag(&[0.5, 0.0, 0.0, 0.5]);
        assert!(red.mat().max_abs_diff(&expected) < 1e-12);
        assert!((red.mat().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_keep_order_is_original() {
        let rho1 = CMatrix::diag(&[0.25, 0.75]);
        let rho2 = CMatrix::diag(&[0.6, 0.3, 0.1]);
        let joint = validate_density(kron(&rho1, &rho2), Shape::new(vec![2, 3]).unwrap()).unwrap();
        // keep passed out of order still returns subsystems in original order
        let red = partial_trace(&joint, &[1, 0]).unwrap();
        assert_eq!(red.shape().dims(), &[2, 3]);
        assert!(red.mat().max_abs_diff(joint.mat()) < 1e-12);
    }

    #[test]
    fn partial_trace_errors() {
        let bell = states::bell();
        assert_eq!(partial_trace(&bell, &[]), Err(TensorError::EmptyKeep));
        assert!(matches!(
            partial_trace(&bell, &[2]),
            Err(TensorError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn permute_identity_and_swap() {
        let rho1 = CMatrix::diag(&[0.25, 0.75]);
        let rho2 = CMatrix::diag(&[0.6, 0.3, 0.1]);
        let joint = validate_density(kron(&rho1, &rho2), Shape::new(vec![2, 3]).unwrap()).unwrap();
        let id = permute_subsystems(&joint, &[0, 1]).unwrap();
        assert_eq!(id.mat(), joint.mat());
        let swapped = permute_subsystems(&joint, &[1, 0]).unwrap();
        assert_eq!(swapped.shape().dims(), &[3, 2]);
        assert!(swapped.mat().max_abs_diff(&kron(&rho2, &rho1)) < 1e-12);
    }

    #[test]
    fn permute_bell_fixed_point() {
        let bell = states::bell();
        let swapped = permute_subsystems(&bell, &[1, 0]).unwrap();
        assert!(swapped.mat().max_abs_diff(bell.mat()) < 1e-12);
    }

    #[test]
    fn permute_involution_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = states::random_mixed_with(&Shape::new(vec![2, 3, 2]).unwrap(), &mut rng);
        let perm = [2usize, 0, 1];
        // inverse of perm as "new position -> old index"
        let mut inv = [0usize; 3];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let there = permute_subsystems(&rho, &perm).unwrap();
        let back = permute_subsystems(&there, &inv).unwrap();
        assert_eq!(back.mat(), rho.mat());
        assert_eq!(back.shape(), rho.shape());
    }

    #[test]
    fn permute_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rho = states::random_mixed_with(&Shape::new(vec![2, 2, 3]).unwrap(), &mut rng);
            let permuted = permute_subsystems(&rho, &[2, 0, 1]).unwrap();
            let e1 = rho.mat().hermitian_eigenvalues().unwrap();
            let e2 = permuted.mat().hermitian_eigenvalues().unwrap();
            for (a, b) in e1.iter().zip(&e2) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn permute_rejects_non_permutations() {
        let bell = states::bell();
        assert!(matches!(
            permute_subsystems(&bell, &[0, 0]),
            Err(TensorError::NotAPermutation(..))
        ));
        assert!(matches!(
            permute_subsystems(&bell, &[0]),
            Err(TensorError::NotAPermutation(..))
        ));
    }

    #[test]
    fn eigenvalues_simple_cases() {
        let vals = CMatrix::diag(&[3.0, 1.0, 2.0])
            .hermitian_eigenvalues()
            .unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);

        for pauli in [sigma_x(), sigma_y()] {
            let vals = pauli.hermitian_eigenvalues().unwrap();
            assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        }

        // ½(σx+σz) has eigenvalues ±1/√2 (characteristic polynomial λ² = ½).
        let h = (&sigma_x() + &sigma_z()).scaled_re(0.5);
        let vals = h.hermitian_eigenvalues().unwrap();
        let r = 0.5f64.sqrt();
        assert!((vals[0] + r).abs() < 1e-12 && (vals[1] - r).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_sum_matches_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..1000 {
            let d = 2 + trial % 7;
            let g = states::random_ginibre_with(d, &mut rng);
            let h = CMatrix::from_fn(d, |i, j| (g.get(i, j) + g.get(j, i).conj()) * 0.5);
            let vals = h.hermitian_eigenvalues().unwrap();
            let sum: f64 = vals.iter().sum();
            assert!(
                (sum - h.trace().re).abs() < 1e-9,
                "trial {trial}: eigenvalue sum {sum} vs trace {}",
                h.trace().re
            );
        }
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2);
        m.set(0, 1, c(1.0, 0.0));
        assert!(matches!(
            m.hermitian_eigenvalues(),
            Err(TensorError::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = states::random_mixed_with(&Shape::new(vec![2, 2]).unwrap(), &mut rng);
        let (vals, vecs) = rho.mat().hermitian_eigen().unwrap();
        let gram = &vecs.adjoint() * &vecs;
        assert!(gram.max_abs_diff(&CMatrix::identity(4)) < 1e-10);
        // reconstruct ρ = V diag(λ) V†
        let lambda = CMatrix::diag(&vals);
        let rebuilt = &(&vecs * &lambda) * &vecs.adjoint();
        assert!(rebuilt.max_abs_diff(rho.mat()) < 1e-9);
    }

    #[test]
    fn validate_accepts_maximally_mixed() {
        let rho = CMatrix::identity(4).scaled_re(0.25);
        let dm = validate_density(rho, Shape::new(vec![2, 2]).unwrap()).unwrap();
        assert_eq!(dm.shape().dims(), &[2, 2]);
    }

    #[test]
    fn validate_reports_each_failure() {
        // trace 1 but indefinite: only positivity fails
        let m = CMatrix::diag(&[0.6, 0.6, -0.1, -0.1]);
        let report = validate_density(m, Shape::new(vec![2, 2]).unwrap()).unwrap_err();
        assert_eq!(report.failures.len(), 1);
        assert!(matches!(
            report.failures[0],
            InvariantFailure::Positivity { .. }
        ));

        // both trace and positivity off
        let m = CMatrix::diag(&[0.6, 0.6, 0.1, -0.1]);
        let report = validate_density(m, Shape::new(vec![2, 2]).unwrap()).unwrap_err();
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, InvariantFailure::Trace { .. })));
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, InvariantFailure::Positivity { .. })));

        // non-Hermitian
        let mut m = CMatrix::diag(&[0.5, 0.5]);
        m.set(0, 1, c(0.3, 0.0));
        let report = validate_density(m, Shape::new(vec![2]).unwrap()).unwrap_err();
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, InvariantFailure::Hermiticity { .. })));
    }

    #[test]
    fn validate_shape_mismatch() {
        let bell = states::bell();
        let report =
            validate_density(bell.mat().clone(), Shape::new(vec![2, 3]).unwrap()).unwrap_err();
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, InvariantFailure::ShapeMismatch { .. })));
    }

    #[test]
    fn partial_trace_preserves_trace_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let rho = states::random_mixed_with(&Shape::new(vec![2, 3, 2]).unwrap(), &mut rng);
            for keep in [vec![0], vec![1], vec![0, 2], vec![1, 2]] {
                let red = partial_trace(&rho, &keep).unwrap();
                assert!((red.mat().trace().re - 1.0).abs() < 1e-12);
                assert!(red.mat().trace().im.abs() < 1e-12);
            }
        }
    }
}
