//! Construction and validation of the three measurement families.
//!
//! MUBs are built explicitly for d = 2 and odd prime d. MUMs and
//! GSIC-POVMs come from the simplex construction over an orthonormal
//! traceless Hermitian operator basis {F_i}: partition the basis into
//! blocks, form the unique (up to the sign root) affine simplex with
//! zero sum and equal norms, and set
//!
//! ```text
//! P_n^(b) = I/d  + t·F_n^(b),   κ = 1/d  + t²(1+√d)²(d−1)
//! P_α    = I/d² + t·G_α,        a = 1/d³ + t²(d+1)²(d²−1)
//! ```
//!
//! The overlap-table validator is the final arbiter of correctness for
//! any family, built or imported.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

use crate::tensor::{CMatrix, TensorError};
use crate::tol;

#[derive(Debug, Error, PartialEq)]
pub enum MeasurementError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("MUB construction supports d = 2 and odd primes only, got {0}; import a file instead")]
    UnsupportedMubDimension(usize),
    #[error("operator basis has dimension {basis} but {expected} was requested")]
    BasisDimensionMismatch { basis: usize, expected: usize },
    #[error("basis count {count} exceeds the maximum {max}")]
    CountTooLarge { count: usize, max: usize },
    #[error("need at least one basis/group")]
    EmptyCount,
    #[error("t = {t} outside the positivity range: min eigenvalue {min_eig:.3e}")]
    TOutOfRange { t: f64, min_eig: f64 },
    #[error("t must be nonzero")]
    ZeroT,
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// d²−1 orthonormal traceless Hermitian operators on C^d.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    dim: usize,
    ops: Vec<CMatrix>,
}

impl OperatorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// Max deviation of the Gram matrix Tr(F_i F_j) from δ_ij, plus
    /// trace and hermiticity residuals folded in.
    pub fn gram_residual(&self) -> f64 {
        let mut r = 0.0f64;
        for (i, a) in self.ops.iter().enumerate() {
            r = r.max(a.trace().norm());
            r = r.max(a.hermiticity_residual());
            for (j, b) in self.ops.iter().enumerate() {
                let g = a.hs_inner(b);
                let expected = if i == j { 1.0 } else { 0.0 };
                r = r.max((g - C64::new(expected, 0.0)).norm());
            }
        }
        r
    }
}

/// Generalized Gell-Mann basis: (d²−d)/2 symmetric pair operators
/// (E_jk+E_kj)/√2, as many antisymmetric −i(E_jk−E_kj)/√2, and d−1
/// diagonal operators normalized to Tr F² = 1, in that order.
pub fn gell_mann_basis(d: usize) -> Result<OperatorBasis, MeasurementError> {
    if d < 2 {
        return Err(MeasurementError::DimensionTooSmall(d));
    }
    let s = 0.5f64.sqrt();
    let mut ops = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d);
            m.set(j, k, C64::new(s, 0.0));
            m.set(k, j, C64::new(s, 0.0));
            ops.push(m);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d);
            m.set(j, k, C64::new(0.0, -s));
            m.set(k, j, C64::new(0.0, s));
            ops.push(m);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(d);
        for j in 0..l {
            m.set(j, j, C64::new(norm, 0.0));
        }
        m.set(l, l, C64::new(-(l as f64) * norm, 0.0));
        ops.push(m);
    }
    Ok(OperatorBasis { dim: d, ops })
}

/// A set of M orthonormal bases of C^d, pairwise unbiased.
#[derive(Debug, Clone)]
pub struct MubSet {
    dim: usize,
    /// `bases[b][i]` is the i-th column vector of basis b.
    bases: Vec<Vec<Vec<C64>>>,
}

impl MubSet {
    pub fn new(dim: usize, bases: Vec<Vec<Vec<C64>>>) -> Self {
        MubSet { dim, bases }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[Vec<Vec<C64>>] {
        &self.bases
    }

    pub fn vector(&self, basis: usize, i: usize) -> &[C64] {
        &self.bases[basis][i]
    }

    /// Entrywise complex conjugate of every basis vector; the result is
    /// again a valid MUB set. Pairing a maximally entangled state with
    /// the conjugated set on the second subsystem aligns every basis
    /// with its Schmidt partner.
    pub fn conjugated(&self) -> MubSet {
        let bases = self
            .bases
            .iter()
            .map(|b| {
                b.iter()
                    .map(|v| v.iter().map(|z| z.conj()).collect())
                    .collect()
            })
            .collect();
        MubSet {
            dim: self.dim,
            bases,
        }
    }
}

fn is_odd_prime(d: usize) -> bool {
    if d < 3 || d.is_multiple_of(2) {
        return false;
    }
    let mut f = 3;
    while f * f <= d {
        if d.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// Complete set of d+1 MUBs for d = 2 or an odd prime: the
/// computational basis plus the quadratic Gauss-sum bases
/// v_m^(k)[j] = ω^{k j² + m j}/√d with ω = exp(2πi/d); for d = 2 the
/// eigenbases of σz, σx, σy.
pub fn build_mub_prime(d: usize) -> Result<MubSet, MeasurementError> {
    if d == 2 {
        let s = 0.5f64.sqrt();
        let c = |re: f64, im: f64| C64::new(re, im);
        let bases = vec![
            vec![vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(1., 0.)]],
            vec![vec![c(s, 0.), c(s, 0.)], vec![c(s, 0.), c(-s, 0.)]],
            vec![vec![c(s, 0.), c(0., s)], vec![c(s, 0.), c(0., -s)]],
        ];
        return Ok(MubSet { dim: 2, bases });
    }
    if !is_odd_prime(d) {
        return Err(MeasurementError::UnsupportedMubDimension(d));
    }
    let amp = 1.0 / (d as f64).sqrt();
    let omega = |e: usize| {
        let angle = 2.0 * PI * (e % d) as f64 / d as f64;
        C64::new(angle.cos() * amp, angle.sin() * amp)
    };
    let mut bases = Vec::with_capacity(d + 1);
    let computational: Vec<Vec<C64>> = (0..d)
        .map(|i| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[i] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    bases.push(computational);
    for k in 0..d {
        let basis: Vec<Vec<C64>> = (0..d)
            .map(|m| (0..d).map(|j| omega(k * j * j + m * j)).collect())
            .collect();
        bases.push(basis);
    }
    Ok(MubSet { dim: d, bases })
}

/// Which sign root the MUM simplex uses; the default `Plus` gives
/// κ = 1/d + t²(1+√d)²(d−1), the alternative `Minus` root
/// κ = 1/d + t²(√d−1)²(d−1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimplexRoot {
    #[default]
    Plus,
    Minus,
}

/// M groups of d unit-trace PSD operators satisfying the mutual
/// unbiasedness overlap table with efficiency κ.
#[derive(Debug, Clone)]
pub struct MumSet {
    dim: usize,
    kappa: f64,
    /// `groups[b][n]` is operator P_n^(b).
    groups: Vec<Vec<CMatrix>>,
}

impl MumSet {
    pub fn new(dim: usize, kappa: f64, groups: Vec<Vec<CMatrix>>) -> Self {
        MumSet { dim, kappa, groups }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn count(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[Vec<CMatrix>] {
        &self.groups
    }

    pub fn op(&self, group: usize, n: usize) -> &CMatrix {
        &self.groups[group][n]
    }

    /// Transpose of every element; the overlap table is invariant, so
    /// this is again a valid MUM set (the measurement conjugate to
    /// `self` for maximally entangled pairings).
    pub fn conjugated(&self) -> MumSet {
        let groups = self
            .groups
            .iter()
            .map(|g| g.iter().map(|p| p.transpose()).collect())
            .collect();
        MumSet {
            dim: self.dim,
            kappa: self.kappa,
            groups,
        }
    }
}

/// d² PSD operators summing to identity with uniform self-overlap a.
#[derive(Debug, Clone)]
pub struct GsicSet {
    dim: usize,
    a: f64,
    ops: Vec<CMatrix>,
}

impl GsicSet {
    pub fn new(dim: usize, a: f64, ops: Vec<CMatrix>) -> Self {
        GsicSet { dim, a, ops }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn conjugated(&self) -> GsicSet {
        GsicSet {
            dim: self.dim,
            a: self.a,
            ops: self.ops.iter().map(|p| p.transpose()).collect(),
        }
    }
}

/// One of the three measurement families.
#[derive(Debug, Clone)]
pub enum MeasurementFamily {
    Mub(MubSet),
    Mum(MumSet),
    Gsic(GsicSet),
}

impl MeasurementFamily {
    pub fn dim(&self) -> usize {
        match self {
            MeasurementFamily::Mub(m) => m.dim(),
            MeasurementFamily::Mum(m) => m.dim(),
            MeasurementFamily::Gsic(g) => g.dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MeasurementFamily::Mub(_) => "mub",
            MeasurementFamily::Mum(_) => "mum",
            MeasurementFamily::Gsic(_) => "gsic",
        }
    }

    pub fn conjugated(&self) -> MeasurementFamily {
        match self {
            MeasurementFamily::Mub(m) => MeasurementFamily::Mub(m.conjugated()),
            MeasurementFamily::Mum(m) => MeasurementFamily::Mum(m.conjugated()),
            MeasurementFamily::Gsic(g) => MeasurementFamily::Gsic(g.conjugated()),
        }
    }
}

/// The MUM simplex operators F_n^(b) for all d+1 blocks of the basis
/// (contiguous slicing in the canonical ordering).
fn mum_simplex(d: usize, basis: &OperatorBasis, root: SimplexRoot) -> Vec<Vec<CMatrix>> {
    let sqrt_d = (d as f64).sqrt();
    let (coef, tail) = match root {
        SimplexRoot::Plus => (sqrt_d * (sqrt_d + 1.0), sqrt_d + 1.0),
        SimplexRoot::Minus => (sqrt_d * (sqrt_d - 1.0), -(sqrt_d - 1.0)),
    };
    let per_block = d - 1;
    (0..d + 1)
        .map(|b| {
            let block = &basis.ops()[b * per_block..(b + 1) * per_block];
            let mut f_sum = CMatrix::zeros(d);
            for f in block {
                f_sum.add_scaled(f, 1.0);
            }
            let mut ops: Vec<CMatrix> = block
                .iter()
                .map(|f| {
                    let mut g = f_sum.clone();
                    g.add_scaled(f, -coef);
                    g
                })
                .collect();
            ops.push(f_sum.scaled_re(tail));
            ops
        })
        .collect()
}

fn min_eig_over(ops: impl Iterator<Item = CMatrix>) -> f64 {
    let mut min = f64::INFINITY;
    for op in ops {
        let e = op
            .hermitian_eigenvalues()
            .expect("simplex operators are Hermitian by construction");
        min = min.min(e[0]);
    }
    min
}

/// Largest t > 0 keeping every P_n^(b) = I/d + t·F_n^(b) PSD, found by
/// bisection; P(t) is affine in t with P(0) = I/d ≻ 0, so the feasible
/// set is an interval around 0.
pub fn mum_max_t(d: usize, basis: &OperatorBasis) -> Result<f64, MeasurementError> {
    mum_max_t_with_root(d, basis, SimplexRoot::default())
}

pub fn mum_max_t_with_root(
    d: usize,
    basis: &OperatorBasis,
    root: SimplexRoot,
) -> Result<f64, MeasurementError> {
    check_basis(d, basis)?;
    let simplex = mum_simplex(d, basis, root);
    Ok(bisect_max_t(d as f64, simplex.iter().flatten()))
}

/// Largest t > 0 keeping every GSIC operator I/d² + t·G_α PSD.
pub fn gsic_max_t(d: usize, basis: &OperatorBasis) -> Result<f64, MeasurementError> {
    check_basis(d, basis)?;
    let simplex = gsic_simplex(d, basis);
    Ok(bisect_max_t((d * d) as f64, simplex.iter()))
}

fn check_basis(d: usize, basis: &OperatorBasis) -> Result<(), MeasurementError> {
    if d < 2 {
        return Err(MeasurementError::DimensionTooSmall(d));
    }
    if basis.dim() != d {
        return Err(MeasurementError::BasisDimensionMismatch {
            basis: basis.dim(),
            expected: d,
        });
    }
    Ok(())
}

/// Bisect for the largest t with min_n λ_min(I/denom + t F_n) above the
/// PSD floor.
fn bisect_max_t<'a>(denom: f64, simplex: impl Iterator<Item = &'a CMatrix> + Clone) -> f64 {
    let dim = simplex.clone().next().expect("simplex is nonempty").dim();
    let feasible = |t: f64| -> bool {
        let ops = simplex.clone().map(|f| {
            let mut p = CMatrix::identity(dim).scaled_re(1.0 / denom);
            p.add_scaled(f, t);
            p
        });
        min_eig_over(ops) >= tol::MAX_T_PSD_FLOOR
    };
    let mut lo = 0.0f64;
    let mut hi = 0.25;
    while feasible(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return lo; // cannot happen for traceless nonzero simplexes
        }
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Closed-form efficiency of the built MUM family at scale t.
pub fn mum_kappa(d: usize, t: f64, root: SimplexRoot) -> f64 {
    let sqrt_d = (d as f64).sqrt();
    let factor = match root {
        SimplexRoot::Plus => (1.0 + sqrt_d).powi(2),
        SimplexRoot::Minus => (sqrt_d - 1.0).powi(2),
    };
    1.0 / d as f64 + t * t * factor * (d as f64 - 1.0)
}

/// Closed-form GSIC parameter at scale t.
pub fn gsic_a(d: usize, t: f64) -> f64 {
    let df = d as f64;
    1.0 / df.powi(3) + t * t * (df + 1.0).powi(2) * (df * df - 1.0)
}

/// Build M ≤ d+1 MUM groups at simplex scale t over the given basis.
pub fn build_mum(
    d: usize,
    count: usize,
    t: f64,
    basis: &OperatorBasis,
) -> Result<MumSet, MeasurementError> {
    build_mum_with_root(d, count, t, basis, SimplexRoot::default())
}

pub fn build_mum_with_root(
    d: usize,
    count: usize,
    t: f64,
    basis: &OperatorBasis,
    root: SimplexRoot,
) -> Result<MumSet, MeasurementError> {
    check_basis(d, basis)?;
    if count == 0 {
        return Err(MeasurementError::EmptyCount);
    }
    if count > d + 1 {
        return Err(MeasurementError::CountTooLarge { count, max: d + 1 });
    }
    if t == 0.0 {
        return Err(MeasurementError::ZeroT);
    }
    let simplex = mum_simplex(d, basis, root);
    let groups: Vec<Vec<CMatrix>> = simplex[..count]
        .iter()
        .map(|block| {
            block
                .iter()
                .map(|f| {
                    let mut p = CMatrix::identity(d).scaled_re(1.0 / d as f64);
                    p.add_scaled(f, t);
                    p
                })
                .collect()
        })
        .collect();
    let min_eig = min_eig_over(groups.iter().flatten().cloned());
    if min_eig < -1e-10 {
        return Err(MeasurementError::TOutOfRange { t, min_eig });
    }
    Ok(MumSet {
        dim: d,
        kappa: mum_kappa(d, t, root),
        groups,
    })
}

/// The GSIC simplex G_α over the full d²−1 dimensional basis.
fn gsic_simplex(d: usize, basis: &OperatorBasis) -> Vec<CMatrix> {
    let df = d as f64;
    let mut f_sum = CMatrix::zeros(d);
    for f in basis.ops() {
        f_sum.add_scaled(f, 1.0);
    }
    let mut ops: Vec<CMatrix> = basis
        .ops()
        .iter()
        .map(|f| {
            let mut g = f_sum.clone();
            g.add_scaled(f, -df * (df + 1.0));
            g
        })
        .collect();
    ops.push(f_sum.scaled_re(df + 1.0));
    ops
}

/// Build the d² GSIC operators at simplex scale t.
pub fn build_gsic(d: usize, t: f64, basis: &OperatorBasis) -> Result<GsicSet, MeasurementError> {
    check_basis(d, basis)?;
    if t == 0.0 {
        return Err(MeasurementError::ZeroT);
    }
    let simplex = gsic_simplex(d, basis);
    let ops: Vec<CMatrix> = simplex
        .iter()
        .map(|g| {
            let mut p = CMatrix::identity(d).scaled_re(1.0 / (d * d) as f64);
            p.add_scaled(g, t);
            p
        })
        .collect();
    let min_eig = min_eig_over(ops.iter().cloned());
    if min_eig < -1e-10 {
        return Err(MeasurementError::TOutOfRange { t, min_eig });
    }
    Ok(GsicSet {
        dim: d,
        a: gsic_a(d, t),
        ops,
    })
}

/// Rank-one projector groups P_n^(b) = |e_n^(b)⟩⟨e_n^(b)| with κ = 1.
pub fn mub_as_mum(mub: &MubSet) -> MumSet {
    let groups = mub
        .bases()
        .iter()
        .map(|basis| basis.iter().map(|v| CMatrix::outer(v)).collect())
        .collect();
    MumSet {
        dim: mub.dim(),
        kappa: 1.0,
        groups,
    }
}

/// Max absolute residual per defining condition of a family.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub entries: Vec<(String, f64)>,
}

impl ResidualReport {
    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_residual() <= tolerance
    }

    pub fn residual(&self, condition: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(c, _)| c == condition)
            .map(|(_, r)| *r)
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (cond, r) in &self.entries {
            writeln!(f, "{cond:<22} {r:.3e}")?;
        }
        Ok(())
    }
}

/// Evaluate every defining equality of the family; a family passes when
/// all residuals are at most [`tol::FAMILY_RESIDUAL`]. Reports, never
/// fails.
pub fn validate_family(fam: &MeasurementFamily) -> ResidualReport {
    match fam {
        MeasurementFamily::Mub(m) => validate_mub(m),
        MeasurementFamily::Mum(m) => validate_mum(m),
        MeasurementFamily::Gsic(g) => validate_gsic(g),
    }
}

fn validate_mub(mub: &MubSet) -> ResidualReport {
    let d = mub.dim();
    let mut ortho = 0.0f64;
    let mut unbiased = 0.0f64;
    let inv_d = 1.0 / d as f64;
    for (b, basis) in mub.bases().iter().enumerate() {
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let ip: C64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((ip - C64::new(expected, 0.0)).norm());
            }
        }
        for other in mub.bases().iter().skip(b + 1) {
            for u in basis {
                for v in other {
                    let ip: C64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                    unbiased = unbiased.max((ip.norm_sqr() - inv_d).abs());
                }
            }
        }
    }
    ResidualReport {
        entries: vec![
            ("orthonormality".into(), ortho),
            ("unbiasedness".into(), unbiased),
        ],
    }
}

fn psd_residual(ops: &mut dyn Iterator<Item = &CMatrix>) -> f64 {
    let mut worst = 0.0f64;
    for op in ops {
        match op.hermitian_eigenvalues() {
            Ok(e) => worst = worst.max((-e[0]).max(0.0)),
            Err(TensorError::NotHermitian { residual }) => worst = worst.max(residual),
            Err(_) => unreachable!(),
        }
    }
    worst
}

fn validate_mum(mum: &MumSet) -> ResidualReport {
    let d = mum.dim();
    let kappa = mum.kappa();
    let inv_d = 1.0 / d as f64;
    let off = (1.0 - kappa) / (d as f64 - 1.0);

    let mut trace_res = 0.0f64;
    let mut sum_res = 0.0f64;
    for group in mum.groups() {
        let mut sum = CMatrix::zeros(d);
        for p in group {
            trace_res = trace_res.max((p.trace() - C64::new(1.0, 0.0)).norm());
            sum.add_scaled(p, 1.0);
        }
        sum_res = sum_res.max(sum.max_abs_diff(&CMatrix::identity(d)));
    }

    let mut self_res = 0.0f64;
    let mut intra_res = 0.0f64;
    let mut cross_res = 0.0f64;
    for (b, group) in mum.groups().iter().enumerate() {
        for (n, p) in group.iter().enumerate() {
            for (b2, group2) in mum.groups().iter().enumerate() {
                for (n2, q) in group2.iter().enumerate() {
                    if (b2, n2) < (b, n) {
                        continue;
                    }
                    let overlap = p.trace_product_re(q);
                    if b == b2 && n == n2 {
                        self_res = self_res.max((overlap - kappa).abs());
                    } else if b == b2 {
                        intra_res = intra_res.max((overlap - off).abs());
                    } else {
                        cross_res = cross_res.max((overlap - inv_d).abs());
                    }
                }
            }
        }
    }
    let psd = psd_residual(&mut mum.groups().iter().flatten());
    ResidualReport {
        entries: vec![
            ("unit_trace".into(), trace_res),
            ("group_sum_identity".into(), sum_res),
            ("psd".into(), psd),
            ("self_overlap_kappa".into(), self_res),
            ("intra_group_overlap".into(), intra_res),
            ("cross_group_overlap".into(), cross_res),
        ],
    }
}

fn validate_gsic(gsic: &GsicSet) -> ResidualReport {
    let d = gsic.dim();
    let a = gsic.a();
    let pairwise = (1.0 - d as f64 * a) / (d as f64 * ((d * d - 1) as f64));

    let mut sum = CMatrix::zeros(d);
    for p in gsic.ops() {
        sum.add_scaled(p, 1.0);
    }
    let sum_res = sum.max_abs_diff(&CMatrix::identity(d));

    let mut self_res = 0.0f64;
    let mut pair_res = 0.0f64;
    for (i, p) in gsic.ops().iter().enumerate() {
        for (j, q) in gsic.ops().iter().enumerate().skip(i) {
            let overlap = p.trace_product_re(q);
            if i == j {
                self_res = self_res.max((overlap - a).abs());
            } else {
                pair_res = pair_res.max((overlap - pairwise).abs());
            }
        }
    }
    let psd = psd_residual(&mut gsic.ops().iter());
    ResidualReport {
        entries: vec![
            ("sum_identity".into(), sum_res),
            ("psd".into(), psd),
            ("self_overlap_a".into(), self_res),
            ("pairwise_overlap".into(), pair_res),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::FAMILY_RESIDUAL;

    #[test]
    fn gell_mann_d2_is_scaled_pauli() {
        let basis = gell_mann_basis(2).unwrap();
        assert_eq!(basis.ops().len(), 3);
        let s = 0.5f64.sqrt();
        // σx/√2
        assert!((basis.ops()[0].get(0, 1) - C64::new(s, 0.0)).norm() < 1e-15);
        // σy/√2
        assert!((basis.ops()[1].get(0, 1) - C64::new(0.0, -s)).norm() < 1e-15);
        // σz/√2
        assert!((basis.ops()[2].get(0, 0) - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((basis.ops()[2].get(1, 1) - C64::new(-s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn gell_mann_orthonormal_up_to_d8() {
        for d in 2..=8 {
            let basis = gell_mann_basis(d).unwrap();
            assert_eq!(basis.ops().len(), d * d - 1);
            let res = basis.gram_residual();
            assert!(res <= 1e-12, "d={d}: Gram residual {res}");
        }
        assert!(gell_mann_basis(1).is_err());
    }

    #[test]
    fn mub_prime_families_validate() {
        for d in [2usize, 3, 5, 7] {
            let mub = build_mub_prime(d).unwrap();
            assert_eq!(mub.count(), d + 1);
            let report = validate_family(&MeasurementFamily::Mub(mub));
            assert!(report.max_residual() <= 1e-12, "d={d}: residuals\n{report}");
        }
    }

    #[test]
    fn mub_rejects_composite_and_prime_powers() {
        for d in [4usize, 6, 8, 9, 10] {
            assert!(matches!(
                build_mub_prime(d),
                Err(MeasurementError::UnsupportedMubDimension(_))
            ));
        }
    }

    #[test]
    fn qubit_mub_cross_overlaps_are_one_over_d() {
        let mub = build_mub_prime(2).unwrap();
        for b in 0..3 {
            for b2 in b + 1..3 {
                for i in 0..2 {
                    for j in 0..2 {
                        let ip: C64 = mub
                            .vector(b, i)
                            .iter()
                            .zip(mub.vector(b2, j))
                            .map(|(x, y)| x.conj() * y)
                            .sum();
                        assert!((ip.norm_sqr() - 0.5).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn conjugated_mub_still_validates() {
        let mub = build_mub_prime(3).unwrap().conjugated();
        let report = validate_family(&MeasurementFamily::Mub(mub));
        assert!(report.max_residual() <= 1e-12);
    }

    #[test]
    fn mum_simplex_zero_sum() {
        let d = 4;
        let basis = gell_mann_basis(d).unwrap();
        for block in mum_simplex(d, &basis, SimplexRoot::Plus) {
            let mut sum = CMatrix::zeros(d);
            for f in &block {
                sum.add_scaled(f, 1.0);
            }
            assert!(sum.max_abs_diff(&CMatrix::zeros(d)) < 1e-12);
        }
    }

    #[test]
    fn mum_kappa_closed_form_d2() {
        // d=2, t=0.1: κ = 0.5 + 0.01·(1+√2)²
        let basis = gell_mann_basis(2).unwrap();
        let mum = build_mum(2, 3, 0.1, &basis).unwrap();
        let expected = 0.5 + 0.01 * (1.0 + 2f64.sqrt()).powi(2);
        assert!((mum.kappa() - expected).abs() < 1e-12);
        assert!((expected - 0.5582842712474619).abs() < 1e-12);
        // measured Tr(P²) agrees with the closed form
        let measured = mum.op(0, 0).trace_product_re(mum.op(0, 0));
        assert!((measured - expected).abs() < 1e-12);
    }

    #[test]
    fn mum_validates_for_small_dims() {
        for d in 2..=5 {
            let basis = gell_mann_basis(d).unwrap();
            let tmax = mum_max_t(d, &basis).unwrap();
            let mum = build_mum(d, d + 1, 0.9 * tmax, &basis).unwrap();
            let report = validate_family(&MeasurementFamily::Mum(mum));
            assert!(report.passes(FAMILY_RESIDUAL), "d={d}: residuals\n{report}");
        }
    }

    #[test]
    fn mum_at_boundary_touches_zero() {
        let d = 3;
        let basis = gell_mann_basis(d).unwrap();
        let tmax = mum_max_t(d, &basis).unwrap();
        let mum = build_mum(d, d + 1, tmax, &basis).unwrap();
        let report = validate_family(&MeasurementFamily::Mum(mum.clone()));
        assert!(report.passes(FAMILY_RESIDUAL), "residuals\n{report}");
        let min_eig = mum
            .groups()
            .iter()
            .flatten()
            .map(|p| p.hermitian_eigenvalues().unwrap()[0])
            .fold(f64::INFINITY, f64::min);
        assert!(
            min_eig.abs() < 1e-6,
            "min eigenvalue at boundary: {min_eig}"
        );
    }

    #[test]
    fn mum_beyond_boundary_fails_psd() {
        let d = 3;
        let basis = gell_mann_basis(d).unwrap();
        let tmax = mum_max_t(d, &basis).unwrap();
        assert!(matches!(
            build_mum(d, d + 1, 1.01 * tmax, &basis),
            Err(MeasurementError::TOutOfRange { .. })
        ));
    }

    #[test]
    fn mum_count_and_t_validation() {
        let basis = gell_mann_basis(3).unwrap();
        assert!(matches!(
            build_mum(3, 5, 0.01, &basis),
            Err(MeasurementError::CountTooLarge { .. })
        ));
        assert!(matches!(
            build_mum(3, 0, 0.01, &basis),
            Err(MeasurementError::EmptyCount)
        ));
        assert!(matches!(
            build_mum(3, 4, 0.0, &basis),
            Err(MeasurementError::ZeroT)
        ));
        assert!(matches!(
            build_mum(3, 4, 0.01, &gell_mann_basis(2).unwrap()),
            Err(MeasurementError::BasisDimensionMismatch { .. })
        ));
    }

    #[test]
    fn mum_alternative_root_also_validates() {
        let d = 3;
        let basis = gell_mann_basis(d).unwrap();
        let tmax = mum_max_t_with_root(d, &basis, SimplexRoot::Minus).unwrap();
        let mum = build_mum_with_root(d, d + 1, 0.8 * tmax, &basis, SimplexRoot::Minus).unwrap();
        let report = validate_family(&MeasurementFamily::Mum(mum.clone()));
        assert!(report.passes(FAMILY_RESIDUAL), "residuals\n{report}");
        let expected = mum_kappa(d, 0.8 * tmax, SimplexRoot::Minus);
        assert!((mum.kappa() - expected).abs() < 1e-12);
    }

    #[test]
    fn mum_negated_t_keeps_kappa() {
        for d in 2..=4 {
            let basis = gell_mann_basis(d).unwrap();
            let tmax = mum_max_t(d, &basis).unwrap();
            let t = 0.3 * tmax;
            let plus = build_mum(d, d + 1, t, &basis).unwrap();
            let minus = build_mum(d, d + 1, -t, &basis).unwrap();
            assert_eq!(plus.kappa(), minus.kappa());
            let report = validate_family(&MeasurementFamily::Mum(minus));
            assert!(report.passes(FAMILY_RESIDUAL), "d={d}\n{report}");
        }
    }

    #[test]
    fn gsic_simplex_sums_to_identity() {
        let d = 3;
        let basis = gell_mann_basis(d).unwrap();
        let gsic = build_gsic(d, 0.01, &basis).unwrap();
        let mut sum = CMatrix::zeros(d);
        for p in gsic.ops() {
            sum.add_scaled(p, 1.0);
        }
        assert!(sum.max_abs_diff(&CMatrix::identity(d)) < 1e-12);
    }

    #[test]
    fn gsic_a_closed_form_d3() {
        // d=3, t=0.01: a = 1/27 + 0.0001·16·8
        let basis = gell_mann_basis(3).unwrap();
        let gsic = build_gsic(3, 0.01, &basis).unwrap();
        let expected = 1.0 / 27.0 + 1e-4 * 16.0 * 8.0;
        assert!((gsic.a() - expected).abs() < 1e-15);
        assert!((expected - 0.04983703703703704).abs() < 1e-15);
        let measured = gsic.ops()[0].trace_product_re(&gsic.ops()[0]);
        assert!((measured - expected).abs() < 1e-12);
        let report = validate_family(&MeasurementFamily::Gsic(gsic));
        assert!(report.passes(FAMILY_RESIDUAL), "residuals\n{report}");
    }

    #[test]
    fn gsic_qubit_boundary_is_rank_one_sic() {
        // With the canonical Gell-Mann basis for d=2 the positivity
        // boundary coincides with a = 1/d²: a genuine SIC-POVM.
        let basis = gell_mann_basis(2).unwrap();
        let tmax = gsic_max_t(2, &basis).unwrap();
        let gsic = build_gsic(2, tmax, &basis).unwrap();
        assert!((gsic.a() - 0.25).abs() < 1e-8, "achieved a = {}", gsic.a());
        for p in gsic.ops() {
            let e = p.hermitian_eigenvalues().unwrap();
            assert!(e[0].abs() <= 1e-8, "second eigenvalue {}", e[0]);
        }
        let report = validate_family(&MeasurementFamily::Gsic(gsic));
        assert!(report.passes(FAMILY_RESIDUAL), "residuals\n{report}");
    }

    #[test]
    fn gsic_beyond_boundary_fails() {
        let basis = gell_mann_basis(3).unwrap();
        let tmax = gsic_max_t(3, &basis).unwrap();
        assert!(matches!(
            build_gsic(3, 1.01 * tmax, &basis),
            Err(MeasurementError::TOutOfRange { .. })
        ));
    }

    #[test]
    fn mub_as_mum_is_unit_efficiency() {
        let mum = mub_as_mum(&build_mub_prime(2).unwrap());
        assert_eq!(mum.kappa(), 1.0);
        let report = validate_family(&MeasurementFamily::Mum(mum.clone()));
        assert!(report.passes(1e-12), "residuals\n{report}");
        // projectors are idempotent
        for group in mum.groups() {
            for p in group {
                let sq = p * p;
                assert!(sq.max_abs_diff(p) < 1e-12);
            }
        }
    }

    #[test]
    fn mub_as_mum_d3_cross_overlaps() {
        let mum = mub_as_mum(&build_mub_prime(3).unwrap());
        for (b, g1) in mum.groups().iter().enumerate() {
            for (b2, g2) in mum.groups().iter().enumerate() {
                if b == b2 {
                    continue;
                }
                for p in g1 {
                    for q in g2 {
                        assert!((p.trace_product_re(q) - 1.0 / 3.0).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn corrupted_family_is_flagged() {
        let basis = gell_mann_basis(2).unwrap();
        let mum = build_mum(2, 3, 0.1, &basis).unwrap();
        let mut groups = mum.groups().to_vec();
        let z = groups[0][0].get(0, 0);
        groups[0][0].set(0, 0, z + C64::new(1e-3, 0.0));
        let corrupted = MumSet::new(2, mum.kappa(), groups);
        let report = validate_family(&MeasurementFamily::Mum(corrupted));
        assert!(report.max_residual() >= 1e-4, "residuals\n{report}");
    }

    #[test]
    fn measured_kappa_and_a_match_closed_forms() {
        for d in 2..=7usize {
            let basis = gell_mann_basis(d).unwrap();
            let tmax = mum_max_t(d, &basis).unwrap();
            for frac in [0.17, 0.42, 0.63, 0.81, 1.0] {
                let t = frac * tmax;
                let mum = build_mum(d, d + 1, t, &basis).unwrap();
                let expected = mum_kappa(d, t, SimplexRoot::Plus);
                for group in mum.groups() {
                    for p in group {
                        assert!((p.trace_product_re(p) - expected).abs() < 1e-10);
                    }
                }
                // at the bisection boundary κ may exceed 1 by the PSD slack
                assert!(
                    expected > 1.0 / d as f64 && expected <= 1.0 + 1e-9,
                    "κ range d={d}"
                );
            }
            let gmax = gsic_max_t(d, &basis).unwrap();
            for frac in [0.3, 0.9] {
                let t = frac * gmax;
                let gsic = build_gsic(d, t, &basis).unwrap();
                let expected = gsic_a(d, t);
                for p in gsic.ops() {
                    assert!((p.trace_product_re(p) - expected).abs() < 1e-10);
                }
                let df = d as f64;
                assert!(expected > 1.0 / df.powi(3) && expected <= 1.0 / (df * df) + 1e-12);
            }
        }
    }

    #[test]
    fn conjugated_families_validate() {
        let basis = gell_mann_basis(3).unwrap();
        let mum = build_mum(3, 4, 0.05, &basis).unwrap().conjugated();
        assert!(validate_family(&MeasurementFamily::Mum(mum)).passes(FAMILY_RESIDUAL));
        let gsic = build_gsic(3, 0.01, &basis).unwrap().conjugated();
        assert!(validate_family(&MeasurementFamily::Gsic(gsic)).passes(FAMILY_RESIDUAL));
    }
}
