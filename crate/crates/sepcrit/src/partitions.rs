//! Bipartition classes, the Δρ operator, and k-partition
//! coarse-graining.
//!
//! For an even number N of parties the unordered bipartitions split
//! into 𝒫_I (odd|odd) and 𝒫_II (even|even), 2^{N−2} of each, with the
//! trivial split {1..N}|∅ counted in 𝒫_II so that Q_II includes ρ
//! itself. Δρ = (1/2^{N−2})(Q_II − Q_I) vanishes on product states and
//! expands as a simplex of ensemble differences on fully separable
//! states; both facts back the criteria.

use thiserror::Error;

use crate::tensor::{
    kron, partial_trace, permute_subsystems, CMatrix, DensityMatrix, Shape, TensorError,
};

#[derive(Debug, Error, PartialEq)]
pub enum PartitionError {
    #[error("party count must be even and at least 2, got {0}")]
    OddPartyCount(usize),
    #[error("bipartition block invalid for {parties} parties")]
    InvalidBlock { parties: usize },
    #[error("bipartition built for {expected} parties, state has {got}")]
    PartyCountMismatch { expected: usize, got: usize },
    #[error("blocks do not form a partition of 0..{0}")]
    NotAPartition(usize),
    #[error("cannot parse partition spec {0:?}: {1}")]
    Parse(String, String),
    #[error("ensemble weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("ensemble is empty or has mismatched factor shapes")]
    BadEnsemble,
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Which parity class an unordered bipartition of an even party count
/// belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityClass {
    /// 𝒫_I: odd number of parties on both sides.
    OddOdd,
    /// 𝒫_II: even number on both sides (includes the trivial split).
    EvenEven,
}

/// An unordered bipartition of parties {0..N−1}, canonicalized so the
/// stored block contains party 0. The full block (empty complement)
/// represents the trivial split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    parties: usize,
    block: Vec<usize>,
}

impl Bipartition {
    pub fn new(parties: usize, block: &[usize]) -> Result<Self, PartitionError> {
        if parties < 2 || !parties.is_multiple_of(2) {
            return Err(PartitionError::OddPartyCount(parties));
        }
        let mut sorted: Vec<usize> = block.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != block.len() || sorted.iter().any(|&p| p >= parties) || sorted.is_empty()
        {
            return Err(PartitionError::InvalidBlock { parties });
        }
        if sorted[0] != 0 {
            // canonicalize to the side containing party 0
            sorted = (0..parties).filter(|p| !sorted.contains(p)).collect();
        }
        Ok(Bipartition {
            parties,
            block: sorted,
        })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn block(&self) -> &[usize] {
        &self.block
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.parties)
            .filter(|p| !self.block.contains(p))
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.block.len() == self.parties
    }

    pub fn parity_class(&self) -> ParityClass {
        if self.block.len().is_multiple_of(2) {
            ParityClass::EvenEven
        } else {
            ParityClass::OddOdd
        }
    }
}

/// All unordered bipartitions of an even party count, split by class.
#[derive(Debug, Clone)]
pub struct BipartitionCatalog {
    pub parties: usize,
    pub class_i: Vec<Bipartition>,
    pub class_ii: Vec<Bipartition>,
}

/// Enumerate 𝒫_I and 𝒫_II; each class has 2^{N−2} members.
pub fn enumerate_bipartitions(parties: usize) -> Result<BipartitionCatalog, PartitionError> {
    if parties < 2 || !parties.is_multiple_of(2) {
        return Err(PartitionError::OddPartyCount(parties));
    }
    let mut class_i = Vec::new();
    let mut class_ii = Vec::new();
    // Every unordered split appears once as "the side containing party 0":
    // party 0 plus any subset of the remaining N−1 parties.
    for mask in 0u64..(1 << (parties - 1)) {
        let mut block = vec![0usize];
        for p in 1..parties {
            if mask >> (p - 1) & 1 == 1 {
                block.push(p);
            }
        }
        let bp = Bipartition { parties, block };
        match bp.parity_class() {
            ParityClass::OddOdd => class_i.push(bp),
            ParityClass::EvenEven => class_ii.push(bp),
        }
    }
    Ok(BipartitionCatalog {
        parties,
        class_i,
        class_ii,
    })
}

/// ρ_A ⊗ ρ_Ā re-permuted so party order matches the original shape;
/// the trivial split returns ρ unchanged.
pub fn marginal_product(rho: &DensityMatrix, bp: &Bipartition) -> Result<CMatrix, PartitionError> {
    let m = rho.shape().len();
    if bp.parties() != m {
        return Err(PartitionError::PartyCountMismatch {
            expected: bp.parties(),
            got: m,
        });
    }
    if bp.is_trivial() {
        return Ok(rho.mat().clone());
    }
    let block = bp.block();
    let comp = bp.complement();
    let rho_a = partial_trace(rho, block)?;
    let rho_b = partial_trace(rho, &comp)?;
    let product = kron(rho_a.mat(), rho_b.mat());

    // In the product, position q holds original subsystem concat[q];
    // gather back so position j holds original subsystem j.
    let concat: Vec<usize> = block.iter().chain(comp.iter()).copied().collect();
    let mut perm = vec![0usize; m];
    for (pos, &orig) in concat.iter().enumerate() {
        perm[orig] = pos;
    }
    let concat_dims: Vec<usize> = concat.iter().map(|&j| rho.shape().dims()[j]).collect();
    let staged = DensityMatrix::from_parts_unchecked(product, Shape::new(concat_dims).unwrap());
    Ok(permute_subsystems(&staged, &perm)?.mat().clone())
}

/// Δρ = (1/2^{m−2})(Q_II − Q_I); Hermitian and traceless.
pub fn delta_rho(rho: &DensityMatrix) -> Result<CMatrix, PartitionError> {
    let m = rho.shape().len();
    let catalog = enumerate_bipartitions(m)?;
    let mut acc = CMatrix::zeros(rho.dim());
    for bp in &catalog.class_ii {
        acc.add_scaled(&marginal_product(rho, bp)?, 1.0);
    }
    for bp in &catalog.class_i {
        acc.add_scaled(&marginal_product(rho, bp)?, -1.0);
    }
    let scale = 1.0 / 2f64.powi(m as i32 - 2);
    Ok(acc.scaled_re(scale))
}

/// The proof-side expansion of Δρ for a fully separable ensemble:
/// (1/2^{m−1}) Σ_{k,l} p_k p_l (ρ_k¹−ρ_l¹) ⊗ ⋯ ⊗ (ρ_k^m−ρ_l^m).
///
/// Independent of [`delta_rho`]'s marginal-product route; the two must
/// agree on any fully separable state.
pub fn separable_delta_oracle(
    weights: &[f64],
    factors: &[Vec<DensityMatrix>],
) -> Result<CMatrix, PartitionError> {
    if weights.len() != factors.len() || factors.is_empty() {
        return Err(PartitionError::BadEnsemble);
    }
    let m = factors[0].len();
    if m == 0 || factors.iter().any(|t| t.len() != m) {
        return Err(PartitionError::BadEnsemble);
    }
    let dims: Vec<usize> = factors[0].iter().map(|f| f.dim()).collect();
    for term in factors {
        for (f, &d) in term.iter().zip(&dims) {
            if f.dim() != d {
                return Err(PartitionError::BadEnsemble);
            }
        }
    }
    let wsum: f64 = weights.iter().sum();
    if (wsum - 1.0).abs() > 1e-12 {
        return Err(PartitionError::WeightSum(wsum));
    }

    let total: usize = dims.iter().product();
    let mut acc = CMatrix::zeros(total);
    for (k, term_k) in factors.iter().enumerate() {
        for (l, term_l) in factors.iter().enumerate() {
            if k == l {
                continue; // difference factors vanish
            }
            let mut prod = term_k[0].mat() - term_l[0].mat();
            for i in 1..m {
                prod = kron(&prod, &(term_k[i].mat() - term_l[i].mat()));
            }
            acc.add_scaled(&prod, weights[k] * weights[l]);
        }
    }
    Ok(acc.scaled_re(1.0 / 2f64.powi(m as i32 - 1)))
}

/// A k-partition of parties {0..N−1} into disjoint nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KPartition {
    blocks: Vec<Vec<usize>>,
}

impl KPartition {
    pub fn new(parties: usize, blocks: &[Vec<usize>]) -> Result<Self, PartitionError> {
        let mut seen = vec![false; parties];
        let mut count = 0usize;
        for block in blocks {
            if block.is_empty() {
                return Err(PartitionError::NotAPartition(parties));
            }
            for &p in block {
                if p >= parties || seen[p] {
                    return Err(PartitionError::NotAPartition(parties));
                }
                seen[p] = true;
                count += 1;
            }
        }
        if count != parties {
            return Err(PartitionError::NotAPartition(parties));
        }
        let mut blocks: Vec<Vec<usize>> = blocks.to_vec();
        for b in &mut blocks {
            b.sort_unstable();
        }
        // deterministic block order: by smallest member
        blocks.sort_by_key(|b| b[0]);
        Ok(KPartition { blocks })
    }

    /// Parse the CLI syntax "1,2|3,4" (1-based parties, bar-separated
    /// blocks).
    pub fn parse(spec: &str, parties: usize) -> Result<Self, PartitionError> {
        let mut blocks = Vec::new();
        for chunk in spec.split('|') {
            let mut block = Vec::new();
            for tok in chunk.split(',') {
                let tok = tok.trim();
                let p: usize = tok.parse().map_err(|_| {
                    PartitionError::Parse(spec.into(), format!("bad party label {tok:?}"))
                })?;
                if p == 0 || p > parties {
                    return Err(PartitionError::Parse(
                        spec.into(),
                        format!("party {p} outside 1..={parties}"),
                    ));
                }
                block.push(p - 1);
            }
            blocks.push(block);
        }
        Self::new(parties, &blocks)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }
}

/// Merge each block into one subsystem: permute parties so blocks are
/// contiguous (block-ascending by smallest member, original order
/// within blocks), then reinterpret the shape as k merged dimensions.
pub fn coarse_grain(
    rho: &DensityMatrix,
    part: &KPartition,
) -> Result<DensityMatrix, PartitionError> {
    let m = rho.shape().len();
    let covered: usize = part.blocks().iter().map(|b| b.len()).sum();
    if covered != m || part.blocks().iter().flatten().any(|&p| p >= m) {
        return Err(PartitionError::NotAPartition(m));
    }
    let perm: Vec<usize> = part.blocks().iter().flatten().copied().collect();
    let permuted = permute_subsystems(rho, &perm)?;
    let dims = permuted.shape().dims().to_vec();
    let mut merged = Vec::with_capacity(part.k());
    let mut at = 0usize;
    for block in part.blocks() {
        merged.push(dims[at..at + block.len()].iter().product());
        at += block.len();
    }
    Ok(permuted.reshaped(Shape::new(merged)?)?)
}
