//! The three separability criteria with selection search and violation
//! margins.
//!
//! Each criterion compares a correlation sum of Δρ against a bound any
//! fully separable state obeys:
//!
//! ```text
//! L(ρ) = max Σ_{k=1}^{M} Σ_{i=1}^{d} |⟨i_{1,k}⋯i_{m,k}|Δρ|i_{1,k}⋯i_{m,k}⟩|   (MUBs)
//! S(ρ) = max Σ_{b=1}^{M} Σ_{n=1}^{d} |Tr((⊗_i P_{i,n}^(b)) Δρ)|                (MUMs)
//! R(ρ) = max Σ_{n=1}^{d²} Tr((⊗_i P_{i,n}) Δρ)                                 (GSICs)
//! ```
//!
//! with d = min_j d_j and the max running over per-subsystem slot
//! selections (injections σ_{j,k}: {1..d} → {1..d_j}, pairing
//! included). The right-hand side is min_{a≠b} √r_a·√r_b with radicands
//! built from reduced-state purity sums.
//!
//! Two bound modes are provided. The theorem statements subtract
//! full-basis purity sums ("statement"); their proofs only establish
//! the bound with selected-slot sums ("proof", the default and the
//! guaranteed-valid reading). Full sums dominate subset sums, so the
//! statement RHS is never larger than the proof RHS.
//!
//! Every selection is feasible inside the max, so any search policy
//! yields a valid lower bound of L/S/R: a heuristic search can only
//! under-report margins, never produce a false ENTANGLED verdict.

use itertools::Itertools;
use num_complex::Complex64 as C64;
use std::fmt;
use thiserror::Error;

use crate::measurements::{GsicSet, MeasurementFamily, MubSet, MumSet};
use crate::partitions::{delta_rho, PartitionError};
use crate::tensor::{CMatrix, DensityMatrix, Shape, TensorError};
use crate::tol;

#[derive(Debug, Error, PartialEq)]
pub enum CriterionError {
    #[error("criteria need an even number of subsystems, got {0}")]
    OddSubsystemCount(usize),
    #[error("state has {expected} subsystems but {got} measurement sets were supplied")]
    SubsystemCountMismatch { expected: usize, got: usize },
    #[error(
        "subsystem {subsystem}: state dimension {state_dim} vs measurement dimension {meas_dim}"
    )]
    DimensionMismatch {
        subsystem: usize,
        state_dim: usize,
        meas_dim: usize,
    },
    #[error("subsystem {0} supplies no bases/groups")]
    EmptyMeasurement(usize),
    #[error("MUM group counts must agree across subsystems, got {0:?}")]
    MismatchedGroupCounts(Vec<usize>),
    #[error("selection plan shape does not match the problem")]
    SelectionShape,
    #[error("selection for group {group}, subsystem {subsystem} is out of range or not injective")]
    BadSelection { group: usize, subsystem: usize },
    #[error("exhaustive search would enumerate {count} candidates, above the cap {cap}")]
    CapExceeded { count: u128, cap: u64 },
    #[error("identity selection needs all subsystem outcome counts equal to the slot count")]
    IdentityRequiresEqualDims,
    #[error("purity check expects a single-subsystem state, got {0} subsystems")]
    NotSingleSubsystem(usize),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Which theorem a report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Thm1,
    Thm2,
    Thm3,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::Thm1 => write!(f, "thm1"),
            Criterion::Thm2 => write!(f, "thm2"),
            Criterion::Thm3 => write!(f, "thm3"),
        }
    }
}

/// RHS bound flavor: the theorem text's full purity sums, or the
/// selected-slot sums the proof literally establishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundMode {
    #[default]
    Proof,
    Statement,
}

impl fmt::Display for BoundMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundMode::Proof => write!(f, "proof"),
            BoundMode::Statement => write!(f, "statement"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Entangled,
    NotDetected,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Entangled => write!(f, "ENTANGLED"),
            Verdict::NotDetected => write!(f, "NOT_DETECTED"),
        }
    }
}

/// How the selection max is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchPolicy {
    /// Enumerate every injection tuple (guaranteed optimal) as long as
    /// the candidate count stays at or below the cap.
    Exhaustive { cap: u64 },
    /// Fill slots one at a time with the largest remaining term,
    /// breaking ties lexicographically.
    Greedy,
    /// σ = identity everywhere; valid only when all outcome counts
    /// equal the slot count.
    Identity,
}

impl Default for SearchPolicy {
    fn default() -> Self {
        SearchPolicy::Exhaustive {
            cap: tol::SELECTION_CAP,
        }
    }
}

/// Per group k and subsystem j, an injection from slot labels into that
/// subsystem's outcome labels (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionPlan {
    /// `slots[k][j][i]` = outcome of subsystem j paired into slot i of
    /// group k.
    pub slots: Vec<Vec<Vec<usize>>>,
}

impl SelectionPlan {
    pub fn identity(groups: usize, subsystems: usize, slot_count: usize) -> Self {
        let per_group = vec![(0..slot_count).collect::<Vec<_>>(); subsystems];
        SelectionPlan {
            slots: vec![per_group; groups],
        }
    }

    pub fn groups(&self) -> usize {
        self.slots.len()
    }
}

impl fmt::Display for SelectionPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, group) in self.slots.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            let slot_count = group.first().map_or(0, |a| a.len());
            write!(f, "group {}:", k + 1)?;
            for i in 0..slot_count {
                let tuple = group.iter().map(|a| (a[i] + 1).to_string()).join(",");
                write!(f, " ({tuple})")?;
            }
        }
        Ok(())
    }
}

/// A selection-search instance: per-group value tensors over outcome
/// tuples, reduced under |·| or taken signed.
#[derive(Debug, Clone)]
pub struct SelectionProblem {
    /// Number of slots selected per group (d, or d² for GSICs).
    pub slot_count: usize,
    /// Outcome count per subsystem (d_j, or d_j²).
    pub outcomes: Vec<usize>,
    /// `tensors[k]` is the term value for each outcome tuple of group
    /// k, flattened row-major over `outcomes`.
    pub tensors: Vec<Vec<f64>>,
    /// Reduce |term| (L and S) or the signed term (R).
    pub use_abs: bool,
}

impl SelectionProblem {
    fn strides(&self) -> Vec<usize> {
        let m = self.outcomes.len();
        let mut s = vec![1usize; m];
        for j in (0..m.saturating_sub(1)).rev() {
            s[j] = s[j + 1] * self.outcomes[j + 1];
        }
        s
    }

    #[inline]
    fn contribution(&self, v: f64) -> f64 {
        if self.use_abs {
            v.abs()
        } else {
            v
        }
    }

    fn group_value(&self, k: usize, assign: &[Vec<usize>], strides: &[usize]) -> f64 {
        let tensor = &self.tensors[k];
        (0..self.slot_count)
            .map(|slot| {
                let idx: usize = assign.iter().zip(strides).map(|(a, st)| a[slot] * st).sum();
                self.contribution(tensor[idx])
            })
            .sum()
    }

    /// Objective value of a full selection plan, after validating it.
    pub fn value(&self, sel: &SelectionPlan) -> Result<f64, CriterionError> {
        self.validate_selection(sel)?;
        let strides = self.strides();
        Ok(sel
            .slots
            .iter()
            .enumerate()
            .map(|(k, assign)| self.group_value(k, assign, &strides))
            .sum())
    }

    fn validate_selection(&self, sel: &SelectionPlan) -> Result<(), CriterionError> {
        validate_selection_dims(sel, self.tensors.len(), &self.outcomes, self.slot_count)
    }

    /// Injection tuples per group, with simultaneous slot relabelings
    /// quotiented out (the objective is a sum over slots, so subsystem
    /// 0 can be fixed to ascending subsets).
    pub fn candidates_per_group(&self) -> u128 {
        let s = self.slot_count as u128;
        let mut count = binomial(self.outcomes[0] as u128, s);
        for &n in &self.outcomes[1..] {
            count = count.saturating_mul(falling_factorial(n as u128, s));
        }
        count
    }
}

fn validate_selection_dims(
    sel: &SelectionPlan,
    groups: usize,
    outcomes: &[usize],
    slot_count: usize,
) -> Result<(), CriterionError> {
    if sel.slots.len() != groups {
        return Err(CriterionError::SelectionShape);
    }
    for (k, group) in sel.slots.iter().enumerate() {
        if group.len() != outcomes.len() {
            return Err(CriterionError::SelectionShape);
        }
        for (j, assign) in group.iter().enumerate() {
            let ok = assign.len() == slot_count
                && assign.iter().all(|&o| o < outcomes[j])
                && assign
                    .iter()
                    .collect::<std::collections::BTreeSet<_>>()
                    .len()
                    == assign.len();
            if !ok {
                return Err(CriterionError::BadSelection {
                    group: k,
                    subsystem: j,
                });
            }
        }
    }
    Ok(())
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn falling_factorial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i))
}

/// Enumerate all group assignments: ascending outcome subsets for
/// subsystem 0, all injections for the rest.
fn visit_group_assignments(
    outcomes: &[usize],
    slot_count: usize,
    visit: &mut dyn FnMut(&[Vec<usize>]),
) {
    fn rec(
        outcomes: &[usize],
        slot_count: usize,
        j: usize,
        assign: &mut Vec<Vec<usize>>,
        visit: &mut dyn FnMut(&[Vec<usize>]),
    ) {
        if j == outcomes.len() {
            visit(assign);
            return;
        }
        if j == 0 {
            for comb in (0..outcomes[0]).combinations(slot_count) {
                assign[0] = comb;
                rec(outcomes, slot_count, j + 1, assign, visit);
            }
        } else {
            for perm in (0..outcomes[j]).permutations(slot_count) {
                assign[j] = perm;
                rec(outcomes, slot_count, j + 1, assign, visit);
            }
        }
    }
    let mut assign = vec![Vec::new(); outcomes.len()];
    rec(outcomes, slot_count, 0, &mut assign, visit);
}

fn greedy_group(problem: &SelectionProblem, k: usize, strides: &[usize]) -> Vec<Vec<usize>> {
    let m = problem.outcomes.len();
    let tensor = &problem.tensors[k];
    let mut used: Vec<Vec<bool>> = problem.outcomes.iter().map(|&n| vec![false; n]).collect();
    let mut assign: Vec<Vec<usize>> = vec![Vec::with_capacity(problem.slot_count); m];
    let total: usize = problem.outcomes.iter().product();
    let mut tuple = vec![0usize; m];
    for _ in 0..problem.slot_count {
        let mut best: Option<(f64, Vec<usize>)> = None;
        'combos: for flat in 0..total {
            let mut rem = flat;
            for j in (0..m).rev() {
                tuple[j] = rem % problem.outcomes[j];
                rem /= problem.outcomes[j];
            }
            for j in 0..m {
                if used[j][tuple[j]] {
                    continue 'combos;
                }
            }
            let idx: usize = tuple.iter().zip(strides).map(|(o, st)| o * st).sum();
            let v = problem.contribution(tensor[idx]);
            // strict > keeps the lexicographically first maximizer
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, tuple.clone()));
            }
        }
        let (_, picked) = best.expect("slot count never exceeds outcome counts");
        for j in 0..m {
            used[j][picked[j]] = true;
            assign[j].push(picked[j]);
        }
    }
    assign
}

/// Maximize the objective over selection plans.
///
/// The exhaustive policy enumerates every injection tuple per group
/// (erroring above the cap) and is guaranteed optimal; greedy and
/// identity return feasible lower bounds.
pub fn search_selections(
    problem: &SelectionProblem,
    policy: SearchPolicy,
) -> Result<(SelectionPlan, f64), CriterionError> {
    let groups = problem.tensors.len();
    let strides = problem.strides();
    match policy {
        SearchPolicy::Exhaustive { cap } => {
            let count = problem
                .candidates_per_group()
                .saturating_mul(groups as u128);
            if count > cap as u128 {
                return Err(CriterionError::CapExceeded { count, cap });
            }
            // the objective splits over groups, so optimize each group
            // independently
            let mut plan = Vec::with_capacity(groups);
            let mut total = 0.0;
            for k in 0..groups {
                let mut best: Option<(f64, Vec<Vec<usize>>)> = None;
                visit_group_assignments(&problem.outcomes, problem.slot_count, &mut |assign| {
                    let v = problem.group_value(k, assign, &strides);
                    if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                        best = Some((v, assign.to_vec()));
                    }
                });
                let (v, assign) = best.expect("at least one assignment exists");
                total += v;
                plan.push(assign);
            }
            Ok((SelectionPlan { slots: plan }, total))
        }
        SearchPolicy::Greedy => {
            let mut plan = Vec::with_capacity(groups);
            let mut total = 0.0;
            for k in 0..groups {
                let mut assign = greedy_group(problem, k, &strides);
                let mut value = problem.group_value(k, &assign, &strides);
                // a myopic first pick can lose to the identity plan;
                // floor per group so greedy ≥ identity always holds
                if problem.outcomes.iter().all(|&n| n == problem.slot_count) {
                    let id: Vec<Vec<usize>> =
                        vec![(0..problem.slot_count).collect(); problem.outcomes.len()];
                    let id_value = problem.group_value(k, &id, &strides);
                    if id_value > value {
                        assign = id;
                        value = id_value;
                    }
                }
                total += value;
                plan.push(assign);
            }
            Ok((SelectionPlan { slots: plan }, total))
        }
        SearchPolicy::Identity => {
            if problem.outcomes.iter().any(|&n| n != problem.slot_count) {
                return Err(CriterionError::IdentityRequiresEqualDims);
            }
            let plan = SelectionPlan::identity(groups, problem.outcomes.len(), problem.slot_count);
            let value = problem.value(&plan)?;
            Ok((plan, value))
        }
    }
}

/// The separable-state bound min_{a≠b} √r_a √r_b with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsBound {
    pub value: f64,
    /// Lexicographically first minimizing ordered pair (0-based).
    pub pair: (usize, usize),
    /// The per-subsystem purity sums that were subtracted.
    pub purity_sums: Vec<f64>,
    /// True when a negative radicand was clamped to zero.
    pub clamped: bool,
}

/// RHS ingredients: per-subsystem constants and purity term tables.
#[derive(Debug, Clone)]
struct RhsTables {
    /// C_a, the pure-state purity bound per subsystem.
    constants: Vec<f64>,
    /// `terms[a][k][o]`: squared purity term of subsystem a, group k
    /// (the groups entering the LHS), outcome o.
    terms: Vec<Vec<Vec<f64>>>,
    /// Statement-mode sums: all outcomes over the subsystem's own
    /// basis/group count.
    statement_sums: Vec<f64>,
}

impl RhsTables {
    fn sums_for_selection(&self, sel: &SelectionPlan) -> Vec<f64> {
        (0..self.terms.len())
            .map(|a| {
                sel.slots
                    .iter()
                    .enumerate()
                    .map(|(k, group)| group[a].iter().map(|&o| self.terms[a][k][o]).sum::<f64>())
                    .sum()
            })
            .collect()
    }

    /// Proof-mode sums when every outcome is selected in every LHS
    /// group (all d_j equal d): selection-independent.
    fn full_selected_sums(&self) -> Vec<f64> {
        self.terms
            .iter()
            .map(|per_group| per_group.iter().map(|t| t.iter().sum::<f64>()).sum())
            .collect()
    }
}

fn rhs_from_sums(constants: &[f64], sums: Vec<f64>) -> RhsBound {
    let mut clamped = false;
    let radicands: Vec<f64> = constants
        .iter()
        .zip(&sums)
        .map(|(c, s)| {
            let r = c - s;
            if r < 0.0 {
                clamped = true;
                0.0
            } else {
                r
            }
        })
        .collect();
    let m = radicands.len();
    let mut best = f64::INFINITY;
    let mut pair = (0, 1);
    for a in 0..m {
        for b in 0..m {
            if a == b {
                continue;
            }
            let v = (radicands[a] * radicands[b]).sqrt();
            if v < best {
                best = v;
                pair = (a, b);
            }
        }
    }
    RhsBound {
        value: best,
        pair,
        purity_sums: sums,
        clamped,
    }
}

/// Outcome of one criterion evaluation.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub mode: BoundMode,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub selection: SelectionPlan,
    /// Minimizing (a, b) pair of the RHS, 0-based.
    pub pair: (usize, usize),
    pub purity_sums: Vec<f64>,
    pub clamped: bool,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "criterion   : {}", self.criterion)?;
        writeln!(f, "mode        : {}", self.mode)?;
        writeln!(f, "lhs         : {:.12}", self.lhs)?;
        writeln!(f, "rhs         : {:.12}", self.rhs)?;
        writeln!(f, "margin      : {:.12}", self.margin)?;
        writeln!(f, "verdict     : {}", self.verdict)?;
        writeln!(
            f,
            "min pair    : ({}, {})",
            self.pair.0 + 1,
            self.pair.1 + 1
        )?;
        let sums = self
            .purity_sums
            .iter()
            .map(|s| format!("{s:.6}"))
            .join(", ");
        writeln!(f, "purity sums : [{sums}]")?;
        if self.clamped {
            writeln!(f, "note        : a negative radicand was clamped to 0")?;
        }
        write!(f, "selection   : ")?;
        let sel = self.selection.to_string().replace('\n', "\n              ");
        write!(f, "{sel}")
    }
}

fn verdict_for(margin: f64) -> Verdict {
    if margin > tol::MARGIN_THRESHOLD {
        Verdict::Entangled
    } else {
        Verdict::NotDetected
    }
}

/// Shared evaluation driver. In statement mode (or proof mode with all
/// outcome counts equal, where the selected sums are total) the RHS is
/// selection-independent and the LHS is maximized directly. Otherwise
/// the proof-mode margin couples LHS and RHS through the selection:
/// exhaustive search then enumerates the joint space, while greedy and
/// identity evaluate the bound at their LHS-maximal plan (sound, since
/// every selection is feasible).
fn evaluate_generic(
    criterion: Criterion,
    problem: &SelectionProblem,
    tables: &RhsTables,
    policy: SearchPolicy,
    mode: BoundMode,
) -> Result<CriterionReport, CriterionError> {
    let selection_dependent =
        mode == BoundMode::Proof && problem.outcomes.iter().any(|&n| n != problem.slot_count);

    let (selection, lhs, rhs) = if !selection_dependent {
        let rhs = match mode {
            BoundMode::Statement => rhs_from_sums(&tables.constants, tables.statement_sums.clone()),
            BoundMode::Proof => rhs_from_sums(&tables.constants, tables.full_selected_sums()),
        };
        let (sel, lhs) = search_selections(problem, policy)?;
        (sel, lhs, rhs)
    } else {
        match policy {
            SearchPolicy::Exhaustive { cap } => joint_margin_exhaustive(problem, tables, cap)?,
            SearchPolicy::Greedy | SearchPolicy::Identity => {
                let (sel, lhs) = search_selections(problem, policy)?;
                let rhs = rhs_from_sums(&tables.constants, tables.sums_for_selection(&sel));
                (sel, lhs, rhs)
            }
        }
    };

    let margin = lhs - rhs.value;
    Ok(CriterionReport {
        criterion,
        mode,
        lhs,
        rhs: rhs.value,
        margin,
        verdict: verdict_for(margin),
        selection,
        pair: rhs.pair,
        purity_sums: rhs.purity_sums,
        clamped: rhs.clamped,
    })
}

/// Exhaustive search maximizing the proof-mode margin over the joint
/// selection space (needed only when some `d_j > d`, which couples the
/// RHS to the selection).
fn joint_margin_exhaustive(
    problem: &SelectionProblem,
    tables: &RhsTables,
    cap: u64,
) -> Result<(SelectionPlan, f64, RhsBound), CriterionError> {
    let groups = problem.tensors.len();
    let per_group = problem.candidates_per_group();
    let total = (0..groups).fold(1u128, |acc, _| acc.saturating_mul(per_group));
    if total > cap as u128 {
        return Err(CriterionError::CapExceeded { count: total, cap });
    }

    // materialize one group's candidates; all groups share the structure
    let mut candidates: Vec<Vec<Vec<usize>>> = Vec::with_capacity(per_group as usize);
    visit_group_assignments(&problem.outcomes, problem.slot_count, &mut |assign| {
        candidates.push(assign.to_vec());
    });
    let strides = problem.strides();

    let mut choice = vec![0usize; groups];
    let mut best: Option<(f64, SelectionPlan, f64, RhsBound)> = None;
    loop {
        let sel = SelectionPlan {
            slots: choice.iter().map(|&c| candidates[c].clone()).collect(),
        };
        let lhs: f64 = (0..groups)
            .map(|k| problem.group_value(k, &sel.slots[k], &strides))
            .sum();
        let rhs = rhs_from_sums(&tables.constants, tables.sums_for_selection(&sel));
        let margin = lhs - rhs.value;
        if best.as_ref().is_none_or(|(bm, ..)| margin > *bm) {
            best = Some((margin, sel, lhs, rhs));
        }
        // odometer over group choices
        let mut k = groups;
        loop {
            if k == 0 {
                let (_, sel, lhs, rhs) = best.expect("search space is nonempty");
                return Ok((sel, lhs, rhs));
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < candidates.len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

fn check_common(
    rho: &DensityMatrix,
    meas_dims: &[usize],
) -> Result<(usize, usize), CriterionError> {
    let dims = rho.shape().dims();
    let m = dims.len();
    if !m.is_multiple_of(2) {
        return Err(CriterionError::OddSubsystemCount(m));
    }
    if meas_dims.len() != m {
        return Err(CriterionError::SubsystemCountMismatch {
            expected: m,
            got: meas_dims.len(),
        });
    }
    for (j, (&sd, &md)) in dims.iter().zip(meas_dims).enumerate() {
        if sd != md {
            return Err(CriterionError::DimensionMismatch {
                subsystem: j,
                state_dim: sd,
                meas_dim: md,
            });
        }
    }
    let d = *dims.iter().min().expect("shape is nonempty");
    Ok((m, d))
}

fn unravel_table(shape: &Shape) -> Vec<Vec<usize>> {
    (0..shape.total()).map(|x| shape.unravel(x)).collect()
}

// ---------------------------------------------------------------------------
// Theorem 1 (MUBs)
// ---------------------------------------------------------------------------

fn thm1_problem(
    delta: &CMatrix,
    shape: &Shape,
    mubs: &[MubSet],
) -> Result<SelectionProblem, CriterionError> {
    let dims = shape.dims().to_vec();
    let m = dims.len();
    if mubs.len() != m {
        return Err(CriterionError::SubsystemCountMismatch {
            expected: m,
            got: mubs.len(),
        });
    }
    for (j, (&sd, mub)) in dims.iter().zip(mubs).enumerate() {
        if sd != mub.dim() {
            return Err(CriterionError::DimensionMismatch {
                subsystem: j,
                state_dim: sd,
                meas_dim: mub.dim(),
            });
        }
        if mub.count() == 0 {
            return Err(CriterionError::EmptyMeasurement(j));
        }
    }
    let d = *dims.iter().min().unwrap();
    let groups = mubs.iter().map(|mu| mu.count()).min().unwrap();
    let total = shape.total();
    let unravel = unravel_table(shape);

    let mut tensors = Vec::with_capacity(groups);
    for k in 0..groups {
        let mut tensor = vec![0.0f64; total];
        let mut w = vec![C64::new(0.0, 0.0); total];
        for (flat, entry) in tensor.iter_mut().enumerate() {
            let combo = &unravel[flat];
            for (x, wx) in w.iter_mut().enumerate() {
                let xi = &unravel[x];
                let mut amp = C64::new(1.0, 0.0);
                for j in 0..m {
                    amp *= mubs[j].vector(k, combo[j])[xi[j]];
                }
                *wx = amp;
            }
            *entry = delta.expectation(&w).re;
        }
        tensors.push(tensor);
    }
    Ok(SelectionProblem {
        slot_count: d,
        outcomes: dims,
        tensors,
        use_abs: true,
    })
}

fn thm1_tables(rho: &DensityMatrix, mubs: &[MubSet]) -> Result<RhsTables, CriterionError> {
    let dims = rho.shape().dims();
    let lhs_groups = mubs.iter().map(|mu| mu.count()).min().unwrap();
    let m = dims.len();
    let mut constants = Vec::with_capacity(m);
    let mut terms = Vec::with_capacity(m);
    let mut statement_sums = Vec::with_capacity(m);
    for (a, mub) in mubs.iter().enumerate() {
        let reduced = rho.reduced(a)?;
        let d_a = dims[a];
        let m_a = mub.count();
        constants.push(1.0 + (m_a as f64 - 1.0) / d_a as f64);
        let mut per_group = Vec::with_capacity(lhs_groups);
        let mut full = 0.0;
        for k in 0..m_a {
            let row: Vec<f64> = (0..d_a)
                .map(|o| {
                    let diag = reduced.mat().expectation(mub.vector(k, o)).re;
                    diag * diag
                })
                .collect();
            full += row.iter().sum::<f64>();
            if k < lhs_groups {
                per_group.push(row);
            }
        }
        terms.push(per_group);
        statement_sums.push(full);
    }
    Ok(RhsTables {
        constants,
        terms,
        statement_sums,
    })
}

/// The Theorem 1 double sum Σ_k Σ_i |⟨i₁ₖ⋯i_mk|Δρ|i₁ₖ⋯i_mk⟩| for a
/// given selection; any selection is a valid lower bound on L(ρ).
pub fn lhs_thm1(
    delta: &CMatrix,
    shape: &Shape,
    mubs: &[MubSet],
    sel: &SelectionPlan,
) -> Result<f64, CriterionError> {
    let problem = thm1_problem(delta, shape, mubs)?;
    problem.value(sel)
}

/// The Theorem 1 separable bound at the given selection.
pub fn rhs_thm1(
    rho: &DensityMatrix,
    mubs: &[MubSet],
    sel: &SelectionPlan,
    mode: BoundMode,
) -> Result<RhsBound, CriterionError> {
    let meas_dims: Vec<usize> = mubs.iter().map(|mu| mu.dim()).collect();
    let (_, d) = check_common(rho, &meas_dims)?;
    let tables = thm1_tables(rho, mubs)?;
    Ok(match mode {
        BoundMode::Statement => rhs_from_sums(&tables.constants, tables.statement_sums.clone()),
        BoundMode::Proof => {
            let groups = mubs.iter().map(|mu| mu.count()).min().unwrap();
            validate_selection_dims(sel, groups, rho.shape().dims(), d)?;
            rhs_from_sums(&tables.constants, tables.sums_for_selection(sel))
        }
    })
}

/// Evaluate Theorem 1: MUB correlations of Δρ against the separable
/// bound.
pub fn evaluate_thm1(
    rho: &DensityMatrix,
    mubs: &[MubSet],
    policy: SearchPolicy,
    mode: BoundMode,
) -> Result<CriterionReport, CriterionError> {
    let meas_dims: Vec<usize> = mubs.iter().map(|mu| mu.dim()).collect();
    check_common(rho, &meas_dims)?;
    let delta = delta_rho(rho)?;
    let problem = thm1_problem(&delta, rho.shape(), mubs)?;
    let tables = thm1_tables(rho, mubs)?;
    evaluate_generic(Criterion::Thm1, &problem, &tables, policy, mode)
}

// ---------------------------------------------------------------------------
// Theorem 2 (MUMs)
// ---------------------------------------------------------------------------

/// Tensor of Re Tr((⊗_j O_{j,o_j}) Δρ) over outcome tuples, shared by
/// the MUM and GSIC criteria.
fn operator_tensor(delta: &CMatrix, shape: &Shape, ops: &[Vec<&CMatrix>]) -> Vec<f64> {
    let outcome_shape = Shape::new(ops.iter().map(|o| o.len()).collect()).expect("nonempty");
    let combos = outcome_shape.total();
    let unravel_out = unravel_table(&outcome_shape);
    let unravel_x = unravel_table(shape);
    let total = shape.total();
    let m = ops.len();

    let mut tensor = vec![0.0f64; combos];
    for (flat, entry) in tensor.iter_mut().enumerate() {
        let combo = &unravel_out[flat];
        let mut acc = 0.0f64;
        for (x, xi) in unravel_x.iter().enumerate() {
            for (y, yi) in unravel_x.iter().enumerate() {
                // (⊗_j O_j)[x,y] · Δ[y,x]
                let mut amp = C64::new(1.0, 0.0);
                for j in 0..m {
                    amp *= ops[j][combo[j]].get(xi[j], yi[j]);
                }
                let dyx = delta.get(y, x);
                acc += amp.re * dyx.re - amp.im * dyx.im;
            }
        }
        let _ = total;
        *entry = acc;
    }
    tensor
}

fn thm2_problem(
    delta: &CMatrix,
    shape: &Shape,
    mums: &[MumSet],
) -> Result<SelectionProblem, CriterionError> {
    let dims = shape.dims();
    let counts: Vec<usize> = mums.iter().map(|mu| mu.count()).collect();
    if counts.iter().any(|&c| c != counts[0]) {
        return Err(CriterionError::MismatchedGroupCounts(counts));
    }
    if counts[0] == 0 {
        return Err(CriterionError::EmptyMeasurement(0));
    }
    let groups = counts[0];
    let d = *dims.iter().min().unwrap();

    let mut tensors = Vec::with_capacity(groups);
    for b in 0..groups {
        let ops: Vec<Vec<&CMatrix>> = mums
            .iter()
            .map(|mum| mum.groups()[b].iter().collect())
            .collect();
        tensors.push(operator_tensor(delta, shape, &ops));
    }
    Ok(SelectionProblem {
        slot_count: d,
        outcomes: dims.to_vec(),
        tensors,
        use_abs: true,
    })
}

fn thm2_tables(rho: &DensityMatrix, mums: &[MumSet]) -> Result<RhsTables, CriterionError> {
    let dims = rho.shape().dims();
    let groups = mums[0].count();
    let mut constants = Vec::new();
    let mut terms = Vec::new();
    let mut statement_sums = Vec::new();
    for (i, mum) in mums.iter().enumerate() {
        let reduced = rho.reduced(i)?;
        let d_i = dims[i];
        constants.push((groups as f64 - 1.0) / d_i as f64 + mum.kappa());
        let mut per_group = Vec::with_capacity(groups);
        let mut full = 0.0;
        for b in 0..groups {
            let row: Vec<f64> = mum.groups()[b]
                .iter()
                .map(|p| {
                    let tr = p.trace_product_re(reduced.mat());
                    tr * tr
                })
                .collect();
            full += row.iter().sum::<f64>();
            per_group.push(row);
        }
        terms.push(per_group);
        statement_sums.push(full);
    }
    Ok(RhsTables {
        constants,
        terms,
        statement_sums,
    })
}

/// S(ρ) partial sum Σ_b Σ_n |Tr((⊗_i P_{i,n}^(b)) Δρ)| for a given
/// selection.
pub fn lhs_thm2(
    delta: &CMatrix,
    shape: &Shape,
    mums: &[MumSet],
    sel: &SelectionPlan,
) -> Result<f64, CriterionError> {
    let problem = thm2_problem(delta, shape, mums)?;
    problem.value(sel)
}

/// The Theorem 2 separable bound ((M−1)/d_i + κ_i minus purity sums) at
/// the given selection.
pub fn rhs_thm2(
    rho: &DensityMatrix,
    mums: &[MumSet],
    sel: &SelectionPlan,
    mode: BoundMode,
) -> Result<RhsBound, CriterionError> {
    let meas_dims: Vec<usize> = mums.iter().map(|mu| mu.dim()).collect();
    let (_, d) = check_common(rho, &meas_dims)?;
    let counts: Vec<usize> = mums.iter().map(|mu| mu.count()).collect();
    if counts.iter().any(|&c| c != counts[0]) {
        return Err(CriterionError::MismatchedGroupCounts(counts));
    }
    let tables = thm2_tables(rho, mums)?;
    Ok(match mode {
        BoundMode::Statement => rhs_from_sums(&tables.constants, tables.statement_sums.clone()),
        BoundMode::Proof => {
            validate_selection_dims(sel, counts[0], rho.shape().dims(), d)?;
            rhs_from_sums(&tables.constants, tables.sums_for_selection(sel))
        }
    })
}

/// Evaluate Theorem 2: MUM correlations of Δρ against the separable
/// bound. All subsystems must supply the same number of groups.
pub fn evaluate_thm2(
    rho: &DensityMatrix,
    mums: &[MumSet],
    policy: SearchPolicy,
    mode: BoundMode,
) -> Result<CriterionReport, CriterionError> {
    let meas_dims: Vec<usize> = mums.iter().map(|mu| mu.dim()).collect();
    check_common(rho, &meas_dims)?;
    let delta = delta_rho(rho)?;
    let problem = thm2_problem(&delta, rho.shape(), mums)?;
    let tables = thm2_tables(rho, mums)?;
    evaluate_generic(Criterion::Thm2, &problem, &tables, policy, mode)
}

// ---------------------------------------------------------------------------
// Theorem 3 (GSIC-POVMs)
// ---------------------------------------------------------------------------

fn thm3_problem(
    delta: &CMatrix,
    shape: &Shape,
    gsics: &[GsicSet],
    abs_variant: bool,
) -> Result<SelectionProblem, CriterionError> {
    let dims = shape.dims();
    let d = *dims.iter().min().unwrap();
    let ops: Vec<Vec<&CMatrix>> = gsics.iter().map(|g| g.ops().iter().collect()).collect();
    let tensor = operator_tensor(delta, shape, &ops);
    Ok(SelectionProblem {
        slot_count: d * d,
        outcomes: dims.iter().map(|&d_j| d_j * d_j).collect(),
        tensors: vec![tensor],
        use_abs: abs_variant,
    })
}

fn thm3_tables(rho: &DensityMatrix, gsics: &[GsicSet]) -> Result<RhsTables, CriterionError> {
    let dims = rho.shape().dims();
    let mut constants = Vec::new();
    let mut terms = Vec::new();
    let mut statement_sums = Vec::new();
    for (i, gsic) in gsics.iter().enumerate() {
        let reduced = rho.reduced(i)?;
        let d_i = dims[i] as f64;
        constants.push((gsic.a() * d_i * d_i + 1.0) / (d_i * (d_i + 1.0)));
        let row: Vec<f64> = gsic
            .ops()
            .iter()
            .map(|p| {
                let tr = p.trace_product_re(reduced.mat());
                tr * tr
            })
            .collect();
        let full: f64 = row.iter().sum();
        terms.push(vec![row]);
        statement_sums.push(full);
    }
    Ok(RhsTables {
        constants,
        terms,
        statement_sums,
    })
}

/// R(ρ) partial sum Σ_n Tr((⊗_i P_{i,n}) Δρ) for a given selection
/// (signed per the definition; `abs_variant` applies |·| instead).
pub fn lhs_thm3(
    delta: &CMatrix,
    shape: &Shape,
    gsics: &[GsicSet],
    sel: &SelectionPlan,
    abs_variant: bool,
) -> Result<f64, CriterionError> {
    let problem = thm3_problem(delta, shape, gsics, abs_variant)?;
    problem.value(sel)
}

/// The Theorem 3 separable bound at the given selection.
pub fn rhs_thm3(
    rho: &DensityMatrix,
    gsics: &[GsicSet],
    sel: &SelectionPlan,
    mode: BoundMode,
) -> Result<RhsBound, CriterionError> {
    let meas_dims: Vec<usize> = gsics.iter().map(|g| g.dim()).collect();
    let (_, d) = check_common(rho, &meas_dims)?;
    let tables = thm3_tables(rho, gsics)?;
    Ok(match mode {
        BoundMode::Statement => rhs_from_sums(&tables.constants, tables.statement_sums.clone()),
        BoundMode::Proof => {
            let squared: Vec<usize> = rho.shape().dims().iter().map(|&x| x * x).collect();
            validate_selection_dims(sel, 1, &squared, d * d)?;
            rhs_from_sums(&tables.constants, tables.sums_for_selection(sel))
        }
    })
}

/// Evaluate Theorem 3: GSIC correlations of Δρ against the separable
/// bound. The sum is signed by default; `abs_variant` turns on the
/// |·| reading, which the same proof chain also supports.
pub fn evaluate_thm3(
    rho: &DensityMatrix,
    gsics: &[GsicSet],
    policy: SearchPolicy,
    mode: BoundMode,
    abs_variant: bool,
) -> Result<CriterionReport, CriterionError> {
    let meas_dims: Vec<usize> = gsics.iter().map(|g| g.dim()).collect();
    check_common(rho, &meas_dims)?;
    let delta = delta_rho(rho)?;
    let problem = thm3_problem(&delta, rho.shape(), gsics, abs_variant)?;
    let tables = thm3_tables(rho, gsics)?;
    evaluate_generic(Criterion::Thm3, &problem, &tables, policy, mode)
}

// ---------------------------------------------------------------------------
// Purity identities
// ---------------------------------------------------------------------------

/// Result of a purity identity/inequality check on one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct PurityCheck {
    /// Σ [Tr(P ρ)]² (or MUB diagonal squares).
    pub sum: f64,
    /// The bound (MUB/MUM inequalities) or exact value (GSIC identity).
    pub bound: f64,
    /// bound − sum; nonnegative up to tolerance for the inequalities,
    /// |slack| is the residual for the GSIC identity.
    pub slack: f64,
    /// True for the GSIC case, where the relation is an equality.
    pub is_identity: bool,
}

/// Check the measurement purity relations on a single-subsystem state:
/// MUB: Σ_{k,i} ⟨i_k|ρ|i_k⟩² ≤ 1 + (M−1)/d;
/// MUM: Σ_{b,n} [Tr(P_n^(b)ρ)]² ≤ (M−1)/d + (1−κ+(κd−1)Trρ²)/(d−1);
/// GSIC: Σ_α [Tr(P_αρ)]² = ((ad³−1)Trρ² + d(1−ad))/(d(d²−1)) exactly.
pub fn purity_identity_check(
    rho: &DensityMatrix,
    fam: &MeasurementFamily,
) -> Result<PurityCheck, CriterionError> {
    if rho.shape().len() != 1 {
        return Err(CriterionError::NotSingleSubsystem(rho.shape().len()));
    }
    let d = rho.dim();
    if fam.dim() != d {
        return Err(CriterionError::DimensionMismatch {
            subsystem: 0,
            state_dim: d,
            meas_dim: fam.dim(),
        });
    }
    let df = d as f64;
    let (sum, bound, is_identity) = match fam {
        MeasurementFamily::Mub(mub) => {
            let sum: f64 = mub
                .bases()
                .iter()
                .flat_map(|basis| basis.iter())
                .map(|v| {
                    let diag = rho.mat().expectation(v).re;
                    diag * diag
                })
                .sum();
            (sum, 1.0 + (mub.count() as f64 - 1.0) / df, false)
        }
        MeasurementFamily::Mum(mum) => {
            let sum: f64 = mum
                .groups()
                .iter()
                .flatten()
                .map(|p| {
                    let tr = p.trace_product_re(rho.mat());
                    tr * tr
                })
                .sum();
            let kappa = mum.kappa();
            let bound = (mum.count() as f64 - 1.0) / df
                + (1.0 - kappa + (kappa * df - 1.0) * rho.purity()) / (df - 1.0);
            (sum, bound, false)
        }
        MeasurementFamily::Gsic(gsic) => {
            let sum: f64 = gsic
                .ops()
                .iter()
                .map(|p| {
                    let tr = p.trace_product_re(rho.mat());
                    tr * tr
                })
                .sum();
            let a = gsic.a();
            let bound = ((a * df.powi(3) - 1.0) * rho.purity() + df * (1.0 - a * df))
                / (df * (df * df - 1.0));
            (sum, bound, true)
        }
    };
    Ok(PurityCheck {
        sum,
        bound,
        slack: bound - sum,
        is_identity,
    })
}
