//! k-nonseparability of the 4-qubit GHZ state.
//!
//! Run directly on the four parties, the MUB criterion does not see
//! GHZ₄ (every product-MUB diagonal of Δρ is tiny). Coarse-graining to
//! the fixed partition 12|34 merges the parties into two 4-dimensional
//! subsystems, and the MUM criterion then certifies the state as
//! 2-nonseparable with respect to that partition, i.e. entangled across
//! the 12|34 cut.
//!
//! ```bash
//! cargo run --example knonseparability
//! ```

use sepcrit::criteria::{evaluate_thm1, evaluate_thm2, BoundMode, SearchPolicy, Verdict};
use sepcrit::measurements::{build_mub_prime, build_mum, gell_mann_basis, mum_max_t};
use sepcrit::partitions::{coarse_grain, KPartition};
use sepcrit::states::{add_white_noise, ghz};

fn main() {
    let ghz4 = ghz(4, 2);
    let policy = SearchPolicy::default();

    // full-separability test on all four parties
    let mubs = vec![build_mub_prime(2).unwrap(); 4];
    let direct = evaluate_thm1(&ghz4, &mubs, policy, BoundMode::Proof).unwrap();
    println!(
        "four parties, thm1: lhs {:.4} vs rhs {:.4} → {}",
        direct.lhs, direct.rhs, direct.verdict
    );
    assert_eq!(direct.verdict, Verdict::NotDetected);

    // 2-nonseparability with respect to 12|34
    let part = KPartition::parse("1,2|3,4", 4).unwrap();
    let merged = coarse_grain(&ghz4, &part).unwrap();
    println!("\ncoarse-grained to {:?}", merged.shape().dims());

    let basis = gell_mann_basis(4).unwrap();
    let t = 0.9 * mum_max_t(4, &basis).unwrap();
    let mum = build_mum(4, 5, t, &basis).unwrap();
    let mums = vec![mum.clone(), mum.conjugated()];
    let report = evaluate_thm2(&merged, &mums, policy, BoundMode::Proof).unwrap();
    println!("merged pair, thm2 (κ = {:.4}):\n{report}", mum.kappa());
    assert_eq!(report.verdict, Verdict::Entangled);

    // the certificate survives some white noise on the merged state
    for p in [0.9, 0.7, 0.5] {
        let noisy = add_white_noise(&merged, p).unwrap();
        let r = evaluate_thm2(&noisy, &mums, policy, BoundMode::Proof).unwrap();
        println!("p = {p}: margin {:+.6} → {}", r.margin, r.verdict);
    }
}
