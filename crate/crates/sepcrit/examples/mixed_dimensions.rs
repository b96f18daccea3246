//! Detect entanglement of a C² ⊗ C³ state: subsystems of different
//! dimensions.
//!
//! The selection now injects d = 2 slots into the 3-outcome side, and
//! the proof-mode bound (selected-slot purity sums) genuinely differs
//! from the statement-mode bound (full sums).
//!
//! ```bash
//! cargo run --example mixed_dimensions
//! ```

use num_complex::Complex64 as C64;
use sepcrit::criteria::{evaluate_thm1, evaluate_thm2, evaluate_thm3, BoundMode, SearchPolicy};
use sepcrit::measurements::{
    build_gsic, build_mub_prime, build_mum, gell_mann_basis, gsic_max_t, mum_max_t,
};
use sepcrit::states::add_white_noise;
use sepcrit::tensor::{validate_density, CMatrix, Shape};

fn main() {
    // (|0,0⟩ + |1,1⟩)/√2 embedded in 2 ⊗ 3, plus 20% white noise
    let mut v = vec![C64::new(0.0, 0.0); 6];
    let amp = 0.5f64.sqrt();
    v[0] = C64::new(amp, 0.0); // |0⟩|0⟩
    v[4] = C64::new(amp, 0.0); // |1⟩|1⟩
    let pure = validate_density(CMatrix::outer(&v), Shape::new(vec![2, 3]).unwrap()).unwrap();
    let rho = add_white_noise(&pure, 0.8).unwrap();
    let policy = SearchPolicy::default();

    // Theorem 1 with the complete MUB sets of each side (M = min(3,4) = 3)
    let mubs = vec![
        build_mub_prime(2).unwrap(),
        build_mub_prime(3).unwrap().conjugated(),
    ];
    for mode in [BoundMode::Proof, BoundMode::Statement] {
        let r = evaluate_thm1(&rho, &mubs, policy, mode).unwrap();
        println!(
            "thm1 {mode:9}: lhs {:.6}  rhs {:.6}  margin {:+.6}  {}",
            r.lhs, r.rhs, r.margin, r.verdict
        );
    }

    // Theorem 2 with built MUMs; group counts must agree, so use M = 3
    let basis2 = gell_mann_basis(2).unwrap();
    let basis3 = gell_mann_basis(3).unwrap();
    let mums = vec![
        build_mum(2, 3, 0.9 * mum_max_t(2, &basis2).unwrap(), &basis2).unwrap(),
        build_mum(3, 3, 0.9 * mum_max_t(3, &basis3).unwrap(), &basis3)
            .unwrap()
            .conjugated(),
    ];
    for mode in [BoundMode::Proof, BoundMode::Statement] {
        let r = evaluate_thm2(&rho, &mums, policy, mode).unwrap();
        println!(
            "thm2 {mode:9}: lhs {:.6}  rhs {:.6}  margin {:+.6}  {}",
            r.lhs, r.rhs, r.margin, r.verdict
        );
    }

    // Theorem 3: the d² = 4 slots inject into 4 resp. 9 outcomes
    let gsics = vec![
        build_gsic(2, 0.9 * gsic_max_t(2, &basis2).unwrap(), &basis2).unwrap(),
        build_gsic(3, 0.9 * gsic_max_t(3, &basis3).unwrap(), &basis3)
            .unwrap()
            .conjugated(),
    ];
    for mode in [BoundMode::Proof, BoundMode::Statement] {
        let r = evaluate_thm3(&rho, &gsics, policy, mode, false).unwrap();
        println!(
            "thm3 {mode:9}: lhs {:.6}  rhs {:.6}  margin {:+.6}  {}",
            r.lhs, r.rhs, r.margin, r.verdict
        );
    }
}
