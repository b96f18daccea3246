//! Noise-robustness curve of the MUB criterion for isotropic qutrit
//! pairs, with the detection threshold located by bisection.
//!
//! The second subsystem uses the conjugated MUB set, which aligns each
//! basis with its Schmidt partner for |Φ⁺⟩; the threshold then lands on
//! the exact separability boundary p = 1/(d+1).
//!
//! ```bash
//! cargo run --example noise_scan
//! ```

use sepcrit::criteria::{evaluate_thm1, BoundMode, SearchPolicy, Verdict};
use sepcrit::measurements::build_mub_prime;
use sepcrit::states::isotropic;

fn main() {
    let d = 3;
    let mubs = vec![
        build_mub_prime(d).unwrap(),
        build_mub_prime(d).unwrap().conjugated(),
    ];
    let margin_at = |p: f64| {
        evaluate_thm1(
            &isotropic(d, p).unwrap(),
            &mubs,
            SearchPolicy::default(),
            BoundMode::Proof,
        )
        .unwrap()
    };

    println!("p      lhs       rhs       margin     verdict");
    let mut bracket = None;
    let mut prev = 0.0;
    for i in 0..=10 {
        let p = i as f64 / 10.0;
        let r = margin_at(p);
        println!(
            "{p:<6.2} {:<9.6} {:<9.6} {:<+10.6} {}",
            r.lhs, r.rhs, r.margin, r.verdict
        );
        if bracket.is_none() && r.verdict == Verdict::Entangled {
            bracket = Some((prev, p));
        }
        prev = p;
    }

    let (mut lo, mut hi) = bracket.expect("detected somewhere in [0,1]");
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if margin_at(mid).verdict == Verdict::Entangled {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p_star = 0.5 * (lo + hi);
    println!(
        "\ndetection threshold p* = {p_star:.4} (separability boundary 1/(d+1) = {:.4})",
        1.0 / (d as f64 + 1.0)
    );
}
