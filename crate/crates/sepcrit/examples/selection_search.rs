//! The selection max behind L, S, R: exhaustive, greedy, and
//! identity-only search over slot injections.
//!
//! ```bash
//! cargo run --example selection_search
//! ```

use sepcrit::criteria::{
    lhs_thm1, search_selections, SearchPolicy, SelectionPlan, SelectionProblem,
};
use sepcrit::measurements::build_mub_prime;
use sepcrit::partitions::delta_rho;
use sepcrit::states::bell;

fn main() {
    // A hand-made instance: three slots injected into a 3-outcome and a
    // 4-outcome subsystem (identity does not apply here). Greedy grabs
    // the 10 first and pays for it; exhaustive finds 9 + 9 + 8.
    let tensor = vec![
        9.0, 10.0, 0.0, 0.0, //
        0.1, 9.0, 0.0, 0.0, //
        0.0, 0.0, 8.0, 0.0,
    ];
    let problem = SelectionProblem {
        slot_count: 3,
        outcomes: vec![3, 4],
        tensors: vec![tensor],
        use_abs: true,
    };
    println!("candidates per group: {}", problem.candidates_per_group());
    for policy in [SearchPolicy::default(), SearchPolicy::Greedy] {
        let (plan, value) = search_selections(&problem, policy).unwrap();
        println!("{policy:?}: value {value}\n{plan}");
    }
    // with equal outcome counts greedy is floored at the identity plan,
    // so exhaustive ≥ greedy ≥ identity always holds
    let square = SelectionProblem {
        slot_count: 3,
        outcomes: vec![3, 3],
        tensors: vec![vec![
            9.0, 10.0, 0.0, //
            0.1, 9.0, 0.0, //
            0.0, 0.0, 8.0,
        ]],
        use_abs: true,
    };
    for policy in [
        SearchPolicy::default(),
        SearchPolicy::Greedy,
        SearchPolicy::Identity,
    ] {
        let (_, value) = search_selections(&square, policy).unwrap();
        println!("square instance, {policy:?}: value {value}");
    }

    // On the Bell state the Y-basis pairing matters: the identity plan
    // and the swapped plan reach the same maximum by different routes.
    let rho = bell();
    let delta = delta_rho(&rho).unwrap();
    let mubs = vec![build_mub_prime(2).unwrap(), build_mub_prime(2).unwrap()];
    let identity = SelectionPlan::identity(3, 2, 2);
    let mut swapped = identity.clone();
    swapped.slots[2][1] = vec![1, 0];
    for (label, sel) in [
        ("identity pairing", &identity),
        ("Y-swap pairing", &swapped),
    ] {
        let value = lhs_thm1(&delta, rho.shape(), &mubs, sel).unwrap();
        println!("\nBell, {label}: L = {value}");
    }
}
