//! Construct the three measurement families and check their defining
//! equalities.
//!
//! ```bash
//! cargo run --example build_measurements
//! ```

use sepcrit::measurements::{
    build_gsic, build_mub_prime, build_mum, gell_mann_basis, gsic_a, gsic_max_t, mum_kappa,
    mum_max_t, validate_family, MeasurementFamily, SimplexRoot,
};

fn main() {
    // Complete MUB sets exist here for d = 2 and odd primes.
    for d in [2usize, 3, 5] {
        let mub = build_mub_prime(d).unwrap();
        let report = validate_family(&MeasurementFamily::Mub(mub));
        println!(
            "MUB d={d}: {} bases, max residual {:.2e}",
            d + 1,
            report.max_residual()
        );
    }

    // MUMs and GSIC-POVMs exist for every d; the simplex scale t trades
    // detection strength (larger κ or a) against the positivity margin.
    for d in [2usize, 3, 4, 6] {
        let basis = gell_mann_basis(d).unwrap();
        println!(
            "\noperator basis d={d}: {} ops, Gram residual {:.2e}",
            basis.ops().len(),
            basis.gram_residual()
        );

        let tmax = mum_max_t(d, &basis).unwrap();
        let t = 0.9 * tmax;
        let mum = build_mum(d, d + 1, t, &basis).unwrap();
        let report = validate_family(&MeasurementFamily::Mum(mum.clone()));
        println!(
            "  MUM : max_t = {tmax:.6}, t = 0.9 max_t, κ = {:.6} (closed form {:.6}), residual {:.2e}",
            mum.kappa(),
            mum_kappa(d, t, SimplexRoot::Plus),
            report.max_residual()
        );

        let gmax = gsic_max_t(d, &basis).unwrap();
        let tg = 0.9 * gmax;
        let gsic = build_gsic(d, tg, &basis).unwrap();
        let report = validate_family(&MeasurementFamily::Gsic(gsic.clone()));
        let a_sic = 1.0 / (d * d) as f64;
        println!(
            "  GSIC: bound = {gmax:.6}, a = {:.6} (closed form {:.6}, rank-one at {a_sic:.6}), residual {:.2e}",
            gsic.a(),
            gsic_a(d, tg),
            report.max_residual()
        );
    }

    // At the positivity boundary for d = 2 the construction reaches
    // a = 1/4: a genuine rank-one SIC-POVM.
    let basis = gell_mann_basis(2).unwrap();
    let gsic = build_gsic(2, gsic_max_t(2, &basis).unwrap(), &basis).unwrap();
    let second_eigs: Vec<f64> = gsic
        .ops()
        .iter()
        .map(|p| p.hermitian_eigenvalues().unwrap()[0])
        .collect();
    println!(
        "\nqubit GSIC at the boundary: a = {:.9}, smallest eigenvalues {:?}",
        gsic.a(),
        second_eigs
            .iter()
            .map(|e| format!("{e:.1e}"))
            .collect::<Vec<_>>()
    );
}
