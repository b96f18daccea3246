//! The purity relations behind the separable bounds.
//!
//! For every MUB set, Σ_{k,i} ⟨i_k|ρ|i_k⟩² ≤ 1 + (M−1)/d with equality
//! for basis-aligned pure states; the MUM analog carries κ and Tr ρ²;
//! the GSIC relation is an exact identity for any state.
//!
//! ```bash
//! cargo run --example purity_identities
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sepcrit::criteria::purity_identity_check;
use sepcrit::measurements::{
    build_gsic, build_mub_prime, build_mum, gell_mann_basis, gsic_max_t, mum_max_t,
    MeasurementFamily, MubSet,
};
use sepcrit::states::{haar_vector, random_mixed};
use sepcrit::tensor::{validate_density, CMatrix, Shape};

fn main() {
    let d = 3;
    let shape = Shape::new(vec![d]).unwrap();
    let mub = MeasurementFamily::Mub(build_mub_prime(d).unwrap());

    // computational basis states saturate the MUB bound
    let mut entries = vec![0.0; d];
    entries[0] = 1.0;
    let ket0 = validate_density(CMatrix::diag(&entries), shape.clone()).unwrap();
    let check = purity_identity_check(&ket0, &mub).unwrap();
    println!(
        "MUB, |0⟩:            sum {:.6} vs bound {:.6} (slack {:.2e}, saturated)",
        check.sum, check.bound, check.slack
    );

    // a complete MUB set saturates the bound for EVERY pure state (it
    // is a 2-design); with an incomplete set the slack opens up
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let v = haar_vector(d, &mut rng);
    let pure = validate_density(CMatrix::outer(&v), shape.clone()).unwrap();
    let check = purity_identity_check(&pure, &mub).unwrap();
    println!(
        "MUB, Haar pure:      sum {:.6} vs bound {:.6} (slack {:.2e}, complete set)",
        check.sum, check.bound, check.slack
    );
    let partial = MeasurementFamily::Mub(MubSet::new(
        d,
        build_mub_prime(d).unwrap().bases()[..2].to_vec(),
    ));
    let check = purity_identity_check(&pure, &partial).unwrap();
    println!(
        "MUB, Haar pure:      sum {:.6} vs bound {:.6} (slack {:.2e}, M = 2 bases)",
        check.sum, check.bound, check.slack
    );

    // the MUM bound tracks the state's purity through κ
    let basis = gell_mann_basis(d).unwrap();
    let mum = build_mum(d, d + 1, 0.8 * mum_max_t(d, &basis).unwrap(), &basis).unwrap();
    let fam = MeasurementFamily::Mum(mum);
    for (label, rho) in [("pure", pure.clone()), ("mixed", random_mixed(&shape, 7))] {
        let check = purity_identity_check(&rho, &fam).unwrap();
        println!(
            "MUM, {label:5} state:    sum {:.6} vs bound {:.6} (slack {:.2e})",
            check.sum, check.bound, check.slack
        );
    }

    // the GSIC relation is an equality for every state
    let gsic = build_gsic(d, 0.9 * gsic_max_t(d, &basis).unwrap(), &basis).unwrap();
    let fam = MeasurementFamily::Gsic(gsic);
    for seed in 0..3 {
        let rho = random_mixed(&shape, seed);
        let check = purity_identity_check(&rho, &fam).unwrap();
        println!(
            "GSIC, random mixed:  sum {:.9} = value {:.9} (residual {:.2e})",
            check.sum, check.bound, check.slack
        );
    }
}
