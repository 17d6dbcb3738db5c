//! Certifying channels that never increase coherence.
//!
//! A channel is free for the measure when it cannot increase the POVM
//! coherence of any state. The check is budget-relative: the optimizer
//! searches for a violating state and certifies only when none is found
//! above the budget tolerance.
//!
//! Run with: cargo run --release -p povm-coherence --example cmio_certification

use povm_coherence::dynamical::{certify_cmio, OptimizerConfig};
use povm_coherence::quantum::{Channel, DensityMatrix};
use povm_coherence::scenarios::reference_example;

fn describe(name: &str, verdict: &povm_coherence::CmioVerdict) {
    if verdict.certified_within_budget {
        println!(
            "  {name}: certified (largest increase {:.2e})",
            verdict.max_violation_found
        );
    } else {
        let pt = verdict.witness.as_ref().expect("witness on failure");
        println!(
            "  {name}: NOT certified, creates {:.6} bits (witness eigenvalues {:?})",
            verdict.max_violation_found,
            pt.eigenvalues()
        );
    }
}

fn main() -> povm_coherence::Result<()> {
    let example = reference_example()?;
    let cfg = OptimizerConfig::quick();

    println!("bundled four-outcome POVM:");
    describe(
        "u_min (bit flip)",
        &certify_cmio(&example.u_min, &example.povm, &cfg)?,
    );
    describe(
        "u_min_prime (phase flip)",
        &certify_cmio(&example.u_min_prime, &example.povm, &cfg)?,
    );
    for p in [0.25, 0.5, 0.75] {
        let mixed = Channel::mix(p, &example.u_min, &example.u_min_prime)?;
        describe(
            &format!("{p:.2} u_min + {:.2} u_min_prime", 1.0 - p),
            &certify_cmio(&mixed, &example.povm, &cfg)?,
        );
    }
    describe(
        "u_max (raising unitary)",
        &certify_cmio(&example.u_max, &example.povm, &cfg)?,
    );

    println!("\ncomputational-basis POVM:");
    let basis = povm_coherence::Povm::computational_basis(2);
    let dephase = Channel::kraus(vec![
        DensityMatrix::basis_state(2, 0)?.matrix().clone(),
        DensityMatrix::basis_state(2, 1)?.matrix().clone(),
    ])?;
    describe("full dephasing", &certify_cmio(&dephase, &basis, &cfg)?);
    describe(
        "u_min (basis permutation)",
        &certify_cmio(&example.u_min, &basis, &cfg)?,
    );
    describe(
        "u_max (Hadamard form)",
        &certify_cmio(&example.u_max, &basis, &cfg)?,
    );
    Ok(())
}
