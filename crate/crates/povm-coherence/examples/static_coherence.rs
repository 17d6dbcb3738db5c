//! Coherence of states with respect to a POVM.
//!
//! Evaluates the relative-entropy coherence of a few landmark states under
//! the bundled four-outcome POVM, then compares the POVM measure with the
//! plain basis coherence for a custom two-outcome measurement.
//!
//! Run with: cargo run --release -p povm-coherence --example static_coherence

use std::f64::consts::PI;

use povm_coherence::coherence::{
    povm_relative_entropy_coherence, standard_relative_entropy_coherence,
};
use povm_coherence::quantum::{bloch_state, BlochPoint, DensityMatrix, Povm};
use povm_coherence::scenarios::reference_example;

fn main() -> povm_coherence::Result<()> {
    let example = reference_example()?;

    println!("four-outcome qubit POVM, effects (1/2)|phi_k><phi_k|:");
    let states = [
        ("|0><0|", DensityMatrix::basis_state(2, 0)?),
        ("|1><1|", DensityMatrix::basis_state(2, 1)?),
        ("|+><+|", bloch_state(&BlochPoint::pure(PI / 2.0, 0.0)?)),
        (
            "|+i><+i|",
            bloch_state(&BlochPoint::pure(PI / 2.0, PI / 2.0)?),
        ),
        ("I/2", DensityMatrix::maximally_mixed(2)),
        (
            "0.8|psi><psi| + 0.2|psi'><psi'| at (pi/3, pi/5)",
            bloch_state(&BlochPoint::new(0.8, PI / 3.0, PI / 5.0)?),
        ),
    ];
    for (name, rho) in &states {
        let value = povm_relative_entropy_coherence(rho, &example.povm)?;
        println!("  C({name}) = {:.12} bits", value.bits());
    }
    println!();
    println!("note: the minimum over all states is 1 bit, reached at I/2 -");
    println!("no state is incoherent for this measurement.");
    println!();

    // For the rank-one basis measurement the POVM measure reduces to the
    // textbook relative entropy of coherence.
    let basis = Povm::computational_basis(2);
    println!("computational-basis POVM (diagonal states are free):");
    for (name, rho) in &states {
        let general = povm_relative_entropy_coherence(rho, &basis)?;
        let direct = standard_relative_entropy_coherence(rho)?;
        println!(
            "  C({name}) = {:.12} bits (basis formula {:.12})",
            general.bits(),
            direct.bits()
        );
    }
    Ok(())
}
