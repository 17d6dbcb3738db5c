//! Coherence measure for channels.
//!
//! Quantifies how much POVM coherence a channel can create: the largest
//! coherence surplus over the identity, clipped at zero. For the bundled
//! POVM the raising unitary reaches the unitary ceiling of 0.5 bits.
//!
//! Run with: cargo run --release -p povm-coherence --example dynamical_measure

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use povm_coherence::dynamical::{dynamical_coherence, power, OptimizerConfig};
use povm_coherence::quantum::Channel;
use povm_coherence::sampling;
use povm_coherence::scenarios::reference_example;

fn main() -> povm_coherence::Result<()> {
    let example = reference_example()?;
    let cfg = OptimizerConfig::default();

    let result = power(&example.u_max, &Channel::identity(2), &example.povm, &cfg)?;
    println!("power of u_max over the identity: {:.9} bits", result.value);
    println!("  grid oracle: {:.9} bits", result.oracle_value);
    if let Some(pt) = &result.diagnostics.witness_bloch {
        println!(
            "  witness: p = {:.6}, theta = {:.6}, phi = {:.6}",
            pt.p(),
            pt.theta(),
            pt.phi()
        );
    }
    println!(
        "  {} restarts, {} converged, {} objective evaluations",
        result.diagnostics.restarts_used,
        result.diagnostics.converged_restarts,
        result.diagnostics.objective_evaluations
    );

    let measure = dynamical_coherence(&example.u_max, &example.povm, &cfg)?;
    println!("channel measure of u_max: {:.9} bits", measure.bits());

    // No unitary can beat 0.5 bits for this POVM; sample a few.
    let quick = OptimizerConfig::quick();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut largest: f64 = 0.0;
    for _ in 0..10 {
        let u = Channel::unitary(sampling::random_unitary(2, &mut rng))?;
        largest = largest.max(dynamical_coherence(&u, &example.povm, &quick)?.bits());
    }
    println!("largest measure among 10 random unitaries: {largest:.9} bits (ceiling 0.5)");
    Ok(())
}
