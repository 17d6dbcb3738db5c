//! Canonical Naimark extension of a POVM.
//!
//! Builds the projective measurement on dimension d*n that reproduces a
//! POVM's statistics on embedded states, verifies the dilation identity on
//! random states, and shows that the block coherence of the embedded state
//! equals the direct POVM coherence.
//!
//! Run with: cargo run --release -p povm-coherence --example naimark_dilation

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use povm_coherence::coherence::{
    block_relative_entropy_coherence, povm_relative_entropy_coherence,
};
use povm_coherence::naimark::{canonical_extension, embed_state, verify_extension};
use povm_coherence::sampling;
use povm_coherence::scenarios::reference_example;

fn main() -> povm_coherence::Result<()> {
    let example = reference_example()?;

    let ext = canonical_extension(&example.povm)?;
    println!(
        "canonical extension: {} outcomes on dimension {} (system {} x ancilla {})",
        ext.measurement().projectors().len(),
        ext.extension_dim(),
        ext.system_dim(),
        ext.ancilla_dim()
    );
    let deviation = verify_extension(&example.povm, &ext, 200, 7)?;
    println!("dilation identity over 200 random states: max deviation {deviation:.3e}");

    // Block coherence of the embedded state equals the direct value.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    println!("\nblock coherence of rho (x) |0><0| vs direct POVM coherence:");
    for _ in 0..5 {
        let rho = sampling::random_density_matrix(2, &mut rng);
        let direct = povm_relative_entropy_coherence(&rho, &example.povm)?;
        let embedded = embed_state(&rho, &ext)?;
        let block = block_relative_entropy_coherence(&embedded, ext.measurement())?;
        println!(
            "  direct {:.12}  block {:.12}  difference {:.3e}",
            direct.bits(),
            block.bits(),
            (direct.bits() - block.bits()).abs()
        );
    }

    // The same works for any POVM, here a random five-outcome qutrit one.
    let povm = sampling::random_povm(3, 5, &mut rng);
    let ext = canonical_extension(&povm)?;
    let deviation = verify_extension(&povm, &ext, 100, 11)?;
    println!(
        "\nrandom qutrit POVM with 5 outcomes: extension on dimension {}, deviation {deviation:.3e}",
        ext.extension_dim()
    );
    Ok(())
}
