//! Route random circuits with and without Bridge gates and compare the
//! CNOT overhead.
//!
//! ```text
//! cargo run --example routing
//! ```

use qmpc::circuit::random_circuit;
use qmpc::pipeline::{compile, RunConfig};
use qmpc::{devices, CrosstalkTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = devices::heavy_hex16();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut with, mut without) = (0, 0);
    for i in 0..10 {
        let circuit = random_circuit(&format!("r{i}"), 5, 10, 0.6, &mut rng);
        let run = |swap_only| -> Result<_, qmpc::Error> {
            let config = RunConfig {
                swap_only,
                seed: i,
                ..RunConfig::default()
            };
            let job = compile(
                &model,
                std::slice::from_ref(&circuit),
                &CrosstalkTable::new(),
                &config,
            )?
            .remove(0);
            Ok(job.stats.circuits[&circuit.id].clone())
        };
        let (bridged, swapped) = (run(false)?, run(true)?);
        println!(
            "{}: {} CX, +{} with bridges ({} swaps, {} bridges), +{} swap-only",
            circuit.id,
            circuit.cnot_count(),
            bridged.additional_cnots,
            bridged.swaps,
            bridged.bridges,
            swapped.additional_cnots
        );
        with += bridged.additional_cnots;
        without += swapped.additional_cnots;
    }
    println!("total added CX: {with} with bridges, {without} swap-only");
    Ok(())
}
