//! Decide how many random circuits share one device, with and without
//! measured crosstalk.
//!
//! ```text
//! cargo run --example plan -- 0.05
//! ```

use qmpc::circuit::random_circuit;
use qmpc::pipeline::{plan, RunConfig};
use qmpc::{devices, CrosstalkTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let delta: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let model =
        devices::random_calibration(&devices::heavy_hex16(), &mut rng, 0.005..0.04, 0.01..0.06);
    let circuits: Vec<_> = (0..5)
        .map(|i| random_circuit(&format!("c{i}"), 3 + i % 2, 6, 0.5, &mut rng))
        .collect();

    // Every coupler suffers 4x when a neighbouring coupler is busy.
    let mut crosstalk = CrosstalkTable::new();
    for &a in model.edges() {
        for &b in model.edges() {
            let near = !a.shares_qubit(b)
                && [a.lo(), a.hi()]
                    .iter()
                    .any(|&q| model.neighbors(q).iter().any(|&n| b.contains(n)));
            if near {
                crosstalk.insert(a, b, 4.0 * model.edge_error(a));
            }
        }
    }

    let config = RunConfig {
        delta,
        ..RunConfig::default()
    };
    for (label, table) in [
        ("no crosstalk", CrosstalkTable::new()),
        ("crosstalk", crosstalk),
    ] {
        println!("{label}:");
        for (i, p) in plan(&model, &circuits, &table, &config)?.iter().enumerate() {
            println!(
                "  job {i}: {} {:?} loss {:.4}",
                p.verdict, p.selected, p.delta_s
            );
            for part in &p.partitions {
                println!("    {} -> {:?}", part.circuit_id, part.qubits);
            }
        }
    }
    Ok(())
}
