//! Compare exhaustive and heuristic partitioning of benchmark circuits on a
//! 27-qubit device.
//!
//! ```text
//! cargo run --example partition
//! ```

use std::time::Instant;

use qmpc::circuit::load_qasm;
use qmpc::hardware::load_hardware;
use qmpc::partition::best_independent;
use qmpc::{CrosstalkTable, PartitionMethod};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = load_hardware(
        "fixtures/toronto_topology.json",
        "fixtures/toronto_calibration.json",
    )?;
    let none = CrosstalkTable::new();
    for name in ["bell", "toffoli3", "qft4", "bv5"] {
        let circuit = load_qasm(format!("benchmarks/{name}.qasm"))?;
        for method in [PartitionMethod::Gsp, PartitionMethod::Qhsp] {
            let start = Instant::now();
            let p = best_independent(&model, &circuit, &none, method, 2.0)?;
            println!(
                "{name:>9} {method:?}: {:?} score {:.4} in {:.1?}",
                p.qubits,
                p.score,
                start.elapsed()
            );
        }
    }
    Ok(())
}
