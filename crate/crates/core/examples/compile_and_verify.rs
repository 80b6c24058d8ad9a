//! Compile every benchmark onto a 27-qubit device, write the merged
//! programs and check each one against its sources by simulation.
//!
//! ```text
//! cargo run --example compile_and_verify -- /tmp/qmpc-out
//! ```

use std::path::PathBuf;

use qmpc::circuit::{load_qasm, parse_program};
use qmpc::hardware::load_hardware;
use qmpc::pipeline::{compile, RunConfig};
use qmpc::verify::check_equivalence;
use qmpc::{CrosstalkTable, QuantumCircuit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&out)?;
    let model = load_hardware(
        "fixtures/toronto_topology.json",
        "fixtures/toronto_calibration.json",
    )?;
    let mut circuits = Vec::new();
    for entry in std::fs::read_dir("benchmarks")? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "qasm") {
            circuits.push(load_qasm(&path)?);
        }
    }
    circuits.sort_by(|a, b| a.id.cmp(&b.id));

    let config = RunConfig {
        seed: 1,
        ..RunConfig::default()
    };
    for (i, job) in compile(&model, &circuits, &CrosstalkTable::new(), &config)?
        .iter()
        .enumerate()
    {
        let qasm = out.join(format!("merged_{i}.qasm"));
        std::fs::write(&qasm, &job.qasm)?;
        std::fs::write(
            out.join(format!("manifest_{i}.json")),
            job.manifest.to_json(),
        )?;

        let merged = parse_program(&job.qasm)?.circuit;
        let sources: Vec<&QuantumCircuit> = circuits
            .iter()
            .filter(|c| job.plan.selected.contains(&c.id))
            .collect();
        let report = check_equivalence(&sources, &merged, &job.manifest)?;
        println!(
            "job {i}: {} {:?} +{} CX, ESP {:.4}, {report}",
            job.stats.verdict, job.plan.selected, job.stats.additional_cnots, job.stats.esp
        );
    }
    Ok(())
}
