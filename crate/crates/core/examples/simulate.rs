//! Print the noiseless outcome distribution of OpenQASM files.
//!
//! ```text
//! cargo run --example simulate -- benchmarks/*.qasm
//! ```

use qmpc::circuit::load_qasm;
use qmpc::verify::simulate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for path in std::env::args().skip(1) {
        let circuit = load_qasm(&path)?;
        let dist = simulate(&circuit)?;
        println!(
            "{} ({} qubits, {} CX)",
            circuit.id,
            circuit.num_qubits,
            circuit.cnot_count()
        );
        for (&outcome, &p) in &dist.probabilities {
            if p > 1e-12 {
                println!("  {}  {:.6}", dist.bitstring(outcome), p);
            }
        }
    }
    Ok(())
}
