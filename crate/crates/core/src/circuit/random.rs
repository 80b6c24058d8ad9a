use rand::seq::SliceRandom;
use rand::Rng;

use super::{OneQubitGate, QuantumCircuit};

/// A layered random circuit with every qubit measured at the end.
///
/// Each of the `layers` layers shuffles the qubits, turns consecutive pairs
/// into CX gates with probability `cx_rate` and gives every other qubit a
/// random single-qubit gate, so the unitary part has depth at most `layers`.
pub fn random_circuit(
    id: &str,
    num_qubits: usize,
    layers: usize,
    cx_rate: f64,
    rng: &mut impl Rng,
) -> QuantumCircuit {
    let mut circuit = QuantumCircuit::new(id, num_qubits, num_qubits);
    let mut order: Vec<usize> = (0..num_qubits).collect();
    for _ in 0..layers {
        order.shuffle(rng);
        let mut rest = order.as_slice();
        while !rest.is_empty() {
            if rest.len() >= 2 && rng.gen_bool(cx_rate) {
                circuit.cx(rest[0], rest[1]).expect("qubits in range");
                rest = &rest[2..];
            } else {
                let gate = *OneQubitGate::ALL.choose(rng).expect("nonempty gate set");
                let params: Vec<f64> = (0..gate.num_params())
                    .map(|_| rng.gen_range(-3.2..3.2))
                    .collect();
                circuit
                    .apply(gate, rest[0], &params)
                    .expect("qubits in range");
                rest = &rest[1..];
            }
        }
    }
    circuit.measure_all();
    circuit
}
