//! Placement and routing of several circuits that share a device, each
//! confined to its own partition.
//!
//! Every circuit gets an initial placement chosen among a handful of seeded
//! candidates ([`initial_mapping`]). Routing ([`mapping_transition`]) then
//! advances all circuits together: gates whose operands are adjacent are
//! emitted, and each circuit that is still blocked applies its cheapest SWAP
//! or Bridge according to [`cost_h`].

mod cost;
mod emit;
mod mapping;
mod transition;

use serde::{Deserialize, Serialize};

use crate::circuit::{ClassicalRegister, Gate, GateKind, QuantumCircuit};
use crate::error::Result;
use crate::hardware::{DistanceMatrices, HardwareModel};

pub use cost::{best_candidate, cost_h, find_swap_bridge_pairs, CostWeights, TentativeGate};
pub use emit::{emit_merged_qasm, Manifest, ManifestEntry};
pub use mapping::{circuit_rng, initial_mapping, placement_attempts, Mapping};
pub use transition::mapping_transition;

/// Routing knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingOptions {
    /// Weight of the lookahead term of the cost.
    pub weight: f64,
    /// Number of upcoming CX gates in the lookahead.
    pub ext_layer: usize,
    /// Initial placements tried per circuit.
    pub attempts: usize,
    /// Never insert bridges.
    pub swap_only: bool,
    /// Leave a move's own gates out of its cost.
    pub no_self_cost: bool,
}

impl Default for RoutingOptions {
    fn default() -> Self {
        RoutingOptions {
            weight: 0.5,
            ext_layer: 20,
            attempts: 10,
            swap_only: false,
            no_self_cost: false,
        }
    }
}

impl RoutingOptions {
    pub fn weights(&self) -> CostWeights {
        CostWeights {
            extended: self.weight,
            self_cost: !self.no_self_cost,
        }
    }
}

/// Why a gate was emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Gate `n` of the source circuit.
    Source(usize),
    /// Part of an inserted SWAP.
    Swap,
    /// Part of a bridge standing in for source gate `n`.
    Bridge(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledGate {
    /// Index of the circuit in the schedule.
    pub circuit: usize,
    /// On physical qubits; measurements write global classical bits.
    pub gate: Gate,
    pub origin: Origin,
}

/// Routing outcome of one circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutedCircuit {
    pub id: String,
    /// Sorted physical qubits.
    pub partition: Vec<usize>,
    pub initial_mapping: Mapping,
    pub final_mapping: Mapping,
    pub swaps: usize,
    pub bridges: usize,
    /// First global classical bit of this circuit.
    pub clbit_offset: usize,
    pub num_clbits: usize,
}

impl RoutedCircuit {
    /// Extra CNOTs over the source: 3 per SWAP, and 3 per bridge since it
    /// replaces one CX with four.
    pub fn additional_cnots(&self) -> usize {
        3 * (self.swaps + self.bridges)
    }

    pub fn creg_name(index: usize) -> String {
        format!("c{index}")
    }
}

/// Routing counters of one circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingStats {
    pub additional_cnots: usize,
    pub swaps: usize,
    pub bridges: usize,
    pub depth: usize,
    pub gates: usize,
}

/// The merged, hardware-compliant program.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub num_qubits: usize,
    pub gates: Vec<ScheduledGate>,
    pub circuits: Vec<RoutedCircuit>,
}

impl Schedule {
    pub fn num_clbits(&self) -> usize {
        self.circuits.iter().map(|c| c.num_clbits).sum()
    }

    pub fn additional_cnots(&self) -> usize {
        self.circuits
            .iter()
            .map(RoutedCircuit::additional_cnots)
            .sum()
    }

    /// Gates emitted for circuit `index`, in order.
    pub fn gates_of(&self, index: usize) -> impl Iterator<Item = &Gate> + '_ {
        self.gates
            .iter()
            .filter(move |g| g.circuit == index)
            .map(|g| &g.gate)
    }

    /// Layers of non-barrier gates of circuit `index`, or of the whole
    /// schedule.
    pub fn depth(&self, index: Option<usize>) -> usize {
        let mut level = vec![0usize; self.num_qubits];
        for g in &self.gates {
            if index.is_some_and(|i| g.circuit != i) || g.gate.kind == GateKind::Barrier {
                continue;
            }
            let next = g.gate.qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for &q in &g.gate.qubits {
                level[q] = next;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    pub fn routing_stats(&self, index: usize) -> RoutingStats {
        let c = &self.circuits[index];
        RoutingStats {
            additional_cnots: c.additional_cnots(),
            swaps: c.swaps,
            bridges: c.bridges,
            depth: self.depth(Some(index)),
            gates: self.gates_of(index).count(),
        }
    }

    /// One classical register per circuit that measures anything.
    pub fn cregs(&self) -> Vec<ClassicalRegister> {
        self.circuits
            .iter()
            .enumerate()
            .filter(|(_, c)| c.num_clbits > 0)
            .map(|(i, c)| ClassicalRegister {
                name: RoutedCircuit::creg_name(i),
                offset: c.clbit_offset,
                size: c.num_clbits,
            })
            .collect()
    }

    /// The schedule as a circuit over every device qubit.
    pub fn to_circuit(&self, id: impl Into<String>) -> QuantumCircuit {
        let mut merged = QuantumCircuit::new(id, self.num_qubits, self.num_clbits());
        for g in &self.gates {
            merged
                .push(g.gate.clone())
                .expect("scheduled gates are on device qubits");
        }
        merged
    }
}

/// Place every circuit on its partition, then route them together. `jobs`
/// are `(circuit, partition)` pairs in the order circuits are visited.
pub fn schedule_circuits(
    model: &HardwareModel,
    matrices: &DistanceMatrices,
    jobs: &[(&QuantumCircuit, &[usize])],
    options: &RoutingOptions,
    seed: u64,
) -> Result<Schedule> {
    let placements: Vec<Mapping> = jobs
        .iter()
        .map(|(c, p)| initial_mapping(model, matrices, p, c, options, seed))
        .collect::<Result<_>>()?;
    let circuits: Vec<&QuantumCircuit> = jobs.iter().map(|(c, _)| *c).collect();
    let partitions: Vec<&[usize]> = jobs.iter().map(|(_, p)| *p).collect();
    mapping_transition(
        model,
        matrices,
        &circuits,
        &partitions,
        &placements,
        options,
    )
}
