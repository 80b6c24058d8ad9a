//! Qubit partitioning: give each circuit a disjoint, connected, reliable
//! region of the device.
//!
//! Two strategies share the same scoring machinery:
//!
//! * [`gsp_partition`] enumerates every connected subset of free qubits of
//!   the right size and scores it with the diameter-penalized score
//!   ([`score_gsp`]). Exact, exponential in the circuit width.
//! * [`qhsp_partition`] grows candidates greedily from well-connected
//!   starting points, following the per-qubit fidelity degree, and scores
//!   them without the diameter term ([`score_qhsp`]).
//!
//! Both see CNOT errors adjusted for strong crosstalk with gates inside
//! regions that were allocated earlier ([`crosstalk_adjust`]).

mod gsp;
mod qhsp;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::QuantumCircuit;
use crate::error::{Error, Result};
use crate::hardware::{subgraph_diameter, CrosstalkTable, Edge, HardwareModel};

pub use gsp::{connected_subsets, gsp_partition, GSP_MAX_QUBITS};
pub use qhsp::{fidelity_degree, qhsp_partition, starting_points, FidelityDegreeTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartitionMethod {
    #[serde(rename = "GSP")]
    Gsp,
    #[serde(rename = "QHSP")]
    Qhsp,
}

impl FromStr for PartitionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gsp" => Ok(Self::Gsp),
            "qhsp" => Ok(Self::Qhsp),
            _ => Err(Error::Config(format!(
                "unknown partition method `{s}` (expected gsp or qhsp)"
            ))),
        }
    }
}

impl fmt::Display for PartitionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gsp => "GSP",
            Self::Qhsp => "QHSP",
        })
    }
}

/// A region of the device bound to one circuit. Lower scores are better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub circuit_id: String,
    /// Sorted physical qubits.
    pub qubits: Vec<usize>,
    pub score: f64,
    pub method: PartitionMethod,
}

/// A scored region offered by one of the partitioners.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Sorted physical qubits.
    pub qubits: Vec<usize>,
    /// Order in which the qubits joined the region (QHSP); equal to
    /// `qubits` for enumerated candidates.
    pub merge_order: Vec<usize>,
    pub score: f64,
}

impl Candidate {
    fn new(merge_order: Vec<usize>, score: f64) -> Self {
        let mut qubits = merge_order.clone();
        qubits.sort_unstable();
        Candidate {
            qubits,
            merge_order,
            score,
        }
    }
}

/// Ascending score; equal scores fall back to the lexicographically smaller
/// qubit set.
pub(crate) fn sort_candidates(candidates: &mut [Candidate]) {
    candidates.sort_by(|a, b| {
        a.score
            .total_cmp(&b.score)
            .then_with(|| a.qubits.cmp(&b.qubits))
    });
}

/// Regions already handed out, in allocation order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Occupancy {
    regions: Vec<Vec<usize>>,
}

impl Occupancy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_regions(regions: impl IntoIterator<Item = Vec<usize>>) -> Self {
        Occupancy {
            regions: regions.into_iter().collect(),
        }
    }

    pub fn push(&mut self, qubits: Vec<usize>) {
        self.regions.push(qubits);
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn regions(&self) -> &[Vec<usize>] {
        &self.regions
    }

    pub fn is_used(&self, q: usize) -> bool {
        self.regions.iter().any(|r| r.contains(&q))
    }

    pub fn num_used(&self) -> usize {
        self.regions.iter().map(Vec::len).sum()
    }

    /// True when both ends of `edge` lie in the same allocated region.
    pub fn hosts(&self, edge: Edge) -> bool {
        self.regions
            .iter()
            .any(|r| r.contains(&edge.lo()) && r.contains(&edge.hi()))
    }
}

/// Crosstalk-adjusted CNOT errors of the edges inside one candidate.
pub type AdjustedErrors = BTreeMap<Edge, f64>;

/// CNOT errors of the edges induced by `candidate`, where an edge `g` with a
/// strong pair `(g | g')` and `g'` inside an allocated region takes the
/// conditional error instead (the largest one if several apply).
pub fn crosstalk_adjust(
    model: &HardwareModel,
    candidate: &[usize],
    occupancy: &Occupancy,
    strong: &CrosstalkTable,
) -> AdjustedErrors {
    model
        .induced_edges(candidate)
        .map(|g| {
            let solo = model.edge_error(g);
            let worst = strong
                .affecting(g)
                .filter(|(cond, _)| occupancy.hosts(*cond))
                .map(|(_, e)| e)
                .fold(solo, f64::max);
            (g, worst)
        })
        .collect()
}

fn error_terms(
    model: &HardwareModel,
    qubits: &[usize],
    circuit: &QuantumCircuit,
    adjusted: &AdjustedErrors,
) -> f64 {
    let avg_cnot = if adjusted.is_empty() {
        0.0
    } else {
        adjusted.values().sum::<f64>() / adjusted.len() as f64
    };
    let readout: f64 = qubits.iter().map(|&q| model.readout_error(q)).sum();
    avg_cnot * circuit.cnot_count() as f64 + readout
}

/// Diameter + average adjusted CNOT error x CNOT count + summed readout error.
pub fn score_gsp(
    model: &HardwareModel,
    qubits: &[usize],
    circuit: &QuantumCircuit,
    adjusted: &AdjustedErrors,
) -> Result<f64> {
    let diameter = subgraph_diameter(model, qubits)?;
    Ok(diameter as f64 + error_terms(model, qubits, circuit, adjusted))
}

/// Average adjusted CNOT error x CNOT count + summed readout error.
pub fn score_qhsp(
    model: &HardwareModel,
    qubits: &[usize],
    circuit: &QuantumCircuit,
    adjusted: &AdjustedErrors,
) -> f64 {
    error_terms(model, qubits, circuit, adjusted)
}

pub(crate) fn check_capacity(
    model: &HardwareModel,
    circuit: &QuantumCircuit,
    occupancy: &Occupancy,
) -> Result<()> {
    if circuit.num_qubits == 0 {
        return Err(Error::InvalidCircuit(format!(
            "circuit `{}` has no qubits",
            circuit.id
        )));
    }
    if circuit.num_qubits > model.num_qubits() - occupancy.num_used() {
        return Err(Error::NoFeasiblePartition {
            circuit: circuit.id.clone(),
            needed: circuit.num_qubits,
        });
    }
    Ok(())
}

/// Candidates for one circuit under the chosen strategy, best first.
pub fn candidates(
    model: &HardwareModel,
    circuit: &QuantumCircuit,
    occupancy: &Occupancy,
    strong: &CrosstalkTable,
    method: PartitionMethod,
    lambda: f64,
) -> Result<Vec<Candidate>> {
    match method {
        PartitionMethod::Gsp => gsp_partition(model, circuit, occupancy, strong),
        PartitionMethod::Qhsp => qhsp_partition(model, circuit, occupancy, strong, lambda),
    }
}

/// Best partition for a circuit with the whole device free.
pub fn best_independent(
    model: &HardwareModel,
    circuit: &QuantumCircuit,
    strong: &CrosstalkTable,
    method: PartitionMethod,
    lambda: f64,
) -> Result<Partition> {
    let best =
        candidates(model, circuit, &Occupancy::new(), strong, method, lambda)?.swap_remove(0);
    Ok(Partition {
        circuit_id: circuit.id.clone(),
        qubits: best.qubits,
        score: best.score,
        method,
    })
}

/// Allocate regions one circuit at a time. `circuits` must already be in
/// descending density order; each allocation sees crosstalk from the ones
/// before it.
pub fn allocate_all(
    model: &HardwareModel,
    circuits: &[&QuantumCircuit],
    method: PartitionMethod,
    lambda: f64,
    strong: &CrosstalkTable,
) -> Result<Vec<Partition>> {
    for pair in circuits.windows(2) {
        if pair[1].stats().density > pair[0].stats().density {
            return Err(Error::UnsortedCircuits(pair[1].id.clone()));
        }
    }
    let mut occupancy = Occupancy::new();
    let mut out = Vec::with_capacity(circuits.len());
    for circuit in circuits {
        let best = candidates(model, circuit, &occupancy, strong, method, lambda)?.swap_remove(0);
        occupancy.push(best.qubits.clone());
        out.push(Partition {
            circuit_id: circuit.id.clone(),
            qubits: best.qubits,
            score: best.score,
            method,
        });
    }
    Ok(out)
}
