//! Device description: coupling graph, calibration snapshot and crosstalk
//! measurements, plus the distance matrices derived from them.

mod crosstalk;
mod io;
mod matrices;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use crosstalk::{
    extract_strong_crosstalk, CrosstalkEntry, CrosstalkTable, STRONG_CROSSTALK_FACTOR,
};
pub use io::{load_hardware, CalibrationFile, TopologyFile};
pub use matrices::{
    combined_distance, normalize_by_max, raw_swap_distance, raw_swap_error, subgraph_diameter,
    swap_distance_matrix, swap_error_matrix, DistanceMatrices,
};

/// Undirected coupling edge, stored with the smaller index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Edge(usize, usize);

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn lo(self) -> usize {
        self.0
    }

    pub fn hi(self) -> usize {
        self.1
    }

    pub fn contains(self, q: usize) -> bool {
        self.0 == q || self.1 == q
    }

    pub fn shares_qubit(self, other: Edge) -> bool {
        self.contains(other.0) || self.contains(other.1)
    }
}

impl From<[usize; 2]> for Edge {
    fn from([a, b]: [usize; 2]) -> Self {
        Edge::new(a, b)
    }
}

impl From<Edge> for [usize; 2] {
    fn from(e: Edge) -> Self {
        [e.0, e.1]
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// A device: connected coupling graph with per-edge CNOT error rates and
/// per-qubit readout error rates. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareModel {
    num_qubits: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
    /// Dense `n * n`; `None` off the coupling graph.
    cnot_error: Vec<Option<f64>>,
    readout_error: Vec<f64>,
    single_qubit_error: Vec<f64>,
}

fn check_rate(value: f64, what: impl Fn() -> String) -> Result<()> {
    if (0.0..1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidCalibration(format!(
            "{} = {value} is outside [0, 1)",
            what()
        )))
    }
}

impl HardwareModel {
    /// Build and validate a model. `cnot_errors` may list an edge in both
    /// orientations; the last entry wins. `single_qubit_errors` may be empty.
    pub fn new(
        num_qubits: usize,
        edges: &[(usize, usize)],
        cnot_errors: &[(usize, usize, f64)],
        readout_errors: Vec<f64>,
        single_qubit_errors: Vec<f64>,
    ) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidCalibration("device has no qubits".into()));
        }
        let check_index = |q: usize| {
            if q < num_qubits {
                Ok(())
            } else {
                Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits,
                })
            }
        };
        let mut edge_set = BTreeSet::new();
        for &(a, b) in edges {
            check_index(a)?;
            check_index(b)?;
            if a == b {
                return Err(Error::InvalidCalibration(format!("self-loop on qubit {a}")));
            }
            edge_set.insert(Edge::new(a, b));
        }
        let mut adjacency = vec![Vec::new(); num_qubits];
        for e in &edge_set {
            adjacency[e.0].push(e.1);
            adjacency[e.1].push(e.0);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let mut cnot_error = vec![None; num_qubits * num_qubits];
        for &(a, b, e) in cnot_errors {
            check_index(a)?;
            check_index(b)?;
            if !edge_set.contains(&Edge::new(a, b)) {
                return Err(Error::NotAnEdge(a, b));
            }
            check_rate(e, || format!("CNOT error of ({a}, {b})"))?;
            cnot_error[a * num_qubits + b] = Some(e);
            cnot_error[b * num_qubits + a] = Some(e);
        }
        if let Some(e) = edge_set
            .iter()
            .find(|e| cnot_error[e.0 * num_qubits + e.1].is_none())
        {
            return Err(Error::MissingCalibration(format!("CNOT error of edge {e}")));
        }

        if readout_errors.len() > num_qubits {
            return Err(Error::QubitOutOfRange {
                index: readout_errors.len() - 1,
                num_qubits,
            });
        }
        if readout_errors.len() < num_qubits {
            return Err(Error::MissingCalibration(format!(
                "readout error of qubit {}",
                readout_errors.len()
            )));
        }
        for (q, &r) in readout_errors.iter().enumerate() {
            check_rate(r, || format!("readout error of qubit {q}"))?;
        }
        let single_qubit_error = if single_qubit_errors.is_empty() {
            vec![0.0; num_qubits]
        } else if single_qubit_errors.len() != num_qubits {
            return Err(Error::InvalidCalibration(format!(
                "expected {num_qubits} single-qubit errors, got {}",
                single_qubit_errors.len()
            )));
        } else {
            for (q, &s) in single_qubit_errors.iter().enumerate() {
                check_rate(s, || format!("single-qubit error of qubit {q}"))?;
            }
            single_qubit_errors
        };

        let model = HardwareModel {
            num_qubits,
            edges: edge_set.into_iter().collect(),
            adjacency,
            cnot_error,
            readout_error: readout_errors,
            single_qubit_error,
        };
        model.check_connected()?;
        Ok(model)
    }

    /// Every CNOT fails with `cnot_error`, every readout with `readout_error`.
    pub fn uniform(
        num_qubits: usize,
        edges: &[(usize, usize)],
        cnot_error: f64,
        readout_error: f64,
    ) -> Result<Self> {
        let errors: Vec<_> = edges.iter().map(|&(a, b)| (a, b, cnot_error)).collect();
        Self::new(
            num_qubits,
            edges,
            &errors,
            vec![readout_error; num_qubits],
            Vec::new(),
        )
    }

    fn check_connected(&self) -> Result<()> {
        let dist = self.bfs(0, |_| true);
        match dist.iter().position(Option::is_none) {
            Some(q) => Err(Error::Disconnected(q)),
            None => Ok(()),
        }
    }

    /// Hop distances from `source` through qubits accepted by `allowed`.
    pub(crate) fn bfs(&self, source: usize, allowed: impl Fn(usize) -> bool) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_qubits];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &v in &self.adjacency[u] {
                if dist[v].is_none() && allowed(v) {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adjacency[q].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        a < self.num_qubits
            && b < self.num_qubits
            && self.cnot_error[a * self.num_qubits + b].is_some()
    }

    pub fn cnot_error(&self, a: usize, b: usize) -> Option<f64> {
        if a >= self.num_qubits || b >= self.num_qubits {
            return None;
        }
        self.cnot_error[a * self.num_qubits + b]
    }

    /// CNOT error of a coupling edge. Panics off the coupling graph.
    pub fn edge_error(&self, e: Edge) -> f64 {
        self.cnot_error[e.0 * self.num_qubits + e.1].expect("not a coupling edge")
    }

    pub fn readout_error(&self, q: usize) -> f64 {
        self.readout_error[q]
    }

    pub fn readout_errors(&self) -> &[f64] {
        &self.readout_error
    }

    pub fn single_qubit_error(&self, q: usize) -> f64 {
        self.single_qubit_error[q]
    }

    /// Edges with both endpoints in `qubits`.
    pub fn induced_edges<'a>(&'a self, qubits: &'a [usize]) -> impl Iterator<Item = Edge> + 'a {
        qubits.iter().flat_map(move |&a| {
            self.adjacency[a]
                .iter()
                .filter(move |&&b| a < b && qubits.contains(&b))
                .map(move |&b| Edge(a, b))
        })
    }

    pub fn is_connected_subset(&self, qubits: &[usize]) -> bool {
        let Some(&first) = qubits.first() else {
            return false;
        };
        let dist = self.bfs(first, |q| qubits.contains(&q));
        qubits.iter().all(|&q| dist[q].is_some())
    }

    /// Same graph, new calibration. Used by tests that perturb error rates.
    pub fn with_cnot_error(&self, edge: Edge, error: f64) -> Result<Self> {
        if !self.is_edge(edge.0, edge.1) {
            return Err(Error::NotAnEdge(edge.0, edge.1));
        }
        check_rate(error, || format!("CNOT error of {edge}"))?;
        let mut m = self.clone();
        m.cnot_error[edge.0 * self.num_qubits + edge.1] = Some(error);
        m.cnot_error[edge.1 * self.num_qubits + edge.0] = Some(error);
        Ok(m)
    }

    pub fn with_readout_error(&self, q: usize, error: f64) -> Result<Self> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        check_rate(error, || format!("readout error of qubit {q}"))?;
        let mut m = self.clone();
        m.readout_error[q] = error;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_line() {
        let m =
            HardwareModel::new(2, &[(0, 1)], &[(0, 1, 0.01)], vec![0.02, 0.03], vec![]).unwrap();
        assert_eq!(m.cnot_error(1, 0), Some(0.01));
        assert_eq!(m.readout_error(1), 0.03);
        assert_eq!(m.cnot_error(0, 0), None);
    }

    #[test]
    fn edge_index_out_of_range() {
        let err = HardwareModel::uniform(5, &[(0, 1), (1, 5)], 0.01, 0.01).unwrap_err();
        assert!(matches!(
            err,
            Error::QubitOutOfRange {
                index: 5,
                num_qubits: 5
            }
        ));
    }

    #[test]
    fn isolated_qubit_is_rejected() {
        let err = HardwareModel::uniform(3, &[(0, 1)], 0.01, 0.01).unwrap_err();
        assert!(matches!(err, Error::Disconnected(2)));
    }

    #[test]
    fn missing_calibration_names_the_edge() {
        let err = HardwareModel::new(3, &[(0, 1), (1, 2)], &[(0, 1, 0.01)], vec![0.0; 3], vec![])
            .unwrap_err();
        assert!(err.to_string().contains("(1, 2)"), "{err}");
        let err = HardwareModel::new(2, &[(0, 1)], &[(0, 1, 0.01)], vec![0.0], vec![]).unwrap_err();
        assert!(err.to_string().contains("qubit 1"), "{err}");
    }

    #[test]
    fn last_orientation_wins() {
        let m = HardwareModel::new(
            2,
            &[(0, 1)],
            &[(0, 1, 0.01), (1, 0, 0.02)],
            vec![0.0; 2],
            vec![],
        )
        .unwrap();
        assert_eq!(m.cnot_error(0, 1), Some(0.02));
    }

    #[test]
    fn rates_must_be_probabilities() {
        assert!(HardwareModel::new(2, &[(0, 1)], &[(0, 1, 1.0)], vec![0.0; 2], vec![]).is_err());
        assert!(HardwareModel::new(2, &[(0, 1)], &[(0, 1, 0.1)], vec![-0.1, 0.0], vec![]).is_err());
    }
}
