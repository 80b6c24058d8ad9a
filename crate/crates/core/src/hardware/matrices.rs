use std::cmp::Ordering;
use std::collections::BinaryHeap;

use ndarray::Array2;

use super::HardwareModel;
use crate::error::{Error, Result};

/// CNOTs per SWAP when converting edge errors into SWAP errors.
const CNOTS_PER_SWAP: i32 = 3;

/// All-pairs hop counts (BFS from every qubit).
pub fn raw_swap_distance(model: &HardwareModel) -> Array2<f64> {
    let n = model.num_qubits();
    let mut s = Array2::zeros((n, n));
    for i in 0..n {
        for (j, d) in model.bfs(i, |_| true).into_iter().enumerate() {
            s[[i, j]] = d.expect("coupling graph is connected") as f64;
        }
    }
    s
}

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl Ord for Frontier {
    // Min-heap on cost.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `1 - max over paths of prod (1 - E[edge])^3`, the failure probability of
/// moving a qubit from `i` to `j` along the most reliable path. Dijkstra over
/// `-3 ln(1 - E)`.
pub fn raw_swap_error(model: &HardwareModel) -> Array2<f64> {
    let n = model.num_qubits();
    let weight = |a: usize, b: usize| {
        -(CNOTS_PER_SWAP as f64) * (1.0 - model.cnot_error(a, b).unwrap()).ln()
    };
    let mut out = Array2::zeros((n, n));
    for src in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        dist[src] = 0.0;
        let mut heap = BinaryHeap::from([Frontier(0.0, src)]);
        while let Some(Frontier(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &v in model.neighbors(u) {
                let nd = d + weight(u, v);
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Frontier(nd, v));
                }
            }
        }
        for (j, d) in dist.into_iter().enumerate() {
            out[[src, j]] = if j == src { 0.0 } else { 1.0 - (-d).exp() };
        }
    }
    out
}

/// Divide by the largest entry; an all-zero matrix is returned unchanged.
pub fn normalize_by_max(mut m: Array2<f64>) -> Array2<f64> {
    let max = m.iter().copied().fold(0.0f64, f64::max);
    if max > 0.0 {
        m.mapv_inplace(|v| v / max);
    }
    m
}

pub fn swap_distance_matrix(model: &HardwareModel) -> Array2<f64> {
    normalize_by_max(raw_swap_distance(model))
}

pub fn swap_error_matrix(model: &HardwareModel) -> Array2<f64> {
    normalize_by_max(raw_swap_error(model))
}

/// `alpha1 * S + alpha2 * E`, elementwise.
pub fn combined_distance(
    s: &Array2<f64>,
    e: &Array2<f64>,
    alpha1: f64,
    alpha2: f64,
) -> Result<Array2<f64>> {
    if s.dim() != e.dim() {
        return Err(Error::ShapeMismatch(s.dim(), e.dim()));
    }
    Ok(s * alpha1 + e * alpha2)
}

/// Normalized swap-distance, swap-error and combined matrices of a device.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrices {
    pub swap_distance: Array2<f64>,
    pub swap_error: Array2<f64>,
    pub combined: Array2<f64>,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl DistanceMatrices {
    pub fn new(model: &HardwareModel, alpha1: f64, alpha2: f64) -> Self {
        let swap_distance = swap_distance_matrix(model);
        let swap_error = swap_error_matrix(model);
        let combined =
            combined_distance(&swap_distance, &swap_error, alpha1, alpha2).expect("same device");
        DistanceMatrices {
            swap_distance,
            swap_error,
            combined,
            alpha1,
            alpha2,
        }
    }

    /// Combined distance between two physical qubits.
    pub fn d(&self, a: usize, b: usize) -> f64 {
        self.combined[[a, b]]
    }
}

/// Longest shortest path between members of `qubits`, walking only inside
/// the induced subgraph.
pub fn subgraph_diameter(model: &HardwareModel, qubits: &[usize]) -> Result<usize> {
    let mut diameter = 0;
    for &src in qubits {
        if src >= model.num_qubits() {
            return Err(Error::QubitOutOfRange {
                index: src,
                num_qubits: model.num_qubits(),
            });
        }
        let dist = model.bfs(src, |q| qubits.contains(&q));
        for &dst in qubits {
            match dist[dst] {
                Some(d) => diameter = diameter.max(d),
                None => {
                    let mut sorted = qubits.to_vec();
                    sorted.sort_unstable();
                    return Err(Error::DisconnectedSubgraph(sorted));
                }
            }
        }
    }
    Ok(diameter)
}
