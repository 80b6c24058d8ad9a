use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::QuantumCircuit;

/// Gate dependency graph. Node `i` is gate `i` of the source circuit; there is
/// an arc `a -> b` when `b` is the next gate after `a` on some shared qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagCircuit {
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl DagCircuit {
    pub fn build(circuit: &QuantumCircuit) -> Self {
        let n = circuit.len();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        let mut last: Vec<Option<usize>> = vec![None; circuit.num_qubits];
        for (i, gate) in circuit.gates().iter().enumerate() {
            for &q in &gate.qubits {
                if let Some(p) = last[q] {
                    if !succs[p].contains(&i) {
                        succs[p].push(i);
                        preds[i].push(p);
                    }
                }
                last[q] = Some(i);
            }
        }
        for list in preds.iter_mut().chain(succs.iter_mut()) {
            list.sort_unstable();
        }
        DagCircuit { preds, succs }
    }

    pub fn num_nodes(&self) -> usize {
        self.preds.len()
    }

    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.preds[node]
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succs[node]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succs
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |&b| (a, b)))
    }

    pub fn num_edges(&self) -> usize {
        self.succs.iter().map(Vec::len).sum()
    }

    /// Nodes without predecessors.
    pub fn front_layer(&self) -> Vec<usize> {
        (0..self.num_nodes())
            .filter(|&i| self.preds[i].is_empty())
            .collect()
    }

    /// Kahn's algorithm, always releasing the smallest ready index first.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut indegree: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> =
            self.front_layer().into_iter().map(Reverse).collect();
        let mut order = Vec::with_capacity(self.num_nodes());
        while let Some(Reverse(node)) = ready.pop() {
            order.push(node);
            for &s in &self.succs[node] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.push(Reverse(s));
                }
            }
        }
        order
    }
}
