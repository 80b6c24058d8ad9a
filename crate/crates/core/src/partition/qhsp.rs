use std::collections::BTreeSet;

use super::{check_capacity, crosstalk_adjust, score_qhsp, sort_candidates, Candidate, Occupancy};
use crate::circuit::QuantumCircuit;
use crate::error::{Error, Result};
use crate::hardware::{CrosstalkTable, HardwareModel};

/// Per-qubit fidelity degree:
/// `sum over neighbors of lambda * (1 - E[q][n])  +  (1 - R[q])`.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityDegreeTable {
    pub values: Vec<f64>,
    pub lambda: f64,
}

impl FidelityDegreeTable {
    pub fn get(&self, q: usize) -> f64 {
        self.values[q]
    }

    /// Qubits by descending fidelity degree, lower index first on ties.
    pub fn ranking(&self) -> Vec<usize> {
        let mut qs: Vec<usize> = (0..self.values.len()).collect();
        qs.sort_by(|&a, &b| self.better(a, b));
        qs
    }

    fn better(&self, a: usize, b: usize) -> std::cmp::Ordering {
        self.values[b].total_cmp(&self.values[a]).then(a.cmp(&b))
    }
}

pub fn fidelity_degree(model: &HardwareModel, lambda: f64) -> FidelityDegreeTable {
    let values = (0..model.num_qubits())
        .map(|q| {
            let links: f64 = model
                .neighbors(q)
                .iter()
                .map(|&n| lambda * (1.0 - model.cnot_error(q, n).unwrap()))
                .sum();
            links + (1.0 - model.readout_error(q))
        })
        .collect();
    FidelityDegreeTable { values, lambda }
}

/// Well-connected seeds for region growth. When no physical qubit is as
/// connected as the busiest logical qubit, the best-connected qubits are
/// used; otherwise every qubit whose degree is at least the logical one.
pub fn starting_points(model: &HardwareModel, circuit: &QuantumCircuit) -> Vec<usize> {
    let logical = circuit.stats().largest_logical_degree;
    let physical = model.max_degree();
    (0..model.num_qubits())
        .filter(|&q| {
            if physical < logical {
                model.degree(q) == physical
            } else {
                model.degree(q) >= logical
            }
        })
        .collect()
}

/// Grow a region from `start`: the member with the highest fidelity degree
/// that still has a free neighbor absorbs its best free neighbor, until the
/// region holds `k` qubits. `None` when growth gets stuck.
fn grow(
    model: &HardwareModel,
    degrees: &FidelityDegreeTable,
    occupancy: &Occupancy,
    start: usize,
    k: usize,
) -> Option<Vec<usize>> {
    let mut region = vec![start];
    while region.len() < k {
        let mut members = region.clone();
        members.sort_by(|&a, &b| degrees.better(a, b));
        let next = members.iter().find_map(|&m| {
            model
                .neighbors(m)
                .iter()
                .copied()
                .filter(|&n| !occupancy.is_used(n) && !region.contains(&n))
                .min_by(|&a, &b| degrees.better(a, b))
        })?;
        region.push(next);
    }
    Some(region)
}

/// Heuristic candidates for `circuit`, best first.
///
/// If every seed is taken or blocked, growth is retried from every free
/// qubit (best-connected first) before giving up.
pub fn qhsp_partition(
    model: &HardwareModel,
    circuit: &QuantumCircuit,
    occupancy: &Occupancy,
    strong: &CrosstalkTable,
    lambda: f64,
) -> Result<Vec<Candidate>> {
    check_capacity(model, circuit, occupancy)?;
    let k = circuit.num_qubits;
    let degrees = fidelity_degree(model, lambda);
    let grow_from = |seeds: &[usize]| -> Vec<Vec<usize>> {
        let mut seen = BTreeSet::new();
        seeds
            .iter()
            .filter(|&&s| !occupancy.is_used(s))
            .filter_map(|&s| grow(model, &degrees, occupancy, s, k))
            .filter(|region| {
                let mut key = region.clone();
                key.sort_unstable();
                seen.insert(key)
            })
            .collect()
    };

    let mut regions = grow_from(&starting_points(model, circuit));
    if regions.is_empty() {
        let mut free: Vec<usize> = (0..model.num_qubits())
            .filter(|&q| !occupancy.is_used(q))
            .collect();
        free.sort_by(|&a, &b| model.degree(b).cmp(&model.degree(a)).then(a.cmp(&b)));
        regions = grow_from(&free);
    }
    if regions.is_empty() {
        return Err(Error::NoFeasiblePartition {
            circuit: circuit.id.clone(),
            needed: k,
        });
    }
    let mut candidates: Vec<Candidate> = regions
        .into_iter()
        .map(|order| {
            let adjusted = crosstalk_adjust(model, &order, occupancy, strong);
            let score = score_qhsp(model, &order, circuit, &adjusted);
            Candidate::new(order, score)
        })
        .collect();
    sort_candidates(&mut candidates);
    Ok(candidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devices;

    fn circuit(n: usize, pairs: &[(usize, usize)]) -> QuantumCircuit {
        let mut c = QuantumCircuit::new("c", n, 0);
        for &(a, b) in pairs {
            c.cx(a, b).unwrap();
        }
        c
    }

    #[test]
    fn single_neighbor_degree() {
        let m = HardwareModel::new(2, &[(0, 1)], &[(0, 1, 0.01)], vec![0.02, 0.0], vec![]).unwrap();
        assert!((fidelity_degree(&m, 1.0).get(0) - 1.97).abs() < 1e-12);
    }

    #[test]
    fn error_free_degree_three() {
        let m = HardwareModel::uniform(4, &devices::star_edges(4), 0.0, 0.0).unwrap();
        assert_eq!(fidelity_degree(&m, 2.0).get(0), 7.0);
    }

    #[test]
    fn valencia_ranking() {
        let table = fidelity_degree(&devices::valencia(), 2.0);
        assert_eq!(&table.ranking()[..3], &[1, 3, 0]);
        assert!(table.get(0) > table.get(2));
    }

    #[test]
    fn valencia_starting_point() {
        let c = circuit(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(starting_points(&devices::valencia(), &c), vec![1]);
    }

    #[test]
    fn starting_points_fallback_on_line() {
        let c = circuit(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(starting_points(&devices::line(5), &c), vec![1, 2, 3]);
    }

    #[test]
    fn starting_points_on_star() {
        let c = circuit(2, &[(0, 1)]);
        assert_eq!(starting_points(&devices::star(5), &c), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn valencia_merge_order() {
        let c = circuit(4, &[(0, 1), (0, 2), (0, 3), (1, 2)]);
        let cands = qhsp_partition(
            &devices::valencia(),
            &c,
            &Occupancy::new(),
            &CrosstalkTable::new(),
            2.0,
        )
        .unwrap();
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].merge_order, vec![1, 3, 0, 2]);
        assert_eq!(cands[0].qubits, vec![0, 1, 2, 3]);
    }

    #[test]
    fn single_qubit_circuit_scores_readout() {
        let m = devices::valencia();
        let c = QuantumCircuit::new("c", 1, 0);
        let cands = qhsp_partition(&m, &c, &Occupancy::new(), &CrosstalkTable::new(), 2.0).unwrap();
        assert_eq!(cands.len(), 5);
        for cand in &cands {
            assert_eq!(cand.score, m.readout_error(cand.qubits[0]));
        }
        assert_eq!(cands[0].qubits, vec![0]);
    }

    #[test]
    fn symmetric_ring_ties_break_lexicographically() {
        let m = HardwareModel::uniform(6, &devices::ring_edges(6), 0.0, 0.0).unwrap();
        let c = circuit(3, &[(0, 1), (1, 2)]);
        let cands = qhsp_partition(&m, &c, &Occupancy::new(), &CrosstalkTable::new(), 2.0).unwrap();
        assert!(cands.iter().all(|x| x.score == 0.0));
        let smallest = cands.iter().map(|x| x.qubits.clone()).min().unwrap();
        assert_eq!(cands[0].qubits, smallest);
        assert_eq!(cands[0].qubits, vec![0, 1, 2]);
    }

    #[test]
    fn used_seeds_are_skipped() {
        let m = devices::valencia();
        let c = circuit(2, &[(0, 1)]);
        let occ = Occupancy::from_regions([vec![1]]);
        let cands = qhsp_partition(&m, &c, &occ, &CrosstalkTable::new(), 2.0).unwrap();
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].qubits, vec![3, 4]);
    }

    #[test]
    fn blocked_seeds_fall_back_to_free_qubits() {
        // Qubit 0 is the only degree-3 qubit and it is taken.
        let m = HardwareModel::uniform(
            7,
            &[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6)],
            0.01,
            0.01,
        )
        .unwrap();
        let c = circuit(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(starting_points(&m, &c), vec![0]);
        let occ = Occupancy::from_regions([vec![0]]);
        let cands = qhsp_partition(&m, &c, &occ, &CrosstalkTable::new(), 2.0).unwrap();
        assert_eq!(cands[0].qubits, vec![3, 4, 5, 6]);
    }

    #[test]
    fn no_room_is_infeasible() {
        let m = devices::valencia();
        let c = circuit(3, &[(0, 1), (1, 2)]);
        let occ = Occupancy::from_regions([vec![1]]);
        assert!(matches!(
            qhsp_partition(&m, &c, &occ, &CrosstalkTable::new(), 2.0),
            Err(Error::NoFeasiblePartition { .. })
        ));
    }
}
