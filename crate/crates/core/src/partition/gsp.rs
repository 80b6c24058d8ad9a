use rayon::prelude::*;

use super::{check_capacity, crosstalk_adjust, score_gsp, sort_candidates, Candidate, Occupancy};
use crate::circuit::QuantumCircuit;
use crate::error::{Error, Result};
use crate::hardware::{CrosstalkTable, HardwareModel};

/// Widest circuit the exhaustive partitioner accepts.
pub const GSP_MAX_QUBITS: usize = 8;

/// Below this many candidates scoring stays on the calling thread.
const PARALLEL_SCORING_THRESHOLD: usize = 512;

/// Every connected `k`-subset of the qubits accepted by `allowed`, each
/// exactly once and sorted (ESU enumeration: subsets are grown from their
/// smallest member through exclusive neighborhoods).
pub fn connected_subsets(
    model: &HardwareModel,
    k: usize,
    allowed: impl Fn(usize) -> bool,
) -> Vec<Vec<usize>> {
    let n = model.num_qubits();
    let allowed: Vec<bool> = (0..n).map(allowed).collect();
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    for root in (0..n).filter(|&v| allowed[v]) {
        let ext: Vec<usize> = model
            .neighbors(root)
            .iter()
            .copied()
            .filter(|&u| u > root && allowed[u])
            .collect();
        extend(model, &allowed, k, root, &mut vec![root], ext, &mut out);
    }
    for s in &mut out {
        s.sort_unstable();
    }
    out
}

fn extend(
    model: &HardwareModel,
    allowed: &[bool],
    k: usize,
    root: usize,
    sub: &mut Vec<usize>,
    mut ext: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if sub.len() == k {
        out.push(sub.clone());
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        for &u in model.neighbors(w) {
            let excluded = u <= root
                || !allowed[u]
                || sub.contains(&u)
                || sub.iter().any(|&s| model.is_edge(s, u))
                || next.contains(&u);
            if !excluded {
                next.push(u);
            }
        }
        sub.push(w);
        extend(model, allowed, k, root, sub, next, out);
        sub.pop();
    }
}

/// Score every connected region of free qubits that fits `circuit`.
pub fn gsp_partition(
    model: &HardwareModel,
    circuit: &QuantumCircuit,
    occupancy: &Occupancy,
    strong: &CrosstalkTable,
) -> Result<Vec<Candidate>> {
    let k = circuit.num_qubits;
    if k > GSP_MAX_QUBITS {
        return Err(Error::GspTooLarge {
            circuit: circuit.id.clone(),
            k,
            cap: GSP_MAX_QUBITS,
        });
    }
    check_capacity(model, circuit, occupancy)?;
    let subsets = connected_subsets(model, k, |q| !occupancy.is_used(q));
    let score = |qubits: Vec<usize>| {
        let adjusted = crosstalk_adjust(model, &qubits, occupancy, strong);
        let s = score_gsp(model, &qubits, circuit, &adjusted)
            .expect("enumerated subsets are connected");
        Candidate::new(qubits, s)
    };
    let mut candidates: Vec<Candidate> = if subsets.len() >= PARALLEL_SCORING_THRESHOLD {
        subsets.into_par_iter().map(score).collect()
    } else {
        subsets.into_iter().map(score).collect()
    };
    if candidates.is_empty() {
        return Err(Error::NoFeasiblePartition {
            circuit: circuit.id.clone(),
            needed: k,
        });
    }
    sort_candidates(&mut candidates);
    Ok(candidates)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::devices;
    use crate::hardware::Edge;

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut with_last = combinations(n - 1, k - 1);
        for c in &mut with_last {
            c.push(n - 1);
        }
        let mut all = combinations(n - 1, k);
        all.extend(with_last);
        all
    }

    fn brute_force(model: &HardwareModel, k: usize, used: &[usize]) -> BTreeSet<Vec<usize>> {
        combinations(model.num_qubits(), k)
            .into_iter()
            .filter(|c| c.iter().all(|q| !used.contains(q)) && model.is_connected_subset(c))
            .collect()
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for model in [
            devices::valencia(),
            devices::grid(3, 3),
            devices::heavy_hex16(),
            devices::ring(7),
        ] {
            for k in 1..=5 {
                let fast = connected_subsets(&model, k, |_| true);
                let set: BTreeSet<_> = fast.iter().cloned().collect();
                assert_eq!(set.len(), fast.len(), "duplicates for k={k}");
                assert_eq!(set, brute_force(&model, k, &[]), "k={k}");
            }
            let used = [0, 4];
            let fast: BTreeSet<_> = connected_subsets(&model, 3, |q| !used.contains(&q))
                .into_iter()
                .collect();
            assert_eq!(fast, brute_force(&model, 3, &used));
        }
    }

    #[test]
    fn line_ranks_lower_error_edge_first() {
        let m = HardwareModel::new(
            3,
            &[(0, 1), (1, 2)],
            &[(0, 1, 0.03), (1, 2, 0.01)],
            vec![0.02; 3],
            vec![],
        )
        .unwrap();
        let mut c = QuantumCircuit::new("c", 2, 0);
        c.cx(0, 1).unwrap();
        let cands = gsp_partition(&m, &c, &Occupancy::new(), &CrosstalkTable::new()).unwrap();
        assert_eq!(cands.len(), 2);
        assert_eq!(cands[0].qubits, vec![1, 2]);
        assert!((cands[0].score - (1.0 + 0.01 + 0.04)).abs() < 1e-12);
        assert!((cands[1].score - (1.0 + 0.03 + 0.04)).abs() < 1e-12);
    }

    #[test]
    fn whole_device_is_the_only_candidate() {
        let m = devices::valencia();
        let c = QuantumCircuit::new("c", 5, 0);
        let cands = gsp_partition(&m, &c, &Occupancy::new(), &CrosstalkTable::new()).unwrap();
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].qubits, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn nothing_free_is_infeasible() {
        let m = devices::valencia();
        let c = QuantumCircuit::new("c", 1, 0);
        let occ = Occupancy::from_regions([vec![0, 1, 2, 3, 4]]);
        assert!(matches!(
            gsp_partition(&m, &c, &occ, &CrosstalkTable::new()),
            Err(Error::NoFeasiblePartition { needed: 1, .. })
        ));
        // Enough free qubits, but not connected.
        let occ = Occupancy::from_regions([vec![1]]);
        let c = QuantumCircuit::new("c", 3, 0);
        assert!(matches!(
            gsp_partition(&m, &c, &occ, &CrosstalkTable::new()),
            Err(Error::NoFeasiblePartition { .. })
        ));
    }

    #[test]
    fn cap_is_enforced() {
        let c = QuantumCircuit::new("wide", 9, 0);
        assert!(matches!(
            gsp_partition(
                &devices::toronto(),
                &c,
                &Occupancy::new(),
                &CrosstalkTable::new()
            ),
            Err(Error::GspTooLarge { k: 9, cap: 8, .. })
        ));
    }

    #[test]
    fn strong_crosstalk_penalizes_candidate() {
        let m = devices::line(6);
        let mut strong = CrosstalkTable::new();
        // Allocated region {2,3}; the edge (4,5) degrades while (2,3) runs.
        strong.insert(Edge::new(4, 5), Edge::new(2, 3), 0.5);
        let occ = Occupancy::from_regions([vec![2, 3]]);
        let mut c = QuantumCircuit::new("c", 2, 0);
        c.cx(0, 1).unwrap();
        let cands = gsp_partition(&m, &c, &occ, &strong).unwrap();
        assert_eq!(cands[0].qubits, vec![0, 1]);
        assert_eq!(cands[1].qubits, vec![4, 5]);
        assert!(cands[1].score > cands[0].score);
    }
}
