//! How many circuits share the device, and which ones.
//!
//! Circuits are ranked by CNOT density and the longest prefix that fits the
//! device is taken. The prefix is then partitioned both jointly and one
//! circuit at a time; if the mean score loss of joint allocation reaches the
//! threshold, the least dense circuit is dropped and the check repeats.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::QuantumCircuit;
use crate::error::{Error, Result};
use crate::hardware::{CrosstalkTable, HardwareModel};
use crate::partition::{allocate_all, best_independent, Partition, PartitionMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// Every circuit offered to the gate runs together.
    Simultaneous,
    /// Only the densest `n` of them run together.
    Reduced(usize),
    /// A single circuit.
    Independent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Simultaneous => f.write_str("SIMULTANEOUS"),
            Verdict::Reduced(k) => write!(f, "REDUCED({k})"),
            Verdict::Independent => f.write_str("INDEPENDENT"),
        }
    }
}

/// One job on the device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionPlan {
    /// Circuit ids in descending density order.
    pub selected: Vec<String>,
    /// One per selected circuit, same order.
    pub partitions: Vec<Partition>,
    /// Mean score loss of joint over independent partitioning.
    pub delta_s: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    /// Number of circuits sharing this job.
    pub trf: usize,
}

impl ExecutionPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plans serialize")
    }
}

/// Sort by density (descending, stable) and keep the longest prefix whose
/// qubit total fits on `num_qubits`.
pub fn select_k<'a>(
    circuits: &[&'a QuantumCircuit],
    num_qubits: usize,
) -> Result<Vec<&'a QuantumCircuit>> {
    if let Some(c) = circuits.iter().find(|c| c.num_qubits > num_qubits) {
        return Err(Error::CircuitTooLarge {
            circuit: c.id.clone(),
            needed: c.num_qubits,
            available: num_qubits,
        });
    }
    let mut sorted = circuits.to_vec();
    sorted.sort_by(|a, b| b.stats().density.total_cmp(&a.stats().density));
    let mut total = 0;
    let k = sorted
        .iter()
        .take_while(|c| {
            total += c.num_qubits;
            total <= num_qubits
        })
        .count();
    sorted.truncate(k);
    Ok(sorted)
}

/// Mean over circuits of `max(0, joint - independent)`.
pub fn score_loss(joint: &[Partition], independent: &[Partition]) -> f64 {
    if joint.is_empty() {
        return 0.0;
    }
    let total: f64 = joint
        .iter()
        .zip(independent)
        .map(|(j, i)| (j.score - i.score).max(0.0))
        .sum();
    total / joint.len() as f64
}

fn independent_plan(
    model: &HardwareModel,
    circuit: &QuantumCircuit,
    method: PartitionMethod,
    lambda: f64,
    threshold: f64,
    strong: &CrosstalkTable,
) -> Result<ExecutionPlan> {
    let partition = best_independent(model, circuit, strong, method, lambda)?;
    Ok(ExecutionPlan {
        selected: vec![circuit.id.clone()],
        partitions: vec![partition],
        delta_s: 0.0,
        threshold,
        verdict: Verdict::Independent,
        trf: 1,
    })
}

/// Decide how many of `circuits` (densest first, already fitting the
/// device) run together. Starts with all of them and drops the least dense
/// until the score loss is below `threshold`. A joint allocation that fails
/// outright counts as a loss above any threshold.
pub fn fidelity_gate(
    model: &HardwareModel,
    circuits: &[&QuantumCircuit],
    method: PartitionMethod,
    lambda: f64,
    threshold: f64,
    strong: &CrosstalkTable,
) -> Result<ExecutionPlan> {
    let Some(first) = circuits.first() else {
        return Err(Error::InvalidCircuit("no circuits to plan".into()));
    };
    let independent: Vec<Partition> = circuits
        .iter()
        .map(|c| best_independent(model, c, strong, method, lambda))
        .collect::<Result<_>>()?;
    for k in (2..=circuits.len()).rev() {
        let subset = &circuits[..k];
        let joint = match allocate_all(model, subset, method, lambda, strong) {
            Ok(p) => p,
            Err(Error::NoFeasiblePartition { .. }) => continue,
            Err(e) => return Err(e),
        };
        let delta_s = score_loss(&joint, &independent[..k]);
        if delta_s < threshold {
            let verdict = if k == circuits.len() {
                Verdict::Simultaneous
            } else {
                Verdict::Reduced(k)
            };
            return Ok(ExecutionPlan {
                selected: subset.iter().map(|c| c.id.clone()).collect(),
                partitions: joint,
                delta_s,
                threshold,
                verdict,
                trf: k,
            });
        }
    }
    independent_plan(model, first, method, lambda, threshold, strong)
}

/// Split every circuit into jobs: each round takes the densest prefix that
/// fits, runs the fidelity gate on it and queues whatever it rejected.
pub fn plan_all(
    model: &HardwareModel,
    circuits: &[&QuantumCircuit],
    method: PartitionMethod,
    lambda: f64,
    threshold: f64,
    strong: &CrosstalkTable,
) -> Result<Vec<ExecutionPlan>> {
    let mut remaining = circuits.to_vec();
    let mut plans = Vec::new();
    while !remaining.is_empty() {
        let chosen = select_k(&remaining, model.num_qubits())?;
        let plan = fidelity_gate(model, &chosen, method, lambda, threshold, strong)?;
        remaining.retain(|c| !plan.selected.contains(&c.id));
        plans.push(plan);
    }
    Ok(plans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devices;

    fn chain(id: &str, n: usize, reps: usize) -> QuantumCircuit {
        let mut c = QuantumCircuit::new(id, n, 0);
        for _ in 0..reps {
            for q in 1..n {
                c.cx(q - 1, q).unwrap();
            }
        }
        c
    }

    fn ids(circuits: &[&QuantumCircuit]) -> Vec<String> {
        circuits.iter().map(|c| c.id.clone()).collect()
    }

    #[test]
    fn prefix_fits_the_device() {
        let (a, b, c) = (chain("a", 5, 3), chain("b", 5, 2), chain("c", 4, 1));
        let chosen = select_k(&[&c, &b, &a], 12).unwrap();
        assert_eq!(ids(&chosen), ["a", "b"]);

        let (x, y) = (chain("x", 3, 1), chain("y", 3, 1));
        assert_eq!(select_k(&[&x, &y], 27).unwrap().len(), 2);
    }

    #[test]
    fn oversized_circuit_is_rejected() {
        let big = chain("big", 6, 1);
        assert!(matches!(
            select_k(&[&big], 5),
            Err(Error::CircuitTooLarge {
                needed: 6,
                available: 5,
                ..
            })
        ));
    }

    #[test]
    fn single_circuit_is_independent() {
        let m = devices::valencia();
        let a = chain("a", 3, 1);
        let plan = fidelity_gate(
            &m,
            &[&a],
            PartitionMethod::Gsp,
            2.0,
            0.1,
            &CrosstalkTable::new(),
        )
        .unwrap();
        assert_eq!(plan.verdict, Verdict::Independent);
        assert_eq!(plan.trf, 1);
        assert_eq!(plan.delta_s, 0.0);
    }

    #[test]
    fn uniform_device_runs_everything_together() {
        let m = devices::grid(4, 4);
        let (a, b) = (chain("a", 3, 2), chain("b", 3, 1));
        for method in [PartitionMethod::Gsp, PartitionMethod::Qhsp] {
            let plan =
                fidelity_gate(&m, &[&a, &b], method, 2.0, 0.1, &CrosstalkTable::new()).unwrap();
            assert_eq!(plan.delta_s, 0.0);
            assert_eq!(plan.verdict, Verdict::Simultaneous);
            assert_eq!(plan.trf, 2);
        }
    }

    #[test]
    fn zero_threshold_forces_independent() {
        let m = devices::valencia();
        let (a, b) = (chain("a", 2, 3), chain("b", 2, 1));
        let plan = fidelity_gate(
            &m,
            &[&a, &b],
            PartitionMethod::Gsp,
            2.0,
            0.0,
            &CrosstalkTable::new(),
        )
        .unwrap();
        assert_eq!(plan.verdict, Verdict::Independent);
        assert_eq!(plan.selected, ["a"]);
    }

    #[test]
    fn infinite_threshold_keeps_all_that_fit() {
        let m = devices::valencia();
        let (a, b) = (chain("a", 2, 3), chain("b", 2, 1));
        let plan = fidelity_gate(
            &m,
            &[&a, &b],
            PartitionMethod::Qhsp,
            2.0,
            f64::INFINITY,
            &CrosstalkTable::new(),
        )
        .unwrap();
        assert_eq!(plan.verdict, Verdict::Simultaneous);
        assert_eq!(plan.trf, 2);
        assert!(plan.delta_s > 0.0);
    }

    #[test]
    fn reduction_drops_the_least_dense() {
        // On Valencia two 2-qubit circuits cannot both sit on the good
        // edges; a third one forces a poor region. A threshold between the
        // two losses keeps exactly two.
        let m = devices::valencia();
        let (a, b, c) = (chain("a", 2, 4), chain("b", 2, 3), chain("c", 1, 0));
        let refs = [&a, &b, &c];
        let strong = CrosstalkTable::new();
        let loss = |k: usize| {
            let joint = allocate_all(&m, &refs[..k], PartitionMethod::Gsp, 2.0, &strong).unwrap();
            let indep: Vec<_> = refs[..k]
                .iter()
                .map(|x| best_independent(&m, x, &strong, PartitionMethod::Gsp, 2.0).unwrap())
                .collect();
            score_loss(&joint, &indep)
        };
        let (two, three) = (loss(2), loss(3));
        assert!(three > two, "{three} vs {two}");
        let plan = fidelity_gate(
            &m,
            &refs,
            PartitionMethod::Gsp,
            2.0,
            (two + three) / 2.0,
            &strong,
        )
        .unwrap();
        assert_eq!(plan.verdict, Verdict::Reduced(2));
        assert_eq!(plan.selected, ["a", "b"]);
        assert_eq!(plan.trf, 2);
    }

    #[test]
    fn every_circuit_lands_in_a_plan() {
        let m = devices::valencia();
        let circuits: Vec<QuantumCircuit> =
            (0..4).map(|i| chain(&format!("c{i}"), 2, i + 1)).collect();
        let refs: Vec<&QuantumCircuit> = circuits.iter().collect();
        let plans = plan_all(
            &m,
            &refs,
            PartitionMethod::Gsp,
            2.0,
            0.0,
            &CrosstalkTable::new(),
        )
        .unwrap();
        let mut all: Vec<String> = plans.iter().flat_map(|p| p.selected.clone()).collect();
        all.sort();
        assert_eq!(all, ["c0", "c1", "c2", "c3"]);
        assert!(plans.iter().all(|p| p.verdict == Verdict::Independent));
        assert_eq!(plans[0].selected, ["c3"]);
    }

    #[test]
    fn plan_json_shape() {
        let m = devices::grid(3, 3);
        let a = chain("a", 2, 1);
        let plan = fidelity_gate(
            &m,
            &[&a],
            PartitionMethod::Qhsp,
            2.0,
            0.1,
            &CrosstalkTable::new(),
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&plan.to_json()).unwrap();
        assert_eq!(v["verdict"], "INDEPENDENT");
        assert_eq!(v["trf"], 1);
        assert_eq!(v["selected"][0], "a");
        assert_eq!(v["partitions"][0]["method"], "QHSP");
        let reduced = serde_json::to_value(Verdict::Reduced(3)).unwrap();
        assert_eq!(reduced, serde_json::json!({"REDUCED": 3}));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::SeedableRng;

        fn workload(sizes: &[(usize, usize)]) -> Vec<QuantumCircuit> {
            sizes
                .iter()
                .enumerate()
                .map(|(i, &(n, reps))| chain(&format!("c{i}"), n, reps))
                .collect()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn loss_is_nonnegative_and_shrinks_with_k(
                seed in any::<u64>(),
                sizes in prop::collection::vec((1usize..5, 0usize..4), 2..5),
                gsp in any::<bool>(),
            ) {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let m = devices::random_calibration(&devices::heavy_hex16(), &mut rng, 0.001..0.08, 0.005..0.08);
                let method = if gsp { PartitionMethod::Gsp } else { PartitionMethod::Qhsp };
                let circuits = workload(&sizes);
                let refs: Vec<&QuantumCircuit> = circuits.iter().collect();
                let sorted = select_k(&refs, m.num_qubits()).unwrap();
                let strong = CrosstalkTable::new();
                let indep: Vec<Partition> = sorted
                    .iter()
                    .map(|c| best_independent(&m, c, &strong, method, 2.0).unwrap())
                    .collect();
                let mut previous: Option<Vec<f64>> = None;
                for k in (1..=sorted.len()).rev() {
                    let Ok(joint) = allocate_all(&m, &sorted[..k], method, 2.0, &strong) else { continue };
                    let loss = score_loss(&joint, &indep[..k]);
                    prop_assert!(loss >= 0.0);
                    let terms: Vec<f64> = joint.iter().zip(&indep).map(|(j, i)| (j.score - i.score).max(0.0)).collect();
                    if let Some(prev) = &previous {
                        // The densest circuits are allocated first, so their
                        // regions do not depend on the ones dropped later.
                        for (now, before) in terms.iter().zip(prev) {
                            prop_assert!(now <= before);
                        }
                    }
                    previous = Some(terms);
                }
            }

            #[test]
            fn verdict_matches_threshold(seed in any::<u64>(), threshold in 0.0f64..0.5) {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let m = devices::random_calibration(&devices::h7(), &mut rng, 0.001..0.08, 0.005..0.08);
                let circuits = workload(&[(3, 2), (2, 2), (2, 1)]);
                let refs: Vec<&QuantumCircuit> = circuits.iter().collect();
                let plan = fidelity_gate(&m, &refs, PartitionMethod::Gsp, 2.0, threshold, &CrosstalkTable::new()).unwrap();
                match plan.verdict {
                    Verdict::Simultaneous => prop_assert!(plan.delta_s < threshold && plan.trf == 3),
                    Verdict::Reduced(k) => prop_assert!(plan.delta_s < threshold && plan.trf == k && k < 3),
                    Verdict::Independent => prop_assert_eq!(plan.trf, 1),
                }
                prop_assert_eq!(plan.selected.len(), plan.partitions.len());
            }
        }
    }
}
