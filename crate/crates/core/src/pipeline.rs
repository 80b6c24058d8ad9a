//! End-to-end compilation: plan, partition, route, emit.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::circuit::QuantumCircuit;
use crate::error::{Error, Result};
use crate::hardware::{extract_strong_crosstalk, CrosstalkTable, DistanceMatrices, HardwareModel};
use crate::parallelism::{plan_all, ExecutionPlan, Verdict};
use crate::partition::PartitionMethod;
use crate::scheduler::{emit_merged_qasm, schedule_circuits, Manifest, RoutingOptions, Schedule};
use crate::verify::{co_running_cnot_errors, estimate_success};

/// Every tunable of a compilation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub method: PartitionMethod,
    /// Weight of CNOT fidelity against readout fidelity in the QHSP degree.
    pub lambda: f64,
    /// Largest accepted mean partition-score loss for running together.
    pub delta: f64,
    /// Weight of the lookahead term in the routing cost.
    pub weight_w: f64,
    /// Weight of hop distance in the routing distance matrix.
    pub alpha1: f64,
    /// Weight of swap error in the routing distance matrix.
    pub alpha2: f64,
    pub ext_layer: usize,
    pub attempts: usize,
    pub seed: u64,
    pub swap_only: bool,
    pub no_self_cost: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            method: PartitionMethod::Qhsp,
            lambda: 2.0,
            delta: 0.1,
            weight_w: 0.5,
            alpha1: 0.5,
            alpha2: 0.5,
            ext_layer: 20,
            attempts: 10,
            seed: 0,
            swap_only: false,
            no_self_cost: false,
        }
    }
}

impl RunConfig {
    pub fn routing(&self) -> RoutingOptions {
        RoutingOptions {
            weight: self.weight_w,
            ext_layer: self.ext_layer,
            attempts: self.attempts,
            swap_only: self.swap_only,
            no_self_cost: self.no_self_cost,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("lambda", self.lambda),
            ("weight-w", self.weight_w),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
        ];
        for (name, v) in finite {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!(
                    "--{name} must be a nonnegative number, got {v}"
                )));
            }
        }
        // Infinity is a meaningful threshold (never reduce).
        if self.delta.is_nan() || self.delta < 0.0 {
            return Err(Error::Config(format!(
                "--delta must be nonnegative, got {}",
                self.delta
            )));
        }
        if self.attempts == 0 {
            return Err(Error::Config("--attempts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-circuit figures of a compiled job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitReport {
    pub partition: Vec<usize>,
    pub additional_cnots: usize,
    pub swaps: usize,
    pub bridges: usize,
    pub depth: usize,
    pub gates: usize,
    /// Estimated success probability under calibration and crosstalk.
    pub esp: f64,
}

/// Figures of a compiled job, as written to `stats_<i>.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStats {
    pub verdict: Verdict,
    pub trf: usize,
    pub delta_s: f64,
    pub threshold: f64,
    pub additional_cnots: usize,
    pub depth: usize,
    pub esp: f64,
    pub circuits: BTreeMap<String, CircuitReport>,
}

impl PlanStats {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

/// One device job: its plan, routed schedule and artifacts.
#[derive(Debug, Clone)]
pub struct CompiledPlan {
    pub plan: ExecutionPlan,
    pub schedule: Schedule,
    pub qasm: String,
    pub manifest: Manifest,
    pub stats: PlanStats,
}

fn check_ids(circuits: &[QuantumCircuit]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for c in circuits {
        if !seen.insert(c.id.as_str()) {
            return Err(Error::DuplicateCircuitId(c.id.clone()));
        }
    }
    Ok(())
}

/// Group `circuits` into jobs and partition each job. `crosstalk` is the
/// raw measured table; only its strong pairs are used.
pub fn plan(
    model: &HardwareModel,
    circuits: &[QuantumCircuit],
    crosstalk: &CrosstalkTable,
    config: &RunConfig,
) -> Result<Vec<ExecutionPlan>> {
    config.validate()?;
    check_ids(circuits)?;
    let strong = extract_strong_crosstalk(crosstalk, model)?;
    let refs: Vec<&QuantumCircuit> = circuits.iter().collect();
    plan_all(
        model,
        &refs,
        config.method,
        config.lambda,
        config.delta,
        &strong,
    )
}

/// Compile `circuits` into as many merged programs as the planner asks for.
pub fn compile(
    model: &HardwareModel,
    circuits: &[QuantumCircuit],
    crosstalk: &CrosstalkTable,
    config: &RunConfig,
) -> Result<Vec<CompiledPlan>> {
    let plans = plan(model, circuits, crosstalk, config)?;
    let strong = extract_strong_crosstalk(crosstalk, model)?;
    let matrices = DistanceMatrices::new(model, config.alpha1, config.alpha2);
    let by_id: BTreeMap<&str, &QuantumCircuit> =
        circuits.iter().map(|c| (c.id.as_str(), c)).collect();
    let options = config.routing();

    plans
        .into_iter()
        .map(|plan| {
            let jobs: Vec<(&QuantumCircuit, &[usize])> = plan
                .partitions
                .iter()
                .map(|p| (by_id[p.circuit_id.as_str()], p.qubits.as_slice()))
                .collect();
            let schedule = schedule_circuits(model, &matrices, &jobs, &options, config.seed)?;
            let (qasm, manifest) = emit_merged_qasm(&schedule);
            let stats = plan_stats(model, &plan, &schedule, &strong);
            Ok(CompiledPlan {
                plan,
                schedule,
                qasm,
                manifest,
                stats,
            })
        })
        .collect()
}

fn plan_stats(
    model: &HardwareModel,
    plan: &ExecutionPlan,
    schedule: &Schedule,
    strong: &CrosstalkTable,
) -> PlanStats {
    let regions: Vec<&[usize]> = schedule
        .circuits
        .iter()
        .map(|c| c.partition.as_slice())
        .collect();
    let errors = co_running_cnot_errors(model, &regions, strong);
    let circuits: BTreeMap<String, CircuitReport> = schedule
        .circuits
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let r = schedule.routing_stats(i);
            let report = CircuitReport {
                partition: c.partition.clone(),
                additional_cnots: r.additional_cnots,
                swaps: r.swaps,
                bridges: r.bridges,
                depth: r.depth,
                gates: r.gates,
                esp: estimate_success(schedule.gates_of(i), model, &errors),
            };
            (c.id.clone(), report)
        })
        .collect();
    PlanStats {
        verdict: plan.verdict,
        trf: plan.trf,
        delta_s: plan.delta_s,
        threshold: plan.threshold,
        additional_cnots: schedule.additional_cnots(),
        depth: schedule.depth(None),
        esp: circuits.values().map(|c| c.esp).product(),
        circuits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::OneQubitGate;
    use crate::devices;
    use crate::verify::check_equivalence;

    fn ghz(id: &str, n: usize) -> QuantumCircuit {
        let mut c = QuantumCircuit::new(id, n, n);
        c.apply(OneQubitGate::H, 0, &[]).unwrap();
        for q in 1..n {
            c.cx(0, q).unwrap();
        }
        c.measure_all();
        c
    }

    #[test]
    fn two_circuits_on_a_line() {
        let m = devices::line(5);
        let circuits = [ghz("a", 2), ghz("b", 2)];
        let out = compile(&m, &circuits, &CrosstalkTable::new(), &RunConfig::default()).unwrap();
        let total: usize = out.iter().map(|p| p.plan.selected.len()).sum();
        assert_eq!(total, 2);
        for job in &out {
            assert_eq!(job.stats.trf, job.plan.selected.len());
            let merged = job.schedule.to_circuit("merged");
            let sources: Vec<&QuantumCircuit> = circuits
                .iter()
                .filter(|c| job.plan.selected.contains(&c.id))
                .collect();
            assert!(
                check_equivalence(&sources, &merged, &job.manifest)
                    .unwrap()
                    .passed
            );
        }
    }

    #[test]
    fn stats_shape() {
        let m = devices::h7();
        let circuits = [ghz("wide", 4), ghz("small", 3)];
        let config = RunConfig {
            delta: f64::INFINITY,
            ..RunConfig::default()
        };
        let out = compile(&m, &circuits, &CrosstalkTable::new(), &config).unwrap();
        assert_eq!(out.len(), 1);
        let v: serde_json::Value = serde_json::from_str(&out[0].stats.to_json()).unwrap();
        assert_eq!(v["verdict"], "SIMULTANEOUS");
        assert_eq!(v["trf"], 2);
        for id in ["wide", "small"] {
            let c = &v["circuits"][id];
            for key in ["additional_cnots", "swaps", "bridges", "depth", "esp"] {
                assert!(!c[key].is_null(), "{id}.{key}");
            }
        }
        let esp = out[0].stats.esp;
        assert!(esp > 0.0 && esp < 1.0);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let m = devices::line(5);
        let err = compile(
            &m,
            &[ghz("a", 2), ghz("a", 2)],
            &CrosstalkTable::new(),
            &RunConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateCircuitId(id) if id == "a"));
    }

    #[test]
    fn oversized_circuit() {
        let m = devices::line(3);
        let err = compile(
            &m,
            &[ghz("big", 4)],
            &CrosstalkTable::new(),
            &RunConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::CircuitTooLarge { .. }));
    }

    #[test]
    fn bad_config() {
        let m = devices::line(3);
        let config = RunConfig {
            alpha1: f64::NAN,
            ..RunConfig::default()
        };
        assert!(matches!(
            compile(&m, &[ghz("a", 2)], &CrosstalkTable::new(), &config),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn same_seed_same_output() {
        let m = devices::heavy_hex16();
        let circuits = [ghz("a", 4), ghz("b", 5), ghz("c", 3)];
        let config = RunConfig {
            seed: 11,
            ..RunConfig::default()
        };
        let run = || {
            compile(&m, &circuits, &CrosstalkTable::new(), &config)
                .unwrap()
                .into_iter()
                .map(|p| (p.qasm, p.manifest.to_json(), p.stats.to_json()))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
