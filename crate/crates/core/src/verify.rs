//! Noiseless simulation and success metrics.
//!
//! Qubit `q` is bit `q` of a basis-state index (little endian), and an
//! outcome string prints classical bit 0 rightmost, as OpenQASM tools do.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{GateKind, OneQubitGate, QuantumCircuit};
use crate::error::{Error, Result};
use crate::hardware::{CrosstalkTable, Edge, HardwareModel};
use crate::partition::{crosstalk_adjust, Occupancy};
use crate::scheduler::{Manifest, Schedule};

/// Default limit on simulated qubits.
pub const SIMULATION_CAP: usize = 12;

/// Largest total-variation distance accepted as equivalent.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

pub type Matrix2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Matrix of a one-qubit gate, following the usual `qelib1.inc`
/// definitions up to global phase.
pub fn gate_matrix(gate: OneQubitGate, params: &[f64]) -> Matrix2 {
    let p = |i: usize| params.get(i).copied().unwrap_or(0.0);
    let u3 = |theta: f64, phi: f64, lambda: f64| -> Matrix2 {
        let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        [
            [c(co, 0.0), -Complex64::from_polar(s, lambda)],
            [
                Complex64::from_polar(s, phi),
                Complex64::from_polar(co, phi + lambda),
            ],
        ]
    };
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let diag = |phase: f64| [[one, zero], [zero, Complex64::from_polar(1.0, phase)]];
    match gate {
        OneQubitGate::Id => [[one, zero], [zero, one]],
        OneQubitGate::X => [[zero, one], [one, zero]],
        OneQubitGate::Y => [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]],
        OneQubitGate::Z => diag(std::f64::consts::PI),
        OneQubitGate::H => {
            let h = c(FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        OneQubitGate::S => diag(std::f64::consts::FRAC_PI_2),
        OneQubitGate::Sdg => diag(-std::f64::consts::FRAC_PI_2),
        OneQubitGate::T => diag(std::f64::consts::FRAC_PI_4),
        OneQubitGate::Tdg => diag(-std::f64::consts::FRAC_PI_4),
        OneQubitGate::Rx => {
            let (s, co) = ((p(0) / 2.0).sin(), (p(0) / 2.0).cos());
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        OneQubitGate::Ry => {
            let (s, co) = ((p(0) / 2.0).sin(), (p(0) / 2.0).cos());
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        OneQubitGate::Rz => [
            [Complex64::from_polar(1.0, -p(0) / 2.0), zero],
            [zero, Complex64::from_polar(1.0, p(0) / 2.0)],
        ],
        OneQubitGate::U1 => diag(p(0)),
        OneQubitGate::U2 => u3(std::f64::consts::FRAC_PI_2, p(0), p(1)),
        OneQubitGate::U3 => u3(p(0), p(1), p(2)),
    }
}

/// Dense state of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![c(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = c(1.0, 0.0);
        StateVector {
            num_qubits,
            amplitudes,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn apply_single(&mut self, m: &Matrix2, q: usize) {
        let bit = 1 << q;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1 << control, 1 << target);
        for i in 0..self.amplitudes.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amplitudes.swap(i, i | tb);
            }
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Outcome probabilities over a circuit's classical bits, keyed by the
/// integer whose bit `j` is classical bit `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub num_clbits: usize,
    pub probabilities: BTreeMap<u64, f64>,
}

impl Distribution {
    pub fn bitstring(&self, outcome: u64) -> String {
        (0..self.num_clbits)
            .rev()
            .map(|j| if outcome >> j & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn get(&self, outcome: u64) -> f64 {
        self.probabilities.get(&outcome).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    /// Distribution of the bits `bits[0], bits[1], ...` renumbered `0, 1, ...`.
    pub fn marginal(&self, bits: &[usize]) -> Distribution {
        let mut out = BTreeMap::new();
        for (&outcome, &p) in &self.probabilities {
            let key = bits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, &b)| acc | ((outcome >> b & 1) << j));
            *out.entry(key).or_insert(0.0) += p;
        }
        Distribution {
            num_clbits: bits.len(),
            probabilities: out,
        }
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        let keys: BTreeSet<u64> = self
            .probabilities
            .keys()
            .chain(other.probabilities.keys())
            .copied()
            .collect();
        keys.into_iter()
            .map(|k| (self.get(k) - other.get(k)).abs())
            .sum::<f64>()
            / 2.0
    }

    /// Outcome strings within `tolerance` of the most likely probability.
    pub fn most_likely(&self, tolerance: f64) -> BTreeSet<String> {
        let best = self.probabilities.values().copied().fold(0.0, f64::max);
        self.probabilities
            .iter()
            .filter(|(_, &p)| p >= best - tolerance)
            .map(|(&k, _)| self.bitstring(k))
            .collect()
    }
}

/// Simulate `circuit` with at most [`SIMULATION_CAP`] touched qubits.
pub fn simulate(circuit: &QuantumCircuit) -> Result<Distribution> {
    simulate_with_cap(circuit, SIMULATION_CAP)
}

/// Exact measurement distribution. Only qubits that some gate touches are
/// simulated, so a small program on a large device stays cheap; `cap`
/// bounds that number.
pub fn simulate_with_cap(circuit: &QuantumCircuit, cap: usize) -> Result<Distribution> {
    circuit.check_terminal_measurements()?;
    let touched: BTreeSet<usize> = circuit
        .gates()
        .iter()
        .filter(|g| g.kind != GateKind::Barrier)
        .flat_map(|g| g.qubits.iter().copied())
        .collect();
    if touched.len() > cap {
        return Err(Error::TooManyQubits {
            qubits: touched.len(),
            cap,
        });
    }
    let local: BTreeMap<usize, usize> = touched.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let mut state = StateVector::zero(touched.len());
    let mut readout: Vec<(usize, usize)> = Vec::new();
    for g in circuit.gates() {
        match g.kind {
            GateKind::Single(kind) => {
                state.apply_single(&gate_matrix(kind, &g.params), local[&g.qubits[0]])
            }
            GateKind::Cx => state.apply_cx(local[&g.qubits[0]], local[&g.qubits[1]]),
            GateKind::Measure => readout.push((local[&g.qubits[0]], g.clbit.unwrap_or(0))),
            GateKind::Barrier => {}
        }
    }
    let mut probabilities = BTreeMap::new();
    for (index, p) in state.probabilities().into_iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let outcome = readout.iter().fold(0u64, |acc, &(q, bit)| {
            let value = (index >> q & 1) as u64;
            (acc & !(1 << bit)) | (value << bit)
        });
        *probabilities.entry(outcome).or_insert(0.0) += p;
    }
    Ok(Distribution {
        num_clbits: circuit.num_clbits,
        probabilities,
    })
}

/// Result of comparing a merged program against its sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub passed: bool,
    pub max_tv: f64,
    pub per_circuit: BTreeMap<String, f64>,
}

impl std::fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        if self.max_tv == 0.0 {
            write!(f, "{verdict}, TV=0")
        } else {
            write!(f, "{verdict}, TV={:.2e}", self.max_tv)
        }
    }
}

/// Simulate `merged`, split its outcomes per circuit through `manifest`, and
/// compare each against the source circuit's own distribution.
pub fn check_equivalence(
    sources: &[&QuantumCircuit],
    merged: &QuantumCircuit,
    manifest: &Manifest,
) -> Result<EquivalenceReport> {
    for source in sources {
        let entry = manifest.get(&source.id).ok_or_else(|| {
            Error::ManifestMismatch(format!("no entry for circuit `{}`", source.id))
        })?;
        if entry.clbits.len() != source.num_clbits {
            return Err(Error::ManifestMismatch(format!(
                "`{}` has {} classical bits, the manifest lists {}",
                source.id,
                source.num_clbits,
                entry.clbits.len()
            )));
        }
        if let Some(&b) = entry.clbits.iter().find(|&&b| b >= merged.num_clbits) {
            return Err(Error::ManifestMismatch(format!(
                "bit {b} of `{}` is outside the merged program's {} bits",
                source.id, merged.num_clbits
            )));
        }
        if entry.logical_to_physical.len() != source.num_qubits
            || entry
                .logical_to_physical
                .values()
                .any(|&p| p >= merged.num_qubits)
        {
            return Err(Error::ManifestMismatch(format!(
                "bad qubit placement for `{}`",
                source.id
            )));
        }
    }
    let whole = match simulate(merged) {
        Ok(d) => Some(d),
        Err(Error::TooManyQubits { .. }) if split_by_partition(merged, manifest).is_some() => None,
        Err(e) => return Err(e),
    };
    let parts = if whole.is_none() {
        split_by_partition(merged, manifest)
    } else {
        None
    };
    let mut per_circuit = BTreeMap::new();
    for source in sources {
        let entry = &manifest.circuits[&source.id];
        let observed = match (&whole, &parts) {
            (Some(d), _) => d.marginal(&entry.clbits),
            (None, Some(parts)) => simulate(&parts[&source.id])?.marginal(&entry.clbits),
            (None, None) => unreachable!("checked above"),
        };
        let tv = observed.total_variation(&simulate(source)?);
        per_circuit.insert(source.id.clone(), tv);
    }
    let max_tv = per_circuit.values().copied().fold(0.0, f64::max);
    Ok(EquivalenceReport {
        passed: max_tv < EQUIVALENCE_TOLERANCE,
        max_tv,
        per_circuit,
    })
}

/// The merged program cut into one program per manifest entry, each keeping
/// the gates inside that entry's partition. `None` when some gate is not
/// inside exactly one partition; barriers are dropped.
fn split_by_partition(
    merged: &QuantumCircuit,
    manifest: &Manifest,
) -> Option<BTreeMap<String, QuantumCircuit>> {
    let mut owner = vec![None; merged.num_qubits];
    for (id, entry) in &manifest.circuits {
        for &q in &entry.partition {
            match owner.get_mut(q)? {
                slot @ None => *slot = Some(id.as_str()),
                Some(_) => return None,
            }
        }
    }
    let mut parts: BTreeMap<String, QuantumCircuit> = manifest
        .circuits
        .keys()
        .map(|id| {
            (
                id.clone(),
                QuantumCircuit::new(id.clone(), merged.num_qubits, merged.num_clbits),
            )
        })
        .collect();
    for g in merged
        .gates()
        .iter()
        .filter(|g| g.kind != GateKind::Barrier)
    {
        let first = owner[g.qubits[0]]?;
        if g.qubits.iter().any(|&q| owner[q] != Some(first)) {
            return None;
        }
        parts.get_mut(first)?.push(g.clone()).ok()?;
    }
    Some(parts)
}

/// Hardware result counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub counts: BTreeMap<String, u64>,
    #[serde(default)]
    pub shots: Option<u64>,
}

impl Counts {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        Self::from_json(&text).map_err(|e| e.in_file(path))
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Fraction of trials that produced one of the `expected` outcomes.
pub fn compute_pst(counts: &Counts, expected: &BTreeSet<String>) -> Result<f64> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let hits: u64 = counts
        .counts
        .iter()
        .filter(|(k, _)| expected.contains(k.as_str()))
        .map(|(_, v)| v)
        .sum();
    Ok(hits as f64 / total as f64)
}

/// The ideal outcomes of `circuit`: its most likely results.
pub fn expected_outcomes(circuit: &QuantumCircuit) -> Result<BTreeSet<String>> {
    Ok(simulate(circuit)?.most_likely(1e-9))
}

/// Product of `1 - error` over the CX gates of `gates` and `1 - readout` over
/// their measured qubits. `cnot_errors` overrides the model's CNOT errors,
/// for instance with crosstalk-degraded values.
pub fn estimate_success<'a>(
    gates: impl IntoIterator<Item = &'a crate::circuit::Gate>,
    model: &HardwareModel,
    cnot_errors: &BTreeMap<Edge, f64>,
) -> f64 {
    gates.into_iter().fold(1.0, |acc, g| match g.kind {
        GateKind::Cx => {
            let e = Edge::new(g.qubits[0], g.qubits[1]);
            let err = cnot_errors
                .get(&e)
                .copied()
                .unwrap_or_else(|| model.edge_error(e));
            acc * (1.0 - err)
        }
        GateKind::Measure => acc * (1.0 - model.readout_error(g.qubits[0])),
        _ => acc,
    })
}

/// CNOT errors of every edge inside `partitions`, degraded by strong
/// crosstalk with gates of the other partitions running at the same time.
pub fn co_running_cnot_errors(
    model: &HardwareModel,
    partitions: &[&[usize]],
    strong: &CrosstalkTable,
) -> BTreeMap<Edge, f64> {
    let mut out = BTreeMap::new();
    for (i, part) in partitions.iter().enumerate() {
        let others = Occupancy::from_regions(
            partitions
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| p.to_vec()),
        );
        out.extend(crosstalk_adjust(model, part, &others, strong));
    }
    out
}

/// Estimated success of a whole schedule.
pub fn schedule_success(
    schedule: &Schedule,
    model: &HardwareModel,
    cnot_errors: &BTreeMap<Edge, f64>,
) -> f64 {
    estimate_success(schedule.gates.iter().map(|g| &g.gate), model, cnot_errors)
}
