use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::transition::mapping_transition;
use super::RoutingOptions;
use crate::circuit::QuantumCircuit;
use crate::error::Result;
use crate::hardware::{DistanceMatrices, HardwareModel};

/// Placement of one circuit's logical qubits on the physical qubits of its
/// partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Mapping {
    to_physical: Vec<usize>,
    to_logical: BTreeMap<usize, usize>,
}

impl Mapping {
    /// `physical[l]` hosts logical qubit `l`. Panics on repeated entries.
    pub fn new(physical: Vec<usize>) -> Self {
        let to_logical: BTreeMap<usize, usize> =
            physical.iter().enumerate().map(|(l, &p)| (p, l)).collect();
        assert_eq!(
            to_logical.len(),
            physical.len(),
            "mapping is not injective: {physical:?}"
        );
        Mapping {
            to_physical: physical,
            to_logical,
        }
    }

    pub fn len(&self) -> usize {
        self.to_physical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_physical.is_empty()
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.to_physical[logical]
    }

    pub fn logical(&self, physical: usize) -> Option<usize> {
        self.to_logical.get(&physical).copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.to_physical
    }

    /// Exchange whatever sits on physical qubits `a` and `b`.
    pub fn swap_physical(&mut self, a: usize, b: usize) {
        let la = self.to_logical.remove(&a);
        let lb = self.to_logical.remove(&b);
        if let Some(l) = la {
            self.to_physical[l] = b;
            self.to_logical.insert(b, l);
        }
        if let Some(l) = lb {
            self.to_physical[l] = a;
            self.to_logical.insert(a, l);
        }
    }

    pub fn swapped(&self, a: usize, b: usize) -> Mapping {
        let mut m = self.clone();
        m.swap_physical(a, b);
        m
    }

    /// Sum of the combined distance over the physical ends of every CX.
    pub fn cx_distance(&self, circuit: &QuantumCircuit, matrices: &DistanceMatrices) -> f64 {
        circuit
            .cx_pairs()
            .map(|(a, b)| matrices.d(self.physical(a), self.physical(b)))
            .sum()
    }
}

impl From<Mapping> for Vec<usize> {
    fn from(m: Mapping) -> Self {
        m.to_physical
    }
}

impl TryFrom<Vec<usize>> for Mapping {
    type Error = String;

    fn try_from(v: Vec<usize>) -> std::result::Result<Self, String> {
        let mut sorted = v.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != v.len() {
            return Err(format!("mapping repeats a physical qubit: {v:?}"));
        }
        Ok(Mapping::new(v))
    }
}

/// RNG for one circuit: the run seed mixed with a hash of the circuit id, so
/// a circuit places identically whatever it is compiled with.
pub fn circuit_rng(seed: u64, circuit_id: &str) -> ChaCha8Rng {
    // 64-bit FNV-1a; stable across platforms and toolchains.
    let hash = circuit_id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    });
    ChaCha8Rng::seed_from_u64(seed ^ hash)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// The placements tried for a circuit: every bijection when there are at
/// most `attempts` of them, otherwise `attempts` seeded shuffles.
pub fn placement_attempts(
    partition: &[usize],
    attempts: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Mapping> {
    let mut sorted = partition.to_vec();
    sorted.sort_unstable();
    let k = sorted.len();
    let few = (1..=k)
        .try_fold(1usize, |acc, i| acc.checked_mul(i))
        .is_some_and(|n| n <= attempts);
    if few {
        return permutations(&sorted)
            .into_iter()
            .map(Mapping::new)
            .collect();
    }
    (0..attempts.max(1))
        .map(|_| {
            let mut p = sorted.clone();
            p.shuffle(rng);
            Mapping::new(p)
        })
        .collect()
}

/// Route `circuit` alone from each candidate placement and keep the one that
/// inserts the fewest CNOTs; ties go to the smaller total CX distance, then
/// to the earlier attempt.
pub fn initial_mapping(
    model: &HardwareModel,
    matrices: &DistanceMatrices,
    partition: &[usize],
    circuit: &QuantumCircuit,
    options: &RoutingOptions,
    seed: u64,
) -> Result<Mapping> {
    let mut rng = circuit_rng(seed, &circuit.id);
    let mut best: Option<(usize, f64, Mapping)> = None;
    for candidate in placement_attempts(partition, options.attempts, &mut rng) {
        let routed = mapping_transition(
            model,
            matrices,
            &[circuit],
            &[partition],
            std::slice::from_ref(&candidate),
            options,
        )?;
        let added = routed.circuits[0].additional_cnots();
        let distance = candidate.cx_distance(circuit, matrices);
        let better = match &best {
            None => true,
            Some((a, d, _)) => added < *a || (added == *a && distance < *d - 1e-12),
        };
        if better {
            best = Some((added, distance, candidate));
        }
    }
    Ok(best.expect("at least one placement is tried").2)
}
