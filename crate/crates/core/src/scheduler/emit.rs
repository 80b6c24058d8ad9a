use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{RoutedCircuit, Schedule};
use crate::circuit::emit_program;
use crate::error::{Error, Result};

/// Where one source circuit ended up in the merged program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Logical qubit to physical qubit at the end of the program, where the
    /// measurements happen.
    pub logical_to_physical: BTreeMap<usize, usize>,
    pub initial_logical_to_physical: BTreeMap<usize, usize>,
    pub partition: Vec<usize>,
    /// Classical register holding this circuit's results, if it measures.
    pub creg: Option<String>,
    /// `clbits[j]` is the merged classical bit receiving source bit `j`.
    /// Bit `j` of a register is the `j`-th character from the right of an
    /// outcome string.
    pub clbits: Vec<usize>,
}

/// Circuit id to placement, ordered by id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Manifest {
    pub circuits: BTreeMap<String, ManifestEntry>,
}

impl Manifest {
    pub fn from_schedule(schedule: &Schedule) -> Self {
        let as_map = |m: &super::Mapping| m.as_slice().iter().copied().enumerate().collect();
        let circuits = schedule
            .circuits
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let entry = ManifestEntry {
                    logical_to_physical: as_map(&c.final_mapping),
                    initial_logical_to_physical: as_map(&c.initial_mapping),
                    partition: c.partition.clone(),
                    creg: (c.num_clbits > 0).then(|| RoutedCircuit::creg_name(i)),
                    clbits: (c.clbit_offset..c.clbit_offset + c.num_clbits).collect(),
                };
                (c.id.clone(), entry)
            })
            .collect();
        Manifest { circuits }
    }

    pub fn get(&self, id: &str) -> Option<&ManifestEntry> {
        self.circuits.get(id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifests serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        Self::from_json(&text).map_err(|e| e.in_file(path))
    }
}

/// The merged program as OpenQASM (one `q` register over the whole device,
/// one `c<i>` register per measuring circuit) plus its manifest.
pub fn emit_merged_qasm(schedule: &Schedule) -> (String, Manifest) {
    let merged = schedule.to_circuit("merged");
    let text = emit_program(&merged, &schedule.cregs());
    (text, Manifest::from_schedule(schedule))
}
