use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HardwareModel;
use crate::error::{Error, Result};

/// `{"num_qubits": n, "edges": [[i, j], ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyFile {
    pub num_qubits: usize,
    pub edges: Vec<[usize; 2]>,
}

/// `{"cnot_errors": [[i, j, e], ...], "readout_errors": [...], "single_qubit_errors": [...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFile {
    pub cnot_errors: Vec<(usize, usize, f64)>,
    pub readout_errors: Vec<f64>,
    #[serde(default)]
    pub single_qubit_errors: Vec<f64>,
}

impl HardwareModel {
    pub fn from_files(topology: TopologyFile, calibration: CalibrationFile) -> Result<Self> {
        let edges: Vec<(usize, usize)> = topology.edges.iter().map(|&[a, b]| (a, b)).collect();
        HardwareModel::new(
            topology.num_qubits,
            &edges,
            &calibration.cnot_errors,
            calibration.readout_errors,
            calibration.single_qubit_errors,
        )
    }

    pub fn from_json(topology: &str, calibration: &str) -> Result<Self> {
        Self::from_files(
            serde_json::from_str(topology)?,
            serde_json::from_str(calibration)?,
        )
    }

    pub fn topology_file(&self) -> TopologyFile {
        TopologyFile {
            num_qubits: self.num_qubits(),
            edges: self.edges().iter().map(|&e| e.into()).collect(),
        }
    }

    pub fn calibration_file(&self) -> CalibrationFile {
        CalibrationFile {
            cnot_errors: self
                .edges()
                .iter()
                .map(|e| (e.lo(), e.hi(), self.edge_error(*e)))
                .collect(),
            readout_errors: self.readout_errors().to_vec(),
            single_qubit_errors: (0..self.num_qubits())
                .map(|q| self.single_qubit_error(q))
                .collect(),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
    serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))
}

/// Load a device from a topology file and a calibration snapshot.
pub fn load_hardware(
    topology: impl AsRef<Path>,
    calibration: impl AsRef<Path>,
) -> Result<HardwareModel> {
    let topo: TopologyFile = read_json(topology.as_ref())?;
    let cal: CalibrationFile = read_json(calibration.as_ref())?;
    HardwareModel::from_files(topo, cal).map_err(|e| e.in_file(calibration.as_ref()))
}
