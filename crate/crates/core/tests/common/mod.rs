#![allow(dead_code)]

use std::path::PathBuf;

use qmpc::hardware::load_hardware;
use qmpc::HardwareModel;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn benchmarks_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("benchmarks")
}

pub fn benchmark(name: &str) -> PathBuf {
    benchmarks_dir().join(format!("{name}.qasm"))
}

/// `fixtures/<name>_topology.json` with `fixtures/<name>_calibration.json`.
pub fn fixture_device(name: &str) -> HardwareModel {
    load_hardware(
        fixture(&format!("{name}_topology.json")),
        fixture(&format!("{name}_calibration.json")),
    )
    .unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}
