//! Noise- and crosstalk-aware multi-programming compiler for NISQ devices.
//!
//! Several small circuits are merged into one job on a single device:
//!
//! 1. [`parallelism`] orders circuits by CNOT density and decides how many
//!    run together, gating on the partition-score degradation.
//! 2. [`partition`] carves the coupling graph into disjoint, connected,
//!    reliable regions, one per circuit, either exhaustively or with the
//!    fidelity-degree heuristic.
//! 3. [`scheduler`] picks initial placements and routes every circuit inside
//!    its region with SWAP and Bridge insertion, then emits one merged
//!    OpenQASM program.
//! 4. [`verify`] simulates the result and computes success metrics.
//!
//! [`pipeline`] wires these stages together; [`cli`] exposes them on the
//! command line.

pub mod circuit;
pub mod cli;
pub mod devices;
pub mod error;
pub mod hardware;
pub mod parallelism;
pub mod partition;
pub mod pipeline;
pub mod scheduler;
pub mod verify;

pub use circuit::{CircuitStats, DagCircuit, Gate, GateKind, OneQubitGate, QuantumCircuit};
pub use error::{Error, Result};
pub use hardware::{CrosstalkTable, DistanceMatrices, Edge, HardwareModel};
pub use parallelism::{ExecutionPlan, Verdict};
pub use partition::{Partition, PartitionMethod};
pub use pipeline::{compile, CompiledPlan, RunConfig};
pub use scheduler::{Manifest, Schedule};
