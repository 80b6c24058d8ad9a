//! Circuit representation: gates, circuits, the dependency DAG and the
//! per-circuit statistics consumed by the planner and the partitioners.

mod dag;
mod qasm;
mod random;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dag::DagCircuit;
pub use qasm::{emit_program, emit_qasm, load_qasm, parse_program, parse_qasm, ParsedProgram};
pub use random::random_circuit;

/// Single-qubit gates accepted by the front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OneQubitGate {
    Id,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    U1,
    U2,
    U3,
}

impl OneQubitGate {
    pub const ALL: [OneQubitGate; 15] = [
        Self::Id,
        Self::X,
        Self::Y,
        Self::Z,
        Self::H,
        Self::S,
        Self::Sdg,
        Self::T,
        Self::Tdg,
        Self::Rx,
        Self::Ry,
        Self::Rz,
        Self::U1,
        Self::U2,
        Self::U3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Id => "id",
            Self::X => "x",
            Self::Y => "y",
            Self::Z => "z",
            Self::H => "h",
            Self::S => "s",
            Self::Sdg => "sdg",
            Self::T => "t",
            Self::Tdg => "tdg",
            Self::Rx => "rx",
            Self::Ry => "ry",
            Self::Rz => "rz",
            Self::U1 => "u1",
            Self::U2 => "u2",
            Self::U3 => "u3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|g| g.name() == name)
    }

    pub fn num_params(self) -> usize {
        match self {
            Self::Rx | Self::Ry | Self::Rz | Self::U1 => 1,
            Self::U2 => 2,
            Self::U3 => 3,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Single(OneQubitGate),
    Cx,
    Measure,
    Barrier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// Control first for CX. Barriers may span any number of qubits.
    pub qubits: Vec<usize>,
    pub params: Vec<f64>,
    /// Destination bit of a measurement.
    pub clbit: Option<usize>,
}

impl Gate {
    pub fn single(gate: OneQubitGate, qubit: usize, params: Vec<f64>) -> Self {
        Gate {
            kind: GateKind::Single(gate),
            qubits: vec![qubit],
            params,
            clbit: None,
        }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate {
            kind: GateKind::Cx,
            qubits: vec![control, target],
            params: Vec::new(),
            clbit: None,
        }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        Gate {
            kind: GateKind::Measure,
            qubits: vec![qubit],
            params: Vec::new(),
            clbit: Some(clbit),
        }
    }

    pub fn barrier(qubits: Vec<usize>) -> Self {
        Gate {
            kind: GateKind::Barrier,
            qubits,
            params: Vec::new(),
            clbit: None,
        }
    }

    pub fn is_cx(&self) -> bool {
        self.kind == GateKind::Cx
    }

    /// Same gate with every qubit index passed through `map`.
    pub fn relabeled(&self, map: impl Fn(usize) -> usize) -> Gate {
        Gate {
            kind: self.kind,
            qubits: self.qubits.iter().map(|&q| map(q)).collect(),
            params: self.params.clone(),
            clbit: self.clbit,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GateKind::Single(g) => write!(f, "{}{:?} q{}", g.name(), self.params, self.qubits[0]),
            GateKind::Cx => write!(f, "cx q{},q{}", self.qubits[0], self.qubits[1]),
            GateKind::Measure => write!(
                f,
                "measure q{} -> c{}",
                self.qubits[0],
                self.clbit.unwrap_or(0)
            ),
            GateKind::Barrier => write!(f, "barrier {:?}", self.qubits),
        }
    }
}

/// A named slice of a flattened classical bit space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalRegister {
    pub name: String,
    pub offset: usize,
    pub size: usize,
}

/// A circuit over a single quantum register `q` and at most one classical
/// register `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCircuit {
    pub id: String,
    pub num_qubits: usize,
    pub num_clbits: usize,
    gates: Vec<Gate>,
}

impl QuantumCircuit {
    pub fn new(id: impl Into<String>, num_qubits: usize, num_clbits: usize) -> Self {
        QuantumCircuit {
            id: id.into(),
            num_qubits,
            num_clbits,
            gates: Vec::new(),
        }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Append a gate after checking it against the register sizes.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        for &q in &gate.qubits {
            if q >= self.num_qubits {
                return Err(Error::InvalidCircuit(format!(
                    "gate `{gate}` references qubit {q} but the circuit has {} qubits",
                    self.num_qubits
                )));
            }
        }
        match gate.kind {
            GateKind::Cx => {
                if gate.qubits.len() != 2 || gate.qubits[0] == gate.qubits[1] {
                    return Err(Error::InvalidCircuit(format!(
                        "cx needs two distinct qubits, got {:?}",
                        gate.qubits
                    )));
                }
            }
            GateKind::Single(g) => {
                if gate.qubits.len() != 1 || gate.params.len() != g.num_params() {
                    return Err(Error::InvalidCircuit(format!(
                        "{} takes 1 qubit and {} parameters",
                        g.name(),
                        g.num_params()
                    )));
                }
            }
            GateKind::Measure => match gate.clbit {
                Some(c) if c < self.num_clbits && gate.qubits.len() == 1 => {}
                _ => {
                    return Err(Error::InvalidCircuit(format!(
                        "measurement `{gate}` needs a classical bit below {}",
                        self.num_clbits
                    )))
                }
            },
            GateKind::Barrier => {
                if gate.qubits.is_empty() {
                    return Err(Error::InvalidCircuit("empty barrier".into()));
                }
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn cx(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push(Gate::cx(control, target))?;
        Ok(self)
    }

    pub fn apply(&mut self, gate: OneQubitGate, qubit: usize, params: &[f64]) -> Result<&mut Self> {
        self.push(Gate::single(gate, qubit, params.to_vec()))?;
        Ok(self)
    }

    pub fn measure(&mut self, qubit: usize, clbit: usize) -> Result<&mut Self> {
        self.push(Gate::measure(qubit, clbit))?;
        Ok(self)
    }

    /// Measure qubit `i` into bit `i`, growing the classical register if needed.
    pub fn measure_all(&mut self) -> &mut Self {
        self.num_clbits = self.num_clbits.max(self.num_qubits);
        for q in 0..self.num_qubits {
            self.gates.push(Gate::measure(q, q));
        }
        self
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cx()).count()
    }

    /// `(control, target)` of every CX in source order.
    pub fn cx_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.gates
            .iter()
            .filter(|g| g.is_cx())
            .map(|g| (g.qubits[0], g.qubits[1]))
    }

    pub fn stats(&self) -> CircuitStats {
        CircuitStats::of(self)
    }

    pub fn dag(&self) -> DagCircuit {
        DagCircuit::build(self)
    }

    /// Fails if any qubit is acted on after it has been measured.
    pub fn check_terminal_measurements(&self) -> Result<()> {
        let mut measured = vec![false; self.num_qubits];
        for gate in &self.gates {
            match gate.kind {
                GateKind::Measure => measured[gate.qubits[0]] = true,
                GateKind::Barrier => {}
                _ => {
                    if let Some(&q) = gate.qubits.iter().find(|&&q| measured[q]) {
                        return Err(Error::NonTerminalMeasure {
                            circuit: self.id.clone(),
                            qubit: q,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitStats {
    /// CNOTs per qubit.
    pub density: f64,
    pub cnot_count: usize,
    /// Largest number of distinct CX partners of any logical qubit.
    pub largest_logical_degree: usize,
    pub qubit_count: usize,
}

impl CircuitStats {
    pub fn of(circuit: &QuantumCircuit) -> Self {
        let mut partners = vec![BTreeSet::new(); circuit.num_qubits];
        for (a, b) in circuit.cx_pairs() {
            partners[a].insert(b);
            partners[b].insert(a);
        }
        let cnot_count = circuit.cnot_count();
        let qubit_count = circuit.num_qubits;
        CircuitStats {
            density: if qubit_count == 0 {
                0.0
            } else {
                cnot_count as f64 / qubit_count as f64
            },
            cnot_count,
            largest_logical_degree: partners.iter().map(BTreeSet::len).max().unwrap_or(0),
            qubit_count,
        }
    }
}
