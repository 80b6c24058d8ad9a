use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Edge, HardwareModel};
use crate::error::{Error, Result};

/// A conditional error counts as strong crosstalk when it exceeds the
/// solo error rate by more than this factor.
pub const STRONG_CROSSTALK_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkEntry {
    /// Gate whose error degrades.
    pub gate: Edge,
    /// Gate running at the same time.
    pub conditioned_on: Edge,
    /// Error of `gate` while `conditioned_on` runs.
    pub error: f64,
}

#[derive(Serialize, Deserialize)]
struct CrosstalkFile {
    pairs: Vec<CrosstalkEntry>,
}

/// Directional table of conditional CNOT errors `E(g | g')`. A symmetric
/// effect needs two entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CrosstalkTable {
    entries: BTreeMap<(Edge, Edge), f64>,
}

impl CrosstalkTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Later entries for the same ordered pair replace earlier ones.
    pub fn from_entries(entries: impl IntoIterator<Item = CrosstalkEntry>) -> Self {
        CrosstalkTable {
            entries: entries
                .into_iter()
                .map(|e| ((e.gate, e.conditioned_on), e.error))
                .collect(),
        }
    }

    pub fn insert(&mut self, gate: Edge, conditioned_on: Edge, error: f64) {
        self.entries.insert((gate, conditioned_on), error);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = CrosstalkEntry> + '_ {
        self.entries
            .iter()
            .map(|(&(gate, conditioned_on), &error)| CrosstalkEntry {
                gate,
                conditioned_on,
                error,
            })
    }

    pub fn get(&self, gate: Edge, conditioned_on: Edge) -> Option<f64> {
        self.entries.get(&(gate, conditioned_on)).copied()
    }

    /// Entries that degrade `gate`.
    pub fn affecting(&self, gate: Edge) -> impl Iterator<Item = (Edge, f64)> + '_ {
        self.entries
            .range((gate, Edge::new(0, 0))..)
            .take_while(move |((g, _), _)| *g == gate)
            .map(|(&(_, c), &e)| (c, e))
    }

    /// Check every entry against the device: both gates are coupling edges,
    /// they share no qubit, and they sit one hop apart.
    pub fn validate(&self, model: &HardwareModel) -> Result<()> {
        for entry in self.iter() {
            for e in [entry.gate, entry.conditioned_on] {
                if !model.is_edge(e.lo(), e.hi()) {
                    return Err(Error::NotAnEdge(e.lo(), e.hi()));
                }
            }
            let (g, c) = (entry.gate, entry.conditioned_on);
            if g.shares_qubit(c) {
                return Err(Error::InvalidCrosstalk(format!(
                    "{g} and {c} share a qubit"
                )));
            }
            let adjacent = [g.lo(), g.hi()]
                .iter()
                .any(|&a| [c.lo(), c.hi()].iter().any(|&b| model.is_edge(a, b)));
            if !adjacent {
                return Err(Error::InvalidCrosstalk(format!(
                    "{g} and {c} are not one hop apart"
                )));
            }
            if !(0.0..1.0).contains(&entry.error) {
                return Err(Error::InvalidCrosstalk(format!(
                    "E({g} | {c}) = {} is outside [0, 1)",
                    entry.error
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CrosstalkFile = serde_json::from_str(text)?;
        Ok(Self::from_entries(file.pairs))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CrosstalkFile {
            pairs: self.iter().collect(),
        })
        .expect("plain data")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        Self::from_json(&text).map_err(|e| e.in_file(path))
    }
}

/// Keep the entries with `E(g | g') > 3 E(g)`. Direction is preserved, so a
/// pair may survive one way only.
pub fn extract_strong_crosstalk(
    table: &CrosstalkTable,
    model: &HardwareModel,
) -> Result<CrosstalkTable> {
    let mut strong = CrosstalkTable::new();
    for entry in table.iter() {
        for e in [entry.gate, entry.conditioned_on] {
            if !model.is_edge(e.lo(), e.hi()) {
                return Err(Error::NotAnEdge(e.lo(), e.hi()));
            }
        }
        if entry.error > STRONG_CROSSTALK_FACTOR * model.edge_error(entry.gate) {
            strong.insert(entry.gate, entry.conditioned_on, entry.error);
        }
    }
    Ok(strong)
}
