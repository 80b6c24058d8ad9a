use std::cmp::Ordering;
use std::fmt;

use super::mapping::Mapping;
use crate::hardware::{DistanceMatrices, Edge, HardwareModel};

/// A routing move under consideration, on physical qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TentativeGate {
    /// Exchange the occupants of an edge (3 CX).
    Swap(Edge),
    /// Run blocked gate `gate` (an index into the blocked list) through a
    /// shared neighbor, leaving the mapping alone (4 CX).
    Bridge {
        gate: usize,
        control: usize,
        middle: usize,
        target: usize,
    },
}

impl TentativeGate {
    /// CX gates the move expands to.
    pub fn num_cx(&self) -> usize {
        match self {
            TentativeGate::Swap(_) => 3,
            TentativeGate::Bridge { .. } => 4,
        }
    }

    /// The CX sequence on physical qubits.
    pub fn cx_sequence(&self) -> Vec<(usize, usize)> {
        match *self {
            TentativeGate::Swap(e) => vec![(e.lo(), e.hi()), (e.hi(), e.lo()), (e.lo(), e.hi())],
            TentativeGate::Bridge {
                control,
                middle,
                target,
                ..
            } => vec![
                (control, middle),
                (middle, target),
                (control, middle),
                (middle, target),
            ],
        }
    }

    fn rank(&self) -> (u8, [usize; 3]) {
        match *self {
            TentativeGate::Bridge {
                control,
                middle,
                target,
                ..
            } => (0, [control, middle, target]),
            TentativeGate::Swap(e) => (1, [e.lo(), e.hi(), 0]),
        }
    }

    /// Preference among moves of equal cost: bridges first, then by physical
    /// qubits.
    pub fn tie_order(&self, other: &TentativeGate) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Display for TentativeGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TentativeGate::Swap(e) => write!(f, "swap{e}"),
            TentativeGate::Bridge {
                control,
                middle,
                target,
                ..
            } => write!(f, "bridge({control}, {middle}, {target})"),
        }
    }
}

/// Moves that could unblock `blocked` (logical CX pairs of one circuit):
/// every partition edge touching a qubit of a blocked gate, plus a bridge
/// for every blocked gate whose ends are two hops apart inside the
/// partition, one per shared neighbor.
pub fn find_swap_bridge_pairs(
    blocked: &[(usize, usize)],
    model: &HardwareModel,
    mapping: &Mapping,
    partition: &[usize],
    allow_bridges: bool,
) -> Vec<TentativeGate> {
    let mut touched: Vec<usize> = blocked
        .iter()
        .flat_map(|&(a, b)| [mapping.physical(a), mapping.physical(b)])
        .collect();
    touched.sort_unstable();
    touched.dedup();

    let mut swaps: Vec<Edge> = touched
        .iter()
        .flat_map(|&p| {
            model
                .neighbors(p)
                .iter()
                .filter(|n| partition.contains(n))
                .map(move |&n| Edge::new(p, n))
        })
        .collect();
    swaps.sort_unstable();
    swaps.dedup();

    let mut out: Vec<TentativeGate> = swaps.into_iter().map(TentativeGate::Swap).collect();
    if allow_bridges {
        for (gate, &(a, b)) in blocked.iter().enumerate() {
            let (control, target) = (mapping.physical(a), mapping.physical(b));
            if model.is_edge(control, target) {
                continue;
            }
            for &middle in model.neighbors(control) {
                if partition.contains(&middle) && model.is_edge(middle, target) {
                    out.push(TentativeGate::Bridge {
                        gate,
                        control,
                        middle,
                        target,
                    });
                }
            }
        }
    }
    out
}

/// Weights of the routing cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights {
    /// Weight of the lookahead term.
    pub extended: f64,
    /// Charge a move for its own CX gates.
    pub self_cost: bool,
}

fn layer_distance(gates: &[(usize, usize)], mapping: &Mapping, d: &DistanceMatrices) -> f64 {
    gates
        .iter()
        .map(|&(a, b)| d.d(mapping.physical(a), mapping.physical(b)))
        .sum()
}

/// Cost of a move; lower is better.
///
/// The blocked gates and the move's own CX gates are averaged together, and
/// the lookahead gates are averaged separately and weighted. A swap is
/// judged under the mapping it produces. A bridge is judged under the
/// current mapping, and the gate it executes leaves the blocked layer.
pub fn cost_h(
    tentative: &TentativeGate,
    blocked: &[(usize, usize)],
    lookahead: &[(usize, usize)],
    d: &DistanceMatrices,
    mapping: &Mapping,
    weights: CostWeights,
) -> f64 {
    let (after, front_sum, front_count) = match *tentative {
        TentativeGate::Swap(e) => {
            let after = mapping.swapped(e.lo(), e.hi());
            let sum = layer_distance(blocked, &after, d);
            (after, sum, blocked.len())
        }
        TentativeGate::Bridge { gate, .. } => {
            let sum = blocked
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != gate)
                .map(|(_, &(a, b))| d.d(mapping.physical(a), mapping.physical(b)))
                .sum();
            (mapping.clone(), sum, blocked.len() - 1)
        }
    };
    let (own_sum, own_count) = if weights.self_cost {
        let seq = tentative.cx_sequence();
        (seq.iter().map(|&(a, b)| d.d(a, b)).sum(), seq.len())
    } else {
        (0.0, 0)
    };
    let count = front_count + own_count;
    let basic = if count == 0 {
        0.0
    } else {
        (front_sum + own_sum) / count as f64
    };
    let extended = if lookahead.is_empty() {
        0.0
    } else {
        weights.extended * layer_distance(lookahead, &after, d) / lookahead.len() as f64
    };
    basic + extended
}

/// Two costs closer than this are treated as equal.
pub(crate) const COST_TIE: f64 = 1e-12;

/// The cheapest move, ties resolved by [`TentativeGate::tie_order`].
pub fn best_candidate(
    scored: impl IntoIterator<Item = (TentativeGate, f64)>,
) -> Option<(TentativeGate, f64)> {
    scored.into_iter().fold(None, |best, (g, h)| match best {
        None => Some((g, h)),
        Some((bg, bh)) => {
            let wins = h < bh - COST_TIE
                || ((h - bh).abs() <= COST_TIE && g.tie_order(&bg) == Ordering::Less);
            Some(if wins { (g, h) } else { (bg, bh) })
        }
    })
}
