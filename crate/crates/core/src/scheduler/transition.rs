use std::collections::{BTreeSet, VecDeque};

use super::cost::{best_candidate, cost_h, find_swap_bridge_pairs, TentativeGate};
use super::mapping::Mapping;
use super::{Origin, RoutedCircuit, RoutingOptions, Schedule, ScheduledGate};
use crate::circuit::{DagCircuit, Gate, GateKind, QuantumCircuit};
use crate::error::{Error, Result};
use crate::hardware::{DistanceMatrices, Edge, HardwareModel};

/// Rounds without executing a gate before a circuit's oldest blocked gate is
/// moved along a shortest path instead of by cost.
const STALL_LIMIT: usize = 5;

/// Routing state of one circuit.
struct Router<'a> {
    index: usize,
    circuit: &'a QuantumCircuit,
    dag: DagCircuit,
    partition: &'a [usize],
    mapping: Mapping,
    waiting_on: Vec<usize>,
    front: BTreeSet<usize>,
    done: usize,
    measures: Vec<usize>,
    swaps: usize,
    bridges: usize,
    idle_rounds: usize,
}

impl<'a> Router<'a> {
    fn new(
        index: usize,
        circuit: &'a QuantumCircuit,
        partition: &'a [usize],
        mapping: Mapping,
    ) -> Self {
        let dag = circuit.dag();
        let waiting_on = (0..dag.num_nodes())
            .map(|n| dag.predecessors(n).len())
            .collect();
        let front = dag.front_layer().into_iter().collect();
        Router {
            index,
            circuit,
            dag,
            partition,
            mapping,
            waiting_on,
            front,
            done: 0,
            measures: Vec::new(),
            swaps: 0,
            bridges: 0,
            idle_rounds: 0,
        }
    }

    fn finished(&self) -> bool {
        self.done == self.dag.num_nodes()
    }

    fn gate(&self, node: usize) -> &'a Gate {
        &self.circuit.gates()[node]
    }

    fn pair(&self, node: usize) -> (usize, usize) {
        let g = self.gate(node);
        (g.qubits[0], g.qubits[1])
    }

    fn complete(&mut self, node: usize) {
        self.front.remove(&node);
        self.done += 1;
        for &s in self.dag.successors(node) {
            self.waiting_on[s] -= 1;
            if self.waiting_on[s] == 0 {
                self.front.insert(s);
            }
        }
    }

    fn executable(&self, model: &HardwareModel, node: usize) -> bool {
        let g = self.gate(node);
        !g.is_cx()
            || model.is_edge(
                self.mapping.physical(g.qubits[0]),
                self.mapping.physical(g.qubits[1]),
            )
    }

    /// Emit everything that can run under the current mapping. Measurements
    /// are held back until routing ends. Returns the number of gates done.
    fn emit_ready(&mut self, model: &HardwareModel, out: &mut Vec<ScheduledGate>) -> usize {
        let mut count = 0;
        loop {
            let ready: Vec<usize> = self
                .front
                .iter()
                .copied()
                .filter(|&n| self.executable(model, n))
                .collect();
            if ready.is_empty() {
                return count;
            }
            for node in ready {
                let gate = self.gate(node);
                if gate.kind == GateKind::Measure {
                    self.measures.push(node);
                } else {
                    out.push(ScheduledGate {
                        circuit: self.index,
                        gate: gate.relabeled(|q| self.mapping.physical(q)),
                        origin: Origin::Source(node),
                    });
                }
                self.complete(node);
                count += 1;
            }
        }
    }

    /// Next CX gates past the front, breadth first through the DAG.
    fn lookahead(&self, size: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if size == 0 {
            return out;
        }
        let mut seen: BTreeSet<usize> = self.front.clone();
        let mut queue: VecDeque<usize> = self.front.iter().copied().collect();
        while let Some(n) = queue.pop_front() {
            for &s in self.dag.successors(n) {
                if seen.insert(s) {
                    if self.gate(s).is_cx() {
                        out.push(self.pair(s));
                        if out.len() == size {
                            return out;
                        }
                    }
                    queue.push_back(s);
                }
            }
        }
        out
    }

    fn emit_swap(&mut self, a: usize, b: usize, out: &mut Vec<ScheduledGate>) {
        for (c, t) in TentativeGate::Swap(Edge::new(a, b)).cx_sequence() {
            out.push(ScheduledGate {
                circuit: self.index,
                gate: Gate::cx(c, t),
                origin: Origin::Swap,
            });
        }
        self.mapping.swap_physical(a, b);
        self.swaps += 1;
    }

    /// Pick and apply the cheapest move. Returns true if it executed a gate.
    fn step(
        &mut self,
        model: &HardwareModel,
        matrices: &DistanceMatrices,
        options: &RoutingOptions,
        out: &mut Vec<ScheduledGate>,
    ) -> bool {
        let blocked_nodes: Vec<usize> = self.front.iter().copied().collect();
        let blocked: Vec<(usize, usize)> = blocked_nodes.iter().map(|&n| self.pair(n)).collect();
        let lookahead = self.lookahead(options.ext_layer);
        let candidates = find_swap_bridge_pairs(
            &blocked,
            model,
            &self.mapping,
            self.partition,
            !options.swap_only,
        );
        let weights = options.weights();
        let (choice, _) = best_candidate(candidates.iter().map(|c| {
            (
                *c,
                cost_h(c, &blocked, &lookahead, matrices, &self.mapping, weights),
            )
        }))
        .expect("a connected partition always offers a swap");
        match choice {
            TentativeGate::Swap(e) => {
                self.emit_swap(e.lo(), e.hi(), out);
                false
            }
            TentativeGate::Bridge { gate, .. } => {
                let node = blocked_nodes[gate];
                for (c, t) in choice.cx_sequence() {
                    out.push(ScheduledGate {
                        circuit: self.index,
                        gate: Gate::cx(c, t),
                        origin: Origin::Bridge(node),
                    });
                }
                self.bridges += 1;
                self.complete(node);
                true
            }
        }
    }

    /// Walk the control of the oldest blocked gate along a shortest path
    /// inside the partition until it sits next to the target.
    fn force(&mut self, model: &HardwareModel, out: &mut Vec<ScheduledGate>) {
        let node = *self
            .front
            .first()
            .expect("stalled circuit has a blocked gate");
        let (c, t) = self.pair(node);
        let (from, to) = (self.mapping.physical(c), self.mapping.physical(t));
        let path = shortest_path(model, self.partition, from, to);
        for w in path.windows(2).take(path.len().saturating_sub(2)) {
            self.emit_swap(w[0], w[1], out);
        }
    }
}

fn shortest_path(model: &HardwareModel, within: &[usize], from: usize, to: usize) -> Vec<usize> {
    let mut parent = vec![usize::MAX; model.num_qubits()];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &v in model.neighbors(u) {
            if parent[v] == usize::MAX && within.contains(&v) {
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    let mut path = vec![to];
    while *path.last().unwrap() != from {
        path.push(parent[*path.last().unwrap()]);
    }
    path.reverse();
    path
}

fn check_job(
    model: &HardwareModel,
    circuit: &QuantumCircuit,
    partition: &[usize],
    mapping: &Mapping,
) -> Result<()> {
    circuit.check_terminal_measurements()?;
    let mut sorted_partition = partition.to_vec();
    sorted_partition.sort_unstable();
    let mut placed = mapping.as_slice().to_vec();
    placed.sort_unstable();
    if placed.len() != circuit.num_qubits || placed != sorted_partition {
        return Err(Error::InvalidCircuit(format!(
            "placement {:?} of `{}` does not cover its partition {partition:?}",
            mapping.as_slice(),
            circuit.id
        )));
    }
    if let Some(&q) = partition.iter().find(|&&q| q >= model.num_qubits()) {
        return Err(Error::QubitOutOfRange {
            index: q,
            num_qubits: model.num_qubits(),
        });
    }
    if !model.is_connected_subset(partition) {
        return Err(Error::DisconnectedSubgraph(sorted_partition));
    }
    Ok(())
}

/// Route every circuit inside its own partition at the same time, starting
/// from `initial` placements. Circuits are visited in the order given, which
/// callers keep at descending density.
pub fn mapping_transition(
    model: &HardwareModel,
    matrices: &DistanceMatrices,
    circuits: &[&QuantumCircuit],
    partitions: &[&[usize]],
    initial: &[Mapping],
    options: &RoutingOptions,
) -> Result<Schedule> {
    if circuits.len() != partitions.len() || circuits.len() != initial.len() {
        return Err(Error::InvalidCircuit(format!(
            "{} circuits, {} partitions and {} placements",
            circuits.len(),
            partitions.len(),
            initial.len()
        )));
    }
    for ((c, p), m) in circuits.iter().zip(partitions).zip(initial) {
        check_job(model, c, p, m)?;
    }
    let mut routers: Vec<Router> = circuits
        .iter()
        .zip(partitions)
        .zip(initial)
        .enumerate()
        .map(|(i, ((c, p), m))| Router::new(i, c, p, m.clone()))
        .collect();
    let total_gates: usize = circuits.iter().map(|c| c.len()).sum();
    let cap = 10 * total_gates.max(1);
    let mut out = Vec::new();
    let mut rounds = 0;
    loop {
        for r in &mut routers {
            if r.emit_ready(model, &mut out) > 0 {
                r.idle_rounds = 0;
            }
        }
        if routers.iter().all(Router::finished) {
            break;
        }
        rounds += 1;
        if rounds > cap {
            return Err(Error::RoutingStalled(rounds - 1));
        }
        for r in routers.iter_mut().filter(|r| !r.finished()) {
            if r.idle_rounds >= STALL_LIMIT {
                r.force(model, &mut out);
                r.idle_rounds = 0;
            } else if r.step(model, matrices, options, &mut out) {
                r.idle_rounds = 0;
            } else {
                r.idle_rounds += 1;
            }
        }
    }

    let mut routed = Vec::with_capacity(routers.len());
    let mut clbit_offset = 0;
    for (r, m) in routers.iter_mut().zip(initial) {
        r.measures.sort_unstable();
        for &node in &r.measures {
            let g = r.gate(node);
            out.push(ScheduledGate {
                circuit: r.index,
                gate: Gate::measure(
                    r.mapping.physical(g.qubits[0]),
                    clbit_offset + g.clbit.unwrap_or(0),
                ),
                origin: Origin::Source(node),
            });
        }
        routed.push(RoutedCircuit {
            id: r.circuit.id.clone(),
            partition: {
                let mut p = r.partition.to_vec();
                p.sort_unstable();
                p
            },
            initial_mapping: m.clone(),
            final_mapping: r.mapping.clone(),
            swaps: r.swaps,
            bridges: r.bridges,
            clbit_offset,
            num_clbits: r.circuit.num_clbits,
        });
        clbit_offset += r.circuit.num_clbits;
    }
    Ok(Schedule {
        num_qubits: model.num_qubits(),
        gates: out,
        circuits: routed,
    })
}
