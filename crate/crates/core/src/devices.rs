//! Built-in coupling graphs and synthetic calibrations for tests, examples
//! and benchmarks.

use std::ops::Range;

use rand::Rng;

use crate::hardware::HardwareModel;

const DEFAULT_CNOT_ERROR: f64 = 0.01;
const DEFAULT_READOUT_ERROR: f64 = 0.02;

pub fn line_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

pub fn ring_edges(n: usize) -> Vec<(usize, usize)> {
    let mut e = line_edges(n);
    if n > 2 {
        e.push((n - 1, 0));
    }
    e
}

pub fn grid_edges(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let q = r * cols + c;
            if c + 1 < cols {
                e.push((q, q + 1));
            }
            if r + 1 < rows {
                e.push((q, q + cols));
            }
        }
    }
    e
}

pub fn star_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (0, i)).collect()
}

/// 5-qubit T shape: 0 - 1 - 2 with 1 - 3 - 4.
pub const VALENCIA_EDGES: [(usize, usize); 4] = [(0, 1), (1, 2), (1, 3), (3, 4)];

/// 7-qubit H shape.
pub const H7_EDGES: [(usize, usize); 6] = [(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)];

/// 16-qubit heavy-hex fragment.
pub const HEAVY_HEX16_EDGES: [(usize, usize); 16] = [
    (0, 1),
    (1, 2),
    (1, 4),
    (2, 3),
    (3, 5),
    (4, 7),
    (5, 8),
    (6, 7),
    (7, 10),
    (8, 9),
    (8, 11),
    (10, 12),
    (11, 14),
    (12, 13),
    (12, 15),
    (13, 14),
];

/// 27-qubit heavy-hex layout of IBM Q 27 Toronto.
pub const TORONTO_EDGES: [(usize, usize); 28] = [
    (0, 1),
    (1, 2),
    (1, 4),
    (2, 3),
    (3, 5),
    (4, 7),
    (5, 8),
    (6, 7),
    (7, 10),
    (8, 9),
    (8, 11),
    (10, 12),
    (11, 14),
    (12, 13),
    (12, 15),
    (13, 14),
    (14, 16),
    (15, 18),
    (16, 19),
    (17, 18),
    (18, 21),
    (19, 20),
    (19, 22),
    (21, 23),
    (22, 25),
    (23, 24),
    (24, 25),
    (25, 26),
];

/// 65-qubit heavy-hex layout of IBM Q 65 Manhattan: five rows joined by
/// three bridge qubits between each pair of rows.
pub fn manhattan_edges() -> Vec<(usize, usize)> {
    let rows: [Range<usize>; 5] = [0..10, 13..24, 27..38, 41..52, 55..65];
    let bridges: [[(usize, usize, usize); 3]; 4] = [
        [(0, 10, 13), (4, 11, 17), (8, 12, 21)],
        [(15, 24, 29), (19, 25, 33), (23, 26, 37)],
        [(27, 38, 41), (31, 39, 45), (35, 40, 49)],
        [(43, 52, 56), (47, 53, 60), (51, 54, 64)],
    ];
    let mut e = Vec::new();
    for row in rows {
        e.extend((row.start + 1..row.end).map(|q| (q - 1, q)));
    }
    for (above, bridge, below) in bridges.into_iter().flatten() {
        e.push((above, bridge));
        e.push((bridge, below));
    }
    e
}

fn uniform(n: usize, edges: &[(usize, usize)]) -> HardwareModel {
    HardwareModel::uniform(n, edges, DEFAULT_CNOT_ERROR, DEFAULT_READOUT_ERROR)
        .expect("built-in topology is valid")
}

pub fn line(n: usize) -> HardwareModel {
    uniform(n, &line_edges(n))
}

pub fn ring(n: usize) -> HardwareModel {
    uniform(n, &ring_edges(n))
}

pub fn grid(rows: usize, cols: usize) -> HardwareModel {
    uniform(rows * cols, &grid_edges(rows, cols))
}

pub fn star(n: usize) -> HardwareModel {
    uniform(n, &star_edges(n))
}

pub fn h7() -> HardwareModel {
    uniform(7, &H7_EDGES)
}

pub fn heavy_hex16() -> HardwareModel {
    uniform(16, &HEAVY_HEX16_EDGES)
}

pub fn toronto() -> HardwareModel {
    uniform(27, &TORONTO_EDGES)
}

pub fn manhattan() -> HardwareModel {
    uniform(65, &manhattan_edges())
}

/// Valencia layout with a calibration whose fidelity degrees (at lambda = 2)
/// rank Q1 > Q3 > Q0 > Q4 > Q2.
pub fn valencia() -> HardwareModel {
    HardwareModel::new(
        5,
        &VALENCIA_EDGES,
        &[(0, 1, 0.008), (1, 2, 0.012), (1, 3, 0.009), (3, 4, 0.011)],
        vec![0.020, 0.030, 0.040, 0.025, 0.035],
        vec![0.0004, 0.0005, 0.0006, 0.0004, 0.0005],
    )
    .expect("valid calibration")
}

/// Same coupling graph as `model`, with CNOT and readout errors drawn
/// uniformly from the given ranges.
pub fn random_calibration(
    model: &HardwareModel,
    rng: &mut impl Rng,
    cnot: Range<f64>,
    readout: Range<f64>,
) -> HardwareModel {
    let edges: Vec<(usize, usize)> = model.edges().iter().map(|e| (e.lo(), e.hi())).collect();
    let errors: Vec<(usize, usize, f64)> = edges
        .iter()
        .map(|&(a, b)| (a, b, rng.gen_range(cnot.clone())))
        .collect();
    let readouts = (0..model.num_qubits())
        .map(|_| rng.gen_range(readout.clone()))
        .collect();
    HardwareModel::new(model.num_qubits(), &edges, &errors, readouts, Vec::new())
        .expect("rates drawn inside [0, 1)")
}
