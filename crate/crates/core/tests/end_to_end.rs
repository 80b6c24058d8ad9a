mod common;

use std::collections::BTreeSet;

use qmpc::circuit::{load_qasm, parse_program, GateKind};
use qmpc::pipeline::{compile, RunConfig};
use qmpc::scheduler::Manifest;
use qmpc::verify::check_equivalence;
use qmpc::{CrosstalkTable, Edge, QuantumCircuit};

use common::{benchmark, benchmarks_dir, fixture, fixture_device};

fn all_benchmarks() -> Vec<QuantumCircuit> {
    let mut paths: Vec<_> = std::fs::read_dir(benchmarks_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "qasm"))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_qasm(p).unwrap()).collect()
}

#[test]
fn benchmarks_on_a_27_qubit_device() {
    let model = fixture_device("toronto");
    let circuits = all_benchmarks();
    let config = RunConfig {
        seed: 5,
        ..RunConfig::default()
    };
    let jobs = compile(&model, &circuits, &CrosstalkTable::new(), &config).unwrap();

    let mut seen = BTreeSet::new();
    for job in &jobs {
        assert_eq!(job.stats.trf, job.plan.selected.len());
        for id in &job.plan.selected {
            assert!(seen.insert(id.clone()), "{id} planned twice");
        }

        // What a user gets back from disk.
        let parsed = parse_program(&job.qasm).unwrap();
        assert_eq!(parsed.circuit.num_qubits, model.num_qubits());
        let measuring = job
            .schedule
            .circuits
            .iter()
            .filter(|c| c.num_clbits > 0)
            .count();
        assert_eq!(parsed.cregs.len(), measuring);
        let manifest = Manifest::from_json(&job.manifest.to_json()).unwrap();

        let sources: Vec<&QuantumCircuit> = circuits
            .iter()
            .filter(|c| job.plan.selected.contains(&c.id))
            .collect();
        let report = check_equivalence(&sources, &parsed.circuit, &manifest).unwrap();
        assert!(report.passed, "{report}");

        // Two-qubit gates sit on couplers and inside one partition.
        for g in parsed
            .circuit
            .gates()
            .iter()
            .filter(|g| g.kind == GateKind::Cx)
        {
            let (a, b) = (g.qubits[0], g.qubits[1]);
            assert!(model.is_edge(a, b));
            assert!(manifest
                .circuits
                .values()
                .any(|e| e.partition.contains(&a) && e.partition.contains(&b)));
        }
        for (id, c) in &job.stats.circuits {
            assert_eq!(c.additional_cnots, 3 * (c.swaps + c.bridges), "{id}");
            let source = circuits.iter().find(|s| &s.id == id).unwrap();
            let routed = job
                .schedule
                .circuits
                .iter()
                .position(|r| &r.id == id)
                .unwrap();
            let emitted_cx = job.schedule.gates_of(routed).filter(|g| g.is_cx()).count();
            assert_eq!(emitted_cx, source.cnot_count() + c.additional_cnots, "{id}");
        }
    }
    assert_eq!(seen.len(), circuits.len());
}

#[test]
fn success_estimate_accounts_for_crosstalk() {
    let model = fixture_device("line5");
    let table = CrosstalkTable::load(fixture("line5_crosstalk.json")).unwrap();
    let circuits = vec![
        load_qasm(benchmark("bell")).unwrap(),
        load_qasm(benchmark("grover2")).unwrap(),
    ];
    let config = RunConfig {
        seed: 1,
        delta: f64::INFINITY,
        ..RunConfig::default()
    };
    let quiet = compile(&model, &circuits, &CrosstalkTable::new(), &config).unwrap();
    let noisy = compile(&model, &circuits, &table, &config).unwrap();
    assert_eq!(noisy.len(), 1);
    let job = &noisy[0];
    // The denser circuit takes the best coupler; the other is left with the
    // coupler that suffers from it.
    assert_eq!(job.plan.selected, ["grover2", "bell"]);
    assert_eq!(job.stats.circuits["grover2"].partition, [2, 3]);
    assert_eq!(job.stats.circuits["bell"].partition, [0, 1]);

    let degraded = table.get(Edge::new(0, 1), Edge::new(2, 3)).unwrap();
    let bell = &job.stats.circuits["bell"];
    // H, one CX and two measurements, already adjacent.
    assert!(bell.additional_cnots == 0 && bell.gates == 4);
    let expected =
        (1.0 - degraded) * (1.0 - model.readout_error(0)) * (1.0 - model.readout_error(1));
    assert!(
        (bell.esp - expected).abs() < 1e-12,
        "{} vs {expected}",
        bell.esp
    );
    assert!(bell.esp < quiet[0].stats.circuits["bell"].esp);
    assert_eq!(
        job.stats.circuits["grover2"].esp,
        quiet[0].stats.circuits["grover2"].esp
    );
}
