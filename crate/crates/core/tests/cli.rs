mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{benchmark, fixture};
use serde_json::Value;

fn qmpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmpc"))
        .args(args)
        .env_remove("QMPC_SEED")
        .env_remove("CI")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn device_args(name: &str) -> Vec<String> {
    vec![
        "--topology".into(),
        fixture(&format!("{name}_topology.json"))
            .display()
            .to_string(),
        "--calibration".into(),
        fixture(&format!("{name}_calibration.json"))
            .display()
            .to_string(),
    ]
}

fn compile(device: &str, circuits: &[&Path], extra: &[&str], out: &Path) -> Output {
    let mut args: Vec<String> = vec!["compile".into()];
    args.extend(device_args(device));
    args.extend(["--out-dir".into(), p(out).into()]);
    args.extend(extra.iter().map(|s| s.to_string()));
    args.extend(circuits.iter().map(|c| p(c).to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    qmpc(&refs)
}

fn write_qasm(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(format!("{name}.qasm"));
    fs::write(
        &path,
        format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n{body}"),
    )
    .unwrap();
    path
}

#[test]
fn compile_two_toy_circuits() {
    let out = tempfile::tempdir().unwrap();
    let o = compile(
        "line5",
        &[&benchmark("bell"), &benchmark("grover2")],
        &["--seed", "1"],
        out.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let stats: Value =
        serde_json::from_str(&fs::read_to_string(out.path().join("stats_0.json")).unwrap())
            .unwrap();
    assert!(stats["circuits"]["bell"]["additional_cnots"].is_u64());
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(out.path().join("manifest_0.json")).unwrap())
            .unwrap();
    assert!(manifest["bell"]["logical_to_physical"].is_object());
    assert!(manifest["bell"]["clbits"].is_array());
    let plans: Value =
        serde_json::from_str(&fs::read_to_string(out.path().join("plans.json")).unwrap()).unwrap();
    assert!(plans.as_array().is_some_and(|a| !a.is_empty()));
    assert!(fs::read_to_string(out.path().join("merged_0.qasm"))
        .unwrap()
        .starts_with("OPENQASM 2.0;"));
    assert!(stdout(&o).contains("seed 1"));
}

#[test]
fn circuit_larger_than_device() {
    let out = tempfile::tempdir().unwrap();
    let o = compile(
        "line5",
        &[&benchmark("bv5"), &benchmark("bell")],
        &["--seed", "1"],
        out.path(),
    );
    assert!(o.status.success(), "five qubits fit: {}", stderr(&o));
    let dir = tempfile::tempdir().unwrap();
    let wide = write_qasm(dir.path(), "wide", "qreg q[6];\nh q[5];\n");
    let o = compile("line5", &[&wide], &["--seed", "1"], out.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("`wide` needs 6 qubits"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn exhaustive_method_is_capped() {
    let dir = tempfile::tempdir().unwrap();
    let body: String = (1..9).map(|q| format!("cx q[0],q[{q}];\n")).collect();
    let nine = write_qasm(dir.path(), "nine", &format!("qreg q[9];\n{body}"));
    let o = compile(
        "heavy_hex16",
        &[&nine],
        &["--seed", "1", "--method", "gsp"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("use --method qhsp"), "{}", stderr(&o));
}

#[test]
fn crosstalk_filter_keeps_the_strong_pair() {
    let o = qmpc(&[
        "xtalk-filter",
        "--crosstalk",
        p(&fixture("line5_crosstalk.json")),
        "--calibration",
        p(&fixture("line5_calibration.json")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let pairs = v["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 1);
    assert_eq!(pairs[0]["gate"], serde_json::json!([0, 1]));
    assert_eq!(pairs[0]["conditioned_on"], serde_json::json!([2, 3]));

    // Same answer with an explicit topology.
    let table = fixture("line5_crosstalk.json");
    let mut args = vec!["xtalk-filter", "--crosstalk", p(&table)];
    let dev = device_args("line5");
    args.extend(dev.iter().map(String::as_str));
    let o2 = qmpc(&args);
    assert_eq!(stdout(&o), stdout(&o2));
}

#[test]
fn verify_identity_compilation() {
    let out = tempfile::tempdir().unwrap();
    let bell = benchmark("bell");
    let o = compile("line5", &[&bell], &["--seed", "3"], out.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let verify = |manifest: &Path| {
        qmpc(&[
            "verify",
            "--merged",
            p(&out.path().join("merged_0.qasm")),
            "--manifest",
            p(manifest),
            p(&bell),
        ])
    };
    let o = verify(&out.path().join("manifest_0.json"));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("PASS, TV=0\n"), "{}", stdout(&o));

    // Swapping the result bits breaks a circuit whose outcomes are not symmetric.
    let bv = benchmark("bv5");
    let o = compile("line5", &[&bv], &["--seed", "3"], out.path());
    assert!(o.status.success());
    let path = out.path().join("manifest_0.json");
    let mut manifest: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let bits = manifest["bv5"]["clbits"].as_array_mut().unwrap();
    bits.reverse();
    let corrupted = out.path().join("corrupted.json");
    fs::write(&corrupted, manifest.to_string()).unwrap();
    let o = qmpc(&[
        "verify",
        "--merged",
        p(&out.path().join("merged_0.qasm")),
        "--manifest",
        p(&corrupted),
        p(&bv),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL"), "{}", stdout(&o));
}

#[test]
fn partition_methods_agree_on_the_five_qubit_device() {
    let dir = tempfile::tempdir().unwrap();
    let four = write_qasm(
        dir.path(),
        "four",
        "qreg q[4];\ncx q[0],q[1];\ncx q[0],q[2];\ncx q[0],q[3];\ncx q[1],q[2];\n",
    );
    let run = |method: &str| -> Value {
        let mut args = vec!["partition".to_string(), "--method".into(), method.into()];
        args.extend(device_args("valencia"));
        args.push(p(&four).into());
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = qmpc(&refs);
        assert!(o.status.success(), "{}", stderr(&o));
        serde_json::from_str(&stdout(&o)).unwrap()
    };
    let (gsp, qhsp) = (run("gsp"), run("qhsp"));
    assert_eq!(gsp[0]["qubits"], qhsp[0]["qubits"]);
    assert_eq!(gsp[0]["method"], "GSP");
    assert_eq!(qhsp[0]["method"], "QHSP");
    assert_eq!(qhsp[0]["circuit_id"], "four");
}

#[test]
fn seed_from_the_environment_wins() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let run = |seed: &str, out: &Path| {
        let mut args = vec!["compile".to_string()];
        args.extend(device_args("h7"));
        args.extend([
            "--seed".into(),
            seed.into(),
            "--out-dir".into(),
            p(out).into(),
        ]);
        args.push(p(&benchmark("qft4")).into());
        let o = Command::new(env!("CARGO_BIN_EXE_qmpc"))
            .args(&args)
            .env("QMPC_SEED", "42")
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("seed 42"));
        fs::read(out.join("merged_0.qasm")).unwrap()
    };
    assert_eq!(run("1", a.path()), run("2", b.path()));
}

#[test]
fn ci_requires_a_seed() {
    let out = tempfile::tempdir().unwrap();
    let mut args = vec!["compile".to_string()];
    args.extend(device_args("line5"));
    args.extend([
        "--out-dir".into(),
        p(out.path()).into(),
        p(&benchmark("bell")).into(),
    ]);
    let o = Command::new(env!("CARGO_BIN_EXE_qmpc"))
        .args(&args)
        .env_remove("QMPC_SEED")
        .env("CI", "true")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("seed is required"), "{}", stderr(&o));
}

#[test]
fn pst_from_counts() {
    let counts = fixture("bell_counts.json");
    let o = qmpc(&["pst", "--counts", p(&counts), "--expected", "00", "11"]);
    assert!(o.status.success(), "{}", stderr(&o));
    // (3795 + 3998) / 8192
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), 7793.0 / 8192.0);
    let o = qmpc(&[
        "pst",
        "--counts",
        p(&counts),
        "--circuit",
        p(&benchmark("bell")),
    ]);
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), 7793.0 / 8192.0);
}

#[test]
fn bad_input_files() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write_qasm(dir.path(), "broken", "qreg q[2];\ncx q[0] q[1];\n");
    let o = compile("line5", &[&broken], &["--seed", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("broken.qasm"), "{}", stderr(&o));

    let mut args = vec![
        "compile".to_string(),
        "--topology".into(),
        "/nonexistent.json".into(),
    ];
    args.extend([
        "--calibration".into(),
        "/nonexistent.json".into(),
        p(&benchmark("bell")).into(),
    ]);
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    assert_eq!(qmpc(&refs).status.code(), Some(1));
    assert_eq!(qmpc(&["compile"]).status.code(), Some(1));
}
