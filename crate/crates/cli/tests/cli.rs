use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use entrobound::hamiltonians::{build_xxz, MatrixFree, TIChainTerm};
use entrobound::quantum::{lanczos_ground_state, pauli, LanczosConfig, LinearOperator};
use num_complex::Complex64;
use serde_json::Value;

fn entrobound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entrobound"))
        .args(args)
        .env_remove("ENTROBOUND_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json_result(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    assert_eq!(v["manifest"]["schema"], "entrobound-manifest-v1");
    v["result"].clone()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s:?}"))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ed_three_site_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "epr.json", r#"{"kind":"three_site_epr"}"#);
    let out = entrobound(&["ed", path(&inst)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_result(&out);
    assert!((r["lambda_min"].as_f64().unwrap() + 0.75).abs() < 1e-9);
    assert!((r["energy_density"].as_f64().unwrap() + 0.25).abs() < 1e-9);
}

#[test]
fn ed_ring_densities() {
    let dir = tempfile::tempdir().unwrap();
    let xy = write(dir.path(), "xy.json", r#"{"kind":"ti_chain","delta":0}"#);
    let r = json_result(&entrobound(&["ed", path(&xy), "--sites", "16"]));
    assert!((r["energy_density"].as_f64().unwrap() + 4.0 / std::f64::consts::PI).abs() < 2e-2);
    let heis = write(dir.path(), "heis.json", r#"{"kind":"ti_chain","delta":1}"#);
    let a = json_result(&entrobound(&["ed", path(&heis), "--sites", "12"]))["energy_density"]
        .as_f64()
        .unwrap();
    let b = json_result(&entrobound(&["ed", path(&heis), "--sites", "14"]))["energy_density"]
        .as_f64()
        .unwrap();
    assert!((a - b).abs() < 2e-2, "{a} vs {b}");
}

#[test]
fn solve_three_site_relaxations() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "epr.json", r#"{"kind":"three_site_epr"}"#);
    let wm = entrobound(&["solve", path(&inst), "--relaxation", "wm", "--level", "2"]);
    assert_eq!(wm.status.code(), Some(0));
    let b = json_result(&wm)["bound"].as_f64().unwrap();
    assert!((-0.8135..=-0.8085).contains(&b), "{b}");
    let loc = json_result(&entrobound(&[
        "solve",
        path(&inst),
        "--relaxation",
        "loc",
        "--level",
        "2",
    ]));
    assert!((loc["bound"].as_f64().unwrap() + 1.0).abs() < 1e-6);
    assert_eq!(loc["status"], "converged");
}

#[test]
fn solve_chain_relaxation() {
    let dir = tempfile::tempdir().unwrap();
    let xy = write(dir.path(), "xy.json", r#"{"kind":"ti_chain","delta":0.0}"#);
    let out = entrobound(&["solve", path(&xy), "--relaxation", "loc-ti", "--level", "3"]);
    let b = json_result(&out)["bound"].as_f64().unwrap();
    assert!(
        (b - (-4.0 / std::f64::consts::PI - 0.141016)).abs() < 5e-3,
        "{b}"
    );
}

#[test]
fn iteration_cap_exits_with_two_and_keeps_a_valid_bound() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "epr.json", r#"{"kind":"three_site_epr"}"#);
    let cfg = write(dir.path(), "cfg.json", r#"{"check_every": 2}"#);
    let out = entrobound(&[
        "solve",
        path(&inst),
        "--relaxation",
        "wm",
        "--level",
        "2",
        "--config",
        path(&cfg),
        "--max-iters",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let r = json_result(&out);
    assert_eq!(r["status"], "iteration_cap");
    assert!(r["bound"].as_f64().unwrap() <= -0.75);
}

#[test]
fn malformed_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kind":"moon"}"#);
    assert_eq!(entrobound(&["ed", path(&bad)]).status.code(), Some(1));
    let missing = dir.path().join("missing.json");
    assert_eq!(entrobound(&["ed", path(&missing)]).status.code(), Some(1));
    let epr = write(dir.path(), "epr.json", r#"{"kind":"three_site_epr"}"#);
    let wrong = entrobound(&[
        "solve",
        path(&epr),
        "--relaxation",
        "loc-ti",
        "--level",
        "3",
    ]);
    assert_eq!(wrong.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&wrong.stderr).contains("does not apply"));
    let cfg = write(dir.path(), "cfg.json", r#"{"max_iters": "many"}"#);
    let out = entrobound(&[
        "solve",
        path(&epr),
        "--relaxation",
        "loc",
        "--level",
        "2",
        "--config",
        path(&cfg),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn paircover_examples() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("0 1\n0 2\n0 3\n0 4\n", 2, -3.244),
        ("0 1\n", 0, -1.0),
        ("0 1\n1 2\n", 1, -1.622),
    ];
    for (i, (text, pairs, bound)) in cases.iter().enumerate() {
        let g = write(dir.path(), &format!("g{i}.txt"), text);
        let out = entrobound(&["paircover", path(&g)]);
        assert_eq!(out.status.code(), Some(0));
        let r = json_result(&out);
        assert_eq!(r["pairs"].as_array().unwrap().len(), *pairs);
        assert!(
            (r["bound"].as_f64().unwrap() - bound).abs() < 1e-9,
            "{text}: {}",
            r["bound"]
        );
    }
    let json_graph = write(
        dir.path(),
        "g.json",
        r#"{"kind":"graph","edges":[[0,1],[1,2],[2,3]]}"#,
    );
    let r = json_result(&entrobound(&["paircover", path(&json_graph)]));
    assert!(r["unmatched"].is_array());
    let disconnected = write(dir.path(), "d.txt", "0 1\n2 3\n");
    assert_eq!(
        entrobound(&["paircover", path(&disconnected)])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn out_writes_manifest_and_rerun_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "epr.json", r#"{"kind":"three_site_epr"}"#);
    let out = dir.path().join("wm.json");
    let run = entrobound(&[
        "solve",
        path(&inst),
        "--relaxation",
        "wm",
        "--level",
        "2",
        "--out",
        path(&out),
    ]);
    assert_eq!(run.status.code(), Some(0));
    assert!(run.stdout.is_empty());
    let result: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let manifest_path = dir.path().join("wm.json.manifest.json");
    let mut manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["summary"]["bound"], result["bound"]);
    assert_eq!(manifest["job"]["instance"]["kind"], "three_site_epr");

    // The manifest alone reproduces the run, from any working directory.
    std::fs::remove_file(&inst).unwrap();
    assert_eq!(
        entrobound(&["rerun", path(&manifest_path)]).status.code(),
        Some(0)
    );

    manifest["summary"]["bound"] = Value::from(result["bound"].as_f64().unwrap() + 1e-6);
    let tampered = write(dir.path(), "tampered.json", &manifest.to_string());
    let rerun = entrobound(&["rerun", path(&tampered)]);
    assert_eq!(rerun.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&rerun.stderr).contains("summary.bound"));
}

#[test]
fn sweep_schema_and_failed_levels() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "epr.json", r#"{"kind":"three_site_epr"}"#);
    let csv_path = dir.path().join("sweep.csv");
    let out = entrobound(&[
        "sweep",
        path(&inst),
        "--relaxation",
        "wm",
        "--levels",
        "1..3",
        "--out",
        path(&csv_path),
    ]);
    // Level 1 does not exist; the sweep records it and carries on.
    assert_eq!(out.status.code(), Some(2));
    let (header, rows) = csv_rows(&std::fs::read_to_string(&csv_path).unwrap());
    assert_eq!(
        header,
        [
            "level",
            "bound",
            "e0_ref",
            "gap",
            "wall_seconds",
            "status",
            "iters"
        ]
    );
    assert_eq!(rows.len(), 3);
    assert!(rows[0][5].starts_with("failed"));
    assert!(rows[0][1].is_empty());
    for (row, level) in rows[1..].iter().zip([2, 3]) {
        assert_eq!(num(&row[0]), level as f64);
        assert_eq!(row[5], "converged");
        assert!((num(&row[2]) + 0.75).abs() < 1e-9);
        assert!((num(&row[3]) - (num(&row[2]) - num(&row[1]))).abs() < 1e-9);
        assert!(num(&row[3]) >= -1e-6);
    }
    assert!(std::path::Path::new(&format!("{}.manifest.json", csv_path.display())).exists());
}

#[test]
fn sweep_chain_levels_are_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let xy = write(dir.path(), "xy.json", r#"{"kind":"ti_chain","delta":0}"#);
    let out = entrobound(&[
        "sweep",
        path(&xy),
        "--relaxation",
        "loc-ti",
        "--levels",
        "2..4",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (_, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let manifest: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(manifest["job"]["command"], "sweep");
    let gaps: Vec<f64> = rows.iter().map(|r| num(&r[3])).collect();
    assert_eq!(gaps.len(), 3);
    for w in gaps.windows(2) {
        assert!(w[1] <= w[0] + 1e-5, "{gaps:?}");
    }
    assert!((num(&rows[0][2]) + 4.0 / std::f64::consts::PI).abs() < 1e-4);
}

/// Translation-averaged `(x, z)` of a ring ground state: `x` from the energy,
/// `z` from `⟨Σ Z_i Z_{i+1}⟩ / m`.
fn ring_ground_point(m: usize) -> (f64, f64) {
    let h = build_xxz(0.0).ring(m).unwrap();
    let op = MatrixFree::new(&h).unwrap();
    let gs = lanczos_ground_state(&op, &LanczosConfig::default()).unwrap();
    let zz = TIChainTerm::new(pauli::z().kronecker(&pauli::z()))
        .unwrap()
        .ring(m)
        .unwrap();
    let zz = MatrixFree::new(&zz).unwrap();
    let mut w = vec![Complex64::new(0.0, 0.0); zz.dim()];
    zz.apply(&gs.vector, &mut w);
    let z: Complex64 = gs.vector.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
    (-gs.value / (2.0 * m as f64), z.re / m as f64)
}

fn slice(dir: &Path, relaxation: &str, level: &str, angles: &str) -> (Output, Vec<Vec<String>>) {
    let out_path = dir.join(format!("{relaxation}-{level}.csv"));
    let out = entrobound(&[
        "slice",
        "--delta",
        "0",
        "--relaxation",
        relaxation,
        "--level",
        level,
        "--angles",
        angles,
        "--out",
        path(&out_path),
    ]);
    let text = std::fs::read_to_string(&out_path).unwrap_or_default();
    let rows = if text.is_empty() {
        Vec::new()
    } else {
        csv_rows(&text).1
    };
    (out, rows)
}

#[test]
fn slice_boundaries_nest() {
    let dir = tempfile::tempdir().unwrap();
    let (bad, _) = slice(dir.path(), "loc-ti", "2", "3");
    assert_eq!(bad.status.code(), Some(1));

    let (out, loc2) = slice(dir.path(), "loc-ti", "2", "12");
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("loc-ti-2.csv")).unwrap();
    assert!(text.starts_with("theta,x,z,support,status\n"));
    let (_, loc3) = slice(dir.path(), "loc-ti", "3", "12");
    let (_, wm3) = slice(dir.path(), "wm-ti", "3", "12");
    let (x_ed, z_ed) = ring_ground_point(12);
    for ((a, b), c) in loc2.iter().zip(&loc3).zip(&wm3) {
        let theta = num(&a[0]);
        let (s2, s3, w3) = (num(&a[3]), num(&b[3]), num(&c[3]));
        assert!(
            s3 <= s2 + 1e-5,
            "theta {theta}: level 3 {s3} above level 2 {s2}"
        );
        assert!(w3 <= s3 + 1e-5, "theta {theta}: WM {w3} above Loc {s3}");
        let ed = theta.cos() * x_ed + theta.sin() * z_ed;
        assert!(
            ed <= w3 + 1e-5,
            "theta {theta}: ring state {ed} outside {w3}"
        );
        // The reported point attains the support value.
        let (x, z) = (num(&c[1]), num(&c[2]));
        assert!((theta.cos() * x + theta.sin() * z - w3).abs() < 1e-3);
    }
}

#[test]
fn thread_count_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "epr.json", r#"{"kind":"three_site_epr"}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_entrobound"))
        .args(["ed", path(&inst)])
        .env("ENTROBOUND_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_entrobound"))
        .args(["ed", path(&inst)])
        .env("ENTROBOUND_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let help = entrobound(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("sweep"));
}
