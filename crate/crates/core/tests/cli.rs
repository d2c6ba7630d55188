use std::path::Path;
use std::process::Command;

use dicke::io;

fn dicke() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dicke"))
}

fn data_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

#[test]
fn run_writes_initial_values_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = |d: &str| dir.path().join(d);
    for d in ["a", "b"] {
        let st = dicke()
            .args(["run", "--n-qubits", "4", "--fock-cut", "20", "--gamma", "-6", "--out"])
            .arg(out(d))
            .status()
            .unwrap();
        assert!(st.success());
    }
    let (meta, recs) = io::read_records(&out("a").join("record.csv")).unwrap();
    assert!(meta.iter().any(|(k, _)| k == "config"));
    let first = &recs[0];
    assert_eq!((first.t, first.schmidt_gap, first.xi_b2, first.c_w), (0.0, 1.0, 1.0, 0.0));

    let v = 2f64.powi(-6);
    let tau = 1.0 / v;
    let spacing = recs[1].t - recs[0].t;
    let near = recs
        .iter()
        .min_by(|a, b| (a.t - tau / 2.0).abs().total_cmp(&(b.t - tau / 2.0).abs()))
        .unwrap();
    assert!((near.lambda - 0.5).abs() <= spacing * v);

    assert_eq!(data_rows(&out("a").join("record.csv")), data_rows(&out("b").join("record.csv")));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "schema_version = 1\nramp = { gamma = -3 }\n[model]\nn_qubits = 2\nfock_cut = 8\n[integrator]\nsample_count = 21\n",
    )
    .unwrap();
    let st = dicke()
        .args(["run", "--gamma", "-1", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let (_, recs) = io::read_records(&dir.path().join("record.csv")).unwrap();
    assert_eq!(recs.len(), 21);
    assert!(recs.iter().all(|r| r.gamma == -1.0));
    assert_eq!(recs[0].jz, -1.0);
}

#[test]
fn sweep_writes_one_file_per_row_and_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(
        &cfg,
        r#"schema_version = 1
[model]
n_qubits = 2
fock_cut = 8
[integrator]
sample_count = 21
[sweep]
gamma_min = -8
gamma_max = -1
gamma_step = 1
[outputs]
heatmap_svg = "heat.svg"
"#,
    )
    .unwrap();
    let st = dicke()
        .args(["sweep", "--threads", "2", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    let records = names
        .iter()
        .filter(|n| n.starts_with("record_g") && !n.contains("_pop"))
        .count();
    assert_eq!(records, 8);
    for col in ["schmidt_gap", "one_minus_xi_b2", "concurrence_scaled"] {
        assert_eq!(names.iter().filter(|n| **n == format!("matrix_{col}.csv")).count(), 1);
        assert!(names.contains(&format!("heat_{col}.svg")));
    }

    let st = dicke()
        .args(["scan", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let scan = data_rows(&dir.path().join("scan.csv"));
    assert_eq!(scan.len(), 9);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let st = dicke().args(["run", "--n-qubits", "0", "--out"]).arg(dir.path()).status().unwrap();
    assert_eq!(st.code(), Some(1));
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "schema_version = 7\n").unwrap();
    let st = dicke().args(["run", "--config"]).arg(&bad).status().unwrap();
    assert_eq!(st.code(), Some(1));

    // a step far beyond the stability limit of RK4 trips the norm guard
    let unstable = dir.path().join("u.toml");
    std::fs::write(
        &unstable,
        "schema_version = 1\n[model]\nn_qubits = 4\nfock_cut = 20\n[integrator]\nstep = 0.5\nenergy_reference = false\nsample_count = 11\n",
    )
    .unwrap();
    let out = dicke()
        .args(["run", "--gamma", "-8", "--config"])
        .arg(&unstable)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step size"));

    let partial = dir.path().join("p.toml");
    std::fs::write(
        &partial,
        "schema_version = 1\n[model]\nn_qubits = 4\nfock_cut = 20\n[integrator]\nstep = 0.5\nenergy_reference = false\nsample_count = 11\n[sweep]\ngamma_min = -8\ngamma_max = 2\ngamma_step = 10\n",
    )
    .unwrap();
    let st = dicke()
        .args(["sweep", "--config"])
        .arg(&partial)
        .arg("--out")
        .arg(dir.path().join("p"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(3));
    let failures = data_rows(&dir.path().join("p").join("failures.csv"));
    assert_eq!(failures.len(), 2);
    assert!(failures[1].starts_with("-8,"));
}

#[test]
fn lzs_and_converge_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dicke().args(["lzs", "--out"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("peak velocity 0.566"));
    assert_eq!(data_rows(&dir.path().join("lzs.csv")).len(), 14);

    let out = dicke()
        .args(["converge", "--n-qubits", "2", "--fock-cut", "10", "--gamma", "0", "--fock-cuts", "10,20", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("chi 10 -> 20"));
    assert!(dir.path().join("convergence.csv").exists());
}
