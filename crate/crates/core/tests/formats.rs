use dicke::basis::ModelParams;
use dicke::config::{RunConfig, SweepGrid};
use dicke::exec::Execution;
use dicke::integrator::IntegratorSettings;
use dicke::io;
use dicke::pipeline;
use dicke::ramp::RampProtocol;

fn small_config(dir: &std::path::Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.model = ModelParams::resonant(3, 10);
    cfg.integrator = IntegratorSettings {
        sample_count: 31,
        ..IntegratorSettings::default()
    };
    cfg.outputs.dir = dir.to_path_buf();
    cfg.outputs.populations = true;
    cfg.outputs.schmidt_full = true;
    cfg
}

#[test]
fn record_file_round_trips_with_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.ramp = dicke::config::RampSpec::Gamma(-1.0);
    let (traj, files) = pipeline::run_single(&cfg).unwrap();
    assert_eq!(files.len(), 4);
    let (meta, back) = io::read_records(&files[0]).unwrap();
    assert_eq!(back, traj.records);
    let stored = &meta.iter().find(|(k, _)| k == "config").unwrap().1;
    assert_eq!(RunConfig::from_toml(stored).unwrap(), cfg);
    assert!(meta.iter().any(|(k, _)| k == "wall_time_s"));
    assert!(meta.iter().any(|(k, v)| k == "dicke" && v == env!("CARGO_PKG_VERSION")));

    let pops = std::fs::read_to_string(&files[1]).unwrap();
    let header = pops.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "t,lambda,k0,k1,k2,k3");
    let schmidt = std::fs::read_to_string(&files[3]).unwrap();
    assert_eq!(schmidt.lines().filter(|l| !l.starts_with('#')).count(), 32);
}

#[test]
fn sweep_matrices_reshape_the_records() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.sweep = Some(SweepGrid {
        gamma_min: -3.0,
        gamma_max: 0.0,
        gamma_step: 1.0,
    });
    let (out, _) = pipeline::run_sweep(&cfg, Execution::Parallel).unwrap();
    for col in pipeline::MATRIX_COLUMNS {
        let m = io::read_matrix(&dir.path().join(format!("matrix_{col}.csv"))).unwrap();
        assert_eq!(m.gammas, vec![-3.0, -2.0, -1.0, 0.0]);
        for (row, g) in m.values.iter().zip(&m.gammas) {
            let tag = format!("{g:+.3}").replace('.', "p");
            let (_, recs) = io::read_records(&dir.path().join(format!("record_g{tag}.csv"))).unwrap();
            let col_vals: Vec<f64> = recs.iter().map(|r| r.column(col).unwrap()).collect();
            assert_eq!(row, &col_vals);
            assert_eq!(m.lambdas, recs.iter().map(|r| r.lambda).collect::<Vec<_>>());
        }
    }
    let long = std::fs::read_to_string(dir.path().join("populations_qubit.csv")).unwrap();
    let rows = long.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 4 * 31 * 4);
    assert_eq!(out.failures().len(), 0);
    let scan = std::fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert!(scan.lines().any(|l| l.starts_with("gamma,lambda_close")));
}

#[test]
fn convergence_report_on_a_short_pulse() {
    let p = RampProtocol::from_gamma(0.0).unwrap();
    let s = IntegratorSettings {
        sample_count: 41,
        ..IntegratorSettings::default()
    };
    let rep = pipeline::convergence_check(&ModelParams::resonant(4, 12), &p, &s, &[12, 20, 28], 1e-4, Execution::Sequential).unwrap();
    assert_eq!(rep.fock_cuts, vec![12, 20, 28]);
    assert!(rep.steps[1].max_change() <= rep.steps[0].max_change());
    assert!(rep.boundary_peaks[2] <= rep.boundary_peaks[0]);
}
