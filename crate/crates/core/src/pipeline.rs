//! End-to-end runs: single trajectories, velocity sweeps, gap-closure scans
//! and Fock-cut convergence checks.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crate::basis::{Basis, ModelParams};
use crate::config::RunConfig;
use crate::error::{DickeError, Result};
use crate::exec::{self, Execution};
use crate::hamiltonian::DickeHamiltonian;
use crate::integrator::{self, IntegratorSettings, TrajectorySummary};
use crate::io::{self, SweepMatrix};
use crate::observables::{self, observe};
use crate::oracle;
use crate::ramp::RampProtocol;
use crate::record::{check_invariants, InvariantTolerances, Record};
use crate::state::StateVector;
use crate::svg;

/// What to keep besides the records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capture {
    pub populations: bool,
    pub spectra: bool,
    /// `None` skips the per-sample invariant checks.
    pub invariants: Option<InvariantTolerances>,
}

impl Default for Capture {
    fn default() -> Self {
        Self {
            populations: true,
            spectra: false,
            invariants: Some(InvariantTolerances::default()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub model: ModelParams,
    pub protocol: RampProtocol,
    pub records: Vec<Record>,
    /// Per sample, indexed by `m_z + J`. Empty unless captured.
    pub qubit_populations: Vec<Vec<f64>>,
    /// Per sample, indexed by `n`. Empty unless captured.
    pub boson_populations: Vec<Vec<f64>>,
    /// Squared Schmidt coefficients per sample. Empty unless captured.
    pub spectra: Vec<Vec<f64>>,
    pub summary: TrajectorySummary,
    /// Samples where `(N−1) c_w` exceeded 1.
    pub monogamy_flags: usize,
    pub wall_time: f64,
}

impl Trajectory {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        if !Record::COLUMNS.contains(&name) {
            return None;
        }
        Some(self.records.iter().map(|r| r.column(name).unwrap()).collect())
    }

    /// Index of the turning point: the first sample with maximal λ.
    pub fn turning_index(&self) -> usize {
        turning_index(&self.records)
    }
}

pub fn simulate(
    model: &ModelParams,
    protocol: &RampProtocol,
    settings: &IntegratorSettings,
    capture: &Capture,
) -> Result<Trajectory> {
    let start = Instant::now();
    let basis = Arc::new(Basis::build(model.clone())?);
    let ham = DickeHamiltonian::new(basis.clone());
    let psi0 = StateVector::initial(basis.clone());
    let gamma = protocol.gamma().unwrap_or(f64::NAN);
    let n = model.n_qubits;

    let mut records = Vec::with_capacity(settings.sample_count);
    let mut qubit_populations = Vec::new();
    let mut boson_populations = Vec::new();
    let mut spectra = Vec::new();
    let mut monogamy_flags = 0;
    let summary = integrator::evolve(&ham, psi0.amps(), protocol, settings, |s| {
        let obs = observe(&basis, s.amps).map_err(|e| match e {
            DickeError::NotPositive { min_eigenvalue } => DickeError::Invariant {
                t: s.t,
                what: format!("two-qubit density matrix eigenvalue {min_eigenvalue:.3e}"),
            },
            other => other,
        })?;
        if let Some(tol) = &capture.invariants {
            check_invariants(s.t, n, &obs, tol)?;
        }
        if let Some(c) = obs.concurrence {
            if observables::monogamy_violation(c, n) {
                monogamy_flags += 1;
            }
        }
        records.push(Record::new(s.t, s.lambda, gamma, n, &obs));
        if capture.populations {
            qubit_populations.push(obs.populations.qubit.clone());
            boson_populations.push(obs.populations.boson.clone());
        }
        if capture.spectra {
            spectra.push(obs.spectrum.squares().to_vec());
        }
        Ok(())
    })?;
    if monogamy_flags > 0 {
        log::warn!("(N-1) c_w exceeded 1 at {monogamy_flags} samples (gamma {gamma})");
    }
    Ok(Trajectory {
        model: model.clone(),
        protocol: *protocol,
        records,
        qubit_populations,
        boson_populations,
        spectra,
        summary,
        monogamy_flags,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

fn capture_for(cfg: &RunConfig) -> Capture {
    Capture {
        populations: cfg.outputs.populations,
        spectra: cfg.outputs.schmidt_full,
        invariants: Some(InvariantTolerances::default()),
    }
}

fn stem_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("record");
    path.with_file_name(format!("{stem}_{suffix}.csv"))
}

/// Record file plus the optional population and Schmidt sidecars.
pub fn write_trajectory(
    traj: &Trajectory,
    meta: &[(String, String)],
    path: &Path,
) -> Result<Vec<PathBuf>> {
    let mut meta = meta.to_vec();
    meta.push(("steps".into(), traj.summary.steps.to_string()));
    meta.push(("step_size".into(), traj.summary.step_size.to_string()));
    meta.push(("max_norm_drift".into(), format!("{:e}", traj.summary.max_norm_drift)));
    meta.push(("monogamy_flags".into(), traj.monogamy_flags.to_string()));
    meta.push(("wall_time_s".into(), format!("{:.3}", traj.wall_time)));
    io::write_records(path, &meta, &traj.records)?;
    let mut written = vec![path.to_path_buf()];
    let tl = |i: usize| (traj.records[i].t, traj.records[i].lambda);
    let sidecars = [
        ("qubit_pop", "k", &traj.qubit_populations),
        ("boson_pop", "n", &traj.boson_populations),
        ("schmidt", "s2_", &traj.spectra),
    ];
    for (suffix, prefix, data) in sidecars {
        if data.is_empty() {
            continue;
        }
        let rows: Vec<_> = data
            .iter()
            .enumerate()
            .map(|(i, v)| (tl(i).0, tl(i).1, v.as_slice()))
            .collect();
        let p = stem_path(path, suffix);
        io::write_vectors(&p, &meta, prefix, &rows)?;
        written.push(p);
    }
    Ok(written)
}

/// One trajectory from a configuration, written to `outputs.record_csv`.
pub fn run_single(cfg: &RunConfig) -> Result<(Trajectory, Vec<PathBuf>)> {
    cfg.validate()?;
    let protocol = cfg.ramp.protocol()?;
    let traj = simulate(&cfg.model, &protocol, &cfg.integrator, &capture_for(cfg))?;
    let path = cfg.outputs.resolve(&cfg.outputs.record_csv);
    let files = write_trajectory(&traj, &cfg.metadata(), &path)?;
    Ok((traj, files))
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub gamma: f64,
    pub outcome: std::result::Result<Trajectory, String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
}

/// Observables assembled into Γ × sample matrices.
pub const MATRIX_COLUMNS: [&str; 3] = ["schmidt_gap", "one_minus_xi_b2", "concurrence_scaled"];

impl SweepOutput {
    pub fn failures(&self) -> Vec<(f64, &str)> {
        self.rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().err().map(|e| (r.gamma, e.as_str())))
            .collect()
    }

    pub fn succeeded(&self) -> impl Iterator<Item = (f64, &Trajectory)> {
        self.rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().map(|t| (r.gamma, t)))
    }

    fn lambdas(&self) -> Vec<f64> {
        self.succeeded()
            .next()
            .map(|(_, t)| t.records.iter().map(|r| r.lambda).collect())
            .unwrap_or_default()
    }

    /// Rows of failed trajectories hold NaN.
    pub fn matrix(&self, column: &str) -> SweepMatrix {
        let lambdas = self.lambdas();
        let width = lambdas.len();
        let values = self
            .rows
            .iter()
            .map(|r| match &r.outcome {
                Ok(t) => t.column(column).unwrap_or_else(|| vec![f64::NAN; width]),
                Err(_) => vec![f64::NAN; width],
            })
            .collect();
        SweepMatrix {
            column: column.to_string(),
            lambdas,
            gammas: self.rows.iter().map(|r| r.gamma).collect(),
            values,
        }
    }

    pub fn scan(&self, threshold: f64) -> Vec<ScanRow> {
        self.succeeded()
            .map(|(g, t)| scan_row(g, &t.records, threshold))
            .collect()
    }
}

/// Runs every Γ of `gammas` independently. A failing row is kept with its
/// error message and does not stop the others.
pub fn sweep_gammas(
    model: &ModelParams,
    gammas: &[f64],
    settings: &IntegratorSettings,
    capture: &Capture,
    execution: Execution,
) -> SweepOutput {
    let rows = exec::map(gammas, execution, |&gamma| {
        let outcome = RampProtocol::from_gamma(gamma)
            .and_then(|p| simulate(model, &p, settings, capture))
            .map_err(|e| e.to_string());
        if let Err(e) = &outcome {
            log::error!("gamma {gamma}: {e}");
        }
        SweepRow { gamma, outcome }
    });
    SweepOutput { rows }
}

fn gamma_tag(g: f64) -> String {
    format!("{g:+.3}").replace('.', "p")
}

pub fn run_sweep(cfg: &RunConfig, execution: Execution) -> Result<(SweepOutput, Vec<PathBuf>)> {
    cfg.validate()?;
    let grid = cfg
        .sweep
        .ok_or_else(|| DickeError::Config("sweep grid missing".into()))?;
    let gammas = grid.gammas()?;
    let mut capture = capture_for(cfg);
    capture.populations = true;
    let out = sweep_gammas(&cfg.model, &gammas, &cfg.integrator, &capture, execution);
    let files = write_sweep(&out, cfg)?;
    Ok((out, files))
}

pub fn write_sweep(out: &SweepOutput, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = &cfg.outputs.dir;
    let meta = cfg.metadata();
    let mut files = Vec::new();
    for (g, t) in out.succeeded() {
        let p = dir.join(format!("record_g{}.csv", gamma_tag(g)));
        let mut m = meta.clone();
        m.push(("gamma".into(), g.to_string()));
        files.extend(write_trajectory(t, &m, &p)?);
    }
    for col in MATRIX_COLUMNS {
        let m = out.matrix(col);
        let p = dir.join(format!("matrix_{col}.csv"));
        io::write_matrix(&p, &meta, &m)?;
        files.push(p);
        if let Some(svg_base) = &cfg.outputs.heatmap_svg {
            let base = cfg.outputs.resolve(svg_base);
            let p = stem_path(&base, col).with_extension("svg");
            write_text(&p, &svg::heatmap(&m, col))?;
            files.push(p);
        }
    }
    for (name, pick) in [("qubit", 0usize), ("boson", 1)] {
        let p = dir.join(format!("populations_{name}.csv"));
        write_population_matrix(&p, &meta, out, pick)?;
        files.push(p);
    }
    let p = dir.join("scan.csv");
    write_scan(&p, &meta, &out.scan(cfg.scan.gap_threshold))?;
    files.push(p);
    let failures = out.failures();
    if !failures.is_empty() {
        let p = dir.join("failures.csv");
        let mut w = csv::Writer::from_writer(io::create(&p)?);
        w.write_record(["gamma", "cause"]).map_err(fmt)?;
        for (g, e) in failures {
            w.write_record([g.to_string(), e.to_string()]).map_err(fmt)?;
        }
        w.flush().map_err(fmt)?;
        files.push(p);
    }
    Ok(files)
}

fn fmt(e: impl std::fmt::Display) -> DickeError {
    DickeError::Format(e.to_string())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    use std::io::Write;
    let mut w = io::create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|source| DickeError::Io {
            path: path.display().to_string(),
            source,
        })
}

/// Long form: `gamma, sample, t, lambda, index, population`.
fn write_population_matrix(
    path: &Path,
    meta: &[(String, String)],
    out: &SweepOutput,
    which: usize,
) -> Result<()> {
    let mut w = io::create(path)?;
    io::write_metadata(&mut w, meta).map_err(fmt)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["gamma", "sample", "t", "lambda", "index", "population"])
        .map_err(fmt)?;
    for (g, t) in out.succeeded() {
        let pops = if which == 0 {
            &t.qubit_populations
        } else {
            &t.boson_populations
        };
        for (i, (rec, v)) in t.records.iter().zip(pops).enumerate() {
            for (k, p) in v.iter().enumerate() {
                csv.write_record([
                    g.to_string(),
                    i.to_string(),
                    rec.t.to_string(),
                    rec.lambda.to_string(),
                    k.to_string(),
                    p.to_string(),
                ])
                .map_err(fmt)?;
            }
        }
    }
    csv.flush().map_err(fmt)?;
    Ok(())
}

fn turning_index(records: &[Record]) -> usize {
    let mut best = 0;
    for (i, r) in records.iter().enumerate() {
        if r.lambda > records[best].lambda {
            best = i;
        }
    }
    best
}

/// Gap closure and squeezing maxima on the up-branch of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub gamma: f64,
    /// First up-branch λ with `Δ_S` below threshold; `None` when the gap
    /// stays open up to the turning point.
    pub lambda_close: Option<f64>,
    pub lambda_max_boson_squeeze: f64,
    pub lambda_max_spin_squeeze: f64,
    pub gap_at_turn: f64,
}

fn argmax_lambda(records: &[Record], f: impl Fn(&Record) -> f64) -> f64 {
    let mut best: Option<(f64, f64)> = None;
    for r in records {
        let v = f(r);
        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|(bv, _)| v > bv) {
            best = Some((v, r.lambda));
        }
    }
    best.map_or(f64::NAN, |(_, l)| l)
}

pub fn scan_row(gamma: f64, records: &[Record], threshold: f64) -> ScanRow {
    let up = &records[..=turning_index(records).min(records.len().saturating_sub(1))];
    ScanRow {
        gamma,
        lambda_close: up.iter().find(|r| r.schmidt_gap < threshold).map(|r| r.lambda),
        lambda_max_boson_squeeze: argmax_lambda(up, |r| r.one_minus_xi_b2),
        lambda_max_spin_squeeze: argmax_lambda(up, |r| r.concurrence_scaled),
        gap_at_turn: up.last().map_or(f64::NAN, |r| r.schmidt_gap),
    }
}

/// Scan over already computed trajectories.
pub fn gap_closure_scan<'a>(
    rows: impl IntoIterator<Item = (f64, &'a [Record])>,
    threshold: f64,
) -> Vec<ScanRow> {
    rows.into_iter()
        .map(|(g, r)| scan_row(g, r, threshold))
        .collect()
}

pub fn write_scan(path: &Path, meta: &[(String, String)], rows: &[ScanRow]) -> Result<()> {
    let mut w = io::create(path)?;
    io::write_metadata(&mut w, meta).map_err(fmt)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record([
        "gamma",
        "lambda_close",
        "lambda_max_boson_squeeze",
        "lambda_max_spin_squeeze",
        "gap_at_turn",
    ])
    .map_err(fmt)?;
    for r in rows {
        csv.write_record([
            r.gamma.to_string(),
            r.lambda_close.map_or("open".to_string(), |l| l.to_string()),
            r.lambda_max_boson_squeeze.to_string(),
            r.lambda_max_spin_squeeze.to_string(),
            r.gap_at_turn.to_string(),
        ])
        .map_err(fmt)?;
    }
    csv.flush().map_err(fmt)?;
    Ok(())
}

/// Largest change of every compared quantity between two Fock cuts.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStep {
    pub from: usize,
    pub to: usize,
    pub changes: Vec<(String, f64)>,
}

impl ConvergenceStep {
    pub fn max_change(&self) -> f64 {
        self.changes.iter().map(|c| c.1).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub fock_cuts: Vec<usize>,
    pub steps: Vec<ConvergenceStep>,
    /// Peak population of `n = χ` over the trajectory, per cut.
    pub boundary_peaks: Vec<f64>,
    pub tolerance: f64,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.max_change() <= self.tolerance)
    }

    pub fn boundary_below(&self, limit: f64) -> bool {
        self.boundary_peaks.iter().all(|&b| b < limit)
    }
}

/// Record columns that depend on the Fock cut only through numerics.
const COMPARED: [&str; 13] = [
    "n_photons",
    "jz",
    "order_parameter",
    "xi_b2",
    "one_minus_xi_b2",
    "c_w",
    "xi_q2",
    "concurrence_scaled",
    "schmidt_gap",
    "s1_sq",
    "s2_sq",
    "norm",
    "parity",
];

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0.0);
            let y = b.get(i).copied().unwrap_or(0.0);
            if x.is_nan() && y.is_nan() {
                0.0
            } else {
                (x - y).abs()
            }
        })
        .fold(0.0, |m, d| if d.is_nan() { f64::INFINITY } else { m.max(d) })
}

/// Compares two trajectories sample by sample.
pub fn compare(a: &Trajectory, b: &Trajectory) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = COMPARED
        .iter()
        .map(|c| {
            let d = max_abs_diff(&a.column(c).unwrap(), &b.column(c).unwrap());
            (c.to_string(), d)
        })
        .collect();
    let pops = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.iter()
            .zip(y)
            .map(|(p, q)| max_abs_diff(p, q))
            .fold(0.0, f64::max)
    };
    if !a.qubit_populations.is_empty() && !b.qubit_populations.is_empty() {
        out.push(("qubit_populations".into(), pops(&a.qubit_populations, &b.qubit_populations)));
        out.push(("boson_populations".into(), pops(&a.boson_populations, &b.boson_populations)));
    }
    out
}

/// Reruns one protocol at each Fock cut (ascending, at least two).
pub fn convergence_check(
    model: &ModelParams,
    protocol: &RampProtocol,
    settings: &IntegratorSettings,
    fock_cuts: &[usize],
    tolerance: f64,
    execution: Execution,
) -> Result<ConvergenceReport> {
    if fock_cuts.len() < 2 || fock_cuts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DickeError::Config(
            "convergence needs at least two ascending Fock cuts".into(),
        ));
    }
    let capture = Capture {
        populations: true,
        spectra: false,
        invariants: Some(InvariantTolerances::default()),
    };
    let runs = exec::map(fock_cuts, execution, |&chi| {
        let mut m = model.clone();
        m.fock_cut = chi;
        simulate(&m, protocol, settings, &capture)
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(convergence_report(&runs, tolerance))
}

/// Report over trajectories already run at ascending Fock cuts.
pub fn convergence_report(runs: &[Trajectory], tolerance: f64) -> ConvergenceReport {
    let steps = runs
        .windows(2)
        .map(|w| ConvergenceStep {
            from: w[0].model.fock_cut,
            to: w[1].model.fock_cut,
            changes: compare(&w[0], &w[1]),
        })
        .collect();
    ConvergenceReport {
        fock_cuts: runs.iter().map(|r| r.model.fock_cut).collect(),
        steps,
        boundary_peaks: runs
            .iter()
            .map(|r| r.records.iter().map(|x| x.boundary_pop).fold(0.0, f64::max))
            .collect(),
        tolerance,
    }
}

/// Largest pointwise deviation of each record quantity between the
/// symmetric-sector path and the full-space oracle.
pub fn oracle_deviation(
    model: &ModelParams,
    protocol: &RampProtocol,
    settings: &IntegratorSettings,
) -> Result<Vec<(String, f64)>> {
    let capture = Capture {
        populations: true,
        spectra: true,
        invariants: Some(InvariantTolerances::default()),
    };
    let main = simulate(model, protocol, settings, &capture)?;
    let full = oracle::FullSpaceModel::new(
        model.n_qubits,
        model.fock_cut,
        model.qubit_freq,
        model.field_freq,
    )?;
    let mut dev: Vec<(&str, f64)> = vec![
        ("qubit_populations", 0.0),
        ("boson_populations", 0.0),
        ("n_photons", 0.0),
        ("jz", 0.0),
        ("xi_b2", 0.0),
        ("c_w", 0.0),
        ("xi_q2", 0.0),
        ("schmidt_gap", 0.0),
        ("schmidt_spectrum", 0.0),
    ];
    oracle::full_evolve(&full, protocol, settings, |s| {
        let i = s.index;
        let state = oracle::FullSpaceState::from_amps(full, s.amps.to_vec())?;
        let o = oracle::observe(&state)?;
        let r = &main.records[i];
        let vals = [
            max_abs_diff(&main.qubit_populations[i], &o.qubit_populations),
            max_abs_diff(&main.boson_populations[i], &o.boson_populations),
            (r.n_photons - o.photons).abs(),
            (r.jz - o.jz).abs(),
            (r.xi_b2 - o.boson_squeezing).abs(),
            max_abs_diff(&[r.c_w], &[o.concurrence]),
            max_abs_diff(&[r.xi_q2], &[o.spin_squeezing]),
            (r.schmidt_gap - o.schmidt_gap).abs(),
            max_abs_diff(&main.spectra[i], o.spectrum.squares()),
        ];
        for (d, v) in dev.iter_mut().zip(vals) {
            d.1 = d.1.max(v);
        }
        Ok(())
    })?;
    Ok(dev.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(n: usize, chi: usize) -> ModelParams {
        ModelParams::resonant(n, chi)
    }

    fn coarse() -> IntegratorSettings {
        IntegratorSettings {
            sample_count: 41,
            ..IntegratorSettings::default()
        }
    }

    #[test]
    fn first_record_is_the_initial_state() {
        let p = RampProtocol::from_gamma(-2.0).unwrap();
        let t = simulate(&quick(4, 20), &p, &coarse(), &Capture::default()).unwrap();
        let r = &t.records[0];
        assert_eq!(r.t, 0.0);
        assert_eq!(r.schmidt_gap, 1.0);
        assert_eq!(r.xi_b2, 1.0);
        assert_eq!(r.c_w, 0.0);
        assert_eq!(r.jz, -2.0);
        assert_eq!(t.records.len(), 41);
        assert_eq!(t.qubit_populations.len(), 41);
        assert!(t.spectra.is_empty());
    }

    #[test]
    fn single_qubit_concurrence_is_nan() {
        let p = RampProtocol::from_gamma(0.0).unwrap();
        let t = simulate(&quick(1, 10), &p, &coarse(), &Capture::default()).unwrap();
        assert!(t.records.iter().all(|r| r.c_w.is_nan() && r.xi_q2.is_nan()));
    }

    fn synthetic(lambdas: &[f64], gaps: &[f64]) -> Vec<Record> {
        lambdas
            .iter()
            .zip(gaps)
            .enumerate()
            .map(|(i, (&l, &g))| Record {
                t: i as f64,
                lambda: l,
                gamma: -1.0,
                n_photons: 0.0,
                jz: 0.0,
                order_parameter: 0.0,
                xi_b2: 1.0,
                one_minus_xi_b2: l * (1.0 - l),
                c_w: 0.0,
                xi_q2: 1.0,
                concurrence_scaled: if i == 2 { 0.3 } else { 0.1 },
                schmidt_gap: g,
                s1_sq: 1.0,
                s2_sq: 0.0,
                norm: 1.0,
                parity: 1.0,
                j_squared: 0.0,
                boundary_pop: 0.0,
            })
            .collect()
    }

    #[test]
    fn scan_uses_up_branch_only() {
        let l = [0.0, 0.25, 0.5, 0.75, 1.0, 0.75, 0.5, 0.25, 0.0];
        let g = [1.0, 0.5, 0.2, 0.0005, 0.01, 0.0, 0.0, 0.1, 0.2];
        let row = scan_row(-3.0, &synthetic(&l, &g), 1e-3);
        assert_eq!(row.lambda_close, Some(0.75));
        assert_eq!(row.lambda_max_boson_squeeze, 0.5);
        assert_eq!(row.lambda_max_spin_squeeze, 0.5);
        assert_eq!(row.gap_at_turn, 0.01);

        let g_open = [1.0, 0.5, 0.2, 0.1, 0.05, 0.0, 0.0, 0.1, 0.2];
        let row = scan_row(-1.0, &synthetic(&l, &g_open), 1e-3);
        assert_eq!(row.lambda_close, None);
    }

    #[test]
    fn zero_coupling_converges_exactly() {
        let p = RampProtocol::constant(0.0, 3.0).unwrap();
        let rep = convergence_check(&quick(3, 5), &p, &coarse(), &[5, 10, 15], 1e-4, Execution::Sequential).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.steps.len(), 2);
        assert!(rep.steps.iter().all(|s| s.max_change() == 0.0));
        assert!(rep.boundary_peaks.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn convergence_rejects_bad_cuts() {
        let p = RampProtocol::from_gamma(0.0).unwrap();
        assert!(convergence_check(&quick(2, 5), &p, &coarse(), &[5], 1e-4, Execution::Sequential).is_err());
        assert!(convergence_check(&quick(2, 5), &p, &coarse(), &[6, 5], 1e-4, Execution::Sequential).is_err());
    }

    #[test]
    fn sweep_keeps_failed_rows() {
        let out = sweep_gammas(&quick(2, 8), &[0.0, f64::NAN], &coarse(), &Capture::default(), Execution::Sequential);
        assert!(out.rows[0].outcome.is_ok());
        assert_eq!(out.failures().len(), 1);
        let m = out.matrix("schmidt_gap");
        assert_eq!(m.values[0], out.rows[0].outcome.as_ref().unwrap().column("schmidt_gap").unwrap());
        assert!(m.values[1].iter().all(|x| x.is_nan()));
        assert_eq!(m.values[1].len(), 41);
    }

    #[test]
    fn sweep_modes_agree() {
        let g = [-1.0, 0.0, 1.0];
        let seq = sweep_gammas(&quick(3, 12), &g, &coarse(), &Capture::default(), Execution::Sequential);
        let par = sweep_gammas(&quick(3, 12), &g, &coarse(), &Capture::default(), Execution::Parallel);
        for (a, b) in seq.rows.iter().zip(&par.rows) {
            assert_eq!(a.outcome.as_ref().unwrap().records, b.outcome.as_ref().unwrap().records);
        }
    }
}
