use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dicke::config::{Overrides, RunConfig, SweepGrid};
use dicke::error::DickeError;
use dicke::exec::Execution;
use dicke::{io, lzs, pipeline};

/// Driven Dicke model: triangular coupling pulses and entanglement diagnostics.
///
/// Settings are resolved as built-in defaults, then the `--config` file,
/// then flags.
#[derive(Parser, Debug)]
#[command(name = "dicke", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One trajectory written to a record file.
    Run {
        #[command(flatten)]
        common: Common,
        /// Compare against the full-space evolution (N ≤ 5, χ ≤ 32).
        #[arg(long, hide = true)]
        oracle_check: bool,
    },
    /// Independent trajectories over a Γ grid plus assembled matrices.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Gap-closure table from the record files of a sweep.
    Scan {
        #[command(flatten)]
        common: Common,
        /// Directory holding `record_g*.csv`; defaults to the output directory.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Reruns one trajectory at several Fock cuts.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Ascending Fock cuts; defaults to {χ, χ+20}.
        #[arg(long, value_delimiter = ',')]
        fock_cuts: Vec<usize>,
    },
    /// Phase-averaged Landau-Zener-Stückelberg response on the Γ grid.
    Lzs {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = lzs::DEFAULT_GAP)]
        gap: f64,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Γ = log₂ v of the pulse.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long)]
    n_qubits: Option<usize>,
    #[arg(long)]
    fock_cut: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent trajectories; 1 runs sequentially.
    #[arg(long)]
    threads: Option<usize>,
    /// Reserved; the dynamics is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn config(&self) -> Result<RunConfig, DickeError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p).map_err(|e| match e {
                DickeError::Io { path, source } => {
                    DickeError::Config(format!("cannot read {path}: {source}"))
                }
                other => other,
            })?,
            None => RunConfig::default(),
        };
        cfg.apply(&Overrides {
            gamma: self.gamma,
            n_qubits: self.n_qubits,
            fock_cut: self.fock_cut,
            out: self.out.clone(),
        });
        if let Some(seed) = self.seed {
            log::info!("seed {seed} ignored: the dynamics is deterministic");
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn execution(&self) -> Execution {
        Execution::from_threads(self.threads)
    }
}

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

fn exit_code(e: &DickeError) -> u8 {
    match e {
        DickeError::NormDrift { .. }
        | DickeError::Invariant { .. }
        | DickeError::NotPositive { .. }
        | DickeError::SvdFailure { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8, DickeError> {
    match cmd {
        Command::Run {
            common,
            oracle_check,
        } => run(&common, oracle_check),
        Command::Sweep { common } => sweep(&common),
        Command::Scan { common, input } => scan(&common, input),
        Command::Converge { common, fock_cuts } => converge(&common, fock_cuts),
        Command::Lzs { common, gap } => lzs_table(&common, gap),
    }
}

fn run(common: &Common, oracle_check: bool) -> Result<u8, DickeError> {
    let cfg = common.config()?;
    let (traj, files) = pipeline::run_single(&cfg)?;
    let last = traj.records.last().expect("at least two samples");
    println!(
        "{} samples, {} steps, max norm drift {:.2e}, final schmidt gap {:.6}",
        traj.records.len(),
        traj.summary.steps,
        traj.summary.max_norm_drift,
        last.schmidt_gap
    );
    for f in files {
        println!("wrote {}", f.display());
    }
    if oracle_check {
        let dev = pipeline::oracle_deviation(&cfg.model, &cfg.ramp.protocol()?, &cfg.integrator)?;
        for (name, d) in dev {
            println!("oracle {name:<20} max deviation {d:.3e}");
        }
    }
    Ok(0)
}

fn sweep(common: &Common) -> Result<u8, DickeError> {
    let mut cfg = common.config()?;
    if cfg.sweep.is_none() {
        cfg.sweep = Some(SweepGrid::default());
    }
    let (out, files) = pipeline::run_sweep(&cfg, common.execution())?;
    println!("{} files in {}", files.len(), cfg.outputs.dir.display());
    print_scan(&out.scan(cfg.scan.gap_threshold));
    let failures = out.failures();
    for (g, e) in &failures {
        eprintln!("gamma {g}: {e}");
    }
    Ok(if failures.is_empty() { 0 } else { EXIT_PARTIAL })
}

fn print_scan(rows: &[pipeline::ScanRow]) {
    println!("gamma  lambda_close  boson_max  spin_max  gap_at_turn");
    for r in rows {
        let close = r
            .lambda_close
            .map_or("open".to_string(), |l| format!("{l:.4}"));
        println!(
            "{:>5}  {close:>12}  {:>9.4}  {:>8.4}  {:.3e}",
            r.gamma, r.lambda_max_boson_squeeze, r.lambda_max_spin_squeeze, r.gap_at_turn
        );
    }
}

fn record_files(dir: &Path) -> Result<Vec<PathBuf>, DickeError> {
    let entries = std::fs::read_dir(dir).map_err(|source| DickeError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name.starts_with("record_g") && name.ends_with(".csv") && !name.contains("_pop") && !name.contains("_schmidt")
        })
        .collect();
    files.sort();
    Ok(files)
}

fn scan(common: &Common, input: Option<PathBuf>) -> Result<u8, DickeError> {
    let cfg = common.config()?;
    let dir = input.unwrap_or_else(|| cfg.outputs.dir.clone());
    let files = record_files(&dir)?;
    if files.is_empty() {
        return Err(DickeError::Config(format!(
            "no record_g*.csv files in {}",
            dir.display()
        )));
    }
    let mut rows = Vec::new();
    for f in &files {
        let (_, records) = io::read_records(f)?;
        let gamma = records.first().map_or(f64::NAN, |r| r.gamma);
        rows.push(pipeline::scan_row(gamma, &records, cfg.scan.gap_threshold));
    }
    rows.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    let path = cfg.outputs.dir.join("scan.csv");
    pipeline::write_scan(&path, &cfg.metadata(), &rows)?;
    print_scan(&rows);
    println!("wrote {}", path.display());
    Ok(0)
}

fn converge(common: &Common, fock_cuts: Vec<usize>) -> Result<u8, DickeError> {
    let mut cfg = common.config()?;
    if !fock_cuts.is_empty() {
        cfg.convergence.fock_cuts = fock_cuts;
    }
    cfg.validate()?;
    let cuts = cfg.fock_cuts();
    let report = pipeline::convergence_check(
        &cfg.model,
        &cfg.ramp.protocol()?,
        &cfg.integrator,
        &cuts,
        cfg.convergence.tolerance,
        common.execution(),
    )?;
    let path = cfg.outputs.dir.join("convergence.csv");
    let mut w = csv::Writer::from_writer(io::create(&path)?);
    let fmt = |e: csv::Error| DickeError::Format(e.to_string());
    w.write_record(["from", "to", "quantity", "max_change"]).map_err(fmt)?;
    for step in &report.steps {
        println!("chi {} -> {}: max change {:.3e}", step.from, step.to, step.max_change());
        for (q, d) in &step.changes {
            w.write_record([step.from.to_string(), step.to.to_string(), q.clone(), d.to_string()])
                .map_err(fmt)?;
        }
    }
    w.flush().map_err(|e| DickeError::Format(e.to_string()))?;
    for (chi, b) in report.fock_cuts.iter().zip(&report.boundary_peaks) {
        println!("chi {chi}: peak boundary population {b:.3e}");
    }
    println!(
        "{} at tolerance {:e}",
        if report.passed() { "converged" } else { "NOT converged" },
        report.tolerance
    );
    println!("wrote {}", path.display());
    Ok(0)
}

fn lzs_table(common: &Common, gap: f64) -> Result<u8, DickeError> {
    let cfg = common.config()?;
    if !(gap >= 0.0) {
        return Err(DickeError::Config(format!("gap must be non-negative, got {gap}")));
    }
    let gammas = cfg.sweep.unwrap_or_default().gammas()?;
    let rows = lzs::table(gap, &gammas);
    let path = cfg.outputs.dir.join("lzs.csv");
    let mut w = io::create(&path)?;
    io::write_metadata(&mut w, &[("gap".to_string(), gap.to_string())])
        .map_err(|e| DickeError::Format(e.to_string()))?;
    let mut csv = csv::Writer::from_writer(w);
    for r in &rows {
        csv.serialize(r).map_err(|e| DickeError::Format(e.to_string()))?;
    }
    csv.flush().map_err(|e| DickeError::Format(e.to_string()))?;
    println!("gamma  velocity  p_lz  p_plus_avg");
    for r in &rows {
        println!("{:>5}  {:.4e}  {:.6}  {:.6}", r.gamma, r.velocity, r.p_lz, r.p_plus_avg);
    }
    if gap > 0.0 {
        println!("peak velocity {:.6}", lzs::peak_velocity(gap)?);
    }
    println!("wrote {}", path.display());
    Ok(0)
}
