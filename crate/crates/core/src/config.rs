//! Run configuration. Precedence, lowest first: built-in defaults, the TOML
//! file, command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::ModelParams;
use crate::error::{DickeError, Result};
use crate::integrator::IntegratorSettings;
use crate::ramp::RampProtocol;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RampSpec {
    Gamma(f64),
    Velocity(f64),
}

impl RampSpec {
    pub fn protocol(&self) -> Result<RampProtocol> {
        match *self {
            RampSpec::Gamma(g) => RampProtocol::from_gamma(g),
            RampSpec::Velocity(v) => RampProtocol::triangular(v),
        }
    }
}

impl Default for RampSpec {
    fn default() -> Self {
        RampSpec::Gamma(-6.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub dir: PathBuf,
    /// Relative paths resolve against `dir`.
    pub record_csv: PathBuf,
    pub populations: bool,
    pub schmidt_full: bool,
    pub heatmap_svg: Option<PathBuf>,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            record_csv: PathBuf::from("record.csv"),
            populations: false,
            schmidt_full: false,
            heatmap_svg: None,
        }
    }
}

impl Outputs {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_step: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            gamma_min: -12.0,
            gamma_max: 0.0,
            gamma_step: 1.0,
        }
    }
}

impl SweepGrid {
    /// Inclusive grid from `gamma_min` in steps of `gamma_step`.
    pub fn gammas(&self) -> Result<Vec<f64>> {
        let bad = |m: &str| Err(DickeError::Config(format!("sweep grid: {m}")));
        if !(self.gamma_min.is_finite() && self.gamma_max.is_finite()) {
            return bad("bounds must be finite");
        }
        if !(self.gamma_step > 0.0 && self.gamma_step.is_finite()) {
            return bad("gamma_step must be positive");
        }
        if self.gamma_max < self.gamma_min {
            return bad("gamma_max below gamma_min");
        }
        let count = ((self.gamma_max - self.gamma_min) / self.gamma_step + 1e-9).floor() as usize + 1;
        if count > 10_000 {
            return bad("more than 10000 rows");
        }
        Ok((0..count)
            .map(|i| self.gamma_min + i as f64 * self.gamma_step)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSettings {
    pub gap_threshold: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self { gap_threshold: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceSettings {
    /// Fock cuts to compare; empty means `{χ, χ+20}`.
    pub fock_cuts: Vec<usize>,
    pub tolerance: f64,
}

impl Default for ConvergenceSettings {
    fn default() -> Self {
        Self {
            fock_cuts: Vec::new(),
            tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub model: ModelParams,
    pub ramp: RampSpec,
    pub integrator: IntegratorSettings,
    pub outputs: Outputs,
    pub sweep: Option<SweepGrid>,
    pub scan: ScanSettings,
    pub convergence: ConvergenceSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            model: ModelParams::resonant(21, 60),
            ramp: RampSpec::default(),
            integrator: IntegratorSettings::default(),
            outputs: Outputs::default(),
            sweep: None,
            scan: ScanSettings::default(),
            convergence: ConvergenceSettings::default(),
        }
    }
}

/// Command-line values that replace file values when present.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub gamma: Option<f64>,
    pub n_qubits: Option<usize>,
    pub fock_cut: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| DickeError::Config(e.message().to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(DickeError::Config(format!(
                "schema_version {} not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| DickeError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(g) = o.gamma {
            self.ramp = RampSpec::Gamma(g);
        }
        if let Some(n) = o.n_qubits {
            self.model.n_qubits = n;
        }
        if let Some(x) = o.fock_cut {
            self.model.fock_cut = x;
        }
        if let Some(d) = &o.out {
            self.outputs.dir = d.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: DickeError| DickeError::Config(e.to_string());
        self.model.validate().map_err(cfg)?;
        self.ramp.protocol().map_err(cfg)?;
        self.integrator.validate().map_err(cfg)?;
        if let Some(grid) = &self.sweep {
            grid.gammas()?;
        }
        if !(self.scan.gap_threshold > 0.0) {
            return Err(DickeError::Config("gap_threshold must be positive".into()));
        }
        if !(self.convergence.tolerance > 0.0) {
            return Err(DickeError::Config("convergence tolerance must be positive".into()));
        }
        if self.convergence.fock_cuts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DickeError::Config("fock_cuts must be ascending".into()));
        }
        Ok(())
    }

    pub fn fock_cuts(&self) -> Vec<usize> {
        if self.convergence.fock_cuts.len() >= 2 {
            self.convergence.fock_cuts.clone()
        } else {
            vec![self.model.fock_cut, self.model.fock_cut + 20]
        }
    }

    pub fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("dicke".into(), env!("CARGO_PKG_VERSION").into()),
            ("config".into(), self.to_toml().trim_end().to_string()),
        ]
    }
}
