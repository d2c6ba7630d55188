use thiserror::Error;

#[derive(Debug, Error)]
pub enum DickeError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("basis index range overflow for N={n_qubits}, fock cut={fock_cut}")]
    IndexOverflow { n_qubits: usize, fock_cut: usize },

    #[error("state of dimension {got} does not belong to basis of dimension {expected}")]
    BasisMismatch { expected: usize, got: usize },

    #[error("matrix dimension {dim} exceeds guard {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("time {t} outside protocol range [0, {duration}]")]
    TimeOutOfRange { t: f64, duration: f64 },

    #[error("critical coupling {lambda_c} is never crossed (peak coupling {peak})")]
    NoCrossing { lambda_c: f64, peak: f64 },

    #[error("invalid ramp: {0}")]
    InvalidRamp(String),

    #[error("invalid integrator settings: {0}")]
    InvalidSettings(String),

    #[error("norm drift {drift:.3e} at t={t} exceeds {limit:.1e} (step size {step})")]
    NormDrift { t: f64, drift: f64, limit: f64, step: f64 },

    #[error("numerical invariant violated at t={t}: {what}")]
    Invariant { t: f64, what: String },

    #[error("two-qubit density matrix not positive: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("singular value decomposition did not converge after {sweeps} sweeps (off-diagonal {residual:.3e}, condition {condition:.3e})")]
    SvdFailure { sweeps: usize, residual: f64, condition: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("record file: {0}")]
    Format(String),

    #[error("sink aborted at t={t}: {message}")]
    Sink { t: f64, message: String },
}

pub type Result<T, E = DickeError> = std::result::Result<T, E>;
