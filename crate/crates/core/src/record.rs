//! One row of diagnostics per sample, and the invariant checks run on it.

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};
use crate::observables::{self, Observation};

/// CSV record schema, column order as declared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub t: f64,
    pub lambda: f64,
    /// `log₂ v`; NaN for a constant protocol.
    pub gamma: f64,
    pub n_photons: f64,
    pub jz: f64,
    pub order_parameter: f64,
    pub xi_b2: f64,
    pub one_minus_xi_b2: f64,
    /// NaN for a single qubit.
    pub c_w: f64,
    pub xi_q2: f64,
    /// `(N−1) c_w = 1 − ξ_Q²`.
    pub concurrence_scaled: f64,
    pub schmidt_gap: f64,
    pub s1_sq: f64,
    pub s2_sq: f64,
    pub norm: f64,
    pub parity: f64,
    pub j_squared: f64,
    pub boundary_pop: f64,
}

impl Record {
    pub const COLUMNS: [&'static str; 18] = [
        "t",
        "lambda",
        "gamma",
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
        "j_squared",
        "boundary_pop",
    ];

    pub fn new(t: f64, lambda: f64, gamma: f64, n_qubits: usize, obs: &Observation) -> Self {
        let xi_b2 = obs.boson_squeezing();
        let c_w = obs.concurrence.unwrap_or(f64::NAN);
        let xi_q2 = observables::spin_squeezing(c_w, n_qubits);
        let (s1_sq, s2_sq) = obs.spectrum.leading();
        Self {
            t,
            lambda,
            gamma,
            n_photons: obs.photons,
            jz: obs.correlators.mean[2],
            order_parameter: observables::order_parameter(obs.photons, n_qubits),
            xi_b2,
            one_minus_xi_b2: 1.0 - xi_b2,
            c_w,
            xi_q2,
            concurrence_scaled: 1.0 - xi_q2,
            schmidt_gap: obs.schmidt_gap(),
            s1_sq,
            s2_sq,
            norm: obs.norm,
            parity: obs.parity,
            j_squared: obs.correlators.j_squared(),
            boundary_pop: obs.boundary,
        }
    }

    /// Values in [`Record::COLUMNS`] order.
    pub fn values(&self) -> [f64; 18] {
        [
            self.t,
            self.lambda,
            self.gamma,
            self.n_photons,
            self.jz,
            self.order_parameter,
            self.xi_b2,
            self.one_minus_xi_b2,
            self.c_w,
            self.xi_q2,
            self.concurrence_scaled,
            self.schmidt_gap,
            self.s1_sq,
            self.s2_sq,
            self.norm,
            self.parity,
            self.j_squared,
            self.boundary_pop,
        ]
    }

    pub fn column(&self, name: &str) -> Option<f64> {
        Self::COLUMNS
            .iter()
            .position(|c| *c == name)
            .map(|i| self.values()[i])
    }
}

/// Tolerances for the per-sample conservation checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantTolerances {
    pub parity: f64,
    pub j_squared: f64,
    pub schmidt_total: f64,
}

impl Default for InvariantTolerances {
    fn default() -> Self {
        Self {
            parity: 1e-8,
            j_squared: 1e-8,
            schmidt_total: 1e-10,
        }
    }
}

/// Parity, total angular momentum and Schmidt normalization at one sample.
pub fn check_invariants(
    t: f64,
    n_qubits: usize,
    obs: &Observation,
    tol: &InvariantTolerances,
) -> Result<()> {
    let fail = |what: String| Err(DickeError::Invariant { t, what });
    if (obs.parity - 1.0).abs() > tol.parity {
        return fail(format!("parity {}", obs.parity));
    }
    let j = n_qubits as f64 / 2.0;
    let j2 = obs.correlators.j_squared();
    if (j2 - j * (j + 1.0)).abs() > tol.j_squared {
        return fail(format!("<J^2> = {j2}, expected {}", j * (j + 1.0)));
    }
    let total = obs.spectrum.total();
    if (total - 1.0).abs() > tol.schmidt_total {
        return fail(format!("sum of squared Schmidt coefficients {total}"));
    }
    Ok(())
}
