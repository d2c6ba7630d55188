//! Schrödinger propagation `dψ/dt = −i H(λ(t)) ψ` over a [`RampProtocol`].
//!
//! The step grid is laid out per segment between consecutive breakpoints
//! (sample times and the pulse turning point `τ`), so no step straddles the
//! kink and every sample lands exactly on a step boundary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};
use crate::ramp::RampProtocol;
use crate::state::norm;

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// A λ-dependent Hermitian operator applied matrix-free.
pub trait Generator: Sync {
    fn dim(&self) -> usize;
    /// `out = H(λ)·x`.
    fn apply(&self, lambda: f64, x: &[Complex64], out: &mut [Complex64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Rk4Fixed,
    RkAdaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSettings {
    pub method: Method,
    /// Fixed step; `None` selects [`IntegratorSettings::default_step`].
    pub step: Option<f64>,
    /// Local error tolerance for the adaptive method.
    pub tolerance: f64,
    pub renormalize: bool,
    pub sample_count: usize,
    /// Norm drift at a sample beyond this aborts the run.
    pub norm_abort: f64,
    /// Propagate with `H − ⟨H⟩` (reference refreshed at every breakpoint) and
    /// restore the global phase analytically before samples are emitted.
    /// Shrinks the RK4 spectral radius and with it the norm dissipation.
    pub energy_reference: bool,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            method: Method::Rk4Fixed,
            step: None,
            tolerance: 1e-10,
            renormalize: false,
            sample_count: 400,
            norm_abort: 1e-6,
            energy_reference: true,
        }
    }
}

impl IntegratorSettings {
    /// Base fixed step before velocity scaling.
    pub const BASE_STEP: f64 = 2.5e-3;

    pub fn validate(&self) -> Result<()> {
        if let Some(dt) = self.step {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(DickeError::InvalidSettings(format!("step must be positive, got {dt}")));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(DickeError::InvalidSettings(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.sample_count < 2 {
            return Err(DickeError::InvalidSettings(format!(
                "sample_count must be at least 2, got {}",
                self.sample_count
            )));
        }
        if !(self.norm_abort > 0.0) {
            return Err(DickeError::InvalidSettings("norm_abort must be positive".into()));
        }
        Ok(())
    }

    /// `min(h, h/v)` with `h` = [`Self::BASE_STEP`]; fast pulses get
    /// proportionally finer steps.
    pub fn default_step(protocol: &RampProtocol) -> f64 {
        match protocol.velocity() {
            Some(v) => Self::BASE_STEP.min(Self::BASE_STEP / v),
            None => Self::BASE_STEP,
        }
    }

    pub fn step_for(&self, protocol: &RampProtocol) -> f64 {
        self.step.unwrap_or_else(|| Self::default_step(protocol))
    }

    /// Uniform sample times over the protocol, first `0` and last `duration`.
    pub fn sample_times(&self, protocol: &RampProtocol) -> Vec<f64> {
        let duration = protocol.duration();
        let last = self.sample_count - 1;
        (0..self.sample_count)
            .map(|k| {
                if k == last {
                    duration
                } else {
                    duration * k as f64 / last as f64
                }
            })
            .collect()
    }
}

/// State handed to the observer at each sample time.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub index: usize,
    pub t: f64,
    pub lambda: f64,
    pub amps: &'a [Complex64],
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySummary {
    pub protocol: RampProtocol,
    pub times: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub steps: usize,
    pub rejected_steps: usize,
    /// Nominal fixed step, or the smallest accepted adaptive step.
    pub step_size: f64,
    pub max_norm_drift: f64,
    pub final_norm_drift: f64,
    pub renormalized: bool,
}

struct Workspace {
    k: [Vec<Complex64>; 7],
    stage: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        let z = || vec![Complex64::new(0.0, 0.0); dim];
        Self {
            k: [z(), z(), z(), z(), z(), z(), z()],
            stage: z(),
            scratch: z(),
        }
    }
}

/// `out = −i (H(λ(t)) − offset) y`.
fn rhs<G: Generator + ?Sized>(
    gen: &G,
    protocol: &RampProtocol,
    offset: f64,
    t: f64,
    y: &[Complex64],
    out: &mut [Complex64],
) {
    gen.apply(protocol.lambda_clamped(t), y, out);
    if offset == 0.0 {
        out.iter_mut().for_each(|o| *o *= MINUS_I);
    } else {
        out.iter_mut().zip(y).for_each(|(o, &yi)| *o = (*o - yi * offset) * MINUS_I);
    }
}

fn rk4_in_place<G: Generator + ?Sized>(
    gen: &G,
    protocol: &RampProtocol,
    offset: f64,
    y: &mut [Complex64],
    t: f64,
    dt: f64,
    ws: &mut Workspace,
) {
    let half = 0.5 * dt;
    let [k1, k2, k3, k4, ..] = &mut ws.k;
    let stage = &mut ws.stage;

    rhs(gen, protocol, offset, t, y, k1);
    for ((s, &yi), &k) in stage.iter_mut().zip(y.iter()).zip(k1.iter()) {
        *s = yi + k * half;
    }
    rhs(gen, protocol, offset, t + half, stage, k2);
    for ((s, &yi), &k) in stage.iter_mut().zip(y.iter()).zip(k2.iter()) {
        *s = yi + k * half;
    }
    rhs(gen, protocol, offset, t + half, stage, k3);
    for ((s, &yi), &k) in stage.iter_mut().zip(y.iter()).zip(k3.iter()) {
        *s = yi + k * dt;
    }
    rhs(gen, protocol, offset, t + dt, stage, k4);
    let w = dt / 6.0;
    for (i, yi) in y.iter_mut().enumerate() {
        *yi += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
    }
}

/// One classical RK4 step from `t` to `t + dt`, with λ evaluated at the
/// stage times.
pub fn step_fixed<G: Generator + ?Sized>(
    gen: &G,
    protocol: &RampProtocol,
    psi: &[Complex64],
    t: f64,
    dt: f64,
) -> Result<Vec<Complex64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DickeError::InvalidSettings(format!("step must be positive, got {dt}")));
    }
    let mut y = psi.to_vec();
    let mut ws = Workspace::new(psi.len());
    rk4_in_place(gen, protocol, 0.0, &mut y, t, dt, &mut ws);
    if y.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(DickeError::Invariant {
            t: t + dt,
            what: format!("non-finite amplitude after step {dt}"),
        });
    }
    Ok(y)
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Attempts one DP45 step; on success `y` is advanced and the scaled error
/// estimate is returned.
fn dp45_attempt<G: Generator + ?Sized>(
    gen: &G,
    protocol: &RampProtocol,
    offset: f64,
    y: &mut [Complex64],
    t: f64,
    dt: f64,
    tol: f64,
    ws: &mut Workspace,
) -> f64 {
    let dim = y.len();
    for s in 0..7 {
        for i in 0..dim {
            let mut acc = y[i];
            for (j, &a) in DP_A[s].iter().enumerate().take(s) {
                if a != 0.0 {
                    acc += ws.k[j][i] * (a * dt);
                }
            }
            ws.stage[i] = acc;
        }
        rhs(gen, protocol, offset, t + DP_C[s] * dt, &ws.stage, &mut ws.k[s]);
    }
    let mut err: f64 = 0.0;
    for i in 0..dim {
        let mut hi = Complex64::new(0.0, 0.0);
        let mut lo = Complex64::new(0.0, 0.0);
        for s in 0..7 {
            hi += ws.k[s][i] * DP_B5[s];
            lo += ws.k[s][i] * DP_B4[s];
        }
        ws.scratch[i] = y[i] + hi * dt;
        let scale = tol * (1.0 + y[i].norm().max(ws.scratch[i].norm()));
        err = err.max(((hi - lo) * dt).norm() / scale);
    }
    if err <= 1.0 {
        y.copy_from_slice(&ws.scratch);
    }
    err
}

fn breakpoints(protocol: &RampProtocol, samples: &[f64]) -> Vec<f64> {
    let mut points: Vec<f64> = samples.iter().copied().chain(protocol.kinks()).collect();
    points.sort_by(f64::total_cmp);
    let eps = 1e-12 * protocol.duration();
    points.dedup_by(|b, a| (*b - *a).abs() <= eps);
    points
}

/// Propagates `psi0` over the whole protocol, calling `sink` at each of
/// `settings.sample_count` uniformly spaced times (including `t = 0`).
pub fn evolve<G, F>(
    gen: &G,
    psi0: &[Complex64],
    protocol: &RampProtocol,
    settings: &IntegratorSettings,
    mut sink: F,
) -> Result<TrajectorySummary>
where
    G: Generator + ?Sized,
    F: FnMut(Sample<'_>) -> Result<()>,
{
    settings.validate()?;
    if psi0.len() != gen.dim() {
        return Err(DickeError::BasisMismatch {
            expected: gen.dim(),
            got: psi0.len(),
        });
    }
    let samples = settings.sample_times(protocol);
    let points = breakpoints(protocol, &samples);
    let dt_nominal = settings.step_for(protocol);

    let mut y = psi0.to_vec();
    let mut ws = Workspace::new(y.len());
    let mut summary = TrajectorySummary {
        protocol: *protocol,
        times: Vec::with_capacity(samples.len()),
        lambdas: Vec::with_capacity(samples.len()),
        steps: 0,
        rejected_steps: 0,
        step_size: dt_nominal,
        max_norm_drift: 0.0,
        final_norm_drift: 0.0,
        renormalized: settings.renormalize,
    };
    let mut adaptive_dt = dt_nominal;
    let mut min_accepted = f64::INFINITY;
    let mut next_sample = 0usize;
    let mut last_step = dt_nominal;

    let mut emit = |y: &[Complex64], t: f64, step: f64, summary: &mut TrajectorySummary, index: usize| {
        let drift = (norm(y) - 1.0).abs();
        summary.max_norm_drift = summary.max_norm_drift.max(drift);
        summary.final_norm_drift = drift;
        if drift > settings.norm_abort {
            return Err(DickeError::NormDrift {
                t,
                drift,
                limit: settings.norm_abort,
                step,
            });
        }
        let lambda = protocol.lambda_clamped(t);
        summary.times.push(t);
        summary.lambdas.push(lambda);
        sink(Sample {
            index,
            t,
            lambda,
            amps: y,
        })
    };

    // accumulated ∫ offset dt; the physical state is e^{−i phase}·y
    let mut phase = 0.0;
    let mut physical = vec![Complex64::new(0.0, 0.0); y.len()];
    let mut t = 0.0;
    for (p, &b) in points.iter().enumerate() {
        if p > 0 {
            let a = t;
            let len = b - a;
            let offset = if settings.energy_reference {
                gen.apply(protocol.lambda_clamped(a), &y, &mut ws.scratch);
                let e: Complex64 = y.iter().zip(&ws.scratch).map(|(u, v)| u.conj() * v).sum();
                e.re / y.iter().map(|u| u.norm_sqr()).sum::<f64>()
            } else {
                0.0
            };
            phase += offset * len;
            match settings.method {
                Method::Rk4Fixed => {
                    let n = ((len / dt_nominal) - 1e-9).ceil().max(1.0) as usize;
                    let h = len / n as f64;
                    for i in 0..n {
                        rk4_in_place(gen, protocol, offset, &mut y, a + i as f64 * h, h, &mut ws);
                        if settings.renormalize {
                            renormalize(&mut y);
                        }
                    }
                    summary.steps += n;
                    last_step = h;
                }
                Method::RkAdaptive => {
                    let mut tc = a;
                    while tc < b {
                        let remaining = b - tc;
                        let truncated = adaptive_dt >= remaining;
                        let h = if truncated { remaining } else { adaptive_dt };
                        let err = dp45_attempt(gen, protocol, offset, &mut y, tc, h, settings.tolerance, &mut ws);
                        if !err.is_finite() {
                            return Err(DickeError::NormDrift {
                                t: tc,
                                drift: f64::INFINITY,
                                limit: settings.norm_abort,
                                step: h,
                            });
                        }
                        let factor = if err == 0.0 {
                            5.0
                        } else {
                            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                        };
                        if err <= 1.0 {
                            tc = if truncated { b } else { tc + h };
                            summary.steps += 1;
                            min_accepted = min_accepted.min(h);
                            last_step = h;
                            if settings.renormalize {
                                renormalize(&mut y);
                            }
                            // a step shortened to hit a breakpoint says little about the next one
                            if !truncated || factor < 1.0 {
                                adaptive_dt = h * factor;
                            }
                        } else {
                            summary.rejected_steps += 1;
                            adaptive_dt = h * factor;
                            if adaptive_dt < 1e-14 * protocol.duration().max(1.0) {
                                return Err(DickeError::NormDrift {
                                    t: tc,
                                    drift: err,
                                    limit: settings.norm_abort,
                                    step: adaptive_dt,
                                });
                            }
                        }
                    }
                }
            }
        }
        t = b;
        while next_sample < samples.len() && (samples[next_sample] - b).abs() <= 1e-12 * protocol.duration() {
            let rot = Complex64::from_polar(1.0, -phase);
            physical.iter_mut().zip(&y).for_each(|(o, &v)| *o = v * rot);
            emit(&physical, samples[next_sample], last_step, &mut summary, next_sample)?;
            next_sample += 1;
        }
    }
    debug_assert_eq!(next_sample, samples.len());
    if settings.method == Method::RkAdaptive && min_accepted.is_finite() {
        summary.step_size = min_accepted;
    }
    Ok(summary)
}

fn renormalize(y: &mut [Complex64]) {
    let n = norm(y);
    if n > 0.0 {
        y.iter_mut().for_each(|a| *a /= n);
    }
}
