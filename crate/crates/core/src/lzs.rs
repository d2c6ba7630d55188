//! Landau–Zener–Stückelberg two-level heuristic for a single pulse.
//!
//! The many-body spectrum is caricatured as a ground state and an excited
//! manifold separated by a minimum gap `Δ`. One passage excites with
//! `P_LZ = exp(−2πΔ²/4v)`; the up-down pulse passes twice and interferes
//! with Stückelberg phase `Φ`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};

pub const DEFAULT_GAP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LzsParams {
    pub gap: f64,
    pub velocity: f64,
    pub phase: f64,
}

impl LzsParams {
    pub fn new(gap: f64, velocity: f64, phase: f64) -> Result<Self> {
        if !(gap >= 0.0) {
            return Err(DickeError::InvalidParams(format!("gap must be non-negative, got {gap}")));
        }
        if !(velocity > 0.0) {
            return Err(DickeError::InvalidParams(format!(
                "velocity must be positive, got {velocity}"
            )));
        }
        Ok(Self { gap, velocity, phase })
    }

    pub fn p_plus(&self) -> f64 {
        p_plus_double(self.gap, self.velocity, self.phase)
    }
}

/// Single-passage excitation probability `exp(−πΔ²/(2v))`.
pub fn p_lz(gap: f64, velocity: f64) -> f64 {
    (-PI * gap * gap / (2.0 * velocity)).exp()
}

/// Double-passage probability `4 P_LZ (1 − P_LZ) sin²Φ`.
pub fn p_plus_double(gap: f64, velocity: f64, phase: f64) -> f64 {
    let p = p_lz(gap, velocity);
    4.0 * p * (1.0 - p) * phase.sin().powi(2)
}

/// Phase-averaged double-passage probability `2 P_LZ (1 − P_LZ)`.
pub fn p_plus_averaged(gap: f64, velocity: f64) -> f64 {
    let p = p_lz(gap, velocity);
    2.0 * p * (1.0 - p)
}

/// Velocity maximizing the averaged response, where `P_LZ = 1/2`:
/// `v* = πΔ²/(2 ln 2)`.
pub fn peak_velocity(gap: f64) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(DickeError::InvalidParams(format!(
            "peak velocity needs a positive gap, got {gap}"
        )));
    }
    Ok(PI * gap * gap / (2.0 * LN_2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LzsRow {
    pub gamma: f64,
    pub velocity: f64,
    pub p_lz: f64,
    pub p_plus_avg: f64,
}

/// `P̄₊` on a Γ grid (`v = 2^Γ`).
pub fn table(gap: f64, gammas: &[f64]) -> Vec<LzsRow> {
    gammas
        .iter()
        .map(|&gamma| {
            let velocity = gamma.exp2();
            LzsRow {
                gamma,
                velocity,
                p_lz: p_lz(gap, velocity),
                p_plus_avg: p_plus_averaged(gap, velocity),
            }
        })
        .collect()
}
