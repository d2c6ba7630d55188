//! Coupling protocols `λ(t)`.
//!
//! The triangular pulse rises as `v·t` to the fixed peak `λ = 1` at `τ = 1/v`
//! and falls back to zero at `2τ`.

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};

pub const PEAK_COUPLING: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RampProtocol {
    Triangular { velocity: f64 },
    Constant { value: f64, duration: f64 },
}

impl RampProtocol {
    pub fn triangular(velocity: f64) -> Result<Self> {
        if !(velocity > 0.0 && velocity.is_finite()) {
            return Err(DickeError::InvalidRamp(format!(
                "annealing velocity must be positive, got {velocity}"
            )));
        }
        Ok(Self::Triangular { velocity })
    }

    /// Triangular pulse with `v = 2^Γ`.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        Self::triangular(gamma.exp2())
    }

    pub fn constant(value: f64, duration: f64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(DickeError::InvalidRamp(format!(
                "coupling must be non-negative, got {value}"
            )));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(DickeError::InvalidRamp(format!(
                "duration must be positive, got {duration}"
            )));
        }
        Ok(Self::Constant { value, duration })
    }

    pub fn velocity(&self) -> Option<f64> {
        match *self {
            Self::Triangular { velocity } => Some(velocity),
            Self::Constant { .. } => None,
        }
    }

    /// `Γ = log₂ v`.
    pub fn gamma(&self) -> Option<f64> {
        self.velocity().map(f64::log2)
    }

    /// Half-pulse time `τ = 1/v`.
    pub fn tau(&self) -> Option<f64> {
        self.velocity().map(|v| PEAK_COUPLING / v)
    }

    pub fn duration(&self) -> f64 {
        match *self {
            Self::Triangular { velocity } => 2.0 * PEAK_COUPLING / velocity,
            Self::Constant { duration, .. } => duration,
        }
    }

    /// Slope discontinuities strictly inside the protocol.
    pub fn kinks(&self) -> Vec<f64> {
        self.tau().into_iter().collect()
    }

    pub fn lambda_at(&self, t: f64) -> Result<f64> {
        let duration = self.duration();
        if !(0.0..=duration).contains(&t) {
            return Err(DickeError::TimeOutOfRange { t, duration });
        }
        Ok(self.lambda_clamped(t))
    }

    /// `λ(t)` with `t` clamped into the protocol range.
    pub fn lambda_clamped(&self, t: f64) -> f64 {
        match *self {
            Self::Triangular { velocity } => {
                let tau = PEAK_COUPLING / velocity;
                let t = t.clamp(0.0, 2.0 * tau);
                if t <= tau {
                    velocity * t
                } else {
                    velocity * (2.0 * tau - t)
                }
            }
            Self::Constant { value, .. } => value,
        }
    }

    /// Times at which a triangular pulse passes `lambda_c`, ascending.
    pub fn critical_crossings(&self, lambda_c: f64) -> Result<[f64; 2]> {
        let Self::Triangular { velocity } = *self else {
            return Err(DickeError::InvalidRamp(
                "critical crossings need a triangular protocol".into(),
            ));
        };
        if !(lambda_c > 0.0 && lambda_c < PEAK_COUPLING) {
            return Err(DickeError::NoCrossing {
                lambda_c,
                peak: PEAK_COUPLING,
            });
        }
        let tau = PEAK_COUPLING / velocity;
        let up = lambda_c / velocity;
        Ok([up, 2.0 * tau - up])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn slow_pulse_values() {
        let p = RampProtocol::triangular(0.125).unwrap();
        assert_eq!(p.tau(), Some(8.0));
        assert_eq!(p.duration(), 16.0);
        assert_eq!(p.lambda_at(4.0).unwrap(), 0.5);
        assert_eq!(p.lambda_at(8.0).unwrap(), 1.0);
        assert_eq!(p.lambda_at(12.0).unwrap(), 0.5);
        assert_eq!(p.lambda_at(16.0).unwrap(), 0.0);
        assert_eq!(p.lambda_at(0.0).unwrap(), 0.0);
    }

    #[test]
    fn out_of_range_time() {
        let p = RampProtocol::triangular(0.125).unwrap();
        assert!(p.lambda_at(-0.1).is_err());
        assert!(p.lambda_at(16.01).is_err());
    }

    #[test]
    fn crossings() {
        let p = RampProtocol::triangular(0.125).unwrap();
        assert_eq!(p.critical_crossings(0.5).unwrap(), [4.0, 12.0]);
        let p = RampProtocol::triangular(1.0).unwrap();
        assert_eq!(p.critical_crossings(0.5).unwrap(), [0.5, 1.5]);
        assert!(matches!(
            p.critical_crossings(1.5),
            Err(DickeError::NoCrossing { .. })
        ));
        assert!(RampProtocol::constant(0.2, 1.0)
            .unwrap()
            .critical_crossings(0.1)
            .is_err());
    }

    #[test]
    fn rejects_bad_velocity() {
        assert!(RampProtocol::triangular(0.0).is_err());
        assert!(RampProtocol::triangular(-1.0).is_err());
        assert!(RampProtocol::constant(-0.1, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn gamma_round_trips(gamma in -20.0f64..4.0) {
            let p = RampProtocol::from_gamma(gamma).unwrap();
            let back = p.gamma().unwrap();
            prop_assert!((back - gamma).abs() <= 4.0 * f64::EPSILON * gamma.abs().max(1.0));
        }

        #[test]
        fn symmetric_about_peak(gamma in -12.0f64..3.0, frac in 0.0f64..1.0) {
            let p = RampProtocol::from_gamma(gamma).unwrap();
            let tau = p.tau().unwrap();
            let s = frac * tau;
            let a = p.lambda_at(tau - s).unwrap();
            let b = p.lambda_at(tau + s).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn slope_is_velocity_off_kink(gamma in -10.0f64..3.0, frac in 0.01f64..0.99) {
            let p = RampProtocol::from_gamma(gamma).unwrap();
            let v = p.velocity().unwrap();
            let tau = p.tau().unwrap();
            let h = 1e-4 * tau;
            for t in [frac * tau, tau + frac * tau] {
                if (t - tau).abs() <= 2.0 * h || t - h < 0.0 || t + h > 2.0 * tau {
                    continue;
                }
                let slope = (p.lambda_at(t + h).unwrap() - p.lambda_at(t - h).unwrap()) / (2.0 * h);
                prop_assert!((slope.abs() - v).abs() <= 1e-6 * v.max(1.0));
            }
        }
    }
}
