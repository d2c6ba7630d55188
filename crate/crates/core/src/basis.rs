//! Truncated Hilbert space of the J = N/2 Dicke manifold times a Fock mode.
//!
//! States are `|m_z, n⟩` with `m_z` stored as the integer `2 m_z` so odd `N`
//! (half-integer `m_z`) needs no floating-point keys. Ordering is
//! lexicographic: `m_z` ascending (major), then `n` ascending (minor). The
//! coefficient-matrix reshape in [`crate::observables`] relies on it.

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    /// States with `n + m_z + N/2` even. Closed under the dynamics.
    #[default]
    ParityEven,
    /// Every `(m_z, n)` pair; kept for cross-checks.
    FullProduct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub n_qubits: usize,
    /// ε
    pub qubit_freq: f64,
    /// ω
    pub field_freq: f64,
    /// χ
    pub fock_cut: usize,
    pub sector: Sector,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::resonant(21, 60)
    }
}

impl ModelParams {
    /// Resonant model, `ε = ω = 1`, in the even-parity sector.
    pub fn resonant(n_qubits: usize, fock_cut: usize) -> Self {
        Self {
            n_qubits,
            qubit_freq: 1.0,
            field_freq: 1.0,
            fock_cut,
            sector: Sector::ParityEven,
        }
    }

    pub fn with_sector(mut self, sector: Sector) -> Self {
        self.sector = sector;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(DickeError::InvalidParams("n_qubits must be at least 1".into()));
        }
        if !(self.qubit_freq > 0.0 && self.qubit_freq.is_finite()) {
            return Err(DickeError::InvalidParams(format!(
                "qubit_freq must be positive, got {}",
                self.qubit_freq
            )));
        }
        if !(self.field_freq > 0.0 && self.field_freq.is_finite()) {
            return Err(DickeError::InvalidParams(format!(
                "field_freq must be positive, got {}",
                self.field_freq
            )));
        }
        Ok(())
    }

    /// Total angular momentum `J = N/2`.
    pub fn spin(&self) -> f64 {
        self.n_qubits as f64 / 2.0
    }

    /// Static critical coupling `√(εω)/2`.
    pub fn critical_coupling(&self) -> f64 {
        (self.qubit_freq * self.field_freq).sqrt() / 2.0
    }
}

/// A basis state `|m_z, n⟩` with `two_mz = 2 m_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub two_mz: i32,
    pub n: u32,
}

impl BasisState {
    pub fn mz(&self) -> f64 {
        self.two_mz as f64 / 2.0
    }
}

#[derive(Debug, Clone)]
pub struct Basis {
    params: ModelParams,
    states: Vec<BasisState>,
    // (N+1)(χ+1) table indexed by (m_z + N/2)·(χ+1) + n
    lookup: Vec<Option<u32>>,
}

impl Basis {
    pub fn build(params: ModelParams) -> Result<Self> {
        params.validate()?;
        let overflow = || DickeError::IndexOverflow {
            n_qubits: params.n_qubits,
            fock_cut: params.fock_cut,
        };
        if params.n_qubits > (i32::MAX / 2) as usize || params.fock_cut >= u32::MAX as usize {
            return Err(overflow());
        }
        let rows = params.n_qubits + 1;
        let cols = params.fock_cut + 1;
        let slots = rows.checked_mul(cols).ok_or_else(overflow)?;
        if slots > u32::MAX as usize {
            return Err(overflow());
        }

        let n_q = params.n_qubits as i32;
        let mut states = Vec::with_capacity(slots);
        let mut lookup = vec![None; slots];
        for k in 0..rows {
            for n in 0..cols {
                if params.sector == Sector::ParityEven && (k + n) % 2 != 0 {
                    continue;
                }
                lookup[k * cols + n] = Some(states.len() as u32);
                states.push(BasisState {
                    two_mz: 2 * k as i32 - n_q,
                    n: n as u32,
                });
            }
        }
        Ok(Self {
            params,
            states,
            lookup,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> BasisState {
        self.states[index]
    }

    pub fn n_qubits(&self) -> usize {
        self.params.n_qubits
    }

    pub fn fock_cut(&self) -> usize {
        self.params.fock_cut
    }

    /// Number of `m_z` values, `N + 1`.
    pub fn matter_dim(&self) -> usize {
        self.params.n_qubits + 1
    }

    /// Number of Fock levels, `χ + 1`.
    pub fn field_dim(&self) -> usize {
        self.params.fock_cut + 1
    }

    /// Position of `|m_z, n⟩` given as `(2 m_z, n)`; `None` if outside the
    /// truncation or forbidden by the sector.
    pub fn index_of(&self, two_mz: i32, n: u32) -> Option<usize> {
        let k = self.level_of(two_mz)?;
        if n as usize > self.params.fock_cut {
            return None;
        }
        self.lookup[k * self.field_dim() + n as usize].map(|i| i as usize)
    }

    /// Matter level `k = m_z + N/2` in `0..=N`, from `2 m_z`.
    pub fn level_of(&self, two_mz: i32) -> Option<usize> {
        let shifted = two_mz + self.params.n_qubits as i32;
        if shifted < 0 || shifted % 2 != 0 {
            return None;
        }
        let k = (shifted / 2) as usize;
        (k <= self.params.n_qubits).then_some(k)
    }

    /// Parity sign `(-1)^(n + m_z + N/2)` of basis state `index`.
    pub fn parity_sign(&self, index: usize) -> f64 {
        let s = self.states[index];
        let k = self.level_of(s.two_mz).expect("basis state in range");
        if (k + s.n as usize) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}
