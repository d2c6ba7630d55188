use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::Basis;
use crate::error::{DickeError, Result};

/// Amplitudes `C_{n,m_z}` over a [`Basis`].
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Arc<Basis>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amps(basis: Arc<Basis>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(DickeError::BasisMismatch {
                expected: basis.dim(),
                got: amps.len(),
            });
        }
        Ok(Self { basis, amps })
    }

    /// `|−N/2, 0⟩`: all qubits down, field in vacuum.
    pub fn initial(basis: Arc<Basis>) -> Self {
        let n = basis.n_qubits() as i32;
        Self::basis_state(basis, -n, 0).expect("|-N/2, 0> is in every sector")
    }

    pub fn basis_state(basis: Arc<Basis>, two_mz: i32, n: u32) -> Result<Self> {
        let index = basis.index_of(two_mz, n).ok_or_else(|| {
            DickeError::InvalidParams(format!("|m_z={}, n={n}> not in basis", two_mz as f64 / 2.0))
        })?;
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, amps })
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `Σ (−1)^(n + m_z + N/2) |C|²`.
    pub fn parity_expectation(&self) -> f64 {
        parity_expectation(&self.basis, &self.amps)
    }

    /// Probability weight at the Fock boundary `n = χ`.
    pub fn boundary_population(&self) -> f64 {
        boundary_population(&self.basis, &self.amps)
    }
}

pub fn norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨P⟩/⟨ψ|ψ⟩`, so a drifting norm does not masquerade as parity leakage.
pub fn parity_expectation(basis: &Basis, amps: &[Complex64]) -> f64 {
    let (signed, total) = amps
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(s, t), (i, a)| {
            let p = a.norm_sqr();
            (s + basis.parity_sign(i) * p, t + p)
        });
    if total > 0.0 {
        signed / total
    } else {
        0.0
    }
}

pub fn boundary_population(basis: &Basis, amps: &[Complex64]) -> f64 {
    let cut = basis.fock_cut() as u32;
    basis
        .states()
        .iter()
        .zip(amps)
        .filter(|(s, _)| s.n == cut)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}
