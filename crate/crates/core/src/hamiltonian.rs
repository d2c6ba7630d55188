//! `H(λ) = ε J_z + ω a†a + (2λ/√N) J_x (a† + a)` on a truncated [`Basis`].
//!
//! The operator is cached as `H = H_diag + λ·H_coup`, both λ-independent, so
//! a time step costs one diagonal scale plus one sparse product. Amplitude
//! pushed beyond `n = χ` is dropped.

use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::Basis;
use crate::error::{DickeError, Result};
use crate::integrator::Generator;
use crate::sparse::CsrMatrix;
use crate::state::StateVector;

/// Largest dimension [`DickeHamiltonian::matrix`] will materialize.
pub const MATRIX_DIM_GUARD: usize = 1 << 16;

/// `√(J(J+1) − m(m±1))` with `two_j = 2J`, `two_m = 2m`, `sign = ±1`.
pub fn spin_ladder(two_j: i32, two_m: i32, sign: i32) -> f64 {
    let j = two_j as f64 / 2.0;
    let m = two_m as f64 / 2.0;
    let target = two_m + 2 * sign;
    if target.abs() > two_j {
        return 0.0;
    }
    (j * (j + 1.0) - m * (m + sign as f64)).max(0.0).sqrt()
}

#[derive(Debug, Clone)]
pub struct DickeHamiltonian {
    basis: Arc<Basis>,
    diag: Vec<f64>,
    coupling: CsrMatrix,
}

impl DickeHamiltonian {
    pub fn new(basis: Arc<Basis>) -> Self {
        let p = basis.params();
        let two_j = p.n_qubits as i32;
        let scale = 1.0 / (p.n_qubits as f64).sqrt();

        let diag = basis
            .states()
            .iter()
            .map(|s| p.qubit_freq * s.mz() + p.field_freq * s.n as f64)
            .collect();

        // (2/√N)·J_x·(a + a†) with J_x = (J+ + J-)/2: each of the four
        // (Δm, Δn) = (±1, ±1) moves carries (1/√N)·spin ladder·boson ladder.
        let rows = basis
            .states()
            .iter()
            .map(|s| {
                let mut row = Vec::with_capacity(4);
                for dm in [-1, 1] {
                    let js = spin_ladder(two_j, s.two_mz, dm);
                    if js == 0.0 {
                        continue;
                    }
                    for dn in [-1i64, 1] {
                        let target_n = s.n as i64 + dn;
                        if target_n < 0 {
                            continue;
                        }
                        let Some(j) = basis.index_of(s.two_mz + 2 * dm, target_n as u32) else {
                            continue;
                        };
                        let bs = (s.n.max(target_n as u32) as f64).sqrt();
                        row.push((j, scale * js * bs));
                    }
                }
                row
            })
            .collect();

        Self {
            basis,
            diag,
            coupling: CsrMatrix::from_rows(rows),
        }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn coupling(&self) -> &CsrMatrix {
        &self.coupling
    }

    /// `H(λ)·ψ`, unnormalized.
    pub fn apply(&self, lambda: f64, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.basis.dim() || psi.basis().params() != self.basis.params() {
            return Err(DickeError::BasisMismatch {
                expected: self.basis.dim(),
                got: psi.dim(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.basis.dim()];
        self.apply_into(lambda, psi.amps(), &mut out);
        StateVector::from_amps(self.basis.clone(), out)
    }

    pub fn apply_into(&self, lambda: f64, x: &[Complex64], out: &mut [Complex64]) {
        for ((o, &d), &xi) in out.iter_mut().zip(&self.diag).zip(x) {
            *o = xi * d;
        }
        if lambda != 0.0 {
            self.coupling.mul_vec_add(lambda, x, out);
        }
    }

    /// Materializes `H(λ)` as a sparse real symmetric matrix.
    pub fn matrix(&self, lambda: f64) -> Result<CsrMatrix> {
        let dim = self.basis.dim();
        if dim > MATRIX_DIM_GUARD {
            return Err(DickeError::DimensionGuard {
                dim,
                limit: MATRIX_DIM_GUARD,
            });
        }
        let rows = (0..dim)
            .map(|i| {
                let mut row: Vec<(usize, f64)> =
                    self.coupling.row(i).map(|(j, v)| (j, lambda * v)).filter(|&(_, v)| v != 0.0).collect();
                row.push((i, self.diag[i]));
                row
            })
            .collect();
        Ok(CsrMatrix::from_rows(rows))
    }

    /// Dense `H(λ)` for desk-scale diagonalization.
    pub fn dense(&self, lambda: f64) -> Result<nalgebra::DMatrix<f64>> {
        const DENSE_GUARD: usize = 4096;
        let dim = self.basis.dim();
        if dim > DENSE_GUARD {
            return Err(DickeError::DimensionGuard {
                dim,
                limit: DENSE_GUARD,
            });
        }
        Ok(self.matrix(lambda)?.to_dense())
    }

    /// Instantaneous ground state of `H(λ)` by dense diagonalization.
    pub fn ground_state(&self, lambda: f64) -> Result<(f64, StateVector)> {
        let eig = nalgebra::SymmetricEigen::new(self.dense(lambda)?);
        let (imin, &emin) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty basis");
        let amps = eig
            .eigenvectors
            .column(imin)
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        Ok((emin, StateVector::from_amps(self.basis.clone(), amps)?))
    }

    /// `⟨ψ|H(λ)|ψ⟩`.
    pub fn energy(&self, lambda: f64, amps: &[Complex64]) -> f64 {
        let mut h = vec![Complex64::new(0.0, 0.0); amps.len()];
        self.apply_into(lambda, amps, &mut h);
        amps.iter().zip(&h).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

impl Generator for DickeHamiltonian {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn apply(&self, lambda: f64, x: &[Complex64], out: &mut [Complex64]) {
        self.apply_into(lambda, x, out);
    }
}
