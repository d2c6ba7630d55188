//! Diagnostics of an instantaneous light-matter state.
//!
//! Everything is computed from the `(N+1) × (χ+1)` coefficient matrix
//! `C[m_z, n]`: subsystem populations, field quadrature moments and boson
//! squeezing, collective spin correlators, the symmetric two-qubit reduced
//! density matrix with its Wootters concurrence and the resulting spin
//! squeezing, and the light-matter Schmidt spectrum.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::Basis;
use crate::error::{DickeError, Result};
use crate::hamiltonian::spin_ladder;
use crate::svd;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Negative eigenvalues above `-EIG_CLAMP` are treated as rounding noise.
pub const EIG_CLAMP: f64 = 1e-9;

/// Row-major `(N+1) × (χ+1)` matrix; row `k` is `m_z = k − N/2`, column is `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    n_qubits: usize,
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CoefficientMatrix {
    pub fn from_amps(basis: &Basis, amps: &[Complex64]) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(DickeError::BasisMismatch {
                expected: basis.dim(),
                got: amps.len(),
            });
        }
        let rows = basis.matter_dim();
        let cols = basis.field_dim();
        let mut data = vec![ZERO; rows * cols];
        for (s, &a) in basis.states().iter().zip(amps) {
            let k = basis.level_of(s.two_mz).expect("basis state in range");
            data[k * cols + s.n as usize] = a;
        }
        Ok(Self {
            n_qubits: basis.n_qubits(),
            rows,
            cols,
            data,
        })
    }

    pub fn from_state(psi: &crate::state::StateVector) -> Self {
        Self::from_amps(psi.basis(), psi.amps()).expect("state matches its own basis")
    }

    /// Inverse reshape onto `basis`; slots the basis does not contain are
    /// ignored.
    pub fn to_amps(&self, basis: &Basis) -> Vec<Complex64> {
        basis
            .states()
            .iter()
            .map(|s| {
                let k = basis.level_of(s.two_mz).expect("basis state in range");
                self.data[k * self.cols + s.n as usize]
            })
            .collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, k: usize, n: usize) -> Complex64 {
        self.data[k * self.cols + n]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.frobenius_norm();
        let mut out = self.clone();
        if n > 0.0 {
            out.data.iter_mut().for_each(|a| *a /= n);
        }
        out
    }

    fn two_mz(&self, k: usize) -> i32 {
        2 * k as i32 - self.n_qubits as i32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Populations {
    /// `⟨m_z|ρ_Q|m_z⟩`, indexed by `m_z + N/2`.
    pub qubit: Vec<f64>,
    /// `⟨n|ρ_B|n⟩`.
    pub boson: Vec<f64>,
}

pub fn subsystem_populations(c: &CoefficientMatrix) -> Populations {
    let mut qubit = vec![0.0; c.rows];
    let mut boson = vec![0.0; c.cols];
    for k in 0..c.rows {
        for n in 0..c.cols {
            let p = c.get(k, n).norm_sqr();
            qubit[k] += p;
            boson[n] += p;
        }
    }
    Populations { qubit, boson }
}

/// Normal-ordered field moments `⟨a⟩`, `⟨a²⟩`, `⟨a†a⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMoments {
    pub a: Complex64,
    pub a2: Complex64,
    pub n: f64,
}

pub fn field_moments(c: &CoefficientMatrix) -> FieldMoments {
    let mut a = ZERO;
    let mut a2 = ZERO;
    let mut n_avg = 0.0;
    for k in 0..c.rows {
        let row = &c.data[k * c.cols..(k + 1) * c.cols];
        for n in 0..c.cols {
            let amp = row[n];
            n_avg += n as f64 * amp.norm_sqr();
            if n >= 1 {
                a += row[n - 1].conj() * amp * (n as f64).sqrt();
            }
            if n >= 2 {
                a2 += row[n - 2].conj() * amp * ((n * (n - 1)) as f64).sqrt();
            }
        }
    }
    FieldMoments { a, a2, n: n_avg }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMoments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// Symmetrized `⟨(xp + px)/2⟩ − ⟨x⟩⟨p⟩`.
    pub cov_xp: f64,
}

impl QuadratureMoments {
    /// `Var(x)·Var(p) − Cov²`, bounded below by 1/4.
    pub fn uncertainty_determinant(&self) -> f64 {
        self.var_x * self.var_p - self.cov_xp * self.cov_xp
    }
}

/// Quadratures `x = (a + a†)/√2`, `p = i(a† − a)/√2`; vacuum variance 1/2.
pub fn quadrature_moments(c: &CoefficientMatrix) -> QuadratureMoments {
    quadratures_from(&field_moments(c))
}

pub fn quadratures_from(m: &FieldMoments) -> QuadratureMoments {
    let sqrt2 = std::f64::consts::SQRT_2;
    let mean_x = sqrt2 * m.a.re;
    let mean_p = sqrt2 * m.a.im;
    let x2 = m.a2.re + m.n + 0.5;
    let p2 = -m.a2.re + m.n + 0.5;
    QuadratureMoments {
        mean_x,
        mean_p,
        var_x: x2 - mean_x * mean_x,
        var_p: p2 - mean_p * mean_p,
        cov_xp: m.a2.im - mean_x * mean_p,
    }
}

/// `ξ_B² = Var x + Var p − √((Var x − Var p)² + 4 Cov²)`; squeezed iff `< 1`.
pub fn boson_squeezing(m: &QuadratureMoments) -> f64 {
    let d = m.var_x - m.var_p;
    m.var_x + m.var_p - (d * d + 4.0 * m.cov_xp * m.cov_xp).sqrt()
}

/// First moments `⟨J_a⟩` and symmetrized second moments
/// `⟨{J_a, J_b}⟩/2`, axes ordered `x, y, z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveCorrelators {
    pub mean: [f64; 3],
    pub sym: [[f64; 3]; 3],
}

impl CollectiveCorrelators {
    /// `⟨J²⟩ = ⟨J_x²⟩ + ⟨J_y²⟩ + ⟨J_z²⟩`.
    pub fn j_squared(&self) -> f64 {
        self.sym[0][0] + self.sym[1][1] + self.sym[2][2]
    }
}

pub fn collective_correlators(c: &CoefficientMatrix) -> CollectiveCorrelators {
    let two_j = c.n_qubits as i32;
    let len = c.data.len();
    let mut jx = vec![ZERO; len];
    let mut jy = vec![ZERO; len];
    let mut jz = vec![ZERO; len];
    let i_half = Complex64::new(0.0, -0.5);
    for k in 0..c.rows {
        let two_m = c.two_mz(k);
        let m = two_m as f64 / 2.0;
        // (J+ ψ)[k] = ladder(m_{k-1}, +)·ψ[k-1],  (J- ψ)[k] = ladder(m_{k+1}, -)·ψ[k+1]
        let up = if k > 0 { spin_ladder(two_j, two_m - 2, 1) } else { 0.0 };
        let down = if k + 1 < c.rows { spin_ladder(two_j, two_m + 2, -1) } else { 0.0 };
        for n in 0..c.cols {
            let i = k * c.cols + n;
            let plus = if k > 0 { c.data[i - c.cols] * up } else { ZERO };
            let minus = if k + 1 < c.rows { c.data[i + c.cols] * down } else { ZERO };
            jx[i] = (plus + minus) * 0.5;
            jy[i] = (plus - minus) * i_half;
            jz[i] = c.data[i] * m;
        }
    }
    let ops = [&jx, &jy, &jz];
    let dot = |u: &[Complex64], v: &[Complex64]| -> Complex64 {
        u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
    };
    let mut mean = [0.0; 3];
    let mut sym = [[0.0; 3]; 3];
    for a in 0..3 {
        mean[a] = dot(&c.data, ops[a]).re;
        for b in a..3 {
            let v = dot(ops[a], ops[b]).re;
            sym[a][b] = v;
            sym[b][a] = v;
        }
    }
    CollectiveCorrelators { mean, sym }
}

/// Exchange-symmetric two-qubit state in the basis `{↑↑, ↑↓, ↓↑, ↓↓}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitRdm(pub Matrix4<Complex64>);

/// Pauli matrices `[1, σx, σy, σz]` in the `{↑, ↓}` basis.
pub fn paulis() -> [Matrix2<Complex64>; 4] {
    let o = ZERO;
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix2::new(l, o, o, l),
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

pub fn kron2(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

impl TwoQubitRdm {
    /// Checks the density-matrix invariants and returns the state.
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-10 {
            return Err(DickeError::Invariant {
                t: f64::NAN,
                what: format!("two-qubit matrix not Hermitian (deviation {herm:.3e})"),
            });
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(DickeError::Invariant {
                t: f64::NAN,
                what: format!("two-qubit matrix trace {trace}"),
            });
        }
        let rdm = Self(m);
        let min = rdm.eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -EIG_CLAMP {
            return Err(DickeError::NotPositive { min_eigenvalue: min });
        }
        Ok(rdm)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let e = SymmetricEigen::new(hermitize(&self.0)).eigenvalues;
        [e[0], e[1], e[2], e[3]]
    }

    /// `ρ` with the two qubits exchanged.
    pub fn swapped(&self) -> Matrix4<Complex64> {
        let perm = [0usize, 2, 1, 3];
        Matrix4::from_fn(|r, c| self.0[(perm[r], perm[c])])
    }
}

fn hermitize(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Pair state from collective correlators:
/// `ρ₂ = ¼ Σ_ab T_ab σ_a ⊗ σ_b` with `T_a0 = 2⟨J_a⟩/N` and
/// `T_ab = (4⟨{J_a,J_b}⟩/2 − N δ_ab) / (N(N−1))`.
pub fn two_qubit_rdm(corr: &CollectiveCorrelators, n_qubits: usize) -> Result<TwoQubitRdm> {
    if n_qubits < 2 {
        return Err(DickeError::InvalidParams(
            "two-qubit state needs at least two qubits".into(),
        ));
    }
    let n = n_qubits as f64;
    let mut t = [[0.0; 4]; 4];
    t[0][0] = 1.0;
    for a in 0..3 {
        t[a + 1][0] = 2.0 * corr.mean[a] / n;
        t[0][a + 1] = t[a + 1][0];
        for b in 0..3 {
            let same = if a == b { n } else { 0.0 };
            t[a + 1][b + 1] = (4.0 * corr.sym[a][b] - same) / (n * (n - 1.0));
        }
    }
    let s = paulis();
    let mut rho = Matrix4::zeros();
    for (a, row) in t.iter().enumerate() {
        for (b, &tab) in row.iter().enumerate() {
            if tab != 0.0 {
                rho += kron2(&s[a], &s[b]) * Complex64::new(0.25 * tab, 0.0);
            }
        }
    }
    TwoQubitRdm::new(rho)
}

/// Eigenvalues of `ρ` below this are rounding noise and are dropped before
/// taking the square root, where they would otherwise grow to `~1e-8`.
const SQRT_FLOOR: f64 = 1e-13;

/// Wootters concurrence `max(0, μ₁ − μ₂ − μ₃ − μ₄)`, with `μ` the
/// descending square roots of the spectrum of `ρ (σy⊗σy) ρ* (σy⊗σy)`.
pub fn concurrence(rho: &TwoQubitRdm) -> f64 {
    let s = paulis();
    let yy = kron2(&s[2], &s[2]);
    let m = hermitize(&rho.0);

    // μ are the singular values of √ρ (σy⊗σy) √ρ*, which avoids squaring
    let eig = SymmetricEigen::new(m);
    let sqrt_vals = eig.eigenvalues.map(|v| {
        let v = if v < SQRT_FLOOR { 0.0 } else { v };
        Complex64::new(v.sqrt(), 0.0)
    });
    let sqrt_rho = eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();
    let prod = sqrt_rho * yy * sqrt_rho.conjugate();
    let mut mu: Vec<f64> = prod.singular_values().iter().copied().collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    (mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0)
}

/// `ξ_Q² = 1 − (N−1) c_w`.
pub fn spin_squeezing(c_w: f64, n_qubits: usize) -> f64 {
    1.0 - (n_qubits as f64 - 1.0) * c_w
}

/// `(N−1) c_w > 1 + tol` cannot come from a symmetric state with the
/// squeezing/concurrence relation intact.
pub fn monogamy_violation(c_w: f64, n_qubits: usize) -> bool {
    (n_qubits as f64 - 1.0) * c_w > 1.0 + 1e-9
}

/// Descending Schmidt coefficients `S_α`, `α = 1..min(N+1, χ+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    squares: Vec<f64>,
}

impl SchmidtSpectrum {
    /// From descending squared coefficients.
    pub fn from_squares(mut squares: Vec<f64>) -> Self {
        squares.sort_by(|a, b| b.total_cmp(a));
        Self { squares }
    }

    pub fn coeffs(&self) -> Vec<f64> {
        self.squares.iter().map(|s| s.max(0.0).sqrt()).collect()
    }

    /// `S_α²`, descending; the reduced-density-matrix spectrum.
    pub fn squares(&self) -> &[f64] {
        &self.squares
    }

    pub fn rank(&self) -> usize {
        self.squares.len()
    }

    pub fn total(&self) -> f64 {
        self.squares.iter().sum()
    }

    /// `Σ S_α⁴`.
    pub fn purity(&self) -> f64 {
        self.squares.iter().map(|s| s * s).sum()
    }

    /// Von Neumann entropy of either reduced state, in nats.
    pub fn entropy(&self) -> f64 {
        -self
            .squares
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    pub fn leading(&self) -> (f64, f64) {
        (
            self.squares.first().copied().unwrap_or(0.0),
            self.squares.get(1).copied().unwrap_or(0.0),
        )
    }
}

pub fn schmidt_spectrum(c: &CoefficientMatrix) -> Result<SchmidtSpectrum> {
    let squares = svd::singular_values_squared(c.rows, c.cols, &c.data)?;
    Ok(SchmidtSpectrum { squares })
}

/// `Δ_S = |S₁² − S₂²|`.
pub fn schmidt_gap(s: &SchmidtSpectrum) -> f64 {
    let (s1, s2) = s.leading();
    (s1 - s2).abs()
}

/// `⟨a†a⟩ / (N/2)`.
pub fn order_parameter(photons: f64, n_qubits: usize) -> f64 {
    photons / (n_qubits as f64 / 2.0)
}

/// Every diagnostic at one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub populations: Populations,
    pub quadratures: QuadratureMoments,
    pub photons: f64,
    pub correlators: CollectiveCorrelators,
    /// `None` for a single qubit.
    pub concurrence: Option<f64>,
    pub spectrum: SchmidtSpectrum,
    pub norm: f64,
    pub parity: f64,
    pub boundary: f64,
}

impl Observation {
    pub fn boson_squeezing(&self) -> f64 {
        boson_squeezing(&self.quadratures)
    }

    pub fn schmidt_gap(&self) -> f64 {
        schmidt_gap(&self.spectrum)
    }
}

/// Computes every diagnostic of `amps`. Expectation values use the
/// normalized state; `norm` reports the raw norm.
pub fn observe(basis: &Basis, amps: &[Complex64]) -> Result<Observation> {
    let raw = CoefficientMatrix::from_amps(basis, amps)?;
    let norm = raw.frobenius_norm();
    let c = raw.normalized();
    let populations = subsystem_populations(&c);
    let fm = field_moments(&c);
    let correlators = collective_correlators(&c);
    let concurrence = if basis.n_qubits() >= 2 {
        Some(concurrence(&two_qubit_rdm(&correlators, basis.n_qubits())?))
    } else {
        None
    };
    let spectrum = schmidt_spectrum(&c)?;
    let parity = crate::state::parity_expectation(basis, amps);
    let boundary = populations.boson.last().copied().unwrap_or(0.0);
    Ok(Observation {
        populations,
        quadratures: quadratures_from(&fm),
        photons: fm.n,
        correlators,
        concurrence,
        spectrum,
        norm,
        parity,
        boundary,
    })
}
