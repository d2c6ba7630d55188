//! Brute-force reference in the full `2^N ⊗ Fock` space for small `N`.
//!
//! Qubits are explicit bits (bit set = `↑`), `J_α = ½ Σ σ_α^(i)`, and every
//! observable is taken by dense methods: partial traces, explicit field
//! operators, and a library SVD. Nothing here reuses the Dicke-manifold
//! ladder algebra of the main path.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{DickeError, Result};
use crate::integrator::{self, Generator, IntegratorSettings, Sample, TrajectorySummary};
use crate::observables::{self, SchmidtSpectrum, TwoQubitRdm};
use crate::ramp::RampProtocol;

pub const MAX_QUBITS: usize = 5;
pub const MAX_FOCK_CUT: usize = 32;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn guard(n_qubits: usize, fock_cut: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS || fock_cut > MAX_FOCK_CUT {
        return Err(DickeError::DimensionGuard {
            dim: (1usize << n_qubits.min(30)) * (fock_cut + 1),
            limit: (1 << MAX_QUBITS) * (MAX_FOCK_CUT + 1),
        });
    }
    Ok(())
}

/// Resonance-free parameters of the full-space model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullSpaceModel {
    pub n_qubits: usize,
    pub fock_cut: usize,
    pub qubit_freq: f64,
    pub field_freq: f64,
}

impl FullSpaceModel {
    pub fn new(n_qubits: usize, fock_cut: usize, qubit_freq: f64, field_freq: f64) -> Result<Self> {
        guard(n_qubits, fock_cut)?;
        Ok(Self {
            n_qubits,
            fock_cut,
            qubit_freq,
            field_freq,
        })
    }

    pub fn resonant(n_qubits: usize, fock_cut: usize) -> Result<Self> {
        Self::new(n_qubits, fock_cut, 1.0, 1.0)
    }

    pub fn configs(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn field_dim(&self) -> usize {
        self.fock_cut + 1
    }

    pub fn dim(&self) -> usize {
        self.configs() * self.field_dim()
    }

    fn index(&self, config: usize, n: usize) -> usize {
        config * self.field_dim() + n
    }
}

impl Generator for FullSpaceModel {
    fn dim(&self) -> usize {
        FullSpaceModel::dim(self)
    }

    fn apply(&self, lambda: f64, x: &[Complex64], out: &mut [Complex64]) {
        let nq = self.n_qubits;
        let fd = self.field_dim();
        let g = lambda / (nq as f64).sqrt();
        for config in 0..self.configs() {
            let mz = config.count_ones() as f64 - nq as f64 / 2.0;
            for n in 0..fd {
                let i = self.index(config, n);
                let mut acc = x[i] * (self.qubit_freq * mz + self.field_freq * n as f64);
                if g != 0.0 {
                    // (2λ/√N)·½Σσx·(a + a†): flip each qubit, move one photon
                    for q in 0..nq {
                        let flipped = config ^ (1 << q);
                        if n > 0 {
                            acc += x[self.index(flipped, n - 1)] * (g * (n as f64).sqrt());
                        }
                        if n + 1 < fd {
                            acc += x[self.index(flipped, n + 1)] * (g * ((n + 1) as f64).sqrt());
                        }
                    }
                }
                out[i] = acc;
            }
        }
    }
}

/// Amplitudes over `config · (χ+1) + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullSpaceState {
    pub model: FullSpaceModel,
    pub amps: Vec<Complex64>,
}

impl FullSpaceState {
    /// All qubits down, field in vacuum.
    pub fn initial(model: FullSpaceModel) -> Self {
        let mut amps = vec![ZERO; model.dim()];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { model, amps }
    }

    pub fn from_amps(model: FullSpaceModel, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != model.dim() {
            return Err(DickeError::BasisMismatch {
                expected: model.dim(),
                got: amps.len(),
            });
        }
        Ok(Self { model, amps })
    }

    pub fn norm(&self) -> f64 {
        crate::state::norm(&self.amps)
    }

    /// `2^N × (χ+1)` coefficient matrix.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.model.configs(), self.model.field_dim(), &self.amps)
    }

    /// Weight of the state inside the `J = N/2` sector, via the spectral
    /// projector of a dense `J²`.
    pub fn symmetric_weight(&self) -> f64 {
        let projector = symmetric_projector(self.model.n_qubits);
        let m = self.matrix();
        (&projector * &m).iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Dense `J_α = ½ Σ σ_α^(i)` on `2^N` configurations, `α ∈ {x, y, z}`.
pub fn collective_operator(n_qubits: usize, axis: usize) -> DMatrix<Complex64> {
    let d = 1usize << n_qubits;
    let mut m = DMatrix::from_element(d, d, ZERO);
    for config in 0..d {
        for q in 0..n_qubits {
            let up = config >> q & 1 == 1;
            match axis {
                0 => m[(config ^ (1 << q), config)] += Complex64::new(0.5, 0.0),
                // σy|↑> = i|↓>, σy|↓> = −i|↑>
                1 => {
                    let v = if up { Complex64::new(0.0, 0.5) } else { Complex64::new(0.0, -0.5) };
                    m[(config ^ (1 << q), config)] += v;
                }
                _ => m[(config, config)] += Complex64::new(if up { 0.5 } else { -0.5 }, 0.0),
            }
        }
    }
    m
}

/// Projector onto `J = N/2` from the eigendecomposition of `J²`.
pub fn symmetric_projector(n_qubits: usize) -> DMatrix<Complex64> {
    let j = n_qubits as f64 / 2.0;
    let j2 = (0..3)
        .map(|a| {
            let op = collective_operator(n_qubits, a);
            &op * &op
        })
        .fold(DMatrix::from_element(1 << n_qubits, 1 << n_qubits, ZERO), |acc, m| acc + m);
    let eig = SymmetricEigen::new(j2);
    let d = 1usize << n_qubits;
    let mut p = DMatrix::from_element(d, d, ZERO);
    for (k, &val) in eig.eigenvalues.iter().enumerate() {
        if (val - j * (j + 1.0)).abs() < 1e-8 {
            let v = eig.eigenvectors.column(k);
            p += &v * v.adjoint();
        }
    }
    p
}

/// Evolves `⊗|↓⟩ ⊗ |0⟩` in the full space with the shared sink interface.
pub fn full_evolve<F>(
    model: &FullSpaceModel,
    protocol: &RampProtocol,
    settings: &IntegratorSettings,
    sink: F,
) -> Result<TrajectorySummary>
where
    F: FnMut(Sample<'_>) -> Result<()>,
{
    guard(model.n_qubits, model.fock_cut)?;
    let psi0 = FullSpaceState::initial(*model);
    integrator::evolve(model, &psi0.amps, protocol, settings, sink)
}

/// Reduced state of qubits 0 and 1 by explicit trace over the field and
/// the remaining qubits, basis `{↑↑, ↑↓, ↓↑, ↓↓}`.
pub fn partial_trace_pair(state: &FullSpaceState) -> Result<TwoQubitRdm> {
    let model = state.model;
    if model.n_qubits < 2 {
        return Err(DickeError::InvalidParams("pair trace needs two qubits".into()));
    }
    guard(model.n_qubits, model.fock_cut)?;
    let norm2 = state.norm().powi(2);
    let fd = model.field_dim();
    let rest = model.configs() >> 2;
    // pair index: qubit 0 is the first factor; ↑ (bit 1) is index 0
    let pair_index = |b0: usize, b1: usize| (1 - b0) * 2 + (1 - b1);
    let mut rho = Matrix4::<Complex64>::zeros();
    for r in 0..rest {
        for n in 0..fd {
            for a in 0..4usize {
                let (a0, a1) = (a & 1, a >> 1 & 1);
                let ca = (r << 2) | a;
                let amp_a = state.amps[model.index(ca, n)];
                if amp_a == ZERO {
                    continue;
                }
                for b in 0..4usize {
                    let (b0, b1) = (b & 1, b >> 1 & 1);
                    let cb = (r << 2) | b;
                    let amp_b = state.amps[model.index(cb, n)];
                    rho[(pair_index(a0, a1), pair_index(b0, b1))] += amp_a * amp_b.conj() / norm2;
                }
            }
        }
    }
    TwoQubitRdm::new(rho)
}

/// Singular values of the `2^N × (χ+1)` coefficient matrix by library SVD.
pub fn schmidt_direct(state: &FullSpaceState) -> Result<SchmidtSpectrum> {
    guard(state.model.n_qubits, state.model.fock_cut)?;
    let m = state.matrix() / Complex64::new(state.norm(), 0.0);
    let squares = m.singular_values().iter().map(|s| s * s).collect();
    Ok(SchmidtSpectrum::from_squares(squares))
}

/// Amplitudes on the Dicke states `|J, m_z⟩ ⊗ |n⟩`, in the lexicographic
/// `(m_z, n)` order of a full-product [`crate::basis::Basis`].
pub fn dicke_components(state: &FullSpaceState) -> Vec<Vec<Complex64>> {
    let model = state.model;
    let nq = model.n_qubits;
    let fd = model.field_dim();
    let mut out = vec![vec![ZERO; fd]; nq + 1];
    for config in 0..model.configs() {
        let k = config.count_ones() as usize;
        let w = 1.0 / (binomial(nq, k) as f64).sqrt();
        for n in 0..fd {
            out[k][n] += state.amps[model.index(config, n)] * w;
        }
    }
    out
}

/// Inverse of [`dicke_components`]: spreads `coeffs[k][n]` over every
/// configuration with `k` excited qubits.
pub fn embed_dicke(model: FullSpaceModel, coeffs: &[Vec<Complex64>]) -> Result<FullSpaceState> {
    guard(model.n_qubits, model.fock_cut)?;
    if coeffs.len() != model.n_qubits + 1 || coeffs.iter().any(|r| r.len() != model.field_dim()) {
        return Err(DickeError::BasisMismatch {
            expected: (model.n_qubits + 1) * model.field_dim(),
            got: coeffs.iter().map(Vec::len).sum(),
        });
    }
    let mut amps = vec![ZERO; model.dim()];
    for config in 0..model.configs() {
        let k = config.count_ones() as usize;
        let w = 1.0 / (binomial(model.n_qubits, k) as f64).sqrt();
        for n in 0..model.field_dim() {
            amps[model.index(config, n)] = coeffs[k][n] * w;
        }
    }
    FullSpaceState::from_amps(model, amps)
}

/// Full-space image of a symmetric-sector state.
pub fn embed(c: &observables::CoefficientMatrix, qubit_freq: f64, field_freq: f64) -> Result<FullSpaceState> {
    let model = FullSpaceModel::new(c.rows() - 1, c.cols() - 1, qubit_freq, field_freq)?;
    let coeffs: Vec<Vec<Complex64>> = (0..c.rows())
        .map(|k| (0..c.cols()).map(|n| c.get(k, n)).collect())
        .collect();
    embed_dicke(model, &coeffs)
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// Every record-level diagnostic of a full-space state by dense routes.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleObservation {
    pub qubit_populations: Vec<f64>,
    pub boson_populations: Vec<f64>,
    pub photons: f64,
    pub jz: f64,
    pub boson_squeezing: f64,
    pub concurrence: f64,
    pub spin_squeezing: f64,
    pub spectrum: SchmidtSpectrum,
    pub schmidt_gap: f64,
}

pub fn observe(state: &FullSpaceState) -> Result<OracleObservation> {
    let model = state.model;
    let norm2 = state.norm().powi(2);
    let m = state.matrix() / Complex64::new(norm2.sqrt(), 0.0);
    let fd = model.field_dim();

    let mut qubit_populations = vec![0.0; model.n_qubits + 1];
    for config in 0..model.configs() {
        let k = config.count_ones() as usize;
        qubit_populations[k] += m.row(config).iter().map(|a| a.norm_sqr()).sum::<f64>();
    }
    let jz = qubit_populations
        .iter()
        .enumerate()
        .map(|(k, p)| (k as f64 - model.n_qubits as f64 / 2.0) * p)
        .sum();

    // field reduced state ρ_B[n, n'] = Σ_c C[c, n] C*[c, n']
    let rho_b = m.transpose() * m.conjugate();
    let boson_populations: Vec<f64> = (0..fd).map(|n| rho_b[(n, n)].re).collect();
    let a = DMatrix::from_fn(fd, fd, |r, c| {
        if c == r + 1 {
            Complex64::new((c as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let ad = a.adjoint();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &ad) * Complex64::new(h, 0.0);
    let p = (&ad - &a) * Complex64::new(0.0, h);
    let expect = |op: &DMatrix<Complex64>| (&rho_b * op).trace().re;
    // x² and p² via the infinite-space identities aa† = a†a + 1 so the
    // truncated top level does not bias the variance
    let num = &ad * &a;
    let photons = expect(&num);
    let a2 = &a * &a;
    let ea2 = (&rho_b * &a2).trace();
    let (ex, ep) = (expect(&x), expect(&p));
    let var_x = ea2.re + photons + 0.5 - ex * ex;
    let var_p = -ea2.re + photons + 0.5 - ep * ep;
    let cov = ea2.im - ex * ep;
    let moments = observables::QuadratureMoments {
        mean_x: ex,
        mean_p: ep,
        var_x,
        var_p,
        cov_xp: cov,
    };
    let boson_squeezing = observables::boson_squeezing(&moments);

    let concurrence = if model.n_qubits >= 2 {
        observables::concurrence(&partial_trace_pair(state)?)
    } else {
        f64::NAN
    };
    let spectrum = schmidt_direct(state)?;
    let schmidt_gap = observables::schmidt_gap(&spectrum);
    Ok(OracleObservation {
        qubit_populations,
        boson_populations,
        photons,
        jz,
        boson_squeezing,
        concurrence,
        spin_squeezing: observables::spin_squeezing(concurrence, model.n_qubits),
        spectrum,
        schmidt_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{Basis, ModelParams};
    use crate::observables::{collective_correlators, two_qubit_rdm, CoefficientMatrix};
    use crate::state::StateVector;
    use std::sync::Arc;

    #[test]
    fn guard_rejects_large_systems() {
        assert!(FullSpaceModel::resonant(6, 4).is_err());
        assert!(FullSpaceModel::resonant(3, 33).is_err());
        assert!(FullSpaceModel::resonant(5, 32).is_ok());
    }

    #[test]
    fn stationary_without_coupling() {
        let model = FullSpaceModel::resonant(2, 4).unwrap();
        let protocol = RampProtocol::constant(0.0, 3.0).unwrap();
        let settings = IntegratorSettings {
            sample_count: 4,
            ..Default::default()
        };
        full_evolve(&model, &protocol, &settings, |s| {
            assert!((s.amps[0].norm() - 1.0).abs() < 1e-12);
            assert!(s.amps[1..].iter().all(|a| a.norm() == 0.0));
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn initial_pair_state_and_spectrum() {
        let model = FullSpaceModel::resonant(3, 3).unwrap();
        let psi = FullSpaceState::initial(model);
        let rho = partial_trace_pair(&psi).unwrap();
        assert_eq!(rho.matrix()[(3, 3)], Complex64::new(1.0, 0.0));
        assert_eq!(rho.matrix().iter().filter(|a| a.norm() > 0.0).count(), 1);
        let s = schmidt_direct(&psi).unwrap();
        assert_eq!(s.squares()[0], 1.0);
        assert!(s.squares()[1..].iter().all(|&x| x == 0.0));
    }

    fn w_state() -> FullSpaceState {
        let model = FullSpaceModel::resonant(3, 2).unwrap();
        let mut amps = vec![ZERO; model.dim()];
        let w = 1.0 / 3f64.sqrt();
        for q in 0..3 {
            amps[model.index(1 << q, 0)] = Complex64::new(w, 0.0);
        }
        FullSpaceState::from_amps(model, amps).unwrap()
    }

    #[test]
    fn w_state_pair_and_concurrence() {
        let rho = partial_trace_pair(&w_state()).unwrap();
        // (|↑↓> + |↓↑>)(h.c.)/3 + |↓↓><↓↓|/3
        let third = Complex64::new(1.0 / 3.0, 0.0);
        let m = rho.matrix();
        for (r, c) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 3)] {
            assert!((m[(r, c)] - third).norm() < 1e-15);
        }
        assert!(m[(0, 0)].norm() < 1e-15);
        assert!((observables::concurrence(&rho) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn correlator_route_matches_w_state_trace() {
        let b = Arc::new(Basis::build(ModelParams::resonant(3, 2)).unwrap());
        // W state = |m_z = −1/2⟩; pair it with n = 1 to sit in the even sector
        let psi = StateVector::basis_state(b, -1, 1).unwrap();
        let rho = two_qubit_rdm(&collective_correlators(&CoefficientMatrix::from_state(&psi)), 3).unwrap();
        let oracle = partial_trace_pair(&w_state()).unwrap();
        assert!((rho.matrix() - oracle.matrix()).iter().all(|d| d.norm() < 1e-14));
        assert!((observables::concurrence(&rho) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_inverts_dicke_components() {
        let model = FullSpaceModel::resonant(4, 3).unwrap();
        let coeffs: Vec<Vec<Complex64>> = (0..5)
            .map(|k| (0..4).map(|n| Complex64::new(k as f64 - 1.5, n as f64 * 0.3)).collect())
            .collect();
        let state = embed_dicke(model, &coeffs).unwrap();
        let back = dicke_components(&state);
        for (a, b) in back.iter().flatten().zip(coeffs.iter().flatten()) {
            assert!((a - b).norm() < 1e-14);
        }
        let norm2: f64 = coeffs.iter().flatten().map(|z| z.norm_sqr()).sum();
        assert!((state.norm().powi(2) - norm2).abs() < 1e-12);
        assert!(embed_dicke(model, &coeffs[..4]).is_err());
    }

    #[test]
    fn dense_collective_operators_close_algebra() {
        // [J_x, J_y] = i J_z
        let jx = collective_operator(3, 0);
        let jy = collective_operator(3, 1);
        let jz = collective_operator(3, 2);
        let comm = &jx * &jy - &jy * &jx;
        let diff = comm - jz * Complex64::new(0.0, 1.0);
        assert!(diff.iter().all(|d| d.norm() < 1e-14));
        let p = symmetric_projector(3);
        assert!((p.trace().re - 4.0).abs() < 1e-10);
    }

    #[test]
    fn evolution_stays_in_dicke_manifold() {
        let model = FullSpaceModel::resonant(3, 10).unwrap();
        let protocol = RampProtocol::from_gamma(-1.0).unwrap();
        let settings = IntegratorSettings {
            sample_count: 5,
            ..Default::default()
        };
        full_evolve(&model, &protocol, &settings, |s| {
            let st = FullSpaceState::from_amps(model, s.amps.to_vec())?;
            let w = st.symmetric_weight() / st.norm().powi(2);
            assert!((w - 1.0).abs() < 1e-10);
            let spec = schmidt_direct(&st)?;
            assert!(spec.squares().iter().filter(|&&x| x > 1e-24).count() <= 4);
            Ok(())
        })
        .unwrap();
    }
}
