use std::sync::Arc;

use dicke::basis::{Basis, ModelParams, Sector};
use dicke::hamiltonian::DickeHamiltonian;
use dicke::integrator::{evolve, IntegratorSettings};
use dicke::pipeline::{simulate, Capture};
use dicke::ramp::RampProtocol;
use dicke::state::{self, StateVector};
use num_complex::Complex64;

fn trajectory(basis: &Arc<Basis>, protocol: &RampProtocol, settings: &IntegratorSettings) -> Vec<Vec<Complex64>> {
    let ham = DickeHamiltonian::new(basis.clone());
    let psi0 = StateVector::initial(basis.clone());
    let mut out = Vec::new();
    evolve(&ham, psi0.amps(), protocol, settings, |s| {
        out.push(s.amps.to_vec());
        Ok(())
    })
    .unwrap();
    out
}

#[test]
fn even_sector_matches_full_product_evolution() {
    let params = ModelParams::resonant(4, 12);
    let even = Arc::new(Basis::build(params.clone()).unwrap());
    let full = Arc::new(Basis::build(params.with_sector(Sector::FullProduct)).unwrap());
    let protocol = RampProtocol::from_gamma(-3.0).unwrap();
    let settings = IntegratorSettings {
        sample_count: 61,
        ..IntegratorSettings::default()
    };
    let a = trajectory(&even, &protocol, &settings);
    let b = trajectory(&full, &protocol, &settings);
    let mut worst: f64 = 0.0;
    let mut odd_weight: f64 = 0.0;
    for (x, y) in a.iter().zip(&b) {
        for (i, s) in full.states().iter().enumerate() {
            match even.index_of(s.two_mz, s.n) {
                Some(j) => worst = worst.max((x[j] - y[i]).norm()),
                None => odd_weight = odd_weight.max(y[i].norm()),
            }
        }
    }
    assert!(worst < 1e-8, "component mismatch {worst:e}");
    assert!(odd_weight < 1e-12, "odd-sector leakage {odd_weight:e}");
}

#[test]
fn parity_is_conserved_in_full_product_sector() {
    let full = Arc::new(Basis::build(ModelParams::resonant(5, 16).with_sector(Sector::FullProduct)).unwrap());
    let protocol = RampProtocol::from_gamma(-2.0).unwrap();
    let settings = IntegratorSettings {
        sample_count: 81,
        ..IntegratorSettings::default()
    };
    for amps in trajectory(&full, &protocol, &settings) {
        let p = state::parity_expectation(&full, &amps);
        assert!((p - 1.0).abs() < 1e-8, "parity {p}");
    }
}

#[test]
fn slow_sweep_follows_the_ground_state() {
    let basis = Arc::new(Basis::build(ModelParams::resonant(8, 20)).unwrap());
    let ham = DickeHamiltonian::new(basis.clone());
    let protocol = RampProtocol::from_gamma(-14.0).unwrap();
    // coarse step with renormalization keeps the 2^15 time units cheap
    let settings = IntegratorSettings {
        step: Some(0.02),
        renormalize: true,
        sample_count: 101,
        ..IntegratorSettings::default()
    };
    let tau = protocol.tau().unwrap();
    let mut worst: f64 = 1.0;
    let mut checked = 0;
    evolve(&ham, StateVector::initial(basis.clone()).amps(), &protocol, &settings, |s| {
        if s.t <= tau * (1.0 + 1e-12) {
            let (_, gs) = ham.ground_state(s.lambda)?;
            let psi = StateVector::from_amps(basis.clone(), s.amps.to_vec())?;
            let overlap = gs.inner(&psi).norm_sqr() / psi.norm().powi(2);
            worst = worst.min(overlap);
            checked += 1;
        }
        Ok(())
    })
    .unwrap();
    assert_eq!(checked, 51);
    assert!(worst >= 0.99, "minimum ground-state overlap {worst}");
}

#[test]
fn near_adiabatic_populations_mirror_the_turning_point() {
    let protocol = RampProtocol::from_gamma(-10.0).unwrap();
    let settings = IntegratorSettings {
        sample_count: 201,
        ..IntegratorSettings::default()
    };
    let t = simulate(&ModelParams::resonant(8, 24), &protocol, &settings, &Capture::default()).unwrap();
    let s = t.records.len();
    let tv = |x: &[f64], y: &[f64]| 0.5 * x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum::<f64>();
    for i in 0..s / 2 {
        let j = s - 1 - i;
        assert!((t.records[i].lambda - t.records[j].lambda).abs() < 1e-12);
        let dq = tv(&t.qubit_populations[i], &t.qubit_populations[j]);
        let db = tv(&t.boson_populations[i], &t.boson_populations[j]);
        assert!(dq <= 0.05 && db <= 0.05, "lambda {}: {dq} {db}", t.records[i].lambda);
    }
}
