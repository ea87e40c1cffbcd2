//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use udw_core::quadrature::{integrate_1d, QuadSettings};
use udw_core::{Label, ModelKind, Scenario};

/// W_ε(Δt, r) from its mode sum, reduced to one radial integral:
/// (1/4π²r) ∫₀^∞ dk sin(kr) e^{−k(ε + iΔt)}.
pub fn radial_wightman(dt: f64, r: f64, eps: f64) -> Complex64 {
    let k_max = 45.0 / eps;
    let breaks: Vec<f64> = (1..400).map(|j| k_max * j as f64 / 400.0).collect();
    let settings = QuadSettings {
        rel_tol: 1e-12,
        max_evals: 5_000_000,
        ..QuadSettings::default()
    };
    let radial = |k: f64| if r == 0.0 { k } else { (k * r).sin() / r };
    let est = integrate_1d(
        |k| Complex64::from_polar(radial(k) * (-eps * k).exp(), -k * dt),
        0.0,
        k_max,
        &breaks,
        &settings,
    );
    est.value / (4.0 * PI * PI)
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// A perturbative scenario with every detector parameter drawn at random.
pub fn random_scenario(seed: u64, model: ModelKind) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scn = Scenario::reference(model);
    for label in [Label::A, Label::B] {
        let d = scn.detector_mut(label);
        d.lambda = rng.random_range(0.3..1.0);
        d.gap = rng.random_range(0.0..3.0);
        d.sigma = rng.random_range(0.5..1.5);
        d.width_t = rng.random_range(0.6..1.5);
        d.center_t = rng.random_range(-0.5..0.5);
    }
    scn.detector_a.center_x = [
        rng.random_range(-0.5..0.5),
        rng.random_range(-0.5..0.5),
        0.0,
    ];
    scn.detector_b.center_x = [
        rng.random_range(1.0..3.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    ];
    scn.epsilon = rng.random_range(0.01..0.1);
    scn
}

pub const REFERENCE_TOML: &str = r#"
[scenario]
model = "quadratic_real"
epsilon = 0.01

[detector.A]
lambda = 1.0
gap = 1.0
center = [0.0, 0.0, 0.0]
switch_center = 0.0
sigma = 1.0
T = 1.0

[detector.B]
lambda = 1.0
gap = 1.0
center = [2.0, 0.0, 0.0]
switch_center = 0.0
sigma = 1.0
T = 1.0
"#;
