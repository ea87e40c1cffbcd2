use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use udw_core::quadrature::{
    gk15_rule, integrate_1d, integrate_adaptive, integrate_cubature, integrate_mc, mc_estimate,
    nested_time_weight, McSettings, QuadError, QuadSettings,
};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn gk15_weights_integrate_constants() {
    let (_, wk, wg) = gk15_rule();
    assert!((wk.iter().sum::<f64>() - 2.0).abs() < 1e-15);
    assert!((wg.iter().sum::<f64>() - 2.0).abs() < 1e-15);
}

#[test]
fn gk_exact_on_polynomials_through_degree_22() {
    let s = QuadSettings::default();
    for deg in 0..=22 {
        let est = integrate_1d(|x| c(x.powi(deg)), 0.0, 1.0, &[], &s);
        let exact = 1.0 / (deg as f64 + 1.0);
        assert!(
            (est.value.re - exact).abs() < 1e-14,
            "degree {deg}: {}",
            est.value.re
        );
        assert!(est.converged);
    }
}

#[test]
fn gk_gaussian_gives_sqrt_pi() {
    let est = integrate_1d(
        |x| c((-x * x).exp()),
        -12.0,
        12.0,
        &[],
        &QuadSettings::default(),
    );
    assert!((est.value.re - PI.sqrt()).abs() < 1e-13);
    assert!(est.converged);
}

#[test]
fn gk_respects_breakpoints_at_kinks() {
    let s = QuadSettings::default();
    let est = integrate_1d(|x| c((x - 0.3).abs()), 0.0, 1.0, &[0.3], &s);
    assert!((est.value.re - (0.045 + 0.245)).abs() < 1e-14);
}

#[test]
fn gk_oscillatory_complex() {
    // ∫₀^∞ e^{-x} e^{ix} dx = 1/(1 - i)
    let est = integrate_1d(
        |x| Complex64::new(-x, x).exp(),
        0.0,
        60.0,
        &[],
        &QuadSettings::default(),
    );
    let exact = Complex64::new(0.5, 0.5);
    assert!((est.value - exact).norm() < 1e-12);
}

#[test]
fn cubature_gaussians_in_two_and_three_dimensions() {
    let s = QuadSettings {
        rel_tol: 1e-10,
        ..QuadSettings::default()
    };
    let two = integrate_cubature(
        |p| c((-p[0] * p[0] - p[1] * p[1]).exp()),
        &[-7.0, -7.0],
        &[7.0, 7.0],
        &s,
    );
    assert!((two.value.re - PI).abs() < 1e-9 * PI, "{two:?}");
    let three = integrate_cubature(
        |p| c((-p[0] * p[0] - 2.0 * p[1] * p[1] - 0.5 * p[2] * p[2]).exp()),
        &[-7.0; 3],
        &[7.0, 7.0, 9.0],
        &s,
    );
    let exact = PI.powf(1.5);
    assert!((three.value.re - exact).abs() < 1e-9 * exact, "{three:?}");
}

#[test]
fn cubature_exact_on_degree_seven() {
    let s = QuadSettings::default();
    let est = integrate_cubature(
        |p| c(p[0].powi(4) * p[1].powi(3) + p[1] * p[1]),
        &[0.0, 0.0],
        &[1.0, 2.0],
        &s,
    );
    let exact = 0.2 * 4.0 + 8.0 / 3.0;
    assert!((est.value.re - exact).abs() < 1e-13);
}

#[test]
fn adaptive_rejects_bad_domains() {
    let s = QuadSettings::default();
    let f = |_: &[f64]| c(1.0);
    assert_eq!(
        integrate_adaptive(f, &[], &[], &s),
        Err(QuadError::Dimension(0))
    );
    assert_eq!(
        integrate_adaptive(f, &[0.0; 4], &[1.0; 4], &s),
        Err(QuadError::Dimension(4))
    );
    assert_eq!(
        integrate_adaptive(f, &[0.0, 0.0], &[1.0, f64::INFINITY], &s),
        Err(QuadError::Domain(1))
    );
}

#[test]
fn monte_carlo_agrees_with_adaptive() {
    let f = |p: &[f64]| c((-p[0] * p[0] - p[1] * p[1]).exp() * (1.0 + p[0]).cos());
    let lower = [-3.0, -3.0];
    let upper = [3.0, 3.0];
    let adaptive = integrate_adaptive(f, &lower, &upper, &QuadSettings::default()).unwrap();
    let mc = integrate_mc(
        f,
        &lower,
        &upper,
        &McSettings {
            samples: 400_000,
            seed: 7,
        },
    );
    let z = (mc.value - adaptive.value).norm() / mc.err;
    assert!(z < 4.0, "z = {z}");
    assert!(mc.err < 0.01);
}

#[test]
fn monte_carlo_is_deterministic_per_seed() {
    let draw = |rng: &mut udw_core::quadrature::McRng| c(rng.random::<f64>());
    let a = mc_estimate(50_000, 11, draw);
    let b = mc_estimate(50_000, 11, draw);
    let other = mc_estimate(50_000, 12, draw);
    assert_eq!(a, b);
    assert_ne!(a.value, other.value);
    assert!((a.value.re - 0.5).abs() < 4.0 * a.err);
}

/// Direct 2D quadrature over (t, u = t - t') of the ordered double integral.
fn nested_by_quadrature(
    g1: f64,
    g2: f64,
    w1: f64,
    w2: f64,
    c1: f64,
    c2: f64,
    om: f64,
) -> Complex64 {
    let span = 8.0 * w1.max(w2);
    let lo_t = c1.min(c2) - span;
    let hi_t = c1.max(c2) + span;
    let f = |p: &[f64]| {
        let (t, u) = (p[0], p[1]);
        let tp = t - u;
        let env = (-(t - c1).powi(2) / (w1 * w1) - (tp - c2).powi(2) / (w2 * w2)).exp();
        Complex64::from_polar(env, g1 * t + g2 * tp - om * u)
    };
    let s = QuadSettings {
        rel_tol: 1e-11,
        ..QuadSettings::default()
    };
    integrate_cubature(f, &[lo_t, 0.0], &[hi_t, hi_t - lo_t], &s).value
}

#[test]
fn nested_time_weight_matches_double_integral() {
    for &(g1, g2, w1, w2, c1, c2, om) in &[
        (1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0),
        (1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 2.5),
        (0.5, 2.0, 0.7, 1.3, 0.4, -0.6, -1.2),
        (3.0, 0.0, 1.5, 0.5, -1.0, 1.0, 4.0),
    ] {
        let closed = nested_time_weight(g1, g2, w1, w2, c1, c2, om);
        let direct = nested_by_quadrature(g1, g2, w1, w2, c1, c2, om);
        assert!(
            (closed - direct).norm() <= 1e-8 * direct.norm().max(1e-3),
            "({g1},{g2},{w1},{w2},{c1},{c2},{om}): {closed} vs {direct}"
        );
    }
}

fn gaussian_ft(width: f64, centre: f64, a: f64) -> Complex64 {
    Complex64::from_polar(
        PI.sqrt() * width * (-a * a * width * width / 4.0).exp(),
        a * centre,
    )
}

#[test]
fn ordered_plus_reversed_is_unordered_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let g1 = rng.random_range(-3.0..3.0);
        let g2 = rng.random_range(-3.0..3.0);
        let w1 = rng.random_range(0.3..2.0);
        let w2 = rng.random_range(0.3..2.0);
        let c1 = rng.random_range(-2.0..2.0);
        let c2 = rng.random_range(-2.0..2.0);
        let om = rng.random_range(-6.0..6.0);
        let sum = nested_time_weight(g1, g2, w1, w2, c1, c2, om)
            + nested_time_weight(g2, g1, w2, w1, c2, c1, -om);
        let product = gaussian_ft(w1, c1, g1 - om) * gaussian_ft(w2, c2, g2 + om);
        let scale = product.norm().max(1e-12);
        assert!(
            (sum - product).norm() <= 1e-10 * scale.max(1.0),
            "{sum} vs {product}"
        );
    }
}

#[test]
fn nested_time_weight_is_finite_far_in_the_tail() {
    let v = nested_time_weight(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 200.0);
    assert!(v.re.is_finite() && v.im.is_finite());
    let v = nested_time_weight(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, -200.0);
    assert!(v.re.is_finite() && v.im.is_finite());
}

proptest! {
    #[test]
    fn gk_is_linear(a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let s = QuadSettings::default();
        let f = |x: f64| c((x * 1.3).sin());
        let g = |x: f64| c((-x * x).exp());
        let lhs = integrate_1d(|x| f(x) * a + g(x) * b, -2.0, 3.0, &[], &s).value;
        let rhs = integrate_1d(f, -2.0, 3.0, &[], &s).value * a + integrate_1d(g, -2.0, 3.0, &[], &s).value * b;
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn gk_interval_additivity(m in -1.0f64..2.0) {
        let s = QuadSettings::default();
        let f = |x: f64| c((x * 0.7).cos() * (-0.1 * x * x).exp());
        let whole = integrate_1d(f, -1.0, 2.0, &[], &s).value;
        let parts = integrate_1d(f, -1.0, m, &[], &s).value + integrate_1d(f, m, 2.0, &[], &s).value;
        prop_assert!((whole - parts).norm() < 1e-12);
    }
}
