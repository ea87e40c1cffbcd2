mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use udw_core::quadrature::{integrate_1d, integrate_cubature};
use udw_core::scenario::{smearing, smearing_ft, switching, switching_ft, validate};
use udw_core::{DetectorParams, Label, ModelKind, QuadSettings, Scenario};

#[test]
fn reference_is_valid_and_two_apart() {
    let s = Scenario::default();
    assert!(validate(&s).is_empty());
    assert_eq!(s.model, ModelKind::QuadraticReal);
    assert_eq!(s.separation(), 2.0);
    assert_eq!(s.epsilon, 0.01);
}

#[test]
fn validation_names_each_bad_field() {
    let mut s = Scenario::default();
    s.detector_a.sigma = -1.0;
    s.detector_b.width_t = 0.0;
    s.epsilon = 0.0;
    s.model = ModelKind::Bilinear(0);
    s.nascent_delta = Some(-0.5);
    s.quad.rel_tol = 0.0;
    let r = validate(&s);
    for needle in [
        "detector.A.sigma",
        "detector.B.T",
        "scenario.epsilon",
        "scenario.n",
        "scenario.nascent_delta",
        "quadrature.rel_tol",
    ] {
        assert!(r.contains(needle), "missing {needle}: {r}");
    }
    assert_eq!(r.issues.len(), 6);
}

#[test]
fn duplicate_labels_are_rejected() {
    let mut s = Scenario::default();
    s.detector_b.label = Label::A;
    assert!(validate(&s).contains("labels"));
}

#[test]
fn fingerprint_is_stable_and_parameter_sensitive() {
    let s = Scenario::default();
    assert_eq!(s.fingerprint(), Scenario::default().fingerprint());
    assert_eq!(s.fingerprint().len(), 16);
    assert_ne!(s.fingerprint(), s.with_epsilon(0.02).fingerprint());
    assert_ne!(
        s.fingerprint(),
        s.with_model(ModelKind::Linear).fingerprint()
    );
    let mut seeded = s;
    seeded.mc.seed += 1;
    assert_ne!(s.fingerprint(), seeded.fingerprint());
}

fn detector(sigma: f64, t: f64, x: [f64; 3], tc: f64) -> DetectorParams {
    DetectorParams {
        sigma,
        width_t: t,
        center_x: x,
        center_t: tc,
        ..DetectorParams::new(Label::A)
    }
}

#[test]
fn smearing_is_normalized() {
    let d = detector(0.8, 1.0, [0.3, -0.2, 1.0], 0.0);
    let s = QuadSettings::default();
    let lo: Vec<f64> = d.center_x.iter().map(|c| c - 7.0).collect();
    let hi: Vec<f64> = d.center_x.iter().map(|c| c + 7.0).collect();
    let est = integrate_cubature(
        |p| Complex64::new(smearing(&d, [p[0], p[1], p[2]]), 0.0),
        &lo,
        &hi,
        &s,
    );
    assert!((est.value.re - 1.0).abs() < 1e-8, "{est:?}");
}

#[test]
fn switching_peaks_at_one() {
    let d = detector(1.0, 0.7, [0.0; 3], 1.5);
    assert_eq!(switching(&d, 1.5), 1.0);
    assert!((switching(&d, 2.2) - (-1.0f64).exp()).abs() < 1e-15);
}

#[test]
fn switching_ft_matches_direct_transform() {
    let s = QuadSettings::default();
    for &(t, tc, om) in &[(1.0, 0.0, 0.0), (0.7, 1.5, 2.0), (1.3, -0.4, -3.1)] {
        let d = detector(1.0, t, [0.0; 3], tc);
        let est = integrate_1d(
            |x| Complex64::from_polar(switching(&d, x), om * x),
            tc - 10.0 * t,
            tc + 10.0 * t,
            &[],
            &s,
        );
        assert!(common::rel(est.value, switching_ft(&d, om)) < 1e-10);
    }
}

#[test]
fn smearing_ft_along_axis_matches_direct_transform() {
    // Off-axis coordinates factor out; check the x-axis factor by 1D quadrature.
    let d = detector(0.9, 1.0, [0.4, 0.0, 0.0], 0.0);
    let k = 1.7;
    let s = QuadSettings::default();
    let one_d = integrate_1d(
        |x| {
            Complex64::from_polar(
                (PI * 0.81).powf(-0.5) * (-(x - 0.4f64).powi(2) / 0.81).exp(),
                -k * x,
            )
        },
        -10.0,
        10.0,
        &[],
        &s,
    );
    assert!(common::rel(one_d.value, smearing_ft(&d, [k, 0.0, 0.0])) < 1e-10);
}

proptest! {
    #[test]
    fn smearing_ft_is_one_at_zero_momentum(sigma in 0.1f64..5.0, x in -5.0f64..5.0) {
        let d = detector(sigma, 1.0, [x, -x, 0.5 * x], 0.0);
        let v = smearing_ft(&d, [0.0; 3]);
        prop_assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn smearing_ft_modulus_is_translation_free(sigma in 0.1f64..3.0, x in -5.0f64..5.0, k in 0.0f64..4.0) {
        let a = smearing_ft(&detector(sigma, 1.0, [0.0; 3], 0.0), [k, 0.2, 0.0]).norm();
        let b = smearing_ft(&detector(sigma, 1.0, [x, 1.0, -x], 0.0), [k, 0.2, 0.0]).norm();
        prop_assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn positive_widths_validate(sigma in 1e-3f64..10.0, t in 1e-3f64..10.0, eps in 1e-6f64..1.0) {
        let mut s = Scenario::default().with_epsilon(eps);
        s.detector_a.sigma = sigma;
        s.detector_b.width_t = t;
        prop_assert!(validate(&s).is_empty());
    }
}
