use num_complex::Complex64;
use proptest::prelude::*;
use udw_core::wick::{
    commutator_checks, fourpoint_complex, mode_sum_two_point, random_point, spherical_grid,
    two_point, wick_check_complex, wick_check_fourpoint, wick_check_real, SpacetimePoint,
    TruncatedModeSet, WickError, WICK_TOL,
};
use udw_core::wightman::{wightman_eval, WightmanKernel};

#[test]
fn all_identities_hold_on_fifty_random_sets() {
    for seed in 0..50 {
        let modes = TruncatedModeSet::random(1 + (seed as usize % 8), seed).unwrap();
        let p1 = random_point(seed, 1);
        let p2 = random_point(seed, 2);
        for r in [
            wick_check_real(&modes, &p1, &p2),
            wick_check_complex(&modes, &p1, &p2),
            wick_check_fourpoint(&modes, &p1, &p2),
        ] {
            assert!(r.pass, "seed {seed}: {} off by {}", r.identity, r.abs_err);
            assert!(
                r.lhs.norm() > 1e3 * WICK_TOL,
                "seed {seed}: trivial check {}: {}",
                r.identity,
                r.lhs
            );
        }
        for r in commutator_checks(&modes, &p1, &p2) {
            assert!(r.pass, "seed {seed}: {} off by {}", r.identity, r.abs_err);
        }
    }
}

#[test]
fn single_mode_hand_algebra() {
    let modes = TruncatedModeSet::new(vec![[0.3, -0.4, 1.2]], vec![1.7], 2, 0.2).unwrap();
    let p = SpacetimePoint::new(0.4, [0.1, 0.2, -0.3]);
    let c = two_point(&modes, &p, &p);
    // one mode, p1 = p2: ⟨ΦΦ†ΦΦ†⟩ = C₂₃C₁₄ + C₁₂C₃₄ = 2C²
    assert!((fourpoint_complex(&modes, &p, &p) - 2.0 * c * c).norm() < WICK_TOL);
    let real = wick_check_real(&modes, &p, &p);
    let complex = wick_check_complex(&modes, &p, &p);
    assert!(real.pass && complex.pass);
    assert!((real.lhs / complex.lhs - 2.0).norm() < 1e-12);
}

#[test]
fn real_to_complex_ratio_is_two_on_shared_geometry() {
    for seed in 100..110 {
        let modes = TruncatedModeSet::random(4, seed).unwrap();
        let (p1, p2) = (random_point(seed, 1), random_point(seed, 2));
        let ratio =
            wick_check_real(&modes, &p1, &p2).lhs / wick_check_complex(&modes, &p1, &p2).lhs;
        assert!((ratio - 2.0).norm() < 1e-10, "{ratio}");
    }
}

#[test]
fn empty_mode_set_gives_zero() {
    let modes = TruncatedModeSet::new(vec![], vec![], 2, 0.1).unwrap();
    let p = SpacetimePoint::new(0.0, [0.0; 3]);
    assert_eq!(fourpoint_complex(&modes, &p, &p), Complex64::new(0.0, 0.0));
    assert!(wick_check_complex(&modes, &p, &p).pass);
}

#[test]
fn mode_set_invariants() {
    assert_eq!(
        TruncatedModeSet::random(9, 0).unwrap_err(),
        WickError::ModeCount(9)
    );
    assert_eq!(
        TruncatedModeSet::new(vec![[1.0, 0.0, 0.0]], vec![1.0], 1, 0.1).unwrap_err(),
        WickError::Cutoff(1)
    );
    assert_eq!(
        TruncatedModeSet::new(vec![[1.0, 0.0, 0.0]], vec![], 2, 0.1).unwrap_err(),
        WickError::Shape
    );
    assert_eq!(
        TruncatedModeSet::new(vec![[0.0; 3]], vec![1.0], 2, 0.1).unwrap_err(),
        WickError::Mode
    );
    assert_eq!(
        TruncatedModeSet::new(vec![[1.0, 0.0, 0.0]], vec![1.0], 2, 0.0).unwrap_err(),
        WickError::Epsilon
    );
}

#[test]
fn refined_mode_grids_approach_the_continuum_kernel() {
    let eps = 0.5;
    let p1 = SpacetimePoint::new(0.7, [0.0, 0.0, 1.1]);
    let p2 = SpacetimePoint::new(0.0, [0.0, 0.0, 0.0]);
    let exact = wightman_eval(&WightmanKernel::new(eps).unwrap(), 0.7, 1.1).unwrap();
    let errs: Vec<f64> = [(100, 50), (200, 100), (400, 200), (800, 400)]
        .iter()
        .map(|&(nk, nc)| {
            let (k, w) = spherical_grid(70.0, nk, nc);
            (mode_sum_two_point(&k, &w, eps, &p1, &p2) - exact).norm() / exact.norm()
        })
        .collect();
    // midpoint rule: each halving of the spacing quarters the error
    for w in errs.windows(2) {
        assert!((3.5..4.5).contains(&(w[0] / w[1])), "{errs:?}");
    }
    assert!(errs[3] < 1e-3, "{errs:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identities_hold_for_arbitrary_weights(
        n in 1usize..5,
        seed in 0u64..1000,
        scale in 0.01f64..10.0,
    ) {
        let base = TruncatedModeSet::random(n, seed).unwrap();
        let momenta: Vec<[f64; 3]> = (0..n).map(|j| {
            let p = random_point(seed, 10 + j as u64);
            [p.x[0] + 0.1, p.x[1], p.x[2]]
        }).collect();
        let weights: Vec<f64> = (0..n).map(|j| scale * (1.0 + j as f64)).collect();
        let modes = TruncatedModeSet::new(momenta, weights, 2, 0.3).unwrap();
        let (p1, p2) = (random_point(seed, 1), random_point(seed, 2));
        prop_assert!(wick_check_real(&modes, &p1, &p2).abs_err <= WICK_TOL * (1.0 + scale * scale));
        prop_assert!(wick_check_complex(&modes, &p1, &p2).abs_err <= WICK_TOL * (1.0 + scale * scale));
        prop_assert!(!base.is_empty());
    }
}
