//! Momentum-space reductions of the element integrals.
//!
//! Every reducer returns ∫[∏ measure] · time weight · smearing factor without the
//! coupling prefactor ±λλc.

use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::quadrature::{integrate_1d, mc_estimate, nested_time_weight, Estimate, QuadSettings};
use crate::scenario::{distance, smearing_ft, switching_ft, Label, Scenario};
use crate::wightman::j0;

use super::{ElementId, Reduction};

const FOUR_PI2: f64 = 4.0 * PI * PI;

struct Geometry {
    gamma: Label,
    nu: Label,
    /// Gaussian exponent of the smearing overlap, e^{-sK²}.
    s: f64,
    d: f64,
    /// Momentum beyond which e^{-sK²} < e^{-R²}.
    k_cut: f64,
    /// ω beyond which e^{-εω} (or the time weight for L) < e^{-R²}.
    omega_max: f64,
    breaks: Vec<f64>,
}

fn geometry(scn: &Scenario, which: ElementId) -> Geometry {
    let (gamma, nu) = which.labels();
    let dg = scn.detector(gamma);
    let dn = scn.detector(nu);
    let x = scn.quad.truncation * scn.quad.truncation;
    let s = (dg.sigma * dg.sigma + dn.sigma * dn.sigma) / 4.0;
    let k_cut = (x / s).sqrt();
    let mut omega_max = x / scn.epsilon;
    if which != ElementId::M {
        // either switching transform alone already falls below e^{-R²}
        let time_cut = [dg, dn]
            .iter()
            .map(|d| 2.0 * x.sqrt() / d.width_t - d.gap)
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        omega_max = omega_max.min(time_cut);
    }
    if let Some(delta) = scn.nascent_delta.filter(|d| *d > 0.0) {
        omega_max = omega_max.min(2.0 * x.sqrt() / delta);
    }
    let t_max = dg.width_t.max(dn.width_t);
    let mut breaks = vec![k_cut];
    let mut b = 0.5 / t_max;
    while b < omega_max {
        breaks.push(b);
        b *= 2.0;
    }
    for g in [dg.gap, dn.gap] {
        if g < 0.0 {
            breaks.push(-g);
        }
    }
    breaks.retain(|p| *p > 0.0 && *p < omega_max);
    breaks.sort_by(f64::total_cmp);
    Geometry {
        gamma,
        nu,
        s,
        d: distance(&dg.center_x, &dn.center_x),
        k_cut,
        omega_max,
        breaks,
    }
}

fn time_weight(scn: &Scenario, which: ElementId) -> impl Fn(f64) -> Complex64 + Sync + '_ {
    let (gamma, nu) = which.labels();
    move |omega: f64| {
        if which == ElementId::M {
            let a = &scn.detector_a;
            let b = &scn.detector_b;
            nested_time_weight(
                a.gap, b.gap, a.width_t, b.width_t, a.center_t, b.center_t, omega,
            ) + nested_time_weight(
                b.gap, a.gap, b.width_t, a.width_t, b.center_t, a.center_t, omega,
            )
        } else {
            let dg = scn.detector(gamma);
            let dn = scn.detector(nu);
            switching_ft(dg, omega + dg.gap).conj() * switching_ft(dn, omega + dn.gap)
        }
    }
}

fn spatial(geo: &Geometry, k: f64) -> f64 {
    j0(k * geo.d) * (-geo.s * k * k).exp()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

pub(super) fn reduce(scn: &Scenario, which: ElementId, reduction: Reduction) -> Estimate {
    let geo = geometry(scn, which);
    let tw = time_weight(scn, which);
    let q = &scn.quad;
    let inner = q.inner();
    let inner_ok = Cell::new(true);
    let note = |e: Estimate| {
        if !e.converged {
            inner_ok.set(false);
        }
        e.value
    };
    let eps = scn.epsilon;
    let delta = scn.nascent_delta.unwrap_or(0.0);

    let outer = match reduction {
        Reduction::Radial => {
            let k_max = geo.omega_max.min(geo.k_cut);
            let f = |k: f64| tw(k) * (k * (-eps * k).exp() * spatial(&geo, k) / FOUR_PI2);
            integrate_1d(f, 0.0, k_max, &geo.breaks, q)
        }
        Reduction::PhaseSpace(n) => phase_space(&geo, &tw, n, eps, q, &inner, &note),
        Reduction::Triangle => {
            // ∫dω ∫_0^ω dδ ∫_δ^ω dK K S(K), δ = |k₁ - k₂|, K dK = k₁k₂ dcosθ
            let h = |upper: f64| {
                let mid = |dl: f64| {
                    let kint = integrate_1d(
                        |k: f64| Complex64::new(k * spatial(&geo, k), 0.0),
                        dl,
                        upper,
                        &[],
                        &inner,
                    );
                    note(kint) * (-delta * delta * dl * dl / 4.0).exp()
                };
                note(integrate_1d(mid, 0.0, upper, &[], &inner))
            };
            let h_cap = h(geo.k_cut);
            let pref = 8.0 * PI * PI / (4.0 * (2.0 * PI).powi(6));
            let f = |w: f64| {
                let inner_val = if w >= geo.k_cut { h_cap } else { h(w) };
                tw(w) * inner_val * ((-eps * w - delta * delta * w * w / 4.0).exp() * pref)
            };
            integrate_1d(f, 0.0, geo.omega_max, &geo.breaks, q)
        }
        Reduction::PerLegConvolution => {
            let g = |k: f64| k * spatial(&geo, k) * (-delta * delta * k * k / 2.0).exp() / FOUR_PI2;
            let w_max = geo.omega_max.min(2.0 * geo.k_cut);
            let f = |w: f64| {
                let lo = (w - geo.k_cut).max(0.0);
                let hi = w.min(geo.k_cut);
                let conv = note(integrate_1d(
                    |k: f64| Complex64::new(g(k) * g(w - k), 0.0),
                    lo,
                    hi,
                    &[],
                    &inner,
                ));
                tw(w) * conv * (-eps * w).exp()
            };
            integrate_1d(f, 0.0, w_max, &geo.breaks, q)
        }
        Reduction::PerLegMc(n) => {
            let kc = geo.k_cut;
            let est = mc_estimate(scn.mc.samples, scn.mc.seed, |rng| {
                let mut prod = 1.0;
                let mut w = 0.0;
                for _ in 0..n {
                    let k = kc * rng.random::<f64>();
                    prod *= k * spatial(&geo, k) / FOUR_PI2;
                    w += k;
                }
                tw(w) * (prod * (-eps * w).exp())
            });
            est.scale(Complex64::new(kc.powi(n as i32), 0.0))
        }
        Reduction::MomentumMc(n) => momentum_mc(scn, &geo, &tw, n),
    };

    let mut est = outer;
    est.err += est.value.norm() * inner.rel_tol;
    est.converged = est.converged && inner_ok.get();
    est
}

/// Generic n-field reduction through the massless n-body phase space
/// Φₙ(s) = (π/2)^{n-1} s^{n-2} / ((n-1)!(n-2)!), with s = ω² - K².
fn phase_space<T, N>(
    geo: &Geometry,
    tw: &T,
    n: u32,
    eps: f64,
    q: &QuadSettings,
    inner: &QuadSettings,
    note: &N,
) -> Estimate
where
    T: Fn(f64) -> Complex64,
    N: Fn(Estimate) -> Complex64,
{
    assert!(n >= 2);
    let p = n - 2;
    let a_n = 4.0 * PI * (2.0 * PI).powi(-3 * n as i32) * (PI / 2.0).powi(n as i32 - 1)
        / (factorial(n - 1) * factorial(n - 2));
    // moments ∫_0^{k_cut} K^{2+2j} S(K) dK for the binomial expansion above the cut
    let moments: Vec<f64> = (0..=p)
        .map(|j| {
            note(integrate_1d(
                |k: f64| Complex64::new(k.powi(2 + 2 * j as i32) * spatial(geo, k), 0.0),
                0.0,
                geo.k_cut,
                &[],
                inner,
            ))
            .re
        })
        .collect();
    let radial = |w: f64| -> f64 {
        if w >= geo.k_cut {
            (0..=p)
                .map(|j| {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    sign * binomial(p, j) * w.powi(2 * (p - j) as i32) * moments[j as usize]
                })
                .sum()
        } else {
            note(integrate_1d(
                |k: f64| {
                    Complex64::new(
                        k * k * (w * w - k * k).powi(p as i32) * spatial(geo, k),
                        0.0,
                    )
                },
                0.0,
                w,
                &[],
                inner,
            ))
            .re
        }
    };
    let f = |w: f64| tw(w) * (a_n * (-eps * w).exp() * radial(w));
    integrate_1d(f, 0.0, geo.omega_max, &geo.breaks, q)
}

fn unit_vector<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.random::<f64>();
    let rho = (1.0 - z * z).max(0.0).sqrt();
    [rho * phi.cos(), rho * phi.sin(), z]
}

/// n ≥ 3 centre-of-mass path. The total momentum K is drawn from the
/// smearing Gaussian e^{-sK²} and the last leg closes it, k_n = K − Σk_i
/// (unit Jacobian); the free legs take magnitudes from an even mixture of
/// k e^{-εk} and k e^{-k/T}, directions uniform.
fn momentum_mc<T>(scn: &Scenario, geo: &Geometry, tw: &T, n: u32) -> Estimate
where
    T: Fn(f64) -> Complex64 + Sync,
{
    let eps = scn.epsilon;
    let dg = scn.detector(geo.gamma);
    let dn = scn.detector(geo.nu);
    let rates = [eps, 1.0 / dg.width_t.max(dn.width_t)];
    let gamma2 = |k: f64, r: f64| r * r * k * (-r * k).exp();
    let k_sd = (0.5 / geo.s).sqrt();
    let k_norm = (geo.s / PI).powf(1.5);
    mc_estimate(scn.mc.samples, scn.mc.seed, |rng| {
        let mut free = [0.0; 3];
        let mut w = 0.0;
        let mut weight = 1.0;
        for _ in 1..n {
            let rate = rates[usize::from(rng.random::<bool>())];
            let k = -((1.0 - rng.random::<f64>()) * (1.0 - rng.random::<f64>())).ln() / rate;
            let u = unit_vector(rng);
            for c in 0..3 {
                free[c] += k * u[c];
            }
            w += k;
            let q = 0.5 * (gamma2(k, rates[0]) + gamma2(k, rates[1]));
            weight *= k * (-eps * k).exp() / FOUR_PI2 / q;
        }
        let total: [f64; 3] = std::array::from_fn(|_| k_sd * rng.sample::<f64, _>(StandardNormal));
        let k2: f64 = total.iter().map(|x| x * x).sum();
        let last = ((0..3).map(|c| (total[c] - free[c]).powi(2)).sum::<f64>()).sqrt();
        if last == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        w += last;
        weight *= (-eps * last).exp() / (2.0 * (2.0 * PI).powi(3) * last);
        let density = k_norm * (-geo.s * k2).exp();
        let smear = smearing_ft(dg, total).conj() * smearing_ft(dn, total);
        tw(w) * smear * (weight / density)
    })
}
