//! Literal position-space Monte Carlo evaluation of the element integrals.
//!
//! The integrand is analytic in the time variables, so the sampled contours are
//! deformed away from the light-cone poles of W (which sit at Im Δt = ε > 0):
//! L integrates along Δt = τ − iη, M along the rotated ray |Δt| = s·e^{−iφ}.
//! Neither deformation crosses a pole, so both are exact rewrites of the real
//! integrals.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::quadrature::{mc_estimate, Estimate, McRng};
use crate::scenario::{DetectorParams, Scenario, SmearingMode};
use crate::wightman::{model_coefficient, WightmanKernel};

use super::ElementId;

fn normal(rng: &mut McRng) -> f64 {
    rng.sample(StandardNormal)
}

fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let u = (x - mean) / sd;
    (-0.5 * u * u).exp() / (sd * (2.0 * PI).sqrt())
}

/// χ(t) e^{±iΩt} continued to complex t.
fn vertex(det: &DetectorParams, t: Complex64, sign: f64) -> Complex64 {
    let u = (t - det.center_t) / det.width_t;
    (-u * u + Complex64::new(0.0, sign * det.gap) * t).exp()
}

/// Point drawn from the normalized smearing density F itself, so F/density = 1.
fn draw_point(det: &DetectorParams, rng: &mut McRng) -> [f64; 3] {
    let sd = det.sigma / 2f64.sqrt();
    let mut x = det.center_x;
    for c in &mut x {
        *c += sd * normal(rng);
    }
    x
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Leg separations for the kernel: one shared pair for centre-of-mass smearing,
/// one independent pair per field for per-leg smearing.
fn leg_radii(
    scn: &Scenario,
    g: &DetectorParams,
    v: &DetectorParams,
    n: u32,
    rng: &mut McRng,
    out: &mut Vec<f64>,
) {
    out.clear();
    let legs = if scn.smearing_mode == SmearingMode::PerLeg {
        n
    } else {
        1
    };
    for _ in 0..legs {
        let x = draw_point(g, rng);
        let y = draw_point(v, rng);
        out.push(dist(&x, &y));
    }
}

fn kernel_product(kernel: &WightmanKernel, n: u32, dt: Complex64, radii: &[f64]) -> Complex64 {
    if radii.len() == 1 {
        kernel.at(dt, radii[0]).powu(n)
    } else {
        radii.iter().map(|&r| kernel.at(dt, r)).product()
    }
}

pub(super) fn oracle(scn: &Scenario, which: ElementId, samples: u64, seed: u64) -> Estimate {
    let kernel = WightmanKernel::new(scn.epsilon).expect("validated epsilon");
    let coef = model_coefficient(scn.model);
    match which {
        ElementId::M => oracle_m(scn, &kernel, coef.n, samples, seed).scale(Complex64::new(
            -scn.detector_a.lambda * scn.detector_b.lambda * coef.c as f64,
            0.0,
        )),
        _ => {
            let (gl, nl) = which.labels();
            let g = scn.detector(gl);
            let v = scn.detector(nl);
            oracle_l(scn, g, v, &kernel, coef.n, samples, seed)
                .scale(Complex64::new(g.lambda * v.lambda * coef.c as f64, 0.0))
        }
    }
}

fn oracle_l(
    scn: &Scenario,
    g: &DetectorParams,
    v: &DetectorParams,
    kernel: &WightmanKernel,
    n: u32,
    samples: u64,
    seed: u64,
) -> Estimate {
    let eta = g.width_t * (0.7 + 0.5 * g.gap * g.width_t).clamp(0.3, 1.5);
    let tau_mean = g.center_t - v.center_t;
    let tau_sd = ((g.width_t.powi(2) + v.width_t.powi(2)) / 2.0).sqrt();
    let t_sd = v.width_t / 2f64.sqrt();
    let norm_t = PI.sqrt() * v.width_t;
    mc_estimate(samples, seed, |rng| {
        let mut radii = Vec::with_capacity(n as usize);
        leg_radii(scn, g, v, n, rng, &mut radii);
        let tp = v.center_t + t_sd * normal(rng);
        let tau = tau_mean + tau_sd * normal(rng);
        let dt = Complex64::new(tau, -eta);
        let t = dt + tp;
        // conj(χ_γ e^{iΩ_γ t}) continued analytically; χ_ν(t') is absorbed by
        // the t' density, leaving √π T_ν and the phase e^{iΩ_ν t'}
        let f = vertex(g, t, -1.0)
            * Complex64::from_polar(1.0, v.gap * tp)
            * kernel_product(kernel, n, dt, &radii);
        f * (norm_t / normal_pdf(tau, tau_mean, tau_sd))
    })
}

/// M over the unordered pair: M_AB + M_BA = ∫∫ L_A L_B W^n(|t − t'|).
/// (Δx, s) is drawn from a mixture of the natural profile density and a 4D
/// density ∝ 1/(ρ⁴ + ε⁴) around the coincidence point, where W^n peaks.
fn oracle_m(scn: &Scenario, kernel: &WightmanKernel, n: u32, samples: u64, seed: u64) -> Estimate {
    let a = &scn.detector_a;
    let b = &scn.detector_b;
    let eps = scn.epsilon;
    let t_max = a.width_t.max(b.width_t);
    let t_min = a.width_t.min(b.width_t);
    let t_sum = a.width_t.powi(2) + b.width_t.powi(2);
    let gap_max = a.gap.abs().max(b.gap.abs());
    // On the ray the A vertex grows like e^{s² sin²φ / T_A²}; keep that below a
    // quarter of the cos²φ/(T_A² + T_B²) decay of the t'-marginal.
    let mut phi = (0.5 * t_min / t_sum.sqrt()).atan();
    if gap_max * t_max > 0.0 {
        phi = phi.min(1.5 / (gap_max * t_max));
    }
    let kappa = phi.cos().powi(2) / t_sum - phi.sin().powi(2) / a.width_t.powi(2);
    let rot = Complex64::from_polar(1.0, -phi);

    let var_a = a.sigma * a.sigma / 2.0;
    let var_b = b.sigma * b.sigma / 2.0;
    let var_dx = var_a + var_b;
    let mean_dx = [
        a.center_x[0] - b.center_x[0],
        a.center_x[1] - b.center_x[1],
        a.center_x[2] - b.center_x[2],
    ];
    let cond_sd = (var_a * var_b / var_dx).sqrt();
    let pull = var_a / var_dx;

    let s_scale = (0.5 / kappa + (a.center_t - b.center_t).powi(2)).sqrt();
    let t_sd = b.width_t / 2f64.sqrt();
    let norm_t = PI.sqrt() * b.width_t;

    let per_leg = scn.smearing_mode == SmearingMode::PerLeg;
    let beta = if n >= 2 { 0.3 } else { 0.0 };
    let rho_max = a.sigma.min(b.sigma).min(t_max).min(1.0);
    let log_span = (rho_max / eps).powi(4).ln_1p();

    let p_nat_dx = move |dx: &[f64; 3]| -> f64 {
        let r2: f64 = (0..3).map(|c| (dx[c] - mean_dx[c]).powi(2)).sum();
        (-r2 / (2.0 * var_dx)).exp() / (2.0 * PI * var_dx).powf(1.5)
    };
    let q_s = move |s: f64| 2.0 * normal_pdf(s, 0.0, s_scale);
    let q_near = move |rho: f64| {
        if rho <= rho_max {
            4.0 / (PI * PI * (rho.powi(4) + eps.powi(4)) * log_span)
        } else {
            0.0
        }
    };

    mc_estimate(samples, seed, |rng| {
        let (dx, s) = if rng.random::<f64>() < beta {
            let rho = eps * (rng.random::<f64>() * log_span).exp_m1().powf(0.25);
            let mut u = [0.0f64; 4];
            for c in &mut u {
                *c = normal(rng);
            }
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            (
                [rho * u[0] / norm, rho * u[1] / norm, rho * u[2] / norm],
                rho * u[3].abs() / norm,
            )
        } else {
            let mut dx = mean_dx;
            for c in &mut dx {
                *c += var_dx.sqrt() * normal(rng);
            }
            (dx, (s_scale * normal(rng)).abs())
        };
        let rho = (dx.iter().map(|x| x * x).sum::<f64>() + s * s).sqrt();
        let p_nat = p_nat_dx(&dx);
        let q = (1.0 - beta) * p_nat * q_s(s) + beta * q_near(rho);

        // reconstruct (x, x') from Δx and the conditional centre-of-mass draw
        let mut x = [0.0; 3];
        let mut y = [0.0; 3];
        for c in 0..3 {
            x[c] = a.center_x[c] + pull * (dx[c] - mean_dx[c]) + cond_sd * normal(rng);
            y[c] = x[c] - dx[c];
        }
        // F_A(x)F_B(x') / density(x, x' | Δx) = p_nat(Δx)
        let spatial = p_nat;
        let mut radii = vec![dist(&x, &y)];
        if per_leg {
            for _ in 1..n {
                radii.push(dist(&draw_point(a, rng), &draw_point(b, rng)));
            }
        }

        let tp = b.center_t + t_sd * normal(rng);
        let sd = rot * s;
        let kern = if per_leg {
            radii
                .iter()
                .map(|&r| kernel.at(sd, r))
                .product::<Complex64>()
        } else {
            kernel.at(sd, radii[0]).powu(n)
        };
        let tpc = Complex64::new(tp, 0.0);
        // χ_B(t') is absorbed by the t' density
        let both = vertex(a, tpc + sd, 1.0) + vertex(a, tpc - sd, 1.0);
        let f = both * Complex64::from_polar(1.0, b.gap * tp) * kern * rot;
        f * (norm_t * spatial / q)
    })
}
