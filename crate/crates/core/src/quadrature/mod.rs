//! Deterministic adaptive quadrature, seeded Monte Carlo, and the closed-form
//! nested time weight.

mod cubature;
mod gk;
mod mc;
mod nested;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cubature::integrate_cubature;
pub use gk::{gk15_rule, integrate_1d};
pub use mc::{integrate_mc, mc_estimate, seeded_rng, McRng};
pub use nested::nested_time_weight;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
    /// Truncation multiplier: Gaussian tails are cut where they fall below e^{-R²}.
    pub truncation: f64,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_evals: 2_000_000,
            truncation: 8.0,
        }
    }
}

impl QuadSettings {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.rel_tol > 0.0) {
            out.push("quadrature.rel_tol must be positive".to_string());
        }
        if !(self.abs_tol >= 0.0) {
            out.push("quadrature.abs_tol must be non-negative".to_string());
        }
        if self.max_evals < 1000 {
            out.push("quadrature.max_evals must be at least 1000".to_string());
        }
        if !(self.truncation >= 5.0) || !self.truncation.is_finite() {
            out.push("quadrature.truncation must be at least 5".to_string());
        }
        out
    }

    /// Same budget, tighter tolerance; used for inner integrals of nested rules.
    pub fn inner(&self) -> QuadSettings {
        QuadSettings {
            rel_tol: (self.rel_tol * 0.1).max(1e-15),
            ..*self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSettings {
    pub samples: u64,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            samples: 1_000_000,
            seed: 0x5eed_1234,
        }
    }
}

impl McSettings {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.samples < 10_000 {
            out.push("mc.samples must be at least 10000".to_string());
        }
        if self.seed > i64::MAX as u64 {
            out.push("mc.seed must be below 2^63".to_string());
        }
        out
    }
}

/// A quadrature or Monte Carlo result. `err` is an absolute error estimate
/// (or standard error for MC).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    pub err: f64,
    pub evals: u64,
    pub converged: bool,
}

impl Estimate {
    pub fn exact(value: Complex64) -> Self {
        Estimate {
            value,
            err: 0.0,
            evals: 0,
            converged: true,
        }
    }

    pub fn zero() -> Self {
        Self::exact(Complex64::new(0.0, 0.0))
    }

    pub fn scale(self, factor: Complex64) -> Self {
        Estimate {
            value: self.value * factor,
            err: self.err * factor.norm(),
            ..self
        }
    }

    /// Combine two independent estimates of a sum.
    pub fn plus(self, other: Estimate) -> Self {
        Estimate {
            value: self.value + other.value,
            err: self.err.hypot(other.err),
            evals: self.evals + other.evals,
            converged: self.converged && other.converged,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("adaptive cubature supports 1 to 3 dimensions, got {0}")]
    Dimension(usize),
    #[error("integration box is degenerate or non-finite on axis {0}")]
    Domain(usize),
}

/// Adaptive integration over a box in up to three dimensions.
pub fn integrate_adaptive<F>(
    f: F,
    lower: &[f64],
    upper: &[f64],
    settings: &QuadSettings,
) -> Result<Estimate, QuadError>
where
    F: Fn(&[f64]) -> Complex64,
{
    let m = lower.len();
    if m == 0 || m > 3 || upper.len() != m {
        return Err(QuadError::Dimension(m));
    }
    for i in 0..m {
        if !(lower[i].is_finite() && upper[i].is_finite()) {
            return Err(QuadError::Domain(i));
        }
    }
    if m == 1 {
        Ok(integrate_1d(|x| f(&[x]), lower[0], upper[0], &[], settings))
    } else {
        Ok(integrate_cubature(f, lower, upper, settings))
    }
}

pub(crate) fn tolerance_met(err: f64, value: Complex64, settings: &QuadSettings) -> bool {
    err <= settings.abs_tol.max(settings.rel_tol * value.norm())
}
