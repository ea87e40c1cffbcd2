//! The ε-softened massless vacuum Wightman function in 3+1 dimensions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::ModelKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WightmanError {
    #[error("epsilon must be positive, got {0}")]
    Epsilon(f64),
    #[error("radial distance must be non-negative, got {0}")]
    Radius(f64),
    #[error("momentum magnitude must be positive, got {0}")]
    Momentum(f64),
    #[error("kernel power must be at least 1")]
    Power,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WightmanKernel {
    epsilon: f64,
}

impl WightmanKernel {
    pub fn new(epsilon: f64) -> Result<Self, WightmanError> {
        if epsilon > 0.0 && epsilon.is_finite() {
            Ok(WightmanKernel { epsilon })
        } else {
            Err(WightmanError::Epsilon(epsilon))
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// W_ε at a possibly complex time difference; the contour-shifted oracle
    /// evaluates it off the real axis.
    #[inline]
    pub fn at(&self, dt: Complex64, r: f64) -> Complex64 {
        let s = dt - Complex64::new(0.0, self.epsilon);
        (Complex64::new(r * r, 0.0) - s * s).inv() / (4.0 * PI * PI)
    }
}

/// W_ε(Δt, r) = 1/(4π²) · 1/(r² − (Δt − iε)²).
pub fn wightman_eval(kernel: &WightmanKernel, dt: f64, r: f64) -> Result<Complex64, WightmanError> {
    if !(r >= 0.0) {
        return Err(WightmanError::Radius(r));
    }
    Ok(kernel.at(Complex64::new(dt, 0.0), r))
}

/// Per-mode weight e^{−εk}/(2(2π)³k).
pub fn momentum_density(kernel: &WightmanKernel, k_mag: f64) -> Result<f64, WightmanError> {
    if !(k_mag > 0.0) {
        return Err(WightmanError::Momentum(k_mag));
    }
    Ok((-kernel.epsilon * k_mag).exp() / (2.0 * (2.0 * PI).powi(3) * k_mag))
}

pub fn kernel_power_eval(
    kernel: &WightmanKernel,
    n: u32,
    dt: f64,
    r: f64,
) -> Result<Complex64, WightmanError> {
    if n == 0 {
        return Err(WightmanError::Power);
    }
    Ok(wightman_eval(kernel, dt, r)?.powu(n))
}

/// Power n of the Wightman function and rational prefactor c entering a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelCoefficient {
    pub n: u32,
    pub c: u32,
}

pub fn model_coefficient(model: ModelKind) -> KernelCoefficient {
    match model {
        ModelKind::Linear => KernelCoefficient { n: 1, c: 1 },
        // ⟨:φ²::φ²:⟩ = 2W²
        ModelKind::QuadraticReal => KernelCoefficient { n: 2, c: 2 },
        ModelKind::QuadraticComplex => KernelCoefficient { n: 2, c: 1 },
        ModelKind::Bilinear(m) => KernelCoefficient { n: m, c: 1 },
    }
}

/// Vacuum one-point function of the coupled operator; zero for every model,
/// so the first-order Dyson term drops out.
pub fn one_point_vacuum(_model: ModelKind) -> f64 {
    0.0
}

/// Spherical Bessel j₀(x) = sin x / x.
#[inline]
pub fn j0(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}
