use std::f64::consts::PI;

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;

/// G(ω) = ∫dt ∫_{-∞}^{t} dt' χ₁(t) χ₂(t') e^{i(Ω₁t + Ω₂t')} e^{-iω(t-t')}
/// for Gaussian switchings exp(-(t - tᵢ)²/Tᵢ²).
///
/// The t integral is Gaussian; the remaining half-line integral over the
/// ordered gap u = t - t' is a scaled complementary error function.
pub fn nested_time_weight(
    gap1: f64,
    gap2: f64,
    width1: f64,
    width2: f64,
    centre1: f64,
    centre2: f64,
    omega: f64,
) -> Complex64 {
    let a = gap1 - omega;
    let b = gap2 + omega;
    let inv1 = 1.0 / (width1 * width1);
    let inv2 = 1.0 / (width2 * width2);
    let p = inv1 + inv2;
    let sqrt_a = 1.0 / (width1 * width1 + width2 * width2).sqrt();

    let q0 = Complex64::new(2.0 * centre1 * inv1 + 2.0 * centre2 * inv2, a + b);
    let lin = -q0 * (inv1 / p) + Complex64::new(2.0 * centre1 * inv1, a);
    let c0 = q0 * q0 / (4.0 * p) - centre1 * centre1 * inv1 - centre2 * centre2 * inv2;
    let z = -lin / (2.0 * sqrt_a);

    let scaled = if z.re >= 0.0 {
        c0.exp() * z.erfcx()
    } else {
        // erfcx(z) = 2e^{z²} - erfcx(-z); keep e^{c0 + z²} in one exponent
        2.0 * (c0 + z * z).exp() - c0.exp() * (-z).erfcx()
    };
    scaled * (0.5 * PI * width1 * width2)
}
