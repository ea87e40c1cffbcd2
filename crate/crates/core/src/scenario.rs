//! Detectors, coupling models and computation scenarios.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::quadrature::{McSettings, QuadSettings};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    A,
    B,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::A => f.write_str("A"),
            Label::B => f.write_str("B"),
        }
    }
}

/// One comoving detector with Gaussian smearing and switching.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    pub label: Label,
    pub lambda: f64,
    pub gap: f64,
    pub center_x: [f64; 3],
    pub center_t: f64,
    pub sigma: f64,
    /// Switching width T.
    pub width_t: f64,
}

impl DetectorParams {
    pub fn new(label: Label) -> Self {
        DetectorParams {
            label,
            lambda: 1.0,
            gap: 1.0,
            center_x: [0.0; 3],
            center_t: 0.0,
            sigma: 1.0,
            width_t: 1.0,
        }
    }

    fn violations(&self, out: &mut Vec<String>) {
        let p = format!("detector.{}", self.label);
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            out.push(format!("{p}.sigma must be positive"));
        }
        if !(self.width_t > 0.0) || !self.width_t.is_finite() {
            out.push(format!("{p}.T must be positive"));
        }
        if !self.lambda.is_finite() {
            out.push(format!("{p}.lambda must be finite"));
        }
        if !self.gap.is_finite() {
            out.push(format!("{p}.gap must be finite"));
        }
        if !self.center_t.is_finite() {
            out.push(format!("{p}.switch_center must be finite"));
        }
        if self.center_x.iter().any(|c| !c.is_finite()) {
            out.push(format!("{p}.center must be finite"));
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Linear,
    QuadraticReal,
    QuadraticComplex,
    Bilinear(u32),
}

impl ModelKind {
    pub fn name(&self) -> String {
        match self {
            ModelKind::Linear => "linear".into(),
            ModelKind::QuadraticReal => "quadratic_real".into(),
            ModelKind::QuadraticComplex => "quadratic_complex".into(),
            ModelKind::Bilinear(n) => format!("bilinear{n}"),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SmearingMode {
    CenterOfMass,
    PerLeg,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub detector_a: DetectorParams,
    pub detector_b: DetectorParams,
    pub model: ModelKind,
    pub smearing_mode: SmearingMode,
    pub epsilon: f64,
    /// Width of the nascent-delta vertex splitting; `None` is the local vertex.
    pub nascent_delta: Option<f64>,
    pub quad: QuadSettings,
    pub mc: McSettings,
}

/// Every violated invariant, one message each. Empty means runnable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn contains(&self, needle: &str) -> bool {
        self.issues.iter().any(|m| m.contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.issues.join("; "))
    }
}

impl Scenario {
    /// Two unit detectors two widths apart, gaps 1, ε = 0.01.
    pub fn reference(model: ModelKind) -> Self {
        let mut b = DetectorParams::new(Label::B);
        b.center_x = [2.0, 0.0, 0.0];
        Scenario {
            detector_a: DetectorParams::new(Label::A),
            detector_b: b,
            model,
            smearing_mode: SmearingMode::CenterOfMass,
            epsilon: 0.01,
            nascent_delta: None,
            quad: QuadSettings::default(),
            mc: McSettings::default(),
        }
    }

    pub fn detector(&self, label: Label) -> &DetectorParams {
        match label {
            Label::A => &self.detector_a,
            Label::B => &self.detector_b,
        }
    }

    pub fn detector_mut(&mut self, label: Label) -> &mut DetectorParams {
        match label {
            Label::A => &mut self.detector_a,
            Label::B => &mut self.detector_b,
        }
    }

    pub fn with_model(mut self, model: ModelKind) -> Self {
        self.model = model;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn separation(&self) -> f64 {
        distance(&self.detector_a.center_x, &self.detector_b.center_x)
    }

    /// Short hex digest of every parameter that affects results.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("scenario serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario::reference(ModelKind::QuadraticReal)
    }
}

pub fn validate(scenario: &Scenario) -> ValidationReport {
    let mut issues = Vec::new();
    scenario.detector_a.violations(&mut issues);
    scenario.detector_b.violations(&mut issues);
    if scenario.detector_a.label == scenario.detector_b.label {
        issues.push("detector labels must be distinct".to_string());
    }
    if !(scenario.epsilon > 0.0) || !scenario.epsilon.is_finite() {
        issues.push("scenario.epsilon must be positive".to_string());
    }
    if let ModelKind::Bilinear(0) = scenario.model {
        issues.push("scenario.n must be at least 1".to_string());
    }
    if let Some(d) = scenario.nascent_delta {
        if !(d >= 0.0) || !d.is_finite() {
            issues.push("scenario.nascent_delta must be non-negative".to_string());
        }
    }
    issues.extend(scenario.quad.violations());
    issues.extend(scenario.mc.violations());
    ValidationReport { issues }
}

pub(crate) fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// F(x) = (πσ²)^{-3/2} exp(-|x - x_γ|²/σ²).
pub fn smearing(det: &DetectorParams, x: [f64; 3]) -> f64 {
    let s2 = det.sigma * det.sigma;
    let r2 = distance(&x, &det.center_x).powi(2);
    (PI * s2).powf(-1.5) * (-r2 / s2).exp()
}

/// χ(t) = exp(-(t - t_γ)²/T²), peak 1.
pub fn switching(det: &DetectorParams, t: f64) -> f64 {
    let u = (t - det.center_t) / det.width_t;
    (-u * u).exp()
}

/// ∫d³x F(x) e^{-ik·x}.
pub fn smearing_ft(det: &DetectorParams, k: [f64; 3]) -> Complex64 {
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    let phase = -(k[0] * det.center_x[0] + k[1] * det.center_x[1] + k[2] * det.center_x[2]);
    Complex64::from_polar((-det.sigma * det.sigma * k2 / 4.0).exp(), phase)
}

/// ∫dt χ(t) e^{iωt}.
pub fn switching_ft(det: &DetectorParams, omega: f64) -> Complex64 {
    let t = det.width_t;
    let mag = PI.sqrt() * t * (-omega * omega * t * t / 4.0).exp();
    Complex64::from_polar(mag, omega * det.center_t)
}
