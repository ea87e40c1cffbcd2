//! TOML scenario files.
//!
//! ```toml
//! [scenario]
//! model = "quadratic_real"   # linear | quadratic_real | quadratic_complex | bilinear
//! n = 2                      # field count, bilinear only
//! epsilon = 0.01
//! smearing_mode = "center_of_mass"   # or "per_leg"
//!
//! [detector.A]
//! lambda = 1.0
//! gap = 1.0
//! center = [0.0, 0.0, 0.0]
//! switch_center = 0.0
//! sigma = 1.0
//! T = 1.0
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{McSettings, QuadSettings};
use crate::scenario::{
    validate, DetectorParams, Label, ModelKind, Scenario, SmearingMode, ValidationReport,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(ValidationReport),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: RawScenario,
    detector: RawDetectors,
    #[serde(default)]
    quadrature: QuadSettings,
    #[serde(default)]
    mc: McSettings,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
    epsilon: f64,
    #[serde(default = "default_mode")]
    smearing_mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nascent_delta: Option<f64>,
}

fn default_mode() -> String {
    "center_of_mass".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetectors {
    #[serde(rename = "A")]
    a: RawDetector,
    #[serde(rename = "B")]
    b: RawDetector,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    lambda: f64,
    gap: f64,
    #[serde(default)]
    center: [f64; 3],
    #[serde(default)]
    switch_center: f64,
    sigma: f64,
    #[serde(rename = "T")]
    width_t: f64,
}

impl RawDetector {
    fn build(&self, label: Label) -> DetectorParams {
        DetectorParams {
            label,
            lambda: self.lambda,
            gap: self.gap,
            center_x: self.center,
            center_t: self.switch_center,
            sigma: self.sigma,
            width_t: self.width_t,
        }
    }

    fn from_params(d: &DetectorParams) -> Self {
        RawDetector {
            lambda: d.lambda,
            gap: d.gap,
            center: d.center_x,
            switch_center: d.center_t,
            sigma: d.sigma,
            width_t: d.width_t,
        }
    }
}

fn parse_model(name: &str, n: Option<u32>) -> Result<ModelKind, String> {
    let model = match name {
        "linear" => ModelKind::Linear,
        "quadratic_real" => ModelKind::QuadraticReal,
        "quadratic_complex" => ModelKind::QuadraticComplex,
        "bilinear" => match n {
            Some(n) => return Ok(ModelKind::Bilinear(n)),
            None => return Err("scenario.n is required for model = \"bilinear\"".into()),
        },
        other => {
            return Err(format!(
                "scenario.model: unknown model `{other}`, expected linear, quadratic_real, quadratic_complex or bilinear"
            ))
        }
    };
    if n.is_some() {
        return Err(format!(
            "scenario.n only applies to model = \"bilinear\", not `{name}`"
        ));
    }
    Ok(model)
}

fn parse_mode(name: &str) -> Result<SmearingMode, String> {
    match name {
        "center_of_mass" => Ok(SmearingMode::CenterOfMass),
        "per_leg" => Ok(SmearingMode::PerLeg),
        other => Err(format!(
            "scenario.smearing_mode: unknown mode `{other}`, expected center_of_mass or per_leg"
        )),
    }
}

/// Parses without checking physical invariants.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let model = parse_model(&raw.scenario.model, raw.scenario.n).map_err(ConfigError::Parse)?;
    let smearing_mode = parse_mode(&raw.scenario.smearing_mode).map_err(ConfigError::Parse)?;
    Ok(Scenario {
        detector_a: raw.detector.a.build(Label::A),
        detector_b: raw.detector.b.build(Label::B),
        model,
        smearing_mode,
        epsilon: raw.scenario.epsilon,
        nascent_delta: raw.scenario.nascent_delta,
        quad: raw.quadrature,
        mc: raw.mc,
    })
}

/// Parses and validates.
pub fn load_scenario_str(text: &str) -> Result<Scenario, ConfigError> {
    let scn = parse_scenario(text)?;
    let report = validate(&scn);
    if report.is_empty() {
        Ok(scn)
    } else {
        Err(ConfigError::Invalid(report))
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_scenario_str(&text)
}

/// Config text that parses back to `scn`.
pub fn to_toml(scn: &Scenario) -> String {
    let (model, n) = match scn.model {
        ModelKind::Bilinear(n) => ("bilinear".to_string(), Some(n)),
        m => (m.name(), None),
    };
    let raw = RawConfig {
        scenario: RawScenario {
            model,
            n,
            epsilon: scn.epsilon,
            smearing_mode: match scn.smearing_mode {
                SmearingMode::CenterOfMass => "center_of_mass".into(),
                SmearingMode::PerLeg => "per_leg".into(),
            },
            nascent_delta: scn.nascent_delta,
        },
        detector: RawDetectors {
            a: RawDetector::from_params(&scn.detector_a),
            b: RawDetector::from_params(&scn.detector_b),
        },
        quadrature: scn.quad,
        mc: scn.mc,
    };
    toml::to_string(&raw).expect("config serializes")
}
