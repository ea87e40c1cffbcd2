//! Second-order matrix elements L_γν and M, and the X-state they build.

mod oracle;
mod reduce;
mod rho;

use num_complex::Complex64;
use rayon::join;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::Estimate;
use crate::scenario::{validate, Label, ModelKind, Scenario, SmearingMode, ValidationReport};
use crate::wightman::model_coefficient;

pub use rho::{assemble_rho, assemble_rho_with, DensityMatrix, InnerDiagonal};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElementError {
    #[error("invalid scenario: {0}")]
    Invalid(ValidationReport),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("perturbativity violated: L_AA + L_BB = {0} > 1")]
    Perturbativity(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementId {
    Laa,
    Lbb,
    Lab,
    M,
}

impl ElementId {
    pub const ALL: [ElementId; 4] = [ElementId::Laa, ElementId::Lbb, ElementId::Lab, ElementId::M];

    /// (γ, ν) of L_γν; M is read as the (A, B) pair.
    pub fn labels(self) -> (Label, Label) {
        match self {
            ElementId::Laa => (Label::A, Label::A),
            ElementId::Lbb => (Label::B, Label::B),
            ElementId::Lab | ElementId::M => (Label::A, Label::B),
        }
    }

    pub fn from_labels(gamma: Label, nu: Label) -> Option<ElementId> {
        match (gamma, nu) {
            (Label::A, Label::A) => Some(ElementId::Laa),
            (Label::B, Label::B) => Some(ElementId::Lbb),
            (Label::A, Label::B) => Some(ElementId::Lab),
            (Label::B, Label::A) => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementId::Laa => "L_AA",
            ElementId::Lbb => "L_BB",
            ElementId::Lab => "L_AB",
            ElementId::M => "M",
        }
    }
}

/// How the momentum integral is reduced to quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    /// n = 1: one radial integral with the j₀(kd) orientation average.
    Radial,
    /// Generic n ≥ 2: massless n-body phase space in (ω, K).
    PhaseSpace(u32),
    /// n = 2 centre of mass in triangle variables (ω, |k₁ − k₂|, K).
    Triangle,
    /// n = 2 per-leg smearing: convolution of two radial factors.
    PerLegConvolution,
    /// n ≥ 3 per-leg smearing: Monte Carlo over magnitudes.
    PerLegMc(u32),
    /// n ≥ 3 centre of mass: Monte Carlo over magnitudes and directions.
    MomentumMc(u32),
}

impl Reduction {
    pub fn is_monte_carlo(self) -> bool {
        matches!(self, Reduction::PerLegMc(_) | Reduction::MomentumMc(_))
    }
}

pub fn reduction_for(scn: &Scenario) -> Result<Reduction, ElementError> {
    let n = model_coefficient(scn.model).n;
    let nascent = scn.nascent_delta.is_some_and(|d| d > 0.0);
    if nascent && n != 2 {
        return Err(ElementError::Unsupported(format!(
            "nascent-delta splitting needs a two-field vertex, model has n = {n}"
        )));
    }
    Ok(match (n, scn.smearing_mode) {
        (1, _) => Reduction::Radial,
        (2, SmearingMode::PerLeg) => Reduction::PerLegConvolution,
        (_, SmearingMode::PerLeg) => Reduction::PerLegMc(n),
        (2, SmearingMode::CenterOfMass) => match scn.model {
            ModelKind::Bilinear(_) if !nascent => Reduction::PhaseSpace(2),
            _ => Reduction::Triangle,
        },
        (_, SmearingMode::CenterOfMass) => Reduction::MomentumMc(n),
    })
}

fn prefactor(scn: &Scenario, which: ElementId) -> f64 {
    let c = model_coefficient(scn.model).c as f64;
    let (g, v) = which.labels();
    let ll = scn.detector(g).lambda * scn.detector(v).lambda * c;
    if which == ElementId::M {
        -ll
    } else {
        ll
    }
}

fn checked(scn: &Scenario) -> Result<(), ElementError> {
    let report = validate(scn);
    if report.is_empty() {
        Ok(())
    } else {
        Err(ElementError::Invalid(report))
    }
}

/// One element through an explicitly chosen reduction.
pub fn compute_with(
    scn: &Scenario,
    which: ElementId,
    reduction: Reduction,
) -> Result<Estimate, ElementError> {
    checked(scn)?;
    let pref = prefactor(scn, which);
    if pref == 0.0 {
        return Ok(Estimate::zero());
    }
    let mut est = reduce::reduce(scn, which, reduction).scale(Complex64::new(pref, 0.0));
    if which != ElementId::M && which != ElementId::Lab {
        est.value.im = 0.0;
    }
    Ok(est)
}

pub fn compute_element(scn: &Scenario, which: ElementId) -> Result<Estimate, ElementError> {
    compute_with(scn, which, reduction_for(scn)?)
}

pub fn compute_l(scn: &Scenario, gamma: Label, nu: Label) -> Result<Estimate, ElementError> {
    match ElementId::from_labels(gamma, nu) {
        Some(id) => compute_element(scn, id),
        None => {
            let mut e = compute_element(scn, ElementId::Lab)?;
            e.value = e.value.conj();
            Ok(e)
        }
    }
}

pub fn compute_m(scn: &Scenario) -> Result<Estimate, ElementError> {
    compute_element(scn, ElementId::M)
}

/// Position-space Monte Carlo of one element using the scenario's MC settings.
pub fn oracle_position_space(scn: &Scenario, which: ElementId) -> Result<Estimate, ElementError> {
    checked(scn)?;
    if prefactor(scn, which) == 0.0 {
        return Ok(Estimate::zero());
    }
    let mut est = oracle::oracle(scn, which, scn.mc.samples, scn.mc.seed);
    if which == ElementId::Laa || which == ElementId::Lbb {
        est.value.im = 0.0;
    }
    Ok(est)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RegularizationVariant {
    NascentDelta(f64),
    PerLegSmearing,
}

/// An element under one of the vertex regularizations.
pub fn regularized_element(
    scn: &Scenario,
    reg: RegularizationVariant,
    which: ElementId,
) -> Result<Estimate, ElementError> {
    if model_coefficient(scn.model).n < 2 {
        return Err(ElementError::Unsupported(
            "regularization needs kernel power n >= 2".into(),
        ));
    }
    let mut s = *scn;
    match reg {
        RegularizationVariant::NascentDelta(d) => s.nascent_delta = Some(d),
        RegularizationVariant::PerLegSmearing => s.smearing_mode = SmearingMode::PerLeg,
    }
    compute_element(&s, which)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementSet {
    pub l_aa: Estimate,
    pub l_bb: Estimate,
    pub l_ab: Estimate,
    pub m: Estimate,
    pub model: ModelKind,
    pub epsilon: f64,
    pub fingerprint: String,
    /// Produced by a Monte Carlo reduction (n ≥ 3).
    pub exploratory: bool,
}

impl ElementSet {
    /// Exact values, no scenario behind them.
    pub fn from_values(l_aa: f64, l_bb: f64, l_ab: Complex64, m: Complex64) -> Self {
        ElementSet {
            l_aa: Estimate::exact(Complex64::new(l_aa, 0.0)),
            l_bb: Estimate::exact(Complex64::new(l_bb, 0.0)),
            l_ab: Estimate::exact(l_ab),
            m: Estimate::exact(m),
            model: ModelKind::Linear,
            epsilon: f64::NAN,
            fingerprint: String::new(),
            exploratory: false,
        }
    }

    pub fn l_aa(&self) -> f64 {
        self.l_aa.value.re
    }

    pub fn l_bb(&self) -> f64 {
        self.l_bb.value.re
    }

    pub fn l_ab(&self) -> Complex64 {
        self.l_ab.value
    }

    pub fn m(&self) -> Complex64 {
        self.m.value
    }

    pub fn get(&self, which: ElementId) -> &Estimate {
        match which {
            ElementId::Laa => &self.l_aa,
            ElementId::Lbb => &self.l_bb,
            ElementId::Lab => &self.l_ab,
            ElementId::M => &self.m,
        }
    }

    pub fn converged(&self) -> bool {
        ElementId::ALL.iter().all(|&id| self.get(id).converged)
    }

    /// Multiply every element by `s` (couplings scaled by √s).
    pub fn scaled(&self, s: f64) -> Self {
        let k = Complex64::new(s, 0.0);
        ElementSet {
            l_aa: self.l_aa.scale(k),
            l_bb: self.l_bb.scale(k),
            l_ab: self.l_ab.scale(k),
            m: self.m.scale(k),
            ..self.clone()
        }
    }
}

/// All four elements, computed concurrently.
pub fn compute_elements(scn: &Scenario) -> Result<ElementSet, ElementError> {
    checked(scn)?;
    let reduction = reduction_for(scn)?;
    let ((laa, lbb), (lab, m)) = join(
        || {
            join(
                || compute_with(scn, ElementId::Laa, reduction),
                || compute_with(scn, ElementId::Lbb, reduction),
            )
        },
        || {
            join(
                || compute_with(scn, ElementId::Lab, reduction),
                || compute_with(scn, ElementId::M, reduction),
            )
        },
    );
    Ok(ElementSet {
        l_aa: laa?,
        l_bb: lbb?,
        l_ab: lab?,
        m: m?,
        model: scn.model,
        epsilon: scn.epsilon,
        fingerprint: scn.fingerprint(),
        exploratory: reduction.is_monte_carlo(),
    })
}
