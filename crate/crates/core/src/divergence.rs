//! Regulator sweeps, divergence classification and vertex regularizations.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elements::{compute_elements, ElementError, ElementId, ElementSet};
use crate::measures::{measure_report, MeasureReport};
use crate::quadrature::seeded_rng;
use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Epsilon,
    GapDetuning,
    Separation,
}

impl SweepParam {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "epsilon" => Some(SweepParam::Epsilon),
            "gap_detuning" => Some(SweepParam::GapDetuning),
            "separation" => Some(SweepParam::Separation),
            _ => None,
        }
    }

    /// Scenario at one grid value. Detuning sets Ω_B = Ω_A + δ; separation moves
    /// B along the current A→B direction (x axis if coincident).
    pub fn apply(self, base: &Scenario, value: f64) -> Scenario {
        let mut s = *base;
        match self {
            SweepParam::Epsilon => s.epsilon = value,
            SweepParam::GapDetuning => s.detector_b.gap = s.detector_a.gap + value,
            SweepParam::Separation => {
                let a = s.detector_a.center_x;
                let b = s.detector_b.center_x;
                let d = base.separation();
                let dir = if d > 0.0 {
                    [(b[0] - a[0]) / d, (b[1] - a[1]) / d, (b[2] - a[2]) / d]
                } else {
                    [1.0, 0.0, 0.0]
                };
                for c in 0..3 {
                    s.detector_b.center_x[c] = a[c] + value * dir[c];
                }
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: Scenario,
    pub param: SweepParam,
    pub grid: Vec<f64>,
    pub elements: Vec<ElementId>,
}

impl SweepSpec {
    pub fn new(base: Scenario, param: SweepParam, grid: Vec<f64>) -> Self {
        SweepSpec {
            base,
            param,
            grid,
            elements: ElementId::ALL.to_vec(),
        }
    }
}

/// `n` log-spaced values from `from` to `to` inclusive.
pub fn log_grid(from: f64, to: f64, n: usize) -> Vec<f64> {
    let (a, b) = (from.ln(), to.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                from
            } else if i + 1 == n {
                to
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

pub fn linear_grid(from: f64, to: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| from + (to - from) * i as f64 / (n - 1).max(1) as f64)
        .collect()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DivergenceError {
    #[error("sweep grid must be strictly monotone with at least 5 points")]
    Grid,
    #[error("a cutoff sweep must vary epsilon over at least two decades")]
    Span,
    #[error(transparent)]
    Element(#[from] ElementError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param_value: f64,
    pub scenario: Scenario,
    pub elements: ElementSet,
    pub measures: Option<MeasureReport>,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn series(&self, element: ElementId) -> Vec<SeriesPoint> {
        self.points
            .iter()
            .map(|p| {
                let e = p.elements.get(element);
                SeriesPoint {
                    x: p.param_value,
                    y: e.value.norm(),
                    err: e.err,
                    converged: e.converged,
                }
            })
            .collect()
    }
}

fn monotone(grid: &[f64]) -> bool {
    grid.len() >= 5
        && grid.iter().all(|v| v.is_finite())
        && (grid.windows(2).all(|w| w[1] > w[0]) || grid.windows(2).all(|w| w[1] < w[0]))
}

/// Evaluates every grid point (in parallel, reported in grid order).
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult, DivergenceError> {
    if !monotone(&spec.grid) {
        return Err(DivergenceError::Grid);
    }
    let points: Result<Vec<SweepPoint>, ElementError> = spec
        .grid
        .par_iter()
        .map(|&v| {
            let scn = spec.param.apply(&spec.base, v);
            let elements = compute_elements(&scn)?;
            let mut flags = Vec::new();
            if !elements.converged() {
                flags.push("nonconverged".to_string());
            }
            if elements.exploratory {
                flags.push("exploratory".to_string());
            }
            let measures = match measure_report(&elements) {
                Ok(m) => Some(m),
                Err(_) => {
                    flags.push("nonperturbative".to_string());
                    None
                }
            };
            if let Some(d) = scn.nascent_delta {
                flags.push(format!("delta={d}"));
            }
            Ok(SweepPoint {
                param_value: v,
                scenario: scn,
                elements,
                measures,
                flags,
            })
        })
        .collect();
    Ok(SweepResult {
        spec: spec.clone(),
        points: points?,
    })
}

pub fn cutoff_sweep(spec: &SweepSpec) -> Result<SweepResult, DivergenceError> {
    if spec.param != SweepParam::Epsilon {
        return Err(DivergenceError::Span);
    }
    if !monotone(&spec.grid) {
        return Err(DivergenceError::Grid);
    }
    let lo = spec.grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = spec.grid.iter().copied().fold(0.0, f64::max);
    if hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(DivergenceError::Span);
    }
    sweep(spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub x: f64,
    pub y: f64,
    pub err: f64,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Convergent,
    DivergentLog,
    DivergentPower,
    Undetermined,
}

impl Classification {
    pub fn is_divergent(self) -> bool {
        matches!(
            self,
            Classification::DivergentLog | Classification::DivergentPower
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitSummary {
    pub a: f64,
    pub b: f64,
    /// Root-mean-square relative residual.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceVerdict {
    pub classification: Classification,
    /// Slope b (limit and log models) or exponent p (power model) of the pick.
    pub parameter: f64,
    pub ci: (f64, f64),
    /// Relative change of |value| across the final (smallest-ε) decade.
    pub tail_stability: f64,
    pub limit_fit: FitSummary,
    pub log_fit: FitSummary,
    pub power_fit: FitSummary,
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub tail_threshold: f64,
    /// Parsimony: the limit model wins unless a divergent model beats its
    /// residual by this factor.
    pub parsimony: f64,
    /// Minimum fitted growth across the sweep, in units of the fit residual.
    pub min_growth_sigmas: f64,
    pub bootstrap: usize,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            tail_threshold: 0.01,
            parsimony: 1.1,
            min_growth_sigmas: 4.0,
            bootstrap: 400,
            seed: 0xd1_7e,
        }
    }
}

/// Least squares y ≈ a + b·u.
fn line_fit(u: &[f64], y: &[f64]) -> (f64, f64) {
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = u.iter().map(|x| (x - mu).powi(2)).sum();
    let sxy: f64 = u.iter().zip(y).map(|(x, v)| (x - mu) * (v - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - b * mu, b)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Model {
    Limit,
    Log,
    Power,
}

impl Model {
    fn fit(self, x: &[f64], y: &[f64]) -> (f64, f64) {
        match self {
            Model::Limit => line_fit(x, y),
            Model::Log => {
                let u: Vec<f64> = x.iter().map(|e| (1.0 / e).ln()).collect();
                line_fit(&u, y)
            }
            Model::Power => {
                // ln y = ln a + p ln(1/ε)
                let u: Vec<f64> = x.iter().map(|e| (1.0 / e).ln()).collect();
                let ly: Vec<f64> = y.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
                let (la, p) = line_fit(&u, &ly);
                (la.exp(), p)
            }
        }
    }

    fn predict(self, (a, b): (f64, f64), x: f64) -> f64 {
        match self {
            Model::Limit => a + b * x,
            Model::Log => a + b * (1.0 / x).ln(),
            Model::Power => a * x.powf(-b),
        }
    }

    fn summary(self, x: &[f64], y: &[f64]) -> FitSummary {
        let (a, b) = self.fit(x, y);
        FitSummary {
            a,
            b,
            residual: relative_residual(x, y, |v| self.predict((a, b), v)),
        }
    }
}

fn relative_residual(x: &[f64], y: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let scale = y
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| ((yi - f(xi)) / yi.abs().max(1e-300 * scale)).powi(2))
        .sum();
    (ss / x.len() as f64).sqrt()
}

/// |y(ε_min) − y(10ε_min)| / |y(ε_min)|, interpolating linearly in ln ε.
fn tail_stability(x: &[f64], y: &[f64]) -> f64 {
    let mut pts: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (x0, y0) = pts[0];
    let target = (10.0 * x0).ln();
    let mut y_dec = pts.last().expect("nonempty").1;
    for w in pts.windows(2) {
        let (l0, l1) = (w[0].0.ln(), w[1].0.ln());
        if l0 <= target && target <= l1 {
            let f = if l1 > l0 {
                (target - l0) / (l1 - l0)
            } else {
                0.0
            };
            y_dec = w[0].1 + f * (w[1].1 - w[0].1);
            break;
        }
    }
    ((y0 - y_dec) / y0).abs()
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

fn bootstrap_ci(model: Model, x: &[f64], y: &[f64], cfg: &ClassifierConfig) -> (f64, f64) {
    let params = model.fit(x, y);
    let fitted: Vec<f64> = x.iter().map(|&v| model.predict(params, v)).collect();
    let resid: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let mut rng = seeded_rng(cfg.seed, 0);
    let mut draws: Vec<f64> = (0..cfg.bootstrap)
        .map(|_| {
            let yb: Vec<f64> = fitted
                .iter()
                .map(|f| f + resid[rng.random_range(0..resid.len())])
                .collect();
            model.fit(x, &yb).1
        })
        .collect();
    draws.sort_by(f64::total_cmp);
    (percentile(&draws, 0.025), percentile(&draws, 0.975))
}

/// Classifies |value| of a series against ε: limit a + bε, a + b ln(1/ε),
/// or a ε^{−p}.
pub fn classify_series(points: &[SeriesPoint], cfg: &ClassifierConfig) -> DivergenceVerdict {
    let good: Vec<&SeriesPoint> = points
        .iter()
        .filter(|p| p.converged && p.y.is_finite())
        .collect();
    let x: Vec<f64> = good.iter().map(|p| p.x).collect();
    let y: Vec<f64> = good.iter().map(|p| p.y).collect();
    let empty = FitSummary {
        a: f64::NAN,
        b: f64::NAN,
        residual: f64::NAN,
    };
    let undetermined = |note: &str, tail: f64, fits: [FitSummary; 3]| DivergenceVerdict {
        classification: Classification::Undetermined,
        parameter: f64::NAN,
        ci: (f64::NAN, f64::NAN),
        tail_stability: tail,
        limit_fit: fits[0],
        log_fit: fits[1],
        power_fit: fits[2],
        note: note.to_string(),
    };
    if x.len() < 5 {
        return undetermined("fewer than 5 converged points", f64::NAN, [empty; 3]);
    }
    if y.iter().all(|v| *v == 0.0) {
        return DivergenceVerdict {
            classification: Classification::Convergent,
            parameter: 0.0,
            ci: (0.0, 0.0),
            tail_stability: 0.0,
            limit_fit: empty,
            log_fit: empty,
            power_fit: empty,
            note: "identically zero".into(),
        };
    }
    let tail = tail_stability(&x, &y);
    let fits = [Model::Limit, Model::Log, Model::Power].map(|m| m.summary(&x, &y));
    let [limit, log, power] = fits;

    let (divergent_model, div_fit) = if log.residual <= power.residual {
        (Model::Log, log)
    } else {
        (Model::Power, power)
    };
    let chosen = if tail < cfg.tail_threshold || limit.residual <= cfg.parsimony * div_fit.residual
    {
        Model::Limit
    } else {
        // growth as ε decreases must clear the fit noise
        let params = (div_fit.a, div_fit.b);
        let (lo, hi) = x
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        let at_small = divergent_model.predict(params, lo);
        let growth = (at_small - divergent_model.predict(params, hi)) / at_small.abs();
        if growth > cfg.min_growth_sigmas * div_fit.residual.max(1e-15) {
            divergent_model
        } else {
            Model::Limit
        }
    };

    let fit = match chosen {
        Model::Limit => limit,
        Model::Log => log,
        Model::Power => power,
    };
    let fitted: Vec<f64> = x
        .iter()
        .map(|&v| chosen.predict((fit.a, fit.b), v))
        .collect();
    let variation = fitted.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - fitted.iter().copied().fold(f64::INFINITY, f64::min);
    let max_err = good.iter().map(|p| p.err).fold(0.0, f64::max);
    if max_err > 0.1 * variation && max_err > 0.0 {
        return undetermined(
            "quadrature errors exceed 10% of the fitted variation",
            tail,
            fits,
        );
    }
    let classification = match chosen {
        Model::Limit => Classification::Convergent,
        Model::Log => Classification::DivergentLog,
        Model::Power => Classification::DivergentPower,
    };
    DivergenceVerdict {
        classification,
        parameter: fit.b,
        ci: bootstrap_ci(chosen, &x, &y, cfg),
        tail_stability: tail,
        limit_fit: limit,
        log_fit: log,
        power_fit: power,
        note: String::new(),
    }
}

pub fn classify(result: &SweepResult, element: ElementId) -> DivergenceVerdict {
    classify_series(&result.series(element), &ClassifierConfig::default())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetuningPoint {
    pub detuning: f64,
    pub m_abs: f64,
    pub elements: ElementSet,
    pub verdict: DivergenceVerdict,
}

/// |M| against Ω_B − Ω_A at the base ε, each with a 5-point ε mini-sweep
/// over [ε, 100ε] for its own verdict. Descriptive output only.
pub fn detuning_scan(
    base: &Scenario,
    detunings: &[f64],
) -> Result<Vec<DetuningPoint>, DivergenceError> {
    detunings
        .iter()
        .map(|&delta| {
            let scn = SweepParam::GapDetuning.apply(base, delta);
            let elements = compute_elements(&scn)?;
            let mini = sweep(&SweepSpec::new(
                scn,
                SweepParam::Epsilon,
                log_grid(base.epsilon, 100.0 * base.epsilon, 5),
            ))?;
            Ok(DetuningPoint {
                detuning: delta,
                m_abs: elements.m().norm(),
                elements,
                verdict: classify(&mini, ElementId::M),
            })
        })
        .collect()
}
