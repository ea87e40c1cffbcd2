//! Exact ladder-operator checks of the vacuum contraction identities on a
//! truncated Fock space.
//!
//! Two ladder families: `a` (particles) and `b` (antiparticles). The real
//! field uses `a` alone. States are sparse maps from occupation vectors to
//! amplitudes.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::quadrature::seeded_rng;

pub const MAX_MODES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WickError {
    #[error("mode count must be between 0 and {MAX_MODES}, got {0}")]
    ModeCount(usize),
    #[error("occupation cutoff must be at least 2, got {0}")]
    Cutoff(u8),
    #[error("momenta and weights differ in length")]
    Shape,
    #[error("mode momentum must be nonzero and weights positive")]
    Mode,
    #[error("epsilon must be positive")]
    Epsilon,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedModeSet {
    momenta: Vec<[f64; 3]>,
    weights: Vec<f64>,
    n_max: u8,
    epsilon: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: [f64; 3],
}

impl SpacetimePoint {
    pub fn new(t: f64, x: [f64; 3]) -> Self {
        SpacetimePoint { t, x }
    }
}

fn norm3(k: &[f64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
}

/// u(p) = √(w e^{−εk}/(2(2π)³k)) e^{−i(kt − k·x)}.
fn amplitude(k: &[f64; 3], w: f64, eps: f64, p: &SpacetimePoint) -> Complex64 {
    let km = norm3(k);
    let mag = (w * (-eps * km).exp() / (2.0 * (2.0 * PI).powi(3) * km)).sqrt();
    let phase = -(km * p.t - (k[0] * p.x[0] + k[1] * p.x[1] + k[2] * p.x[2]));
    Complex64::from_polar(mag, phase)
}

/// Riemann-sum two-point function ⟨φ(p1)φ(p2)⟩ = Σ_j u_j(p1) conj(u_j(p2))
/// over an arbitrary mode list (no Fock space needed).
pub fn mode_sum_two_point(
    momenta: &[[f64; 3]],
    weights: &[f64],
    eps: f64,
    p1: &SpacetimePoint,
    p2: &SpacetimePoint,
) -> Complex64 {
    momenta
        .iter()
        .zip(weights)
        .map(|(k, &w)| amplitude(k, w, eps, p1) * amplitude(k, w, eps, p2).conj())
        .sum()
}

/// Midpoint grid in (|k|, cosθ) with azimuthal symmetry about the z axis,
/// approximating ∫d³k for separations along z.
pub fn spherical_grid(k_max: f64, n_k: usize, n_cos: usize) -> (Vec<[f64; 3]>, Vec<f64>) {
    let dk = k_max / n_k as f64;
    let dc = 2.0 / n_cos as f64;
    let mut momenta = Vec::with_capacity(n_k * n_cos);
    let mut weights = Vec::with_capacity(n_k * n_cos);
    for i in 0..n_k {
        let k = (i as f64 + 0.5) * dk;
        for j in 0..n_cos {
            let c = -1.0 + (j as f64 + 0.5) * dc;
            let s = (1.0 - c * c).sqrt();
            momenta.push([k * s, 0.0, k * c]);
            weights.push(2.0 * PI * k * k * dk * dc);
        }
    }
    (momenta, weights)
}

impl TruncatedModeSet {
    pub fn new(
        momenta: Vec<[f64; 3]>,
        weights: Vec<f64>,
        n_max: u8,
        epsilon: f64,
    ) -> Result<Self, WickError> {
        if momenta.len() > MAX_MODES {
            return Err(WickError::ModeCount(momenta.len()));
        }
        if momenta.len() != weights.len() {
            return Err(WickError::Shape);
        }
        if n_max < 2 {
            return Err(WickError::Cutoff(n_max));
        }
        if !(epsilon > 0.0) {
            return Err(WickError::Epsilon);
        }
        if momenta.iter().any(|k| !(norm3(k) > 0.0)) || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(WickError::Mode);
        }
        Ok(TruncatedModeSet {
            momenta,
            weights,
            n_max,
            epsilon,
        })
    }

    /// Random momenta in [−2, 2]³, weights in [0.5, 2], ε in [0.05, 1].
    pub fn random(modes: usize, seed: u64) -> Result<Self, WickError> {
        let mut rng = seeded_rng(seed, 0);
        let momenta = (0..modes)
            .map(|_| [0; 3].map(|_: i32| rng.random_range(-2.0..2.0)))
            .collect();
        let weights = (0..modes).map(|_| rng.random_range(0.5..2.0)).collect();
        let eps = rng.random_range(0.05..1.0);
        TruncatedModeSet::new(momenta, weights, 2, eps)
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }

    fn u(&self, j: usize, p: &SpacetimePoint) -> Complex64 {
        amplitude(&self.momenta[j], self.weights[j], self.epsilon, p)
    }
}

pub fn random_point(seed: u64, stream: u64) -> SpacetimePoint {
    let mut rng = seeded_rng(seed, stream);
    SpacetimePoint {
        t: rng.random_range(-2.0..2.0),
        x: [0; 3].map(|_: i32| rng.random_range(-2.0..2.0)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    A,
    B,
}

#[derive(Clone, Copy, Debug)]
struct Ladder {
    family: Family,
    mode: usize,
    dagger: bool,
}

type Occupation = [u8; 2 * MAX_MODES];

#[derive(Clone, Debug, Default)]
struct State(BTreeMap<Occupation, Complex64>);

/// A linear combination of single ladder operators.
#[derive(Clone, Debug, Default)]
struct Field(Vec<(Ladder, Complex64)>);

impl State {
    fn vacuum() -> Self {
        let mut m = BTreeMap::new();
        m.insert([0; 2 * MAX_MODES], Complex64::new(1.0, 0.0));
        State(m)
    }

    fn one_particle(family: Family, mode: usize) -> Self {
        let mut occ = [0; 2 * MAX_MODES];
        occ[slot(family, mode)] = 1;
        let mut m = BTreeMap::new();
        m.insert(occ, Complex64::new(1.0, 0.0));
        State(m)
    }

    fn add_scaled(&mut self, other: &State, c: Complex64) {
        for (occ, amp) in &other.0 {
            *self.0.entry(*occ).or_default() += amp * c;
        }
    }

    fn vacuum_amplitude(&self) -> Complex64 {
        self.0.get(&[0; 2 * MAX_MODES]).copied().unwrap_or_default()
    }

    fn max_abs_diff(&self, other: &State) -> f64 {
        let mut d = self.clone();
        d.add_scaled(other, Complex64::new(-1.0, 0.0));
        d.0.values().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

fn slot(family: Family, mode: usize) -> usize {
    match family {
        Family::A => mode,
        Family::B => MAX_MODES + mode,
    }
}

impl Field {
    fn apply(&self, state: &State, n_max: u8) -> State {
        let mut out = State::default();
        for (op, c) in &self.0 {
            let i = slot(op.family, op.mode);
            for (occ, amp) in &state.0 {
                let n = occ[i];
                let mut next = *occ;
                let factor = if op.dagger {
                    // states above the cutoff cannot return to the vacuum in
                    // the remaining operators of a four-point function
                    if n >= n_max {
                        continue;
                    }
                    next[i] = n + 1;
                    f64::from(n + 1).sqrt()
                } else {
                    if n == 0 {
                        continue;
                    }
                    next[i] = n - 1;
                    f64::from(n).sqrt()
                };
                *out.0.entry(next).or_default() += amp * c * factor;
            }
        }
        out.0.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        out
    }
}

fn ladder(family: Family, mode: usize, dagger: bool) -> Ladder {
    Ladder {
        family,
        mode,
        dagger,
    }
}

impl TruncatedModeSet {
    /// φ(p) = Σ u_j a_j + conj(u_j) a_j†.
    fn real_field(&self, p: &SpacetimePoint) -> Field {
        let mut f = Vec::new();
        for j in 0..self.len() {
            let u = self.u(j, p);
            f.push((ladder(Family::A, j, false), u));
            f.push((ladder(Family::A, j, true), u.conj()));
        }
        Field(f)
    }

    /// Φ⁺(p) = Σ conj(u_j) a_j†.
    fn phi_plus(&self, p: &SpacetimePoint) -> Field {
        Field(
            (0..self.len())
                .map(|j| (ladder(Family::A, j, true), self.u(j, p).conj()))
                .collect(),
        )
    }

    /// Φ⁻(p) = Σ u_j b_j.
    fn phi_minus(&self, p: &SpacetimePoint) -> Field {
        Field(
            (0..self.len())
                .map(|j| (ladder(Family::B, j, false), self.u(j, p)))
                .collect(),
        )
    }

    fn dagger(f: &Field) -> Field {
        Field(
            f.0.iter()
                .map(|(op, c)| (ladder(op.family, op.mode, !op.dagger), c.conj()))
                .collect(),
        )
    }

    /// Φ = Φ⁺ + Φ⁻.
    fn complex_field(&self, p: &SpacetimePoint) -> Field {
        let mut f = self.phi_plus(p);
        f.0.extend(self.phi_minus(p).0);
        f
    }

    fn chain(&self, ops: &[&Field], state: &State) -> State {
        ops.iter()
            .rev()
            .fold(state.clone(), |s, f| f.apply(&s, self.n_max))
    }
}

/// ⟨0|φ(p1)φ(p2)|0⟩ on the mode set.
pub fn two_point(modes: &TruncatedModeSet, p1: &SpacetimePoint, p2: &SpacetimePoint) -> Complex64 {
    mode_sum_two_point(&modes.momenta, &modes.weights, modes.epsilon, p1, p2)
}

/// ⟨0|Φ(p1)Φ†(p1)Φ(p2)Φ†(p2)|0⟩ by explicit operator algebra.
pub fn fourpoint_complex(
    modes: &TruncatedModeSet,
    p1: &SpacetimePoint,
    p2: &SpacetimePoint,
) -> Complex64 {
    let f1 = modes.complex_field(p1);
    let f2 = modes.complex_field(p2);
    let d1 = TruncatedModeSet::dagger(&f1);
    let d2 = TruncatedModeSet::dagger(&f2);
    modes
        .chain(&[&f1, &d1, &f2, &d2], &State::vacuum())
        .vacuum_amplitude()
}

/// :AB:|ψ⟩ = AB|ψ⟩ − ⟨0|AB|0⟩|ψ⟩.
fn normal_ordered_pair(modes: &TruncatedModeSet, a: &Field, b: &Field, state: &State) -> State {
    let vev = modes.chain(&[a, b], &State::vacuum()).vacuum_amplitude();
    let mut out = modes.chain(&[a, b], state);
    out.add_scaled(state, -vev);
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WickReport {
    pub identity: String,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_err: f64,
    pub pass: bool,
}

pub const WICK_TOL: f64 = 1e-12;

fn report(identity: &str, lhs: Complex64, rhs: Complex64) -> WickReport {
    let abs_err = (lhs - rhs).norm();
    WickReport {
        identity: identity.to_string(),
        lhs,
        rhs,
        abs_err,
        pass: abs_err <= WICK_TOL,
    }
}

/// ⟨:ΦΦ†:(p1) :ΦΦ†:(p2)⟩ = D(p1, p2)².
pub fn wick_check_complex(
    modes: &TruncatedModeSet,
    p1: &SpacetimePoint,
    p2: &SpacetimePoint,
) -> WickReport {
    let f1 = modes.complex_field(p1);
    let f2 = modes.complex_field(p2);
    let d1 = TruncatedModeSet::dagger(&f1);
    let d2 = TruncatedModeSet::dagger(&f2);
    let right = normal_ordered_pair(modes, &f2, &d2, &State::vacuum());
    let lhs = normal_ordered_pair(modes, &f1, &d1, &right).vacuum_amplitude();
    report(
        "<:PhiPhi^dag:(p1) :PhiPhi^dag:(p2)> = D^2",
        lhs,
        two_point(modes, p1, p2).powu(2),
    )
}

/// ⟨:φ²:(p1) :φ²:(p2)⟩ = 2 D(p1, p2)².
pub fn wick_check_real(
    modes: &TruncatedModeSet,
    p1: &SpacetimePoint,
    p2: &SpacetimePoint,
) -> WickReport {
    let f1 = modes.real_field(p1);
    let f2 = modes.real_field(p2);
    let right = normal_ordered_pair(modes, &f2, &f2, &State::vacuum());
    let lhs = normal_ordered_pair(modes, &f1, &f1, &right).vacuum_amplitude();
    report(
        "<:phi^2:(p1) :phi^2:(p2)> = 2 D^2",
        lhs,
        2.0 * two_point(modes, p1, p2).powu(2),
    )
}

/// ⟨ΦΦ†ΦΦ†⟩ = D(1,1)D(2,2) + D(1,2)².
pub fn wick_check_fourpoint(
    modes: &TruncatedModeSet,
    p1: &SpacetimePoint,
    p2: &SpacetimePoint,
) -> WickReport {
    let rhs =
        two_point(modes, p1, p1) * two_point(modes, p2, p2) + two_point(modes, p1, p2).powu(2);
    report(
        "<Phi Phi^dag Phi Phi^dag> = D11 D22 + D12^2",
        fourpoint_complex(modes, p1, p2),
        rhs,
    )
}

/// [Φ⁻(p), Φ⁺(q)] = 0, [Φ⁻(p), Φ⁻†(q)] = C(p, q) and [Φ⁺†(p), Φ⁺(q)] = C(p, q),
/// checked on the vacuum and every one-particle state.
pub fn commutator_checks(
    modes: &TruncatedModeSet,
    p: &SpacetimePoint,
    q: &SpacetimePoint,
) -> Vec<WickReport> {
    let mut states = vec![State::vacuum()];
    for j in 0..modes.len() {
        states.push(State::one_particle(Family::A, j));
        states.push(State::one_particle(Family::B, j));
    }
    let c = two_point(modes, p, q);
    let minus_p = modes.phi_minus(p);
    let plus_q = modes.phi_plus(q);
    let minus_dag_q = TruncatedModeSet::dagger(&modes.phi_minus(q));
    let plus_dag_p = TruncatedModeSet::dagger(&modes.phi_plus(p));

    let worst = |x: &Field, y: &Field, scalar: Complex64| {
        states
            .iter()
            .map(|s| {
                let mut comm = modes.chain(&[x, y], s);
                comm.add_scaled(&modes.chain(&[y, x], s), Complex64::new(-1.0, 0.0));
                let mut expected = State::default();
                expected.add_scaled(s, scalar);
                comm.max_abs_diff(&expected)
            })
            .fold(0.0, f64::max)
    };
    let entry = |identity: &str, err: f64, rhs: Complex64| WickReport {
        identity: identity.to_string(),
        lhs: rhs,
        rhs,
        abs_err: err,
        pass: err <= WICK_TOL,
    };
    let zero = Complex64::new(0.0, 0.0);
    vec![
        entry(
            "[Phi^-(p), Phi^+(q)] = 0",
            worst(&minus_p, &plus_q, zero),
            zero,
        ),
        entry(
            "[Phi^-(p), Phi^-dag(q)] = C(p,q)",
            worst(&minus_p, &minus_dag_q, c),
            c,
        ),
        entry(
            "[Phi^+dag(p), Phi^+(q)] = C(p,q)",
            worst(&plus_dag_p, &plus_q, c),
            c,
        ),
    ]
}
