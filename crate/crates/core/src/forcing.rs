//! Non-autonomous right-hand sides `f(x, t) = sum_i p_i(x) e_i(t)`.
//!
//! Every temporal envelope is a constant plus a finite cosine sum, so it is
//! bounded on the whole real line and has closed-form primitives.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::Field;
use crate::grid::{Grid, GridKind, GridSpec};

/// Anything that can be sampled as a right-hand side on a grid.
pub trait Source: Send + Sync {
    fn sample(&self, t: f64, grid: &Grid) -> Result<Vec<f64>>;

    /// True when the source vanishes identically.
    fn is_zero(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpatialProfile {
    /// `amplitude * sin(k pi x)`
    Sine { k: u32, amplitude: f64 },
    /// `amplitude * cos(k pi x)`
    Cosine { k: u32, amplitude: f64 },
    /// Nodal values on a fixed grid.
    Tabulated { grid: GridSpec, values: Vec<f64> },
}

impl SpatialProfile {
    pub fn sine(k: u32, amplitude: f64) -> Self {
        SpatialProfile::Sine { k, amplitude }
    }

    pub fn cosine(k: u32, amplitude: f64) -> Self {
        SpatialProfile::Cosine { k, amplitude }
    }

    pub fn constant(value: f64) -> Self {
        SpatialProfile::Cosine { k: 0, amplitude: value }
    }

    /// Nodal values on `grid`.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            SpatialProfile::Sine { k, amplitude } => {
                let w = *k as f64 * PI;
                Ok(grid.sample(|x| amplitude * (w * x).sin()))
            }
            SpatialProfile::Cosine { k, amplitude } => {
                let w = *k as f64 * PI;
                Ok(grid.sample(|x| amplitude * (w * x).cos()))
            }
            SpatialProfile::Tabulated { grid: spec, values } => {
                if *spec != grid.spec() {
                    return Err(LabError::IncompatibleForcing(format!(
                        "tabulated profile lives on {:?} n={}, grid is {:?} n={}",
                        spec.kind,
                        spec.n,
                        grid.kind(),
                        grid.n()
                    )));
                }
                Ok(values.clone())
            }
        }
    }

    /// `int_0^1 p(x) dx` (rectangle rule for tabulated profiles).
    pub fn mean(&self) -> f64 {
        match self {
            SpatialProfile::Sine { k, amplitude } => amplitude * sine_integral(*k as i64),
            SpatialProfile::Cosine { k, amplitude } => amplitude * cosine_integral(*k as i64),
            SpatialProfile::Tabulated { grid, values } => {
                values.iter().sum::<f64>() / grid.n as f64
            }
        }
    }

    pub fn periodic_compatible(&self) -> bool {
        match self {
            SpatialProfile::Sine { k, .. } | SpatialProfile::Cosine { k, .. } => k % 2 == 0,
            SpatialProfile::Tabulated { grid, .. } => grid.kind == GridKind::PeriodicMeanFree,
        }
    }

    fn mean_removed(&self) -> Option<SpatialProfile> {
        match self {
            SpatialProfile::Cosine { k: 0, .. } => None,
            SpatialProfile::Tabulated { grid, values } => {
                let m = values.iter().sum::<f64>() / values.len() as f64;
                Some(SpatialProfile::Tabulated {
                    grid: *grid,
                    values: values.iter().map(|v| v - m).collect(),
                })
            }
            other => Some(other.clone()),
        }
    }
}

/// `int_0^1 cos(m pi x) dx` for integer `m`.
fn cosine_integral(m: i64) -> f64 {
    if m == 0 {
        1.0
    } else {
        0.0
    }
}

/// `int_0^1 sin(m pi x) dx` for integer `m`.
fn sine_integral(m: i64) -> f64 {
    if m % 2 == 0 {
        0.0
    } else {
        2.0 / (m as f64 * PI)
    }
}

/// Exact `L^2(0,1)` inner product of two profiles.
fn profile_inner(p: &SpatialProfile, q: &SpatialProfile) -> Result<f64> {
    use SpatialProfile::*;
    Ok(match (p, q) {
        (Sine { k: a, amplitude: x }, Sine { k: b, amplitude: y }) => {
            let (a, b) = (*a as i64, *b as i64);
            x * y * 0.5 * (cosine_integral(a - b) - cosine_integral(a + b))
        }
        (Cosine { k: a, amplitude: x }, Cosine { k: b, amplitude: y }) => {
            let (a, b) = (*a as i64, *b as i64);
            x * y * 0.5 * (cosine_integral(a - b) + cosine_integral(a + b))
        }
        (Sine { k: a, amplitude: x }, Cosine { k: b, amplitude: y })
        | (Cosine { k: b, amplitude: y }, Sine { k: a, amplitude: x }) => {
            let (a, b) = (*a as i64, *b as i64);
            x * y * 0.5 * (sine_integral(a + b) + sine_integral(a - b))
        }
        (Tabulated { grid, values }, other) | (other, Tabulated { grid, values }) => {
            let g = Grid::new(grid.kind, grid.n)?;
            let o = other.sample(&g)?;
            g.h() * values.iter().zip(&o).map(|(a, b)| a * b).sum::<f64>()
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Envelope {
    Constant {
        value: f64,
    },
    /// `amplitude * cos(omega t + phase)`
    Cos {
        #[serde(default = "one")]
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Fixed-seed Gaussian cosine sum with `cutoff` incommensurate
    /// frequencies in `(0, cutoff * base_frequency]`, normalized so the
    /// supremum over the real line is exactly 1.
    BandLimitedRandom {
        seed: u64,
        cutoff: usize,
        #[serde(default = "one")]
        base_frequency: f64,
    },
    /// `(cos(omega1 t) + cos(omega2 t)) / 2`
    QuasiPeriodic { omega1: f64, omega2: f64 },
}

fn one() -> f64 {
    1.0
}

/// One cosine component `amplitude * cos(omega t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
}

impl Envelope {
    pub fn constant(value: f64) -> Self {
        Envelope::Constant { value }
    }

    pub fn cos(omega: f64) -> Self {
        Envelope::Cos {
            amplitude: 1.0,
            omega,
            phase: 0.0,
        }
    }

    /// Constant part and cosine modes.
    pub fn decompose(&self) -> (f64, Vec<Mode>) {
        match self {
            Envelope::Constant { value } => (*value, Vec::new()),
            Envelope::Cos {
                amplitude,
                omega,
                phase,
            } => (
                0.0,
                vec![Mode {
                    amplitude: *amplitude,
                    omega: *omega,
                    phase: *phase,
                }],
            ),
            Envelope::QuasiPeriodic { omega1, omega2 } => (
                0.0,
                vec![
                    Mode {
                        amplitude: 0.5,
                        omega: *omega1,
                        phase: 0.0,
                    },
                    Mode {
                        amplitude: 0.5,
                        omega: *omega2,
                        phase: 0.0,
                    },
                ],
            ),
            Envelope::BandLimitedRandom {
                seed,
                cutoff,
                base_frequency,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut modes: Vec<Mode> = (0..*cutoff)
                    .map(|j| {
                        let g: f64 = rng.sample(StandardNormal);
                        let detune: f64 = rng.random_range(0.05..0.95);
                        let phase: f64 = rng.random_range(0.0..2.0 * PI);
                        Mode {
                            amplitude: g,
                            omega: base_frequency * (j as f64 + detune),
                            phase,
                        }
                    })
                    .collect();
                let total: f64 = modes.iter().map(|m| m.amplitude.abs()).sum();
                if total > 0.0 {
                    for m in &mut modes {
                        m.amplitude /= total;
                    }
                }
                (0.0, modes)
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (c, modes) = self.decompose();
        c + modes
            .iter()
            .map(|m| m.amplitude * (m.omega * t + m.phase).cos())
            .sum::<f64>()
    }

    /// `sup_t |e(t)|` over the real line.
    pub fn sup(&self) -> f64 {
        match self {
            Envelope::Constant { value } => value.abs(),
            Envelope::Cos {
                amplitude, omega, ..
            } => {
                if *omega == 0.0 {
                    self.eval(0.0).abs()
                } else {
                    amplitude.abs()
                }
            }
            Envelope::QuasiPeriodic { .. } => 1.0,
            Envelope::BandLimitedRandom { cutoff, .. } => {
                if *cutoff == 0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Envelope::Constant { .. } => true,
            Envelope::Cos { omega, .. } => *omega == 0.0,
            Envelope::QuasiPeriodic { omega1, omega2 } => *omega1 == 0.0 && *omega2 == 0.0,
            Envelope::BandLimitedRandom { cutoff, .. } => *cutoff == 0,
        }
    }

    /// `int_{t0}^{t} e(s) ds`
    pub fn integral(&self, t0: f64, t: f64) -> f64 {
        let (c, modes) = self.decompose();
        c * (t - t0)
            + modes
                .iter()
                .map(|m| {
                    if m.omega == 0.0 {
                        m.amplitude * m.phase.cos() * (t - t0)
                    } else {
                        m.amplitude * ((m.omega * t + m.phase).sin() - (m.omega * t0 + m.phase).sin())
                            / m.omega
                    }
                })
                .sum::<f64>()
    }

    /// `int_{t0}^{t} int_{t0}^{s} e(r) dr ds`
    pub fn double_integral(&self, t0: f64, t: f64) -> f64 {
        let (c, modes) = self.decompose();
        let s = t - t0;
        c * s * s / 2.0
            + modes
                .iter()
                .map(|m| {
                    if m.omega == 0.0 {
                        m.amplitude * m.phase.cos() * s * s / 2.0
                    } else {
                        let w = m.omega;
                        let a0 = w * t0 + m.phase;
                        let a1 = w * t + m.phase;
                        m.amplitude * ((a0.cos() - a1.cos()) / (w * w) - a0.sin() * s / w)
                    }
                })
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcingTerm {
    pub profile: SpatialProfile,
    pub envelope: Envelope,
}

/// Serialized form of [`Forcing`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ForcingSpec {
    #[serde(default)]
    pub terms: Vec<ForcingTerm>,
    #[serde(default)]
    pub mean_free: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ForcingSpec", into = "ForcingSpec")]
pub struct Forcing {
    terms: Vec<ForcingTerm>,
    mean_free: bool,
    bound_m: f64,
}

impl TryFrom<ForcingSpec> for Forcing {
    type Error = LabError;

    fn try_from(spec: ForcingSpec) -> Result<Self> {
        Forcing::new(spec.terms, spec.mean_free)
    }
}

impl From<Forcing> for ForcingSpec {
    fn from(f: Forcing) -> Self {
        ForcingSpec {
            terms: f.terms,
            mean_free: f.mean_free,
        }
    }
}

const MEAN_TOL: f64 = 1e-12;

impl Forcing {
    pub fn new(terms: Vec<ForcingTerm>, mean_free: bool) -> Result<Self> {
        let mut tab_grid: Option<GridSpec> = None;
        for term in &terms {
            if let SpatialProfile::Tabulated { grid, values } = &term.profile {
                let g = Grid::new(grid.kind, grid.n)?;
                if g.len() != values.len() {
                    return Err(LabError::InvalidForcing(format!(
                        "tabulated profile has {} values, grid has {} nodes",
                        values.len(),
                        g.len()
                    )));
                }
                match tab_grid {
                    Some(prev) if prev != *grid => {
                        return Err(LabError::InvalidForcing(
                            "tabulated profiles must share one grid".into(),
                        ))
                    }
                    _ => tab_grid = Some(*grid),
                }
            }
            if let Envelope::BandLimitedRandom { base_frequency, .. } = term.envelope {
                if !(base_frequency > 0.0) {
                    return Err(LabError::InvalidForcing(
                        "band-limited envelope needs a positive base frequency".into(),
                    ));
                }
            }
            if mean_free {
                let m = term.profile.mean();
                if m.abs() > MEAN_TOL {
                    return Err(LabError::InvalidForcing(format!(
                        "profile {:?} has mean {m:e} but the forcing is declared mean-free",
                        term.profile
                    )));
                }
            }
        }
        let mut f = Self {
            terms,
            mean_free,
            bound_m: 0.0,
        };
        f.bound_m = f.compute_bound()?;
        Ok(f)
    }

    pub fn zero() -> Self {
        Self {
            terms: Vec::new(),
            mean_free: true,
            bound_m: 0.0,
        }
    }

    /// Single separable term `profile(x) * envelope(t)`.
    pub fn separable(profile: SpatialProfile, envelope: Envelope) -> Result<Self> {
        let mean_free = profile.mean().abs() <= MEAN_TOL;
        Forcing::new(vec![ForcingTerm { profile, envelope }], mean_free)
    }

    pub fn terms(&self) -> &[ForcingTerm] {
        &self.terms
    }

    pub fn is_mean_free(&self) -> bool {
        self.mean_free
    }

    pub fn bound(&self) -> f64 {
        self.bound_m
    }

    pub fn is_autonomous(&self) -> bool {
        self.terms.iter().all(|t| t.envelope.is_constant())
    }

    pub fn check_compatible(&self, grid: &Grid) -> Result<()> {
        if grid.is_periodic() {
            if !self.mean_free {
                return Err(LabError::IncompatibleForcing(
                    "periodic problems need mean-free forcing".into(),
                ));
            }
            if let Some(t) = self.terms.iter().find(|t| !t.profile.periodic_compatible()) {
                return Err(LabError::IncompatibleForcing(format!(
                    "profile {:?} is not 1-periodic",
                    t.profile
                )));
            }
        }
        for t in &self.terms {
            if let SpatialProfile::Tabulated { grid: spec, .. } = &t.profile {
                if *spec != grid.spec() {
                    return Err(LabError::IncompatibleForcing(
                        "tabulated profile lives on a different grid".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Nodal samples without the compatibility check.
    pub(crate) fn sample_raw(&self, t: f64, grid: &Grid) -> Result<Vec<f64>> {
        let mut out = vec![0.0; grid.len()];
        for term in &self.terms {
            let e = term.envelope.eval(t);
            if e == 0.0 {
                continue;
            }
            let p = term.profile.sample(grid)?;
            for (o, v) in out.iter_mut().zip(p) {
                *o += e * v;
            }
        }
        Ok(out)
    }

    /// `alpha(t) = int_0^1 f(x, t) dx`.
    pub fn spatial_mean(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| term.profile.mean() * term.envelope.eval(t))
            .sum()
    }

    /// `int_{t0}^{t} alpha(s) ds`.
    pub fn mean_integral(&self, t0: f64, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| term.profile.mean() * term.envelope.integral(t0, t))
            .sum()
    }

    /// `int_{t0}^{t} int_{t0}^{s} alpha(r) dr ds`.
    pub fn mean_double_integral(&self, t0: f64, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| term.profile.mean() * term.envelope.double_integral(t0, t))
            .sum()
    }

    /// The forcing with its spatial mean removed term by term.
    pub fn mean_removed(&self) -> Result<Forcing> {
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                t.profile.mean_removed().map(|profile| ForcingTerm {
                    profile,
                    envelope: t.envelope.clone(),
                })
            })
            .collect();
        Forcing::new(terms, true)
    }

    /// `L^2` norm of `f(., t)` using exact profile inner products.
    pub fn l2_at(&self, t: f64) -> Result<f64> {
        let e: Vec<f64> = self.terms.iter().map(|term| term.envelope.eval(t)).collect();
        let mut acc = 0.0;
        for (i, ti) in self.terms.iter().enumerate() {
            for (j, tj) in self.terms.iter().enumerate() {
                acc += e[i] * e[j] * profile_inner(&ti.profile, &tj.profile)?;
            }
        }
        Ok(acc.max(0.0).sqrt())
    }

    fn compute_bound(&self) -> Result<f64> {
        if self.terms.is_empty() {
            return Ok(0.0);
        }
        // Terms sharing one envelope collapse to a single profile; with one
        // group the supremum factorizes exactly.
        let mut groups: Vec<(Envelope, Vec<SpatialProfile>)> = Vec::new();
        for t in &self.terms {
            match groups.iter_mut().find(|(e, _)| *e == t.envelope) {
                Some((_, ps)) => ps.push(t.profile.clone()),
                None => groups.push((t.envelope.clone(), vec![t.profile.clone()])),
            }
        }
        let mut gram = vec![vec![0.0; groups.len()]; groups.len()];
        for (i, (_, pi)) in groups.iter().enumerate() {
            for (j, (_, pj)) in groups.iter().enumerate() {
                let mut s = 0.0;
                for p in pi {
                    for q in pj {
                        s += profile_inner(p, q)?;
                    }
                }
                gram[i][j] = s;
            }
        }
        if groups.len() == 1 {
            return Ok(gram[0][0].max(0.0).sqrt() * groups[0].0.sup());
        }
        let envelopes: Vec<Envelope> = groups.into_iter().map(|(e, _)| e).collect();
        Ok(sampled_sup(&envelopes, &gram, 1))
    }
}

/// Supremum of `sqrt(e(t)^T G e(t))` over an oversampled symmetric time
/// window. `refine` multiplies the sampling density.
pub(crate) fn sampled_sup(envelopes: &[Envelope], gram: &[Vec<f64>], refine: usize) -> f64 {
    let omegas: Vec<f64> = envelopes
        .iter()
        .flat_map(|e| e.decompose().1.into_iter().map(|m| m.omega.abs()))
        .filter(|w| *w > 0.0)
        .collect();
    let eval = |t: f64| -> f64 {
        let e: Vec<f64> = envelopes.iter().map(|env| env.eval(t)).collect();
        let mut acc = 0.0;
        for i in 0..e.len() {
            for j in 0..e.len() {
                acc += e[i] * e[j] * gram[i][j];
            }
        }
        acc.max(0.0).sqrt()
    };
    if omegas.is_empty() {
        return eval(0.0);
    }
    let w_max = omegas.iter().cloned().fold(0.0, f64::max);
    let w_min = omegas.iter().cloned().fold(f64::INFINITY, f64::min);
    let dt = 2.0 * PI / (w_max * 64.0 * refine as f64);
    let horizon = (50.0 * 2.0 * PI / w_min).max(100.0);
    let steps = ((horizon / dt) as usize).min(400_000 * refine);
    (0..=steps)
        .flat_map(|i| [i as f64 * dt, -(i as f64) * dt])
        .map(eval)
        .fold(0.0, f64::max)
}

impl Source for Forcing {
    fn sample(&self, t: f64, grid: &Grid) -> Result<Vec<f64>> {
        self.check_compatible(grid)?;
        self.sample_raw(t, grid)
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.bound_m == 0.0
    }
}

pub fn eval_forcing(f: &Forcing, t: f64, grid: &Arc<Grid>) -> Result<Field> {
    let values = f.sample(t, grid)?;
    Field::new(grid.clone(), values, t)
}

pub fn forcing_bound(f: &Forcing) -> f64 {
    f.bound()
}

/// Right-hand side with its spatial mean removed at sampling time.
#[derive(Debug, Clone)]
pub struct MeanFreePart {
    inner: Forcing,
}

impl MeanFreePart {
    pub fn new(inner: Forcing) -> Self {
        Self { inner }
    }
}

impl Source for MeanFreePart {
    fn sample(&self, t: f64, grid: &Grid) -> Result<Vec<f64>> {
        let raw = self.inner.sample_raw(t, grid)?;
        Ok(crate::field::project_mean_free(&raw))
    }
}

/// The zero right-hand side.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoForcing;

impl Source for NoForcing {
    fn sample(&self, _t: f64, grid: &Grid) -> Result<Vec<f64>> {
        Ok(vec![0.0; grid.len()])
    }

    fn is_zero(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn sin2pi_cos_t() -> Forcing {
        Forcing::separable(SpatialProfile::sine(2, 1.0), Envelope::cos(1.0)).unwrap()
    }

    #[test]
    fn zero_forcing_samples_zero() {
        let g = Arc::new(make_grid(GridKind::Dirichlet, 8).unwrap());
        let f = eval_forcing(&Forcing::zero(), 3.7, &g).unwrap();
        assert!(f.values().iter().all(|v| *v == 0.0));
        assert_eq!(forcing_bound(&Forcing::zero()), 0.0);
    }

    #[test]
    fn envelope_phases() {
        let g = Arc::new(make_grid(GridKind::PeriodicMeanFree, 16).unwrap());
        let f = sin2pi_cos_t();
        let at0 = eval_forcing(&f, 0.0, &g).unwrap();
        for (x, v) in g.nodes().iter().zip(at0.values()) {
            assert!((v - (2.0 * PI * x).sin()).abs() < 1e-15);
        }
        let quarter = eval_forcing(&f, PI / 2.0, &g).unwrap();
        assert!(quarter.max_abs() < 1e-15);
    }

    #[test]
    fn bound_of_separable_term() {
        assert!((forcing_bound(&sin2pi_cos_t()) - 0.5_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn periodic_grid_requires_mean_free() {
        let g = make_grid(GridKind::PeriodicMeanFree, 16).unwrap();
        let f = Forcing::separable(SpatialProfile::constant(1.0), Envelope::constant(1.0)).unwrap();
        assert!(matches!(
            f.sample(0.0, &g),
            Err(LabError::IncompatibleForcing(_))
        ));
        let odd = Forcing::separable(SpatialProfile::sine(1, 1.0), Envelope::constant(1.0)).unwrap();
        assert!(odd.sample(0.0, &g).is_err());
    }

    #[test]
    fn mean_free_declaration_is_validated() {
        let terms = vec![ForcingTerm {
            profile: SpatialProfile::sine(1, 1.0),
            envelope: Envelope::constant(1.0),
        }];
        assert!(matches!(
            Forcing::new(terms, true),
            Err(LabError::InvalidForcing(_))
        ));
    }

    #[test]
    fn primitives_match_quadrature() {
        let envs = [
            Envelope::constant(0.7),
            Envelope::Cos {
                amplitude: 1.3,
                omega: 2.0,
                phase: 0.4,
            },
            Envelope::QuasiPeriodic {
                omega1: 1.0,
                omega2: 2.0_f64.sqrt(),
            },
            Envelope::BandLimitedRandom {
                seed: 3,
                cutoff: 4,
                base_frequency: 1.5,
            },
        ];
        let (t0, t1) = (-0.3, 1.9);
        let m = 20_000;
        let dt = (t1 - t0) / m as f64;
        for e in &envs {
            let mut i1 = 0.0;
            let mut i2 = 0.0;
            for k in 0..m {
                let a = t0 + k as f64 * dt;
                let b = a + dt;
                let inc = 0.5 * dt * (e.eval(a) + e.eval(b));
                let before = i1;
                i1 += inc;
                i2 += 0.5 * dt * (before + i1);
            }
            assert!((e.integral(t0, t1) - i1).abs() < 1e-7, "{e:?}");
            assert!((e.double_integral(t0, t1) - i2).abs() < 1e-7, "{e:?}");
        }
    }

    #[test]
    fn random_envelope_is_deterministic_and_bounded() {
        let e = Envelope::BandLimitedRandom {
            seed: 11,
            cutoff: 5,
            base_frequency: 1.0,
        };
        let e2 = e.clone();
        for k in 0..1000 {
            let t = k as f64 * 0.37 - 100.0;
            assert_eq!(e.eval(t), e2.eval(t));
            assert!(e.eval(t).abs() <= 1.0 + 1e-15);
        }
    }
}
