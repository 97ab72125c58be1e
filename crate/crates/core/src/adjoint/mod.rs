//! The backward linear problem `z_s + z_xx + a z_x = 0` along a pair of
//! solutions, the duality pairing it induces, and maximum-principle checks.
//!
//! The problem is solved forward in `tau = t - s` as
//! `y_tau = y_xx + a(t - tau) y_x`, so that `z(s) = y(t - s)`.

pub mod advection;
pub mod barrier;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{max_abs, Field, NormKind};
use crate::fit::{linear_fit, LinearFit};
use crate::grid::{Grid, GridKind};
use crate::process::scheme::{time_scheme, ExplicitHistory};
use crate::process::{step_times, PairTrajectory, SolverConfig, Trajectory};
use crate::report::CheckReport;

pub use advection::{advection_scheme, advection_schemes, AdvectionScheme};
pub use barrier::{barrier_eval, barrier_residual, barrier_supersolution_check, BarrierParams};

/// Time-dependent advection coefficient with its bound `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPath {
    traj: Trajectory,
    bound_m: f64,
}

impl CoefficientPath {
    pub fn new(traj: Trajectory) -> Result<Self> {
        if traj.is_empty() {
            return Err(LabError::CoverageGap { t: f64::NAN });
        }
        let bound_m = traj
            .snapshots()
            .iter()
            .map(|a| a.norm(NormKind::H1semi))
            .fold(0.0, f64::max);
        Ok(Self { traj, bound_m })
    }

    /// `a = (u + v) / 2` along a pair.
    pub fn from_pair(pair: &PairTrajectory) -> Result<Self> {
        Self::new(pair.midpoint()?)
    }

    /// Time-independent coefficient on `[t0, t1]`.
    pub fn constant(a: &Field, t0: f64, t1: f64, cfg: &SolverConfig) -> Result<Self> {
        let first = a.clone().with_time(t0);
        let mut snaps = vec![first];
        if t1 > t0 {
            snaps.push(a.clone().with_time(t1));
        }
        Self::new(Trajectory::from_snapshots(cfg.clone(), snaps)?)
    }

    pub fn bound(&self) -> f64 {
        self.bound_m
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.traj.grid()
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }

    pub fn at(&self, s: f64) -> Result<Vec<f64>> {
        self.traj.interpolate(s)
    }

    fn covers(&self, t0: f64, t: f64) -> Result<()> {
        let times = self.traj.times();
        let eps = 1e-10 * (1.0 + t0.abs().max(t.abs()));
        if times[0] > t0 + eps {
            return Err(LabError::CoverageGap { t: t0 });
        }
        if times[times.len() - 1] < t - eps {
            return Err(LabError::CoverageGap { t });
        }
        Ok(())
    }
}

/// `z0 = sign(w)` with `sign(0) = 0`.
pub fn sign_indicator(w: &Field) -> Field {
    let values = w
        .values()
        .iter()
        .map(|&v| {
            if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            }
        })
        .collect();
    w.with_values(values).expect("length preserved")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjointOptions {
    /// Name in [`advection_schemes`].
    pub advection: String,
    /// Leading imex-euler steps before a multistep scheme takes over.
    #[serde(default = "default_startup")]
    pub startup_steps: usize,
}

fn default_startup() -> usize {
    1
}

impl AdjointOptions {
    pub fn new(advection: &str) -> Self {
        Self {
            advection: advection.to_string(),
            startup_steps: default_startup(),
        }
    }
}

/// Adjoint solution sampled at every step in `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointSolution {
    /// `y` on `tau in [0, t - t0]`.
    pub y: Trajectory,
    pub t: f64,
    pub advection: &'static str,
}

impl AdjointSolution {
    /// `z(t0) = y(t - t0)`.
    pub fn z_initial(&self) -> &Field {
        self.y.last()
    }

    /// `z(s) = y(t - s)` with increasing `s`.
    pub fn z(&self) -> Result<Trajectory> {
        let snaps: Vec<Field> = self
            .y
            .snapshots()
            .iter()
            .rev()
            .map(|f| f.clone().with_time(self.t - f.time()))
            .collect();
        Trajectory::from_snapshots(self.y.config().clone(), snaps)
    }
}

/// Solves the backward problem from `z(t) = z_terminal` down to `t0`.
pub fn adjoint_solve(
    a: &CoefficientPath,
    z_terminal: &Field,
    t0: f64,
    t: f64,
    cfg: &SolverConfig,
    opts: &AdjointOptions,
) -> Result<AdjointSolution> {
    cfg.validate()?;
    let grid = a.grid().clone();
    if **z_terminal.grid() != *grid {
        return Err(LabError::GridMismatch);
    }
    if !(t >= t0) {
        return Err(LabError::InvalidInterval { t0, t1: t });
    }
    a.covers(t0, t)?;
    let adv = advection_scheme(&opts.advection)?;
    let scheme = cfg.time_scheme()?;
    let euler = time_scheme("imex-euler")?;
    let diffusion = adv.diffusion();
    let taus = step_times(0.0, t - t0, cfg.dt)?;

    let mut y = Field::new(grid.clone(), z_terminal.values().to_vec(), 0.0)?;
    let mut traj = Trajectory::new(cfg.clone(), grid.clone());
    traj.push(y.clone())?;
    let mut history: Option<ExplicitHistory> = None;
    for i in 0..taus.len() - 1 {
        let (tau, tau_next) = (taus[i], taus[i + 1]);
        let dt = tau_next - tau;
        let coeff = a.at((t - tau).max(t0))?;
        if adv.monotone() && dt * max_abs(&coeff) > grid.h() * (1.0 + 1e-12) {
            return Err(LabError::CflViolation {
                dt,
                limit: grid.h() / max_abs(&coeff),
                t: t - tau,
            });
        }
        let e = adv.apply(&grid, &coeff, y.values(), cfg.dealias);
        let stepper = if i < opts.startup_steps { euler } else { scheme };
        let next = stepper.advance_with(diffusion, &grid, y.values(), &e, history.as_ref(), dt)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(LabError::NonFinite { t: t - tau_next });
        }
        history = Some(ExplicitHistory { term: e, dt });
        y = Field::new(grid.clone(), next, tau_next)?;
        traj.push(y.clone())?;
    }
    Ok(AdjointSolution {
        y: traj,
        t,
        advection: adv.name(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// `(w(t0), z(t0))`
    pub pairing: f64,
    /// `||w(t)||_{L1}`
    pub l1: f64,
    pub gap: f64,
    pub advection: String,
}

/// Duality pairing for a pair stored as `(u, w = u - v)`.
pub fn duality_check(
    pair: &PairTrajectory,
    t0: f64,
    t: f64,
    cfg: &SolverConfig,
    opts: &AdjointOptions,
) -> Result<DualityReport> {
    Ok(duality_with_adjoint(pair, t0, t, cfg, opts)?.0)
}

/// [`duality_check`] together with the adjoint solution it used.
pub fn duality_with_adjoint(
    pair: &PairTrajectory,
    t0: f64,
    t: f64,
    cfg: &SolverConfig,
    opts: &AdjointOptions,
) -> Result<(DualityReport, AdjointSolution)> {
    let a = CoefficientPath::from_pair(pair)?;
    let grid = pair.grid().clone();
    let w_t = Field::new(grid.clone(), pair.w.interpolate(t)?, t)?;
    let w_t0 = Field::new(grid, pair.w.interpolate(t0)?, t0)?;
    let z0 = sign_indicator(&w_t);
    let sol = adjoint_solve(&a, &z0, t0, t, cfg, opts)?;
    let pairing = w_t0.inner(sol.z_initial())?;
    let l1 = w_t.norm(NormKind::L1);
    let report = DualityReport {
        pairing,
        l1,
        gap: (pairing - l1).abs(),
        advection: sol.advection.to_string(),
    };
    Ok((report, sol))
}

/// `|(w(t0), z(t0)) - ||w(t)||_{L1}|` for two solution trajectories.
pub fn duality_gap(
    u: &Trajectory,
    v: &Trajectory,
    t0: f64,
    t: f64,
    cfg: &SolverConfig,
    opts: &AdjointOptions,
) -> Result<f64> {
    let pair = PairTrajectory::from_separate(u.clone(), v.clone())?;
    Ok(duality_check(&pair, t0, t, cfg, opts)?.gap)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrictDecay {
    /// `min over sampled tau >= dt of ||y(0)||_inf - ||y(tau)||_inf`
    pub min_drop: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxPrincipleReport {
    pub initial_sup: f64,
    /// `sup_tau ||y(tau)||_inf - ||y(0)||_inf`
    pub excess: f64,
    pub slack: f64,
    pub weak_pass: bool,
    /// Present for periodic, non-constant initial data.
    pub strict: Option<StrictDecay>,
    pub samples: usize,
}

impl MaxPrincipleReport {
    pub fn pass(&self) -> bool {
        self.weak_pass && self.strict.as_ref().is_none_or(|s| s.pass)
    }

    pub fn summary(&self) -> CheckReport {
        let mut parameters = BTreeMap::new();
        parameters.insert("initial_sup".to_string(), self.initial_sup);
        parameters.insert("excess".to_string(), self.excess);
        parameters.insert("slack".to_string(), self.slack);
        let mut margin_min = self.slack - self.excess;
        if let Some(s) = &self.strict {
            parameters.insert("strict_min_drop".to_string(), s.min_drop);
            margin_min = margin_min.min(s.min_drop);
        }
        CheckReport {
            check: "max-principle".to_string(),
            parameters,
            margin_min,
            pass: self.pass(),
            samples: self.samples,
        }
    }
}

const MAX_PRINCIPLE_SLACK: f64 = 1e-8;

/// Weak maximum principle `||y(tau)||_inf <= ||y(0)||_inf` and, on periodic
/// grids with non-constant data, strict decay at every sample after the first.
pub fn max_principle_check(y: &Trajectory) -> MaxPrincipleReport {
    let sups: Vec<f64> = y.snapshots().iter().map(|s| s.max_abs()).collect();
    let initial_sup = sups[0];
    let excess = sups.iter().fold(f64::NEG_INFINITY, |m, &s| m.max(s - initial_sup));
    let slack = MAX_PRINCIPLE_SLACK * initial_sup;
    let y0 = y.first().values();
    let (lo, hi) = y0
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let constant = hi - lo <= 1e-14 * initial_sup.max(1.0);
    let strict = (y.grid().kind() == GridKind::PeriodicMeanFree && !constant && sups.len() > 1).then(|| {
        let min_drop = sups[1..].iter().fold(f64::INFINITY, |m, &s| m.min(initial_sup - s));
        StrictDecay {
            min_drop,
            pass: min_drop > 0.0,
        }
    });
    MaxPrincipleReport {
        initial_sup,
        excess,
        slack,
        weak_pass: excess <= slack,
        strict,
        samples: sups.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1DecayReport {
    pub window: (f64, f64),
    /// Fit of `ln ||w||_{L1}` against `t`.
    pub l1_fit: LinearFit,
    /// Fit of `ln ||w||_{L2}` against `t`.
    pub l2_fit: LinearFit,
    /// `2/3` of the L1 rate, the rate `||w|| <= ||w||_1^{2/3} ||w_x||^{1/3}` passes on.
    pub implied_l2_rate: f64,
    /// `min_t (1 + 10h) ||w||_1^{2/3} ||w_x||^{1/3} - ||w||`
    pub interpolation_margin_min: f64,
    pub interpolation_pass: bool,
}

/// Fraction of the window discarded before rate fits.
pub const BURN_IN: f64 = 0.2;

/// Exponential rate of `||u - v||_{L1}` on a Dirichlet pair, after burn-in.
pub fn l1_decay_bound_pair(pair: &PairTrajectory) -> Result<L1DecayReport> {
    let grid = pair.grid();
    if grid.kind() != GridKind::Dirichlet {
        return Err(LabError::WrongGridKind { expected: "dirichlet" });
    }
    let times = pair.w.times();
    let (ta, tb) = (times[0], times[times.len() - 1]);
    let start = ta + BURN_IN * (tb - ta);
    let w = pair.w.restrict(start, tb);
    let slack = 1.0 + 10.0 * grid.h();
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    let mut margin_min = f64::INFINITY;
    for s in w.snapshots() {
        let n1 = s.norm(NormKind::L1);
        let n2 = s.norm(NormKind::L2);
        let nx = s.norm(NormKind::H1semi);
        if n1 == 0.0 {
            return Err(LabError::DegenerateFit(format!("w vanishes at t = {}", s.time())));
        }
        margin_min = margin_min.min(slack * n1.powf(2.0 / 3.0) * nx.powf(1.0 / 3.0) - n2);
        l1.push(n1.ln());
        l2.push(n2.ln());
    }
    if l1.len() < 4 {
        return Err(LabError::TooFewSamples {
            needed: 4,
            got: l1.len(),
        });
    }
    let l1_fit = linear_fit(w.times(), &l1)?;
    let l2_fit = linear_fit(w.times(), &l2)?;
    Ok(L1DecayReport {
        window: (start, tb),
        l1_fit,
        l2_fit,
        implied_l2_rate: 2.0 / 3.0 * l1_fit.slope,
        interpolation_margin_min: margin_min,
        interpolation_pass: margin_min >= 0.0,
    })
}

pub fn l1_decay_bound(u: &Trajectory, v: &Trajectory) -> Result<L1DecayReport> {
    l1_decay_bound_pair(&PairTrajectory::from_separate(u.clone(), v.clone())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::NoForcing;
    use crate::grid::make_grid;
    use crate::process::solve_pair;
    use std::f64::consts::PI;

    fn grid(kind: GridKind, n: usize) -> Arc<Grid> {
        Arc::new(make_grid(kind, n).unwrap())
    }

    #[test]
    fn sign_indicator_pairs_to_l1() {
        let g = grid(GridKind::PeriodicMeanFree, 16);
        let w = Field::from_fn(g.clone(), 0.0, |x| (2.0 * PI * x).sin());
        let z = sign_indicator(&w);
        for ((x, s), v) in g.nodes().iter().zip(z.values()).zip(w.values()) {
            if v.abs() < 1e-12 {
                assert!(s * v >= 0.0);
            } else {
                assert_eq!(*s, if *x < 0.5 { 1.0 } else { -1.0 });
            }
        }
        assert!((w.inner(&z).unwrap() - w.norm(NormKind::L1)).abs() < 1e-15);
    }

    #[test]
    fn zero_terminal_data_stays_zero() {
        let g = grid(GridKind::Dirichlet, 16);
        let cfg = SolverConfig::new(0.01, "imex-euler");
        let a = CoefficientPath::constant(&Field::from_fn(g.clone(), 0.0, |x| x), 0.0, 1.0, &cfg).unwrap();
        let sol = adjoint_solve(&a, &Field::zeros(g, 1.0), 0.0, 1.0, &cfg, &AdjointOptions::new("upwind")).unwrap();
        assert!(sol.y.snapshots().iter().all(|s| s.max_abs() == 0.0));
        let report = max_principle_check(&sol.y);
        assert!(report.pass());
    }

    #[test]
    fn coverage_is_required() {
        let g = grid(GridKind::Dirichlet, 16);
        let cfg = SolverConfig::new(0.01, "imex-euler");
        let a = CoefficientPath::constant(&Field::zeros(g.clone(), 0.0), 0.0, 0.5, &cfg).unwrap();
        let z = Field::from_fn(g, 1.0, |x| (PI * x).sin());
        assert!(matches!(
            adjoint_solve(&a, &z, 0.0, 1.0, &cfg, &AdjointOptions::new("central")),
            Err(LabError::CoverageGap { .. })
        ));
    }

    #[test]
    fn identical_solutions_have_zero_gap() {
        let g = grid(GridKind::Dirichlet, 16);
        let cfg = SolverConfig::new(0.01, "cn-ab2");
        let u0 = Field::from_fn(g, 0.0, |x| 0.1 * (PI * x).sin());
        let pair = solve_pair(&u0, &u0, 0.0, 0.2, &NoForcing, &cfg, 1).unwrap();
        let r = duality_check(&pair, 0.0, 0.2, &cfg, &AdjointOptions::new("central")).unwrap();
        assert_eq!(r.gap, 0.0);
        assert!(matches!(l1_decay_bound_pair(&pair), Err(LabError::DegenerateFit(_))));
    }

    #[test]
    fn constant_data_is_not_checked_for_strict_decay() {
        let g = grid(GridKind::PeriodicMeanFree, 16);
        let cfg = SolverConfig::new(0.01, "imex-euler");
        let a = CoefficientPath::constant(&Field::zeros(g.clone(), 0.0), 0.0, 0.5, &cfg).unwrap();
        let one = Field::from_fn(g, 0.5, |_| 1.0);
        let sol = adjoint_solve(&a, &one, 0.0, 0.5, &cfg, &AdjointOptions::new("upwind")).unwrap();
        for s in sol.y.snapshots() {
            assert!(s.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        }
        let report = max_principle_check(&sol.y);
        assert!(report.strict.is_none());
        assert!(report.pass());
    }
}
