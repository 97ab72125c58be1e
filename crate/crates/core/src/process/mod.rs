//! The discrete Burgers process `S(t, t0)`.
//!
//! `u_t + u u_x - u_xx = f` on `(0, 1)` with unit viscosity, advanced by an
//! IMEX scheme from [`scheme::time_schemes`].

pub mod convergence;
pub mod manufactured;
pub mod nonlinear;
pub mod persist;
pub mod scheme;
pub mod steady;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{max_abs, project_mean_free, Field, NormKind};
use crate::forcing::Source;
use crate::grid::Grid;

pub use scheme::{time_scheme, time_schemes, ExplicitHistory, TimeScheme};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub dt: f64,
    #[serde(default = "default_scheme")]
    pub scheme: String,
    /// 2/3-rule truncation of the periodic nonlinearity.
    #[serde(default = "default_true")]
    pub dealias: bool,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_newton_max_iter")]
    pub newton_max_iter: usize,
    /// Drops the nonlinearity; used by verification runs on the heat equation.
    #[serde(default)]
    pub linear_only: bool,
}

fn default_scheme() -> String {
    "cn-ab2".to_string()
}

fn default_true() -> bool {
    true
}

fn default_newton_tol() -> f64 {
    1e-10
}

fn default_newton_max_iter() -> usize {
    20
}

impl SolverConfig {
    pub fn new(dt: f64, scheme: &str) -> Self {
        Self {
            dt,
            scheme: scheme.to_string(),
            dealias: true,
            newton_tol: default_newton_tol(),
            newton_max_iter: default_newton_max_iter(),
            linear_only: false,
        }
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        Self { dt, ..self.clone() }
    }

    pub fn with_scheme(&self, scheme: &str) -> Self {
        Self {
            scheme: scheme.to_string(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(LabError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.newton_tol > 0.0) {
            return Err(LabError::InvalidConfig("newton_tol must be positive".into()));
        }
        if self.newton_max_iter == 0 {
            return Err(LabError::InvalidConfig("newton_max_iter must be positive".into()));
        }
        time_scheme(&self.scheme)?;
        Ok(())
    }

    pub fn time_scheme(&self) -> Result<&'static dyn TimeScheme> {
        time_scheme(&self.scheme)
    }
}

/// Largest admissible step for a state of sup-norm `umax`.
pub fn cfl_limit(grid: &Grid, umax: f64) -> f64 {
    0.5 * grid.h() / umax.max(1.0)
}

fn check_cfl(grid: &Grid, values: &[f64], dt: f64, t: f64) -> Result<()> {
    let limit = cfl_limit(grid, max_abs(values));
    // Final steps may be shortened but never lengthened; allow rounding.
    if dt > limit * (1.0 + 1e-12) {
        return Err(LabError::CflViolation { dt, limit, t });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub l2: f64,
    pub h1: f64,
    pub h2: Option<f64>,
}

impl NormSample {
    fn of(field: &Field) -> Self {
        Self {
            l2: field.norm(NormKind::L2),
            h1: field.norm(NormKind::H1semi),
            h2: Some(field.norm(NormKind::H2semi)),
        }
    }
}

/// Time-sampled solution with its norm series.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    config: SolverConfig,
    grid: Arc<Grid>,
    times: Vec<f64>,
    snapshots: Vec<Field>,
    norms: Vec<NormSample>,
}

impl Trajectory {
    pub fn new(config: SolverConfig, grid: Arc<Grid>) -> Self {
        Self {
            config,
            grid,
            times: Vec::new(),
            snapshots: Vec::new(),
            norms: Vec::new(),
        }
    }

    /// Builds a trajectory from snapshots, checking the invariants.
    pub fn from_snapshots(config: SolverConfig, snapshots: Vec<Field>) -> Result<Self> {
        let first = snapshots
            .first()
            .ok_or_else(|| LabError::Format("trajectory needs at least one snapshot".into()))?;
        let mut traj = Trajectory::new(config, first.grid().clone());
        for s in snapshots {
            traj.push(s)?;
        }
        Ok(traj)
    }

    pub fn push(&mut self, field: Field) -> Result<()> {
        if !field.same_grid(&self.snapshot_template()) {
            return Err(LabError::GridMismatch);
        }
        if let Some(&last) = self.times.last() {
            if !(field.time() > last) {
                return Err(LabError::MisalignedSampling(format!(
                    "time {} does not increase past {last}",
                    field.time()
                )));
            }
        }
        self.times.push(field.time());
        self.norms.push(NormSample::of(&field));
        self.snapshots.push(field);
        Ok(())
    }

    fn snapshot_template(&self) -> Field {
        Field::zeros(self.grid.clone(), 0.0)
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[Field] {
        &self.snapshots
    }

    pub fn norm_series(&self) -> &[NormSample] {
        &self.norms
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn first(&self) -> &Field {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Field {
        self.snapshots.last().expect("trajectory is never empty once built")
    }

    /// Series of one norm over all snapshots.
    pub fn series(&self, kind: NormKind) -> Vec<f64> {
        match kind {
            NormKind::L2 => self.norms.iter().map(|n| n.l2).collect(),
            NormKind::H1semi => self.norms.iter().map(|n| n.h1).collect(),
            _ => self.snapshots.iter().map(|s| s.norm(kind)).collect(),
        }
    }

    /// Snapshots with index in `range`, as a new trajectory.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Trajectory {
        Trajectory {
            config: self.config.clone(),
            grid: self.grid.clone(),
            times: self.times[range.clone()].to_vec(),
            snapshots: self.snapshots[range.clone()].to_vec(),
            norms: self.norms[range].to_vec(),
        }
    }

    /// Snapshots with `t_a - eps <= t <= t_b + eps`.
    pub fn restrict(&self, t_a: f64, t_b: f64) -> Trajectory {
        let eps = 1e-9 * (1.0 + t_a.abs().max(t_b.abs()));
        let start = self.times.iter().position(|&t| t >= t_a - eps).unwrap_or(self.len());
        let end = self
            .times
            .iter()
            .rposition(|&t| t <= t_b + eps)
            .map_or(start, |i| i + 1)
            .max(start);
        self.slice(start..end)
    }

    /// Linear interpolation in time; errors outside the sampled interval.
    pub fn interpolate(&self, t: f64) -> Result<Vec<f64>> {
        let n = self.times.len();
        let eps = 1e-10 * (1.0 + t.abs());
        if n == 0 || t < self.times[0] - eps || t > self.times[n - 1] + eps {
            return Err(LabError::CoverageGap { t });
        }
        let i = self.times.partition_point(|&s| s < t);
        if i == 0 {
            return Ok(self.snapshots[0].values().to_vec());
        }
        if i >= n {
            return Ok(self.snapshots[n - 1].values().to_vec());
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        if (t1 - t).abs() <= eps {
            return Ok(self.snapshots[i].values().to_vec());
        }
        let theta = (t - t0) / (t1 - t0);
        let a = self.snapshots[i - 1].values();
        let b = self.snapshots[i].values();
        Ok(a.iter().zip(b).map(|(x, y)| x + theta * (y - x)).collect())
    }

    /// Pointwise `self - other` on matching samples.
    pub fn difference(&self, other: &Trajectory) -> Result<Trajectory> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise `(self + other) / 2` on matching samples.
    pub fn average(&self, other: &Trajectory) -> Result<Trajectory> {
        self.zip_with(other, |a, b| 0.5 * (a + b))
    }

    fn zip_with(&self, other: &Trajectory, op: impl Fn(f64, f64) -> f64) -> Result<Trajectory> {
        if self.len() != other.len() || *self.grid != *other.grid {
            return Err(LabError::MisalignedSampling(
                "trajectories have different sampling".into(),
            ));
        }
        let mut out = Trajectory::new(self.config.clone(), self.grid.clone());
        for (a, b) in self.snapshots.iter().zip(&other.snapshots) {
            if (a.time() - b.time()).abs() > 1e-9 * (1.0 + a.time().abs()) {
                return Err(LabError::MisalignedSampling(format!(
                    "times {} and {} differ",
                    a.time(),
                    b.time()
                )));
            }
            let values = a.values().iter().zip(b.values()).map(|(x, y)| op(*x, *y)).collect();
            out.push(Field::new(self.grid.clone(), values, a.time())?)?;
        }
        Ok(out)
    }
}

fn burgers_explicit(grid: &Grid, u: &[f64], f: &dyn Source, t: f64, cfg: &SolverConfig) -> Result<Vec<f64>> {
    let mut e = if f.is_zero() {
        vec![0.0; u.len()]
    } else {
        f.sample(t, grid)?
    };
    if !cfg.linear_only {
        let n = nonlinear::burgers_term(grid, u, cfg.dealias);
        for (ej, nj) in e.iter_mut().zip(n) {
            *ej -= nj;
        }
    }
    Ok(e)
}

fn finish(grid: &Grid, mut values: Vec<f64>, t: f64) -> Result<Vec<f64>> {
    if grid.is_periodic() {
        values = project_mean_free(&values);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(LabError::NonFinite { t });
    }
    Ok(values)
}

fn step_by(
    u: &Field,
    f: &dyn Source,
    cfg: &SolverConfig,
    history: Option<&ExplicitHistory>,
    dt: f64,
    t_next: f64,
) -> Result<(Field, ExplicitHistory)> {
    let grid = u.grid();
    check_cfl(grid, u.values(), dt, u.time())?;
    let e = burgers_explicit(grid, u.values(), f, u.time(), cfg)?;
    let next = cfg.time_scheme()?.advance(grid, u.values(), &e, history, dt)?;
    let next = finish(grid, next, t_next)?;
    Ok((
        Field::new(grid.clone(), next, t_next)?,
        ExplicitHistory { term: e, dt },
    ))
}

/// One IMEX step of length `cfg.dt`. Returns the new state and the explicit
/// term to pass as history to the next step.
pub fn step(
    u: &Field,
    f: &dyn Source,
    cfg: &SolverConfig,
    history: Option<&ExplicitHistory>,
) -> Result<(Field, ExplicitHistory)> {
    cfg.validate()?;
    step_by(u, f, cfg, history, cfg.dt, u.time() + cfg.dt)
}

/// Step lengths from `t0` to `t1`: full steps, the last one shortened to
/// land on `t1`. Intermediate times are `t0 + i * dt`.
pub fn step_times(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(LabError::InvalidInterval { t0, t1 });
    }
    let ratio = (t1 - t0) / dt;
    let rounded = ratio.round();
    let count = if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        rounded as usize
    } else {
        ratio.ceil() as usize
    };
    let mut times: Vec<f64> = (0..count).map(|i| t0 + i as f64 * dt).collect();
    times.push(t1);
    Ok(times)
}

fn snapshot_due(i: usize, last: usize, every: usize) -> bool {
    i % every == 0 || i == last
}

/// `S(t1, t0) u0`, sampled every `sample_every` steps and at `t1`.
pub fn solve(
    u0: &Field,
    t0: f64,
    t1: f64,
    f: &dyn Source,
    cfg: &SolverConfig,
    sample_every: usize,
) -> Result<Trajectory> {
    Ok(solve_family(u0, &[], t0, t1, f, cfg, sample_every)?.base)
}

/// A reference solution plus exact differences `w_i = u - v_i` to other
/// solutions, propagated through the difference equation so that tiny
/// differences keep their relative precision.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyTrajectory {
    pub base: Trajectory,
    pub differences: Vec<Trajectory>,
}

impl FamilyTrajectory {
    /// Trajectory of the `i`-th companion solution `v_i = u - w_i`.
    pub fn member(&self, i: usize) -> Result<Trajectory> {
        self.base.difference(&self.differences[i])
    }
}

/// Two solutions `u` and `v`, stored as `u` and `w = u - v`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTrajectory {
    pub u: Trajectory,
    pub w: Trajectory,
}

impl PairTrajectory {
    /// Pairs two independently computed trajectories.
    pub fn from_separate(u: Trajectory, v: Trajectory) -> Result<Self> {
        let w = u.difference(&v)?;
        Ok(Self { u, w })
    }

    pub fn v(&self) -> Result<Trajectory> {
        self.u.difference(&self.w)
    }

    /// Coefficient path `a = (u + v) / 2 = u - w / 2`.
    pub fn midpoint(&self) -> Result<Trajectory> {
        let half = self.u.zip_with(&self.w, |a, b| a - 0.5 * b)?;
        Ok(half)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }
}

/// Solves for `u` from `u0` and `v` from `v0` on a common step sequence.
pub fn solve_pair(
    u0: &Field,
    v0: &Field,
    t0: f64,
    t1: f64,
    f: &dyn Source,
    cfg: &SolverConfig,
    sample_every: usize,
) -> Result<PairTrajectory> {
    let w0 = u0.sub(v0)?;
    let mut fam = solve_family(u0, &[w0], t0, t1, f, cfg, sample_every)?;
    let w = fam.differences.pop().expect("one difference");
    Ok(PairTrajectory { u: fam.base, w })
}

/// Advances `base0` and the differences `diffs0[i] = base0 - v_i(t0)`.
pub fn solve_family(
    base0: &Field,
    diffs0: &[Field],
    t0: f64,
    t1: f64,
    f: &dyn Source,
    cfg: &SolverConfig,
    sample_every: usize,
) -> Result<FamilyTrajectory> {
    cfg.validate()?;
    let grid = base0.grid().clone();
    if diffs0.iter().any(|d| !d.same_grid(base0)) {
        return Err(LabError::GridMismatch);
    }
    let every = sample_every.max(1);
    let times = step_times(t0, t1, cfg.dt)?;
    let last = times.len() - 1;
    let scheme = cfg.time_scheme()?;

    let start = |v: &[f64]| -> Result<Field> {
        let values = if grid.is_periodic() {
            project_mean_free(v)
        } else {
            v.to_vec()
        };
        Field::new(grid.clone(), values, t0)
    };

    let mut u = start(base0.values())?;
    let mut ws: Vec<Field> = diffs0.iter().map(|d| start(d.values())).collect::<Result<_>>()?;
    let mut base_traj = Trajectory::new(cfg.clone(), grid.clone());
    let mut diff_trajs: Vec<Trajectory> = ws
        .iter()
        .map(|_| Trajectory::new(cfg.clone(), grid.clone()))
        .collect();
    base_traj.push(u.clone())?;
    for (tr, w) in diff_trajs.iter_mut().zip(&ws) {
        tr.push(w.clone())?;
    }

    let mut base_hist: Option<ExplicitHistory> = None;
    let mut diff_hist: Vec<Option<ExplicitHistory>> = vec![None; ws.len()];

    for i in 0..last {
        let (t, t_next) = (times[i], times[i + 1]);
        let dt = t_next - t;
        let (next_u, h) = step_by(&u, f, cfg, base_hist.as_ref(), dt, t_next)?;
        let mut next_ws = Vec::with_capacity(ws.len());
        for (w, hist) in ws.iter().zip(diff_hist.iter_mut()) {
            let a: Vec<f64> = u
                .values()
                .iter()
                .zip(w.values())
                .map(|(x, y)| x - 0.5 * y)
                .collect();
            let v: Vec<f64> = u.values().iter().zip(w.values()).map(|(x, y)| x - y).collect();
            check_cfl(&grid, &v, dt, t)?;
            let e: Vec<f64> = if cfg.linear_only {
                vec![0.0; a.len()]
            } else {
                nonlinear::bilinear_term(&grid, &a, w.values(), cfg.dealias)
                    .into_iter()
                    .map(|b| -b)
                    .collect()
            };
            let next = scheme.advance(&grid, w.values(), &e, hist.as_ref(), dt)?;
            let next = finish(&grid, next, t_next)?;
            *hist = Some(ExplicitHistory { term: e, dt });
            next_ws.push(Field::new(grid.clone(), next, t_next)?);
        }
        u = next_u;
        ws = next_ws;
        base_hist = Some(h);
        if snapshot_due(i + 1, last, every) {
            base_traj.push(u.clone())?;
            for (tr, w) in diff_trajs.iter_mut().zip(&ws) {
                tr.push(w.clone())?;
            }
        }
    }
    Ok(FamilyTrajectory {
        base: base_traj,
        differences: diff_trajs,
    })
}
