//! Scenario registry. Each scenario validates its parameters in `prepare`
//! and only then touches the output directory in `Job::execute`.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use burgers_lab::adjoint::{
    barrier_supersolution_check, duality_with_adjoint, max_principle_check, AdjointOptions, BarrierParams,
};
use burgers_lab::attractor::{default_seeds, eternal_trajectory, pullback_bundle, rate_fit, Bundle};
use burgers_lab::estimates::{
    certify_h1_decay, certify_interpolation, certify_l1_contraction_pair, certify_l2_decay, certify_l2_energy,
    certify_poincare, mean_free_reduce, reconstruct_from_reduced, CertificateReport,
};
use burgers_lab::process::convergence::{ConvergenceStudy, OrderReport};
use burgers_lab::process::manufactured::ExactSolution;
use burgers_lab::registry::{Named, Registry};
use burgers_lab::{make_grid, solve, solve_pair, spectral, Field, Forcing, Grid, GridKind, NormKind, SolverConfig};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, InitialCondition};
use crate::error::{CliError, CliResult};
use crate::output::Artifacts;

/// Named pass/fail checks of one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Outcome {
    pub checks: BTreeMap<String, bool>,
}

impl Outcome {
    pub fn check(&mut self, name: impl Into<String>, pass: bool) {
        self.checks.insert(name.into(), pass);
    }

    pub fn pass(&self) -> bool {
        self.checks.values().all(|p| *p)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, p)| !**p).map(|(k, _)| k.as_str()).collect()
    }
}

pub trait Job: Send + Sync {
    /// Parameters after defaults, recorded in the manifest.
    fn params(&self) -> Value;
    fn execute(&self, out: &mut Artifacts) -> CliResult<Outcome>;
}

pub trait Scenario: Named + Send + Sync {
    /// Command-line verb.
    fn command(&self) -> &'static str;
    /// What the scenario exercises.
    fn reference(&self) -> &'static str;
    /// Data files and their columns.
    fn columns(&self) -> &'static str;
    fn prepare(&self, cfg: &ExperimentConfig) -> CliResult<Box<dyn Job>>;
}

pub fn scenarios() -> &'static Registry<dyn Scenario> {
    static REG: OnceLock<Registry<dyn Scenario>> = OnceLock::new();
    REG.get_or_init(|| {
        Registry::<dyn Scenario>::new("scenario")
            .with(Box::new(Simulate))
            .with(Box::new(Pullback))
            .with(Box::new(ContractionRate))
            .with(Box::new(AdjointCheck))
            .with(Box::new(Certificates))
            .with(Box::new(ManufacturedConvergence))
            .with(Box::new(MeanFreeRoundtrip))
    })
}

pub fn scenario_for_command(command: &str) -> Option<&'static dyn Scenario> {
    scenarios().iter().find(|s| s.command() == command)
}

/// One line per scenario: `name → reference`.
pub fn catalog() -> String {
    let mut text = String::new();
    for s in scenarios().iter() {
        text.push_str(&format!("{} → {}\n", s.name(), s.reference()));
        text.push_str(&format!("    command: {}; outputs: {}\n", s.command(), s.columns()));
    }
    text
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

fn interval(t0: f64, t1: f64) -> CliResult<()> {
    if t1 > t0 && t0.is_finite() && t1.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("need t0 < t1, got [{t0}, {t1}]")))
    }
}

fn norm_rows(traj: &burgers_lab::Trajectory) -> Vec<Vec<f64>> {
    traj.snapshots()
        .iter()
        .map(|s| {
            vec![
                s.time(),
                s.norm(NormKind::L2),
                s.norm(NormKind::H1semi),
                s.norm(NormKind::Linf),
            ]
        })
        .collect()
}

// ---------------------------------------------------------------- simulate

struct Simulate;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateParams {
    #[serde(default)]
    t0: f64,
    #[serde(default = "default_t1")]
    t1: f64,
    #[serde(default = "default_every")]
    sample_every: usize,
}

fn default_t1() -> f64 {
    1.0
}

fn default_every() -> usize {
    10
}

struct SimulateJob {
    params: SimulateParams,
    u0: Field,
    forcing: Forcing,
    solver: SolverConfig,
}

impl Named for Simulate {
    fn name(&self) -> &'static str {
        "simulate"
    }
}

impl Scenario for Simulate {
    fn command(&self) -> &'static str {
        "simulate"
    }

    fn reference(&self) -> &'static str {
        "process S(t,t0): forward solve of the forced problem"
    }

    fn columns(&self) -> &'static str {
        "trajectory.csv (t,x,u), norms.csv (t,l2,h1,linf), trajectory.traj, summary.json"
    }

    fn prepare(&self, cfg: &ExperimentConfig) -> CliResult<Box<dyn Job>> {
        let params: SimulateParams = cfg.params()?;
        interval(params.t0, params.t1)?;
        let grid = cfg.grid()?;
        Ok(Box::new(SimulateJob {
            u0: cfg.initial.build(&grid, cfg.seed, params.t0)?,
            forcing: cfg.forcing(&grid, false)?,
            solver: cfg.solver.clone(),
            params,
        }))
    }
}

impl Job for SimulateJob {
    fn params(&self) -> Value {
        json!(self.params)
    }

    fn execute(&self, out: &mut Artifacts) -> CliResult<Outcome> {
        let p = &self.params;
        let traj = solve(&self.u0, p.t0, p.t1, &self.forcing, &self.solver, p.sample_every)?;
        out.trajectory("trajectory", &traj)?;
        out.csv("norms.csv", &["t", "l2", "h1", "linf"], norm_rows(&traj))?;
        let last = traj.last();
        out.json(
            "summary.json",
            &json!({
                "samples": traj.len(),
                "final_time": last.time(),
                "final_l2": last.norm(NormKind::L2),
                "final_h1": last.norm(NormKind::H1semi),
                "forcing_bound": self.forcing.bound(),
            }),
        )?;
        Ok(Outcome::default())
    }
}

// ---------------------------------------------------------------- pullback

struct Pullback;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PullbackParams {
    #[serde(default)]
    t: f64,
    #[serde(default = "default_t0_list")]
    t0_list: Vec<f64>,
    #[serde(default)]
    random_seeds: usize,
    #[serde(default = "default_tol")]
    tol: f64,
    /// Window length of the eternal-trajectory reference; 0 disables it.
    #[serde(default)]
    reference_window: f64,
    #[serde(default = "default_reference_tol")]
    reference_tol: f64,
    #[serde(default = "default_k_max")]
    k_max: usize,
}

fn default_t0_list() -> Vec<f64> {
    vec![-1.0, -2.0, -4.0, -8.0]
}

fn default_tol() -> f64 {
    1e-6
}

fn default_reference_tol() -> f64 {
    1e-8
}

fn default_k_max() -> usize {
    40
}

struct PullbackJob {
    params: PullbackParams,
    grid: Arc<Grid>,
    seeds: Bundle,
    forcing: Forcing,
    solver: SolverConfig,
}

impl Named for Pullback {
    fn name(&self) -> &'static str {
        "pullback"
    }
}

impl Scenario for Pullback {
    fn command(&self) -> &'static str {
        "pullback"
    }

    fn reference(&self) -> &'static str {
        "Theorem: pullback attracting"
    }

    fn columns(&self) -> &'static str {
        "pullback.csv (t0,diameter_L2,diameter_H1,semidistance), pullback.json"
    }

    fn prepare(&self, cfg: &ExperimentConfig) -> CliResult<Box<dyn Job>> {
        let params: PullbackParams = cfg.params()?;
        if params.t0_list.is_empty()
            || params.t0_list.iter().any(|&t0| !(t0 < params.t))
            || params.t0_list.windows(2).any(|w| !(w[1] < w[0]))
        {
            return Err(CliError::Config("t0_list must be nonempty, strictly decreasing and below t".into()));
        }
        positive("tol", params.tol)?;
        if params.reference_window != 0.0 {
            positive("reference_window", params.reference_window)?;
            positive("reference_tol", params.reference_tol)?;
        }
        let grid = cfg.grid()?;
        Ok(Box::new(PullbackJob {
            seeds: default_seeds(&grid, params.random_seeds, cfg.seed),
            forcing: cfg.forcing(&grid, false)?,
            solver: cfg.solver.clone(),
            grid,
            params,
        }))
    }
}

impl Job for PullbackJob {
    fn params(&self) -> Value {
        json!(self.params)
    }

    fn execute(&self, out: &mut Artifacts) -> CliResult<Outcome> {
        let p = &self.params;
        let reference = if p.reference_window > 0.0 {
            let e = eternal_trajectory(
                (p.t - p.reference_window, p.t),
                &self.grid,
                &self.forcing,
                &self.solver,
                p.reference_tol,
                p.k_max,
                1,
            )?;
            Some(e.trajectory.last().clone())
        } else {
            None
        };
        let r = pullback_bundle(p.t, &p.t0_list, &self.seeds, &self.forcing, &self.solver, reference.as_ref())?;
        let mut csv = Vec::new();
        r.write_csv(&mut csv)?;
        out.bytes("pullback.csv", &csv)?;
        out.json("pullback.json", &r)?;
        let d = r.diameters(NormKind::H1semi);
        let mut o = Outcome::default();
        o.check("diameter-decreasing", d.windows(2).all(|w| w[1] < w[0] || w[0] == 0.0));
        o.check("diameter-below-tol", d[d.len() - 1] <= p.tol);
        Ok(o)
    }
}

// ---------------------------------------------------------------- contraction rate

struct ContractionRate;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RateParams {
    #[serde(default)]
    t0: f64,
    #[serde(default = "default_rate_t1")]
    t1: f64,
    /// Fit window; defaults to dropping the first fifth.
    #[serde(default)]
    window: Option<(f64, f64)>,
    #[serde(default = "default_second")]
    second: InitialCondition,
    #[serde(default = "default_r2")]
    min_r_squared: f64,
    #[serde(default = "default_every")]
    sample_every: usize,
}

fn default_rate_t1() -> f64 {
    6.0
}

fn default_r2() -> f64 {
    0.99
}

fn default_second() -> InitialCondition {
    InitialCondition::Profiles {
        terms: vec![burgers_lab::SpatialProfile::sine(2, 0.5)],
    }
}

struct RateJob {
    params: RateParams,
    window: (f64, f64),
    u0: Field,
    v0: Field,
    forcing: Forcing,
    solver: SolverConfig,
}

impl Named for ContractionRate {
    fn name(&self) -> &'static str {
        "contraction-rate"
    }
}

impl Scenario for ContractionRate {
    fn command(&self) -> &'static str {
        "rate"
    }

    fn reference(&self) -> &'static str {
        "exponential attraction in L² of two solutions (Dirichlet rate, periodic convergence)"
    }

    fn columns(&self) -> &'static str {
        "difference.csv (t,l2,l1,h1), rate.json, l1-contraction.json"
    }

    fn prepare(&self, cfg: &ExperimentConfig) -> CliResult<Box<dyn Job>> {
        let params: RateParams = cfg.params()?;
        interval(params.t0, params.t1)?;
        let window = params
            .window
            .unwrap_or((params.t0 + 0.2 * (params.t1 - params.t0), params.t1));
        interval(window.0, window.1)?;
        if window.0 < params.t0 || window.1 > params.t1 {
            return Err(CliError::Config("fit window must lie inside [t0, t1]".into()));
        }
        let grid = cfg.grid()?;
        Ok(Box::new(RateJob {
            u0: cfg.initial.build(&grid, cfg.seed, params.t0)?,
            v0: params.second.build(&grid, cfg.seed.wrapping_add(1), params.t0)?,
            forcing: cfg.forcing(&grid, false)?,
            solver: cfg.solver.clone(),
            window,
            params,
        }))
    }
}

impl Job for RateJob {
    fn params(&self) -> Value {
        let mut v = json!(self.params);
        v["window"] = json!([self.window.0, self.window.1]);
        v
    }

    fn execute(&self, out: &mut Artifacts) -> CliResult<Outcome> {
        let p = &self.params;
        let pair = solve_pair(&self.u0, &self.v0, p.t0, p.t1, &self.forcing, &self.solver, p.sample_every)?;
        let rows: Vec<Vec<f64>> = pair
            .w
            .snapshots()
            .iter()
            .map(|s| vec![s.time(), s.norm(NormKind::L2), s.norm(NormKind::L1), s.norm(NormKind::H1semi)])
            .collect();
        out.csv("difference.csv", &["t", "l2", "l1", "h1"], rows)?;
        let w = pair.w.restrict(self.window.0, self.window.1);
        let fit = rate_fit(w.times(), &w.series(NormKind::L2))?;
        out.json("rate.json", &json!({ "window": [self.window.0, self.window.1], "fit": fit }))?;
        let l1 = certify_l1_contraction_pair(&pair)?;
        out.json("l1-contraction.json", &l1.summary())?;
        let mut o = Outcome::default();
        o.check("rate-negative", fit.slope < 0.0);
        o.check("r-squared", fit.r_squared >= p.min_r_squared);
        o.check("l1-contraction", l1.pass);
        Ok(o)
    }
}

// ---------------------------------------------------------------- adjoint check

struct AdjointCheck;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AdjointParams {
    #[serde(default = "default_adjoint_t")]
    t_end: f64,
    #[serde(default = "default_levels")]
    levels: usize,
    #[serde(default = "default_advection")]
    advection: String,
    #[serde(default = "default_startup")]
    startup_steps: usize,
    #[serde(default = "default_ratio")]
    min_ratio: f64,
    #[serde(default = "default_second")]
    second: InitialCondition,
    #[serde(default = "default_barrier_m")]
    barrier_m: Vec<f64>,
}

fn default_adjoint_t() -> f64 {
    0.2
}

fn default_levels() -> usize {
    3
}

fn default_advection() -> String {
    "central".into()
}

fn default_startup() -> usize {
    1
}

fn default_ratio() -> f64 {
    3.0
}

fn default_barrier_m() -> Vec<f64> {
    vec![0.0, 1.0, 5.0]
}

struct AdjointJob {
    params: AdjointParams,
    cfg: ExperimentConfig,
}

impl Named for AdjointCheck {
    fn name(&self) -> &'static str {
        "adjoint-check"
    }
}

impl Scenario for AdjointCheck {
    fn command(&self) -> &'static str {
        "adjoint-check"
    }

    fn reference(&self) -> &'static str {
        "duality identity eq. (w(t0),z(t0)) = ‖w(t)‖_{L¹}; maximum principles for the dual problem"
    }

    fn columns(&self) -> &'static str {
        "duality.csv (level,n,dt,pairing,l1,gap), adjoint.json"
    }

    fn prepare(&self, cfg: &ExperimentConfig) -> CliResult<Box<dyn Job>> {
        let params: AdjointParams = cfg.params()?;
        positive("t_end", params.t_end)?;
        if params.levels < 2 {
            return Err(CliError::Config("adjoint-check needs at least 2 levels".into()));
        }
        burgers_lab::adjoint::advection_scheme(&params.advection).map_err(CliError::config)?;
        for &m in &params.barrier_m {
            BarrierParams::new(m).map_err(CliError::config)?;
        }
        let grid = cfg.grid()?;
        cfg.forcing(&grid, false)?;
        cfg.initial.build(&grid, cfg.seed, 0.0)?;
        params.second.build(&grid, cfg.seed.wrapping_add(1), 0.0)?;
        Ok(Box::new(AdjointJob {
            params,
            cfg: cfg.clone(),
        }))
    }
}

impl Job for AdjointJob {
    fn params(&self) -> Value {
        json!(self.params)
    }

    fn execute(&self, out: &mut Artifacts) -> CliResult<Outcome> {
        let p = &self.params;
        let opts = AdjointOptions {
            advection: p.advection.clone(),
            startup_steps: p.startup_steps,
        };
        let mut rows = Vec::new();
        let mut levels = Vec::new();
        let mut o = Outcome::default();
        for level in 0..p.levels {
            let n = self.cfg.grid.n << level;
            let dt = self.cfg.solver.dt / (1u64 << level) as f64;
            let grid = Arc::new(make_grid(self.cfg.grid.kind, n)?);
            let solver = self.cfg.solver.with_dt(dt);
            let f = self.cfg.forcing(&grid, false)?;
            let u0 = self.cfg.initial.build(&grid, self.cfg.seed, 0.0)?;
            let v0 = p.second.build(&grid, self.cfg.seed.wrapping_add(1), 0.0)?;
            let pair = solve_pair(&u0, &v0, 0.0, p.t_end, &f, &solver, 1)?;
            let (report, sol) = duality_with_adjoint(&pair, 0.0, p.t_end, &solver, &opts)?;
            let mp = max_principle_check(&sol.y);
            o.check(format!("max-principle-level-{level}"), mp.pass());
            rows.push(vec![
                level as f64,
                n as f64,
                dt,
                report.pairing,
                report.l1,
                report.gap,
            ]);
            levels.push(json!({ "level": level, "n": n, "dt": dt, "duality": report, "max_principle": mp }));
        }
        let gaps: Vec<f64> = rows.iter().map(|r| r[5]).collect();
        let ratios: Vec<f64> = gaps.windows(2).map(|w| w[0] / w[1]).collect();
        for (i, r) in ratios.iter().enumerate() {
            o.check(format!("gap-ratio-{i}"), *r >= p.min_ratio);
        }
        let mut barrier = Vec::new();
        let bgrid = make_grid(GridKind::Dirichlet, 65)?;
        for &m in &p.barrier_m {
            let r = barrier_supersolution_check(&BarrierParams::new(m)?, &bgrid, 2.0, 64)?;
            o.check(format!("barrier-m-{m}"), r.pass);
            barrier.push(r);
        }
        out.csv("duality.csv", &["level", "n", "dt", "pairing", "l1", "gap"], rows)?;
        out.json("adjoint.json", &json!({ "levels": levels, "gap_ratios": ratios, "barrier": barrier }))?;
        Ok(o)
    }
}

// ---------------------------------------------------------------- certificates

struct Certificates;

struct CertificatesJob {
    params: SimulateParams,
    u0: Field,
    forcing: Forcing,
    solver: SolverConfig,
}

impl Named for Certificates {
    fn name(&self) -> &'static str {
        "certificates"
    }
}

impl Scenario for Certificates {
    fn command(&self) -> &'static str {
        "certify"
    }

    fn reference(&self) -> &'static str {
        "energy estimates: L² decay, H¹ decay, interpolation, Poincaré, per-step energy"
    }

    fn columns(&self) -> &'static str {
        "margins.csv (inequality_id,index,margin), certificates.json"
    }

    fn prepare(&self, cfg: &ExperimentConfig) -> CliResult<Box<dyn Job>> {
        let params: SimulateParams = cfg.params()?;
        interval(params.t0, params.t1)?;
        let grid = cfg.grid()?;
        Ok(Box::new(CertificatesJob {
            u0: cfg.initial.build(&grid, cfg.seed, params.t0)?,
            forcing: cfg.forcing(&grid, false)?,
            solver: cfg.solver.clone(),
            params,
        }))
    }
}

impl Job for CertificatesJob {
    fn params(&self) -> Value {
        json!(self.params)
    }

    fn execute(&self, out: &mut Artifacts) -> CliResult<Outcome> {
        let p = &self.params;
        let energy_run = self.solver.scheme == "imex-euler";
        let every = if energy_run { 1 } else { p.sample_every };
        let traj = solve(&self.u0, p.t0, p.t1, &self.forcing, &self.solver, every)?;
        let mut reports: Vec<CertificateReport> = vec![
            certify_l2_decay(&traj, &self.forcing)?,
            certify_h1_decay(&traj)?,
        ];
        let (i1, i2) = certify_interpolation(traj.snapshots());
        reports.push(i1);
        reports.push(i2);
        reports.push(certify_poincare(traj.snapshots())?);
        if energy_run {
            reports.push(certify_l2_energy(&traj, &self.forcing)?);
        }
        let mut rows = Vec::new();
        for r in &reports {
            let id = serde_json::to_value(r.inequality_id)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            for (i, m) in r.margins.iter().enumerate() {
                rows.push(vec![id.clone(), i.to_string(), m.to_string()]);
            }
        }
        out.csv("margins.csv", &["inequality_id", "index", "margin"], rows)?;
        let summaries: Vec<_> = reports.iter().map(|r| r.summary()).collect();
        out.json("certificates.json", &summaries)?;
        let mut o = Outcome::default();
        for s in &summaries {
            let id = serde_json::to_value(s.inequality_id).unwrap_or(Value::Null);
            o.check(id.as_str().unwrap_or("certificate").to_string(), s.pass);
        }
        Ok(o)
    }
}

// ---------------------------------------------------------------- convergence

struct ManufacturedConvergence;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConvergeParams {
    #[serde(default = "default_exact")]
    exact: ExactSolution,
    #[serde(default = "default_resolutions")]
    resolutions: Vec<usize>,
    #[serde(default = "default_dts")]
    dts: Vec<f64>,
    #[serde(default)]
    t0: f64,
    #[serde(default = "default_converge_t1")]
    t1: f64,
    #[serde(default)]
    linear: bool,
    #[serde(default = "default_refinement")]
    refinement: usize,
    #[serde(default = "default_order")]
    expected_spatial: f64,
    #[serde(default = "default_spatial_tol")]
    spatial_tol: f64,
    #[serde(default = "default_order")]
    expected_temporal: f64,
    #[serde(default = "default_temporal_tol")]
    temporal_tol: f64,
}

fn default_exact() -> ExactSolution {
    ExactSolution::DecayingSine {
        amplitude: 0.2,
        k: 1,
        rate: 1.0,
    }
}

fn default_resolutions() -> Vec<usize> {
    vec![64, 128, 256]
}

fn default_dts() -> Vec<f64> {
    vec![1.6e-3, 8e-4, 4e-4]
}

fn default_converge_t1() -> f64 {
    0.5
}

fn default_refinement() -> usize {
    16
}

fn default_order() -> f64 {
    2.0
}

fn default_spatial_tol() -> f64 {
    0.2
}

fn default_temporal_tol() -> f64 {
    0.3
}

struct ConvergeJob {
    params: ConvergeParams,
    study: ConvergenceStudy,
    solver: SolverConfig,
}

impl Named for ManufacturedConvergence {
    fn name(&self) -> &'static str {
        "manufactured-convergence"
    }
}

impl Scenario for ManufacturedConvergence {
    fn command(&self) -> &'static str {
        "converge"
    }

    fn reference(&self) -> &'static str {
        "discretization: observed spatial and temporal order on a manufactured solution"
    }

    fn columns(&self) -> &'static str {
        "orders.csv (study,parameter,error), convergence.json"
    }

    fn prepare(&self, cfg: &ExperimentConfig) -> CliResult<Box<dyn Job>> {
        let params: ConvergeParams = cfg.params()?;
        interval(params.t0, params.t1)?;
        if params.resolutions.len() < 3 || params.dts.len() < 3 {
            return Err(CliError::Config("convergence needs at least 3 resolutions and 3 time steps".into()));
        }
        for &dt in &params.dts {
            positive("dts entry", dt)?;
        }
        params.exact.check_compatible(cfg.grid.kind).map_err(CliError::config)?;
        for &n in &params.resolutions {
            make_grid(cfg.grid.kind, n).map_err(CliError::config)?;
        }
        let study = ConvergenceStudy {
            exact: params.exact,
            kind: cfg.grid.kind,
            t0: params.t0,
            t1: params.t1,
            linear: params.linear,
        };
        Ok(Box::new(ConvergeJob {
            params,
            study,
            solver: cfg.solver.clone(),
        }))
    }
}

fn order_rows(name: &str, r: &OrderReport) -> Vec<Vec<String>> {
    r.parameters
        .iter()
        .zip(&r.errors)
        .map(|(p, e)| vec![name.to_string(), p.to_string(), e.to_string()])
        .collect()
}

impl Job for ConvergeJob {
    fn params(&self) -> Value {
        json!(self.params)
    }

    fn execute(&self, out: &mut Artifacts) -> CliResult<Outcome> {
        let p = &self.params;
        let spatial = self.study.spatial_order(&p.resolutions, &self.solver)?;
        let finest = p.resolutions.iter().copied().max().unwrap_or(0);
        let temporal = self.study.temporal_order(finest, &p.dts, p.refinement, &self.solver)?;
        let mut rows = order_rows("spatial", &spatial);
        rows.extend(order_rows("temporal", &temporal));
        out.csv("orders.csv", &["study", "parameter", "error"], rows)?;
        out.json("convergence.json", &json!({ "spatial": spatial, "temporal": temporal }))?;
        let mut o = Outcome::default();
        o.check("spatial-order", (spatial.order() - p.expected_spatial).abs() <= p.spatial_tol);
        o.check("temporal-order", (temporal.order() - p.expected_temporal).abs() <= p.temporal_tol);
        Ok(o)
    }
}

// ---------------------------------------------------------------- mean-free round trip

struct MeanFreeRoundtrip;

struct RoundtripJob {
    params: SimulateParams,
    u0: Field,
    forcing: Forcing,
    solver: SolverConfig,
}

impl Named for MeanFreeRoundtrip {
    fn name(&self) -> &'static str {
        "mean-free-roundtrip"
    }
}

impl Scenario for MeanFreeRoundtrip {
    fn command(&self) -> &'static str {
        "roundtrip"
    }

    fn reference(&self) -> &'static str {
        "mean-free reduction v(x,t) = u(x+γ(t),t) − β(t) and its inverse"
    }

    fn columns(&self) -> &'static str {
        "reduction.csv (t,alpha,beta,gamma), reconstructed.csv (t,x,u), reconstructed.traj, roundtrip.json"
    }

    fn prepare(&self, cfg: &ExperimentConfig) -> CliResult<Box<dyn Job>> {
        let params: SimulateParams = cfg.params()?;
        interval(params.t0, params.t1)?;
        let grid = cfg.grid()?;
        if !grid.is_periodic() {
            return Err(CliError::Config("mean-free round trip needs a periodic grid".into()));
        }
        // Initial data may carry a mean here; profiles are summed without projection.
        let u0 = match &cfg.initial {
            InitialCondition::Profiles { terms } => {
                let mut values = vec![0.0; grid.len()];
                for t in terms {
                    if !t.periodic_compatible() {
                        return Err(CliError::Config(format!("initial profile {t:?} is not 1-periodic")));
                    }
                    for (v, s) in values.iter_mut().zip(t.sample(&grid).map_err(CliError::config)?) {
                        *v += s;
                    }
                }
                Field::new(grid.clone(), values, params.t0).map_err(CliError::config)?
            }
            other => other.build(&grid, cfg.seed, params.t0)?,
        };
        Ok(Box::new(RoundtripJob {
            forcing: cfg.forcing(&grid, true)?,
            solver: cfg.solver.clone(),
            u0,
            params,
        }))
    }
}

impl Job for RoundtripJob {
    fn params(&self) -> Value {
        json!(self.params)
    }

    fn execute(&self, out: &mut Artifacts) -> CliResult<Outcome> {
        let p = &self.params;
        let red = mean_free_reduce(&self.forcing, &self.u0)?;
        let v = solve(&red.v0, p.t0, p.t1, &red.forcing, &self.solver, p.sample_every)?;
        let u = reconstruct_from_reduced(&v, &red.data)?;
        let rows: Vec<Vec<f64>> = red.data.samples(v.times()).into_iter().map(|r| r.to_vec()).collect();
        out.csv("reduction.csv", &["t", "alpha", "beta", "gamma"], rows)?;
        out.trajectory("reconstructed", &u)?;
        // Reduce the reconstruction again and compare with the reduced solve.
        let mut inverse_err: f64 = 0.0;
        let mut mean_err: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for (us, vs) in u.snapshots().iter().zip(v.snapshots()) {
            let t = us.time();
            let beta = red.data.beta_at(t);
            let shifted = spectral::shift(us.values(), -red.data.gamma_at(t));
            for (a, b) in shifted.iter().zip(vs.values()) {
                inverse_err = inverse_err.max((a - beta - b).abs());
            }
            mean_err = mean_err.max((us.mean() - beta).abs());
            scale = scale.max(us.max_abs());
        }
        let consistency = red.data.consistency_residual(v.times());
        out.json(
            "roundtrip.json",
            &json!({
                "inverse_error": inverse_err,
                "mean_error": mean_err,
                "consistency_residual": consistency,
                "final_beta": red.data.beta_at(p.t1),
                "final_gamma": red.data.gamma_at(p.t1),
            }),
        )?;
        let mut o = Outcome::default();
        o.check("inverse", inverse_err <= 1e-12 * scale);
        o.check("mean", mean_err <= 1e-12 * scale);
        Ok(o)
    }
}
