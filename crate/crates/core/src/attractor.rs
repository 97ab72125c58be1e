//! Pullback experiments: bundles of solutions evolved from ever earlier
//! initial times, the eternal trajectory, and periodicity of the attractor.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::estimates::random_smooth_fields;
use crate::field::{norm_of, Field, NormKind};
use crate::fit::{linear_fit, LinearFit};
use crate::forcing::Source;
use crate::grid::Grid;
use crate::process::{solve, solve_family, SolverConfig, Trajectory};

pub use crate::estimates::dissipative_radius_check;

/// Fields sharing one grid and one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    fields: Vec<Field>,
}

impl Bundle {
    pub fn new(fields: Vec<Field>) -> Result<Self> {
        let first = fields.first().ok_or(LabError::EmptyBundle)?;
        for f in &fields[1..] {
            if !f.same_grid(first) {
                return Err(LabError::GridMismatch);
            }
            if f.time() != first.time() {
                return Err(LabError::MisalignedSampling(format!(
                    "bundle mixes times {} and {}",
                    first.time(),
                    f.time()
                )));
            }
        }
        Ok(Self { fields })
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn time(&self) -> f64 {
        self.fields[0].time()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.fields[0].grid()
    }
}

fn distance(grid: &Grid, a: &[f64], b: &[f64], kind: NormKind) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm_of(grid, &d, kind)
}

/// `sup_{a in A} inf_{b in B} ||a - b||`.
pub fn semidistance(a: &Bundle, b: &Bundle, kind: NormKind) -> Result<f64> {
    if **a.grid() != **b.grid() {
        return Err(LabError::GridMismatch);
    }
    let g = a.grid();
    Ok(a.fields
        .iter()
        .map(|x| {
            b.fields
                .iter()
                .map(|y| distance(g, x.values(), y.values(), kind))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}

/// `max_{a, b} ||a - b||` over the bundle.
pub fn diameter(bundle: &Bundle, kind: NormKind) -> f64 {
    let g = bundle.grid();
    let f = &bundle.fields;
    let mut d: f64 = 0.0;
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            d = d.max(distance(g, f[i].values(), f[j].values(), kind));
        }
    }
    d
}

/// `0`, `+-0.1 sin(k pi x)` for `k = 1..3` (`sin(2 k pi x)` on periodic
/// grids), and `random_count` smooth random fields of unit `L^2` norm.
pub fn default_seeds(grid: &Arc<Grid>, random_count: usize, seed: u64) -> Bundle {
    let pi = std::f64::consts::PI;
    let base = if grid.is_periodic() { 2.0 * pi } else { pi };
    let mut fields = vec![Field::zeros(grid.clone(), 0.0)];
    for k in 1..=3 {
        for sign in [1.0, -1.0] {
            fields.push(Field::from_fn(grid.clone(), 0.0, |x| sign * 0.1 * (k as f64 * base * x).sin()));
        }
    }
    for f in random_smooth_fields(grid, random_count, 4, seed) {
        let norm = f.norm(NormKind::L2);
        fields.push(f.scaled(1.0 / norm));
    }
    Bundle::new(fields).expect("seeds share a grid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullbackEntry {
    pub t0: f64,
    pub diameter_l2: f64,
    pub diameter_h1: f64,
    pub semidistance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullbackReport {
    pub t: f64,
    pub entries: Vec<PullbackEntry>,
    /// Fit of `log(diameter_h1)` against `t - t0`, when at least four
    /// diameters are positive.
    pub fit: Option<LinearFit>,
}

impl PullbackReport {
    pub fn t0_list(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.t0).collect()
    }

    pub fn diameters(&self, kind: NormKind) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| match kind {
                NormKind::H1semi => e.diameter_h1,
                _ => e.diameter_l2,
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t0,diameter_L2,diameter_H1,semidistance")?;
        for e in &self.entries {
            let sd = e.semidistance.map_or(String::new(), |v| format!("{v:e}"));
            writeln!(out, "{},{:e},{:e},{}", e.t0, e.diameter_l2, e.diameter_h1, sd)?;
        }
        Ok(())
    }
}

/// Evolves every seed from each `t0` to `t`.
///
/// Seeds are propagated as differences from the first seed, so diameters
/// far below the solution size are resolved. `reference`, when given, is
/// the value of the eternal trajectory at `t`.
pub fn pullback_bundle(
    t: f64,
    t0_list: &[f64],
    seeds: &Bundle,
    f: &dyn Source,
    cfg: &SolverConfig,
    reference: Option<&Field>,
) -> Result<PullbackReport> {
    if t0_list.is_empty() {
        return Err(LabError::TooFewSamples { needed: 1, got: 0 });
    }
    if t0_list.iter().any(|&t0| !(t0 < t)) || t0_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(LabError::InvalidConfig(
            "t0 list must be strictly decreasing and below t".into(),
        ));
    }
    if let Some(r) = reference {
        if **r.grid() != **seeds.grid() {
            return Err(LabError::GridMismatch);
        }
    }
    let grid = seeds.grid().clone();
    let base = &seeds.fields[0];
    let entries: Vec<PullbackEntry> = t0_list
        .par_iter()
        .map(|&t0| -> Result<PullbackEntry> {
            let diffs: Vec<Field> = seeds.fields[1..]
                .iter()
                .map(|s| base.sub(s).map(|d| d.with_time(t0)))
                .collect::<Result<_>>()?;
            let fam = solve_family(&base.clone().with_time(t0), &diffs, t0, t, f, cfg, usize::MAX)?;
            let u = fam.base.last().values().to_vec();
            // Members are u - w_i, with w_0 = 0 for the base itself.
            let mut ws: Vec<Vec<f64>> = vec![vec![0.0; u.len()]];
            ws.extend(fam.differences.iter().map(|d| d.last().values().to_vec()));
            let mut d_l2: f64 = 0.0;
            let mut d_h1: f64 = 0.0;
            for i in 0..ws.len() {
                for j in i + 1..ws.len() {
                    d_l2 = d_l2.max(distance(&grid, &ws[i], &ws[j], NormKind::L2));
                    d_h1 = d_h1.max(distance(&grid, &ws[i], &ws[j], NormKind::H1semi));
                }
            }
            let semidistance = reference.map(|r| {
                let e: Vec<f64> = u.iter().zip(r.values()).map(|(a, b)| a - b).collect();
                ws.iter()
                    .map(|w| {
                        let m: Vec<f64> = e.iter().zip(w).map(|(a, b)| a - b).collect();
                        norm_of(&grid, &m, NormKind::H1semi)
                    })
                    .fold(0.0, f64::max)
            });
            Ok(PullbackEntry {
                t0,
                diameter_l2: d_l2,
                diameter_h1: d_h1,
                semidistance,
            })
        })
        .collect::<Result<_>>()?;
    let positive: Vec<(f64, f64)> = entries
        .iter()
        .filter(|e| e.diameter_h1 > 0.0)
        .map(|e| (t - e.t0, e.diameter_h1))
        .collect();
    let fit = if positive.len() >= 4 {
        let (x, y): (Vec<f64>, Vec<f64>) = positive.into_iter().unzip();
        Some(rate_fit(&x, &y)?)
    } else {
        None
    };
    Ok(PullbackReport { t, entries, fit })
}

#[derive(Debug, Clone)]
pub struct EternalTrajectory {
    pub trajectory: Trajectory,
    /// Number of window lengths pulled back when the test was met.
    pub k: usize,
    pub residual: f64,
    pub residuals: Vec<f64>,
}

fn sup_difference(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.len() != b.len() {
        return Err(LabError::MisalignedSampling(format!(
            "restrictions have {} and {} samples",
            a.len(),
            b.len()
        )));
    }
    let g = a.grid();
    let mut sup: f64 = 0.0;
    for (x, y) in a.snapshots().iter().zip(b.snapshots()) {
        if (x.time() - y.time()).abs() > 1e-9 * (1.0 + x.time().abs()) {
            return Err(LabError::MisalignedSampling(format!(
                "sample times {} and {} differ",
                x.time(),
                y.time()
            )));
        }
        sup = sup.max(distance(g, x.values(), y.values(), NormKind::H1semi));
    }
    Ok(sup)
}

/// Pulls the zero field back from `t_a - k (t_b - t_a)`, `k = 0, 1, ...`,
/// until successive restrictions to `[t_a, t_b]` agree within `tol` in
/// sup-over-window `H^1` seminorm.
pub fn eternal_trajectory(
    window: (f64, f64),
    grid: &Arc<Grid>,
    f: &dyn Source,
    cfg: &SolverConfig,
    tol: f64,
    k_max: usize,
    sample_every: usize,
) -> Result<EternalTrajectory> {
    let (t_a, t_b) = window;
    if !(t_b > t_a) {
        return Err(LabError::InvalidInterval { t0: t_a, t1: t_b });
    }
    if !(tol > 0.0) {
        return Err(LabError::InvalidConfig("tolerance must be positive".into()));
    }
    let span = t_b - t_a;
    let every = sample_every.max(1);
    let ratio = span / (cfg.dt * every as f64);
    if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
        return Err(LabError::MisalignedSampling(format!(
            "window length {span} is not a multiple of dt * sample_every"
        )));
    }
    let run = |k: usize| -> Result<Trajectory> {
        let t0 = t_a - k as f64 * span;
        let z = Field::zeros(grid.clone(), t0);
        Ok(solve(&z, t0, t_b, f, cfg, every)?.restrict(t_a, t_b))
    };
    let mut previous = run(0)?;
    let mut residuals = Vec::new();
    for k in 1..=k_max {
        let current = run(k)?;
        let r = sup_difference(&previous, &current)?;
        residuals.push(r);
        if r <= tol {
            return Ok(EternalTrajectory {
                trajectory: current,
                k,
                residual: r,
                residuals,
            });
        }
        previous = current;
    }
    Err(LabError::NoConvergence { k_max, residuals })
}

/// Least squares of `log(values)` against `times`; the slope is the rate.
pub fn rate_fit(times: &[f64], values: &[f64]) -> Result<LinearFit> {
    if times.len() < 4 {
        return Err(LabError::TooFewSamples {
            needed: 4,
            got: times.len(),
        });
    }
    for (index, &value) in values.iter().enumerate() {
        if !(value > 0.0) {
            return Err(LabError::NonPositiveValue { index, value });
        }
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    linear_fit(times, &logs)
}

/// `sup ||u(t + T) - u(t)||_{H^1}` over sample pairs one period apart.
pub fn periodicity_check(traj: &Trajectory, period: f64) -> Result<f64> {
    let times = traj.times();
    if times.len() < 2 {
        return Err(LabError::TooFewSamples {
            needed: 2,
            got: times.len(),
        });
    }
    let span = times[times.len() - 1] - times[0];
    if !(period > 0.0) || span < 2.0 * period * (1.0 - 1e-12) {
        return Err(LabError::MisalignedSampling(format!(
            "window {span} is shorter than two periods of {period}"
        )));
    }
    let spacing = times[1] - times[0];
    let shift = period / spacing;
    if (shift - shift.round()).abs() > 1e-6 {
        return Err(LabError::MisalignedSampling(format!(
            "period {period} is not a multiple of the sample spacing {spacing}"
        )));
    }
    let shift = shift.round() as usize;
    let g = traj.grid();
    let s = traj.snapshots();
    let mut sup: f64 = 0.0;
    for i in 0..s.len() - shift {
        let (a, b) = (&s[i], &s[i + shift]);
        if ((b.time() - a.time()) - period).abs() > 1e-9 * (1.0 + period) {
            return Err(LabError::MisalignedSampling(format!(
                "samples at {} and {} are not one period apart",
                a.time(),
                b.time()
            )));
        }
        sup = sup.max(distance(g, a.values(), b.values(), NormKind::H1semi));
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::{Envelope, Forcing, NoForcing, SpatialProfile};
    use crate::grid::{make_grid, GridKind};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(kind: GridKind, n: usize) -> Arc<Grid> {
        Arc::new(make_grid(kind, n).unwrap())
    }

    fn random_bundle(g: &Arc<Grid>, count: usize, rng: &mut ChaCha8Rng) -> Bundle {
        Bundle::new(
            (0..count)
                .map(|_| {
                    let v = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
                    Field::new(g.clone(), v, 0.0).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn semidistance_matches_brute_force() {
        let g = grid(GridKind::Dirichlet, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_bundle(&g, 3, &mut rng);
        let b = random_bundle(&g, 3, &mut rng);
        let h = g.h();
        let mut expected: f64 = 0.0;
        for x in a.fields() {
            let mut best = f64::INFINITY;
            for y in b.fields() {
                let s: f64 = x.values().iter().zip(y.values()).map(|(p, q)| (p - q).powi(2)).sum();
                best = best.min((h * s).sqrt());
            }
            expected = expected.max(best);
        }
        let got = semidistance(&a, &b, NormKind::L2).unwrap();
        assert!((got - expected).abs() < 1e-14 * expected);
    }

    #[test]
    fn subset_and_singletons() {
        let g = grid(GridKind::Dirichlet, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_bundle(&g, 4, &mut rng);
        let a = Bundle::new(b.fields()[1..3].to_vec()).unwrap();
        assert_eq!(semidistance(&a, &b, NormKind::H1semi).unwrap(), 0.0);
        let x = Bundle::new(vec![b.fields()[0].clone()]).unwrap();
        let y = Bundle::new(vec![b.fields()[1].clone()]).unwrap();
        let d = b.fields()[0].sub(&b.fields()[1]).unwrap().norm(NormKind::L2);
        assert_eq!(semidistance(&x, &y, NormKind::L2).unwrap(), d);
        assert_eq!(diameter(&x, NormKind::L2), 0.0);
    }

    #[test]
    fn empty_bundle_is_rejected() {
        assert!(matches!(Bundle::new(vec![]), Err(LabError::EmptyBundle)));
    }

    #[test]
    fn default_seed_count() {
        let g = grid(GridKind::PeriodicMeanFree, 16);
        let b = default_seeds(&g, 2, 3);
        assert_eq!(b.len(), 9);
        for f in &b.fields()[7..] {
            assert!((f.norm(NormKind::L2) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unforced_pullback_decays() {
        let g = grid(GridKind::Dirichlet, 32);
        let cfg = SolverConfig::new(0.005, "cn-ab2");
        let seeds = default_seeds(&g, 0, 0);
        let r = pullback_bundle(0.0, &[-1.0, -3.0], &seeds, &NoForcing, &cfg, None).unwrap();
        assert!(r.entries[1].diameter_l2 < r.entries[0].diameter_l2);
        assert!(r.entries[1].diameter_l2 <= 1e-6);
        let single = Bundle::new(vec![seeds.fields()[1].clone()]).unwrap();
        let r = pullback_bundle(0.0, &[-1.0], &single, &NoForcing, &cfg, None).unwrap();
        assert_eq!(r.entries[0].diameter_h1, 0.0);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("t0,diameter_L2,diameter_H1,semidistance\n"));
    }

    #[test]
    fn t0_list_must_decrease_below_t() {
        let g = grid(GridKind::Dirichlet, 16);
        let cfg = SolverConfig::new(0.01, "cn-ab2");
        let seeds = default_seeds(&g, 0, 0);
        assert!(pullback_bundle(0.0, &[-2.0, -1.0], &seeds, &NoForcing, &cfg, None).is_err());
        assert!(pullback_bundle(0.0, &[0.5], &seeds, &NoForcing, &cfg, None).is_err());
    }

    #[test]
    fn eternal_trajectory_of_zero_forcing() {
        let g = grid(GridKind::Dirichlet, 16);
        let cfg = SolverConfig::new(0.01, "cn-ab2");
        let e = eternal_trajectory((0.0, 0.5), &g, &NoForcing, &cfg, 1e-12, 3, 5).unwrap();
        assert_eq!(e.k, 1);
        assert_eq!(e.residual, 0.0);
        assert!(e.trajectory.snapshots().iter().all(|s| s.max_abs() == 0.0));
        assert!(matches!(
            eternal_trajectory((0.0, 0.5), &g, &NoForcing, &cfg, 1e-12, 3, 7),
            Err(LabError::MisalignedSampling(_))
        ));
    }

    #[test]
    fn eternal_trajectory_reports_no_convergence() {
        let g = grid(GridKind::Dirichlet, 16);
        let cfg = SolverConfig::new(0.01, "cn-ab2");
        let f = Forcing::separable(SpatialProfile::sine(1, 1.0), Envelope::cos(3.0)).unwrap();
        match eternal_trajectory((0.0, 0.1), &g, &f, &cfg, 1e-300, 2, 1) {
            Err(LabError::NoConvergence { k_max, residuals }) => {
                assert_eq!(k_max, 2);
                assert_eq!(residuals.len(), 2);
            }
            other => panic!("expected no convergence, got {other:?}"),
        }
    }

    #[test]
    fn rate_fit_cases() {
        let t: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let v: Vec<f64> = t.iter().map(|s| (-3.0 * s).exp()).collect();
        let fit = rate_fit(&t, &v).unwrap();
        assert!((fit.slope + 3.0).abs() < 1e-12 && (fit.r_squared - 1.0).abs() < 1e-12);
        let c = rate_fit(&t, &vec![2.0; 10]).unwrap();
        assert_eq!(c.slope, 0.0);
        assert_eq!(c.r_squared, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noisy: Vec<f64> = t
            .iter()
            .map(|s| (-2.0 * s).exp() * (1.0 + 0.01 * rng.random_range(-1.0..1.0)))
            .collect();
        assert!((rate_fit(&t, &noisy).unwrap().slope + 2.0).abs() < 0.05);
        assert!(matches!(rate_fit(&t[..3], &v[..3]), Err(LabError::TooFewSamples { .. })));
        let mut bad = v.clone();
        bad[4] = 0.0;
        assert!(matches!(rate_fit(&t, &bad), Err(LabError::NonPositiveValue { index: 4, .. })));
    }

    #[test]
    fn constant_trajectory_is_periodic() {
        let g = grid(GridKind::Dirichlet, 16);
        let cfg = SolverConfig::new(0.1, "cn-ab2");
        let u = Field::from_fn(g, 0.0, |x| x * (1.0 - x));
        let snaps = (0..=20).map(|i| u.clone().with_time(i as f64 * 0.1)).collect();
        let tr = Trajectory::from_snapshots(cfg, snaps).unwrap();
        assert_eq!(periodicity_check(&tr, 1.0).unwrap(), 0.0);
        assert!(matches!(periodicity_check(&tr, 1.5), Err(LabError::MisalignedSampling(_))));
        assert!(matches!(periodicity_check(&tr, 0.25), Err(LabError::MisalignedSampling(_))));
    }

    proptest! {
        #[test]
        fn semidistance_to_superset_is_zero(seed in 0u64..1000, extra in 1usize..4) {
            let g = grid(GridKind::PeriodicMeanFree, 8);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_bundle(&g, 2, &mut rng);
            let mut all = a.fields().to_vec();
            all.extend(random_bundle(&g, extra, &mut rng).fields().iter().cloned());
            let b = Bundle::new(all).unwrap();
            prop_assert_eq!(semidistance(&a, &b, NormKind::L2).unwrap(), 0.0);
            prop_assert!(semidistance(&b, &a, NormKind::L2).unwrap() >= 0.0);
        }
    }
}
