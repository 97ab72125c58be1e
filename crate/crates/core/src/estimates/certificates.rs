use std::collections::BTreeMap;

use crate::error::{LabError, Result};
use crate::field::{inner, Field, NormKind};
use crate::fit::{linear_fit, log_log_slope};
use crate::forcing::{Forcing, Source};
use crate::process::{solve, solve_family, PairTrajectory, SolverConfig, Trajectory};

use super::{poincare_eigenvalue, CertificateReport, InequalityId};

const ROUND_OFF: f64 = 1e-12;

fn discretization_factor(traj_h: f64) -> f64 {
    1.0 + 10.0 * traj_h
}

fn constants(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Decay rates tried when fitting `(C_decay, C_abs)`.
fn decay_candidates() -> impl Iterator<Item = f64> {
    std::iter::once(0.0).chain((0..=280).map(|i| 10f64.powf(-3.0 + i as f64 / 40.0)))
}

/// For bounds `q <= head(C, s) + C_abs * weight(C, s)`: the smallest
/// feasible `C_abs` over the candidate decay rates, and the largest decay
/// rate attaining it.
fn fit_decay_and_absorb(
    s: &[f64],
    q: &[f64],
    head: impl Fn(f64, f64) -> f64,
    weight: impl Fn(f64, f64) -> f64,
) -> (f64, f64) {
    let required = |c: f64| -> f64 {
        s.iter()
            .zip(q)
            .map(|(&si, &qi)| {
                let excess = qi - head(c, si);
                if excess <= 0.0 {
                    0.0
                } else {
                    excess / weight(c, si)
                }
            })
            .fold(0.0, f64::max)
    };
    let fits: Vec<(f64, f64)> = decay_candidates().map(|c| (c, required(c))).collect();
    let best = fits.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
    let tol = best * 1e-9 + f64::MIN_POSITIVE;
    let c_decay = fits
        .iter()
        .filter(|f| f.1 <= best + tol)
        .map(|f| f.0)
        .fold(0.0, f64::max);
    (c_decay, required(c_decay))
}

fn elapsed(traj: &Trajectory) -> Vec<f64> {
    let t0 = traj.times()[0];
    traj.times().iter().map(|t| t - t0).collect()
}

/// `||u(t)||^2 <= ||u(t0)||^2 e^{-2 lambda_1 (t - t0)} + C_abs M^2 (1 - e^{-2 lambda_1 (t - t0)})`
/// with `C_abs` fitted; `lambda_1` is the discrete Poincaré eigenvalue.
pub fn certify_l2_decay(traj: &Trajectory, f: &Forcing) -> Result<CertificateReport> {
    let grid = traj.grid();
    let lambda = poincare_eigenvalue(grid)?;
    let c = 2.0 * lambda;
    let m2 = f.bound() * f.bound();
    let q: Vec<f64> = traj.series(NormKind::L2).iter().map(|v| v * v).collect();
    let s = elapsed(traj);
    let a = q[0];
    let mut c_abs: f64 = 0.0;
    if m2 > 0.0 {
        for (&si, &qi) in s.iter().zip(&q) {
            let grow = 1.0 - (-c * si).exp();
            if grow > 0.0 {
                c_abs = c_abs.max((qi - a * (-c * si).exp()) / (m2 * grow));
            }
        }
    }
    let factor = discretization_factor(grid.h());
    let margins = s
        .iter()
        .zip(&q)
        .map(|(&si, &qi)| factor * (a * (-c * si).exp() + c_abs * m2 * (1.0 - (-c * si).exp())) - qi)
        .collect();
    Ok(CertificateReport::new(
        InequalityId::L2Decay,
        margins,
        constants(&[
            ("lambda_1", lambda),
            ("c_decay", c),
            ("c_abs", c_abs),
            ("c_abs_young_limit", factor / lambda),
            ("forcing_bound", f.bound()),
        ]),
        ROUND_OFF * a.max(f64::MIN_POSITIVE),
    ))
}

/// `||u_x(t)||^2 <= ||u_x(t0)||^2 e^{-C_decay (t - t0)} + C_abs (1 + ||u(t0)||^10)`.
pub fn certify_h1_decay(traj: &Trajectory) -> Result<CertificateReport> {
    let q: Vec<f64> = traj.series(NormKind::H1semi).iter().map(|v| v * v).collect();
    let s = elapsed(traj);
    let a = q[0];
    let b = 1.0 + traj.first().norm(NormKind::L2).powi(10);
    let (c_decay, c_abs) = fit_decay_and_absorb(&s, &q, |c, si| a * (-c * si).exp(), |_, _| b);
    let factor = discretization_factor(traj.grid().h());
    let margins: Vec<f64> = s
        .iter()
        .zip(&q)
        .map(|(&si, &qi)| factor * (a * (-c_decay * si).exp() + c_abs * b) - qi)
        .collect();
    let peak = q.iter().copied().fold(0.0, f64::max);
    // Informational: how far the power-ten envelope sits above the data.
    let looseness = if peak > 0.0 { b / peak } else { f64::INFINITY };
    Ok(CertificateReport::new(
        InequalityId::H1Decay,
        margins,
        constants(&[
            ("c_decay", c_decay),
            ("c_abs", c_abs),
            ("power_ten_envelope", b),
            ("envelope_looseness", looseness),
        ]),
        ROUND_OFF * a.max(f64::MIN_POSITIVE),
    ))
}

/// Absorbing-ball bound
/// `||u_x(t)||^2 <= A e^{-C(t - t0)} + C_abs (1 + A^5 e^{-C(t - t0)})`, `A = ||u_x(t0)||^2`,
/// fitted jointly over the family, plus the eventual radius
/// `sup_{t - t0 >= burn_in} ||u_x(t)||` per member.
///
/// Passes when the joint fit is feasible and the eventual radii agree to
/// 5 % (or all lie below `1e-8`).
pub fn dissipative_radius_check(trajectories: &[Trajectory], burn_in: f64) -> Result<CertificateReport> {
    if trajectories.is_empty() {
        return Err(LabError::EmptyBundle);
    }
    let mut all_s = Vec::new();
    let mut all_q = Vec::new();
    let mut owner = Vec::new();
    let mut radii = Vec::new();
    for (i, tr) in trajectories.iter().enumerate() {
        let s = elapsed(tr);
        let h1 = tr.series(NormKind::H1semi);
        let late = s
            .iter()
            .zip(&h1)
            .filter(|(si, _)| **si >= burn_in)
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max);
        if late == f64::NEG_INFINITY {
            return Err(LabError::TooFewSamples { needed: 1, got: 0 });
        }
        radii.push(late);
        for (si, v) in s.into_iter().zip(h1) {
            all_s.push(si);
            all_q.push(v * v);
            owner.push(i);
        }
    }
    let a0: Vec<f64> = trajectories
        .iter()
        .map(|t| t.first().norm(NormKind::H1semi).powi(2))
        .collect();
    // Index samples so the closures can look up their trajectory.
    let idx: Vec<f64> = (0..all_s.len()).map(|k| k as f64).collect();
    let head = |c: f64, k: f64| {
        let k = k as usize;
        a0[owner[k]] * (-c * all_s[k]).exp()
    };
    let weight = |c: f64, k: f64| {
        let k = k as usize;
        1.0 + a0[owner[k]].powi(5) * (-c * all_s[k]).exp()
    };
    let (c_decay, c_abs) = fit_decay_and_absorb(&idx, &all_q, head, weight);
    let h = trajectories[0].grid().h();
    let factor = discretization_factor(h);
    let mut margins: Vec<f64> = idx
        .iter()
        .zip(&all_q)
        .map(|(&k, &q)| factor * (head(c_decay, k) + c_abs * weight(c_decay, k)) - q)
        .collect();
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if r_max > 0.0 { (r_max - r_min) / r_max } else { 0.0 };
    let radius_ok = spread <= 0.05 || r_max <= 1e-8;
    // The radius agreement enters as one more margin.
    margins.push(if radius_ok { 0.05 - spread.min(0.05) } else { 0.05 - spread });
    Ok(CertificateReport::new(
        InequalityId::H1Decay,
        margins,
        constants(&[
            ("c_decay", c_decay),
            ("c_abs", c_abs),
            ("radius_max", r_max),
            ("radius_min", r_min),
            ("radius_spread", spread),
            ("burn_in", burn_in),
        ]),
        ROUND_OFF * a0.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE),
    ))
}

/// Instantaneous smoothing from rough data:
/// `||u_x(t0 + eps)||^2 <= ||u(t0)||^2 / eps + C (1 + ||u(t0)||^10)`, and the
/// exponent `p` in `||u_x(t0 + eps)|| ~ eps^p`.
pub fn certify_smoothing(
    u0: &Field,
    f: &dyn Source,
    eps_list: &[f64],
    cfg: &SolverConfig,
) -> Result<CertificateReport> {
    if eps_list.len() < 2 {
        return Err(LabError::TooFewSamples {
            needed: 2,
            got: eps_list.len(),
        });
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(LabError::InvalidConfig("eps_list must be strictly decreasing".into()));
    }
    let eps_min = eps_list[eps_list.len() - 1];
    if eps_min < 10.0 * cfg.dt * (1.0 - 1e-12) {
        return Err(LabError::InvalidConfig(format!(
            "smallest eps {eps_min} is below 10 dt = {}",
            10.0 * cfg.dt
        )));
    }
    let t0 = u0.time();
    let traj = solve(u0, t0, t0 + eps_list[0], f, cfg, 1)?;
    let grid = u0.grid();
    let n0 = u0.norm(NormKind::L2);
    let b = 1.0 + n0.powi(10);
    let mut h1 = Vec::new();
    for &eps in eps_list {
        let values = traj.interpolate(t0 + eps)?;
        h1.push(crate::field::norm_of(grid, &values, NormKind::H1semi));
    }
    let fit = log_log_slope(eps_list, &h1)?;
    let c = eps_list
        .iter()
        .zip(&h1)
        .map(|(&e, &v)| ((v * v - n0 * n0 / e) / b).max(0.0))
        .fold(0.0, f64::max);
    let factor = discretization_factor(grid.h());
    let margins = eps_list
        .iter()
        .zip(&h1)
        .map(|(&e, &v)| factor * (n0 * n0 / e + c * b) - v * v)
        .collect();
    Ok(CertificateReport::new(
        InequalityId::Smoothing,
        margins,
        constants(&[
            ("exponent", fit.slope),
            ("r_squared", fit.r_squared),
            ("c_abs", c),
            ("initial_l2", n0),
        ]),
        ROUND_OFF * n0 * n0 / eps_min,
    ))
}

/// `||v||_inf <= ||v||^{1/2} ||v_x||^{1/2}` (`Interpolation1`) and
/// `||v_x|| <= ||v||^{1/2} ||v_xx||^{1/2}` (`Interpolation2`), one margin per field.
pub fn certify_interpolation(fields: &[Field]) -> (CertificateReport, CertificateReport) {
    let mut m1 = Vec::new();
    let mut m2 = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for v in fields {
        let factor = discretization_factor(v.grid().h());
        let l2 = v.norm(NormKind::L2);
        let h1 = v.norm(NormKind::H1semi);
        let h2 = v.norm(NormKind::H2semi);
        let linf = v.norm(NormKind::Linf);
        let b1 = (l2 * h1).sqrt();
        m1.push(factor * b1 - linf);
        m2.push(factor * (l2 * h2).sqrt() - h1);
        if b1 > 0.0 {
            worst_ratio = worst_ratio.max(linf / b1);
        }
        scale = scale.max(linf).max(h1);
    }
    let slack = ROUND_OFF * scale.max(f64::MIN_POSITIVE);
    (
        CertificateReport::new(
            InequalityId::Interpolation1,
            m1,
            constants(&[("worst_ratio", worst_ratio)]),
            slack,
        ),
        CertificateReport::new(InequalityId::Interpolation2, m2, BTreeMap::new(), slack),
    )
}

/// `lambda_1 ||v||^2 <= ||v_x||^2` with the discrete eigenvalue, and
/// `pi ||v|| <= ||v_x|| (1 + 10h)` against the continuous constant.
pub fn certify_poincare(fields: &[Field]) -> Result<CertificateReport> {
    let mut margins = Vec::new();
    let mut lambda = f64::NAN;
    let mut scale: f64 = 0.0;
    for v in fields {
        lambda = poincare_eigenvalue(v.grid())?;
        let l2 = v.norm(NormKind::L2);
        let h1 = v.norm(NormKind::H1semi);
        let factor = discretization_factor(v.grid().h());
        margins.push(h1 * h1 - lambda * l2 * l2);
        margins.push(factor * h1 - std::f64::consts::PI * l2);
        scale = scale.max(h1 * h1);
    }
    Ok(CertificateReport::new(
        InequalityId::Poincare,
        margins,
        constants(&[("lambda_1", lambda)]),
        ROUND_OFF * scale.max(f64::MIN_POSITIVE),
    ))
}

/// Lipschitz dependence in `H^1`: pairs `(u0, u0 + delta / 2^k)` for
/// `k = 0..=halvings`, ratio `||w_x(t0 + tau)|| / ||w_x(t0)||` per pair.
/// Passes when the ratios agree to 10 %.
pub fn certify_lipschitz(
    u0: &Field,
    delta: &Field,
    tau: f64,
    f: &dyn Source,
    cfg: &SolverConfig,
    halvings: usize,
) -> Result<CertificateReport> {
    if !u0.same_grid(delta) {
        return Err(LabError::GridMismatch);
    }
    let t0 = u0.time();
    let mut ratios = Vec::new();
    let mut margins = Vec::new();
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for k in 0..=halvings {
        let w0 = delta.scaled(-0.5f64.powi(k as i32)).with_time(t0);
        let fam = solve_family(u0, &[w0.clone()], t0, t0 + tau, f, cfg, usize::MAX)?;
        let w_end = fam.differences[0].last().norm(NormKind::H1semi);
        let w_start = w0.norm(NormKind::H1semi);
        ratios.push(if w_start > 0.0 { w_end / w_start } else { 0.0 });
        inputs.push(w_start);
        outputs.push(w_end);
    }
    let d = ratios.iter().copied().fold(0.0, f64::max);
    let d_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if d > 0.0 { (d - d_min) / d } else { 0.0 };
    for (i, o) in inputs.iter().zip(&outputs) {
        margins.push(d * i - o);
    }
    margins.push(0.1 - spread);
    let mut c = constants(&[("lipschitz_constant", d), ("ratio_spread", spread), ("tau", tau)]);
    for (k, r) in ratios.iter().enumerate() {
        c.insert(format!("ratio_{k}"), *r);
    }
    // The largest ratio defines `d`, so its own margin is zero up to round-off.
    let slack = ROUND_OFF * outputs.iter().copied().fold(f64::MIN_POSITIVE, f64::max);
    Ok(CertificateReport::new(InequalityId::Lipschitz, margins, c, slack))
}

const L1_STEP_SLACK: f64 = 1e-8;

/// `||w(t_i)||_{L1} - ||w(t_{i+1})||_{L1} >= -1e-8 ||w(t_i)||_{L1}` along a pair.
/// On Dirichlet grids the fitted exponential rate of the L1 series is
/// recorded as `l1_rate`.
pub fn certify_l1_contraction_pair(pair: &PairTrajectory) -> Result<CertificateReport> {
    let l1 = pair.w.series(NormKind::L1);
    let scale = l1.iter().copied().fold(0.0, f64::max);
    let margins: Vec<f64> = l1
        .windows(2)
        .map(|w| {
            let m = w[0] - w[1];
            // Relative to the current size, so late small differences are held
            // to the same standard.
            if w[0] > 0.0 {
                m / w[0]
            } else {
                m
            }
        })
        .collect();
    let mut c = constants(&[("initial_l1", l1[0]), ("max_l1", scale)]);
    if pair.grid().kind() == crate::grid::GridKind::Dirichlet && l1.iter().all(|v| *v > 0.0) && l1.len() >= 2 {
        let logs: Vec<f64> = l1.iter().map(|v| v.ln()).collect();
        let fit = linear_fit(pair.w.times(), &logs)?;
        c.insert("l1_rate".to_string(), fit.slope);
        c.insert("l1_rate_r_squared".to_string(), fit.r_squared);
    }
    Ok(CertificateReport::new(InequalityId::L1Contraction, margins, c, L1_STEP_SLACK))
}

pub fn certify_l1_contraction(u: &Trajectory, v: &Trajectory) -> Result<CertificateReport> {
    certify_l1_contraction_pair(&PairTrajectory::from_separate(u.clone(), v.clone())?)
}

/// Per-step energy inequality of the imex-euler scheme,
/// `(||u+||^2 - ||u||^2)/dt + 2||u+_x||^2 - 2(f, u+) <= 0`, on a trajectory
/// sampled at every step.
pub fn certify_l2_energy(traj: &Trajectory, f: &dyn Source) -> Result<CertificateReport> {
    if traj.config().scheme != "imex-euler" {
        return Err(LabError::InvalidConfig("energy inequality is stated for imex-euler".into()));
    }
    let grid = traj.grid();
    let h = grid.h();
    let mut margins = Vec::new();
    let mut scale: f64 = 0.0;
    for pair in traj.snapshots().windows(2) {
        let (u, up) = (&pair[0], &pair[1]);
        let dt = up.time() - u.time();
        if dt > traj.config().dt * (1.0 + 1e-9) {
            return Err(LabError::MisalignedSampling("trajectory must be sampled every step".into()));
        }
        let fu = f.sample(u.time(), grid)?;
        let n0 = u.norm(NormKind::L2).powi(2);
        let n1 = up.norm(NormKind::L2).powi(2);
        let hx = up.norm(NormKind::H1semi).powi(2);
        let lhs = (n1 - n0) / dt + 2.0 * hx - 2.0 * inner(h, &fu, up.values());
        margins.push(-lhs);
        scale = scale.max(n0 / dt).max(hx);
    }
    Ok(CertificateReport::new(
        InequalityId::L2Energy,
        margins,
        BTreeMap::new(),
        1e-10 * scale.max(f64::MIN_POSITIVE),
    ))
}
