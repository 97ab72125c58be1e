//! The comparison function
//! `psi(x, tau) = (e^{2c} - e^{xc}) / (e^{2c} - e^c) * exp(-tau / (e^{2c} - 1))`
//! with `c = M + 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::Grid;
use crate::report::CheckReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierParams {
    pub m: f64,
}

impl BarrierParams {
    pub fn new(m: f64) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(LabError::DomainViolation(format!("M must be finite and >= 0, got {m}")));
        }
        Ok(Self { m })
    }

    fn c(&self) -> f64 {
        self.m + 1.0
    }
}

fn check_domain(x: f64, tau: f64, p: &BarrierParams) -> Result<()> {
    BarrierParams::new(p.m)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(LabError::DomainViolation(format!("x = {x} outside [0, 1]")));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(LabError::DomainViolation(format!("tau = {tau} must be finite and >= 0")));
    }
    Ok(())
}

pub fn barrier_eval(x: f64, tau: f64, p: &BarrierParams) -> Result<f64> {
    check_domain(x, tau, p)?;
    let c = p.c();
    let e2 = (2.0 * c).exp();
    Ok((e2 - (x * c).exp()) / (e2 - c.exp()) * (-tau / (e2 - 1.0)).exp())
}

/// `psi_tau - psi_xx - a psi_x` in closed form.
pub fn barrier_residual(x: f64, tau: f64, a: f64, p: &BarrierParams) -> Result<f64> {
    check_domain(x, tau, p)?;
    let c = p.c();
    let e2 = (2.0 * c).exp();
    let exc = (x * c).exp();
    let decay = (-tau / (e2 - 1.0)).exp() / (e2 - c.exp());
    Ok(decay * (-(e2 - exc) / (e2 - 1.0) + c * (c + a) * exc))
}

/// Minimum over grid nodes, `n_tau` equispaced times in `[0, tau_max]` and
/// both extreme coefficients `a = +-M` of the supersolution residual.
pub fn barrier_supersolution_check(
    p: &BarrierParams,
    grid: &Grid,
    tau_max: f64,
    n_tau: usize,
) -> Result<CheckReport> {
    BarrierParams::new(p.m)?;
    if n_tau < 2 || !(tau_max > 0.0) {
        return Err(LabError::DomainViolation("need n_tau >= 2 and tau_max > 0".into()));
    }
    let mut margin_min = f64::INFINITY;
    let mut samples = 0;
    for i in 0..n_tau {
        let tau = tau_max * i as f64 / (n_tau - 1) as f64;
        for &x in grid.nodes() {
            for a in [-p.m, p.m] {
                margin_min = margin_min.min(barrier_residual(x, tau, a, p)?);
            }
            samples += 1;
        }
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("M".to_string(), p.m);
    parameters.insert("tau_max".to_string(), tau_max);
    parameters.insert("n_tau".to_string(), n_tau as f64);
    parameters.insert("n_x".to_string(), grid.len() as f64);
    Ok(CheckReport {
        check: "barrier-supersolution".to_string(),
        parameters,
        margin_min,
        pass: margin_min > 0.0,
        samples,
    })
}
