//! Finite differences. Dirichlet stencils use the homogeneous ghost values
//! `u_0 = u_n = 0`; periodic stencils wrap around.

use crate::error::{LabError, Result};

fn at(v: &[f64], j: isize) -> f64 {
    if j < 0 || j as usize >= v.len() {
        0.0
    } else {
        v[j as usize]
    }
}

/// Central difference `(u_{j+1} - u_{j-1}) / 2h`.
pub fn central(v: &[f64], h: f64) -> Vec<f64> {
    let inv = 0.5 / h;
    (0..v.len() as isize)
        .map(|j| (at(v, j + 1) - at(v, j - 1)) * inv)
        .collect()
}

/// Three-point Laplacian `(u_{j-1} - 2u_j + u_{j+1}) / h^2`.
pub fn laplacian(v: &[f64], h: f64) -> Vec<f64> {
    let inv = 1.0 / (h * h);
    (0..v.len() as isize)
        .map(|j| (at(v, j - 1) - 2.0 * at(v, j) + at(v, j + 1)) * inv)
        .collect()
}

/// Three-point Laplacian with periodic wrap-around.
pub fn periodic_laplacian(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let inv = 1.0 / (h * h);
    (0..n)
        .map(|j| (v[(j + n - 1) % n] - 2.0 * v[j] + v[(j + 1) % n]) * inv)
        .collect()
}

/// First-order upwind approximation of `a u_x` for transport with velocity
/// `-a`: forward differences where `a > 0`, backward where `a < 0`.
pub fn upwind_advection(a: &[f64], v: &[f64], h: f64, periodic: bool) -> Vec<f64> {
    let n = v.len();
    let get = |j: isize| -> f64 {
        if periodic {
            v[j.rem_euclid(n as isize) as usize]
        } else {
            at(v, j)
        }
    };
    (0..n as isize)
        .map(|j| {
            let aj = a[j as usize];
            if aj > 0.0 {
                aj * (get(j + 1) - get(j)) / h
            } else {
                aj * (get(j) - get(j - 1)) / h
            }
        })
        .collect()
}

/// `sum_{j=0}^{n-1} (u_{j+1} - u_j)^2 / h`, the energy of the discrete Laplacian.
pub fn dirichlet_energy(v: &[f64], h: f64) -> f64 {
    let m = v.len() as isize;
    (-1..m)
        .map(|j| {
            let d = at(v, j + 1) - at(v, j);
            d * d
        })
        .sum::<f64>()
        / h
}

/// Thomas algorithm for a general tridiagonal system.
///
/// `lower[0]` and `upper[m-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    if lower.len() != m || upper.len() != m || rhs.len() != m {
        return Err(LabError::LinearSolveFailure("tridiagonal band lengths differ".into()));
    }
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut denom = diag[0];
    if denom == 0.0 || !denom.is_finite() {
        return Err(LabError::LinearSolveFailure("zero pivot in row 0".into()));
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..m {
        denom = diag[i] - lower[i] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(LabError::LinearSolveFailure(format!("zero pivot in row {i}")));
        }
        c[i] = if i + 1 < m { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    for i in (0..m - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Solves `(I - c L) x = rhs` for the three-point Laplacian `L`.
pub fn solve_shifted_laplacian(c: f64, h: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let m = rhs.len();
    let off = -c / (h * h);
    let lower = vec![off; m];
    let upper = vec![off; m];
    let diag = vec![1.0 + 2.0 * c / (h * h); m];
    solve_tridiagonal(&lower, &diag, &upper, rhs)
}
