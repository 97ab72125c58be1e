//! Fourier machinery for the periodic grid.
//!
//! Coefficients follow the unnormalized DFT convention of `rustfft`: the
//! forward transform is unscaled and [`inverse`] divides by `n`. Index `j`
//! carries the signed wavenumber returned by [`wavenumber`]; the Nyquist
//! index `n / 2` is treated as a real cosine mode and dropped by every odd
//! derivative.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> Plans {
    static CACHE: OnceLock<Mutex<(FftPlanner<f64>, HashMap<usize, Plans>)>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    let (planner, map) = &mut *guard;
    if let Some(p) = map.get(&n) {
        return p.clone();
    }
    let p = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    map.insert(n, p.clone());
    p
}

pub fn forward(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plans(n).0.process(&mut buf);
    buf
}

pub fn inverse(mut coeffs: Vec<Complex64>) -> Vec<f64> {
    let n = coeffs.len();
    plans(n).1.process(&mut coeffs);
    let scale = 1.0 / n as f64;
    coeffs.into_iter().map(|c| c.re * scale).collect()
}

/// Signed wavenumber of DFT index `j` on `n` points. The Nyquist index maps to `n / 2`.
pub fn wavenumber(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

fn is_nyquist(j: usize, n: usize) -> bool {
    n % 2 == 0 && j == n / 2
}

/// Largest retained wavenumber under the 2/3 rule, chosen so `3K < n`.
pub fn dealias_cutoff(n: usize) -> usize {
    (n - 1) / 3
}

pub fn derivative(values: &[f64], order: u32) -> Vec<f64> {
    let n = values.len();
    let mut c = forward(values);
    for (j, cj) in c.iter_mut().enumerate() {
        if order % 2 == 1 && is_nyquist(j, n) {
            *cj = Complex64::new(0.0, 0.0);
            continue;
        }
        let ik = Complex64::new(0.0, 2.0 * PI * wavenumber(j, n) as f64);
        *cj *= ik.powu(order);
    }
    inverse(c)
}

/// Zero every mode with `|k| > kmax`.
pub fn truncate(values: &[f64], kmax: usize) -> Vec<f64> {
    let n = values.len();
    let mut c = forward(values);
    for (j, cj) in c.iter_mut().enumerate() {
        if wavenumber(j, n).unsigned_abs() as usize > kmax {
            *cj = Complex64::new(0.0, 0.0);
        }
    }
    inverse(c)
}

/// Samples of `x -> v(x - s)` for the trigonometric interpolant `v`.
pub fn shift(values: &[f64], s: f64) -> Vec<f64> {
    let n = values.len();
    let mut c = forward(values);
    for (j, cj) in c.iter_mut().enumerate() {
        let k = wavenumber(j, n) as f64;
        if is_nyquist(j, n) {
            *cj *= (2.0 * PI * k * s).cos();
        } else {
            *cj *= Complex64::from_polar(1.0, -2.0 * PI * k * s);
        }
    }
    inverse(c)
}

/// Applies `d^2/dx^2` (all modes, Nyquist included).
pub fn laplacian(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut c = forward(values);
    for (j, cj) in c.iter_mut().enumerate() {
        let k = 2.0 * PI * wavenumber(j, n) as f64;
        *cj *= -k * k;
    }
    inverse(c)
}

/// Solves `(I - c d^2/dx^2) x = rhs` mode by mode.
pub fn solve_shifted_laplacian(c: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut coeffs = forward(rhs);
    for (j, cj) in coeffs.iter_mut().enumerate() {
        let k = 2.0 * PI * wavenumber(j, n) as f64;
        *cj /= 1.0 + c * k * k;
    }
    inverse(coeffs)
}

/// Solves `(I - c L_h) x = rhs` where `L_h` is the periodic three-point
/// Laplacian, diagonal in Fourier space with symbol `-(4/h^2) sin^2(pi k/n)`.
pub fn solve_shifted_fd_laplacian(c: f64, h: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut coeffs = forward(rhs);
    for (j, cj) in coeffs.iter_mut().enumerate() {
        let s = (PI * wavenumber(j, n) as f64 / n as f64).sin();
        *cj /= 1.0 + c * 4.0 * s * s / (h * h);
    }
    inverse(coeffs)
}
