//! Adaptive Gragg–Bulirsch–Stoer extrapolation for small complex systems.
//!
//! Each macro step runs the modified midpoint rule with 2, 4, 6, … substeps
//! and extrapolates the results in H². The difference between the two
//! highest tableau entries is the local error estimate; step size and the
//! target column are chosen to minimise work per unit step. Integration runs
//! in either direction (`x1 < x0` integrates backwards).

use num_complex::Complex64;

use crate::error::{Error, Result};

const SEQ: [usize; 9] = [2, 4, 6, 8, 10, 12, 14, 16, 18];
const KMAX: usize = SEQ.len() - 1;
const SAFETY_1: f64 = 0.94;
const SAFETY_2: f64 = 0.65;
const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerance {
    /// `rtol = tol`, `atol = tol·1e-2`.
    pub fn from_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol * 1e-2 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory<const N: usize> {
    pub x: Vec<f64>,
    pub y: Vec<[Complex64; N]>,
}

#[derive(Debug, Clone)]
pub struct Outcome<const N: usize> {
    pub y: [Complex64; N],
    pub steps: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub trajectory: Option<Trajectory<N>>,
}

#[inline]
fn axpy<const N: usize>(y: &[Complex64; N], a: f64, d: &[Complex64; N]) -> [Complex64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += d[i] * a;
    }
    out
}

fn midpoint<const N: usize, F>(
    f: &F,
    x: f64,
    y: &[Complex64; N],
    f0: &[Complex64; N],
    big_h: f64,
    n: usize,
) -> [Complex64; N]
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    let h = big_h / n as f64;
    let mut z0 = *y;
    let mut z1 = axpy(y, h, f0);
    for m in 1..n {
        let d = f(x + m as f64 * h, &z1);
        let z2 = axpy(&z0, 2.0 * h, &d);
        z0 = z1;
        z1 = z2;
    }
    let d = f(x + big_h, &z1);
    let mut out = [Complex64::new(0.0, 0.0); N];
    for i in 0..N {
        out[i] = 0.5 * (z0[i] + z1[i] + d[i] * h);
    }
    out
}

/// Integrate `y' = f(x, y)` from `x0` to `x1`.
pub fn integrate<const N: usize, F>(
    f: F,
    x0: f64,
    x1: f64,
    y0: [Complex64; N],
    tol: Tolerance,
    record: bool,
) -> Result<Outcome<N>>
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    let mut trajectory = record.then(|| Trajectory { x: vec![x0], y: vec![y0] });
    let mut out = Outcome { y: y0, steps: 0, rejected: 0, evaluations: 0, trajectory: None };
    let span = x1 - x0;
    if span == 0.0 {
        out.trajectory = trajectory;
        return Ok(out);
    }
    let dir = span.signum();

    // cumulative work per column, counting the shared f(x0)
    let mut work = [0.0; KMAX + 1];
    let mut acc = 1.0;
    for (k, n) in SEQ.iter().enumerate() {
        acc += *n as f64;
        work[k] = acc;
    }

    let mut x = x0;
    let mut y = y0;
    let mut h = dir * span.abs().min(0.5);
    let mut k_target = 5usize;
    let mut table: Vec<Vec<[Complex64; N]>> = (0..=KMAX).map(|_| Vec::with_capacity(KMAX + 1)).collect();

    while (x1 - x) * dir > 0.0 {
        if out.steps + out.rejected > MAX_STEPS {
            return Err(Error::NumericFailure(format!(
                "step budget exhausted at x = {x:.6e} (h = {h:.3e})"
            )));
        }
        let remaining = x1 - x;
        let last = h.abs() >= remaining.abs() * (1.0 - 1e-12);
        if last {
            h = remaining;
        }
        if h.abs() < 1e-14 * x.abs().max(1.0) {
            return Err(Error::NumericFailure(format!("step size underflow at x = {x:.6e}")));
        }

        let f0 = f(x, &y);
        out.evaluations += 1;
        let mut h_pred = [0.0f64; KMAX + 1];
        let mut cost = [f64::INFINITY; KMAX + 1];
        let mut converged = None;
        let k_limit = (k_target + 1).min(KMAX);
        for k in 0..=k_limit {
            let yk = midpoint(&f, x, &y, &f0, h, SEQ[k]);
            out.evaluations += SEQ[k];
            table[k].clear();
            table[k].push(yk);
            for j in 1..=k {
                let ratio = (SEQ[k] as f64 / SEQ[k - j] as f64).powi(2);
                let prev = table[k][j - 1];
                let mut next = prev;
                for i in 0..N {
                    next[i] += (prev[i] - table[k - 1][j - 1][i]) / (ratio - 1.0);
                }
                table[k].push(next);
            }
            if k == 0 {
                continue;
            }
            let best = &table[k][k];
            let second = &table[k][k - 1];
            let mut err = 0.0f64;
            for i in 0..N {
                let scale = tol.atol + tol.rtol * y[i].norm().max(best[i].norm());
                err = err.max((best[i] - second[i]).norm() / scale);
            }
            if !err.is_finite() {
                h_pred[k] = h * 0.1;
                cost[k] = f64::INFINITY;
                break;
            }
            let expo = 1.0 / (2 * k + 1) as f64;
            let fac = if err == 0.0 {
                4.0
            } else {
                (SAFETY_1 * (SAFETY_2 / err).powf(expo)).clamp(0.02, 4.0)
            };
            h_pred[k] = h * fac;
            cost[k] = work[k] / h_pred[k].abs();
            if err <= 1.0 {
                converged = Some(k);
                break;
            }
        }

        match converged {
            Some(k) => {
                y = table[k][k];
                x = if last { x1 } else { x + h };
                out.steps += 1;
                if let Some(t) = trajectory.as_mut() {
                    t.x.push(x);
                    t.y.push(y);
                }
                let mut kbest = 1;
                for j in 1..=k {
                    if cost[j] < cost[kbest] {
                        kbest = j;
                    }
                }
                if kbest == k && k < KMAX && k >= k_target {
                    h = h_pred[k] * work[k + 1] / work[k];
                    k_target = k + 1;
                } else {
                    h = h_pred[kbest];
                    k_target = kbest.max(2);
                }
            }
            None => {
                out.rejected += 1;
                let k = (1..=k_limit).rev().find(|&k| h_pred[k] != 0.0).unwrap_or(1);
                let shrink = if h_pred[k] != 0.0 { (h_pred[k] / h).min(0.7) } else { 0.1 };
                h *= shrink.max(0.02);
            }
        }
    }
    out.y = y;
    out.trajectory = trajectory;
    Ok(out)
}

/// Classical fixed-step fourth-order Runge–Kutta with `n` steps. Kept as an
/// independent reference for the adaptive integrator.
pub fn rk4_fixed<const N: usize, F>(f: F, x0: f64, x1: f64, y0: [Complex64; N], n: usize) -> [Complex64; N]
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    let h = (x1 - x0) / n as f64;
    let mut y = y0;
    for s in 0..n {
        let x = x0 + s as f64 * h;
        let k1 = f(x, &y);
        let k2 = f(x + 0.5 * h, &axpy(&y, 0.5 * h, &k1));
        let k3 = f(x + 0.5 * h, &axpy(&y, 0.5 * h, &k2));
        let k4 = f(x + h, &axpy(&y, h, &k3));
        for i in 0..N {
            y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn harmonic_oscillator_forward_and_backward() {
        let f = |_x: f64, y: &[Complex64; 2]| [y[1], -y[0]];
        let tol = Tolerance::from_tol(1e-12);
        let fwd = integrate(f, 0.0, 20.0, [c(1.0, 0.0), c(0.0, 0.0)], tol, false).unwrap();
        assert!((fwd.y[0].re - 20f64.cos()).abs() < 1e-10);
        assert!((fwd.y[1].re + 20f64.sin()).abs() < 1e-10);
        let back = integrate(f, 20.0, 0.0, fwd.y, tol, false).unwrap();
        assert!((back.y[0] - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn complex_exponential() {
        let w = c(0.3, 7.0);
        let f = move |_x: f64, y: &[Complex64; 1]| [w * y[0]];
        let out = integrate(f, 0.0, 3.0, [c(1.0, 0.0)], Tolerance::from_tol(1e-12), true).unwrap();
        let exact = (w * 3.0).exp();
        assert!((out.y[0] - exact).norm() / exact.norm() < 1e-10);
        let t = out.trajectory.unwrap();
        assert_eq!(t.x.len(), out.steps + 1);
        assert_eq!(*t.x.last().unwrap(), 3.0);
    }

    #[test]
    fn decaying_mode_backwards() {
        // y' = 400 y integrated backwards contracts; accuracy is bounded by atol
        let f = |_x: f64, y: &[Complex64; 1]| [y[0] * 400.0];
        let out = integrate(f, 1.0, 0.0, [c(1.0, 0.0)], Tolerance::from_tol(1e-10), false).unwrap();
        assert!(out.y[0].norm() < 1e-11, "{}", out.y[0]);
        assert!(out.steps < 2000, "{} steps", out.steps);
    }

    #[test]
    fn rk4_reference_converges() {
        let f = |x: f64, y: &[Complex64; 1]| [y[0] * x.cos()];
        let y = rk4_fixed(f, 0.0, 2.0, [c(1.0, 0.0)], 2000);
        assert!((y[0].re - 2f64.sin().exp()).abs() < 1e-11);
    }
}
