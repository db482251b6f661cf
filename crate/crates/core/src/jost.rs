//! Jost solutions `θ_j(x, ζ)` on each edge and the bounded zero-energy solution.
//!
//! The integration runs backwards from the truncation point X∞ on the
//! normalised function `y = θ·e^{−iζx}`, which satisfies
//! `y'' = v y − 2iζ y'` with `y(X∞) = 1, y'(X∞) = 0`. The factor `e^{iζx}`
//! is never formed during integration, so nothing underflows for `Im ζ > 0`,
//! and the parasitic mode `e^{−2iζx}` is contracting in the backward direction.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{self, Tolerance};
use crate::potential::{EdgePotential, StarPotential};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JostOptions {
    pub tol: f64,
    /// Smallest admissible |ζ| unless `low_energy` is set.
    pub floor: f64,
    pub low_energy: bool,
    /// Overrides every edge's own truncation point.
    pub x_inf: Option<f64>,
    pub record: bool,
}

impl Default for JostOptions {
    fn default() -> Self {
        Self { tol: 1e-10, floor: 1e-3, low_energy: false, x_inf: None, record: false }
    }
}

impl JostOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JostSample {
    pub x: f64,
    pub theta: Complex64,
    pub dtheta: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JostData {
    pub edge: usize,
    pub zeta: Complex64,
    /// `ω_j(ζ) = θ_j(0, ζ)`
    pub theta0: Complex64,
    /// `θ_j'(0, ζ)`
    pub dtheta0: Complex64,
    pub x_inf: f64,
    /// Samples ordered from X∞ down to 0, when requested.
    pub trajectory: Option<Vec<JostSample>>,
}

impl JostData {
    /// `W[θ̄, θ] = θ̄ θ' − θ̄' θ` along the trajectory; equals `2ik` for real `k`.
    pub fn wronskians(&self) -> Option<Vec<Complex64>> {
        self.trajectory.as_ref().map(|t| {
            t.iter()
                .map(|s| s.theta.conj() * s.dtheta - s.dtheta.conj() * s.theta)
                .collect()
        })
    }

    /// CSV columns `x, re_theta, im_theta, re_dtheta, im_dtheta`.
    pub fn write_trajectory_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,re_theta,im_theta,re_dtheta,im_dtheta")?;
        if let Some(t) = &self.trajectory {
            for s in t {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    s.x, s.theta.re, s.theta.im, s.dtheta.re, s.dtheta.im
                )?;
            }
        }
        Ok(())
    }
}

fn check_zeta(zeta: Complex64, opts: &JostOptions) -> Result<()> {
    if !(zeta.re.is_finite() && zeta.im.is_finite()) {
        return Err(Error::Domain { zeta, reason: "non-finite spectral parameter" });
    }
    if zeta.im < 0.0 {
        return Err(Error::Domain { zeta, reason: "lower half-plane" });
    }
    if zeta == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain { zeta, reason: "ζ = 0" });
    }
    if !opts.low_energy && zeta.norm() < opts.floor {
        return Err(Error::Domain { zeta, reason: "below the low-energy floor" });
    }
    Ok(())
}

/// Backward integration of the normalised equation on one edge; returns
/// `(y(0), y'(0))` and the optional trajectory of `(x, y, y')`.
fn integrate_edge(
    edge: &EdgePotential,
    zeta: Complex64,
    x_inf: f64,
    tol: f64,
    record: bool,
) -> Result<ode::Outcome<2>> {
    let drift = -2.0 * I * zeta;
    let rhs = move |x: f64, s: &[Complex64; 2]| [s[1], s[0] * edge.eval(x) + drift * s[1]];
    let start = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    ode::integrate(rhs, x_inf, 0.0, start, Tolerance::from_tol(tol), record)
}

/// Jost function data `θ_j(0, ζ)`, `θ_j'(0, ζ)` for one edge of the star.
pub fn jost_at_origin(sp: &StarPotential, j: usize, zeta: Complex64, opts: &JostOptions) -> Result<JostData> {
    let edge = sp
        .edges()
        .get(j)
        .ok_or_else(|| Error::Config(format!("edge index {j} out of range (n = {})", sp.n())))?;
    let mut data = jost_for_edge(edge, zeta, opts)?;
    data.edge = j;
    Ok(data)
}

pub fn jost_for_edge(edge: &EdgePotential, zeta: Complex64, opts: &JostOptions) -> Result<JostData> {
    check_zeta(zeta, opts)?;
    let x_inf = opts.x_inf.unwrap_or_else(|| edge.truncation_point());
    let out = integrate_edge(edge, zeta, x_inf, opts.tol, opts.record).map_err(|e| match e {
        Error::NumericFailure(msg) => Error::NumericFailure(format!("Jost solution at ζ = {zeta}: {msg}")),
        other => other,
    })?;
    let [y, dy] = out.y;
    let trajectory = out.trajectory.map(|t| {
        t.x.iter()
            .zip(&t.y)
            .map(|(&x, s)| {
                let phase = (I * zeta * x).exp();
                JostSample { x, theta: phase * s[0], dtheta: phase * (s[1] + I * zeta * s[0]) }
            })
            .collect()
    });
    Ok(JostData { edge: 0, zeta, theta0: y, dtheta0: dy + I * zeta * y, x_inf, trajectory })
}

/// Boundary values `(u(0), u'(0))` of the zero-energy solution normalised by
/// `u(X∞) = 1`, `u'(X∞) = 0` (the bounded one, since the free solutions are 1 and x).
pub fn zero_energy_solution(sp: &StarPotential, j: usize, opts: &JostOptions) -> Result<(f64, f64)> {
    let edge = sp
        .edges()
        .get(j)
        .ok_or_else(|| Error::Config(format!("edge index {j} out of range (n = {})", sp.n())))?;
    let x_inf = opts.x_inf.unwrap_or_else(|| edge.truncation_point());
    let out = integrate_edge(edge, Complex64::new(0.0, 0.0), x_inf, opts.tol, false)?;
    Ok((out.y[0].re, out.y[1].re))
}
