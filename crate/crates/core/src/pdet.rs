//! Perturbation determinant `D(ζ)` of the star and amplitude/phase scans
//! `D(k) = a(k) e^{iη(k)}` along the real axis.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jost::{jost_at_origin, JostOptions};
use crate::potential::StarPotential;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest accepted phase increment between neighbouring grid points.
pub const MAX_PHASE_STEP: f64 = 0.75 * PI;

/// Default scan grid: geometric, 2000 points on [0.01, 100].
pub const DEFAULT_K_MIN: f64 = 0.01;
pub const DEFAULT_K_MAX: f64 = 100.0;
pub const DEFAULT_POINTS: usize = 2000;

/// `D(ζ) = K(ζ)/(inζ) ∏ ω_j(ζ)` with the product multiplied into the sum,
/// `D = (inζ)^{-1} Σ_j θ_j'(0) ∏_{i≠j} θ_i(0)`, which stays finite when some `ω_j` vanishes.
pub fn perturbation_determinant(sp: &StarPotential, zeta: Complex64, opts: &JostOptions) -> Result<Complex64> {
    let n = sp.n();
    let mut omega = Vec::with_capacity(n);
    let mut domega = Vec::with_capacity(n);
    for j in 0..n {
        let d = jost_at_origin(sp, j, zeta, opts)?;
        omega.push(d.theta0);
        domega.push(d.dtheta0);
    }
    Ok(combine(&omega, &domega, zeta))
}

fn combine(omega: &[Complex64], domega: &[Complex64], zeta: Complex64) -> Complex64 {
    let n = omega.len();
    // prefix[j] = ∏_{i<j} ω_i, suffix handled on the way back
    let mut prefix = vec![Complex64::new(1.0, 0.0); n + 1];
    for j in 0..n {
        prefix[j + 1] = prefix[j] * omega[j];
    }
    let mut suffix = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for j in (0..n).rev() {
        sum += domega[j] * prefix[j] * suffix;
        suffix *= omega[j];
    }
    sum / (I * n as f64 * zeta)
}

/// Amplitude `a = |D|` and phase `η` of `D` on a real grid, `η` continued from
/// the largest |k| downward so that `η(±∞) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterminantScan {
    pub k: Vec<f64>,
    pub d: Vec<Complex64>,
    pub a: Vec<f64>,
    pub eta: Vec<f64>,
}

impl DeterminantScan {
    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// Columns `k,re_D,im_D,a,eta` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,re_D,im_D,a,eta")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.k[i], self.d[i].re, self.d[i].im, self.a[i], self.eta[i]
            )?;
        }
        Ok(())
    }

    /// The same scan evaluated independently at `−k`.
    pub fn mirrored(&self, sp: &StarPotential, opts: &JostOptions) -> Result<DeterminantScan> {
        let grid: Vec<f64> = self.k.iter().map(|k| -k).collect();
        scan_grid(sp, &grid, opts)
    }
}

pub fn geometric_grid(k_min: f64, k_max: f64, npoints: usize) -> Result<Vec<f64>> {
    if !(k_min > 0.0 && k_max > k_min && npoints >= 2) {
        return Err(Error::Config(format!(
            "scan grid needs 0 < k_min < k_max and at least 2 points (got {k_min}, {k_max}, {npoints})"
        )));
    }
    let ratio = (k_max / k_min).ln() / (npoints - 1) as f64;
    let mut grid: Vec<f64> = (0..npoints).map(|i| k_min * (ratio * i as f64).exp()).collect();
    grid[npoints - 1] = k_max;
    Ok(grid)
}

/// Scan on a geometric grid `[k_min, k_max]`; `k_min` must respect the low-energy floor.
pub fn scan(sp: &StarPotential, k_min: f64, k_max: f64, npoints: usize, opts: &JostOptions) -> Result<DeterminantScan> {
    if k_min < opts.floor && !opts.low_energy {
        return Err(Error::Config(format!("k_min = {k_min} is below the low-energy floor {}", opts.floor)));
    }
    scan_grid(sp, &geometric_grid(k_min, k_max, npoints)?, opts)
}

/// Scan on an arbitrary real grid whose entries share one sign and are
/// ordered by increasing |k|. Evaluation is parallel; unwrapping is sequential.
pub fn scan_grid(sp: &StarPotential, grid: &[f64], opts: &JostOptions) -> Result<DeterminantScan> {
    if grid.is_empty() {
        return Err(Error::Config("empty scan grid".into()));
    }
    let sign = grid[0].signum();
    if grid.iter().any(|k| k.signum() != sign || *k == 0.0) || grid.windows(2).any(|w| w[1].abs() <= w[0].abs()) {
        return Err(Error::Config("scan grid must be nonzero, single-signed and strictly increasing in |k|".into()));
    }
    let d = grid
        .par_iter()
        .map(|&k| perturbation_determinant(sp, Complex64::new(k, 0.0), opts))
        .collect::<Result<Vec<_>>>()?;
    let a = d.iter().map(|z| z.norm()).collect();
    let eta = unwrap_from_top(grid, &d)?;
    Ok(DeterminantScan { k: grid.to_vec(), d, a, eta })
}

/// Continuous argument of `values`, anchored at the principal value of the last entry.
pub fn unwrap_from_top(grid: &[f64], values: &[Complex64]) -> Result<Vec<f64>> {
    let n = values.len();
    let mut eta = vec![0.0; n];
    eta[n - 1] = values[n - 1].arg();
    for i in (0..n - 1).rev() {
        let step = (values[i] / values[i + 1]).arg();
        if step.abs() > MAX_PHASE_STEP || !step.is_finite() {
            return Err(Error::GridTooCoarse { k: grid[i], increment: step });
        }
        eta[i] = eta[i + 1] + step;
    }
    Ok(eta)
}
