//! Negative eigenvalues as zeros of `D(iκ)`, their multiplicities from winding
//! numbers, the zero-energy resonance multiplicity, and a finite-difference
//! reference spectrum.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jost::{zero_energy_solution, JostOptions};
use crate::pdet::perturbation_determinant;
use crate::potential::StarPotential;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_CUTOFF: f64 = 1e-8;
/// Relative clustering tolerance for reference eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    pub multiplicity: usize,
}

impl Eigenvalue {
    pub fn kappa(&self) -> f64 {
        (-self.lambda).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    /// Strictly increasing, all negative.
    pub eigenvalues: Vec<Eigenvalue>,
    pub resonance_multiplicity: usize,
}

impl SpectrumResult {
    pub fn distinct(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Σ r_j
    pub fn total(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }

    /// Σ r_j |λ_j|^s
    pub fn power_sum(&self, s: f64) -> f64 {
        self.eigenvalues.iter().map(|e| e.multiplicity as f64 * (-e.lambda).powf(s)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumOptions {
    /// Upper end of the κ search interval; defaults to a bound from sup|v|.
    pub kappa_max: Option<f64>,
    pub grid_points: usize,
    /// Absolute tolerance on the located κ.
    pub root_tol: f64,
    pub jost: JostOptions,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { kappa_max: None, grid_points: 400, root_tol: 1e-12, jost: JostOptions::default() }
    }
}

/// `1.05 sqrt(max_j sup|v_j|) + 0.1`; every eigenvalue lies above `−max sup|v|`.
pub fn default_kappa_max(sp: &StarPotential) -> f64 {
    sp.kappa_bound()
}

fn eval_opts(opts: &JostOptions) -> JostOptions {
    JostOptions { low_energy: true, record: false, ..*opts }
}

/// `D(iκ)`, which is real for real potentials.
fn d_on_axis(sp: &StarPotential, kappa: f64, opts: &JostOptions) -> Result<f64> {
    let d = perturbation_determinant(sp, Complex64::new(0.0, kappa), opts)?;
    if d.im.abs() > 1e-8 * d.norm() {
        return Err(Error::NumericFailure(format!("D(iκ) not real at κ = {kappa}: {d}")));
    }
    Ok(d.re)
}

fn search_grid(floor: f64, kappa_max: f64, points: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..points)
        .map(|i| floor + (kappa_max - floor) * i as f64 / (points - 1) as f64)
        .collect();
    // extra geometric points resolve shallow states near the floor
    let top = kappa_max.min(1.0);
    if top > 2.0 * floor {
        let geo = points / 4;
        grid.extend((1..geo).map(|i| floor * (top / floor).powf(i as f64 / geo as f64)));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    grid
}

enum Candidate {
    SignChange(f64, f64),
    Extremum(f64, f64),
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locate the extremum of `D(iκ)` inside `[lo, hi]` by bisecting the sign of a centred slope.
fn extremum(sp: &StarPotential, lo: f64, hi: f64, tol: f64, opts: &JostOptions) -> Result<f64> {
    let delta = (1e-4 * (hi - lo)).max(1e-7);
    let slope = |k: f64| -> Result<f64> { Ok(d_on_axis(sp, k + delta, opts)? - d_on_axis(sp, k - delta, opts)?) };
    let (slo, shi) = (slope(lo)?, slope(hi)?);
    if (slo > 0.0) == (shi > 0.0) {
        return Ok(0.5 * (lo + hi));
    }
    bisect(slope, lo, hi, tol.max(delta * 1e-3))
}

/// Principal-argument increments along `values`, with the largest one.
fn phase_walk(values: &[Complex64]) -> (f64, f64) {
    let mut total = 0.0;
    let mut worst = 0.0f64;
    for w in values.windows(2) {
        let step = (w[1] / w[0]).arg();
        total += step;
        worst = worst.max(step.abs());
    }
    (total, worst)
}

/// Winding number of `D` around the circle `|ζ − center| = radius`.
pub fn winding_on_circle(sp: &StarPotential, center: Complex64, radius: f64, opts: &JostOptions) -> Result<f64> {
    if center.im - radius <= 0.0 {
        return Err(Error::Domain { zeta: center, reason: "winding circle leaves the upper half-plane" });
    }
    let opts = eval_opts(opts);
    let mut samples = 64usize;
    loop {
        let values = (0..=samples)
            .into_par_iter()
            .map(|i| {
                let t = 2.0 * PI * (i % samples) as f64 / samples as f64;
                perturbation_determinant(sp, center + radius * Complex64::from_polar(1.0, t), &opts)
            })
            .collect::<Result<Vec<_>>>()?;
        let (total, worst) = phase_walk(&values);
        if worst <= PI / 3.0 || samples >= 1 << 14 {
            return Ok(total / (2.0 * PI));
        }
        samples *= 2;
    }
}

/// Order of the zero of `D` at `ζ₀`, from the winding number on a small circle.
pub fn zero_order(sp: &StarPotential, zeta0: Complex64, radius: f64, opts: &JostOptions) -> Result<usize> {
    let w = winding_on_circle(sp, zeta0, radius, opts)?;
    let r = w.round();
    if (w - r).abs() > 0.1 || r < 0.0 {
        return Err(Error::ContourThroughZero { winding: w });
    }
    Ok(r as usize)
}

/// Winding number of `D` around the rectangle `[−w, w] × [lo, hi]`, sampled
/// adaptively so that no phase increment exceeds π/4.
pub fn rectangle_winding(sp: &StarPotential, half_width: f64, lo: f64, hi: f64, opts: &JostOptions) -> Result<f64> {
    let opts = eval_opts(opts);
    let corners = [
        Complex64::new(-half_width, lo),
        Complex64::new(half_width, lo),
        Complex64::new(half_width, hi),
        Complex64::new(-half_width, hi),
    ];
    let eval = |z: Complex64| perturbation_determinant(sp, z, &opts);
    let mut total = 0.0;
    for s in 0..4 {
        let (za, zb) = (corners[s], corners[(s + 1) % 4]);
        let pieces = 64usize;
        let pts: Vec<Complex64> = (0..=pieces).map(|i| za + (zb - za) * (i as f64 / pieces as f64)).collect();
        let vals = pts.par_iter().map(|&z| eval(z)).collect::<Result<Vec<_>>>()?;
        let sums = (0..pieces)
            .into_par_iter()
            .map(|i| refine_increment(&eval, pts[i], pts[i + 1], vals[i], vals[i + 1], 0))
            .collect::<Result<Vec<_>>>()?;
        total += sums.iter().sum::<f64>();
    }
    Ok(total / (2.0 * PI))
}

fn refine_increment<F>(eval: &F, za: Complex64, zb: Complex64, da: Complex64, db: Complex64, depth: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let step = (db / da).arg();
    if step.abs() <= PI / 4.0 {
        return Ok(step);
    }
    if depth > 40 {
        return Err(Error::ContourThroughZero { winding: f64::NAN });
    }
    let zm = 0.5 * (za + zb);
    let dm = eval(zm)?;
    Ok(refine_increment(eval, za, zm, da, dm, depth + 1)? + refine_increment(eval, zm, zb, dm, db, depth + 1)?)
}

/// Negative eigenvalues with multiplicities and the resonance multiplicity.
pub fn find_eigenvalues(sp: &StarPotential, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    let floor = opts.jost.floor;
    let kappa_max = opts.kappa_max.unwrap_or_else(|| default_kappa_max(sp));
    if !(kappa_max > floor) {
        return Err(Error::Config(format!("κ_max = {kappa_max} must exceed the floor {floor}")));
    }
    let jopts = eval_opts(&opts.jost);
    let expected = {
        let w = rectangle_winding(sp, kappa_max, floor, kappa_max, &jopts)?;
        let r = w.round();
        if (w - r).abs() > 0.1 || r < 0.0 {
            return Err(Error::ContourThroughZero { winding: w });
        }
        r as usize
    };

    let mut points = opts.grid_points.max(16);
    let mut zeros = Vec::new();
    for _attempt in 0..3 {
        zeros = locate_zeros(sp, floor, kappa_max, points, opts.root_tol, &jopts)?;
        let found: usize = zeros.iter().map(|z: &(f64, usize)| z.1).sum();
        if found == expected {
            break;
        }
        points *= 4;
    }
    let found: usize = zeros.iter().map(|z| z.1).sum();
    if found != expected {
        return Err(Error::IncompleteSpectrum { expected, found });
    }

    let mut eigenvalues: Vec<Eigenvalue> =
        zeros.into_iter().map(|(k, r)| Eigenvalue { lambda: -k * k, multiplicity: r }).collect();
    eigenvalues.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let resonance_multiplicity = resonance_multiplicity(sp, &opts.jost)?;
    Ok(SpectrumResult { eigenvalues, resonance_multiplicity })
}

fn locate_zeros(
    sp: &StarPotential,
    floor: f64,
    kappa_max: f64,
    points: usize,
    tol: f64,
    opts: &JostOptions,
) -> Result<Vec<(f64, usize)>> {
    let grid = search_grid(floor, kappa_max, points);
    let values = grid.par_iter().map(|&k| d_on_axis(sp, k, opts)).collect::<Result<Vec<_>>>()?;

    let mut candidates = Vec::new();
    for i in 0..grid.len() - 1 {
        if values[i] == 0.0 {
            candidates.push(Candidate::SignChange(grid[i], grid[i]));
        } else if values[i + 1] != 0.0 && (values[i] > 0.0) != (values[i + 1] > 0.0) {
            candidates.push(Candidate::SignChange(grid[i], grid[i + 1]));
        }
        if i > 0 {
            let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
            let same_sign = (a > 0.0) == (b > 0.0) && (b > 0.0) == (c > 0.0);
            if same_sign && b.abs() < a.abs() && b.abs() <= c.abs() {
                candidates.push(Candidate::Extremum(grid[i - 1], grid[i + 1]));
            }
        }
    }

    let located = candidates
        .par_iter()
        .map(|c| match *c {
            Candidate::SignChange(lo, hi) if lo == hi => Ok(lo),
            Candidate::SignChange(lo, hi) => bisect(|k| d_on_axis(sp, k, opts), lo, hi, tol),
            Candidate::Extremum(lo, hi) => extremum(sp, lo, hi, tol, opts),
        })
        .collect::<Result<Vec<_>>>()?;

    let mut kappas = located;
    kappas.sort_by(f64::total_cmp);
    kappas.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * b.abs().max(1.0));

    let orders = (0..kappas.len())
        .into_par_iter()
        .map(|i| {
            let k = kappas[i];
            let mut gap = kappa_max + 1.0 - k;
            if i > 0 {
                gap = gap.min(k - kappas[i - 1]);
            }
            if i + 1 < kappas.len() {
                gap = gap.min(kappas[i + 1] - k);
            }
            let radius = (0.5 * gap).min(0.5 * k).min(0.1);
            zero_order(sp, Complex64::new(0.0, k), radius, opts)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(kappas.into_iter().zip(orders).filter(|(_, r)| *r > 0).collect())
}

/// Dimension of the space of bounded zero-energy solutions satisfying the
/// vertex conditions.
pub fn resonance_multiplicity(sp: &StarPotential, opts: &JostOptions) -> Result<usize> {
    let n = sp.n();
    let data = (0..n)
        .into_par_iter()
        .map(|j| zero_energy_solution(sp, j, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank_deficiency(&data)?.0)
}

/// `(m, singular values)` of the continuity + Kirchhoff system for edge data `(u(0), u'(0))`.
pub fn rank_deficiency(data: &[(f64, f64)]) -> Result<(usize, Vec<f64>)> {
    let n = data.len();
    // each edge column scaled so that (u0, du0) has unit norm
    let unit: Vec<(f64, f64)> = data
        .iter()
        .map(|&(u, du)| {
            let s = u.hypot(du);
            if s > 0.0 {
                (u / s, du / s)
            } else {
                (0.0, 0.0)
            }
        })
        .collect();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n - 1 {
        m[(j, j)] = unit[j].0;
        m[(j, j + 1)] = -unit[j + 1].0;
    }
    for j in 0..n {
        m[(n - 1, j)] = unit[j].1;
    }
    let sv: Vec<f64> = m.singular_values().iter().copied().collect();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok((n, sv));
    }
    let cutoff = RANK_CUTOFF * smax;
    let zero = sv.iter().filter(|&&s| s < cutoff).count();
    if let Some(&s) = sv.iter().find(|&&s| s > cutoff / 10.0 && s < cutoff * 10.0) {
        let low = zero;
        let high = if s < cutoff { zero - 1 } else { zero + 1 };
        return Err(Error::AmbiguousResonance { ratio: s / smax, low: low.min(high), high: low.max(high) });
    }
    Ok((zero, sv))
}

/// Reference negative spectrum of a second-order finite-difference discretisation
/// with Dirichlet ends at `x_inf`, via Sturm counts on the tree-structured matrix.
pub fn oracle_eigenvalues(sp: &StarPotential, h: f64, x_inf: f64) -> Result<Vec<Eigenvalue>> {
    if !(h > 0.0 && x_inf > 4.0 * h) {
        return Err(Error::Config(format!("oracle needs 0 < 4h < X∞ (h = {h}, X∞ = {x_inf})")));
    }
    let op = FdOperator::new(sp, h, x_inf);
    let below_zero = op.count_below(0.0);
    if below_zero == 0 {
        return Ok(Vec::new());
    }
    let (lower, _) = op.gershgorin();
    let mut values = Vec::with_capacity(below_zero);
    for idx in 0..below_zero {
        // smallest λ with count_below(λ) > idx
        let (mut lo, mut hi) = (lower, 0.0);
        while hi - lo > 1e-13 * lo.abs().max(1e-3) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if op.count_below(mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        values.push(0.5 * (lo + hi));
    }
    let mut out: Vec<Eigenvalue> = Vec::new();
    for v in values {
        match out.last_mut() {
            Some(last) if (v - last.lambda).abs() <= CLUSTER_TOL * v.abs() => {
                let m = last.multiplicity as f64;
                last.lambda = (last.lambda * m + v) / (m + 1.0);
                last.multiplicity += 1;
            }
            _ => out.push(Eigenvalue { lambda: v, multiplicity: 1 }),
        }
    }
    Ok(out)
}

/// Symmetrised finite-difference operator: vertex unknown plus `steps − 1`
/// interior unknowns per edge.
struct FdOperator {
    vertex_diag: f64,
    vertex_coupling: f64,
    edge_diag: Vec<Vec<f64>>,
    off: f64,
}

impl FdOperator {
    fn new(sp: &StarPotential, h: f64, x_inf: f64) -> Self {
        let n = sp.n() as f64;
        let steps = (x_inf / h).round() as usize;
        let h2 = h * h;
        let v0: f64 = sp.edges().iter().map(|e| e.eval(0.0)).sum();
        // vertex row carries mass n/2; scaling by M^{-1/2} symmetrises it
        let vertex_diag = (n / h2 + 0.5 * v0) / (0.5 * n);
        let vertex_coupling = -1.0 / h2 / (0.5 * n).sqrt();
        let edge_diag =
            sp.edges().iter().map(|e| (1..steps).map(|i| 2.0 / h2 + e.eval(i as f64 * h)).collect()).collect();
        Self { vertex_diag, vertex_coupling, edge_diag, off: -1.0 / h2 }
    }

    /// Number of eigenvalues strictly below `lambda` (negative LDLᵀ pivots).
    fn count_below(&self, lambda: f64) -> usize {
        let tiny = 1e-300;
        let mut count = 0;
        let mut d0 = self.vertex_diag - lambda;
        let off2 = self.off * self.off;
        for diag in &self.edge_diag {
            let mut d = 0.0;
            let mut first = true;
            for a in diag.iter().rev() {
                d = if first { a - lambda } else { a - lambda - off2 / d };
                first = false;
                if d == 0.0 {
                    d = -tiny;
                }
                if d < 0.0 {
                    count += 1;
                }
            }
            d0 -= self.vertex_coupling * self.vertex_coupling / d;
        }
        if d0 <= 0.0 {
            count += 1;
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.edge_diag.len() as f64;
        let mut lo = self.vertex_diag - n * self.vertex_coupling.abs();
        let mut hi = self.vertex_diag + n * self.vertex_coupling.abs();
        let r = 2.0 * self.off.abs().max(self.vertex_coupling.abs());
        for diag in &self.edge_diag {
            for &a in diag {
                lo = lo.min(a - r);
                hi = hi.max(a + r);
            }
        }
        (lo, hi)
    }
}
