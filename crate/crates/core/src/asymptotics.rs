//! Coefficients `L_m` of the high-energy expansion `log D(ζ) = Σ L_m (2iζ)^{-m}`.
//!
//! Two independent routes are provided. The recursive route builds the
//! single-edge densities `g_m` as exact polynomials in the jet
//! `(v, v', v'', …)`, integrates them to the edge coefficients `ℓ_m`, and adds
//! the vertex constants `C_m` assembled from `a_m = (2/n) Σ_j g_{m−1}^{[j]}` and
//! the series `b_m = a_m' − Σ b_p a_{m−p}`. The closed-form route evaluates the
//! explicit expressions for `L_1 … L_5`.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::{EdgePotential, StarPotential};
use crate::quad;

/// Default and maximal expansion order.
pub const DEFAULT_ORDER: usize = 8;

/// Polynomial with integer coefficients in the jet variables `v^{(k)}`.
/// A monomial is the sorted list of derivative orders of its factors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JetPoly {
    terms: BTreeMap<Vec<u8>, i64>,
}

impl JetPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The single variable `v^{(k)}`.
    pub fn var(k: u8) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![k], 1);
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], i64)> {
        self.terms.iter().map(|(m, c)| (m.as_slice(), *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, mono: Vec<u8>, coef: i64) {
        let e = self.terms.entry(mono).or_insert(0);
        *e += coef;
        if *e == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
    }

    pub fn add(&self, other: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn scale(&self, factor: i64) -> JetPoly {
        if factor == 0 {
            return JetPoly::zero();
        }
        JetPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect() }
    }

    pub fn mul(&self, other: &JetPoly) -> JetPoly {
        let mut out = JetPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut mono = ma.clone();
                mono.extend_from_slice(mb);
                mono.sort_unstable();
                out.add_term(mono, ca * cb);
            }
        }
        out
    }

    /// d/dx by the product rule.
    pub fn derivative(&self) -> JetPoly {
        let mut out = JetPoly::zero();
        for (mono, c) in &self.terms {
            for i in 0..mono.len() {
                if i > 0 && mono[i] == mono[i - 1] {
                    continue;
                }
                let same = mono.iter().filter(|&&k| k == mono[i]).count() as i64;
                let mut next = mono.clone();
                next[i] += 1;
                next.sort_unstable();
                out.add_term(next, c * same);
            }
        }
        out
    }

    /// Highest derivative order present (0 for the zero polynomial).
    pub fn max_order(&self) -> usize {
        self.terms.keys().flat_map(|m| m.iter()).map(|&k| k as usize).max().unwrap_or(0)
    }

    /// Weights `Σ (k + 2)` of all monomials.
    pub fn weights(&self) -> Vec<usize> {
        self.terms.keys().map(|m| m.iter().map(|&k| k as usize + 2).sum()).collect()
    }

    /// Evaluate with `jet[k] = v^{(k)}(x)`.
    pub fn eval(&self, jet: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(mono, c)| *c as f64 * mono.iter().map(|&k| jet[k as usize]).product::<f64>())
            .sum()
    }
}

/// `g_1 … g_M` as jet polynomials (index 0 holds `g_1`).
pub fn g_polynomials(order: usize) -> Vec<JetPoly> {
    let mut g: Vec<JetPoly> = Vec::with_capacity(order);
    if order == 0 {
        return g;
    }
    g.push(JetPoly::var(0));
    for m in 2..=order {
        let mut next = g[m - 2].derivative().scale(-1);
        for p in 1..=m.saturating_sub(2) {
            next = next.add(&g[p - 1].mul(&g[m - p - 2]).scale(-1));
        }
        g.push(next);
    }
    g
}

/// Exact polynomials used by the recursive route, built once per order.
#[derive(Debug, Clone)]
struct Symbolic {
    g: Vec<JetPoly>,
    dg: Vec<JetPoly>,
}

impl Symbolic {
    fn new(order: usize) -> Self {
        let g = g_polynomials(order);
        let dg = g.iter().map(JetPoly::derivative).collect();
        Self { g, dg }
    }
}

fn check_order(sp: &StarPotential, order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::Config("expansion order must be at least 1".into()));
    }
    let need = order - 1;
    let max = sp.max_derivative_order();
    if need > max {
        return Err(Error::UnsupportedOrder { requested: need, max });
    }
    Ok(())
}

/// Matrix `g_m(x_i)` for `m = 1 … M` on the given grid.
pub fn g_sequence(p: &EdgePotential, order: usize, grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    if order == 0 {
        return Ok(Vec::new());
    }
    let g = g_polynomials(order);
    let mut out = vec![Vec::with_capacity(grid.len()); order];
    for &x in grid {
        let jet = p.jet(x, order - 1)?;
        for (m, poly) in g.iter().enumerate() {
            out[m].push(poly.eval(&jet));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientOptions {
    pub order: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Largest accepted estimate of the neglected tail beyond X∞.
    pub tail_tol: f64,
}

impl Default for CoefficientOptions {
    fn default() -> Self {
        Self { order: DEFAULT_ORDER, abs_tol: 1e-13, rel_tol: 1e-11, tail_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Integral {
    value: f64,
    error: f64,
    tail: f64,
}

/// `∫_0^{2X∞} f` on the given break points (which end at X∞), plus a doubling
/// estimate of the rest. High derivatives of `v` outlive `v` itself, so the
/// densities are integrated past the truncation point of the potential.
fn integrate_with_tail<F: Fn(f64) -> f64 + Sync>(f: F, breaks: &[f64], opts: &CoefficientOptions) -> Integral {
    let x_inf = *breaks.last().unwrap();
    let mut pts = breaks.to_vec();
    pts.push(2.0 * x_inf);
    let r = quad::integrate_split(&f, &pts, opts.abs_tol, opts.rel_tol);
    let t = quad::integrate(|x| f(x).abs(), 2.0 * x_inf, 4.0 * x_inf, opts.abs_tol, 1e-3);
    Integral { value: r.value, error: r.error, tail: 2.0 * t.value }
}

/// `ℓ_m = −∫_0^∞ g_m` for one edge, `m = 1 … M`, with per-order tail estimates.
pub fn ell_coefficients(p: &EdgePotential, opts: &CoefficientOptions) -> Result<Vec<f64>> {
    Ok(ell_with_errors(p, &Symbolic::new(opts.order), opts)?.into_iter().map(|i| i.value).collect())
}

fn ell_with_errors(p: &EdgePotential, sym: &Symbolic, opts: &CoefficientOptions) -> Result<Vec<Integral>> {
    if p.is_zero() {
        return Ok(vec![Integral { value: 0.0, error: 0.0, tail: 0.0 }; sym.g.len()]);
    }
    if sym.g.len() > p.max_derivative_order + 1 {
        return Err(Error::UnsupportedOrder { requested: sym.g.len() - 1, max: p.max_derivative_order });
    }
    let breaks = p.breakpoints();
    let mut out = Vec::with_capacity(sym.g.len());
    for (m, poly) in sym.g.iter().enumerate() {
        let order = poly.max_order();
        let mut r = integrate_with_tail(|x| poly.eval(&p.jet_unchecked(x, order)), &breaks, opts);
        if m == 0 {
            r.tail = r.tail.max(p.tail_moment_bound(0));
        }
        r.value = -r.value;
        if r.tail > opts.tail_tol {
            return Err(Error::Truncation { bound: r.tail, tol: opts.tail_tol });
        }
        out.push(r);
    }
    Ok(out)
}

/// Pointwise vertex series at `x`: `a_1 … a_M` and `b_1 … b_{M−1}`.
fn vertex_values(sp: &StarPotential, sym: &Symbolic, x: f64) -> (Vec<f64>, Vec<f64>) {
    let order = sym.g.len();
    let n = sp.n() as f64;
    let mut a = vec![0.0; order + 1];
    let mut da = vec![0.0; order + 1];
    for edge in sp.edges() {
        if edge.is_zero() {
            continue;
        }
        let jet = edge.jet_unchecked(x, order.saturating_sub(1));
        for m in 2..=order {
            a[m] += sym.g[m - 2].eval(&jet);
            if m < order {
                da[m] += sym.dg[m - 2].eval(&jet);
            }
        }
    }
    for m in 0..=order {
        a[m] *= 2.0 / n;
        da[m] *= 2.0 / n;
    }
    let mut b = vec![0.0; order];
    for m in 1..order {
        let mut v = da[m];
        for p in 1..m {
            v -= b[p] * a[m - p];
        }
        b[m] = v;
    }
    (a, b)
}

fn merged_breaks(sp: &StarPotential) -> Vec<f64> {
    let mut pts: Vec<f64> = sp.edges().iter().flat_map(|e| e.breakpoints()).collect();
    pts.push(sp.truncation_point());
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    pts
}

/// Vertex constants `C_1 = 0, C_2, …, C_M`.
pub fn vertex_constants(sp: &StarPotential, opts: &CoefficientOptions) -> Result<Vec<f64>> {
    check_order(sp, opts.order)?;
    Ok(vertex_with_errors(sp, &Symbolic::new(opts.order), opts)?.into_iter().map(|i| i.value).collect())
}

fn vertex_with_errors(sp: &StarPotential, sym: &Symbolic, opts: &CoefficientOptions) -> Result<Vec<Integral>> {
    let order = sym.g.len();
    let (a0, _) = vertex_values(sp, sym, 0.0);
    let breaks = merged_breaks(sp);
    (1..=order)
        .into_par_iter()
        .map(|m| {
            if m == 1 || sp.is_free() {
                return Ok(Integral { value: 0.0, error: 0.0, tail: 0.0 });
            }
            let integrand = |x: f64| {
                let (a, b) = vertex_values(sp, sym, x);
                (1..m).map(|p| b[p] * a[m - p]).sum::<f64>()
            };
            let mut r = integrate_with_tail(integrand, &breaks, opts);
            if r.tail > opts.tail_tol {
                return Err(Error::Truncation { bound: r.tail, tol: opts.tail_tol });
            }
            r.value += a0[m];
            Ok(r)
        })
        .collect()
}

/// Scalars of the expansion; function grids are produced separately by [`coefficient_grids`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    pub order: usize,
    pub n: usize,
    /// `ell[j][m−1] = ℓ_m` on edge `j`.
    pub ell: Vec<Vec<f64>>,
    /// `c[m−1] = C_m`; `C_1 = 0`.
    pub c: Vec<f64>,
    /// `l[m−1] = L_m`.
    pub l: Vec<f64>,
    /// Quadrature error estimate per order.
    pub quad_error: Vec<f64>,
    /// Neglected-tail estimate per order.
    pub tail_estimate: Vec<f64>,
}

impl CoefficientTable {
    /// `L_m` for `m ≥ 1`.
    pub fn get(&self, m: usize) -> f64 {
        self.l[m - 1]
    }

    /// `Σ_{m ≤ M} L_m (2iζ)^{-m}`.
    pub fn log_truncation(&self, zeta: Complex64, order: usize) -> Complex64 {
        log_d_truncation(&self.l[..order.min(self.order)], zeta)
    }
}

/// `Σ_m L_m (2iζ)^{-m}` for `l = [L_1, L_2, …]`.
pub fn log_d_truncation(l: &[f64], zeta: Complex64) -> Complex64 {
    let w = (Complex64::new(0.0, 2.0) * zeta).inv();
    let mut pow = w;
    let mut sum = Complex64::new(0.0, 0.0);
    for &lm in l {
        sum += lm * pow;
        pow *= w;
    }
    sum
}

/// `L_m = C_m + Σ_j ℓ_m^{[j]}` for `m = 1 … M`.
pub fn l_recursive(sp: &StarPotential, opts: &CoefficientOptions) -> Result<CoefficientTable> {
    check_order(sp, opts.order)?;
    let sym = Symbolic::new(opts.order);
    let ell = sp
        .edges()
        .par_iter()
        .map(|e| ell_with_errors(e, &sym, opts))
        .collect::<Result<Vec<_>>>()?;
    let c = vertex_with_errors(sp, &sym, opts)?;
    let order = opts.order;
    let mut l = vec![0.0; order];
    let mut quad_error = vec![0.0; order];
    let mut tail_estimate = vec![0.0; order];
    for m in 0..order {
        l[m] = c[m].value + ell.iter().map(|e| e[m].value).sum::<f64>();
        quad_error[m] = c[m].error + ell.iter().map(|e| e[m].error).sum::<f64>();
        tail_estimate[m] = c[m].tail + ell.iter().map(|e| e[m].tail).sum::<f64>();
    }
    Ok(CoefficientTable {
        order,
        n: sp.n(),
        ell: ell.iter().map(|e| e.iter().map(|i| i.value).collect()).collect(),
        c: c.iter().map(|i| i.value).collect(),
        l,
        quad_error,
        tail_estimate,
    })
}

/// Explicit formulas for `L_1 … L_5`.
pub fn l_closed_form(sp: &StarPotential) -> Result<[f64; 5]> {
    check_order(sp, 4)?;
    let n = sp.n() as f64;
    let opts = CoefficientOptions::default();
    let mut s_int_v = 0.0;
    let mut s_int_v2 = 0.0;
    let mut s_int_rest = 0.0;
    let (mut s0, mut s1, mut s2, mut s3, mut s00, mut s01) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for e in sp.edges() {
        if e.is_zero() {
            continue;
        }
        let breaks = e.breakpoints();
        let q = |f: &dyn Fn(f64) -> f64| quad::integrate_split(f, &breaks, opts.abs_tol, opts.rel_tol).value;
        s_int_v += q(&|x| e.eval(x)) ;
        s_int_v2 += q(&|x| e.eval(x).powi(2));
        s_int_rest += q(&|x| {
            let j = e.jet_unchecked(x, 1);
            j[1] * j[1] + 2.0 * j[0].powi(3)
        });
        let j0 = e.jet(0.0, 3)?;
        s0 += j0[0];
        s1 += j0[1];
        s2 += j0[2];
        s3 += j0[3];
        s00 += j0[0] * j0[0];
        s01 += j0[0] * j0[1];
    }
    let l1 = -s_int_v;
    let l2 = s0 * (2.0 / n - 1.0);
    let l3 = s1 * (1.0 - 2.0 / n) + s_int_v2;
    let l4 = s2 * (2.0 / n - 1.0) - s00 * (2.0 / n - 2.0) - 2.0 / (n * n) * s0 * s0;
    let l5 = s3 * (1.0 - 2.0 / n) + s01 * (8.0 / n - 6.0) + 4.0 / (n * n) * s0 * s1 - s_int_rest;
    Ok([l1, l2, l3, l4, l5])
}

/// Sampled functions of the recursive route.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientGrids {
    pub x: Vec<f64>,
    /// `g[j][m−1][i] = g_m^{[j]}(x_i)`.
    pub g: Vec<Vec<Vec<f64>>>,
    /// `a[m−1][i] = a_m(x_i)`.
    pub a: Vec<Vec<f64>>,
    /// `b[m−1][i] = b_m(x_i)` for `m < M`.
    pub b: Vec<Vec<f64>>,
}

pub fn coefficient_grids(sp: &StarPotential, order: usize, x_max: f64, points: usize) -> Result<CoefficientGrids> {
    check_order(sp, order)?;
    let x: Vec<f64> = (0..points).map(|i| x_max * i as f64 / (points.max(2) - 1) as f64).collect();
    let g = sp.edges().iter().map(|e| g_sequence(e, order, &x)).collect::<Result<Vec<_>>>()?;
    let sym = Symbolic::new(order);
    let mut a = vec![Vec::with_capacity(points); order];
    let mut b = vec![Vec::with_capacity(points); order.saturating_sub(1)];
    for &xi in &x {
        let (av, bv) = vertex_values(sp, &sym, xi);
        for m in 1..=order {
            a[m - 1].push(av[m]);
        }
        for m in 1..order {
            b[m - 1].push(bv[m]);
        }
    }
    Ok(CoefficientGrids { x, g, a, b })
}

impl CoefficientGrids {
    /// Columns `x, g_{j,m}…, a_m…, b_m…`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = vec!["x".to_string()];
        for (j, gj) in self.g.iter().enumerate() {
            header.extend((1..=gj.len()).map(|m| format!("g_{}_{}", j + 1, m)));
        }
        header.extend((1..=self.a.len()).map(|m| format!("a_{m}")));
        header.extend((1..=self.b.len()).map(|m| format!("b_{m}")));
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.x.len() {
            let mut row = vec![self.x[i]];
            for gj in &self.g {
                row.extend(gj.iter().map(|col| col[i]));
            }
            row.extend(self.a.iter().map(|col| col[i]));
            row.extend(self.b.iter().map(|col| col[i]));
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(&[u8], i64)]) -> JetPoly {
        let mut p = JetPoly::zero();
        for (m, c) in terms {
            p.add_term(m.to_vec(), *c);
        }
        p
    }

    #[test]
    fn low_order_densities() {
        let g = g_polynomials(5);
        assert_eq!(g[0], JetPoly::var(0));
        assert_eq!(g[1], JetPoly::var(1).scale(-1));
        assert_eq!(g[2], poly(&[(&[2], 1), (&[0, 0], -1)]));
        assert_eq!(g[3], poly(&[(&[3], -1), (&[0, 1], 4)]));
        assert_eq!(g[4], poly(&[(&[4], 1), (&[1, 1], -5), (&[0, 2], -6), (&[0, 0, 0], 2)]));
    }

    #[test]
    fn weight_homogeneity() {
        for (m, g) in g_polynomials(DEFAULT_ORDER + 2).iter().enumerate() {
            assert!(!g.is_zero());
            assert!(g.weights().iter().all(|&w| w == m + 2), "g_{}", m + 1);
            assert_eq!(g.max_order(), m);
        }
    }

    #[test]
    fn product_rule() {
        // (v v'')' = v' v'' + v v'''
        let p = poly(&[(&[0, 2], 1)]);
        assert_eq!(p.derivative(), poly(&[(&[1, 2], 1), (&[0, 3], 1)]));
        // (v²)' = 2 v v'
        assert_eq!(poly(&[(&[0, 0], 1)]).derivative(), poly(&[(&[0, 1], 2)]));
        assert!(JetPoly::zero().derivative().is_zero());
    }

    #[test]
    fn g_sequence_matches_jets() {
        let e = EdgePotential::gaussian(-1.3, 0.7, 0.4);
        let grid = [0.0, 0.5, 1.7];
        let g = g_sequence(&e, 3, &grid).unwrap();
        for (i, &x) in grid.iter().enumerate() {
            let j = e.jet(x, 2).unwrap();
            assert_eq!(g[0][i], j[0]);
            assert_eq!(g[1][i], -j[1]);
            assert!((g[2][i] - (j[2] - j[0] * j[0])).abs() < 1e-15);
        }
        assert!(g_sequence(&e.with_max_order(1), 3, &grid).is_err());
    }

    #[test]
    fn free_star_vanishes() {
        let t = l_recursive(&StarPotential::free(3).unwrap(), &CoefficientOptions::default()).unwrap();
        assert!(t.l.iter().chain(&t.c).all(|&v| v == 0.0));
        assert_eq!(l_closed_form(&StarPotential::free(3).unwrap()).unwrap(), [0.0; 5]);
        assert_eq!(t.log_truncation(Complex64::new(3.0, 1.0), 8), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn exponential_edges() {
        // v = −e^{−x} on three edges: L₁ = 3, L₂ = 1, L₃ = 5/2
        let sp = StarPotential::uniform(EdgePotential::exponential(-1.0, 1.0), 3).unwrap();
        let t = l_recursive(&sp, &CoefficientOptions { order: 5, ..Default::default() }).unwrap();
        assert!((t.get(1) - 3.0).abs() < 1e-10);
        assert!((t.get(2) - 1.0).abs() < 1e-10);
        assert!((t.get(3) - 2.5).abs() < 1e-10);
        assert!((t.ell[0][0] - 1.0).abs() < 1e-11);
        let cf = l_closed_form(&sp).unwrap();
        for m in 0..5 {
            assert!((cf[m] - t.l[m]).abs() < 1e-8 * t.l[m].abs().max(1.0), "L_{}", m + 1);
        }
    }

    #[test]
    fn low_vertex_constants() {
        // n = 3, v_j(0) = −1, v_j'(0) = 1 → C₂ = −2, C₃ = −2
        let sp = StarPotential::uniform(EdgePotential::exponential(-1.0, 1.0), 3).unwrap();
        let c = vertex_constants(&sp, &CoefficientOptions { order: 3, ..Default::default() }).unwrap();
        assert_eq!(c[0], 0.0);
        assert!((c[1] + 2.0).abs() < 1e-14);
        assert!((c[2] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_line_has_no_even_terms() {
        // a Gaussian centred on the vertex, seen from both sides
        let sp = StarPotential::uniform(EdgePotential::gaussian(-2.0, 0.8, 0.0), 2).unwrap();
        let t = l_recursive(&sp, &CoefficientOptions::default()).unwrap();
        for m in [2, 4, 6, 8] {
            assert!(t.get(m).abs() < 1e-8, "L_{m} = {}", t.get(m));
        }
    }

    #[test]
    fn smooth_vertex_odd_terms_are_pure_integrals() {
        let sp = StarPotential::uniform(EdgePotential::sech2(-1.5, 1.0, 0.0), 4).unwrap();
        let opts = CoefficientOptions { order: 5, ..Default::default() };
        let t = l_recursive(&sp, &opts).unwrap();
        // v(0) = −1.5, v''(0) = 3, odd derivatives vanish
        assert!((t.get(2) - (-1.5 * (2.0 - 4.0))).abs() < 1e-10);
        assert!((t.get(4) - (3.0 * (2.0 - 4.0) - 2.25 * (4.0 - 8.0))).abs() < 1e-9);
        let e = EdgePotential::sech2(-1.5, 1.0, 0.0);
        let v2 = quad::integrate_split(|x| e.eval(x).powi(2), &e.breakpoints(), 1e-14, 1e-13).value;
        assert!((t.get(3) - 4.0 * v2).abs() < 1e-8);
    }

    #[test]
    fn truncation_series() {
        let l = [1.0, 2.0, -3.0];
        let z = Complex64::new(0.0, 0.5);
        // 2iζ = −1
        assert!((log_d_truncation(&l, z) - Complex64::new(-1.0 + 2.0 + 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn order_limits() {
        let sp = StarPotential::uniform(EdgePotential::exponential(-1.0, 1.0).with_max_order(3), 2).unwrap();
        assert!(matches!(
            l_recursive(&sp, &CoefficientOptions { order: 6, ..Default::default() }),
            Err(Error::UnsupportedOrder { requested: 5, max: 3 })
        ));
        assert!(l_recursive(&sp, &CoefficientOptions { order: 4, ..Default::default() }).is_ok());
    }

    #[test]
    fn grids_and_json() {
        let sp = StarPotential::new(vec![EdgePotential::exponential(-1.0, 1.0), EdgePotential::sech2(0.5, 2.0, 0.0)])
            .unwrap();
        let g = coefficient_grids(&sp, 4, 5.0, 11).unwrap();
        assert_eq!(g.g.len(), 2);
        assert_eq!(g.a[0], vec![0.0; 11]);
        let mut csv = Vec::new();
        g.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("x,g_1_1,g_1_2"));
        assert_eq!(text.lines().count(), 12);
        let t = l_recursive(&sp, &CoefficientOptions { order: 4, ..Default::default() }).unwrap();
        let json: serde_json::Value = serde_json::to_value(&t).unwrap();
        assert_eq!(json["l"].as_array().unwrap().len(), 4);
    }
}
