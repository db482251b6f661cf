//! Numerical checks of the trace identities, the F/G identity, Levinson's
//! formula and the decay of the truncated high-energy expansion.
//!
//! All k-integrals are split into three pieces. On `[0, ε]` the integrand is
//! replaced by the low-energy model `D(k) ≈ c k^{m−1}(1 + βk)` (m the
//! resonance multiplicity) and integrated in closed form. On `[ε, K]` a fixed
//! composite Gauss–Kronrod rule is applied to `D` sampled once at its nodes,
//! so every order reuses the same evaluations. Beyond `K` the remaining
//! asymptotic terms of `log a` or `η` are integrated exactly; the last term
//! serves as the truncation bound.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::CoefficientTable;
use crate::error::{Error, Result};
use crate::jost::JostOptions;
use crate::pdet::{perturbation_determinant, DeterminantScan, MAX_PHASE_STEP};
use crate::potential::StarPotential;
use crate::quad::CompositeRule;
use crate::spectrum::SpectrumResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceOptions {
    /// Low-energy split point ε.
    pub floor: f64,
    /// Start of the asymptotic tail K.
    pub cutoff: f64,
    /// Panel width on `[1, K]`; panels below 1 are geometric with ratio 2.
    pub panel_width: f64,
    /// Acceptance gate relative to `max(|lhs|, |rhs|, 1e-2)`.
    pub gate: f64,
    /// Assumed per-point accuracy of `log D`, used for the reported integrator share.
    pub integrator_budget: f64,
    pub jost: JostOptions,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            floor: 1e-3,
            cutoff: 12.0,
            panel_width: 0.5,
            gate: 1e-3,
            integrator_budget: 1e-8,
            jost: JostOptions { tol: 1e-11, ..JostOptions::default() },
        }
    }
}

/// Estimated contributions to the error of one regularised integral.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ErrorComponents {
    pub integrator: f64,
    pub quadrature: f64,
    pub tail: f64,
    pub low_energy: f64,
}

impl ErrorComponents {
    fn scaled(self, f: f64) -> Self {
        let f = f.abs();
        Self {
            integrator: self.integrator * f,
            quadrature: self.quadrature * f,
            tail: self.tail * f,
            low_energy: self.low_energy * f,
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            integrator: self.integrator + o.integrator,
            quadrature: self.quadrature + o.quadrature,
            tail: self.tail + o.tail,
            low_energy: self.low_energy + o.low_energy,
        }
    }

    pub fn total(&self) -> f64 {
        self.integrator + self.quadrature + self.tail + self.low_energy
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    /// The order s.
    pub order: f64,
    pub lhs_spectral: f64,
    /// The integral term with its prefactor, so that `lhs = lhs_spectral + lhs_integral`.
    pub lhs_integral: f64,
    pub rhs: f64,
    pub residual: f64,
    pub budget: f64,
    pub pass: bool,
    pub components: ErrorComponents,
}

/// Which boundary function an integral is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Boundary {
    LogAmplitude,
    Phase,
}

/// `log D(k) ≈ (m−1) log k + β₀ + β₁ k` near `k = 0`, fitted at ε and 2ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowEnergyModel {
    pub resonance: usize,
    pub eps: f64,
    pub log_a: [f64; 2],
    pub eta: [f64; 2],
}

impl LowEnergyModel {
    fn fit(resonance: usize, eps: f64, at_eps: (f64, f64), at_2eps: (f64, f64)) -> Self {
        let power = resonance as f64 - 1.0;
        let r1 = at_eps.0 - power * eps.ln();
        let r2 = at_2eps.0 - power * (2.0 * eps).ln();
        let a1 = (r2 - r1) / eps;
        let e1 = (at_2eps.1 - at_eps.1) / eps;
        Self { resonance, eps, log_a: [r1 - a1 * eps, a1], eta: [at_eps.1 - e1 * eps, e1] }
    }

    /// `η(0+)` from the model.
    pub fn eta_at_zero(&self) -> f64 {
        self.eta[0]
    }

    /// `∫_0^ε f(k) k^p dk` for the modelled boundary function.
    pub fn integral(&self, which: Boundary, p: f64) -> f64 {
        let e = self.eps;
        let mono = |q: f64| e.powf(q + 1.0) / (q + 1.0);
        match which {
            Boundary::LogAmplitude => {
                let power = self.resonance as f64 - 1.0;
                let log_part = e.powf(p + 1.0) * (e.ln() / (p + 1.0) - 1.0 / (p + 1.0).powi(2));
                self.log_a[0] * mono(p) + self.log_a[1] * mono(p + 1.0) + power * log_part
            }
            Boundary::Phase => self.eta[0] * mono(p) + self.eta[1] * mono(p + 1.0),
        }
    }
}

/// A regularised integral `∫_0^∞ (f − Σ subtracted terms) k^p dk`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularizedIntegral {
    pub value: f64,
    pub components: ErrorComponents,
}

/// `log a` and `η` sampled on the quadrature nodes of `[ε, K]`.
#[derive(Debug, Clone)]
pub struct BoundaryIntegrals {
    rule: CompositeRule,
    log_a: Vec<f64>,
    eta: Vec<f64>,
    low: LowEnergyModel,
    /// Second model fitted at ε/2 and ε, for the low-energy error estimate.
    low_check: LowEnergyModel,
    cutoff: f64,
    l: Vec<f64>,
}

fn panels(floor: f64, cutoff: f64, width: f64, refine: usize) -> Vec<(f64, f64)> {
    let split = 2f64.powi(-(refine as i32));
    let mut edges = vec![floor];
    let mut x = floor;
    while x < 1.0 {
        x = (x * 2f64.powf(split)).min(1.0);
        edges.push(x);
    }
    let count = ((cutoff - 1.0) / (width * split)).ceil().max(1.0) as usize;
    for i in 1..=count {
        edges.push(1.0 + (cutoff - 1.0) * i as f64 / count as f64);
    }
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

fn log_d_asymptotic_terms(l: &[f64], which: Boundary) -> Vec<(f64, i32)> {
    // log a ~ Σ_{j≥1} (−1)^j L_{2j} (2k)^{−2j},  η ~ Σ_{j≥0} (−1)^{j+1} L_{2j+1} (2k)^{−2j−1}
    let mut out = Vec::new();
    match which {
        Boundary::LogAmplitude => {
            for j in 1.. {
                let m = 2 * j;
                if m > l.len() {
                    break;
                }
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                out.push((sign * l[m - 1] * 2f64.powi(-(m as i32)), m as i32));
            }
        }
        Boundary::Phase => {
            for j in 0.. {
                let m = 2 * j + 1;
                if m > l.len() {
                    break;
                }
                let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
                out.push((sign * l[m - 1] * 2f64.powi(-(m as i32)), m as i32));
            }
        }
    }
    out
}

impl BoundaryIntegrals {
    /// Sample `D` on the nodes; `resonance` selects the low-energy model and
    /// `l = [L_1, …]` supplies the tail.
    pub fn new(sp: &StarPotential, resonance: usize, l: &[f64], opts: &TraceOptions) -> Result<Self> {
        if !(opts.floor > 0.0 && opts.cutoff > 1.0 && opts.floor < 0.25) {
            return Err(Error::Config(format!(
                "trace integrals need 0 < floor < 0.25 and cutoff > 1 (got {}, {})",
                opts.floor, opts.cutoff
            )));
        }
        let jopts = JostOptions { low_energy: true, record: false, ..opts.jost };
        let eval = |k: f64| perturbation_determinant(sp, Complex64::new(k, 0.0), &jopts);
        let mut last_err = None;
        for refine in 0..4 {
            let rule = CompositeRule::new(&panels(opts.floor, opts.cutoff, opts.panel_width, refine));
            // nodes plus the model points, sorted for unwrapping
            let eps = opts.floor;
            let mut ks: Vec<f64> = rule.nodes.clone();
            ks.extend([0.5 * eps, eps, 2.0 * eps]);
            let mut order: Vec<usize> = (0..ks.len()).collect();
            order.sort_by(|&a, &b| ks[a].total_cmp(&ks[b]));
            let sorted: Vec<f64> = order.iter().map(|&i| ks[i]).collect();
            let values = sorted.par_iter().map(|&k| eval(k)).collect::<Result<Vec<_>>>()?;
            let eta_sorted = match unwrap_sorted(&sorted, &values) {
                Ok(e) => e,
                Err(e) => {
                    last_err = Some(e);
                    continue;
                }
            };
            // the anchor must agree with the asymptotic phase at the top node
            let top = *sorted.last().unwrap();
            let eta_asym: f64 =
                log_d_asymptotic_terms(l, Boundary::Phase).iter().map(|(c, q)| c * top.powi(-q)).sum();
            if (eta_sorted.last().unwrap() - eta_asym).abs() > 0.1 {
                return Err(Error::NumericFailure(format!(
                    "phase anchor at k = {top:.3} is {:.4}, asymptotic value {eta_asym:.4}; raise the cutoff",
                    eta_sorted.last().unwrap()
                )));
            }
            let mut log_a = vec![0.0; ks.len()];
            let mut eta = vec![0.0; ks.len()];
            for (pos, &i) in order.iter().enumerate() {
                log_a[i] = values[pos].norm().ln();
                eta[i] = eta_sorted[pos];
            }
            let nn = rule.nodes.len();
            let point = |i: usize| (log_a[nn + i], eta[nn + i]);
            let low = LowEnergyModel::fit(resonance, eps, point(1), point(2));
            let low_check = LowEnergyModel::fit(resonance, 0.5 * eps, point(0), point(1));
            log_a.truncate(nn);
            eta.truncate(nn);
            return Ok(Self { rule, log_a, eta, low, low_check: LowEnergyModel { eps, ..low_check }, cutoff: opts.cutoff, l: l.to_vec() });
        }
        Err(last_err.unwrap())
    }

    pub fn low_energy(&self) -> &LowEnergyModel {
        &self.low
    }

    pub fn nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    /// `∫_0^∞ (f(k) − Σ_{first `subtract` asymptotic terms}) k^p dk`.
    pub fn integral(&self, which: Boundary, p: f64, subtract: usize, integrator_budget: f64) -> Result<RegularizedIntegral> {
        let terms = log_d_asymptotic_terms(&self.l, which);
        if subtract > terms.len() {
            return Err(Error::Config(format!("subtraction needs {subtract} asymptotic terms, table has {}", terms.len())));
        }
        let (sub, rest) = terms.split_at(subtract);
        match rest.first() {
            None => return Err(Error::Config("expansion table too short to close the tail".into())),
            Some(&(_, q)) if (q as f64) <= p + 1.0 => {
                return Err(Error::Config(format!("tail term k^-{q} against k^{p} does not converge")));
            }
            _ => {}
        }
        let eps = self.low.eps;
        let k_hi = self.cutoff;
        let f = match which {
            Boundary::LogAmplitude => &self.log_a,
            Boundary::Phase => &self.eta,
        };

        // [0, ε]: model minus the subtracted powers
        let sub_low: f64 = sub.iter().map(|&(c, q)| c * eps.powf(p - q as f64 + 1.0) / (p - q as f64 + 1.0)).sum();
        let low = self.low.integral(which, p) - sub_low;
        let low_alt = self.low_check.integral(which, p) - sub_low;

        // [ε, K]
        let vals: Vec<f64> = self
            .rule
            .nodes
            .iter()
            .zip(f)
            .map(|(&k, &fk)| (fk - sub.iter().map(|&(c, q)| c * k.powi(-q)).sum::<f64>()) * k.powf(p))
            .collect();
        let (mid, quad_err) = self.rule.apply(&vals);
        let weight: f64 = self.rule.nodes.iter().zip(&self.rule.kronrod).map(|(&k, &w)| w * k.powf(p)).sum();

        // [K, ∞)
        let tail_terms: Vec<f64> =
            rest.iter().map(|&(c, q)| c * k_hi.powf(p - q as f64 + 1.0) / (q as f64 - p - 1.0)).collect();
        let tail: f64 = tail_terms.iter().sum();
        let tail_bound = tail_terms.last().map_or(0.0, |t| t.abs());

        Ok(RegularizedIntegral {
            value: low + mid + tail,
            components: ErrorComponents {
                integrator: integrator_budget * weight.abs(),
                quadrature: quad_err,
                tail: tail_bound,
                low_energy: (low - low_alt).abs(),
            },
        })
    }
}

fn unwrap_sorted(ks: &[f64], values: &[Complex64]) -> Result<Vec<f64>> {
    let n = values.len();
    let mut eta = vec![0.0; n];
    eta[n - 1] = values[n - 1].arg();
    for i in (0..n - 1).rev() {
        let step = (values[i] / values[i + 1]).arg();
        if !step.is_finite() || step.abs() > MAX_PHASE_STEP {
            return Err(Error::GridTooCoarse { k: ks[i], increment: step });
        }
        eta[i] = eta[i + 1] + step;
    }
    Ok(eta)
}

fn gate(opts: &TraceOptions, lhs: f64, rhs: f64) -> f64 {
    opts.gate * lhs.abs().max(rhs.abs()).max(1e-2)
}

fn report(order: f64, spectral: f64, integral: f64, rhs: f64, c: ErrorComponents, opts: &TraceOptions) -> TraceReport {
    let lhs = spectral + integral;
    let residual = (lhs - rhs).abs();
    let budget = gate(opts, lhs, rhs);
    TraceReport {
        order,
        lhs_spectral: spectral,
        lhs_integral: integral,
        rhs,
        residual,
        budget,
        pass: residual <= budget,
        components: c,
    }
}

fn coefficient(l: &[f64], m: usize) -> Result<f64> {
    l.get(m - 1).copied().ok_or(Error::UnsupportedOrder { requested: m, max: l.len() })
}

/// `Σ r|λ|^{m+1/2} + (−1)^{m+1} π⁻¹ (2m+1) ∫ (log a − Σ_{j=1}^m (−1)^j L_{2j} (2k)^{−2j}) k^{2m} dk
///  = (2m+1) 2^{−2m−2} L_{2m+1}`.
pub fn verify_half_integer_order(
    ints: &BoundaryIntegrals,
    spectrum: &SpectrumResult,
    m: usize,
    opts: &TraceOptions,
) -> Result<TraceReport> {
    let s = m as f64 + 0.5;
    let r = ints.integral(Boundary::LogAmplitude, 2.0 * m as f64, m, opts.integrator_budget)?;
    let sign = if m.is_multiple_of(2) { -1.0 } else { 1.0 };
    let pref = sign * (2 * m + 1) as f64 / PI;
    let rhs = (2 * m + 1) as f64 * 2f64.powi(-2 * m as i32 - 2) * coefficient(&ints.l, 2 * m + 1)?;
    Ok(report(s, spectrum.power_sum(s), pref * r.value, rhs, r.components.scaled(pref), opts))
}

/// The `s = 1/2` identity `Σ r|λ|^{1/2} − π⁻¹ ∫ log a = L_1/4`.
pub fn verify_half_order(ints: &BoundaryIntegrals, spectrum: &SpectrumResult, opts: &TraceOptions) -> Result<TraceReport> {
    verify_half_integer_order(ints, spectrum, 0, opts)
}

/// `Σ r|λ|^m + (−1)^m π⁻¹ 2m ∫ (η − Σ_{j<m} (−1)^{j+1} L_{2j+1} (2k)^{−2j−1}) k^{2m−1} dk = −m 2^{−2m} L_{2m}`.
pub fn verify_integer_order(
    ints: &BoundaryIntegrals,
    spectrum: &SpectrumResult,
    m: usize,
    opts: &TraceOptions,
) -> Result<TraceReport> {
    if m == 0 {
        return Err(Error::Config("integer trace order must be at least 1".into()));
    }
    let r = ints.integral(Boundary::Phase, 2.0 * m as f64 - 1.0, m, opts.integrator_budget)?;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let pref = sign * 2.0 * m as f64 / PI;
    let rhs = -(m as f64) * 2f64.powi(-2 * m as i32) * coefficient(&ints.l, 2 * m)?;
    Ok(report(m as f64, spectrum.power_sum(m as f64), pref * r.value, rhs, r.components.scaled(pref), opts))
}

/// Dispatch on `s ∈ {1/2, 1, 3/2, …}`.
pub fn verify_order(ints: &BoundaryIntegrals, spectrum: &SpectrumResult, s: f64, opts: &TraceOptions) -> Result<TraceReport> {
    let twice = (2.0 * s).round();
    if (2.0 * s - twice).abs() > 1e-12 || twice < 1.0 {
        return Err(Error::Config(format!("trace order {s} is not a positive half-integer")));
    }
    let twice = twice as usize;
    if twice % 2 == 1 {
        verify_half_integer_order(ints, spectrum, twice / 2, opts)
    } else {
        verify_integer_order(ints, spectrum, twice / 2, opts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FgReport {
    pub s: f64,
    pub f: f64,
    pub g: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub budget: f64,
    pub pass: bool,
    pub components: ErrorComponents,
}

/// `F(s) sin πs − G(s) cos πs = (π/2s) Σ r|λ|^s` for `0 < s < 1/2`, with
/// `F = ∫ log a k^{2s−1}`, `G = ∫ η k^{2s−1}`.
pub fn fg_identity(ints: &BoundaryIntegrals, spectrum: &SpectrumResult, s: f64, opts: &TraceOptions) -> Result<FgReport> {
    if !(s > 0.0 && s < 0.5) {
        return Err(Error::Config(format!("F/G identity needs 0 < s < 1/2 (got {s})")));
    }
    let p = 2.0 * s - 1.0;
    let f = ints.integral(Boundary::LogAmplitude, p, 0, opts.integrator_budget)?;
    let g = ints.integral(Boundary::Phase, p, 0, opts.integrator_budget)?;
    let (sin, cos) = (PI * s).sin_cos();
    let lhs = f.value * sin - g.value * cos;
    let rhs = PI / (2.0 * s) * spectrum.power_sum(s);
    let residual = (lhs - rhs).abs();
    let budget = gate(opts, lhs, rhs);
    Ok(FgReport {
        s,
        f: f.value,
        g: g.value,
        lhs,
        rhs,
        residual,
        budget,
        pass: residual <= budget,
        components: f.components.scaled(sin).add(g.components.scaled(cos)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevinsonReport {
    pub eta_high: f64,
    pub eta_zero: f64,
    /// `η(∞) − η(0)`
    pub jump: f64,
    /// `π(N + (m−1)/2)`
    pub expected: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Levinson's formula on two edges, `η(∞) − η(0) = π(N + (m−1)/2)`, with `η(0)`
/// extrapolated linearly from the two lowest scan points.
pub fn levinson_check(sp: &StarPotential, scan: &DeterminantScan, spectrum: &SpectrumResult) -> Result<LevinsonReport> {
    if sp.n() != 2 {
        return Err(Error::Config(format!("Levinson's formula is checked on two edges, got n = {}", sp.n())));
    }
    if scan.len() < 2 || scan.k[0] <= 0.0 {
        return Err(Error::Config("Levinson check needs a positive scan with at least two points".into()));
    }
    let (k0, k1) = (scan.k[0], scan.k[1]);
    let (e0, e1) = (scan.eta[0], scan.eta[1]);
    let eta_zero = e0 - k0 * (e1 - e0) / (k1 - k0);
    let eta_high = *scan.eta.last().unwrap();
    // η(∞) = 0 by the anchoring convention
    let jump = -eta_zero;
    let expected = PI * (spectrum.distinct() as f64 + (spectrum.resonance_multiplicity as f64 - 1.0) / 2.0);
    let residual = (jump - expected).abs();
    let tolerance = 0.05;
    Ok(LevinsonReport { eta_high, eta_zero, jump, expected, residual, tolerance, pass: residual <= tolerance })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayOptions {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    /// Tolerance of the reference evaluation of `log D`.
    pub tol: f64,
    /// Coarser tolerance; points where the two evaluations disagree are noise.
    pub check_tol: f64,
    pub slope_tol: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self { r_min: 10.0, r_max: 200.0, points: 16, tol: 1e-13, check_tol: 1e-11, slope_tol: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub order: usize,
    pub arg: f64,
    pub radii: Vec<f64>,
    pub remainders: Vec<f64>,
    /// Number of leading samples above the noise floor that entered the fit.
    pub used: usize,
    pub slope: Option<f64>,
    pub expected: f64,
    pub exact_zero: bool,
    pub pass: bool,
}

/// Least-squares slope of `log|log D(ζ) − Σ_{m≤M} L_m (2iζ)^{−m}|` against
/// `log|ζ|` along the ray `arg ζ = arg`.
pub fn remainder_decay(
    sp: &StarPotential,
    table: &CoefficientTable,
    order: usize,
    arg: f64,
    opts: &DecayOptions,
) -> Result<DecayReport> {
    if order == 0 || order > table.order {
        return Err(Error::UnsupportedOrder { requested: order, max: table.order });
    }
    if !(0.0..=PI).contains(&arg) {
        return Err(Error::Config(format!("ray argument {arg} outside [0, π]")));
    }
    let expected = -(order as f64 + 1.0);
    let radii: Vec<f64> = (0..opts.points)
        .map(|i| opts.r_min * (opts.r_max / opts.r_min).powf(i as f64 / (opts.points - 1) as f64))
        .collect();
    if sp.is_free() {
        let n = radii.len();
        return Ok(DecayReport {
            order,
            arg,
            radii,
            remainders: vec![0.0; n],
            used: 0,
            slope: None,
            expected,
            exact_zero: true,
            pass: true,
        });
    }
    let fine = JostOptions { tol: opts.tol, ..JostOptions::default() };
    let coarse = JostOptions { tol: opts.check_tol, ..JostOptions::default() };
    let pairs = radii
        .par_iter()
        .map(|&r| {
            let z = Complex64::from_polar(r, arg);
            let series = table.log_truncation(z, order);
            let a = perturbation_determinant(sp, z, &fine)?.ln() - series;
            let b = perturbation_determinant(sp, z, &coarse)?.ln() - series;
            Ok((a.norm(), (a - b).norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    let remainders: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    // the usable range ends where the tolerance comparison reaches 10% of the signal
    let used = pairs.iter().take_while(|(r, d)| *r > 0.0 && *d < 0.1 * r).count();
    let slope = (used >= 4).then(|| {
        let xs: Vec<f64> = radii[..used].iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = remainders[..used].iter().map(|r| r.ln()).collect();
        fit_slope(&xs, &ys)
    });
    let pass = slope.is_some_and(|s| (s - expected).abs() <= opts.slope_tol);
    Ok(DecayReport { order, arg, radii, remainders, used, slope, expected, exact_zero: false, pass })
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{l_recursive, CoefficientOptions};
    use crate::potential::EdgePotential;
    use crate::spectrum::{find_eigenvalues, Eigenvalue, SpectrumOptions};

    #[test]
    fn low_energy_model_integrals() {
        // log a = −log k + 0.3 + 2k exactly, η = 1 − k
        let eps = 1e-2;
        let la = |k: f64| -k.ln() + 0.3 + 2.0 * k;
        let m = LowEnergyModel::fit(0, eps, (la(eps), 1.0 - eps), (la(2.0 * eps), 1.0 - 2.0 * eps));
        assert!((m.log_a[0] - 0.3).abs() < 1e-12 && (m.log_a[1] - 2.0).abs() < 1e-10);
        assert!((m.eta_at_zero() - 1.0).abs() < 1e-12);
        for p in [-0.8, 0.0, 1.0, 4.0] {
            let exact = crate::quad::integrate(|k| la(k) * k.powf(p), 0.0, eps, 1e-16, 1e-12).value;
            assert!((m.integral(Boundary::LogAmplitude, p) - exact).abs() < 1e-9 * exact.abs().max(1e-6), "p = {p}");
        }
    }

    #[test]
    fn asymptotic_term_signs() {
        let l = [1.0, 2.0, 3.0, 4.0, 5.0];
        let la = log_d_asymptotic_terms(&l, Boundary::LogAmplitude);
        assert_eq!(la, vec![(-2.0 / 4.0, 2), (4.0 / 16.0, 4)]);
        let eta = log_d_asymptotic_terms(&l, Boundary::Phase);
        assert_eq!(eta, vec![(-1.0 / 2.0, 1), (3.0 / 8.0, 3), (-5.0 / 32.0, 5)]);
    }

    fn soliton_pieces() -> (StarPotential, SpectrumResult, Vec<f64>) {
        let sp = StarPotential::uniform(EdgePotential::sech2(-2.0, 1.0, 0.0), 2).unwrap();
        let spectrum = SpectrumResult { eigenvalues: vec![Eigenvalue { lambda: -1.0, multiplicity: 1 }], resonance_multiplicity: 1 };
        let l = l_recursive(&sp, &CoefficientOptions::default()).unwrap().l;
        (sp, spectrum, l)
    }

    #[test]
    fn reflectionless_identities() {
        let (sp, spectrum, l) = soliton_pieces();
        assert!((l[0] - 4.0).abs() < 1e-10 && (l[2] - 16.0 / 3.0).abs() < 1e-9);
        let opts = TraceOptions::default();
        let ints = BoundaryIntegrals::new(&sp, 1, &l, &opts).unwrap();
        // η(0+) = −π
        assert!((ints.low_energy().eta_at_zero() + PI).abs() < 1e-6);
        for s in [0.5, 1.0, 1.5, 2.0, 2.5] {
            let r = verify_order(&ints, &spectrum, s, &opts).unwrap();
            assert!(r.pass, "{r:?}");
            assert!((r.lhs_spectral - 1.0).abs() < 1e-15);
        }
        // G(s) = −π/(2s cos πs) when a ≡ 1
        for s in [0.1, 0.25, 0.4] {
            let r = fg_identity(&ints, &spectrum, s, &opts).unwrap();
            assert!(r.f.abs() < 1e-6, "{r:?}");
            let g = -PI / (2.0 * s * (PI * s).cos());
            assert!((r.g - g).abs() < 1e-4 * g.abs(), "s = {s}: {} vs {g}", r.g);
            assert!(r.pass);
        }
    }

    #[test]
    fn free_identities_are_trivial() {
        let sp = StarPotential::free(3).unwrap();
        let spectrum = SpectrumResult { eigenvalues: vec![], resonance_multiplicity: 1 };
        let l = vec![0.0; 8];
        let opts = TraceOptions::default();
        let ints = BoundaryIntegrals::new(&sp, 1, &l, &opts).unwrap();
        for s in [0.5, 1.0, 1.5, 2.0, 2.5] {
            let r = verify_order(&ints, &spectrum, s, &opts).unwrap();
            assert_eq!(r.residual, 0.0);
            assert!(r.pass);
        }
        let table = l_recursive(&sp, &CoefficientOptions::default()).unwrap();
        let d = remainder_decay(&sp, &table, 2, 0.3, &DecayOptions::default()).unwrap();
        assert!(d.exact_zero && d.pass);
    }

    #[test]
    fn exponential_wells_pipeline() {
        let sp = StarPotential::new(vec![
            EdgePotential::exponential(-3.0, 1.0),
            EdgePotential::exponential(-1.0, 2.0),
            EdgePotential::exponential(0.5, 1.5),
        ])
        .unwrap();
        let spectrum = find_eigenvalues(&sp, &SpectrumOptions::default()).unwrap();
        let l = l_recursive(&sp, &CoefficientOptions::default()).unwrap().l;
        let opts = TraceOptions::default();
        let ints = BoundaryIntegrals::new(&sp, spectrum.resonance_multiplicity, &l, &opts).unwrap();
        let r = verify_half_order(&ints, &spectrum, &opts).unwrap();
        assert!(r.pass, "{r:?}");
        let r = verify_integer_order(&ints, &spectrum, 1, &opts).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn levinson_on_the_line() {
        let (sp, spectrum, _) = soliton_pieces();
        let scan = crate::pdet::scan(&sp, 1e-3, 100.0, 800, &JostOptions::default()).unwrap();
        let r = levinson_check(&sp, &scan, &spectrum).unwrap();
        assert!((r.jump - PI).abs() < 0.01, "{r:?}");
        assert!(r.pass);
        assert!(levinson_check(&StarPotential::free(3).unwrap(), &scan, &spectrum).is_err());
    }

    #[test]
    fn slope_fit() {
        let xs: Vec<f64> = (1..10).map(|i| (i as f64).ln()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 3.0 * x).collect();
        assert!((fit_slope(&xs, &ys) + 3.0).abs() < 1e-12);
    }
}
