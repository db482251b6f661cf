//! Edge potentials with exact derivatives, and the star-graph container.
//!
//! Every family evaluates its derivatives from closed forms (polynomials in
//! `tanh` for `sech²`, Hermite polynomials for the Gaussian, falling
//! factorials for the power law) or from truncated Taylor arithmetic (the
//! bump). Nothing here differentiates numerically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// |v(X∞)| must fall below this.
pub const TRUNCATION_VALUE: f64 = 1e-14;
/// Tail moments beyond X∞ must fall below this.
pub const TRUNCATION_MOMENT: f64 = 1e-12;
/// Hard cap on X∞ for algebraically decaying potentials.
pub const MAX_TRUNCATION: f64 = 1e4;

fn default_max_order() -> usize {
    12
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// `c·exp(−a x)`
    Exponential { c: f64, a: f64 },
    /// `c·sech²(a (x − s))`
    Sech2 {
        c: f64,
        a: f64,
        #[serde(default)]
        s: f64,
    },
    /// `c·exp(−a (x − s)²)`
    Gaussian {
        c: f64,
        a: f64,
        #[serde(default)]
        s: f64,
    },
    /// `c·(1 + x)^(−p)`
    Powerlaw { c: f64, p: f64 },
    /// `c·exp(−1/(1 − t²))` with `t = (x − s)/a`, zero for `|t| ≥ 1`
    Bump {
        c: f64,
        a: f64,
        #[serde(default)]
        s: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgePotential {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default = "default_max_order")]
    pub max_derivative_order: usize,
}

/// Tail behaviour beyond a truncation point, used for moment bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Envelope {
    /// `|v(x)| ≤ amp·exp(−rate (x − X))` for `x ≥ X`
    Exponential { amp: f64, rate: f64 },
    /// `|v(x)| ≤ amp·(1 + x)^(−power)`
    Algebraic { amp: f64, power: f64 },
    Zero,
}

impl Envelope {
    fn tail_moment(&self, x: f64, weight: u32) -> f64 {
        match *self {
            Envelope::Zero => 0.0,
            Envelope::Exponential { amp, rate } => {
                // ∫_X^∞ x^w e^{-r(x-X)} dx = Σ_i w!/(w-i)! X^{w-i} / r^{i+1}
                let mut total = 0.0;
                let mut falling = 1.0;
                for i in 0..=weight {
                    total += falling * x.powi((weight - i) as i32) / rate.powi(i as i32 + 1);
                    falling *= (weight - i) as f64;
                }
                amp * total
            }
            Envelope::Algebraic { amp, power } => {
                let e = power - weight as f64 - 1.0;
                if e <= 0.0 {
                    f64::INFINITY
                } else {
                    amp * (1.0 + x).powf(-e) / e
                }
            }
        }
    }
}

impl EdgePotential {
    pub fn new(family: Family) -> Self {
        Self { family, max_derivative_order: default_max_order() }
    }

    pub fn zero() -> Self {
        Self::new(Family::Exponential { c: 0.0, a: 1.0 })
    }

    pub fn exponential(c: f64, a: f64) -> Self {
        Self::new(Family::Exponential { c, a })
    }

    pub fn sech2(c: f64, a: f64, s: f64) -> Self {
        Self::new(Family::Sech2 { c, a, s })
    }

    pub fn gaussian(c: f64, a: f64, s: f64) -> Self {
        Self::new(Family::Gaussian { c, a, s })
    }

    pub fn powerlaw(c: f64, p: f64) -> Self {
        Self::new(Family::Powerlaw { c, p })
    }

    pub fn bump(c: f64, a: f64, s: f64) -> Self {
        Self::new(Family::Bump { c, a, s })
    }

    pub fn with_max_order(mut self, order: usize) -> Self {
        self.max_derivative_order = order;
        self
    }

    pub fn amplitude(&self) -> f64 {
        match self.family {
            Family::Exponential { c, .. }
            | Family::Sech2 { c, .. }
            | Family::Gaussian { c, .. }
            | Family::Powerlaw { c, .. }
            | Family::Bump { c, .. } => c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude() == 0.0
    }

    /// Same family with the amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = *self;
        match &mut out.family {
            Family::Exponential { c, .. }
            | Family::Sech2 { c, .. }
            | Family::Gaussian { c, .. }
            | Family::Powerlaw { c, .. }
            | Family::Bump { c, .. } => *c *= factor,
        }
        out
    }

    /// Decay exponent ρ declared by the family.
    pub fn declared_rho(&self) -> f64 {
        match self.family {
            Family::Powerlaw { p, .. } => p.min(2.0),
            _ => 2.0,
        }
    }

    /// Upper bound for `sup |v|`.
    pub fn sup_abs(&self) -> f64 {
        match self.family {
            Family::Bump { c, .. } => c.abs() * (-1.0f64).exp(),
            _ => self.amplitude().abs(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.family {
            Family::Exponential { c, a } => {
                if c == 0.0 {
                    0.0
                } else {
                    c * (-a * x).exp()
                }
            }
            Family::Sech2 { c, a, s } => c / (a * (x - s)).cosh().powi(2),
            Family::Gaussian { c, a, s } => c * (-a * (x - s).powi(2)).exp(),
            Family::Powerlaw { c, p } => c * (1.0 + x).powf(-p),
            Family::Bump { c, a, s } => {
                let t = (x - s) / a;
                let q = 1.0 - t * t;
                if q <= 0.0 {
                    0.0
                } else {
                    c * (-1.0 / q).exp()
                }
            }
        }
    }

    /// `v^(order)(x)`.
    pub fn eval_deriv(&self, x: f64, order: usize) -> Result<f64> {
        Ok(self.jet(x, order)?[order])
    }

    /// `[v(x), v'(x), …, v^(order)(x)]`.
    pub fn jet(&self, x: f64, order: usize) -> Result<Vec<f64>> {
        if order > self.max_derivative_order {
            return Err(Error::UnsupportedOrder { requested: order, max: self.max_derivative_order });
        }
        Ok(self.jet_unchecked(x, order))
    }

    pub(crate) fn jet_unchecked(&self, x: f64, order: usize) -> Vec<f64> {
        let mut out = vec![0.0; order + 1];
        out[0] = self.eval(x);
        match self.family {
            Family::Exponential { c, a } => {
                if c == 0.0 {
                    return out;
                }
                let mut d = c * (-a * x).exp();
                for o in out.iter_mut() {
                    *o = d;
                    d *= -a;
                }
            }
            Family::Sech2 { c, a, s } => {
                if c == 0.0 {
                    return out;
                }
                // v^(m) = c a^m sech²(u) Q_m(tanh u),
                // Q_{m+1}(T) = (1 − T²) Q_m'(T) − 2 T Q_m(T)
                let u = a * (x - s);
                let t = u.tanh();
                let sech2 = 1.0 / u.cosh().powi(2);
                let mut q = vec![1.0];
                let mut am = 1.0;
                for (m, o) in out.iter_mut().enumerate() {
                    *o = c * am * sech2 * poly_eval(&q, t);
                    if m < order {
                        q = sech2_next(&q);
                        am *= a;
                    }
                }
            }
            Family::Gaussian { c, a, s } => {
                if c == 0.0 {
                    return out;
                }
                // d^m/du^m e^{-u²} = (−1)^m H_m(u) e^{-u²}, u = √a (x − s)
                let ra = a.sqrt();
                let u = ra * (x - s);
                let g = (-u * u).exp();
                let (mut h_prev, mut h) = (0.0, 1.0);
                let mut scale = c;
                for (m, o) in out.iter_mut().enumerate() {
                    *o = scale * h * g;
                    let h_next = 2.0 * u * h - 2.0 * m as f64 * h_prev;
                    h_prev = h;
                    h = h_next;
                    scale *= -ra;
                }
            }
            Family::Powerlaw { c, p } => {
                if c == 0.0 {
                    return out;
                }
                let base = 1.0 + x;
                let mut coef = c;
                for (m, o) in out.iter_mut().enumerate() {
                    *o = coef * base.powf(-p - m as f64);
                    coef *= -p - m as f64;
                }
            }
            Family::Bump { c, a, s } => {
                if c == 0.0 {
                    return out;
                }
                let t = (x - s) / a;
                let q = 1.0 - t * t;
                if q <= 0.0 || 1.0 / q > 700.0 {
                    return out;
                }
                let len = order + 1;
                let mut tser = vec![0.0; len];
                tser[0] = t;
                if len > 1 {
                    tser[1] = 1.0 / a;
                }
                let mut qser = taylor::mul(&tser, &tser);
                for v in qser.iter_mut() {
                    *v = -*v;
                }
                qser[0] += 1.0;
                let mut r = taylor::recip(&qser);
                for v in r.iter_mut() {
                    *v = -*v;
                }
                let e = taylor::exp(&r);
                let mut fact = 1.0;
                for (m, o) in out.iter_mut().enumerate() {
                    if m > 0 {
                        fact *= m as f64;
                    }
                    *o = c * e[m] * fact;
                }
            }
        }
        out[0] = self.eval(x);
        out
    }

    fn envelope_at(&self, x: f64) -> Option<Envelope> {
        match self.family {
            _ if self.is_zero() => Some(Envelope::Zero),
            Family::Exponential { c, a } => {
                Some(Envelope::Exponential { amp: c.abs() * (-a * x).exp(), rate: a })
            }
            Family::Sech2 { c, a, s } => (x >= s).then(|| Envelope::Exponential {
                amp: 4.0 * c.abs() * (-2.0 * a * (x - s)).exp(),
                rate: 2.0 * a,
            }),
            Family::Gaussian { c, a, s } => (x >= s + 1.0 / a.sqrt()).then(|| Envelope::Exponential {
                amp: c.abs() * (-a * (x - s).powi(2)).exp(),
                rate: 2.0 * a * (x - s),
            }),
            Family::Powerlaw { c, p } => Some(Envelope::Algebraic { amp: c.abs(), power: p }),
            Family::Bump { a, s, .. } => (x >= s + a).then_some(Envelope::Zero),
        }
    }

    /// Truncation point X∞: `|v(X∞)| < 1e-14` and tail moments up to weight 2
    /// below `1e-12`. Algebraic families are capped at [`MAX_TRUNCATION`].
    pub fn truncation_point(&self) -> f64 {
        if self.is_zero() {
            return 1.0;
        }
        match self.family {
            Family::Bump { a, s, .. } => return (s + a).max(1.0),
            Family::Powerlaw { c, p } => {
                let x = (c.abs() / TRUNCATION_VALUE).powf(1.0 / p) - 1.0;
                return x.clamp(1.0, MAX_TRUNCATION);
            }
            _ => {}
        }
        let ok = |x: f64| match self.envelope_at(x) {
            Some(env @ Envelope::Exponential { amp, .. }) => {
                amp < TRUNCATION_VALUE && env.tail_moment(x, 2) < TRUNCATION_MOMENT
            }
            Some(_) => true,
            None => false,
        };
        let mut hi = 1.0;
        while !ok(hi) {
            hi *= 2.0;
        }
        let mut lo = hi / 2.0;
        if hi == 1.0 {
            return 1.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi.max(1.0)
    }

    /// Quadrature break points covering [0, X∞], placed on the potential's
    /// features.
    pub fn breakpoints(&self) -> Vec<f64> {
        let x_inf = self.truncation_point();
        let mut pts = vec![0.0, x_inf];
        match self.family {
            Family::Sech2 { s, a, .. } | Family::Gaussian { s, a, .. } | Family::Bump { s, a, .. } => {
                let width = match self.family {
                    Family::Gaussian { .. } => 1.0 / a.sqrt(),
                    Family::Sech2 { .. } => 1.0 / a,
                    _ => a,
                };
                for k in -2..=2 {
                    pts.push(s + k as f64 * width);
                }
            }
            Family::Powerlaw { .. } => {
                let mut x = 1.0;
                while x < x_inf {
                    pts.push(x);
                    x *= 4.0;
                }
            }
            Family::Exponential { a, .. } => {
                let mut x = 1.0 / a;
                while x < x_inf {
                    pts.push(x);
                    x *= 2.0;
                }
            }
        }
        pts.retain(|p| *p >= 0.0 && *p <= x_inf);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        pts
    }

    /// Upper bound on `∫_{X∞}^∞ x^w |v|`.
    pub fn tail_moment_bound(&self, weight: u32) -> f64 {
        let x = self.truncation_point();
        match self.envelope_at(x) {
            Some(env) => env.tail_moment(x, weight),
            None => f64::INFINITY,
        }
    }

    /// `∫₀^∞ x^w |v(x)| dx` with weight power 0, 1 or 2.
    pub fn moment(&self, weight_power: u32) -> Result<f64> {
        if weight_power > 2 {
            return Err(Error::Config(format!("moment weight {weight_power} not in {{0, 1, 2}}")));
        }
        if self.is_zero() {
            return Ok(0.0);
        }
        let tail = self.tail_moment_bound(weight_power);
        if !tail.is_finite() {
            return Err(Error::HypothesisViolation(format!(
                "moment of weight {weight_power} diverges for {:?}",
                self.family
            )));
        }
        let r = quad::integrate_split(
            |x| x.powi(weight_power as i32) * self.eval(x).abs(),
            &self.breakpoints(),
            1e-14,
            1e-13,
        );
        Ok(r.value + tail)
    }

    /// Sampled check of `|v^(m)(x)| ≤ C_m (1+x)^(−ρ−m)` for `m ≤ max_derivative_order`.
    /// Returns the fitted constants, or `None` if some ratio keeps growing.
    pub fn decay_constants(&self) -> Option<Vec<f64>> {
        let rho = self.declared_rho();
        if rho <= 1.0 {
            return None;
        }
        let x_inf = self.truncation_point();
        const SAMPLES: usize = 240;
        let xs: Vec<f64> = (0..=SAMPLES)
            .map(|i| (1.0 + x_inf).powf(i as f64 / SAMPLES as f64) - 1.0)
            .collect();
        let order = self.max_derivative_order;
        let mut ratios = vec![Vec::with_capacity(xs.len()); order + 1];
        for &x in &xs {
            let jet = self.jet_unchecked(x, order);
            for (m, d) in jet.iter().enumerate() {
                ratios[m].push(d.abs() * (1.0 + x).powf(rho + m as f64));
            }
        }
        let split = 3 * SAMPLES / 4;
        let mut consts = Vec::with_capacity(order + 1);
        for r in ratios {
            let head = r[..split].iter().cloned().fold(0.0, f64::max);
            let tail = r[split..].iter().cloned().fold(0.0, f64::max);
            if !(head.is_finite() && tail.is_finite()) || tail > 1.01 * head + 1e-300 {
                return None;
            }
            consts.push(head.max(tail));
        }
        Some(consts)
    }
}

fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn sech2_next(q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; q.len() + 1];
    for (k, &c) in q.iter().enumerate() {
        if k > 0 {
            // (1 − T²)·k c T^{k−1}
            out[k - 1] += k as f64 * c;
            out[k + 1] -= k as f64 * c;
        }
        out[k + 1] -= 2.0 * c;
    }
    out
}

/// Truncated Taylor-series arithmetic (coefficients are f^(k)/k!).
mod taylor {
    pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = a.len();
        (0..n).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
    }

    pub fn recip(a: &[f64]) -> Vec<f64> {
        let n = a.len();
        let mut b = vec![0.0; n];
        b[0] = 1.0 / a[0];
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s * b[0];
        }
        b
    }

    pub fn exp(a: &[f64]) -> Vec<f64> {
        let n = a.len();
        let mut b = vec![0.0; n];
        b[0] = a[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            b[k] = s / k as f64;
        }
        b
    }
}

/// Per-edge outcome of [`StarPotential::check_hypotheses`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeHypotheses {
    pub edge: usize,
    /// `∫(1+x)|v|` (finite first moment)
    pub integrability: bool,
    pub first_moment: Option<f64>,
    /// sampled derivative decay with the declared ρ ∈ (1, 2]
    pub smooth_decay: bool,
    pub rho: f64,
    pub decay_constants: Option<Vec<f64>>,
    /// `∫(1+x²)|v|`, when requested
    pub second_moment: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub edges: Vec<EdgeHypotheses>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.edges
            .iter()
            .all(|e| e.integrability && e.smooth_decay && e.second_moment.unwrap_or(true))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStar")]
pub struct StarPotential {
    edges: Vec<EdgePotential>,
}

#[derive(Deserialize)]
struct RawStar {
    edges: Vec<EdgePotential>,
}

impl TryFrom<RawStar> for StarPotential {
    type Error = Error;
    fn try_from(raw: RawStar) -> Result<Self> {
        StarPotential::new(raw.edges)
    }
}

impl StarPotential {
    pub fn new(edges: Vec<EdgePotential>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::Config(format!("a star graph needs n ≥ 2 edges, got {}", edges.len())));
        }
        for (j, e) in edges.iter().enumerate() {
            let params_ok = match e.family {
                Family::Exponential { a, .. } => a > 0.0,
                Family::Sech2 { a, .. } | Family::Gaussian { a, .. } | Family::Bump { a, .. } => a > 0.0,
                Family::Powerlaw { p, .. } => p > 0.0,
            };
            if !params_ok || !e.amplitude().is_finite() {
                return Err(Error::Config(format!("edge {j}: invalid parameters {:?}", e.family)));
            }
        }
        Ok(Self { edges })
    }

    /// `n` copies of the same edge potential.
    pub fn uniform(edge: EdgePotential, n: usize) -> Result<Self> {
        Self::new(vec![edge; n])
    }

    pub fn free(n: usize) -> Result<Self> {
        Self::uniform(EdgePotential::zero(), n)
    }

    pub fn edges(&self) -> &[EdgePotential] {
        &self.edges
    }

    pub fn n(&self) -> usize {
        self.edges.len()
    }

    pub fn is_free(&self) -> bool {
        self.edges.iter().all(EdgePotential::is_zero)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { edges: self.edges.iter().map(|e| e.scaled(factor)).collect() }
    }

    pub fn max_derivative_order(&self) -> usize {
        self.edges.iter().map(|e| e.max_derivative_order).min().unwrap_or(0)
    }

    pub fn truncation_point(&self) -> f64 {
        self.edges.iter().map(EdgePotential::truncation_point).fold(1.0, f64::max)
    }

    /// Default search bound for bound states: `κ_max² ≥ max |v|`.
    pub fn kappa_bound(&self) -> f64 {
        let depth = self.edges.iter().map(EdgePotential::sup_abs).fold(0.0, f64::max);
        1.05 * depth.sqrt() + 0.1
    }

    pub fn check_hypotheses(&self, need_second_moment: bool) -> HypothesisReport {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(j, e)| {
                let first_moment = match (e.moment(0), e.moment(1)) {
                    (Ok(m0), Ok(m1)) if (m0 + m1).is_finite() => Some(m0 + m1),
                    _ => None,
                };
                let rho = e.declared_rho();
                let decay_constants = e.decay_constants();
                let second_moment = need_second_moment.then(|| {
                    matches!((e.moment(0), e.moment(2)), (Ok(a), Ok(b)) if (a + b).is_finite())
                });
                EdgeHypotheses {
                    edge: j,
                    integrability: first_moment.is_some(),
                    first_moment,
                    smooth_decay: rho > 1.0 && rho <= 2.0 && decay_constants.is_some(),
                    rho,
                    decay_constants,
                    second_moment,
                }
            })
            .collect();
        HypothesisReport { edges }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_families() -> Vec<EdgePotential> {
        vec![
            EdgePotential::exponential(-1.3, 0.7),
            EdgePotential::sech2(-2.0, 1.2, 0.4),
            EdgePotential::gaussian(1.5, 0.8, 0.9),
            EdgePotential::powerlaw(-0.7, 3.5),
            EdgePotential::bump(-1.0, 2.0, 1.5),
        ]
    }

    #[test]
    fn spec_values() {
        let e = EdgePotential::exponential(-1.0, 1.0);
        assert_eq!(e.eval_deriv(0.0, 0).unwrap(), -1.0);
        assert_eq!(e.eval_deriv(0.0, 1).unwrap(), 1.0);
        let s = EdgePotential::sech2(-2.0, 1.0, 0.0);
        assert_eq!(s.eval_deriv(0.0, 0).unwrap(), -2.0);
    }

    #[test]
    fn order_zero_is_eval() {
        for p in all_families() {
            for x in [0.0, 0.3, 1.7, 4.0] {
                assert_eq!(p.eval_deriv(x, 0).unwrap(), p.eval(x));
            }
        }
    }

    #[test]
    fn unsupported_order() {
        let e = EdgePotential::exponential(-1.0, 1.0).with_max_order(3);
        assert!(matches!(e.eval_deriv(0.0, 4), Err(Error::UnsupportedOrder { requested: 4, max: 3 })));
    }

    #[test]
    fn closed_forms_against_known_derivatives() {
        // sech²: d/dx = −2 sech² tanh, d²/dx² = 4 sech² tanh² − 2 sech⁴
        let s = EdgePotential::sech2(1.0, 1.0, 0.0);
        let x: f64 = 0.7;
        let (t, s2) = (x.tanh(), 1.0 / x.cosh().powi(2));
        let j = s.jet(x, 2).unwrap();
        assert!((j[1] + 2.0 * s2 * t).abs() < 1e-15);
        assert!((j[2] - (4.0 * s2 * t * t - 2.0 * s2 * s2)).abs() < 1e-15);
        // Gaussian e^{-x²}: third derivative (−8x³ + 12x) e^{-x²}
        let g = EdgePotential::gaussian(1.0, 1.0, 0.0);
        let d3 = g.eval_deriv(x, 3).unwrap();
        assert!((d3 - (-8.0 * x.powi(3) + 12.0 * x) * (-x * x).exp()).abs() < 1e-14);
        // bump: first derivative −2t/(a(1−t²)²) e^{−1/(1−t²)}
        let b = EdgePotential::bump(1.0, 2.0, 0.0);
        let t = x / 2.0;
        let q = 1.0 - t * t;
        let d1 = b.eval_deriv(x, 1).unwrap();
        assert!((d1 - (-2.0 * t / (2.0 * q * q)) * (-1.0 / q).exp()).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_richardson_differences() {
        for p in all_families() {
            for x in [0.35, 1.1, 2.3] {
                for m in 1..=6 {
                    let f = |y: f64| p.eval_deriv(y, m - 1).unwrap();
                    let cd = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
                    let (h1, h2) = (1e-2, 5e-3);
                    let rich = (4.0 * cd(h2) - cd(h1)) / 3.0;
                    let exact = p.eval_deriv(x, m).unwrap();
                    let scale = exact.abs().max(1e-3 * (1.0 + f(x).abs()));
                    assert!(
                        (rich - exact).abs() < 1e-6 * scale.max(1.0),
                        "{:?} m={m} x={x}: {rich} vs {exact}",
                        p.family
                    );
                    // second-order convergence of the plain central difference
                    let e1 = (cd(h1) - exact).abs();
                    let e2 = (cd(h2) - exact).abs();
                    if e1 > 1e-9 {
                        let ratio = e1 / e2;
                        assert!(ratio > 3.5 && ratio < 4.5, "{:?} m={m}: ratio {ratio}", p.family);
                    }
                }
            }
        }
    }

    #[test]
    fn moments() {
        let e = EdgePotential::exponential(-1.0, 1.0);
        assert!((e.moment(0).unwrap() - 1.0).abs() < 1e-11);
        // ∫ x e^{-x} dx = 1, oracle: independent quadrature
        let oracle = quad::integrate(|x| x * (-x).exp(), 0.0, 80.0, 1e-15, 1e-14).value;
        assert!((e.moment(1).unwrap() - oracle).abs() < 1e-11);
        assert!((oracle - 1.0).abs() < 1e-12);
        assert_eq!(EdgePotential::zero().moment(2).unwrap(), 0.0);
        assert!(matches!(EdgePotential::powerlaw(1.0, 1.5).moment(1), Err(Error::HypothesisViolation(_))));
        // ∫ (1+x)^{-4} = 1/3
        assert!((EdgePotential::powerlaw(1.0, 4.0).moment(0).unwrap() - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn moment_monotone_for_far_support() {
        for p in [EdgePotential::bump(1.0, 1.0, 2.5), EdgePotential::bump(-3.0, 0.5, 1.5)] {
            let m: Vec<f64> = (0..3).map(|w| p.moment(w).unwrap()).collect();
            assert!(m[0] <= m[1] && m[1] <= m[2]);
        }
    }

    #[test]
    fn truncation_point_meets_thresholds() {
        for p in all_families().into_iter().filter(|p| !matches!(p.family, Family::Powerlaw { .. })) {
            let x = p.truncation_point();
            assert!(p.eval(x).abs() < TRUNCATION_VALUE, "{:?}", p.family);
            assert!(p.tail_moment_bound(2) < TRUNCATION_MOMENT);
        }
        assert_eq!(EdgePotential::zero().truncation_point(), 1.0);
    }

    #[test]
    fn hypotheses() {
        let star = StarPotential::uniform(EdgePotential::exponential(-1.0, 1.0), 3).unwrap();
        assert!(star.check_hypotheses(true).all_pass());
        assert!(StarPotential::free(2).unwrap().check_hypotheses(true).all_pass());
        let mixed = StarPotential::new(vec![EdgePotential::powerlaw(-1.0, 1.5), EdgePotential::exponential(-1.0, 1.0)])
            .unwrap();
        let report = mixed.check_hypotheses(false);
        assert!(!report.edges[0].integrability);
        assert!(report.edges[0].smooth_decay);
        assert!(report.edges[1].integrability);
        assert!(!report.all_pass());
        let slow = StarPotential::new(vec![EdgePotential::powerlaw(-1.0, 0.9), EdgePotential::zero()]).unwrap();
        assert!(!slow.check_hypotheses(false).edges[0].smooth_decay);
    }

    #[test]
    fn star_needs_two_edges() {
        assert!(StarPotential::new(vec![EdgePotential::zero()]).is_err());
        let json = r#"{"edges":[{"family":"exponential","c":-1.0,"a":1.0}]}"#;
        assert!(serde_json::from_str::<StarPotential>(json).is_err());
    }

    #[test]
    fn json_shape() {
        let json = r#"{"edges":[{"family":"exponential","c":-1.0,"a":1.0},
                               {"family":"sech2","c":-2.0,"a":1.0},
                               {"family":"bump","c":1.0,"a":2.0,"s":1.0,"max_derivative_order":6}]}"#;
        let star: StarPotential = serde_json::from_str(json).unwrap();
        assert_eq!(star.n(), 3);
        assert_eq!(star.edges()[1].family, Family::Sech2 { c: -2.0, a: 1.0, s: 0.0 });
        assert_eq!(star.edges()[2].max_derivative_order, 6);
        let back: StarPotential = serde_json::from_str(&serde_json::to_string(&star).unwrap()).unwrap();
        assert_eq!(back, star);
    }
}
