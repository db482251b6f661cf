//! Gauss–Kronrod quadrature: a 7/15-point embedded pair, adaptive bisection
//! on finite intervals and fixed composite panels for vectorised integrands.

#![allow(clippy::excessive_precision)]

/// Kronrod abscissae on [-1, 1], descending; the last entry is the centre.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// The 15 nodes of one panel together with Kronrod and Gauss weights
/// (Gauss weight is zero on Kronrod-only nodes).
pub fn gk15_panel(a: f64, b: f64) -> [(f64, f64, f64); 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0, 0.0); 15];
    let mut idx = 0;
    for i in 0..7 {
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        out[idx] = (c - h * XGK[i], h * WGK[i], h * wg);
        out[idx + 1] = (c + h * XGK[i], h * WGK[i], h * wg);
        idx += 2;
    }
    out[14] = (c, h * WGK[7], h * WG[3]);
    out
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let mut k = 0.0;
    let mut g = 0.0;
    for (x, wk, wg) in gk15_panel(a, b) {
        let fx = f(x);
        k += wk * fx;
        g += wg * fx;
    }
    (k, (k - g).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive Gauss–Kronrod integration of `f` over [a, b] to
/// `max(abs_tol, rel_tol·|I|)`. Intervals are refined largest-error first.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, error: 0.0, evaluations: 0 };
    }
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    let mut value = v;
    let mut error = e;
    let mut evaluations = 15;
    while error > abs_tol.max(rel_tol * value.abs()) && intervals.len() < MAX_INTERVALS {
        let (imax, _) = intervals
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, iv)| if iv.3 > acc.1 { (i, iv.3) } else { acc });
        let (lo, hi, v0, e0) = intervals.swap_remove(imax);
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            intervals.push((lo, hi, v0, 0.0));
            continue;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evaluations += 30;
        value += v1 + v2 - v0;
        error += e1 + e2 - e0;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    // re-sum to shed accumulated cancellation in the running totals
    let value = intervals.iter().map(|iv| iv.2).sum();
    let error = intervals.iter().map(|iv| iv.3).sum();
    QuadResult { value, error, evaluations }
}

/// Integrate over [a, b] after splitting at the given interior break points.
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult {
    let mut total = QuadResult { value: 0.0, error: 0.0, evaluations: 0 };
    let pieces = breaks.len().saturating_sub(1).max(1) as f64;
    for w in breaks.windows(2) {
        let r = integrate(&f, w[0], w[1], abs_tol / pieces, rel_tol);
        total.value += r.value;
        total.error += r.error;
        total.evaluations += r.evaluations;
    }
    total
}

/// Fixed composite GK15 rule over a list of panels. Node values are supplied
/// by the caller, so expensive integrands can be evaluated once and reused.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub kronrod: Vec<f64>,
    pub gauss: Vec<f64>,
}

impl CompositeRule {
    pub fn new(panels: &[(f64, f64)]) -> Self {
        let mut nodes = Vec::with_capacity(15 * panels.len());
        let mut kronrod = Vec::with_capacity(nodes.capacity());
        let mut gauss = Vec::with_capacity(nodes.capacity());
        for &(a, b) in panels {
            for (x, wk, wg) in gk15_panel(a, b) {
                nodes.push(x);
                kronrod.push(wk);
                gauss.push(wg);
            }
        }
        Self { nodes, kronrod, gauss }
    }

    /// Returns the Kronrod value and the summed per-panel |K15 − G7| estimate.
    pub fn apply(&self, values: &[f64]) -> (f64, f64) {
        assert_eq!(values.len(), self.nodes.len());
        let mut total = 0.0;
        let mut err = 0.0;
        for p in 0..self.nodes.len() / 15 {
            let r = p * 15..(p + 1) * 15;
            let k: f64 = r.clone().map(|i| self.kronrod[i] * values[i]).sum();
            let g: f64 = r.map(|i| self.gauss[i] * values[i]).sum();
            total += k;
            err += (k - g).abs();
        }
        (total, err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        let p = gk15_panel(-1.0, 1.0);
        let wk: f64 = p.iter().map(|t| t.1).sum();
        let wg: f64 = p.iter().map(|t| t.2).sum();
        assert!((wk - 2.0).abs() < 1e-14);
        assert!((wg - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_exactness() {
        let p = gk15_panel(0.0, 1.0);
        // Kronrod: exact to degree 22, Gauss: to degree 13
        for deg in 0..=22 {
            let exact = 1.0 / (deg as f64 + 1.0);
            let k: f64 = p.iter().map(|t| t.1 * t.0.powi(deg)).sum();
            assert!((k - exact).abs() < 1e-14, "kronrod degree {deg}");
            if deg <= 13 {
                let g: f64 = p.iter().map(|t| t.2 * t.0.powi(deg)).sum();
                assert!((g - exact).abs() < 1e-14, "gauss degree {deg}");
            }
        }
    }

    #[test]
    fn adaptive_handles_peaks_and_log_singularity() {
        let r = integrate(|x| (-x).exp(), 0.0, 50.0, 1e-14, 1e-13);
        assert!((r.value - (1.0 - (-50.0f64).exp())).abs() < 1e-13);
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0, 1e-12, 1e-12);
        assert!((r.value + 1.0).abs() < 1e-10);
        let r = integrate(|x: f64| 1.0 / (1.0 + 1e4 * (x - 0.3).powi(2)), 0.0, 1.0, 1e-13, 1e-13);
        let exact = ((0.7 * 100.0f64).atan() + (0.3 * 100.0f64).atan()) / 100.0;
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn composite_rule_matches_adaptive() {
        let panels: Vec<_> = (0..8).map(|i| (i as f64 * 0.5, (i + 1) as f64 * 0.5)).collect();
        let rule = CompositeRule::new(&panels);
        let vals: Vec<f64> = rule.nodes.iter().map(|&x| (x * 3.0).sin() * (-x).exp()).collect();
        let (v, e) = rule.apply(&vals);
        let exact = {
            let f = |x: f64| -(-x).exp() * ((x * 3.0).sin() + 3.0 * (x * 3.0).cos()) / 10.0;
            f(4.0) - f(0.0)
        };
        assert!((v - exact).abs() < 1e-13);
        assert!(e < 1e-6);
    }
}
