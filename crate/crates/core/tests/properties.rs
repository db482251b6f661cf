mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use star_trace::asymptotics::{l_closed_form, l_recursive, CoefficientOptions};
use star_trace::jost::{jost_for_edge, JostOptions};
use star_trace::pdet::perturbation_determinant;
use star_trace::spectrum::{find_eigenvalues, rectangle_winding, SpectrumOptions};
use star_trace::{EdgePotential, StarPotential};

fn star(seed: u64, n: usize) -> StarPotential {
    common::random_star(&mut common::rng(seed), n)
}

/// Stars whose edges are all non-positive wells.
fn attractive_star(seed: u64, n: usize) -> StarPotential {
    let mut rng = common::rng(seed);
    let edges = (0..n)
        .map(|_| {
            let e = common::random_edge(&mut rng);
            if e.amplitude() > 0.0 {
                e.scaled(-1.0)
            } else {
                e
            }
        })
        .collect();
    StarPotential::new(edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn determinant_conjugation_symmetry(seed in any::<u64>(), n in 2usize..5, k in 0.01f64..60.0) {
        let sp = star(seed, n);
        let opts = JostOptions::default();
        let plus = perturbation_determinant(&sp, Complex64::new(k, 0.0), &opts).unwrap();
        let minus = perturbation_determinant(&sp, Complex64::new(-k, 0.0), &opts).unwrap();
        prop_assert!((plus - minus.conj()).norm() <= 1e-10);
    }

    #[test]
    fn determinant_is_real_on_the_imaginary_axis(seed in any::<u64>(), n in 2usize..5, kappa in 0.01f64..20.0) {
        let d = perturbation_determinant(&star(seed, n), Complex64::new(0.0, kappa), &JostOptions::default()).unwrap();
        prop_assert_eq!(d.im, 0.0);
    }

    #[test]
    fn truncation_point_is_far_enough(seed in any::<u64>(), k in 0.05f64..10.0, im in 0.0f64..2.0) {
        let edge = common::random_edge(&mut common::rng(seed));
        let tol = 1e-10;
        let zeta = Complex64::new(k, im);
        let base = jost_for_edge(&edge, zeta, &JostOptions::with_tol(tol)).unwrap();
        let doubled = JostOptions { x_inf: Some(2.0 * base.x_inf), ..JostOptions::with_tol(tol) };
        let far = jost_for_edge(&edge, zeta, &doubled).unwrap();
        prop_assert!((base.theta0 - far.theta0).norm() <= 10.0 * tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn coefficient_routes_agree(seed in any::<u64>(), n in 2usize..6) {
        let sp = star(seed, n);
        let table = l_recursive(&sp, &CoefficientOptions::default()).unwrap();
        let closed = l_closed_form(&sp).unwrap();
        for m in 0..5 {
            prop_assert!((table.l[m] - closed[m]).abs() <= 1e-7 * closed[m].abs().max(1e-6), "m = {}", m + 1);
        }
    }

    #[test]
    fn deeper_wells_never_lose_eigenvalues(seed in any::<u64>(), n in 2usize..4) {
        let sp = attractive_star(seed, n);
        let opts = SpectrumOptions::default();
        let before = find_eigenvalues(&sp, &opts).unwrap().total();
        let after = find_eigenvalues(&sp.scaled(1.1), &opts).unwrap().total();
        prop_assert!(after >= before, "{} → {}", before, after);
    }

    #[test]
    fn rectangle_winding_counts_eigenvalues(seed in any::<u64>(), n in 2usize..4) {
        let sp = attractive_star(seed, n);
        let opts = SpectrumOptions::default();
        let spectrum = find_eigenvalues(&sp, &opts).unwrap();
        let kmax = sp.kappa_bound();
        let w = rectangle_winding(&sp, kmax, opts.jost.floor, kmax, &opts.jost).unwrap();
        prop_assert!((w - spectrum.total() as f64).abs() < 1e-6);
    }
}

/// log a carries only the even coefficients and η only the odd ones.
#[test]
fn high_energy_parity_split() {
    let sp = common::exponential_three();
    let table = l_recursive(&sp, &CoefficientOptions::default()).unwrap();
    for k in [25.0, 40.0, 80.0] {
        let log_d = perturbation_determinant(&sp, Complex64::new(k, 0.0), &JostOptions::with_tol(1e-12)).unwrap().ln();
        let (mut even, mut odd) = (0.0, 0.0);
        for (i, l) in table.l.iter().enumerate() {
            let term = *l * Complex64::new(0.0, 2.0 * k).powi(-(i as i32 + 1));
            if i % 2 == 1 {
                even += term.re;
            } else {
                odd += term.im;
            }
        }
        assert!((log_d.re - even).abs() < 1e-9, "k = {k}");
        assert!((log_d.im - odd).abs() < 1e-9, "k = {k}");
    }
}

/// After subtracting the odd tail through order 2m−1, `η·k^{2m−1}` decays like `k^{−2}`.
#[test]
fn subtracted_phase_integrand_decays() {
    let sp = common::exponential_three();
    let table = l_recursive(&sp, &CoefficientOptions::default()).unwrap();
    let ks: Vec<f64> = (0..8).map(|i| 8.0 * 1.25f64.powi(i)).collect();
    for m in 1..=2usize {
        let pts: Vec<(f64, f64)> = ks
            .iter()
            .map(|&k| {
                let eta = perturbation_determinant(&sp, Complex64::new(k, 0.0), &JostOptions::with_tol(1e-12)).unwrap().arg();
                let series: f64 = (0..m)
                    .map(|j| {
                        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
                        sign * table.l[2 * j] * (2.0 * k).powi(-(2 * j as i32) - 1)
                    })
                    .sum();
                (k.ln(), ((eta - series) * k.powi(2 * m as i32 - 1)).abs().ln())
            })
            .collect();
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope + 2.0).abs() < 0.2, "m = {m}: slope {slope}");
    }
}

#[test]
fn free_edges_contribute_nothing() {
    let sp = StarPotential::new(vec![EdgePotential::zero(), EdgePotential::zero(), EdgePotential::zero()]).unwrap();
    let table = l_recursive(&sp, &CoefficientOptions::default()).unwrap();
    assert!(table.l.iter().all(|l| *l == 0.0));
}
