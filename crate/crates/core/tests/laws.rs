use janossy_core::biortho::{janossy_kernel_resolvent, polynomial_ensemble, BiorthoSystem};
use janossy_core::hardedge::{
    bessel_kernel, limit_kth_survival, BesselForm, BesselKernel,
};
use janossy_core::janossy::{
    count_distribution, fredholm_det, janossy_density, kth_particle_density,
    kth_particle_survival,
};
use janossy_core::measure::{gauss_legendre, Measure, Region};
use janossy_core::montecarlo::{empirical_survival, sample_many};
use janossy_core::orthopoly::{cd_kernel, laguerre_recurrence};
use janossy_core::verify::{resolvent_equation_residual, shift_identity_residual};
use nalgebra::{DMatrix, Matrix3};
use proptest::prelude::*;

fn lag0() -> Measure {
    Measure::laguerre(0.0).unwrap()
}

fn laguerre_system(n: usize) -> BiorthoSystem {
    polynomial_ensemble(&lag0(), n).unwrap()
}

/// `det(Id − K_I)` discretized on a Gauss rule of the measure restricted to `I`.
fn nystrom_det(sys: &BiorthoSystem, region: &Region, points: usize) -> f64 {
    let rule = lag0().on(region).gauss_rule(points).unwrap();
    let k = sys.kernel().matrix(&rule.nodes);
    let m = rule.len();
    let a = DMatrix::from_fn(m, m, |i, j| {
        let wi = rule.weights[i].sqrt();
        let wj = rule.weights[j].sqrt();
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - wi * k[(i, j)] * wj
    });
    a.determinant()
}

#[test]
fn fredholm_matches_nystrom() {
    for (n, region) in [
        (3, Region::interval(0.0, 1.0)),
        (6, Region::interval(0.5, 4.0)),
        (8, Region::interval(0.0, 0.5).union(&Region::interval(1.0, 1.5))),
    ] {
        let sys = laguerre_system(n);
        let exact = fredholm_det(&sys, &region).unwrap();
        let pieces = region.intervals().len();
        let approx = nystrom_det(&sys, &region, 200 / pieces);
        assert!((exact - approx).abs() < 1e-6, "n={n}: {exact} vs {approx}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gap_probability_decreases_on_nested_intervals(
        n in 1usize..8, a in 0.0f64..2.0, l1 in 0.05f64..1.0, l2 in 0.0f64..2.0
    ) {
        let sys = laguerre_system(n);
        let small = fredholm_det(&sys, &Region::interval(a, a + l1)).unwrap();
        let big = fredholm_det(&sys, &Region::interval((a - l2).max(0.0), a + l1 + l2)).unwrap();
        prop_assert!(big <= small + 1e-12);
    }

    #[test]
    fn counts_normalize(n in 1usize..10, a in 0.0f64..3.0, len in 0.05f64..5.0) {
        let sys = laguerre_system(n);
        let region = Region::interval(a, a + len);
        let q = count_distribution(&sys, &region).unwrap();
        let g = sys.gram_on(&region).unwrap();
        prop_assert!((q.total() - 1.0).abs() <= 1e-10);
        prop_assert!((q.mean() - g.trace()).abs() <= 1e-9);
        prop_assert!(q.probabilities().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn bessel_correlations_nonnegative(
        x in 0.0f64..10.0, y in 0.0f64..10.0, z in 0.0f64..10.0
    ) {
        let pts = [x, y, z];
        let m = Matrix3::from_fn(|i, j| bessel_kernel(0.0, pts[i], pts[j], BesselForm::Series).unwrap());
        prop_assert!(m.determinant() >= -1e-10);
    }
}

#[test]
fn counts_match_janossy_integrals() {
    let sys = laguerre_system(4);
    let region = Region::interval(0.2, 1.7);
    let q = count_distribution(&sys, &region).unwrap();
    let rule = lag0().on(&region).gauss_rule(48).unwrap();
    let q1: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| w * janossy_density(&sys, &region, &[x]).unwrap())
        .sum();
    let mut q2 = 0.0;
    for (&x, &wx) in rule.nodes.iter().zip(&rule.weights) {
        for (&y, &wy) in rule.nodes.iter().zip(&rule.weights) {
            q2 += wx * wy * janossy_density(&sys, &region, &[x, y]).unwrap();
        }
    }
    q2 /= 2.0;
    assert!((q.get(1) - q1).abs() < 1e-7, "{} vs {q1}", q.get(1));
    assert!((q.get(2) - q2).abs() < 1e-7, "{} vs {q2}", q.get(2));
}

#[test]
fn survival_bridges_density() {
    for (n, k) in [(2, 2), (4, 2), (3, 3), (6, 3)] {
        let sys = laguerre_system(n);
        let s = 0.8;
        let mass = Measure::lebesgue(Region::interval(0.0, s))
            .unwrap()
            .integrate(|x| kth_particle_density(&sys, k, x).unwrap(), 1e-9)
            .unwrap();
        let surv = kth_particle_survival(&sys, k, s).unwrap();
        assert!((surv - (1.0 - mass)).abs() < 1e-5, "n={n} k={k}: {surv} vs {}", 1.0 - mass);
    }
}

#[test]
fn survival_first_particle_is_exponential_at_all_n() {
    for n in [1, 3, 7, 15] {
        let sys = laguerre_system(n);
        for s in [0.1, 1.0, 3.0] {
            let p = kth_particle_survival(&sys, 1, s / n as f64).unwrap();
            assert!((p - (-s).exp()).abs() < 1e-9);
        }
    }
}

#[test]
fn finite_n_shift_resolvent_equation() {
    // K(x,y) = K(x−t,y−t) − ∫_0^t K(x−t,u−t) K(u,y) du in the Lebesgue gauge
    let (n, t) = (6, 1.0);
    let ops = laguerre_recurrence(0.0, n).unwrap();
    let k = |x: f64, y: f64| cd_kernel(&ops, n, x, y).unwrap() * (-(x + y) / 2.0).exp();
    let rule = gauss_legendre(64).unwrap().mapped(0.0, t);
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let (x, y) = ((i as f64 + 0.5) / 10.0 * t, (j as f64 + 0.5) / 10.0 * t);
            let conv: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&u, &w)| w * k(x - t, u - t) * k(u, y))
                .sum();
            worst = worst.max((k(x, y) - k(x - t, y - t) + conv).abs());
        }
    }
    assert!(worst < 1e-7, "{worst}");
}

#[test]
fn shift_identity_for_several_sizes() {
    for (n, t) in [(1, 0.5), (4, 2.0), (9, 1.0)] {
        let r = shift_identity_residual(n, t, 12).unwrap();
        assert!(r < 1e-7, "n={n} t={t}: {r}");
    }
}

#[test]
fn complement_kernel_carries_exp_factor_in_mu_gauge() {
    // in the weight's own gauge the complement kernel carries a factor e^t
    let (n, t) = (5, 0.7);
    let sys = laguerre_system(n);
    let l = janossy_kernel_resolvent(&sys, &Region::interval(0.0, t)).unwrap();
    let ops = laguerre_recurrence(0.0, n).unwrap();
    for &(x, y) in &[(0.1, 0.2), (0.5, 0.65)] {
        let want = t.exp() * cd_kernel(&ops, n, x - t, y - t).unwrap();
        assert!((l.eval(x, y) - want).abs() < 1e-8 * want.abs().max(1.0));
    }
}

fn hard_edge_error(n: usize, pts: &[f64]) -> f64 {
    let ops = laguerre_recurrence(0.0, n).unwrap();
    let bk = BesselKernel::new(0.0).unwrap();
    let nf = n as f64;
    let mut worst: f64 = 0.0;
    for &x in pts {
        for &y in pts {
            let scaled =
                cd_kernel(&ops, n, x / nf, y / nf).unwrap() * (-(x + y) / (2.0 * nf)).exp() / nf;
            let limit = bk.eval(x, y, BesselForm::Series).unwrap();
            worst = worst.max((scaled - limit).abs());
        }
    }
    worst
}

#[test]
fn hard_edge_limit_converges() {
    let at_one: Vec<f64> = [8, 16, 32, 64].iter().map(|&n| hard_edge_error(n, &[1.0])).collect();
    assert!(at_one.windows(2).all(|w| w[1] < w[0]), "{at_one:?}");

    let grid: Vec<f64> = (1..=10).map(|i| 0.2 * i as f64).collect();
    let errs: Vec<f64> = [16, 32, 64].iter().map(|&n| hard_edge_error(n, &grid)).collect();
    // second order in 1/n: each doubling divides the error by about 4
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > 4.0 / 1.5 && ratio < 4.0 * 1.5, "{errs:?}");
    }
}

#[test]
fn limiting_resolvent_equation() {
    for s in [0.5, 1.0, 2.0] {
        let r = resolvent_equation_residual(s, 10, 96).unwrap();
        assert!(r < 1e-6, "s={s}: {r}");
    }
}

#[test]
fn limit_survival_ordering() {
    let grid = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
    let table: Vec<Vec<f64>> = (1..=3)
        .map(|k| grid.iter().map(|&s| limit_kth_survival(k, s).unwrap()).collect())
        .collect();
    for row in &table {
        assert!(row.windows(2).all(|w| w[1] <= w[0] + 1e-14), "{row:?}");
    }
    for j in 0..grid.len() {
        assert!(table[0][j] <= table[1][j] + 1e-14 && table[1][j] <= table[2][j] + 1e-14);
    }
}

#[test]
fn third_particle_limit_matches_large_n() {
    let n = 60;
    let sys = laguerre_system(n);
    let finite = kth_particle_survival(&sys, 3, 2.0 / n as f64).unwrap();
    let limit = limit_kth_survival(3, 2.0).unwrap();
    assert!((finite - limit).abs() < 1e-3, "{finite} vs {limit}");
}

#[test]
fn exchangeable_one_point_density_counts_both_particles() {
    let samples = sample_many(2, 40_000, 5).unwrap();
    let width = 0.25;
    let bins = 200;
    let mut hist = vec![0usize; bins];
    for s in &samples {
        for &v in &s.eigenvalues {
            let b = (v / width) as usize;
            if b < bins {
                hist[b] += 1;
            }
        }
    }
    let integral: f64 =
        hist.iter().map(|&c| c as f64 / samples.len() as f64 / width).sum::<f64>() * width;
    assert!((integral - 2.0).abs() < 0.01);
}

#[test]
fn smallest_law_does_not_depend_on_n() {
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.05).collect();
    let a = empirical_survival(&sample_many(4, 100_000, 17).unwrap(), 1, 4.0, &grid).unwrap();
    let b = empirical_survival(&sample_many(8, 100_000, 18).unwrap(), 1, 8.0, &grid).unwrap();
    let ks = a
        .iter()
        .zip(&b)
        .map(|(p, q)| (p.fraction - q.fraction).abs())
        .fold(0.0, f64::max);
    assert!(ks <= 0.015, "{ks}");
}

#[test]
fn wishart_eigenvalues_nonnegative() {
    for n in [1, 5, 20] {
        let samples = sample_many(n, 500, 3).unwrap();
        assert!(samples.iter().all(|s| s.eigenvalues.len() == n
            && s.eigenvalues.iter().all(|&v| v >= 0.0)
            && s.eigenvalues.windows(2).all(|w| w[0] <= w[1])));
    }
}
