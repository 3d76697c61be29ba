use janossy_core::biortho::{
    self, biorthogonalize, correlation, gram, janossy_kernel_resolvent, janossy_kernel_theorem1,
    polynomial_ensemble, FunctionFamily,
};
use janossy_core::measure::{Measure, Region, Weight};
use janossy_core::orthopoly::{self, cd_kernel, cd_kernel_ratio, jacobi_recurrence, laguerre_recurrence};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn lag0() -> Measure {
    Measure::laguerre(0.0).unwrap()
}

fn region_from(a: f64, la: f64, gap: f64, lb: f64, two: bool) -> Region {
    let first = Region::interval(a, a + la);
    if two {
        first.union(&Region::interval(a + la + gap, a + la + gap + lb))
    } else {
        first
    }
}

fn grid_in(region: &Region, m: usize) -> Vec<f64> {
    janossy_core::verify::region_grid(region, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn restricting_by_two_regions_removes_both(
        a in 0.0f64..2.0, la in 0.1f64..1.0, b in 2.5f64..4.0, lb in 0.1f64..2.0
    ) {
        let m = lag0();
        let i1 = Region::interval(a, a + la);
        let i2 = Region::interval(b, b + lb);
        let twice = m.restrict(&i1).unwrap().restrict(&i2).unwrap();
        let want = m.support().difference(&i1).difference(&i2);
        prop_assert_eq!(twice.support(), &want);
        prop_assert_eq!(twice.weight().to_string(), m.weight().to_string());
    }

    #[test]
    fn integrate_is_additive_over_splits(cuts in proptest::collection::vec(0.01f64..12.0, 1..5)) {
        let m = lag0();
        let tol = 1e-10;
        let mut pts = cuts.clone();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut edges = vec![0.0];
        edges.extend(pts);
        edges.push(f64::INFINITY);
        let f = |x: f64| 1.0 + x.sin();
        let whole = m.integrate(f, tol).unwrap();
        let mut parts = 0.0;
        for w in edges.windows(2) {
            parts += m.on(&Region::interval(w[0], w[1])).integrate(f, tol).unwrap();
        }
        prop_assert!((whole - parts).abs() <= 2.0 * tol * edges.len() as f64);
        let ones: f64 = edges
            .windows(2)
            .map(|w| m.on(&Region::interval(w[0], w[1])).integrate(|_| 1.0, tol).unwrap())
            .sum();
        prop_assert!((ones - 1.0).abs() <= 2.0 * tol * edges.len() as f64);
    }

    #[test]
    fn christoffel_darboux_reproduces(x in 0.0f64..10.0, y in 0.0f64..10.0, n in 1usize..9) {
        let ops = laguerre_recurrence(0.0, n).unwrap();
        let v = lag0()
            .integrate(|z| cd_kernel(&ops, n, x, z).unwrap() * cd_kernel(&ops, n, z, y).unwrap(), 1e-12)
            .unwrap();
        let k = cd_kernel(&ops, n, x, y).unwrap();
        prop_assert!((v - k).abs() < 1e-8 * k.abs().max(1.0));
    }

    #[test]
    fn ratio_and_sum_forms_agree(x in 0.0f64..12.0, dy in 0.05f64..5.0, n in 1usize..12) {
        let ops = laguerre_recurrence(0.0, n).unwrap();
        let y = x + dy;
        let a = cd_kernel(&ops, n, x, y).unwrap();
        let b = cd_kernel_ratio(&ops, n, x, y).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn shifted_orthonormal_polynomials(t in 0.1f64..3.0, x in 0.0f64..8.0) {
        let n = 5;
        let restricted = lag0().restrict(&Region::interval(0.0, t)).unwrap();
        let shifted = orthopoly::stieltjes(&restricted, n).unwrap();
        let base = laguerre_recurrence(0.0, n).unwrap();
        let xs = x + t;
        let p = shifted.eval_all(xs, n);
        let q = base.eval_all(xs - t, n);
        // Same functions once each side carries the square root of its weight.
        let g = (-xs / 2.0).exp();
        let h = (-(xs - t) / 2.0).exp();
        for j in 0..=n {
            prop_assert!((p[j] * g - q[j] * h).abs() < 1e-9 * (q[j] * h).abs().max(1.0));
        }
    }

    #[test]
    fn dual_routes_agree(
        n in 1usize..9, a in 0.0f64..1.0, la in 0.2f64..1.5, gap in 0.1f64..1.0,
        lb in 0.2f64..1.0, two in any::<bool>()
    ) {
        let m = lag0();
        let f = FunctionFamily::monomials(n);
        let sys = polynomial_ensemble(&m, n).unwrap();
        let region = region_from(a, la, gap, lb, two);
        let l1 = janossy_kernel_theorem1(&f, &f, &m, &region).unwrap();
        let l2 = janossy_kernel_resolvent(&sys, &region).unwrap();
        let pts = grid_in(&region, 20);
        let (x1, x2) = (l1.matrix(&pts), l2.matrix(&pts));
        let sup = x1.amax().max(x2.amax());
        prop_assert!((x1 - x2).amax() <= 1e-7 * (1.0 + sup));
    }

    #[test]
    fn operator_identity(n in 1usize..7, s in 0.3f64..2.5, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let m = lag0();
        let sys = polynomial_ensemble(&m, n).unwrap();
        let region = Region::interval(0.0, s);
        let k = sys.kernel();
        let l = janossy_kernel_resolvent(&sys, &region).unwrap();
        let (x, y) = (u * s, v * s);
        let conv = m.on(&region).integrate(|z| k.eval(x, z) * l.eval(z, y), 1e-12).unwrap();
        prop_assert!((l.eval(x, y) - k.eval(x, y) - conv).abs() <= 1e-7 * l.eval(x, y).abs().max(1.0));
    }

    #[test]
    fn gram_complementarity(n in 1usize..9, a in 0.0f64..2.0, la in 0.1f64..3.0, gap in 0.1f64..1.0,
                            lb in 0.1f64..2.0, two in any::<bool>()) {
        let m = lag0();
        let sys = polynomial_ensemble(&m, n).unwrap();
        let region = region_from(a, la, gap, lb, two);
        let gi = sys.gram_on(&region).unwrap();
        let go = gram(sys.xi(), sys.eta(), &m.restrict(&region).unwrap()).unwrap();
        prop_assert!((gi + go - DMatrix::<f64>::identity(n, n)).amax() <= 1e-9);
    }

    #[test]
    fn basis_independence(seed in proptest::collection::vec(-0.4f64..0.4, 36), n in 2usize..7) {
        let m = lag0();
        let sys = polynomial_ensemble(&m, n).unwrap();
        let t = DMatrix::from_fn(n, n, |i, j| if i == j { 1.5 + seed[i * 6 + j] } else { seed[i * 6 + j] });
        let other = sys.rebased(&t).unwrap();
        let region = Region::interval(0.2, 1.7);
        let a = janossy_kernel_resolvent(&sys, &region).unwrap();
        let b = janossy_kernel_resolvent(&other, &region).unwrap();
        let pts = [0.3, 0.9, 1.5];
        prop_assert!((a.matrix(&pts) - b.matrix(&pts)).amax() <= 1e-9);
    }

    #[test]
    fn gauge_invariance(n in 1usize..7, a in 0.0f64..1.0, len in 0.2f64..2.0) {
        let m = lag0();
        let sys = polynomial_ensemble(&m, n).unwrap();
        let region = Region::interval(a, a + len);
        let w = m.weight().clone();
        let xi = sys.xi().gauged(w.clone());
        let eta = sys.eta().gauged(w.clone());
        let leb = Measure::lebesgue(region.clone()).unwrap();
        let g_mu = sys.gram_on(&region).unwrap();
        let g_leb = gram(&xi, &eta, &leb).unwrap();
        let id = DMatrix::<f64>::identity(n, n);
        prop_assert!((g_mu.determinant() - g_leb.determinant()).abs() <= 1e-10);
        prop_assert!(((&id - g_mu).determinant() - (&id - g_leb).determinant()).abs() <= 1e-10);
        let pts = [a + 0.1 * len, a + 0.6 * len];
        let plain = correlation(&sys.kernel(), &pts);
        let gauged = correlation(&sys.kernel().gauged(w.clone()), &pts);
        let dens: f64 = pts.iter().map(|&x| w.eval(x)).product();
        prop_assert!((plain - gauged / dens).abs() <= 1e-10 * plain.abs().max(1.0));
    }
}

#[test]
fn trace_of_christoffel_darboux() {
    for n in [1, 5, 12] {
        let ops = laguerre_recurrence(0.0, n).unwrap();
        let t = lag0().integrate(|x| cd_kernel(&ops, n, x, x).unwrap(), 1e-12).unwrap();
        assert!((t - n as f64).abs() < 1e-8);
    }
}

#[test]
fn diagonal_is_limit_of_ratio_form() {
    let ops = laguerre_recurrence(0.0, 6).unwrap();
    let x = 1.3;
    let f = |h: f64| cd_kernel_ratio(&ops, 6, x, x + h).unwrap();
    let hs = [1e-3, 5e-4, 2.5e-4];
    let v: Vec<f64> = hs.iter().map(|&h| f(h)).collect();
    // linear error in h: two rounds of Richardson elimination
    let r1 = 2.0 * v[1] - v[0];
    let r2 = 2.0 * v[2] - v[1];
    let r = (4.0 * r2 - r1) / 3.0;
    let diag = cd_kernel(&ops, 6, x, x).unwrap();
    assert!((r - diag).abs() < 1e-9, "{r} vs {diag}");
}

#[test]
fn monomial_kernel_matches_christoffel_darboux_grid() {
    let n = 7;
    let sys = polynomial_ensemble(&lag0(), n).unwrap();
    let ops = laguerre_recurrence(0.0, n).unwrap();
    let k = sys.kernel();
    for i in 0..10 {
        for j in 0..10 {
            let (x, y) = (0.4 * i as f64, 0.9 * j as f64);
            assert!((k.eval(x, y) - cd_kernel(&ops, n, x, y).unwrap()).abs() < 1e-9);
        }
    }
}

#[test]
fn two_point_correlation_matches_joint_density() {
    let m = lag0();
    let sys = polynomial_ensemble(&m, 3).unwrap();
    let (x, y) = (0.5, 1.5);
    // Z = n! * prod of monic norms = 3! * (1 * 1 * 4)
    let z_norm = 24.0;
    let marg = m
        .integrate(|w| ((x - y) * (x - w) * (y - w)).powi(2), 1e-13)
        .unwrap();
    let want = 6.0 * marg / z_norm;
    let got = correlation(&sys.kernel(), &[x, y]);
    assert!((got - want).abs() < 1e-10, "{got} vs {want}");
}

#[test]
fn jacobi_complement_is_rescaled_jacobi() {
    let (b, n, t) = (2.0, 5, 0.3);
    let m = Measure::jacobi(0.0, b).unwrap();
    let f = FunctionFamily::monomials(n);
    let region = Region::interval(t, 1.0);
    let l1 = janossy_kernel_theorem1(&f, &f, &m, &region).unwrap();
    let sys = biorthogonalize(&f, &f, &m).unwrap();
    let l2 = janossy_kernel_resolvent(&sys, &region).unwrap();
    let ops = jacobi_recurrence(0.0, b, n).unwrap();
    let half = (t + 1.0) / 2.0;
    let u = |x: f64| (x + 1.0) / half - 1.0;
    for &x in &[0.35, 0.6, 0.95] {
        for &y in &[0.4, 0.8] {
            let want = cd_kernel(&ops, n, u(x), u(y)).unwrap() / half.powf(b + 1.0);
            let a1 = l1.eval(x, y);
            let a2 = l2.eval(x, y);
            assert!((a1 - want).abs() < 1e-7 * want.abs().max(1.0), "{a1} vs {want}");
            assert!((a2 - want).abs() < 1e-7 * want.abs().max(1.0), "{a2} vs {want}");
        }
    }
}

#[test]
fn custom_families_agree_across_routes() {
    // non-polynomial families go through the LU route on both sides
    let m = lag0();
    let phi = FunctionFamily::new(3, |x, o| {
        o[0] = 1.0;
        o[1] = (-x).exp();
        o[2] = x.sqrt();
    });
    let psi = FunctionFamily::new(3, |x, o| {
        o[0] = 1.0 + x;
        o[1] = x * x;
        o[2] = (x / 2.0).cos();
    });
    let sys = biorthogonalize(&phi, &psi, &m).unwrap();
    let g = gram(sys.xi(), sys.eta(), &m).unwrap();
    assert!((g - DMatrix::<f64>::identity(3, 3)).amax() < 1e-9);
    let region = Region::interval(0.0, 0.8);
    let l1 = janossy_kernel_theorem1(&phi, &psi, &m, &region).unwrap();
    let l2 = janossy_kernel_resolvent(&sys, &region).unwrap();
    let pts = [0.1, 0.4, 0.75];
    let (a, c) = (l1.matrix(&pts), l2.matrix(&pts));
    assert!((&a - &c).amax() < 1e-7 * (1.0 + a.amax()));
    assert!((l1.family_coefficients() - l2.family_coefficients()).amax() < 1e-6 * (1.0 + l1.family_coefficients().amax()));
}

#[test]
fn custom_weight_measures_work() {
    let w = Weight::custom("gauss-bump", janossy_core::measure::TailDecay::SubGaussian, |x| {
        (-x * x).exp() * (1.0 + 0.5 * x.sin())
    });
    let m = Measure::new(Region::real_line(), w).unwrap();
    let sys = polynomial_ensemble(&m, 4).unwrap();
    let g = gram(sys.xi(), sys.eta(), &m).unwrap();
    assert!((g - DMatrix::<f64>::identity(4, 4)).amax() < 1e-9);
    let _ = biortho::condition_estimate(&DMatrix::<f64>::identity(2, 2));
}
