//! Biorthogonal systems for a pair of function families, the finite-rank
//! kernel `K(x,y) = Σ ξ_j(x) η_j(y)`, and two independent constructions of
//! the Janossy kernel `L_I = K_I (Id − K_I)^{-1}`:
//!
//! * complement route: biorthogonalize the same families on `X ∖ I`;
//! * resolvent route: `Σ_{j,k} ξ_j(x) η_k(y) (Id − G_I)^{-1}_{kj}` from the
//!   Gram matrix `G_I` of the full-space system on `I`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::measure::{Measure, Region, Weight, DEFAULT_TOL};
use crate::orthopoly::{self, OPSequence};

/// Refusal threshold for biorthogonalization.
pub const CONDITION_CAP: f64 = 1e12;

/// Smallest singular value of `Id − G_I` below which the resolvent is
/// treated as missing. Gram entries carry about `1e-10` absolute error.
pub const RESOLVENT_FLOOR: f64 = 1e-9;

type Evaluator = Arc<dyn Fn(f64, &mut [f64]) + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// `x^{j-1}`, `j = 1..n`.
    Monomial,
    /// Orthonormal polynomials evaluated by their recurrence.
    Orthonormal,
    General,
}

/// `n` functions evaluated together at a point.
#[derive(Clone)]
pub struct FunctionFamily {
    len: usize,
    eval: Evaluator,
    kind: FamilyKind,
}

impl fmt::Debug for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionFamily")
            .field("len", &self.len)
            .field("kind", &self.kind)
            .finish()
    }
}

impl FunctionFamily {
    /// Family from a vectorized evaluator `f(x, out)` filling `out[..n]`.
    pub fn new<F>(n: usize, f: F) -> Self
    where
        F: Fn(f64, &mut [f64]) + Send + Sync + 'static,
    {
        FunctionFamily {
            len: n,
            eval: Arc::new(f),
            kind: FamilyKind::General,
        }
    }

    pub fn from_fns(fns: Vec<Arc<dyn Fn(f64) -> f64 + Send + Sync>>) -> Self {
        let n = fns.len();
        FunctionFamily::new(n, move |x, out| {
            for (o, f) in out.iter_mut().zip(&fns) {
                *o = f(x);
            }
        })
    }

    pub fn monomials(n: usize) -> Self {
        FunctionFamily {
            len: n,
            eval: Arc::new(|x, out: &mut [f64]| {
                let mut p = 1.0;
                for o in out.iter_mut() {
                    *o = p;
                    p *= x;
                }
            }),
            kind: FamilyKind::Monomial,
        }
    }

    /// `p_0, …, p_{n−1}` of an orthonormal sequence.
    pub fn orthonormal(ops: &OPSequence, n: usize) -> Result<Self> {
        if n > ops.degree_bound() + 1 {
            return Err(Error::IndexOutOfRange {
                index: n,
                bound: ops.degree_bound() + 1,
            });
        }
        let ops = ops.clone();
        Ok(FunctionFamily {
            len: n,
            eval: Arc::new(move |x, out: &mut [f64]| ops.eval_into(x, out)),
            kind: FamilyKind::Orthonormal,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn is_monomial(&self) -> bool {
        self.kind == FamilyKind::Monomial
    }

    /// True when both handles share one evaluator.
    pub fn same_as(&self, other: &FunctionFamily) -> bool {
        self.len == other.len && Arc::ptr_eq(&self.eval, &other.eval)
    }

    #[inline]
    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        (self.eval)(x, &mut out[..self.len]);
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        self.eval_into(x, &mut out);
        out
    }

    /// Row `i` of `coeffs` gives member `i` of the new family as a
    /// combination of this family.
    pub fn combine(&self, coeffs: &DMatrix<f64>) -> FunctionFamily {
        assert_eq!(coeffs.ncols(), self.len, "coefficient width must match family size");
        let base = self.clone();
        let coeffs = coeffs.clone();
        let n = coeffs.nrows();
        FunctionFamily::new(n, move |x, out| {
            let v = DVector::from_vec(base.eval(x));
            let r = &coeffs * v;
            out.copy_from_slice(r.as_slice());
        })
    }

    /// Each member multiplied by `√ω(x)` (the Lebesgue gauge).
    pub fn gauged(&self, weight: Weight) -> FunctionFamily {
        let base = self.clone();
        FunctionFamily::new(self.len, move |x, out| {
            base.eval_into(x, out);
            let s = weight.eval(x).sqrt();
            out.iter_mut().for_each(|o| *o *= s);
        })
    }
}

/// `G_ij = ∫ φ_i ψ_j dμ`, each entry to absolute tolerance `tol`.
pub fn gram_with_tol(
    phi: &FunctionFamily,
    psi: &FunctionFamily,
    m: &Measure,
    tol: f64,
) -> Result<DMatrix<f64>> {
    let (n, k) = (phi.len(), psi.len());
    if m.support().is_empty() {
        return Ok(DMatrix::zeros(n, k));
    }
    let v = m.integrate_vec(
        n * k,
        |x, out| {
            let a = phi.eval(x);
            let b = psi.eval(x);
            for i in 0..n {
                for j in 0..k {
                    // column-major, matching DMatrix storage
                    out[i + j * n] = a[i] * b[j];
                }
            }
        },
        tol,
    )?;
    Ok(DMatrix::from_vec(n, k, v))
}

/// Gram matrix with the default per-entry tolerance `1e-10`.
pub fn gram(phi: &FunctionFamily, psi: &FunctionFamily, m: &Measure) -> Result<DMatrix<f64>> {
    if phi.len() != psi.len() {
        return Err(Error::InvalidParameter(format!(
            "families differ in size: {} vs {}",
            phi.len(),
            psi.len()
        )));
    }
    gram_with_tol(phi, psi, m, DEFAULT_TOL)
}

/// 2-norm condition number from the singular values.
pub fn condition_estimate(g: &DMatrix<f64>) -> f64 {
    if g.is_empty() {
        return 1.0;
    }
    let sv = g.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Families `ξ = Aφ`, `η = Bψ` with `⟨ξ_k, η_m⟩ = δ_km` on `measure`.
#[derive(Debug, Clone)]
pub struct BiorthoSystem {
    phi: FunctionFamily,
    psi: FunctionFamily,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    xi: FunctionFamily,
    eta: FunctionFamily,
    measure: Measure,
    ops: Option<OPSequence>,
}

impl BiorthoSystem {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn phi(&self) -> &FunctionFamily {
        &self.phi
    }

    pub fn psi(&self) -> &FunctionFamily {
        &self.psi
    }

    /// Rows are the coefficients of `ξ_j` over `φ`.
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Rows are the coefficients of `η_j` over `ψ`.
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn xi(&self) -> &FunctionFamily {
        &self.xi
    }

    pub fn eta(&self) -> &FunctionFamily {
        &self.eta
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    /// Orthonormal polynomials backing the system, for polynomial ensembles.
    pub fn ops(&self) -> Option<&OPSequence> {
        self.ops.as_ref()
    }

    /// `K(x, y) = Σ_j ξ_j(x) η_j(y)`.
    pub fn kernel(&self) -> RankNKernel {
        RankNKernel {
            c: DMatrix::identity(self.len(), self.len()),
            left: self.xi.clone(),
            right: self.eta.clone(),
            left_coeffs: self.a.clone(),
            right_coeffs: self.b.clone(),
        }
    }

    /// `(G_I)_{jk} = ∫_{I ∩ X} ξ_j η_k dμ`.
    pub fn gram_on(&self, region: &Region) -> Result<DMatrix<f64>> {
        gram_with_tol(&self.xi, &self.eta, &self.measure.on(region), DEFAULT_TOL)
    }

    /// Same system with `η` built from a different (still biorthonormal)
    /// basis: `ξ' = T ξ`, `η' = T^{-T} η`. Kernels are invariant under this.
    pub fn rebased(&self, t: &DMatrix<f64>) -> Result<BiorthoSystem> {
        let t_inv_t = t
            .clone()
            .try_inverse()
            .ok_or(Error::BiorthogonalizationFailed {
                condition: f64::INFINITY,
            })?
            .transpose();
        Ok(BiorthoSystem {
            phi: self.phi.clone(),
            psi: self.psi.clone(),
            a: t * &self.a,
            b: &t_inv_t * &self.b,
            xi: self.xi.combine(t),
            eta: self.eta.combine(&t_inv_t),
            measure: self.measure.clone(),
            ops: None,
        })
    }
}

/// Polynomial ensembles go through the orthogonal-polynomial path; every
/// other pair of families through a pivoted factorization of the Gram matrix.
pub fn biorthogonalize(
    phi: &FunctionFamily,
    psi: &FunctionFamily,
    m: &Measure,
) -> Result<BiorthoSystem> {
    if phi.is_monomial() && psi.is_monomial() && phi.len() == psi.len() {
        return biorthogonalize_polynomial(phi, psi, m);
    }
    biorthogonalize_lu(phi, psi, m)
}

/// System of the `n`-point polynomial ensemble of `m`.
pub fn polynomial_ensemble(m: &Measure, n: usize) -> Result<BiorthoSystem> {
    let f = FunctionFamily::monomials(n);
    biorthogonalize(&f, &f, m)
}

fn biorthogonalize_polynomial(
    phi: &FunctionFamily,
    psi: &FunctionFamily,
    m: &Measure,
) -> Result<BiorthoSystem> {
    let n = phi.len();
    let ops = orthopoly::for_measure(m, n.max(1)).map_err(|e| match e {
        Error::PositivityLost { .. } | Error::MeshNotConverged(_) => {
            Error::BiorthogonalizationFailed {
                condition: f64::INFINITY,
            }
        }
        other => other,
    })?;
    let coeffs = ops.monomial_coefficients(n);
    let xi = FunctionFamily::orthonormal(&ops, n)?;
    Ok(BiorthoSystem {
        phi: phi.clone(),
        psi: psi.clone(),
        a: coeffs.clone(),
        b: coeffs,
        eta: xi.clone(),
        xi,
        measure: m.clone(),
        ops: Some(ops),
    })
}

/// Biorthogonalization from the Gram matrix `G`: Cholesky `G = LLᵀ` when
/// `φ` and `ψ` are the same family, otherwise full-pivot LU `PGQ = LU` with
/// `A = L^{-1}P`, `Bᵀ = QU^{-1}`. Refuses when `cond(G) > 1e12`.
pub fn biorthogonalize_lu(
    phi: &FunctionFamily,
    psi: &FunctionFamily,
    m: &Measure,
) -> Result<BiorthoSystem> {
    let g = gram(phi, psi, m)?;
    let n = g.nrows();
    let cond = condition_estimate(&g);
    if !(cond <= CONDITION_CAP) {
        return Err(Error::BiorthogonalizationFailed { condition: cond });
    }
    let failed = || Error::BiorthogonalizationFailed { condition: cond };
    let (a, b) = if phi.same_as(psi) {
        match g.clone().cholesky() {
            Some(ch) => {
                let l_inv = ch.l().try_inverse().ok_or_else(failed)?;
                (l_inv.clone(), l_inv)
            }
            None => lu_factors(&g).ok_or_else(failed)?,
        }
    } else {
        lu_factors(&g).ok_or_else(failed)?
    };
    let check = &a * &g * b.transpose() - DMatrix::<f64>::identity(n, n);
    if check.amax() > 1e-9 {
        return Err(failed());
    }
    Ok(BiorthoSystem {
        xi: phi.combine(&a),
        eta: psi.combine(&b),
        phi: phi.clone(),
        psi: psi.clone(),
        a,
        b,
        measure: m.clone(),
        ops: None,
    })
}

fn lu_factors(g: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let n = g.nrows();
    let lu = g.clone().full_piv_lu();
    let mut p = DMatrix::<f64>::identity(n, n);
    lu.p().permute_rows(&mut p);
    let mut q = DMatrix::<f64>::identity(n, n);
    lu.q().permute_columns(&mut q);
    let l_inv = lu.l().try_inverse()?;
    let u_inv = lu.u().try_inverse()?;
    let a = l_inv * p;
    let bt = q * u_inv;
    Some((a, bt.transpose()))
}

/// `kernel(x, y) = Σ_{j,k} C_jk u_j(x) v_k(y)`, with `u`, `v` themselves
/// combinations of the raw families (`u = L φ`, `v = R ψ`).
#[derive(Debug, Clone)]
pub struct RankNKernel {
    c: DMatrix<f64>,
    left: FunctionFamily,
    right: FunctionFamily,
    left_coeffs: DMatrix<f64>,
    right_coeffs: DMatrix<f64>,
}

impl RankNKernel {
    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn rank_bound(&self) -> usize {
        self.c.nrows()
    }

    /// Coefficient matrix over the raw `(φ, ψ)` families, `Lᵀ C R`.
    pub fn family_coefficients(&self) -> DMatrix<f64> {
        self.left_coeffs.transpose() * &self.c * &self.right_coeffs
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let u = DVector::from_vec(self.left.eval(x));
        let v = DVector::from_vec(self.right.eval(y));
        u.dot(&(&self.c * v))
    }

    /// `[K(x_i, x_j)]` evaluating each family once per point.
    pub fn matrix(&self, points: &[f64]) -> DMatrix<f64> {
        let n = self.left.len();
        let k = points.len();
        let mut u = DMatrix::zeros(n, k);
        let mut v = DMatrix::zeros(n, k);
        let mut buf = vec![0.0; n];
        for (i, &x) in points.iter().enumerate() {
            self.left.eval_into(x, &mut buf);
            u.column_mut(i).copy_from_slice(&buf);
            self.right.eval_into(x, &mut buf);
            v.column_mut(i).copy_from_slice(&buf);
        }
        u.transpose() * &self.c * v
    }

    /// Same kernel in the Lebesgue gauge, `√(ω(x) ω(y)) K(x, y)`.
    pub fn gauged(&self, weight: Weight) -> RankNKernel {
        RankNKernel {
            c: self.c.clone(),
            left: self.left.gauged(weight.clone()),
            right: self.right.gauged(weight),
            left_coeffs: self.left_coeffs.clone(),
            right_coeffs: self.right_coeffs.clone(),
        }
    }
}

/// `K(x, y) = Σ ξ_j(x) η_j(y)` of a system.
pub fn kernel(sys: &BiorthoSystem) -> RankNKernel {
    sys.kernel()
}

/// `det(K(x_i, x_j))_{i,j ≤ k}`.
pub fn correlation(kern: &RankNKernel, points: &[f64]) -> f64 {
    if points.is_empty() {
        return 1.0;
    }
    kern.matrix(points).determinant()
}

/// Janossy kernel by biorthogonalizing `φ, ψ` on `X ∖ I`.
pub fn janossy_kernel_theorem1(
    phi: &FunctionFamily,
    psi: &FunctionFamily,
    m: &Measure,
    region: &Region,
) -> Result<RankNKernel> {
    let complement = m.restrict(region)?;
    Ok(biorthogonalize(phi, psi, &complement)?.kernel())
}

/// Janossy kernel `Σ_{j,k} ξ_j(x) η_k(y) (Id − G_I)^{-1}_{kj}` from a
/// full-space system.
pub fn janossy_kernel_resolvent(sys: &BiorthoSystem, region: &Region) -> Result<RankNKernel> {
    let g = sys.gram_on(region)?;
    resolvent_from_gram(sys, &g)
}

pub(crate) fn resolvent_from_gram(sys: &BiorthoSystem, g: &DMatrix<f64>) -> Result<RankNKernel> {
    let n = sys.len();
    let complement = DMatrix::<f64>::identity(n, n) - g;
    if n > 0 && complement.clone().svd(false, false).singular_values.min() < RESOLVENT_FLOOR {
        return Err(Error::ResolventMissing);
    }
    let inv = complement
        .full_piv_lu()
        .try_inverse()
        .ok_or(Error::ResolventMissing)?;
    Ok(RankNKernel {
        c: inv.transpose(),
        left: sys.xi.clone(),
        right: sys.eta.clone(),
        left_coeffs: sys.a.clone(),
        right_coeffs: sys.b.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::{cd_kernel, laguerre_recurrence};

    fn lag0() -> Measure {
        Measure::laguerre(0.0).unwrap()
    }

    fn ones() -> FunctionFamily {
        FunctionFamily::new(1, |_, out| out[0] = 1.0)
    }

    #[test]
    fn gram_of_orthonormal_family_is_identity() {
        let ops = laguerre_recurrence(0.0, 6).unwrap();
        let f = FunctionFamily::orthonormal(&ops, 6).unwrap();
        let g = gram(&f, &f, &lag0()).unwrap();
        assert!((g - DMatrix::<f64>::identity(6, 6)).amax() < 1e-10);
    }

    #[test]
    fn gram_scalar_on_interval() {
        let s = 0.8;
        let g = gram(&ones(), &ones(), &lag0().on(&Region::interval(0.0, s))).unwrap();
        assert!((g[(0, 0)] - (1.0 - (-s).exp())).abs() < 1e-12);
    }

    #[test]
    fn gram_of_monomials() {
        let f = FunctionFamily::monomials(2);
        let g = gram(&f, &f, &lag0()).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]);
        assert!((g - want).amax() < 1e-12);
    }

    #[test]
    fn monomials_on_laguerre_give_orthonormal_polynomials() {
        let f = FunctionFamily::monomials(4);
        let sys = biorthogonalize(&f, &f, &lag0()).unwrap();
        let ops = laguerre_recurrence(0.0, 4).unwrap();
        for &x in &[0.0, 0.5, 2.0, 7.0] {
            let xi = sys.xi().eval(x);
            let eta = sys.eta().eval(x);
            let p = ops.eval_all(x, 3);
            for j in 0..4 {
                assert!((xi[j] - p[j]).abs() < 1e-12);
                assert!((eta[j] - p[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lu_route_reproduces_orthonormal_polynomials_up_to_sign() {
        let f = FunctionFamily::monomials(4);
        let g = FunctionFamily::new(4, |x, out| {
            let mut p = 1.0;
            for o in out.iter_mut() {
                *o = p;
                p *= x;
            }
        });
        let sys = biorthogonalize_lu(&f, &g, &lag0()).unwrap();
        let gm = gram(&f, &g, &lag0()).unwrap();
        let check = sys.a() * gm * sys.b().transpose();
        assert!((check - DMatrix::<f64>::identity(4, 4)).amax() < 1e-9);
        // Kernel is basis independent even though ξ ≠ η here.
        let ops = laguerre_recurrence(0.0, 4).unwrap();
        let k = sys.kernel();
        for &(x, y) in &[(0.1, 0.2), (1.0, 3.0), (5.0, 0.5)] {
            let want = cd_kernel(&ops, 4, x, y).unwrap();
            assert!((k.eval(x, y) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn cholesky_route_gives_symmetric_system() {
        let f = FunctionFamily::new(3, |x, out| {
            out[0] = 1.0;
            out[1] = x.sin();
            out[2] = x;
        });
        let sys = biorthogonalize(&f, &f, &lag0()).unwrap();
        assert!((sys.a() - sys.b()).amax() == 0.0);
        let g = gram(sys.xi(), sys.eta(), &lag0()).unwrap();
        assert!((g - DMatrix::<f64>::identity(3, 3)).amax() < 1e-9);
    }

    #[test]
    fn restricted_constant_family() {
        let s = 1.3;
        let m = lag0().restrict(&Region::interval(0.0, s)).unwrap();
        let f = ones();
        let sys = biorthogonalize(&f, &f, &m).unwrap();
        let xi = sys.xi().eval(2.0)[0];
        assert!((xi.abs() - (s / 2.0).exp()).abs() < 1e-9);
        assert!((sys.kernel().eval(0.3, 4.0) - s.exp()).abs() < 1e-8);
    }

    #[test]
    fn identity_gram_gives_identity_factors() {
        let ops = laguerre_recurrence(0.0, 3).unwrap();
        let f = FunctionFamily::orthonormal(&ops, 3).unwrap();
        let sys = biorthogonalize_lu(&f, &f, &lag0()).unwrap();
        assert!((sys.a() - DMatrix::<f64>::identity(3, 3)).amax() < 1e-9);
        assert!((sys.b() - DMatrix::<f64>::identity(3, 3)).amax() < 1e-9);
    }

    #[test]
    fn singular_gram_is_rejected() {
        let f = FunctionFamily::new(2, |x, out| {
            out[0] = x;
            out[1] = 2.0 * x;
        });
        let err = biorthogonalize(&f, &f, &lag0()).unwrap_err();
        assert!(matches!(err, Error::BiorthogonalizationFailed { .. }), "{err:?}");
    }

    #[test]
    fn single_particle_kernels() {
        let sys = biorthogonalize(&ones(), &ones(), &lag0()).unwrap();
        assert!((sys.kernel().eval(0.4, 9.0) - 1.0).abs() < 1e-10);
        let s = 0.7;
        let region = Region::interval(0.0, s);
        let l1 = janossy_kernel_theorem1(&ones(), &ones(), &lag0(), &region).unwrap();
        let l2 = janossy_kernel_resolvent(&sys, &region).unwrap();
        assert!((l1.eval(0.1, 0.2) - s.exp()).abs() < 1e-8);
        assert!((l2.eval(0.1, 0.2) - s.exp()).abs() < 1e-8);
    }

    #[test]
    fn empty_region_resolvent_is_kernel() {
        let f = FunctionFamily::monomials(3);
        let sys = biorthogonalize(&f, &f, &lag0()).unwrap();
        let l = janossy_kernel_resolvent(&sys, &Region::empty()).unwrap();
        assert!((l.coefficients() - DMatrix::<f64>::identity(3, 3)).amax() == 0.0);
    }

    #[test]
    fn resolvent_missing_when_region_is_everything() {
        let f = FunctionFamily::monomials(2);
        let sys = biorthogonalize(&f, &f, &lag0()).unwrap();
        let err = janossy_kernel_resolvent(&sys, &Region::real_line()).unwrap_err();
        assert_eq!(err, Error::ResolventMissing);
        let err = janossy_kernel_theorem1(&f, &f, &lag0(), &Region::real_line()).unwrap_err();
        assert_eq!(err, Error::EmptyRestrictedSupport);
    }

    #[test]
    fn correlation_small_cases() {
        let f = FunctionFamily::monomials(3);
        let sys = biorthogonalize(&f, &f, &lag0()).unwrap();
        let k = sys.kernel();
        assert!((correlation(&k, &[0.7]) - k.eval(0.7, 0.7)).abs() < 1e-14);
        assert!(correlation(&k, &[1.1, 1.1]).abs() < 1e-12);
        assert!(correlation(&k, &[0.1, 0.5, 1.0, 2.0]).abs() < 1e-12);
    }

    #[test]
    fn family_coefficients_match_pointwise_kernel() {
        let f = FunctionFamily::monomials(3);
        let sys = biorthogonalize(&f, &f, &lag0()).unwrap();
        let c = sys.kernel().family_coefficients();
        let (x, y) = (0.4f64, 2.5f64);
        let px = DVector::from_vec(vec![1.0, x, x * x]);
        let py = DVector::from_vec(vec![1.0, y, y * y]);
        assert!((px.dot(&(&c * py)) - sys.kernel().eval(x, y)).abs() < 1e-10);
    }
}
