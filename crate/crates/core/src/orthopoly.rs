//! Orthonormal polynomials from three-term recurrences, the discretized
//! Stieltjes procedure, and the Christoffel–Darboux kernel.
//!
//! Monic recurrence: `π_{j+1}(x) = (x − a_j) π_j(x) − b_j π_{j−1}(x)` with
//! `b_0 = ∫ ω`. Orthonormal `p_j = π_j / √h_j` with `h_j = b_0 b_1 ⋯ b_j`
//! and positive leading coefficient `k_j = h_j^{-1/2}`. Kernels are in the
//! μ-gauge (no `√ω` factors).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::measure::{Measure, Weight};
use crate::special::gamma;

/// Recurrence data for `p_0, …, p_d` where `d` is the degree bound.
#[derive(Debug, Clone, PartialEq)]
pub struct OPSequence {
    a: Vec<f64>,
    b: Vec<f64>,
    norms: Vec<f64>,
    leading: Vec<f64>,
}

impl OPSequence {
    /// `a = [a_0..a_{d-1}]`, `b = [b_0..b_d]`.
    pub fn from_recurrence(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if b.len() != a.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "need len(b) = len(a) + 1, got {} and {}",
                b.len(),
                a.len()
            )));
        }
        if let Some((index, &value)) = b.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(Error::PositivityLost { index, value });
        }
        let mut norms = Vec::with_capacity(b.len());
        let mut h = 1.0;
        for &bj in &b {
            h *= bj;
            norms.push(h);
        }
        let leading = norms.iter().map(|h| 1.0 / h.sqrt()).collect();
        Ok(OPSequence {
            a,
            b,
            norms,
            leading,
        })
    }

    pub fn degree_bound(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `h_j = ∫ π_j² dμ` (overflows to infinity for very high degrees).
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// `k_j`, the leading coefficient of `p_j`.
    pub fn leading(&self) -> &[f64] {
        &self.leading
    }

    /// `p_0(x), …, p_upto(x)` by the orthonormal recurrence.
    pub fn eval_all(&self, x: f64, upto: usize) -> Vec<f64> {
        let mut out = vec![0.0; upto + 1];
        self.eval_into(x, &mut out);
        out
    }

    /// Fills `out[j] = p_j(x)` for `j < out.len()` (`out.len() ≤ d + 1`).
    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        if out.is_empty() {
            return;
        }
        debug_assert!(out.len() <= self.b.len());
        let mut prev = 0.0;
        let mut cur = 1.0 / self.b[0].sqrt();
        out[0] = cur;
        for j in 1..out.len() {
            let next = ((x - self.a[j - 1]) * cur - self.b[j - 1].sqrt() * prev) / self.b[j].sqrt();
            out[j] = next;
            prev = cur;
            cur = next;
        }
    }

    /// Monomial coefficients: row `j` holds the coefficients of `p_j`,
    /// `j < n`, lowest degree first.
    pub fn monomial_coefficients(&self, n: usize) -> DMatrix<f64> {
        let mut c = DMatrix::zeros(n, n);
        if n == 0 {
            return c;
        }
        c[(0, 0)] = 1.0 / self.b[0].sqrt();
        for j in 1..n {
            let sb = self.b[j].sqrt();
            for d in 0..=j {
                let shifted = if d > 0 { c[(j - 1, d - 1)] } else { 0.0 };
                let prev = if j >= 2 { c[(j - 2, d)] } else { 0.0 };
                c[(j, d)] = (shifted - self.a[j - 1] * c[(j - 1, d)] - self.b[j - 1].sqrt() * prev) / sb;
            }
        }
        c
    }
}

/// Closed-form recurrence for `x^α e^{-x}` on `(0, ∞)`.
pub fn laguerre_recurrence(alpha: f64, n: usize) -> Result<OPSequence> {
    if !(alpha > -1.0) {
        return Err(Error::InvalidParameter(format!("alpha must exceed -1, got {alpha}")));
    }
    let a = (0..n).map(|j| 2.0 * j as f64 + alpha + 1.0).collect();
    let mut b = vec![gamma(alpha + 1.0)?];
    b.extend((1..=n).map(|j| j as f64 * (j as f64 + alpha)));
    OPSequence::from_recurrence(a, b)
}

/// Closed-form recurrence for `(1−x)^a (1+x)^b` on `(−1, 1)`.
pub fn jacobi_recurrence(a: f64, b: f64, n: usize) -> Result<OPSequence> {
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "jacobi parameters must exceed -1, got ({a}, {b})"
        )));
    }
    let ab = a + b;
    let centers = (0..n)
        .map(|j| {
            if j == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let s = 2.0 * j as f64 + ab;
                (b * b - a * a) / (s * (s + 2.0))
            }
        })
        .collect();
    let mut bs = Vec::with_capacity(n + 1);
    bs.push(2f64.powf(ab + 1.0) * gamma(a + 1.0)? * gamma(b + 1.0)? / gamma(ab + 2.0)?);
    for j in 1..=n {
        let jf = j as f64;
        let v = if j == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            let s = 2.0 * jf + ab;
            4.0 * jf * (jf + a) * (jf + b) * (jf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        bs.push(v);
    }
    OPSequence::from_recurrence(centers, bs)
}

/// Closed-form recurrence for `e^{-x²}` on the real line.
pub fn hermite_recurrence(n: usize) -> Result<OPSequence> {
    let mut b = vec![std::f64::consts::PI.sqrt()];
    b.extend((1..=n).map(|j| 0.5 * j as f64));
    OPSequence::from_recurrence(vec![0.0; n], b)
}

/// Stieltjes procedure in orthonormal form on a discrete rule.
fn stieltjes_on_rule(nodes: &[f64], weights: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let b0: f64 = weights.iter().sum();
    if !(b0 > 0.0) {
        return Err(Error::PositivityLost { index: 0, value: b0 });
    }
    let mut a = Vec::with_capacity(n);
    let mut b = vec![b0];
    let mut prev = vec![0.0; nodes.len()];
    let mut cur = vec![1.0 / b0.sqrt(); nodes.len()];
    let mut next = vec![0.0; nodes.len()];
    for j in 0..n {
        let aj: f64 = nodes
            .iter()
            .zip(weights)
            .zip(&cur)
            .map(|((x, w), p)| w * x * p * p)
            .sum();
        let sb = if j == 0 { 0.0 } else { b[j].sqrt() };
        let mut norm = 0.0;
        let mut scale = 0.0;
        for i in 0..nodes.len() {
            let lead = (nodes[i] - aj) * cur[i];
            let q = lead - sb * prev[i];
            next[i] = q;
            norm += weights[i] * q * q;
            scale += weights[i] * lead * lead;
        }
        // Everything cancelled: the discrete measure has fewer than j+2 points.
        if !(norm > 1e-20 * scale) || !norm.is_finite() {
            return Err(Error::PositivityLost {
                index: j + 1,
                value: norm,
            });
        }
        let s = norm.sqrt();
        next.iter_mut().for_each(|q| *q /= s);
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        a.push(aj);
        b.push(norm);
    }
    Ok((a, b))
}

const STIELTJES_ORDER: usize = 16;
const STIELTJES_MAX_DOUBLINGS: usize = 12;

/// Recurrence coefficients for an arbitrary measure by the discretized
/// Stieltjes procedure. The composite Gauss mesh starts at `8(n+4)` nodes per
/// support piece and is doubled until no coefficient moves by more than
/// `1e-11` (relative to `max(1, |value|)`).
pub fn stieltjes(m: &Measure, n: usize) -> Result<OPSequence> {
    if n == 0 {
        return Err(Error::InvalidParameter("stieltjes needs n >= 1".into()));
    }
    let mut panels = (8 * (n + 4)).div_ceil(STIELTJES_ORDER);
    let rule = m.composite_rule(panels, STIELTJES_ORDER)?;
    let mut last = stieltjes_on_rule(&rule.nodes, &rule.weights, n)?;
    for _ in 0..STIELTJES_MAX_DOUBLINGS {
        panels *= 2;
        let rule = m.composite_rule(panels, STIELTJES_ORDER)?;
        let cur = stieltjes_on_rule(&rule.nodes, &rule.weights, n)?;
        let moved = |u: &[f64], v: &[f64]| {
            u.iter()
                .zip(v)
                .any(|(x, y)| (x - y).abs() > 1e-11 * x.abs().max(1.0))
        };
        let converged = !moved(&cur.0, &last.0) && !moved(&cur.1, &last.1);
        last = cur;
        if converged {
            return OPSequence::from_recurrence(last.0, last.1);
        }
    }
    Err(Error::MeshNotConverged(n))
}

/// Closed form when `m` is a classical weight on its full support,
/// otherwise the Stieltjes procedure.
pub fn for_measure(m: &Measure, n: usize) -> Result<OPSequence> {
    if m.is_classical_full() {
        match *m.weight() {
            Weight::Laguerre { alpha } => return laguerre_recurrence(alpha, n),
            Weight::Jacobi { a, b } => return jacobi_recurrence(a, b, n),
            Weight::Hermite => return hermite_recurrence(n),
            _ => {}
        }
    }
    stieltjes(m, n)
}

/// Orthonormal `p_j(x)`.
pub fn eval_orthonormal(ops: &OPSequence, j: usize, x: f64) -> Result<f64> {
    if j > ops.degree_bound() {
        return Err(Error::IndexOutOfRange {
            index: j,
            bound: ops.degree_bound(),
        });
    }
    let mut buf = vec![0.0; j + 1];
    ops.eval_into(x, &mut buf);
    Ok(buf[j])
}

/// `K_n(x, y) = Σ_{j<n} p_j(x) p_j(y)`.
pub fn cd_kernel(ops: &OPSequence, n: usize, x: f64, y: f64) -> Result<f64> {
    if n > ops.degree_bound() {
        return Err(Error::IndexOutOfRange {
            index: n,
            bound: ops.degree_bound(),
        });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let px = ops.eval_all(x, n - 1);
    let py = ops.eval_all(y, n - 1);
    Ok(px.iter().zip(&py).map(|(a, b)| a * b).sum())
}

/// Christoffel–Darboux ratio form
/// `(k_{n−1}/k_n)(p_n(x)p_{n−1}(y) − p_n(y)p_{n−1}(x))/(x − y)`; unstable
/// near the diagonal and used only as a cross-check.
pub fn cd_kernel_ratio(ops: &OPSequence, n: usize, x: f64, y: f64) -> Result<f64> {
    if n == 0 || n > ops.degree_bound() {
        return Err(Error::IndexOutOfRange {
            index: n,
            bound: ops.degree_bound(),
        });
    }
    if x == y {
        return Err(Error::InvalidParameter("ratio form undefined on the diagonal".into()));
    }
    let px = ops.eval_all(x, n);
    let py = ops.eval_all(y, n);
    Ok(ops.b[n].sqrt() * (px[n] * py[n - 1] - py[n] * px[n - 1]) / (x - y))
}
