//! Gap probabilities, Janossy densities, particle counts and order
//! statistics of a finite-rank determinantal ensemble.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Matrix4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biortho::{self, BiorthoSystem};
use crate::error::{Error, Result};
use crate::measure::Region;

/// Probabilities below this magnitude are reported as zero.
pub const CLAMP: f64 = 1e-12;

/// Gauss points per dimension for the order-statistic densities.
pub const DENSITY_POINTS: usize = 48;

/// Largest `k` handled by [`kth_particle_density`].
pub const MAX_DENSITY_K: usize = 4;

/// `q_k = Pr(exactly k particles in I)`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountDistribution {
    pub region: String,
    pub probabilities: Vec<f64>,
}

impl CountDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, k: usize) -> f64 {
        self.probabilities.get(k).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Expected number of particles in the region.
    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, q)| k as f64 * q)
            .sum()
    }

    /// `Pr(N_I < k)`.
    pub fn fewer_than(&self, k: usize) -> f64 {
        self.probabilities.iter().take(k).sum()
    }
}

fn det_complement(g: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    if n == 0 {
        return 1.0;
    }
    (DMatrix::<f64>::identity(n, n) - g).determinant()
}

/// `det(M) det(L(x_i, x_j))` as the bordered determinant
/// `det [[Mᵀ, −Vᵀ], [U, 0]]` with `M = Id − G`, `U_ia = ξ_a(x_i)`,
/// `V_ib = η_b(x_i)`. Finite even when `M` is singular.
fn bordered(sys: &BiorthoSystem, g: &DMatrix<f64>, points: &[f64]) -> f64 {
    let n = g.nrows();
    let k = points.len();
    let mut big = DMatrix::<f64>::zeros(n + k, n + k);
    let mt = (DMatrix::<f64>::identity(n, n) - g).transpose();
    big.view_mut((0, 0), (n, n)).copy_from(&mt);
    let mut buf = vec![0.0; n];
    for (i, &x) in points.iter().enumerate() {
        sys.eta().eval_into(x, &mut buf);
        for b in 0..n {
            big[(b, n + i)] = -buf[b];
        }
        sys.xi().eval_into(x, &mut buf);
        for a in 0..n {
            big[(n + i, a)] = buf[a];
        }
    }
    big.determinant()
}

/// `det(Id − K_I) = det(Id − G_I)`.
pub fn fredholm_det(sys: &BiorthoSystem, region: &Region) -> Result<f64> {
    Ok(det_complement(&sys.gram_on(region)?))
}

/// `det(Id − G_I) · det(L_I(x_i, x_j))`, a density with respect to the
/// product of the ensemble's measure.
pub fn janossy_density(sys: &BiorthoSystem, region: &Region, points: &[f64]) -> Result<f64> {
    if points.len() > sys.len() {
        return Err(Error::IndexOutOfRange {
            index: points.len(),
            bound: sys.len(),
        });
    }
    if let Some(&x) = points.iter().find(|&&x| !region.contains(x)) {
        return Err(Error::InvalidParameter(format!(
            "point {x} lies outside the region {region}"
        )));
    }
    let g = sys.gram_on(region)?;
    let c = det_complement(&g);
    if points.is_empty() {
        return Ok(c);
    }
    match biortho::resolvent_from_gram(sys, &g) {
        Ok(l) => Ok(c * l.matrix(points).determinant()),
        Err(Error::ResolventMissing) => Ok(bordered(sys, &g, points)),
        Err(e) => Err(e),
    }
}

/// Coefficients of `z ↦ det(Id + (z − 1) G)`, read off from its values on
/// the `n + 1` roots of unity.
pub fn count_distribution_from_gram(g: &DMatrix<f64>, region: &Region) -> CountDistribution {
    let n = g.nrows();
    let m = n + 1;
    let gc = g.map(|v| Complex64::new(v, 0.0));
    let id = DMatrix::<Complex64>::identity(n, n);
    let values: Vec<Complex64> = (0..m)
        .map(|j| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
            if n == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                (&id + &gc * (z - 1.0)).determinant()
            }
        })
        .collect();
    let probabilities = (0..m)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let angle = -2.0 * PI * ((j * k) % m) as f64 / m as f64;
                acc += v * Complex64::from_polar(1.0, angle);
            }
            let q = acc.re / m as f64;
            if q.abs() < CLAMP {
                0.0
            } else {
                q
            }
        })
        .collect();
    CountDistribution {
        region: region.to_string(),
        probabilities,
    }
}

pub fn count_distribution(sys: &BiorthoSystem, region: &Region) -> Result<CountDistribution> {
    Ok(count_distribution_from_gram(&sys.gram_on(region)?, region))
}

fn check_k(sys: &BiorthoSystem, k: usize) -> Result<()> {
    if k == 0 || k > sys.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            bound: sys.len(),
        });
    }
    Ok(())
}

/// `Pr(λ_k ≥ s) = Σ_{j<k} q_j` for the region `(−∞, s)` within the support.
pub fn kth_particle_survival(sys: &BiorthoSystem, k: usize, s: f64) -> Result<f64> {
    check_k(sys, k)?;
    let region = Region::below(s);
    if k == 1 {
        return fredholm_det(sys, &region);
    }
    Ok(count_distribution(sys, &region)?.fewer_than(k))
}

/// Density of `λ_k` at `s` with respect to Lebesgue measure:
/// `ω(s) det(Id − G_I) / (k−1)! ∫_{I^{k−1}} det L_I(x_i, x_j) dμ^{k−1}`
/// with `x_k = s` and `I = (−∞, s)`.
pub fn kth_particle_density(sys: &BiorthoSystem, k: usize, s: f64) -> Result<f64> {
    check_k(sys, k)?;
    if k > MAX_DENSITY_K {
        return Err(Error::QuadratureDimension {
            k,
            max: MAX_DENSITY_K,
        });
    }
    let w = sys.measure().density(s);
    if w == 0.0 {
        return Ok(0.0);
    }
    let region = Region::below(s);
    let g = sys.gram_on(&region)?;
    let c = det_complement(&g);
    let l = match biortho::resolvent_from_gram(sys, &g) {
        Ok(l) => l,
        Err(Error::ResolventMissing) => return density_bordered(sys, &g, k, s, w),
        Err(e) => return Err(e),
    };
    if k == 1 {
        return Ok(w * c * l.eval(s, s));
    }
    let inner = sys.measure().on(&region);
    if inner.support().is_empty() {
        return Ok(0.0);
    }
    let rule = inner.gauss_rule(DENSITY_POINTS)?;
    let q = rule.len();
    let mut pts = rule.nodes.clone();
    pts.push(s);
    let lm = l.matrix(&pts);
    let wt = &rule.weights;
    let integral = match k {
        2 => (0..q)
            .map(|i| wt[i] * (lm[(i, i)] * lm[(q, q)] - lm[(i, q)] * lm[(q, i)]))
            .sum::<f64>(),
        3 => {
            let rows: Vec<f64> = (0..q)
                .into_par_iter()
                .map(|i| {
                    let mut acc = 0.0;
                    for j in 0..q {
                        let idx = [i, j, q];
                        let m = Matrix3::from_fn(|r, c| lm[(idx[r], idx[c])]);
                        acc += wt[j] * m.determinant();
                    }
                    wt[i] * acc
                })
                .collect();
            rows.iter().sum::<f64>() / 2.0
        }
        _ => {
            let rows: Vec<f64> = (0..q)
                .into_par_iter()
                .map(|i| {
                    let mut acc = 0.0;
                    for j in 0..q {
                        let mut inner_acc = 0.0;
                        for h in 0..q {
                            let idx = [i, j, h, q];
                            let m = Matrix4::from_fn(|r, c| lm[(idx[r], idx[c])]);
                            inner_acc += wt[h] * m.determinant();
                        }
                        acc += wt[j] * inner_acc;
                    }
                    wt[i] * acc
                })
                .collect();
            rows.iter().sum::<f64>() / 6.0
        }
    };
    Ok(w * c * integral)
}

fn density_bordered(sys: &BiorthoSystem, g: &DMatrix<f64>, k: usize, s: f64, w: f64) -> Result<f64> {
    if k == 1 {
        return Ok(w * bordered(sys, g, &[s]));
    }
    let inner = sys.measure().on(&Region::below(s));
    let rule = inner.gauss_rule(DENSITY_POINTS)?;
    let q = rule.len();
    let dims = k - 1;
    let total = q.pow(dims as u32);
    let parts: Vec<f64> = (0..q)
        .into_par_iter()
        .map(|outer| {
            let per = total / q;
            let mut acc = 0.0;
            let mut pts = vec![0.0; k];
            for rest in 0..per {
                let mut idx = rest;
                let mut wprod = rule.weights[outer];
                pts[0] = rule.nodes[outer];
                for p in pts.iter_mut().take(dims).skip(1) {
                    let i = idx % q;
                    idx /= q;
                    *p = rule.nodes[i];
                    wprod *= rule.weights[i];
                }
                pts[dims] = s;
                acc += wprod * bordered(sys, g, &pts);
            }
            acc
        })
        .collect();
    let fact: f64 = (1..k).map(|j| j as f64).product();
    Ok(w * parts.iter().sum::<f64>() / fact)
}
