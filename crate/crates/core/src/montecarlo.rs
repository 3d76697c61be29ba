//! Complex Wishart sampling at zero charge and empirical survival curves.

use nalgebra::{DMatrix, SymmetricTridiagonal};
#[cfg(test)]
use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Draws per stream in [`sample_many`]; fixes the split independently of
/// the thread count.
pub const CHUNK: usize = 1024;

const HERMITIAN_TOL: f64 = 1e-10;
/// QL sweeps allowed per eigenvalue.
const EIGEN_ITER_CAP: usize = 60;

/// Reproducible random stream keyed by `(seed, stream_id)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut r = ChaCha12Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_id);
        r
    }
}

/// Sorted eigenvalues of one draw of `AA*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSample {
    pub eigenvalues: Vec<f64>,
    pub n: usize,
    pub alpha: f64,
}

impl EnsembleSample {
    /// `λ_k`, 1-based.
    pub fn kth(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.eigenvalues.get(i).copied())
    }
}

/// `n × n` matrix with i.i.d. entries whose real and imaginary parts are
/// `N(0, 1/2)`, so the density of `A` is proportional to `exp(−Tr AA*)`.
pub fn sample_ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let sd = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(sd * re, sd * im)
    })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if !h.is_square() {
        return Err(Error::InvalidParameter(format!(
            "matrix is {}x{}, not square",
            h.nrows(),
            h.ncols()
        )));
    }
    let skew = (h - h.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if skew > HERMITIAN_TOL {
        return Err(Error::NotHermitian(skew));
    }
    let n = h.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![h[(0, 0)].re]);
    }
    let (d, e) = SymmetricTridiagonal::new(h.clone()).unpack_tridiagonal();
    let mut v = tridiagonal_eigenvalues(d.as_slice().to_vec(), e.as_slice().to_vec())?;
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Eigenvalues of the real symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e`, by implicit-shift QL.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, off: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    let mut e = off;
    e.resize(n, 0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > EIGEN_ITER_CAP {
                return Err(Error::IterationCap);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Eigenvalues of `AA*` for a fresh Ginibre `A`.
pub fn sample_wishart_eigs<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<EnsembleSample> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let a = sample_ginibre(n, rng);
    let m = &a * a.adjoint();
    // AA* is Hermitian up to roundoff in the products.
    let m = (&m + m.adjoint()).scale(0.5);
    let mut eigenvalues = hermitian_eigenvalues(&m)?;
    for v in eigenvalues.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(EnsembleSample {
        eigenvalues,
        n,
        alpha: 0.0,
    })
}

/// `draws` samples, split into streams of [`CHUNK`] draws sampled in
/// parallel and concatenated in stream order.
pub fn sample_many(n: usize, draws: usize, seed: u64) -> Result<Vec<EnsembleSample>> {
    let streams = draws.div_ceil(CHUNK);
    let chunks: Vec<Result<Vec<EnsembleSample>>> = (0..streams)
        .into_par_iter()
        .map(|sid| {
            let mut rng = RngStream::new(seed, sid as u64).rng();
            let count = CHUNK.min(draws - sid * CHUNK);
            (0..count).map(|_| sample_wishart_eigs(n, &mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(draws);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    pub s: f64,
    pub fraction: f64,
    pub lo95: f64,
    pub hi95: f64,
}

const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `hits` successes out of `total`.
pub fn wilson_interval(hits: usize, total: usize) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let n = total as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if hits == total { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Fraction of samples with `scale · λ_k ≥ s` at each grid point.
pub fn empirical_survival(
    samples: &[EnsembleSample],
    k: usize,
    scale: f64,
    s_grid: &[f64],
) -> Result<Vec<SurvivalPoint>> {
    let mut vals = Vec::with_capacity(samples.len());
    for smp in samples {
        let v = smp.kth(k).ok_or(Error::IndexOutOfRange {
            index: k,
            bound: smp.n,
        })?;
        vals.push(scale * v);
    }
    vals.sort_by(f64::total_cmp);
    let total = vals.len();
    Ok(s_grid
        .iter()
        .map(|&s| {
            let below = vals.partition_point(|&v| v < s);
            let hits = total - below;
            let (lo95, hi95) = wilson_interval(hits, total);
            SurvivalPoint {
                s,
                fraction: if total == 0 { 0.0 } else { hits as f64 / total as f64 },
                lo95,
                hi95,
            }
        })
        .collect())
}

/// `sup_s |empirical(s) − analytic(s)|` over the table's grid.
pub fn ks_distance<F: Fn(f64) -> f64>(table: &[SurvivalPoint], analytic: F) -> f64 {
    table
        .iter()
        .map(|p| (p.fraction - analytic(p.s)).abs())
        .fold(0.0, f64::max)
}
