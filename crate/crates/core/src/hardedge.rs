//! Bessel kernel of the hard edge, its shifted resolvent at zero charge, and
//! the limiting laws of the smallest particles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{gauss_legendre, Measure, Region};

pub use crate::special::{bessel_i, bessel_j, bessel_j_derivative, gamma as gamma_fn};

/// Series terms below this size (relative to the largest) end the sum.
pub const SERIES_EPS: f64 = 1e-16;
pub const SERIES_CAP: usize = 200;

/// Gauss points in `√τ` for the integral form.
const INTEGRAL_POINTS: usize = 64;

/// Gauss points per dimension for the limiting order-statistic laws.
pub const LIMIT_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BesselForm {
    Series,
    Cd,
    Integral,
}

impl fmt::Display for BesselForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BesselForm::Series => "series",
            BesselForm::Cd => "cd",
            BesselForm::Integral => "integral",
        })
    }
}

impl FromStr for BesselForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "series" => Ok(BesselForm::Series),
            "cd" => Ok(BesselForm::Cd),
            "integral" => Ok(BesselForm::Integral),
            other => Err(Error::Parse(format!("unknown kernel form `{other}`"))),
        }
    }
}

/// `K^(α)` on the positive half line (all reals through the series when
/// `α = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselKernel {
    alpha: f64,
}

impl BesselKernel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must exceed -1, got {alpha}"
            )));
        }
        Ok(BesselKernel { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eval(&self, x: f64, y: f64, form: BesselForm) -> Result<f64> {
        match form {
            BesselForm::Series => self.series(x, y),
            BesselForm::Cd => self.cd(x, y),
            BesselForm::Integral => self.integral(x, y),
        }
    }

    fn series_coefficients(&self, x: f64) -> Result<Vec<f64>> {
        let a = self.alpha;
        if x < 0.0 && a != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "series at negative argument {x} needs alpha = 0"
            )));
        }
        let lead = if a == 0.0 {
            1.0
        } else {
            x.powf(a / 2.0)
        };
        let mut t = lead / gamma_fn(a + 1.0)?;
        let mut out = Vec::with_capacity(32);
        let mut peak: f64 = 0.0;
        for k in 0..SERIES_CAP {
            out.push(t);
            peak = peak.max(t.abs());
            if !t.is_finite() {
                return Err(Error::SeriesDiverged { terms: k });
            }
            if (k as f64) > x.abs() && t.abs() <= SERIES_EPS * peak {
                return Ok(out);
            }
            let k1 = (k + 1) as f64;
            t *= -x / (k1 * (a + k1));
        }
        Err(Error::SeriesDiverged { terms: SERIES_CAP })
    }

    fn series(&self, x: f64, y: f64) -> Result<f64> {
        let s = self.series_coefficients(x)?;
        let t = self.series_coefficients(y)?;
        let a = self.alpha;
        let mut sum = 0.0;
        for (k, sk) in s.iter().enumerate() {
            let mut inner = 0.0;
            for (l, tl) in t.iter().enumerate() {
                inner += tl / (a + (k + l) as f64 + 1.0);
            }
            sum += sk * inner;
        }
        Ok(sum)
    }

    fn require_positive(x: f64, y: f64) -> Result<()> {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "closed forms need x, y > 0, got ({x}, {y})"
            )));
        }
        Ok(())
    }

    fn cd(&self, x: f64, y: f64) -> Result<f64> {
        Self::require_positive(x, y)?;
        let a = self.alpha;
        let (zx, zy) = (2.0 * x.sqrt(), 2.0 * y.sqrt());
        let (jx, jy) = (bessel_j(a, zx)?, bessel_j(a, zy)?);
        let dx = (a / zx) * jx - bessel_j(a + 1.0, zx)?;
        if x == y {
            return Ok(dx * dx + (1.0 - a * a / (zx * zx)) * jx * jx);
        }
        let dy = (a / zy) * jy - bessel_j(a + 1.0, zy)?;
        Ok((jx * y.sqrt() * dy - jy * x.sqrt() * dx) / (x - y))
    }

    fn integral(&self, x: f64, y: f64) -> Result<f64> {
        Self::require_positive(x, y)?;
        let rule = gauss_legendre(INTEGRAL_POINTS)?.mapped(0.0, 1.0);
        let nu = self.alpha;
        let (rx, ry) = (2.0 * x.sqrt(), 2.0 * y.sqrt());
        let mut sum = 0.0;
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            sum += w * 2.0 * u * bessel_j(nu, u * rx)? * bessel_j(nu, u * ry)?;
        }
        Ok(sum)
    }
}

/// Series form of `K^(α)`.
pub fn bessel_kernel(alpha: f64, x: f64, y: f64, form: BesselForm) -> Result<f64> {
    BesselKernel::new(alpha)?.eval(x, y, form)
}

/// `K^(0)(x − s, y − s)`, the resolvent kernel of `K^(0)` restricted to `(0, s)`.
pub fn shifted_resolvent(s: f64, x: f64, y: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("s must be positive, got {s}")));
    }
    for v in [x, y] {
        if !(0.0..=s).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "argument {v} outside (0, {s})"
            )));
        }
    }
    BesselKernel { alpha: 0.0 }.series(x - s, y - s)
}

fn check_s(s: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "s must be finite and nonnegative, got {s}"
        )));
    }
    Ok(())
}

/// `lim Pr(n λ_1 ≥ s) = e^{-s}`.
pub fn limit_smallest_survival(s: f64) -> Result<f64> {
    check_s(s)?;
    Ok((-s).exp())
}

/// `½ ∫_0^{2√s} x (I_0(x)² − I_1(x)²) dx`.
pub fn bessel_i_mass(s: f64) -> Result<f64> {
    check_s(s)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let m = Measure::lebesgue(Region::interval(0.0, 2.0 * s.sqrt()))?;
    let f = |x: f64| {
        let i0 = bessel_i(0.0, x).unwrap_or(f64::NAN);
        let i1 = bessel_i(1.0, x).unwrap_or(f64::NAN);
        0.5 * x * (i0 - i1) * (i0 + i1)
    };
    // Scale the tolerance with the size of the integrand at the right end.
    let scale = f(2.0 * s.sqrt()).abs().max(1.0) * s.sqrt();
    m.integrate(f, 1e-13 * scale)
}

/// `∫_0^s K^(0)(−x, −x) dx` through the series form.
pub fn diagonal_mass(s: f64) -> Result<f64> {
    check_s(s)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let k = BesselKernel { alpha: 0.0 };
    let rule = gauss_legendre(LIMIT_POINTS)?.mapped(-s, 0.0);
    let mut sum = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        sum += w * k.series(x, x)?;
    }
    Ok(sum)
}

/// `lim Pr(exactly one particle of n λ in (0, s)) = e^{-s}/2 ∫_0^{2√s} x (I_0² − I_1²) dx`.
pub fn limit_exactly_one(s: f64) -> Result<f64> {
    Ok((-s).exp() * bessel_i_mass(s)?)
}

/// `lim Pr(n λ_2 ≥ s) = e^{-s} (1 + ½ ∫_0^{2√s} x (I_0² − I_1²) dx)`.
pub fn limit_second_survival(s: f64) -> Result<f64> {
    Ok((-s).exp() * (1.0 + bessel_i_mass(s)?))
}

/// `lim Pr(n λ_k ≥ s) = e^{-s} Σ_{j<k} (1/j!) ∫_{(−s,0)^j} det K^(0)(x_i, x_j) dx`
/// for `k ∈ {1, 2, 3}`.
pub fn limit_kth_survival(k: usize, s: f64) -> Result<f64> {
    check_s(s)?;
    if !(1..=3).contains(&k) {
        return Err(Error::OrderOutOfRange(k));
    }
    let e = (-s).exp();
    if k == 1 || s == 0.0 {
        return Ok(e);
    }
    let kern = BesselKernel { alpha: 0.0 };
    let rule = gauss_legendre(LIMIT_POINTS)?.mapped(-s, 0.0);
    let q = rule.len();
    let mut km = vec![0.0; q * q];
    for i in 0..q {
        for j in i..q {
            let v = kern.series(rule.nodes[i], rule.nodes[j])?;
            km[i * q + j] = v;
            km[j * q + i] = v;
        }
    }
    let w = &rule.weights;
    let mut total = 1.0;
    total += (0..q).map(|i| w[i] * km[i * q + i]).sum::<f64>();
    if k == 3 {
        let mut two = 0.0;
        for i in 0..q {
            let mut row = 0.0;
            for j in 0..q {
                row += w[j] * (km[i * q + i] * km[j * q + j] - km[i * q + j] * km[j * q + i]);
            }
            two += w[i] * row;
        }
        total += two / 2.0;
    }
    Ok(e * total)
}
