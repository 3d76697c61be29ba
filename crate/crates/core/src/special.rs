//! Gamma and Bessel functions of real argument.
//!
//! `J_ν` uses the power series up to [`X_SWITCH`], Miller's backward
//! recurrence with Neumann-series normalization on the intermediate range,
//! and the Hankel asymptotic expansion once `x > max(25, ν²)`. `I_ν` has no
//! cancellation in its series, which is used up to `x = 30`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Crossover between the power series and the large-argument methods for `J_ν`.
pub const X_SWITCH: f64 = 12.0;

const I_OVERFLOW_GUARD: f64 = 700.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Γ(x)`; poles at nonpositive integers return an error.
pub fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(Error::InvalidParameter(format!("gamma pole at {x}")));
    }
    if x.fract() == 0.0 && x <= 171.0 {
        let mut f = 1.0;
        for k in 2..(x as u32) {
            f *= k as f64;
        }
        return Ok(f);
    }
    if x < 0.5 {
        return Ok(PI / ((PI * x).sin() * gamma(1.0 - x)?));
    }
    if x > 171.7 {
        return Ok(f64::INFINITY);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let series = lanczos_series(z);
    // t^{z+1/2} split in two to postpone overflow.
    let half = t.powf(0.5 * (z + 0.5));
    Ok((2.0 * PI).sqrt() * half * half * (-t).exp() * series)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_series(z).ln())
}

fn lanczos_series(z: f64) -> f64 {
    let mut s = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (z + i as f64);
    }
    s
}

/// `(x/2)^ν / Γ(ν+1)`, the leading series term, without intermediate overflow.
fn leading_term(nu: f64, x: f64) -> Result<f64> {
    if nu == 0.0 {
        return Ok(1.0);
    }
    if nu < 150.0 {
        Ok((0.5 * x).powf(nu) / gamma(nu + 1.0)?)
    } else {
        Ok((nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)?).exp())
    }
}

/// Bessel function of the first kind `J_ν(x)` for `ν ≥ 0`, `x ≥ 0`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(nu >= 0.0) {
        return Err(Error::InvalidParameter(format!("bessel_j order must be >= 0, got {nu}")));
    }
    if x < 0.0 {
        // Integer orders extend by parity.
        if nu.fract() == 0.0 {
            let v = bessel_j(nu, -x)?;
            return Ok(if (nu as u64).is_multiple_of(2) { v } else { -v });
        }
        return Err(Error::InvalidParameter(format!(
            "bessel_j of fractional order needs x >= 0, got {x}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::OverflowGuard(x));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x <= X_SWITCH {
        j_series(nu, x)
    } else if x > 25.0 && x > nu * nu {
        Ok(j_asymptotic(nu, x))
    } else {
        j_miller(nu, x)
    }
}

fn j_series(nu: f64, x: f64) -> Result<f64> {
    let q = 0.25 * x * x;
    let mut term = leading_term(nu, x)?;
    let mut sum = term;
    let mut peak = term.abs();
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + nu));
        sum += term;
        peak = peak.max(term.abs());
        if term.abs() <= 1e-17 * peak && k > 0.5 * x {
            return Ok(sum);
        }
        if k > 500.0 {
            return Err(Error::SeriesDiverged { terms: 500 });
        }
    }
}

/// Hankel expansion coefficients iterated as `t_k = a_k(ν) / x^k`.
fn hankel_terms(nu: f64, x: f64, mut visit: impl FnMut(usize, f64)) {
    let mu = 4.0 * nu * nu;
    let mut t = 1.0;
    let mut prev = f64::INFINITY;
    visit(0, t);
    for k in 1..200usize {
        let odd = (2 * k - 1) as f64;
        t *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if t.abs() >= prev.abs() && k > 2 {
            break;
        }
        visit(k, t);
        if t.abs() < 1e-17 {
            break;
        }
        prev = t;
    }
}

fn j_asymptotic(nu: f64, x: f64) -> f64 {
    let mut p = 0.0;
    let mut q = 0.0;
    hankel_terms(nu, x, |k, t| {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
    });
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn j_miller(nu: f64, x: f64) -> Result<f64> {
    let m = nu.floor() as usize;
    let mu = nu - m as f64;
    let start = {
        let s = x.ceil() as usize + m + 60;
        s + (s % 2)
    };
    let mut next = 0.0; // J_{μ+k+1}
    let mut cur = 1e-30; // J_{μ+k}
    let mut target = 0.0;
    let mut norm = 0.0;
    // g_j = Γ(μ+j)/j!, c_j = (μ+2j) g_j, c_0 = Γ(μ+1)
    let gamma_mu1 = gamma(mu + 1.0)?;
    let coef = |j: usize| -> f64 {
        if j == 0 {
            return gamma_mu1;
        }
        let mut g = gamma_mu1; // g_1 = Γ(μ+1)/1!
        for i in 1..j {
            g *= (mu + i as f64) / (i as f64 + 1.0);
        }
        (mu + 2.0 * j as f64) * g
    };
    let mut k = start;
    loop {
        if k == m {
            target = cur;
        }
        if k % 2 == 0 {
            norm += coef(k / 2) * cur;
        }
        if k == 0 {
            break;
        }
        let prev = 2.0 * (mu + k as f64) / x * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            target *= 1e-250;
            norm *= 1e-250;
        }
    }
    let scale = (0.5 * x).powf(mu) / norm;
    Ok(target * scale)
}

/// `J_ν'(x) = (ν/x) J_ν(x) − J_{ν+1}(x)`; at `x = 0` the limit is used.
pub fn bessel_j_derivative(nu: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(if nu == 1.0 {
            0.5
        } else if nu == 0.0 || nu > 1.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    Ok(nu / x * bessel_j(nu, x)? - bessel_j(nu + 1.0, x)?)
}

/// Modified Bessel function `I_ν(x)` for `ν ≥ 0`, `0 ≤ x ≤ 700`.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    if !(nu >= 0.0) {
        return Err(Error::InvalidParameter(format!("bessel_i order must be >= 0, got {nu}")));
    }
    if x < 0.0 {
        if nu.fract() == 0.0 {
            let v = bessel_i(nu, -x)?;
            return Ok(if (nu as u64).is_multiple_of(2) { v } else { -v });
        }
        return Err(Error::InvalidParameter(format!(
            "bessel_i of fractional order needs x >= 0, got {x}"
        )));
    }
    if !(x <= I_OVERFLOW_GUARD) {
        return Err(Error::OverflowGuard(x));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x <= 30.0 || x < nu * nu {
        let q = 0.25 * x * x;
        let mut term = leading_term(nu, x)?;
        let mut sum = term;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= q / (k * (k + nu));
            sum += term;
            if term <= 1e-17 * sum && k > 0.5 * x {
                return Ok(sum);
            }
            if k > 2000.0 {
                return Err(Error::SeriesDiverged { terms: 2000 });
            }
        }
    }
    let mut s = 0.0;
    hankel_terms(nu, x, |k, t| {
        s += if k % 2 == 0 { t } else { -t };
    });
    Ok(x.exp() / (2.0 * PI * x).sqrt() * s)
}
