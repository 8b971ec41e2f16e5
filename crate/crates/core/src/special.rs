//! Special functions at arbitrary precision: Euler gamma, the exponential
//! integral E1, upper incomplete gamma (including negative integer order),
//! and the modified Bessel function I_nu.

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};

/// Euler gamma function. Errors on poles (non-positive integers).
pub fn gamma(ctx: &PrecisionContext, a: &Float) -> Result<Float> {
    if a.is_integer() && *a <= 0 {
        return Err(Error::Pole(format!("gamma pole at {a}")));
    }
    let mut v = Float::with_val(ctx.bits(), a);
    v.gamma_mut();
    Ok(v)
}

pub fn factorial(ctx: &PrecisionContext, n: u32) -> Float {
    Float::with_val(ctx.bits(), Integer::from(Integer::factorial(n)))
}

pub fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(n).binomial(k)
}

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0.
///
/// Power series with cancellation guard bits for small x, continued
/// fraction (modified Lentz) for large x.
pub fn exp_integral_e1(ctx: &PrecisionContext, x: &Float) -> Result<Float> {
    if !(x.is_finite() && x.is_sign_positive() && !x.is_zero()) {
        return Err(Error::Domain(format!("E1 requires x > 0, got {x}")));
    }
    let xf = x.to_f64();
    if xf <= 44.0 {
        e1_series(ctx, x)
    } else {
        e1_continued_fraction(ctx, x)
    }
}

fn e1_series(ctx: &PrecisionContext, x: &Float) -> Result<Float> {
    // E1(x) = -euler - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
    // alternating terms peak near e^x, so carry guard bits for the cancellation
    let guard = (1.45 * x.to_f64()).ceil() as u32 + 64;
    let prec = ctx.bits() + guard;
    let xx = Float::with_val(prec, x);
    let mut sum = Float::with_val(prec, 0);
    let mut term = Float::with_val(prec, 1);
    let eps = Float::with_val(prec, 2f64).pow(-((ctx.bits() + 32) as i32));
    let mut k: u32 = 1;
    loop {
        term *= &xx;
        term /= k;
        let contrib = term.clone() / k;
        if k % 2 == 1 {
            sum += &contrib;
        } else {
            sum -= &contrib;
        }
        if k > 4 && contrib.clone().abs() < eps && xx.clone() / (k + 1) < 1 {
            break;
        }
        k += 1;
        if k > 100_000 {
            return Err(Error::NonConvergence("E1 series did not terminate".into()));
        }
    }
    let euler = Float::with_val(prec, Constant::Euler);
    let v = sum - euler - xx.ln();
    Ok(Float::with_val(ctx.bits(), v))
}

fn e1_continued_fraction(ctx: &PrecisionContext, x: &Float) -> Result<Float> {
    // E1(x) = e^{-x} / (x+1 - 1^2/(x+3 - 2^2/(x+5 - ...)))
    let prec = ctx.bits() + 32;
    let xx = Float::with_val(prec, x);
    let tiny = Float::with_val(prec, 2f64).pow(-(4 * prec as i32));
    let eps = Float::with_val(prec, 2f64).pow(-((prec - 8) as i32));
    let mut f = xx.clone() + 1u32;
    if f.is_zero() {
        f = tiny.clone();
    }
    let mut c = f.clone();
    let mut d = Float::with_val(prec, 0);
    for k in 2..200_000u64 {
        let a = Float::with_val(prec, -(((k - 1) * (k - 1)) as i64));
        let b = xx.clone() + (2 * k - 1);
        d = b.clone() + a.clone() * d;
        if d.is_zero() {
            d = tiny.clone();
        }
        d = d.recip();
        c = b + a / c;
        if c.is_zero() {
            c = tiny.clone();
        }
        let delta = c.clone() * &d;
        f *= &delta;
        if (delta - 1u32).abs() < eps {
            let v = (-xx).exp() / f;
            return Ok(Float::with_val(ctx.bits(), v));
        }
    }
    Err(Error::NonConvergence(
        "E1 continued fraction stalled".into(),
    ))
}

/// Upper incomplete gamma for positive integer order: elementary closed form
/// Gamma(j, x) = (j-1)! e^{-x} sum_{i<j} x^i/i!.
pub fn upper_gamma_posint(prec: u32, j: u32, x: &Float) -> Float {
    let mut s = Float::with_val(prec, 1);
    let mut t = Float::with_val(prec, 1);
    for i in 1..j {
        t *= x;
        t /= i;
        s += &t;
    }
    let fact = Float::with_val(prec, Integer::from(Integer::factorial(j - 1)));
    s * fact * Float::with_val(prec, -x).exp()
}

/// Upper incomplete gamma Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt, x > 0.
///
/// Negative integer orders go by downward recurrence from Gamma(0,x) = E1(x),
/// positive integer orders use the elementary closed form, everything else
/// is delegated to MPFR.
pub fn upper_incomplete_gamma(ctx: &PrecisionContext, a: &Float, x: &Float) -> Result<Float> {
    if !(x.is_finite() && x.is_sign_positive() && !x.is_zero()) {
        return Err(Error::Domain(format!(
            "upper incomplete gamma requires x > 0, got {x}"
        )));
    }
    if a.is_integer() {
        let ai = a
            .to_integer()
            .and_then(|z| z.to_i64())
            .ok_or_else(|| Error::OutOfRange("integer order too large".into()))?;
        if ai > 0 {
            if ai > 100_000 {
                return Err(Error::OutOfRange("integer order too large".into()));
            }
            return Ok(upper_gamma_posint(ctx.bits(), ai as u32, x));
        }
        // a <= 0: downward recurrence; each division by t loses ~log2(x) bits
        let m = (-ai) as u32;
        let guard = ((m + 1) as f64 * x.to_f64().max(2.0).log2()).ceil() as u32 + 64;
        let prec = ctx.bits() + guard;
        let gctx = PrecisionContext::new(prec, ctx.rel_tol(), ctx.series_truncation_default())?;
        let xx = Float::with_val(prec, x);
        let emx = Float::with_val(prec, -&xx).exp();
        let mut g = exp_integral_e1(&gctx, &xx)?; // Gamma(0, x)
        let mut xpow = xx.clone().recip(); // x^{-t} running power
        for t in 1..=m {
            // Gamma(-t, x) = (Gamma(-t+1, x) - x^{-t} e^{-x}) / (-t)
            let num = g - xpow.clone() * &emx;
            g = num / -(Float::with_val(prec, t));
            xpow /= &xx;
        }
        return Ok(Float::with_val(ctx.bits(), g));
    }
    let v = Float::with_val(ctx.bits(), a).gamma_inc(&Float::with_val(ctx.bits(), x));
    Ok(v)
}

/// Modified Bessel function of the first kind, integer order, x > 0.
/// Ascending series with a rigorous geometric tail bound.
pub fn bessel_i(ctx: &PrecisionContext, nu: u32, x: &Float) -> Result<Float> {
    if !(x.is_finite() && x.is_sign_positive() && !x.is_zero()) {
        return Err(Error::Domain(format!("bessel_i requires x > 0, got {x}")));
    }
    let prec = ctx.bits() + 32;
    let half = Float::with_val(prec, x) / 2u32;
    let q = half.clone().square(); // x^2/4
    // leading term (x/2)^nu / nu!
    let mut term = half.pow(nu)
        / Float::with_val(prec, Integer::from(Integer::factorial(nu)));
    if !term.is_finite() {
        return Err(Error::Overflow("bessel_i leading term overflow".into()));
    }
    let mut sum = term.clone();
    let eps = Float::with_val(prec, 2f64).pow(-((ctx.bits() + 16) as i32));
    for j in 1u64..1_000_000 {
        term *= &q;
        term /= Float::with_val(prec, j * (j + nu as u64));
        sum += &term;
        if !sum.is_finite() {
            return Err(Error::Overflow("bessel_i overflow".into()));
        }
        // ratio of consecutive terms
        let r = q.clone() / Float::with_val(prec, (j + 1) * (j + 1 + nu as u64));
        if r < 0.5f64 {
            // tail < term * r/(1-r)
            let tail = term.clone() * r.clone() / (Float::with_val(prec, 1) - &r);
            if tail < eps.clone() * sum.clone().abs() {
                break;
            }
        }
    }
    Ok(Float::with_val(ctx.bits(), sum))
}
