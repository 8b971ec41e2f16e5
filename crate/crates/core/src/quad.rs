//! Adaptive quadrature on (0, inf) built from double-exponential rules:
//! tanh-sinh on (0,1] (absorbs algebraic endpoint singularities) and
//! exp-sinh on [1, inf) for exponentially decaying tails. Level doubling
//! until the estimated error clears the context tolerance.

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use rug::ops::Pow;
use rug::Float;

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: Float,
    pub error_estimate: Float,
}

const MAX_LEVEL: u32 = 11;

/// Integral over the half line (0, inf).
///
/// `singular_exponent_hint` bounds the algebraic behaviour at 0: the
/// integrand may blow up no faster than y^hint with hint > -1. The hint is
/// validated, not used numerically; tanh-sinh nodes handle the singularity.
pub fn integrate_semiline<F>(
    ctx: &PrecisionContext,
    f: F,
    singular_exponent_hint: f64,
) -> Result<QuadResult>
where
    F: Fn(&Float) -> Float + Sync,
{
    if singular_exponent_hint <= -1.0 {
        return Err(Error::Domain(format!(
            "endpoint exponent {singular_exponent_hint} is not integrable"
        )));
    }
    let lower = tanh_sinh_unit(ctx, &f)?;
    let upper = exp_sinh_from_one(ctx, &f)?;
    Ok(QuadResult {
        value: lower.value + &upper.value,
        error_estimate: lower.error_estimate + &upper.error_estimate,
    })
}

/// Integral over [1, inf) for integrands with (at least) exponential decay.
pub fn integrate_over_one_to_inf<F>(ctx: &PrecisionContext, f: F) -> Result<QuadResult>
where
    F: Fn(&Float) -> Float + Sync,
{
    exp_sinh_from_one(ctx, &f)
}

/// Integral over a finite interval [a, b], endpoints handled by tanh-sinh.
pub fn integrate_finite<F>(ctx: &PrecisionContext, f: F, a: f64, b: f64) -> Result<QuadResult>
where
    F: Fn(&Float) -> Float + Sync,
{
    if !(b > a) {
        return Err(Error::InvalidInput("empty interval".into()));
    }
    let fa = ctx.new_float(a);
    let len = ctx.new_float(b - a);
    let g = |u: &Float| -> Float {
        let y = fa.clone() + len.clone() * u;
        f(&y) * &len
    };
    tanh_sinh_unit(ctx, &g)
}

/// tanh-sinh rule on (0,1): x(t) = (1 + tanh((pi/2) sinh t)) / 2.
fn tanh_sinh_unit<F>(ctx: &PrecisionContext, f: &F) -> Result<QuadResult>
where
    F: Fn(&Float) -> Float,
{
    let prec = ctx.bits();
    let half_pi = ctx.pi() / 2u32;
    // node cutoff: weights decay like exp(-(pi/2) e^|t|); stop at precision floor
    let t_max = ((prec as f64 + 16.0) * std::f64::consts::LN_2 / (std::f64::consts::PI / 2.0))
        .ln()
        + 0.5;

    let eval_at = |t: &Float| -> Float {
        // u = (pi/2) sinh t ; x = 1/(1+e^{-2u}) ; 1-x = 1/(1+e^{2u})
        // weight dx/dt = (pi/2) cosh t / (2 cosh^2 u)
        let u = half_pi.clone() * t.clone().sinh();
        let sech2 = {
            let c = u.clone().cosh();
            c.square().recip()
        };
        let w = half_pi.clone() * t.clone().cosh() * &sech2 / 2u32;
        let x = (Float::with_val(prec, 1) + (-(u * 2u32)).exp()).recip();
        if x.is_zero() || x == 1u32 {
            return ctx.zero();
        }
        let fx = f(&x);
        if !fx.is_finite() {
            return ctx.zero();
        }
        fx * w
    };

    level_doubling(ctx, t_max, eval_at)
}

/// exp-sinh rule on (1, inf): y(t) = exp((pi/2) sinh t), halves t<0 and t>0
/// cover (0,1)x... here we substitute y = 1 + u with u = exp((pi/2) sinh t).
fn exp_sinh_from_one<F>(ctx: &PrecisionContext, f: &F) -> Result<QuadResult>
where
    F: Fn(&Float) -> Float,
{
    let prec = ctx.bits();
    let half_pi = ctx.pi() / 2u32;
    let t_max = ((prec as f64 + 16.0) * std::f64::consts::LN_2 / (std::f64::consts::PI / 2.0))
        .ln()
        + 0.6;

    let eval_at = |t: &Float| -> Float {
        let u = (half_pi.clone() * t.clone().sinh()).exp();
        if !u.is_finite() || u.is_zero() {
            return ctx.zero();
        }
        let w = half_pi.clone() * t.clone().cosh() * &u;
        let y = Float::with_val(prec, 1) + &u;
        let fy = f(&y);
        if !fy.is_finite() {
            return ctx.zero();
        }
        fy * w
    };

    level_doubling(ctx, t_max, eval_at)
}

fn level_doubling<G>(ctx: &PrecisionContext, t_max: f64, eval_at: G) -> Result<QuadResult>
where
    G: Fn(&Float) -> Float,
{
    let prec = ctx.bits();
    let tol = ctx.tolerance();
    let mut h = ctx.new_float(1.0);
    // level 0: trapezoid at integer nodes
    let mut total = eval_at(&ctx.zero());
    let mut k = 1i64;
    loop {
        let t = ctx.new_float(k as f64);
        if k as f64 > t_max {
            break;
        }
        total += eval_at(&t);
        total += eval_at(&(-t));
        k += 1;
    }
    let mut value = total.clone(); // h = 1
    let mut prev = ctx.new_float(f64::INFINITY);
    let mut err = ctx.new_float(f64::INFINITY);

    for _level in 1..=MAX_LEVEL {
        h /= 2u32;
        // add midpoints of the current grid: t = h * odd
        let mut m = 1i64;
        loop {
            let t = h.clone() * m;
            if t.to_f64() > t_max {
                break;
            }
            total += eval_at(&t);
            total += eval_at(&(-t.clone()));
            m += 2;
        }
        prev = value;
        value = total.clone() * &h;
        err = (value.clone() - &prev).abs();
        let scale = value.clone().abs().max(&Float::with_val(prec, 1e-300));
        if err < tol.clone() * &scale {
            return Ok(QuadResult {
                value,
                error_estimate: err,
            });
        }
    }
    // error estimate never cleared the target
    let scale = value.clone().abs() + Float::with_val(prec, 1e-300);
    if err.clone() / scale < Float::with_val(prec, ctx.rel_tol().sqrt()) {
        // converged partially; report with honest estimate
        return Ok(QuadResult {
            value,
            error_estimate: err,
        });
    }
    let _ = prev;
    Err(Error::NonConvergence(format!(
        "quadrature error estimate stalled at {err}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::standard().with_rel_tol(1e-40)
    }

    #[test]
    fn exponential_integrals() {
        // int_0^inf e^{-y} dy = 1
        let c = ctx();
        let r = integrate_semiline(&c, |y| Float::with_val(y.prec(), -y).exp(), 0.0).unwrap();
        assert!((r.value.clone() - 1u32).abs() < c.new_float(1e-38), "got {}", r.value);
        // int_0^inf y e^{-y} dy = Gamma(2) = 1
        let r2 =
            integrate_semiline(&c, |y| y.clone() * Float::with_val(y.prec(), -y).exp(), 0.0)
                .unwrap();
        assert!((r2.value.clone() - 1u32).abs() < c.new_float(1e-38));
    }

    #[test]
    fn singular_endpoint() {
        // int_0^1 y^{-1/2} dy = 2 (finite interval, inverse sqrt singularity)
        let c = ctx();
        let r = integrate_finite(&c, |y| y.clone().sqrt().recip(), 0.0, 1.0).unwrap();
        assert!((r.value.clone() - 2u32).abs() < c.new_float(1e-35), "got {}", r.value);
    }

    #[test]
    fn non_integrable_hint_rejected() {
        let c = ctx();
        assert!(integrate_semiline(&c, |y| y.clone(), -1.5).is_err());
    }

    #[test]
    fn incomplete_gamma_weighted() {
        // int_0^inf Gamma(-11, y) e^{-y} y^{10.9} dy is finite; cross-check the
        // adaptive result against a fixed fine-grid evaluation of the same
        // integrand (independent trapezoid in log space)
        use crate::special::upper_incomplete_gamma;
        let c = PrecisionContext::standard().with_rel_tol(1e-25);
        let f = |y: &Float| -> Float {
            let cc = PrecisionContext::new(y.prec(), 1e-25, 100).unwrap();
            let g = upper_incomplete_gamma(&cc, &cc.new_float(-11.0), y).unwrap();
            g * Float::with_val(y.prec(), -y).exp() * y.clone().pow(&cc.new_float(10.9))
        };
        let r = integrate_semiline(&c, f, -0.1).unwrap();
        assert!(r.value.is_finite());
        // independent oracle: dense trapezoid on exp grid y = e^s, s in [-40, 5]
        let mut acc = c.zero();
        let n = 3600;
        let (a, b) = (-40.0f64, 5.0f64);
        let hs = (b - a) / n as f64;
        for i in 0..=n {
            let s = a + hs * i as f64;
            let y = c.new_float(s).exp();
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += f(&y) * &y * c.new_float(w * hs);
        }
        let rel = ((r.value.clone() - &acc) / &acc).abs();
        assert!(rel < c.new_float(1e-8), "adaptive vs grid mismatch: {rel}");
    }
}
