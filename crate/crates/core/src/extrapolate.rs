//! Richardson extrapolation of regularization-parameter limits s -> 0.

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use rug::Float;

#[derive(Debug, Clone)]
pub struct Extrapolated {
    pub value: Float,
    pub error_estimate: Float,
}

/// Polynomial extrapolation of samples (s_i, f(s_i)) to s = 0.
///
/// Requires at least three samples at positive, strictly decreasing s
/// (geometric spacing works best). Errors out when the extrapolants stop
/// contracting, which signals a pole or noise floor instead of a limit.
pub fn richardson_limit(ctx: &PrecisionContext, samples: &[(Float, Float)]) -> Result<Extrapolated> {
    if samples.len() < 3 {
        return Err(Error::InvalidInput(
            "richardson_limit needs at least 3 samples".into(),
        ));
    }
    for w in samples.windows(2) {
        if !(w[0].0 > w[1].0 && w[1].0 > 0) {
            return Err(Error::InvalidInput(
                "samples must have strictly decreasing positive s".into(),
            ));
        }
    }
    let n = samples.len();
    let xs: Vec<Float> = samples.iter().map(|(s, _)| s.clone()).collect();
    // Neville tableau evaluated at s = 0
    let mut tab: Vec<Float> = samples.iter().map(|(_, v)| v.clone()).collect();
    let mut diag = vec![tab[0].clone()];
    for j in 1..n {
        for i in (j..n).rev() {
            // T[i,j] = (x[i-j] T[i,j-1] - x[i] T[i-1,j-1]) / (x[i-j] - x[i])
            let num = xs[i - j].clone() * &tab[i] - xs[i].clone() * &tab[i - 1];
            let den = xs[i - j].clone() - &xs[i];
            tab[i] = num / den;
        }
        diag.push(tab[n - 1].clone());
    }
    // contraction check along the diagonal
    let last = diag[n - 1].clone();
    let d_last = (diag[n - 1].clone() - &diag[n - 2]).abs();
    let scale = last.clone().abs().max(&ctx.new_float(1e-300));
    if n >= 4 {
        let d_prev = (diag[n - 2].clone() - &diag[n - 3]).abs();
        let floor = ctx.tolerance() * &scale;
        if d_last > d_prev && d_last.clone() / &scale > ctx.new_float(ctx.rel_tol().sqrt()) {
            let _ = floor;
            return Err(Error::Divergence(format!(
                "extrapolants widened: |d_k|={d_last} > |d_(k-1)|={d_prev}"
            )));
        }
    }
    Ok(Extrapolated {
        value: last,
        error_estimate: d_last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::standard()
    }

    fn samples(ctx: &PrecisionContext, f: impl Fn(f64) -> f64, ss: &[f64]) -> Vec<(Float, Float)> {
        ss.iter()
            .map(|&s| (ctx.new_float(s), ctx.new_float(f(s))))
            .collect()
    }

    #[test]
    fn linear_is_exact() {
        let c = ctx();
        let sm = samples(&c, |s| 1.0 + s, &[0.2, 0.1, 0.05]);
        let r = richardson_limit(&c, &sm).unwrap();
        assert!((r.value - 1u32).abs() < c.new_float(1e-25));
    }

    #[test]
    fn exp_limit_contracts() {
        let c = ctx();
        let sm = samples(&c, |s| s.exp(), &[0.2, 0.1, 0.05, 0.025, 0.0125]);
        let r = richardson_limit(&c, &sm).unwrap();
        assert!((r.value - 1u32).abs() < c.new_float(1e-8));
        assert!(r.error_estimate < c.new_float(1e-5));
    }

    #[test]
    fn constant_samples() {
        let c = ctx();
        let sm = samples(&c, |_| 42.0, &[0.4, 0.2, 0.1]);
        let r = richardson_limit(&c, &sm).unwrap();
        assert!((r.value - c.new_float(42.0)).abs() < c.new_float(1e-100));
    }

    #[test]
    fn pole_diverges() {
        // f(s) = 1/s has no limit; extrapolants widen
        let c = ctx();
        let sm = samples(&c, |s| 1.0 / s, &[0.2, 0.1, 0.05, 0.025, 0.0125]);
        assert!(richardson_limit(&c, &sm).is_err());
    }

    #[test]
    fn input_validation() {
        let c = ctx();
        let sm = samples(&c, |s| s, &[0.2, 0.1]);
        assert!(richardson_limit(&c, &sm).is_err());
        let bad = samples(&c, |s| s, &[0.1, 0.2, 0.4]);
        assert!(richardson_limit(&c, &bad).is_err());
    }
}
