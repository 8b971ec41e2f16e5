//! The symmetrized shifted convolution values by three routes: accelerated
//! direct summation, the mock-modular generating function, and regularized
//! holomorphic projection of the nonholomorphic product.

use crate::complex::BigComplex;
use crate::error::{Error, Result};
use crate::extrapolate::richardson_limit;
use crate::maass::HarmonicMaassForm;
use crate::modular::{tau_table_f64, CuspForm};
use crate::precision::PrecisionContext;
use crate::special::{factorial, gamma};
use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Direct,
    Mock,
    Projection,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Route::Direct => write!(f, "direct"),
            Route::Mock => write!(f, "mock"),
            Route::Projection => write!(f, "projection"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectScheme {
    Abel,
    Cesaro,
}

#[derive(Debug, Clone)]
pub struct ShiftedValue {
    pub h: u32,
    pub value: BigComplex,
    pub route: Route,
    pub error_estimate: f64,
    /// truncation settings that produced the value
    pub parameters: String,
}

fn sigma1(h: u64) -> i64 {
    let mut s = 0i64;
    let mut d = 1u64;
    while d * d <= h {
        if h % d == 0 {
            s += d as i64;
            let e = h / d;
            if e != d {
                s += e as i64;
            }
        }
        d += 1;
    }
    s
}

/// Direct symmetrized sum sum_n [a1(n+h) - a1(n-h)] a2(n) / n^{k-1},
/// Abel-accelerated (evaluate at k-1+eps, extrapolate to eps = 0) with an
/// independent Cesaro tail average; the inter-scheme spread is the error
/// estimate.
pub fn direct_dhat(
    ctx: &PrecisionContext,
    f1: &CuspForm,
    f2: &CuspForm,
    h: u32,
    n_terms: usize,
    scheme: DirectScheme,
) -> Result<ShiftedValue> {
    if n_terms < 10 * h as usize {
        return Err(Error::InvalidInput(format!(
            "direct sum needs at least 10 h = {} terms",
            10 * h
        )));
    }
    if f1.truncation_order() < (n_terms + h as usize) as i64
        || f2.truncation_order() < n_terms as i64
    {
        return Err(Error::Precision(format!(
            "direct sum needs {} coefficients of f1",
            n_terms + h as usize
        )));
    }
    if f1.fourier.is_zero() || f2.fourier.is_zero() {
        return Ok(ShiftedValue {
            h,
            value: BigComplex::zero(ctx),
            route: Route::Direct,
            error_estimate: 0.0,
            parameters: format!("N={n_terms} scheme=zero-form"),
        });
    }
    let k = f1.weight;
    let prec = ctx.bits();
    let epss = [0.2f64, 0.1, 0.05];

    // combined coefficient b(n) = [a1(n+h) - a1(n-h)] a2(n), exact
    let hh = h as i64;
    let bvals: Vec<(usize, Float)> = (1..=n_terms)
        .into_par_iter()
        .filter_map(|n| {
            let ni = n as i64;
            let up = f1.coeff(ni + hh).unwrap();
            let down = if ni - hh >= 1 {
                f1.coeff(ni - hh).unwrap()
            } else {
                rug::Integer::new()
            };
            let a2 = f2.coeff(ni).unwrap();
            let b = (up - down) * a2;
            if b == 0 {
                None
            } else {
                Some((n, Float::with_val(prec, b)))
            }
        })
        .collect();

    // abel: partial sums at shifted exponents, then Richardson to eps = 0
    let chunk = 4096usize;
    let abel_partials: Vec<[Float; 3]> = bvals
        .par_chunks(chunk)
        .map(|part| {
            let mut acc = [
                Float::new(prec),
                Float::new(prec),
                Float::new(prec),
            ];
            for (n, b) in part {
                let nf = Float::with_val(prec, *n as u64);
                let ln_n = nf.clone().ln();
                let base = nf.pow(-((k - 1) as i32));
                for (i, &e) in epss.iter().enumerate() {
                    let shift = (-(ln_n.clone() * Float::with_val(prec, e))).exp();
                    acc[i] += b.clone() * &base * shift;
                }
            }
            acc
        })
        .collect();
    let mut abel_sums = [Float::new(prec), Float::new(prec), Float::new(prec)];
    for part in &abel_partials {
        for i in 0..3 {
            abel_sums[i] += &part[i];
        }
    }
    let samples: Vec<(Float, Float)> = epss
        .iter()
        .zip(abel_sums.iter())
        .map(|(&e, v)| (ctx.new_float(e), v.clone()))
        .collect();
    let abel = richardson_limit(ctx, &samples)?;

    // cesaro: exact exponent k-1, tail partial sums averaged over (N/2, N]
    let half = n_terms / 2;
    let weight_den = (n_terms - half) as u64;
    let ces_partials: Vec<Float> = bvals
        .par_chunks(chunk)
        .map(|part| {
            let mut acc = Float::new(prec);
            for (n, b) in part {
                let t = b.clone() * Float::with_val(prec, *n as u64).pow(-((k - 1) as i32));
                if *n <= half {
                    acc += t;
                } else {
                    // S_M for M >= n contributes; averaged weight (N - n + 1)/(N - half)
                    let w = Float::with_val(prec, (n_terms - *n + 1) as u64)
                        / Float::with_val(prec, weight_den);
                    acc += t * w;
                }
            }
            acc
        })
        .collect();
    let mut cesaro = Float::new(prec);
    for p in &ces_partials {
        cesaro += p;
    }

    let spread = (abel.value.clone() - &cesaro).abs().to_f64();
    let scale = abel.value.clone().abs().to_f64().max(1e-300);
    if spread / scale > 0.05 {
        return Err(Error::NonConvergence(format!(
            "abel/cesaro disagree by {:.2}% at N={n_terms}",
            100.0 * spread / scale
        )));
    }
    let (value, err) = match scheme {
        DirectScheme::Abel => (
            abel.value.clone(),
            spread + abel.error_estimate.to_f64(),
        ),
        DirectScheme::Cesaro => (cesaro.clone(), spread),
    };
    Ok(ShiftedValue {
        h,
        value: BigComplex::from_real(value),
        route: Route::Direct,
        error_estimate: err,
        parameters: format!("N={n_terms} eps={epss:?} scheme={scheme:?}"),
    })
}

/// Mock-modular route: D(h) from the q^h coefficient of the mock-part /
/// cusp-form product, with the quasimodular weight-2 correction forced by
/// the vanishing constant term of the generating function.
///
/// The calibrated scale lambda fixes the shadow exactly; the generating
/// function identity holds for the rescaled mock form
/// (k-1)(4 pi)^{k-1} lambda Q+, which makes the h-th value
/// D(h) = lambda (4 pi)^{k-1}/(k-2)! ( [q^h](Q+ f2) - [q^h]E2 ).
pub fn mock_dhat(hmf: &HarmonicMaassForm, f2: &CuspForm, h: u32) -> Result<ShiftedValue> {
    let ctx = hmf.ctx().clone();
    let lam = hmf
        .calibration_lambda()
        .ok_or_else(|| Error::InvalidInput("mock route needs a calibrated form".into()))?;
    if f2.truncation_order() < (h + 1) as i64 {
        return Err(Error::Precision(format!(
            "mock route at h={h} needs {} coefficients of f2",
            h + 1
        )));
    }
    let needed: Vec<u32> = (1..h).collect();
    hmf.ensure_coeffs(&needed)?;
    let prec = ctx.bits();
    let mut conv = Float::new(prec);
    let mut tail_acc = 0.0f64;
    // j = h+1 pairs with the principal part coefficient 1
    conv += Float::with_val(prec, &f2.coeff((h + 1) as i64)?);
    // j = h pairs with chat(0)
    conv += hmf.raw_c0() * Float::with_val(prec, &f2.coeff(h as i64)?);
    for j in 1..h {
        let (cj, tl) = hmf.raw_poincare_coeff(h - j)?;
        let a2 = f2.coeff(j as i64)?;
        conv += cj * Float::with_val(prec, &a2);
        tail_acc += tl * a2.to_f64().abs();
    }
    let e2h = Float::with_val(prec, -24 * sigma1(h as u64));
    let pref = (ctx.pi() * 4u32).pow(hmf.shadow().weight - 1)
        / factorial(&ctx, hmf.shadow().weight - 2);
    let value = lam.scale(&((conv - e2h) * &pref));
    let err = tail_acc * pref.to_f64() * lam.abs().to_f64();
    Ok(ShiftedValue {
        h,
        value,
        route: Route::Mock,
        error_estimate: err,
        parameters: format!("coeffs<=|{}|", h.max(1) - 1),
    })
}

/// Per-term projection integral in closed form:
/// int_0^inf Gamma(k-1, 4 pi m y) e^{-4 pi h y} y^{-s} dy
///   = (k-2)! (4 pi (m+h))^{s-1} sum_{j=0}^{k-2} Gamma(j+1-s)/j! (m/(m+h))^j.
pub fn projection_term_closed(
    ctx: &PrecisionContext,
    k: u32,
    gamma_js: &[Float],
    m: u64,
    h: u32,
    s: &Float,
) -> Float {
    let prec = ctx.bits();
    let four_pi = ctx.pi() * 4u32;
    let mh = Float::with_val(prec, m + h as u64);
    let r = Float::with_val(prec, m) / &mh;
    let base = four_pi * mh;
    let powf = ((s.clone() - 1u32) * base.ln()).exp();
    let mut inner = Float::new(prec);
    let mut rj = Float::with_val(prec, 1);
    let mut jfact = Float::with_val(prec, 1);
    for j in 0..=(k - 2) {
        if j > 0 {
            rj *= &r;
            jfact *= j;
        }
        inner += gamma_js[j as usize].clone() * &rj / &jfact;
    }
    factorial(ctx, k - 2) * powf * inner
}

/// Same integral by adaptive quadrature; used to validate the closed form.
pub fn projection_term_quadrature(
    ctx: &PrecisionContext,
    k: u32,
    m: u64,
    h: u32,
    s: f64,
) -> Result<Float> {
    let four_pi = ctx.pi() * 4u32;
    let fm = four_pi.clone() * ctx.new_float(m as f64);
    let fh = four_pi * ctx.new_float(h as f64);
    let r = crate::quad::integrate_semiline(
        ctx,
        move |y: &Float| {
            let prec = y.prec();
            let g = crate::special::upper_gamma_posint(prec, k - 1, &(fm.clone() * y));
            let e = (-(fh.clone() * y)).exp();
            let ys = (-(Float::with_val(prec, s) * y.clone().ln())).exp();
            g * e * ys
        },
        -s,
    )?;
    Ok(r.value)
}

/// Regularized holomorphic projection route. The h-th coefficient of the
/// projected nonholomorphic product recovers the shifted value through
/// D(h) = -(4 pi)^{k-1}/(k-2)! lim_{s->0} (4 pi h) sum_m c^-(m) a2(h+m) I_m(s).
///
/// The m-sum converges conditionally, so the tail is summed with a cosine
/// taper over the second half of the range; the regularization limit is
/// taken by Richardson extrapolation over geometrically decreasing s.
pub fn projection_dhat(
    hmf: &HarmonicMaassForm,
    f2: &CuspForm,
    h: u32,
    m_max: Option<usize>,
    s_samples: Option<&[f64]>,
) -> Result<ShiftedValue> {
    let ctx = hmf.ctx().clone();
    let k = hmf.shadow().weight;
    let prec = ctx.bits();
    let m_max = m_max.unwrap_or_else(|| 200usize.max(20 * h as usize));
    let default_s = [0.02f64, 0.01, 0.005];
    let svals: &[f64] = s_samples.unwrap_or(&default_s);
    if svals.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 regularization samples".into()));
    }
    // exact head at working precision, f64 beyond
    let head = 2000usize.min(m_max);
    if f2.truncation_order() < (head + h as usize) as i64 {
        return Err(Error::Precision(format!(
            "projection route needs {} exact coefficients of f2",
            head + h as usize
        )));
    }
    if hmf.shadow().truncation_order() < head as i64 {
        return Err(Error::Precision("projection route shadow too short".into()));
    }
    let tau_f = tau_table_f64(m_max + h as usize + 2);

    let four_pi = (ctx.pi() * 4u32).to_f64();
    let four_pi_pow = (ctx.pi() * 4u32).pow(k - 1);
    let taper = |m: usize, m_cut: usize| -> f64 {
        if m <= m_cut / 2 {
            1.0
        } else {
            let t = (m - m_cut / 2) as f64 / (m_cut - m_cut / 2) as f64;
            0.5 * (1.0 + (std::f64::consts::PI * t).cos())
        }
    };

    let eval_at = |s: f64, cutoff: usize| -> Result<Float> {
        let sf = ctx.new_float(s);
        let mut gamma_js: Vec<Float> = Vec::with_capacity((k - 1) as usize);
        for j in 0..=(k - 2) {
            gamma_js.push(gamma(&ctx, &(ctx.new_float(j as f64 + 1.0) - &sf))?);
        }
        let gamma_js_f64: Vec<f64> = gamma_js.iter().map(|g| g.to_f64()).collect();
        let mut acc = Float::new(prec);
        let head_c = head.min(cutoff);
        for m in 1..=head_c {
            let a2 = f2.coeff((h as i64) + m as i64)?;
            let a1 = hmf.shadow().coeff(m as i64)?;
            if a2 == 0 || a1 == 0 {
                continue;
            }
            // c^-(m) = -a1(m)/((4pi)^{k-1} m^{k-1})
            let cm = -(Float::with_val(prec, &a1)
                / (four_pi_pow.clone() * Float::with_val(prec, m as u64).pow(k - 1)));
            let im = projection_term_closed(&ctx, k, &gamma_js, m as u64, h, &sf);
            let w = ctx.new_float(taper(m, cutoff));
            acc += cm * Float::with_val(prec, &a2) * im * w;
        }
        // f64 tail: conditionally convergent remainder, noise floor ~1e-13
        let mut tail = 0.0f64;
        let lg_k2: f64 = factorial(&ctx, k - 2).to_f64();
        for m in (head_c + 1)..=cutoff {
            let t1 = tau_f[m];
            let t2 = tau_f[m + h as usize];
            if t1 == 0.0 || t2 == 0.0 {
                continue;
            }
            let mf = m as f64;
            let mh = mf + h as f64;
            let cm = -t1 / (four_pi.powi((k - 1) as i32) * mf.powi((k - 1) as i32));
            let r = mf / mh;
            let mut inner = 0.0f64;
            let mut rj = 1.0f64;
            let mut jf = 1.0f64;
            for j in 0..=(k - 2) as usize {
                if j > 0 {
                    rj *= r;
                    jf *= j as f64;
                }
                inner += gamma_js_f64[j] * rj / jf;
            }
            let im = lg_k2 * (four_pi * mh).powf(s - 1.0) * inner;
            tail += cm * t2 * im * taper(m, cutoff);
        }
        acc += ctx.new_float(tail);
        Ok(acc)
    };

    let pref = -(ctx.pi() * 4u32).pow(k - 1) / factorial(&ctx, k - 2)
        * (ctx.pi() * 4u32)
        * ctx.new_float(h as f64);
    let mut samples: Vec<(Float, Float)> = Vec::new();
    for &s in svals {
        let v = eval_at(s, m_max)?;
        samples.push((ctx.new_float(s), v * &pref));
    }
    samples.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let lim = richardson_limit(&ctx, &samples)?;

    // m-truncation error: rerun the mid sample with a half-length taper
    let mid_s = svals[svals.len() / 2];
    let half_val = eval_at(mid_s, m_max / 2)? * &pref;
    let full_val = samples
        .iter()
        .find(|(s, _)| (s.to_f64() - mid_s).abs() < 1e-15)
        .map(|(_, v)| v.clone())
        .unwrap_or_else(|| samples[samples.len() / 2].1.clone());
    let trunc_err = (half_val - full_val).abs().to_f64();

    Ok(ShiftedValue {
        h,
        value: BigComplex::from_real(lim.value),
        route: Route::Projection,
        error_estimate: trunc_err + lim.error_estimate.to_f64(),
        parameters: format!("m_max={m_max} s={svals:?}"),
    })
}

/// Generating function through q^H: coefficient(h) = mock-route value.
pub fn generating_function(
    hmf: &HarmonicMaassForm,
    f2: &CuspForm,
    h_max: u32,
) -> Result<crate::qseries::QSeries<BigComplex>> {
    let mut m = BTreeMap::new();
    for h in 1..=h_max {
        let v = mock_dhat(hmf, f2, h)?;
        m.insert(h as i64, v.value);
    }
    crate::qseries::QSeries::new(m, h_max as i64)
}

/// Least-squares slope of log|D| against log h with its standard error.
pub fn growth_fit(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("growth fit needs >= 2 points".into()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(h, _)| h.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.abs().max(1e-300).ln()).collect();
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("degenerate abscissas".into()));
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let resid: f64 = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| {
            let fit = ybar + slope * (x - xbar);
            (y - fit).powi(2)
        })
        .sum();
    let dof = (points.len().max(3) - 2) as f64;
    let stderr = (resid / dof / sxx).sqrt();
    Ok((slope, stderr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::delta_expansion;

    #[test]
    fn sigma_values() {
        assert_eq!(sigma1(1), 1);
        assert_eq!(sigma1(6), 12);
        assert_eq!(sigma1(10), 18);
        assert_eq!(sigma1(100), 217);
    }

    #[test]
    fn direct_zero_form() {
        let ctx = PrecisionContext::standard();
        let d = delta_expansion(600).unwrap();
        let zero = CuspForm {
            weight: 12,
            fourier: crate::qseries::QSeries::zero(),
        };
        let v = direct_dhat(&ctx, &zero, &d, 3, 500, DirectScheme::Abel).unwrap();
        assert!(v.value.abs().to_f64() == 0.0);
    }

    #[test]
    fn direct_requires_enough_terms() {
        let ctx = PrecisionContext::standard();
        let d = delta_expansion(600).unwrap();
        assert!(direct_dhat(&ctx, &d, &d, 60, 500, DirectScheme::Abel).is_err());
    }

    #[test]
    fn growth_fit_basics() {
        // exact power law
        let pts: Vec<(f64, f64)> = [10.0, 30.0, 100.0, 300.0]
            .iter()
            .map(|&h: &f64| (h, 3.0 * h.powf(5.2)))
            .collect();
        let (slope, err) = growth_fit(&pts).unwrap();
        assert!((slope - 5.2).abs() < 1e-9);
        assert!(err < 1e-9);
        // constant sequence: slope 0
        let flat: Vec<(f64, f64)> = [10.0, 100.0, 1000.0].iter().map(|&h| (h, 7.0)).collect();
        let (s0, _) = growth_fit(&flat).unwrap();
        assert!(s0.abs() < 1e-12);
    }

    #[test]
    fn projection_closed_form_vs_quadrature() {
        let ctx = PrecisionContext::standard().with_rel_tol(1e-25);
        let s = 0.25f64;
        let sf = ctx.new_float(s);
        let mut gamma_js = Vec::new();
        for j in 0..=10u32 {
            gamma_js.push(gamma(&ctx, &(ctx.new_float(j as f64 + 1.0) - &sf)).unwrap());
        }
        for &(m, h) in &[(1u64, 1u32), (3, 2), (10, 1)] {
            let cf = projection_term_closed(&ctx, 12, &gamma_js, m, h, &sf);
            let q = projection_term_quadrature(&ctx, 12, m, h, s).unwrap();
            let rel = ((cf.clone() - &q) / &q).abs();
            assert!(
                rel < ctx.new_float(1e-20),
                "closed form vs quadrature at m={m} h={h}: {rel}"
            );
        }
    }
}
