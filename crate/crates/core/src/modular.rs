//! Level-1 classical objects: the discriminant cusp form and its exact
//! coefficients, Eisenstein series E2/E4/E6, and the completed E2*.

use crate::complex::BigComplex;
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use crate::qseries::{Growth, QSeries};
use rayon::prelude::*;
use rug::{Float, Integer};
use std::collections::BTreeMap;

/// Weight-k cusp form with exact integer Fourier coefficients, a(0) = 0.
#[derive(Debug, Clone)]
pub struct CuspForm {
    pub weight: u32,
    pub fourier: QSeries<Integer>,
}

impl CuspForm {
    /// Exact coefficient a(n); zero outside the stored range, error past the
    /// truncation order.
    pub fn coeff(&self, n: i64) -> Result<Integer> {
        Ok(self
            .fourier
            .coefficient(n)?
            .cloned()
            .unwrap_or_else(Integer::new))
    }

    pub fn truncation_order(&self) -> i64 {
        self.fourier.truncation_order()
    }

    pub fn evaluate(&self, ctx: &PrecisionContext, tau: &BigComplex) -> Result<BigComplex> {
        let (v, _) = self.fourier.to_complex_series(ctx).evaluate(
            ctx,
            tau,
            // Deligne-scale bound |a(n)| <= d(n) n^{(k-1)/2}
            Growth::Polynomial((self.weight as f64 - 1.0) / 2.0 + 1.1),
        )?;
        Ok(v)
    }
}

/// Eisenstein series of weight 2, 4 or 6, constant term 1, exact coefficients.
#[derive(Debug, Clone)]
pub struct EisensteinSeries {
    pub weight: u32,
    pub fourier: QSeries<Integer>,
}

impl EisensteinSeries {
    pub fn coeff(&self, n: i64) -> Result<Integer> {
        Ok(self
            .fourier
            .coefficient(n)?
            .cloned()
            .unwrap_or_else(Integer::new))
    }

    pub fn evaluate(&self, ctx: &PrecisionContext, tau: &BigComplex) -> Result<BigComplex> {
        let (v, _) = self.fourier.to_complex_series(ctx).evaluate(
            ctx,
            tau,
            Growth::Polynomial(self.weight as f64),
        )?;
        Ok(v)
    }
}

/// Sparse expansion of eta(tau)^3 / q^{1/8} = sum_j (-1)^j (2j+1) q^{j(j+1)/2}.
fn eta_cube_terms(n_max: i64) -> Vec<(i64, i64)> {
    let mut t = Vec::new();
    let mut j: i64 = 0;
    while j * (j + 1) / 2 <= n_max {
        t.push((j * (j + 1) / 2, if j % 2 == 0 { 2 * j + 1 } else { -(2 * j + 1) }));
        j += 1;
    }
    t
}

/// tau(n) for n = 1..=n_max as i128, via eight sparse multiplications by the
/// eta-cube series. Overflow-checked; the Deligne bound keeps everything
/// inside i128 for n_max <= ~2e5 with a wide margin.
pub fn tau_table_i128(n_max: usize) -> Result<Vec<i128>> {
    if n_max > 300_000 {
        return Err(Error::OutOfRange(
            "exact i128 tau table limited to n <= 300000".into(),
        ));
    }
    let nn = n_max as i64;
    let terms = eta_cube_terms(nn);
    let mut a = vec![0i128; n_max];
    a[0] = 1;
    for _ in 0..8 {
        let mut b = vec![0i128; n_max];
        for &(e, c) in &terms {
            let e = e as usize;
            if e >= n_max {
                break;
            }
            let c = c as i128;
            for i in 0..(n_max - e) {
                let v = a[i];
                if v != 0 {
                    b[i + e] = b[i + e]
                        .checked_add(
                            c.checked_mul(v)
                                .ok_or_else(|| Error::Overflow("tau ladder".into()))?,
                        )
                        .ok_or_else(|| Error::Overflow("tau ladder".into()))?;
                }
            }
        }
        a = b;
    }
    // tau(n) = a[n-1]
    let mut out = vec![0i128; n_max + 1];
    out[1..=n_max].copy_from_slice(&a[..n_max]);
    Ok(out)
}

/// tau(n) in f64, for deep tails where exact integers are unnecessary.
/// Deterministic (fixed summation order, rayon chunks recompute identically).
pub fn tau_table_f64(n_max: usize) -> Vec<f64> {
    let nn = n_max as i64;
    let terms = eta_cube_terms(nn);
    let mut a = vec![0f64; n_max];
    a[0] = 1.0;
    for _ in 0..8 {
        let mut b = vec![0f64; n_max];
        let chunk = 65536usize;
        b.par_chunks_mut(chunk).enumerate().for_each(|(ci, out)| {
            let lo = ci * chunk;
            for &(e, c) in &terms {
                let e = e as usize;
                if e >= lo + out.len() {
                    break;
                }
                let c = c as f64;
                let start = lo.max(e);
                for i in start..lo + out.len() {
                    let s = a[i - e];
                    if s != 0.0 {
                        out[i - lo] += c * s;
                    }
                }
            }
        });
        a = b;
    }
    let mut out = vec![0f64; n_max + 1];
    out[1..=n_max].copy_from_slice(&a[..n_max]);
    out
}

/// q prod (1-q^n)^24 expanded exactly through q^N.
pub fn delta_expansion(n_terms: usize) -> Result<CuspForm> {
    let tau = tau_table_i128(n_terms)?;
    let mut m: BTreeMap<i64, Integer> = BTreeMap::new();
    for n in 1..=n_terms {
        if tau[n] != 0 {
            m.insert(n as i64, Integer::from(tau[n]));
        }
    }
    Ok(CuspForm {
        weight: 12,
        fourier: QSeries::new(m, n_terms as i64)?,
    })
}

/// Divisor power sums sigma_k(n) for n <= n_max, by sieve, exact.
fn sigma_table(k: u32, n_max: usize) -> Vec<Integer> {
    let mut s = vec![Integer::new(); n_max + 1];
    for d in 1..=n_max {
        let dk = Integer::from(d).pow(k);
        let mut m = d;
        while m <= n_max {
            s[m] += &dk;
            m += d;
        }
    }
    s
}

/// Exact divisor-sum expansion of E2, E4 or E6 through q^N.
pub fn eisenstein(weight: u32, n_terms: usize) -> Result<EisensteinSeries> {
    let (power, scale): (u32, i64) = match weight {
        2 => (1, -24),
        4 => (3, 240),
        6 => (5, -504),
        _ => {
            return Err(Error::InvalidInput(format!(
                "eisenstein weight must be 2, 4 or 6, got {weight}"
            )))
        }
    };
    let sig = sigma_table(power, n_terms);
    let mut m: BTreeMap<i64, Integer> = BTreeMap::new();
    m.insert(0, Integer::from(1));
    for n in 1..=n_terms {
        m.insert(n as i64, sig[n].clone() * Integer::from(scale));
    }
    Ok(EisensteinSeries {
        weight,
        fourier: QSeries::new(m, n_terms as i64)?,
    })
}

/// Completed weight-2 series E2*(tau) = E2(tau) - 3 / (pi Im tau).
pub fn e2_star(ctx: &PrecisionContext, tau: &BigComplex, n_terms: usize) -> Result<BigComplex> {
    let e2 = eisenstein(2, n_terms)?;
    let mut v = e2.evaluate(ctx, tau)?;
    let corr = Float::with_val(ctx.bits(), 3) / (ctx.pi() * &tau.im);
    v.re -= corr;
    Ok(v)
}
