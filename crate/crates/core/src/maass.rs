//! The weight 2-k harmonic lift of the discriminant form: Kloosterman sums,
//! Maass-Poincare holomorphic-part coefficients, the nonholomorphic part
//! determined by the shadow, scale calibration through twisted-L period
//! polynomials, and period functions by two evaluation routes.

use crate::complex::BigComplex;
use crate::error::{Error, Result};
use crate::modular::CuspForm;
use crate::periods::{additive_twist, GL2Matrix};
use crate::precision::PrecisionContext;
use crate::special::{bessel_i, factorial, upper_gamma_posint};
use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;
use std::collections::BTreeMap;
use std::sync::RwLock;

/// K(m, n; c) = sum over d mod c, gcd(d,c)=1 of e((m d + n d*)/c).
pub fn kloosterman(ctx: &PrecisionContext, m: i64, n: i64, c: u64) -> BigComplex {
    if c == 1 {
        return BigComplex::one(ctx);
    }
    let table = roots_of_unity(ctx, c);
    let mut re = ctx.zero();
    let mut im = ctx.zero();
    for d in 1..c {
        if gcd_u(d, c) != 1 {
            continue;
        }
        let dbar = mod_inverse_u(d, c);
        let idx = (mul_mod(m.rem_euclid(c as i64) as u64, d, c)
            + mul_mod(n.rem_euclid(c as i64) as u64, dbar, c))
            % c;
        re += &table[idx as usize].0;
        im += &table[idx as usize].1;
    }
    BigComplex::new(re, im)
}

/// (cos, sin)(2 pi j / c) for j = 0..c, by repeated multiplication with the
/// primitive root; rounding drift stays far below working precision.
fn roots_of_unity(ctx: &PrecisionContext, c: u64) -> Vec<(Float, Float)> {
    let theta = ctx.pi() * 2u32 / ctx.new_float(c as f64);
    let zeta = BigComplex::cis(&theta);
    let mut out = Vec::with_capacity(c as usize);
    let mut cur = BigComplex::one(ctx);
    for _ in 0..c {
        out.push((cur.re.clone(), cur.im.clone()));
        cur = &cur * &zeta;
    }
    out
}

fn gcd_u(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

fn mod_inverse_u(d: u64, c: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (c as i128, d as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(c as i128) as u64
}

fn mul_mod(a: u64, b: u64, c: u64) -> u64 {
    ((a as u128 * b as u128) % c as u128) as u64
}

/// Trivial-bound tail constant: terms past C are below B0 * C^{-11} with
/// B0 = 2.6 pi (2 pi)^{k-1} / (k-1)!, so the tail is below 12.4 * C^{-10}.
const TAIL_C0_OVER_10: f64 = 12.4;

fn tail_bound(c_stop: u64) -> f64 {
    TAIL_C0_OVER_10 * (c_stop as f64).powi(-10)
}

/// Weight 2-k harmonic Maass form whose shadow is the given cusp form.
///
/// Holds the raw Kloosterman-Bessel coefficients of the unit-normalized
/// holomorphic part Q+ (principal part q^{-1}), the analytic n = 0 limit
/// coefficient, and after calibration the scalar lambda with
/// M+ = lambda * Q+ the mock form whose shadow is exactly the stored form.
pub struct HarmonicMaassForm {
    ctx: PrecisionContext,
    shadow: CuspForm,
    c_max: u64,
    raw: RwLock<BTreeMap<u32, Float>>,
    tail: RwLock<BTreeMap<u32, f64>>,
    c0: RwLock<Option<Float>>,
    lambda: RwLock<Option<BigComplex>>,
}

impl HarmonicMaassForm {
    pub fn new(ctx: PrecisionContext, shadow: CuspForm, c_max: u64) -> Self {
        Self {
            ctx,
            shadow,
            c_max,
            raw: RwLock::new(BTreeMap::new()),
            tail: RwLock::new(BTreeMap::new()),
            c0: RwLock::new(None),
            lambda: RwLock::new(None),
        }
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn shadow(&self) -> &CuspForm {
        &self.shadow
    }

    pub fn weight(&self) -> i32 {
        2 - self.shadow.weight as i32
    }

    pub fn calibration_lambda(&self) -> Option<BigComplex> {
        self.lambda.read().unwrap().clone()
    }

    pub fn set_lambda(&self, lam: BigComplex) {
        *self.lambda.write().unwrap() = Some(lam);
    }

    /// Snapshot of the raw coefficient cache (for persistence).
    pub fn export_raw(&self) -> Vec<(u32, Float, f64)> {
        let raw = self.raw.read().unwrap();
        let tails = self.tail.read().unwrap();
        raw.iter()
            .map(|(&n, v)| (n, v.clone(), tails.get(&n).copied().unwrap_or(f64::NAN)))
            .collect()
    }

    /// Seed the coefficient cache (from persistence). Entries must come from
    /// an identical (precision, c_max) computation to stay bit-faithful.
    pub fn seed_raw(&self, entries: Vec<(u32, Float, f64)>) {
        let mut raw = self.raw.write().unwrap();
        let mut tails = self.tail.write().unwrap();
        for (n, v, t) in entries {
            raw.insert(n, v);
            tails.insert(n, t);
        }
    }

    pub fn set_c0(&self, v: Float) {
        *self.c0.write().unwrap() = Some(v);
    }

    pub fn c_max(&self) -> u64 {
        self.c_max
    }

    /// c^-(n) = -a(n) / ((4 pi)^{k-1} n^{k-1}); the shadow relation inverted.
    pub fn c_minus(&self, n: u32) -> Result<Float> {
        let k = self.shadow.weight;
        let prec = self.ctx.bits();
        let a = self.shadow.coeff(n as i64)?;
        let den = (self.ctx.pi() * 4u32).pow(k - 1) * Float::with_val(prec, n).pow(k - 1);
        Ok(-(Float::with_val(prec, &a) / den))
    }

    /// Raw Kloosterman-Bessel coefficient
    /// chat+(n) = -2 pi n^{-(k-1)/2} sum_{c <= c_max} K(-1,n;c)/c I_{k-1}(4 pi sqrt n / c)
    /// together with the reported truncation tail bound. The sum is cut as
    /// soon as the trivial-bound tail clears the context tail target.
    pub fn raw_poincare_coeff(&self, n: u32) -> Result<(Float, f64)> {
        self.ensure_coeffs(&[n])?;
        let raw = self.raw.read().unwrap();
        let tails = self.tail.read().unwrap();
        Ok((raw[&n].clone(), tails[&n]))
    }

    /// n = 0 coefficient: the n -> 0 limit of the same series,
    /// chat+(0) = -(2 pi)^k/(k-1)! sum_c K(-1,0;c)/c^k.
    pub fn raw_c0(&self) -> Float {
        if let Some(v) = self.c0.read().unwrap().clone() {
            return v;
        }
        let ctx = &self.ctx;
        let k = self.shadow.weight;
        // terms fall like c^{1-k}; the trivial bound clears 1e-40 by c ~ 8000^(1/11)
        let stop = ((1.0 / ctx.tail_epsilon()).powf(1.0 / (k as f64 - 1.0)).ceil() as u64 + 8)
            .min(self.c_max);
        let mut s = ctx.zero();
        for c in 1..=stop {
            let kl = kloosterman(ctx, -1, 0, c);
            s += kl.re / Float::with_val(ctx.bits(), c).pow(k);
        }
        let v = -(ctx.pi() * 2u32).pow(k) / factorial(ctx, k - 1) * s;
        *self.c0.write().unwrap() = Some(v.clone());
        v
    }

    /// Batch-compute raw coefficients for every requested index (plus cache).
    /// Work is organized c-outer / n-inner so each modulus builds its root
    /// table and coprime inverses once; per-n accumulation order over c is
    /// fixed, keeping results bit-identical regardless of thread count.
    pub fn ensure_coeffs(&self, ns: &[u32]) -> Result<()> {
        let missing: Vec<u32> = {
            let raw = self.raw.read().unwrap();
            ns.iter().copied().filter(|n| !raw.contains_key(n)).collect()
        };
        if missing.is_empty() {
            return Ok(());
        }
        let ctx = &self.ctx;
        let k = self.shadow.weight;
        let prec = ctx.bits();
        let eps = ctx.tail_epsilon();
        let four_pi = ctx.pi() * 4u32;

        // per-n stopping modulus
        let stops: Vec<u64> = missing
            .iter()
            .map(|&n| {
                let bessel_edge = (4.0 * std::f64::consts::PI * (n as f64).sqrt()).ceil() as u64 + 2;
                let tail_edge = (TAIL_C0_OVER_10 / eps).powf(0.1).ceil() as u64;
                bessel_edge.max(tail_edge).max(16).min(self.c_max)
            })
            .collect();
        let c_stop_global = stops.iter().copied().max().unwrap();

        let sqrt_n: Vec<Float> = missing
            .iter()
            .map(|&n| Float::with_val(prec, n).sqrt())
            .collect();
        let mut acc: Vec<Float> = vec![ctx.zero(); missing.len()];

        for c in 1..=c_stop_global {
            // coprime residues with inverses
            let pairs: Vec<(u64, u64)> = if c == 1 {
                Vec::new()
            } else {
                (1..c)
                    .filter(|&d| gcd_u(d, c) == 1)
                    .map(|d| (d, mod_inverse_u(d, c)))
                    .collect()
            };
            let cos_table: Vec<Float> = if c == 1 {
                vec![ctx.one()]
            } else {
                roots_of_unity(ctx, c).into_iter().map(|(re, _)| re).collect()
            };
            let cf = Float::with_val(prec, c);
            acc.par_iter_mut().enumerate().for_each(|(i, a)| {
                let n = missing[i];
                if c > stops[i] {
                    return;
                }
                // K(-1, n; c), real by the d <-> -d pairing
                let mut kr = ctx.zero();
                if c == 1 {
                    kr += 1u32;
                } else {
                    let nm = (n as u64) % c;
                    for &(d, dbar) in &pairs {
                        let idx = (mul_mod(nm, dbar, c) + (c - d)) % c;
                        kr += &cos_table[idx as usize];
                    }
                }
                if kr.is_zero() {
                    return;
                }
                let z = four_pi.clone() * &sqrt_n[i] / &cf;
                let bess = bessel_i(ctx, k - 1, &z).expect("bessel in range");
                *a += kr / &cf * bess;
            });
        }

        let mut raw = self.raw.write().unwrap();
        let mut tails = self.tail.write().unwrap();
        for (i, &n) in missing.iter().enumerate() {
            let pref = -(ctx.pi() * 2u32) * Float::with_val(prec, n).pow(-((k as i32 - 1)))
                .sqrt();
            // n^{-(k-1)/2} = sqrt(n^{-(k-1)})
            let v = pref * &acc[i];
            raw.insert(n, v);
            tails.insert(n, tail_bound(stops[i]));
        }
        Ok(())
    }

    /// Q+(tau) of the raw series: q^{-1} + chat(0) + sum chat(n) q^n.
    /// Series length is driven by Im tau and the context tail target.
    pub fn raw_plus_eval(&self, tau: &BigComplex) -> Result<BigComplex> {
        let ctx = &self.ctx;
        let y = tau.im.to_f64();
        if y < 0.20 {
            return Err(Error::Precision(format!(
                "holomorphic-part series needs Im tau >= 0.2, got {y}"
            )));
        }
        let n_max = plus_series_length(y, ctx.tail_epsilon());
        let ns: Vec<u32> = (1..=n_max).collect();
        self.ensure_coeffs(&ns)?;
        let raw = self.raw.read().unwrap();
        let mut acc = BigComplex::q_power(ctx, tau, -1);
        acc += &BigComplex::from_real(self.raw_c0());
        let q1 = BigComplex::q_power(ctx, tau, 1);
        let mut qn = BigComplex::one(ctx);
        for n in 1..=n_max {
            qn = &qn * &q1;
            acc += &qn.scale(&raw[&n]);
        }
        Ok(acc)
    }

    /// M+(tau) = lambda Q+(tau); requires calibration.
    pub fn mock_plus_eval(&self, tau: &BigComplex) -> Result<BigComplex> {
        let lam = self
            .calibration_lambda()
            .ok_or_else(|| Error::InvalidInput("form not calibrated".into()))?;
        Ok(&lam * &self.raw_plus_eval(tau)?)
    }

    /// Nonholomorphic part
    /// M-(tau) = sum_{n>=1} conj(c^-(n)) Gamma(k-1, 4 pi n y) q^{-n},
    /// returned with the tail estimate of the cut series.
    pub fn m_minus_eval(&self, tau: &BigComplex, n_terms: Option<usize>) -> Result<(BigComplex, Float)> {
        let ctx = &self.ctx;
        let k = self.shadow.weight;
        let prec = ctx.bits();
        let y = tau.im.to_f64();
        if y <= 0.0 {
            return Err(Error::Domain("Im tau must be positive".into()));
        }
        let eps = ctx.tail_epsilon();
        let auto_n = (((1.0 / eps).ln() + 40.0) / (2.0 * std::f64::consts::PI * y)).ceil() as usize + 8;
        let n_max = n_terms.unwrap_or(auto_n);
        if self.shadow.truncation_order() < n_max as i64 {
            return Err(Error::Precision(format!(
                "nonholomorphic part at Im tau = {y} needs {n_max} shadow coefficients, have {}",
                self.shadow.truncation_order()
            )));
        }
        let four_pi_y = ctx.pi() * 4u32 * &tau.im;
        let mut acc = BigComplex::zero(ctx);
        let qm1 = BigComplex::q_power(ctx, tau, -1);
        let mut qmn = BigComplex::one(ctx);
        let mut last = ctx.zero();
        for n in 1..=n_max {
            qmn = &qmn * &qm1;
            let cm = self.c_minus(n as u32)?; // real, conj is a no-op
            if cm.is_zero() {
                continue;
            }
            let g = upper_gamma_posint(prec, k - 1, &(four_pi_y.clone() * n as u32));
            let term = qmn.scale(&(cm * g));
            last = term.abs();
            acc += &term;
        }
        // geometric-style tail estimate from the final term
        let ratio = (-2.0 * std::f64::consts::PI * y).exp();
        let tail = last * ctx.new_float(2.0 * ratio / (1.0 - ratio));
        Ok((acc, tail))
    }

    /// Completed form M = M+ + M-; requires calibration.
    pub fn full_eval(&self, tau: &BigComplex) -> Result<BigComplex> {
        let plus = self.mock_plus_eval(tau)?;
        let (minus, _) = self.m_minus_eval(tau, None)?;
        Ok(&plus + &minus)
    }

    /// Solves Theorem-style calibration: lambda such that
    /// lambda (4 pi)^{k-1}/Gamma(k-1) (Q+ - Q+|_{2-k} gamma)(tau) equals the
    /// twisted-L period polynomial of the shadow at gamma, tau.
    pub fn calibrate(&self, gamma: &GL2Matrix, tau: &BigComplex) -> Result<BigComplex> {
        let ctx = &self.ctx;
        if gamma.c == 0 {
            return Err(Error::InvalidInput("calibration needs c != 0".into()));
        }
        let k = self.shadow.weight;
        let gt = gamma.apply(ctx, tau);
        let q_here = self.raw_plus_eval(tau)?;
        let q_there = self.raw_plus_eval(&gt)?;
        let j = gamma.j_factor(ctx, tau).powi((k - 2) as i64);
        let diff = &q_here - &(&j * &q_there);
        let scale = q_here.abs().max(&q_there.abs());
        if diff.abs() < ctx.tolerance() * &scale {
            return Err(Error::IllConditioned(
                "slash difference below tolerance; pick another (gamma, tau)".into(),
            ));
        }
        let pref = (ctx.pi() * 4u32).pow(k - 1) / factorial(ctx, k - 2);
        let rhs = period_polynomial_identity_rhs(ctx, &self.shadow, gamma, tau)?;
        let lam = &rhs / &diff.scale(&pref);
        self.set_lambda(lam.clone());
        Ok(lam)
    }

    /// Period function P(F+, gamma; tau) = (4 pi)^{k-1}/Gamma(k-1) (F+ - F+|gamma)(tau).
    ///
    /// Where both tau and gamma tau sit high enough, the literal mock-part
    /// difference is used. Otherwise the difference is routed through the
    /// completed form: P = (4 pi)^{k-1}/Gamma(k-1) [(c tau+d)^{k-2} M-(gamma tau) - M-(tau)],
    /// exact up to the modularity residual of the completion.
    pub fn period_function(&self, gamma: &GL2Matrix, tau: &BigComplex) -> Result<BigComplex> {
        let ctx = &self.ctx;
        let k = self.shadow.weight;
        let pref = (ctx.pi() * 4u32).pow(k - 1) / factorial(ctx, k - 2);
        if gamma.c == 0 {
            // translations leave the q-series fixed
            return Ok(BigComplex::zero(ctx));
        }
        let gt = gamma.apply(ctx, tau);
        let j_pow = gamma.j_factor(ctx, tau).powi((k - 2) as i64);
        if tau.im.to_f64() >= 0.28 && gt.im.to_f64() >= 0.28 {
            let lam = self
                .calibration_lambda()
                .ok_or_else(|| Error::InvalidInput("form not calibrated".into()))?;
            let d = &self.raw_plus_eval(tau)? - &(&j_pow * &self.raw_plus_eval(&gt)?);
            Ok((&lam * &d).scale(&pref))
        } else {
            let (m_here, _) = self.m_minus_eval(tau, None)?;
            let (m_there, _) = self.m_minus_eval(&gt, None)?;
            Ok((&(&j_pow * &m_there) - &m_here).scale(&pref))
        }
    }

    /// max over the sample set of |P(F+, gamma; tau)| / |c tau + d|^{k-2};
    /// the empirical uniform constant in the modularity-obstruction bound.
    pub fn lemma_bound_scan(
        &self,
        gammas: &[GL2Matrix],
        taus: &[BigComplex],
    ) -> Result<Float> {
        let ctx = &self.ctx;
        let k = self.shadow.weight;
        let mut best = ctx.zero();
        for g in gammas {
            if g.c == 0 {
                return Err(Error::InvalidInput("scan matrices need c != 0".into()));
            }
            for t in taus {
                let p = self.period_function(g, t)?;
                if !p.is_finite() {
                    return Err(Error::Precision("period function overflowed".into()));
                }
                let jn = g.j_factor(ctx, t).abs().pow((k - 2) as i32);
                let ratio = p.abs() / jn;
                if ratio > best {
                    best = ratio;
                }
            }
        }
        Ok(best)
    }
}

/// Series length so the holomorphic-part tail at height y clears eps,
/// using |chat(n)| <= 10 e^{4 pi sqrt n} (trivial-bound envelope).
fn plus_series_length(y: f64, eps: f64) -> u32 {
    let a = 2.0 * std::f64::consts::PI * y;
    let b = 4.0 * std::f64::consts::PI;
    let l = (10.0 / eps).ln() + 8.0;
    let sq = (b + (b * b + 4.0 * a * l).sqrt()) / (2.0 * a);
    (sq * sq).ceil() as u32 + 2
}

/// Right side of the twisted-L period identity:
/// sum_{n=0}^{k-2} conj(L(f, e(-d/c), n+1))/(k-2-n)! (-2 pi i)^{k-2-n} ((cz+d)/c)^{k-2-n}.
pub fn period_polynomial_identity_rhs(
    ctx: &PrecisionContext,
    f: &CuspForm,
    gamma: &GL2Matrix,
    z: &BigComplex,
) -> Result<BigComplex> {
    let k = f.weight;
    let w = {
        let num = gamma.j_factor(ctx, z);
        num.scale(&ctx.new_int_float(gamma.c).recip())
    };
    let minus_two_pi_i = BigComplex::new(ctx.zero(), -(ctx.pi() * 2u32));
    let mut acc = BigComplex::zero(ctx);
    for n in 0..=(k - 2) {
        let l = additive_twist(ctx, f, gamma.d, gamma.c, n + 1)?.conj();
        let phase = minus_two_pi_i.powi((k - 2 - n) as i64);
        let wpow = w.powi((k - 2 - n) as i64);
        let denom = factorial(ctx, k - 2 - n);
        acc += &(&(&l * &phase) * &wpow).scale(&denom.recip());
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::delta_expansion;

    fn ctx() -> PrecisionContext {
        PrecisionContext::standard()
    }

    #[test]
    fn kloosterman_brute_values() {
        let c = ctx();
        // K(m, n; 1) = 1 (empty exponent)
        let k1 = kloosterman(&c, 3, 7, 1);
        assert!((k1.re.to_f64() - 1.0).abs() < 1e-100);
        // K(1,1;2): d=1, dbar=1, e(2 pi i * 2/2) = 1
        let k2 = kloosterman(&c, 1, 1, 2);
        assert!((k2.re.to_f64() - 1.0).abs() < 1e-100);
        // K(1,1;3): d in {1,2}: e(2pi i 2/3) + e(2pi i 4/3) = -1
        let k3 = kloosterman(&c, 1, 1, 3);
        assert!((k3.re.to_f64() + 1.0).abs() < 1e-100);
        assert!(k3.im.to_f64().abs() < 1e-100);
    }

    #[test]
    fn kloosterman_symmetry_and_reality() {
        let c = ctx();
        for &(m, n, q) in &[(1i64, 5i64, 12u64), (-1, 7, 9), (2, 3, 25), (-1, 1000, 13)] {
            let a = kloosterman(&c, m, n, q);
            let b = kloosterman(&c, n, m, q);
            assert!((&a - &b).abs() < c.new_float(1e-120), "K symmetry m,n");
            assert!(a.im.clone().abs() < c.new_float(1e-120), "K real");
        }
    }

    #[test]
    fn raw_coefficient_matches_published_row() {
        // chat+(1) reproduces the printed first-column entry -1842.89...
        let c = PrecisionContext::standard();
        let shadow = delta_expansion(600).unwrap();
        let h = HarmonicMaassForm::new(c.clone(), shadow, 4000);
        let (v, tail) = h.raw_poincare_coeff(1).unwrap();
        let vf = v.to_f64();
        assert!(
            (vf + 1842.8947).abs() < 2e-3,
            "chat(1) = {vf}, expected about -1842.8947"
        );
        assert!(tail < 1e-30);
    }

    #[test]
    fn c0_limit_value() {
        // chat(0) = -(2 pi)^k / ((k-1)! zeta(k)); zeta(12) ~ 1.000246
        let c = ctx();
        let shadow = delta_expansion(600).unwrap();
        let h = HarmonicMaassForm::new(c.clone(), shadow, 4000);
        let v = h.raw_c0().to_f64();
        assert!((v + 94.8191).abs() < 1e-3, "chat(0) = {v}");
    }

    #[test]
    fn shadow_roundtrip_exact() {
        // -(4 pi)^{k-1} n^{k-1} c^-(n) reproduces the shadow coefficients
        let c = ctx();
        let shadow = delta_expansion(120).unwrap();
        let h = HarmonicMaassForm::new(c.clone(), shadow.clone(), 4000);
        for n in 1..=100u32 {
            let cm = h.c_minus(n).unwrap();
            let back = -(cm * (c.pi() * 4u32).pow(11u32) * c.new_float(n as f64).pow(11u32));
            let expect = Float::with_val(c.bits(), &shadow.coeff(n as i64).unwrap());
            let d = (back - &expect).abs();
            let scale = expect.abs().max(&c.one());
            assert!(d / scale < c.new_float(1e-140), "roundtrip at n={n}");
        }
    }
}
