//! Truncated Fourier (q-) expansions with sparse coefficient storage.
//!
//! Exponents may be negative (finite principal parts). Truncation orders
//! follow the pessimistic min rule: a product is only known through the
//! order both factors support.

use crate::complex::BigComplex;
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use rug::{Float, Integer};
use std::collections::BTreeMap;

/// Truncation order assigned to exactly-zero series (known to all orders).
const ZERO_TRUNC: i64 = i64::MAX / 4;

pub trait Coefficient: Clone + PartialEq + Send + Sync {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn to_complex(&self, ctx: &PrecisionContext) -> BigComplex;
}

impl Coefficient for Integer {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, other: &Self) -> Self {
        Integer::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Integer::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Integer::from(self * other)
    }
    fn neg(&self) -> Self {
        Integer::from(-self)
    }
    fn to_complex(&self, ctx: &PrecisionContext) -> BigComplex {
        BigComplex::from_real(Float::with_val(ctx.bits(), self))
    }
}

impl Coefficient for BigComplex {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_complex(&self, _ctx: &PrecisionContext) -> BigComplex {
        self.clone()
    }
}

/// Growth class of the coefficients, used for evaluation tail bounds.
#[derive(Debug, Clone, Copy)]
pub enum Growth {
    /// |c(n)| <= C n^d
    Polynomial(f64),
    /// |c(n)| <= C e^{alpha sqrt n}
    ExpSqrt(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QSeries<C: Coefficient> {
    coeffs: BTreeMap<i64, C>,
    trunc: i64,
}

impl<C: Coefficient> QSeries<C> {
    pub fn new(coeffs: BTreeMap<i64, C>, trunc: i64) -> Result<Self> {
        for (&n, _) in &coeffs {
            if n > trunc {
                return Err(Error::InvalidInput(format!(
                    "stored exponent {n} beyond truncation order {trunc}"
                )));
            }
        }
        let mut s = Self { coeffs, trunc };
        s.coeffs.retain(|_, c| !c.is_zero());
        Ok(s)
    }

    pub fn zero() -> Self {
        Self {
            coeffs: BTreeMap::new(),
            trunc: ZERO_TRUNC,
        }
    }

    pub fn monomial(n: i64, c: C, trunc: i64) -> Result<Self> {
        let mut m = BTreeMap::new();
        m.insert(n, c);
        Self::new(m, trunc)
    }

    pub fn truncation_order(&self) -> i64 {
        self.trunc
    }

    pub fn n_min(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &C)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored coefficient at exponent n; None encodes a structural zero.
    /// Out-of-range error past the truncation order.
    pub fn coefficient(&self, n: i64) -> Result<Option<&C>> {
        if n > self.trunc {
            return Err(Error::OutOfRange(format!(
                "coefficient {n} beyond truncation order {}",
                self.trunc
            )));
        }
        Ok(self.coeffs.get(&n))
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let mut out: BTreeMap<i64, C> = BTreeMap::new();
        for (&n, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if n > trunc {
                continue;
            }
            match out.get_mut(&n) {
                Some(v) => *v = v.add(c),
                None => {
                    out.insert(n, c.clone());
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Self { coeffs: out, trunc }
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&n, c)| (n, c.neg())).collect(),
            trunc: self.trunc,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Cauchy product through the joint truncation order
    /// min(t_a + min_exp(b), t_b + min_exp(a)).
    pub fn multiply(&self, other: &Self) -> Self {
        let (a0, b0) = match (self.n_min(), other.n_min()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Self::zero(),
        };
        let trunc = (self.trunc.saturating_add(b0)).min(other.trunc.saturating_add(a0));
        let mut out: BTreeMap<i64, C> = BTreeMap::new();
        for (&n, cn) in &self.coeffs {
            for (&m, cm) in &other.coeffs {
                let e = n + m;
                if e > trunc {
                    break; // other.coeffs ascending in m
                }
                let p = cn.mul(cm);
                match out.get_mut(&e) {
                    Some(v) => *v = v.add(&p),
                    None => {
                        out.insert(e, p);
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Self { coeffs: out, trunc }
    }

    /// Pointwise evaluation sum c(n) e^{2 pi i n tau} for Im tau > 0, with a
    /// truncation tail bound from the declared coefficient growth class.
    pub fn evaluate(
        &self,
        ctx: &PrecisionContext,
        tau: &BigComplex,
        growth: Growth,
    ) -> Result<(BigComplex, Float)> {
        let y = tau.im.to_f64();
        if !(y > 0.0) {
            return Err(Error::Domain("evaluation needs Im tau > 0".into()));
        }
        let mut acc = BigComplex::zero(ctx);
        // incremental q-powers: one complex multiply per unit exponent step
        if let Some(n0) = self.n_min() {
            let q1 = BigComplex::q_power(ctx, tau, 1);
            let mut cur_exp = n0;
            let mut cur_q = BigComplex::q_power(ctx, tau, n0);
            for (&n, c) in &self.coeffs {
                if n != cur_exp {
                    let step = n - cur_exp;
                    cur_q = if step == 1 {
                        &cur_q * &q1
                    } else {
                        &cur_q * &q1.powi(step)
                    };
                    cur_exp = n;
                }
                let term = c.to_complex(ctx);
                acc += &(&term * &cur_q);
            }
        }
        // tail bound past the truncation order
        let nn = (self.trunc.max(0) + 1) as f64;
        let two_pi_y = 2.0 * std::f64::consts::PI * y;
        let (log_next, log_ratio) = match growth {
            Growth::Polynomial(d) => (
                d * nn.ln() - two_pi_y * nn,
                d * ((nn + 1.0) / nn).ln() - two_pi_y,
            ),
            Growth::ExpSqrt(alpha) => (
                alpha * nn.sqrt() - two_pi_y * nn,
                alpha * ((nn + 1.0).sqrt() - nn.sqrt()) - two_pi_y,
            ),
        };
        if log_ratio > -0.05 {
            return Err(Error::Precision(format!(
                "tail terms not decaying: Im tau = {y} too small for truncation {}",
                self.trunc
            )));
        }
        let tail = ctx.new_float(log_next).exp()
            / (ctx.one() - ctx.new_float(log_ratio).exp());
        let scale = acc.abs().max(&ctx.new_float(1e-300));
        if tail.clone() / &scale > ctx.tolerance() {
            return Err(Error::Precision(format!(
                "truncation tail {:.3e} exceeds tolerance at scale {:.3e}",
                tail.to_f64(),
                scale.to_f64()
            )));
        }
        Ok((acc, tail))
    }
}

impl QSeries<Integer> {
    pub fn to_complex_series(&self, ctx: &PrecisionContext) -> QSeries<BigComplex> {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&n, c)| (n, c.to_complex(ctx)))
                .collect(),
            trunc: self.trunc,
        }
    }
}

// ---------------------------------------------------------------------------
// JSON wire format: {"n_min": int, "N": int, "coeffs": [[n, re, im], ...]}
// with decimal-string reals carrying full working precision.
// ---------------------------------------------------------------------------

/// Decimal rendering with enough digits that parsing back at the same
/// precision reproduces the float bit-for-bit.
pub fn float_to_decimal(f: &Float) -> String {
    let digits = (f.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
    let (sign, mantissa, exp) = f.to_sign_string_exp(10, Some(digits));
    match exp {
        Some(e) => format!("{}0.{}e{}", if sign { "-" } else { "" }, mantissa, e),
        None => format!("{}0", if sign { "-" } else { "" }),
    }
}

pub fn float_from_decimal(bits: u32, s: &str) -> Result<Float> {
    let p = Float::parse(s).map_err(|e| Error::InvalidInput(format!("bad float '{s}': {e}")))?;
    Ok(Float::with_val(bits, p))
}

impl QSeries<BigComplex> {
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|(&n, c)| {
                serde_json::json!([n, float_to_decimal(&c.re), float_to_decimal(&c.im)])
            })
            .collect();
        serde_json::json!({
            "n_min": self.n_min().unwrap_or(0),
            "N": self.trunc,
            "coeffs": coeffs,
        })
    }

    pub fn from_json(ctx: &PrecisionContext, v: &serde_json::Value) -> Result<Self> {
        let trunc = v["N"]
            .as_i64()
            .ok_or_else(|| Error::InvalidInput("missing N".into()))?;
        let arr = v["coeffs"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("missing coeffs".into()))?;
        let mut coeffs = BTreeMap::new();
        for e in arr {
            let n = e[0]
                .as_i64()
                .ok_or_else(|| Error::InvalidInput("bad exponent".into()))?;
            let re = float_from_decimal(ctx.bits(), e[1].as_str().unwrap_or("0"))?;
            let im = float_from_decimal(ctx.bits(), e[2].as_str().unwrap_or("0"))?;
            coeffs.insert(n, BigComplex::new(re, im));
        }
        QSeries::new(coeffs, trunc)
    }
}

impl QSeries<Integer> {
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|(&n, c)| serde_json::json!([n, c.to_string(), "0"]))
            .collect();
        serde_json::json!({
            "n_min": self.n_min().unwrap_or(0),
            "N": self.trunc,
            "coeffs": coeffs,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let trunc = v["N"]
            .as_i64()
            .ok_or_else(|| Error::InvalidInput("missing N".into()))?;
        let arr = v["coeffs"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("missing coeffs".into()))?;
        let mut coeffs = BTreeMap::new();
        for e in arr {
            let n = e[0]
                .as_i64()
                .ok_or_else(|| Error::InvalidInput("bad exponent".into()))?;
            let c: Integer = e[1]
                .as_str()
                .unwrap_or("0")
                .parse()
                .map_err(|_| Error::InvalidInput("bad integer".into()))?;
            coeffs.insert(n, c);
        }
        QSeries::new(coeffs, trunc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int_series(pairs: &[(i64, i64)], trunc: i64) -> QSeries<Integer> {
        QSeries::new(
            pairs.iter().map(|&(n, c)| (n, Integer::from(c))).collect(),
            trunc,
        )
        .unwrap()
    }

    #[test]
    fn monomial_shift() {
        // q^{-1} * (q - 24 q^2) = 1 - 24 q
        let a = int_series(&[(-1, 1)], 60);
        let b = int_series(&[(1, 1), (2, -24)], 60);
        let p = a.multiply(&b);
        assert_eq!(*p.coefficient(0).unwrap().unwrap(), 1);
        assert_eq!(*p.coefficient(1).unwrap().unwrap(), -24);
    }

    #[test]
    fn zero_annihilates() {
        let a = int_series(&[(1, 1), (2, -24)], 50);
        let z = QSeries::<Integer>::zero();
        assert!(a.multiply(&z).is_zero());
    }

    #[test]
    fn truncation_min_rule() {
        // leading exponents shift the reachable order
        let a = int_series(&[(-1, 1)], 10); // known through q^10
        let b = int_series(&[(2, 5)], 7); // known through q^7
        let p = a.multiply(&b);
        // min(10 + 2, 7 + (-1)) = 6
        assert_eq!(p.truncation_order(), 6);
        assert_eq!(p.n_min(), Some(1));
    }

    #[test]
    fn coefficient_out_of_range() {
        let a = int_series(&[(0, 1)], 5);
        assert!(a.coefficient(6).is_err());
        assert_eq!(a.coefficient(3).unwrap(), None);
    }

    #[test]
    fn evaluate_constant_and_periodicity() {
        let ctx = PrecisionContext::standard();
        let one = int_series(&[(0, 1)], 100);
        let tau = BigComplex::with_val(&ctx, 0.37, 0.9);
        let (v, _) = one
            .to_complex_series(&ctx)
            .evaluate(&ctx, &tau, Growth::Polynomial(0.0))
            .unwrap();
        assert!((v.re.to_f64() - 1.0).abs() < 1e-100);
        assert!(v.im.to_f64().abs() < 1e-100);
    }

    #[test]
    fn json_round_trip_exact() {
        let ctx = PrecisionContext::standard();
        let mut m = BTreeMap::new();
        m.insert(-1i64, BigComplex::with_val(&ctx, 1.0, 0.0));
        let third = BigComplex::new(
            ctx.one() / 3u32,
            ctx.pi(),
        );
        m.insert(5i64, third);
        let s = QSeries::new(m, 20).unwrap();
        let j = s.to_json();
        let back = QSeries::<BigComplex>::from_json(&ctx, &j).unwrap();
        assert_eq!(s, back, "decimal JSON round trip must be bit-exact");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ring_axioms(
            av in proptest::collection::vec((-4i64..30, -50i64..50), 0..8),
            bv in proptest::collection::vec((-4i64..30, -50i64..50), 0..8),
            cv in proptest::collection::vec((-4i64..30, -50i64..50), 0..8),
        ) {
            let mk = |v: &Vec<(i64, i64)>| {
                let mut m: BTreeMap<i64, Integer> = BTreeMap::new();
                for &(n, c) in v {
                    let e = m.entry(n).or_insert_with(Integer::new);
                    *e += c;
                }
                QSeries::new(m, 40).unwrap()
            };
            let (a, b, c) = (mk(&av), mk(&bv), mk(&cv));
            // commutativity
            prop_assert_eq!(a.multiply(&b), b.multiply(&a));
            // associativity through the joint truncation order
            let l = a.multiply(&b).multiply(&c);
            let r = a.multiply(&b.multiply(&c));
            prop_assert_eq!(l.truncation_order(), r.truncation_order());
            for n in -20..=l.truncation_order().min(40) {
                prop_assert_eq!(l.coefficient(n).unwrap(), r.coefficient(n).unwrap());
            }
            // distributivity (truncations may differ; compare common range)
            let d1 = a.multiply(&b.add(&c));
            let d2 = a.multiply(&b).add(&a.multiply(&c));
            let t = d1.truncation_order().min(d2.truncation_order());
            for n in -20..=t.min(40) {
                prop_assert_eq!(d1.coefficient(n).unwrap(), d2.coefficient(n).unwrap());
            }
            // degree law
            if let (Some(am), Some(bm)) = (a.n_min(), b.n_min()) {
                let p = a.multiply(&b);
                if let Some(pm) = p.n_min() {
                    prop_assert_eq!(pm, am + bm);
                }
            }
        }
    }
}
