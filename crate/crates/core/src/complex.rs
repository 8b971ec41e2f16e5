use crate::precision::PrecisionContext;
use rug::float::Round;
use rug::ops::AssignRound;
use rug::Float;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Arbitrary-precision complex number over two `rug::Float`s.
///
/// The crate needs only elementary field operations, conjugation, integer
/// powers and the exponential `e^{2 pi i tau}`, so this stays hand-rolled
/// instead of pulling in MPC bindings.
#[derive(Debug, Clone, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        Self {
            re,
            im: Float::with_val(prec, 0),
        }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        Self::new(ctx.zero(), ctx.zero())
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        Self::new(ctx.one(), ctx.zero())
    }

    pub fn i(ctx: &PrecisionContext) -> Self {
        Self::new(ctx.zero(), ctx.one())
    }

    pub fn with_val(ctx: &PrecisionContext, re: f64, im: f64) -> Self {
        Self::new(ctx.new_float(re), ctx.new_float(im))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Float {
        let mut v = self.re.clone().square();
        v += self.im.clone().square();
        v
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn scale(&self, s: &Float) -> Self {
        Self::new(self.re.clone() * s, self.im.clone() * s)
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Self::new(self.re.clone() / &n, -(self.im.clone() / &n))
    }

    /// Integer power by binary exponentiation; negative exponents invert.
    pub fn powi(&self, e: i64) -> Self {
        let prec = self.prec();
        if e == 0 {
            return Self::new(Float::with_val(prec, 1), Float::with_val(prec, 0));
        }
        let mut base = if e < 0 { self.recip() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::new(Float::with_val(prec, 1), Float::with_val(prec, 0));
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// e^{i theta}
    pub fn cis(theta: &Float) -> Self {
        let prec = theta.prec();
        let (s, c) = theta.clone().sin_cos(Float::new(prec));
        Self::new(c, s)
    }

    /// exp(z) = e^{re} (cos im + i sin im)
    pub fn exp(&self) -> Self {
        let r = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(self.prec()));
        Self::new(r.clone() * c, r * s)
    }

    /// e^{2 pi i n tau}: the q-power for integer exponent n (n may be negative).
    pub fn q_power(ctx: &PrecisionContext, tau: &BigComplex, n: i64) -> Self {
        let two_pi = ctx.pi() * 2u32;
        // 2 pi i n tau = 2 pi n (i re - im)
        let f = two_pi * n;
        let z = BigComplex::new(-(f.clone() * &tau.im), f * &tau.re);
        z.exp()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Round (or extend) to a different working precision.
    pub fn with_prec(&self, bits: u32) -> Self {
        let mut re = Float::new(bits);
        re.assign_round(&self.re, Round::Nearest);
        let mut im = Float::new(bits);
        im.assign_round(&self.im, Round::Nearest);
        Self::new(re, im)
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

impl Add for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(self.re.clone() + &rhs.re, self.im.clone() + &rhs.im)
    }
}

impl Sub for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(self.re.clone() - &rhs.re, self.im.clone() - &rhs.im)
    }
}

impl Mul for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        let re = self.re.clone() * &rhs.re - self.im.clone() * &rhs.im;
        let im = self.re.clone() * &rhs.im + self.im.clone() * &rhs.re;
        BigComplex::new(re, im)
    }
}

impl Div for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        let n = rhs.norm_sqr();
        let re = (self.re.clone() * &rhs.re + self.im.clone() * &rhs.im) / &n;
        let im = (self.im.clone() * &rhs.re - self.re.clone() * &rhs.im) / &n;
        BigComplex::new(re, im)
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(-self.re.clone(), -self.im.clone())
    }
}

impl AddAssign<&BigComplex> for BigComplex {
    fn add_assign(&mut self, rhs: &BigComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&BigComplex> for BigComplex {
    fn sub_assign(&mut self, rhs: &BigComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

macro_rules! forward_value_ops {
    ($($trait:ident :: $m:ident),*) => {$(
        impl $trait for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex { $trait::$m(&self, &rhs) }
        }
        impl $trait<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &BigComplex) -> BigComplex { $trait::$m(&self, rhs) }
        }
    )*};
}
forward_value_ops!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Mul<&Float> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &Float) -> BigComplex {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::standard()
    }

    #[test]
    fn field_ops() {
        let c = ctx();
        let a = BigComplex::with_val(&c, 3.0, -2.0);
        let b = BigComplex::with_val(&c, -1.0, 5.0);
        let p = &a * &b;
        assert_eq!(p.re.to_f64(), 7.0); // 3*-1 - (-2)*5
        assert_eq!(p.im.to_f64(), 17.0); // 3*5 + (-2)*(-1)
        let q = &p / &b;
        assert!((q.re.to_f64() - 3.0).abs() < 1e-100);
        assert!((q.im.to_f64() + 2.0).abs() < 1e-100);
    }

    #[test]
    fn powers_and_conj() {
        let c = ctx();
        let i = BigComplex::i(&c);
        let m = i.powi(10);
        assert_eq!(m.re.to_f64(), -1.0);
        assert_eq!(m.im.to_f64(), 0.0);
        let z = BigComplex::with_val(&c, 2.0, 1.0);
        let inv = z.powi(-2);
        let sq = z.powi(2);
        let one = &inv * &sq;
        assert!((one.re.to_f64() - 1.0).abs() < 1e-100);
        assert!(one.im.to_f64().abs() < 1e-100);
        assert_eq!(z.conj().im.to_f64(), -1.0);
    }

    #[test]
    fn q_power_periodicity() {
        let c = ctx();
        let tau = BigComplex::with_val(&c, 0.3, 1.1);
        let tau1 = BigComplex::with_val(&c, 1.3, 1.1);
        let q1 = BigComplex::q_power(&c, &tau, 5);
        let q2 = BigComplex::q_power(&c, &tau1, 5);
        let d = (&q1 - &q2).abs();
        assert!(d < c.new_float(1e-140), "q-power must be 1-periodic");
    }
}
