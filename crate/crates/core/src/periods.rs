//! Period integrals r_n, critical L-values, additive twists, and the even /
//! odd period polynomials for level-1 cusp forms.

use crate::complex::BigComplex;
use crate::error::{Error, Result};
use crate::modular::CuspForm;
use crate::precision::PrecisionContext;
use crate::special::{binomial, factorial, upper_gamma_posint};
use rug::ops::Pow;
use rug::Float;

/// Integer matrix (a b; c d) with determinant one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GL2Matrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GL2Matrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidInput(format!(
                "determinant of ({a},{b};{c},{d}) is not 1"
            )));
        }
        Ok(Self { a, b, c, d })
    }

    pub const S: GL2Matrix = GL2Matrix { a: 0, b: -1, c: 1, d: 0 };
    pub const T: GL2Matrix = GL2Matrix { a: 1, b: 1, c: 0, d: 1 };

    pub fn apply(&self, ctx: &PrecisionContext, tau: &BigComplex) -> BigComplex {
        let num = &tau.scale(&ctx.new_int_float(self.a)) + &BigComplex::with_val(ctx, self.b as f64, 0.0);
        let den = self.j_factor(ctx, tau);
        &num / &den
    }

    /// c tau + d
    pub fn j_factor(&self, ctx: &PrecisionContext, tau: &BigComplex) -> BigComplex {
        &tau.scale(&ctx.new_int_float(self.c)) + &BigComplex::with_val(ctx, self.d as f64, 0.0)
    }

    pub fn mul(&self, o: &GL2Matrix) -> GL2Matrix {
        GL2Matrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// G(j, x) = int_1^inf e^{-xt} t^j dt = Gamma(j+1, x) / x^{j+1}
fn g_int(prec: u32, j: u32, x: &Float) -> Float {
    upper_gamma_posint(prec, j + 1, x) / x.clone().pow(j + 1)
}

/// n-th period r_n(f) = int_0^{i inf} f(it) t^n dt, 0 <= n <= k-2.
///
/// Splitting at t = 1 and reflecting via f(i/t) = i^k t^k f(it) turns the
/// integral into exponentially convergent sums:
/// r_n = sum_m a(m) [ G(n, 2 pi m) + (-1)^{k/2} G(k-2-n, 2 pi m) ].
pub fn period(ctx: &PrecisionContext, f: &CuspForm, n: u32) -> Result<BigComplex> {
    let k = f.weight;
    if n > k - 2 {
        return Err(Error::InvalidInput(format!("period index {n} > k-2")));
    }
    let m_max = terms_for_period(ctx);
    if f.truncation_order() < m_max as i64 {
        return Err(Error::Precision(format!(
            "expansion length {} below the {} terms needed",
            f.truncation_order(),
            m_max
        )));
    }
    let prec = ctx.bits();
    let two_pi = ctx.pi() * 2u32;
    let sign = if (k / 2) % 2 == 0 { 1i32 } else { -1i32 };
    let mut acc = ctx.zero();
    for m in 1..=m_max {
        let am = f.coeff(m as i64)?;
        if am == 0 {
            continue;
        }
        let x = two_pi.clone() * (m as u32);
        let mut t = g_int(prec, n, &x);
        let refl = g_int(prec, k - 2 - n, &x);
        if sign > 0 {
            t += refl;
        } else {
            t -= refl;
        }
        acc += Float::with_val(prec, &am) * t;
    }
    Ok(BigComplex::from_real(acc))
}

fn terms_for_period(ctx: &PrecisionContext) -> usize {
    ((ctx.bits() as f64) * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI)).ceil() as usize
        + 12
}

/// Critical L-value L(f, s) = (2 pi)^s / (s-1)! * r_{s-1}(f), 1 <= s <= k-1.
pub fn l_value(ctx: &PrecisionContext, f: &CuspForm, s: u32) -> Result<BigComplex> {
    if s == 0 || s > f.weight - 1 {
        return Err(Error::InvalidInput(format!(
            "L-value argument {s} outside 1..={}",
            f.weight - 1
        )));
    }
    let r = period(ctx, f, s - 1)?;
    let factor = (ctx.pi() * 2u32).pow(s) / factorial(ctx, s - 1);
    Ok(r.scale(&factor))
}

/// Additive twist L(f, e^{-2 pi i d/c}, s) for integer 1 <= s <= k-1,
/// by the two-piece continuation with split point y0 = 1/|c|:
/// the small-y piece is reflected through f(-d/c + iy) = (icy)^{-k} f(a/c + i/(c^2 y)),
/// where a inverts d mod c. Both pieces become incomplete-gamma sums.
pub fn additive_twist(
    ctx: &PrecisionContext,
    f: &CuspForm,
    d: i64,
    c: i64,
    s: u32,
) -> Result<BigComplex> {
    if c == 0 {
        return Err(Error::InvalidInput("twist denominator c must be nonzero".into()));
    }
    let k = f.weight;
    if s == 0 || s > k - 1 {
        return Err(Error::InvalidInput(format!("twist s={s} outside 1..={}", k - 1)));
    }
    let (c, d) = if c < 0 { (-c, -d) } else { (c, d) };
    let dd = d.rem_euclid(c);
    if c > 1 && gcd(dd, c) != 1 {
        return Err(Error::InvalidInput(format!("gcd({d},{c}) != 1")));
    }
    let a = if c == 1 { 0 } else { mod_inverse(dd, c) };
    twist_with_completion(ctx, f, dd, c, a, s)
}

/// Same computation with an explicit completion a of (d, c) to a
/// determinant-one matrix (a * d == 1 mod c). Exposed so the
/// completion-independence can be tested.
pub fn twist_with_completion(
    ctx: &PrecisionContext,
    f: &CuspForm,
    d: i64,
    c: i64,
    a: i64,
    s: u32,
) -> Result<BigComplex> {
    let k = f.weight;
    let prec = ctx.bits();
    let m_max = (ctx.bits() as f64 * std::f64::consts::LN_2 * c as f64
        / (2.0 * std::f64::consts::PI))
        .ceil() as usize
        + c as usize
        + 16;
    if f.truncation_order() < m_max as i64 {
        return Err(Error::Precision(format!(
            "twist at c={c} needs {m_max} coefficients, form has {}",
            f.truncation_order()
        )));
    }
    // root-of-unity table e(j/c)
    let roots: Vec<BigComplex> = (0..c)
        .map(|j| {
            let theta = ctx.pi() * 2u32 * ctx.new_int_float(j) / ctx.new_int_float(c);
            BigComplex::cis(&theta)
        })
        .collect();
    let two_pi = ctx.pi() * 2u32;
    let mut upper = BigComplex::zero(ctx);
    let mut lower = BigComplex::zero(ctx);
    for n in 1..=m_max {
        let an = f.coeff(n as i64)?;
        if an == 0 {
            continue;
        }
        let anf = Float::with_val(prec, &an);
        let x = two_pi.clone() * ctx.new_int_float(n as i64) / ctx.new_int_float(c);
        // e(-n d / c)
        let iu = ((n as i64 * d).rem_euclid(c)) as usize;
        let ru = roots[(c as usize - iu) % c as usize].clone();
        let gu = upper_gamma_posint(prec, s, &x) / x.clone().pow(s);
        upper += &ru.scale(&(anf.clone() * gu));
        // e(+n a / c)
        let il = ((n as i64 * a).rem_euclid(c)) as usize;
        let rl = roots[il].clone();
        let gl = upper_gamma_posint(prec, k - s, &x) / x.clone().pow(k - s);
        lower += &rl.scale(&(anf * gl));
    }
    // (2 pi)^s / Gamma(s) * [ upper / (2 pi)^s-free form ]: the sums above are
    // sum a(n) e(..) Gamma(j, x)/x^j with x = 2 pi n / c, i.e. already the
    // integrals int_{y0}^inf f(iy - d/c) y^{s-1} dy * (2 pi / c)^... unwound:
    // int_{y0}^infty e^{-2 pi n y} y^{s-1} dy = Gamma(s, 2 pi n y0)/(2 pi n)^s,
    // and we took y0 = 1/c, so (2 pi n)^(-s) = (x/c... ) carry the c-powers:
    let c_f = ctx.new_int_float(c);
    // upper piece currently holds sum a(n) e(-nd/c) Gamma(s, x) / x^s with
    // x = 2 pi n / c; Gamma(s,x)/(2 pi n)^s = [Gamma(s,x)/x^s] c^{-s}
    let up = upper.scale(&c_f.clone().pow(-(s as i32)));
    let low = lower.scale(&c_f.clone().pow(-((k - s) as i32)));
    // lower piece carries the reflection factor c^{k-2s}
    let low = low.scale(&c_f.pow((k as i32) - 2 * (s as i32)));
    let pref = (ctx.pi() * 2u32).pow(s) / factorial(ctx, s - 1);
    Ok((&up + &low).scale(&pref))
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a.abs()
}

/// Inverse of d mod c with minimal absolute value.
fn mod_inverse(d: i64, c: i64) -> i64 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (c, d.rem_euclid(c));
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "inverse of non-coprime pair");
    let mut a = t.rem_euclid(c);
    if a > c / 2 {
        a -= c;
    }
    a
}

/// Periods, critical L-values and the even/odd period polynomial coefficients.
#[derive(Debug, Clone)]
pub struct PeriodData {
    pub form: CuspForm,
    /// r_0 .. r_{k-2}
    pub periods: Vec<BigComplex>,
    /// L(f,1) .. L(f,k-1)
    pub critical_l_values: Vec<BigComplex>,
    /// coefficient of z^j in r^+(f, z), j = 0..=k-2
    pub even_polynomial: Vec<BigComplex>,
    /// coefficient of z^j in r^-(f, z)
    pub odd_polynomial: Vec<BigComplex>,
}

/// Fills periods, L-values and the binomial period polynomials
/// r^+(f,z) = sum_{even n} (-1)^{n/2} C(k-2,n) r_n z^{k-2-n},
/// r^-(f,z) = sum_{odd n} (-1)^{(n-1)/2} C(k-2,n) r_n z^{k-2-n}.
pub fn period_polynomial(ctx: &PrecisionContext, f: &CuspForm) -> Result<PeriodData> {
    let k = f.weight;
    let deg = (k - 2) as usize;
    let mut periods = Vec::with_capacity(deg + 1);
    for n in 0..=deg as u32 {
        periods.push(period(ctx, f, n)?);
    }
    let mut lvals = Vec::with_capacity(deg + 1);
    for s in 1..=(k - 1) {
        let factor = (ctx.pi() * 2u32).pow(s) / factorial(ctx, s - 1);
        lvals.push(periods[(s - 1) as usize].scale(&factor));
    }
    let mut even = vec![BigComplex::zero(ctx); deg + 1];
    let mut odd = vec![BigComplex::zero(ctx); deg + 1];
    for n in 0..=deg as u32 {
        let cb = Float::with_val(ctx.bits(), binomial(k - 2, n));
        let term = periods[n as usize].scale(&cb);
        if n % 2 == 0 {
            let sgn = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
            even[deg - n as usize] = term.scale(&ctx.new_float(sgn));
        } else {
            let sgn = if ((n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            odd[deg - n as usize] = term.scale(&ctx.new_float(sgn));
        }
    }
    Ok(PeriodData {
        form: f.clone(),
        periods,
        critical_l_values: lvals,
        even_polynomial: even,
        odd_polynomial: odd,
    })
}

/// Coefficients of rho(f; z) = int_0^{i inf} f(tau)(z - tau)^{k-2} d tau,
/// expanded by the binomial theorem into the periods:
/// coefficient of z^{k-2-n} is i (-i)^n C(k-2, n) r_n.
pub fn rho_polynomial(ctx: &PrecisionContext, f: &CuspForm) -> Result<Vec<BigComplex>> {
    let k = f.weight;
    let deg = (k - 2) as usize;
    let i_unit = BigComplex::i(ctx);
    let mut coeffs = vec![BigComplex::zero(ctx); deg + 1];
    for n in 0..=deg as u32 {
        let r = period(ctx, f, n)?;
        let cb = Float::with_val(ctx.bits(), binomial(k - 2, n));
        let phase = &i_unit * &BigComplex::i(ctx).conj().powi(n as i64); // i * (-i)^n
        coeffs[deg - n as usize] = (&phase * &r).scale(&cb);
    }
    Ok(coeffs)
}

pub fn eval_poly(ctx: &PrecisionContext, coeffs: &[BigComplex], z: &BigComplex) -> BigComplex {
    let mut acc = BigComplex::zero(ctx);
    for c in coeffs.iter().rev() {
        acc = &(&acc * z) + c;
    }
    acc
}

/// (p |_{2-k} gamma)(z) = (cz + d)^{k-2} p(gamma z) for a degree k-2 polynomial.
pub fn poly_slash_eval(
    ctx: &PrecisionContext,
    coeffs: &[BigComplex],
    weight_k: u32,
    gamma: &GL2Matrix,
    z: &BigComplex,
) -> BigComplex {
    let gz = gamma.apply(ctx, z);
    let j = gamma.j_factor(ctx, z).powi((weight_k - 2) as i64);
    &eval_poly(ctx, coeffs, &gz) * &j
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::delta_expansion;

    fn ctx() -> PrecisionContext {
        PrecisionContext::standard()
    }

    fn delta() -> CuspForm {
        delta_expansion(400).unwrap()
    }

    #[test]
    fn period_symmetry() {
        // r_n(Delta) = r_{10-n}(Delta), functional equation at k = 12
        let c = ctx();
        let f = delta();
        for n in 0..=10u32 {
            let a = period(&c, &f, n).unwrap();
            let b = period(&c, &f, 10 - n).unwrap();
            let rel = (&a - &b).abs() / a.abs();
            assert!(rel < c.new_float(1e-40), "r_{n} != r_{}", 10 - n);
        }
    }

    #[test]
    fn period_zero_against_quadrature() {
        // r_0 = int_0^inf Delta(it) dt: oracle by direct quadrature using the
        // q-expansion on [1, inf) and the reflection t -> 1/t below 1,
        // i.e. r_0 = int_1^inf Delta(it)(1 + t^10) dt
        let c = ctx().with_rel_tol(1e-30);
        let f = delta();
        let r0 = period(&c, &f, 0).unwrap();
        let fq = f.clone();
        let q = crate::quad::integrate_over_one_to_inf(&c, move |t| {
            let cc = PrecisionContext::new(t.prec(), 1e-30, 100).unwrap();
            let tau = BigComplex::new(cc.zero(), t.clone());
            let v = fq.evaluate(&cc, &tau).unwrap();
            v.re * (Float::with_val(t.prec(), 1) + t.clone().pow(10u32))
        })
        .unwrap();
        let rel = ((r0.re.clone() - &q.value) / &q.value).abs();
        assert!(rel < c.new_float(1e-25), "r_0 quadrature oracle: {rel}");
    }

    #[test]
    fn period_truncation_stability() {
        let c = ctx();
        let f = delta();
        let a = period(&c, &f, 5).unwrap();
        let hi = PrecisionContext::new(768, 1e-40, 1200).unwrap();
        let b = period(&hi, &f, 5).unwrap();
        let rel = (&a - &b.with_prec(c.bits())).abs() / a.abs();
        assert!(rel < c.new_float(1e-100));
    }

    #[test]
    fn l_value_eleven_direct() {
        // L(Delta, 11) = sum tau(m)/m^11 absolutely convergent; 1e4-term oracle
        let c = ctx();
        let f = delta_expansion(10_000).unwrap();
        let l = l_value(&c, &f, 11).unwrap();
        let mut direct = c.zero();
        for m in 1..=10_000i64 {
            let t = Float::with_val(c.bits(), &f.coeff(m).unwrap());
            direct += t / Float::with_val(c.bits(), m).pow(11u32);
        }
        let rel = ((l.re.clone() - &direct) / &direct).abs();
        assert!(rel < c.new_float(1e-12), "10-digit agreement required, got {rel}");
        assert!(l.im.clone().abs() < c.new_float(1e-100), "L-values of Delta are real");
    }

    #[test]
    fn l_value_definitional_identity() {
        let c = ctx();
        let f = delta();
        let l6 = l_value(&c, &f, 6).unwrap();
        let r5 = period(&c, &f, 5).unwrap();
        let expect = r5.scale(&((c.pi() * 2u32).pow(6u32) / factorial(&c, 5)));
        assert!((&l6 - &expect).abs() < c.new_float(1e-120));
    }

    #[test]
    fn twist_reduces_to_l_value() {
        let c = ctx();
        let f = delta();
        for s in [1u32, 6, 11] {
            let t = additive_twist(&c, &f, 0, 1, s).unwrap();
            let l = l_value(&c, &f, s).unwrap();
            let rel = (&t - &l).abs() / l.abs();
            assert!(rel < c.new_float(1e-40), "trivial twist != L at s={s}: {rel}");
        }
    }

    #[test]
    fn twist_periodicity_in_d() {
        let c = ctx();
        let f = delta();
        let a = additive_twist(&c, &f, 2, 5, 7).unwrap();
        let b = additive_twist(&c, &f, 7, 5, 7).unwrap();
        assert!((&a - &b).abs() < c.new_float(1e-120));
    }

    #[test]
    fn twist_alternating_direct_sum() {
        // L(Delta, e(-1/2), 8) = sum (-1)^n tau(n)/n^8; the 1e4-term partial
        // sum is itself only good to ~1e-9, which sets the check tolerance
        let c = ctx();
        let f = delta_expansion(10_000).unwrap();
        let t = additive_twist(&c, &f, 1, 2, 8).unwrap();
        let mut direct = c.zero();
        for n in 1..=10_000i64 {
            let tn = Float::with_val(c.bits(), &f.coeff(n).unwrap());
            let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
            direct += tn * c.new_float(sgn) / Float::with_val(c.bits(), n).pow(8u32);
        }
        let rel = ((t.re.clone() - &direct) / &direct).abs();
        assert!(rel < c.new_float(1e-8), "alternating-sum oracle: {rel}");
        assert!(t.im.clone().abs() < c.new_float(1e-60));
    }

    #[test]
    fn twist_completion_independence() {
        let c = ctx();
        let f = delta();
        // (d, c) = (2, 7): inverses of 2 mod 7 are 4, 11, -3, ...
        let v1 = twist_with_completion(&c, &f, 2, 7, 4, 5).unwrap();
        let v2 = twist_with_completion(&c, &f, 2, 7, -3, 5).unwrap();
        let v3 = twist_with_completion(&c, &f, 2, 7, 11, 5).unwrap();
        assert!((&v1 - &v2).abs() < c.new_float(1e-120));
        assert!((&v1 - &v3).abs() < c.new_float(1e-120));
    }

    #[test]
    fn polynomial_structure() {
        let c = ctx();
        let f = delta();
        let pd = period_polynomial(&c, &f).unwrap();
        // leading coefficient of r+ is C(10,0) r_0 = r_0 (z^10 slot)
        assert!((&pd.even_polynomial[10] - &pd.periods[0]).abs() < c.new_float(1e-120));
        // r- holds only odd periods: even slots of z-power parity k-2-n odd
        for (j, co) in pd.odd_polynomial.iter().enumerate() {
            if j % 2 == 0 {
                assert!(co.abs() < c.new_float(1e-130), "odd polynomial slot {j}");
            }
        }
        // L-relation: L(f, n+1) = (2 pi)^{n+1}/n! r_n
        for n in 0..=10u32 {
            let lhs = &pd.critical_l_values[n as usize];
            let factor = (c.pi() * 2u32).pow(n + 1) / factorial(&c, n);
            let rhs = pd.periods[n as usize].scale(&factor);
            assert!((lhs - &rhs).abs() < c.new_float(1e-110));
        }
    }

    #[test]
    fn gl2_validation() {
        assert!(GL2Matrix::new(1, 0, 0, 1).is_ok());
        assert!(GL2Matrix::new(2, 0, 0, 2).is_err());
        assert!(GL2Matrix::new(2, 1, 1, 1).is_ok());
    }
}
