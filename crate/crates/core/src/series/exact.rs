//! Exact numbers Σ_k (a_k + i·b_k)(2π)^{k/2} with rational a_k, b_k.

use super::SeriesError;
use rug::{Complex, Float, Integer, Rational};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// Element of the graded module over ℚ(i) with basis s^k, s = √(2π).
///
/// Canonical form: no stored term has both parts zero, so structural
/// equality coincides with equality of the represented formal sums.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExactCoeff {
    terms: BTreeMap<i32, (Rational, Rational)>,
}

impl ExactCoeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(Rational::from(1))
    }

    pub fn i() -> Self {
        Self::monomial(0, Rational::new(), Rational::from(1))
    }

    pub fn rational(r: Rational) -> Self {
        Self::monomial(0, r, Rational::new())
    }

    /// (re + i·im)·s^k.
    pub fn monomial(k: i32, re: Rational, im: Rational) -> Self {
        let mut t = BTreeMap::new();
        if !(re == 0 && im == 0) {
            t.insert(k, (re, im));
        }
        Self { terms: t }
    }

    /// s^k.
    pub fn s_pow(k: i32) -> Self {
        Self::monomial(k, Rational::from(1), Rational::new())
    }

    /// Build Σ r_m π^m from (r_m, m) pairs, using π^m = 2^{-m} s^{2m}.
    pub fn from_pi_powers(parts: &[(Rational, i32)]) -> Self {
        let mut out = Self::zero();
        for (r, m) in parts {
            let mut c = r.clone();
            if *m >= 0 {
                c /= Integer::from(1) << (*m as u32);
            } else {
                c *= Integer::from(1) << ((-*m) as u32);
            }
            out += &Self::monomial(2 * m, c, Rational::new());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|(_, b)| *b == 0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational, &Rational)> {
        self.terms.iter().map(|(k, (a, b))| (*k, a, b))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The only grade present, if there is exactly one.
    pub fn single_grade(&self) -> Option<(i32, &Rational, &Rational)> {
        if self.terms.len() == 1 {
            self.terms().next()
        } else {
            None
        }
    }

    fn insert_add(&mut self, k: i32, a: &Rational, b: &Rational) {
        if *a == 0 && *b == 0 {
            return;
        }
        let remove = {
            let e = self.terms.entry(k).or_insert_with(|| (Rational::new(), Rational::new()));
            e.0 += a;
            e.1 += b;
            e.0 == 0 && e.1 == 0
        };
        if remove {
            self.terms.remove(&k);
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, (a, b))| (*k, (a.clone(), Rational::from(-b)))).collect(),
        }
    }

    /// Real part in the formal sense (drop the i components).
    pub fn re(&self) -> Self {
        let mut out = Self::zero();
        for (k, a, _) in self.terms() {
            out.insert_add(k, a, &Rational::new());
        }
        out
    }

    /// Imaginary part returned as a real element.
    pub fn im(&self) -> Self {
        let mut out = Self::zero();
        for (k, _, b) in self.terms() {
            out.insert_add(k, b, &Rational::new());
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if *r == 0 {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, (a, b))| (*k, (Rational::from(a * r), Rational::from(b * r))))
                .collect(),
        }
    }

    pub fn mul_i(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, (a, b))| (*k, (Rational::from(-b), a.clone()))).collect(),
        }
    }

    /// Multiply by s^j.
    pub fn shift(&self, j: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, v)| (k + j, v.clone())).collect(),
        }
    }

    /// Exact division by a single-term divisor.
    pub fn div_monomial(&self, d: &Self) -> Result<Self, SeriesError> {
        let (k, a, b) = d.single_grade().ok_or(SeriesError::NonMonomialDivisor)?;
        // 1/(a+ib) = (a - ib)/(a²+b²)
        let n2 = Rational::from(a * a) + Rational::from(b * b);
        let inv = Self::monomial(-k, Rational::from(a / &n2), -(Rational::from(b / &n2)));
        Ok(self * &inv)
    }

    /// Numeric value at `prec` bits.
    pub fn to_complex(&self, prec: u32) -> Complex {
        let wp = prec + 16;
        let s = crate::numerics::sqrt_2pi(wp);
        let mut out = Complex::new(wp);
        for (k, a, b) in self.terms() {
            let sk = Float::with_val(wp, rug::ops::Pow::pow(&s, k));
            let re = Float::with_val(wp, a) * &sk;
            let im = Float::with_val(wp, b) * sk;
            out += Complex::with_val(wp, (re, im));
        }
        Complex::with_val(prec, out)
    }

    /// Tokens "p/q*(2pi)^(k/2)" and "p/q*i*(2pi)^(k/2)" joined by " + ".
    pub fn format_exact(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut toks = Vec::new();
        for (k, a, b) in self.terms() {
            if *a != 0 {
                toks.push(format!("{}/{}*(2pi)^({}/2)", a.numer(), a.denom(), k));
            }
            if *b != 0 {
                toks.push(format!("{}/{}*i*(2pi)^({}/2)", b.numer(), b.denom(), k));
            }
        }
        toks.join(" + ")
    }

    /// Inverse of [`format_exact`](Self::format_exact).
    pub fn parse_exact(s: &str) -> Result<Self, SeriesError> {
        let s = s.trim();
        let mut out = Self::zero();
        if s == "0" {
            return Ok(out);
        }
        for tok in s.split(" + ") {
            let bad = || SeriesError::Parse(tok.to_string());
            let (coef, rest) = tok.split_once('*').ok_or_else(bad)?;
            let (imag, rest) = match rest.strip_prefix("i*") {
                Some(r) => (true, r),
                None => (false, rest),
            };
            let k: i32 = rest
                .strip_prefix("(2pi)^(")
                .and_then(|r| r.strip_suffix("/2)"))
                .ok_or_else(bad)?
                .parse()
                .map_err(|_| bad())?;
            let r: Rational = coef.parse().map_err(|_| bad())?;
            let term = if imag {
                Self::monomial(k, Rational::new(), r)
            } else {
                Self::monomial(k, r, Rational::new())
            };
            out += &term;
        }
        Ok(out)
    }
}

impl fmt::Display for ExactCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_exact())
    }
}

impl AddAssign<&ExactCoeff> for ExactCoeff {
    fn add_assign(&mut self, o: &ExactCoeff) {
        for (k, a, b) in o.terms() {
            self.insert_add(k, a, b);
        }
    }
}

impl SubAssign<&ExactCoeff> for ExactCoeff {
    fn sub_assign(&mut self, o: &ExactCoeff) {
        for (k, a, b) in o.terms() {
            self.insert_add(k, &Rational::from(-a), &Rational::from(-b));
        }
    }
}

impl Add<&ExactCoeff> for &ExactCoeff {
    type Output = ExactCoeff;
    fn add(self, o: &ExactCoeff) -> ExactCoeff {
        let mut r = self.clone();
        r += o;
        r
    }
}

impl Sub<&ExactCoeff> for &ExactCoeff {
    type Output = ExactCoeff;
    fn sub(self, o: &ExactCoeff) -> ExactCoeff {
        let mut r = self.clone();
        r -= o;
        r
    }
}

impl Neg for &ExactCoeff {
    type Output = ExactCoeff;
    fn neg(self) -> ExactCoeff {
        self.scale(&Rational::from(-1))
    }
}

impl Mul<&ExactCoeff> for &ExactCoeff {
    type Output = ExactCoeff;
    fn mul(self, o: &ExactCoeff) -> ExactCoeff {
        let mut out = ExactCoeff::zero();
        for (k1, a1, b1) in self.terms() {
            for (k2, a2, b2) in o.terms() {
                let re = Rational::from(a1 * a2) - Rational::from(b1 * b2);
                let im = Rational::from(a1 * b2) + Rational::from(b1 * a2);
                out.insert_add(k1 + k2, &re, &im);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn exponents_add() {
        let a = ExactCoeff::s_pow(1);
        let b = ExactCoeff::s_pow(-3);
        assert_eq!(&a * &b, ExactCoeff::s_pow(-2));
    }

    #[test]
    fn conj_of_imaginary_monomial() {
        let a = ExactCoeff::monomial(3, Rational::new(), q(1, 1));
        assert_eq!(a.conj(), ExactCoeff::monomial(3, Rational::new(), q(-1, 1)));
    }

    #[test]
    fn pi_power_conversion() {
        // -7/(256 π⁴) = (-7/16)(2π)^{-4}
        let a = ExactCoeff::from_pi_powers(&[(q(-7, 256), -4)]);
        assert_eq!(a, ExactCoeff::monomial(-8, q(-7, 16), Rational::new()));
    }

    #[test]
    fn cancellation_is_canonical() {
        let a = ExactCoeff::monomial(2, q(1, 3), q(1, 5));
        let z = &a - &a;
        assert!(z.is_zero());
        assert_eq!(z, ExactCoeff::zero());
    }

    #[test]
    fn division_by_monomial() {
        let a = ExactCoeff::monomial(1, q(2, 1), q(1, 1));
        let d = ExactCoeff::monomial(-2, q(0, 1), q(3, 1));
        let r = a.div_monomial(&d).unwrap();
        assert_eq!(&r * &d, a);
        let two = &ExactCoeff::one() + &ExactCoeff::s_pow(1);
        assert!(matches!(a.div_monomial(&two), Err(SeriesError::NonMonomialDivisor)));
    }

    #[test]
    fn format_round_trip() {
        let a = &ExactCoeff::monomial(-3, q(-9, 8), q(0, 1)) + &ExactCoeff::monomial(5, q(1, 193536), q(2, 7));
        let s = a.format_exact();
        assert_eq!(s, "-9/8*(2pi)^(-3/2) + 1/193536*(2pi)^(5/2) + 2/7*i*(2pi)^(5/2)");
        assert_eq!(ExactCoeff::parse_exact(&s).unwrap(), a);
    }

    #[test]
    fn numeric_value() {
        let a = ExactCoeff::monomial(2, q(1, 1), Rational::new());
        let v = a.to_complex(128);
        assert!((v.real().to_f64() - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    }

    fn arb_coeff() -> impl Strategy<Value = ExactCoeff> {
        prop::collection::vec((-4i32..5, -20i64..20, 1i64..9, -20i64..20, 1i64..9), 0..4).prop_map(|v| {
            let mut c = ExactCoeff::zero();
            for (k, a, ad, b, bd) in v {
                c += &ExactCoeff::monomial(k, q(a, ad), q(b, bd));
            }
            c
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_coeff(), b in arb_coeff(), c in arb_coeff()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            prop_assert_eq!(&a.re() + &a.im().mul_i(), a.clone());
        }
    }
}
