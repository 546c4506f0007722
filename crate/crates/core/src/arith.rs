//! Exact scalars: big rationals, Gaussian rationals over Q(i), Bernoulli
//! numbers and divisor power sums.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders a rational as `p/q` (always with a denominator).
pub fn rational_to_json(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Compact rendering: `p` for integers, `p/q` otherwise.
pub fn rational_display(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `p/q` or `-p/q` in decimal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

/// Element `re + im·i` of Q(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(rat_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::real(rat(n, d))
    }

    pub fn i() -> Self {
        Self { re: Rational::zero(), im: Rational::one() }
    }

    /// `i^k` for any integer k.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => -Self::one(),
            _ => -Self::i(),
        }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self { re: &self.re * r, im: &self.im * r }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self { re: Rational::zero(), im: Rational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl From<Rational> for GaussianRational {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        // real-only fast path; most coefficients in practice have im = 0
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::real(&self.re * &rhs.re);
        }
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

/// `p/q+r/s*i` with zero parts elided.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", rational_display(&self.re)),
            (true, false) => write!(f, "{}*i", rational_display(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(
                    f,
                    "{}{}{}*i",
                    rational_display(&self.re),
                    sign,
                    rational_display(&self.im.abs())
                )
            }
        }
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("GaussianRational", 2)?;
        st.serialize_field("re", &rational_to_json(&self.re))?;
        st.serialize_field("im", &rational_to_json(&self.im))?;
        st.end()
    }
}

/// Parses `p/q`, `i`, `p/q*i`, or a sum such as `1/2-3*i` / `-1+i`.
pub fn parse_gaussian(s: &str) -> Result<GaussianRational> {
    let t = s.trim();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(GaussianRational::real(parse_rational(t)?));
    };
    let split = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(k, _)| k).last();
    let (re, im) = match split {
        Some(k) if !body[..k].ends_with('/') => (&body[..k], &body[k..]),
        _ => ("", body),
    };
    let im = im.strip_suffix('*').unwrap_or(im);
    let im = match im {
        "" | "+" => Rational::one(),
        "-" => -Rational::one(),
        _ => parse_rational(im.strip_prefix('+').unwrap_or(im))?,
    };
    let re = if re.is_empty() { Rational::zero() } else { parse_rational(re)? };
    Ok(GaussianRational::new(re, im))
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Obj { re: String, im: String },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Str(s) => parse_gaussian(&s).map_err(de::Error::custom),
            Repr::Obj { re, im } => Ok(GaussianRational::new(
                parse_rational(&re).map_err(de::Error::custom)?,
                parse_rational(&im).map_err(de::Error::custom)?,
            )),
        }
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn bernoulli_table() -> &'static Mutex<Vec<Rational>> {
    static TABLE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![Rational::one()]))
}

/// Bernoulli number `B_n` with the convention `B_1 = -1/2`.
///
/// Values are memoized; the table is extended through the recurrence
/// `sum_{j=0}^{n} C(n+1, j) B_j = 0`.
pub fn bernoulli(n: usize) -> Rational {
    let mut table = bernoulli_table().lock().unwrap_or_else(|p| p.into_inner());
    while table.len() <= n {
        let m = table.len() as u64;
        let mut acc = Rational::zero();
        for (j, b) in table.iter().enumerate() {
            acc += Rational::from_integer(binomial(m + 1, j as u64)) * b;
        }
        let next = -acc / Rational::from_integer(BigInt::from(m + 1));
        table.push(next);
    }
    table[n].clone()
}

/// `sigma_k(n)`: sum of the k-th powers of the positive divisors of n.
pub fn sigma(k: u32, n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::InvalidArgument("sigma is undefined at n = 0".into()));
    }
    let mut acc = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                acc += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    Ok(acc)
}

pub fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli(0), rat_int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), rat_int(0));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    // independent check of B_4 through the defining recurrence at n = 4
    #[test]
    fn bernoulli_four_from_recurrence_by_hand() {
        // C(5,0)B0 + C(5,1)B1 + C(5,2)B2 + C(5,3)B3 + C(5,4)B4 = 0
        let partial = rat_int(1) + rat_int(5) * rat(-1, 2) + rat_int(10) * rat(1, 6);
        assert_eq!(-partial / rat_int(5), rat(-1, 30));
    }

    #[test]
    fn bernoulli_recurrence_to_40() {
        for n in 1..=40u64 {
            let s: Rational = (0..=n)
                .map(|j| Rational::from_integer(binomial(n + 1, j)) * bernoulli(j as usize))
                .sum();
            assert!(s.is_zero(), "recurrence fails at n={n}");
        }
        for n in (3..40).step_by(2) {
            assert!(bernoulli(n).is_zero());
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(3, 2).unwrap(), BigInt::from(9));
        assert_eq!(sigma(1, 6).unwrap(), BigInt::from(12));
        assert_eq!(sigma(5, 1).unwrap(), BigInt::from(1));
        assert_eq!(sigma(0, 12).unwrap(), BigInt::from(6));
        assert!(sigma(1, 0).is_err());
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(parse_gaussian("i").unwrap(), GaussianRational::i());
        assert_eq!(parse_gaussian("-2/3*i").unwrap(), GaussianRational::new(rat_int(0), rat(-2, 3)));
        assert_eq!(parse_gaussian("-1-i").unwrap(), GaussianRational::new(rat_int(-1), rat_int(-1)));
        assert_eq!(parse_gaussian("1/2+3/4*i").unwrap(), GaussianRational::new(rat(1, 2), rat(3, 4)));
        assert!(parse_gaussian("1+x*i").is_err());
        for z in [GaussianRational::new(rat(-5, 3), rat(7, 2)), GaussianRational::new(rat(2, 1), rat(-1, 9))] {
            assert_eq!(parse_gaussian(&z.to_string()).unwrap(), z);
        }
        let g = GaussianRational::new(rat(1, 2), rat(-3, 4));
        assert_eq!(g.to_string(), "1/2-3/4*i");
        let js = serde_json::to_string(&g).unwrap();
        assert_eq!(js, r#"{"re":"1/2","im":"-3/4"}"#);
        let back: GaussianRational = serde_json::from_str(&js).unwrap();
        assert_eq!(back, g);
        let s: GaussianRational = serde_json::from_str("\"i\"").unwrap();
        assert_eq!(s, GaussianRational::i());
    }

    #[test]
    fn i_powers_and_inverse() {
        assert_eq!(GaussianRational::i_pow(2), -GaussianRational::one());
        assert_eq!(GaussianRational::i_pow(-1), -GaussianRational::i());
        let g = GaussianRational::new(rat(3, 2), rat(-5, 7));
        assert_eq!(&g * &g.inv().unwrap(), GaussianRational::one());
        assert!(GaussianRational::zero().inv().is_err());
        assert_eq!(g.conj().conj(), g);
    }

    fn coprime_pairs() -> impl Strategy<Value = (u64, u64)> {
        (1u64..=10_000, 1u64..=10_000).prop_filter("coprime", |(a, b)| a.gcd(b) == 1)
    }

    fn gauss() -> impl Strategy<Value = GaussianRational> {
        (-20i64..20, 1i64..9, -20i64..20, 1i64..9)
            .prop_map(|(a, b, c, d)| GaussianRational::new(rat(a, b), rat(c, d)))
    }

    proptest! {
        #[test]
        fn sigma_is_multiplicative((m, n) in coprime_pairs(), k in 0u32..4) {
            prop_assert_eq!(sigma(k, m * n).unwrap(), sigma(k, m).unwrap() * sigma(k, n).unwrap());
        }

        #[test]
        fn gaussian_field_laws(a in gauss(), b in gauss(), c in gauss()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }
}
