//! The truncated bivariate ring `Q(i)[eps]/(eps^{d+1}) ⊗ Q(i)[Z]/(Z^{z+1})`.
//!
//! `eps` grades cohomological degree (scaled Chern roots are `eps * a`),
//! `Z` is the scaled elliptic variable. Coefficients are stored densely,
//! row-major in the eps degree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::arith::{factorial, GaussianRational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JetElement {
    d_cap: usize,
    z_cap: usize,
    coeffs: Vec<GaussianRational>,
}

impl JetElement {
    pub fn zero(d_cap: usize, z_cap: usize) -> Self {
        Self {
            d_cap,
            z_cap,
            coeffs: vec![GaussianRational::zero(); (d_cap + 1) * (z_cap + 1)],
        }
    }

    pub fn one(d_cap: usize, z_cap: usize) -> Self {
        Self::constant(d_cap, z_cap, GaussianRational::one())
    }

    pub fn constant(d_cap: usize, z_cap: usize, c: GaussianRational) -> Self {
        let mut out = Self::zero(d_cap, z_cap);
        out.coeffs[0] = c;
        out
    }

    /// `c * eps^i * Z^j`, or zero when the monomial lies beyond the caps.
    pub fn monomial(d_cap: usize, z_cap: usize, c: GaussianRational, i: usize, j: usize) -> Self {
        let mut out = Self::zero(d_cap, z_cap);
        if i <= d_cap && j <= z_cap {
            let k = out.idx(i, j);
            out.coeffs[k] = c;
        }
        out
    }

    /// `a * eps`: a scaled Chern root with coefficient `a`.
    pub fn eps_times(d_cap: usize, z_cap: usize, a: GaussianRational) -> Self {
        Self::monomial(d_cap, z_cap, a, 1, 0)
    }

    /// `a * Z`.
    pub fn z_times(d_cap: usize, z_cap: usize, a: GaussianRational) -> Self {
        Self::monomial(d_cap, z_cap, a, 0, 1)
    }

    pub fn d_cap(&self) -> usize {
        self.d_cap
    }

    pub fn z_cap(&self) -> usize {
        self.z_cap
    }

    pub fn caps(&self) -> (usize, usize) {
        (self.d_cap, self.z_cap)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.z_cap + 1) + j
    }

    pub fn coeff(&self, i: usize, j: usize) -> Result<&GaussianRational> {
        if i > self.d_cap || j > self.z_cap {
            return Err(Error::IndexOutOfRange { i, j, d_cap: self.d_cap, z_cap: self.z_cap });
        }
        Ok(&self.coeffs[self.idx(i, j)])
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, c: GaussianRational) -> Result<()> {
        if i > self.d_cap || j > self.z_cap {
            return Err(Error::IndexOutOfRange { i, j, d_cap: self.d_cap, z_cap: self.z_cap });
        }
        let k = self.idx(i, j);
        self.coeffs[k] = c;
        Ok(())
    }

    pub fn constant_term(&self) -> &GaussianRational {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// True when the (eps^0, Z^0) coefficient vanishes, i.e. the element is nilpotent.
    pub fn is_nilpotent(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    /// Iterates over nonzero coefficients as `(i, j, c)` in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &GaussianRational)> + '_ {
        let w = self.z_cap + 1;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (k / w, k % w, c))
    }

    fn check_caps(&self, other: &Self) -> Result<()> {
        if self.caps() != other.caps() {
            return Err(Error::CapMismatch(self.d_cap, self.z_cap, other.d_cap, other.z_cap));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_caps(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(self.with_coeffs(coeffs))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_caps(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(self.with_coeffs(coeffs))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_caps(other)?;
        let mut out = Self::zero(self.d_cap, self.z_cap);
        let a_terms: Vec<_> = self.terms().collect();
        let b_terms: Vec<_> = other.terms().collect();
        for &(i1, j1, a) in &a_terms {
            for &(i2, j2, b) in &b_terms {
                let (i, j) = (i1 + i2, j1 + j2);
                if i <= self.d_cap && j <= self.z_cap {
                    let k = out.idx(i, j);
                    out.coeffs[k] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    fn with_coeffs(&self, coeffs: Vec<GaussianRational>) -> Self {
        Self { d_cap: self.d_cap, z_cap: self.z_cap, coeffs }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        self.with_coeffs(coeffs)
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.scale(r)).collect();
        self.with_coeffs(coeffs)
    }

    /// Largest power of a nilpotent element that can survive truncation.
    fn nilpotency_bound(&self) -> usize {
        self.d_cap + self.z_cap
    }

    /// Evaluates `sum_k series[k] * self^k` for nilpotent `self`; terms beyond the
    /// nilpotency bound vanish and are skipped.
    pub fn compose(&self, series: &[GaussianRational]) -> Result<Self> {
        if !self.is_nilpotent() {
            return Err(Error::NotNilpotent(format!("{self}")));
        }
        let n = series.len().min(self.nilpotency_bound() + 1);
        let mut out = Self::zero(self.d_cap, self.z_cap);
        // Horner
        for c in series[..n].iter().rev() {
            out = out.try_mul(self)?;
            out.coeffs[0] += c;
        }
        Ok(out)
    }

    /// Truncated exponential; the argument must be nilpotent.
    pub fn exp(&self) -> Result<Self> {
        if !self.is_nilpotent() {
            return Err(Error::NotNilpotent(format!("{self}")));
        }
        let series: Vec<GaussianRational> = (0..=self.nilpotency_bound() as u64)
            .map(|k| GaussianRational::real(Rational::new(1.into(), factorial(k))))
            .collect();
        self.compose(&series)
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inv(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::NotUnit(format!("{self}")));
        }
        let c0_inv = c0.inv()?;
        // self = c0 (1 + n); 1/self = c0^{-1} sum (-n)^k
        let mut n = self.scale(&c0_inv);
        n.coeffs[0] = GaussianRational::zero();
        let geometric: Vec<GaussianRational> = (0..=n.nilpotency_bound())
            .map(|k| if k % 2 == 0 { GaussianRational::one() } else { -GaussianRational::one() })
            .collect();
        Ok(n.compose(&geometric)?.scale(&c0_inv))
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.d_cap, self.z_cap);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.try_mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Re-embeds into different caps: higher terms are dropped, new slots are zero.
    pub fn recap(&self, d_cap: usize, z_cap: usize) -> Self {
        let mut out = Self::zero(d_cap, z_cap);
        for (i, j, c) in self.terms() {
            if i <= d_cap && j <= z_cap {
                let k = out.idx(i, j);
                out.coeffs[k] = c.clone();
            }
        }
        out
    }

    /// Substitutes `eps -> -eps` (the effect of dualising every root).
    pub fn negate_eps(&self) -> Self {
        let mut out = self.clone();
        let w = self.z_cap + 1;
        for (k, c) in out.coeffs.iter_mut().enumerate() {
            if (k / w) % 2 == 1 {
                *c = -&*c;
            }
        }
        out
    }

    /// The eps^i slice as a Z-polynomial with eps cap 0.
    pub fn eps_slice(&self, i: usize) -> Result<Self> {
        if i > self.d_cap {
            return Err(Error::IndexOutOfRange { i, j: 0, d_cap: self.d_cap, z_cap: self.z_cap });
        }
        let mut out = Self::zero(0, self.z_cap);
        for j in 0..=self.z_cap {
            out.coeffs[j] = self.coeffs[self.idx(i, j)].clone();
        }
        Ok(out)
    }
}

impl Add for &JetElement {
    type Output = JetElement;
    fn add(self, rhs: &JetElement) -> JetElement {
        self.try_add(rhs).expect("jet caps must agree")
    }
}

impl Sub for &JetElement {
    type Output = JetElement;
    fn sub(self, rhs: &JetElement) -> JetElement {
        self.try_sub(rhs).expect("jet caps must agree")
    }
}

impl Mul for &JetElement {
    type Output = JetElement;
    fn mul(self, rhs: &JetElement) -> JetElement {
        self.try_mul(rhs).expect("jet caps must agree")
    }
}

impl Neg for &JetElement {
    type Output = JetElement;
    fn neg(self) -> JetElement {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        JetElement { d_cap: self.d_cap, z_cap: self.z_cap, coeffs }
    }
}

fn fmt_coeff(c: &GaussianRational) -> String {
    if !c.re.is_zero() && !c.im.is_zero() {
        format!("({c})")
    } else {
        c.to_string()
    }
}

impl fmt::Display for JetElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", fmt_coeff(c))?;
            match i {
                0 => {}
                1 => write!(f, "*eps")?,
                _ => write!(f, "*eps^{i}")?,
            }
            match j {
                0 => {}
                1 => write!(f, "*Z")?,
                _ => write!(f, "*Z^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};
    use proptest::prelude::*;

    fn g(n: i64, d: i64) -> GaussianRational {
        GaussianRational::from_ratio(n, d)
    }

    #[test]
    fn truncated_products() {
        let one = JetElement::one(1, 0);
        let e = JetElement::eps_times(1, 0, g(1, 1));
        assert_eq!(&(&one + &e) * &(&one - &e), one);

        let e = JetElement::eps_times(2, 2, g(1, 1));
        let z = JetElement::z_times(2, 2, g(1, 1));
        assert_eq!(&e * &z, JetElement::monomial(2, 2, g(1, 1), 1, 1));
    }

    #[test]
    fn cap_mismatch_is_an_error() {
        let a = JetElement::one(1, 0);
        let b = JetElement::one(2, 0);
        assert!(matches!(a.try_mul(&b), Err(Error::CapMismatch(..))));
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn exp_taylor() {
        let a = g(3, 5);
        let x = JetElement::eps_times(2, 0, a.clone());
        let ex = x.exp().unwrap();
        assert_eq!(ex.coeff(0, 0).unwrap(), &g(1, 1));
        assert_eq!(ex.coeff(1, 0).unwrap(), &a);
        assert_eq!(ex.coeff(2, 0).unwrap(), &(&a * &a).scale(&rat(1, 2)));
        assert!(JetElement::zero(3, 3).exp().unwrap().is_one());
        assert!(JetElement::one(1, 1).exp().is_err());
    }

    #[test]
    fn exp_inverse_pair_by_direct_product() {
        let x = JetElement::eps_times(4, 0, g(1, 1));
        let p = &x.exp().unwrap() * &(-&x).exp().unwrap();
        assert!(p.is_one());
    }

    #[test]
    fn inverse_examples() {
        let x = JetElement::eps_times(3, 0, g(1, 1));
        let inv = (&JetElement::one(3, 0) - &x).inv().unwrap();
        for i in 0..=3 {
            assert_eq!(inv.coeff(i, 0).unwrap(), &g(1, 1));
        }
        let two = JetElement::constant(2, 2, g(2, 1));
        assert_eq!(two.inv().unwrap(), JetElement::constant(2, 2, g(1, 2)));
        assert!(matches!(x.inv(), Err(Error::NotUnit(_))));
    }

    #[test]
    fn coefficient_access() {
        let mut a = JetElement::one(1, 1);
        a.set_coeff(1, 1, g(3, 1)).unwrap();
        assert_eq!(a.coeff(1, 1).unwrap(), &g(3, 1));
        assert_eq!(JetElement::one(0, 0).coeff(0, 0).unwrap(), &g(1, 1));
        assert!(a.coeff(2, 0).is_err());
        assert_eq!(a.to_string(), "1 + 3*eps*Z");
    }

    fn jet(d: usize, z: usize) -> impl Strategy<Value = JetElement> {
        proptest::collection::vec((-6i64..6, 1i64..4, -3i64..3), (d + 1) * (z + 1)).prop_map(
            move |v| {
                let mut j = JetElement::zero(d, z);
                for (k, (a, b, c)) in v.into_iter().enumerate() {
                    j.coeffs[k] = GaussianRational::new(rat(a, b), rat_int(c));
                }
                j
            },
        )
    }

    fn nil(d: usize, z: usize) -> impl Strategy<Value = JetElement> {
        jet(d, z).prop_map(|mut j| {
            j.coeffs[0] = GaussianRational::zero();
            j
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ring_laws(a in jet(2, 2), b in jet(2, 2), c in jet(2, 2)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &JetElement::one(2, 2), a.clone());
        }

        #[test]
        fn exp_is_a_homomorphism(a in nil(2, 2), b in nil(2, 2)) {
            let lhs = (&a + &b).exp().unwrap();
            let rhs = &a.exp().unwrap() * &b.exp().unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn double_inverse(mut a in jet(2, 1)) {
            if a.constant_term().is_zero() {
                a.coeffs[0] = GaussianRational::one();
            }
            let ai = a.inv().unwrap();
            prop_assert!((&a * &ai).is_one());
            prop_assert_eq!(ai.inv().unwrap(), a);
        }

        #[test]
        fn truncation_commutes_with_products(a in jet(3, 3), b in jet(3, 3)) {
            let big = &a * &b;
            let small = &a.recap(2, 1) * &b.recap(2, 1);
            prop_assert_eq!(big.recap(2, 1), small);
        }
    }
}
