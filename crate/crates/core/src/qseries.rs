//! Truncated q-series with exponents counted in units of 1/24 and jet-ring
//! coefficients, plus the Dedekind eta function and Eisenstein series.
//!
//! A series carries a `cut`: every exponent `n < cut` is exact, nothing is
//! known at or beyond it. Products shift the validity window by the other
//! factor's valuation, so a product is exact below
//! `min(cut_a + val_b, cut_b + val_a)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::One;

use crate::arith::{bernoulli, rat_int, sigma, GaussianRational, Rational};
use crate::error::{Error, Result};
use crate::jet::JetElement;

/// Exponent units per whole power of q.
pub const Q_UNIT: i64 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QXSeries {
    terms: BTreeMap<i64, JetElement>,
    cut: i64,
    d_cap: usize,
    z_cap: usize,
}

impl QXSeries {
    pub fn zero(d_cap: usize, z_cap: usize, cut: i64) -> Self {
        Self { terms: BTreeMap::new(), cut, d_cap, z_cap }
    }

    pub fn one(d_cap: usize, z_cap: usize, cut: i64) -> Self {
        Self::monomial(JetElement::one(d_cap, z_cap), 0, cut)
    }

    /// `c * q^{n/24}` known below `cut`.
    pub fn monomial(c: JetElement, n: i64, cut: i64) -> Self {
        let (d_cap, z_cap) = c.caps();
        let mut out = Self::zero(d_cap, z_cap, cut);
        out.insert(n, c);
        out
    }

    pub fn from_jet(c: JetElement, cut: i64) -> Self {
        Self::monomial(c, 0, cut)
    }

    /// Builds a series from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms(
        d_cap: usize,
        z_cap: usize,
        cut: i64,
        terms: impl IntoIterator<Item = (i64, JetElement)>,
    ) -> Result<Self> {
        let mut out = Self::zero(d_cap, z_cap, cut);
        for (n, c) in terms {
            if c.caps() != (d_cap, z_cap) {
                return Err(Error::CapMismatch(d_cap, z_cap, c.d_cap(), c.z_cap()));
            }
            out.accumulate(n, &c);
        }
        Ok(out)
    }

    fn insert(&mut self, n: i64, c: JetElement) {
        if n < self.cut && !c.is_zero() {
            self.terms.insert(n, c);
        }
    }

    fn accumulate(&mut self, n: i64, c: &JetElement) {
        if n >= self.cut {
            return;
        }
        match self.terms.get_mut(&n) {
            Some(slot) => {
                *slot = &*slot + c;
                if slot.is_zero() {
                    self.terms.remove(&n);
                }
            }
            None => self.insert(n, c.clone()),
        }
    }

    pub fn cut(&self) -> i64 {
        self.cut
    }

    pub fn caps(&self) -> (usize, usize) {
        (self.d_cap, self.z_cap)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient; the cut for the zero series.
    pub fn valuation(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(self.cut)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &JetElement)> + '_ {
        self.terms.iter().map(|(n, c)| (*n, c))
    }

    pub fn exponents(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.keys().copied()
    }

    /// Coefficient of `q^{n/24}`; zero when absent, error at or beyond the cut.
    pub fn coeff(&self, n: i64) -> Result<JetElement> {
        if n >= self.cut {
            return Err(Error::InsufficientCut { need: n + 1, have: self.cut });
        }
        Ok(self
            .terms
            .get(&n)
            .cloned()
            .unwrap_or_else(|| JetElement::zero(self.d_cap, self.z_cap)))
    }

    /// Coefficient of `q^n` for whole powers.
    pub fn q_coeff(&self, n: i64) -> Result<JetElement> {
        self.coeff(n * Q_UNIT)
    }

    /// Scalar (eps^0 Z^0) part of the coefficient of `q^n`.
    pub fn q_scalar(&self, n: i64) -> Result<GaussianRational> {
        Ok(self.q_coeff(n)?.constant_term().clone())
    }

    fn check_caps(&self, other: &Self) -> Result<()> {
        if self.caps() != other.caps() {
            return Err(Error::CapMismatch(self.d_cap, self.z_cap, other.d_cap, other.z_cap));
        }
        Ok(())
    }

    /// Lowers the cut, dropping terms at or beyond it.
    pub fn truncate(&self, cut: i64) -> Self {
        let cut = cut.min(self.cut);
        let terms = self.terms.range(..cut).map(|(n, c)| (*n, c.clone())).collect();
        Self { terms, cut, ..self.empty_like() }
    }

    fn empty_like(&self) -> Self {
        Self::zero(self.d_cap, self.z_cap, self.cut)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_caps(other)?;
        let mut out = Self::zero(self.d_cap, self.z_cap, self.cut.min(other.cut));
        for (n, c) in self.terms().chain(other.terms()) {
            out.accumulate(n, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(n, c)| (*n, -c)).collect();
        Self { terms, ..self.empty_like() }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_caps(other)?;
        let cut = (self.cut + other.valuation()).min(other.cut + self.valuation());
        let mut out = Self::zero(self.d_cap, self.z_cap, cut);
        for (n1, a) in self.terms() {
            for (n2, b) in other.terms() {
                if n1 + n2 >= cut {
                    break;
                }
                out.accumulate(n1 + n2, &(a * b));
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by a fixed jet.
    pub fn mul_jet(&self, c: &JetElement) -> Result<Self> {
        let mut out = self.empty_like();
        for (n, a) in self.terms() {
            out.insert(n, a.try_mul(c)?);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = self.empty_like();
        for (n, a) in self.terms() {
            out.insert(n, a.scale(c));
        }
        out
    }

    /// Multiplies by `q^{k/24}`.
    pub fn shift(&self, k: i64) -> Self {
        let terms = self.terms.iter().map(|(n, c)| (n + k, c.clone())).collect();
        Self { terms, cut: self.cut + k, ..self.empty_like() }
    }

    /// Applies a coefficientwise map that may change caps (e.g. eps-slicing).
    pub fn map_coeffs(
        &self,
        d_cap: usize,
        z_cap: usize,
        mut f: impl FnMut(&JetElement) -> Result<JetElement>,
    ) -> Result<Self> {
        let mut out = Self::zero(d_cap, z_cap, self.cut);
        for (n, c) in self.terms() {
            let v = f(c)?;
            if v.caps() != (d_cap, z_cap) {
                return Err(Error::CapMismatch(d_cap, z_cap, v.d_cap(), v.z_cap()));
            }
            out.insert(n, v);
        }
        Ok(out)
    }

    /// Multiplicative inverse. The lowest-order coefficient must be a unit jet;
    /// the result is exact below `cut - 2 * valuation`.
    pub fn inv(&self) -> Result<Self> {
        let Some((&v, lead)) = self.terms.iter().next() else {
            return Err(Error::NotUnit("zero series".into()));
        };
        let lead_inv = lead.inv().map_err(|_| Error::NotUnit(format!("leading coefficient {lead}")))?;
        // self = q^v * lead * (1 + r)
        let rel_cut = self.cut - v;
        let r: Vec<(i64, JetElement)> = self
            .terms
            .iter()
            .skip(1)
            .map(|(n, c)| (n - v, c * &lead_inv))
            .collect();
        let mut u: BTreeMap<i64, JetElement> = BTreeMap::new();
        u.insert(0, JetElement::one(self.d_cap, self.z_cap));
        for n in 1..rel_cut {
            let mut acc = JetElement::zero(self.d_cap, self.z_cap);
            let mut touched = false;
            for (k, rk) in &r {
                if *k > n {
                    break;
                }
                if let Some(un) = u.get(&(n - k)) {
                    acc = &acc - &(rk * un);
                    touched = true;
                }
            }
            if touched && !acc.is_zero() {
                u.insert(n, acc);
            }
        }
        let mut out = Self::zero(self.d_cap, self.z_cap, rel_cut - v);
        for (n, c) in u {
            out.insert(n - v, &c * &lead_inv);
        }
        Ok(out)
    }

    /// Exponential of a series with no negative exponents whose `q^0`
    /// coefficient is nilpotent. The cut is preserved.
    pub fn exp(&self) -> Result<Self> {
        if self.valuation() < 0 {
            return Err(Error::NotNilpotent("series has negative q-exponents".into()));
        }
        let c0 = self.terms.get(&0).cloned().unwrap_or_else(|| JetElement::zero(self.d_cap, self.z_cap));
        if !c0.is_nilpotent() {
            return Err(Error::NotNilpotent(format!("q^0 coefficient {c0}")));
        }
        let head = c0.exp()?;
        // g = exp(h) with h the positive part: n g_n = sum_k k h_k g_{n-k}
        let h: Vec<(i64, &JetElement)> = self.terms().filter(|(n, _)| *n > 0).collect();
        let mut g: BTreeMap<i64, JetElement> = BTreeMap::new();
        g.insert(0, JetElement::one(self.d_cap, self.z_cap));
        for n in 1..self.cut {
            let mut acc = JetElement::zero(self.d_cap, self.z_cap);
            let mut touched = false;
            for (k, hk) in &h {
                if *k > n {
                    break;
                }
                if let Some(gn) = g.get(&(n - k)) {
                    acc = &acc + &(*hk * gn).scale_rational(&rat_int(*k));
                    touched = true;
                }
            }
            if touched && !acc.is_zero() {
                g.insert(n, acc.scale_rational(&Rational::new(1.into(), n.into())));
            }
        }
        let mut out = self.empty_like();
        for (n, c) in g {
            out.insert(n, &c * &head);
        }
        Ok(out)
    }

    /// Integer power; negative exponents go through [`QXSeries::inv`].
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one(self.d_cap, self.z_cap, self.cut));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc: Option<Self> = None;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.try_mul(&sq)?,
                    None => sq.clone(),
                });
            }
            e >>= 1;
            if e > 0 {
                sq = sq.try_mul(&sq)?;
            }
        }
        Ok(acc.expect("nonzero exponent"))
    }

    /// Numerical value at `q = exp(2 pi i tau)`, with each coefficient
    /// collapsed to a complex number by `coef`.
    pub fn eval(&self, tau: Complex64, mut coef: impl FnMut(&JetElement) -> Complex64) -> Complex64 {
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        self.terms()
            .map(|(n, c)| coef(c) * (two_pi_i * tau * (n as f64 / Q_UNIT as f64)).exp())
            .sum()
    }

    /// True when every exponent is a whole power of q.
    pub fn has_integral_exponents(&self) -> bool {
        self.exponents().all(|n| n % Q_UNIT == 0)
    }
}

impl fmt::Display for QXSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, c) in self.terms() {
            writeln!(f, "q^({n}/24): {c}")?;
        }
        write!(f, "O(q^({}/24))", self.cut)
    }
}

/// `prod_{j=1}^{J} (1 - q^j)` exact below `cut` (whole powers, scalar coefficients).
pub fn euler_product(d_cap: usize, z_cap: usize, cut: i64) -> Result<QXSeries> {
    let mut acc = QXSeries::one(d_cap, z_cap, cut);
    let mut j = 1;
    while j * Q_UNIT < cut {
        let factor = QXSeries::from_terms(
            d_cap,
            z_cap,
            cut,
            [
                (0, JetElement::one(d_cap, z_cap)),
                (j * Q_UNIT, -&JetElement::one(d_cap, z_cap)),
            ],
        )?;
        acc = acc.try_mul(&factor)?;
        j += 1;
    }
    Ok(acc)
}

/// `eta(tau)^k = q^{k/24} prod (1 - q^j)^k`, exact below `cut`.
pub fn eta_pow(k: i64, cut: i64, d_cap: usize, z_cap: usize) -> Result<QXSeries> {
    if cut <= 0 {
        return Err(Error::InvalidArgument(format!("cut must be positive, got {cut}")));
    }
    let rel = (cut - k).max(1);
    let c = euler_product(d_cap, z_cap, rel)?;
    Ok(c.pow(k)?.truncate(rel).shift(k))
}

fn check_weight(k2: i64) -> Result<()> {
    if k2 <= 0 || k2 % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "Eisenstein weight must be a positive even integer, got {k2}"
        )));
    }
    Ok(())
}

/// Constant term `-B_k / (2k)` of the unnormalized series of weight `k`.
pub fn eisenstein_constant(k2: i64) -> Result<Rational> {
    check_weight(k2)?;
    Ok(-bernoulli(k2 as usize) / rat_int(2 * k2))
}

/// `G_k(tau) = -B_k/(2k) + sum_{n>=1} sigma_{k-1}(n) q^n`.
pub fn eisenstein_raw(k2: i64, cut: i64, d_cap: usize, z_cap: usize) -> Result<QXSeries> {
    let c0 = eisenstein_constant(k2)?;
    let mut out = QXSeries::zero(d_cap, z_cap, cut);
    out.insert(0, JetElement::constant(d_cap, z_cap, c0.into()));
    let mut n = 1;
    while n * Q_UNIT < cut {
        let s = sigma((k2 - 1) as u32, n as u64)?;
        out.insert(
            n * Q_UNIT,
            JetElement::constant(d_cap, z_cap, Rational::from_integer(s).into()),
        );
        n += 1;
    }
    Ok(out)
}

/// Eisenstein series rescaled to constant term 1.
pub fn eisenstein_normalized(k2: i64, cut: i64, d_cap: usize, z_cap: usize) -> Result<QXSeries> {
    let c0 = eisenstein_constant(k2)?;
    let raw = eisenstein_raw(k2, cut, d_cap, z_cap)?;
    Ok(raw.scale(&(Rational::one() / c0).into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn scalar_coeffs(s: &QXSeries, n: usize) -> Vec<Rational> {
        (0..n as i64).map(|k| s.q_scalar(k).unwrap().re).collect()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn geometric_inverse() {
        let cut = 10 * Q_UNIT;
        let one_minus_q = QXSeries::from_terms(
            0,
            0,
            cut,
            [(0, JetElement::one(0, 0)), (Q_UNIT, -&JetElement::one(0, 0))],
        )
        .unwrap();
        let geo = QXSeries::from_terms(
            0,
            0,
            cut,
            (0..10).map(|n| (n * Q_UNIT, JetElement::one(0, 0))),
        )
        .unwrap();
        let p = one_minus_q.try_mul(&geo).unwrap();
        assert_eq!(p, QXSeries::one(0, 0, cut));
        assert_eq!(one_minus_q.inv().unwrap(), geo);
    }

    #[test]
    fn exp_of_zero_is_one() {
        let z = QXSeries::zero(2, 2, 48);
        assert_eq!(z.exp().unwrap(), QXSeries::one(2, 2, 48));
    }

    #[test]
    fn exp_rejects_non_nilpotent_constant() {
        let s = QXSeries::one(1, 1, 48);
        assert!(matches!(s.exp(), Err(Error::NotNilpotent(_))));
    }

    #[test]
    fn exp_matches_log_derivative_definition() {
        // exp(q) = 1 + q + q^2/2 + q^3/6
        let s = QXSeries::monomial(JetElement::one(0, 0), Q_UNIT, 4 * Q_UNIT);
        let e = s.exp().unwrap();
        assert_eq!(
            scalar_coeffs(&e, 4),
            vec![rat_int(1), rat_int(1), rat(1, 2), rat(1, 6)]
        );
    }

    #[test]
    fn eta_leading_terms() {
        let e = eta_pow(1, 3 * Q_UNIT, 0, 0).unwrap();
        assert_eq!(e.valuation(), 1);
        assert_eq!(e.coeff(1).unwrap(), JetElement::one(0, 0));
        assert_eq!(e.coeff(25).unwrap(), -&JetElement::one(0, 0));
    }

    #[test]
    fn eta_cube_by_direct_product() {
        let cut = 6 * Q_UNIT;
        let e1 = eta_pow(1, cut, 0, 0).unwrap();
        let direct = e1.try_mul(&e1).unwrap().try_mul(&e1).unwrap();
        let e3 = eta_pow(3, cut, 0, 0).unwrap();
        assert_eq!(direct.truncate(e3.cut()), e3);
        // q^{1/8}(1 - 3q + 5q^3 - 7q^6 ...)
        let got: Vec<_> = e3.terms().map(|(n, c)| (n, c.constant_term().re.clone())).collect();
        assert_eq!(
            got,
            vec![(3, rat_int(1)), (27, rat_int(-3)), (75, rat_int(5))]
        );
    }

    #[test]
    fn eta_inverse_round_trip() {
        let cut = 5 * Q_UNIT;
        let e3 = eta_pow(3, cut, 1, 1).unwrap();
        let p = e3.inv().unwrap().try_mul(&e3).unwrap();
        assert!(p.cut() >= cut - 6);
        assert_eq!(p, QXSeries::one(1, 1, p.cut()));
    }

    #[test]
    fn eta_24_is_integral() {
        let delta = eta_pow(24, 12 * Q_UNIT, 0, 0).unwrap();
        assert!(delta.has_integral_exponents());
        for (_, c) in delta.terms() {
            assert!(c.constant_term().re.is_integer());
        }
        // Ramanujan tau: 1, -24, 252, -1472
        assert_eq!(delta.q_scalar(2).unwrap().re, rat_int(-24));
        assert_eq!(delta.q_scalar(4).unwrap().re, rat_int(-1472));
    }

    #[test]
    fn eisenstein_constants() {
        let g4 = eisenstein_raw(4, 3 * Q_UNIT, 0, 0).unwrap();
        assert_eq!(g4.q_scalar(0).unwrap().re, rat(1, 240));
        assert_eq!(g4.q_scalar(1).unwrap().re, rat_int(1));
        let g2 = eisenstein_raw(2, 3 * Q_UNIT, 0, 0).unwrap();
        assert_eq!(g2.q_scalar(0).unwrap().re, rat(-1, 24));
        assert!(eisenstein_raw(3, 24, 0, 0).is_err());
        assert!(eisenstein_raw(0, 24, 0, 0).is_err());
    }

    #[test]
    fn normalized_eisenstein_tables() {
        let cut = 4 * Q_UNIT;
        let e = |k| scalar_coeffs(&eisenstein_normalized(k, cut, 0, 0).unwrap(), 4);
        assert_eq!(e(4), ints(&[1, 240, 2160, 6720]));
        assert_eq!(e(6), ints(&[1, -504, -16632, -122976]));
        assert_eq!(e(2), ints(&[1, -24, -72, -96]));
    }

    #[test]
    fn truncation_window_of_products() {
        let a = QXSeries::one(0, 0, 48).shift(3);
        let b = QXSeries::one(0, 0, 72);
        let p = a.try_mul(&b).unwrap();
        assert_eq!(p.cut(), (51_i64).min(72 + 3));
        assert!(p.coeff(p.cut()).is_err());
    }
}
