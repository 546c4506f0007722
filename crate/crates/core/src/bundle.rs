//! Splitting-principle bundles: multisets of jet-ring roots with integer
//! multiplicities, their Chern characters and Todd classes.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::arith::{factorial, rat_int, GaussianRational, Rational};
use crate::error::{Error, Result};
use crate::jet::JetElement;
use crate::qseries::QXSeries;

/// A virtual bundle given by its formal roots. Negative multiplicities are
/// virtual summands.
#[derive(Clone, Debug, PartialEq)]
pub struct RootBundle {
    d_cap: usize,
    z_cap: usize,
    roots: Vec<(JetElement, i64)>,
}

impl RootBundle {
    pub fn empty(d_cap: usize, z_cap: usize) -> Self {
        Self { d_cap, z_cap, roots: Vec::new() }
    }

    pub fn from_roots(
        d_cap: usize,
        z_cap: usize,
        roots: impl IntoIterator<Item = (JetElement, i64)>,
    ) -> Result<Self> {
        let mut b = Self::empty(d_cap, z_cap);
        for (r, m) in roots {
            b.push(r, m)?;
        }
        Ok(b)
    }

    /// Roots `eps * a_i`, each with multiplicity one.
    pub fn from_eps_roots(d_cap: usize, z_cap: usize, a: &[GaussianRational]) -> Self {
        Self {
            d_cap,
            z_cap,
            roots: a.iter().map(|x| (JetElement::eps_times(d_cap, z_cap, x.clone()), 1)).collect(),
        }
    }

    /// `rank` copies of the trivial line (root 0); a negative rank is virtual.
    pub fn trivial(rank: i64, d_cap: usize, z_cap: usize) -> Self {
        let mut b = Self::empty(d_cap, z_cap);
        if rank != 0 {
            b.roots.push((JetElement::zero(d_cap, z_cap), rank));
        }
        b
    }

    pub fn line(root: JetElement) -> Self {
        let (d_cap, z_cap) = root.caps();
        Self { d_cap, z_cap, roots: vec![(root, 1)] }
    }

    pub fn push(&mut self, root: JetElement, mult: i64) -> Result<()> {
        if root.caps() != (self.d_cap, self.z_cap) {
            return Err(Error::CapMismatch(self.d_cap, self.z_cap, root.d_cap(), root.z_cap()));
        }
        if mult != 0 {
            self.roots.push((root, mult));
        }
        Ok(())
    }

    pub fn caps(&self) -> (usize, usize) {
        (self.d_cap, self.z_cap)
    }

    pub fn roots(&self) -> &[(JetElement, i64)] {
        &self.roots
    }

    pub fn rank(&self) -> i64 {
        self.roots.iter().map(|(_, m)| m).sum()
    }

    pub fn dual(&self) -> Self {
        Self { roots: self.roots.iter().map(|(r, m)| (-r, *m)).collect(), ..self.clone() }
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_caps(other)?;
        let mut out = self.clone();
        out.roots.extend(other.roots.iter().cloned());
        Ok(out)
    }

    /// Roots are pairwise sums, multiplicities multiply.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check_caps(other)?;
        let mut out = Self::empty(self.d_cap, self.z_cap);
        for (a, m) in &self.roots {
            for (b, n) in &other.roots {
                out.roots.push((a + b, m * n));
            }
        }
        Ok(out)
    }

    /// `k` copies (negative `k` negates every multiplicity).
    pub fn times(&self, k: i64) -> Self {
        if k == 0 {
            return Self::empty(self.d_cap, self.z_cap);
        }
        Self { roots: self.roots.iter().map(|(r, m)| (r.clone(), m * k)).collect(), ..self.clone() }
    }

    fn check_caps(&self, other: &Self) -> Result<()> {
        if self.caps() != other.caps() {
            return Err(Error::CapMismatch(self.d_cap, self.z_cap, other.d_cap, other.z_cap));
        }
        Ok(())
    }
}

/// A Chern character (an element of the jet ring).
#[derive(Clone, Debug, PartialEq)]
pub struct VirtualCh {
    pub value: JetElement,
}

impl VirtualCh {
    pub fn new(value: JetElement) -> Self {
        Self { value }
    }

    pub fn one(d_cap: usize, z_cap: usize) -> Self {
        Self::new(JetElement::one(d_cap, z_cap))
    }

    pub fn constant(d_cap: usize, z_cap: usize, c: i64) -> Self {
        Self::new(JetElement::constant(d_cap, z_cap, c.into()))
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self::new(self.value.scale(c))
    }

    pub fn scale_int(&self, c: i64) -> Self {
        Self::new(self.value.scale_rational(&rat_int(c)))
    }
}

impl Add for &VirtualCh {
    type Output = VirtualCh;
    fn add(self, rhs: &VirtualCh) -> VirtualCh {
        VirtualCh::new(&self.value + &rhs.value)
    }
}

impl Sub for &VirtualCh {
    type Output = VirtualCh;
    fn sub(self, rhs: &VirtualCh) -> VirtualCh {
        VirtualCh::new(&self.value - &rhs.value)
    }
}

impl Mul for &VirtualCh {
    type Output = VirtualCh;
    fn mul(self, rhs: &VirtualCh) -> VirtualCh {
        VirtualCh::new(&self.value * &rhs.value)
    }
}

impl Neg for &VirtualCh {
    type Output = VirtualCh;
    fn neg(self) -> VirtualCh {
        VirtualCh::new(-&self.value)
    }
}

fn exp_root(r: &JetElement) -> Result<JetElement> {
    r.exp().map_err(|_| Error::InvalidArgument(format!("root {r} has a nonzero constant term")))
}

/// `sum mult * e^{root}`.
pub fn ch(b: &RootBundle) -> Result<VirtualCh> {
    let mut acc = JetElement::zero(b.d_cap, b.z_cap);
    for (r, m) in &b.roots {
        acc = &acc + &exp_root(r)?.scale_rational(&rat_int(*m));
    }
    Ok(VirtualCh::new(acc))
}

fn product_with_sign(b: &RootBundle, t: &QXSeries, sign: i64, power_sign: i64) -> Result<QXSeries> {
    let (d_cap, z_cap) = b.caps();
    if t.caps() != (d_cap, z_cap) {
        let (td, tz) = t.caps();
        return Err(Error::CapMismatch(d_cap, z_cap, td, tz));
    }
    let one = QXSeries::one(d_cap, z_cap, t.cut());
    let mut acc = one.clone();
    for (r, m) in &b.roots {
        let term = t.mul_jet(&exp_root(r)?)?.scale(&GaussianRational::from_int(sign));
        acc = acc.try_mul(&one.try_add(&term)?.pow(power_sign * m)?)?;
    }
    Ok(acc)
}

/// `ch(Lambda_t(B)) = prod (1 + t e^{root})^{mult}`. Negative multiplicities
/// invert, which fails unless each factor has a unit leading coefficient.
pub fn ch_lambda_t(b: &RootBundle, t: &QXSeries) -> Result<QXSeries> {
    product_with_sign(b, t, 1, 1)
}

/// `ch(S_t(B)) = prod (1 - t e^{root})^{-mult}`.
pub fn ch_sym_t(b: &RootBundle, t: &QXSeries) -> Result<QXSeries> {
    product_with_sign(b, t, -1, -1)
}

/// Generalized binomial coefficient `m (m-1) ... (m-j+1) / j!`.
fn gen_binomial(m: i64, j: u64) -> Rational {
    let mut num = Rational::one();
    for i in 0..j as i64 {
        num *= rat_int(m - i);
    }
    num / Rational::from_integer(factorial(j))
}

/// Coefficient of `s^k` in `prod_roots sum_j c(mult, j) (s e^{root})^j`.
fn power_ch(b: &RootBundle, k: usize, coef: impl Fn(i64, u64) -> Rational) -> Result<VirtualCh> {
    let (d_cap, z_cap) = b.caps();
    let mut poly = vec![JetElement::zero(d_cap, z_cap); k + 1];
    poly[0] = JetElement::one(d_cap, z_cap);
    for (r, m) in &b.roots {
        let e = exp_root(r)?;
        let mut factor = Vec::with_capacity(k + 1);
        let mut ej = JetElement::one(d_cap, z_cap);
        for j in 0..=k as u64 {
            factor.push(ej.scale_rational(&coef(*m, j)));
            ej = &ej * &e;
        }
        let mut next = vec![JetElement::zero(d_cap, z_cap); k + 1];
        for (i, p) in poly.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (j, f) in factor.iter().enumerate().take(k + 1 - i) {
                next[i + j] = &next[i + j] + &(p * f);
            }
        }
        poly = next;
    }
    Ok(VirtualCh::new(poly.swap_remove(k)))
}

/// `ch(Lambda^k B)`.
pub fn wedge_k_ch(b: &RootBundle, k: usize) -> Result<VirtualCh> {
    power_ch(b, k, gen_binomial)
}

/// `ch(S^k B)`.
pub fn sym_k_ch(b: &RootBundle, k: usize) -> Result<VirtualCh> {
    power_ch(b, k, |m, j| {
        let c = gen_binomial(-m, j);
        if j % 2 == 1 {
            -c
        } else {
            c
        }
    })
}

/// `prod (X / (1 - e^{-X}))^{mult}` over the roots `X`.
pub fn todd(b: &RootBundle) -> Result<VirtualCh> {
    let (d_cap, z_cap) = b.caps();
    let n = (d_cap + z_cap + 1) as u64;
    // (1 - e^{-X}) / X = sum (-1)^k X^k / (k+1)!
    let series: Vec<GaussianRational> = (0..=n)
        .map(|k| {
            let c = Rational::new(1.into(), factorial(k + 1));
            GaussianRational::real(if k % 2 == 1 { -c } else { c })
        })
        .collect();
    let mut acc = JetElement::one(d_cap, z_cap);
    for (r, m) in &b.roots {
        if *m < 0 {
            return Err(Error::InvalidArgument("Todd class of a virtual bundle".into()));
        }
        if !r.constant_term().is_zero() {
            return Err(Error::InvalidArgument(format!("root {r} has a nonzero constant term")));
        }
        if r.is_zero() {
            continue;
        }
        let f = r.compose(&series)?.inv()?;
        acc = acc.try_mul(&f.pow(*m)?)?;
    }
    Ok(VirtualCh::new(acc))
}

/// The eps^d part as a polynomial in `Z`.
pub fn top_component(v: &VirtualCh, d: usize) -> Result<JetElement> {
    v.value.eps_slice(d)
}

/// The eps^d Z^0 coefficient.
pub fn top_scalar(v: &VirtualCh, d: usize) -> Result<GaussianRational> {
    Ok(v.value.eps_slice(d)?.constant_term().clone())
}

/// The eps^d part of every q-coefficient.
pub fn top_component_series(s: &QXSeries, d: usize) -> Result<QXSeries> {
    let (d_cap, z_cap) = s.caps();
    if d > d_cap {
        return Err(Error::IndexOutOfRange { i: d, j: 0, d_cap, z_cap });
    }
    s.map_coeffs(0, z_cap, |c| c.eps_slice(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn eps(d: usize, a: i64) -> JetElement {
        JetElement::eps_times(d, 0, g(a))
    }

    #[test]
    fn ch_of_trivial_line_is_one() {
        assert!(ch(&RootBundle::trivial(1, 3, 0)).unwrap().value.is_one());
    }

    #[test]
    fn ch_of_virtual_reduced_bundle_has_no_rank() {
        let mut v = RootBundle::from_roots(4, 0, [(eps(4, 2), 1), (eps(4, -2), 1)]).unwrap();
        v.push(JetElement::zero(4, 0), -2).unwrap();
        let c = ch(&v).unwrap();
        assert!(c.value.constant_term().is_zero());
        assert_eq!(v.rank(), 0);
    }

    #[test]
    fn ch_of_self_dual_sum_is_even() {
        let t = RootBundle::from_eps_roots(5, 0, &[g(1), GaussianRational::i()]);
        let c = ch(&t.sum(&t.dual()).unwrap()).unwrap();
        for i in (1..=5).step_by(2) {
            assert!(c.value.coeff(i, 0).unwrap().is_zero());
        }
    }

    #[test]
    fn todd_of_a_line() {
        let t = todd(&RootBundle::line(eps(2, 1))).unwrap();
        let want = [rat(1, 1), rat(1, 2), rat(1, 12)];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(t.value.coeff(i, 0).unwrap(), &GaussianRational::real(w.clone()));
        }
        assert!(todd(&RootBundle::trivial(3, 2, 0)).unwrap().value.is_one());
    }

    #[test]
    fn todd_against_bernoulli_numbers() {
        // X / (1 - e^{-X}) = sum (-1)^k B_k X^k / k!
        let d = 10;
        let t = todd(&RootBundle::line(eps(d, 1))).unwrap();
        for k in 0..=d {
            let b = crate::arith::bernoulli(k) / Rational::from_integer(factorial(k as u64));
            let want = if k % 2 == 1 { -b } else { b };
            assert_eq!(t.value.coeff(k, 0).unwrap(), &GaussianRational::real(want));
        }
    }

    #[test]
    fn todd_rejects_bad_roots() {
        let r = JetElement::one(2, 0);
        assert!(todd(&RootBundle::line(r)).is_err());
        assert!(todd(&RootBundle::trivial(-1, 2, 0)).is_err());
    }

    #[test]
    fn lambda_at_zero_and_at_minus_one() {
        let b = RootBundle::from_eps_roots(3, 0, &[g(1), g(2)]);
        let zero = QXSeries::zero(3, 0, 48);
        assert_eq!(ch_lambda_t(&b, &zero).unwrap(), QXSeries::one(3, 0, 48));
        let minus_one = QXSeries::one(3, 0, 48).neg();
        assert!(ch_lambda_t(&RootBundle::trivial(3, 3, 0), &minus_one).unwrap().is_zero());
        assert!(ch_lambda_t(&RootBundle::trivial(-1, 3, 0), &minus_one).is_err());
    }

    #[test]
    fn sym_times_lambda_minus_is_one() {
        let b = RootBundle::from_roots(3, 1, [
            (JetElement::eps_times(3, 1, g(1)), 2),
            (JetElement::z_times(3, 1, g(1)), -1),
        ])
        .unwrap();
        let cut = 120;
        let t = QXSeries::monomial(JetElement::one(3, 1), 24, cut);
        let s = ch_sym_t(&b, &t).unwrap();
        let l = ch_lambda_t(&b, &t.neg()).unwrap();
        assert_eq!(s.try_mul(&l).unwrap(), QXSeries::one(3, 1, cut));
    }

    #[test]
    fn lambda_series_matches_wedge_powers() {
        let b = RootBundle::from_roots(4, 0, [(eps(4, 1), 1), (eps(4, -3), 2), (eps(4, 2), -1)]).unwrap();
        let cut = 6 * 24;
        let t = QXSeries::monomial(JetElement::one(4, 0), 24, cut);
        let l = ch_lambda_t(&b, &t).unwrap();
        let s = ch_sym_t(&b, &t).unwrap();
        for k in 0..6 {
            assert_eq!(l.coeff(24 * k as i64).unwrap(), wedge_k_ch(&b, k).unwrap().value);
            assert_eq!(s.coeff(24 * k as i64).unwrap(), sym_k_ch(&b, k).unwrap().value);
        }
    }

    #[test]
    fn power_operations_on_lines() {
        let x = eps(4, 3);
        let line = RootBundle::line(x.clone());
        assert_eq!(sym_k_ch(&line, 3).unwrap().value, x.scale(&g(3)).exp().unwrap());
        let two = RootBundle::from_eps_roots(4, 0, &[g(1), g(5)]);
        assert_eq!(wedge_k_ch(&two, 2).unwrap().value, eps(4, 6).exp().unwrap());
        assert!(wedge_k_ch(&two, 0).unwrap().value.is_one());
        assert!(wedge_k_ch(&two, 3).unwrap().value.is_zero());
    }

    #[test]
    fn ch_is_a_ring_map() {
        let a = RootBundle::from_roots(4, 1, [
            (JetElement::eps_times(4, 1, g(2)), 1),
            (JetElement::z_times(4, 1, g(1)), 1),
        ])
        .unwrap();
        let b = RootBundle::from_roots(4, 1, [(JetElement::eps_times(4, 1, g(-1)), 3)]).unwrap();
        let (ca, cb) = (ch(&a).unwrap(), ch(&b).unwrap());
        assert_eq!(ch(&a.tensor(&b).unwrap()).unwrap(), &ca * &cb);
        assert_eq!(ch(&a.sum(&b).unwrap()).unwrap(), &ca + &cb);
        assert_eq!(ch(&b.dual()).unwrap().value, cb.value.negate_eps());
    }

    #[test]
    fn top_components() {
        assert!(top_scalar(&VirtualCh::one(3, 0), 3).unwrap().is_zero());
        let e = VirtualCh::new(JetElement::monomial(3, 0, g(1), 3, 0));
        assert!(top_scalar(&e, 3).unwrap().is_one());
        assert!(top_scalar(&e, 4).is_err());
    }
}
