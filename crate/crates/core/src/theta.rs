//! Jacobi theta functions.
//!
//! Two independent evaluations are provided: exact q-expansions with a
//! jet-ring argument `A = 2*pi*i*v` ([`theta_sym`]), and double-precision
//! product evaluation with Taylor jets in `v` ([`theta_num`],
//! [`theta_num_jet`]) used to check transformation laws.
//!
//! Product forms (scaled argument `A`, `q = e^{2 pi i tau}`):
//!
//! ```text
//! TH  = -i q^{1/8} (e^{A/2} - e^{-A/2}) prod (1-q^j)(1-e^A q^j)(1-e^{-A} q^j)
//! TH1 =    q^{1/8} (e^{A/2} + e^{-A/2}) prod (1-q^j)(1+e^A q^j)(1+e^{-A} q^j)
//! TH2 =                                 prod (1-q^j)(1-e^A q^{j-1/2})(1-e^{-A} q^{j-1/2})
//! TH3 =                                 prod (1-q^j)(1+e^A q^{j-1/2})(1+e^{-A} q^{j-1/2})
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{factorial, GaussianRational, Rational};
use crate::error::{Error, Result};
use crate::jet::JetElement;
use crate::qseries::{QXSeries, Q_UNIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ThetaKind {
    Th,
    Th1,
    Th2,
    Th3,
}

impl ThetaKind {
    pub const ALL: [ThetaKind; 4] = [ThetaKind::Th, ThetaKind::Th1, ThetaKind::Th2, ThetaKind::Th3];

    pub fn is_odd(self) -> bool {
        self == ThetaKind::Th
    }

    /// Leading q-exponent in 1/24 units.
    fn lead(self) -> i64 {
        match self {
            ThetaKind::Th | ThetaKind::Th1 => 3,
            ThetaKind::Th2 | ThetaKind::Th3 => 0,
        }
    }
}

fn one_plus(sign: i64, x: &JetElement, n: i64, cut: i64) -> Result<QXSeries> {
    let (d, z) = x.caps();
    QXSeries::from_terms(
        d,
        z,
        cut,
        [(0, JetElement::one(d, z)), (n, x.scale(&GaussianRational::from_int(sign)))],
    )
}

/// The infinite product part of a theta function, exact below `cut`
/// (1/24 units, relative to exponent 0).
fn theta_product(kind: ThetaKind, a: &JetElement, cut: i64) -> Result<QXSeries> {
    let (d, z) = a.caps();
    let ea = a.exp()?;
    let ema = (-a).exp()?;
    let one = JetElement::one(d, z);
    let (sign, offset) = match kind {
        ThetaKind::Th => (-1, 0),
        ThetaKind::Th1 => (1, 0),
        ThetaKind::Th2 => (-1, Q_UNIT / 2),
        ThetaKind::Th3 => (1, Q_UNIT / 2),
    };
    let mut acc = QXSeries::one(d, z, cut);
    let mut j = 1;
    while (j * Q_UNIT - offset) < cut {
        let qj = j * Q_UNIT;
        let qe = qj - offset;
        if qj < cut {
            acc = acc.try_mul(&one_plus(-1, &one, qj, cut)?)?;
        }
        acc = acc.try_mul(&one_plus(sign, &ea, qe, cut)?)?;
        acc = acc.try_mul(&one_plus(sign, &ema, qe, cut)?)?;
        j += 1;
    }
    Ok(acc)
}

fn check_arg(a: &JetElement) -> Result<()> {
    if !a.is_nilpotent() {
        return Err(Error::NotNilpotent(format!("theta argument {a}")));
    }
    Ok(())
}

/// `sum_m A^{2m} / (4^m (2m+1)!)`, i.e. `(e^{A/2} - e^{-A/2}) / A` as a series.
pub fn sinhc_half(a: &JetElement) -> Result<JetElement> {
    let n = a.d_cap() + a.z_cap() + 1;
    let series: Vec<GaussianRational> = (0..=n as u64)
        .map(|k| {
            if k % 2 == 1 {
                return GaussianRational::zero();
            }
            let m = k / 2;
            let den = factorial(2 * m + 1) * num_bigint::BigInt::from(4u32).pow(m as u32);
            Rational::new(1.into(), den).into()
        })
        .collect();
    a.compose(&series)
}

/// Exact q-expansion of the theta function `kind` at the jet argument `a`.
pub fn theta_sym(kind: ThetaKind, a: &JetElement, cut: i64) -> Result<QXSeries> {
    check_arg(a)?;
    let (d, z) = a.caps();
    let half = a.scale_rational(&Rational::new(1.into(), 2.into()));
    let lead = kind.lead();
    let prod = theta_product(kind, a, cut - lead)?;
    let prefactor = match kind {
        ThetaKind::Th => (&half.exp()? - &(-&half).exp()?).scale(&-GaussianRational::i()),
        ThetaKind::Th1 => &half.exp()? + &(-&half).exp()?,
        ThetaKind::Th2 | ThetaKind::Th3 => JetElement::one(d, z),
    };
    Ok(prod.mul_jet(&prefactor)?.shift(lead))
}

/// `theta_sym(TH, a) / a`, computed without dividing by the nilpotent `a`.
pub fn theta_sym_over_arg(a: &JetElement, cut: i64) -> Result<QXSeries> {
    check_arg(a)?;
    let lead = ThetaKind::Th.lead();
    let prod = theta_product(ThetaKind::Th, a, cut - lead)?;
    let prefactor = sinhc_half(a)?.scale(&-GaussianRational::i());
    Ok(prod.mul_jet(&prefactor)?.shift(lead))
}

/// Truncated Taylor jet in one complex variable: `values[k]` is the k-th
/// Taylor coefficient `f^{(k)}(z0) / k!`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexJet {
    pub values: Vec<Complex64>,
}

impl ComplexJet {
    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut values = vec![Complex64::zero(); order + 1];
        values[0] = c;
        Self { values }
    }

    /// The identity function `z` expanded at `z0`.
    pub fn variable(z0: Complex64, order: usize) -> Self {
        let mut j = Self::constant(z0, order);
        if order >= 1 {
            j.values[1] = Complex64::one();
        }
        j
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.values[0]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add_const(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.values[0] += c;
        out
    }

    pub fn exp(&self) -> Self {
        // g' = f' g
        let n = self.order();
        let mut g = vec![Complex64::zero(); n + 1];
        g[0] = self.values[0].exp();
        for k in 1..=n {
            let mut acc = Complex64::zero();
            for j in 1..=k {
                acc += self.values[j] * g[k - j] * j as f64;
            }
            g[k] = acc / k as f64;
        }
        Self { values: g }
    }

    pub fn sin(&self) -> Self {
        let iz = self.scale(Complex64::i());
        (&iz.exp() - &iz.scale(-Complex64::one()).exp()).scale(Complex64::new(0.0, -0.5))
    }

    pub fn cos(&self) -> Self {
        let iz = self.scale(Complex64::i());
        (&iz.exp() + &iz.scale(-Complex64::one()).exp()).scale(Complex64::new(0.5, 0.0))
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.order();
        let c0 = self.values[0];
        if c0.norm() == 0.0 {
            return Err(Error::NotUnit("complex jet with zero value".into()));
        }
        let mut u = vec![Complex64::zero(); n + 1];
        u[0] = c0.inv();
        for k in 1..=n {
            let mut acc = Complex64::zero();
            for j in 1..=k {
                acc += self.values[j] * u[k - j];
            }
            u[k] = -acc / c0;
        }
        Ok(Self { values: u })
    }

    /// Drops the constant term and shifts down: `(f - f(0)) / h`, order decreases by one.
    pub fn shift_down(&self) -> Self {
        Self { values: self.values[1..].to_vec() }
    }

    /// Composition with the linear map `h -> dir * h`.
    pub fn along(&self, dir: Complex64) -> Self {
        let mut p = Complex64::one();
        let values = self
            .values
            .iter()
            .map(|v| {
                let out = v * p;
                p *= dir;
                out
            })
            .collect();
        Self { values }
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self { values: self.values[..=order.min(self.order())].to_vec() }
    }
}

impl Add for &ComplexJet {
    type Output = ComplexJet;
    fn add(self, rhs: &ComplexJet) -> ComplexJet {
        ComplexJet { values: self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexJet {
    type Output = ComplexJet;
    fn sub(self, rhs: &ComplexJet) -> ComplexJet {
        ComplexJet { values: self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &ComplexJet {
    type Output = ComplexJet;
    fn neg(self) -> ComplexJet {
        self.scale(-Complex64::one())
    }
}

impl Mul for &ComplexJet {
    type Output = ComplexJet;
    fn mul(self, rhs: &ComplexJet) -> ComplexJet {
        let n = self.order().min(rhs.order());
        let mut out = vec![Complex64::zero(); n + 1];
        for (i, a) in self.values.iter().enumerate().take(n + 1) {
            for (j, b) in rhs.values.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        ComplexJet { values: out }
    }
}

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

/// `q^x = exp(2 pi i tau x)` for real exponents, avoiding branch issues.
pub fn q_pow(tau: Complex64, x: f64) -> Complex64 {
    (two_pi_i() * tau * x).exp()
}

fn check_tau(tau: Complex64) -> Result<()> {
    if tau.im <= 0.0 || !tau.im.is_finite() {
        return Err(Error::NotUpperHalfPlane(tau.im));
    }
    Ok(())
}

/// Jet-valued product evaluation shared by [`theta_num`] and [`theta_num_jet`].
fn theta_jet_eval(kind: ThetaKind, z: &ComplexJet, tau: Complex64, n_factors: usize) -> ComplexJet {
    let order = z.order();
    let e = z.scale(two_pi_i()).exp();
    let em = z.scale(-two_pi_i()).exp();
    let piz = z.scale(Complex64::new(PI, 0.0));
    let (mut acc, sign, offset) = match kind {
        ThetaKind::Th => (piz.sin().scale(q_pow(tau, 0.125) * 2.0), -1.0, 0.0),
        ThetaKind::Th1 => (piz.cos().scale(q_pow(tau, 0.125) * 2.0), 1.0, 0.0),
        ThetaKind::Th2 => (ComplexJet::constant(Complex64::one(), order), -1.0, 0.5),
        ThetaKind::Th3 => (ComplexJet::constant(Complex64::one(), order), 1.0, 0.5),
    };
    for j in 1..=n_factors {
        let qj = q_pow(tau, j as f64);
        let qe = q_pow(tau, j as f64 - offset);
        let plus = e.scale(qe * sign).add_const(Complex64::one());
        let minus = em.scale(qe * sign).add_const(Complex64::one());
        acc = (&(&acc * &plus) * &minus).scale(Complex64::one() - qj);
    }
    acc
}

/// Classical (unscaled) theta value at `(z, tau)` from `n_factors` product terms.
pub fn theta_num(kind: ThetaKind, z: Complex64, tau: Complex64, n_factors: usize) -> Result<Complex64> {
    check_tau(tau)?;
    if n_factors == 0 {
        return Err(Error::InvalidArgument("need at least one product factor".into()));
    }
    Ok(theta_jet_eval(kind, &ComplexJet::constant(z, 0), tau, n_factors).value())
}

/// Taylor jet of `z -> theta_kind(z, tau)` at `z0` to the given order.
pub fn theta_num_jet(
    kind: ThetaKind,
    z0: Complex64,
    tau: Complex64,
    order: usize,
    n_factors: usize,
) -> Result<ComplexJet> {
    check_tau(tau)?;
    if n_factors == 0 {
        return Err(Error::InvalidArgument("need at least one product factor".into()));
    }
    Ok(theta_jet_eval(kind, &ComplexJet::variable(z0, order), tau, n_factors))
}

/// `eta(tau) = q^{1/24} prod (1 - q^j)`.
pub fn eta_num(tau: Complex64, n_factors: usize) -> Result<Complex64> {
    check_tau(tau)?;
    let mut acc = q_pow(tau, 1.0 / 24.0);
    for j in 1..=n_factors {
        acc *= Complex64::one() - q_pow(tau, j as f64);
    }
    Ok(acc)
}

/// Principal branch of `(tau / i)^{1/2}`.
pub fn sqrt_tau_over_i(tau: Complex64) -> Complex64 {
    (tau / Complex64::i()).sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct LawResult {
    pub id: String,
    #[serde(serialize_with = "ser_c64")]
    pub lhs: Complex64,
    #[serde(serialize_with = "ser_c64")]
    pub rhs: Complex64,
    pub residual: f64,
    pub pass: bool,
}

fn ser_c64<S: serde::Serializer>(c: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [c.re, c.im].serialize(s)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LawReport {
    pub laws: Vec<LawResult>,
}

/// `|lhs - rhs| / max(1, |rhs|)`.
pub fn law_residual(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

impl LawReport {
    pub fn push(&mut self, id: impl Into<String>, lhs: Complex64, rhs: Complex64, tol: f64) {
        let residual = law_residual(lhs, rhs);
        self.laws.push(LawResult { id: id.into(), lhs, rhs, residual, pass: residual < tol });
    }

    /// As [`LawReport::push`] with the residual `|lhs - rhs| / max(|lhs|, |rhs|)`
    /// (absolute when both sides are below `1e-12`).
    pub fn push_relative(&mut self, id: impl Into<String>, lhs: Complex64, rhs: Complex64, tol: f64) {
        let scale = lhs.norm().max(rhs.norm());
        let residual = if scale < 1e-12 { (lhs - rhs).norm() } else { (lhs - rhs).norm() / scale };
        self.laws.push(LawResult { id: id.into(), lhs, rhs, residual, pass: residual < tol });
    }

    pub fn all_pass(&self) -> bool {
        self.laws.iter().all(|l| l.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.laws.iter().map(|l| l.residual).fold(0.0, f64::max)
    }

    pub fn get(&self, id: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.id == id)
    }
}

fn fmt_c(c: Complex64) -> String {
    format!("{:+.12e}{:+.12e}i", c.re, c.im)
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.laws {
            writeln!(
                f,
                "{:<16} {} {} {:.3e} {}",
                l.id,
                fmt_c(l.lhs),
                fmt_c(l.rhs),
                l.residual,
                if l.pass { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// Evaluates the eta and theta transformation laws at `(tau, z)`.
pub fn check_theta_laws(tau: Complex64, z: Complex64, n_factors: usize, tol: f64) -> Result<LawReport> {
    check_theta_laws_scaled(tau, z, n_factors, tol, Complex64::one())
}

/// As [`check_theta_laws`], with every right-hand side multiplied by `rhs_factor`
/// (a factor other than 1 must make the laws fail).
pub fn check_theta_laws_scaled(
    tau: Complex64,
    z: Complex64,
    n: usize,
    tol: f64,
    rhs_factor: Complex64,
) -> Result<LawReport> {
    if tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    check_tau(tau)?;
    let i = Complex64::i();
    let one = Complex64::one();
    let s_tau = -one / tau;
    check_tau(s_tau)?;
    let t_tau = tau + one;
    let r = sqrt_tau_over_i(tau);
    let e_pi4 = (i * PI / 4.0).exp();
    let th = |k, v, t| theta_num(k, v, t, n);
    let auto = (i * PI * tau * z * z).exp();
    let mut rep = LawReport::default();
    let mut law = |id: &str, lhs: Complex64, rhs: Complex64| rep.push(id, lhs, rhs * rhs_factor, tol);

    let eta3 = |t| eta_num(t, n).map(|e| e * e * e);
    law("eta3_T", eta3(t_tau)?, e_pi4 * eta3(tau)?);
    law("eta3_S", eta3(s_tau)?, r * r * r * eta3(tau)?);

    use ThetaKind::*;
    law("theta_z+1", th(Th, z + one, tau)?, -th(Th, z, tau)?);
    law(
        "theta_z+tau",
        th(Th, z + tau, tau)?,
        -q_pow(tau, -0.5) * (-two_pi_i() * z).exp() * th(Th, z, tau)?,
    );
    law("theta_T", th(Th, z, t_tau)?, e_pi4 * th(Th, z, tau)?);
    law("theta_S", th(Th, z, s_tau)?, -i * r * auto * th(Th, tau * z, tau)?);
    law("theta1_T", th(Th1, z, t_tau)?, e_pi4 * th(Th1, z, tau)?);
    law("theta1_S", th(Th1, z, s_tau)?, r * auto * th(Th2, tau * z, tau)?);
    law("theta2_T", th(Th2, z, t_tau)?, th(Th3, z, tau)?);
    law("theta2_S", th(Th2, z, s_tau)?, r * auto * th(Th1, tau * z, tau)?);
    law("theta3_T", th(Th3, z, t_tau)?, th(Th2, z, tau)?);
    law("theta3_S", th(Th3, z, s_tau)?, r * auto * th(Th3, tau * z, tau)?);
    Ok(rep)
}
