use serde::Serialize;

use crate::arith::{rat, GaussianRational};
use crate::bundle::{ch_lambda_t, ch_sym_t, todd, top_component_series, RootBundle};
use crate::error::{Error, Result};
use crate::jet::JetElement;
use crate::qseries::{eta_pow, euler_product, QXSeries, Q_UNIT};
use crate::theta::{sinhc_half, theta_sym, theta_sym_over_arg, ThetaKind};

use super::spec::ManifoldSpec;

/// A genus q-series, before or after taking the eps^d part.
#[derive(Clone, Debug, PartialEq)]
pub struct GenusSeries {
    pub value: QXSeries,
    pub extracted: bool,
}

impl GenusSeries {
    fn extract(raw: QXSeries, d: usize) -> Result<Self> {
        Ok(Self { value: top_component_series(&raw, d)?, extracted: true })
    }

    /// Coefficient of `q^n Z^j` (extracted series only).
    pub fn coeff(&self, n: i64, j: usize) -> Result<GaussianRational> {
        if !self.extracted {
            return Err(Error::InvalidArgument("series has not been reduced to top degree".into()));
        }
        Ok(self.value.q_coeff(n)?.coeff(0, j)?.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum VVariant {
    Cosh,
    Sum,
    Sin,
}

impl VVariant {
    pub const ALL: [VVariant; 3] = [VVariant::Cosh, VVariant::Sum, VVariant::Sin];

    pub fn name(self) -> &'static str {
        match self {
            VVariant::Cosh => "COSH",
            VVariant::Sum => "SUM",
            VVariant::Sin => "SIN",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Form {
    Def,
    Theta,
}

fn check_caps(cut: i64, z_cap: usize) -> Result<()> {
    if cut < 1 {
        return Err(Error::InvalidArgument(format!("cut must be positive, got {cut}")));
    }
    if z_cap < 1 {
        return Err(Error::InvalidArgument("zCap must be at least 1".into()));
    }
    Ok(())
}

fn half() -> crate::arith::Rational {
    rat(1, 2)
}

/// The parameter `c * q^{n/24}` of a Lambda or S operation.
fn param(c: JetElement, n: i64, cut: i64) -> QXSeries {
    QXSeries::monomial(c, n, cut)
}

struct Roots {
    x: Vec<JetElement>,
    w: Vec<JetElement>,
    u: Vec<JetElement>,
    /// `W_j - m_r Z` for every pair.
    wz: Vec<JetElement>,
}

impl Roots {
    fn new(spec: &ManifoldSpec, z_cap: usize) -> Self {
        let d = spec.d;
        let x = ManifoldSpec::eps_roots(d, z_cap, &spec.x_roots);
        let w = ManifoldSpec::eps_roots(d, z_cap, &spec.w_roots);
        let u = ManifoldSpec::eps_roots(d, z_cap, spec.u_roots());
        let mut wz = Vec::with_capacity(w.len() * spec.m.len());
        for wj in &w {
            for &m in &spec.m {
                wz.push(wj - &JetElement::z_times(d, z_cap, m.into()));
            }
        }
        Self { x, w, u, wz }
    }
}

/// The full integrand of the defining formula, before top-degree extraction.
pub fn def_integrand(spec: &ManifoldSpec, cut: i64, z_cap: usize) -> Result<QXSeries> {
    spec.validate()?;
    check_caps(cut, z_cap)?;
    let (d, zc) = (spec.d, z_cap);
    let r = Roots::new(spec, zc);
    let one = JetElement::one(d, zc);
    let zero = JetElement::zero(d, zc);

    let t_bundle = RootBundle::from_roots(d, zc, r.x.iter().map(|x| (x.clone(), 1)))?;
    let w_bundle = RootBundle::from_roots(d, zc, r.w.iter().map(|w| (w.clone(), 1)))?;
    let (t_dual, w_dual) = (t_bundle.dual(), w_bundle.dual());

    // exp((a0 c1(W) - c1(M)) / 2) Td(M) prod_r y_r^{-l/2}
    let c1w = r.w.iter().fold(zero.clone(), |a, b| &a + b);
    let c1m = r.x.iter().fold(zero.clone(), |a, b| &a + b);
    let mut pre = (&c1w.scale_rational(&rat(spec.a0 as i64, 1)) - &c1m).scale_rational(&half());
    for &m in &spec.m {
        pre = &pre - &JetElement::z_times(d, zc, rat(m * spec.l as i64, 2).into());
    }
    let pre = &pre.exp()? * &todd(&t_bundle)?.value;

    let mut acc = euler_product(d, zc, cut)?.pow(2 * spec.k())?.mul_jet(&pre)?;
    let ys: Vec<JetElement> = spec
        .m
        .iter()
        .map(|&m| JetElement::z_times(d, zc, m.into()).exp())
        .collect::<Result<_>>()?;
    let y_invs: Vec<JetElement> = ys.iter().map(JetElement::inv).collect::<Result<_>>()?;
    let mut n = 1;
    while (n - 1) * Q_UNIT < cut {
        for (y, y_inv) in ys.iter().zip(&y_invs) {
            let t1 = param(-y, (n - 1) * Q_UNIT, cut);
            acc = acc.try_mul(&ch_lambda_t(&w_dual, &t1)?)?;
            if n * Q_UNIT < cut {
                let t2 = param(-y_inv, n * Q_UNIT, cut);
                acc = acc.try_mul(&ch_lambda_t(&w_bundle, &t2)?)?;
            }
        }
        if n * Q_UNIT < cut {
            let t = param(one.clone(), n * Q_UNIT, cut);
            acc = acc.try_mul(&ch_sym_t(&t_dual, &t)?)?;
            acc = acc.try_mul(&ch_sym_t(&t_bundle, &t)?)?;
        }
        n += 1;
    }
    Ok(acc)
}

/// The theta-function integrand, including the constant `i^{-(d - l a0)}`
/// that relates it to [`def_integrand`].
pub fn theta_integrand(spec: &ManifoldSpec, cut: i64, z_cap: usize) -> Result<QXSeries> {
    spec.validate()?;
    check_caps(cut, z_cap)?;
    let (d, zc) = (spec.d, z_cap);
    let r = Roots::new(spec, zc);
    let k = spec.k();
    let lead = 3;
    let mut acc = eta_pow(3 * k, 3 * k + cut, d, zc)?;
    for x in &r.x {
        // X / theta(X) = 1 / (theta(X) / X)
        acc = acc.try_mul(&theta_sym_over_arg(x, lead + cut)?.inv()?)?;
    }
    for u in &r.wz {
        acc = acc.try_mul(&theta_sym(ThetaKind::Th, u, lead + cut)?)?;
    }
    Ok(acc.scale(&GaussianRational::i_pow(-k)).truncate(cut))
}

pub fn ell_def(spec: &ManifoldSpec, cut: i64, z_cap: usize) -> Result<GenusSeries> {
    GenusSeries::extract(def_integrand(spec, cut, z_cap)?, spec.d)
}

pub fn ell_theta(spec: &ManifoldSpec, cut: i64, z_cap: usize) -> Result<GenusSeries> {
    GenusSeries::extract(theta_integrand(spec, cut, z_cap)?, spec.d)
}

fn v_data(spec: &ManifoldSpec) -> Result<()> {
    if spec.v.is_none() {
        return Err(Error::InvalidSpec("spec has no V data".into()));
    }
    Ok(())
}

/// `prod_{j>=1} ch Lambda_{sign q^{j - offset}}(V~)` with `V~ = V_C - 2 b0`.
fn lambda_tower(v_tilde: &RootBundle, sign: i64, offset: i64, cut: i64) -> Result<QXSeries> {
    let (d, zc) = v_tilde.caps();
    let mut acc = QXSeries::one(d, zc, cut);
    let mut j = 1;
    while j * Q_UNIT - offset < cut {
        let t = param(JetElement::constant(d, zc, sign.into()), j * Q_UNIT - offset, cut);
        acc = acc.try_mul(&ch_lambda_t(v_tilde, &t)?)?;
        j += 1;
    }
    Ok(acc)
}

/// The V-dependent factor of the defining formula.
pub fn v_factor_def(spec: &ManifoldSpec, variant: VVariant, cut: i64, z_cap: usize) -> Result<QXSeries> {
    v_data(spec)?;
    let (d, zc) = (spec.d, z_cap);
    let r = Roots::new(spec, zc);
    let mut v_tilde = RootBundle::empty(d, zc);
    for u in &r.u {
        v_tilde.push(u.clone(), 1)?;
        v_tilde.push(-u, 1)?;
    }
    v_tilde.push(JetElement::zero(d, zc), -2 * spec.b0() as i64)?;
    let half_q = Q_UNIT / 2;
    let cosh = r.u.iter().try_fold(JetElement::one(d, zc), |acc, u| -> Result<JetElement> {
        let h = u.scale_rational(&half());
        Ok(&acc * &(&h.exp()? + &(-&h).exp()?).scale_rational(&half()))
    })?;
    match variant {
        VVariant::Cosh => lambda_tower(&v_tilde, 1, 0, cut)?
            .try_mul(&lambda_tower(&v_tilde, 1, half_q, cut)?)?
            .try_mul(&lambda_tower(&v_tilde, -1, half_q, cut)?)?
            .mul_jet(&cosh),
        VVariant::Sum => lambda_tower(&v_tilde, 1, 0, cut)?
            .mul_jet(&cosh)?
            .try_add(&lambda_tower(&v_tilde, 1, half_q, cut)?)?
            .try_add(&lambda_tower(&v_tilde, -1, half_q, cut)?),
        VVariant::Sin => {
            let sinhc = r.u.iter().try_fold(JetElement::one(d, zc), |acc, u| -> Result<JetElement> {
                Ok(&acc * &sinhc_half(u)?)
            })?;
            lambda_tower(&v_tilde, -1, 0, cut)?.mul_jet(&sinhc)
        }
    }
}

/// `theta_kind(U) / theta_kind(0)` for each V root.
fn theta_ratio(kind: ThetaKind, u: &JetElement, cut: i64) -> Result<QXSeries> {
    let (d, zc) = u.caps();
    let lead = 3;
    let zero = JetElement::zero(d, zc);
    theta_sym(kind, u, lead + cut)?.try_mul(&theta_sym(kind, &zero, lead + cut)?.inv()?)
}

/// `theta1(0) theta2(0) theta3(0)`.
pub fn theta_nullwert_product(d: usize, z_cap: usize, cut: i64) -> Result<QXSeries> {
    let zero = JetElement::zero(d, z_cap);
    let mut acc = QXSeries::one(d, z_cap, cut + 3);
    for kind in [ThetaKind::Th1, ThetaKind::Th2, ThetaKind::Th3] {
        acc = acc.try_mul(&theta_sym(kind, &zero, cut + 3)?)?;
    }
    Ok(acc)
}

/// The V-dependent factor in theta-function form. The sum variant is the sum
/// over the three theta functions of the products over the V roots.
pub fn v_factor_theta(spec: &ManifoldSpec, variant: VVariant, cut: i64, z_cap: usize) -> Result<QXSeries> {
    v_data(spec)?;
    let (d, zc) = (spec.d, z_cap);
    let r = Roots::new(spec, zc);
    let product = |kind| -> Result<QXSeries> {
        r.u.iter().try_fold(QXSeries::one(d, zc, cut), |acc, u| acc.try_mul(&theta_ratio(kind, u, cut)?))
    };
    let out = match variant {
        VVariant::Cosh => product(ThetaKind::Th1)?
            .try_mul(&product(ThetaKind::Th2)?)?
            .try_mul(&product(ThetaKind::Th3)?)?,
        VVariant::Sum => product(ThetaKind::Th1)?
            .try_add(&product(ThetaKind::Th2)?)?
            .try_add(&product(ThetaKind::Th3)?)?,
        VVariant::Sin => {
            // 2i theta(U) / (U theta1(0) theta2(0) theta3(0))
            let inv_null = theta_nullwert_product(d, zc, cut)?.inv()?;
            let two_i = GaussianRational::i().scale(&rat(2, 1));
            r.u.iter().try_fold(QXSeries::one(d, zc, cut), |acc, u| {
                acc.try_mul(&theta_sym_over_arg(u, cut + 3)?.try_mul(&inv_null)?.scale(&two_i))
            })?
        }
    };
    Ok(out.truncate(cut))
}

/// A V-twisted genus in either form.
pub fn ell_v(spec: &ManifoldSpec, variant: VVariant, form: Form, cut: i64, z_cap: usize) -> Result<GenusSeries> {
    v_data(spec)?;
    let raw = match form {
        Form::Def => def_integrand(spec, cut, z_cap)?.try_mul(&v_factor_def(spec, variant, cut, z_cap)?)?,
        Form::Theta => theta_integrand(spec, cut, z_cap)?.try_mul(&v_factor_theta(spec, variant, cut, z_cap)?)?,
    };
    GenusSeries::extract(raw.truncate(cut), spec.d)
}

/// Every coefficient of an extracted series is real.
pub fn is_real(s: &GenusSeries) -> bool {
    s.value.terms().all(|(_, c)| c.terms().all(|(_, _, v)| v.is_real()))
}
