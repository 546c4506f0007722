use num_traits::Zero;

use crate::arith::{rat, rat_int, GaussianRational, Rational};
use crate::bundle::{ch, sym_k_ch, todd, top_scalar, wedge_k_ch, RootBundle, VirtualCh};
use crate::error::{Error, Result};
use crate::jet::JetElement;
use crate::qseries::{eisenstein_raw, QXSeries};
use crate::report::VerificationReport;

use super::series::ell_theta;
use super::spec::ManifoldSpec;

/// Coefficients `a_0 .. a_{n_max}` (in the scaled variable `Z`) of
/// `exp(l (sum m_r^2) G_2 Z^2) * Ell`, each a scalar q-series.
pub fn a_n_series(spec: &ManifoldSpec, n_max: usize, cut: i64) -> Result<Vec<QXSeries>> {
    spec.validate()?;
    spec.require_modular()?;
    let z_cap = n_max.max(1);
    let ell = ell_theta(spec, cut, z_cap)?;
    a_n_from_ell(spec, &ell.value, n_max)
}

/// Same as [`a_n_series`] starting from an already extracted genus series.
pub fn a_n_from_ell(spec: &ManifoldSpec, ell: &QXSeries, n_max: usize) -> Result<Vec<QXSeries>> {
    let (_, z_cap) = ell.caps();
    if z_cap < n_max {
        return Err(Error::InvalidArgument(format!("zCap {z_cap} below nMax {n_max}")));
    }
    let cut = ell.cut();
    let g2 = eisenstein_raw(2, cut, 0, z_cap)?;
    let z2 = if z_cap >= 2 {
        JetElement::monomial(0, z_cap, GaussianRational::from_int(spec.m2()), 0, 2)
    } else {
        JetElement::zero(0, z_cap)
    };
    let phi = g2.mul_jet(&z2)?.exp()?.try_mul(ell)?;
    (0..=n_max).map(|n| phi.map_coeffs(0, 0, |c| Ok(JetElement::constant(0, 0, c.coeff(0, n)?.clone())))).collect()
}

fn w_bundles(spec: &ManifoldSpec) -> (RootBundle, RootBundle) {
    let w = RootBundle::from_eps_roots(spec.d, 0, &spec.w_roots);
    (w.dual(), w)
}

fn t_bundle(spec: &ManifoldSpec) -> RootBundle {
    RootBundle::from_eps_roots(spec.d, 0, &spec.x_roots)
}

/// `ch(Lambda_{-1}(W*))`.
pub fn lambda_minus_one_w_dual(spec: &ManifoldSpec) -> Result<VirtualCh> {
    let (w_dual, _) = w_bundles(spec);
    let mut acc = VirtualCh::constant(spec.d, 0, 0);
    for p in 0..=spec.l {
        let term = wedge_k_ch(&w_dual, p)?;
        acc = if p % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    Ok(acc)
}

/// `ch(Lambda_{-1}(W_0*))` with `W_0` the sum of `a0` copies of `W`.
pub fn lambda_minus_one_w0_dual(spec: &ManifoldSpec) -> Result<VirtualCh> {
    let base = lambda_minus_one_w_dual(spec)?;
    Ok(VirtualCh::new(base.value.pow(spec.a0 as i64)?))
}

/// `A_0 = T + T* - 2(d - l a0) - W_0 - W_0*`.
fn a0_bundle(spec: &ManifoldSpec) -> Result<RootBundle> {
    let t = t_bundle(spec);
    let (w_dual, w) = w_bundles(spec);
    let a0 = spec.a0 as i64;
    t.sum(&t.dual())?
        .sum(&RootBundle::trivial(-2 * spec.k(), spec.d, 0))?
        .sum(&w.times(-a0))?
        .sum(&w_dual.times(-a0))
}

/// `ch(A_0)`.
pub fn build_a0(spec: &ManifoldSpec) -> Result<VirtualCh> {
    ch(&a0_bundle(spec)?)
}

/// `ch(A_1)`: the relative q^2 coefficient of the z = 0 specialization,
/// `k(2k-3) + S^2 T + T* (x) T + S^2 T* + T + T* - 2k (T + T*)
///  + Lambda^2 W_0 + W_0 (x) W_0* + Lambda^2 W_0* - W_0 - W_0* + 2k (W_0 + W_0*)
///  - (W_0 + W_0*) (x) (T + T*)`.
pub fn build_a1(spec: &ManifoldSpec) -> Result<VirtualCh> {
    let d = spec.d;
    let k = spec.k();
    let t = t_bundle(spec);
    let t_dual = t.dual();
    let (w_dual, w) = w_bundles(spec);
    let a0 = spec.a0 as i64;
    let w0 = w.times(a0);
    let w0_dual = w_dual.times(a0);
    let tt = t.sum(&t_dual)?;
    let ww = w0.sum(&w0_dual)?;

    let mut acc = VirtualCh::constant(d, 0, k * (2 * k - 3));
    for part in [
        sym_k_ch(&t, 2)?,
        ch(&t_dual.tensor(&t)?)?,
        sym_k_ch(&t_dual, 2)?,
        ch(&tt)?.scale_int(1 - 2 * k),
        wedge_k_ch(&w0, 2)?,
        ch(&w0.tensor(&w0_dual)?)?,
        wedge_k_ch(&w0_dual, 2)?,
        ch(&ww)?.scale_int(2 * k - 1),
        ch(&ww.tensor(&tt)?)?.scale_int(-1),
    ] {
        acc = &acc + &part;
    }
    Ok(acc)
}

/// `ch(A_3)`, the Z-linear part of the relative q^1 coefficient:
/// `[sum_r m_r Lambda_{-1}(W*)^{a0-1} sum_p (-1)^p p Lambda^p W*
///   - (l/2)(sum m_r) Lambda_{-1}(W*)^{a0}] G_0 + Lambda_{-1}(W*)^{a0} sum_r m_r (W - W*)`
/// with `G_0 = -2k + T + T* - a0 (W + W*)`.
pub fn build_a3(spec: &ManifoldSpec) -> Result<VirtualCh> {
    let d = spec.d;
    let (w_dual, w) = w_bundles(spec);
    let sum_m: i64 = spec.m.iter().sum();
    let lam = lambda_minus_one_w_dual(spec)?;
    let lam_a0 = VirtualCh::new(lam.value.pow(spec.a0 as i64)?);
    let lam_rest = VirtualCh::new(lam.value.pow(spec.a0 as i64 - 1)?);
    let mut weighted = VirtualCh::constant(d, 0, 0);
    for p in 1..=spec.l {
        let sign = if p % 2 == 0 { 1 } else { -1 };
        weighted = &weighted + &wedge_k_ch(&w_dual, p)?.scale_int(sign * p as i64);
    }
    let first = &(&lam_rest * &weighted).scale_int(sum_m)
        - &lam_a0.scale(&GaussianRational::real(rat(spec.l as i64 * sum_m, 2)));
    let g0 = build_a0(spec)?;
    let diff = &ch(&w)? - &ch(&w_dual)?;
    Ok(&(&first * &g0) + &(&lam_a0 * &diff.scale_int(sum_m)))
}

/// `sum_{p in {0..l}^{a0}} (-1)^{|p|} (sum m_r p_r - (l/2) sum m_r)^power prod_r ch(Lambda^{p_r} W*)`.
pub fn twisted_sum_ch(spec: &ManifoldSpec, power: u32) -> Result<VirtualCh> {
    if power > 4 {
        return Err(Error::InvalidArgument(format!("power {power} above 4")));
    }
    let (w_dual, _) = w_bundles(spec);
    let wedges: Vec<VirtualCh> = (0..=spec.l).map(|p| wedge_k_ch(&w_dual, p)).collect::<Result<_>>()?;
    let sum_m: i64 = spec.m.iter().sum();
    let shift = rat(spec.l as i64 * sum_m, 2);
    let mut acc = VirtualCh::constant(spec.d, 0, 0);
    let mut idx = vec![0usize; spec.a0];
    loop {
        let total: usize = idx.iter().sum();
        let weight = idx.iter().zip(&spec.m).map(|(p, m)| rat_int(*p as i64 * m)).fold(Rational::zero(), |a, b| a + b)
            - &shift;
        let mut coef = num_traits::pow(weight, power as usize);
        if total % 2 == 1 {
            coef = -coef;
        }
        let prod = idx.iter().fold(VirtualCh::one(spec.d, 0), |a, &p| &a * &wedges[p]);
        acc = &acc + &prod.scale(&GaussianRational::real(coef));
        // odometer over {0..l}^{a0}
        let mut i = 0;
        while i < idx.len() {
            idx[i] += 1;
            if idx[i] <= spec.l {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == idx.len() {
            break;
        }
    }
    Ok(acc)
}

fn q_scalar_of(s: &QXSeries, n: i64) -> Result<GaussianRational> {
    Ok(s.q_coeff(n)?.constant_term().clone())
}

/// Checks the leading coefficients of `a_0 .. a_4` against the characteristic
/// numbers of `Lambda_{-1}(W_0*)`, `A_0`, `A_1`, `A_3` and the twisted sums.
/// Needs `cut >= 3 * 24`.
pub fn check_prop32(spec: &ManifoldSpec, cut: i64) -> Result<VerificationReport> {
    spec.validate()?;
    spec.require_modular()?;
    if cut < 72 {
        return Err(Error::InsufficientCut { need: 72, have: cut });
    }
    let d = spec.d;
    let a = a_n_series(spec, 4, cut)?;
    let td = todd(&t_bundle(spec))?;
    let lam0 = lambda_minus_one_w0_dual(spec)?;
    let base = &td * &lam0;
    let top = |v: &VirtualCh| top_scalar(v, d);
    let m2 = GaussianRational::from_int(spec.m2());
    let ts: Vec<GaussianRational> =
        (0..=4).map(|p| twisted_sum_ch(spec, p).and_then(|t| top(&(&td * &t)))).collect::<Result<_>>()?;
    let frac = |n: i64, dd: i64| GaussianRational::real(rat(n, dd));

    let mut rep = VerificationReport::default();
    rep.push_eq("a0[q^0]", &q_scalar_of(&a[0], 0)?, &top(&base)?);
    rep.push_eq("a0[q^1]", &q_scalar_of(&a[0], 1)?, &top(&(&base * &build_a0(spec)?))?);
    rep.push_eq("a0[q^2]", &q_scalar_of(&a[0], 2)?, &top(&(&base * &build_a1(spec)?))?);
    rep.push_eq("a1[q^0]", &q_scalar_of(&a[1], 0)?, &ts[1]);
    let c = &m2 * &frac(1, 24);
    rep.push_eq("a2[q^0]", &q_scalar_of(&a[2], 0)?, &(&(&ts[2] * &frac(1, 2)) - &(&c * &ts[0])));
    rep.push_eq("a3[q^0]", &q_scalar_of(&a[3], 0)?, &(&(&ts[3] * &frac(1, 6)) - &(&c * &ts[1])));
    let a4 = &(&(&ts[4] * &frac(1, 24)) - &(&(&m2 * &frac(1, 48)) * &ts[2])) + &(&(&(&m2 * &m2) * &frac(1, 1152)) * &ts[0]);
    rep.push_eq("a4[q^0]", &q_scalar_of(&a[4], 0)?, &a4);
    rep.push_eq("a1[q^1]", &q_scalar_of(&a[1], 1)?, &top(&(&td * &build_a3(spec)?))?);
    Ok(rep)
}

/// The vanishing pattern forced by parity: for odd `d - l a0` the even-index
/// coefficients vanish, for even `d - l a0` the odd-index ones.
pub fn check_vanishing(spec: &ManifoldSpec, n_max: usize, cut: i64) -> Result<VerificationReport> {
    let a = a_n_series(spec, n_max, cut)?;
    let odd = spec.k().rem_euclid(2) == 1;
    let mut rep = VerificationReport::default();
    for (n, s) in a.iter().enumerate() {
        if (n % 2 == 0) == odd {
            rep.push(format!("a{n} == 0"), s.is_zero(), if s.is_zero() { "vanishes".to_string() } else { format!("{s}") });
        }
    }
    Ok(rep)
}
