use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::theta::{eta_num, theta_num, theta_num_jet, ComplexJet, LawReport, ThetaKind};

use super::series::VVariant;
use super::spec::ManifoldSpec;

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `theta(tau, v) / v` as an eps-jet with `v = dir * eps`, from the jet at 0.
fn theta_over_arg_jet(tau: Complex64, order: usize, n: usize) -> Result<ComplexJet> {
    Ok(theta_num_jet(ThetaKind::Th, Complex64::new(0.0, 0.0), tau, order + 1, n)?.shift_down())
}

/// Numerical value of the genus (optionally V-twisted) from the theta
/// expression with eps-jets: roots enter as `x = eps * a / (2 pi i)`.
pub fn genus_numeric_variant(
    spec: &ManifoldSpec,
    variant: Option<VVariant>,
    tau: Complex64,
    z: Complex64,
    n: usize,
) -> Result<Complex64> {
    spec.validate()?;
    let d = spec.d;
    let one = Complex64::new(1.0, 0.0);
    let mut acc = ComplexJet::constant(one, d);
    let h = theta_over_arg_jet(tau, d, n)?;
    for a in &spec.x_roots {
        let alpha = a.to_complex() / two_pi_i();
        acc = &acc * &h.along(alpha).inv()?.scale(two_pi_i());
    }
    for b in &spec.w_roots {
        let beta = b.to_complex() / two_pi_i();
        for &m in &spec.m {
            let j = theta_num_jet(ThetaKind::Th, -z * m as f64, tau, d, n)?;
            acc = &acc * &j.along(beta);
        }
    }
    if let Some(v) = variant {
        if spec.v.is_none() {
            return Err(Error::InvalidSpec("spec has no V data".into()));
        }
        acc = &acc * &v_factor_numeric(spec, v, tau, n)?;
    }
    let k = spec.k();
    let eta3 = eta_num(tau, n)?.powi(3);
    Ok(acc.values[d] * eta3.powi(k as i32) * i_pow(-k))
}

pub fn genus_numeric(spec: &ManifoldSpec, tau: Complex64, z: Complex64, n: usize) -> Result<Complex64> {
    genus_numeric_variant(spec, None, tau, z, n)
}

fn v_factor_numeric(spec: &ManifoldSpec, variant: VVariant, tau: Complex64, n: usize) -> Result<ComplexJet> {
    let d = spec.d;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let dirs: Vec<Complex64> = spec.u_roots().iter().map(|u| u.to_complex() / two_pi_i()).collect();
    let product = |kind: ThetaKind| -> Result<ComplexJet> {
        let j = theta_num_jet(kind, zero, tau, d, n)?;
        let j = j.scale(one / j.value());
        Ok(dirs.iter().fold(ComplexJet::constant(one, d), |acc, g| &acc * &j.along(*g)))
    };
    Ok(match variant {
        VVariant::Cosh => &(&product(ThetaKind::Th1)? * &product(ThetaKind::Th2)?) * &product(ThetaKind::Th3)?,
        VVariant::Sum => &(&product(ThetaKind::Th1)? + &product(ThetaKind::Th2)?) + &product(ThetaKind::Th3)?,
        VVariant::Sin => {
            let null: Complex64 = [ThetaKind::Th1, ThetaKind::Th2, ThetaKind::Th3]
                .iter()
                .map(|k| theta_num(*k, zero, tau, n))
                .product::<Result<Complex64>>()?;
            let h = theta_over_arg_jet(tau, d, n)?.scale(one / (null * PI));
            dirs.iter().fold(ComplexJet::constant(one, d), |acc, g| &acc * &h.along(*g))
        }
    })
}

/// Inputs of a modularity check: `gamma = [[a, b], [c, d0]]` acts on
/// `(tau, z)`, and `(lambda, mu)` shifts `z` by `lambda tau + mu`.
#[derive(Clone, Copy, Debug)]
pub struct ModularityQuery {
    pub gamma: [[i64; 2]; 2],
    pub lambda: i64,
    pub mu: i64,
    pub tau: Complex64,
    pub z: Complex64,
    pub n_factors: usize,
    pub tol: f64,
    pub variant: Option<VVariant>,
}

impl ModularityQuery {
    pub fn new(gamma: [[i64; 2]; 2], tau: Complex64, z: Complex64) -> Self {
        Self { gamma, lambda: 0, mu: 0, tau, z, n_factors: 60, tol: 1e-6, variant: None }
    }
}

pub const GAMMA_S: [[i64; 2]; 2] = [[0, -1], [1, 0]];
pub const GAMMA_T: [[i64; 2]; 2] = [[1, 1], [0, 1]];
pub const GAMMA_ID: [[i64; 2]; 2] = [[1, 0], [0, 1]];

#[derive(Clone, Debug, Serialize)]
pub struct ModularityReport {
    pub laws: LawReport,
    /// `ln|R| / ln|c tau + d0|` where `R` is the observed factor with the
    /// exponential part removed; `None` when `|c tau + d0| = 1`.
    pub fitted_weight: Option<f64>,
    pub expected_weight: i64,
}

/// Sign picked up under `z -> z + lambda tau + mu`: each factor
/// `theta(w - m_r z)` contributes `(-1)^{m_r (lambda + mu)}`.
pub fn lattice_sign(spec: &ManifoldSpec, lambda: i64, mu: i64) -> f64 {
    if ((lambda + mu) * spec.m1()).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Compares the transformed genus with the predicted automorphy factors
/// `(c tau + d0)^{d - l a0} exp(pi i l (sum m_r^2) c z^2 / (c tau + d0))` and
/// `(-1)^{(lambda + mu) l sum m_r} exp(-pi i l (sum m_r^2)(2 lambda z + lambda^2 tau))`.
pub fn check_modularity(spec: &ManifoldSpec, q: &ModularityQuery) -> Result<ModularityReport> {
    spec.require_modular()?;
    if q.variant.is_some() {
        spec.require(&[super::spec::P1V_ZERO])?;
    }
    let [[a, b], [c, d0]] = q.gamma;
    if a * d0 - b * c != 1 {
        return Err(Error::InvalidArgument(format!("det of {:?} is not 1", q.gamma)));
    }
    if q.tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let (tau, z, n) = (q.tau, q.z, q.n_factors);
    let ctd = tau * c as f64 + d0 as f64;
    let tau2 = (tau * a as f64 + b as f64) / ctd;
    for t in [tau, tau2] {
        if t.im < 0.5 {
            return Err(Error::InvalidArgument(format!("Im tau = {} below 0.5", t.im)));
        }
    }
    let eval = |t, w| genus_numeric_variant(spec, q.variant, t, w, n);
    let base = eval(tau, z)?;
    let m2 = spec.m2() as f64;
    let pi_i = Complex64::new(0.0, PI);
    let k = spec.k();

    let mut laws = LawReport::default();
    let lhs = eval(tau2, z / ctd)?;
    let expo = (pi_i * m2 * c as f64 * z * z / ctd).exp();
    laws.push_relative("modular", lhs, ctd.powi(k as i32) * expo * base, q.tol);
    let fitted_weight = {
        let lc = ctd.norm().ln();
        (lc.abs() > 1e-9).then(|| (lhs / (expo * base)).norm().ln() / lc)
    };

    let lat = z + tau * q.lambda as f64 + q.mu as f64;
    let sign = lattice_sign(spec, q.lambda, q.mu);
    let lam = q.lambda as f64;
    let factor = (-pi_i * m2 * (2.0 * lam * z + lam * lam * tau)).exp() * sign;
    laws.push_relative("elliptic", eval(tau, lat)?, factor * base, q.tol);
    Ok(ModularityReport { laws, fitted_weight, expected_weight: k })
}
