use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::arith::{rat, GaussianRational};
use crate::jet::JetElement;
use crate::qseries::{QXSeries, Q_UNIT};
use crate::theta::{theta_sym, ThetaKind};

fn g(n: i64) -> GaussianRational {
    GaussianRational::from_int(n)
}

fn gr(n: i64, d: i64) -> GaussianRational {
    GaussianRational::real(rat(n, d))
}

fn spec(d: usize, l: usize, a0: usize, m: &[i64], x: &[i64], w: &[i64]) -> ManifoldSpec {
    ManifoldSpec::new(d, l, a0, m.to_vec(), x.iter().map(|&v| g(v)).collect(), w.iter().map(|&v| g(v)).collect())
        .unwrap()
}

#[test]
fn hand_expansion_in_dimension_one() {
    // Ell = b cosh(Z/2) - 12 b sinh^2(Z/2) cosh(Z/2) q + O(q^2)
    let b = 2;
    let s = spec(1, 1, 1, &[1], &[-3], &[b]);
    for ell in [ell_def(&s, 48, 4).unwrap(), ell_theta(&s, 48, 4).unwrap()] {
        let q0 = [gr(b, 1), g(0), gr(b, 8), g(0), gr(b, 384)];
        let q1 = [g(0), g(0), gr(-3 * b, 1), g(0), gr(-5 * b, 8)];
        for j in 0..=4 {
            assert_eq!(ell.coeff(0, j).unwrap(), q0[j], "q^0 Z^{j}");
            assert_eq!(ell.coeff(1, j).unwrap(), q1[j], "q^1 Z^{j}");
        }
    }
}

#[test]
fn degenerate_roots_give_zero() {
    let s = spec(1, 1, 1, &[1], &[0], &[0]);
    assert!(ell_def(&s, 48, 2).unwrap().value.is_zero());
    assert!(ell_theta(&s, 48, 2).unwrap().value.is_zero());
}

#[test]
fn zero_w_roots_kill_the_leading_scalar_term() {
    let s = spec(2, 1, 1, &[2], &[1, -1], &[0]);
    let raw = def_integrand(&s, 48, 2).unwrap();
    assert!(raw.coeff(0).unwrap().constant_term().is_zero());
    let a = a_n_series(&spec(2, 2, 1, &[1], &[1, -1], &[0, 0]), 0, 48);
    assert!(a.is_err(), "p1_match fails here");
}

#[test]
fn definition_matches_theta_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bounds = RandomSpecBounds { gaussian: true, ..RandomSpecBounds::default() };
    for _ in 0..6 {
        let s = random_spec(&mut rng, &bounds);
        let a = ell_def(&s, 72, 3).unwrap();
        let b = ell_theta(&s, 72, 3).unwrap();
        assert_eq!(a, b, "{}", s.to_json());
        assert!(a.value.has_integral_exponents());
    }
}

#[test]
fn real_data_gives_real_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..4 {
        let s = random_spec(&mut rng, &RandomSpecBounds::default());
        assert!(is_real(&ell_theta(&s, 72, 4).unwrap()));
    }
}

#[test]
fn v_variants_match_theta_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let bounds = RandomSpecBounds { max_d: 2, max_l: 1, max_a0: 1, max_b0: Some(2), ..Default::default() };
    for _ in 0..3 {
        let s = random_spec(&mut rng, &bounds);
        for v in VVariant::ALL {
            let a = ell_v(&s, v, Form::Def, 48, 2).unwrap();
            let b = ell_v(&s, v, Form::Theta, 48, 2).unwrap();
            assert_eq!(a, b, "{} {}", v.name(), s.to_json());
        }
    }
}

#[test]
fn degenerate_v_roots() {
    let s = spec(2, 1, 1, &[1], &[1, -1], &[0]).with_v(vec![g(0), g(0)]).unwrap();
    let plain = ell_def(&s, 48, 2).unwrap();
    assert_eq!(ell_v(&s, VVariant::Sin, Form::Def, 48, 2).unwrap(), plain);
    assert_eq!(ell_v(&s, VVariant::Cosh, Form::Theta, 48, 2).unwrap(), plain);
    assert_eq!(
        ell_v(&s, VVariant::Sum, Form::Def, 48, 2).unwrap().value,
        plain.value.scale(&g(3))
    );
}

#[test]
fn product_of_sums_differs_from_sum_of_products() {
    // with two V roots, prod_r (sum_k theta_k(u_r)/theta_k(0)) is not the
    // sum over k of the products
    let s = spec(2, 1, 1, &[1], &[1, 2], &[1]).with_v(vec![g(1), g(2)]).unwrap();
    let (cut, zc) = (48, 2);
    let def = ell_v(&s, VVariant::Sum, Form::Def, cut, zc).unwrap();
    let roots: Vec<JetElement> = s.u_roots().iter().map(|u| JetElement::eps_times(2, zc, u.clone())).collect();
    let zero = JetElement::zero(2, zc);
    let mut literal = QXSeries::one(2, zc, cut);
    for u in &roots {
        let mut sum = QXSeries::zero(2, zc, cut);
        for k in [ThetaKind::Th1, ThetaKind::Th2, ThetaKind::Th3] {
            let ratio = theta_sym(k, u, cut + 3).unwrap().try_mul(&theta_sym(k, &zero, cut + 3).unwrap().inv().unwrap()).unwrap();
            sum = sum.try_add(&ratio).unwrap();
        }
        literal = literal.try_mul(&sum).unwrap();
    }
    let raw = theta_integrand(&s, cut, zc).unwrap().try_mul(&literal).unwrap();
    let lit = crate::bundle::top_component_series(&raw, 2).unwrap();
    assert_ne!(lit, def.value);
}

#[test]
fn exponential_prefactor_coefficient() {
    let s = spec(2, 2, 1, &[3], &[1, -1], &[1, -1]);
    let ell = ell_theta(&s, 48, 2).unwrap();
    let a = a_n_from_ell(&s, &ell.value, 2).unwrap();
    // a_2 q^0 = Ell[q^0 Z^2] - (l sum m^2 / 24) Ell[q^0 Z^0]
    let want = &ell.coeff(0, 2).unwrap() - &(&gr(2 * 9, 24) * &ell.coeff(0, 0).unwrap());
    assert_eq!(a[2].q_scalar(0).unwrap(), want);
}

#[test]
fn coefficient_identities_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..3 {
        let s = random_valid_spec(&mut rng, 4, 3);
        let rep = check_prop32(&s, 72).unwrap();
        assert!(rep.all_pass(), "{}\n{rep}", s.to_json());
    }
}

#[test]
fn prop32_refuses_invalid_specs() {
    let s = spec(2, 1, 1, &[1], &[1, -1], &[0]);
    assert_eq!(check_prop32(&s, 72), Err(crate::Error::FlagFailed(P1_MATCH)));
}

#[test]
fn parity_vanishing() {
    let gauss = ManifoldSpec::new(4, 1, 1, vec![2], vec![g(1), g(-1), GaussianRational::i(), -GaussianRational::i()], vec![g(0)])
        .unwrap();
    for s in [spec(3, 2, 1, &[1], &[1, -1, 0], &[1, -1]), spec(2, 2, 1, &[2], &[1, -1], &[1, -1]), gauss] {
        let rep = check_vanishing(&s, 4, 72).unwrap();
        assert!(rep.all_pass(), "{rep}");
        assert_eq!(rep.checks.len(), if s.k() % 2 == 1 { 3 } else { 2 });
    }
}

#[test]
fn a1_leading_term_is_the_twisted_sum() {
    let s = spec(3, 2, 1, &[2], &[1, -1, 0], &[1, -1]);
    let a = a_n_series(&s, 1, 24).unwrap();
    let td = crate::bundle::todd(&crate::bundle::RootBundle::from_eps_roots(3, 0, &s.x_roots)).unwrap();
    let ts = twisted_sum_ch(&s, 1).unwrap();
    assert_eq!(a[1].q_scalar(0).unwrap(), crate::bundle::top_scalar(&(&td * &ts), 3).unwrap());
}

#[test]
fn twisted_sums_basic_cases() {
    let s = spec(2, 2, 1, &[1], &[1, -1], &[3, -3]);
    assert_eq!(twisted_sum_ch(&s, 0).unwrap(), lambda_minus_one_w_dual(&s).unwrap());
    // symmetric weights: odd powers vanish
    assert!(twisted_sum_ch(&s, 1).unwrap().value.is_zero() || s.l % 2 == 1);
    let t = spec(2, 2, 1, &[1], &[1, -1], &[0, 0]);
    assert!(twisted_sum_ch(&t, 3).unwrap().value.is_zero());
    assert!(twisted_sum_ch(&t, 5).is_err());
}

#[test]
fn a0_rank_tally() {
    let s = spec(3, 2, 1, &[1], &[1, 2, -3], &[1, -1]);
    let rank = 2 * 3 - 2 * s.k() - 2 * 2;
    assert_eq!(build_a0(&s).unwrap().value.constant_term(), &g(rank));
    // l = a0 = 1: Lambda^2 W* vanishes
    let t = spec(2, 1, 1, &[1], &[1, -1], &[0]);
    let w = crate::bundle::RootBundle::from_eps_roots(2, 0, &t.w_roots).dual();
    assert!(crate::bundle::wedge_k_ch(&w, 2).unwrap().value.is_zero());
}

fn eval_symbolic(ell: &GenusSeries, tau: Complex64, z: Complex64) -> Complex64 {
    let big_z = Complex64::new(0.0, 2.0 * std::f64::consts::PI) * z;
    ell.value.eval(tau, |c| {
        let (_, zc) = c.caps();
        (0..=zc).rev().fold(Complex64::new(0.0, 0.0), |acc, j| acc * big_z + c.coeff(0, j).unwrap().to_complex())
    })
}

#[test]
fn numeric_matches_symbolic() {
    let s = spec(3, 1, 1, &[2], &[1, 2, -4], &[3]);
    let tau = Complex64::new(0.1, 1.6);
    let z = Complex64::new(0.01, 0.005);
    let ell = ell_theta(&s, 4 * Q_UNIT, 8).unwrap();
    let sym = eval_symbolic(&ell, tau, z);
    let num = genus_numeric(&s, tau, z, 60).unwrap();
    assert!(sym.norm() > 1e-3, "{sym}");
    assert!((sym - num).norm() < 1e-7 * sym.norm().max(1.0), "{sym} vs {num}");
}

#[test]
fn numeric_is_continuous_at_zero() {
    let s = spec(2, 2, 1, &[1], &[1, -1], &[1, -1]);
    let tau = Complex64::new(0.0, 1.0);
    let a = genus_numeric(&s, tau, Complex64::new(0.0, 0.0), 60).unwrap();
    let b = genus_numeric(&s, tau, Complex64::new(1e-6, 0.0), 60).unwrap();
    assert!((a - b).norm() < 1e-6);
}

#[test]
fn numeric_degenerate_roots_vanish() {
    let s = spec(2, 1, 1, &[1], &[0, 0], &[0]);
    let v = genus_numeric(&s, Complex64::new(0.0, 2.0), Complex64::new(0.1, 0.0), 60).unwrap();
    assert!(v.norm() < 1e-10);
}

#[test]
fn numeric_v_variant_matches_symbolic() {
    let s = spec(2, 2, 1, &[1], &[1, -1], &[1, -1]).with_v(vec![gr(1, 2), GaussianRational::new(rat(0, 1), rat(1, 2))]).unwrap();
    let tau = Complex64::new(0.2, 1.5);
    let z = Complex64::new(0.01, 0.0);
    for v in VVariant::ALL {
        let ell = ell_v(&s, v, Form::Theta, 4 * Q_UNIT, 8).unwrap();
        let sym = eval_symbolic(&ell, tau, z);
        let num = genus_numeric_variant(&s, Some(v), tau, z, 60).unwrap();
        assert!((sym - num).norm() < 1e-7 * sym.norm().max(1.0), "{}: {sym} vs {num}", v.name());
    }
}

#[test]
fn modularity_laws() {
    let tau = Complex64::new(0.2, 1.3);
    let z = Complex64::new(0.1, 0.07);
    for s in reference_specs() {
        assert!(genus_numeric(&s, tau, z, 60).unwrap().norm() > 1e-8);
        let id = check_modularity(&s, &ModularityQuery::new(GAMMA_ID, tau, z)).unwrap();
        assert!(id.laws.get("modular").unwrap().residual == 0.0);
        for gamma in [GAMMA_T, GAMMA_S] {
            for (lambda, mu) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                let q = ModularityQuery { lambda, mu, ..ModularityQuery::new(gamma, tau, z) };
                let rep = check_modularity(&s, &q).unwrap();
                assert!(rep.laws.all_pass(), "{:?} {lambda} {mu}\n{}", gamma, rep.laws);
            }
        }
        let rep = check_modularity(&s, &ModularityQuery::new(GAMMA_S, tau, z)).unwrap();
        assert!((rep.fitted_weight.unwrap() - s.k() as f64).abs() < 1e-6);
    }
}

#[test]
fn v_variants_keep_the_weight() {
    let tau = Complex64::new(0.2, 1.3);
    let z = Complex64::new(0.1, 0.07);
    let s = reference_specs()[0].clone().with_v(vec![g(1), GaussianRational::i()]).unwrap();
    for v in VVariant::ALL {
        for (lambda, mu) in [(0, 0), (1, 1)] {
            let q = ModularityQuery { lambda, mu, variant: Some(v), ..ModularityQuery::new(GAMMA_S, tau, z) };
            let rep = check_modularity(&s, &q).unwrap();
            assert!(rep.laws.all_pass(), "{}\n{}", v.name(), rep.laws);
            assert!((rep.fitted_weight.unwrap() - s.k() as f64).abs() < 1e-6);
        }
    }
}

#[test]
fn modularity_refuses_bad_input() {
    let s = spec(2, 1, 1, &[1], &[1, -1], &[0]);
    let q = ModularityQuery::new(GAMMA_S, Complex64::new(0.2, 1.3), Complex64::new(0.1, 0.0));
    assert!(matches!(check_modularity(&s, &q), Err(crate::Error::FlagFailed(_))));
    let s = spec(2, 2, 1, &[1], &[1, -1], &[1, -1]);
    let bad = ModularityQuery::new([[1, 1], [1, 1]], Complex64::new(0.2, 1.3), Complex64::new(0.1, 0.0));
    assert!(check_modularity(&s, &bad).is_err());
    let low = ModularityQuery::new(GAMMA_S, Complex64::new(0.2, 3.0), Complex64::new(0.1, 0.0));
    assert!(check_modularity(&s, &low).is_err());
}

#[test]
fn lattice_sign_follows_sum_of_m() {
    let x = vec![g(1), g(-1), GaussianRational::i(), -GaussianRational::i()];
    let s = ManifoldSpec::new(4, 1, 2, vec![1, 2], x, vec![g(0)]).unwrap();
    let tau = Complex64::new(0.2, 1.3);
    let z = Complex64::new(0.1, 0.07);
    let q = ModularityQuery { lambda: 1, ..ModularityQuery::new(GAMMA_T, tau, z) };
    let rep = check_modularity(&s, &q).unwrap();
    assert!(rep.laws.all_pass(), "{}", rep.laws);
    // (-1)^{lambda l a0} would predict +1 here
    assert_eq!(lattice_sign(&s, 1, 0), -1.0);
    let law = rep.laws.get("elliptic").unwrap();
    assert!((law.lhs + law.rhs).norm() > law.lhs.norm());
}
