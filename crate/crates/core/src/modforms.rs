//! Level one modular forms in the `E_4^a E_6^b` basis: dimensions, exact
//! decomposition of q-series, and the linear relations among the first
//! q-coefficients that turn genus expansions into cancellation identities.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{rational_display, GaussianRational, Rational};
use crate::error::{Error, Result};
use crate::genus::{a_n_series, ManifoldSpec};
use crate::qseries::{eisenstein_normalized, QXSeries, Q_UNIT};

/// Exponent pairs `(a, b)` with `4a + 6b = k`, `a` descending.
pub fn basis_pairs(k: i64) -> Vec<(u32, u32)> {
    if k < 0 || k % 2 != 0 {
        return Vec::new();
    }
    (0..=k / 4).rev().filter(|a| (k - 4 * a) % 6 == 0).map(|a| (a as u32, ((k - 4 * a) / 6) as u32)).collect()
}

pub fn dim_mk(k: i64) -> usize {
    basis_pairs(k).len()
}

/// Whole-power coefficients `c_0, c_1, ...` of a series with scalar
/// coefficients, up to the cut.
pub fn scalar_coeffs(f: &QXSeries) -> Result<Vec<GaussianRational>> {
    if !f.has_integral_exponents() {
        return Err(Error::InvalidArgument("series has fractional q-exponents".into()));
    }
    let orders = (f.cut() + Q_UNIT - 1).div_euclid(Q_UNIT).max(0);
    (0..orders)
        .map(|n| {
            let c = f.q_coeff(n)?;
            if c.terms().any(|(i, j, _)| i != 0 || j != 0) {
                return Err(Error::InvalidArgument(format!("coefficient of q^{n} is not a scalar")));
            }
            Ok(c.constant_term().clone())
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct MFSpace {
    pub weight: i64,
    pub basis: Vec<(u32, u32)>,
    pub q_expansions: Vec<QXSeries>,
}

impl MFSpace {
    pub fn new(weight: i64, cut: i64) -> Result<Self> {
        let basis = basis_pairs(weight);
        let e4 = eisenstein_normalized(4, cut, 0, 0)?;
        let e6 = eisenstein_normalized(6, cut, 0, 0)?;
        let q_expansions = basis.iter().map(|&(a, b)| e4.pow(a as i64)?.try_mul(&e6.pow(b as i64)?)).collect::<Result<_>>()?;
        Ok(Self { weight, basis, q_expansions })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_name(&self, idx: usize) -> String {
        let (a, b) = self.basis[idx];
        let part = |name: &str, e: u32| match e {
            0 => String::new(),
            1 => name.to_string(),
            _ => format!("{name}^{e}"),
        };
        let s = format!("{}{}", part("E4", a), part("E6", b));
        if s.is_empty() {
            "1".into()
        } else {
            s
        }
    }

    /// `sum_j lambda_j * basis_j`.
    pub fn combine(&self, lambda: &[GaussianRational]) -> Result<QXSeries> {
        let cut = self.q_expansions.first().map_or(Q_UNIT, QXSeries::cut);
        lambda
            .iter()
            .zip(&self.q_expansions)
            .try_fold(QXSeries::zero(0, 0, cut), |acc, (l, e)| acc.try_add(&e.scale(l)))
    }
}

/// Solves a square system exactly; `None` when singular.
fn solve(mut a: Vec<Vec<GaussianRational>>, mut b: Vec<GaussianRational>) -> Option<Vec<GaussianRational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].inv().ok()?;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= &t;
            }
            let t = &f * &b[col];
            b[r] -= &t;
        }
    }
    Some((0..n).map(|i| &b[i] * &a[i][i].inv().expect("nonzero pivot")).collect())
}

/// Writes `f` in the `E_4^a E_6^b` basis of weight `k`. The first `dim`
/// coefficients fix the combination, every further coefficient below the
/// cut is checked. Needs `cut >= (dim + 2) * 24`.
pub fn decompose(f: &QXSeries, k: i64) -> Result<Vec<GaussianRational>> {
    let dim = dim_mk(k);
    let need = (dim as i64 + 2) * Q_UNIT;
    if f.cut() < need {
        return Err(Error::InsufficientCut { need, have: f.cut() });
    }
    let c = scalar_coeffs(f)?;
    let space = MFSpace::new(k, f.cut())?;
    let rows: Vec<Vec<GaussianRational>> = space.q_expansions.iter().map(scalar_coeffs).collect::<Result<_>>()?;
    let matrix = (0..dim).map(|n| (0..dim).map(|j| rows[j][n].clone()).collect()).collect();
    let lambda = solve(matrix, c[..dim].to_vec()).expect("E4/E6 monomials have an invertible leading block");
    for (n, cn) in c.iter().enumerate().skip(dim) {
        let fitted = (0..dim).fold(GaussianRational::zero(), |acc, j| &acc + &(&lambda[j] * &rows[j][n]));
        if &fitted != cn {
            return Err(Error::NotInSpan { weight: k, order: n as i64 });
        }
    }
    Ok(lambda)
}

/// `c_order = sum_j coefficients[j] * c_j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffRelation {
    pub order: usize,
    #[serde(serialize_with = "ser_rationals")]
    pub coefficients: Vec<Rational>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational_display))
}

impl CoeffRelation {
    pub fn predict(&self, c: &[GaussianRational]) -> GaussianRational {
        self.coefficients.iter().zip(c).fold(GaussianRational::zero(), |acc, (k, x)| &acc + &x.scale(k))
    }

    pub fn holds(&self, c: &[GaussianRational]) -> bool {
        c.len() > self.order && self.predict(c) == c[self.order]
    }

    /// Renders with coefficient names produced by `name(j)`.
    pub fn render(&self, name: impl Fn(usize) -> String) -> String {
        let mut out = String::new();
        for (j, k) in self.coefficients.iter().enumerate().rev() {
            if k.is_zero() {
                continue;
            }
            let mag = if k.abs().is_one() { name(j) } else { format!("{}*{}", rational_display(&k.abs()), name(j)) };
            match (out.is_empty(), k.is_negative()) {
                (true, false) => out.push_str(&mag),
                (true, true) => out.push_str(&format!("-{mag}")),
                (false, false) => out.push_str(&format!(" + {mag}")),
                (false, true) => out.push_str(&format!(" - {mag}")),
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        format!("{} = {out}", name(self.order))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearRelation {
    pub weight: i64,
    pub dim: usize,
    pub relations: Vec<CoeffRelation>,
}

/// `alpha`, `beta` of a relation: `c_1 = alpha c_0, c_2 = beta c_0` in
/// dimension one, `c_2 = alpha c_1 + beta c_0` in dimension two.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationSummary {
    pub alpha: String,
    pub beta: String,
}

impl LinearRelation {
    pub fn alpha(&self) -> Rational {
        match self.dim {
            1 => self.relations[0].coefficients[0].clone(),
            _ => self.relations[0].coefficients[1].clone(),
        }
    }

    pub fn beta(&self) -> Rational {
        match self.dim {
            1 => self.relations[1].coefficients[0].clone(),
            _ => self.relations[0].coefficients[0].clone(),
        }
    }

    pub fn summary(&self) -> RelationSummary {
        RelationSummary { alpha: rational_display(&self.alpha()), beta: rational_display(&self.beta()) }
    }

    pub fn holds(&self, c: &[GaussianRational]) -> bool {
        self.relations.iter().all(|r| r.holds(c))
    }

    /// Largest integer dividing `c_order` whenever the lower coefficients
    /// are integers, one entry per relation; `None` for non-integral relations.
    pub fn divisors(&self) -> Vec<Option<BigInt>> {
        self.relations
            .iter()
            .map(|r| {
                r.coefficients.iter().try_fold(BigInt::zero(), |g, k| k.is_integer().then(|| g.gcd(&k.to_integer())))
            })
            .collect()
    }
}

impl fmt::Display for LinearRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.relations.iter().map(|r| r.render(|j| format!("c{j}"))).collect();
        write!(f, "{}", lines.join("\n"))
    }
}

fn real_part(x: &GaussianRational) -> Rational {
    debug_assert!(x.is_real());
    x.re.clone()
}

/// Relations among `c_0, c_1, c_2` satisfied by every weight `k` form.
pub fn q_coeff_relation(k: i64) -> Result<LinearRelation> {
    let dim = dim_mk(k);
    let space = MFSpace::new(k, 3 * Q_UNIT)?;
    let rows: Vec<Vec<GaussianRational>> = space.q_expansions.iter().map(scalar_coeffs).collect::<Result<_>>()?;
    let relations = match dim {
        0 => return Err(Error::ZeroSpace(k)),
        1 => {
            let e = &rows[0];
            let inv = e[0].inv()?;
            vec![
                CoeffRelation { order: 1, coefficients: vec![real_part(&(&e[1] * &inv))] },
                CoeffRelation { order: 2, coefficients: vec![real_part(&(&e[2] * &inv)), Rational::zero()] },
            ]
        }
        2 => {
            // (beta, alpha) with e_2 = beta e_0 + alpha e_1 for both basis rows
            let m = rows.iter().map(|e| vec![e[0].clone(), e[1].clone()]).collect();
            let rhs = rows.iter().map(|e| e[2].clone()).collect();
            let x = solve(m, rhs).expect("E4/E6 monomials have an invertible leading block");
            vec![CoeffRelation { order: 2, coefficients: x.iter().map(real_part).collect() }]
        }
        n => return Err(Error::Unsupported(format!("weight {k} has dimension {n}; relations are only derived for dimension 1 and 2"))),
    };
    Ok(LinearRelation { weight: k, dim, relations })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Identity {
    pub series: String,
    pub weight: i64,
    pub statement: String,
    pub holds: bool,
}

/// Cancellation identities carried by `a_0` (weight `d - l a0`) and `a_1`
/// (weight `d - l a0 + 1`), instantiated with the computed numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnomalyReport {
    pub weight: i64,
    pub dim: usize,
    pub relation: Option<RelationSummary>,
    pub a0_coeffs: Vec<String>,
    pub a1_weight: i64,
    pub a1_dim: usize,
    pub a1_relation: Option<RelationSummary>,
    pub a1_coeffs: Vec<String>,
    pub identities: Vec<Identity>,
    pub divisibility: Vec<String>,
}

impl AnomalyReport {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(|i| i.holds)
    }
}

struct Section {
    relation: Option<RelationSummary>,
    coeffs: Vec<String>,
    identities: Vec<Identity>,
    divisibility: Vec<String>,
}

fn section(name: &str, series: &QXSeries, weight: i64) -> Result<Section> {
    let c = scalar_coeffs(series)?;
    let dim = dim_mk(weight);
    let coeff_name = |j: usize| format!("{name}[q^{j}]");
    let ident = |statement: String, holds: bool| Identity { series: name.into(), weight, statement, holds };
    let mut out = Section {
        relation: None,
        coeffs: c.iter().map(|x| x.to_string()).collect(),
        identities: Vec::new(),
        divisibility: Vec::new(),
    };
    if dim == 0 {
        out.identities.push(ident(format!("{name} = 0 (no nonzero forms of weight {weight})"), series.is_zero()));
        return Ok(out);
    }
    if dim <= 2 {
        let rel = q_coeff_relation(weight)?;
        out.relation = Some(rel.summary());
        for (r, div) in rel.relations.iter().zip(rel.divisors()) {
            if c.len() <= r.order {
                continue;
            }
            let values = r.render(|j| format!("({})", c[j]));
            out.identities.push(ident(format!("{} : {} vs {values}", r.render(coeff_name), c[r.order]), r.holds(&c)));
            if let Some(g) = div.filter(|g| g > &BigInt::one()) {
                let lower: Vec<String> = (0..r.order).filter(|&j| !r.coefficients[j].is_zero()).map(coeff_name).collect();
                let quotient = c[r.order].scale(&Rational::new(BigInt::one(), g.clone()));
                out.divisibility.push(format!(
                    "{} is an integer multiple of {g} when {} integral (quotient here {quotient})",
                    coeff_name(r.order),
                    if lower.len() == 1 { format!("{} is", lower[0]) } else { format!("{} are", lower.join(", ")) }
                ));
            }
        }
    }
    match decompose(series, weight) {
        Ok(l) => {
            let space = MFSpace::new(weight, Q_UNIT)?;
            let terms: Vec<String> = l.iter().enumerate().map(|(j, x)| format!("({x})*{}", space.basis_name(j))).collect();
            out.identities.push(ident(format!("{name} = {}", terms.join(" + ")), true));
        }
        Err(Error::NotInSpan { order, .. }) => {
            out.identities.push(ident(format!("{name} is not a weight {weight} form (mismatch at q^{order})"), false))
        }
        Err(Error::InsufficientCut { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok(out)
}

pub fn anomaly_report(spec: &ManifoldSpec, cut: i64) -> Result<AnomalyReport> {
    let a = a_n_series(spec, 1, cut)?;
    let k = spec.k();
    let s0 = section("a0", &a[0], k)?;
    let s1 = section("a1", &a[1], k + 1)?;
    let mut identities = s0.identities;
    identities.extend(s1.identities);
    let mut divisibility = s0.divisibility;
    divisibility.extend(s1.divisibility);
    Ok(AnomalyReport {
        weight: k,
        dim: dim_mk(k),
        relation: s0.relation,
        a0_coeffs: s0.coeffs,
        a1_weight: k + 1,
        a1_dim: dim_mk(k + 1),
        a1_relation: s1.relation,
        a1_coeffs: s1.coeffs,
        identities,
        divisibility,
    })
}

impl fmt::Display for AnomalyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "a0: weight {}, dim {}", self.weight, self.dim)?;
        writeln!(f, "  coefficients: {}", self.a0_coeffs.join(", "))?;
        writeln!(f, "a1: weight {}, dim {}", self.a1_weight, self.a1_dim)?;
        writeln!(f, "  coefficients: {}", self.a1_coeffs.join(", "))?;
        for i in &self.identities {
            writeln!(f, "{} {}", if i.holds { "HOLDS" } else { "FAILS" }, i.statement)?;
        }
        for d in &self.divisibility {
            writeln!(f, "divisibility: {d}")?;
        }
        Ok(())
    }
}


#[cfg(test)]
mod report_tests {
    use super::*;
    use crate::arith::parse_gaussian;

    fn spec(d: usize, x: &[&str]) -> ManifoldSpec {
        let roots = x.iter().map(|s| parse_gaussian(s).unwrap()).collect();
        ManifoldSpec::new(d, 2, 1, vec![1], roots, vec![1.into(), (-1).into()]).unwrap()
    }

    #[test]
    fn weight_four_report() {
        let s = spec(6, &["-1-i", "-1+i", "1", "1", "0", "0"]);
        let rep = anomaly_report(&s, 3 * Q_UNIT).unwrap();
        assert_eq!((rep.weight, rep.dim), (4, 1));
        assert_eq!(rep.relation, Some(RelationSummary { alpha: "240".into(), beta: "2160".into() }));
        assert!(rep.all_hold(), "{rep}");
        assert_ne!(rep.a0_coeffs[0], "0", "{rep}");
    }

    #[test]
    fn weight_three_report() {
        let x = ["1", "-1", "i", "-i"].iter().map(|r| parse_gaussian(r).unwrap()).collect();
        let s = ManifoldSpec::new(4, 1, 1, vec![2], x, vec![0.into()]).unwrap();
        let rep = anomaly_report(&s, 3 * Q_UNIT).unwrap();
        assert_eq!((rep.weight, rep.dim, rep.a1_weight, rep.a1_dim), (3, 0, 4, 1));
        assert!(rep.all_hold(), "{rep}");
        assert!(rep.a0_coeffs.iter().all(|c| c == "0"));
        assert_ne!(rep.a1_coeffs[0], "0", "{rep}");
        assert!(rep.divisibility.iter().any(|d| d.starts_with("a1[q^1] is an integer multiple of 240")), "{rep}");
    }
}
