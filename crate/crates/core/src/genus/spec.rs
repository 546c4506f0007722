use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{rat, GaussianRational};
use crate::error::{Error, Result};
use crate::jet::JetElement;

/// Root data of the real bundle `V` (rank `2 * b0`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct VData {
    pub b0: usize,
    pub u_roots: Vec<GaussianRational>,
}

/// Splitting-principle input: scaled Chern roots `X_i = eps * xRoots[i]`,
/// `W_j = eps * wRoots[j]`, `U_r = eps * uRoots[r]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ManifoldSpec {
    pub d: usize,
    pub l: usize,
    pub a0: usize,
    pub m: Vec<i64>,
    pub x_roots: Vec<GaussianRational>,
    pub w_roots: Vec<GaussianRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<VData>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub name: &'static str,
    pub pass: bool,
}

pub const C1W_ZERO: &str = "c1W_zero";
pub const C1M_ZERO: &str = "c1M_zero";
pub const P1_MATCH: &str = "p1_match";
pub const P1V_ZERO: &str = "p1V_zero";

fn sum(v: &[GaussianRational]) -> GaussianRational {
    v.iter().fold(GaussianRational::zero(), |a, b| &a + b)
}

fn sum_sq(v: &[GaussianRational]) -> GaussianRational {
    v.iter().fold(GaussianRational::zero(), |a, b| &a + &(b * b))
}

impl ManifoldSpec {
    pub fn new(
        d: usize,
        l: usize,
        a0: usize,
        m: Vec<i64>,
        x_roots: Vec<GaussianRational>,
        w_roots: Vec<GaussianRational>,
    ) -> Result<Self> {
        let s = Self { d, l, a0, m, x_roots, w_roots, v: None };
        s.validate()?;
        Ok(s)
    }

    pub fn with_v(mut self, u_roots: Vec<GaussianRational>) -> Result<Self> {
        self.v = Some(VData { b0: u_roots.len(), u_roots });
        self.validate()?;
        Ok(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    /// Structural checks: positive sizes and list lengths that agree with them.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.d == 0 || self.l == 0 || self.a0 == 0 {
            return bad("d, l and a0 must be positive".into());
        }
        if self.m.len() != self.a0 {
            return bad(format!("m has {} entries, a0 = {}", self.m.len(), self.a0));
        }
        if self.m.iter().any(|&m| m <= 0) {
            return bad("every m_r must be a positive integer".into());
        }
        if self.x_roots.len() != self.d {
            return bad(format!("xRoots has {} entries, d = {}", self.x_roots.len(), self.d));
        }
        if self.w_roots.len() != self.l {
            return bad(format!("wRoots has {} entries, l = {}", self.w_roots.len(), self.l));
        }
        if let Some(v) = &self.v {
            if v.b0 == 0 {
                return bad("b0 must be positive".into());
            }
            if v.u_roots.len() != v.b0 {
                return bad(format!("uRoots has {} entries, b0 = {}", v.u_roots.len(), v.b0));
            }
        }
        Ok(())
    }

    /// The weight `d - l * a0`.
    pub fn k(&self) -> i64 {
        self.d as i64 - (self.l * self.a0) as i64
    }

    /// `l * sum m_r^2` (twice the index).
    pub fn m2(&self) -> i64 {
        self.l as i64 * self.m.iter().map(|m| m * m).sum::<i64>()
    }

    /// `l * sum m_r`.
    pub fn m1(&self) -> i64 {
        self.l as i64 * self.m.iter().sum::<i64>()
    }

    pub fn b0(&self) -> usize {
        self.v.as_ref().map_or(0, |v| v.b0)
    }

    pub fn u_roots(&self) -> &[GaussianRational] {
        self.v.as_ref().map_or(&[], |v| &v.u_roots)
    }

    pub fn flags(&self) -> Vec<Flag> {
        let mut out = vec![
            Flag { name: C1W_ZERO, pass: sum(&self.w_roots).is_zero() },
            Flag { name: C1M_ZERO, pass: sum(&self.x_roots).is_zero() },
            Flag {
                name: P1_MATCH,
                pass: sum_sq(&self.x_roots)
                    == sum_sq(&self.w_roots).scale(&rat(self.a0 as i64, 1)),
            },
        ];
        if let Some(v) = &self.v {
            out.push(Flag { name: P1V_ZERO, pass: sum_sq(&v.u_roots).is_zero() });
        }
        out
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        self.flags().into_iter().find(|f| f.name == name).map(|f| f.pass)
    }

    /// Fails with the first named flag that does not hold.
    pub fn require(&self, names: &[&'static str]) -> Result<()> {
        let flags = self.flags();
        for name in names {
            match flags.iter().find(|f| f.name == *name) {
                Some(f) if f.pass => {}
                Some(_) => return Err(Error::FlagFailed(name)),
                None => return Err(Error::InvalidSpec(format!("{name} needs V data"))),
            }
        }
        Ok(())
    }

    /// Hypotheses of the modularity statements and the coefficient identities.
    pub fn require_modular(&self) -> Result<()> {
        self.require(&[C1W_ZERO, C1M_ZERO, P1_MATCH])
    }

    pub(crate) fn eps_roots(d_cap: usize, z_cap: usize, a: &[GaussianRational]) -> Vec<JetElement> {
        a.iter().map(|x| JetElement::eps_times(d_cap, z_cap, x.clone())).collect()
    }
}

/// Bounds for [`random_spec`].
#[derive(Clone, Copy, Debug)]
pub struct RandomSpecBounds {
    pub max_d: usize,
    pub max_l: usize,
    pub max_a0: usize,
    pub max_m: i64,
    /// `Some(max_b0)` attaches V data.
    pub max_b0: Option<usize>,
    /// Allow non-real Gaussian roots.
    pub gaussian: bool,
}

impl Default for RandomSpecBounds {
    fn default() -> Self {
        Self { max_d: 3, max_l: 2, max_a0: 2, max_m: 3, max_b0: None, gaussian: false }
    }
}

fn random_rational<R: Rng>(rng: &mut R) -> crate::arith::Rational {
    rat(rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

fn random_root<R: Rng>(rng: &mut R, gaussian: bool) -> GaussianRational {
    let re = random_rational(rng);
    let im = if gaussian && rng.gen_bool(0.5) { random_rational(rng) } else { rat(0, 1) };
    GaussianRational::new(re, im)
}

/// Unconstrained spec with small rational roots; no flags are enforced.
pub fn random_spec<R: Rng>(rng: &mut R, b: &RandomSpecBounds) -> ManifoldSpec {
    let d = rng.gen_range(1..=b.max_d);
    let l = rng.gen_range(1..=b.max_l);
    let a0 = rng.gen_range(1..=b.max_a0);
    let mut spec = ManifoldSpec {
        d,
        l,
        a0,
        m: (0..a0).map(|_| rng.gen_range(1..=b.max_m)).collect(),
        x_roots: (0..d).map(|_| random_root(rng, b.gaussian)).collect(),
        w_roots: (0..l).map(|_| random_root(rng, b.gaussian)).collect(),
        v: None,
    };
    if let Some(max_b0) = b.max_b0 {
        let b0 = rng.gen_range(1..=max_b0);
        spec.v = Some(VData { b0, u_roots: (0..b0).map(|_| random_root(rng, b.gaussian)).collect() });
    }
    spec
}

fn g(n: i64) -> GaussianRational {
    GaussianRational::from_int(n)
}

fn gi(n: i64) -> GaussianRational {
    GaussianRational::new(rat(0, 1), rat(n, 1))
}

/// Hand-picked root configurations satisfying every modularity flag,
/// as `(l, a0, xRoots, wRoots)`.
pub fn valid_families() -> Vec<(usize, usize, Vec<GaussianRational>, Vec<GaussianRational>)> {
    vec![
        (2, 1, vec![g(1), g(-1)], vec![g(1), g(-1)]),
        (2, 1, vec![g(1), g(-1), g(0)], vec![g(1), g(-1)]),
        (2, 1, vec![g(3), g(5), g(-8)], vec![g(7), g(-7)]),
        (2, 1, vec![g(1), g(-1), g(0), g(0)], vec![g(1), g(-1)]),
        (1, 1, vec![g(1), g(-1), gi(1), gi(-1)], vec![g(0)]),
        (1, 2, vec![g(1), g(-1), gi(1), gi(-1)], vec![g(0)]),
        (2, 2, vec![g(1), g(-1), g(1), g(-1)], vec![g(1), g(-1)]),
        (2, 1, vec![g(1), g(-1), g(0), g(0), g(0)], vec![g(1), g(-1)]),
        (2, 2, vec![g(1), g(-1), g(1), g(-1), g(0)], vec![g(1), g(-1)]),
        (1, 1, vec![g(1), g(-1), gi(1), gi(-1), g(0)], vec![g(0)]),
    ]
}

/// Specs passing the modularity flags whose genus is not identically zero,
/// one per weight 2, 3, 2 (the last with `m = (1, 2)`), 4.
pub fn reference_specs() -> Vec<ManifoldSpec> {
    let gauss = || vec![g(1), g(-1), gi(1), gi(-1)];
    let x6 = vec![
        GaussianRational::new(rat(-1, 1), rat(-1, 1)),
        GaussianRational::new(rat(-1, 1), rat(1, 1)),
        g(1),
        g(1),
        g(0),
        g(0),
    ];
    vec![
        ManifoldSpec { d: 4, l: 2, a0: 1, m: vec![2], x_roots: vec![g(1), g(-1), g(0), g(0)], w_roots: vec![g(1), g(-1)], v: None },
        ManifoldSpec { d: 4, l: 1, a0: 1, m: vec![1], x_roots: gauss(), w_roots: vec![g(0)], v: None },
        ManifoldSpec { d: 4, l: 1, a0: 2, m: vec![1, 2], x_roots: gauss(), w_roots: vec![g(0)], v: None },
        ManifoldSpec { d: 6, l: 2, a0: 1, m: vec![1], x_roots: x6, w_roots: vec![g(1), g(-1)], v: None },
    ]
}

/// A spec passing `c1W_zero`, `c1M_zero` and `p1_match`: a random family,
/// rescaled and permuted, with random `m_r`.
pub fn random_valid_spec<R: Rng>(rng: &mut R, max_d: usize, max_m: i64) -> ManifoldSpec {
    let fams: Vec<_> = valid_families().into_iter().filter(|f| f.2.len() <= max_d).collect();
    let (l, a0, mut x, mut w) = fams.choose(rng).expect("a family fits").clone();
    let s = GaussianRational::real(rat(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=2)));
    x.iter_mut().for_each(|r| *r = &*r * &s);
    w.iter_mut().for_each(|r| *r = &*r * &s);
    x.shuffle(rng);
    w.shuffle(rng);
    let m = (0..a0).map(|_| rng.gen_range(1..=max_m)).collect();
    ManifoldSpec { d: x.len(), l, a0, m, x_roots: x, w_roots: w, v: None }
}

/// V roots with vanishing sum of squares: pairs `(c, i c)`.
pub fn random_p1v_zero_roots<R: Rng>(rng: &mut R, pairs: usize) -> Vec<GaussianRational> {
    let mut out = Vec::with_capacity(2 * pairs);
    for _ in 0..pairs {
        let c = GaussianRational::real(random_rational(rng));
        out.push(&c * &GaussianRational::i());
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn json_round_trip_with_shorthand() {
        let text = r#"{"d":2,"l":1,"a0":1,"m":[1],"xRoots":["1/1","-1/1"],"wRoots":["0/1"],"v":{"b0":2,"uRoots":["1/1","i"]}}"#;
        let s = ManifoldSpec::from_json(text).unwrap();
        assert_eq!(s.v.as_ref().unwrap().u_roots[1], GaussianRational::i());
        assert_eq!(ManifoldSpec::from_json(&s.to_json()).unwrap(), s);
        assert_eq!(s.flag(P1V_ZERO), Some(true));
        assert_eq!(s.flag(C1M_ZERO), Some(true));
        assert_eq!(s.flag(P1_MATCH), Some(false));
    }

    #[test]
    fn rejects_malformed_specs() {
        for text in [
            r#"{"d":2,"l":1,"a0":1,"m":[1],"xRoots":["1"],"wRoots":["0"]}"#,
            r#"{"d":1,"l":1,"a0":2,"m":[1],"xRoots":["1"],"wRoots":["0"]}"#,
            r#"{"d":1,"l":1,"a0":1,"m":[0],"xRoots":["1"],"wRoots":["0"]}"#,
            r#"{"d":1,"l":1,"a0":1,"m":[1],"xRoots":["x"],"wRoots":["0"]}"#,
            r#"{"d":0,"l":1,"a0":1,"m":[1],"xRoots":[],"wRoots":["0"]}"#,
        ] {
            assert!(matches!(ManifoldSpec::from_json(text), Err(Error::InvalidSpec(_))), "{text}");
        }
    }

    #[test]
    fn families_pass_all_flags() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = random_valid_spec(&mut rng, 6, 3);
            s.validate().unwrap();
            assert!(s.require_modular().is_ok(), "{}", s.to_json());
            let s = s.with_v(random_p1v_zero_roots(&mut rng, 1)).unwrap();
            assert_eq!(s.flag(P1V_ZERO), Some(true));
        }
    }

    #[test]
    fn require_names_the_failing_flag() {
        let s = ManifoldSpec::new(1, 1, 1, vec![1], vec![g(1)], vec![g(0)]).unwrap();
        assert_eq!(s.require_modular(), Err(Error::FlagFailed(C1M_ZERO)));
        let s = ManifoldSpec::new(2, 1, 1, vec![1], vec![g(1), g(-1)], vec![g(0)]).unwrap();
        assert_eq!(s.require_modular(), Err(Error::FlagFailed(P1_MATCH)));
    }
}
