mod render;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ellgenus_core::genus::{a_n_from_ell, ell_theta, ManifoldSpec};
use ellgenus_core::modforms::{anomaly_report, decompose, dim_mk, q_coeff_relation, MFSpace};
use ellgenus_core::{eisenstein_normalized, eisenstein_raw, Error, Q_UNIT};
use serde::{Deserialize, Serialize};

use render::{q_polynomial, series_lines, status};
use suites::{SuiteArgs, SUITES};

#[derive(Parser)]
#[command(name = "ellgenus", version, about = "Exact twisted elliptic genera and their modular-form relations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print an Eisenstein series q-expansion.
    Eisenstein {
        /// Even weight, at least 2.
        #[arg(long)]
        k: i64,
        /// Number of q-powers to print.
        #[arg(long, default_value_t = 6)]
        terms: usize,
        /// Unnormalized series `-B_k/(2k) + sum sigma_{k-1}(n) q^n`.
        #[arg(long)]
        raw: bool,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_parser = suite_name)]
        suite: String,
        /// Spec JSON file; replaces the suite's built-in specs.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Number of exact q-powers.
        #[arg(long, default_value_t = 3)]
        cut: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random specs for the randomized suites.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Compute the genus of a spec and optionally its a_n coefficients.
    Genus {
        #[arg(long)]
        spec: PathBuf,
        /// Number of exact q-powers.
        #[arg(long, default_value_t = 3)]
        cut: i64,
        /// Highest power of Z kept.
        #[arg(long, default_value_t = 4)]
        zmax: usize,
        /// Also print a_0 .. a_N with their modular-form decompositions.
        #[arg(long)]
        an: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Print the q-coefficient relation of weight k modular forms.
    Relation {
        #[arg(long)]
        weight: i64,
    },
    /// Cancellation identities and divisibility for a spec.
    Anomaly {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 3)]
        cut: i64,
        #[arg(long)]
        json: bool,
    },
}

fn suite_name(s: &str) -> std::result::Result<String, String> {
    if s == "all" || SUITES.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("expected one of {} or all", SUITES.join(", ")))
    }
}

/// Exit status 2: the input could not be used.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn load_spec(path: &PathBuf) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    ManifoldSpec::from_json(&text).map_err(|e| input_err(e.to_string()))
}

fn q_cut(cut: i64) -> Result<i64> {
    if cut < 1 {
        return Err(input_err(format!("--cut must be at least 1, got {cut}")));
    }
    Ok(cut * Q_UNIT)
}

/// Library errors caused by the inputs rather than by a failed check.
fn classify(e: Error) -> anyhow::Error {
    match e {
        Error::FlagFailed(_) | Error::InvalidSpec(_) | Error::InvalidArgument(_) | Error::InsufficientCut { .. } => {
            input_err(e.to_string())
        }
        other => other.into(),
    }
}

fn cmd_eisenstein(k: i64, terms: usize, raw: bool) -> Result<i32> {
    if k < 2 || k % 2 != 0 {
        return Err(input_err(format!("--k must be even and at least 2, got {k}")));
    }
    if terms == 0 {
        return Err(input_err("--terms must be positive"));
    }
    let cut = terms as i64 * Q_UNIT;
    let s = if raw { eisenstein_raw(k, cut, 0, 0)? } else { eisenstein_normalized(k, cut, 0, 0)? };
    let coeffs = (0..terms as i64).map(|n| s.q_scalar(n).map(|c| c.re)).collect::<ellgenus_core::Result<Vec<_>>>()?;
    println!("{}", q_polynomial(&coeffs));
    Ok(0)
}

fn cmd_verify(suite: &str, spec: Option<PathBuf>, cut: i64, seed: u64, count: Option<usize>, json: bool) -> Result<i32> {
    let spec = spec.as_ref().map(load_spec).transpose()?;
    let args = SuiteArgs { spec, cut: q_cut(cut)?, seed, count };
    let res = suites::run(suite, &args).map_err(|e| match e.downcast::<Error>() {
        Ok(inner) => classify(inner),
        Err(e) => input_err(e.to_string()),
    })?;
    if json {
        println!("{}", serde_json::to_string_pretty(&res)?);
    } else {
        print!("{}", res.render());
    }
    Ok(res.exit_code)
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagOut {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct TermOut {
    pub q: i64,
    /// Coefficients of `Z^0 .. Z^zmax`.
    pub z: Vec<String>,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct AnOut {
    pub n: usize,
    pub weight: i64,
    pub dim: usize,
    pub coeffs: Vec<String>,
    pub decomposition: Option<Vec<String>>,
    pub note: Option<String>,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GenusOut {
    pub spec: serde_json::Value,
    pub weight: i64,
    pub flags: Vec<FlagOut>,
    pub cut: i64,
    pub zmax: usize,
    pub series: Vec<TermOut>,
    pub an: Option<Vec<AnOut>>,
}

fn an_entry(n: usize, weight: i64, s: &ellgenus_core::QXSeries) -> Result<AnOut> {
    let coeffs = ellgenus_core::modforms::scalar_coeffs(s)?.iter().map(|c| c.to_string()).collect();
    let (decomposition, note) = match decompose(s, weight) {
        Ok(l) => {
            let space = MFSpace::new(weight, Q_UNIT)?;
            let names = l.iter().enumerate().map(|(j, x)| format!("({x})*{}", space.basis_name(j))).collect();
            (Some(names), None)
        }
        Err(Error::NotInSpan { order, .. }) => (None, Some(format!("not a weight {weight} form: mismatch at q^{order}"))),
        Err(Error::InsufficientCut { need, .. }) => {
            (None, Some(format!("decomposition needs --cut {}", need / Q_UNIT)))
        }
        Err(e) => return Err(e.into()),
    };
    Ok(AnOut { n, weight, dim: dim_mk(weight), coeffs, decomposition, note })
}

fn cmd_genus(path: PathBuf, cut: i64, zmax: usize, an: Option<usize>, json: bool) -> Result<i32> {
    let spec = load_spec(&path)?;
    let cut = q_cut(cut)?;
    if let Some(n) = an {
        spec.require_modular().map_err(classify)?;
        if n > zmax {
            return Err(input_err(format!("--an {n} exceeds --zmax {zmax}")));
        }
    }
    let ell = ell_theta(&spec, cut, zmax).map_err(classify)?;
    let series = ell
        .value
        .terms()
        .map(|(n, c)| {
            let z = (0..=zmax).map(|j| c.coeff(0, j).map(|x| x.to_string())).collect::<ellgenus_core::Result<_>>()?;
            Ok(TermOut { q: n / Q_UNIT, z })
        })
        .collect::<Result<Vec<_>>>()?;
    let an = match an {
        Some(n) => {
            let a = a_n_from_ell(&spec, &ell.value, n).map_err(classify)?;
            Some(a.iter().enumerate().map(|(i, s)| an_entry(i, spec.k() + i as i64, s)).collect::<Result<Vec<_>>>()?)
        }
        None => None,
    };
    let out = GenusOut {
        spec: serde_json::from_str(&spec.to_json())?,
        weight: spec.k(),
        flags: spec.flags().into_iter().map(|f| FlagOut { name: f.name.into(), pass: f.pass }).collect(),
        cut: cut / Q_UNIT,
        zmax,
        series,
        an,
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&out)?);
        return Ok(0);
    }
    println!("d={} l={} a0={} m={:?} weight d-l*a0={}", spec.d, spec.l, spec.a0, spec.m, spec.k());
    for f in &out.flags {
        println!("flag {} {}", f.name, status(f.pass));
    }
    println!("Ell (top degree, Z = 2*pi*i*z):");
    for line in series_lines(&ell.value) {
        println!("  {line}");
    }
    for a in out.an.iter().flatten() {
        println!("a{} (weight {}, dim {}): {}", a.n, a.weight, a.dim, a.coeffs.join(", "));
        match (&a.decomposition, &a.note) {
            (Some(d), _) if d.is_empty() => println!("  = 0"),
            (Some(d), _) => println!("  = {}", d.join(" + ")),
            (None, Some(note)) => println!("  {note}"),
            (None, None) => {}
        }
    }
    Ok(0)
}

fn cmd_relation(weight: i64) -> Result<i32> {
    match q_coeff_relation(weight) {
        Ok(rel) => println!("{rel}"),
        Err(Error::ZeroSpace(_)) => println!("space is zero"),
        Err(Error::Unsupported(msg)) => println!("{msg}"),
        Err(e) => return Err(e.into()),
    }
    Ok(0)
}

fn cmd_anomaly(path: PathBuf, cut: i64, json: bool) -> Result<i32> {
    let spec = load_spec(&path)?;
    let rep = anomaly_report(&spec, q_cut(cut)?).map_err(classify)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&rep)?);
    } else {
        if let Some(r) = &rep.relation {
            println!("relation at weight {}: alpha = {}, beta = {}", rep.weight, r.alpha, r.beta);
        }
        print!("{rep}");
    }
    Ok(if rep.all_hold() { 0 } else { 1 })
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Eisenstein { k, terms, raw } => cmd_eisenstein(k, terms, raw),
        Command::Verify { suite, spec, cut, seed, count, json } => cmd_verify(&suite, spec, cut, seed, count, json),
        Command::Genus { spec, cut, zmax, an, json } => cmd_genus(spec, cut, zmax, an, json),
        Command::Relation { weight } => cmd_relation(weight),
        Command::Anomaly { spec, cut, json } => cmd_anomaly(spec, cut, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli).context("ellgenus") {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.root_cause());
            ExitCode::from(if e.chain().any(|c| c.is::<InputError>()) { 2 } else { 1 })
        }
    }
}
