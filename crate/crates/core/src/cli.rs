//! Command-line interface.
//!
//! Exit codes: 0 success, 1 certificate rejected by `verify`, 2 invalid
//! input, 3 budget exceeded.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::conics::{find_conic_point, parametrize_conic, solve_general_fp};
use crate::error::Error;
use crate::global::{
    global_search_height, search_counterexamples, verify_certificate, CounterexampleCertificate,
    Hypothesis, SearchConfig,
};
use crate::lifting::{lift_fourth_power_2adic, lift_rth_power};
use crate::local::{decide_local, real_solvable, LocalReport};
use crate::modarith::{legendre, LiftRequest};
use crate::padic::{p_local_solve_general, DEFAULT_PRECISION};
use crate::primes::prime_divisors;
use crate::system::SystemCoeffs;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_CERTIFICATE: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hasse", version, about = "Local-global solvability of aU^2 + bV^2 + cW^2 = dZ^2, UW = V^2")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct Coeffs {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Legendre symbol (a/p).
    #[command(allow_negative_numbers = true)]
    Legendre { a: i64, p: i64 },
    /// A point on ax^2 + by^2 = 1 over F_p and the conic's parametrization.
    #[command(allow_negative_numbers = true)]
    Conic { a: i64, b: i64, p: i64 },
    /// A nontrivial solution over F_p.
    #[command(allow_negative_numbers = true)]
    SolveFp {
        #[command(flatten)]
        coeffs: Coeffs,
        p: i64,
    },
    /// Lift an r-th power residue of N from p to p^k.
    #[command(allow_negative_numbers = true)]
    Lift { n: i64, r: u32, p: i64, k: u32 },
    /// Decide local solvability at the reals and every prime.
    #[command(allow_negative_numbers = true)]
    Local {
        #[command(flatten)]
        coeffs: Coeffs,
    },
    /// Least primitive integer solution up to a height.
    #[command(allow_negative_numbers = true)]
    GlobalSearch {
        #[command(flatten)]
        coeffs: Coeffs,
        #[arg(long, default_value_t = 100)]
        height: i64,
    },
    /// Certified counterexamples U^2 - qW^2 = dZ^2, UW = V^2.
    Counterexamples {
        #[arg(long, default_value_t = 100)]
        q_bound: i64,
        #[arg(long, default_value_t = 20)]
        d_bound: i64,
        /// Also search for integer solutions up to this height.
        #[arg(long, default_value_t = 0)]
        height: i64,
        /// Accept q = 1 mod 8 instead of q = 1 mod 16.
        #[arg(long)]
        relaxed: bool,
    },
    /// Re-check certificates (one JSON object, or JSON lines).
    Verify { file: PathBuf },
    /// A p-adic solution for a prime p not dividing 2acd(b^2 - 4ac).
    #[command(allow_negative_numbers = true)]
    PadicSolve {
        #[command(flatten)]
        coeffs: Coeffs,
        p: i64,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: usize,
    },
}

/// Provenance attached to every JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub budgets: BTreeMap<String, i64>,
    pub version: String,
    pub outcome: String,
}

enum Failure {
    Input(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Result of one command: text lines, a JSON payload, the outcome summary
/// and the exit code.
struct Output {
    text: Vec<String>,
    json: Vec<Value>,
    outcome: String,
    code: i32,
}

impl Output {
    fn new(outcome: impl Into<String>) -> Self {
        Output {
            text: Vec::new(),
            json: Vec::new(),
            outcome: outcome.into(),
            code: EXIT_OK,
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let arguments: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let (name, budgets) = describe(&cli.command);
    match execute(&cli.command) {
        Ok(res) => {
            if cli.json {
                for v in &res.json {
                    let _ = writeln!(out, "{v}");
                }
                let manifest = RunManifest {
                    command: name.into(),
                    arguments,
                    budgets,
                    version: env!("CARGO_PKG_VERSION").into(),
                    outcome: res.outcome.clone(),
                };
                let _ = writeln!(out, "{}", json!({ "manifest": manifest }));
            } else {
                for line in &res.text {
                    let _ = writeln!(out, "{line}");
                }
            }
            res.code
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID_INPUT
        }
        Err(Failure::Budget(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_BUDGET
        }
    }
}

fn describe(cmd: &Command) -> (&'static str, BTreeMap<String, i64>) {
    let mut b = BTreeMap::new();
    let name = match cmd {
        Command::Legendre { .. } => "legendre",
        Command::Conic { .. } => "conic",
        Command::SolveFp { .. } => "solve-fp",
        Command::Lift { .. } => "lift",
        Command::Local { .. } => {
            b.insert("factorization".into(), 1_000_000_000_000);
            b.insert("strong_scan_limit".into(), crate::local::STRONG_SCAN_LIMIT);
            "local"
        }
        Command::GlobalSearch { .. } => {
            b.insert("height".into(), crate::global::HEIGHT_BUDGET);
            "global-search"
        }
        Command::Counterexamples { .. } => {
            b.insert("height".into(), crate::global::HEIGHT_BUDGET);
            b.insert("factorization".into(), 1_000_000_000_000);
            "counterexamples"
        }
        Command::Verify { .. } => "verify",
        Command::PadicSolve { .. } => "padic-solve",
    };
    (name, b)
}

fn system(c: &Coeffs) -> Result<SystemCoeffs, Failure> {
    Ok(SystemCoeffs::new(c.a, c.b, c.c, c.d)?)
}

fn execute(cmd: &Command) -> Result<Output, Failure> {
    match cmd {
        Command::Legendre { a, p } => {
            let v = legendre(*a, *p)?;
            let mut o = Output::new(format!("({a}/{p}) = {}", v.as_i8()));
            o.text.push(v.as_i8().to_string());
            o.json.push(json!({ "a": a, "p": p, "legendre": v.as_i8() }));
            Ok(o)
        }
        Command::Conic { a, b, p } => {
            let pt = find_conic_point(*a, *b, *p)?;
            let mut o = Output::new(format!("point ({}, {})", pt.x0, pt.y0));
            o.text.push(format!("point: ({}, {})", pt.x0, pt.y0));
            let param = if *p == 2 { None } else { Some(parametrize_conic(&pt)?) };
            if let Some(par) = &param {
                o.text.push(format!("q1 = {}", par.q1));
                o.text.push(format!("q2 = {}", par.q2));
                o.text.push(format!("q3 = {}", par.q3));
            }
            o.json.push(json!({ "point": pt, "parametrization": param }));
            Ok(o)
        }
        Command::SolveFp { coeffs, p } => {
            let s = system(coeffs)?;
            let sol = solve_general_fp(&s, *p)?;
            let mut o = Output::new(format!("{} mod {p}", sol.quad));
            o.text.push(format!("{} mod {p}", sol.quad));
            o.json.push(json!({ "coeffs": s, "p": p, "solution": sol }));
            Ok(o)
        }
        Command::Lift { n, r, p, k } => {
            let root = if *p == 2 && *r == 4 {
                lift_fourth_power_2adic(*n, *k)?
            } else {
                lift_rth_power(LiftRequest::new(*n, *r, *p, *k)?)?
            };
            let mut o = Output::new(format!("{root}"));
            o.text.push(format!("{}^{r} = {n} (mod {})", root.value(), root.modulus()));
            o.json.push(json!({ "n": n, "r": r, "p": p, "k": k, "root": root.value(), "modulus": root.modulus() }));
            Ok(o)
        }
        Command::Local { coeffs } => {
            let s = system(coeffs)?;
            if s.is_diagonal() {
                local_diagonal(&s)
            } else {
                local_general(&s)
            }
        }
        Command::GlobalSearch { coeffs, height } => {
            let s = system(coeffs)?;
            let hit = global_search_height(&s, *height)?;
            let outcome = match hit {
                Some(q) => format!("solution {q}"),
                None => format!("no primitive solution of height <= {height}"),
            };
            let mut o = Output::new(outcome.clone());
            o.text.push(outcome);
            o.json.push(json!({ "coeffs": s, "height": height, "solution": hit }));
            Ok(o)
        }
        Command::Counterexamples {
            q_bound,
            d_bound,
            height,
            relaxed,
        } => {
            let mut cfg = SearchConfig::new(*q_bound, *d_bound);
            cfg.height = *height;
            if *relaxed {
                cfg.hypothesis = Hypothesis::Relaxed;
            }
            let found = search_counterexamples(&cfg)?;
            let mut o = Output::new(format!("{} certificates", found.len()));
            for c in &found {
                o.text.push(format!("q = {}, d = {}", c.q, c.d));
                o.json.push(serde_json::to_value(c).expect("certificates serialize"));
            }
            o.text.push(format!("{} certificates", found.len()));
            Ok(o)
        }
        Command::Verify { file } => verify_file(file),
        Command::PadicSolve {
            coeffs,
            p,
            precision,
        } => {
            let s = system(coeffs)?;
            let sol = p_local_solve_general(&s, *p, *precision)?;
            let top = sol.at(*precision);
            let mut o = Output::new(format!("{top} mod {p}^{precision}"));
            o.text.push(format!("{top} mod {p}^{precision}"));
            if sol.swapped {
                o.text.push("(U and W exchanged to make w a unit)".into());
            }
            o.json.push(json!({ "coeffs": s, "p": p, "precision": precision, "solution": sol }));
            Ok(o)
        }
    }
}

fn local_diagonal(s: &SystemCoeffs) -> Result<Output, Failure> {
    let rep: LocalReport = decide_local(s)?;
    let verdict = if rep.locally_solvable { "locally solvable" } else { "not locally solvable" };
    let mut o = Output::new(verdict);
    o.text.push(format!("system {s}"));
    o.text.push(format!(
        "real: {}",
        if rep.real.solvable { "solvable" } else { "not solvable" }
    ));
    for v in &rep.primes {
        let line = match &v.witness {
            Some(w) => format!(
                "p = {}: solvable ({:?}), witness {} mod {} for {}",
                v.p, v.case, w.quad, w.modulus, w.system
            ),
            None if v.p == 2 => format!("p = 2: not solvable ({:?}, no strong solution mod 16)", v.case),
            None => format!("p = {}: not solvable ({:?})", v.p, v.case),
        };
        o.text.push(line);
    }
    o.text.push(verdict.into());
    o.json.push(serde_json::to_value(&rep).expect("reports serialize"));
    Ok(o)
}

/// `b ≠ 0`: primes not dividing `2acd(b² − 4ac)` are solvable, the others
/// are reported as undecided.
fn local_general(s: &SystemCoeffs) -> Result<Output, Failure> {
    let real = real_solvable(s);
    let disc = i64::try_from(s.discriminant())
        .map_err(|_| Failure::Input("b^2 - 4ac does not fit in 64 bits".into()))?;
    let mut bad = vec![2i64];
    for x in [s.a, s.c, s.d, disc] {
        bad.extend(prime_divisors(x)?);
    }
    bad.sort_unstable();
    bad.dedup();
    let mut checked = Vec::new();
    for p in crate::primes::primes_up_to(50) {
        if !bad.contains(&p) {
            let sol = p_local_solve_general(s, p, DEFAULT_PRECISION)?;
            checked.push(json!({ "p": p, "solution": sol.at(DEFAULT_PRECISION), "precision": DEFAULT_PRECISION }));
        }
    }
    let verdict = if !real.solvable {
        "not locally solvable"
    } else {
        "undecided at bad primes"
    };
    let mut o = Output::new(verdict);
    o.text.push(format!("system {s}"));
    o.text.push(format!(
        "real: {}",
        if real.solvable { "solvable" } else { "not solvable" }
    ));
    o.text.push(format!("solvable at every prime not in {bad:?}"));
    o.text.push(format!("undecided (bad primes): {bad:?}"));
    o.text.push(verdict.into());
    o.json.push(json!({
        "coeffs": s,
        "real": real,
        "bad_primes": bad,
        "good_prime_solutions": checked,
        "locally_solvable": if real.solvable { Value::Null } else { Value::Bool(false) },
    }));
    Ok(o)
}

fn read_certificates(file: &PathBuf) -> Result<Vec<CounterexampleCertificate>, Failure> {
    let raw = std::fs::read_to_string(file)?;
    if let Ok(c) = serde_json::from_str::<CounterexampleCertificate>(&raw) {
        return Ok(vec![c]);
    }
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(line)
            .map_err(|e| Failure::Input(format!("line {}: {e}", i + 1)))?;
        if v.get("manifest").is_some() {
            continue;
        }
        out.push(
            serde_json::from_value(v)
                .map_err(|e| Failure::Input(format!("line {}: {e}", i + 1)))?,
        );
    }
    if out.is_empty() {
        return Err(Failure::Input("no certificate found".into()));
    }
    Ok(out)
}

fn verify_file(file: &PathBuf) -> Result<Output, Failure> {
    let certs = read_certificates(file)?;
    let mut o = Output::new("all certificates valid");
    for c in &certs {
        match verify_certificate(c) {
            Ok(()) => {
                o.text.push(format!("q = {}, d = {}: valid", c.q, c.d));
                o.json.push(json!({ "q": c.q, "d": c.d, "valid": true }));
            }
            Err(f) => {
                o.text.push(format!("q = {}, d = {}: invalid, {f}", c.q, c.d));
                o.json.push(json!({ "q": c.q, "d": c.d, "valid": false, "failed_check": f.check, "reason": f.reason }));
                o.code = EXIT_INVALID_CERTIFICATE;
                o.outcome = "invalid certificate".into();
            }
        }
    }
    Ok(o)
}

