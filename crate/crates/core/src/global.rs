//! Counterexamples `U² − qW² = dZ²`, `UW = V²` to the Hasse principle.
//!
//! A pair `(q, d)` is certified when
//!
//! 1. `q` is a prime with `q ≡ 1 (mod 16)`,
//! 2. `d` is nonzero, square-free and prime to `q`,
//! 3. `d` is a square but not a fourth power modulo `q`,
//! 4. `q` is a fourth power modulo every odd prime dividing `d`.
//!
//! The system is then locally solvable everywhere, while a nontrivial integer
//! solution would force `d` to be a fourth power modulo `q`. Certificates
//! carry the local witnesses inline and are rechecked from scratch by
//! [`verify_certificate`]; local solvability is always recomputed, never
//! inferred from the four conditions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local::{
    bad_primes, decide_local, deciding_systems, reduce_triple, terminal_case, TerminalCase,
    Triple,
};
use crate::modarith::{is_fourth_power_mod_p, legendre_unchecked, LegendreValue};
use crate::primes::{factorize, is_prime, is_squarefree, primes_up_to};
use crate::system::{Quad, SystemCoeffs};

/// Largest height accepted by [`global_search_height`].
pub const HEIGHT_BUDGET: i64 = 5_000;

/// Which form of condition 1 a certificate relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// `q ≡ 1 (mod 16)`: local solvability at 2 is automatic.
    Strict,
    /// `q ≡ 1 (mod 8)`: 2-adic solvability must come from the local check.
    Relaxed,
}

impl Hypothesis {
    fn modulus(self) -> i64 {
        match self {
            Hypothesis::Strict => 16,
            Hypothesis::Relaxed => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conditions {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub c4: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeEvidence {
    pub p: i64,
    pub case: TerminalCase,
    /// The system the witness solves: the normal form of `(1, −q, d)` at `p`.
    pub system: Triple,
    pub witness: Quad,
    pub modulus: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalEvidence {
    pub real: bool,
    pub real_witness: Option<[f64; 4]>,
    pub primes: Vec<PrimeEvidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleCertificate {
    pub q: i64,
    pub d: i64,
    pub hypothesis: Hypothesis,
    pub conditions: Conditions,
    pub local: LocalEvidence,
    pub obstruction: bool,
    /// Largest height searched for integer solutions, if a search was run.
    pub height_checked: Option<i64>,
}

impl CounterexampleCertificate {
    pub fn coeffs(&self) -> Result<SystemCoeffs> {
        system_for(self.q, self.d)
    }
}

fn system_for(q: i64, d: i64) -> Result<SystemCoeffs> {
    SystemCoeffs::diagonal(1, q.checked_neg().ok_or(Error::Overflow("negating q"))?, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    C1,
    C2,
    C3,
    C4,
    Local,
    Obstruction,
    Height,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Condition::C1 => "condition 1 (q prime, q = 1 mod 16 or mod 8)",
            Condition::C2 => "condition 2 (d square-free, prime to q)",
            Condition::C3 => "condition 3 (d a square but not a fourth power mod q)",
            Condition::C4 => "condition 4 (q a fourth power mod odd p | d)",
            Condition::Local => "local solvability",
            Condition::Obstruction => "fourth-power obstruction",
            Condition::Height => "integer solution search",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certification {
    Certified(Box<CounterexampleCertificate>),
    Rejected { condition: Condition, reason: String },
}

impl Certification {
    pub fn certificate(self) -> Option<CounterexampleCertificate> {
        match self {
            Certification::Certified(c) => Some(*c),
            Certification::Rejected { .. } => None,
        }
    }
}

/// True iff `d` is not a fourth power modulo `q`, in which case
/// `U² − qW² = dZ²`, `UW = V²` has no nontrivial integer solution.
///
/// Requires `q ≡ 1 (mod 8)` prime and `d` square-free, nonzero, prime to `q`.
pub fn fourth_power_obstruction(q: i64, d: i64) -> Result<bool> {
    if !is_prime(q) || q % 8 != 1 {
        return Err(Error::PreconditionFailed(format!(
            "q = {q} must be a prime congruent to 1 mod 8"
        )));
    }
    if d == 0 || !is_squarefree(d)? || d % q == 0 {
        return Err(Error::PreconditionFailed(format!(
            "d = {d} must be nonzero, square-free and prime to {q}"
        )));
    }
    Ok(!is_fourth_power_mod_p(d, q)?)
}

fn check_c1(q: i64, hyp: Hypothesis) -> bool {
    is_prime(q) && q % hyp.modulus() == 1
}

fn check_c2(q: i64, d: i64) -> Result<bool> {
    Ok(d != 0 && d % q != 0 && is_squarefree(d)?)
}

fn check_c3(q: i64, d: i64) -> Result<bool> {
    Ok(legendre_unchecked(d, q) == LegendreValue::One && !is_fourth_power_mod_p(d, q)?)
}

fn check_c4(q: i64, d: i64) -> Result<bool> {
    for (p, _) in factorize(d)? {
        if p != 2 && !is_fourth_power_mod_p(q, p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifyOptions {
    pub hypothesis: Hypothesis,
    /// Also search for integer solutions up to this height.
    pub height: Option<i64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            hypothesis: Hypothesis::Strict,
            height: None,
        }
    }
}

/// Certificate for `(q, d)` under the strict hypothesis, or the first
/// condition that fails.
pub fn certify_counterexample(q: i64, d: i64) -> Result<Certification> {
    certify_with(q, d, &CertifyOptions::default())
}

pub fn certify_with(q: i64, d: i64, opts: &CertifyOptions) -> Result<Certification> {
    let reject = |condition, reason: String| Ok(Certification::Rejected { condition, reason });
    if !check_c1(q, opts.hypothesis) {
        return reject(
            Condition::C1,
            format!("{q} is not a prime congruent to 1 mod {}", opts.hypothesis.modulus()),
        );
    }
    if !check_c2(q, d)? {
        return reject(Condition::C2, format!("d = {d} is zero, not square-free, or divisible by {q}"));
    }
    if !check_c3(q, d)? {
        return reject(Condition::C3, format!("{d} is not a square, or is a fourth power, mod {q}"));
    }
    if !check_c4(q, d)? {
        return reject(Condition::C4, format!("{q} is not a fourth power modulo some odd p | {d}"));
    }
    let coeffs = system_for(q, d)?;
    let report = decide_local(&coeffs)?;
    if !report.locally_solvable {
        let failing = report
            .primes
            .iter()
            .find(|v| !v.solvable)
            .map(|v| format!("p = {}", v.p))
            .unwrap_or_else(|| "the reals".into());
        return reject(Condition::Local, format!("not locally solvable at {failing}"));
    }
    if !fourth_power_obstruction(q, d)? {
        return reject(Condition::Obstruction, format!("{d} is a fourth power mod {q}"));
    }
    if let Some(h) = opts.height {
        if let Some(sol) = global_search_height(&coeffs, h)? {
            return reject(Condition::Height, format!("integer solution {sol}"));
        }
    }
    let primes = report
        .primes
        .iter()
        .map(|v| {
            let w = v.witness.expect("solvable verdicts carry witnesses");
            PrimeEvidence {
                p: v.p,
                case: v.case,
                system: w.system,
                witness: w.quad,
                modulus: w.modulus,
            }
        })
        .collect();
    Ok(Certification::Certified(Box::new(CounterexampleCertificate {
        q,
        d,
        hypothesis: opts.hypothesis,
        conditions: Conditions {
            c1: true,
            c2: true,
            c3: true,
            c4: true,
        },
        local: LocalEvidence {
            real: report.real.solvable,
            real_witness: report.real.witness,
            primes,
        },
        obstruction: true,
        height_checked: opts.height,
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub q_bound: i64,
    pub d_bound: i64,
    /// Height for the integer-solution search on each hit; 0 skips it.
    pub height: i64,
    /// Depth used by extendability cross-checks.
    pub lambda: u32,
    pub hypothesis: Hypothesis,
}

impl SearchConfig {
    pub fn new(q_bound: i64, d_bound: i64) -> Self {
        SearchConfig {
            q_bound,
            d_bound,
            height: 0,
            lambda: 4,
            hypothesis: Hypothesis::Strict,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.q_bound < 1 || self.d_bound < 1 || self.height < 0 || self.lambda < 1 {
            return Err(Error::PreconditionFailed("search bounds must be positive".into()));
        }
        if self.q_bound > 100_000_000 {
            return Err(Error::BudgetExceeded {
                what: "q bound".into(),
                limit: 100_000_000,
            });
        }
        if self.height > HEIGHT_BUDGET {
            return Err(Error::BudgetExceeded {
                what: "height bound".into(),
                limit: HEIGHT_BUDGET as i128,
            });
        }
        Ok(())
    }
}

/// All certified `(q, d)` with `q ≤ q_bound` and `|d| ≤ d_bound`, ordered by
/// `(q, d)`.
pub fn search_counterexamples(cfg: &SearchConfig) -> Result<Vec<CounterexampleCertificate>> {
    cfg.validate()?;
    let opts = CertifyOptions {
        hypothesis: cfg.hypothesis,
        height: (cfg.height > 0).then_some(cfg.height),
    };
    let qs: Vec<i64> = primes_up_to(cfg.q_bound as usize)
        .into_iter()
        .filter(|q| q % cfg.hypothesis.modulus() == 1)
        .collect();
    let per_q = qs
        .par_iter()
        .map(|&q| {
            let mut out = Vec::new();
            for d in -cfg.d_bound..=cfg.d_bound {
                if d == 0 {
                    continue;
                }
                if let Certification::Certified(c) = certify_with(q, d, &opts)? {
                    out.push(*c);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_q.into_iter().flatten().collect())
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Least primitive integer solution with all entries at most `h` in absolute
/// value, or `None`.
///
/// Solutions are taken up to the sign changes `v → −v`, `z → −z` and
/// `(u, v, w, z) → −(u, v, w, z)`, which leave `u, w ≥ 0`; among those the
/// lexicographically least `(u, v, w, z)` with `v, z ≥ 0` is returned.
pub fn global_search_height(coeffs: &SystemCoeffs, h: i64) -> Result<Option<Quad>> {
    if !(0..=HEIGHT_BUDGET).contains(&h) {
        return Err(Error::BudgetExceeded {
            what: format!("height search up to {h}"),
            limit: HEIGHT_BUDGET as i128,
        });
    }
    let (a, b, c, d) = (
        coeffs.a as i128,
        coeffs.b as i128,
        coeffs.c as i128,
        coeffs.d as i128,
    );
    let hit = (0..=h).into_par_iter().find_map_first(|u| {
        for w in 0..=h {
            if u == 0 && w == 0 {
                continue;
            }
            let Some(v) = isqrt(u as i128 * w as i128) else { continue };
            let num = a * (u as i128).pow(2) + b * v * v + c * (w as i128).pow(2);
            if num % d != 0 {
                continue;
            }
            let Some(z) = isqrt(num / d) else { continue };
            if z > h as i128 {
                continue;
            }
            let q = Quad::new(u, v as i64, w, z as i64);
            if q.content() == 1 {
                debug_assert!(q.satisfies_exact(coeffs));
                return Some(q);
            }
        }
        None
    });
    Ok(hit)
}

/// A check that failed while re-verifying a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyFailure {
    pub check: String,
    pub reason: String,
}

impl std::fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.check, self.reason)
    }
}

fn fail(check: impl Into<String>, reason: impl Into<String>) -> std::result::Result<(), VerifyFailure> {
    Err(VerifyFailure {
        check: check.into(),
        reason: reason.into(),
    })
}

/// Recompute every claim of a certificate.
pub fn verify_certificate(cert: &CounterexampleCertificate) -> std::result::Result<(), VerifyFailure> {
    let (q, d) = (cert.q, cert.d);
    let lib = |e: Error| VerifyFailure {
        check: "arithmetic".into(),
        reason: e.to_string(),
    };
    let c = &cert.conditions;
    if !(c.c1 && check_c1(q, cert.hypothesis)) {
        return fail("c1", format!("{q} is not a prime congruent to 1 mod {}", cert.hypothesis.modulus()));
    }
    if !(c.c2 && check_c2(q, d).map_err(lib)?) {
        return fail("c2", format!("d = {d} is zero, not square-free, or divisible by {q}"));
    }
    if !(c.c3 && check_c3(q, d).map_err(lib)?) {
        return fail("c3", format!("{d} is not a square, or is a fourth power, mod {q}"));
    }
    if !(c.c4 && check_c4(q, d).map_err(lib)?) {
        return fail("c4", format!("{q} is not a fourth power modulo some odd p | {d}"));
    }

    let coeffs = system_for(q, d).map_err(lib)?;
    let real = crate::local::real_solvable(&coeffs);
    if !(cert.local.real && real.solvable) {
        return fail("local.real", "no real solution");
    }
    let needed = bad_primes(&coeffs).map_err(lib)?;
    let listed: Vec<i64> = cert.local.primes.iter().map(|e| e.p).collect();
    if listed != needed {
        return fail("local.primes", format!("expected evidence for {needed:?}, found {listed:?}"));
    }
    let t = Triple::new(1, -(q as i128), d as i128);
    for e in &cert.local.primes {
        let check = format!("local.p={}", e.p);
        let normal = reduce_triple(t, e.p).map_err(lib)?.normal;
        let case = terminal_case(&normal, e.p).map_err(lib)?;
        if case != e.case {
            return fail(check, format!("case is {case:?}, not {:?}", e.case));
        }
        if !deciding_systems(&normal, case, e.p).contains(&e.system) {
            return fail(check, format!("{} is not a deciding system for {normal}", e.system));
        }
        let w = crate::local::PrimeWitness {
            system: e.system,
            quad: e.witness,
            modulus: e.modulus,
        };
        if !w.check(e.p) {
            return fail(check, format!("{} is not a strong solution modulo {}", e.witness, e.modulus));
        }
    }

    if !(cert.obstruction && fourth_power_obstruction(q, d).map_err(lib)?) {
        return fail("obstruction", format!("{d} is a fourth power mod {q}"));
    }
    if let Some(h) = cert.height_checked {
        if let Some(sol) = global_search_height(&coeffs, h).map_err(lib)? {
            return fail("height", format!("integer solution {sol}"));
        }
    }
    Ok(())
}

/// Primes `q ≤ bound` with `q ≡ 9 (mod 16)` for which 2 is not a fourth power.
pub fn relaxed_family(bound: i64) -> Vec<i64> {
    primes_up_to(bound as usize)
        .into_iter()
        .filter(|&q| q % 16 == 9 && !is_fourth_power_mod_p(2, q).unwrap_or(true))
        .collect()
}
