//! Real and p-adic solvability of `aU² + cW² = dZ²`, `UW = V²`.
//!
//! For a prime `p` the coefficients are first normalized with moves that
//! preserve p-local solvability:
//!
//! ```text
//! (a, c, d) ~ (c, a, d) ~ (pa, pc, pd) ~ (ap², cp², d)
//!           ~ (a, c, dp²) ~ (ap⁴, c, d) ~ (a, cp⁴, d)
//! ```
//!
//! until `p ∤ a`, `p⁴ ∤ c` and `p² ∤ d`. What remains is one of six shapes,
//! each decided by looking for a strong solution modulo `p` (odd `p`) or
//! modulo 16.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conics::solve_system_fp;
use crate::error::{Error, Result};
use crate::modarith::{
    fourth_root_unchecked, gcd, inv_raw, legendre_unchecked, mul_mod, reduce, reduce_wide,
    sqrt_mod_p_unchecked, LegendreValue,
};
use crate::primes::{factorize, require_prime};
use crate::system::{canonical_form, Quad, SystemCoeffs};

/// Largest odd prime for which strong solutions modulo `p` are found by
/// search rather than constructed from square and fourth roots.
pub const STRONG_SCAN_LIMIT: i64 = 2_000;

/// Default modulus budget for [`brute_force_primitive_mod`].
pub const BRUTE_FORCE_BUDGET: i64 = 10_000;

/// Exact coefficients `(a, c, d)` of a `b = 0` system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[i128; 3]", into = "[i128; 3]")]
pub struct Triple {
    pub a: i128,
    pub c: i128,
    pub d: i128,
}

impl From<[i128; 3]> for Triple {
    fn from([a, c, d]: [i128; 3]) -> Self {
        Triple { a, c, d }
    }
}

impl From<Triple> for [i128; 3] {
    fn from(t: Triple) -> Self {
        [t.a, t.c, t.d]
    }
}

impl std::fmt::Display for Triple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.c, self.d)
    }
}

impl Triple {
    pub fn new(a: i128, c: i128, d: i128) -> Self {
        Triple { a, c, d }
    }

    pub fn reduce(&self, m: i64) -> (i64, i64, i64) {
        (reduce_wide(self.a, m), reduce_wide(self.c, m), reduce_wide(self.d, m))
    }

    /// `u, v, w, z` solve the system modulo `m`.
    pub fn satisfied_by(&self, q: &Quad, m: i64) -> bool {
        let (a, c, d) = self.reduce(m);
        satisfies(a, c, d, q, m)
    }
}

fn vp(x: i128, p: i64) -> u32 {
    debug_assert!(x != 0);
    let (mut x, p) = (x, p as i128);
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// One application of an equivalence generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    /// `(a, c, d) → (c, a, d)`
    Swap,
    /// `(pa, pc, pd) → (a, c, d)`
    DivideAll,
    /// `(a, c, d) → (a, c, dp²)`
    MultiplyD2,
    /// `(a, c, dp²) → (a, c, d)`
    DivideD2,
    /// `(a, c, d) → (ap⁴, c, d)`
    MultiplyA4,
    /// `(a, cp⁴, d) → (a, c, d)`
    DivideC4,
}

impl Move {
    pub fn apply(self, t: Triple, p: i64) -> Triple {
        let p = p as i128;
        match self {
            Move::Swap => Triple::new(t.c, t.a, t.d),
            Move::DivideAll => Triple::new(t.a / p, t.c / p, t.d / p),
            Move::MultiplyD2 => Triple::new(t.a, t.c, t.d * p * p),
            Move::DivideD2 => Triple::new(t.a, t.c, t.d / (p * p)),
            Move::MultiplyA4 => Triple::new(t.a * p.pow(4), t.c, t.d),
            Move::DivideC4 => Triple::new(t.a, t.c / p.pow(4), t.d),
        }
    }

    /// The move's preconditions on divisibility hold for `t`.
    pub fn applicable(self, t: Triple, p: i64) -> bool {
        let p = p as i128;
        match self {
            Move::Swap | Move::MultiplyD2 | Move::MultiplyA4 => true,
            Move::DivideAll => t.a % p == 0 && t.c % p == 0 && t.d % p == 0,
            Move::DivideD2 => t.d % (p * p) == 0,
            Move::DivideC4 => t.c % p.pow(4) == 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub mv: Move,
    pub before: Triple,
    pub after: Triple,
}

/// The moves taking a triple to its normal form at `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTranscript {
    pub p: i64,
    pub initial: Triple,
    pub steps: Vec<Step>,
    pub normal: Triple,
}

impl ReductionTranscript {
    fn push(&mut self, mv: Move) {
        let before = self.normal;
        let after = mv.apply(before, self.p);
        self.steps.push(Step { mv, before, after });
        self.normal = after;
    }

    fn normalize(&mut self) {
        let p = self.p as i128;
        loop {
            let t = self.normal;
            if t.d % (p * p) == 0 {
                self.push(Move::DivideD2);
            } else if t.a % p == 0 && t.c % p == 0 {
                // (pa, pc, d) ~ (pa, pc, p²d) ~ (a, c, pd)
                self.push(Move::MultiplyD2);
                self.push(Move::DivideAll);
            } else {
                break;
            }
        }
        if self.normal.a % p == 0 {
            self.push(Move::Swap);
        }
        while self.normal.c % p.pow(4) == 0 {
            self.push(Move::DivideC4);
        }
    }

    /// Every step is an applicable generator and the steps chain together.
    pub fn is_consistent(&self) -> bool {
        let mut t = self.initial;
        for s in &self.steps {
            if s.before != t || !s.mv.applicable(t, self.p) || s.mv.apply(t, self.p) != s.after {
                return false;
            }
            t = s.after;
        }
        t == self.normal
    }
}

/// Normal form of `(a, c, d)` at `p`: `p ∤ a`, `p⁴ ∤ c`, `p² ∤ d`, and not of
/// the shapes `(a, cp, dp)` or `(a, cp³, dp)`, which reduce further to
/// `(c, ap³, d)` and `(c, ap, d)`.
pub fn reduce_system(a: i64, c: i64, d: i64, p: i64) -> Result<ReductionTranscript> {
    require_prime(p)?;
    reduce_triple(Triple::new(a as i128, c as i128, d as i128), p)
}

pub(crate) fn reduce_triple(t: Triple, p: i64) -> Result<ReductionTranscript> {
    if t.a == 0 || t.c == 0 || t.d == 0 {
        return Err(Error::InvalidCoefficients("a, c, d must be nonzero".into()));
    }
    let mut tr = ReductionTranscript {
        p,
        initial: t,
        steps: Vec::new(),
        normal: t,
    };
    tr.normalize();
    let n = tr.normal;
    if vp(n.d, p) == 1 && matches!(vp(n.c, p), 1 | 3) {
        tr.push(Move::MultiplyA4);
        tr.normalize();
    }
    Ok(tr)
}

/// The shape of a normal form, with `a, c, d` standing for units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalCase {
    /// `(a, c, d)`
    Unramified,
    /// `(a, cp, d)`
    CP,
    /// `(a, c, dp)`
    DP,
    /// `(a, cp², d)`
    CP2,
    /// `(a, cp³, d)`
    CP3,
    /// `(a, cp², dp)`: never p-locally solvable.
    Impossible,
}

impl TerminalCase {
    pub const ALL: [TerminalCase; 6] = [
        TerminalCase::Unramified,
        TerminalCase::CP,
        TerminalCase::DP,
        TerminalCase::CP2,
        TerminalCase::CP3,
        TerminalCase::Impossible,
    ];

    /// `(p`-exponent of `c`, `p`-exponent of `d)`.
    pub fn exponents(self) -> (u32, u32) {
        match self {
            TerminalCase::Unramified => (0, 0),
            TerminalCase::CP => (1, 0),
            TerminalCase::DP => (0, 1),
            TerminalCase::CP2 => (2, 0),
            TerminalCase::CP3 => (3, 0),
            TerminalCase::Impossible => (2, 1),
        }
    }

    /// The normal form `(a, c·p^i, d·p^j)` for units `a, c, d`.
    pub fn build(self, a: i64, c: i64, d: i64, p: i64) -> Triple {
        let (i, j) = self.exponents();
        let p = p as i128;
        Triple::new(a as i128, c as i128 * p.pow(i), d as i128 * p.pow(j))
    }
}

pub fn terminal_case(t: &Triple, p: i64) -> Result<TerminalCase> {
    if vp(t.a, p) != 0 {
        return Err(Error::PreconditionFailed(format!("{t} is not normalized at {p}")));
    }
    Ok(match (vp(t.c, p), vp(t.d, p)) {
        (0, 0) => TerminalCase::Unramified,
        (1, 0) => TerminalCase::CP,
        (0, 1) => TerminalCase::DP,
        (2, 0) => TerminalCase::CP2,
        (3, 0) => TerminalCase::CP3,
        (2, 1) => TerminalCase::Impossible,
        _ => {
            return Err(Error::PreconditionFailed(format!(
                "{t} is not normalized at {p}"
            )))
        }
    })
}

fn satisfies(a: i64, c: i64, d: i64, q: &Quad, m: i64) -> bool {
    let q = q.reduce(m);
    let sq = |x: i64| mul_mod(x, x, m);
    let lhs = mul_mod(a, sq(q.u), m) as i128 + mul_mod(c, sq(q.w), m) as i128;
    reduce_wide(lhs - mul_mod(d, sq(q.z), m) as i128, m) == 0
        && mul_mod(q.u, q.w, m) == sq(q.v)
}

/// Strong solution of the residues `(a, c, d)` modulo `m`, where `p` is the
/// prime dividing `m`.
fn is_strong(a: i64, c: i64, d: i64, q: &Quad, p: i64, m: i64) -> bool {
    let unit = |k: i64, x: i64| mul_mod(reduce(k, p), reduce(x, p), p) != 0;
    satisfies(a, c, d, q, m)
        && q.is_primitive_mod(p)
        && (unit(a, q.u) || unit(c, q.w) || unit(d, q.z))
}

/// Least strong solution modulo 16, by full lexicographic scan.
fn strong_scan_16(a: i64, c: i64, d: i64) -> Option<Quad> {
    let (a, c, d) = (reduce(a, 16), reduce(c, 16), reduce(d, 16));
    for u in 0..16 {
        for v in 0..16 {
            for w in 0..16 {
                for z in 0..16 {
                    let q = Quad::new(u, v, w, z);
                    if is_strong(a, c, d, &q, 2, 16) {
                        return Some(q);
                    }
                }
            }
        }
    }
    None
}

/// Strong solution modulo an odd prime, scanning representatives whose first
/// unit coordinate is 1: `(0, 0, 1, z)` and then `(1, v, v², z)`. Every
/// strong solution is a unit multiple of one of these.
fn strong_scan_odd(a: i64, c: i64, d: i64, p: i64) -> Option<Quad> {
    let (a, c, d) = (reduce(a, p), reduce(c, p), reduce(d, p));
    let shapes = (0..p)
        .map(|z| Quad::new(0, 0, 1, z))
        .chain((0..p).flat_map(|v| (0..p).map(move |z| Quad::new(1, v, mul_mod(v, v, p), z))));
    shapes
        .filter(|q| is_strong(a, c, d, q, p, p))
        .map(|q| canonical_form(&q, p))
        .next()
}

/// Strong solution modulo an odd prime built from roots, for primes too large
/// to scan. `p` divides at most one of `a, c, d`.
fn strong_construct_odd(a: i64, c: i64, d: i64, p: i64) -> Option<Quad> {
    let (a, c, d) = (reduce(a, p), reduce(c, p), reduce(d, p));
    let q = if a == 0 {
        // c·w² ≡ d·z² with w, z units.
        let m = sqrt_mod_p_unchecked(mul_mod(d, inv_raw(c, p).ok()?, p), p)?;
        Quad::new(0, 0, m, 1)
    } else if c == 0 {
        // a·u² ≡ d·z² with u, z units.
        let m = sqrt_mod_p_unchecked(mul_mod(d, inv_raw(a, p).ok()?, p), p)?;
        Quad::new(m, 0, 0, 1)
    } else if d == 0 {
        // a + c·v⁴ ≡ 0 with u = 1, w = v².
        let v = fourth_root_unchecked(reduce(-mul_mod(a, inv_raw(c, p).ok()?, p), p), p)?;
        Quad::new(1, v, mul_mod(v, v, p), 0)
    } else {
        solve_system_fp(a, c, d, p).ok()?.quad
    };
    Some(canonical_form(&q, p))
}

/// Strong solution of `(a, c, d)` (reduced to residues) modulo `m`, where
/// `m` is an odd prime or 16. For odd primes above [`STRONG_SCAN_LIMIT`] the
/// search is replaced by a direct construction.
pub(crate) fn strong_solution_mod(t: &Triple, p: i64) -> Option<(Quad, i64)> {
    if p == 2 {
        let (a, c, d) = t.reduce(16);
        return strong_scan_16(a, c, d).map(|q| (canonical_form(&q, 16), 16));
    }
    let (a, c, d) = t.reduce(p);
    let q = if p <= STRONG_SCAN_LIMIT {
        strong_scan_odd(a, c, d, p)
    } else {
        strong_construct_odd(a, c, d, p)
    }?;
    debug_assert!(is_strong(a, c, d, &q, p, p));
    Some((q, p))
}

/// Least strong solution modulo `m` (an odd prime up to
/// [`STRONG_SCAN_LIMIT`], or 16), in projective normal form.
pub fn strong_search_mod(coeffs: &SystemCoeffs, m: i64) -> Result<Option<Quad>> {
    coeffs.require_diagonal()?;
    let t = Triple::new(coeffs.a as i128, coeffs.c as i128, coeffs.d as i128);
    if m == 16 {
        return Ok(strong_solution_mod(&t, 2).map(|(q, _)| q));
    }
    crate::primes::require_odd_prime(m)?;
    if m > STRONG_SCAN_LIMIT {
        return Err(Error::BudgetExceeded {
            what: format!("strong-solution scan modulo {m}"),
            limit: STRONG_SCAN_LIMIT as i128,
        });
    }
    let (a, c, d) = t.reduce(m);
    Ok(strong_scan_odd(a, c, d, m))
}

/// For odd `a, c, d`: a primitive solution modulo 16 with `u, v, w ∈ {0, 1}`
/// and `z ∈ {0, 1, 2, 3}`, if there is one. Such a solution exists whenever any
/// primitive solution modulo 16 does.
pub fn restricted_search_mod16(coeffs: &SystemCoeffs) -> Result<Option<Quad>> {
    coeffs.require_diagonal()?;
    if [coeffs.a, coeffs.c, coeffs.d].iter().any(|x| x % 2 == 0) {
        return Err(Error::PreconditionFailed("a, c, d must be odd".into()));
    }
    let (a, c, d) = (reduce(coeffs.a, 16), reduce(coeffs.c, 16), reduce(coeffs.d, 16));
    for u in 0..2 {
        for v in 0..2 {
            for w in 0..2 {
                for z in 0..4 {
                    let q = Quad::new(u, v, w, z);
                    if q.is_primitive_mod(2) && satisfies(a, c, d, &q, 16) {
                        return Ok(Some(q));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// A strong solution certifying p-local solvability of `system`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeWitness {
    pub system: Triple,
    pub quad: Quad,
    pub modulus: i64,
}

impl PrimeWitness {
    /// The tuple is a strong solution of `system` modulo `modulus`.
    pub fn check(&self, p: i64) -> bool {
        let m = self.modulus;
        let (a, c, d) = self.system.reduce(m);
        m == if p == 2 { 16 } else { p } && is_strong(a, c, d, &self.quad, p, m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLocalVerdict {
    pub p: i64,
    pub solvable: bool,
    pub case: TerminalCase,
    pub transcript: ReductionTranscript,
    pub witness: Option<PrimeWitness>,
}

/// Systems whose strong solutions decide a normal form: the form itself, and
/// for `(a, cp², d)` also `(ap², c, d)`.
pub(crate) fn deciding_systems(t: &Triple, case: TerminalCase, p: i64) -> Vec<Triple> {
    let p = p as i128;
    match case {
        TerminalCase::Impossible => vec![],
        TerminalCase::CP2 => vec![*t, Triple::new(t.a * p * p, t.c / (p * p), t.d)],
        _ => vec![*t],
    }
}

/// Decide whether `(a, c, d)` has primitive solutions modulo every `p^k`.
pub fn decide_p_local(a: i64, c: i64, d: i64, p: i64) -> Result<PLocalVerdict> {
    require_prime(p)?;
    decide_triple(Triple::new(a as i128, c as i128, d as i128), p)
}

pub(crate) fn decide_triple(t: Triple, p: i64) -> Result<PLocalVerdict> {
    let transcript = reduce_triple(t, p)?;
    let case = terminal_case(&transcript.normal, p)?;
    let witness = deciding_systems(&transcript.normal, case, p)
        .into_iter()
        .find_map(|sys| {
            strong_solution_mod(&sys, p).map(|(quad, modulus)| PrimeWitness {
                system: sys,
                quad,
                modulus,
            })
        });
    Ok(PLocalVerdict {
        p,
        solvable: witness.is_some(),
        case,
        transcript,
        witness,
    })
}

fn is_square_mod(x: i128, p: i64) -> bool {
    legendre_unchecked(reduce_wide(x, p), p) == LegendreValue::One
}

/// Closed-form verdict for a normal form at an odd prime. `None` for `p = 2`.
///
/// `(a, c, d)`: solvable. `(a, cp, d)` and `(a, cp³, d)`: `ad` is a square.
/// `(a, c, dp)`: `−ac³` is a fourth power. `(a, cp², d)`: `ad` or `cd` is a
/// square. `(a, cp², dp)`: never.
pub fn fast_path_odd(t: &Triple, p: i64, case: TerminalCase) -> Option<bool> {
    if p == 2 {
        return None;
    }
    let (i, j) = case.exponents();
    let pp = p as i128;
    let (a, c, d) = (t.a, t.c / pp.pow(i), t.d / pp.pow(j));
    Some(match case {
        TerminalCase::Unramified => true,
        TerminalCase::CP | TerminalCase::CP3 => is_square_mod(a * d, p),
        TerminalCase::DP => {
            let x = reduce_wide(-a, p);
            let c = reduce_wide(c, p);
            let x = mul_mod(x, mul_mod(c, mul_mod(c, c, p), p), p);
            fourth_root_unchecked(x, p).is_some()
        }
        TerminalCase::CP2 => is_square_mod(a * d, p) || is_square_mod(c * d, p),
        TerminalCase::Impossible => false,
    })
}

/// Real solvability with a witness when solvable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealVerdict {
    pub solvable: bool,
    pub witness: Option<[f64; 4]>,
    pub description: String,
}

/// Nontrivial real solutions of `aU² + bV² + cW² = dZ²`, `UW = V²`.
///
/// With `U = x², V = xy, W = y²` this asks for `h(s) = as² + bs + c` to take
/// the sign of `d`, or vanish, somewhere on `s ≥ 0` (or for `a` to have the
/// sign of `d`, the `y = 0` end). On `[0, ∞)` the values of `h` span an
/// interval bounded by `h(0) = c`, the sign of `a` at infinity, and the
/// vertex value when the vertex lies in `s > 0`.
pub fn real_solvable(coeffs: &SystemCoeffs) -> RealVerdict {
    let (a, b, c, d) = (coeffs.a as f64, coeffs.b as f64, coeffs.c as f64, coeffs.d as f64);
    let sd = coeffs.d.signum();
    if coeffs.a.signum() == sd {
        return RealVerdict {
            solvable: true,
            witness: Some([(d / a).sqrt(), 0.0, 0.0, 1.0]),
            description: "(sqrt(d/a), 0, 0, 1)".into(),
        };
    }
    if coeffs.c.signum() == sd {
        return RealVerdict {
            solvable: true,
            witness: Some([0.0, 0.0, (d / c).sqrt(), 1.0]),
            description: "(0, 0, sqrt(d/c), 1)".into(),
        };
    }
    // a and c both have the sign opposite to d: only the vertex can help.
    let vertex_positive = (coeffs.b as i128) * (coeffs.a as i128) < 0;
    let disc = coeffs.discriminant();
    if vertex_positive && disc >= 0 {
        let s = -b / (2.0 * a);
        let h = a * s * s + b * s + c;
        return RealVerdict {
            solvable: true,
            witness: Some([s, s.sqrt(), 1.0, (h / d).max(0.0).sqrt()]),
            description: "(s, sqrt(s), 1, sqrt(h(s)/d)) at the vertex s = -b/2a".into(),
        };
    }
    RealVerdict {
        solvable: false,
        witness: None,
        description: "a*s^2 + b*s + c has the sign of -d on s >= 0".into(),
    }
}

/// Real solvability, p-adic verdicts for 2 and every prime dividing `acd`,
/// and the overall conclusion. Odd primes not dividing `acd` are always
/// p-locally solvable and are not listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalReport {
    pub coeffs: SystemCoeffs,
    pub real: RealVerdict,
    pub primes: Vec<PLocalVerdict>,
    pub locally_solvable: bool,
}

impl LocalReport {
    pub fn verdict(&self, p: i64) -> Option<&PLocalVerdict> {
        self.primes.iter().find(|v| v.p == p)
    }
}

/// Primes that need an explicit check: 2 and the divisors of `acd`.
pub fn bad_primes(coeffs: &SystemCoeffs) -> Result<Vec<i64>> {
    let mut ps = vec![2];
    for x in [coeffs.a, coeffs.c, coeffs.d] {
        ps.extend(factorize(x)?.into_iter().map(|(p, _)| p));
    }
    ps.sort_unstable();
    ps.dedup();
    Ok(ps)
}

pub fn decide_local(coeffs: &SystemCoeffs) -> Result<LocalReport> {
    coeffs.require_diagonal()?;
    let primes = bad_primes(coeffs)?;
    let t = Triple::new(coeffs.a as i128, coeffs.c as i128, coeffs.d as i128);
    let verdicts = primes
        .par_iter()
        .map(|&p| decide_triple(t, p))
        .collect::<Result<Vec<_>>>()?;
    let real = real_solvable(coeffs);
    let locally_solvable = real.solvable && verdicts.iter().all(|v| v.solvable);
    Ok(LocalReport {
        coeffs: *coeffs,
        real,
        primes: verdicts,
        locally_solvable,
    })
}

/// Some primitive solution of the `b = 0` system `(a, c, d)` modulo `p^k`,
/// found by enumeration over representatives whose first unit coordinate is
/// 1. Exact for any coefficients; used as ground truth.
pub fn primitive_solution_mod_prime_power(t: &Triple, p: i64, k: u32) -> Result<Option<Quad>> {
    let m = crate::modarith::prime_power(p, k)?;
    if m > 50_000_000 {
        return Err(Error::BudgetExceeded {
            what: format!("enumeration modulo {p}^{k}"),
            limit: 50_000_000,
        });
    }
    let (a, c, d) = t.reduce(m);
    let mut dz2 = vec![None; m as usize];
    for z in (0..m).rev() {
        dz2[mul_mod(d, mul_mod(z, z, m), m) as usize] = Some(z);
    }
    let sq = |x: i64| mul_mod(x, x, m);
    // u = 1, w = v².
    for v in 0..m {
        let w = sq(v);
        let r = reduce_wide(a as i128 + mul_mod(c, sq(w), m) as i128, m);
        if let Some(z) = dz2[r as usize] {
            return Ok(Some(Quad::new(1, v, w, z)));
        }
    }
    // p | u, w = 1, u = v² so p | v.
    for v in (0..m).step_by(p as usize) {
        let u = sq(v);
        let r = reduce_wide(mul_mod(a, sq(u), m) as i128 + c as i128, m);
        if let Some(z) = dz2[r as usize] {
            return Ok(Some(Quad::new(u, v, 1, z)));
        }
    }
    // p | u, p | w, z = 1: then a·u² + c·w² ≡ d needs p² | d (or p | d if k = 1).
    let need = if k >= 2 { p * p } else { p };
    if d % need != 0 {
        return Ok(None);
    }
    let mut root_of = vec![None; m as usize];
    for v in (0..m).step_by(p as usize) {
        root_of[sq(v) as usize].get_or_insert(v);
    }
    for u in (0..m).step_by(p as usize) {
        for w in (0..m).step_by(p as usize) {
            let lhs = reduce_wide(mul_mod(a, sq(u), m) as i128 + mul_mod(c, sq(w), m) as i128, m);
            if lhs == d {
                if let Some(v) = root_of[mul_mod(u, w, m) as usize] {
                    return Ok(Some(Quad::new(u, v, w, 1)));
                }
            }
        }
    }
    Ok(None)
}

/// Least primitive solution modulo `n` in lexicographic order, by full
/// enumeration (`w` runs only over solutions of `uw ≡ v²`, `z` over roots of
/// `dz² ≡ au² + bv² + cw²`).
pub fn brute_force_primitive_mod(coeffs: &SystemCoeffs, n: i64) -> Result<Option<Quad>> {
    brute_force_primitive_mod_budget(coeffs, n, BRUTE_FORCE_BUDGET)
}

pub fn brute_force_primitive_mod_budget(
    coeffs: &SystemCoeffs,
    n: i64,
    budget: i64,
) -> Result<Option<Quad>> {
    crate::modarith::check_modulus(n)?;
    if n > budget {
        return Err(Error::BudgetExceeded {
            what: format!("primitive-solution scan modulo {n}"),
            limit: budget as i128,
        });
    }
    let (a, b, c, d) = (
        reduce(coeffs.a, n),
        reduce(coeffs.b, n),
        reduce(coeffs.c, n),
        reduce(coeffs.d, n),
    );
    let mut roots: Vec<Vec<i64>> = vec![Vec::new(); n as usize];
    for z in 0..n {
        roots[mul_mod(d, mul_mod(z, z, n), n) as usize].push(z);
    }
    let sq = |x: i64| mul_mod(x, x, n);
    for u in 0..n {
        let g = gcd(u, n);
        let step = n / g;
        let u_inv = if step > 1 { inv_raw(u / g, step).ok() } else { Some(0) };
        for v in 0..n {
            let v2 = sq(v);
            if v2 % g != 0 {
                continue;
            }
            let w0 = match u_inv {
                Some(inv) if step > 1 => mul_mod(v2 / g, inv, step),
                _ => 0,
            };
            let base = gcd(gcd(u, v), n);
            for w in (w0..n).step_by(step as usize) {
                debug_assert_eq!(mul_mod(u, w, n), v2);
                let r = reduce_wide(
                    mul_mod(a, sq(u), n) as i128
                        + mul_mod(b, v2, n) as i128
                        + mul_mod(c, sq(w), n) as i128,
                    n,
                );
                let g3 = gcd(base, w);
                if let Some(&z) = roots[r as usize].iter().find(|&&z| gcd(g3, z) == 1) {
                    return Ok(Some(Quad::new(u, v, w, z)));
                }
            }
        }
    }
    Ok(None)
}
