//! Truncated p-adic integers and Hensel lifting.
//!
//! An element of `Z_p` is a coherent sequence `a_1, a_2, …` with
//! `a_k ∈ [0, p^k)` and `a_{k+1} ≡ a_k (mod p^k)`. [`PadicApprox`] keeps the
//! first `K` terms.

use serde::{Deserialize, Serialize};

use crate::conics::solve_general_fp;
use crate::error::{Error, Result};
use crate::modarith::{add_mod, inv_raw, mul_mod, prime_power, reduce, reduce_wide};
use crate::primes::require_prime;
use crate::system::{Quad, SystemCoeffs};

/// Precision used when none is given.
pub const DEFAULT_PRECISION: usize = 8;

/// Largest `p^λ` accepted by [`extendable_solutions`].
pub const EXTENSION_BUDGET: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicApprox {
    pub p: i64,
    /// `digits[k - 1] = a_k ∈ [0, p^k)`.
    pub digits: Vec<i64>,
}

fn moduli(p: i64, precision: usize) -> Result<Vec<i64>> {
    if precision == 0 {
        return Err(Error::PreconditionFailed("precision must be at least 1".into()));
    }
    (1..=precision as u32).map(|k| prime_power(p, k)).collect()
}

impl PadicApprox {
    pub fn from_int(n: i128, p: i64, precision: usize) -> Result<Self> {
        require_prime(p)?;
        let digits = moduli(p, precision)?
            .into_iter()
            .map(|m| reduce_wide(n, m))
            .collect();
        Ok(PadicApprox { p, digits })
    }

    /// From the last term only; the earlier ones are its reductions.
    pub fn from_residue(r: i64, p: i64, precision: usize) -> Result<Self> {
        Self::from_int(r as i128, p, precision)
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    /// `a_K`, the element modulo `p^K`.
    pub fn value(&self) -> i64 {
        *self.digits.last().expect("precision >= 1")
    }

    pub fn at(&self, k: usize) -> i64 {
        self.digits[k - 1]
    }

    pub fn modulus(&self) -> i64 {
        self.p.pow(self.precision() as u32)
    }

    pub fn is_coherent(&self) -> bool {
        let mut m = 1i64;
        for (i, &a) in self.digits.iter().enumerate() {
            let next = m * self.p;
            if !(0..next).contains(&a) {
                return false;
            }
            if i > 0 && reduce(a, m) != self.digits[i - 1] {
                return false;
            }
            m = next;
        }
        true
    }

    pub fn truncate(&self, k: usize) -> PadicApprox {
        PadicApprox {
            p: self.p,
            digits: self.digits[..k].to_vec(),
        }
    }

    fn check_params(&self, other: &PadicApprox) -> Result<()> {
        if self.p != other.p || self.precision() != other.precision() {
            return Err(Error::ParameterMismatch(
                self.p,
                self.precision(),
                other.p,
                other.precision(),
            ));
        }
        Ok(())
    }

    fn zip_with(&self, other: &PadicApprox, f: impl Fn(i64, i64, i64) -> i64) -> Result<Self> {
        self.check_params(other)?;
        let mut m = 1i64;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&x, &y)| {
                m *= self.p;
                f(x, y, m)
            })
            .collect();
        let out = PadicApprox { p: self.p, digits };
        debug_assert!(out.is_coherent());
        Ok(out)
    }

    pub fn add(&self, other: &PadicApprox) -> Result<Self> {
        self.zip_with(other, add_mod)
    }

    pub fn mul(&self, other: &PadicApprox) -> Result<Self> {
        self.zip_with(other, mul_mod)
    }

    pub fn neg(&self) -> Self {
        let mut m = 1i64;
        let digits = self
            .digits
            .iter()
            .map(|&x| {
                m *= self.p;
                reduce(-x, m)
            })
            .collect();
        PadicApprox { p: self.p, digits }
    }

    pub fn sub(&self, other: &PadicApprox) -> Result<Self> {
        self.add(&other.neg())
    }
}

impl std::fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (mod {}^{})", self.value(), self.p, self.precision())
    }
}

pub fn padic_from_int(n: i128, p: i64, precision: usize) -> Result<PadicApprox> {
    PadicApprox::from_int(n, p, precision)
}

pub fn padic_add(x: &PadicApprox, y: &PadicApprox) -> Result<PadicApprox> {
    x.add(y)
}

pub fn padic_mul(x: &PadicApprox, y: &PadicApprox) -> Result<PadicApprox> {
    x.mul(y)
}

/// `Σ coeffs[i] Tⁱ` with coefficients in `Z_p` at a shared precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyOverZp {
    pub p: i64,
    pub precision: usize,
    pub coeffs: Vec<PadicApprox>,
}

impl PolyOverZp {
    pub fn new(coeffs: Vec<PadicApprox>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::PreconditionFailed("empty polynomial".into()))?;
        let (p, k) = (first.p, first.precision());
        for c in &coeffs {
            if c.p != p || c.precision() != k {
                return Err(Error::ParameterMismatch(p, k, c.p, c.precision()));
            }
        }
        Ok(PolyOverZp {
            p,
            precision: k,
            coeffs,
        })
    }

    /// Integer coefficients, lowest degree first.
    pub fn from_ints(coeffs: &[i128], p: i64, precision: usize) -> Result<Self> {
        Self::new(
            coeffs
                .iter()
                .map(|&c| PadicApprox::from_int(c, p, precision))
                .collect::<Result<_>>()?,
        )
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn derivative(&self) -> PolyOverZp {
        if self.coeffs.len() == 1 {
            let zero = PadicApprox::from_int(0, self.p, self.precision).expect("valid parameters");
            return PolyOverZp {
                p: self.p,
                precision: self.precision,
                coeffs: vec![zero],
            };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let i = PadicApprox::from_int(i as i128, self.p, self.precision).expect("valid");
                c.mul(&i).expect("shared parameters")
            })
            .collect();
        PolyOverZp {
            p: self.p,
            precision: self.precision,
            coeffs,
        }
    }

    /// `f(t) mod p^k` for `k ≤ precision`.
    pub fn eval_mod(&self, t: i64, k: usize) -> i64 {
        let m = self.p.pow(k as u32);
        let t = reduce(t, m);
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, c| add_mod(mul_mod(acc, t, m), c.at(k), m))
    }
}

/// The unique `u ≡ t0 (mod p)` with `f(u) ≡ 0 (mod p^K)`.
///
/// Each step corrects `t_k` by `−f(t_k)/f′(t0)`, which is exact modulo
/// `p^{k+1}` because `f′(t_k) ≡ f′(t0) (mod p)`.
pub fn hensel_lift_root(f: &PolyOverZp, t0: i64, precision: usize) -> Result<PadicApprox> {
    if precision == 0 || precision > f.precision {
        return Err(Error::PreconditionFailed(format!(
            "precision {precision} must be in 1..={}",
            f.precision
        )));
    }
    let p = f.p;
    if f.eval_mod(t0, 1) != 0 {
        return Err(Error::NotARoot);
    }
    let df = f.derivative().eval_mod(t0, 1);
    if df == 0 {
        return Err(Error::DerivativeVanishes);
    }
    let inv = inv_raw(df, p)?;
    let mut digits = vec![reduce(t0, p)];
    let mut t = digits[0];
    let mut m = p;
    for k in 2..=precision {
        m *= p;
        let ft = f.eval_mod(t, k);
        t = reduce_wide(t as i128 - mul_mod(ft, inv, m) as i128, m);
        debug_assert_eq!(f.eval_mod(t, k), 0);
        digits.push(t);
    }
    let out = PadicApprox { p, digits };
    debug_assert!(out.is_coherent());
    Ok(out)
}

fn quartic_poly(a: i64, b: i64, c: i64, p: i64, precision: usize) -> Result<PolyOverZp> {
    PolyOverZp::from_ints(&[c as i128, 0, b as i128, 0, a as i128], p, precision)
}

/// Least root of `aT⁴ + bT² + c` modulo `p`.
pub fn quartic_root_mod_p(a: i64, b: i64, c: i64, p: i64) -> Result<i64> {
    require_prime(p)?;
    let f = quartic_poly(a, b, c, p, 1)?;
    (0..p).find(|&t| f.eval_mod(t, 1) == 0).ok_or(Error::RootSearchFailed(p))
}

/// Root in `Z_p` of `aT⁴ + bT² + c` lifting the root `t0` modulo `p`, for
/// `p ∤ 2ac(b² − 4ac)`.
pub fn quartic_root_lift(a: i64, b: i64, c: i64, p: i64, t0: i64, precision: usize) -> Result<PadicApprox> {
    require_prime(p)?;
    let disc = (b as i128) * (b as i128) - 4 * (a as i128) * (c as i128);
    let bad = 2 * (a as i128) % p as i128 == 0
        || (c as i128) % p as i128 == 0
        || disc % p as i128 == 0;
    if bad {
        return Err(Error::PreconditionFailed(format!(
            "{p} divides 2ac(b^2 - 4ac) for (a, b, c) = ({a}, {b}, {c})"
        )));
    }
    let f = quartic_poly(a, b, c, p, precision)?;
    if f.eval_mod(t0, 1) != 0 {
        return Err(Error::NotARoot);
    }
    // t0 ≢ 0 since p ∤ c, and 2at0² + b ≢ 0 since the root is simple.
    assert_ne!(f.derivative().eval_mod(t0, 1), 0, "simple root expected");
    hensel_lift_root(&f, t0, precision)
}

/// A solution in `Z_p` to the working precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicSolution {
    pub u: PadicApprox,
    pub v: PadicApprox,
    pub w: PadicApprox,
    pub z: PadicApprox,
    /// The roles of `U` and `W` were exchanged to make `w` a unit.
    pub swapped: bool,
}

impl PadicSolution {
    pub fn precision(&self) -> usize {
        self.u.precision()
    }

    pub fn at(&self, k: usize) -> Quad {
        Quad::new(self.u.at(k), self.v.at(k), self.w.at(k), self.z.at(k))
    }

    /// Both congruences hold modulo `p^k` for every `k ≤ K`, and the
    /// solution is primitive.
    pub fn check(&self, coeffs: &SystemCoeffs) -> bool {
        let p = self.u.p;
        (1..=self.precision()).all(|k| self.at(k).satisfies_mod(coeffs, p.pow(k as u32)))
            && !self.at(1).is_zero()
    }
}

/// Solution in `Z_p` of the general system for `p ∤ 2acd(b² − 4ac)`.
///
/// A solution modulo `p` is scaled so that `w ≡ 1` (exchanging `U` and `W`
/// if only `u` is a unit). If `z ≡ 0` then `v` is a simple root of
/// `aT⁴ + bT² + c` and lifts to `t`, giving `(t², t, 1, 0)`; otherwise `z`
/// lifts as a root of `dT² − (av⁴ + bv² + c)`, giving `(v², v, 1, t)`.
pub fn p_local_solve_general(coeffs: &SystemCoeffs, p: i64, precision: usize) -> Result<PadicSolution> {
    require_prime(p)?;
    let disc = coeffs.discriminant();
    let pi = p as i128;
    if p == 2
        || [coeffs.a, coeffs.c, coeffs.d].iter().any(|&x| x as i128 % pi == 0)
        || disc % pi == 0
    {
        return Err(Error::PreconditionFailed(format!(
            "{p} divides 2acd(b^2 - 4ac) for {coeffs}"
        )));
    }
    moduli(p, precision)?;
    let base = solve_general_fp(coeffs, p)?.quad.reduce(p);
    let swapped = base.w == 0;
    let (sys, q) = if swapped {
        let s = SystemCoeffs::new(coeffs.c, coeffs.b, coeffs.a, coeffs.d)?;
        (s, Quad::new(base.w, base.v, base.u, base.z))
    } else {
        (*coeffs, base)
    };
    let inv = inv_raw(q.w, p)?;
    let q = q.scale(inv, p);
    debug_assert_eq!(q.w, 1);
    let one = PadicApprox::from_int(1, p, precision)?;
    let (u, v, z) = if q.z == 0 {
        let t = quartic_root_lift(sys.a, sys.b, sys.c, p, q.v, precision)?;
        (t.mul(&t)?, t, PadicApprox::from_int(0, p, precision)?)
    } else {
        let v = q.v as i128;
        let rhs = sys.a as i128 * v.pow(4) + sys.b as i128 * v * v + sys.c as i128;
        let g = PolyOverZp::from_ints(&[-rhs, 0, sys.d as i128], p, precision)?;
        let t = hensel_lift_root(&g, q.z, precision)?;
        (PadicApprox::from_int(v * v, p, precision)?, PadicApprox::from_int(v, p, precision)?, t)
    };
    let (u, w) = if swapped { (one, u) } else { (u, one) };
    let sol = PadicSolution { u, v, w, z, swapped };
    debug_assert!(sol.check(coeffs));
    Ok(sol)
}

/// Primitive solutions modulo `p^k` that extend to primitive solutions modulo
/// `p^λ`, one per class under scaling by units.
///
/// Representatives have their first unit coordinate among `u, w, z` equal
/// to 1 (a unit `v` forces a unit `u`). Extension is decided by depth-first
/// search over lifts normalized the same way.
pub fn extendable_solutions(coeffs: &SystemCoeffs, p: i64, k: u32, lambda: u32) -> Result<Vec<Quad>> {
    require_prime(p)?;
    if k == 0 || lambda < k {
        return Err(Error::PreconditionFailed(format!("need 1 <= k <= lambda, got k={k}, lambda={lambda}")));
    }
    if prime_power(p, lambda).map_or(true, |m| m > EXTENSION_BUDGET) {
        return Err(Error::BudgetExceeded {
            what: format!("extension search modulo {p}^{lambda}"),
            limit: EXTENSION_BUDGET as i128,
        });
    }
    let mut search = Extender {
        coeffs,
        p,
        lambda,
        nodes: 0,
    };
    let mut out = Vec::new();
    for q in normalized_solutions(coeffs, p, k)? {
        if search.extends(q, k)? {
            out.push(q);
        }
    }
    Ok(out)
}

const NODE_BUDGET: u64 = 50_000_000;
const ENUMERATION_BUDGET: i64 = 3_000;

struct Extender<'a> {
    coeffs: &'a SystemCoeffs,
    p: i64,
    lambda: u32,
    nodes: u64,
}

#[derive(Clone, Copy)]
enum Pivot {
    U,
    W,
    Z,
}

fn pivot_of(q: &Quad, p: i64) -> Pivot {
    if reduce(q.u, p) != 0 {
        Pivot::U
    } else if reduce(q.w, p) != 0 {
        Pivot::W
    } else {
        Pivot::Z
    }
}

impl Extender<'_> {
    fn extends(&mut self, q: Quad, j: u32) -> Result<bool> {
        if j == self.lambda {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return Err(Error::BudgetExceeded {
                what: "extension search nodes".into(),
                limit: NODE_BUDGET as i128,
            });
        }
        let p = self.p;
        let step = p.pow(j);
        let m = step * p;
        let ok = |c: Quad| c.satisfies_mod(self.coeffs, m);
        match pivot_of(&q, p) {
            Pivot::U | Pivot::W => {
                for e1 in 0..p {
                    let v = q.v + e1 * step;
                    let sq = mul_mod(v, v, m);
                    for e2 in 0..p {
                        let z = q.z + e2 * step;
                        let c = match pivot_of(&q, p) {
                            Pivot::U => Quad::new(1, v, sq, z),
                            _ => Quad::new(sq, v, 1, z),
                        };
                        if ok(c) && self.extends(c, j + 1)? {
                            return Ok(true);
                        }
                    }
                }
            }
            Pivot::Z => {
                for e1 in 0..p {
                    for e2 in 0..p {
                        for e3 in 0..p {
                            let c = Quad::new(q.u + e1 * step, q.v + e2 * step, q.w + e3 * step, 1);
                            if ok(c) && self.extends(c, j + 1)? {
                                return Ok(true);
                            }
                        }
                    }
                }
            }
        }
        Ok(false)
    }
}

/// Every primitive solution modulo `p^k` whose first unit coordinate among
/// `u, w, z` is 1.
pub fn normalized_solutions(coeffs: &SystemCoeffs, p: i64, k: u32) -> Result<Vec<Quad>> {
    let m = prime_power(p, k)?;
    if m > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            what: format!("enumeration modulo {p}^{k}"),
            limit: ENUMERATION_BUDGET as i128,
        });
    }
    let mut out = Vec::new();
    for v in 0..m {
        let sq = mul_mod(v, v, m);
        for z in 0..m {
            let q = Quad::new(1, v, sq, z);
            if q.satisfies_mod(coeffs, m) {
                out.push(q);
            }
        }
    }
    for v in (0..m).step_by(p as usize) {
        let sq = mul_mod(v, v, m);
        for z in 0..m {
            let q = Quad::new(sq, v, 1, z);
            if q.satisfies_mod(coeffs, m) {
                out.push(q);
            }
        }
    }
    for u in (0..m).step_by(p as usize) {
        for v in (0..m).step_by(p as usize) {
            for w in (0..m).step_by(p as usize) {
                let q = Quad::new(u, v, w, 1);
                if q.satisfies_mod(coeffs, m) {
                    out.push(q);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}
