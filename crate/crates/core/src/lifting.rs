//! Lifting power residues and strong solutions from `p` (or `16`) to `p^k`.
//!
//! A strong solution modulo `p^k` is primitive with at least one of
//! `au, cw, dz` a unit. From one strong solution modulo `p` (odd `p`) or
//! modulo `16` (`p = 2`) we build a strong solution modulo every `p^k`: scale
//! `u` to 1, so that `a + c·v⁴ ≡ d·z²`, lift `N = a⁻¹(dz² − cv⁴)` to a fourth
//! power `m⁴` modulo `p^k` and emit `(m², mv, v², z)`. For `p = 2` the fourth
//! root comes from [`lift_fourth_power_2adic`], which needs `N ≡ 1 (mod 16)`;
//! that is exactly what a solution modulo 16 provides.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{
    gcd, inv_raw, mul_mod, pow_mod_raw, prime_power, reduce, reduce_wide, sqrt_mod_p_unchecked,
    LiftRequest, Residue,
};
pub use crate::system::classify as classify_solution;
use crate::system::{Classification, Modulus, Quad, SolutionQuadruple, SystemCoeffs};

/// Above this the starting root modulo `p` is not scanned for.
const ROOT_SCAN_LIMIT: i64 = 1_000_000;

/// `x` with `r·a^{r−1}·x ≡ c (mod p)`; the inductive step of Hensel for
/// `T^r − N`.
fn correction(a: i64, r: u32, c: i64, p: i64) -> Result<i64> {
    let deriv = mul_mod(r as i64 % p, pow_mod_raw(a, (r - 1) as u64, p), p);
    Ok(mul_mod(reduce(c, p), inv_raw(deriv, p)?, p))
}

/// Least `r`-th root of `n` modulo `p`; large primes fall back to
/// Tonelli–Shanks for `r ∈ {2, 4}`, whose root need not be least.
fn root_mod_p(n: i64, r: u32, p: i64) -> Result<Option<i64>> {
    let n = reduce(n, p);
    if n == 1 || r == 1 || p == 2 {
        return Ok(Some(n));
    }
    if p > ROOT_SCAN_LIMIT {
        return match r {
            2 => Ok(sqrt_mod_p_unchecked(n, p)),
            4 => Ok(crate::modarith::fourth_root_unchecked(n, p)),
            _ => Err(Error::BudgetExceeded {
                what: format!("scanning for an {r}-th root modulo {p}"),
                limit: ROOT_SCAN_LIMIT as i128,
            }),
        };
    }
    Ok((1..p).find(|&x| pow_mod_raw(x, r as u64, p) == n))
}

/// `a` with `a^r ≡ N (mod p^k)`, for `p ∤ rN` and `N` an `r`-th power
/// modulo `p`. The result is the unique lift of the least root modulo `p`.
pub fn lift_rth_power(req: LiftRequest) -> Result<Residue> {
    let LiftRequest { n, r, p, k } = req;
    let m = req.modulus()?;
    if (r as i64) % p == 0 || reduce(n, p) == 0 {
        return Err(Error::PreconditionFailed(format!(
            "{p} divides r*N (r = {r}, N = {n})"
        )));
    }
    let mut a = root_mod_p(n, r, p)?.ok_or_else(|| {
        Error::PreconditionFailed(format!("{n} is not an r-th power modulo {p} (r = {r})"))
    })?;
    let mut pk = p;
    for _ in 1..k {
        let next = pk * p;
        // N = a^r + c·p^k with the difference taken modulo p^{k+1}.
        let diff = reduce(n - pow_mod_raw(a, r as u64, next), next);
        debug_assert_eq!(diff % pk, 0);
        let x = correction(a, r, diff / pk, p)?;
        a = reduce(a + x * pk, next);
        pk = next;
    }
    debug_assert_eq!(pow_mod_raw(a, r as u64, m), reduce(n, m));
    Residue::new(a, m)
}

/// Least `a` with `a⁴ ≡ N (mod 2^k)`, for `N ≡ 1 (mod 16)`.
///
/// The induction gives one root; the others are `±a + j·2^(k−2)`, because
/// `x⁴ ≡ 1 (mod 2^k)` exactly when `x ≡ ±1 (mod 2^(k−2))`.
pub fn lift_fourth_power_2adic(n: i64, k: u32) -> Result<Residue> {
    if reduce(n, 16) != 1 {
        return Err(Error::PreconditionFailed(format!(
            "{n} is not 1 modulo 16"
        )));
    }
    if k == 0 || k > 62 {
        return Err(Error::PreconditionFailed(format!(
            "2-adic precision must be in 1..=62, got {k}"
        )));
    }
    let m = 1i64 << k;
    let mut a: i64 = 1;
    for j in 4..k {
        let next = 1i128 << (j + 1);
        let a4 = (a as i128).pow(2).rem_euclid(next).pow(2).rem_euclid(next);
        let diff = (n as i128 - a4).rem_euclid(next);
        debug_assert_eq!(diff % (1 << j), 0);
        let c = (diff >> j) & 1;
        a = (a as i128 + (c << (j - 2))).rem_euclid(next) as i64;
    }
    let a = if k < 3 {
        1
    } else {
        let step = 1i64 << (k - 2);
        (0..4)
            .flat_map(|j| [reduce(a + j * step, m), reduce(-a + j * step, m)])
            .min()
            .unwrap()
    };
    debug_assert_eq!(pow_mod_raw(a, 4, m), reduce(n, m));
    Residue::new(a, m)
}

/// Strong solutions modulo `p^k` for consecutive `k`, each built from the
/// same base solution. Consecutive entries need not be congruent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongSolutionChain {
    pub p: i64,
    pub first_exponent: u32,
    pub entries: Vec<SolutionQuadruple>,
}

impl StrongSolutionChain {
    pub fn exponents(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.entries.len() as u32).map(move |i| self.first_exponent + i)
    }
}

/// Which coordinate of the base solution is scaled to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pivot {
    U,
    W,
}

/// Strong solutions modulo `p^k` for `k` up to `max_k`, from a strong solution
/// modulo `p` (odd `p`) or modulo 16 (`p = 2`).
///
/// For `p = 2` the chain starts at `k = 4`. Solutions are normalized on `u`
/// when `au` is a unit and on `w` otherwise; one of the two always is.
pub fn lift_strong_solution(
    coeffs: &SystemCoeffs,
    p: i64,
    base: &Quad,
    max_k: u32,
) -> Result<StrongSolutionChain> {
    coeffs.require_diagonal()?;
    crate::primes::require_prime(p)?;
    let (base_mod, first) = if p == 2 { (16, 4) } else { (p, 1) };
    if max_k < first {
        return Err(Error::PreconditionFailed(format!(
            "lifting needs K >= {first} for p = {p}"
        )));
    }
    if !base.satisfies_mod(coeffs, base_mod) {
        return Err(Error::NotASolution(format!("{base} modulo {base_mod}")));
    }
    if crate::system::classify(base, coeffs, p, if p == 2 { 4 } else { 1 })
        != Classification::Strong
    {
        return Err(Error::NotStrong(format!("{base} modulo {base_mod}")));
    }
    prime_power(p, max_k)?;

    let unit = |x: i64, y: i64| gcd(mul_mod(reduce(x, p), reduce(y, p), p), p) == 1;
    let pivot = if unit(coeffs.a, base.u) {
        Pivot::U
    } else if unit(coeffs.c, base.w) {
        Pivot::W
    } else {
        // a·u ≡ c·w ≡ 0 forces d·z² ≡ 0, contradicting strongness.
        unreachable!("strong solution with au and cw both divisible by p")
    };

    // Scaled base (1, v, ·, z) or (·, v, 1, z) modulo base_mod, plus the
    // coefficient pair (lead, other) so that lead·m⁴ + other·v⁴ ≡ d·z².
    let (pivot_val, lead, other) = match pivot {
        Pivot::U => (base.u, coeffs.a, coeffs.c),
        Pivot::W => (base.w, coeffs.c, coeffs.a),
    };
    let inv = inv_raw(pivot_val, base_mod)?;
    let v = mul_mod(base.v, inv, base_mod);
    let z = mul_mod(base.z, inv, base_mod);

    let mut entries = Vec::with_capacity((max_k - first + 1) as usize);
    for k in first..=max_k {
        let m = prime_power(p, k)?;
        // N = lead⁻¹ (d z² − other v⁴) modulo p^k; N ≡ 1 modulo base_mod.
        let rhs = reduce_wide(
            mul_mod(reduce(coeffs.d, m), mul_mod(z, z, m), m) as i128
                - mul_mod(reduce(other, m), pow_mod_raw(v, 4, m), m) as i128,
            m,
        );
        let n = mul_mod(rhs, inv_raw(reduce(lead, m), m)?, m);
        let root = if p == 2 {
            lift_fourth_power_2adic(n, k)?
        } else {
            lift_rth_power(LiftRequest::new(n, 4, p, k)?)?
        }
        .value();
        let (mm, mv, vv) = (mul_mod(root, root, m), mul_mod(root, v, m), mul_mod(v, v, m));
        let quad = match pivot {
            Pivot::U => Quad::new(mm, mv, vv, reduce(z, m)),
            Pivot::W => Quad::new(vv, mv, mm, reduce(z, m)),
        };
        let classification = crate::system::classify(&quad, coeffs, p, k);
        debug_assert!(quad.satisfies_mod(coeffs, m));
        debug_assert_eq!(classification, Classification::Strong);
        entries.push(SolutionQuadruple {
            quad,
            modulus: Modulus::Mod(m),
            classification,
        });
    }
    Ok(StrongSolutionChain {
        p,
        first_exponent: first,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::is_rth_power_mod;
    use proptest::prelude::*;

    fn primitive_exists_mod(coeffs: &SystemCoeffs, m: i64) -> Vec<Quad> {
        let mut out = Vec::new();
        for u in 0..m {
            for v in 0..m {
                for w in 0..m {
                    for z in 0..m {
                        let q = Quad::new(u, v, w, z);
                        if q.is_primitive_mod(m) && q.satisfies_mod(coeffs, m) {
                            out.push(q);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn rth_power_examples() {
        assert_eq!(lift_rth_power(LiftRequest::new(2, 2, 7, 2).unwrap()).unwrap().value(), 10);
        for (r, p, k) in [(3, 5, 4), (4, 13, 3), (1, 7, 2)] {
            let a = lift_rth_power(LiftRequest::new(1, r, p, k).unwrap()).unwrap();
            assert_eq!(a.value(), 1);
        }
        assert!(matches!(
            lift_rth_power(LiftRequest::new(2, 4, 17, 3).unwrap()),
            Err(Error::PreconditionFailed(_))
        ));
        assert!(lift_rth_power(LiftRequest::new(7, 2, 7, 2).unwrap()).is_err());
        assert!(lift_rth_power(LiftRequest::new(2, 3, 3, 2).unwrap()).is_err());
    }

    #[test]
    fn rth_power_agrees_with_scan_existence() {
        for (p, k) in [(3i64, 3u32), (5, 3), (7, 2), (11, 2)] {
            let m = p.pow(k);
            for r in 1..=6u32 {
                if r as i64 % p == 0 {
                    continue;
                }
                for n in 1..m {
                    if n % p == 0 {
                        continue;
                    }
                    let req = LiftRequest::new(n, r, p, k).unwrap();
                    let scan = is_rth_power_mod(n, r, m).unwrap();
                    match lift_rth_power(req) {
                        Ok(a) => assert_eq!(pow_mod_raw(a.value(), r as u64, m), n),
                        Err(_) => assert!(scan.is_none(), "n={n} r={r} p^k={m}"),
                    }
                }
            }
        }
    }

    #[test]
    fn fourth_power_2adic_examples() {
        assert_eq!(lift_fourth_power_2adic(17, 5).unwrap().value(), 3);
        for k in 1..=20 {
            assert_eq!(lift_fourth_power_2adic(1, k).unwrap().value(), 1);
        }
        assert!(lift_fourth_power_2adic(3, 2).is_err());
        // 3 is a fourth power mod 2 but not mod 4.
        assert!(is_rth_power_mod(3, 4, 4).unwrap().is_none());
    }

    #[test]
    fn classify_examples() {
        let s = SystemCoeffs::diagonal(1, 3, 7).unwrap();
        assert_eq!(classify_solution(&Quad::new(0, 0, 0, 0), &s, 2, 3), Classification::Trivial);
        assert_eq!(classify_solution(&Quad::new(1, 1, 1, 2), &s, 2, 3), Classification::Strong);
        for p in [3i64, 5, 11] {
            let t = SystemCoeffs::diagonal(2, 3, 1).unwrap();
            assert_eq!(classify_solution(&Quad::new(p, p, p, 1), &t, p, 2), Classification::Strong);
        }
        let t = SystemCoeffs::diagonal(3, 3, 3).unwrap();
        assert_eq!(classify_solution(&Quad::new(0, 1, 0, 0), &t, 3, 2), Classification::Primitive);
        assert_eq!(classify_solution(&Quad::new(3, 0, 3, 3), &t, 3, 2), Classification::Nontrivial);
    }

    #[test]
    fn lind_reichardt_chain_mod_3() {
        let s = SystemCoeffs::diagonal(1, -17, 2).unwrap();
        let chain = lift_strong_solution(&s, 3, &Quad::new(1, 1, 1, 1), 4).unwrap();
        assert_eq!(chain.entries.len(), 4);
        for (k, e) in chain.exponents().zip(&chain.entries) {
            let m = 3i64.pow(k);
            assert!(e.quad.satisfies_mod(&s, m));
            assert_eq!(e.classification, Classification::Strong);
            if m <= 27 {
                assert!(primitive_exists_mod(&s, m).contains(&e.quad));
            }
        }
    }

    #[test]
    fn square_root_of_d_chain() {
        // (m, 0, 0, 1) with m² ≡ d modulo p for p | q.
        for (q, d, p) in [(17, 2, 17), (17, 19, 17), (41, 10, 41)] {
            let s = SystemCoeffs::diagonal(1, -q, d).unwrap();
            let m = sqrt_mod_p_unchecked(d, p).unwrap();
            let chain = lift_strong_solution(&s, p, &Quad::new(m, 0, 0, 1), 6).unwrap();
            for (k, e) in chain.exponents().zip(&chain.entries) {
                assert!(e.quad.satisfies_mod(&s, p.pow(k)));
            }
        }
    }

    #[test]
    fn two_adic_chain() {
        let s = SystemCoeffs::diagonal(1, -17, 2).unwrap();
        let chain = lift_strong_solution(&s, 2, &Quad::new(1, 1, 1, 0), 30).unwrap();
        assert_eq!(chain.first_exponent, 4);
        for (k, e) in chain.exponents().zip(&chain.entries) {
            assert!(e.quad.satisfies_mod(&s, 1 << k));
            assert_eq!(e.classification, Classification::Strong);
        }
        // Pivot on w: a·u even.
        let s = SystemCoeffs::diagonal(2, 1, 3).unwrap();
        let base = (0..16)
            .flat_map(|v| (0..16).map(move |z| Quad::new(v * v % 16, v, 1, z)))
            .find(|q| q.satisfies_mod(&s, 16))
            .unwrap();
        let chain = lift_strong_solution(&s, 2, &base, 12).unwrap();
        for (k, e) in chain.exponents().zip(&chain.entries) {
            assert!(e.quad.satisfies_mod(&s, 1 << k));
        }
    }

    #[test]
    fn rejects_bad_bases() {
        let s = SystemCoeffs::diagonal(1, -17, 2).unwrap();
        assert!(matches!(
            lift_strong_solution(&s, 17, &Quad::new(0, 0, 1, 0), 3),
            Err(Error::NotStrong(_))
        ));
        assert!(matches!(
            lift_strong_solution(&s, 3, &Quad::new(1, 0, 0, 0), 3),
            Err(Error::NotASolution(_))
        ));
    }

    #[test]
    fn primitive_is_strong_when_p_squared_misses_acd() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for &(p, k) in &[(3i64, 2u32), (3, 3), (5, 2), (2, 4)] {
            let m = p.pow(k);
            let mut tested = 0;
            while tested < 6 {
                let (a, c, d) = (
                    rng.gen_range(1..60i64),
                    rng.gen_range(-60..60i64),
                    rng.gen_range(-60..60i64),
                );
                if c == 0 || d == 0 || (a * c * d) % (p * p) == 0 {
                    continue;
                }
                tested += 1;
                let s = SystemCoeffs::diagonal(a, c, d).unwrap();
                for q in primitive_exists_mod(&s, m) {
                    assert_eq!(classify_solution(&q, &s, p, k), Classification::Strong);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn lift_reverifies(idx in 0usize..25, r in 1u32..8, k in 1u32..6, x in 1i64..1_000_000, t in 0i64..1_000_000) {
            let p = crate::primes::primes_up_to(100)[idx];
            let m = match p.checked_pow(k) { Some(m) if m <= 1_000_000 => m, _ => return Ok(()) };
            let n = pow_mod_raw(x, r as u64, p) + t * p;
            prop_assume!(n % p != 0 && (r as i64) % p != 0);
            let a = lift_rth_power(LiftRequest::new(n, r, p, k).unwrap()).unwrap();
            prop_assert_eq!(pow_mod_raw(a.value(), r as u64, m), reduce(n, m));
        }

        #[test]
        fn lift_2adic_reverifies(t in -1_000_000i64..1_000_000, k in 1u32..=40) {
            let n = 1 + 16 * t;
            let a = lift_fourth_power_2adic(n, k).unwrap();
            prop_assert_eq!(pow_mod_raw(a.value(), 4, 1 << k), reduce(n, 1 << k));
        }
    }
}
