//! Primality, trial-division factorization and square-freeness.
//!
//! Everything here works on desk-scale integers; factorization is plain
//! trial division and refuses inputs above [`FACTOR_BUDGET`].

use crate::error::{Error, Result};
use crate::modarith::{mul_mod, pow_mod_u};

/// Largest absolute value [`factorize`] will accept.
pub const FACTOR_BUDGET: i128 = 1_000_000_000_000;

// Deterministic for every n < 3.3e24, so certainly for u64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod_u(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x as i64, x as i64, n as i64) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn require_prime(p: i64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

pub fn require_odd_prime(p: i64) -> Result<()> {
    if p == 2 {
        return Err(Error::EvenPrime);
    }
    require_prime(p)
}

/// Prime factorization of `|n|` as `(prime, exponent)` pairs in ascending order.
pub fn factorize(n: i64) -> Result<Vec<(i64, u32)>> {
    let mut m = (n as i128).abs();
    if m > FACTOR_BUDGET {
        return Err(Error::BudgetExceeded {
            what: format!("trial factorization of {n}"),
            limit: FACTOR_BUDGET,
        });
    }
    let mut out = Vec::new();
    let mut p: i128 = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as i64, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m as i64, 1));
    }
    Ok(out)
}

/// Distinct primes dividing `|n|`.
pub fn prime_divisors(n: i64) -> Result<Vec<i64>> {
    Ok(factorize(n)?.into_iter().map(|(p, _)| p).collect())
}

pub fn is_squarefree(n: i64) -> Result<bool> {
    if n == 0 {
        return Ok(false);
    }
    Ok(factorize(n)?.iter().all(|&(_, e)| e == 1))
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: i64, p: i64) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut n = n as i128;
    let p = p as i128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: usize) -> Vec<i64> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as i64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// If `m = p^k` for a prime `p` and `k >= 1`, return `(p, k)`.
pub fn as_prime_power(m: i64) -> Option<(i64, u32)> {
    if m < 2 {
        return None;
    }
    let f = factorize(m).ok()?;
    match f.as_slice() {
        [(p, k)] => Some((*p, *k)),
        _ => None,
    }
}
