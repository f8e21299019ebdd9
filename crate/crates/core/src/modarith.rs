//! Exact modular arithmetic on 63-bit integers.
//!
//! All residues are canonical, in `[0, m)`. Products go through `i128`, so any
//! pair of reduced operands is safe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{require_odd_prime, require_prime};

/// A canonical residue class `value mod modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    value: i64,
    modulus: i64,
}

impl Residue {
    pub fn new(value: i64, modulus: i64) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(Self {
            value: reduce(value, modulus),
            modulus,
        })
    }

    pub fn value(self) -> i64 {
        self.value
    }

    pub fn modulus(self) -> i64 {
        self.modulus
    }
}

impl std::fmt::Display for Residue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// Value of the Legendre symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LegendreValue {
    MinusOne,
    Zero,
    One,
}

impl LegendreValue {
    pub fn as_i8(self) -> i8 {
        match self {
            LegendreValue::MinusOne => -1,
            LegendreValue::Zero => 0,
            LegendreValue::One => 1,
        }
    }

    pub fn neg(self) -> Self {
        match self {
            LegendreValue::MinusOne => LegendreValue::One,
            LegendreValue::Zero => LegendreValue::Zero,
            LegendreValue::One => LegendreValue::MinusOne,
        }
    }
}

/// Request to lift an `r`-th root of `n` from `p` to `p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftRequest {
    pub n: i64,
    pub r: u32,
    pub p: i64,
    pub k: u32,
}

impl LiftRequest {
    pub fn new(n: i64, r: u32, p: i64, k: u32) -> Result<Self> {
        require_prime(p)?;
        if r == 0 || k == 0 {
            return Err(Error::PreconditionFailed(format!(
                "exponents must be positive (r = {r}, k = {k})"
            )));
        }
        Ok(Self { n, r, p, k })
    }

    pub fn modulus(&self) -> Result<i64> {
        prime_power(self.p, self.k)
    }
}

pub(crate) fn check_modulus(m: i64) -> Result<()> {
    if m < 2 {
        Err(Error::ModulusTooSmall(m))
    } else {
        Ok(())
    }
}

/// Canonical representative of `x mod m` in `[0, m)`.
#[inline]
pub fn reduce(x: i64, m: i64) -> i64 {
    (x as i128).rem_euclid(m as i128) as i64
}

#[inline]
pub fn reduce_wide(x: i128, m: i64) -> i64 {
    x.rem_euclid(m as i128) as i64
}

#[inline]
pub fn mul_mod(a: i64, b: i64, m: i64) -> i64 {
    ((a as i128 * b as i128).rem_euclid(m as i128)) as i64
}

#[inline]
pub fn add_mod(a: i64, b: i64, m: i64) -> i64 {
    ((a as i128 + b as i128).rem_euclid(m as i128)) as i64
}

pub(crate) fn pow_mod_u(base: u64, mut exp: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc: u128 = 1 % m;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Unchecked `base^exp mod m`; callers guarantee `m >= 2`.
#[inline]
pub fn pow_mod_raw(base: i64, exp: u64, m: i64) -> i64 {
    pow_mod_u(reduce(base, m) as u64, exp, m as u64) as i64
}

/// `p^k` with overflow detection.
pub fn prime_power(p: i64, k: u32) -> Result<i64> {
    p.checked_pow(k).ok_or(Error::Overflow("computing a prime power"))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = ((a as i128).abs(), (b as i128).abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// Extended Euclid on `i128`: returns `(g, x, y)` with `a x + b y = g`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// `base^exp` reduced into `[0, m)` by repeated squaring.
pub fn mod_pow(base: i64, exp: u64, m: i64) -> Result<Residue> {
    check_modulus(m)?;
    Residue::new(pow_mod_raw(base, exp, m), m)
}

/// Inverse of `a` modulo `m`.
pub fn inverse_mod(a: i64, m: i64) -> Result<Residue> {
    check_modulus(m)?;
    let a_red = reduce(a, m);
    let (g, x, _) = ext_gcd(a_red as i128, m as i128);
    if g != 1 {
        return Err(Error::NoInverse { value: a, modulus: m });
    }
    Residue::new(reduce_wide(x, m), m)
}

pub(crate) fn inv_raw(a: i64, m: i64) -> Result<i64> {
    inverse_mod(a, m).map(Residue::value)
}

/// Legendre symbol by Euler's criterion.
pub fn legendre(a: i64, p: i64) -> Result<LegendreValue> {
    require_odd_prime(p)?;
    Ok(legendre_unchecked(a, p))
}

/// Euler's criterion without the primality check; `p` must be an odd prime.
pub fn legendre_unchecked(a: i64, p: i64) -> LegendreValue {
    let e = pow_mod_raw(a, ((p - 1) / 2) as u64, p);
    if e == 0 {
        LegendreValue::Zero
    } else if e == 1 {
        LegendreValue::One
    } else {
        debug_assert_eq!(e, p - 1);
        LegendreValue::MinusOne
    }
}

/// Least `x` in `[0, m)` with `x^r = a (mod m)`, by exhaustive scan.
pub fn is_rth_power_mod(a: i64, r: u32, m: i64) -> Result<Option<Residue>> {
    check_modulus(m)?;
    let target = reduce(a, m);
    for x in 0..m {
        if pow_mod_raw(x, r as u64, m) == target {
            return Ok(Some(Residue::new(x, m)?));
        }
    }
    Ok(None)
}

/// Fourth-power test modulo an odd prime via the power-residue criterion.
pub fn is_fourth_power_mod_p(a: i64, p: i64) -> Result<bool> {
    require_odd_prime(p)?;
    let a = reduce(a, p);
    if a == 0 {
        return Ok(true);
    }
    let g = gcd(4, p - 1);
    Ok(pow_mod_raw(a, ((p - 1) / g) as u64, p) == 1)
}

/// Least square root of `a` modulo an odd prime, by Tonelli–Shanks.
pub fn sqrt_mod_p(a: i64, p: i64) -> Result<Option<Residue>> {
    require_odd_prime(p)?;
    Ok(sqrt_mod_p_unchecked(a, p).map(|s| Residue { value: s, modulus: p }))
}

pub(crate) fn sqrt_mod_p_unchecked(a: i64, p: i64) -> Option<i64> {
    let a = reduce(a, p);
    if a == 0 {
        return Some(0);
    }
    if legendre_unchecked(a, p) != LegendreValue::One {
        return None;
    }
    let root = tonelli_shanks(a, p);
    debug_assert_eq!(mul_mod(root, root, p), a);
    Some(root.min(p - root))
}

fn tonelli_shanks(a: i64, p: i64) -> i64 {
    if p % 4 == 3 {
        return pow_mod_raw(a, ((p + 1) / 4) as u64, p);
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre_unchecked(z, p) != LegendreValue::MinusOne {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod_raw(z, q as u64, p);
    let mut t = pow_mod_raw(a, q as u64, p);
    let mut r = pow_mod_raw(a, ((q + 1) / 2) as u64, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod_raw(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Least square root by exhaustive scan; valid for any modulus.
pub fn sqrt_mod_scan(a: i64, m: i64) -> Result<Option<Residue>> {
    is_rth_power_mod(a, 2, m)
}

/// A fourth root of `a` modulo an odd prime: a square root of whichever of
/// `±√a` is itself a square. Returns the smaller of the pair `x, p - x`.
pub fn fourth_root_mod_p(a: i64, p: i64) -> Result<Option<Residue>> {
    require_odd_prime(p)?;
    Ok(fourth_root_unchecked(a, p).map(|x| Residue { value: x, modulus: p }))
}

pub(crate) fn fourth_root_unchecked(a: i64, p: i64) -> Option<i64> {
    let s = sqrt_mod_p_unchecked(a, p)?;
    sqrt_mod_p_unchecked(s, p).or_else(|| sqrt_mod_p_unchecked(p - s, p))
}
