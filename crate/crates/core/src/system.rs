//! Coefficients and solution tuples of `aU² + bV² + cW² = dZ²`, `UW = V²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{gcd, inv_raw, mul_mod, reduce, reduce_wide};

/// The integers `a, b, c, d` of one system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemCoeffs {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl SystemCoeffs {
    /// Requires `acd != 0`.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a == 0 || c == 0 || d == 0 {
            return Err(Error::InvalidCoefficients(format!(
                "a, c, d must be nonzero (got a={a}, c={c}, d={d})"
            )));
        }
        Ok(Self { a, b, c, d })
    }

    /// The `b = 0` system `aU² + cW² = dZ²`, `UW = V²`.
    pub fn diagonal(a: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a, 0, c, d)
    }

    /// Additionally requires `b² - 4ac != 0`.
    pub fn general(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let s = Self::new(a, b, c, d)?;
        if s.discriminant() == 0 {
            return Err(Error::InvalidCoefficients(
                "b^2 - 4ac must be nonzero".into(),
            ));
        }
        Ok(s)
    }

    pub fn discriminant(&self) -> i128 {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        b * b - 4 * a * c
    }

    pub fn is_diagonal(&self) -> bool {
        self.b == 0
    }

    pub(crate) fn require_diagonal(&self) -> Result<()> {
        if self.b != 0 {
            return Err(Error::InvalidCoefficients(
                "this procedure needs b = 0".into(),
            ));
        }
        Ok(())
    }

    /// Residue of `aU² + bV² + cW² - dZ²` at `q`, modulo `m`.
    pub fn form_residue(&self, q: &Quad, m: i64) -> i64 {
        let sq = |x: i64| mul_mod(x, x, m) as i128;
        let t = reduce(self.a, m) as i128 * sq(q.u) + reduce(self.b, m) as i128 * sq(q.v)
            + reduce(self.c, m) as i128 * sq(q.w)
            - reduce(self.d, m) as i128 * sq(q.z);
        reduce_wide(t, m)
    }

    /// Exact value of `aU² + bV² + cW² - dZ²`, or `None` on overflow.
    pub fn form_exact(&self, q: &Quad) -> Option<i128> {
        let term = |k: i64, x: i64| (k as i128).checked_mul((x as i128) * (x as i128));
        term(self.a, q.u)?
            .checked_add(term(self.b, q.v)?)?
            .checked_add(term(self.c, q.w)?)?
            .checked_sub(term(self.d, q.z)?)
    }
}

impl std::fmt::Display for SystemCoeffs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.b, self.c, self.d)
    }
}

/// A tuple `(u, v, w, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 4]", into = "[i64; 4]")]
pub struct Quad {
    pub u: i64,
    pub v: i64,
    pub w: i64,
    pub z: i64,
}

impl From<[i64; 4]> for Quad {
    fn from([u, v, w, z]: [i64; 4]) -> Self {
        Quad { u, v, w, z }
    }
}

impl From<Quad> for [i64; 4] {
    fn from(q: Quad) -> Self {
        [q.u, q.v, q.w, q.z]
    }
}

impl std::fmt::Display for Quad {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {}, {})", self.u, self.v, self.w, self.z)
    }
}

impl Quad {
    pub const fn new(u: i64, v: i64, w: i64, z: i64) -> Self {
        Quad { u, v, w, z }
    }

    pub fn coords(&self) -> [i64; 4] {
        [self.u, self.v, self.w, self.z]
    }

    pub fn map(&self, f: impl Fn(i64) -> i64) -> Quad {
        Quad::new(f(self.u), f(self.v), f(self.w), f(self.z))
    }

    pub fn reduce(&self, m: i64) -> Quad {
        self.map(|x| reduce(x, m))
    }

    pub fn scale(&self, k: i64, m: i64) -> Quad {
        self.map(|x| mul_mod(x, k, m))
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(|&x| x == 0)
    }

    pub fn is_zero_mod(&self, m: i64) -> bool {
        self.coords().iter().all(|&x| reduce(x, m) == 0)
    }

    pub fn content(&self) -> i64 {
        self.coords().iter().fold(0, |g, &x| gcd(g, x))
    }

    /// Both congruences hold modulo `m`.
    pub fn satisfies_mod(&self, coeffs: &SystemCoeffs, m: i64) -> bool {
        let q = self.reduce(m);
        coeffs.form_residue(&q, m) == 0 && mul_mod(q.u, q.w, m) == mul_mod(q.v, q.v, m)
    }

    /// Both equations hold over the integers.
    pub fn satisfies_exact(&self, coeffs: &SystemCoeffs) -> bool {
        coeffs.form_exact(self) == Some(0)
            && (self.u as i128) * (self.w as i128) == (self.v as i128) * (self.v as i128)
    }

    /// Nontrivial with content coprime to `m`.
    pub fn is_primitive_mod(&self, m: i64) -> bool {
        gcd(self.content(), m) == 1
    }
}

/// Where a solution lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulus {
    Exact,
    Mod(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Trivial,
    Nontrivial,
    Primitive,
    Strong,
}

/// A tuple together with its modulus and classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolutionQuadruple {
    pub quad: Quad,
    pub modulus: Modulus,
    pub classification: Classification,
}

/// Classify `q` as a solution modulo `p^k`: trivial, nontrivial (every entry
/// divisible by `p`), primitive, or strong (primitive with one of `au, cw, dz`
/// nonzero modulo `p`). Whether `q` actually solves the system is checked
/// separately by [`Quad::satisfies_mod`].
pub fn classify(q: &Quad, coeffs: &SystemCoeffs, p: i64, k: u32) -> Classification {
    let m = match p.checked_pow(k) {
        Some(m) => m,
        None => return classify_exact_p(q, coeffs, p),
    };
    if q.is_zero_mod(m) {
        return Classification::Trivial;
    }
    classify_exact_p(q, coeffs, p)
}

fn classify_exact_p(q: &Quad, coeffs: &SystemCoeffs, p: i64) -> Classification {
    if q.coords().iter().all(|&x| reduce(x, p) == 0) {
        if q.is_zero() {
            return Classification::Trivial;
        }
        return Classification::Nontrivial;
    }
    let nz = |k: i64, x: i64| mul_mod(reduce(k, p), reduce(x, p), p) != 0;
    if nz(coeffs.a, q.u) || nz(coeffs.c, q.w) || nz(coeffs.d, q.z) {
        Classification::Strong
    } else {
        Classification::Primitive
    }
}

/// Projective normal form of a primitive tuple modulo `m`.
///
/// If `z` is a unit it is scaled to 1 and the sign of `(u, v, w)` is chosen to
/// make `u` least; otherwise `u` (or failing that `w`) is scaled to 1 and the
/// free signs of `v` and `z` are chosen least. Scaling by units and flipping
/// the signs of `v` or `z` preserve both congruences.
pub fn canonical_form(q: &Quad, m: i64) -> Quad {
    let q = q.reduce(m);
    let unit = |x: i64| gcd(x, m) == 1;
    let least = |x: i64| x.min(reduce(-x, m));
    if unit(q.z) {
        let mut s = q.scale(inv_raw(q.z, m).expect("unit"), m);
        if reduce(-s.u, m) < s.u {
            s = Quad::new(reduce(-s.u, m), reduce(-s.v, m), reduce(-s.w, m), s.z);
        }
        s.v = least(s.v);
        s
    } else if unit(q.u) || unit(q.w) {
        let pivot = if unit(q.u) { q.u } else { q.w };
        let mut s = q.scale(inv_raw(pivot, m).expect("unit"), m);
        s.v = least(s.v);
        s.z = least(s.z);
        s
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_validation() {
        assert!(SystemCoeffs::new(1, 0, 3, 0).is_err());
        assert!(SystemCoeffs::new(0, 5, 3, 1).is_err());
        assert!(SystemCoeffs::general(1, 2, 1, 1).is_err());
        assert!(SystemCoeffs::general(1, 1, 1, 1).is_ok());
    }

    #[test]
    fn congruence_checks() {
        let s = SystemCoeffs::diagonal(1, 3, 7).unwrap();
        assert!(Quad::new(1, 1, 1, 2).satisfies_mod(&s, 8));
        assert!(!Quad::new(1, 1, 1, 2).satisfies_mod(&s, 16));
        let lr = SystemCoeffs::diagonal(1, -1, 2).unwrap();
        assert!(Quad::new(1, 1, 1, 0).satisfies_exact(&lr));
    }

    #[test]
    fn canonical_form_examples() {
        assert_eq!(canonical_form(&Quad::new(2, 1, 2, 1), 3), Quad::new(1, 1, 1, 1));
        assert_eq!(canonical_form(&Quad::new(1, 0, 0, 3), 17), Quad::new(6, 0, 0, 1));
        assert_eq!(canonical_form(&Quad::new(1, 1, 1, 0), 16), Quad::new(1, 1, 1, 0));
    }

    #[test]
    fn canonical_form_preserves_solutions() {
        let s = SystemCoeffs::diagonal(1, -17, 2).unwrap();
        for m in [3i64, 5, 7, 16, 17] {
            for u in 0..m {
                for v in 0..m {
                    for w in 0..m {
                        for z in 0..m {
                            let q = Quad::new(u, v, w, z);
                            if q.satisfies_mod(&s, m) && q.is_primitive_mod(m) {
                                let c = canonical_form(&q, m);
                                assert!(c.satisfies_mod(&s, m));
                                assert!(c.is_primitive_mod(m));
                            }
                        }
                    }
                }
            }
        }
    }
}
