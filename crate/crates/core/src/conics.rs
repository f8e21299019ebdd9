//! Conics `ax² + by² = 1` over F_p, their rational parametrization, and
//! nontrivial F_p-points of the full system.
//!
//! The parametrization from a base point `(x0, y0)` is
//!
//! ```text
//! q1 = b·x0·T² − 2·b·y0·T − a·x0
//! q2 = −b·y0·T² − 2·a·x0·T + a·y0
//! q3 = b·T² + a
//! ```
//!
//! and satisfies `a·q1² + b·q2² = q3²` identically. Points of the system come
//! from sweeping `t` until `q1(t)·q2(t)` is a square: that happens as soon as
//! the Legendre symbols of `q1(t)` and `q2(t)` are not negatives of each other,
//! which must occur for some `t` because `q1` and `q2` are not associates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{inv_raw, legendre_unchecked, mul_mod, reduce, sqrt_mod_p_unchecked};
use crate::primes::{require_odd_prime, require_prime};
use crate::system::{canonical_form, classify, Modulus, Quad, SolutionQuadruple, SystemCoeffs};

/// Polynomial of degree at most 2 over F_p, coefficients low to high.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Poly2 {
    pub coeffs: [i64; 3],
    pub p: i64,
}

impl Poly2 {
    pub fn new(c0: i64, c1: i64, c2: i64, p: i64) -> Self {
        Poly2 {
            coeffs: [reduce(c0, p), reduce(c1, p), reduce(c2, p)],
            p,
        }
    }

    pub fn eval(&self, t: i64) -> i64 {
        let p = self.p;
        let t = reduce(t, p);
        let [c0, c1, c2] = self.coeffs;
        reduce(mul_mod(mul_mod(c2, t, p) + c1, t, p) + c0, p)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// `self - k·other`.
    pub fn sub_scaled(&self, k: i64, other: &Poly2) -> Poly2 {
        let p = self.p;
        let c = |i: usize| self.coeffs[i] - mul_mod(k, other.coeffs[i], p);
        Poly2::new(c(0), c(1), c(2), p)
    }

    /// Coefficients of `self²`, degree ≤ 4.
    fn square(&self) -> [i64; 5] {
        let p = self.p;
        let mut out = [0i64; 5];
        for i in 0..3 {
            for j in 0..3 {
                out[i + j] = reduce(out[i + j] + mul_mod(self.coeffs[i], self.coeffs[j], p), p);
            }
        }
        out
    }

    /// Nonzero and a constant multiple of each other.
    pub fn is_associate_of(&self, other: &Poly2) -> bool {
        if self.is_zero() || other.is_zero() {
            return false;
        }
        let p = self.p;
        let lead = self.degree().unwrap();
        if other.degree() != Some(lead) {
            return false;
        }
        let k = mul_mod(
            other.coeffs[lead],
            inv_raw(self.coeffs[lead], p).expect("nonzero mod p"),
            p,
        );
        (0..3).all(|i| mul_mod(k, self.coeffs[i], p) == other.coeffs[i])
    }
}

impl std::fmt::Display for Poly2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [c0, c1, c2] = self.coeffs;
        write!(f, "{c2}T^2 + {c1}T + {c0} (mod {})", self.p)
    }
}

/// A point on `ax² + by² = 1` over F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConicPoint {
    pub x0: i64,
    pub y0: i64,
    pub a: i64,
    pub b: i64,
    pub p: i64,
}

impl ConicPoint {
    pub fn is_on_conic(&self) -> bool {
        let p = self.p;
        let lhs = mul_mod(self.a, mul_mod(self.x0, self.x0, p), p)
            + mul_mod(self.b, mul_mod(self.y0, self.y0, p), p);
        reduce(lhs, p) == 1 % p
    }
}

/// The parametrizing triple `(q1, q2, q3)` of a conic with a base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConicParam {
    pub point: ConicPoint,
    pub q1: Poly2,
    pub q2: Poly2,
    pub q3: Poly2,
}

impl ConicParam {
    pub fn p(&self) -> i64 {
        self.point.p
    }

    /// `a·q1² + b·q2² = q3²` coefficientwise.
    pub fn identity_holds(&self) -> bool {
        let p = self.p();
        let (s1, s2, s3) = (self.q1.square(), self.q2.square(), self.q3.square());
        (0..5).all(|i| {
            let lhs = mul_mod(self.point.a, s1[i], p) + mul_mod(self.point.b, s2[i], p);
            reduce(lhs - s3[i], p) == 0
        })
    }

    /// At least two of the three polynomials have degree exactly 2.
    pub fn has_two_quadratics(&self) -> bool {
        [self.q1, self.q2, self.q3]
            .iter()
            .filter(|q| q.degree() == Some(2))
            .count()
            >= 2
    }

    /// All three nonzero and pairwise non-associate.
    pub fn pairwise_non_associate(&self) -> bool {
        let qs = [self.q1, self.q2, self.q3];
        qs.iter().all(|q| !q.is_zero())
            && !qs[0].is_associate_of(&qs[1])
            && !qs[0].is_associate_of(&qs[2])
            && !qs[1].is_associate_of(&qs[2])
    }
}

fn require_unit(x: i64, p: i64, name: &str) -> Result<()> {
    if reduce(x, p) == 0 {
        return Err(Error::PreconditionFailed(format!(
            "{name} must be nonzero modulo {p}"
        )));
    }
    Ok(())
}

/// Deterministic point on `ax² + by² = 1`: scans `y = 0, 1, 2, …` and takes
/// the least `x` for the first `y` that admits one.
pub fn find_conic_point(a: i64, b: i64, p: i64) -> Result<ConicPoint> {
    require_prime(p)?;
    require_unit(a, p, "a")?;
    require_unit(b, p, "b")?;
    let (a, b) = (reduce(a, p), reduce(b, p));
    if p == 2 {
        return Ok(ConicPoint { x0: 1, y0: 0, a, b, p });
    }
    let a_inv = inv_raw(a, p)?;
    for y in 0..p {
        let rhs = mul_mod(reduce(1 - mul_mod(b, mul_mod(y, y, p), p), p), a_inv, p);
        if let Some(x) = sqrt_mod_p_unchecked(rhs, p) {
            return Ok(ConicPoint { x0: x, y0: y, a, b, p });
        }
    }
    // Every nondegenerate conic over F_p has a point.
    unreachable!("conic {a}x^2 + {b}y^2 = 1 over F_{p} has no point")
}

/// The parametrization of `ax² + by² = 1` through `pt`.
pub fn parametrize_conic(pt: &ConicPoint) -> Result<ConicParam> {
    let p = pt.p;
    require_odd_prime(p)?;
    require_unit(pt.a, p, "a")?;
    require_unit(pt.b, p, "b")?;
    if !pt.is_on_conic() {
        return Err(Error::PreconditionFailed(format!(
            "({}, {}) is not on {}x^2 + {}y^2 = 1 mod {p}",
            pt.x0, pt.y0, pt.a, pt.b
        )));
    }
    let (a, b, x0, y0) = (pt.a, pt.b, pt.x0, pt.y0);
    let m = |x: i64, y: i64| mul_mod(x, y, p);
    let q1 = Poly2::new(-m(a, x0), -2 * m(b, y0), m(b, x0), p);
    let q2 = Poly2::new(m(a, y0), -2 * m(a, x0), -m(b, y0), p);
    let q3 = Poly2::new(a, 0, b, p);
    let param = ConicParam { point: *pt, q1, q2, q3 };
    if !param.identity_holds() {
        return Err(Error::IdentityCheckFailed);
    }
    Ok(param)
}

/// Least `t` in F_p with `(f(t)/p) != -(g(t)/p)`.
pub fn separating_point(f: &Poly2, g: &Poly2) -> Option<i64> {
    let p = f.p;
    (0..p).find(|&t| legendre_unchecked(f.eval(t), p) != legendre_unchecked(g.eval(t), p).neg())
}

/// Sweep `t` and build `(f(t), √(f(t)g(t)), g(t), h(t))`.
fn sweep(f: &Poly2, g: &Poly2, h: &Poly2) -> Option<Quad> {
    let p = f.p;
    let t = separating_point(f, g)?;
    let (u, w) = (f.eval(t), g.eval(t));
    let v = sqrt_mod_p_unchecked(mul_mod(u, w, p), p)?;
    Some(Quad::new(u, v, w, h.eval(t)))
}

/// Nontrivial solution of `aU² + cW² = dZ²`, `UW = V²` over F_p, `p ∤ acd`.
///
/// The output is put in projective normal form and satisfies the original
/// system (not just the `d = 1` reduction).
pub fn solve_system_fp(a: i64, c: i64, d: i64, p: i64) -> Result<SolutionQuadruple> {
    solve_general_fp(&SystemCoeffs::diagonal(a, c, d)?, p)
}

/// Nontrivial solution of `aU² + bV² + cW² = dZ²`, `UW = V²` over F_p, for
/// odd `p ∤ acd(b² − 4ac)`, by completing the square.
pub fn solve_general_fp(coeffs: &SystemCoeffs, p: i64) -> Result<SolutionQuadruple> {
    require_odd_prime(p)?;
    require_unit(coeffs.a, p, "a")?;
    require_unit(coeffs.c, p, "c")?;
    require_unit(coeffs.d, p, "d")?;
    let disc = reduce((coeffs.discriminant() % p as i128) as i64, p);
    require_unit(disc, p, "b^2 - 4ac")?;

    let d_inv = inv_raw(coeffs.d, p)?;
    let a = mul_mod(coeffs.a, d_inv, p);
    let b = mul_mod(coeffs.b, d_inv, p);
    let c = mul_mod(coeffs.c, d_inv, p);
    // a X² + (c − b²/4a) Y² = Z², then X = q1 − (b/2a) q2.
    let inv_4a = inv_raw(4 * a, p)?;
    let c_prime = reduce(c - mul_mod(mul_mod(b, b, p), inv_4a, p), p);
    let pt = find_conic_point(a, c_prime, p)?;
    let param = parametrize_conic(&pt)?;
    let shift = mul_mod(b, inv_raw(2 * a, p)?, p);
    let q1 = param.q1.sub_scaled(shift, &param.q2);
    let quad = sweep(&q1, &param.q2, &param.q3)
        .expect("non-associate quadratics always have a separating point");
    let quad = canonical_form(&quad, p);
    debug_assert!(quad.satisfies_mod(coeffs, p) && !quad.is_zero_mod(p));
    Ok(SolutionQuadruple {
        quad,
        modulus: Modulus::Mod(p),
        classification: classify(&quad, coeffs, p, 1),
    })
}
