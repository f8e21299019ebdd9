//! The quartic `aX⁴ + bX²Y² + cY⁴ = dZ²` and its link with the system.
//!
//! `(x, y, z) ↦ (x², xy, y², z)` sends quartic solutions to system solutions,
//! and a system solution `(u, v, w, z)` gives back `(u, v, zu)` or
//! `(v, w, zw)`. Modulo `p^k` primitivity survives both directions as long
//! as `p² ∤ d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::global::global_search_height;
use crate::local::{brute_force_primitive_mod_budget, real_solvable, BRUTE_FORCE_BUDGET};
use crate::modarith::{gcd, mul_mod, reduce, reduce_wide};
use crate::primes::{as_prime_power, require_prime};
use crate::system::{Classification, Modulus, Quad, SolutionQuadruple, SystemCoeffs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuarticTriple {
    pub x: i64,
    pub y: i64,
    pub z: i64,
    pub modulus: Modulus,
}

impl std::fmt::Display for QuarticTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)?;
        if let Modulus::Mod(m) = self.modulus {
            write!(f, " mod {m}")?;
        }
        Ok(())
    }
}

impl QuarticTriple {
    pub fn exact(x: i64, y: i64, z: i64) -> Self {
        QuarticTriple { x, y, z, modulus: Modulus::Exact }
    }

    pub fn modular(x: i64, y: i64, z: i64, m: i64) -> Self {
        QuarticTriple {
            x: reduce(x, m),
            y: reduce(y, m),
            z: reduce(z, m),
            modulus: Modulus::Mod(m),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self.modulus {
            Modulus::Exact => self.x == 0 && self.y == 0 && self.z == 0,
            Modulus::Mod(m) => [self.x, self.y, self.z].iter().all(|&t| reduce(t, m) == 0),
        }
    }

    pub fn is_primitive(&self) -> bool {
        match self.modulus {
            Modulus::Exact => !self.is_trivial(),
            Modulus::Mod(m) => gcd(gcd(gcd(self.x, self.y), self.z), m) == 1,
        }
    }

    /// `ax⁴ + bx²y² + cy⁴ = dz²`, exactly or modulo the stored modulus.
    pub fn satisfies(&self, coeffs: &SystemCoeffs) -> bool {
        match self.modulus {
            Modulus::Exact => quartic_exact(coeffs, self.x, self.y, self.z) == Some(0),
            Modulus::Mod(m) => quartic_residue(coeffs, self.x, self.y, self.z, m) == 0,
        }
    }
}

fn quartic_exact(s: &SystemCoeffs, x: i64, y: i64, z: i64) -> Option<i128> {
    let (x2, y2) = ((x as i128) * (x as i128), (y as i128) * (y as i128));
    (s.a as i128)
        .checked_mul(x2.checked_mul(x2)?)?
        .checked_add((s.b as i128).checked_mul(x2.checked_mul(y2)?)?)?
        .checked_add((s.c as i128).checked_mul(y2.checked_mul(y2)?)?)?
        .checked_sub((s.d as i128).checked_mul((z as i128) * (z as i128))?)
}

fn quartic_residue(s: &SystemCoeffs, x: i64, y: i64, z: i64, m: i64) -> i64 {
    let (x2, y2) = (mul_mod(x, x, m), mul_mod(y, y, m));
    reduce_wide(
        mul_mod(reduce(s.a, m), mul_mod(x2, x2, m), m) as i128
            + mul_mod(reduce(s.b, m), mul_mod(x2, y2, m), m) as i128
            + mul_mod(reduce(s.c, m), mul_mod(y2, y2, m), m) as i128
            - mul_mod(reduce(s.d, m), mul_mod(z, z, m), m) as i128,
        m,
    )
}

/// `(x, y, z) ↦ (x², xy, y², z)`.
pub fn quartic_to_system(t: &QuarticTriple) -> Result<SolutionQuadruple> {
    if t.is_trivial() {
        return Err(Error::TrivialInput);
    }
    let quad = match t.modulus {
        Modulus::Exact => {
            let sq = |a: i64, b: i64| {
                a.checked_mul(b).ok_or(Error::Overflow("squaring a quartic coordinate"))
            };
            Quad::new(sq(t.x, t.x)?, sq(t.x, t.y)?, sq(t.y, t.y)?, t.z)
        }
        Modulus::Mod(m) => Quad::new(
            mul_mod(t.x, t.x, m),
            mul_mod(t.x, t.y, m),
            mul_mod(t.y, t.y, m),
            reduce(t.z, m),
        ),
    };
    let classification = match t.modulus {
        Modulus::Mod(m) if quad.is_primitive_mod(m) => Classification::Primitive,
        _ => Classification::Nontrivial,
    };
    Ok(SolutionQuadruple {
        quad,
        modulus: t.modulus,
        classification,
    })
}

/// `(u, v, zu)` if admissible, else `(v, w, zw)`.
///
/// Exact inputs need only be nontrivial. Modulo `p^k` the image is primitive,
/// which requires `p² ∤ d`.
pub fn system_to_quartic(s: &SolutionQuadruple, coeffs: &SystemCoeffs) -> Result<QuarticTriple> {
    let q = s.quad;
    match s.modulus {
        Modulus::Exact => {
            if q.is_zero() {
                return Err(Error::TrivialInput);
            }
            if !q.satisfies_exact(coeffs) {
                return Err(Error::NotASolution(format!("{q} does not solve {coeffs}")));
            }
            let mul = |a: i64, b: i64| {
                a.checked_mul(b).ok_or(Error::Overflow("scaling z"))
            };
            if q.u != 0 {
                Ok(QuarticTriple::exact(q.u, q.v, mul(q.z, q.u)?))
            } else if q.w != 0 {
                Ok(QuarticTriple::exact(q.v, q.w, mul(q.z, q.w)?))
            } else {
                // u = w = 0 forces v = 0 and dz² = 0.
                Err(Error::TrivialInput)
            }
        }
        Modulus::Mod(m) => {
            let (p, _) = as_prime_power(m).ok_or_else(|| {
                Error::PreconditionFailed(format!("{m} is not a prime power"))
            })?;
            if q.is_zero_mod(m) {
                return Err(Error::TrivialInput);
            }
            if !q.satisfies_mod(coeffs, m) {
                return Err(Error::NotASolution(format!("{q} does not solve {coeffs} modulo {m}")));
            }
            if !q.is_primitive_mod(m) {
                return Err(Error::PreconditionFailed(format!(
                    "{q} is not primitive modulo {m}"
                )));
            }
            if (coeffs.d as i128) % ((p * p) as i128) == 0 {
                return Err(Error::NoPrimitiveImage);
            }
            let unit = |x: i64| reduce(x, p) != 0;
            if unit(q.u) {
                Ok(QuarticTriple::modular(q.u, q.v, mul_mod(q.z, q.u, m), m))
            } else if unit(q.w) {
                Ok(QuarticTriple::modular(q.v, q.w, mul_mod(q.z, q.w, m), m))
            } else {
                Err(Error::NoPrimitiveImage)
            }
        }
    }
}

/// Where solvability is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Integer solutions with coordinates bounded by `height`.
    Exact { height: i64 },
    Real,
    Fp { p: i64 },
    ModPk { p: i64, k: u32 },
}

/// Solvability of the system and the quartic over one domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferRecord {
    pub coeffs: [i64; 4],
    pub domain: Domain,
    pub system_solvable: bool,
    pub quartic_solvable: bool,
    pub system_witness: Option<Quad>,
    pub quartic_witness: Option<QuarticTriple>,
    /// Image of each witness under the translation maps, re-verified.
    pub system_from_quartic: Option<Quad>,
    pub quartic_from_system: Option<QuarticTriple>,
}

impl TransferRecord {
    pub fn equivalent(&self) -> bool {
        self.system_solvable == self.quartic_solvable
    }
}

/// Compare solvability of the system and the quartic for raw `(a, b, c, d)`.
///
/// `d = 0` is accepted: both sides then have the obvious solution
/// `(0, 0, 0, 1)` resp. `(0, 0, 1)`.
pub fn transfer_verdict(raw: [i64; 4], domain: Domain) -> Result<TransferRecord> {
    let [a, b, c, d] = raw;
    let mut rec = TransferRecord {
        coeffs: raw,
        domain,
        system_solvable: false,
        quartic_solvable: false,
        system_witness: None,
        quartic_witness: None,
        system_from_quartic: None,
        quartic_from_system: None,
    };
    let modulus = match domain {
        Domain::Exact { .. } | Domain::Real => Modulus::Exact,
        Domain::Fp { p } => {
            require_prime(p)?;
            Modulus::Mod(p)
        }
        Domain::ModPk { p, k } => {
            require_prime(p)?;
            if k < 2 {
                return Err(Error::PreconditionFailed("mod p^k comparison needs k > 1".into()));
            }
            if d != 0 && d % (p * p) == 0 {
                return Err(Error::PreconditionFailed(format!("{p}² divides d = {d}")));
            }
            Modulus::Mod(crate::modarith::prime_power(p, k)?)
        }
    };
    if d == 0 {
        rec.system_solvable = true;
        rec.quartic_solvable = true;
        rec.system_witness = Some(Quad::new(0, 0, 0, 1));
        rec.quartic_witness = Some(QuarticTriple { x: 0, y: 0, z: 1, modulus });
        return Ok(rec);
    }
    let coeffs = SystemCoeffs::new(a, b, c, d)?;
    match domain {
        Domain::Real => {
            let sys = real_solvable(&coeffs);
            rec.system_solvable = sys.solvable;
            rec.quartic_solvable = quartic_real_solvable(&coeffs);
            return Ok(rec);
        }
        Domain::Exact { height } => {
            rec.system_witness = global_search_height(&coeffs, height)?;
            rec.quartic_witness = quartic_search_height(&coeffs, height)?;
        }
        Domain::Fp { p } => {
            rec.system_witness = brute_force_primitive_mod_budget(&coeffs, p, BRUTE_FORCE_BUDGET)?;
            rec.quartic_witness = quartic_primitive_mod(&coeffs, p)?;
        }
        Domain::ModPk { .. } => {
            let Modulus::Mod(m) = modulus else { unreachable!() };
            rec.system_witness = brute_force_primitive_mod_budget(&coeffs, m, BRUTE_FORCE_BUDGET)?;
            rec.quartic_witness = quartic_primitive_mod(&coeffs, m)?;
        }
    }
    if let Some(q) = rec.system_witness {
        let s = SolutionQuadruple {
            quad: q,
            modulus,
            classification: Classification::Primitive,
        };
        let image = system_to_quartic(&s, &coeffs)?;
        debug_assert!(image.satisfies(&coeffs));
        rec.quartic_from_system = Some(image);
    }
    if let Some(t) = rec.quartic_witness {
        let image = quartic_to_system(&t)?.quad;
        let ok = match modulus {
            Modulus::Exact => image.satisfies_exact(&coeffs),
            Modulus::Mod(m) => image.satisfies_mod(&coeffs, m) && image.is_primitive_mod(m),
        };
        if !ok {
            return Err(Error::IdentityCheckFailed);
        }
        rec.system_from_quartic = Some(image);
    }
    rec.system_solvable = rec.system_witness.is_some() || rec.system_from_quartic.is_some();
    rec.quartic_solvable = rec.quartic_witness.is_some() || rec.quartic_from_system.is_some();
    Ok(rec)
}

/// Real solutions of the quartic: `d·(a + bs + cs²) ≥ 0` for some `s ≥ 0`,
/// or `d·c ≥ 0` at `X = 0`.
pub fn quartic_real_solvable(s: &SystemCoeffs) -> bool {
    let (a, b, c, d) = (s.a as i128, s.b as i128, s.c as i128, s.d as i128);
    if d * a >= 0 || d * c >= 0 {
        return true;
    }
    // d·c < 0: d·g(s) is a downward parabola; its vertex is at s = −b/2c.
    // Max of d·g over s > 0 is at the vertex when −b/2c > 0, i.e. bc < 0,
    // where d·g = d·(4ac − b²)/4c ≥ 0 ⇔ b² − 4ac ≥ 0 (since dc < 0).
    b * c < 0 && b * b - 4 * a * c >= 0
}

/// Lexicographically least primitive `(x, y, z)` modulo `m` (full scan).
pub fn quartic_primitive_mod(s: &SystemCoeffs, m: i64) -> Result<Option<QuarticTriple>> {
    crate::modarith::check_modulus(m)?;
    if m > 2_000 {
        return Err(Error::BudgetExceeded {
            what: format!("quartic scan modulo {m}"),
            limit: 2_000,
        });
    }
    let d = reduce(s.d, m);
    let mut roots: Vec<Vec<i64>> = vec![Vec::new(); m as usize];
    for z in 0..m {
        roots[mul_mod(d, mul_mod(z, z, m), m) as usize].push(z);
    }
    for x in 0..m {
        for y in 0..m {
            let r = quartic_residue(s, x, y, 0, m);
            let g = gcd(gcd(x, y), m);
            if let Some(&z) = roots[r as usize].iter().find(|&&z| gcd(g, z) == 1) {
                return Ok(Some(QuarticTriple::modular(x, y, z, m)));
            }
        }
    }
    Ok(None)
}

/// Least primitive integer solution `(x, y, z)` with `x, y ≥ 0`, `z ≥ 0`,
/// `max(x, y) ≤ h`.
pub fn quartic_search_height(s: &SystemCoeffs, h: i64) -> Result<Option<QuarticTriple>> {
    if !(0..=crate::global::HEIGHT_BUDGET).contains(&h) {
        return Err(Error::BudgetExceeded {
            what: format!("quartic height search up to {h}"),
            limit: crate::global::HEIGHT_BUDGET as i128,
        });
    }
    for x in 0..=h {
        for y in 0..=h {
            if x == 0 && y == 0 {
                continue;
            }
            let Some(f) = quartic_exact(s, x, y, 0) else { continue };
            let d = s.d as i128;
            if f % d != 0 || f / d < 0 {
                continue;
            }
            let Some(z) = exact_sqrt(f / d) else { continue };
            let Ok(z) = i64::try_from(z) else { continue };
            if gcd(gcd(x, y), z) == 1 {
                return Ok(Some(QuarticTriple::exact(x, y, z)));
            }
        }
    }
    Ok(None)
}

fn exact_sqrt(n: i128) -> Option<i128> {
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

/// A binary form `Σ cᵢ X^{n−i} Yⁱ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryForm {
    pub coeffs: Vec<i128>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<i128>) -> Self {
        BinaryForm { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `X² + kY²`-style quadratic factor `c₀X² + c₂Y²`.
    pub fn diagonal_quadratic(c0: i128, c2: i128) -> Self {
        BinaryForm::new(vec![c0, 0, c2])
    }

    pub fn product(&self, other: &BinaryForm) -> BinaryForm {
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        BinaryForm::new(out)
    }

    pub fn eval_mod(&self, x: i64, y: i64, m: i64) -> i64 {
        let n = self.degree();
        let (x, y) = (reduce(x, m), reduce(y, m));
        let mut xp = vec![1i64; n + 1];
        let mut yp = vec![1i64; n + 1];
        for i in 1..=n {
            xp[i] = mul_mod(xp[i - 1], x, m);
            yp[i] = mul_mod(yp[i - 1], y, m);
        }
        let mut acc = 0i128;
        for (i, &c) in self.coeffs.iter().enumerate() {
            let c = reduce_wide(c, m);
            acc += mul_mod(c, mul_mod(xp[n - i], yp[i], m), m) as i128;
        }
        reduce_wide(acc, m)
    }

    pub fn eval_exact(&self, x: i64, y: i64) -> Option<i128> {
        let n = self.degree() as u32;
        let mut acc = 0i128;
        for (i, &c) in self.coeffs.iter().enumerate() {
            let i = i as u32;
            let t = (x as i128)
                .checked_pow(n - i)?
                .checked_mul((y as i128).checked_pow(i)?)?
                .checked_mul(c)?;
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }

    /// Some `(x, y)` with `gcd(x, y, m) = 1` and `F(x, y) ≡ 0 (mod m)`.
    ///
    /// Prime powers are scanned projectively over `(1, t)` and `(pt, 1)`;
    /// other moduli get a full scan.
    pub fn primitive_zero_mod(&self, m: i64) -> Result<Option<(i64, i64)>> {
        crate::modarith::check_modulus(m)?;
        if let Some((p, _)) = as_prime_power(m) {
            if m > 10_000_000 {
                return Err(Error::BudgetExceeded {
                    what: format!("binary form scan modulo {m}"),
                    limit: 10_000_000,
                });
            }
            if let Some(t) = (0..m).find(|&t| self.eval_mod(1, t, m) == 0) {
                return Ok(Some((1, t)));
            }
            return Ok((0..m)
                .step_by(p as usize)
                .find(|&x| self.eval_mod(x, 1, m) == 0)
                .map(|x| (x, 1)));
        }
        if m > 5_000 {
            return Err(Error::BudgetExceeded {
                what: format!("binary form scan modulo {m}"),
                limit: 5_000,
            });
        }
        for x in 0..m {
            for y in 0..m {
                if gcd(gcd(x, y), m) == 1 && self.eval_mod(x, y, m) == 0 {
                    return Ok(Some((x, y)));
                }
            }
        }
        Ok(None)
    }

    /// Some coprime `(x, y) ≠ (0, 0)` with `|x|, |y| ≤ h` and `F(x, y) = 0`.
    pub fn integer_zero_height(&self, h: i64) -> Result<Option<(i64, i64)>> {
        if !(0..=crate::global::HEIGHT_BUDGET).contains(&h) {
            return Err(Error::BudgetExceeded {
                what: format!("binary form search up to {h}"),
                limit: crate::global::HEIGHT_BUDGET as i128,
            });
        }
        for y in 0..=h {
            for x in -h..=h {
                if gcd(x, y) != 1 {
                    continue;
                }
                match self.eval_exact(x, y) {
                    Some(0) => return Ok(Some((x, y))),
                    Some(_) => {}
                    None => return Err(Error::Overflow("evaluating a binary form")),
                }
            }
        }
        Ok(None)
    }
}
