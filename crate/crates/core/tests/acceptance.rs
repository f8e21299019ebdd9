//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};

use hasse::conics::{find_conic_point, parametrize_conic, solve_system_fp};
use hasse::global::{certify_counterexample, fourth_power_obstruction, global_search_height};
use hasse::lifting::{lift_fourth_power_2adic, lift_rth_power};
use hasse::local::{
    brute_force_primitive_mod, decide_local, decide_p_local, fast_path_odd,
    primitive_solution_mod_prime_power, reduce_system, terminal_case, TerminalCase, Triple,
};
use hasse::modarith::{gcd, is_fourth_power_mod_p, mod_pow, pow_mod_raw, reduce, LiftRequest};
use hasse::padic::p_local_solve_general;
use hasse::primes::primes_up_to;
use hasse::quartic::BinaryForm;
use hasse::system::{Quad, SystemCoeffs};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(
        elapsed < limit,
        format!("took {:.2} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

const ODD_PRIMES: [i64; 5] = [3, 5, 7, 11, 13];

/// `unit · p^e` for `e ∈ {0, 1, 2}` and units in `[1, p)`: every residue
/// pattern of a nonzero coefficient modulo `p³`, up to units.
fn patterns(p: i64) -> Vec<i64> {
    (0..3u32)
        .flat_map(|e| (1..p).map(move |u| u * p.pow(e)))
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cert = certify_counterexample(17, 2)
        .map_err(err)?
        .certificate()
        .ok_or("(17, 2) was not certified")?;
    let c = cert.conditions;
    ensure(c.c1 && c.c2 && c.c3 && c.c4 && cert.obstruction, "certificate flags")?;
    let lr = SystemCoeffs::diagonal(1, -17, 2).map_err(err)?;
    let rep = decide_local(&lr).map_err(err)?;
    ensure(rep.locally_solvable && rep.real.solvable, "not locally solvable")?;
    let w = |p: i64| rep.verdict(p).and_then(|v| v.witness).map(|w| (w.quad, w.modulus));
    ensure(w(2) == Some((Quad::new(1, 1, 1, 0), 16)), format!("p = 2 witness {:?}", w(2)))?;
    ensure(w(17) == Some((Quad::new(6, 0, 0, 1), 17)), format!("p = 17 witness {:?}", w(17)))?;
    let hit = global_search_height(&lr, 1000).map_err(err)?;
    ensure(hit.is_none(), format!("integer solution {hit:?}"))?;
    ensure(fourth_power_obstruction(17, 2).map_err(err)?, "obstruction is false")?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "(17, 2) certified, witnesses (1,1,1,0) mod 16 and (6,0,0,1) mod 17, no solution of height <= 1000 ({:.2} s)",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let cert = certify_counterexample(17, 19)
        .map_err(err)?
        .certificate()
        .ok_or("(17, 19) was not certified")?;
    ensure(cert.conditions.c4, "condition 4 flag")?;
    ensure(is_fourth_power_mod_p(17, 19).map_err(err)?, "17 is not a fourth power mod 19")?;
    let e = cert
        .local
        .primes
        .iter()
        .find(|e| e.p == 19)
        .ok_or("no evidence at p = 19")?;
    ensure(
        e.system.satisfied_by(&e.witness, e.modulus),
        "p = 19 witness does not check",
    )?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "(17, 19) certified, 17 = {}^4 mod 19, witness {} mod {} ({:.2} s)",
        (1..19).find(|&x| pow_mod_raw(x, 4, 19) == 17).unwrap(),
        e.witness,
        e.modulus,
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_3() -> Outcome {
    let s = SystemCoeffs::diagonal(1, 3, 7).map_err(err)?;
    let m8 = brute_force_primitive_mod(&s, 8).map_err(err)?;
    ensure(m8 == Some(Quad::new(1, 1, 1, 2)), format!("mod 8 gave {m8:?}"))?;
    let m16 = brute_force_primitive_mod(&s, 16).map_err(err)?;
    ensure(m16.is_none(), format!("mod 16 gave {m16:?}"))?;
    let v = decide_p_local(1, 3, 7, 2).map_err(err)?;
    ensure(!v.solvable, "decided solvable at 2")?;
    Ok("(1,0,3,7): (1,1,1,2) mod 8, nothing mod 16, not 2-locally solvable".into())
}

/// Primitive solutions modulo `p⁴` of the normal form, memoized on the
/// normal form scaled so that `a = 1`.
struct Oracle {
    memo: HashMap<(i64, i64, i64, i64), bool>,
}

impl Oracle {
    fn solvable(&mut self, normal: &Triple, p: i64) -> Result<bool, String> {
        let m = p.pow(4);
        let (a, c, d) = normal.reduce(m);
        let inv = hasse::modarith::inverse_mod(a, m).map_err(err)?.value();
        let key = (p, 1, reduce((c as i128 * inv as i128 % m as i128) as i64, m), reduce((d as i128 * inv as i128 % m as i128) as i64, m));
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let scaled = Triple::new(1, key.2 as i128, key.3 as i128);
        let v = primitive_solution_mod_prime_power(&scaled, p, 4)
            .map_err(err)?
            .is_some();
        self.memo.insert(key, v);
        Ok(v)
    }
}

/// Literal reading: primitive solutions modulo `p, p², p³` of the normal form.
fn solvable_to_cube(normal: &Triple, p: i64) -> Result<bool, String> {
    for k in 1..=3 {
        if primitive_solution_mod_prime_power(normal, p, k).map_err(err)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut oracle = Oracle { memo: HashMap::new() };
    let mut checked = 0u64;
    let mut disagreements = Vec::new();
    let mut cube_disagreements = 0u64;
    let mut cube_cache: HashMap<(i64, Triple), bool> = HashMap::new();
    for p in ODD_PRIMES {
        let pats = patterns(p);
        for &a in &pats {
            for &c in &pats {
                for &d in &pats {
                    let verdict = decide_p_local(a, c, d, p).map_err(err)?.solvable;
                    let normal = reduce_system(a, c, d, p).map_err(err)?.normal;
                    let truth = oracle.solvable(&normal, p)?;
                    checked += 1;
                    if verdict != truth && disagreements.len() < 5 {
                        disagreements.push(format!("({a},{c},{d}) p={p}"));
                    }
                    let cube = match cube_cache.get(&(p, normal)) {
                        Some(&v) => v,
                        None => {
                            let v = solvable_to_cube(&normal, p)?;
                            cube_cache.insert((p, normal), v);
                            v
                        }
                    };
                    if cube != verdict {
                        cube_disagreements += 1;
                    }
                }
            }
        }
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    for _ in 0..500 {
        let p = ODD_PRIMES[rng.gen_range(0..ODD_PRIMES.len())];
        let mut big = || {
            let unit = loop {
                let u: i64 = rng.gen_range(1..1_000_000);
                if u % p != 0 {
                    break u;
                }
            };
            let sign = if rng.gen_bool(0.5) { -1 } else { 1 };
            sign * unit * p.pow(rng.gen_range(0..6))
        };
        let (a, c, d) = (big(), big(), big());
        let verdict = decide_p_local(a, c, d, p).map_err(err)?.solvable;
        let normal = reduce_system(a, c, d, p).map_err(err)?.normal;
        let truth = oracle.solvable(&normal, p)?;
        checked += 1;
        if verdict != truth && disagreements.len() < 5 {
            disagreements.push(format!("({a},{c},{d}) p={p}"));
        }
    }
    ensure(
        disagreements.is_empty(),
        format!("disagreements with the mod p^4 oracle: {disagreements:?}"),
    )?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "{checked} cases agree with primitive solvability mod p^4 of the normal form; \
         solvability mod p..p^3 alone disagrees on {cube_disagreements} pattern cases ({:.1} s)",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_5() -> Outcome {
    let mut seen = BTreeSet::new();
    let mut checked = 0u64;
    for p in ODD_PRIMES {
        let pats = patterns(p);
        for &a in &pats {
            for &c in &pats {
                for &d in &pats {
                    let v = decide_p_local(a, c, d, p).map_err(err)?;
                    let case = terminal_case(&v.transcript.normal, p).map_err(err)?;
                    let fast = fast_path_odd(&v.transcript.normal, p, case)
                        .ok_or_else(|| format!("no fast path for {case:?}"))?;
                    ensure(
                        fast == v.solvable,
                        format!("({a},{c},{d}) p={p} {case:?}: fast {fast}, decided {}", v.solvable),
                    )?;
                    seen.insert(format!("{case:?}"));
                    checked += 1;
                }
            }
        }
    }
    ensure(
        seen.len() == TerminalCase::ALL.len(),
        format!("case tags covered: {seen:?}"),
    )?;
    Ok(format!("{checked} cases, all {} case tags covered, zero disagreements", seen.len()))
}

fn criterion_6() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(6);
    let primes = primes_up_to(1000);
    let mut odd_checked = 0;
    while odd_checked < 10_000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let kmax = (1..).take_while(|&k| p.checked_pow(k).is_some_and(|m| m <= 1_000_000)).last().unwrap();
        let k = rng.gen_range(1..=kmax);
        let r: u32 = rng.gen_range(2..=6);
        if r as i64 % p == 0 {
            continue;
        }
        let m = p.pow(k);
        let x = rng.gen_range(1..p);
        let n = reduce(pow_mod_raw(x, r as u64, p) + p * rng.gen_range(0..m), m);
        let root = lift_rth_power(LiftRequest::new(n, r, p, k).map_err(err)?)
            .map_err(|e| format!("N={n} r={r} p={p} k={k}: {e}"))?;
        ensure(
            mod_pow(root.value(), r as u64, m).map_err(err)?.value() == n,
            format!("{}^{r} != {n} mod {m}", root.value()),
        )?;
        odd_checked += 1;
    }
    for _ in 0..10_000 {
        let k = rng.gen_range(1..=19u32);
        let m = 1i64 << k;
        let n = 1 + 16 * rng.gen_range(0..1_000_000i64);
        let root = lift_fourth_power_2adic(n, k).map_err(err)?;
        ensure(
            pow_mod_raw(root.value(), 4, m) == reduce(n, m),
            format!("{}^4 != {n} mod 2^{k}", root.value()),
        )?;
    }
    Ok("10000 r-th power lifts and 10000 2-adic fourth-root lifts re-verified".into())
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut params = 0u64;
    let mut solves = 0u64;
    for p in primes_up_to(31).into_iter().filter(|&p| p > 2) {
        for a in 1..p {
            for b in 1..p {
                let pt = find_conic_point(a, b, p).map_err(err)?;
                let par = parametrize_conic(&pt).map_err(err)?;
                ensure(
                    pt.is_on_conic() && par.identity_holds(),
                    format!("parametrization of ({a}, {b}) mod {p}"),
                )?;
                params += 1;
            }
        }
        for a in 1..p {
            for c in 1..p {
                for d in 1..p {
                    let s = SystemCoeffs::diagonal(a, c, d).map_err(err)?;
                    let sol = solve_system_fp(a, c, d, p).map_err(err)?;
                    ensure(
                        sol.quad.satisfies_mod(&s, p) && !sol.quad.is_zero_mod(p),
                        format!("({a},{c},{d}) mod {p}: {}", sol.quad),
                    )?;
                    solves += 1;
                }
            }
        }
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let primes: Vec<i64> = primes_up_to(997).into_iter().filter(|&p| p > 2).collect();
    for _ in 0..1000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let (a, c, d) = (rng.gen_range(1..p), rng.gen_range(1..p), rng.gen_range(1..p));
        let pt = find_conic_point(a, c, p).map_err(err)?;
        ensure(parametrize_conic(&pt).map_err(err)?.identity_holds(), "identity")?;
        let s = SystemCoeffs::diagonal(a, c, d).map_err(err)?;
        let sol = solve_system_fp(a, c, d, p).map_err(err)?;
        ensure(
            sol.quad.satisfies_mod(&s, p) && !sol.quad.is_zero_mod(p),
            format!("({a},{c},{d}) mod {p}"),
        )?;
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{params} parametrizations and {solves} systems exhaustively, 1000 random cases up to 997 ({:.1} s)",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(8);
    let mut solved = 0u64;
    let mut systems = 0;
    while systems < 100 {
        let mut r = || rng.gen_range(-10_000i64..=10_000);
        let (a, b, c, d) = (r(), r(), r(), r());
        let Ok(s) = SystemCoeffs::general(a, b, c, d) else { continue };
        systems += 1;
        for p in primes_up_to(97).into_iter().filter(|&p| p > 2) {
            let bad = [a, c, d].iter().any(|x| x % p == 0) || s.discriminant() % p as i128 == 0;
            if bad {
                continue;
            }
            let sol = p_local_solve_general(&s, p, 6).map_err(|e| format!("{s} p={p}: {e}"))?;
            ensure(sol.check(&s), format!("{s} p={p}: {}", sol.at(6)))?;
            let q = sol.at(6);
            ensure(q.satisfies_mod(&s, p.pow(6)), format!("{s} p={p}"))?;
            solved += 1;
        }
    }
    Ok(format!("{solved} p-adic solutions for 100 systems verified modulo p^6"))
}

fn criterion_9() -> Outcome {
    let f = BinaryForm::diagonal_quadratic(1, -2)
        .product(&BinaryForm::diagonal_quadratic(1, -17))
        .product(&BinaryForm::diagonal_quadratic(1, -34));
    let mut moduli = 0;
    for p in primes_up_to(10_000) {
        let mut m = p;
        while m <= 10_000 {
            let (x, y) = f
                .primitive_zero_mod(m)
                .map_err(err)?
                .ok_or_else(|| format!("no primitive zero modulo {m}"))?;
            ensure(
                f.eval_mod(x, y, m) == 0 && gcd(gcd(x, y), p) == 1,
                format!("bad zero ({x}, {y}) mod {m}"),
            )?;
            moduli += 1;
            m *= p;
        }
    }
    let z = f.integer_zero_height(1000).map_err(err)?;
    ensure(z.is_none(), format!("integer zero {z:?}"))?;
    Ok(format!(
        "primitive zeros modulo all {moduli} prime powers <= 10^4, no integer zero of height <= 1000"
    ))
}

fn criterion_10() -> Outcome {
    let mut coeffs = vec![0i128; 9];
    coeffs[0] = 1;
    coeffs[8] = -16;
    let f = BinaryForm::new(coeffs);
    for p in primes_up_to(100) {
        let z = f.primitive_zero_mod(p).map_err(err)?;
        ensure(z.is_some(), format!("no primitive zero modulo {p}"))?;
    }
    let z = f.primitive_zero_mod(32).map_err(err)?;
    ensure(z.is_none(), format!("primitive zero {z:?} modulo 32"))?;
    Ok("primitive zeros modulo every p <= 100, none modulo 32".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("counterexample (17, 2)", criterion_1),
        ("counterexample (17, 19)", criterion_2),
        ("(1, 0, 3, 7) at 2", criterion_3),
        ("odd-prime decision vs oracle", criterion_4),
        ("fast paths", criterion_5),
        ("lifting soundness", criterion_6),
        ("conics", criterion_7),
        ("general-b p-adic solutions", criterion_8),
        ("sextic product form", criterion_9),
        ("X^8 - 16Y^8", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
