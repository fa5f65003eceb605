//! Acceptance criteria, one line of output per criterion.
//!
//! Runs without the libtest harness so the verdict lines always reach the
//! console. Exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use goldman_core::chain::{
    c_exponent_budget, cn_generator, gn_conjugate, gn_mul, project_gn, separation_bound,
    separation_level, GnElement,
};
use goldman_core::ideals_int::{
    ideal_check_exhaustive, ideal_check_sampled, ik_family, prop_divisibility_exhaustive,
    table_from_mask, table_rule_agreement, ExponentBox, GeometricSubmodule,
};
use goldman_core::ideals_rat::{
    classify_closed_check, contains, ideal_closure, primitive_bracket_identity_check,
    ClosedForm, PrimitiveLabel, RationalIdeal,
};
use goldman_core::liealg::{bracket, jacobiator};
use goldman_core::sampling::{self, SampleCoefficient, SeededRng};
use goldman_core::scalar::pow2;
use goldman_core::selftest::{random_ideal_generators, round_trip_holds};
use goldman_core::{Integer, ModuleElement, Monomial, Rational, SurfaceSignature, Word};
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

type Verdict = Result<String, String>;

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(elapsed.as_secs() < limit_secs, || {
        format!("took {:.1}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

fn surfaces() -> Vec<SurfaceSignature> {
    vec![
        SurfaceSignature::closed(1).unwrap(),
        SurfaceSignature::closed(2).unwrap(),
        SurfaceSignature::with_boundary(1, 2).unwrap(),
    ]
}

// Independent oracle: exponent sums and the pairing computed from scratch
// with machine integers.

fn oracle_exponents(w: &Word, rank: usize) -> Vec<i64> {
    let mut v = vec![0i64; rank];
    for l in w.letters() {
        v[l.gen - 1] += i64::try_from(&l.exp).unwrap();
    }
    v
}

fn oracle_pair(genus: usize, x: &[i64], y: &[i64]) -> i64 {
    (0..genus)
        .map(|t| x[2 * t] * y[2 * t + 1] - x[2 * t + 1] * y[2 * t])
        .sum()
}

type OracleElement = BTreeMap<Vec<i64>, i64>;

fn oracle_bracket(genus: usize, u: &OracleElement, v: &OracleElement) -> OracleElement {
    let mut out = OracleElement::new();
    for (x, a) in u {
        for (y, b) in v {
            let p = oracle_pair(genus, x, y);
            let xy: Vec<i64> = x.iter().zip(y).map(|(s, t)| s + t).collect();
            *out.entry(xy).or_default() += p * a * b;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn to_oracle(u: &ModuleElement<Integer>) -> OracleElement {
    u.iter()
        .map(|(m, c)| {
            (
                m.exps().iter().map(|e| i64::try_from(e).unwrap()).collect(),
                i64::try_from(c).unwrap(),
            )
        })
        .collect()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let sigs = surfaces();
    let failures: usize = (0..10u64)
        .into_par_iter()
        .map(|chunk| {
            let mut r = sampling::rng(1, chunk);
            let mut bad = 0;
            for i in 0..1000 {
                let sig = &sigs[i % sigs.len()];
                let n = sig.rank();
                if i % 2 == 0 {
                    let u = sampling::element::<Integer>(&mut r, n, 4, 4, 9);
                    let v = sampling::element::<Integer>(&mut r, n, 4, 4, 9);
                    let sum = &bracket(sig, &u, &v).unwrap() + &bracket(sig, &v, &u).unwrap();
                    let oracle = oracle_bracket(sig.genus(), &to_oracle(&u), &to_oracle(&v));
                    if !sum.is_zero() || to_oracle(&bracket(sig, &u, &v).unwrap()) != oracle {
                        bad += 1;
                    }
                } else {
                    let u = sampling::element::<Rational>(&mut r, n, 4, 4, 9);
                    let v = sampling::element::<Rational>(&mut r, n, 4, 4, 9);
                    let sum = &bracket(sig, &u, &v).unwrap() + &bracket(sig, &v, &u).unwrap();
                    if !sum.is_zero() {
                        bad += 1;
                    }
                }
                if i < 100 {
                    let t: Vec<_> = (0..3)
                        .map(|_| sampling::element::<Integer>(&mut r, n, 4, 4, 9))
                        .collect();
                    if !jacobiator(sig, &t[0], &t[1], &t[2]).unwrap().is_zero() {
                        bad += 1;
                    }
                }
            }
            bad
        })
        .sum();
    ensure(failures == 0, || format!("{failures} identity failures"))?;
    within(start.elapsed(), 10)?;
    Ok(format!(
        "antisymmetry on 10^4 pairs and Jacobi on 10^3 triples ({:.2}s)",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_2() -> Verdict {
    let mut r = sampling::rng(2, 0);
    let sigs = surfaces();
    for i in 0..10_000 {
        let sig = &sigs[i % sigs.len()];
        let n = sig.rank();
        let ws: Vec<Word> = (0..4).map(|_| sampling::word(&mut r, n, 6, 4)).collect();
        let m = |a: &Word, b: &Word| sig.intersection_pairing(a, b).unwrap();
        let u = ws[0].concat(&ws[1]).unwrap();
        let v = ws[2].concat(&ws[3]).unwrap();
        let whole = m(&u, &v);
        let split = m(&ws[0], &ws[2]) + m(&ws[0], &ws[3]) + m(&ws[1], &ws[2]) + m(&ws[1], &ws[3]);
        let oracle = oracle_pair(sig.genus(), &oracle_exponents(&u, n), &oracle_exponents(&v, n));
        ensure(whole == split && whole == Integer::from(oracle), || {
            format!("decomposition fails for {:?}", ws.iter().map(ToString::to_string).collect::<Vec<_>>())
        })?;
    }
    // generator table: <a_{2t-1}, a_{2t}> = 1, every other distinct pair 0
    for sig in [
        SurfaceSignature::closed(3).unwrap(),
        SurfaceSignature::with_boundary(2, 3).unwrap(),
    ] {
        let n = sig.rank();
        for i in 1..=n {
            for j in 1..=n {
                let expected = if i % 2 == 1 && j == i + 1 && j <= 2 * sig.genus() {
                    1
                } else if j % 2 == 1 && i == j + 1 && i <= 2 * sig.genus() {
                    -1
                } else {
                    0
                };
                let got = sig
                    .intersection_pairing(&Word::generator(i, n).unwrap(), &Word::generator(j, n).unwrap())
                    .unwrap();
                ensure(got == Integer::from(expected), || format!("m(a{i}, a{j}) = {got} on {sig}"))?;
            }
        }
    }
    Ok("four-term decomposition on 10^4 splittings; generator table matches".into())
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut r = sampling::rng(3, 0);
    let mut cases = Vec::new();
    for i in 0..20 {
        let sig = SurfaceSignature::closed(1 + i % 2).unwrap();
        let n = sig.rank();
        let k: Vec<Monomial> = (0..r.random_range(0..=4)).map(|_| sampling::monomial(&mut r, n, 10)).collect();
        cases.push((sig, k, r.random::<u64>()));
    }
    let failures: Vec<String> = cases
        .par_iter()
        .filter_map(|(sig, k, seed)| {
            let n = sig.rank();
            let sub = GeometricSubmodule::ik(n, k.clone()).unwrap();
            let out = ideal_check_sampled(sig, &sub, ExponentBox::new(n, 10), 10_000, *seed).unwrap();
            (!out.holds || out.checked != 10_000).then(|| format!("I_K rejected for K={k:?} on {sig}"))
        })
        .collect();
    ensure(failures.is_empty(), || failures.join("; "))?;

    let torus = SurfaceSignature::closed(1).unwrap();
    let bx = ExponentBox::new(2, 10);
    let corrupted = GeometricSubmodule::table(
        bx,
        Integer::one(),
        [
            (Monomial::from_ints(&[1, 0]), Integer::from(2)),
            (Monomial::from_ints(&[1, 1]), Integer::from(3)),
        ],
    )
    .unwrap();
    let out = ideal_check_sampled(&torus, &corrupted, bx, 10_000, 7).unwrap();
    let cx = out.counterexample.clone().ok_or("corrupted table accepted")?;
    // oracle: bracket the generator alpha(v)·v with w and test the coefficient
    let alpha = |m: &Monomial| corrupted.alpha(m).unwrap();
    let v = oracle_exponents_of(&cx.first);
    let w = oracle_exponents_of(&cx.second);
    let coef = Integer::from(oracle_pair(1, &v, &w)) * alpha(&cx.first);
    let vw = Monomial::from_ints(&[v[0] + w[0], v[1] + w[1]]);
    let escapes = !(coef.clone() % alpha(&vw)).is_zero();
    ensure(!out.holds && escapes, || format!("reported pair {cx:?} is not a real violation"))?;
    Ok(format!(
        "20 random I_K accepted; corrupted table refuted by ({}, {}) ({:.2}s)",
        cx.first,
        cx.second,
        start.elapsed().as_secs_f64()
    ))
}

fn oracle_exponents_of(m: &Monomial) -> Vec<i64> {
    m.exps().iter().map(|e| i64::try_from(e).unwrap()).collect()
}

/// Both criteria written out directly over a table on `[-2,2]^2`, indexed
/// lexicographically, with `alpha = 1 + bit`.
fn oracle_criteria(mask: u32) -> (bool, bool) {
    let idx = |x: i64, y: i64| -> Option<usize> {
        ((-2..=2).contains(&x) && (-2..=2).contains(&y)).then(|| ((x + 2) * 5 + (y + 2)) as usize)
    };
    let alpha = |i: usize| 1 + ((mask >> i) & 1) as i64;
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
    let (mut closure, mut pair_gcd) = (true, true);
    for v in 0..25 {
        let (vx, vy) = (v as i64 / 5 - 2, v as i64 % 5 - 2);
        for w in 0..25 {
            let (wx, wy) = (w as i64 / 5 - 2, w as i64 % 5 - 2);
            if let Some(p) = idx(vx + wx, vy + wy) {
                let rhs = (vx * wy - vy * wx) * alpha(v);
                if rhs % alpha(p) != 0 {
                    closure = false;
                }
            }
            let f = gcd(vx, vy) * gcd(wx, wy);
            if (alpha(w) * f) % alpha(v) != 0 {
                pair_gcd = false;
            }
        }
    }
    (closure, pair_gcd)
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let torus = SurfaceSignature::closed(1).unwrap();
    let bx = ExponentBox::new(2, 2);
    let values = [Integer::one(), Integer::from(2)];
    let report = table_rule_agreement(&torus, bx, values.clone()).unwrap();
    let enumerated = start.elapsed();

    // spot-check the compiled enumeration against direct checks and the oracle
    let mut r = sampling::rng(4, 0);
    let mut masks: Vec<u64> = (0..300).map(|_| r.random_range(0..report.rules)).collect();
    masks.extend([0, report.rules - 1]);
    let mut closure_hits = 0u64;
    for &mask in &masks {
        let table = table_from_mask(bx, &values, mask).unwrap();
        let direct_closure = ideal_check_exhaustive(&torus, &table, bx).unwrap().holds;
        let direct_gcd = prop_divisibility_exhaustive(&torus, &table, bx).unwrap().holds;
        let (oc, og) = oracle_criteria(mask as u32);
        ensure(direct_closure == oc && direct_gcd == og, || format!("oracle disagrees on mask {mask}"))?;
        closure_hits += direct_closure as u64;
    }
    ensure(report.rules == 1 << 25, || "wrong rule count".into())?;
    ensure(report.disagreements == 0, || {
        format!(
            "{} of {} rules disagree; first mask {:?}",
            report.disagreements, report.rules, report.first_disagreement
        )
    })?;
    within(enumerated, 60)?;
    Ok(format!(
        "all {} table rules agree ({} accepted by both; {} spot checks, {} accepted) in {:.1}s",
        report.rules,
        report.closure_accepts,
        masks.len(),
        closure_hits,
        enumerated.as_secs_f64()
    ))
}

fn criterion_5() -> Verdict {
    let mut r = sampling::rng(5, 0);
    let mut starts = vec![(SurfaceSignature::closed(1).unwrap(), vec![Monomial::from_ints(&[1, 0])])];
    for _ in 0..3 {
        let sig = SurfaceSignature::closed(2).unwrap();
        let k0 = (0..2).map(|_| sampling::monomial(&mut r, 4, 3)).collect();
        starts.push((sig, k0));
    }
    for (sig, k0) in &starts {
        let n = sig.rank();
        let family = ik_family(n, k0.clone(), 5).unwrap();
        ensure(family.len() == 5, || "family size".into())?;
        for i in 0..5 {
            for j in 0..i {
                ensure(family[i] != family[j], || format!("members {j} and {i} coincide"))?;
                // distinct as submodules: some monomial has a different alpha
                let added: Vec<&Monomial> = family[i]
                    .exceptions()
                    .unwrap()
                    .difference(family[j].exceptions().unwrap())
                    .collect();
                ensure(
                    added.iter().any(|m| family[i].alpha(m).unwrap() != family[j].alpha(m).unwrap()),
                    || format!("members {j} and {i} have equal alpha"),
                )?;
            }
        }
        for (i, sub) in family.iter().enumerate() {
            for k in k0 {
                for mult in [-3i64, -1, 1, 2, 7] {
                    let u = ModuleElement::term(k.clone(), Integer::from(mult));
                    ensure(sub.contains(&u).unwrap(), || format!("member {i} misses {mult}·{k}"))?;
                }
            }
            let out = ideal_check_sampled(sig, sub, ExponentBox::new(n, 10), 10_000, 50 + i as u64).unwrap();
            ensure(out.holds, || format!("member {i} fails the ideal check: {:?}", out.counterexample))?;
        }
    }
    Ok(format!("{} families of 5 distinct ideals containing span(K0)", starts.len()))
}

fn noncentral(r: &mut SeededRng, sig: &SurfaceSignature) -> Monomial {
    loop {
        let x = sampling::monomial(r, sig.rank(), 4);
        if !sig.is_central(&x) {
            return x;
        }
    }
}

fn random_label(r: &mut SeededRng, sig: &SurfaceSignature) -> PrimitiveLabel {
    let g2 = 2 * sig.genus();
    let pairs: Vec<(Monomial, Rational)> = (0..r.random_range(1..=3))
        .map(|_| {
            let mut e = vec![0i64; sig.rank()];
            for x in e.iter_mut().skip(g2) {
                *x = r.random_range(-2..=2);
            }
            (Monomial::from_ints(&e), Rational::sample_nonzero(r, 5))
        })
        .collect();
    PrimitiveLabel::new(sig, pairs).unwrap_or_else(|_| PrimitiveLabel::trivial(sig.rank()))
}

fn criterion_6() -> Verdict {
    let mut r = sampling::rng(6, 0);
    let sigs = [
        SurfaceSignature::closed(1).unwrap(),
        SurfaceSignature::with_boundary(1, 2).unwrap(),
        SurfaceSignature::with_boundary(1, 3).unwrap(),
        SurfaceSignature::with_boundary(2, 2).unwrap(),
    ];
    for i in 0..1000 {
        let sig = &sigs[i % sigs.len()];
        let label = random_label(&mut r, sig);
        let x = noncentral(&mut r, sig);
        let y = sampling::monomial(&mut r, sig.rank(), 4);
        ensure(primitive_bracket_identity_check(sig, &label, &x, &y).unwrap(), || {
            format!("bracket identity fails: {label} {x} {y}")
        })?;
    }
    for i in 0..1000 {
        let sig = &sigs[i % sigs.len()];
        let label = random_label(&mut r, sig);
        let x = noncentral(&mut r, sig);
        let ideal = ideal_closure(sig, &[label.apply(&x)]).unwrap();
        let y = noncentral(&mut r, sig);
        let k = Rational::sample_nonzero(&mut r, 9);
        ensure(contains(sig, &ideal, &label.apply(&y).scale(&k)).unwrap(), || {
            format!("closure of f({x}) misses f({y}) for {label}")
        })?;
    }
    Ok("bracket identity on 10^3 triples; closure of one f-term holds f(y) for 10^3 y".into())
}

fn criterion_7() -> Verdict {
    for g in [1, 2] {
        let sig = SurfaceSignature::closed(g).unwrap();
        ensure(classify_closed_check(&sig, 500, 70 + g as u64).unwrap(), || {
            format!("a closure on genus {g} has an unexpected form")
        })?;
        // all single-monomial generators in a small box, exhaustively
        for x in ExponentBox::new(sig.rank(), 1).points() {
            let form = ideal_closure(&sig, &[ModuleElement::monomial(x.clone())]).unwrap().closed_form();
            let expected = if x.is_identity() { ClosedForm::Identity } else { ClosedForm::NonIdentity };
            ensure(form == Some(expected), || format!("closure of {x} is {form:?}"))?;
        }
    }
    Ok("every sampled closure on genus 1 and 2 is Q[e], Q[A \\ e] or Q[A]".into())
}

fn criterion_8() -> Verdict {
    let mut r = sampling::rng(8, 0);
    let sigs = [
        SurfaceSignature::with_boundary(1, 2).unwrap(),
        SurfaceSignature::with_boundary(1, 3).unwrap(),
    ];
    let mut nontrivial = 0;
    for i in 0..200 {
        let sig = &sigs[i % 2];
        let (_, gens, extra) = random_ideal_generators(&mut r, sig);
        ensure(round_trip_holds(sig, &gens, &extra), || format!("round trip fails for generators {gens:?}"))?;
        let ideal = ideal_closure(sig, &gens).unwrap();
        // one f-term per canonical label plus the central basis regenerates it
        let mut canonical_gens: Vec<_> = ideal
            .labels()
            .iter()
            .map(|l| l.apply(&noncentral(&mut r, sig)))
            .collect();
        canonical_gens.extend(ideal.central_basis().iter().cloned());
        ensure(ideal_closure(sig, &canonical_gens).unwrap() == ideal, || "canonical data do not regenerate".into())?;
        ensure(RationalIdeal::from_json(&ideal.to_json()).unwrap() == ideal, || "JSON round trip".into())?;
        nontrivial += (!ideal.labels().is_empty() && !ideal.central_basis().is_empty()) as usize;
    }
    Ok(format!("200 random ideals reconstruct exactly ({nontrivial} with both parts nonzero)"))
}

fn criterion_9() -> Verdict {
    let start = Instant::now();
    const RANK: usize = 3;
    let words = |r: &mut SeededRng| sampling::word(r, RANK, 10, 12);
    let problems: Vec<String> = (0..10u64)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut r = sampling::rng(9, chunk);
            let mut bad = Vec::new();
            for _ in 0..1000 {
                let (u, v) = (words(&mut r), words(&mut r));
                let uv = u.concat(&v).unwrap();
                for n in 0..=6 {
                    let p = |w: &Word| project_gn(w, n, 1).unwrap();
                    if gn_mul(&p(&u), &p(&v)).unwrap() != p(&uv) {
                        bad.push(format!("homomorphism fails at level {n} for {u} | {v}"));
                    }
                }
                // kernel nesting, on words likely to die somewhere
                let mut w = Word::identity(RANK);
                for _ in 0..r.random_range(1..=3) {
                    let g = sampling::word(&mut r, RANK, 3, 3);
                    let e = pow2(r.random_range(0..=6)) * Integer::from(r.random_range(-2i64..=2));
                    let c = Word::reduce(RANK, [(1, e)]).unwrap();
                    w = w.concat(&c.conjugate_by(&g).unwrap()).unwrap();
                }
                for n in 0..=5 {
                    if project_gn(&w, n + 1, 1).unwrap().is_identity() && !project_gn(&w, n, 1).unwrap().is_identity() {
                        bad.push(format!("kernel nesting fails at level {n} for {w}"));
                    }
                }
            }
            bad
        })
        .collect();
    ensure(problems.is_empty(), || problems[..problems.len().min(3)].join("; "))?;

    let mut r = sampling::rng(9, 100);
    for _ in 0..1000 {
        let n = r.random_range(0..=6);
        let k = r.random_range(1..=3);
        let ms: Vec<u32> = (0..k).map(|_| r.random_range(n..=n + 3)).collect();
        let xs: Vec<Word> = (0..k).map(|_| words(&mut r)).collect();
        let g = words(&mut r);
        let w = cn_generator(n, &ms, &xs, &g, 1).unwrap();
        ensure(project_gn(&w, n, 1).unwrap().is_identity(), || format!("C_n generator survives: {w}"))?;
    }
    for n in 0..=6 {
        let c = Word::reduce(RANK, [(1, pow2(n))]).unwrap();
        let id = GnElement::identity(RANK, n + 1, 1).unwrap();
        ensure(project_gn(&c, n, 1).unwrap().is_identity(), || format!("c^(2^{n}) survives level {n}"))?;
        ensure(!gn_conjugate(&project_gn(&c, n + 1, 1).unwrap(), &id).unwrap(), || {
            format!("c^(2^{n}) dies at level {}", n + 1)
        })?;
    }
    let mut pairs = 0;
    let mut worst = 0;
    while pairs < 1000 {
        let (a, b) = (words(&mut r), words(&mut r));
        let e = c_exponent_budget(&a, &b, 1);
        if e > Integer::from(32) || a.is_conjugate(&b) {
            continue;
        }
        pairs += 1;
        let bound = separation_bound(&e);
        let level = separation_level(&a, &b, 1, bound).unwrap();
        ensure(matches!(level, Some(l) if l <= bound), || format!("{a} | {b} not separated by level {bound}"))?;
        worst = worst.max(level.unwrap());
    }
    within(start.elapsed(), 60)?;
    Ok(format!(
        "homomorphism, nesting, C_n, strictness and separation bound hold (max level {worst}, {:.1}s)",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_10() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_goldman"))
            .args(["selftest", "--seed", "42"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), || format!("selftest exited with {}", a.status))?;
    ensure(a.stdout == b.stdout && !a.stdout.is_empty(), || "reports differ".into())?;
    Ok(format!("two runs of `selftest --seed 42` match byte for byte ({} bytes)", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("lie axioms", criterion_1),
        ("pairing decomposition", criterion_2),
        ("gcd-rule ideals", criterion_3),
        ("criteria agree on tables", criterion_4),
        ("infinite ideal family", criterion_5),
        ("primitive ideals", criterion_6),
        ("closed classification", criterion_7),
        ("rational round trip", criterion_8),
        ("descending chain", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = BTreeSet::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} {name}: FAIL: {why}", i + 1);
                failed.insert(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
