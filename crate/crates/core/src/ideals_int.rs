//! Geometric submodules of `Z[A(n)]`.
//!
//! A geometric submodule is spanned by integer multiples of monomials, so it
//! is determined by `alpha(x)`: the least positive `k` with `k·x` in the
//! submodule, or `0` when no multiple of `x` lies in it. This module evaluates
//! `alpha` for the gcd rule `I_K` and for explicit finite tables, and checks
//! the two divisibility criteria that characterize ideals.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{check_rank, Monomial, ModuleElement};
use crate::error::{Error, Result};
use crate::liealg::bracket;
use crate::sampling;
use crate::scalar::{divides, gcd_all};
use crate::symplectic::SurfaceSignature;

/// The symmetric box `[-radius, radius]^rank` of exponent vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExponentBox {
    pub rank: usize,
    pub radius: i64,
}

impl ExponentBox {
    pub fn new(rank: usize, radius: i64) -> Self {
        assert!(radius >= 0, "box radius must be nonnegative");
        ExponentBox { rank, radius }
    }

    pub fn contains(&self, x: &Monomial) -> bool {
        x.rank() == self.rank && x.exps().iter().all(|e| e.abs() <= BigInt::from(self.radius))
    }

    pub fn size(&self) -> u128 {
        (2 * self.radius as u128 + 1).pow(self.rank as u32)
    }

    /// Every point, in lexicographic order.
    pub fn points(&self) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![-self.radius; self.rank];
        loop {
            out.push(Monomial::from_ints(&cur));
            let mut i = self.rank;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < self.radius {
                    cur[i] += 1;
                    break;
                }
                cur[i] = -self.radius;
            }
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Monomial {
        sampling::monomial(rng, self.rank, self.radius)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaRule {
    /// `alpha = 1` on the finite exception set, gcd of the exponents elsewhere.
    Ik {
        rank: usize,
        exceptions: BTreeSet<Monomial>,
    },
    /// Explicit values inside a box; `default` everywhere not listed.
    Table {
        domain: ExponentBox,
        default: BigInt,
        values: BTreeMap<Monomial, BigInt>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricSubmodule {
    rule: AlphaRule,
}

impl GeometricSubmodule {
    pub fn ik<I>(rank: usize, exceptions: I) -> Result<Self>
    where
        I: IntoIterator<Item = Monomial>,
    {
        let exceptions: BTreeSet<Monomial> = exceptions.into_iter().collect();
        for k in &exceptions {
            check_rank(rank, k.rank())?;
        }
        Ok(GeometricSubmodule {
            rule: AlphaRule::Ik { rank, exceptions },
        })
    }

    pub fn table<I>(domain: ExponentBox, default: BigInt, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        if default.is_negative() {
            return Err(Error::Precondition("alpha values must be nonnegative".into()));
        }
        let mut map = BTreeMap::new();
        for (m, a) in values {
            if !domain.contains(&m) {
                return Err(Error::OutsideBox(m.to_string()));
            }
            if a.is_negative() {
                return Err(Error::Precondition("alpha values must be nonnegative".into()));
            }
            if a != default {
                map.insert(m, a);
            }
        }
        Ok(GeometricSubmodule {
            rule: AlphaRule::Table {
                domain,
                default,
                values: map,
            },
        })
    }

    pub fn rule(&self) -> &AlphaRule {
        &self.rule
    }

    pub fn rank(&self) -> usize {
        match &self.rule {
            AlphaRule::Ik { rank, .. } => *rank,
            AlphaRule::Table { domain, .. } => domain.rank,
        }
    }

    pub fn in_domain(&self, x: &Monomial) -> bool {
        match &self.rule {
            AlphaRule::Ik { rank, .. } => x.rank() == *rank,
            AlphaRule::Table { domain, .. } => domain.contains(x),
        }
    }

    pub fn alpha(&self, x: &Monomial) -> Result<BigInt> {
        check_rank(self.rank(), x.rank())?;
        match &self.rule {
            AlphaRule::Ik { exceptions, .. } => Ok(if exceptions.contains(x) {
                BigInt::one()
            } else {
                gcd_all(x.exps())
            }),
            AlphaRule::Table {
                domain,
                default,
                values,
            } => {
                if !domain.contains(x) {
                    return Err(Error::OutsideBox(x.to_string()));
                }
                Ok(values.get(x).unwrap_or(default).clone())
            }
        }
    }

    /// Membership of an integer element: each coefficient must be a multiple
    /// of `alpha` at its monomial (and `alpha = 0` admits only zero).
    pub fn contains(&self, u: &ModuleElement<BigInt>) -> Result<bool> {
        check_rank(self.rank(), u.rank())?;
        for (m, c) in u.iter() {
            if !divides(&self.alpha(m)?, c) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The exception set of an `I_K` rule.
    pub fn exceptions(&self) -> Option<&BTreeSet<Monomial>> {
        match &self.rule {
            AlphaRule::Ik { exceptions, .. } => Some(exceptions),
            AlphaRule::Table { .. } => None,
        }
    }
}

/// A pair of monomials refuting a criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub first: Monomial,
    pub second: Monomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub holds: bool,
    /// Pairs actually evaluated.
    pub checked: u64,
    pub counterexample: Option<Counterexample>,
}

/// Which divisibility condition to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    /// `alpha(vw) | <v,w> · alpha(v)` for pairs `(v, w)`: bracketing the
    /// generator `alpha(v)·v` with `w` stays inside the submodule.
    Closure,
    /// `alpha(k) | alpha(i) · gcd_t(gcd(k_{2t-1},k_{2t}) · gcd(i_{2t-1},i_{2t}))`
    /// for pairs `(k, i)`.
    PairGcd,
}

impl Criterion {
    /// `None` when the pair leaves the rule's domain and cannot be judged.
    fn evaluate(
        self,
        sig: &SurfaceSignature,
        sub: &GeometricSubmodule,
        first: &Monomial,
        second: &Monomial,
    ) -> Result<Option<bool>> {
        match self {
            Criterion::Closure => {
                let (v, w) = (first, second);
                let vw = v.mul_unchecked(w);
                if !sub.in_domain(v) || !sub.in_domain(&vw) {
                    return Ok(None);
                }
                let rhs = sig.pair_unchecked(v, w) * sub.alpha(v)?;
                Ok(Some(divides(&sub.alpha(&vw)?, &rhs)))
            }
            Criterion::PairGcd => {
                let (k, i) = (first, second);
                if !sub.in_domain(k) || !sub.in_domain(i) {
                    return Ok(None);
                }
                let rhs = sub.alpha(i)? * pair_gcd_factor(sig, k, i);
                Ok(Some(divides(&sub.alpha(k)?, &rhs)))
            }
        }
    }
}

/// `gcd_{t=1..g}( gcd(k_{2t-1}, k_{2t}) · gcd(i_{2t-1}, i_{2t}) )`.
pub fn pair_gcd_factor(sig: &SurfaceSignature, k: &Monomial, i: &Monomial) -> BigInt {
    let (k, i) = (k.exps(), i.exps());
    let factors: Vec<BigInt> = (0..sig.genus())
        .map(|t| gcd_all(&k[2 * t..2 * t + 2]) * gcd_all(&i[2 * t..2 * t + 2]))
        .collect();
    gcd_all(&factors)
}

const CHUNK: u64 = 1024;

fn check_sampled(
    criterion: Criterion,
    sig: &SurfaceSignature,
    sub: &GeometricSubmodule,
    bx: ExponentBox,
    samples: u64,
    seed: u64,
) -> Result<CheckOutcome> {
    check_rank(sig.rank(), sub.rank())?;
    check_rank(sig.rank(), bx.rank)?;
    let chunks = samples.div_ceil(CHUNK);
    let results: Vec<Result<(u64, Option<Counterexample>)>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let want = CHUNK.min(samples - chunk * CHUNK);
            let mut rng = sampling::rng(seed, chunk);
            let (mut checked, mut draws) = (0u64, 0u64);
            // pairs that leave a table's box are redrawn, within a budget
            while checked < want && draws < 64 * want {
                draws += 1;
                let a = bx.sample(&mut rng);
                let b = bx.sample(&mut rng);
                match criterion.evaluate(sig, sub, &a, &b)? {
                    None => continue,
                    Some(true) => checked += 1,
                    Some(false) => {
                        return Ok((
                            checked + 1,
                            Some(Counterexample {
                                first: a,
                                second: b,
                            }),
                        ))
                    }
                }
            }
            Ok((checked, None))
        })
        .collect();

    let mut checked = 0;
    for r in results {
        let (n, found) = r?;
        checked += n;
        if let Some(cx) = found {
            let cx = minimize(criterion, sig, sub, bx, cx)?;
            return Ok(CheckOutcome {
                holds: false,
                checked,
                counterexample: Some(cx),
            });
        }
    }
    Ok(CheckOutcome {
        holds: true,
        checked,
        counterexample: None,
    })
}

fn check_exhaustive(
    criterion: Criterion,
    sig: &SurfaceSignature,
    sub: &GeometricSubmodule,
    bx: ExponentBox,
) -> Result<CheckOutcome> {
    check_rank(sig.rank(), sub.rank())?;
    check_rank(sig.rank(), bx.rank)?;
    let points = bx.points();
    let mut checked = 0;
    for a in &points {
        for b in &points {
            match criterion.evaluate(sig, sub, a, b)? {
                None => {}
                Some(true) => checked += 1,
                Some(false) => {
                    let cx = Counterexample {
                        first: a.clone(),
                        second: b.clone(),
                    };
                    return Ok(CheckOutcome {
                        holds: false,
                        checked: checked + 1,
                        counterexample: Some(minimize(criterion, sig, sub, bx, cx)?),
                    });
                }
            }
        }
    }
    Ok(CheckOutcome {
        holds: true,
        checked,
        counterexample: None,
    })
}

/// Samples pairs `(v, w)` from the box and tests the closure criterion
/// `alpha(vw) | <v,w>·alpha(v)`. Deterministic for a given seed; the reported
/// counterexample is minimized by total norm, then lexicographically.
pub fn ideal_check_sampled(
    sig: &SurfaceSignature,
    sub: &GeometricSubmodule,
    bx: ExponentBox,
    samples: u64,
    seed: u64,
) -> Result<CheckOutcome> {
    check_sampled(Criterion::Closure, sig, sub, bx, samples, seed)
}

/// The closure criterion over every pair of the box.
pub fn ideal_check_exhaustive(
    sig: &SurfaceSignature,
    sub: &GeometricSubmodule,
    bx: ExponentBox,
) -> Result<CheckOutcome> {
    check_exhaustive(Criterion::Closure, sig, sub, bx)
}

/// Samples pairs `(k, i)` and tests the pairwise-gcd criterion.
pub fn prop_divisibility_check(
    sig: &SurfaceSignature,
    sub: &GeometricSubmodule,
    bx: ExponentBox,
    samples: u64,
    seed: u64,
) -> Result<CheckOutcome> {
    check_sampled(Criterion::PairGcd, sig, sub, bx, samples, seed)
}

pub fn prop_divisibility_exhaustive(
    sig: &SurfaceSignature,
    sub: &GeometricSubmodule,
    bx: ExponentBox,
) -> Result<CheckOutcome> {
    check_exhaustive(Criterion::PairGcd, sig, sub, bx)
}

/// Independent route to ideality on a box: bracket each generator
/// `alpha(v)·v` with every monomial `w` and test membership of the result.
pub fn bracket_closure_exhaustive(
    sig: &SurfaceSignature,
    sub: &GeometricSubmodule,
    bx: ExponentBox,
) -> Result<bool> {
    let points = bx.points();
    for v in &points {
        let a = sub.alpha(v)?;
        if a.is_zero() {
            continue;
        }
        let generator = ModuleElement::term(v.clone(), a);
        for w in &points {
            let b = bracket(sig, &generator, &ModuleElement::monomial(w.clone()))?;
            if b.iter().any(|(m, _)| !sub.in_domain(m)) {
                continue;
            }
            if !sub.contains(&b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn is_violation(
    criterion: Criterion,
    sig: &SurfaceSignature,
    sub: &GeometricSubmodule,
    bx: ExponentBox,
    a: &Monomial,
    b: &Monomial,
) -> Result<bool> {
    if !bx.contains(a) || !bx.contains(b) {
        return Ok(false);
    }
    Ok(criterion.evaluate(sig, sub, a, b)? == Some(false))
}

const MINIMIZE_BUDGET: usize = 200_000;

/// Shrinks a violating pair: first greedily toward zero, then by scanning all
/// pairs of smaller or equal total norm in lexicographic order.
fn minimize(
    criterion: Criterion,
    sig: &SurfaceSignature,
    sub: &GeometricSubmodule,
    bx: ExponentBox,
    cx: Counterexample,
) -> Result<Counterexample> {
    let n = bx.rank;
    let mut flat: Vec<i64> = cx
        .first
        .exps()
        .iter()
        .chain(cx.second.exps())
        .map(|e| i64::try_from(e).expect("box coordinates fit in i64"))
        .collect();
    let split = |v: &[i64]| (Monomial::from_ints(&v[..n]), Monomial::from_ints(&v[n..]));

    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..flat.len() {
            for candidate in [0, flat[i] - flat[i].signum()] {
                if candidate.abs() >= flat[i].abs() {
                    continue;
                }
                let mut trial = flat.clone();
                trial[i] = candidate;
                let (a, b) = split(&trial);
                if is_violation(criterion, sig, sub, bx, &a, &b)? {
                    flat = trial;
                    improved = true;
                    break;
                }
            }
        }
    }

    let bound: i64 = flat.iter().map(|e| e.abs()).sum();
    let mut budget = MINIMIZE_BUDGET;
    for total in 0..=bound {
        let mut found = None;
        let complete = for_each_with_norm(2 * n, total, bx.radius, &mut budget, &mut |v| {
            if found.is_some() {
                return Ok(());
            }
            let (a, b) = split(v);
            if is_violation(criterion, sig, sub, bx, &a, &b)? {
                found = Some(Counterexample { first: a, second: b });
            }
            Ok(())
        })?;
        if let Some(cx) = found {
            return Ok(cx);
        }
        if !complete {
            break;
        }
    }
    let (first, second) = split(&flat);
    Ok(Counterexample { first, second })
}

/// Visits integer vectors of the given dimension with L1 norm exactly `total`
/// and entries in `[-radius, radius]`, in lexicographic order. Returns `false`
/// if the budget ran out.
fn for_each_with_norm(
    dim: usize,
    total: i64,
    radius: i64,
    budget: &mut usize,
    visit: &mut dyn FnMut(&[i64]) -> Result<()>,
) -> Result<bool> {
    fn rec(
        prefix: &mut Vec<i64>,
        dim: usize,
        remaining: i64,
        radius: i64,
        budget: &mut usize,
        visit: &mut dyn FnMut(&[i64]) -> Result<()>,
    ) -> Result<bool> {
        let slots = dim - prefix.len();
        if slots == 0 {
            if remaining != 0 {
                return Ok(true);
            }
            if *budget == 0 {
                return Ok(false);
            }
            *budget -= 1;
            visit(prefix)?;
            return Ok(true);
        }
        if remaining > radius * slots as i64 {
            return Ok(true);
        }
        let reach = remaining.min(radius);
        for x in -reach..=reach {
            prefix.push(x);
            let ok = rec(prefix, dim, remaining - x.abs(), radius, budget, visit)?;
            prefix.pop();
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
    rec(&mut Vec::with_capacity(dim), dim, total, radius, budget, visit)
}

/// `I_{K_0}, I_{K_1}, ...` where `K_j` adds the first `j` tuples outside
/// `K_0` with gcd greater than one, enumerated by max-norm shell and then
/// lexicographically.
pub fn ik_family<I>(rank: usize, k0: I, count: usize) -> Result<Vec<GeometricSubmodule>>
where
    I: IntoIterator<Item = Monomial>,
{
    if count == 0 {
        return Err(Error::Precondition("ik_family needs count >= 1".into()));
    }
    let k0: BTreeSet<Monomial> = k0.into_iter().collect();
    for k in &k0 {
        check_rank(rank, k.rank())?;
    }
    let additions = extra_tuples(rank, &k0, count - 1);
    let mut family = Vec::with_capacity(count);
    let mut current = k0;
    family.push(GeometricSubmodule::ik(rank, current.clone())?);
    for t in additions {
        current.insert(t);
        family.push(GeometricSubmodule::ik(rank, current.clone())?);
    }
    Ok(family)
}

/// The tuples appended by [`ik_family`], in order.
pub fn extra_tuples(rank: usize, k0: &BTreeSet<Monomial>, count: usize) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(count);
    if count == 0 || rank == 0 {
        return out;
    }
    let mut shell = 1i64;
    while out.len() < count {
        for x in ExponentBox::new(rank, shell).points() {
            let on_shell = x.exps().iter().any(|e| e.abs() == BigInt::from(shell));
            if on_shell && gcd_all(x.exps()) > BigInt::one() && !k0.contains(&x) {
                out.push(x);
                if out.len() == count {
                    break;
                }
            }
        }
        shell += 1;
    }
    out
}

/// Result of comparing two criteria over every table rule on a box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    pub rules: u64,
    pub closure_accepts: u64,
    pub pair_gcd_accepts: u64,
    pub disagreements: u64,
    /// Bit `j` set means point `j` (lexicographic order) takes the second value.
    pub first_disagreement: Option<u64>,
}

/// A criterion over a box compiled into forbidden value patterns: rule `r`
/// fails iff some point `p` has value index `vp` and some point in
/// `mask` has value index `vq`.
struct CompiledCriterion {
    patterns: Vec<(usize, u8, u8, u64)>,
}

impl CompiledCriterion {
    fn compile(
        criterion: Criterion,
        sig: &SurfaceSignature,
        bx: ExponentBox,
        values: [&BigInt; 2],
    ) -> Result<Self> {
        let points = bx.points();
        let index: BTreeMap<&Monomial, usize> =
            points.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut masks: BTreeMap<(usize, u8, u8), u64> = BTreeMap::new();
        for a in &points {
            for b in &points {
                let (p, q, c) = match criterion {
                    Criterion::Closure => {
                        let vw = a.mul_unchecked(b);
                        let Some(&p) = index.get(&vw) else { continue };
                        (p, index[a], sig.pair_unchecked(a, b))
                    }
                    Criterion::PairGcd => (index[a], index[b], pair_gcd_factor(sig, a, b)),
                };
                for vp in 0..2u8 {
                    for vq in 0..2u8 {
                        if p == q && vp != vq {
                            continue;
                        }
                        let rhs = values[vq as usize] * &c;
                        if !divides(values[vp as usize], &rhs) {
                            *masks.entry((p, vp, vq)).or_default() |= 1 << q;
                        }
                    }
                }
            }
        }
        Ok(CompiledCriterion {
            patterns: masks
                .into_iter()
                .map(|((p, vp, vq), m)| (p, vp, vq, m))
                .collect(),
        })
    }

    fn accepts(&self, rule: u64) -> bool {
        self.patterns.iter().all(|&(p, vp, vq, mask)| {
            let at_p = ((rule >> p) & 1) as u8;
            if at_p != vp {
                return true;
            }
            let matching = if vq == 1 { rule } else { !rule };
            matching & mask == 0
        })
    }
}

/// Enumerates every table rule on `bx` with values drawn from `values` and
/// reports where the closure and pairwise-gcd criteria disagree.
pub fn table_rule_agreement(
    sig: &SurfaceSignature,
    bx: ExponentBox,
    values: [BigInt; 2],
) -> Result<AgreementReport> {
    check_rank(sig.rank(), bx.rank)?;
    let size = bx.size();
    if size > 40 {
        return Err(Error::Precondition(format!(
            "box with {size} points is too large to enumerate table rules"
        )));
    }
    let vals = [&values[0], &values[1]];
    let closure = CompiledCriterion::compile(Criterion::Closure, sig, bx, vals)?;
    let pair_gcd = CompiledCriterion::compile(Criterion::PairGcd, sig, bx, vals)?;
    let rules = 1u64 << size;

    const BLOCK: u64 = 1 << 16;
    let partial: Vec<(u64, u64, u64, Option<u64>)> = (0..rules.div_ceil(BLOCK))
        .into_par_iter()
        .map(|block| {
            let (mut ca, mut pa, mut dis, mut first) = (0, 0, 0, None);
            for rule in block * BLOCK..((block + 1) * BLOCK).min(rules) {
                let c = closure.accepts(rule);
                let p = pair_gcd.accepts(rule);
                ca += c as u64;
                pa += p as u64;
                if c != p {
                    dis += 1;
                    first.get_or_insert(rule);
                }
            }
            (ca, pa, dis, first)
        })
        .collect();

    let mut report = AgreementReport {
        rules,
        closure_accepts: 0,
        pair_gcd_accepts: 0,
        disagreements: 0,
        first_disagreement: None,
    };
    for (ca, pa, dis, first) in partial {
        report.closure_accepts += ca;
        report.pair_gcd_accepts += pa;
        report.disagreements += dis;
        if report.first_disagreement.is_none() {
            report.first_disagreement = first;
        }
    }
    Ok(report)
}

/// The table rule encoded by `mask` as in [`table_rule_agreement`].
pub fn table_from_mask(bx: ExponentBox, values: &[BigInt; 2], mask: u64) -> Result<GeometricSubmodule> {
    let entries = bx
        .points()
        .into_iter()
        .enumerate()
        .map(|(j, p)| (p, values[((mask >> j) & 1) as usize].clone()));
    GeometricSubmodule::table(bx, values[0].clone(), entries)
}
