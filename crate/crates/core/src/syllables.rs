//! Syllable-level normal forms in a free product of cyclic groups.
//!
//! A syllable is a [`Letter`] `a_k^e`. Every generator is infinite cyclic
//! except at most one, which may have finite order `m`; its exponents are kept
//! in the symmetric residue range `(-m/2, m/2]`. With no finite generator this
//! is plain free-group reduction.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::scalar::residue;
use crate::words::Letter;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Factors<'a> {
    finite: Option<(usize, &'a BigInt)>,
}

impl<'a> Factors<'a> {
    pub(crate) fn free() -> Self {
        Factors { finite: None }
    }

    pub(crate) fn with_finite(gen: usize, order: &'a BigInt) -> Self {
        Factors {
            finite: Some((gen, order)),
        }
    }

    /// Canonical exponent of `gen^exp` inside its factor.
    pub(crate) fn normalize(&self, gen: usize, exp: BigInt) -> BigInt {
        match self.finite {
            Some((c, order)) if c == gen => symmetric_residue(&exp, order),
            _ => exp,
        }
    }
}

/// Residue of `value` modulo `order` in `(-order/2, order/2]`.
pub(crate) fn symmetric_residue(value: &BigInt, order: &BigInt) -> BigInt {
    if order.is_one() {
        return BigInt::zero();
    }
    let r = residue(value, order);
    let doubled: BigInt = &r * 2;
    if &doubled > order {
        r - order
    } else {
        r
    }
}

/// Appends a syllable to a reduced stack, merging and cancelling as needed.
pub(crate) fn push(stack: &mut Vec<Letter>, gen: usize, exp: BigInt, factors: Factors<'_>) {
    let exp = factors.normalize(gen, exp);
    if exp.is_zero() {
        return;
    }
    match stack.last_mut() {
        Some(top) if top.gen == gen => {
            let merged = factors.normalize(gen, &top.exp + exp);
            if merged.is_zero() {
                stack.pop();
            } else {
                top.exp = merged;
            }
        }
        _ => stack.push(Letter { gen, exp }),
    }
}

pub(crate) fn reduce_all<I>(letters: I, factors: Factors<'_>) -> Vec<Letter>
where
    I: IntoIterator<Item = Letter>,
{
    let mut stack = Vec::new();
    for l in letters {
        push(&mut stack, l.gen, l.exp, factors);
    }
    stack
}

pub(crate) fn invert(letters: &[Letter], factors: Factors<'_>) -> Vec<Letter> {
    letters
        .iter()
        .rev()
        .map(|l| Letter {
            gen: l.gen,
            exp: factors.normalize(l.gen, -l.exp.clone()),
        })
        .collect()
}

/// Splits a reduced syllable sequence `w` into `(core, conjugator)` with
/// `w = conjugator * core * conjugator^-1` and `core` cyclically reduced.
pub(crate) fn cyclic_reduce(letters: &[Letter], factors: Factors<'_>) -> (Vec<Letter>, Vec<Letter>) {
    let mut lo = 0usize;
    let mut hi = letters.len();
    let mut first: Option<BigInt> = None;
    let mut conjugator = Vec::new();

    while hi - lo >= 2 && letters[lo].gen == letters[hi - 1].gen {
        let gen = letters[lo].gen;
        let p = first.take().unwrap_or_else(|| letters[lo].exp.clone());
        let q = letters[hi - 1].exp.clone();
        push(&mut conjugator, gen, -q.clone(), factors);
        hi -= 1;
        let merged = factors.normalize(gen, p + q);
        if merged.is_zero() {
            lo += 1;
        } else {
            first = Some(merged);
            // the merged syllable now borders letters[hi - 1], whose generator
            // differs from `gen` because the input was reduced
            break;
        }
    }

    let mut core: Vec<Letter> = letters[lo..hi].to_vec();
    if let (Some(exp), Some(head)) = (first, core.first_mut()) {
        head.exp = exp;
    }
    (core, conjugator)
}

/// The lexicographically least rotation of a cyclically reduced sequence.
pub(crate) fn least_rotation(letters: &[Letter]) -> Vec<Letter> {
    let k = letters.len();
    if k <= 1 {
        return letters.to_vec();
    }
    let mut best = 0usize;
    for start in 1..k {
        let candidate = letters[start..].iter().chain(&letters[..start]);
        let current = letters[best..].iter().chain(&letters[..best]);
        if candidate.cmp(current) == std::cmp::Ordering::Less {
            best = start;
        }
    }
    letters[best..].iter().chain(&letters[..best]).cloned().collect()
}
