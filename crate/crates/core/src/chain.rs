//! The quotients `G_n = Z/2^n * F` of a free group obtained by killing
//! `c^{2^n}` for a distinguished free generator `c`, and the separation of
//! conjugacy classes through them.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::pow2;
use crate::syllables::{self, Factors};
use crate::words::{Letter, Word};

/// An element of `G_n` in free-product normal form. Exponents of `c` lie in
/// `(-2^{n-1}, 2^{n-1}]`; at level 0 no `c` letters remain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GnElement {
    level: u32,
    c_index: usize,
    rank: usize,
    letters: Vec<Letter>,
}

impl GnElement {
    pub fn identity(rank: usize, level: u32, c_index: usize) -> Result<Self> {
        check_c(rank, c_index)?;
        Ok(GnElement {
            level,
            c_index,
            rank,
            letters: Vec::new(),
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn c_index(&self) -> usize {
        self.c_index
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// The normal form read back as a free-group word.
    pub fn to_word(&self) -> Word {
        Word::from_reduced(self.rank, self.letters.clone())
    }

    fn with_factors<T>(&self, f: impl FnOnce(Factors<'_>) -> T) -> T {
        let order = pow2(self.level);
        f(Factors::with_finite(self.c_index, &order))
    }

    fn same_group(&self, other: &GnElement) -> Result<()> {
        if self.level != other.level {
            return Err(Error::LevelMismatch {
                left: self.level,
                right: other.level,
            });
        }
        if self.c_index != other.c_index {
            return Err(Error::Precondition(format!(
                "distinguished generators differ: a{} vs a{}",
                self.c_index, other.c_index
            )));
        }
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    fn rebuild(&self, letters: Vec<Letter>) -> GnElement {
        GnElement {
            level: self.level,
            c_index: self.c_index,
            rank: self.rank,
            letters,
        }
    }
}

impl fmt::Display for GnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_word().fmt(f)
    }
}

fn check_c(rank: usize, c_index: usize) -> Result<()> {
    if c_index == 0 || c_index > rank {
        return Err(Error::GeneratorOutOfRange {
            gen: c_index,
            rank,
        });
    }
    Ok(())
}

/// The projection `p_n: F → G_n`.
pub fn project_gn(w: &Word, level: u32, c_index: usize) -> Result<GnElement> {
    check_c(w.rank(), c_index)?;
    let order = pow2(level);
    let letters = syllables::reduce_all(
        w.letters().iter().cloned(),
        Factors::with_finite(c_index, &order),
    );
    Ok(GnElement {
        level,
        c_index,
        rank: w.rank(),
        letters,
    })
}

pub fn gn_mul(x: &GnElement, y: &GnElement) -> Result<GnElement> {
    x.same_group(y)?;
    let letters = x.with_factors(|f| {
        syllables::reduce_all(x.letters.iter().chain(&y.letters).cloned(), f)
    });
    Ok(x.rebuild(letters))
}

pub fn gn_inv(x: &GnElement) -> GnElement {
    let letters = x.with_factors(|f| syllables::invert(&x.letters, f));
    x.rebuild(letters)
}

/// Conjugacy class representative: cyclically reduced, least rotation.
fn conjugacy_key(x: &GnElement) -> Vec<Letter> {
    x.with_factors(|f| syllables::least_rotation(&syllables::cyclic_reduce(&x.letters, f).0))
}

/// Conjugacy in the free product of `Z/2^n` with the free group on the
/// remaining generators.
pub fn gn_conjugate(x: &GnElement, y: &GnElement) -> Result<bool> {
    x.same_group(y)?;
    Ok(conjugacy_key(x) == conjugacy_key(y))
}

/// `g · Π_i (c^{2^{m_i}} x_i c^{-2^{m_i}} x_i^{-1}) · g^{-1}`, reduced. Each
/// factor dies in `G_n` whenever every `m_i ≥ n`.
pub fn cn_generator(
    level: u32,
    exponents: &[u32],
    xs: &[Word],
    g: &Word,
    c_index: usize,
) -> Result<Word> {
    if exponents.is_empty() {
        return Err(Error::Precondition("the product needs at least one factor".into()));
    }
    if exponents.len() != xs.len() {
        return Err(Error::Precondition(format!(
            "{} exponents for {} words",
            exponents.len(),
            xs.len()
        )));
    }
    if let Some(m) = exponents.iter().find(|&&m| m < level) {
        return Err(Error::Precondition(format!("exponent 2^{m} is below level {level}")));
    }
    let rank = g.rank();
    check_c(rank, c_index)?;
    let mut out = g.clone();
    for (m, x) in exponents.iter().zip(xs) {
        let power = pow2(*m);
        let up = Word::reduce(rank, [(c_index, power.clone())])?;
        let down = Word::reduce(rank, [(c_index, -power)])?;
        out = out.concat(&up)?.concat(x)?.concat(&down)?.concat(&x.inverse())?;
    }
    out.concat(&g.inverse())
}

/// Total `|exponent|` of `c` across both words.
pub fn c_exponent_budget(a: &Word, b: &Word, c_index: usize) -> BigInt {
    a.absolute_exponent_sum(c_index) + b.absolute_exponent_sum(c_index)
}

/// The least level `n ≥ 0` with `2^{n-1} > budget`, past which every
/// `c` exponent is its own residue and projection preserves conjugacy.
pub fn separation_bound(budget: &BigInt) -> u32 {
    if budget.is_zero() {
        0
    } else {
        budget.bits() as u32 + 1
    }
}

/// The least level `n ≤ n_max` at which `a` and `b` project to non-conjugate
/// elements, or `None` if every level up to `n_max` conflates them.
pub fn separation_level(a: &Word, b: &Word, c_index: usize, n_max: u32) -> Result<Option<u32>> {
    if a.rank() != b.rank() {
        return Err(Error::RankMismatch {
            left: a.rank(),
            right: b.rank(),
        });
    }
    check_c(a.rank(), c_index)?;
    if a.is_conjugate(b) {
        return Err(Error::Conjugate);
    }
    for n in 0..=n_max {
        if !gn_conjugate(&project_gn(a, n, c_index)?, &project_gn(b, n, c_index)?)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Checks the normal-form invariants: no empty or adjacent same-generator
/// syllables, and every `c` exponent its own symmetric residue.
pub fn is_normal(x: &GnElement) -> bool {
    let order = pow2(x.level);
    x.letters.windows(2).all(|p| p[0].gen != p[1].gen)
        && x.letters.iter().all(|l| {
            !l.exp.is_zero()
                && (l.gen != x.c_index || syllables::symmetric_residue(&l.exp, &order) == l.exp)
        })
}
