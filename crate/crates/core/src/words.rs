//! Words in the free group on `a1..an`.
//!
//! Words are stored run-length encoded: a [`Letter`] is a syllable
//! `a_gen^exp`. A [`Word`] is always freely reduced and a [`CyclicWord`] is a
//! cyclically reduced word stored in its least rotation, so equality of
//! cyclic words is conjugacy in the free group.
//!
//! For closed surfaces the fundamental group carries the surface relator,
//! which these words ignore. Abelianization is unaffected, but conjugacy
//! tests here are only meaningful for surfaces with boundary.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::syllables::{self, Factors};

/// The syllable `a_gen^exp` with `exp != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub exp: BigInt,
}

impl Letter {
    pub fn new(gen: usize, exp: impl Into<BigInt>) -> Self {
        Letter {
            gen,
            exp: exp.into(),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == BigInt::from(1) {
            write!(f, "a{}", self.gen)
        } else {
            write!(f, "a{}^{}", self.gen, self.exp)
        }
    }
}

/// A freely reduced word over an alphabet of `rank` generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(rank: usize) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    pub fn generator(gen: usize, rank: usize) -> Result<Self> {
        Word::reduce(rank, [(gen, 1)])
    }

    /// Freely reduces a raw product of syllables.
    pub fn reduce<I, E>(rank: usize, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, E)>,
        E: Into<BigInt>,
    {
        let mut stack = Vec::new();
        for (gen, exp) in raw {
            if gen == 0 || gen > rank {
                return Err(Error::GeneratorOutOfRange { gen, rank });
            }
            syllables::push(&mut stack, gen, exp.into(), Factors::free());
        }
        Ok(Word {
            rank,
            letters: stack,
        })
    }

    /// Parses the token grammar `a<k>` / `a<k>^<e>`, whitespace separated.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        Word::reduce(rank, parse_syllables(text)?)
    }

    pub(crate) fn from_reduced(rank: usize, letters: Vec<Letter>) -> Self {
        Word { rank, letters }
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

    /// Number of syllables.
    pub fn syllable_count(&self) -> usize {
        self.letters.len()
    }

    /// Length in single letters, i.e. the sum of `|exp|`.
    pub fn length(&self) -> BigInt {
        self.letters.iter().map(|l| l.exp.abs()).sum()
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let mut stack = self.letters.clone();
        for l in &other.letters {
            syllables::push(&mut stack, l.gen, l.exp.clone(), Factors::free());
        }
        Ok(Word {
            rank: self.rank,
            letters: stack,
        })
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: syllables::invert(&self.letters, Factors::free()),
        }
    }

    /// `g * self * g^-1`.
    pub fn conjugate_by(&self, g: &Word) -> Result<Word> {
        g.concat(self)?.concat(&g.inverse())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base).expect("same rank");
        }
        out
    }

    /// Returns `(core, conjugator)` with `self = conjugator * core * conjugator^-1`
    /// and `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let (core, conj) = syllables::cyclic_reduce(&self.letters, Factors::free());
        (
            Word::from_reduced(self.rank, core),
            Word::from_reduced(self.rank, conj),
        )
    }

    /// Canonical representative of the conjugacy class of `self`.
    pub fn conjugacy_canonical(&self) -> CyclicWord {
        let (core, _) = syllables::cyclic_reduce(&self.letters, Factors::free());
        CyclicWord {
            rank: self.rank,
            letters: syllables::least_rotation(&core),
        }
    }

    /// Free-group conjugacy. Not a decision procedure for closed-surface groups.
    pub fn is_conjugate(&self, other: &Word) -> bool {
        self.conjugacy_canonical() == other.conjugacy_canonical()
    }

    /// Total `|exp|` over the syllables of generator `gen`.
    pub fn absolute_exponent_sum(&self, gen: usize) -> BigInt {
        self.letters
            .iter()
            .filter(|l| l.gen == gen)
            .map(|l| l.exp.abs())
            .sum()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.letters)
    }
}

/// A conjugacy class of the free group: a cyclically reduced word in its
/// least rotation under the order `(gen, exp)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl CyclicWord {
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The stored rotation read as a linear word.
    pub fn linear_representative(&self) -> Word {
        Word::from_reduced(self.rank, self.letters.clone())
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.letters)
    }
}

fn write_letters(f: &mut fmt::Formatter<'_>, letters: &[Letter]) -> fmt::Result {
    for (i, l) in letters.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

/// Parses word tokens without reducing or range-checking them.
pub fn parse_syllables(text: &str) -> Result<Vec<(usize, BigInt)>> {
    text.split_whitespace()
        .map(|tok| {
            let bad = || Error::Parse(format!("malformed word token `{tok}`"));
            let body = tok.strip_prefix('a').ok_or_else(bad)?;
            let (gen, exp) = match body.split_once('^') {
                Some((g, e)) => (g, e.parse::<BigInt>().map_err(|_| bad())?),
                None => (body, BigInt::from(1)),
            };
            if gen.is_empty() || !gen.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let gen: usize = gen.parse().map_err(|_| bad())?;
            if gen == 0 {
                return Err(bad());
            }
            Ok((gen, exp))
        })
        .filter(|r| !matches!(r, Ok((_, e)) if e.is_zero()))
        .collect()
}
