//! Seeded random generation shared by the sampled checks and the self-test.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelian::{Monomial, ModuleElement};
use crate::scalar::Coefficient;
use crate::words::Word;

pub type SeededRng = ChaCha8Rng;

/// splitmix64 finalizer; decorrelates `(seed, stream)` pairs.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(seed: u64, stream: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream))
}

pub fn monomial(rng: &mut impl Rng, rank: usize, radius: i64) -> Monomial {
    Monomial::new(
        (0..rank)
            .map(|_| BigInt::from(rng.random_range(-radius..=radius)))
            .collect(),
    )
}

/// A word of at most `max_syllables` syllables, reduced.
pub fn word(rng: &mut impl Rng, rank: usize, max_syllables: usize, max_exp: i64) -> Word {
    let len = rng.random_range(0..=max_syllables);
    let raw: Vec<(usize, i64)> = (0..len)
        .map(|_| {
            let gen = rng.random_range(1..=rank);
            let mut e = rng.random_range(1..=max_exp);
            if rng.random_bool(0.5) {
                e = -e;
            }
            (gen, e)
        })
        .collect();
    Word::reduce(rank, raw).expect("generators drawn in range")
}

/// Nonzero coefficient sampler for either ring.
pub trait SampleCoefficient: Coefficient {
    fn sample_nonzero(rng: &mut impl Rng, bound: i64) -> Self;
}

impl SampleCoefficient for BigInt {
    fn sample_nonzero(rng: &mut impl Rng, bound: i64) -> Self {
        let v = rng.random_range(1..=bound);
        BigInt::from(if rng.random_bool(0.5) { v } else { -v })
    }
}

impl SampleCoefficient for BigRational {
    fn sample_nonzero(rng: &mut impl Rng, bound: i64) -> Self {
        let num = BigInt::sample_nonzero(rng, bound);
        let den = BigInt::from(rng.random_range(1..=bound));
        BigRational::new(num, den)
    }
}

/// A module element with at most `max_terms` terms.
pub fn element<C: SampleCoefficient>(
    rng: &mut impl Rng,
    rank: usize,
    max_terms: usize,
    radius: i64,
    coef_bound: i64,
) -> ModuleElement<C> {
    let k = rng.random_range(0..=max_terms);
    let mut out = ModuleElement::zero(rank);
    for _ in 0..k {
        out.add_term(monomial(rng, rank, radius), C::sample_nonzero(rng, coef_bound));
    }
    out
}
