//! The abelianization `A(n)` and the modules `Z[A(n)]`, `Q[A(n)]`.
//!
//! A [`Monomial`] is an exponent vector in `Z^n`; the group law of `A(n)` is
//! componentwise addition. A [`ModuleElement`] is a finitely supported map
//! from monomials to exact coefficients, kept sorted and free of zero terms
//! so that structural equality is equality in the module.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Number;

use crate::error::{Error, Result};
use crate::scalar::{promote, Coefficient, Ring};
use crate::words::Word;

/// An element of `A(n)`: the exponent of `a_j` sits at position `j - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<BigInt>);

impl Monomial {
    pub fn new(exps: Vec<BigInt>) -> Self {
        Monomial(exps)
    }

    pub fn from_ints(exps: &[i64]) -> Self {
        Monomial(exps.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn identity(rank: usize) -> Self {
        Monomial(vec![BigInt::zero(); rank])
    }

    /// The generator `a_gen` (1-based).
    pub fn generator(gen: usize, rank: usize) -> Self {
        let mut exps = vec![BigInt::zero(); rank];
        exps[gen - 1] = BigInt::one();
        Monomial(exps)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn exps(&self) -> &[BigInt] {
        &self.0
    }

    /// Exponent of `a_gen` (1-based).
    pub fn exp(&self, gen: usize) -> &BigInt {
        &self.0[gen - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Sum of absolute exponents.
    pub fn norm(&self) -> BigInt {
        self.0.iter().map(num_traits::Signed::abs).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        check_rank(self.rank(), other.rank())?;
        Ok(Monomial(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn inv(&self) -> Monomial {
        Monomial(self.0.iter().map(|a| -a).collect())
    }

    pub fn pow(&self, k: &BigInt) -> Monomial {
        Monomial(self.0.iter().map(|a| a * k).collect())
    }

    pub(crate) fn mul_unchecked(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.rank(), other.rank());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Serialized as a JSON array of exact integers.
impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for e in &self.0 {
            seq.serialize_element(&big_to_number(e))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let nums = Vec::<Number>::deserialize(d)?;
        nums.iter()
            .map(number_to_big)
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
            .map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Monomial {
    type Err = Error;

    /// Parses the tuple form `(e1,...,en)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed exponent tuple `{s}`"));
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        if inner.trim().is_empty() {
            return Ok(Monomial(Vec::new()));
        }
        inner
            .split(',')
            .map(|t| t.trim().parse::<BigInt>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
    }
}

pub(crate) fn check_rank(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::RankMismatch { left, right })
    }
}

/// Exponent-sum vector of a word over `rank` generators.
pub fn re(w: &Word, rank: usize) -> Result<Monomial> {
    let mut exps = vec![BigInt::zero(); rank];
    for l in w.letters() {
        if l.gen == 0 || l.gen > rank {
            return Err(Error::GeneratorOutOfRange { gen: l.gen, rank });
        }
        exps[l.gen - 1] += &l.exp;
    }
    Ok(Monomial(exps))
}

/// Linear extension of [`re`] to formal sums of words.
pub fn ab<C: Coefficient>(sum: &[(C, Word)], rank: usize) -> Result<ModuleElement<C>> {
    let mut out = ModuleElement::zero(rank);
    for (coef, w) in sum {
        out.add_term(re(w, rank)?, coef.clone());
    }
    Ok(out)
}

/// Abelianized exponent of the distinguished generator `a_{c_index}` in `w`.
pub fn exp_c(w: &Word, c_index: usize) -> Result<BigInt> {
    if c_index == 0 || c_index > w.rank() {
        return Err(Error::GeneratorOutOfRange {
            gen: c_index,
            rank: w.rank(),
        });
    }
    Ok(w.letters()
        .iter()
        .filter(|l| l.gen == c_index)
        .map(|l| l.exp.clone())
        .sum())
}

/// A finite formal sum `Σ coef · monomial` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleElement<C> {
    rank: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> ModuleElement<C> {
    pub fn zero(rank: usize) -> Self {
        ModuleElement {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(monomial: Monomial, coef: C) -> Self {
        let mut out = ModuleElement::zero(monomial.rank());
        out.add_term(monomial, coef);
        out
    }

    pub fn monomial(monomial: Monomial) -> Self {
        ModuleElement::term(monomial, C::one())
    }

    /// Builds an element from `(monomial, coefficient)` pairs, merging repeats.
    pub fn from_terms<I>(rank: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, C)>,
    {
        let mut out = ModuleElement::zero(rank);
        for (m, c) in terms {
            check_rank(rank, m.rank())?;
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn ring(&self) -> Ring {
        C::RING
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending lexicographic monomial order.
    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, monomial: Monomial, coef: C) {
        debug_assert_eq!(monomial.rank(), self.rank);
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coef;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return ModuleElement::zero(self.rank);
        }
        ModuleElement {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * k.clone()))
                .collect(),
        }
    }

    /// Multiplies every monomial by `shift` (translation in `A(n)`).
    pub fn translate(&self, shift: &Monomial) -> Self {
        ModuleElement {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul_unchecked(shift), c.clone()))
                .collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_rank(self.rank, other.rank)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn to_repr(&self) -> ElementRepr {
        ElementRepr {
            ring: C::RING,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermRepr {
                    exp: m.exps().iter().map(big_to_number).collect(),
                    coef: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_repr()).expect("element serializes")
    }

    /// Reads an element whose ring tag matches `C`. `rank` is required when
    /// the element may be zero; otherwise it is checked against the terms.
    pub fn from_repr(repr: &ElementRepr, rank: Option<usize>) -> Result<Self> {
        if repr.ring != C::RING {
            return Err(Error::Parse(format!(
                "expected a {} element, found ring {}",
                C::RING,
                repr.ring
            )));
        }
        let rank = match (rank, repr.terms.first()) {
            (Some(r), _) => r,
            (None, Some(t)) => t.exp.len(),
            (None, None) => {
                return Err(Error::Parse(
                    "cannot infer the rank of an empty element".into(),
                ))
            }
        };
        let mut out = ModuleElement::zero(rank);
        for t in &repr.terms {
            check_rank(rank, t.exp.len())?;
            let exps = t
                .exp
                .iter()
                .map(number_to_big)
                .collect::<Result<Vec<_>>>()?;
            out.add_term(Monomial(exps), C::parse_coefficient(&t.coef)?);
        }
        Ok(out)
    }

    pub fn from_json(text: &str, rank: Option<usize>) -> Result<Self> {
        let repr: ElementRepr =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        ModuleElement::from_repr(&repr, rank)
    }
}

impl ModuleElement<BigInt> {
    /// The image of an integer element in `Q[A(n)]`.
    pub fn to_rational(&self) -> ModuleElement<BigRational> {
        ModuleElement {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), promote(c)))
                .collect(),
        }
    }
}

impl<C: Coefficient> Add for &ModuleElement<C> {
    type Output = ModuleElement<C>;

    /// Panics on rank mismatch; use [`ModuleElement::checked_add`] otherwise.
    fn add(self, rhs: Self) -> ModuleElement<C> {
        self.checked_add(rhs).expect("module elements of equal rank")
    }
}

impl<C: Coefficient> Add for ModuleElement<C> {
    type Output = ModuleElement<C>;

    fn add(self, rhs: Self) -> ModuleElement<C> {
        &self + &rhs
    }
}

impl<C: Coefficient> Neg for &ModuleElement<C> {
    type Output = ModuleElement<C>;

    fn neg(self) -> ModuleElement<C> {
        ModuleElement {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl<C: Coefficient> Neg for ModuleElement<C> {
    type Output = ModuleElement<C>;

    fn neg(self) -> ModuleElement<C> {
        -&self
    }
}

impl<C: Coefficient> Sub for &ModuleElement<C> {
    type Output = ModuleElement<C>;

    fn sub(self, rhs: Self) -> ModuleElement<C> {
        self + &(-rhs)
    }
}

impl<C: Coefficient> Sub for ModuleElement<C> {
    type Output = ModuleElement<C>;

    fn sub(self, rhs: Self) -> ModuleElement<C> {
        &self - &rhs
    }
}

impl<C: Coefficient> fmt::Display for ModuleElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*{m}")?;
        }
        Ok(())
    }
}

/// Wire form of a module element:
/// `{"ring":"Z"|"Q","terms":[{"exp":[..],"coef":".."}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRepr {
    pub ring: Ring,
    pub terms: Vec<TermRepr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRepr {
    pub exp: Vec<Number>,
    pub coef: String,
}

/// A module element whose ring is only known at run time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyElement {
    Integer(ModuleElement<BigInt>),
    Rational(ModuleElement<BigRational>),
}

impl AnyElement {
    pub fn from_json(text: &str, rank: Option<usize>) -> Result<Self> {
        let repr: ElementRepr =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(match repr.ring {
            Ring::Integer => AnyElement::Integer(ModuleElement::from_repr(&repr, rank)?),
            Ring::Rational => AnyElement::Rational(ModuleElement::from_repr(&repr, rank)?),
        })
    }

    pub fn rank(&self) -> usize {
        match self {
            AnyElement::Integer(e) => e.rank(),
            AnyElement::Rational(e) => e.rank(),
        }
    }

    /// Explicit promotion into `Q[A(n)]`.
    pub fn into_rational(self) -> ModuleElement<BigRational> {
        match self {
            AnyElement::Integer(e) => e.to_rational(),
            AnyElement::Rational(e) => e,
        }
    }
}

pub(crate) fn big_to_number(n: &BigInt) -> Number {
    Number::from_str(&n.to_string()).expect("integers are valid JSON numbers")
}

pub(crate) fn number_to_big(n: &Number) -> Result<BigInt> {
    n.to_string()
        .parse()
        .map_err(|_| Error::Parse(format!("exponent `{n}` is not an integer")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(text: &str, rank: usize) -> Word {
        Word::parse(text, rank).unwrap()
    }

    #[test]
    fn re_examples() {
        assert_eq!(re(&Word::identity(3), 3).unwrap(), Monomial::identity(3));
        assert_eq!(
            re(&word("a1^2 a2^-3", 2), 2).unwrap(),
            Monomial::from_ints(&[2, -3])
        );
        assert_eq!(
            re(&word("a1 a2 a1^-1", 2), 2).unwrap(),
            Monomial::from_ints(&[0, 1])
        );
        assert!(re(&word("a3", 3), 2).is_err());
    }

    #[test]
    fn ab_examples() {
        let cancel = ab(
            &[
                (BigInt::from(1), word("a1 a2 a1^-1", 2)),
                (BigInt::from(-1), word("a2", 2)),
            ],
            2,
        )
        .unwrap();
        assert!(cancel.is_zero());

        let three = ab(&[(BigInt::from(3), word("a1", 2))], 2).unwrap();
        assert_eq!(three.coefficient(&Monomial::from_ints(&[1, 0])), BigInt::from(3));
        assert_eq!(three.len(), 1);

        let merged = ab(
            &[(BigInt::from(1), word("a1", 2)), (BigInt::from(2), word("a1", 2))],
            2,
        )
        .unwrap();
        assert_eq!(merged, three);
    }

    #[test]
    fn exp_c_examples() {
        let w = word("a1^3 a2 a1^-1", 2);
        assert_eq!(exp_c(&w, 1).unwrap(), BigInt::from(2));
        assert_eq!(exp_c(&word("a2", 2), 1).unwrap(), BigInt::zero());
        let big = crate::scalar::pow2(70);
        let w = Word::reduce(2, [(1, big.clone())]).unwrap();
        assert_eq!(exp_c(&w, 1).unwrap(), big);
        assert!(exp_c(&w, 3).is_err());
    }

    #[test]
    fn monomial_group_law() {
        let x = Monomial::from_ints(&[1, 2]);
        let y = Monomial::from_ints(&[0, -2]);
        assert_eq!(x.mul(&y).unwrap(), Monomial::from_ints(&[1, 0]));
        assert_eq!(Monomial::from_ints(&[2, -3]).inv(), Monomial::from_ints(&[-2, 3]));
        assert!(x.mul(&x.inv()).unwrap().is_identity());
        assert!(x.mul(&Monomial::identity(3)).is_err());
    }

    #[test]
    fn json_wire_format() {
        let e = ModuleElement::from_terms(
            2,
            [
                (Monomial::from_ints(&[3, 4]), BigRational::new(5.into(), 2.into())),
                (Monomial::from_ints(&[-1, 0]), BigRational::from_integer(7.into())),
            ],
        )
        .unwrap();
        let text = e.to_json();
        assert_eq!(
            text,
            r#"{"ring":"Q","terms":[{"exp":[-1,0],"coef":"7"},{"exp":[3,4],"coef":"5/2"}]}"#
        );
        let back = ModuleElement::<BigRational>::from_json(&text, None).unwrap();
        assert_eq!(back, e);
        assert_eq!(back.to_json(), text);

        assert!(ModuleElement::<BigInt>::from_json(&text, None).is_err());
        assert!(ModuleElement::<BigInt>::from_json(r#"{"ring":"Z","terms":[]}"#, None).is_err());
        let zero = ModuleElement::<BigInt>::from_json(r#"{"ring":"Z","terms":[]}"#, Some(4)).unwrap();
        assert!(zero.is_zero() && zero.rank() == 4);
    }

    #[test]
    fn json_exponents_are_arbitrary_precision() {
        let big = crate::scalar::pow2(80);
        let e = ModuleElement::term(Monomial::new(vec![big.clone(), -big]), BigInt::from(1));
        let text = e.to_json();
        assert!(text.contains("1208925819614629174706176"));
        assert_eq!(ModuleElement::<BigInt>::from_json(&text, None).unwrap(), e);
    }

    #[test]
    fn promotion_is_explicit() {
        let z = ModuleElement::term(Monomial::from_ints(&[1]), BigInt::from(4));
        let q = z.to_rational();
        assert_eq!(q.ring(), Ring::Rational);
        assert_eq!(q.coefficient(&Monomial::from_ints(&[1])), BigRational::from_integer(4.into()));
        let any = AnyElement::from_json(&z.to_json(), None).unwrap();
        assert_eq!(any.into_rational(), q);
    }
}
