//! Ideals of `Q[A(n)]` built from central data.
//!
//! Monomials that differ by a central element form a class; the non-central
//! part of an element restricted to one class is `p · x` for a base monomial
//! `x` and a Laurent polynomial `p` in the central generators. An ideal is
//! then a ring ideal `J` of Laurent polynomials (the same on every non-central
//! class) together with a subspace `C₁` of the central span. `J` is stored as
//! the reduced Gröbner basis of its polynomial part, which makes membership a
//! remainder computation and equality a structural comparison.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::{check_rank, ElementRepr, Monomial, ModuleElement};
use crate::error::{Error, Result};
use crate::groebner::{groebner_basis, Exponent, MonomialOrder, Poly};
use crate::liealg::bracket;
use crate::sampling::{self, SampleCoefficient};
use crate::symplectic::{SurfaceKind, SurfaceSignature};

type Q = BigRational;
type RatElement = ModuleElement<Q>;

/// Data `(c_i, q_i)` defining `f(x) = Σ q_i c_i x` on non-central `x`.
///
/// Canonical: the lexicographically least `c_i` is the identity with
/// coefficient one, and the pairs are sorted by monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimitiveLabel {
    pairs: Vec<(Monomial, Q)>,
}

impl PrimitiveLabel {
    /// The label `{(e, 1)}`, for which `f(x) = x`.
    pub fn trivial(rank: usize) -> Self {
        PrimitiveLabel {
            pairs: vec![(Monomial::identity(rank), Q::one())],
        }
    }

    /// Canonical label of arbitrary data. Equal coefficients on repeated
    /// monomials are summed first.
    pub fn new<I>(sig: &SurfaceSignature, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Q)>,
    {
        Ok(Self::canonicalize(sig, pairs)?.0)
    }

    /// Returns `(label, scale, shift)` with
    /// `Σ q_i c_i x = scale · f_label(shift · x)`.
    pub fn canonicalize<I>(sig: &SurfaceSignature, pairs: I) -> Result<(Self, Q, Monomial)>
    where
        I: IntoIterator<Item = (Monomial, Q)>,
    {
        let mut merged: BTreeMap<Monomial, Q> = BTreeMap::new();
        for (c, q) in pairs {
            check_rank(sig.rank(), c.rank())?;
            if !sig.is_central(&c) {
                return Err(Error::Precondition(format!("label monomial {c} is not central")));
            }
            *merged.entry(c).or_insert_with(Q::zero) += q;
        }
        merged.retain(|_, q| !q.is_zero());
        let Some((least, scale)) = merged.iter().next().map(|(c, q)| (c.clone(), q.clone())) else {
            return Err(Error::Precondition("a label needs a nonzero coefficient".into()));
        };
        let back = least.inv();
        let pairs = merged
            .into_iter()
            .map(|(c, q)| (c.mul_unchecked(&back), q / scale.clone()))
            .collect();
        Ok((PrimitiveLabel { pairs }, scale, least))
    }

    pub fn pairs(&self) -> &[(Monomial, Q)] {
        &self.pairs
    }

    pub fn rank(&self) -> usize {
        self.pairs[0].0.rank()
    }

    pub fn is_trivial(&self) -> bool {
        self.pairs.len() == 1
    }

    /// `f(x) = Σ q_i c_i x`.
    pub fn apply(&self, x: &Monomial) -> RatElement {
        let mut out = ModuleElement::zero(self.rank());
        for (c, q) in &self.pairs {
            out.add_term(c.mul_unchecked(x), q.clone());
        }
        out
    }

    /// The label as an element supported on central monomials.
    pub fn as_element(&self) -> RatElement {
        self.apply(&Monomial::identity(self.rank()))
    }

    pub fn from_element(sig: &SurfaceSignature, u: &RatElement) -> Result<Self> {
        Self::new(sig, u.iter().map(|(m, q)| (m.clone(), q.clone())))
    }

    fn laurent(&self, sig: &SurfaceSignature) -> Laurent {
        self.pairs
            .iter()
            .map(|(c, q)| (central_part(sig, c), q.clone()))
            .collect()
    }
}

impl fmt::Display for PrimitiveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (c, q)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({c}, {q})")?;
        }
        f.write_str("}")
    }
}

/// One non-central class of an element: `scale · f_label(base)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardPart {
    pub label: PrimitiveLabel,
    /// The lexicographically least monomial of the class in the support.
    pub base: Monomial,
    pub scale: Q,
}

impl StandardPart {
    pub fn evaluate(&self) -> RatElement {
        self.label.apply(&self.base).scale(&self.scale)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardRepresentation {
    pub parts: Vec<StandardPart>,
    pub central: RatElement,
}

impl StandardRepresentation {
    /// `Σ parts + central`.
    pub fn reassemble(&self) -> RatElement {
        let mut out = self.central.clone();
        for p in &self.parts {
            out = &out + &p.evaluate();
        }
        out
    }
}

/// The representative of `x`'s class with every central coordinate zero.
pub fn class_representative(sig: &SurfaceSignature, x: &Monomial) -> Monomial {
    let g2 = 2 * sig.genus();
    Monomial::new(
        x.exps()
            .iter()
            .enumerate()
            .map(|(i, e)| if i < g2 { e.clone() } else { BigInt::zero() })
            .collect(),
    )
}

fn central_part(sig: &SurfaceSignature, x: &Monomial) -> Vec<BigInt> {
    x.exps()[2 * sig.genus()..].to_vec()
}

/// Splits `u` by central-translation class.
pub fn standard_representation(sig: &SurfaceSignature, u: &RatElement) -> Result<StandardRepresentation> {
    check_rank(sig.rank(), u.rank())?;
    let mut classes: BTreeMap<Monomial, Vec<(Monomial, Q)>> = BTreeMap::new();
    let mut central = ModuleElement::zero(sig.rank());
    for (m, q) in u.iter() {
        if sig.is_central(m) {
            central.add_term(m.clone(), q.clone());
            continue;
        }
        let rep = class_representative(sig, m);
        let offset = m.mul_unchecked(&rep.inv());
        classes.entry(rep).or_default().push((offset, q.clone()));
    }
    let mut parts = Vec::with_capacity(classes.len());
    for (rep, pairs) in classes {
        let (label, scale, shift) = PrimitiveLabel::canonicalize(sig, pairs)?;
        parts.push(StandardPart {
            label,
            base: rep.mul_unchecked(&shift),
            scale,
        });
    }
    Ok(StandardRepresentation { parts, central })
}

/// `[f(x), y] = <x, y> f(xy)`, evaluated on both sides with the bracket.
pub fn primitive_bracket_identity_check(
    sig: &SurfaceSignature,
    label: &PrimitiveLabel,
    x: &Monomial,
    y: &Monomial,
) -> Result<bool> {
    check_rank(sig.rank(), label.rank())?;
    check_rank(sig.rank(), x.rank())?;
    check_rank(sig.rank(), y.rank())?;
    if sig.is_central(x) {
        return Err(Error::Precondition(format!("{x} is central")));
    }
    let lhs = bracket(sig, &label.apply(x), &ModuleElement::monomial(y.clone()))?;
    let p = BigRational::from_integer(sig.pair(x, y)?);
    let rhs = label.apply(&x.mul_unchecked(y)).scale(&p);
    Ok(lhs == rhs)
}

/// Laurent polynomial in the central generators: exponent vector to coefficient.
type Laurent = Vec<(Vec<BigInt>, Q)>;

/// Shifts a Laurent polynomial into the polynomial ring, clearing negative
/// exponents, and prepends `extra` leading zero coordinates.
fn to_poly(p: &Laurent, vars: usize, extra: usize, order: MonomialOrder) -> Result<Poly<Q>> {
    let mins: Vec<BigInt> = (0..vars)
        .map(|i| p.iter().map(|(e, _)| e[i].clone()).min().unwrap_or_default())
        .collect();
    let terms = p
        .iter()
        .map(|(e, q)| {
            let mut exp: Exponent = vec![0; extra];
            for (x, lo) in e.iter().zip(&mins) {
                let shifted = u32::try_from(x - lo).map_err(|_| {
                    Error::Precondition("central exponents too spread out".into())
                })?;
                exp.push(shifted);
            }
            Ok((exp, q.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::from_terms(order, terms))
}

/// Reduced Gröbner basis (grevlex) of `J ∩ Q[t]` where `J` is the ideal of
/// the Laurent ring generated by `gens`: the saturation of the shifted
/// generators by the product of all variables.
fn laurent_ideal_basis(gens: &[Laurent], vars: usize) -> Result<Vec<Poly<Q>>> {
    let order = MonomialOrder::EliminateFirst;
    let mut system = Vec::with_capacity(gens.len() + 1);
    for g in gens {
        let p = to_poly(g, vars, 1, order)?;
        if !p.is_zero() {
            system.push(p);
        }
    }
    if system.is_empty() {
        return Ok(Vec::new());
    }
    // 1 - s · t_1 ⋯ t_r
    system.push(Poly::from_terms(
        order,
        [(vec![0; vars + 1], Q::one()), (vec![1; vars + 1], -Q::one())],
    ));
    let eliminated: Vec<Poly<Q>> = groebner_basis(&system)
        .into_iter()
        .filter(|p| p.terms().iter().all(|(e, _)| e[0] == 0))
        .map(|p| {
            Poly::from_terms(
                MonomialOrder::Grevlex,
                p.terms().iter().map(|(e, q)| (e[1..].to_vec(), q.clone())),
            )
        })
        .collect();
    Ok(groebner_basis(&eliminated))
}

fn laurent_member(basis: &[Poly<Q>], p: &Laurent, vars: usize) -> Result<bool> {
    Ok(to_poly(p, vars, 0, MonomialOrder::Grevlex)?
        .remainder(basis)
        .is_zero())
}

/// Reduced row echelon basis of a subspace of `Q[A(n)]`. Pivots are the
/// lexicographically greatest monomial of each row, with coefficient one;
/// rows are sorted by pivot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchelonBasis {
    rank: usize,
    rows: Vec<RatElement>,
}

impl EchelonBasis {
    pub fn new(rank: usize) -> Self {
        EchelonBasis {
            rank,
            rows: Vec::new(),
        }
    }

    pub fn rows(&self) -> &[RatElement] {
        &self.rows
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    fn pivot(row: &RatElement) -> &Monomial {
        row.iter().last().expect("rows are nonzero").0
    }

    /// Residue of `v` after eliminating every pivot.
    pub fn reduce(&self, v: &RatElement) -> RatElement {
        let mut v = v.clone();
        for row in &self.rows {
            let k = v.coefficient(Self::pivot(row));
            if !k.is_zero() {
                v = &v - &row.scale(&k);
            }
        }
        v
    }

    pub fn contains(&self, v: &RatElement) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &RatElement) -> bool {
        let r = self.reduce(v);
        if r.is_zero() {
            return false;
        }
        let (p, lead) = {
            let (m, c) = r.iter().last().expect("nonzero");
            (m.clone(), c.clone())
        };
        let r = r.scale(&(Q::one() / lead));
        for row in &mut self.rows {
            let k = row.coefficient(&p);
            if !k.is_zero() {
                *row = &*row - &r.scale(&k);
            }
        }
        self.rows.push(r);
        self.rows.sort_by(|a, b| Self::pivot(a).cmp(Self::pivot(b)));
        true
    }
}

/// An ideal of `Q[A(n)]`: `J · x` on every non-central class, plus `C₁`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalIdeal {
    kind: SurfaceKind,
    basis: Vec<Poly<Q>>,
    central: EchelonBasis,
}

/// The four ideals available on a closed surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    Zero,
    /// `Q[{e}]`
    Identity,
    /// `Q[A(n) \ {e}]`
    NonIdentity,
    /// `Q[A(n)]`
    Everything,
}

impl RationalIdeal {
    pub fn zero(sig: &SurfaceSignature) -> Self {
        RationalIdeal {
            kind: sig.kind(),
            basis: Vec::new(),
            central: EchelonBasis::new(sig.rank()),
        }
    }

    pub fn surface(&self) -> SurfaceKind {
        self.kind
    }

    fn signature(&self) -> SurfaceSignature {
        SurfaceSignature::from_kind(self.kind).expect("stored surfaces are valid")
    }

    fn check_surface(&self, sig: &SurfaceSignature) -> Result<()> {
        if sig.kind() != self.kind {
            return Err(Error::InvalidSurface(format!(
                "ideal lives on {}, not {sig}",
                self.signature()
            )));
        }
        Ok(())
    }

    /// Canonical labels whose `f`-images generate the non-central part, one
    /// per Gröbner basis element. Empty iff the non-central part is zero.
    pub fn labels(&self) -> Vec<PrimitiveLabel> {
        let sig = self.signature();
        let g2 = 2 * sig.genus();
        self.basis
            .iter()
            .map(|p| {
                let pairs = p.terms().iter().map(|(e, q)| {
                    let mut exps = vec![BigInt::zero(); g2];
                    exps.extend(e.iter().map(|&x| BigInt::from(x)));
                    (Monomial::new(exps), q.clone())
                });
                PrimitiveLabel::new(&sig, pairs).expect("basis elements are nonzero")
            })
            .collect()
    }

    pub fn central_basis(&self) -> &[RatElement] {
        self.central.rows()
    }

    /// Whether the non-central part is all of `Q[A(n) \ C_S]`.
    pub fn has_full_noncentral_part(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].terms().iter().all(|(e, _)| e.iter().all(|&x| x == 0))
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        if !matches!(self.kind, SurfaceKind::Closed { .. }) {
            return None;
        }
        let identity = self.central.dimension() == 1;
        let rest = self.has_full_noncentral_part();
        Some(match (identity, rest) {
            (false, false) => ClosedForm::Zero,
            (true, false) => ClosedForm::Identity,
            (false, true) => ClosedForm::NonIdentity,
            (true, true) => ClosedForm::Everything,
        })
    }

    /// A random element: a combination of translated `f`-images of the
    /// labels and of the central basis.
    pub fn sample_member(&self, rng: &mut impl Rng, terms: usize, radius: i64) -> RatElement {
        let sig = self.signature();
        let labels = self.labels();
        let mut out = ModuleElement::zero(sig.rank());
        for _ in 0..terms {
            if !labels.is_empty() && (self.central.dimension() == 0 || rng.random_bool(0.7)) {
                let label = &labels[rng.random_range(0..labels.len())];
                let x = sample_noncentral(&sig, rng, radius);
                out = &out + &label.apply(&x).scale(&Q::sample_nonzero(rng, 5));
            } else if self.central.dimension() > 0 {
                let row = &self.central.rows()[rng.random_range(0..self.central.dimension())];
                out = &out + &row.scale(&Q::sample_nonzero(rng, 5));
            }
        }
        out
    }

    pub fn to_repr(&self) -> IdealRepr {
        IdealRepr {
            surface: self.kind,
            labels: self.labels().iter().map(|l| l.as_element().to_repr()).collect(),
            central_basis: self.central.rows().iter().map(ModuleElement::to_repr).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_repr()).expect("ideal serializes")
    }

    /// Rebuilds an ideal from its wire form; labels and central vectors are
    /// treated as generators, so non-canonical input is accepted.
    pub fn from_repr(repr: &IdealRepr) -> Result<Self> {
        let sig = SurfaceSignature::from_kind(repr.surface)?;
        let n = sig.rank();
        let mut labels = Vec::with_capacity(repr.labels.len());
        for l in &repr.labels {
            let u = RatElement::from_repr(l, Some(n))?;
            labels.push(PrimitiveLabel::from_element(&sig, &u)?);
        }
        let mut central = EchelonBasis::new(n);
        for c in &repr.central_basis {
            let u = RatElement::from_repr(c, Some(n))?;
            if u.iter().any(|(m, _)| !sig.is_central(m)) {
                return Err(Error::Parse("central basis vectors must be central".into()));
            }
            central.insert(&u);
        }
        let laurents: Vec<Laurent> = labels.iter().map(|l| l.laurent(&sig)).collect();
        Ok(RationalIdeal {
            kind: sig.kind(),
            basis: laurent_ideal_basis(&laurents, sig.central_rank())?,
            central,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: IdealRepr = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_repr(&repr)
    }
}

fn sample_noncentral(sig: &SurfaceSignature, rng: &mut impl Rng, radius: i64) -> Monomial {
    let radius = radius.max(1);
    loop {
        let x = sampling::monomial(rng, sig.rank(), radius);
        if !sig.is_central(&x) {
            return x;
        }
    }
}

/// Wire form: `{"surface":{..},"labels":[element..],"central_basis":[element..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealRepr {
    pub surface: SurfaceKind,
    pub labels: Vec<ElementRepr>,
    pub central_basis: Vec<ElementRepr>,
}

/// The smallest ideal containing `generators`.
pub fn ideal_closure(sig: &SurfaceSignature, generators: &[RatElement]) -> Result<RationalIdeal> {
    let mut laurents = Vec::new();
    let mut central = EchelonBasis::new(sig.rank());
    for u in generators {
        let rep = standard_representation(sig, u)?;
        for part in &rep.parts {
            laurents.push(part.label.laurent(sig));
        }
        central.insert(&rep.central);
    }
    Ok(RationalIdeal {
        kind: sig.kind(),
        basis: laurent_ideal_basis(&laurents, sig.central_rank())?,
        central,
    })
}

/// [`ideal_closure`] followed by a sampled audit: every generator must be a
/// member and brackets of random members with random monomials must stay
/// inside. An audit failure is reported as a violated precondition.
pub fn ideal_closure_verified(
    sig: &SurfaceSignature,
    generators: &[RatElement],
    samples: usize,
    seed: u64,
) -> Result<RationalIdeal> {
    let ideal = ideal_closure(sig, generators)?;
    for g in generators {
        if !contains(sig, &ideal, g)? {
            return Err(Error::Precondition(format!("closure misses generator {g}")));
        }
    }
    let mut rng = sampling::rng(seed, 0);
    for _ in 0..samples {
        let u = ideal.sample_member(&mut rng, 3, 3);
        let v = ModuleElement::monomial(sampling::monomial(&mut rng, sig.rank(), 3));
        let b = bracket(sig, &u, &v)?;
        if !contains(sig, &ideal, &b)? {
            return Err(Error::Precondition(format!(
                "closure is not bracket-closed: [{u}, {v}] escapes"
            )));
        }
    }
    Ok(ideal)
}

pub fn contains(sig: &SurfaceSignature, ideal: &RationalIdeal, u: &RatElement) -> Result<bool> {
    ideal.check_surface(sig)?;
    let rep = standard_representation(sig, u)?;
    for part in &rep.parts {
        if !laurent_member(&ideal.basis, &part.label.laurent(sig), sig.central_rank())? {
            return Ok(false);
        }
    }
    Ok(ideal.central.contains(&rep.central))
}

pub fn ideals_equal(left: &RationalIdeal, right: &RationalIdeal) -> bool {
    left == right
}

/// Closes random sets of one or two monomial generators (the identity among
/// them with positive probability) and confirms each closure is one of the
/// three nonzero closed-surface ideals, matching what its generators predict.
pub fn classify_closed_check(sig: &SurfaceSignature, samples: usize, seed: u64) -> Result<bool> {
    if !sig.is_closed() {
        return Err(Error::Precondition("classification needs a closed surface".into()));
    }
    let mut rng = sampling::rng(seed, 0);
    for _ in 0..samples {
        let count = rng.random_range(1..=2);
        let mut gens = Vec::with_capacity(count);
        let (mut has_identity, mut has_other) = (false, false);
        for _ in 0..count {
            let x = if rng.random_bool(0.3) {
                Monomial::identity(sig.rank())
            } else {
                sampling::monomial(&mut rng, sig.rank(), 3)
            };
            if x.is_identity() {
                has_identity = true;
            } else {
                has_other = true;
            }
            gens.push(ModuleElement::term(x, Q::sample_nonzero(&mut rng, 5)));
        }
        let expected = match (has_identity, has_other) {
            (true, false) => ClosedForm::Identity,
            (false, true) => ClosedForm::NonIdentity,
            _ => ClosedForm::Everything,
        };
        if ideal_closure(sig, &gens)?.closed_form() != Some(expected) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rational coefficient helper for callers outside the crate.
pub fn rational(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl fmt::Display for RationalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels().iter().map(ToString::to_string).collect();
        let central: Vec<String> = self.central.rows().iter().map(ToString::to_string).collect();
        write!(f, "labels [{}]; central [{}]", labels.join("; "), central.join("; "))
    }
}
