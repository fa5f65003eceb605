//! Gröbner bases for polynomial ideals over a field.
//!
//! Small and exact: Buchberger's algorithm with the coprime-leading-term
//! criterion, producing reduced, monic bases. Used to decide membership in
//! ideals of Laurent polynomial rings through saturation.

use std::cmp::Ordering;

use crate::scalar::Field;

pub type Exponent = Vec<u32>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic.
    Grevlex,
    /// Degree in the first variable decides; ties fall back to grevlex on the
    /// remaining variables. Eliminates the first variable.
    EliminateFirst,
}

impl MonomialOrder {
    pub fn cmp(self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Grevlex => grevlex(a, b),
            MonomialOrder::EliminateFirst => a[0].cmp(&b[0]).then_with(|| grevlex(&a[1..], &b[1..])),
        }
    }
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            match x.cmp(y) {
                Ordering::Equal => continue,
                other => return other.reverse(),
            }
        }
        Ordering::Equal
    })
}

/// A polynomial with terms sorted by decreasing monomial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly<F> {
    order: MonomialOrder,
    terms: Vec<(Exponent, F)>,
}

impl<F: Field> Poly<F> {
    pub fn zero(order: MonomialOrder) -> Self {
        Poly {
            order,
            terms: Vec::new(),
        }
    }

    /// Combines like terms and drops zeros.
    pub fn from_terms<I>(order: MonomialOrder, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, F)>,
    {
        let mut terms: Vec<(Exponent, F)> = terms.into_iter().collect();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut merged: Vec<(Exponent, F)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match merged.last_mut() {
                Some((last, acc)) if *last == e => *acc = acc.clone() + c,
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        Poly {
            order,
            terms: merged,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Exponent, F)] {
        &self.terms
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    fn leading(&self) -> &(Exponent, F) {
        &self.terms[0]
    }

    pub fn monic(&self) -> Self {
        match self.terms.first() {
            None => self.clone(),
            Some((_, lc)) => {
                let lc = lc.clone();
                Poly {
                    order: self.order,
                    terms: self
                        .terms
                        .iter()
                        .map(|(e, c)| (e.clone(), c.clone() / lc.clone()))
                        .collect(),
                }
            }
        }
    }

    /// `self - coef * x^shift * other`.
    fn sub_scaled(&self, coef: &F, shift: &[u32], other: &Poly<F>) -> Poly<F> {
        let order = self.order;
        let shifted = other.terms.iter().map(|(e, c)| {
            let e: Exponent = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            (e, -(c.clone() * coef.clone()))
        });
        // both sides are sorted and shifting preserves the order, so merge
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut left = self.terms.iter().cloned().peekable();
        let mut right = shifted.peekable();
        loop {
            let next = match (left.peek(), right.peek()) {
                (None, None) => break,
                (Some(_), None) => left.next(),
                (None, Some(_)) => right.next(),
                (Some(a), Some(b)) => match order.cmp(&a.0, &b.0) {
                    Ordering::Greater => left.next(),
                    Ordering::Less => right.next(),
                    Ordering::Equal => {
                        let (e, x) = left.next().expect("peeked");
                        let (_, y) = right.next().expect("peeked");
                        Some((e, x + y))
                    }
                },
            };
            if let Some((e, c)) = next {
                if !c.is_zero() {
                    out.push((e, c));
                }
            }
        }
        Poly { order, terms: out }
    }

    /// Full reduction modulo `basis`.
    pub fn remainder(&self, basis: &[Poly<F>]) -> Poly<F> {
        let mut p = self.clone();
        let mut rem = Vec::new();
        while let Some((lead, lc)) = p.terms.first().cloned() {
            let divisor = basis.iter().find(|g| divides(&g.leading().0, &lead));
            match divisor {
                Some(g) => {
                    let (ge, gc) = g.leading();
                    let shift: Exponent = lead.iter().zip(ge).map(|(a, b)| a - b).collect();
                    p = p.sub_scaled(&(lc / gc.clone()), &shift, g);
                }
                None => {
                    rem.push((lead, lc));
                    p.terms.remove(0);
                }
            }
        }
        Poly {
            order: self.order,
            terms: rem,
        }
    }

    fn s_polynomial(&self, other: &Poly<F>) -> Poly<F> {
        let (a, ac) = self.leading();
        let (b, bc) = other.leading();
        let lcm: Exponent = a.iter().zip(b).map(|(x, y)| *x.max(y)).collect();
        let sa: Exponent = lcm.iter().zip(a).map(|(l, x)| l - x).collect();
        let sb: Exponent = lcm.iter().zip(b).map(|(l, x)| l - x).collect();
        let left = Poly::zero(self.order).sub_scaled(&-(F::one() / ac.clone()), &sa, self);
        left.sub_scaled(&(F::one() / bc.clone()), &sb, other)
    }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

/// The reduced Gröbner basis of the ideal generated by `generators`, monic and
/// sorted by increasing leading monomial. Empty for the zero ideal.
pub fn groebner_basis<F: Field>(generators: &[Poly<F>]) -> Vec<Poly<F>> {
    let mut basis: Vec<Poly<F>> = generators
        .iter()
        .filter(|g| !g.is_zero())
        .map(Poly::monic)
        .collect();
    let mut pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .collect();
    while let Some((i, j)) = pairs.pop() {
        if coprime(&basis[i].leading().0, &basis[j].leading().0) {
            continue;
        }
        let r = basis[i].s_polynomial(&basis[j]).remainder(&basis);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(r.monic());
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    reduce_basis(basis)
}

fn reduce_basis<F: Field>(basis: Vec<Poly<F>>) -> Vec<Poly<F>> {
    // drop elements whose leading monomial is divisible by another's
    let mut minimal: Vec<Poly<F>> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            j != i
                && divides(&h.leading().0, &g.leading().0)
                && (h.leading().0 != g.leading().0 || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced: Vec<Poly<F>> = (0..minimal.len())
        .map(|i| {
            let others: Vec<Poly<F>> = minimal
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| p.clone())
                .collect();
            let g = &minimal[i];
            let tail = Poly {
                order: g.order,
                terms: g.terms[1..].to_vec(),
            };
            let mut terms = vec![g.leading().clone()];
            terms.extend(tail.remainder(&others).terms);
            Poly {
                order: g.order,
                terms,
            }
            .monic()
        })
        .collect();
    let order = reduced.first().map(|p| p.order);
    if let Some(order) = order {
        reduced.sort_by(|a, b| order.cmp(&a.leading().0, &b.leading().0));
    }
    reduced
}
