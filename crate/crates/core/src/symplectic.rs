//! Surface signatures and the symplectic pairing on `A(n)`.
//!
//! Generators are numbered so that `<a_{2t-1}, a_{2t}> = 1` for `t = 1..g`
//! and every other pair of distinct generators pairs to zero. For a surface
//! with boundary the last `b - 1` generators therefore span the center.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::abelian::{check_rank, re, Monomial};
use crate::error::{Error, Result};
use crate::words::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SurfaceKind {
    Closed { genus: usize },
    Boundary { genus: usize, boundary: usize },
}

/// `A[j][i] = <a_{i+1}, a_{j+1}>` (zero-based storage).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairingMatrix {
    entries: Vec<Vec<i8>>,
}

impl PairingMatrix {
    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    /// `<a_i, a_j>` for 1-based generator indices.
    pub fn generator_pairing(&self, i: usize, j: usize) -> i8 {
        self.entries[j - 1][i - 1]
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.entries
    }
}

/// A compact orientable surface, with its pairing matrix cached.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceSignature {
    kind: SurfaceKind,
    matrix: PairingMatrix,
    symmetric_fault: bool,
}

impl SurfaceSignature {
    pub fn closed(genus: usize) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidSurface(
                "closed surfaces need genus at least 1".into(),
            ));
        }
        Ok(Self::build(SurfaceKind::Closed { genus }, false))
    }

    pub fn with_boundary(genus: usize, boundary: usize) -> Result<Self> {
        if boundary == 0 {
            return Err(Error::InvalidSurface(
                "a bounded surface needs at least one boundary component".into(),
            ));
        }
        if 2 * genus + boundary - 1 == 0 {
            return Err(Error::InvalidSurface(
                "the disk has trivial fundamental group".into(),
            ));
        }
        Ok(Self::build(SurfaceKind::Boundary { genus, boundary }, false))
    }

    pub fn from_kind(kind: SurfaceKind) -> Result<Self> {
        match kind {
            SurfaceKind::Closed { genus } => Self::closed(genus),
            SurfaceKind::Boundary { genus, boundary } => Self::with_boundary(genus, boundary),
        }
    }

    /// A deliberately broken copy whose pairing is symmetric instead of
    /// antisymmetric. Used for mutation testing of the property suites.
    #[doc(hidden)]
    pub fn with_symmetric_fault(&self) -> Self {
        Self::build(self.kind, true)
    }

    fn build(kind: SurfaceKind, symmetric_fault: bool) -> Self {
        let (genus, rank) = match kind {
            SurfaceKind::Closed { genus } => (genus, 2 * genus),
            SurfaceKind::Boundary { genus, boundary } => (genus, 2 * genus + boundary - 1),
        };
        let mut entries = vec![vec![0i8; rank]; rank];
        for t in 0..genus {
            let (odd, even) = (2 * t, 2 * t + 1);
            // <a_odd, a_even> = 1 lives at A[even][odd]
            entries[even][odd] = 1;
            entries[odd][even] = if symmetric_fault { 1 } else { -1 };
        }
        SurfaceSignature {
            kind,
            matrix: PairingMatrix { entries },
            symmetric_fault,
        }
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn genus(&self) -> usize {
        match self.kind {
            SurfaceKind::Closed { genus } | SurfaceKind::Boundary { genus, .. } => genus,
        }
    }

    /// Number of generators `n`.
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Number of central generators, `n - 2g`.
    pub fn central_rank(&self) -> usize {
        self.rank() - 2 * self.genus()
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.kind, SurfaceKind::Closed { .. })
    }

    pub fn pairing_matrix(&self) -> &PairingMatrix {
        &self.matrix
    }

    /// `<x, y> = Σ_t (x_{2t-1} y_{2t} - x_{2t} y_{2t-1})`.
    pub fn pair(&self, x: &Monomial, y: &Monomial) -> Result<BigInt> {
        check_rank(self.rank(), x.rank())?;
        check_rank(self.rank(), y.rank())?;
        Ok(self.pair_unchecked(x, y))
    }

    pub(crate) fn pair_unchecked(&self, x: &Monomial, y: &Monomial) -> BigInt {
        let (x, y) = (x.exps(), y.exps());
        let mut total = BigInt::zero();
        for t in 0..self.genus() {
            let (o, e) = (2 * t, 2 * t + 1);
            total += &x[o] * &y[e];
            if self.symmetric_fault {
                total += &x[e] * &y[o];
            } else {
                total -= &x[e] * &y[o];
            }
        }
        total
    }

    /// `M(x) = A · X`, so that `<x, y> = Y · M(x)`.
    pub fn m_vector(&self, x: &Monomial) -> Result<Vec<BigInt>> {
        check_rank(self.rank(), x.rank())?;
        Ok(self
            .matrix
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x.exps())
                    .filter(|(a, _)| **a != 0)
                    .map(|(a, xi)| BigInt::from(*a) * xi)
                    .sum()
            })
            .collect())
    }

    /// Generators of the center `C_S`: empty for closed surfaces, otherwise
    /// `a_{2g+1}, ..., a_n`.
    pub fn center_generators(&self) -> Vec<Monomial> {
        if self.is_closed() {
            return Vec::new();
        }
        (2 * self.genus() + 1..=self.rank())
            .map(|j| Monomial::generator(j, self.rank()))
            .collect()
    }

    /// `x` pairs to zero with everything iff its first `2g` exponents vanish.
    pub fn is_central(&self, x: &Monomial) -> bool {
        debug_assert_eq!(x.rank(), self.rank());
        x.exps()[..2 * self.genus()].iter().all(Zero::is_zero)
    }

    /// The total signed intersection number of two loops, computed through
    /// their abelianizations.
    pub fn intersection_pairing(&self, u: &Word, v: &Word) -> Result<BigInt> {
        let n = self.rank();
        Ok(self.pair_unchecked(&re(u, n)?, &re(v, n)?))
    }
}

impl fmt::Display for SurfaceSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SurfaceKind::Closed { genus } => write!(f, "closed genus {genus}"),
            SurfaceKind::Boundary { genus, boundary } => {
                write!(f, "genus {genus} with {boundary} boundary components")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: &[i64]) -> Monomial {
        Monomial::from_ints(v)
    }

    #[test]
    fn pairing_matrix_examples() {
        let torus = SurfaceSignature::closed(1).unwrap();
        assert_eq!(torus.pairing_matrix().rows(), &[vec![0, -1], vec![1, 0]]);
        assert_eq!(torus.pairing_matrix().generator_pairing(1, 2), 1);
        assert_eq!(torus.pairing_matrix().generator_pairing(2, 1), -1);

        let annulus = SurfaceSignature::with_boundary(0, 2).unwrap();
        assert_eq!(annulus.pairing_matrix().rows(), &[vec![0]]);

        let s = SurfaceSignature::with_boundary(1, 2).unwrap();
        assert_eq!(s.rank(), 3);
        assert_eq!(
            s.pairing_matrix().rows(),
            &[vec![0, -1, 0], vec![1, 0, 0], vec![0, 0, 0]]
        );
    }

    #[test]
    fn invalid_surfaces() {
        assert!(SurfaceSignature::closed(0).is_err());
        assert!(SurfaceSignature::with_boundary(0, 1).is_err());
        assert!(SurfaceSignature::with_boundary(2, 0).is_err());
        assert_eq!(SurfaceSignature::with_boundary(2, 1).unwrap().rank(), 4);
    }

    #[test]
    fn pair_examples() {
        let torus = SurfaceSignature::closed(1).unwrap();
        assert_eq!(torus.pair(&m(&[1, 0]), &m(&[0, 1])).unwrap(), BigInt::from(1));
        assert_eq!(torus.pair(&m(&[2, 1]), &m(&[2, 1])).unwrap(), BigInt::zero());
        assert_eq!(torus.pair(&m(&[2, 1]), &m(&[1, 3])).unwrap(), BigInt::from(5));
        assert!(torus.pair(&m(&[1]), &m(&[0, 1])).is_err());
    }

    #[test]
    fn m_vector_examples() {
        let torus = SurfaceSignature::closed(1).unwrap();
        let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(torus.m_vector(&m(&[2, 1])).unwrap(), big(&[-1, 2]));
        assert_eq!(torus.m_vector(&m(&[0, 0])).unwrap(), big(&[0, 0]));
        let s = SurfaceSignature::with_boundary(1, 2).unwrap();
        assert_eq!(s.m_vector(&m(&[0, 0, 5])).unwrap(), big(&[0, 0, 0]));
    }

    #[test]
    fn center_examples() {
        assert!(SurfaceSignature::closed(2).unwrap().center_generators().is_empty());
        let s = SurfaceSignature::with_boundary(1, 3).unwrap();
        assert_eq!(
            s.center_generators(),
            vec![m(&[0, 0, 1, 0]), m(&[0, 0, 0, 1])]
        );
        let s = SurfaceSignature::with_boundary(1, 2).unwrap();
        assert!(s.is_central(&m(&[0, 0, 7])));
        assert!(!s.is_central(&m(&[1, 0, 0])));
    }

    #[test]
    fn intersection_pairing_examples() {
        let torus = SurfaceSignature::closed(1).unwrap();
        let w = |t: &str| Word::parse(t, 2).unwrap();
        assert_eq!(torus.intersection_pairing(&w("a1"), &w("a2")).unwrap(), BigInt::from(1));
        let x = w("a1^2 a2 a1^-1 a2^4");
        assert!(torus.intersection_pairing(&x, &x).unwrap().is_zero());
        assert_eq!(
            torus.intersection_pairing(&w("a1^2 a2"), &w("a1 a2^3")).unwrap(),
            BigInt::from(5)
        );
    }

    #[test]
    fn surface_kind_json() {
        let s = SurfaceSignature::with_boundary(1, 2).unwrap();
        assert_eq!(
            serde_json::to_string(&s.kind()).unwrap(),
            r#"{"kind":"boundary","genus":1,"boundary":2}"#
        );
    }
}
