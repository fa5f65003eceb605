//! Exact computations in the abelianized Goldman Lie algebra of a compact
//! orientable surface.
//!
//! Loops are words in a free group, abelianized to exponent vectors in
//! `A(n) = Z^n`. The bracket `[x, y] = <x, y> xy` on `Z[A(n)]` and `Q[A(n)]`
//! uses the symplectic intersection pairing of the surface. On top of that
//! sit ideal constructions over `Z` and `Q` and the descending chain of
//! quotients `Z/2^n * F` that separates conjugacy classes.
//!
//! Coefficient-generic code is written against [`Coefficient`]; the two exact
//! rings in use are exposed as [`Integer`] and [`Rational`].

pub mod abelian;
pub mod chain;
pub mod error;
pub mod groebner;
pub mod ideals_int;
pub mod ideals_rat;
pub mod liealg;
pub mod sampling;
pub mod scalar;
pub mod selftest;
mod syllables;
pub mod symplectic;
pub mod words;

pub use abelian::{ab, exp_c, re, AnyElement, ElementRepr, Monomial, ModuleElement};
pub use error::{Error, Result};
pub use scalar::{Coefficient, Field, Ring};
pub use symplectic::{SurfaceKind, SurfaceSignature};
pub use words::{CyclicWord, Letter, Word};

pub type Integer = num_bigint::BigInt;
pub type Rational = num_rational::BigRational;
/// An element of `Z[A(n)]`.
pub type IntElement = ModuleElement<Integer>;
/// An element of `Q[A(n)]`.
pub type RatElement = ModuleElement<Rational>;
