//! The Lie bracket `[x, y] = <x, y> · xy` on `Z[A(n)]` and `Q[A(n)]`,
//! extended bilinearly.

use num_traits::Zero;

use crate::abelian::{check_rank, Monomial, ModuleElement};
use crate::error::Result;
use crate::scalar::Coefficient;
use crate::symplectic::SurfaceSignature;

pub fn bracket_monomial<C: Coefficient>(
    sig: &SurfaceSignature,
    x: &Monomial,
    y: &Monomial,
) -> Result<ModuleElement<C>> {
    let p = sig.pair(x, y)?;
    Ok(ModuleElement::term(x.mul_unchecked(y), C::from_integer(&p)))
}

pub fn bracket<C: Coefficient>(
    sig: &SurfaceSignature,
    u: &ModuleElement<C>,
    v: &ModuleElement<C>,
) -> Result<ModuleElement<C>> {
    check_rank(sig.rank(), u.rank())?;
    check_rank(sig.rank(), v.rank())?;
    let mut out = ModuleElement::zero(sig.rank());
    for (x, k) in u.iter() {
        for (y, l) in v.iter() {
            let p = sig.pair_unchecked(x, y);
            if p.is_zero() {
                continue;
            }
            out.add_term(
                x.mul_unchecked(y),
                C::from_integer(&p) * k.clone() * l.clone(),
            );
        }
    }
    Ok(out)
}

/// `[u, [v, w]] + [v, [w, u]] + [w, [u, v]]`, which vanishes in a Lie algebra.
pub fn jacobiator<C: Coefficient>(
    sig: &SurfaceSignature,
    u: &ModuleElement<C>,
    v: &ModuleElement<C>,
    w: &ModuleElement<C>,
) -> Result<ModuleElement<C>> {
    let a = bracket(sig, u, &bracket(sig, v, w)?)?;
    let b = bracket(sig, v, &bracket(sig, w, u)?)?;
    let c = bracket(sig, w, &bracket(sig, u, v)?)?;
    Ok(&(&a + &b) + &c)
}
