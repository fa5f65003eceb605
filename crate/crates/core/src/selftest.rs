//! The full invariant suite behind `goldman selftest`.
//!
//! Every property draws its cases from its own seeded stream, so the report
//! depends only on `(seed, scale)` and never on thread scheduling. A failing
//! case is shrunk greedily before it is reported.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{ab, re, Monomial, ModuleElement};
use crate::chain::{
    c_exponent_budget, cn_generator, gn_conjugate, gn_mul, is_normal, project_gn, separation_bound,
    separation_level, GnElement,
};
use crate::ideals_int::{
    bracket_closure_exhaustive, ideal_check_exhaustive, ik_family, prop_divisibility_exhaustive,
    table_from_mask, ExponentBox, GeometricSubmodule,
};
use crate::ideals_rat::{
    contains, ideal_closure, primitive_bracket_identity_check, standard_representation,
    PrimitiveLabel,
};
use crate::liealg::{bracket, bracket_monomial, jacobiator};
use crate::sampling::{self, SampleCoefficient, SeededRng};
use crate::scalar::{pow2, Coefficient};
use crate::symplectic::SurfaceSignature;
use crate::words::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelftestOptions {
    pub seed: u64,
    /// Multiplier on every property's case count; `0` runs nothing.
    pub scale: u64,
    /// Replaces every surface's pairing with a symmetric one, which must make
    /// the Lie-axiom suites fail.
    pub symmetric_fault: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub cases: u64,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub scale: u64,
    pub passed: bool,
    pub properties: Vec<PropertyReport>,
}

impl SelftestReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, rng: &mut SeededRng, cases: u64) -> PropertyReport;
}

struct Property<T> {
    name: &'static str,
    base_cases: u64,
    generate: Box<dyn Fn(&mut SeededRng) -> T + Send + Sync>,
    holds: Box<dyn Fn(&T) -> bool + Send + Sync>,
    shrink: Box<dyn Fn(&T) -> Vec<T> + Send + Sync>,
    render: Box<dyn Fn(&T) -> String + Send + Sync>,
}

impl<T: 'static> Property<T> {
    fn new(
        name: &'static str,
        base_cases: u64,
        generate: impl Fn(&mut SeededRng) -> T + Send + Sync + 'static,
        holds: impl Fn(&T) -> bool + Send + Sync + 'static,
    ) -> Self {
        Property {
            name,
            base_cases,
            generate: Box::new(generate),
            holds: Box::new(holds),
            shrink: Box::new(|_| Vec::new()),
            render: Box::new(|_| "unrenderable case".into()),
        }
    }

    fn shrink_with(mut self, f: impl Fn(&T) -> Vec<T> + Send + Sync + 'static) -> Self {
        self.shrink = Box::new(f);
        self
    }

    fn render_with(mut self, f: impl Fn(&T) -> String + Send + Sync + 'static) -> Self {
        self.render = Box::new(f);
        self
    }

    fn boxed(self) -> Box<dyn Check> {
        Box::new(self)
    }
}

impl<T: 'static> Check for Property<T> {
    fn name(&self) -> &'static str {
        self.name
    }

    fn run(&self, rng: &mut SeededRng, scale: u64) -> PropertyReport {
        let cases = self.base_cases * scale;
        for i in 0..cases {
            let case = (self.generate)(rng);
            if !(self.holds)(&case) {
                let mut worst = case;
                'shrinking: loop {
                    for candidate in (self.shrink)(&worst) {
                        if !(self.holds)(&candidate) {
                            worst = candidate;
                            continue 'shrinking;
                        }
                    }
                    break;
                }
                return PropertyReport {
                    name: self.name.into(),
                    cases: i + 1,
                    passed: false,
                    counterexample: Some((self.render)(&worst)),
                };
            }
        }
        PropertyReport {
            name: self.name.into(),
            cases,
            passed: true,
            counterexample: None,
        }
    }
}

fn without_each<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0..items.len())
        .map(|i| {
            let mut v = items.to_vec();
            v.remove(i);
            v
        })
        .collect()
}

fn shrink_element<C: Coefficient>(u: &ModuleElement<C>) -> Vec<ModuleElement<C>> {
    let terms: Vec<(Monomial, C)> = u.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
    without_each(&terms)
        .into_iter()
        .map(|t| ModuleElement::from_terms(u.rank(), t).expect("same rank"))
        .collect()
}

fn shrink_word(w: &Word) -> Vec<Word> {
    let raw: Vec<(usize, BigInt)> = w.letters().iter().map(|l| (l.gen, l.exp.clone())).collect();
    without_each(&raw)
        .into_iter()
        .map(|r| Word::reduce(w.rank(), r).expect("generators in range"))
        .collect()
}

/// Shrinks each slot of a tuple-like vector in turn.
fn shrink_slots<T: Clone>(items: &[T], shrink: impl Fn(&T) -> Vec<T>) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        for smaller in shrink(item) {
            let mut v = items.to_vec();
            v[i] = smaller;
            out.push(v);
        }
    }
    out
}

fn render_elements<C: Coefficient>(items: &[ModuleElement<C>]) -> String {
    items.iter().map(ModuleElement::to_json).collect::<Vec<_>>().join(" ; ")
}

fn render_words(items: &[Word]) -> String {
    items
        .iter()
        .map(|w| format!("\"{w}\""))
        .collect::<Vec<_>>()
        .join(" ; ")
}

const WORD_RANK: usize = 3;

fn words(rng: &mut SeededRng, k: usize) -> Vec<Word> {
    (0..k).map(|_| sampling::word(rng, WORD_RANK, 6, 3)).collect()
}

fn word_properties() -> Vec<Box<dyn Check>> {
    let words_prop = |name, k, holds: fn(&[Word]) -> bool| {
        Property::new(name, 200, move |r| words(r, k), move |ws: &Vec<Word>| holds(ws))
            .shrink_with(|ws: &Vec<Word>| shrink_slots(ws, shrink_word))
            .render_with(|ws: &Vec<Word>| render_words(ws))
            .boxed()
    };
    vec![
        Property::new(
            "words.reduce_idempotent",
            200,
            |r: &mut SeededRng| {
                let len = r.random_range(0..10);
                (0..len)
                    .map(|_| (r.random_range(1..=WORD_RANK), r.random_range(-3i64..=3)))
                    .collect::<Vec<_>>()
            },
            |raw: &Vec<(usize, i64)>| {
                let once = Word::reduce(WORD_RANK, raw.iter().copied()).expect("in range");
                let twice = Word::reduce(
                    WORD_RANK,
                    once.letters().iter().map(|l| (l.gen, l.exp.clone())),
                )
                .expect("in range");
                once == twice && once.letters().windows(2).all(|p| p[0].gen != p[1].gen)
            },
        )
        .shrink_with(|raw: &Vec<(usize, i64)>| without_each(raw))
        .render_with(|raw: &Vec<(usize, i64)>| format!("{raw:?}"))
        .boxed(),
        words_prop("words.concat_associative", 3, |ws| {
            let left = ws[0].concat(&ws[1]).and_then(|x| x.concat(&ws[2]));
            let right = ws[1].concat(&ws[2]).and_then(|x| ws[0].concat(&x));
            let id = Word::identity(WORD_RANK);
            left == right
                && id.concat(&ws[0]).as_ref() == Ok(&ws[0])
                && ws[0].concat(&id).as_ref() == Ok(&ws[0])
        }),
        words_prop("words.inverse_cancels", 1, |ws| {
            ws[0].concat(&ws[0].inverse()).is_ok_and(|w| w.is_identity())
        }),
        words_prop("words.conjugation_preserves_canonical_form", 2, |ws| {
            ws[1]
                .conjugate_by(&ws[0])
                .is_ok_and(|c| c.conjugacy_canonical() == ws[1].conjugacy_canonical())
        }),
        words_prop("words.cyclic_core_is_shortest_rotation", 1, |ws| {
            let w = &ws[0];
            let units: Vec<(usize, i64)> = w
                .letters()
                .iter()
                .flat_map(|l| {
                    let e = i64::try_from(&l.exp).expect("small");
                    std::iter::repeat_n((l.gen, e.signum()), e.unsigned_abs() as usize)
                })
                .collect();
            if units.len() > 12 {
                return true;
            }
            let best = (0..units.len().max(1))
                .map(|k| {
                    let rotated = units[k.min(units.len())..].iter().chain(&units[..k.min(units.len())]);
                    Word::reduce(WORD_RANK, rotated.copied()).expect("in range").length()
                })
                .min()
                .unwrap_or_default();
            let (core, conj) = w.cyclic_reduce();
            core.length() == best
                && core.conjugate_by(&conj).as_ref() == Ok(w)
        }),
    ]
}

fn abelian_properties() -> Vec<Box<dyn Check>> {
    vec![
        Property::new(
            "abelian.ab_conjugation_invariant",
            200,
            |r: &mut SeededRng| words(r, 2),
            |ws: &Vec<Word>| {
                let conj = ws[1].conjugate_by(&ws[0]).expect("same rank");
                ab(&[(BigInt::one(), conj)], WORD_RANK) == ab(&[(BigInt::one(), ws[1].clone())], WORD_RANK)
            },
        )
        .shrink_with(|ws: &Vec<Word>| shrink_slots(ws, shrink_word))
        .render_with(|ws: &Vec<Word>| render_words(ws))
        .boxed(),
        Property::new(
            "abelian.re_homomorphism",
            200,
            |r: &mut SeededRng| words(r, 2),
            |ws: &Vec<Word>| {
                let uv = ws[0].concat(&ws[1]).expect("same rank");
                let lhs = re(&uv, WORD_RANK).expect("in range");
                let rhs = re(&ws[0], WORD_RANK)
                    .and_then(|a| re(&ws[1], WORD_RANK).and_then(|b| a.mul(&b)))
                    .expect("in range");
                lhs == rhs
            },
        )
        .shrink_with(|ws: &Vec<Word>| shrink_slots(ws, shrink_word))
        .render_with(|ws: &Vec<Word>| render_words(ws))
        .boxed(),
        Property::new(
            "abelian.ab_linear",
            200,
            |r: &mut SeededRng| {
                let sum = |r: &mut SeededRng| {
                    (0..r.random_range(0..4))
                        .map(|_| (BigInt::sample_nonzero(r, 9), sampling::word(r, WORD_RANK, 5, 3)))
                        .collect::<Vec<_>>()
                };
                (sum(r), sum(r))
            },
            |(s, t): &(Vec<(BigInt, Word)>, Vec<(BigInt, Word)>)| {
                let joined: Vec<_> = s.iter().chain(t).cloned().collect();
                let lhs = ab(&joined, WORD_RANK).expect("in range");
                let rhs = &ab(s, WORD_RANK).expect("in range") + &ab(t, WORD_RANK).expect("in range");
                lhs == rhs
            },
        )
        .render_with(|st| format!("{st:?}"))
        .boxed(),
    ]
}

fn surfaces(fault: bool) -> Vec<SurfaceSignature> {
    [
        SurfaceSignature::closed(1),
        SurfaceSignature::closed(2),
        SurfaceSignature::with_boundary(1, 2),
    ]
    .into_iter()
    .map(|s| {
        let s = s.expect("valid surface");
        if fault {
            s.with_symmetric_fault()
        } else {
            s
        }
    })
    .collect()
}

fn pick(r: &mut SeededRng, sigs: &[SurfaceSignature]) -> SurfaceSignature {
    sigs[r.random_range(0..sigs.len())].clone()
}

fn monomials(r: &mut SeededRng, sig: &SurfaceSignature, k: usize) -> Vec<Monomial> {
    (0..k).map(|_| sampling::monomial(r, sig.rank(), 4)).collect()
}

fn shrink_monomial(m: &Monomial) -> Vec<Monomial> {
    (0..m.rank())
        .filter(|&i| !m.exps()[i].is_zero())
        .map(|i| {
            let mut e = m.exps().to_vec();
            e[i] = BigInt::zero();
            Monomial::new(e)
        })
        .collect()
}

type MonomialCase = (SurfaceSignature, Vec<Monomial>);

fn monomial_prop(
    name: &'static str,
    sigs: &[SurfaceSignature],
    k: usize,
    holds: impl Fn(&SurfaceSignature, &[Monomial]) -> bool + Send + Sync + 'static,
) -> Box<dyn Check> {
    let sigs = sigs.to_vec();
    Property::new(
        name,
        300,
        move |r| {
            let sig = pick(r, &sigs);
            let ms = monomials(r, &sig, k);
            (sig, ms)
        },
        move |(sig, ms): &MonomialCase| holds(sig, ms),
    )
    .shrink_with(|(sig, ms): &MonomialCase| {
        shrink_slots(ms, shrink_monomial)
            .into_iter()
            .map(|v| (sig.clone(), v))
            .collect()
    })
    .render_with(|(sig, ms): &MonomialCase| {
        let ms: Vec<String> = ms.iter().map(ToString::to_string).collect();
        format!("{sig}: {}", ms.join(" "))
    })
    .boxed()
}

fn symplectic_properties(sigs: &[SurfaceSignature]) -> Vec<Box<dyn Check>> {
    let word_sigs = sigs.to_vec();
    vec![
        monomial_prop("symplectic.pair_antisymmetric", sigs, 2, |sig, m| {
            sig.pair(&m[0], &m[1]).ok() == sig.pair(&m[1], &m[0]).ok().map(|p| -p)
        }),
        monomial_prop("symplectic.pair_matches_matrix", sigs, 2, |sig, m| {
            let mv = sig.m_vector(&m[0]).expect("rank");
            let dot: BigInt = m[1].exps().iter().zip(&mv).map(|(a, b)| a * b).sum();
            sig.pair(&m[0], &m[1]).ok() == Some(dot)
        }),
        monomial_prop("symplectic.pair_biadditive", sigs, 3, |sig, m| {
            let lhs = sig.pair(&m[0].mul(&m[1]).expect("rank"), &m[2]).expect("rank");
            lhs == sig.pair(&m[0], &m[2]).expect("rank") + sig.pair(&m[1], &m[2]).expect("rank")
        }),
        monomial_prop("symplectic.center_characterization", sigs, 1, |sig, m| {
            let x = &m[0];
            let by_vector = sig.m_vector(x).expect("rank").iter().all(Zero::is_zero);
            let by_generators = (1..=sig.rank())
                .all(|j| sig.pair(x, &Monomial::generator(j, sig.rank())).expect("rank").is_zero());
            sig.is_central(x) == by_vector && by_vector == by_generators
        }),
        Property::new(
            "symplectic.split_decomposition",
            300,
            move |r: &mut SeededRng| {
                let sig = pick(r, &word_sigs);
                let ws: Vec<Word> = (0..4).map(|_| sampling::word(r, sig.rank(), 5, 3)).collect();
                (sig, ws)
            },
            |(sig, ws): &(SurfaceSignature, Vec<Word>)| {
                let m = |a: &Word, b: &Word| sig.intersection_pairing(a, b).expect("rank");
                let u = ws[0].concat(&ws[1]).expect("rank");
                let v = ws[2].concat(&ws[3]).expect("rank");
                m(&u, &v) == m(&ws[0], &ws[2]) + m(&ws[0], &ws[3]) + m(&ws[1], &ws[2]) + m(&ws[1], &ws[3])
            },
        )
        .render_with(|(sig, ws)| format!("{sig}: {}", render_words(ws)))
        .boxed(),
    ]
}

type ElementCase<C> = (SurfaceSignature, Vec<ModuleElement<C>>);

fn element_prop<C: SampleCoefficient>(
    name: &'static str,
    base: u64,
    sigs: &[SurfaceSignature],
    k: usize,
    holds: impl Fn(&SurfaceSignature, &[ModuleElement<C>]) -> bool + Send + Sync + 'static,
) -> Box<dyn Check> {
    let sigs = sigs.to_vec();
    Property::new(
        name,
        base,
        move |r| {
            let sig = pick(r, &sigs);
            let us = (0..k).map(|_| sampling::element::<C>(r, sig.rank(), 4, 3, 9)).collect();
            (sig, us)
        },
        move |(sig, us): &ElementCase<C>| holds(sig, us),
    )
    .shrink_with(|(sig, us): &ElementCase<C>| {
        shrink_slots(us, shrink_element)
            .into_iter()
            .map(|v| (sig.clone(), v))
            .collect()
    })
    .render_with(|(sig, us): &ElementCase<C>| format!("{sig}: {}", render_elements(us)))
    .boxed()
}

fn antisymmetric<C: Coefficient>(sig: &SurfaceSignature, u: &[ModuleElement<C>]) -> bool {
    let a = bracket(sig, &u[0], &u[1]).expect("rank");
    let b = bracket(sig, &u[1], &u[0]).expect("rank");
    (&a + &b).is_zero()
}

fn liealg_properties(sigs: &[SurfaceSignature]) -> Vec<Box<dyn Check>> {
    let word_sigs = sigs.to_vec();
    let central_sigs = sigs.to_vec();
    vec![
        element_prop::<BigInt>("liealg.antisymmetry_z", 300, sigs, 2, antisymmetric),
        element_prop::<BigRational>("liealg.antisymmetry_q", 300, sigs, 2, antisymmetric),
        element_prop::<BigInt>("liealg.jacobi", 100, sigs, 3, |sig, u| {
            jacobiator(sig, &u[0], &u[1], &u[2]).expect("rank").is_zero()
        }),
        Property::new(
            "liealg.bracket_matches_intersection",
            300,
            move |r: &mut SeededRng| {
                let sig = pick(r, &word_sigs);
                let ws: Vec<Word> = (0..2).map(|_| sampling::word(r, sig.rank(), 5, 3)).collect();
                (sig, ws)
            },
            |(sig, ws): &(SurfaceSignature, Vec<Word>)| {
                let (x, y) = (re(&ws[0], sig.rank()).expect("rank"), re(&ws[1], sig.rank()).expect("rank"));
                let b: ModuleElement<BigInt> = bracket_monomial(sig, &x, &y).expect("rank");
                b.coefficient(&x.mul(&y).expect("rank")) == sig.intersection_pairing(&ws[0], &ws[1]).expect("rank")
            },
        )
        .render_with(|(sig, ws)| format!("{sig}: {}", render_words(ws)))
        .boxed(),
        Property::new(
            "liealg.center_brackets_trivially",
            300,
            move |r: &mut SeededRng| {
                let sig = pick(r, &central_sigs);
                let mut c = sampling::monomial(r, sig.rank(), 4);
                let mut e = c.exps().to_vec();
                for x in e.iter_mut().take(2 * sig.genus()) {
                    *x = BigInt::zero();
                }
                c = Monomial::new(e);
                let y = sampling::monomial(r, sig.rank(), 4);
                (sig, vec![c, y])
            },
            |(sig, m): &MonomialCase| {
                bracket_monomial::<BigInt>(sig, &m[0], &m[1]).expect("rank").is_zero()
            },
        )
        .render_with(|(sig, m)| format!("{sig}: {} {}", m[0], m[1]))
        .boxed(),
    ]
}

fn ideals_int_properties(sigs: &[SurfaceSignature]) -> Vec<Box<dyn Check>> {
    let closed: Vec<SurfaceSignature> = sigs.iter().filter(|s| s.is_closed()).cloned().collect();
    let torus = sigs[0].clone();
    let torus2 = torus.clone();
    vec![
        Property::new(
            "ideals_int.ik_bracket_closed",
            200,
            move |r: &mut SeededRng| {
                let sig = pick(r, &closed);
                let n = sig.rank();
                let k: Vec<Monomial> = (0..r.random_range(0..4)).map(|_| sampling::monomial(r, n, 3)).collect();
                let sub = GeometricSubmodule::ik(n, k.clone()).expect("rank");
                // an element of I_K: multiples of alpha at random monomials
                let mut u = ModuleElement::zero(n);
                for _ in 0..r.random_range(1..4) {
                    let x = sampling::monomial(r, n, 5);
                    let a = sub.alpha(&x).expect("rank");
                    u.add_term(x, a * BigInt::sample_nonzero(r, 4));
                }
                let v = sampling::monomial(r, n, 5);
                (sig, k, u, v)
            },
            |(sig, k, u, v): &(SurfaceSignature, Vec<Monomial>, ModuleElement<BigInt>, Monomial)| {
                let sub = GeometricSubmodule::ik(sig.rank(), k.clone()).expect("rank");
                let b = bracket(sig, u, &ModuleElement::monomial(v.clone())).expect("rank");
                sub.contains(&b).expect("rank")
            },
        )
        .render_with(|(sig, k, u, v)| {
            let k: Vec<String> = k.iter().map(ToString::to_string).collect();
            format!("{sig}: K=[{}] u={} v={v}", k.join(","), u.to_json())
        })
        .boxed(),
        Property::new(
            "ideals_int.criterion_matches_bracket_closure",
            20,
            |r: &mut SeededRng| r.random_range(0..(1u64 << 9)),
            move |mask: &u64| {
                let bx = ExponentBox::new(2, 1);
                let vals = [BigInt::one(), BigInt::from(2)];
                let t = table_from_mask(bx, &vals, *mask).expect("box");
                ideal_check_exhaustive(&torus, &t, bx).expect("rank").holds
                    == bracket_closure_exhaustive(&torus, &t, bx).expect("rank")
            },
        )
        .render_with(|mask| format!("table mask {mask:#b} on [-1,1]^2"))
        .boxed(),
        Property::new(
            "ideals_int.criteria_agree",
            20,
            |r: &mut SeededRng| r.random_range(0..(1u64 << 9)),
            move |mask: &u64| {
                let bx = ExponentBox::new(2, 1);
                let vals = [BigInt::one(), BigInt::from(2)];
                let t = table_from_mask(bx, &vals, *mask).expect("box");
                ideal_check_exhaustive(&torus2, &t, bx).expect("rank").holds
                    == prop_divisibility_exhaustive(&torus2, &t, bx).expect("rank").holds
            },
        )
        .render_with(|mask| format!("table mask {mask:#b} on [-1,1]^2"))
        .boxed(),
        Property::new(
            "ideals_int.ik_family_nested",
            5,
            |r: &mut SeededRng| vec![sampling::monomial(r, 2, 2)],
            |k0: &Vec<Monomial>| {
                let fam = ik_family(2, k0.clone(), 4).expect("rank");
                fam.windows(2).all(|p| p[0] != p[1])
                    && k0.iter().all(|k| fam.iter().all(|s| s.alpha(k).expect("rank").is_one()))
            },
        )
        .render_with(|k0| format!("K0={}", k0[0]))
        .boxed(),
    ]
}

fn random_label(r: &mut SeededRng, sig: &SurfaceSignature) -> PrimitiveLabel {
    let g2 = 2 * sig.genus();
    let k = if sig.central_rank() == 0 { 1 } else { r.random_range(1..=3) };
    let pairs = (0..k).map(|_| {
        let mut e = vec![BigInt::zero(); sig.rank()];
        for x in e.iter_mut().skip(g2) {
            *x = BigInt::from(r.random_range(-2i64..=2));
        }
        (Monomial::new(e), BigRational::sample_nonzero(r, 5))
    });
    PrimitiveLabel::new(sig, pairs).unwrap_or_else(|_| PrimitiveLabel::trivial(sig.rank()))
}

fn noncentral(r: &mut SeededRng, sig: &SurfaceSignature) -> Monomial {
    loop {
        let x = sampling::monomial(r, sig.rank(), 3);
        if !sig.is_central(&x) {
            return x;
        }
    }
}

fn boundary_surfaces(fault: bool) -> Vec<SurfaceSignature> {
    [(1, 2), (1, 3)]
        .into_iter()
        .map(|(g, b)| {
            let s = SurfaceSignature::with_boundary(g, b).expect("valid");
            if fault {
                s.with_symmetric_fault()
            } else {
                s
            }
        })
        .collect()
}

fn ideals_rat_properties(sigs: &[SurfaceSignature], bounded: &[SurfaceSignature]) -> Vec<Box<dyn Check>> {
    let all: Vec<SurfaceSignature> = sigs.iter().chain(bounded).cloned().collect();
    let (a1, a2, a3, a4) = (all.clone(), all.clone(), bounded.to_vec(), bounded.to_vec());
    vec![
        element_prop::<BigRational>("ideals_rat.reassembly", 300, &all, 1, |sig, u| {
            standard_representation(sig, &u[0]).expect("rank").reassemble() == u[0]
        }),
        Property::new(
            "ideals_rat.primitive_bracket_identity",
            200,
            move |r: &mut SeededRng| {
                let sig = pick(r, &a1);
                let label = random_label(r, &sig);
                let x = noncentral(r, &sig);
                let y = sampling::monomial(r, sig.rank(), 3);
                (sig, label, x, y)
            },
            |(sig, label, x, y): &(SurfaceSignature, PrimitiveLabel, Monomial, Monomial)| {
                primitive_bracket_identity_check(sig, label, x, y).expect("valid")
            },
        )
        .render_with(|(sig, l, x, y)| format!("{sig}: label {l} x={x} y={y}"))
        .boxed(),
        Property::new(
            "ideals_rat.closure_is_ideal",
            100,
            move |r: &mut SeededRng| {
                let sig = pick(r, &a2);
                let gens: Vec<ModuleElement<BigRational>> = (0..r.random_range(1..=3))
                    .map(|_| sampling::element(r, sig.rank(), 3, 2, 5))
                    .collect();
                let ideal = ideal_closure(&sig, &gens).expect("rank");
                let u = ideal.sample_member(r, 3, 3);
                let v = sampling::monomial(r, sig.rank(), 3);
                (sig, gens, u, v)
            },
            |(sig, gens, u, v): &(SurfaceSignature, Vec<ModuleElement<BigRational>>, ModuleElement<BigRational>, Monomial)| {
                let ideal = ideal_closure(sig, gens).expect("rank");
                let b = bracket(sig, u, &ModuleElement::monomial(v.clone())).expect("rank");
                contains(sig, &ideal, u).expect("rank") && contains(sig, &ideal, &b).expect("rank")
            },
        )
        .render_with(|(sig, gens, u, v)| format!("{sig}: gens {} u={} v={v}", render_elements(gens), u.to_json()))
        .boxed(),
        Property::new(
            "ideals_rat.round_trip",
            50,
            move |r: &mut SeededRng| {
                let sig = pick(r, &a3);
                random_ideal_generators(r, &sig)
            },
            |(sig, gens, extra): &RoundTripCase| round_trip_holds(sig, gens, extra),
        )
        .render_with(|(sig, gens, extra)| format!("{sig}: gens {} extra {}", render_elements(gens), render_elements(extra)))
        .boxed(),
        Property::new(
            "ideals_rat.central_generators_have_no_labels",
            100,
            move |r: &mut SeededRng| {
                let sig = pick(r, &a4);
                let g2 = 2 * sig.genus();
                let mut u = ModuleElement::zero(sig.rank());
                for _ in 0..r.random_range(1..4) {
                    let mut e = sampling::monomial(r, sig.rank(), 3).exps().to_vec();
                    for x in e.iter_mut().take(g2) {
                        *x = BigInt::zero();
                    }
                    u.add_term(Monomial::new(e), BigRational::sample_nonzero(r, 5));
                }
                (sig, vec![u])
            },
            |(sig, u): &ElementCase<BigRational>| ideal_closure(sig, u).expect("rank").labels().is_empty(),
        )
        .render_with(|(sig, u)| format!("{sig}: {}", render_elements(u)))
        .boxed(),
    ]
}

/// `(surface, one f-term per label plus a central basis, further members)`.
pub type RoundTripCase = (
    SurfaceSignature,
    Vec<ModuleElement<BigRational>>,
    Vec<ModuleElement<BigRational>>,
);

/// Draws up to three labels and two central vectors, the generating set
/// with one `f`-term per label plus the central vectors, and a few further
/// members of the ideal those generate.
pub fn random_ideal_generators(r: &mut SeededRng, sig: &SurfaceSignature) -> RoundTripCase {
    let mut gens = Vec::new();
    for _ in 0..r.random_range(0..=3) {
        let label = random_label(r, sig);
        let x = noncentral(r, sig);
        gens.push(label.apply(&x).scale(&BigRational::sample_nonzero(r, 5)));
    }
    let g2 = 2 * sig.genus();
    for _ in 0..r.random_range(0..=2) {
        let mut c = ModuleElement::zero(sig.rank());
        for _ in 0..r.random_range(1..=2) {
            let mut e = vec![BigInt::zero(); sig.rank()];
            for x in e.iter_mut().skip(g2) {
                *x = BigInt::from(r.random_range(-2i64..=2));
            }
            c.add_term(Monomial::new(e), BigRational::sample_nonzero(r, 5));
        }
        if !c.is_zero() {
            gens.push(c);
        }
    }
    let ideal = ideal_closure(sig, &gens).expect("rank");
    let extra = (0..r.random_range(0..=3)).map(|_| ideal.sample_member(r, 3, 3)).collect();
    (sig.clone(), gens, extra)
}

/// Closing the generators, or the generators plus further members, yields
/// the same ideal; closing the further members alone yields a sub-ideal.
pub fn round_trip_holds(
    sig: &SurfaceSignature,
    gens: &[ModuleElement<BigRational>],
    extra: &[ModuleElement<BigRational>],
) -> bool {
    let ideal = ideal_closure(sig, gens).expect("rank");
    let mut all = gens.to_vec();
    all.extend(extra.iter().cloned());
    let again = ideal_closure(sig, &all).expect("rank");
    let sub = ideal_closure(sig, extra).expect("rank");
    let sub_inside = sub.labels().iter().all(|l| {
        let x = (1..=sig.rank())
            .map(|j| Monomial::generator(j, sig.rank()))
            .find(|m| !sig.is_central(m))
            .expect("a non-central generator");
        contains(sig, &ideal, &l.apply(&x)).expect("rank")
    }) && sub.central_basis().iter().all(|c| contains(sig, &ideal, c).expect("rank"));
    let gens_inside = gens.iter().all(|g| contains(sig, &ideal, g).expect("rank"));
    again == ideal && sub_inside && gens_inside
}

const CHAIN_RANK: usize = 3;
const MAX_LEVEL: u32 = 6;

fn chain_words(r: &mut SeededRng, k: usize) -> Vec<Word> {
    (0..k).map(|_| sampling::word(r, CHAIN_RANK, 8, 9)).collect()
}

fn chain_properties() -> Vec<Box<dyn Check>> {
    vec![
        Property::new(
            "chain.projection_homomorphism",
            200,
            |r: &mut SeededRng| (chain_words(r, 2), r.random_range(0..=MAX_LEVEL)),
            |(ws, n): &(Vec<Word>, u32)| {
                let uv = ws[0].concat(&ws[1]).expect("rank");
                let lhs = project_gn(&uv, *n, 1).expect("c");
                let rhs = gn_mul(&project_gn(&ws[0], *n, 1).expect("c"), &project_gn(&ws[1], *n, 1).expect("c"));
                rhs.as_ref() == Ok(&lhs) && is_normal(&lhs)
            },
        )
        .shrink_with(|(ws, n)| shrink_slots(ws, shrink_word).into_iter().map(|v| (v, *n)).collect())
        .render_with(|(ws, n)| format!("level {n}: {}", render_words(ws)))
        .boxed(),
        Property::new(
            "chain.kernels_descend",
            200,
            |r: &mut SeededRng| {
                // words that die at some level: products of conjugated c-powers
                let n = r.random_range(0..MAX_LEVEL);
                let mut w = Word::identity(CHAIN_RANK);
                for _ in 0..r.random_range(1..=3) {
                    let g = sampling::word(r, CHAIN_RANK, 3, 2);
                    let k = pow2(r.random_range(0..=MAX_LEVEL)) * BigInt::from(r.random_range(-2i64..=2));
                    let c = Word::reduce(CHAIN_RANK, [(1, k)]).expect("rank");
                    w = w.concat(&c.conjugate_by(&g).expect("rank")).expect("rank");
                }
                if r.random_bool(0.3) {
                    w = chain_words(r, 1).remove(0);
                }
                (w, n)
            },
            |(w, n): &(Word, u32)| {
                !project_gn(w, n + 1, 1).expect("c").is_identity() || project_gn(w, *n, 1).expect("c").is_identity()
            },
        )
        .render_with(|(w, n)| format!("level {n}: \"{w}\""))
        .boxed(),
        Property::new(
            "chain.cn_generators_vanish",
            100,
            |r: &mut SeededRng| {
                let n = r.random_range(0..=MAX_LEVEL);
                let k = r.random_range(1..=3);
                let ms: Vec<u32> = (0..k).map(|_| r.random_range(n..=n + 2)).collect();
                let xs = chain_words(r, k);
                let g = chain_words(r, 1).remove(0);
                (n, ms, xs, g)
            },
            |(n, ms, xs, g): &(u32, Vec<u32>, Vec<Word>, Word)| {
                cn_generator(*n, ms, xs, g, 1)
                    .and_then(|w| project_gn(&w, *n, 1))
                    .is_ok_and(|p| p.is_identity())
            },
        )
        .render_with(|(n, ms, xs, g)| format!("level {n} exponents {ms:?} xs {} g \"{g}\"", render_words(xs)))
        .boxed(),
        Property::new(
            "chain.strict_at_each_level",
            1,
            |_: &mut SeededRng| (),
            |_: &()| {
                (0..=MAX_LEVEL).all(|n| {
                    let c = Word::reduce(CHAIN_RANK, [(1, pow2(n))]).expect("rank");
                    let id = GnElement::identity(CHAIN_RANK, n + 1, 1).expect("c");
                    project_gn(&c, n, 1).expect("c").is_identity()
                        && gn_conjugate(&project_gn(&c, n + 1, 1).expect("c"), &id) == Ok(false)
                })
            },
        )
        .boxed(),
        Property::new(
            "chain.separation_within_bound",
            100,
            |r: &mut SeededRng| loop {
                let ws = chain_words(r, 2);
                let e = c_exponent_budget(&ws[0], &ws[1], 1);
                if e <= BigInt::from(32) && !ws[0].is_conjugate(&ws[1]) {
                    return ws;
                }
            },
            |ws: &Vec<Word>| {
                let bound = separation_bound(&c_exponent_budget(&ws[0], &ws[1], 1));
                matches!(separation_level(&ws[0], &ws[1], 1, bound), Ok(Some(n)) if n <= bound)
            },
        )
        .render_with(|ws| render_words(ws))
        .boxed(),
        Property::new(
            "chain.conjugacy_is_equivalence",
            200,
            |r: &mut SeededRng| {
                let n = r.random_range(0..=MAX_LEVEL);
                let ws = chain_words(r, 3);
                // make the third a conjugate of the second half the time
                let ws = if r.random_bool(0.5) {
                    let g = chain_words(r, 1).remove(0);
                    vec![ws[0].clone(), ws[1].clone(), ws[1].conjugate_by(&g).expect("rank")]
                } else {
                    ws
                };
                (ws, n)
            },
            |(ws, n): &(Vec<Word>, u32)| {
                let p: Vec<GnElement> = ws.iter().map(|w| project_gn(w, *n, 1).expect("c")).collect();
                let c = |i: usize, j: usize| gn_conjugate(&p[i], &p[j]).expect("same group");
                let reflexive = (0..3).all(|i| c(i, i));
                let symmetric = (0..3).all(|i| (0..3).all(|j| c(i, j) == c(j, i)));
                let transitive = (0..3).all(|i| (0..3).all(|j| (0..3).all(|k| !(c(i, j) && c(j, k)) || c(i, k))));
                reflexive && symmetric && transitive
            },
        )
        .render_with(|(ws, n)| format!("level {n}: {}", render_words(ws)))
        .boxed(),
    ]
}

fn all_properties(fault: bool) -> Vec<Box<dyn Check>> {
    let sigs = surfaces(fault);
    let bounded = boundary_surfaces(fault);
    let mut out = word_properties();
    out.extend(abelian_properties());
    out.extend(symplectic_properties(&sigs));
    out.extend(liealg_properties(&sigs));
    out.extend(ideals_int_properties(&sigs));
    out.extend(ideals_rat_properties(&sigs, &bounded));
    out.extend(chain_properties());
    out
}

/// Names of every property, in report order.
pub fn property_names() -> Vec<&'static str> {
    all_properties(false).iter().map(|p| p.name()).collect()
}

pub fn run_selftest(options: SelftestOptions) -> SelftestReport {
    let props = all_properties(options.symmetric_fault);
    let properties: Vec<PropertyReport> = props
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut rng = sampling::rng(options.seed, i as u64);
            p.run(&mut rng, options.scale)
        })
        .collect();
    SelftestReport {
        seed: options.seed,
        scale: options.scale,
        passed: properties.iter().all(|p| p.passed),
        properties,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_zero_is_a_pass() {
        let r = run_selftest(SelftestOptions {
            seed: 1,
            scale: 0,
            symmetric_fault: false,
        });
        assert!(r.passed);
        assert!(r.properties.iter().all(|p| p.cases == 0));
    }

    #[test]
    fn default_scale_passes_and_is_deterministic() {
        let opts = SelftestOptions {
            seed: 42,
            scale: 1,
            symmetric_fault: false,
        };
        let a = run_selftest(opts);
        for p in &a.properties {
            assert!(p.passed, "{} failed: {:?}", p.name, p.counterexample);
        }
        assert_eq!(a.to_json(), run_selftest(opts).to_json());
    }

    #[test]
    fn symmetric_fault_is_caught() {
        let r = run_selftest(SelftestOptions {
            seed: 42,
            scale: 1,
            symmetric_fault: true,
        });
        assert!(!r.passed);
        let jacobi = r.properties.iter().find(|p| p.name == "liealg.jacobi").unwrap();
        assert!(!jacobi.passed);
        assert!(jacobi.counterexample.is_some());
    }

    #[test]
    fn property_names_are_unique() {
        let mut names = property_names();
        let before = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), before);
    }
}
