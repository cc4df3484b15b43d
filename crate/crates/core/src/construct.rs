//! Tensor products, direct sums, quotients and word-length truncations.

use std::sync::Arc;

use crate::algebra::{Element, Generator, Monomial, Presentation, RawPresentation};
use crate::error::{Error, Result};
use crate::morphism::Morphism;

/// Appends a copy index to a generator name: `a` becomes `a2`, `x3` becomes `x3_2`.
pub fn suffixed(name: &str, i: usize) -> String {
    if name.ends_with(|c: char| c.is_ascii_digit()) {
        format!("{name}_{i}")
    } else {
        format!("{name}{i}")
    }
}

/// Re-expresses an element of `p` over a wider generator list in which the
/// generators of `p` occupy `positions`. The positions must preserve order.
pub(crate) fn embed(e: &Element, positions: &[usize], width: usize) -> Element {
    Element::from_terms(e.terms().map(|(m, c)| {
        let mut exps = vec![0; width];
        for (i, &x) in m.exponents().iter().enumerate() {
            exps[positions[i]] = x;
        }
        (Monomial::from_exponents(exps), c.clone())
    }))
}

/// Staging data for several factors placed side by side in one generator list.
pub(crate) struct Juxtaposed {
    pub gens: Vec<Generator>,
    pub relations: Vec<Element>,
    pub differential: Vec<Element>,
    /// Per factor, the index of each of its generators in `gens`.
    pub positions: Vec<Vec<usize>>,
}

/// Concatenates generator lists factor by factor. Each factor's elements are
/// written in concatenation order, which `Presentation::assemble` re-sorts
/// with the correct signs.
pub(crate) fn juxtapose(factors: &[(&Presentation, Vec<String>)]) -> Juxtaposed {
    let width: usize = factors.iter().map(|(p, _)| p.ngens()).sum();
    let mut gens = Vec::new();
    let mut positions = Vec::new();
    for (p, names) in factors {
        let start = gens.len();
        for (g, n) in p.generators().iter().zip(names) {
            gens.push(Generator::new(n.clone(), g.degree));
        }
        positions.push((start..start + p.ngens()).collect::<Vec<_>>());
    }
    let mut relations = Vec::new();
    let mut differential = Vec::new();
    for ((p, _), pos) in factors.iter().zip(&positions) {
        relations.extend(p.relations().iter().map(|r| embed(r, pos, width)));
        differential.extend(p.differentials().iter().map(|d| embed(d, pos, width)));
    }
    Juxtaposed {
        gens,
        relations,
        differential,
        positions,
    }
}

fn names(p: &Presentation) -> Vec<String> {
    p.generators().iter().map(|g| g.name.clone()).collect()
}

fn copy_names(p: &Presentation, i: usize) -> Vec<String> {
    p.generators().iter().map(|g| suffixed(&g.name, i)).collect()
}

fn injection(
    name: String,
    from: &Arc<Presentation>,
    to: &Arc<Presentation>,
    new_names: &[String],
) -> Morphism {
    let images = new_names
        .iter()
        .map(|n| to.gen_named(n).expect("generator present"))
        .collect();
    Morphism::new_unchecked(name, from.clone(), to.clone(), images)
}

/// `A ⊗ B` with its two injections. Names are kept when disjoint, otherwise
/// both sides get copy subscripts 1 and 2.
pub fn tensor(
    a: &Arc<Presentation>,
    b: &Arc<Presentation>,
) -> Result<(Arc<Presentation>, Morphism, Morphism)> {
    let clash = a.generators().iter().any(|g| b.index_of(&g.name).is_some());
    let (na, nb) = if clash {
        (copy_names(a, 1), copy_names(b, 2))
    } else {
        (names(a), names(b))
    };
    let j = juxtapose(&[(a, na.clone()), (b, nb.clone())]);
    let p = Presentation::assemble(RawPresentation {
        name: format!("{}⊗{}", a.name(), b.name()),
        gens: j.gens,
        relations: j.relations,
        differential: j.differential,
        cap: a.cap().min(b.cap()),
        flags: merge_flags(a, b),
        word_bound: None,
    })?;
    let ia = injection(format!("i_{}", a.name()), a, &p, &na);
    let ib = injection(format!("i_{}", b.name()), b, &p, &nb);
    Ok((p, ia, ib))
}

fn merge_flags(a: &Presentation, b: &Presentation) -> crate::algebra::Flags {
    crate::algebra::Flags {
        non_simply_connected: a.flags().non_simply_connected || b.flags().non_simply_connected,
        formal: a.flags().formal && b.flags().formal,
    }
}

/// `A^{⊗n}` with copies named by [`suffixed`] and the `n` injections.
pub fn tensor_power(a: &Arc<Presentation>, n: usize) -> Result<(Arc<Presentation>, Vec<Morphism>)> {
    let copies: Vec<Vec<String>> = (1..=n).map(|i| copy_names(a, i)).collect();
    let factors: Vec<(&Presentation, Vec<String>)> =
        copies.iter().map(|c| (a.as_ref(), c.clone())).collect();
    let j = juxtapose(&factors);
    let p = Presentation::assemble(RawPresentation {
        name: format!("{}^⊗{n}", a.name()),
        gens: j.gens,
        relations: j.relations,
        differential: j.differential,
        cap: a.cap(),
        flags: a.flags(),
        word_bound: None,
    })?;
    let inj = copies
        .iter()
        .enumerate()
        .map(|(i, c)| injection(format!("i{}", i + 1), a, &p, c))
        .collect();
    Ok((p, inj))
}

/// `A ⊕ B`: the unit is shared and all mixed products vanish.
pub fn direct_sum(a: &Arc<Presentation>, b: &Arc<Presentation>) -> Result<Arc<Presentation>> {
    let clash = a.generators().iter().any(|g| b.index_of(&g.name).is_some());
    let (na, nb) = if clash {
        (copy_names(a, 1), copy_names(b, 2))
    } else {
        (names(a), names(b))
    };
    let mut j = juxtapose(&[(a, na), (b, nb)]);
    let width = j.gens.len();
    for &i in &j.positions[0] {
        for &k in &j.positions[1] {
            let mut exps = vec![0; width];
            exps[i] = 1;
            exps[k] = 1;
            j.relations.push(Element::monomial(
                Monomial::from_exponents(exps),
                crate::linalg::q(1),
            ));
        }
    }
    Presentation::assemble(RawPresentation {
        name: format!("{}⊕{}", a.name(), b.name()),
        gens: j.gens,
        relations: j.relations,
        differential: j.differential,
        cap: a.cap().min(b.cap()),
        flags: merge_flags(a, b),
        word_bound: None,
    })
}

/// `A / (gens)` with the projection. Fails with `IdealNotClosed` when the
/// enlarged ideal is not stable under d up to the cap.
pub fn quotient_by_ideal(
    a: &Arc<Presentation>,
    gens: &[Element],
) -> Result<(Arc<Presentation>, Morphism)> {
    quotient_named(a, gens, format!("{}/I", a.name()))
}

pub fn quotient_named(
    a: &Arc<Presentation>,
    gens: &[Element],
    name: String,
) -> Result<(Arc<Presentation>, Morphism)> {
    for g in gens {
        a.degree_of(g)?;
    }
    let mut raw = a.to_raw();
    raw.name = name;
    raw.relations.extend(gens.iter().cloned());
    let q = Presentation::assemble(raw)?;
    let proj = projection(a, &q);
    Ok((q, proj))
}

fn projection(a: &Arc<Presentation>, q: &Arc<Presentation>) -> Morphism {
    let images = (0..a.ngens()).map(|i| q.gen(i)).collect();
    Morphism::new_unchecked(format!("ρ_{}", q.name()), a.clone(), q.clone(), images)
}

/// `ΛV / Λ^{>m}V` with the projection. Only free algebras are accepted, since
/// word length is not well defined modulo arbitrary relations.
pub fn truncate_word_length(a: &Arc<Presentation>, m: u32) -> Result<(Arc<Presentation>, Morphism)> {
    if !a.relations().is_empty() {
        return Err(Error::NotFree(a.name().to_string()));
    }
    let mut raw = a.to_raw();
    raw.name = format!("{}/Λ>{m}", a.name());
    raw.word_bound = Some(raw.word_bound.map_or(m, |b| b.min(m)));
    let q = Presentation::assemble(raw)?;
    let proj = projection(a, &q);
    Ok((q, proj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PresentationBuilder;

    #[test]
    fn tensor_of_odd_spheres_anticommutes() {
        let s = PresentationBuilder::new("S3").gen("a", 3).build().unwrap();
        let (t, i1, i2) = tensor(&s, &s).unwrap();
        let a1 = i1.apply(&s.gen(0));
        let a2 = i2.apply(&s.gen(0));
        assert_eq!(t.mul(&a1, &a2), -t.mul(&a2, &a1));
        assert_eq!(t.format(&a1), "a1");
    }

    #[test]
    fn koszul_sign_of_injections() {
        let a = PresentationBuilder::new("A").gen("a", 3).build().unwrap();
        let b = PresentationBuilder::new("B").gen("b", 5).build().unwrap();
        let (t, ia, ib) = tensor(&a, &b).unwrap();
        let (x, y) = (ia.apply(&a.gen(0)), ib.apply(&b.gen(0)));
        assert_eq!(t.mul(&y, &x), -t.mul(&x, &y));
    }

    #[test]
    fn direct_sum_kills_mixed_products() {
        let a = PresentationBuilder::new("A").gen("a", 3).build().unwrap();
        let b = PresentationBuilder::new("B").gen("b", 5).build().unwrap();
        let s = direct_sum(&a, &b).unwrap();
        assert!(s.parse("a*b").unwrap().is_zero());
        assert_eq!(s.dim(0), 1);
        assert_eq!(s.dim(3), 1);
        assert_eq!(s.dim(8), 0);
    }

    #[test]
    fn quotient_rejects_unclosed_ideal() {
        let s = PresentationBuilder::new("S4")
            .gen("a", 4)
            .gen("x", 7)
            .d("x", "a^2")
            .cap(12)
            .build()
            .unwrap();
        let x = s.parse("x").unwrap();
        assert!(matches!(quotient_by_ideal(&s, &[x]), Err(Error::IdealNotClosed { .. })));
    }

    #[test]
    fn quotient_by_difference_is_one_generator() {
        let s = PresentationBuilder::new("S3").gen("a", 3).cap(12).build().unwrap();
        let (t, _) = tensor_power(&s, 2).unwrap();
        let (q, proj) = quotient_by_ideal(&t, &[t.parse("a1 - a2").unwrap()]).unwrap();
        let dims: Vec<usize> = (0..=7).map(|k| q.dim(k)).collect();
        assert_eq!(dims, vec![1, 0, 0, 1, 0, 0, 0, 0]);
        assert_eq!(proj.apply(&t.parse("a1").unwrap()), proj.apply(&t.parse("a2").unwrap()));
    }
}
