//! Minimal Sullivan models, the isomorphism test between minimal algebras,
//! multiplication morphisms and s-models of diagonals.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, Generator, Presentation, RawPresentation};
use crate::construct::{embed, juxtapose, suffixed, tensor_power};
use crate::error::{Error, Result};
use crate::homology::{generates_kernel, homology, is_quasi_iso, induced_map};
use crate::linalg::{unit, Echelon, Q};
use crate::morphism::Morphism;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Cycle generator added to hit a missing class.
    CokerHit,
    /// Generator added to kill a class in the kernel.
    KerKill,
}

#[derive(Clone, Debug)]
pub struct SullivanModel {
    pub model: Arc<Presentation>,
    /// Quasi-isomorphism from the model onto the input.
    pub comparison: Morphism,
    pub minimal: bool,
    pub verified_up_to: u32,
    /// Generators in the order they were added.
    pub provenance: Vec<(String, u32, Provenance)>,
}

pub(crate) fn widen(e: &Element, n: usize, width: usize) -> Element {
    let pos: Vec<usize> = (0..n).collect();
    embed(e, &pos, width)
}

/// Adds generators with given differentials (elements of `m`) and images in
/// `target`, keeping the images aligned with the new generator order.
pub(crate) fn extend_free(
    m: &Arc<Presentation>,
    images: &[Element],
    new: Vec<(Generator, Element, Element)>,
    target: &Arc<Presentation>,
) -> Result<(Arc<Presentation>, Vec<Element>)> {
    let n = m.ngens();
    let width = n + new.len();
    let mut raw = m.to_raw();
    raw.differential = raw.differential.iter().map(|e| widen(e, n, width)).collect();
    raw.relations = raw.relations.iter().map(|e| widen(e, n, width)).collect();
    let mut by_name: BTreeMap<String, Element> = m
        .generators()
        .iter()
        .zip(images)
        .map(|(g, e)| (g.name.clone(), e.clone()))
        .collect();
    for (g, dg, img) in new {
        raw.differential.push(widen(&dg, n, width));
        by_name.insert(g.name.clone(), img);
        raw.gens.push(g);
    }
    let p = Presentation::assemble_unchecked(raw)?;
    let imgs = p
        .generators()
        .iter()
        .map(|g| target.reduce(&by_name[&g.name]))
        .collect();
    Ok((p, imgs))
}

/// Name for a new generator: the input generator's name when `rep` is a
/// multiple of a single generator, otherwise `v{degree}_{i}`.
fn pick_name(rep: &Element, a: &Presentation, used: &mut Vec<String>, degree: u32) -> String {
    let mut candidate = None;
    if rep.num_terms() == 1 {
        let (m, _) = rep.terms().next().expect("one term");
        if m.word_length() == 1 {
            let i = m.exponents().iter().position(|&x| x == 1).expect("linear");
            candidate = Some(a.generator(i).name.clone());
        }
    }
    let name = match candidate {
        Some(c) if !used.contains(&c) => c,
        _ => {
            let mut i = 1;
            loop {
                let c = format!("v{degree}_{i}");
                if !used.contains(&c) && a.index_of(&c).is_none() {
                    break c;
                }
                i += 1;
            }
        }
    };
    used.push(name.clone());
    name
}

/// Builds the minimal Sullivan model of `a` through degree `cap`, degree by
/// degree. The input must be validated at least one degree past `cap`.
pub fn build_minimal_model(a: &Arc<Presentation>, cap: u32) -> Result<SullivanModel> {
    if a.cap() < cap + 1 {
        return Err(Error::RangeExceedsCap {
            requested: cap,
            needed: cap + 1,
            cap: a.cap(),
        });
    }
    let ha = homology(a, 0, cap)?;
    if ha.betti(1) != 0 {
        return Err(Error::NotSimplyConnected(a.name().to_string()));
    }
    let mut m = Presentation::assemble_unchecked(RawPresentation {
        name: format!("M({})", a.name()),
        gens: Vec::new(),
        relations: Vec::new(),
        differential: Vec::new(),
        cap: cap + 1,
        flags: Default::default(),
        word_bound: None,
    })?;
    let mut images: Vec<Element> = Vec::new();
    let mut used: Vec<String> = Vec::new();
    let mut provenance = Vec::new();
    for k in 2..=cap {
        // Hit the cokernel in degree k.
        let phi = Morphism::new_unchecked("φ", m.clone(), a.clone(), images.clone());
        let hm = homology(&m, k, k)?;
        let mut img = Echelon::new();
        for z in hm.representatives(k) {
            img.insert(ha.reduce(&phi.apply(z))?);
        }
        let mut new = Vec::new();
        for (i, rep) in ha.representatives(k).iter().enumerate() {
            if img.insert(unit(i)) {
                let name = pick_name(rep, a, &mut used, k);
                provenance.push((name.clone(), k, Provenance::CokerHit));
                new.push((Generator::new(name, k), Element::zero(), rep.clone()));
            }
        }
        if !new.is_empty() {
            (m, images) = extend_free(&m, &images, new, a)?;
        }
        if k == cap {
            break;
        }
        // Kill the kernel in degree k + 1.
        let phi = Morphism::new_unchecked("φ", m.clone(), a.clone(), images.clone());
        let mut new = Vec::new();
        for c in dying_classes(&m, &phi, k + 1, &ha)? {
            let dmat = a.differential_matrix(k);
            let target = a.coords(&phi.apply(&c), k + 1);
            let pre = dmat
                .solve(&target)
                .ok_or_else(|| Error::Invalid("kernel class is not a boundary".into()))?;
            let image = a.from_coords(k, &pre);
            let name = pick_name(&image, a, &mut used, k);
            provenance.push((name.clone(), k, Provenance::KerKill));
            new.push((Generator::new(name, k), c, image));
        }
        if !new.is_empty() {
            (m, images) = extend_free(&m, &images, new, a)?;
        }
    }
    let mut raw = m.to_raw();
    raw.flags = Default::default();
    let m = Presentation::assemble(raw)?;
    let comparison = Morphism::new(format!("θ_{}", a.name()), m.clone(), a.clone(), images)?;
    if !is_quasi_iso(&comparison, 0, cap)? {
        return Err(Error::Invalid(format!(
            "model comparison for {} is not a quasi-isomorphism",
            a.name()
        )));
    }
    let minimal = m.is_minimal();
    Ok(SullivanModel {
        model: m,
        comparison,
        minimal,
        verified_up_to: cap,
        provenance,
    })
}

/// Cycles of `m` in degree `k` whose classes die in `a`, one per basis vector
/// of the kernel of `H^k(φ)`.
fn dying_classes(
    m: &Arc<Presentation>,
    phi: &Morphism,
    k: u32,
    ha: &crate::homology::HomologyReport,
) -> Result<Vec<Element>> {
    let hm = homology(m, k, k)?;
    let reps = hm.representatives(k);
    let cols = reps
        .iter()
        .map(|z| ha.reduce(&phi.apply(z)))
        .collect::<Result<Vec<_>>>()?;
    let mat = crate::linalg::Matrix::new(ha.betti(k), cols);
    let kernel = if mat.ncols() == 0 { Vec::new() } else { mat.kernel() };
    Ok(kernel.iter().map(|v| hm.class_element(k, v)).collect())
}

/// Searches for an isomorphism between two minimal Sullivan algebras that
/// sends each generator to a nonzero multiple of a generator of the same
/// degree.
pub fn find_isomorphism(p: &Arc<Presentation>, q: &Arc<Presentation>) -> Option<Morphism> {
    if !p.is_free() || !q.is_free() || !p.is_minimal() || !q.is_minimal() || p.ngens() != q.ngens() {
        return None;
    }
    let mut dp: Vec<u32> = p.generators().iter().map(|g| g.degree).collect();
    let mut dq: Vec<u32> = q.generators().iter().map(|g| g.degree).collect();
    dp.sort_unstable();
    dq.sort_unstable();
    if dp != dq {
        return None;
    }
    let mut images: Vec<Element> = vec![Element::zero(); p.ngens()];
    let mut used = vec![false; q.ngens()];
    if search(p, q, 0, &mut images, &mut used) {
        Morphism::new("iso", p.clone(), q.clone(), images).ok()
    } else {
        None
    }
}

fn ratio(a: &Element, b: &Element) -> Option<Q> {
    let (m, c) = a.terms().next()?;
    let r = b.coefficient(m) / c;
    (a.scale(&r) == *b).then_some(r)
}

fn search(
    p: &Arc<Presentation>,
    q: &Arc<Presentation>,
    i: usize,
    images: &mut Vec<Element>,
    used: &mut Vec<bool>,
) -> bool {
    if i == p.ngens() {
        return true;
    }
    let deg = p.generator(i).degree;
    let partial = Morphism::new_unchecked("partial", p.clone(), q.clone(), images.clone());
    let lhs = partial.apply(p.differential_of(i));
    for j in 0..q.ngens() {
        if used[j] || q.generator(j).degree != deg {
            continue;
        }
        let rhs = q.differential_of(j);
        let lambda = match (lhs.is_zero(), rhs.is_zero()) {
            (true, true) => Some(Q::from_integer(1.into())),
            (false, false) => ratio(rhs, &lhs),
            _ => None,
        };
        let Some(lambda) = lambda else { continue };
        used[j] = true;
        images[i] = q.gen(j).scale(&lambda);
        if search(p, q, i + 1, images, used) {
            return true;
        }
        used[j] = false;
        images[i] = Element::zero();
    }
    false
}

/// `μ_n : A^{⊗n} → A` with the kernel generators `g₁ − g_i`.
#[derive(Clone, Debug)]
pub struct MultiplicationModel {
    pub tensor: Arc<Presentation>,
    pub mu: Morphism,
    pub kernel_generators: Vec<Element>,
    pub injections: Vec<Morphism>,
}

pub fn multiplication_model(a: &Arc<Presentation>, n: usize) -> Result<MultiplicationModel> {
    if n < 2 {
        return Err(Error::Invalid("multiplication model needs n ≥ 2".into()));
    }
    let (t, inj) = tensor_power(a, n)?;
    let mut images = vec![Element::zero(); t.ngens()];
    for (j, g) in a.generators().iter().enumerate() {
        for i in 1..=n {
            let idx = t.index_of(&suffixed(&g.name, i)).expect("copy present");
            images[idx] = a.gen(j);
        }
    }
    let mu = Morphism::new(format!("μ{n}"), t.clone(), a.clone(), images)?;
    let mut gens = Vec::new();
    for g in a.generators() {
        let first = t.gen_named(&suffixed(&g.name, 1))?;
        for i in 2..=n {
            gens.push(&first - &t.gen_named(&suffixed(&g.name, i))?);
        }
    }
    if !generates_kernel(&mu, &gens, t.cap()) {
        return Err(Error::Invalid("kernel generators of μ do not span the kernel".into()));
    }
    Ok(MultiplicationModel {
        tensor: t,
        mu,
        kernel_generators: gens,
        injections: inj,
    })
}

/// `μ_nθ = (Id_A, θ, …, θ) : A ⊗ (ΛV)^{⊗ n−1} → A`.
#[derive(Clone, Debug)]
pub struct SModel {
    pub total: Arc<Presentation>,
    pub mu: Morphism,
    pub kernel_generators: Vec<Element>,
    pub n: usize,
}

pub fn s_model_for_tc(a: &Arc<Presentation>, theta: &Morphism, n: usize, hi: u32) -> Result<SModel> {
    if n < 2 {
        return Err(Error::Invalid("s-model needs n ≥ 2".into()));
    }
    let lv = theta.source();
    if !lv.is_free() {
        return Err(Error::NotFree(lv.name().to_string()));
    }
    if theta.target().generators() != a.generators() {
        return Err(Error::PresentationMismatch);
    }
    let h = induced_map(theta, 0, hi)?;
    if !h.is_iso() {
        let degree = (0..=hi)
            .find(|&k| !(h.is_injective_in(k) && h.is_surjective_in(k)))
            .unwrap_or(0);
        return Err(Error::NotQuasiIso {
            morphism: theta.name().to_string(),
            degree,
        });
    }
    let names_a: Vec<String> = a.generators().iter().map(|g| suffixed(&g.name, 1)).collect();
    let copies: Vec<Vec<String>> = (2..=n)
        .map(|i| lv.generators().iter().map(|g| suffixed(&g.name, i)).collect())
        .collect();
    let mut factors: Vec<(&Presentation, Vec<String>)> = vec![(a.as_ref(), names_a.clone())];
    factors.extend(copies.iter().map(|c| (lv.as_ref(), c.clone())));
    let j = juxtapose(&factors);
    let total = Presentation::assemble(RawPresentation {
        name: format!("{}⊗{}^⊗{}", a.name(), lv.name(), n - 1),
        gens: j.gens,
        relations: j.relations,
        differential: j.differential,
        cap: a.cap().min(lv.cap()),
        flags: a.flags(),
        word_bound: None,
    })?;
    let mut images = vec![Element::zero(); total.ngens()];
    for (i, name) in names_a.iter().enumerate() {
        images[total.index_of(name).expect("present")] = a.gen(i);
    }
    for c in &copies {
        for (i, name) in c.iter().enumerate() {
            images[total.index_of(name).expect("present")] = theta.image_of(i).clone();
        }
    }
    let mu = Morphism::new(format!("μ{n}θ"), total.clone(), a.clone(), images)?;
    let ia_images = names_a.iter().map(|nm| total.gen_named(nm)).collect::<Result<Vec<_>>>()?;
    let ia = Morphism::new_unchecked("i_A", a.clone(), total.clone(), ia_images);
    let mut gens = Vec::new();
    for c in &copies {
        for (i, name) in c.iter().enumerate() {
            gens.push(&ia.apply(theta.image_of(i)) - &total.gen_named(name)?);
        }
    }
    if !generates_kernel(&mu, &gens, hi.min(total.cap())) {
        return Err(Error::Invalid("kernel generators of μθ do not span the kernel".into()));
    }
    Ok(SModel {
        total,
        mu,
        kernel_generators: gens,
        n,
    })
}
