//! Relative Sullivan algebras: path fibrations, acyclic closures, fibers,
//! cofibers and pushouts.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::algebra::{Element, Flags, Generator, Presentation, RawPresentation};
use crate::construct::{suffixed, tensor_power};
use crate::error::{Error, Result};
use crate::homology::{homology, is_quasi_iso};
use crate::linalg::{Echelon, SparseVec, Q};
use crate::morphism::Morphism;
use crate::sullivan::widen;

/// `(A ⊗ ΛW, D)` over a base `A`.
#[derive(Clone, Debug)]
pub struct RelativeModel {
    pub base: Arc<Presentation>,
    pub total: Arc<Presentation>,
    pub inclusion: Morphism,
    pub new_generators: Vec<String>,
    /// Quasi-isomorphism from the total onto whatever the model represents.
    pub comparison: Option<Morphism>,
}

impl RelativeModel {
    /// Reads a morphism that sends every base generator to the target
    /// generator of the same name as a relative model.
    pub fn from_inclusion(phi: &Morphism) -> Result<RelativeModel> {
        let (base, total) = (phi.source(), phi.target());
        for (i, g) in base.generators().iter().enumerate() {
            let same = total.gen_named(&g.name).ok();
            if same.as_ref() != Some(phi.image_of(i)) {
                return Err(Error::InvalidMorphism {
                    morphism: phi.name().to_string(),
                    message: format!("`{}` is not sent to the generator of the same name", g.name),
                });
            }
        }
        if base.relations().len() != total.relations().len() {
            return Err(Error::InvalidMorphism {
                morphism: phi.name().to_string(),
                message: "target has relations beyond the base".into(),
            });
        }
        let new_generators = total
            .generators()
            .iter()
            .filter(|g| base.index_of(&g.name).is_none())
            .map(|g| g.name.clone())
            .collect();
        Ok(RelativeModel {
            base: base.clone(),
            total: total.clone(),
            inclusion: phi.clone(),
            new_generators,
            comparison: None,
        })
    }

    pub fn is_new(&self, i: usize) -> bool {
        self.base.index_of(&self.total.generator(i).name).is_none()
    }

    pub fn new_indices(&self) -> Vec<usize> {
        (0..self.total.ngens()).filter(|&i| self.is_new(i)).collect()
    }

    /// Word-length-one part of `D` on the new generators, in base generators.
    pub fn linear_part_on_new(&self) -> Vec<(String, Element)> {
        self.new_indices()
            .into_iter()
            .map(|i| {
                let d = self.total.differential_of(i);
                let lin = d.filter(|m| m.word_length() == 1);
                (self.total.generator(i).name.clone(), lin)
            })
            .collect()
    }
}

fn inclusion_by_name(base: &Arc<Presentation>, total: &Arc<Presentation>, name: &str) -> Result<Morphism> {
    let images = base
        .generators()
        .iter()
        .map(|g| total.gen_named(&g.name))
        .collect::<Result<Vec<_>>>()?;
    Morphism::new(name, base.clone(), total.clone(), images)
}

/// Staging presentation: `base` plus extra generators with zero differential.
fn stage(base: &Presentation, extra: &[Generator], name: String, flags: Flags) -> Result<Arc<Presentation>> {
    let n = base.ngens();
    let width = n + extra.len();
    let mut raw = base.to_raw();
    raw.name = name;
    raw.flags = flags;
    raw.differential = raw.differential.iter().map(|e| widen(e, n, width)).collect();
    raw.relations = raw.relations.iter().map(|e| widen(e, n, width)).collect();
    raw.gens.extend(extra.iter().cloned());
    Presentation::assemble_unchecked(raw)
}

fn needs_low_degree_flag(base: &Presentation, extra: &[Generator]) -> Flags {
    Flags {
        non_simply_connected: base.flags().non_simply_connected || extra.iter().any(|g| g.degree == 1),
        formal: false,
    }
}

fn finish(staged: &Arc<Presentation>, differential: Vec<Element>) -> Result<Arc<Presentation>> {
    let mut raw = staged.to_raw();
    raw.differential = differential;
    Presentation::assemble(raw)
}

/// Name of the hat generator for copy `i` of `v`.
pub fn hat_name(v: &str, i: usize) -> String {
    format!("{v}_hat{i}")
}

struct PathBuilder<'a> {
    w: Arc<Presentation>,
    lv: &'a Presentation,
    dv: Vec<Option<Element>>,
    copy: Vec<Vec<usize>>,
    hat: Vec<Vec<usize>>,
    owner: BTreeMap<usize, (usize, usize)>,
    in_progress: BTreeSet<usize>,
    bound: u32,
}

impl PathBuilder<'_> {
    fn d_of(&mut self, e: &Element) -> Result<Element> {
        let mut missing = BTreeSet::new();
        for (m, _) in e.terms() {
            for (j, &x) in m.exponents().iter().enumerate() {
                if x > 0 && self.dv[j].is_none() {
                    missing.insert(j);
                }
            }
        }
        for j in missing {
            self.ensure(j)?;
        }
        let values: Vec<Element> = self.dv.iter().map(|d| d.clone().unwrap_or_default()).collect();
        Ok(self.w.apply_derivation(e, &values, 1))
    }

    fn ensure(&mut self, j: usize) -> Result<()> {
        if self.dv[j].is_some() {
            return Ok(());
        }
        let (v, i) = self.owner[&j];
        if !self.in_progress.insert(j) {
            return Err(Error::SeriesNonterminating(self.w.generator(j).name.clone()));
        }
        let d = self.hat_differential(v, i)?;
        self.in_progress.remove(&j);
        self.dv[j] = Some(d);
        Ok(())
    }

    /// `D v̂_i = v_{i+1} − v_i − Σ_{k≥1} (s_i D)^k / k! (v_i)`.
    fn hat_differential(&mut self, v: usize, i: usize) -> Result<Element> {
        let w = self.w.clone();
        let mut s = vec![Element::zero(); w.ngens()];
        for u in 0..self.lv.ngens() {
            let h = w.gen(self.hat[u][i]);
            s[self.copy[u][i]] = h.clone();
            s[self.copy[u][i + 1]] = h;
        }
        let mut t = w.gen(self.copy[v][i]);
        let mut sum = Element::zero();
        let mut k = 1;
        loop {
            let dt = self.d_of(&t)?;
            t = w.apply_derivation(&dt, &s, -1).scale(&Q::new(1.into(), k.into()));
            if t.is_zero() {
                break;
            }
            sum = &sum + &t;
            if k >= self.bound {
                return Err(Error::SeriesNonterminating(self.w.generator(self.hat[v][i]).name.clone()));
            }
            k += 1;
        }
        Ok(&(&w.gen(self.copy[v][i + 1]) - &w.gen(self.copy[v][i])) - &sum)
    }
}

/// Relative model of `X^I → X^n` over `(ΛV)^{⊗n}`.
pub fn path_fibration_model(lv: &Arc<Presentation>, n: usize) -> Result<RelativeModel> {
    if !lv.is_free() {
        return Err(Error::NotFree(lv.name().to_string()));
    }
    if n < 2 {
        return Err(Error::Invalid("path fibration needs n ≥ 2".into()));
    }
    let (base, _) = tensor_power(lv, n)?;
    let mut extra = Vec::new();
    for g in lv.generators() {
        for i in 1..n {
            let name = hat_name(&g.name, i);
            if g.degree < 2 {
                return Err(Error::InvalidDegree {
                    name,
                    degree: g.degree.saturating_sub(1),
                });
            }
            extra.push(Generator::new(name, g.degree - 1));
        }
    }
    let flags = needs_low_degree_flag(&base, &extra);
    let w = stage(&base, &extra, format!("P{n}({})", lv.name()), flags)?;
    let index = |name: &str| w.index_of(name).expect("staged generator");
    let copy: Vec<Vec<usize>> = lv
        .generators()
        .iter()
        .map(|g| {
            let mut c = vec![usize::MAX];
            c.extend((1..=n).map(|i| index(&suffixed(&g.name, i))));
            c
        })
        .collect();
    let hat: Vec<Vec<usize>> = lv
        .generators()
        .iter()
        .map(|g| {
            let mut c = vec![usize::MAX];
            c.extend((1..n).map(|i| index(&hat_name(&g.name, i))));
            c
        })
        .collect();
    let mut owner = BTreeMap::new();
    for (v, hs) in hat.iter().enumerate() {
        for (i, &j) in hs.iter().enumerate().skip(1) {
            owner.insert(j, (v, i));
        }
    }
    let dv = (0..w.ngens())
        .map(|j| (!owner.contains_key(&j)).then(|| w.differential_of(j).clone()))
        .collect();
    let mut pb = PathBuilder {
        w: w.clone(),
        lv,
        dv,
        copy,
        hat,
        owner: owner.clone(),
        in_progress: BTreeSet::new(),
        bound: lv.cap().max(1),
    };
    for &j in owner.keys() {
        pb.ensure(j)?;
    }
    let diffs: Vec<Element> = pb.dv.into_iter().map(|d| d.expect("computed")).collect();
    let total = finish(&w, diffs)?;
    let inclusion = inclusion_by_name(&base, &total, "ι")?;
    let images = total
        .generators()
        .iter()
        .map(|g| {
            if owner.contains_key(&w.index_of(&g.name).expect("same names")) {
                Ok(Element::zero())
            } else {
                let stem = lv
                    .generators()
                    .iter()
                    .find(|v| (1..=n).any(|i| suffixed(&v.name, i) == g.name))
                    .expect("copy of a generator");
                lv.gen_named(&stem.name)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let comparison = Morphism::new("π", total.clone(), lv.clone(), images)?;
    let hi = total.cap().saturating_sub(1);
    if !is_quasi_iso(&comparison, 0, hi)? {
        return Err(Error::NotQuasiIso {
            morphism: "π".into(),
            degree: hi,
        });
    }
    Ok(RelativeModel {
        new_generators: extra.iter().map(|g| g.name.clone()).collect(),
        base,
        total,
        inclusion,
        comparison: Some(comparison),
    })
}

/// The augmentation `A → (Q, 0)`.
pub fn augmentation(a: &Arc<Presentation>) -> Result<Morphism> {
    Morphism::new("ε", a.clone(), Presentation::trivial(a.cap()), vec![Element::zero(); a.ngens()])
}

/// Adds generators degree by degree until the total is acyclic up to one
/// below the cap.
pub fn acyclic_closure(a: &Arc<Presentation>) -> Result<RelativeModel> {
    let mut t = a.clone();
    let mut new_names: Vec<String> = Vec::new();
    let hi = a.cap().saturating_sub(1);
    for k in 1..=hi {
        loop {
            let h = homology(&t, k, k)?;
            let reps = h.representatives(k).to_vec();
            if reps.is_empty() {
                break;
            }
            if k == 1 {
                return Err(Error::Invalid(format!(
                    "{} has classes in degree 1; the closure would need degree-0 generators",
                    a.name()
                )));
            }
            let mut extra = Vec::new();
            let mut diffs = Vec::new();
            for (i, z) in reps.iter().enumerate() {
                let linear: Vec<_> = z.terms().filter(|(m, _)| m.word_length() == 1).collect();
                let mut name = None;
                if linear.len() == 1 {
                    let j = linear[0].0.exponents().iter().position(|&x| x == 1).expect("linear");
                    let c = format!("{}_hat", t.generator(j).name);
                    if t.index_of(&c).is_none() && !extra.iter().any(|g: &Generator| g.name == c) {
                        name = Some(c);
                    }
                }
                let name = name.unwrap_or_else(|| {
                    let mut idx = i + 1;
                    loop {
                        let c = format!("u{}_{idx}", k - 1);
                        if t.index_of(&c).is_none() {
                            break c;
                        }
                        idx += 1;
                    }
                });
                extra.push(Generator::new(name, k - 1));
                diffs.push(z.clone());
            }
            let flags = needs_low_degree_flag(&t, &extra);
            let n = t.ngens();
            let width = n + extra.len();
            let mut raw = t.to_raw();
            raw.flags = flags;
            raw.differential = raw.differential.iter().map(|e| widen(e, n, width)).collect();
            raw.relations = raw.relations.iter().map(|e| widen(e, n, width)).collect();
            raw.differential.extend(diffs.iter().map(|e| widen(e, n, width)));
            new_names.extend(extra.iter().map(|g| g.name.clone()));
            raw.gens.extend(extra);
            raw.name = format!("{}⊗ΛÛ", a.name());
            t = Presentation::assemble(raw)?;
        }
    }
    let inclusion = inclusion_by_name(a, &t, "ι")?;
    let comparison = augmentation(&t)?;
    Ok(RelativeModel {
        base: a.clone(),
        total: t,
        inclusion,
        new_generators: new_names,
        comparison: Some(comparison),
    })
}

/// The fiber `(ΛW, D̄)` obtained by sending the base generators to zero, with
/// the projection from the total.
pub fn fiber_model(rm: &RelativeModel) -> Result<(Arc<Presentation>, Morphism)> {
    let total = &rm.total;
    let gens: Vec<Generator> = rm
        .new_indices()
        .iter()
        .map(|&i| total.generator(i).clone())
        .collect();
    let flags = Flags {
        non_simply_connected: gens.iter().any(|g| g.degree == 1),
        formal: false,
    };
    let staged = Presentation::assemble_unchecked(RawPresentation {
        name: format!("F({})", total.name()),
        gens,
        relations: Vec::new(),
        differential: Vec::new(),
        cap: total.cap(),
        flags,
        word_bound: None,
    })?;
    let images: Vec<Element> = (0..total.ngens())
        .map(|i| {
            if rm.is_new(i) {
                staged.gen_named(&total.generator(i).name).expect("fiber generator")
            } else {
                Element::zero()
            }
        })
        .collect();
    let proj0 = Morphism::new_unchecked("q", total.clone(), staged.clone(), images.clone());
    let diffs = staged
        .generators()
        .iter()
        .map(|g| proj0.apply(total.differential_of(total.index_of(&g.name).expect("present"))))
        .collect();
    let fiber = finish(&staged, diffs)?;
    let proj = Morphism::new("q", total.clone(), fiber.clone(), images)?;
    Ok((fiber, proj))
}

/// A sub-cdga of `A` presented by generators and relations, with its
/// inclusion.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    pub presentation: Arc<Presentation>,
    pub inclusion: Morphism,
}

/// Presents `Q ⊕ S` where `S[k]` spans a d-stable subspace of `A^k` closed
/// under products, for `1 ≤ k ≤ top`. Generators of degree `top` get zero
/// differential since their boundaries lie outside the computed range.
pub fn present_subalgebra(
    a: &Arc<Presentation>,
    spaces: &BTreeMap<u32, Vec<SparseVec>>,
    top: u32,
    name: &str,
) -> Result<Subalgebra> {
    let empty = Vec::new();
    let space = |k: u32| spaces.get(&k).unwrap_or(&empty);
    let mut gens: Vec<Generator> = Vec::new();
    let mut images: Vec<Element> = Vec::new();
    for k in 1..=top {
        let mut span = Echelon::new();
        for i in 1..k {
            for x in space(i) {
                for y in space(k - i) {
                    let p = a.mul(&a.from_coords(i, x), &a.from_coords(k - i, y));
                    span.insert(a.coords(&p, k));
                }
            }
        }
        let mut idx = 0;
        for v in space(k) {
            if span.insert(v.clone()) {
                idx += 1;
                gens.push(Generator::new(format!("c{k}_{idx}"), k));
                images.push(a.from_coords(k, v));
            }
        }
    }
    let flags = Flags {
        non_simply_connected: gens.iter().any(|g| g.degree == 1),
        formal: false,
    };
    let raw = RawPresentation {
        name: name.to_string(),
        gens,
        relations: Vec::new(),
        differential: Vec::new(),
        cap: top,
        flags,
        word_bound: None,
    };
    let mut f = Presentation::assemble_unchecked(raw.clone())?;
    // Generators are already sorted by degree and index, so images align.
    let mut relations = Vec::new();
    for k in 1..=top {
        let psi = Morphism::new_unchecked("ψ", f.clone(), a.clone(), images.clone());
        let kernel = if f.dim(k) == 0 { Vec::new() } else { psi.matrix(k).kernel() };
        if kernel.is_empty() {
            continue;
        }
        relations.extend(kernel.iter().map(|v| f.from_coords(k, v)));
        let mut r = raw.clone();
        r.relations = relations.clone();
        f = Presentation::assemble_unchecked(r)?;
    }
    let psi = Morphism::new_unchecked("ψ", f.clone(), a.clone(), images.clone());
    let mut diffs = Vec::new();
    for (i, g) in f.generators().iter().enumerate() {
        if g.degree >= top {
            diffs.push(Element::zero());
            continue;
        }
        let target = a.coords(&a.d(&images[i]), g.degree + 1);
        let pre = psi
            .matrix(g.degree + 1)
            .solve(&target)
            .ok_or_else(|| Error::Invalid("subspace is not closed under d".into()))?;
        diffs.push(f.from_coords(g.degree + 1, &pre));
    }
    let mut r = raw;
    r.relations = relations;
    r.differential = diffs;
    let p = Presentation::assemble(r)?;
    let inclusion = Morphism::new("inc", p.clone(), a.clone(), images)?;
    Ok(Subalgebra {
        presentation: p,
        inclusion,
    })
}

/// `Q ⊕ ker φ` for a surjective `φ`, presented up to the source cap. The
/// result need not be a Sullivan algebra.
pub fn cofiber_model(phi: &Morphism) -> Result<Subalgebra> {
    let a = phi.source();
    let cap = a.cap().min(phi.target().cap());
    phi.check_surjective(cap)?;
    let mut spaces = BTreeMap::new();
    for k in 1..=cap {
        if a.dim(k) == 0 {
            continue;
        }
        let m = phi.matrix(k);
        let ker = if phi.target().dim(k) == 0 {
            (0..a.dim(k)).map(crate::linalg::unit).collect()
        } else {
            m.kernel()
        };
        spaces.insert(k, ker);
    }
    present_subalgebra(a, &spaces, cap, &format!("Q⊕ker {}", phi.name()))
}

/// Pushout of `rm` along `g : A → C`: the relative model `C ⊗ ΛW` with
/// `D̄(w) = ĝ(Dw)`.
pub fn pushout_model(rm: &RelativeModel, g: &Morphism) -> Result<RelativeModel> {
    if g.source().generators() != rm.base.generators() {
        return Err(Error::PresentationMismatch);
    }
    let c = g.target();
    let extra: Vec<Generator> = rm
        .new_indices()
        .iter()
        .map(|&i| rm.total.generator(i).clone())
        .collect();
    let flags = needs_low_degree_flag(c, &extra);
    let mut w = stage(c, &extra, format!("{}⊗ΛW", c.name()), flags)?;
    {
        let mut raw = w.to_raw();
        raw.cap = c.cap().min(rm.total.cap());
        w = Presentation::assemble_unchecked(raw)?;
    }
    let embed_c = inclusion_by_name_unchecked(c, &w);
    let images: Vec<Element> = (0..rm.total.ngens())
        .map(|i| {
            let name = &rm.total.generator(i).name;
            if rm.is_new(i) {
                w.gen_named(name).expect("staged")
            } else {
                let b = rm.base.index_of(name).expect("base generator");
                embed_c.apply(g.image_of(b))
            }
        })
        .collect();
    let ghat = Morphism::new_unchecked("ĝ", rm.total.clone(), w.clone(), images);
    let diffs = w
        .generators()
        .iter()
        .enumerate()
        .map(|(j, gen)| match rm.total.index_of(&gen.name).filter(|&i| rm.is_new(i)) {
            Some(i) => ghat.apply(rm.total.differential_of(i)),
            None => w.differential_of(j).clone(),
        })
        .collect();
    let total = finish(&w, diffs)?;
    let inclusion = inclusion_by_name(c, &total, "ι")?;
    Ok(RelativeModel {
        base: c.clone(),
        total,
        inclusion,
        new_generators: extra.iter().map(|g| g.name.clone()).collect(),
        comparison: None,
    })
}

fn inclusion_by_name_unchecked(base: &Arc<Presentation>, total: &Arc<Presentation>) -> Morphism {
    let images = base
        .generators()
        .iter()
        .map(|g| total.gen_named(&g.name).expect("generator present"))
        .collect();
    Morphism::new_unchecked("ι", base.clone(), total.clone(), images)
}

/// The map out of a pushout determined by `α` on `C` and `β` on the new
/// generators: `(α, β)(c) = α(c)`, `(α, β)(w) = β(w)`.
pub fn pushout_induced(po: &RelativeModel, alpha: &Morphism, beta: &Morphism) -> Result<Morphism> {
    let target = alpha.target();
    let images = (0..po.total.ngens())
        .map(|i| {
            let name = &po.total.generator(i).name;
            if po.is_new(i) {
                let j = beta
                    .source()
                    .index_of(name)
                    .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
                Ok(beta.image_of(j).clone())
            } else {
                let j = alpha.source().index_of(name).expect("base generator");
                Ok(alpha.image_of(j).clone())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Morphism::new("(α,β)", po.total.clone(), target.clone(), images)
}
