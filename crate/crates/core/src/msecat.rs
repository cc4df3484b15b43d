//! Semi-free modules over a cdga, Ganea fibration models, module retractions
//! and the Poincaré duality check.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::algebra::{Element, Flags, Generator, Monomial, Presentation, RawPresentation};
use crate::error::{Error, Result};
use crate::homology::{homology, HomologyReport};
use crate::linalg::{unit, Echelon, Insert, Matrix, SparseVec, Q};
use crate::relative::RelativeModel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleGenerator {
    pub name: String,
    pub degree: u32,
}

/// `(A ⊕ A⊗X, d)` with `d(x) = d₀x + Σ aⱼ ⊗ xⱼ`. Differentials are known for
/// generators of degree below the cap.
#[derive(Clone, Debug)]
pub struct SemiFreeModel {
    pub base: Arc<Presentation>,
    pub generators: Vec<ModuleGenerator>,
    pub d0: Vec<Element>,
    /// Per generator, `(coefficient in A, target generator)`.
    pub dplus: Vec<Vec<(Element, usize)>>,
    pub cap: u32,
}

/// An element of a semi-free module: a part in `A` plus `A`-coefficients on
/// generators.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModuleElement {
    pub base: Element,
    pub parts: BTreeMap<usize, Element>,
}

impl ModuleElement {
    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.parts.values().all(Element::is_zero)
    }

    fn add_part(&mut self, i: usize, e: Element) {
        let slot = self.parts.entry(i).or_default();
        *slot = &*slot + &e;
        if slot.is_zero() {
            self.parts.remove(&i);
        }
    }
}

fn sign(exp: u32) -> Q {
    if exp % 2 == 0 {
        Q::from_integer(1.into())
    } else {
        Q::from_integer((-1).into())
    }
}

impl SemiFreeModel {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.generators[i].degree
    }

    pub fn has_differential(&self, i: usize) -> bool {
        self.degree(i) < self.cap
    }

    pub fn generator_element(&self, i: usize) -> ModuleElement {
        let mut parts = BTreeMap::new();
        parts.insert(i, self.base.one());
        ModuleElement {
            base: Element::zero(),
            parts,
        }
    }

    pub fn d_generator(&self, i: usize) -> ModuleElement {
        let mut out = ModuleElement {
            base: self.d0[i].clone(),
            parts: BTreeMap::new(),
        };
        for (a, j) in &self.dplus[i] {
            out.add_part(*j, a.clone());
        }
        out
    }

    /// `d(a ⊗ y) = da ⊗ y + (−1)^{|a|} a·dy`.
    pub fn d(&self, e: &ModuleElement) -> ModuleElement {
        let a = &self.base;
        let mut out = ModuleElement {
            base: a.d(&e.base),
            parts: BTreeMap::new(),
        };
        for (&i, coeff) in &e.parts {
            for (deg, c) in coeff.components(a.generators()) {
                out.add_part(i, a.d(&c));
                let s = sign(deg);
                let dy = self.d_generator(i);
                out.base = &out.base + &a.mul(&c, &dy.base).scale(&s);
                for (j, cj) in dy.parts {
                    out.add_part(j, a.mul(&c, &cj).scale(&s));
                }
            }
        }
        out
    }

    /// `d² = 0` on every generator whose second differential is in range.
    pub fn check_square_zero(&self) -> Result<()> {
        for i in 0..self.generators.len() {
            if self.degree(i) + 2 > self.cap {
                continue;
            }
            let dd = self.d(&self.d_generator(i));
            if !dd.is_zero() {
                return Err(Error::SignCheckFailed(self.generators[i].name.clone()));
            }
        }
        Ok(())
    }

    pub fn format(&self, e: &ModuleElement) -> String {
        let mut parts = Vec::new();
        if !e.base.is_zero() {
            parts.push(self.base.format(&e.base));
        }
        for (i, c) in &e.parts {
            parts.push(format!("({})⊗{}", self.base.format(c), self.generators[*i].name));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Basis of the module in degree `k`: the base part first, then one block
    /// per generator.
    fn blocks(&self, k: u32) -> Vec<(Option<usize>, usize)> {
        let mut out = vec![(None, self.base.dim(k))];
        for (i, g) in self.generators.iter().enumerate() {
            if g.degree <= k {
                out.push((Some(i), self.base.dim(k - g.degree)));
            }
        }
        out
    }

    fn coords(&self, e: &ModuleElement, k: u32) -> SparseVec {
        let mut v = SparseVec::new();
        let mut offset = 0;
        for (slot, len) in self.blocks(k) {
            let part = match slot {
                None => self.base.coords(&e.base, k),
                Some(i) => e
                    .parts
                    .get(&i)
                    .map(|c| self.base.coords(c, k - self.degree(i)))
                    .unwrap_or_default(),
            };
            for (j, c) in part {
                v.insert(offset + j, c);
            }
            offset += len;
        }
        v
    }

    fn basis_elements(&self, k: u32) -> Vec<ModuleElement> {
        let mut out = Vec::new();
        for (slot, _) in self.blocks(k) {
            match slot {
                None => out.extend(self.base.basis_elements(k).into_iter().map(|b| ModuleElement {
                    base: b,
                    parts: BTreeMap::new(),
                })),
                Some(i) => {
                    for b in self.base.basis_elements(k - self.degree(i)) {
                        let mut parts = BTreeMap::new();
                        parts.insert(i, b);
                        out.push(ModuleElement {
                            base: Element::zero(),
                            parts,
                        });
                    }
                }
            }
        }
        out
    }

    /// First class of `H(A)` (degree and representative) that becomes a
    /// boundary in the module, searching degrees `1..=hi`.
    pub fn homology_kernel(&self, hi: u32) -> Result<Option<(u32, Element)>> {
        if hi > self.cap {
            return Err(Error::RangeExceedsCap {
                requested: hi,
                needed: hi,
                cap: self.cap,
            });
        }
        let ha = homology(&self.base, 1, hi)?;
        for k in 1..=hi {
            let reps = ha.representatives(k);
            if reps.is_empty() {
                continue;
            }
            let mut bounds = Echelon::new();
            for b in self.basis_elements(k - 1) {
                bounds.insert(self.coords(&self.d(&b), k));
            }
            for (j, z) in reps.iter().enumerate() {
                let ze = ModuleElement {
                    base: z.clone(),
                    parts: BTreeMap::new(),
                };
                if let Insert::Dependent(c) = bounds.insert_tracked(self.coords(&ze, k), unit(j)) {
                    let combo = reps
                        .iter()
                        .enumerate()
                        .filter_map(|(i, r)| c.get(&i).map(|x| r.scale(x)))
                        .fold(Element::zero(), |acc, e| &acc + &e);
                    return Ok(Some((k, combo)));
                }
            }
        }
        Ok(None)
    }
}

/// `A ⊗ ΛW` as a semi-free `A`-module on the monomials of `Λ⁺W` up to `cap`.
pub fn semifree_from_relative(rm: &RelativeModel, cap: u32) -> Result<SemiFreeModel> {
    let total = &rm.total;
    let base = &rm.base;
    let new_idx = rm.new_indices();
    let base_pos: Vec<usize> = (0..total.ngens()).filter(|&i| !rm.is_new(i)).collect();
    let fiber_gens: Vec<Generator> = new_idx.iter().map(|&i| total.generator(i).clone()).collect();
    let f = Presentation::assemble_unchecked(RawPresentation {
        name: "W".into(),
        gens: fiber_gens,
        relations: Vec::new(),
        differential: Vec::new(),
        cap,
        flags: Flags {
            non_simply_connected: true,
            formal: false,
        },
        word_bound: None,
    })?;
    let mut generators = Vec::new();
    let mut lookup: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut monos = Vec::new();
    for k in 1..=cap {
        for m in f.basis(k) {
            lookup.insert(m.exponents().to_vec(), generators.len());
            generators.push(ModuleGenerator {
                name: f.format_monomial(&m),
                degree: k,
            });
            monos.push(m);
        }
    }
    let width = total.ngens();
    let to_total = |m: &Monomial| {
        let mut e = vec![0; width];
        for (i, &x) in m.exponents().iter().enumerate() {
            e[new_idx[i]] = x;
        }
        Monomial::from_exponents(e)
    };
    let mut d0 = Vec::new();
    let mut dplus = Vec::new();
    for (gi, m) in monos.iter().enumerate() {
        if generators[gi].degree >= cap {
            d0.push(Element::zero());
            dplus.push(Vec::new());
            continue;
        }
        let dx = total.d(&Element::monomial(to_total(m), Q::from_integer(1.into())));
        let mut base_part = Element::zero();
        let mut parts: BTreeMap<usize, Element> = BTreeMap::new();
        for (mono, c) in dx.terms() {
            let ex = mono.exponents();
            let mut b = vec![0; width];
            let mut fib = vec![0; width];
            for i in 0..width {
                if rm.is_new(i) {
                    fib[i] = ex[i];
                } else {
                    b[i] = ex[i];
                }
            }
            let (bm, fm) = (Monomial::from_exponents(b), Monomial::from_exponents(fib));
            let (neg, prod) = bm.mul(&fm, total.odd_mask()).expect("monomial is nonzero");
            debug_assert_eq!(&prod, mono);
            let c = if neg { -c.clone() } else { c.clone() };
            let bexp: Vec<u32> = base_pos.iter().map(|&i| bm.exponent(i)).collect();
            let coeff = Element::monomial(Monomial::from_exponents(bexp), c);
            if fm.is_one() {
                base_part = &base_part + &coeff;
            } else {
                let fexp: Vec<u32> = new_idx.iter().map(|&i| fm.exponent(i)).collect();
                let j = *lookup
                    .get(&fexp)
                    .ok_or_else(|| Error::Invalid("fiber monomial beyond the cap".into()))?;
                let slot = parts.entry(j).or_default();
                *slot = &*slot + &coeff;
            }
        }
        d0.push(base.reduce(&base_part));
        dplus.push(
            parts
                .into_iter()
                .map(|(j, c)| (base.reduce(&c), j))
                .filter(|(c, _)| !c.is_zero())
                .collect(),
        );
    }
    let sf = SemiFreeModel {
        base: base.clone(),
        generators,
        d0,
        dplus,
        cap,
    };
    sf.check_square_zero()?;
    Ok(sf)
}

fn tuples(degrees: &[u32], len: usize, budget: i64, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == len {
        out.push(prefix.clone());
        return;
    }
    let remaining = (len - prefix.len() - 1) as i64;
    for (i, &d) in degrees.iter().enumerate() {
        // Every later factor has degree at least one.
        if d as i64 + remaining <= budget {
            prefix.push(i);
            tuples(degrees, len, budget - d as i64, prefix, out);
            prefix.pop();
        }
    }
}

/// The semi-free model of the `m`-th Ganea fibration: generators
/// `s^{−m} x₀⊗…⊗x_m` of degree `Σ|xᵢ| + m`, with
///
/// `d = (−1)^{Σ_{k=1}^{m} (k|x_{m−k}| + k − 1)} d₀x₀⋯d₀x_m
///    + Σᵢ Σⱼ (−1)^{(|a_{ij}|+1)(|x₀|+⋯+|x_{i−1}|+m)} a_{ij} ⊗ s^{−m}x₀⊗⋯⊗x_{ij}⊗⋯⊗x_m`.
pub fn ganea_semifree(sf: &SemiFreeModel, m: usize) -> Result<SemiFreeModel> {
    if m == 0 {
        return Ok(sf.clone());
    }
    let cap = sf.cap;
    let degrees: Vec<u32> = sf.generators.iter().map(|g| g.degree).collect();
    let mut all = Vec::new();
    tuples(&degrees, m + 1, cap as i64 - m as i64, &mut Vec::new(), &mut all);
    let deg = |t: &[usize]| t.iter().map(|&i| degrees[i]).sum::<u32>() + m as u32;
    let index: HashMap<Vec<usize>, usize> = all.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let a = &sf.base;
    let mut generators = Vec::new();
    let mut d0 = Vec::new();
    let mut dplus = Vec::new();
    for t in &all {
        let names: Vec<&str> = t.iter().map(|&i| sf.generators[i].name.as_str()).collect();
        let dt = deg(t);
        generators.push(ModuleGenerator {
            name: format!("[{}]", names.join("|")),
            degree: dt,
        });
        if dt >= cap {
            d0.push(Element::zero());
            dplus.push(Vec::new());
            continue;
        }
        let e: u32 = (1..=m)
            .map(|k| k as u32 * degrees[t[m - k]] + k as u32 - 1)
            .sum();
        let prod = a.mul_all(t.iter().map(|&i| &sf.d0[i]));
        d0.push(prod.scale(&sign(e)));
        let mut parts: BTreeMap<usize, Element> = BTreeMap::new();
        let mut prefix = 0;
        for (i, &xi) in t.iter().enumerate() {
            for (coef, j) in &sf.dplus[xi] {
                let ad = a.degree_of(coef)?.unwrap_or(0);
                let s = sign((ad + 1) * (prefix + m as u32));
                let mut nt = t.clone();
                nt[i] = *j;
                let target = *index
                    .get(&nt)
                    .ok_or_else(|| Error::Invalid("Ganea term beyond the cap".into()))?;
                let slot = parts.entry(target).or_default();
                *slot = &*slot + &coef.scale(&s);
            }
            prefix += degrees[xi];
        }
        dplus.push(parts.into_iter().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (c, j)).collect());
    }
    let g = SemiFreeModel {
        base: sf.base.clone(),
        generators,
        d0,
        dplus,
        cap,
    };
    g.check_square_zero()?;
    Ok(g)
}

/// Values of an `A`-linear retraction on module generators.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleRetraction {
    pub values: BTreeMap<String, Element>,
    pub verified_up_to: u32,
}

/// Solves the linear system `d r(y) − Σ aⱼ r(yⱼ) = d₀y` for every generator
/// `y` of degree below `up_to`, with unknowns `r(y) ∈ A^{|y|}`.
pub fn find_module_retraction(sf: &SemiFreeModel, up_to: u32) -> Option<ModuleRetraction> {
    let a = &sf.base;
    let up_to = up_to.min(sf.cap);
    let gens: Vec<usize> = (0..sf.generators.len())
        .filter(|&i| sf.degree(i) <= up_to)
        .collect();
    let mut col_offset = HashMap::new();
    let mut ncols = 0;
    for &i in &gens {
        col_offset.insert(i, ncols);
        ncols += a.dim(sf.degree(i));
    }
    let eqs: Vec<usize> = gens.iter().copied().filter(|&i| sf.degree(i) < up_to).collect();
    let mut row_offset = HashMap::new();
    let mut nrows = 0;
    for &i in &eqs {
        row_offset.insert(i, nrows);
        nrows += a.dim(sf.degree(i) + 1);
    }
    let mut cols: Vec<SparseVec> = vec![SparseVec::new(); ncols];
    let mut rhs = SparseVec::new();
    for &y in &eqs {
        let k = sf.degree(y) + 1;
        let ro = row_offset[&y];
        for (j, c) in a.coords(&sf.d0[y], k) {
            rhs.insert(ro + j, c);
        }
        let co = col_offset[&y];
        for (bi, b) in a.basis_elements(sf.degree(y)).iter().enumerate() {
            for (j, c) in a.coords(&a.d(b), k) {
                add_entry(&mut cols[co + bi], ro + j, c);
            }
        }
        for (coef, t) in &sf.dplus[y] {
            let co = col_offset[t];
            for (bi, b) in a.basis_elements(sf.degree(*t)).iter().enumerate() {
                for (j, c) in a.coords(&a.mul(coef, b), k) {
                    add_entry(&mut cols[co + bi], ro + j, -c);
                }
            }
        }
    }
    let sol = Matrix::new(nrows, cols).solve(&rhs)?;
    let mut values = BTreeMap::new();
    for &i in &gens {
        let k = sf.degree(i);
        let co = col_offset[&i];
        let mut v = SparseVec::new();
        for j in 0..a.dim(k) {
            if let Some(c) = sol.get(&(co + j)) {
                v.insert(j, c.clone());
            }
        }
        values.insert(sf.generators[i].name.clone(), a.from_coords(k, &v));
    }
    Some(ModuleRetraction {
        values,
        verified_up_to: up_to,
    })
}

fn add_entry(v: &mut SparseVec, i: usize, c: Q) {
    use num_traits::Zero;
    let e = v.entry(i).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        v.remove(&i);
    }
}

/// Re-checks a retraction: every value is homogeneous of the generator's
/// degree and the chain equation holds on each generator below `up_to`.
/// Missing values count as zero. Returns the first failing generator with
/// its defect.
pub fn check_module_retraction(
    sf: &SemiFreeModel,
    values: &BTreeMap<String, Element>,
    up_to: u32,
) -> std::result::Result<(), (String, u32, Element)> {
    let a = &sf.base;
    for name in values.keys() {
        if sf.index_of(name).is_none() {
            return Err((name.clone(), 0, Element::zero()));
        }
    }
    let r = |i: usize| values.get(&sf.generators[i].name).cloned().unwrap_or_default();
    for i in 0..sf.generators.len() {
        let k = sf.degree(i);
        if k > up_to.min(sf.cap) {
            continue;
        }
        let v = r(i);
        match a.degree_of(&v) {
            Ok(None) => {}
            Ok(Some(d)) if d == k => {}
            _ => return Err((sf.generators[i].name.clone(), k, v)),
        }
        if k >= up_to.min(sf.cap) {
            continue;
        }
        let mut defect = &a.d(&v) - &sf.d0[i];
        for (coef, t) in &sf.dplus[i] {
            defect = &defect - &a.mul(coef, &r(*t));
        }
        if !defect.is_zero() {
            return Err((sf.generators[i].name.clone(), k + 1, defect));
        }
    }
    Ok(())
}

/// Pairing ranks of a finite-dimensional homology algebra against its top
/// degree.
#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    pub formal_dimension: u32,
    /// `(i, dim Hⁱ, dim H^{n−i}, rank of the pairing)`.
    pub pairings: Vec<(u32, usize, usize, usize)>,
    pub is_duality: bool,
}

pub fn poincare_duality_check(h: &HomologyReport, n: u32) -> Result<DualityReport> {
    let (lo, hi) = h.range();
    if lo > 0 || hi < n {
        return Err(Error::TopDegreeMismatch {
            expected: n,
            message: format!("homology computed only in degrees {lo}..={hi}"),
        });
    }
    if h.betti(n) != 1 {
        return Err(Error::TopDegreeMismatch {
            expected: n,
            message: format!("H^{n} has dimension {}", h.betti(n)),
        });
    }
    if let Some(k) = (n + 1..=hi).find(|&k| h.betti(k) != 0) {
        return Err(Error::TopDegreeMismatch {
            expected: n,
            message: format!("H^{k} is nonzero"),
        });
    }
    let p = h.presentation();
    let mut pairings = Vec::new();
    let mut ok = true;
    for i in 0..=n {
        let (bi, bj) = (h.betti(i), h.betti(n - i));
        let mut rows = Vec::new();
        for x in h.representatives(i) {
            let mut row = SparseVec::new();
            for (j, y) in h.representatives(n - i).iter().enumerate() {
                let c = h.reduce(&p.mul(x, y))?;
                if let Some(v) = c.get(&0) {
                    row.insert(j, v.clone());
                }
            }
            rows.push(row);
        }
        let rank = Matrix::new(bj, rows).rank();
        ok &= bi == bj && rank == bi;
        pairings.push((i, bi, bj, rank));
    }
    Ok(DualityReport {
        formal_dimension: n,
        pairings,
        is_duality: ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PresentationBuilder;
    use crate::morphism::Morphism;
    use crate::relative::{acyclic_closure, path_fibration_model};

    fn s3() -> Arc<Presentation> {
        PresentationBuilder::new("S3").gen("a", 3).cap(12).build().unwrap()
    }

    #[test]
    fn base_point_of_odd_sphere() {
        let rm = acyclic_closure(&s3()).unwrap();
        let sf = semifree_from_relative(&rm, 11).unwrap();
        assert_eq!(sf.generators[0].name, "a_hat");
        assert_eq!(sf.base.format(&sf.d0[0]), "a");
        assert!(sf.homology_kernel(11).unwrap().is_some());
        assert!(find_module_retraction(&sf, 11).is_none());
        let g1 = ganea_semifree(&sf, 1).unwrap();
        let i = g1.index_of("[a_hat|a_hat]").unwrap();
        assert_eq!(g1.degree(i), 5);
        assert!(g1.homology_kernel(11).unwrap().is_none());
        let r = find_module_retraction(&g1, 11).unwrap();
        assert!(check_module_retraction(&g1, &r.values, 11).is_ok());
    }

    #[test]
    fn ganea_of_even_sphere_path_fibration_squares_to_zero() {
        let s = PresentationBuilder::new("S4")
            .gen("a", 4)
            .gen("x", 7)
            .d("x", "a^2")
            .cap(14)
            .build()
            .unwrap();
        let rm = path_fibration_model(&s, 2).unwrap();
        let sf = semifree_from_relative(&rm, 14).unwrap();
        for m in 1..=2 {
            ganea_semifree(&sf, m).unwrap();
        }
    }

    #[test]
    fn stanley_retraction() {
        let a = PresentationBuilder::new("A").gen("a", 2).cap(12).build().unwrap();
        let b = PresentationBuilder::new("B")
            .gen("a", 2)
            .gen("b", 2)
            .gen("x", 3)
            .d("x", "a^2 + b^2")
            .cap(12)
            .build()
            .unwrap();
        let phi = Morphism::from_strs("phi", a, b, &[("a", "a")]).unwrap();
        let rm = RelativeModel::from_inclusion(&phi).unwrap();
        let sf = semifree_from_relative(&rm, 12).unwrap();
        let r = find_module_retraction(&sf, 12).unwrap();
        let base = &sf.base;
        assert_eq!(base.format(&r.values["b^2"]), "-a^2");
        assert_eq!(base.format(&r.values["b^4"]), "a^4");
        assert!(r.values["x"].is_zero());
        let mut bad = r.values.clone();
        bad.insert("b^2".into(), base.parse("a^2").unwrap());
        let err = check_module_retraction(&sf, &bad, 12).unwrap_err();
        assert_eq!(err.0, "x");
    }

    #[test]
    fn duality_pairings() {
        let p = PresentationBuilder::new("N")
            .gen("a", 3)
            .gen("b", 3)
            .gen("x", 5)
            .d("x", "a*b")
            .cap(12)
            .build()
            .unwrap();
        let h = homology(&p, 0, 11).unwrap();
        assert!(poincare_duality_check(&h, 11).unwrap().is_duality);
        let sl = PresentationBuilder::new("SL81")
            .gen("a", 2)
            .gen("b", 3)
            .gen("x", 5)
            .rel("a^4")
            .rel("a*b")
            .rel("a*x")
            .d("x", "a^3")
            .cap(12)
            .build()
            .unwrap();
        let h = homology(&sl, 0, 11).unwrap();
        assert!(!poincare_duality_check(&h, 8).unwrap().is_duality);
        assert!(matches!(
            poincare_duality_check(&h, 7),
            Err(Error::TopDegreeMismatch { .. })
        ));
    }
}
