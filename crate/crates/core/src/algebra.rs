//! Finitely presented commutative graded algebras with a differential.
//!
//! Monomials are exponent vectors over the generator list, which is kept
//! sorted by `(degree, name)`. A monomial stands for the product of its
//! generators in that order, so every Koszul sign is decided when two
//! monomials are merged. Relations are handled degree by degree with linear
//! algebra: the graded piece of the relation ideal is row reduced once and
//! normal forms are residuals modulo it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, RwLock};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::linalg::{format_q, Echelon, Matrix, SparseVec, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Generator {
            name: name.into(),
            degree,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(ngens: usize) -> Self {
        Monomial(vec![0; ngens])
    }

    pub fn generator(ngens: usize, i: usize) -> Self {
        let mut m = Self::one(ngens);
        m.0[i] = 1;
        m
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn word_length(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn degree(&self, gens: &[Generator]) -> u32 {
        self.0
            .iter()
            .zip(gens)
            .map(|(e, g)| e * g.degree)
            .sum()
    }

    /// Product `self * other` in the free graded-commutative algebra. `None`
    /// when an odd generator would be squared. The boolean is true when the
    /// reordering sign is -1.
    pub fn mul(&self, other: &Monomial, odd: &[bool]) -> Option<(bool, Monomial)> {
        let mut exps = self.0.clone();
        let mut negative = false;
        let n = self.0.len();
        let mut suffix = vec![0u32; n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] + u32::from(odd[i] && self.0[i] > 0);
        }
        for j in 0..n {
            let e = other.0[j];
            if e == 0 {
                continue;
            }
            if odd[j] {
                if self.0[j] > 0 {
                    return None;
                }
                // o_j moves left past the odd generators of self after it
                if suffix[j + 1] % 2 == 1 {
                    negative = !negative;
                }
            }
            exps[j] += e;
        }
        Some((negative, Monomial(exps)))
    }
}

/// A rational combination of monomials. Elements do not point back at their
/// presentation; arithmetic that needs the product goes through
/// [`Presentation`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Element {
    terms: BTreeMap<Monomial, Q>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn scalar(ngens: usize, c: Q) -> Self {
        Element::monomial(Monomial::one(ngens), c)
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Element { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut e = Element::zero();
        for (m, c) in it {
            e.add_term(m, c);
        }
        e
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Q)> {
        self.terms.into_iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn ngens(&self) -> Option<usize> {
        self.terms.keys().next().map(|m| m.len())
    }

    /// Splits into homogeneous components keyed by degree.
    pub fn components(&self, gens: &[Generator]) -> BTreeMap<u32, Element> {
        let mut out: BTreeMap<u32, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree(gens))
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

impl Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

impl Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-Q::one())
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub non_simply_connected: bool,
    pub formal: bool,
}

/// Graded piece of a presentation in one degree.
#[derive(Debug)]
pub struct DegreeData {
    pub degree: u32,
    free: Vec<Monomial>,
    free_index: HashMap<Monomial, usize>,
    ideal: Echelon,
    standard: Vec<usize>,
    standard_pos: HashMap<usize, usize>,
}

impl DegreeData {
    pub fn dim(&self) -> usize {
        self.standard.len()
    }

    pub fn free_dim(&self) -> usize {
        self.free.len()
    }

    pub fn ideal_dim(&self) -> usize {
        self.ideal.rank()
    }
}

/// Staging form used by every constructor before sorting and validation.
#[derive(Clone, Debug)]
pub struct RawPresentation {
    pub name: String,
    pub gens: Vec<Generator>,
    pub relations: Vec<Element>,
    pub differential: Vec<Element>,
    pub cap: u32,
    pub flags: Flags,
    pub word_bound: Option<u32>,
}

/// A commutative differential graded algebra `(ΛV/I, d)` truncated at a
/// degree cap. Structural checks (d of degree +1, d² = 0, d(I) ⊂ I) hold up to
/// the cap; arithmetic itself is exact in every degree.
pub struct Presentation {
    name: String,
    gens: Vec<Generator>,
    odd: Vec<bool>,
    relations: Vec<Element>,
    relation_degrees: Vec<u32>,
    differential: Vec<Element>,
    cap: u32,
    flags: Flags,
    word_bound: Option<u32>,
    cache: RwLock<BTreeMap<u32, Arc<DegreeData>>>,
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presentation")
            .field("name", &self.name)
            .field("gens", &self.gens)
            .field("cap", &self.cap)
            .finish_non_exhaustive()
    }
}

fn enumerate_monomials(gens: &[Generator], degree: u32, bound: Option<u32>) -> Vec<Monomial> {
    fn rec(
        gens: &[Generator],
        i: usize,
        rem: u32,
        wl: u32,
        bound: Option<u32>,
        exps: &mut Vec<u32>,
        out: &mut Vec<Monomial>,
    ) {
        if rem == 0 {
            out.push(Monomial(exps.clone()));
            return;
        }
        if i == gens.len() || gens[i].degree > rem {
            return;
        }
        let g = &gens[i];
        let max_e = if g.is_odd() { 1 } else { rem / g.degree };
        for e in (0..=max_e).rev() {
            if let Some(b) = bound {
                if wl + e > b {
                    continue;
                }
            }
            exps[i] = e;
            rec(gens, i + 1, rem - e * g.degree, wl + e, bound, exps, out);
        }
        exps[i] = 0;
    }
    let mut out = Vec::new();
    let mut exps = vec![0; gens.len()];
    // Degree-0 generators never occur, so the recursion terminates.
    rec(gens, 0, degree, 0, bound, &mut exps, &mut out);
    // Lexicographic with earlier generators first: a^2, a*b, b^2.
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// Re-expresses an element written over `old` generator positions in a new
/// ordering, tracking the Koszul sign of the permutation.
fn remap(e: &Element, perm: &[usize], new_len: usize, new_odd: &[bool]) -> Element {
    let mut out = Element::zero();
    for (m, c) in e.terms() {
        let mut acc = Monomial::one(new_len);
        let mut negative = false;
        let mut zero = false;
        for (i, &ex) in m.exponents().iter().enumerate() {
            if ex == 0 {
                continue;
            }
            let mut g = Monomial::one(new_len);
            g.0[perm[i]] = ex;
            match acc.mul(&g, new_odd) {
                Some((s, p)) => {
                    negative ^= s;
                    acc = p;
                }
                None => {
                    zero = true;
                    break;
                }
            }
        }
        if !zero {
            out.add_term(acc, if negative { -c.clone() } else { c.clone() });
        }
    }
    out
}

impl Presentation {
    /// Sorts, reduces and validates a staged presentation.
    pub fn assemble(raw: RawPresentation) -> Result<Arc<Presentation>> {
        let p = Self::assemble_unchecked(raw)?;
        p.validate()?;
        Ok(p)
    }

    /// Sorts and reduces without the structural d-checks. Generator name and
    /// degree rules are still enforced.
    pub fn assemble_unchecked(raw: RawPresentation) -> Result<Arc<Presentation>> {
        let RawPresentation {
            name,
            gens,
            relations,
            mut differential,
            cap,
            flags,
            word_bound,
        } = raw;
        let mut seen = std::collections::HashSet::new();
        for g in &gens {
            if !seen.insert(g.name.as_str()) {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
            if g.degree == 0 || (g.degree == 1 && !flags.non_simply_connected) {
                return Err(Error::InvalidDegree {
                    name: g.name.clone(),
                    degree: g.degree,
                });
            }
        }
        differential.resize(gens.len(), Element::zero());
        let mut order: Vec<usize> = (0..gens.len()).collect();
        order.sort_by(|&a, &b| (gens[a].degree, &gens[a].name).cmp(&(gens[b].degree, &gens[b].name)));
        let mut perm = vec![0; gens.len()];
        for (new, &old) in order.iter().enumerate() {
            perm[old] = new;
        }
        let new_gens: Vec<Generator> = order.iter().map(|&o| gens[o].clone()).collect();
        let odd: Vec<bool> = new_gens.iter().map(Generator::is_odd).collect();
        let n = new_gens.len();
        let identity = order.iter().enumerate().all(|(i, &o)| i == o);
        let fix = |e: &Element| {
            if identity {
                e.clone()
            } else {
                remap(e, &perm, n, &odd)
            }
        };
        let mut rels = Vec::new();
        let mut rel_degrees = Vec::new();
        for r in &relations {
            let r = fix(r);
            if r.is_zero() {
                continue;
            }
            let comps = r.components(&new_gens);
            if comps.len() > 1 {
                return Err(Error::Inhomogeneous);
            }
            rel_degrees.push(*comps.keys().next().expect("nonzero"));
            rels.push(r);
        }
        let diffs: Vec<Element> = order.iter().map(|&o| fix(&differential[o])).collect();
        let mut p = Presentation {
            name,
            gens: new_gens,
            odd,
            relations: rels,
            relation_degrees: rel_degrees,
            differential: vec![Element::zero(); n],
            cap,
            flags,
            word_bound,
            cache: RwLock::new(BTreeMap::new()),
        };
        let reduced: Vec<Element> = diffs.iter().map(|d| p.reduce(d)).collect();
        p.differential = reduced;
        Ok(Arc::new(p))
    }

    fn validate(&self) -> Result<()> {
        for (i, g) in self.gens.iter().enumerate() {
            let dg = &self.differential[i];
            if dg.is_zero() {
                continue;
            }
            let comps = dg.components(&self.gens);
            if comps.len() > 1 || *comps.keys().next().unwrap() != g.degree + 1 {
                let found = *comps.keys().find(|&&k| k != g.degree + 1).unwrap();
                return Err(Error::DegreeMismatch {
                    generator: g.name.clone(),
                    expected: g.degree + 1,
                    found,
                });
            }
        }
        for (i, g) in self.gens.iter().enumerate() {
            if g.degree + 2 > self.cap {
                continue;
            }
            let dd = self.d(&self.differential[i]);
            if !dd.is_zero() {
                return Err(Error::NotSquareZero {
                    generator: g.name.clone(),
                    value: self.format(&dd),
                });
            }
        }
        for (r, &deg) in self.relations.iter().zip(&self.relation_degrees) {
            if deg + 1 > self.cap {
                continue;
            }
            let dr = self.reduce(&self.derivation_free(r, &self.differential, 1));
            if !dr.is_zero() {
                return Err(Error::IdealNotClosed {
                    witness: self.format(r),
                    image: self.format(&dr),
                });
            }
        }
        Ok(())
    }

    pub fn to_raw(&self) -> RawPresentation {
        RawPresentation {
            name: self.name.clone(),
            gens: self.gens.clone(),
            relations: self.relations.clone(),
            differential: self.differential.clone(),
            cap: self.cap,
            flags: self.flags,
            word_bound: self.word_bound,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The ground field `(Q, 0)`.
    pub fn trivial(cap: u32) -> Arc<Presentation> {
        Presentation::assemble(RawPresentation {
            name: "Q".into(),
            gens: Vec::new(),
            relations: Vec::new(),
            differential: Vec::new(),
            cap,
            flags: Flags::default(),
            word_bound: None,
        })
        .expect("empty presentation is valid")
    }

    /// Same presentation revalidated at another cap.
    pub fn with_cap(&self, cap: u32) -> Result<Arc<Presentation>> {
        let mut raw = self.to_raw();
        raw.cap = cap;
        Presentation::assemble(raw)
    }

    pub fn with_name(&self, name: impl Into<String>) -> Arc<Presentation> {
        let mut raw = self.to_raw();
        raw.name = name.into();
        Presentation::assemble_unchecked(raw).expect("renaming keeps validity")
    }

    /// Renames generators; the result is revalidated.
    pub fn rename_generators(&self, f: impl Fn(&str) -> String) -> Result<Arc<Presentation>> {
        let mut raw = self.to_raw();
        for g in &mut raw.gens {
            g.name = f(&g.name);
        }
        Presentation::assemble(raw)
    }


    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn odd_mask(&self) -> &[bool] {
        &self.odd
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn word_bound(&self) -> Option<u32> {
        self.word_bound
    }

    pub fn relations(&self) -> &[Element] {
        &self.relations
    }

    pub fn differential_of(&self, i: usize) -> &Element {
        &self.differential[i]
    }

    pub fn differentials(&self) -> &[Element] {
        &self.differential
    }

    /// No relations and no word-length truncation.
    pub fn is_free(&self) -> bool {
        self.relations.is_empty() && self.word_bound.is_none()
    }

    pub fn max_generator_degree(&self) -> u32 {
        self.gens.iter().map(|g| g.degree).max().unwrap_or(0)
    }

    /// Free, with generators that can be ordered so that each differential
    /// only involves earlier generators.
    pub fn is_sullivan(&self) -> bool {
        if !self.is_free() {
            return false;
        }
        let n = self.ngens();
        let mut placed = vec![false; n];
        let mut count = 0;
        loop {
            let mut progress = false;
            for i in 0..n {
                if placed[i] {
                    continue;
                }
                let ready = self.differential[i].terms().all(|(m, _)| {
                    m.exponents()
                        .iter()
                        .enumerate()
                        .all(|(j, &x)| x == 0 || placed[j])
                });
                if ready {
                    placed[i] = true;
                    count += 1;
                    progress = true;
                }
            }
            if !progress {
                return count == n;
            }
        }
    }

    /// Sullivan, and no generator differential has a word-length-one term.
    pub fn is_minimal(&self) -> bool {
        self.is_sullivan()
            && self
                .differential
                .iter()
                .all(|d| d.terms().all(|(m, _)| m.word_length() >= 2))
    }

    pub fn one(&self) -> Element {
        Element::scalar(self.ngens(), Q::one())
    }

    pub fn scalar(&self, c: Q) -> Element {
        Element::scalar(self.ngens(), c)
    }

    pub fn gen(&self, i: usize) -> Element {
        self.reduce(&Element::monomial(
            Monomial::generator(self.ngens(), i),
            Q::one(),
        ))
    }

    pub fn gen_named(&self, name: &str) -> Result<Element> {
        self.index_of(name)
            .map(|i| self.gen(i))
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Evaluates an expression in this presentation.
    pub fn eval(&self, e: &Expr) -> Result<Element> {
        Ok(match e {
            Expr::Num(c) => self.scalar(c.clone()),
            Expr::Var(n, _) => self.gen_named(n)?,
            Expr::Add(a, b) => &self.eval(a)? + &self.eval(b)?,
            Expr::Sub(a, b) => &self.eval(a)? - &self.eval(b)?,
            Expr::Mul(a, b) => self.mul(&self.eval(a)?, &self.eval(b)?),
            Expr::Neg(a) => -self.eval(a)?,
            Expr::Pow(a, k) => self.pow(&self.eval(a)?, *k),
        })
    }

    /// Parses and evaluates a polynomial written in the input language.
    pub fn parse(&self, src: &str) -> Result<Element> {
        self.eval(&parse_expr(src)?)
    }

    fn check_shape(&self, e: &Element) -> Result<()> {
        match e.ngens() {
            Some(n) if n != self.ngens() => Err(Error::PresentationMismatch),
            _ => Ok(()),
        }
    }

    /// Product in the free algebra, truncated by word length but not reduced
    /// modulo relations.
    pub fn free_mul(&self, a: &Element, b: &Element) -> Element {
        let mut out = Element::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                if let Some((neg, m)) = ma.mul(mb, &self.odd) {
                    if self.word_bound.is_some_and(|wb| m.word_length() > wb) {
                        continue;
                    }
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// Normal-form product.
    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        self.reduce(&self.free_mul(a, b))
    }

    /// Checked product; rejects elements written over another generator set.
    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_shape(a)?;
        self.check_shape(b)?;
        Ok(self.mul(a, b))
    }

    pub fn mul_all<'a>(&self, factors: impl IntoIterator<Item = &'a Element>) -> Element {
        factors
            .into_iter()
            .fold(self.one(), |acc, f| self.mul(&acc, f))
    }

    pub fn pow(&self, a: &Element, k: u32) -> Element {
        let mut out = self.one();
        for _ in 0..k {
            out = self.mul(&out, a);
        }
        out
    }

    /// Extends generator values to a derivation of the given degree on the
    /// free algebra: θ(ab) = θ(a)b + (-1)^{k|a|} aθ(b). No reduction.
    pub fn derivation_free(&self, e: &Element, values: &[Element], degree: i32) -> Element {
        let n = self.ngens();
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            let mut prefix_degree = 0u32;
            for i in 0..n {
                let ex = m.exponent(i);
                if ex == 0 {
                    continue;
                }
                if !values[i].is_zero() {
                    let mut left = Monomial::one(n);
                    left.0[..i].copy_from_slice(&m.0[..i]);
                    left.0[i] = ex - 1;
                    let mut right = Monomial::one(n);
                    right.0[i + 1..].copy_from_slice(&m.0[i + 1..]);
                    let sign_negative = (degree.rem_euclid(2) == 1) && prefix_degree % 2 == 1;
                    let mut coeff = c * Q::from_integer(ex.into());
                    if sign_negative {
                        coeff = -coeff;
                    }
                    let l = Element::monomial(left, coeff);
                    let r = Element::monomial(right, Q::one());
                    let t = self.free_mul(&self.free_mul(&l, &values[i]), &r);
                    out = &out + &t;
                }
                prefix_degree += ex * self.gens[i].degree;
            }
        }
        out
    }

    /// Reduced image under the derivation with the given generator values.
    pub fn apply_derivation(&self, e: &Element, values: &[Element], degree: i32) -> Element {
        self.reduce(&self.derivation_free(e, values, degree))
    }

    /// Leibniz extension of the generator differentials.
    pub fn d(&self, e: &Element) -> Element {
        self.apply_derivation(e, &self.differential, 1)
    }

    /// Checked differential; rejects inhomogeneous input.
    pub fn apply_differential(&self, e: &Element) -> Result<Element> {
        self.check_shape(e)?;
        self.degree_of(e)?;
        Ok(self.d(e))
    }

    /// Degree of a homogeneous element; `None` for zero.
    pub fn degree_of(&self, e: &Element) -> Result<Option<u32>> {
        let mut deg = None;
        for (m, _) in e.terms() {
            let k = m.degree(&self.gens);
            match deg {
                None => deg = Some(k),
                Some(d) if d != k => return Err(Error::Inhomogeneous),
                _ => {}
            }
        }
        Ok(deg)
    }

    pub fn degree_data(&self, k: u32) -> Arc<DegreeData> {
        if let Some(d) = self.cache.read().expect("cache lock").get(&k) {
            return d.clone();
        }
        let data = Arc::new(self.compute_degree(k));
        let mut w = self.cache.write().expect("cache lock");
        w.entry(k).or_insert(data).clone()
    }

    fn compute_degree(&self, k: u32) -> DegreeData {
        let free = enumerate_monomials(&self.gens, k, self.word_bound);
        let free_index: HashMap<Monomial, usize> =
            free.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut ideal = Echelon::new();
        for (r, &rd) in self.relations.iter().zip(&self.relation_degrees) {
            if rd > k {
                continue;
            }
            let lower = if rd == k {
                vec![Monomial::one(self.ngens())]
            } else {
                self.degree_data(k - rd).free.clone()
            };
            for m in lower {
                let p = self.free_mul(&Element::monomial(m, Q::one()), r);
                let v: SparseVec = p
                    .terms()
                    .map(|(mm, c)| (free_index[mm], c.clone()))
                    .collect();
                if !v.is_empty() {
                    ideal.insert(v);
                }
            }
        }
        let standard: Vec<usize> = (0..free.len()).filter(|i| !ideal.is_pivot(*i)).collect();
        let standard_pos = standard.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        DegreeData {
            degree: k,
            free,
            free_index,
            ideal,
            standard,
            standard_pos,
        }
    }

    /// Normal form modulo the relation ideal and the word-length bound.
    pub fn reduce(&self, e: &Element) -> Element {
        let e = match self.word_bound {
            Some(b) => e.filter(|m| m.word_length() <= b),
            None => e.clone(),
        };
        if self.relations.is_empty() {
            return e;
        }
        let mut out = Element::zero();
        for (k, comp) in e.components(&self.gens) {
            let data = self.degree_data(k);
            let v: SparseVec = comp
                .terms()
                .map(|(m, c)| (data.free_index[m], c.clone()))
                .collect();
            for (i, c) in data.ideal.reduce(&v) {
                out.add_term(data.free[i].clone(), c);
            }
        }
        out
    }

    pub fn dim(&self, k: u32) -> usize {
        self.degree_data(k).dim()
    }

    /// Normal-form monomial basis in degree `k`.
    pub fn basis(&self, k: u32) -> Vec<Monomial> {
        let d = self.degree_data(k);
        d.standard.iter().map(|&i| d.free[i].clone()).collect()
    }

    pub fn basis_elements(&self, k: u32) -> Vec<Element> {
        self.basis(k)
            .into_iter()
            .map(|m| Element::monomial(m, Q::one()))
            .collect()
    }

    /// Coordinates of the degree-`k` component of `e` in the normal-form basis.
    pub fn coords(&self, e: &Element, k: u32) -> SparseVec {
        let data = self.degree_data(k);
        let v: SparseVec = e
            .terms()
            .filter(|(m, _)| m.degree(&self.gens) == k)
            .filter(|(m, _)| self.word_bound.map_or(true, |b| m.word_length() <= b))
            .map(|(m, c)| (data.free_index[m], c.clone()))
            .collect();
        data.ideal
            .reduce(&v)
            .into_iter()
            .map(|(i, c)| (data.standard_pos[&i], c))
            .collect()
    }

    pub fn from_coords(&self, k: u32, v: &SparseVec) -> Element {
        let data = self.degree_data(k);
        Element::from_terms(
            v.iter()
                .map(|(i, c)| (data.free[data.standard[*i]].clone(), c.clone())),
        )
    }

    /// Matrix of d from degree `k` to degree `k + 1`.
    pub fn differential_matrix(&self, k: u32) -> Matrix {
        let cols = self
            .basis_elements(k)
            .iter()
            .map(|b| self.coords(&self.d(b), k + 1))
            .collect();
        Matrix::new(self.dim(k + 1), cols)
    }

    /// Highest nonzero degree when the algebra is provably finite
    /// dimensional: every even generator nilpotent (checked up to the cap)
    /// or a word-length bound in force.
    pub fn finite_top_degree(&self) -> Option<u32> {
        let mut bound = 0u32;
        for (i, g) in self.gens.iter().enumerate() {
            if g.is_odd() {
                bound += g.degree;
                continue;
            }
            let x = self.gen(i);
            let mut p = x.clone();
            let mut e = 1;
            while !p.is_zero() {
                if (e + 1) * g.degree > self.cap.max(g.degree) * 2 + 64 {
                    break;
                }
                p = self.mul(&p, &x);
                e += 1;
            }
            if p.is_zero() {
                bound += (e - 1) * g.degree;
            } else if self.word_bound.is_none() {
                return None;
            } else {
                bound = u32::MAX;
            }
        }
        let by_words = self
            .word_bound
            .map(|b| b.saturating_mul(self.max_generator_degree()));
        Some(match by_words {
            Some(w) => bound.min(w),
            None => bound,
        })
    }

    /// Highest degree with a nonzero element, when the algebra is finite
    /// dimensional.
    pub fn top_degree(&self) -> Option<u32> {
        let bound = self.finite_top_degree()?;
        if bound == u32::MAX {
            return None;
        }
        (0..=bound).rev().find(|&k| self.dim(k) > 0)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .exponents()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    self.gens[i].name.clone()
                } else {
                    format!("{}^{}", self.gens[i].name, e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn format(&self, e: &Element) -> String {
        format_element(e, |m| self.format_monomial(m))
    }
}

pub(crate) fn format_element(e: &Element, fmt_mono: impl Fn(&Monomial) -> String) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (idx, (m, c)) in e.terms().rev().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        let body = if m.is_one() {
            format_q(&a)
        } else if a.is_one() {
            fmt_mono(m)
        } else {
            format!("{}*{}", format_q(&a), fmt_mono(m))
        };
        match (idx, neg) {
            (0, false) => s.push_str(&body),
            (0, true) => {
                s.push('-');
                s.push_str(&body)
            }
            (_, false) => {
                s.push_str(" + ");
                s.push_str(&body)
            }
            (_, true) => {
                s.push_str(" - ");
                s.push_str(&body)
            }
        }
    }
    s
}

/// Declarative construction of a presentation from named generators and
/// polynomial strings.
#[derive(Clone, Debug)]
pub struct PresentationBuilder {
    name: String,
    gens: Vec<Generator>,
    relations: Vec<Expr>,
    differentials: Vec<(String, Expr)>,
    cap: u32,
    flags: Flags,
    error: Option<Error>,
}

impl PresentationBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        PresentationBuilder {
            name: name.into(),
            gens: Vec::new(),
            relations: Vec::new(),
            differentials: Vec::new(),
            cap: 16,
            flags: Flags::default(),
            error: None,
        }
    }

    pub fn gen(mut self, name: &str, degree: u32) -> Self {
        self.gens.push(Generator::new(name, degree));
        self
    }

    pub fn rel(mut self, src: &str) -> Self {
        match parse_expr(src) {
            Ok(e) => self.relations.push(e),
            Err(e) => self.error = self.error.or(Some(e)),
        }
        self
    }

    pub fn rel_expr(mut self, e: Expr) -> Self {
        self.relations.push(e);
        self
    }

    pub fn d(mut self, gen: &str, src: &str) -> Self {
        match parse_expr(src) {
            Ok(e) => self.differentials.push((gen.to_string(), e)),
            Err(e) => self.error = self.error.or(Some(e)),
        }
        self
    }

    pub fn d_expr(mut self, gen: &str, e: Expr) -> Self {
        self.differentials.push((gen.to_string(), e));
        self
    }

    pub fn cap(mut self, cap: u32) -> Self {
        self.cap = cap;
        self
    }

    pub fn non_simply_connected(mut self) -> Self {
        self.flags.non_simply_connected = true;
        self
    }

    pub fn formal(mut self) -> Self {
        self.flags.formal = true;
        self
    }

    pub fn flags(mut self, flags: Flags) -> Self {
        self.flags = flags;
        self
    }

    pub fn build(self) -> Result<Arc<Presentation>> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let mut gens = self.gens;
        gens.sort_by(|a, b| (a.degree, &a.name).cmp(&(b.degree, &b.name)));
        let skeleton = |relations: Vec<Element>| {
            Presentation::assemble_unchecked(RawPresentation {
                name: self.name.clone(),
                gens: gens.clone(),
                relations,
                differential: Vec::new(),
                cap: self.cap,
                flags: self.flags,
                word_bound: None,
            })
        };
        let free = skeleton(Vec::new())?;
        let relations = self
            .relations
            .iter()
            .map(|r| free.eval(r))
            .collect::<Result<Vec<_>>>()?;
        let quotient = skeleton(relations.clone())?;
        let mut differential = vec![Element::zero(); gens.len()];
        let mut assigned = vec![false; gens.len()];
        for (g, e) in &self.differentials {
            let i = quotient
                .index_of(g)
                .ok_or_else(|| Error::UnknownGenerator(g.clone()))?;
            if assigned[i] {
                return Err(Error::Invalid(format!("differential of `{g}` given twice")));
            }
            assigned[i] = true;
            differential[i] = quotient.eval(e)?;
        }
        Presentation::assemble(RawPresentation {
            name: self.name,
            gens,
            relations,
            differential,
            cap: self.cap,
            flags: self.flags,
            word_bound: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn odd_three() -> Arc<Presentation> {
        PresentationBuilder::new("T")
            .gen("a", 3)
            .gen("b", 3)
            .gen("x", 5)
            .d("x", "a*b")
            .cap(12)
            .build()
            .unwrap()
    }

    #[test]
    fn odd_generators_anticommute() {
        let p = odd_three();
        let (a, b) = (p.parse("a").unwrap(), p.parse("b").unwrap());
        let ab = p.mul(&a, &b);
        let ba = p.mul(&b, &a);
        assert_eq!(ab, -ba);
        assert!(p.mul(&a, &a).is_zero());
        assert_eq!(p.format(&ab), "a*b");
    }

    #[test]
    fn differential_examples() {
        let p = odd_three();
        assert_eq!(p.d(&p.parse("x").unwrap()), p.parse("a*b").unwrap());
        assert!(p.d(&p.parse("a*b*x").unwrap()).is_zero());
        assert!(p.d(&p.one()).is_zero());
        // d(ax) = -a*ab = 0, d(x^2) is zero because x is odd
        assert!(p.d(&p.parse("a*x").unwrap()).is_zero());
    }

    #[test]
    fn relation_reduction_sl81() {
        let p = PresentationBuilder::new("SL81")
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
        let a = p.parse("a").unwrap();
        let a3 = p.pow(&a, 3);
        assert!(!a3.is_zero());
        assert!(p.mul(&a3, &a).is_zero());
        let dims: Vec<usize> = (0..=9).map(|k| p.dim(k)).collect();
        // A = Q<1,a,b,a^2,x,a^3,bx>
        assert_eq!(dims, vec![1, 0, 1, 1, 1, 1, 1, 0, 1, 0]);
    }

    #[test]
    fn degree_mismatch_rejected() {
        let err = PresentationBuilder::new("bad")
            .gen("a", 4)
            .gen("x", 7)
            .d("x", "a")
            .build()
            .unwrap_err();
        assert_eq!(
            err,
            Error::DegreeMismatch {
                generator: "x".into(),
                expected: 8,
                found: 4
            }
        );
    }

    #[test]
    fn non_square_zero_rejected() {
        let err = PresentationBuilder::new("bad")
            .gen("a", 2)
            .gen("b", 3)
            .gen("c", 4)
            .d("b", "a^2")
            .d("c", "a*b")
            .cap(10)
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::NotSquareZero { ref generator, .. } if generator == "c"));
    }

    #[test]
    fn ideal_not_closed_rejected() {
        let err = PresentationBuilder::new("bad")
            .gen("a", 4)
            .gen("x", 7)
            .d("x", "a^2")
            .rel("x")
            .cap(10)
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::IdealNotClosed { .. }));
    }

    #[test]
    fn degree_one_needs_flag() {
        let b = PresentationBuilder::new("S3")
            .gen("a", 1)
            .gen("b", 1)
            .gen("c", 1)
            .d("a", "b*c")
            .d("b", "a*c")
            .d("c", "a*b")
            .cap(6);
        assert!(matches!(b.clone().build(), Err(Error::InvalidDegree { .. })));
        assert!(b.non_simply_connected().build().is_ok());
    }

    #[test]
    fn remap_tracks_koszul_sign() {
        // b*a written over order (b, a) is -a*b in the sorted order (a, b)
        let raw = RawPresentation {
            name: "R".into(),
            gens: vec![Generator::new("b", 3), Generator::new("a", 3)],
            relations: vec![Element::monomial(Monomial(vec![1, 1]), q(1))],
            differential: vec![],
            cap: 8,
            flags: Flags::default(),
            word_bound: None,
        };
        let p = Presentation::assemble(raw).unwrap();
        assert_eq!(p.generator(0).name, "a");
        assert_eq!(
            p.relations()[0],
            Element::monomial(Monomial(vec![1, 1]), q(-1))
        );
        assert!(p.parse("a*b").unwrap().is_zero());
    }

    #[test]
    fn mismatch_detected() {
        let p = odd_three();
        let other = PresentationBuilder::new("S").gen("a", 3).build().unwrap();
        assert_eq!(
            p.multiply(&p.parse("a").unwrap(), &other.parse("a").unwrap()),
            Err(Error::PresentationMismatch)
        );
        let e = &p.parse("a").unwrap() + &p.parse("x").unwrap();
        assert_eq!(p.apply_differential(&e), Err(Error::Inhomogeneous));
    }
}
