//! Morphisms of cdgas, derivations, and linear parts of Sullivan maps.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{Element, Presentation};
use crate::error::{Error, Result};
use crate::expr::parse_expr;
use crate::linalg::{Matrix, SparseVec};

/// A map of cdgas given by generator images.
#[derive(Clone, Debug)]
pub struct Morphism {
    name: String,
    source: Arc<Presentation>,
    target: Arc<Presentation>,
    images: Vec<Element>,
}

impl Morphism {
    /// Validates degrees, relations and the chain condition up to the
    /// smaller of the two caps.
    pub fn new(
        name: impl Into<String>,
        source: Arc<Presentation>,
        target: Arc<Presentation>,
        images: Vec<Element>,
    ) -> Result<Morphism> {
        let m = Self::new_unchecked(name, source, target, images);
        m.validate()?;
        Ok(m)
    }

    pub fn new_unchecked(
        name: impl Into<String>,
        source: Arc<Presentation>,
        target: Arc<Presentation>,
        images: Vec<Element>,
    ) -> Morphism {
        let images = images.iter().map(|e| target.reduce(e)).collect();
        Morphism {
            name: name.into(),
            source,
            target,
            images,
        }
    }

    /// Generator images as `(generator, polynomial)` strings; unlisted
    /// generators go to zero.
    pub fn from_strs(
        name: impl Into<String>,
        source: Arc<Presentation>,
        target: Arc<Presentation>,
        images: &[(&str, &str)],
    ) -> Result<Morphism> {
        let name = name.into();
        let mut v = vec![Element::zero(); source.ngens()];
        for (g, src) in images {
            let i = source
                .index_of(g)
                .ok_or_else(|| Error::UnknownGenerator(g.to_string()))?;
            v[i] = target.eval(&parse_expr(src)?)?;
        }
        Morphism::new(name, source, target, v)
    }

    pub fn identity(p: &Arc<Presentation>) -> Morphism {
        let images = (0..p.ngens()).map(|i| p.gen(i)).collect();
        Morphism::new_unchecked(format!("id_{}", p.name()), p.clone(), p.clone(), images)
    }

    fn invalid(&self, message: String) -> Error {
        Error::InvalidMorphism {
            morphism: self.name.clone(),
            message,
        }
    }

    fn validate(&self) -> Result<()> {
        let (s, t) = (&self.source, &self.target);
        if self.images.len() != s.ngens() {
            return Err(self.invalid("wrong number of generator images".into()));
        }
        for (i, g) in s.generators().iter().enumerate() {
            match t.degree_of(&self.images[i]) {
                Err(_) => {
                    return Err(self.invalid(format!("image of `{}` is not homogeneous", g.name)))
                }
                Ok(Some(k)) if k != g.degree => {
                    return Err(self.invalid(format!(
                        "image of `{}` has degree {k}, expected {}",
                        g.name, g.degree
                    )))
                }
                _ => {}
            }
        }
        for r in s.relations() {
            let img = self.apply(r);
            if !img.is_zero() {
                return Err(self.invalid(format!(
                    "relation {} maps to {}",
                    s.format(r),
                    t.format(&img)
                )));
            }
        }
        let cap = s.cap().min(t.cap());
        for (i, g) in s.generators().iter().enumerate() {
            if g.degree + 1 > cap {
                continue;
            }
            let lhs = self.apply(s.differential_of(i));
            let rhs = t.d(&self.images[i]);
            if lhs != rhs {
                return Err(self.invalid(format!(
                    "does not commute with d on `{}`: {} vs {}",
                    g.name,
                    t.format(&lhs),
                    t.format(&rhs)
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Morphism {
        self.name = name.into();
        self
    }

    pub fn source(&self) -> &Arc<Presentation> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presentation> {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn image_of(&self, i: usize) -> &Element {
        &self.images[i]
    }

    /// Multiplicative extension to an element of the source.
    pub fn apply(&self, e: &Element) -> Element {
        let t = &self.target;
        let mut out = Element::zero();
        let mut powers: BTreeMap<(usize, u32), Element> = BTreeMap::new();
        for (m, c) in e.terms() {
            let mut acc = t.scalar(c.clone());
            for (i, &ex) in m.exponents().iter().enumerate() {
                if ex == 0 {
                    continue;
                }
                let p = powers
                    .entry((i, ex))
                    .or_insert_with(|| t.pow(&self.images[i], ex))
                    .clone();
                acc = t.mul(&acc, &p);
                if acc.is_zero() {
                    break;
                }
            }
            out = &out + &acc;
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Morphism) -> Result<Morphism> {
        if !Arc::ptr_eq(inner.target(), &self.source) && inner.target().generators() != self.source.generators() {
            return Err(Error::PresentationMismatch);
        }
        let images = inner.images.iter().map(|e| self.apply(e)).collect();
        Ok(Morphism::new_unchecked(
            format!("{}∘{}", self.name, inner.name),
            inner.source.clone(),
            self.target.clone(),
            images,
        ))
    }

    /// Matrix in degree `k` between normal-form bases.
    pub fn matrix(&self, k: u32) -> Matrix {
        let cols = self
            .source
            .basis_elements(k)
            .iter()
            .map(|b| self.target.coords(&self.apply(b), k))
            .collect();
        Matrix::new(self.target.dim(k), cols)
    }

    pub fn is_surjective_in(&self, k: u32) -> bool {
        self.matrix(k).rank() == self.target.dim(k)
    }

    /// Checks surjectivity degree by degree up to the cap.
    pub fn check_surjective(&self, hi: u32) -> Result<()> {
        for k in 0..=hi {
            if !self.is_surjective_in(k) {
                return Err(Error::NotSurjective {
                    morphism: self.name.clone(),
                    degree: k,
                });
            }
        }
        Ok(())
    }
}

/// A derivation of fixed degree on a presentation, given on generators.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub carrier: Arc<Presentation>,
    pub degree: i32,
    pub values: Vec<Element>,
}

impl Derivation {
    pub fn new(carrier: Arc<Presentation>, degree: i32, values: Vec<Element>) -> Derivation {
        Derivation {
            carrier,
            degree,
            values,
        }
    }

    pub fn apply(&self, e: &Element) -> Element {
        self.carrier.apply_derivation(e, &self.values, self.degree)
    }
}

/// Generator-level data of a map between free algebras: the word-length-one
/// part of each image and the induced linear differentials.
#[derive(Clone, Debug)]
pub struct LinearPart {
    /// Degree `k` block: source generators of degree `k` to target generators
    /// of degree `k`.
    pub blocks: BTreeMap<u32, Matrix>,
    pub source_d0: BTreeMap<u32, Matrix>,
    pub target_d0: BTreeMap<u32, Matrix>,
    pub source_gens: BTreeMap<u32, Vec<usize>>,
    pub target_gens: BTreeMap<u32, Vec<usize>>,
}

fn gens_by_degree(p: &Presentation) -> BTreeMap<u32, Vec<usize>> {
    let mut out: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, g) in p.generators().iter().enumerate() {
        out.entry(g.degree).or_default().push(i);
    }
    out
}

/// Linear coordinates of `e` on the generators listed in `gens`.
fn linear_coords(e: &Element, gens: &[usize]) -> SparseVec {
    let mut v = SparseVec::new();
    for (m, c) in e.terms() {
        if m.word_length() == 1 {
            let i = m.exponents().iter().position(|&x| x == 1).expect("word length one");
            if let Some(p) = gens.iter().position(|&g| g == i) {
                v.insert(p, c.clone());
            }
        }
    }
    v
}

fn d0_blocks(p: &Presentation, by_deg: &BTreeMap<u32, Vec<usize>>) -> BTreeMap<u32, Matrix> {
    let empty = Vec::new();
    by_deg
        .iter()
        .map(|(&k, gens)| {
            let next = by_deg.get(&(k + 1)).unwrap_or(&empty);
            let cols = gens
                .iter()
                .map(|&i| linear_coords(p.differential_of(i), next))
                .collect();
            (k, Matrix::new(next.len(), cols))
        })
        .collect()
}

/// Linear part of a morphism between free presentations.
pub fn linear_part(phi: &Morphism) -> Result<LinearPart> {
    for p in [phi.source(), phi.target()] {
        if !p.is_free() {
            return Err(Error::NotFree(p.name().to_string()));
        }
    }
    let source_gens = gens_by_degree(phi.source());
    let target_gens = gens_by_degree(phi.target());
    let empty = Vec::new();
    let blocks = source_gens
        .iter()
        .map(|(&k, gens)| {
            let tg = target_gens.get(&k).unwrap_or(&empty);
            let cols = gens
                .iter()
                .map(|&i| linear_coords(phi.image_of(i), tg))
                .collect();
            (k, Matrix::new(tg.len(), cols))
        })
        .collect();
    Ok(LinearPart {
        blocks,
        source_d0: d0_blocks(phi.source(), &source_gens),
        target_d0: d0_blocks(phi.target(), &target_gens),
        source_gens,
        target_gens,
    })
}

impl LinearPart {
    /// Whether `H(Q(φ))` is an isomorphism in degrees up to `hi`, computed
    /// on the generator complexes `(V, d₀) → (W, d₀)`.
    pub fn homology_iso_up_to(&self, hi: u32) -> bool {
        use crate::linalg::Echelon;
        let zero = |rows: usize| Matrix::new(rows, Vec::new());
        let block = |map: &BTreeMap<u32, Matrix>, k: u32, rows: usize| {
            map.get(&k).cloned().unwrap_or_else(|| zero(rows))
        };
        let n_src = |k: u32| self.source_gens.get(&k).map_or(0, Vec::len);
        let n_tgt = |k: u32| self.target_gens.get(&k).map_or(0, Vec::len);
        for k in 1..=hi {
            // Source cycles and boundaries.
            let ds = block(&self.source_d0, k, n_src(k + 1));
            let ds_prev = block(&self.source_d0, k - 1, n_src(k));
            let dt = block(&self.target_d0, k, n_tgt(k + 1));
            let dt_prev = block(&self.target_d0, k - 1, n_tgt(k));
            let f = block(&self.blocks, k, n_tgt(k));
            let zs = if ds.ncols() == 0 { (0..n_src(k)).map(crate::linalg::unit).collect() } else { ds.kernel() };
            let zt = if dt.ncols() == 0 { (0..n_tgt(k)).map(crate::linalg::unit).collect() } else { dt.kernel() };
            let mut bt = Echelon::new();
            for c in &dt_prev.cols {
                bt.insert(c.clone());
            }
            let mut bs = Echelon::new();
            for c in &ds_prev.cols {
                bs.insert(c.clone());
            }
            let h_src = zs.len() - bs.rank();
            let h_tgt = zt.len() - bt.rank();
            if h_src != h_tgt {
                return false;
            }
            // Image of source cycles modulo target boundaries has full rank.
            let mut img = bt.clone();
            for z in &zs {
                img.insert(f.apply(z));
            }
            if img.rank() - bt.rank() != h_tgt {
                return false;
            }
        }
        true
    }
}
