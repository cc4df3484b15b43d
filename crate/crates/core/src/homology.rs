//! Per-degree homology with explicit representatives and a class oracle.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{Element, Presentation};
use crate::error::{Error, Result};
use crate::linalg::{scale, unit, Echelon, Matrix, SparseVec};
use crate::morphism::{linear_part, Morphism};

#[derive(Clone, Debug)]
struct DegreeHomology {
    representatives: Vec<Element>,
    /// Boundaries carry zero coordinates, representative `i` carries `e_i`.
    oracle: Echelon,
    cycles: Echelon,
}

/// Homology of a presentation over a degree interval.
#[derive(Clone, Debug)]
pub struct HomologyReport {
    presentation: Arc<Presentation>,
    lo: u32,
    hi: u32,
    degrees: BTreeMap<u32, DegreeHomology>,
}

/// Fails unless degree `hi + 1` is within the cap, so boundaries into `hi`
/// and cycle conditions out of it are both complete.
pub fn check_range(p: &Presentation, hi: u32) -> Result<()> {
    if hi + 1 > p.cap() {
        return Err(Error::RangeExceedsCap {
            requested: hi,
            needed: hi + 1,
            cap: p.cap(),
        });
    }
    Ok(())
}

pub fn homology(p: &Arc<Presentation>, lo: u32, hi: u32) -> Result<HomologyReport> {
    check_range(p, hi)?;
    let mut degrees = BTreeMap::new();
    for k in lo..=hi {
        degrees.insert(k, degree_homology(p, k));
    }
    Ok(HomologyReport {
        presentation: p.clone(),
        lo,
        hi,
        degrees,
    })
}

fn boundaries(p: &Presentation, k: u32) -> Vec<SparseVec> {
    if k == 0 {
        return Vec::new();
    }
    p.differential_matrix(k - 1).cols
}

fn degree_homology(p: &Presentation, k: u32) -> DegreeHomology {
    let dk = p.differential_matrix(k);
    let z = if dk.rows == 0 {
        (0..p.dim(k)).map(unit).collect()
    } else {
        dk.kernel()
    };
    let mut span = Echelon::new();
    let mut oracle = Echelon::new();
    let mut cycles = Echelon::new();
    for b in boundaries(p, k) {
        span.insert(b.clone());
        oracle.insert(b);
    }
    let mut chosen: Vec<(usize, SparseVec)> = Vec::new();
    for c in &z {
        cycles.insert(c.clone());
        let r = span.reduce(c);
        if r.is_empty() {
            continue;
        }
        let (&pivot, lead) = r.iter().next_back().expect("nonzero");
        let r = scale(&r, &lead.recip());
        span.insert(r.clone());
        chosen.push((pivot, r));
    }
    // Ordered by leading basis monomial so reports read in basis order.
    chosen.sort_by_key(|(p, _)| *p);
    let mut representatives = Vec::new();
    for (i, (_, r)) in chosen.into_iter().enumerate() {
        oracle.insert_tracked(r.clone(), unit(i));
        representatives.push(p.from_coords(k, &r));
    }
    DegreeHomology {
        representatives,
        oracle,
        cycles,
    }
}

impl HomologyReport {
    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.presentation
    }

    pub fn range(&self) -> (u32, u32) {
        (self.lo, self.hi)
    }

    pub fn betti(&self, k: u32) -> usize {
        self.degrees.get(&k).map_or(0, |d| d.representatives.len())
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        (self.lo..=self.hi).map(|k| self.betti(k)).collect()
    }

    pub fn representatives(&self, k: u32) -> &[Element] {
        self.degrees
            .get(&k)
            .map_or(&[][..], |d| &d.representatives[..])
    }

    pub fn contains_degree(&self, k: u32) -> bool {
        self.degrees.contains_key(&k)
    }

    /// Class of a homogeneous cycle in the representative basis.
    pub fn reduce(&self, e: &Element) -> Result<SparseVec> {
        let p = &self.presentation;
        let Some(k) = p.degree_of(e)? else {
            return Ok(SparseVec::new());
        };
        let data = self.degrees.get(&k).ok_or(Error::RangeExceedsCap {
            requested: k,
            needed: k + 1,
            cap: p.cap(),
        })?;
        let v = p.coords(e, k);
        let (residual, coords) = data.oracle.reduce_tracked(&v);
        if !residual.is_empty() {
            return Err(Error::NotACycle(p.format(e)));
        }
        Ok(coords)
    }

    pub fn reduce_coords(&self, k: u32, v: &SparseVec) -> Option<SparseVec> {
        let data = self.degrees.get(&k)?;
        let (residual, coords) = data.oracle.reduce_tracked(v);
        residual.is_empty().then_some(coords)
    }

    pub fn is_cycle(&self, e: &Element) -> bool {
        self.presentation.d(e).is_zero()
    }

    pub fn is_boundary(&self, e: &Element) -> Result<bool> {
        Ok(self.reduce(e)?.is_empty())
    }

    /// Element representing a coordinate vector of classes.
    pub fn class_element(&self, k: u32, coords: &SparseVec) -> Element {
        let reps = self.representatives(k);
        let mut out = Element::zero();
        for (i, c) in coords {
            out = &out + &reps[*i].scale(c);
        }
        out
    }

    /// Dimension of the cycle space in degree `k`.
    pub fn cycle_dim(&self, k: u32) -> usize {
        self.degrees.get(&k).map_or(0, |d| d.cycles.rank())
    }
}

/// Matrices of `H(φ)` between representative bases.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub range: (u32, u32),
    pub matrices: BTreeMap<u32, Matrix>,
}

impl InducedMap {
    pub fn is_injective_in(&self, k: u32) -> bool {
        let m = &self.matrices[&k];
        m.rank() == m.ncols()
    }

    pub fn is_surjective_in(&self, k: u32) -> bool {
        let m = &self.matrices[&k];
        m.rank() == m.rows
    }

    pub fn is_injective(&self) -> bool {
        self.matrices.keys().all(|&k| self.is_injective_in(k))
    }

    pub fn is_surjective(&self) -> bool {
        self.matrices.keys().all(|&k| self.is_surjective_in(k))
    }

    pub fn is_iso(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// First degree where injectivity fails, with a kernel vector.
    pub fn first_kernel(&self) -> Option<(u32, SparseVec)> {
        self.matrices
            .iter()
            .find_map(|(&k, m)| m.kernel().into_iter().next().map(|v| (k, v)))
    }

    pub fn is_zero_in_positive_degrees(&self) -> bool {
        self.matrices
            .iter()
            .filter(|(&k, _)| k > 0)
            .all(|(_, m)| m.is_zero())
    }
}

pub fn induced_map_with(
    phi: &Morphism,
    src: &HomologyReport,
    tgt: &HomologyReport,
) -> Result<InducedMap> {
    let (lo, hi) = src.range();
    let mut matrices = BTreeMap::new();
    for k in lo..=hi {
        let cols = src
            .representatives(k)
            .iter()
            .map(|z| tgt.reduce(&phi.apply(z)))
            .collect::<Result<Vec<_>>>()?;
        matrices.insert(k, Matrix::new(tgt.betti(k), cols));
    }
    Ok(InducedMap {
        range: (lo, hi),
        matrices,
    })
}

pub fn induced_map(phi: &Morphism, lo: u32, hi: u32) -> Result<InducedMap> {
    let src = homology(phi.source(), lo, hi)?;
    let tgt = homology(phi.target(), lo, hi)?;
    induced_map_with(phi, &src, &tgt)
}

/// Quasi-isomorphism verdict through homology in `lo..=hi`.
pub fn is_quasi_iso(phi: &Morphism, lo: u32, hi: u32) -> Result<bool> {
    Ok(induced_map(phi, lo, hi)?.is_iso())
}

/// The linear-part criterion for maps between free algebras: a quasi-iso
/// exactly when `H(Q(φ))` is an isomorphism. `None` if either side has
/// relations.
pub fn linear_part_quasi_iso(phi: &Morphism, hi: u32) -> Option<bool> {
    linear_part(phi).ok().map(|lp| lp.homology_iso_up_to(hi))
}

/// Kernel of a morphism in degrees up to `hi`, per degree, and a generating
/// set for it as an ideal.
#[derive(Clone, Debug)]
pub struct KernelIdeal {
    pub bases: BTreeMap<u32, Vec<Element>>,
    pub generators: Vec<Element>,
}

pub fn kernel_ideal(phi: &Morphism, hi: u32) -> KernelIdeal {
    let s = phi.source();
    let mut bases = BTreeMap::new();
    let mut generators: Vec<Element> = Vec::new();
    for k in 1..=hi {
        let kernel = phi.matrix(k).kernel();
        // A new degree-k generator only adds its own multiples in degree k.
        let mut span = ideal_span(s, &generators, k);
        for v in &kernel {
            if span.insert(v.clone()) {
                generators.push(s.from_coords(k, v));
            }
        }
        bases.insert(k, kernel.iter().map(|v| s.from_coords(k, v)).collect());
    }
    KernelIdeal { bases, generators }
}

/// Degree-`k` piece of the ideal generated by `gens`, in normal-form coords.
pub fn ideal_span(p: &Presentation, gens: &[Element], k: u32) -> Echelon {
    let mut e = Echelon::new();
    for g in gens {
        let Ok(Some(dg)) = p.degree_of(g) else { continue };
        if dg > k {
            continue;
        }
        for b in p.basis_elements(k - dg) {
            e.insert(p.coords(&p.mul(&b, g), k));
        }
    }
    e
}

/// Whether `gens` generate exactly the kernel of `phi` in degrees `1..=hi`.
pub fn generates_kernel(phi: &Morphism, gens: &[Element], hi: u32) -> bool {
    let s = phi.source();
    for g in gens {
        if !phi.apply(g).is_zero() {
            return false;
        }
    }
    for k in 1..=hi {
        let span = ideal_span(s, gens, k);
        let kernel = phi.matrix(k).kernel();
        if span.rank() != kernel.len() {
            return false;
        }
    }
    true
}

/// Homology of the differential ideal generated by `gens` vanishes in
/// `lo..=hi`. Fails with `IdealNotClosed` if d leaves the ideal.
pub fn is_acyclic_ideal(p: &Presentation, gens: &[Element], lo: u32, hi: u32) -> Result<bool> {
    check_range(p, hi)?;
    let pieces: BTreeMap<u32, Echelon> = (lo.saturating_sub(1)..=hi + 1)
        .map(|k| (k, ideal_span(p, gens, k)))
        .collect();
    let d_rank = |k: u32| -> Result<usize> {
        let piece = &pieces[&k];
        let next = &pieces[&(k + 1)];
        let mut img = Echelon::new();
        for row in piece.basis() {
            let e = p.from_coords(k, row);
            let v = p.coords(&p.d(&e), k + 1);
            if !next.contains(&v) {
                return Err(Error::IdealNotClosed {
                    witness: p.format(&e),
                    image: p.format(&p.d(&e)),
                });
            }
            img.insert(v);
        }
        Ok(img.rank())
    };
    for k in lo..=hi {
        let dim = pieces[&k].rank();
        let out = d_rank(k)?;
        let inc = if k == 0 { 0 } else { d_rank(k - 1)? };
        if dim - out != inc {
            return Ok(false);
        }
    }
    Ok(true)
}
