//! Ideals in graded algebras: powers and nilpotency with product witnesses.
//!
//! Works over any [`GradedAlgebra`], which covers both presentations and
//! homology algebras, so nil A⁺, nil H⁺ and nil ker H(φ) share one code path.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{Element, Presentation};
use crate::homology::HomologyReport;
use crate::linalg::{unit, Echelon, SparseVec};

/// A graded algebra known in degrees `0..=top()`.
pub trait GradedAlgebra {
    fn top(&self) -> u32;
    fn dim(&self, k: u32) -> usize;
    /// Product of a degree-`i` vector and a degree-`j` vector.
    fn mul(&self, i: u32, a: &SparseVec, j: u32, b: &SparseVec) -> SparseVec;
    /// Highest nonzero degree when the algebra is known to be finite
    /// dimensional.
    fn finite_top_degree(&self) -> Option<u32>;
    fn format(&self, k: u32, v: &SparseVec) -> String;
}

pub struct PresentationAlgebra<'a> {
    pub p: &'a Presentation,
    pub top: u32,
}

impl<'a> PresentationAlgebra<'a> {
    /// Uses the finite top degree when there is one, otherwise the cap.
    pub fn new(p: &'a Presentation) -> Self {
        PresentationAlgebra {
            p,
            top: p.finite_top_degree().unwrap_or(p.cap()),
        }
    }
}

impl GradedAlgebra for PresentationAlgebra<'_> {
    fn top(&self) -> u32 {
        self.top
    }

    fn dim(&self, k: u32) -> usize {
        self.p.dim(k)
    }

    fn mul(&self, i: u32, a: &SparseVec, j: u32, b: &SparseVec) -> SparseVec {
        let x = self.p.from_coords(i, a);
        let y = self.p.from_coords(j, b);
        self.p.coords(&self.p.mul(&x, &y), i + j)
    }

    fn finite_top_degree(&self) -> Option<u32> {
        self.p.finite_top_degree()
    }

    fn format(&self, k: u32, v: &SparseVec) -> String {
        self.p.format(&self.p.from_coords(k, v))
    }
}

/// Homology as an algebra, with products computed on representatives.
pub struct HomologyAlgebra<'a> {
    pub report: &'a HomologyReport,
}

impl GradedAlgebra for HomologyAlgebra<'_> {
    fn top(&self) -> u32 {
        self.report.range().1
    }

    fn dim(&self, k: u32) -> usize {
        self.report.betti(k)
    }

    fn mul(&self, i: u32, a: &SparseVec, j: u32, b: &SparseVec) -> SparseVec {
        let p = self.report.presentation();
        let x = self.report.class_element(i, a);
        let y = self.report.class_element(j, b);
        let prod = p.mul(&x, &y);
        self.report
            .reduce_coords(i + j, &p.coords(&prod, i + j))
            .expect("product of cycles is a cycle")
    }

    fn finite_top_degree(&self) -> Option<u32> {
        self.report.presentation().finite_top_degree()
    }

    fn format(&self, k: u32, v: &SparseVec) -> String {
        let p = self.report.presentation();
        format!("[{}]", p.format(&self.report.class_element(k, v)))
    }
}

/// A homogeneous vector of a graded algebra.
pub type Homogeneous = (u32, SparseVec);

#[derive(Clone, Debug)]
struct Spanning {
    vec: SparseVec,
    factors: Vec<Homogeneous>,
}

/// Per-degree spanning products of one ideal power.
#[derive(Clone, Debug, Default)]
pub struct PowerPiece {
    pieces: BTreeMap<u32, (Echelon, Vec<Spanning>)>,
}

impl PowerPiece {
    pub fn is_zero(&self) -> bool {
        self.pieces.values().all(|(e, _)| e.rank() == 0)
    }

    pub fn dim(&self, k: u32) -> usize {
        self.pieces.get(&k).map_or(0, |(e, _)| e.rank())
    }

    pub fn echelon(&self, k: u32) -> Option<&Echelon> {
        self.pieces.get(&k).map(|(e, _)| e)
    }

    pub fn contains(&self, k: u32, v: &SparseVec) -> bool {
        v.is_empty() || self.pieces.get(&k).is_some_and(|(e, _)| e.contains(v))
    }

    /// A nonzero spanning product of lowest degree with its factors.
    pub fn witness(&self) -> Option<(u32, SparseVec, Vec<Homogeneous>)> {
        self.pieces.iter().find_map(|(&k, (_, s))| {
            s.first().map(|sp| (k, sp.vec.clone(), sp.factors.clone()))
        })
    }

    pub fn degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.pieces
            .iter()
            .filter(|(_, (e, _))| e.rank() > 0)
            .map(|(k, _)| *k)
    }
}

fn first_power<A: GradedAlgebra>(alg: &A, gens: &[Homogeneous]) -> PowerPiece {
    let mut out = PowerPiece::default();
    for (dg, g) in gens {
        if g.is_empty() {
            continue;
        }
        for k in *dg..=alg.top() {
            for i in 0..alg.dim(k - dg) {
                let b = unit(i);
                let v = alg.mul(k - dg, &b, *dg, g);
                let (e, s) = out.pieces.entry(k).or_default();
                if !v.is_empty() && e.insert(v.clone()) {
                    s.push(Spanning {
                        vec: v.clone(),
                        factors: vec![(k, v)],
                    });
                }
            }
        }
    }
    out
}

fn next_power<A: GradedAlgebra>(alg: &A, prev: &PowerPiece, gens: &[Homogeneous]) -> PowerPiece {
    let mut out = PowerPiece::default();
    for (&k, (_, spanning)) in &prev.pieces {
        for x in spanning {
            for (dg, g) in gens {
                let kk = k + dg;
                if kk > alg.top() || g.is_empty() {
                    continue;
                }
                let v = alg.mul(k, &x.vec, *dg, g);
                let (e, s) = out.pieces.entry(kk).or_default();
                if !v.is_empty() && e.insert(v.clone()) {
                    let mut factors = x.factors.clone();
                    factors.push((*dg, g.clone()));
                    s.push(Spanning { vec: v, factors });
                }
            }
        }
    }
    out
}

/// Powers `I, I², …` up to the first that vanishes in range (inclusive) or
/// up to `max_power`.
pub fn ideal_powers<A: GradedAlgebra>(
    alg: &A,
    gens: &[Homogeneous],
    max_power: usize,
) -> Vec<PowerPiece> {
    let mut out = vec![first_power(alg, gens)];
    while out.len() < max_power && !out.last().expect("nonempty").is_zero() {
        let next = next_power(alg, out.last().expect("nonempty"), gens);
        out.push(next);
    }
    out
}

pub fn ideal_power<A: GradedAlgebra>(alg: &A, gens: &[Homogeneous], k: usize) -> PowerPiece {
    assert!(k >= 1, "ideal powers start at 1");
    let powers = ideal_powers(alg, gens, k);
    if powers.len() < k {
        PowerPiece::default()
    } else {
        powers.into_iter().nth(k - 1).expect("length checked")
    }
}

/// The longest nonzero product of ideal elements that is visible in range.
#[derive(Clone, Debug)]
pub struct Nilpotency {
    pub value: usize,
    /// Factors (each an element of the ideal) and their nonzero product.
    pub witness: Vec<Homogeneous>,
    pub product: Option<Homogeneous>,
    /// True when the ambient algebra extends beyond the computed range, so
    /// the value is only a lower bound.
    pub range_relative: bool,
}

pub fn nil_ideal<A: GradedAlgebra>(alg: &A, gens: &[Homogeneous]) -> Nilpotency {
    let range_relative = alg.finite_top_degree().map_or(true, |t| t > alg.top());
    let powers = ideal_powers(alg, gens, usize::MAX);
    let value = powers.iter().filter(|p| !p.is_zero()).count();
    let (witness, product) = match value {
        0 => (Vec::new(), None),
        v => {
            let (k, vec, factors) = powers[v - 1].witness().expect("nonzero power");
            (factors, Some((k, vec)))
        }
    };
    Nilpotency {
        value,
        witness,
        product,
        range_relative,
    }
}

/// Positive-degree basis vectors: generators of the augmentation ideal.
pub fn augmentation_generators<A: GradedAlgebra>(alg: &A) -> Vec<Homogeneous> {
    (1..=alg.top())
        .flat_map(|k| (0..alg.dim(k)).map(move |i| (k, unit(i))))
        .collect()
}

/// Algebra generators of a presentation as homogeneous vectors.
pub fn presentation_generators(p: &Presentation) -> Vec<Homogeneous> {
    (0..p.ngens())
        .map(|i| {
            let k = p.generator(i).degree;
            (k, p.coords(&p.gen(i), k))
        })
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

pub fn element_generators(p: &Presentation, gens: &[Element]) -> Vec<Homogeneous> {
    gens.iter()
        .filter_map(|g| {
            let k = p.degree_of(g).ok()??;
            Some((k, p.coords(g, k)))
        })
        .collect()
}

/// nil A⁺ of a presentation.
pub fn nil_augmentation(p: &Arc<Presentation>) -> Nilpotency {
    let alg = PresentationAlgebra::new(p);
    nil_ideal(&alg, &presentation_generators(p))
}

/// nil H⁺ over the report's range.
pub fn nil_homology(report: &HomologyReport) -> Nilpotency {
    let alg = HomologyAlgebra { report };
    let gens = augmentation_generators(&alg);
    nil_ideal(&alg, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PresentationBuilder;
    use crate::homology::homology;

    #[test]
    fn nil_of_nonformal_homology_is_two() {
        let p = PresentationBuilder::new("N")
            .gen("a", 3)
            .gen("b", 3)
            .gen("x", 5)
            .d("x", "a*b")
            .cap(12)
            .build()
            .unwrap();
        let h = homology(&p, 0, 11).unwrap();
        let n = nil_homology(&h);
        assert_eq!(n.value, 2);
        assert!(!n.range_relative);
        assert_eq!(n.witness.len(), 2);
        let alg = HomologyAlgebra { report: &h };
        let (k, v) = n.product.clone().unwrap();
        assert_eq!(k, 11);
        assert_eq!(alg.format(k, &v).replace('-', ""), "[a*b*x]");
    }

    #[test]
    fn nil_of_truncated_polynomial() {
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
        let n = nil_augmentation(&p);
        assert_eq!(n.value, 3);
        assert!(!n.range_relative);
    }

    #[test]
    fn polynomial_nil_is_range_relative() {
        let p = PresentationBuilder::new("P").gen("a", 2).cap(8).build().unwrap();
        let n = nil_augmentation(&p);
        assert_eq!(n.value, 4);
        assert!(n.range_relative);
    }
}
