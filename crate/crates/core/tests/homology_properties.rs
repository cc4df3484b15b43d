mod common;

use proptest::prelude::*;

use cdga::construct::tensor;
use cdga::homology::{homology, induced_map};
use cdga::ideal::{nil_ideal, presentation_generators, HomologyAlgebra, PresentationAlgebra};
use cdga::linalg::{add_scaled, q, scale, SparseVec};
use cdga::morphism::Morphism;
use cdga::Presentation;
use common::{element, nonformal, sphere, zoo};

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 1..10)
}

fn vector(len: usize, seed: &[i64]) -> SparseVec {
    (0..len)
        .filter_map(|i| {
            let c = seed[i % seed.len()];
            (c != 0).then(|| (i, q(c)))
        })
        .collect()
}

/// Endomorphism of the nonformal model scaling `a`, `b` and fixing `d`.
fn scaling(s: i64, t: i64) -> Morphism {
    let p = nonformal(14);
    Morphism::from_strs(
        "σ",
        p.clone(),
        p,
        &[("a", &format!("{s}*a")), ("b", &format!("{t}*b + {s}*a")), ("x", &format!("{}*x", s * t))],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rank_nullity_and_betti(which in 0usize..6, k in 1u32..16) {
        let p = &zoo()[which];
        let k = k % (p.cap() - 1) + 1;
        let dk = p.differential_matrix(k);
        let before = p.differential_matrix(k - 1);
        prop_assert_eq!(dk.rank() + dk.kernel().len(), p.dim(k));
        let h = homology(p, k, k).unwrap();
        prop_assert_eq!(h.betti(k), dk.kernel().len() - before.rank());
    }

    #[test]
    fn reduce_is_linear_and_ignores_boundaries(
        which in 0usize..6,
        k in 1u32..16,
        s in (coeffs(), coeffs(), coeffs()),
        (x, y) in (-3i64..=3, -3i64..=3),
    ) {
        let p = &zoo()[which];
        let k = k % (p.cap() - 1) + 1;
        let h = homology(p, k, k).unwrap();
        let z1 = h.class_element(k, &vector(h.betti(k), &s.0));
        let z2 = h.class_element(k, &vector(h.betti(k), &s.1));
        let w = element(p, k - 1, &s.2);
        let r1 = h.reduce(&z1).unwrap();
        prop_assert_eq!(h.reduce(&(&z1 + &p.d(&w))).unwrap(), r1.clone());
        let combo = &z1.scale(&q(x)) + &z2.scale(&q(y));
        let mut expected = scale(&r1, &q(x));
        add_scaled(&mut expected, &h.reduce(&z2).unwrap(), &q(y));
        prop_assert_eq!(h.reduce(&combo).unwrap(), expected);
        prop_assert!(h.is_boundary(&p.d(&w)).unwrap_or(true));
    }

    #[test]
    fn induced_maps_compose(f in (-2i64..=2, -2i64..=2), g in (-2i64..=2, -2i64..=2)) {
        let (phi, psi) = (scaling(f.0, f.1), scaling(g.0, g.1));
        let comp = psi.compose(&phi).unwrap();
        let (hphi, hpsi, hcomp) = (
            induced_map(&phi, 0, 12).unwrap(),
            induced_map(&psi, 0, 12).unwrap(),
            induced_map(&comp, 0, 12).unwrap(),
        );
        for k in 0..=12 {
            prop_assert_eq!(
                hcomp.matrices[&k].to_dense(),
                hpsi.matrices[&k].compose(&hphi.matrices[&k]).to_dense()
            );
        }
    }

    #[test]
    fn nil_is_monotone_under_inclusion(mask in 1u8..8) {
        let p = common::sl81(12);
        let alg = PresentationAlgebra::new(&p);
        let all = presentation_generators(&p);
        let sub: Vec<_> = all.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, g)| g.clone()).collect();
        prop_assert!(nil_ideal(&alg, &sub).value <= nil_ideal(&alg, &all).value);
    }

    #[test]
    fn homology_nil_ignores_choice_of_representatives(s in coeffs()) {
        let p = nonformal(14);
        let h = homology(&p, 0, 13).unwrap();
        let alg = HomologyAlgebra { report: &h };
        let base = nil_ideal(&alg, &cdga::ideal::augmentation_generators(&alg)).value;
        let gens: Vec<_> = (1..=13)
            .flat_map(|k| {
                let b = h.betti(k);
                let s = &s;
                (0..b).map(move |i| {
                    let mut v = SparseVec::new();
                    v.insert(i, q(s[i % s.len()].abs() + 1));
                    if i + 1 < b {
                        v.insert(i + 1, q(s[(i + 1) % s.len()]));
                    }
                    v.retain(|_, c| *c != q(0));
                    (k, v)
                })
            })
            .collect();
        prop_assert_eq!(nil_ideal(&alg, &gens).value, base);
    }
}

fn convolution(a: &[usize], b: &[usize], len: usize) -> Vec<usize> {
    (0..len)
        .map(|k| (0..=k).map(|i| a.get(i).unwrap_or(&0) * b.get(k - i).unwrap_or(&0)).sum())
        .collect()
}

fn betti(p: &std::sync::Arc<Presentation>, hi: u32) -> Vec<usize> {
    homology(p, 0, hi).unwrap().betti_numbers()
}

#[test]
fn kunneth_on_sphere_products() {
    let hi = 13;
    for n in 2..=5 {
        for m in n..=5 {
            let (a, b) = (sphere(n, hi + 1), sphere(m, hi + 1));
            let (t, _, _) = tensor(&a, &b).unwrap();
            let expected = convolution(&betti(&a, hi), &betti(&b, hi), hi as usize + 1);
            assert_eq!(betti(&t, hi), expected, "S{n} x S{m}");
        }
    }
    let (s2, s3) = (sphere(2, hi + 1), sphere(3, hi + 1));
    let (t, _, _) = tensor(&s2, &s3).unwrap();
    let (tt, _, _) = tensor(&t, &sphere(4, hi + 1)).unwrap();
    let ab = convolution(&betti(&s2, hi), &betti(&s3, hi), hi as usize + 1);
    let expected = convolution(&ab, &betti(&sphere(4, hi + 1), hi), hi as usize + 1);
    assert_eq!(betti(&tt, hi), expected);
}
