mod common;

use std::sync::Arc;

use proptest::prelude::*;

use cdga::homology::{homology, is_quasi_iso};
use cdga::morphism::Morphism;
use cdga::relative::{acyclic_closure, cofiber_model, fiber_model, path_fibration_model};
use cdga::sullivan::{build_minimal_model, find_isomorphism, multiplication_model};
use cdga::{Presentation, PresentationBuilder};
use common::{nonformal, sphere, zoo};

/// One of four shapes with its differential rescaled by nonzero constants.
fn rescaled(shape: usize, c: i64, e: i64) -> Arc<Presentation> {
    let b = match shape {
        0 => PresentationBuilder::new("N")
            .gen("a", 3)
            .gen("b", 3)
            .gen("x", 5)
            .d("x", &format!("{c}*a*b"))
            .cap(12),
        1 => PresentationBuilder::new("SL81")
            .gen("a", 2)
            .gen("b", 3)
            .gen("x", 5)
            .rel("a^4")
            .rel("a*b")
            .rel("a*x")
            .d("x", &format!("{c}*a^3"))
            .cap(11),
        2 => PresentationBuilder::new("S4")
            .gen("a", 4)
            .gen("y", 7)
            .d("y", &format!("{c}*a^2"))
            .cap(16),
        _ => PresentationBuilder::new("M")
            .gen("a", 2)
            .gen("b", 2)
            .gen("x", 3)
            .gen("y", 3)
            .d("x", &format!("{c}*a^2"))
            .d("y", &format!("{e}*a*b"))
            .cap(9),
    };
    b.build().unwrap()
}

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-4i64..=-1, 1i64..=4]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn minimal_models_agree_up_to_isomorphism(shape in 0usize..4, c in nonzero(), e in nonzero()) {
        let (p, q) = (rescaled(shape, c, e), rescaled(shape, 1, 1));
        let hi = p.cap() - 1;
        let (mp, mq) = (build_minimal_model(&p, hi).unwrap(), build_minimal_model(&q, hi).unwrap());
        prop_assert!(is_quasi_iso(&mp.comparison, 0, hi - 1).unwrap());
        prop_assert!(find_isomorphism(&mp.model, &mq.model).is_some());
    }
}

#[test]
fn comparisons_are_quasi_isomorphisms() {
    for p in zoo() {
        let hi = p.cap() - 1;
        let m = build_minimal_model(p, hi).unwrap();
        assert!(is_quasi_iso(&m.comparison, 0, hi - 1).unwrap(), "{}", p.name());
        let again = build_minimal_model(p, hi).unwrap();
        assert!(find_isomorphism(&m.model, &again.model).is_some(), "{}", p.name());
    }
}

#[test]
fn acyclic_closures_are_acyclic() {
    for p in zoo() {
        let ac = acyclic_closure(p).unwrap();
        let hi = p.cap() - 1;
        let h = homology(&ac.total, 0, hi).unwrap();
        let mut expected = vec![0; hi as usize + 1];
        expected[0] = 1;
        assert_eq!(h.betti_numbers(), expected, "{}", p.name());
        assert!(ac.comparison.as_ref().map_or(true, |c| is_quasi_iso(c, 0, hi).unwrap()));
    }
}

#[test]
fn path_fibrations_restrict_to_their_fibers() {
    for p in [sphere(3, 12), sphere(4, 16), nonformal(12)] {
        for n in 2..=3 {
            let rm = path_fibration_model(&p, n).unwrap();
            let (fiber, proj) = fiber_model(&rm).unwrap();
            assert_eq!(fiber.ngens(), p.ngens() * (n - 1));
            assert!(fiber.differentials().iter().all(|d| d.is_zero()), "{} n={n}", p.name());
            for i in 0..rm.base.ngens() {
                let g = rm.total.index_of(&rm.base.generator(i).name).unwrap();
                assert!(proj.image_of(g).is_zero());
            }
            let hi = rm.total.cap() - 1;
            let h = homology(&rm.total, 0, hi).unwrap();
            let hp = homology(&p.with_cap(rm.total.cap()).unwrap(), 0, hi).unwrap();
            assert_eq!(h.betti_numbers(), hp.betti_numbers(), "{} n={n}", p.name());
        }
    }
}

/// Exactness of `H(K) → H(A) → H(B) → H(K)[1]` forces each term to be at
/// most the sum of its neighbours.
fn check_long_exact(phi: &Morphism) {
    let cof = cofiber_model(phi).unwrap();
    let hi = cof.presentation.cap().min(phi.source().cap()) - 2;
    let k = homology(&cof.presentation, 0, hi + 1).unwrap().betti_numbers();
    let a = homology(phi.source(), 0, hi + 1).unwrap().betti_numbers();
    let b = homology(&phi.target().with_cap(hi + 2).unwrap(), 0, hi + 1).unwrap().betti_numbers();
    let reduced = |v: &[usize], i: usize| if i == 0 { 0 } else { v[i] };
    for i in 1..=hi as usize {
        let (ki, ai, bi, kn) = (reduced(&k, i), a[i], b[i], reduced(&k, i + 1));
        let bp = b[i - 1] - usize::from(i == 1);
        assert!(ai <= ki + bi, "H^{i}(A) too large for {}", phi.name());
        assert!(bi <= ai + kn, "H^{i}(B) too large for {}", phi.name());
        assert!(ki <= bp + ai, "H^{i}(K) too large for {}", phi.name());
    }
}

#[test]
fn cofiber_models_satisfy_the_long_exact_sequence() {
    for n in [3, 4] {
        let s = sphere(n, 4 * n);
        check_long_exact(&multiplication_model(&s, 2).unwrap().mu);
    }
    let s4 = PresentationBuilder::new("S4").gen("a", 4).gen("x", 7).d("x", "a^2").cap(16).build().unwrap();
    let s7 = PresentationBuilder::new("S7").gen("x", 7).cap(16).build().unwrap();
    check_long_exact(&Morphism::from_strs("q", s4, s7, &[("x", "x")]).unwrap());
}
