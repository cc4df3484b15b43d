mod common;

use std::sync::Arc;

use proptest::prelude::*;

use cdga::certificate::Context;
use cdga::construct::tensor;
use cdga::invariants::{tc_bounds, Options};
use cdga::linalg::{q, Q};
use cdga::msecat::{find_module_retraction, ganea_semifree, semifree_from_relative, SemiFreeModel};
use cdga::relative::{acyclic_closure, path_fibration_model};
use cdga::{Presentation, PresentationBuilder};
use common::{nonformal, sphere};

fn cp2(cap: u32) -> Arc<Presentation> {
    PresentationBuilder::new("CP2").gen("a", 2).gen("y", 5).d("y", "a^3").cap(cap).build().unwrap()
}

/// Free shapes with rescaled differentials.
fn shape(which: usize, c: i64) -> Arc<Presentation> {
    let b = match which {
        0 => PresentationBuilder::new("N").gen("a", 3).gen("b", 3).gen("x", 5).d("x", &format!("{c}*a*b")).cap(12),
        1 => PresentationBuilder::new("S4").gen("a", 4).gen("y", 7).d("y", &format!("{c}*a^2")).cap(14),
        2 => PresentationBuilder::new("CP2").gen("a", 2).gen("y", 5).d("y", &format!("{c}*a^3")).cap(11),
        _ => PresentationBuilder::new("S3").gen("a", 3).cap(12),
    };
    b.build().unwrap()
}

fn augmentation_model(p: &Arc<Presentation>) -> SemiFreeModel {
    let rm = acyclic_closure(p).unwrap();
    semifree_from_relative(&rm, p.cap() - 1).unwrap()
}

/// Expands `d∘d` on every generator and checks each differential is
/// homogeneous of degree one more than its generator.
fn assert_square_zero(g: &SemiFreeModel) {
    let a = &g.base;
    for i in 0..g.generators.len() {
        let k = g.degree(i);
        if k >= g.cap {
            continue;
        }
        let d0 = a.degree_of(&g.d0[i]).unwrap();
        assert!(d0.map_or(true, |d| d == k + 1), "{}: d0 in degree {d0:?}", g.generators[i].name);
        for (coef, t) in &g.dplus[i] {
            let dc = a.degree_of(coef).unwrap().unwrap_or(0);
            assert_eq!(dc + g.degree(*t), k + 1, "{}", g.generators[i].name);
        }
        if k + 1 < g.cap {
            assert!(g.d(&g.d_generator(i)).is_zero(), "d² ≠ 0 on {}", g.generators[i].name);
        }
    }
}

/// The same module with generators permuted by `order` and rescaled by
/// `scale`.
fn rebased(g: &SemiFreeModel, order: &[usize], scale: &[Q]) -> SemiFreeModel {
    let n = g.generators.len();
    let mut pos = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let generators = order.iter().map(|&o| g.generators[o].clone()).collect();
    let d0 = order.iter().map(|&o| g.d0[o].scale(&scale[o])).collect();
    let dplus = order
        .iter()
        .map(|&o| {
            g.dplus[o]
                .iter()
                .map(|(c, t)| (c.scale(&(&scale[o] / &scale[*t])), pos[*t]))
                .collect()
        })
        .collect();
    SemiFreeModel {
        base: g.base.clone(),
        generators,
        d0,
        dplus,
        cap: g.cap,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ganea_models_square_to_zero(which in 0usize..4, c in prop_oneof![-3i64..=-1, 1i64..=3], m in 1usize..=3) {
        let sf = augmentation_model(&shape(which, c));
        assert_square_zero(&ganea_semifree(&sf, m).unwrap());
    }

    #[test]
    fn retraction_verdicts_survive_change_of_basis(
        which in 0usize..4,
        m in 0usize..=2,
        keys in prop::collection::vec(any::<u32>(), 64),
        scales in prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], 64),
    ) {
        let p = shape(which, 1);
        let g = ganea_semifree(&augmentation_model(&p), m).unwrap();
        let n = g.generators.len();
        prop_assume!(n <= 64);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| keys[i]);
        let scale: Vec<Q> = scales.iter().take(n).map(|&s| q(s)).collect();
        let moved = rebased(&g, &order, &scale);
        let up_to = p.cap() - 1;
        prop_assert_eq!(
            find_module_retraction(&g, up_to).is_some(),
            find_module_retraction(&moved, up_to).is_some()
        );
    }
}

#[test]
fn ganea_models_of_path_fibrations_square_to_zero() {
    for p in [sphere(3, 10), sphere(4, 12), nonformal(11), cp2(10)] {
        let rm = path_fibration_model(&p, 2).unwrap();
        let sf = semifree_from_relative(&rm, p.cap() - 1).unwrap();
        for m in 0..=2 {
            assert_square_zero(&ganea_semifree(&sf, m).unwrap());
        }
    }
}

/// First `m` where `H(j_m)` is injective and first `m` where a module
/// retraction is found, for the base-point inclusion.
fn first_injective_and_retraction(p: &Arc<Presentation>) -> (usize, usize) {
    let sf = augmentation_model(p);
    let hi = p.cap() - 1;
    let (mut inj, mut ret) = (None, None);
    for m in 0..=4 {
        let g = ganea_semifree(&sf, m).unwrap();
        let injective = g.homology_kernel(hi).unwrap().is_none();
        let found = find_module_retraction(&g, hi).is_some();
        assert!(!found || injective, "{}: retraction at m = {m} without injectivity", p.name());
        if injective && inj.is_none() {
            inj = Some(m);
        }
        if found && ret.is_none() {
            ret = Some(m);
        }
        if ret.is_some() {
            break;
        }
    }
    (inj.unwrap(), ret.unwrap())
}

#[test]
fn duality_collapse_on_poincare_examples() {
    for (p, expected) in [(sphere(3, 12), 1), (sphere(4, 14), 1), (cp2(11), 2), (nonformal(12), 3)] {
        let (inj, ret) = first_injective_and_retraction(&p);
        assert_eq!(inj, ret, "{}", p.name());
        assert_eq!(ret, expected, "{}", p.name());
    }
}

#[test]
fn mtc_of_product_of_three_spheres_brackets_two() {
    let s3 = sphere(3, 12);
    let (t, _, _) = tensor(&s3, &s3).unwrap();
    let name = t.name().to_string();
    let ctx = Context::new().with_algebra(&t);
    let r = tc_bounds(&ctx, &name, 2, None, &Options::default()).unwrap();
    let m = r.bound("mTC_2").unwrap();
    assert!(m.lower <= 2, "lower {}", m.lower);
    assert!(m.upper.as_ref().map_or(false, |u| u.value >= 2), "{:?}", m.upper);
    assert_eq!(r.nil_value("nil ker H(Δ_2)").map(|n| n.value), Some(2));
}
