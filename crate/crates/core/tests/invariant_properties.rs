mod common;

use std::sync::Arc;

use proptest::prelude::*;

use cdga::certificate::{verify, Certificate, Context, ModelSpec};
use cdga::document::Document;
use cdga::homology::homology;
use cdga::ideal::nil_homology;
use cdga::invariants::{cat_bounds, secat_bounds, tc_bounds, toomer, ChainReport, Options};
use cdga::{Presentation, PresentationBuilder};
use common::{nonformal, s3d, sl81, sphere, wedge};


const STANLEY: &str = include_str!("../../cli/data/stanley.cdga");
const HOPF: &str = include_str!("../../cli/data/hopf.cdga");

fn ctx_of(p: &Arc<Presentation>) -> Context {
    Context::new().with_algebra(p)
}

fn worked_examples() -> Vec<(Context, ChainReport)> {
    let opts = Options::default();
    let mut out = Vec::new();
    let n = nonformal(14);
    let c = ctx_of(&n);
    out.push((c.clone(), cat_bounds(&c, "N", &opts).unwrap()));
    let n12 = nonformal(12);
    let c = ctx_of(&n12);
    out.push((c.clone(), tc_bounds(&c, "N", 2, None, &opts).unwrap()));
    let c = ctx_of(&sl81(12));
    out.push((c.clone(), cat_bounds(&c, "SL81", &opts).unwrap()));
    let c = ctx_of(&sphere(3, 12));
    out.push((c.clone(), tc_bounds(&c, "S3", 2, None, &opts).unwrap()));
    let c = ctx_of(&sphere(4, 16));
    out.push((c.clone(), cat_bounds(&c, "S4", &opts).unwrap()));
    let c = ctx_of(&wedge(12));
    out.push((c.clone(), tc_bounds(&c, "W", 2, None, &opts).unwrap()));
    let c = ctx_of(&s3d(5));
    let no_ganea = Options { ganea: false, ..Options::default() };
    out.push((c.clone(), tc_bounds(&c, "S3d", 2, Some(ModelSpec::Itself), &no_ganea).unwrap()));
    for (src, f) in [(STANLEY, "phi"), (HOPF, "hopf")] {
        let c = Document::parse(src).unwrap().build(None).unwrap();
        out.push((c.clone(), secat_bounds(&c, f, &opts).unwrap()));
    }
    out
}

fn certificates(r: &ChainReport) -> Vec<Certificate> {
    let mut out: Vec<Certificate> = r.nil.iter().flat_map(|n| n.certificates.clone()).collect();
    for b in &r.bounds {
        out.extend(b.lower_certificates.iter().cloned());
        out.extend(b.upper_certificates.iter().cloned());
        out.extend(b.model_relative.iter().cloned());
    }
    out
}

#[test]
fn bound_chains_are_consistent_on_worked_examples() {
    for (_, r) in worked_examples() {
        assert!(r.is_consistent(), "{}", r.subject);
        let nil = r.nil[0].value;
        assert!(nil <= r.bounds[0].lower, "{}: nil {nil} above {}", r.subject, r.bounds[0].name);
        for w in r.bounds.windows(2) {
            assert!(w[0].lower <= w[1].lower, "{}: {} vs {}", r.subject, w[0].name, w[1].name);
            if let (Some(a), Some(b)) = (&w[0].upper, &w[1].upper) {
                assert!(a.value <= b.value, "{}", r.subject);
            }
        }
        for b in &r.bounds {
            if let Some(u) = &b.upper {
                assert!(r.bounds.iter().all(|l| l.lower <= u.value || l.name != b.name));
                assert!(!b.upper_certificates.is_empty(), "{}: {} upper has no certificate", r.subject, b.name);
            }
            if b.lower > 0 {
                assert!(!b.lower_certificates.is_empty(), "{}: {} lower has no certificate", r.subject, b.name);
            }
        }
    }
}

#[test]
fn every_emitted_certificate_verifies() {
    for (ctx, r) in worked_examples() {
        for c in certificates(&r) {
            let back = Certificate::from_json(&c.to_json()).unwrap();
            assert_eq!(back, c);
            if let Err(e) = verify(&c, &ctx) {
                panic!("{}: {} rejected: {e}", r.subject, c.kind());
            }
        }
    }
}

/// Splits a printed element into signed terms.
fn terms(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        if i > 0 && bytes[i] == ' ' && i + 2 < bytes.len() && (bytes[i + 1] == '+' || bytes[i + 1] == '-') && bytes[i + 2] == ' ' {
            out.push(std::mem::take(&mut cur));
            if bytes[i + 1] == '-' {
                cur.push('-');
            }
            i += 3;
            continue;
        }
        cur.push(bytes[i]);
        i += 1;
    }
    out.push(cur);
    out
}

/// Every way of multiplying one coefficient of `s` by a factor other than 1.
fn corruptions(s: &str) -> Vec<String> {
    let ts = terms(s);
    let mut out = Vec::new();
    if s == "0" {
        return out;
    }
    for j in 0..ts.len() {
        for f in ["2", "-1", "0", "1/2", "3"] {
            let body = ts
                .iter()
                .enumerate()
                .map(|(i, t)| if i == j { format!("({f})*({t})") } else { format!("({t})") })
                .collect::<Vec<_>>()
                .join(" + ");
            out.push(body);
        }
    }
    out
}

fn corrupted(c: &Certificate) -> Vec<Certificate> {
    let mut out = Vec::new();
    match c {
        Certificate::NilWitness { factors, product, .. } => {
            for (i, f) in factors.iter().enumerate() {
                for bad in corruptions(f) {
                    let mut c = c.clone();
                    if let Certificate::NilWitness { factors, .. } = &mut c {
                        factors[i] = bad;
                    }
                    out.push(c);
                }
            }
            for bad in corruptions(product) {
                let mut c = c.clone();
                if let Certificate::NilWitness { product, .. } = &mut c {
                    *product = bad;
                }
                out.push(c);
            }
        }
        Certificate::RhoNoninjectivityWitness { z, y, omega, .. } => {
            for (field, s) in [(0, z), (1, y), (2, omega)] {
                for bad in corruptions(s) {
                    let mut c = c.clone();
                    if let Certificate::RhoNoninjectivityWitness { z, y, omega, .. } = &mut c {
                        *[z, y, omega][field] = bad;
                    }
                    out.push(c);
                }
            }
        }
        Certificate::ModuleRetraction { values, .. } => {
            for (k, v) in values {
                for bad in corruptions(v) {
                    let mut c = c.clone();
                    if let Certificate::ModuleRetraction { values, .. } = &mut c {
                        values.insert(k.clone(), bad);
                    }
                    out.push(c);
                }
            }
        }
        Certificate::AcyclicIdealContainment { ideal, .. } => {
            for (i, g) in ideal.iter().enumerate() {
                for bad in corruptions(g) {
                    let mut c = c.clone();
                    if let Certificate::AcyclicIdealContainment { ideal, .. } = &mut c {
                        ideal[i] = bad;
                    }
                    out.push(c);
                }
            }
        }
        _ => {}
    }
    out
}

#[test]
fn single_coefficient_corruptions_are_rejected() {
    let mut cases = Vec::new();
    for (ctx, r) in worked_examples() {
        for c in certificates(&r) {
            for bad in corrupted(&c) {
                cases.push((ctx.clone(), bad));
            }
        }
    }
    let stanley = Document::parse(STANLEY).unwrap().build(None).unwrap();
    let cert = Certificate::from_json(include_str!("../../cli/data/stanley_retraction.cert")).unwrap();
    for bad in corrupted(&cert) {
        cases.push((stanley.clone(), bad));
    }
    let mut accepted = Vec::new();
    for (ctx, bad) in &cases {
        if verify(bad, ctx).is_ok() {
            accepted.push(serde_json::to_string(bad).unwrap());
        }
    }
    println!("{} corruptions tried", cases.len());
    assert!(cases.len() >= 100);
    assert!(accepted.is_empty(), "accepted corruptions:\n{}", accepted.join("\n"));
}

fn rescaled_nonformal(c: i64) -> Arc<Presentation> {
    PresentationBuilder::new("N")
        .gen("a", 3)
        .gen("b", 3)
        .gen("x", 5)
        .d("x", &format!("{c}*a*b"))
        .cap(14)
        .build()
        .unwrap()
}

fn rescaled_cp2(c: i64) -> Arc<Presentation> {
    PresentationBuilder::new("CP2").gen("a", 2).gen("y", 5).d("y", &format!("{c}*a^3")).cap(11).build().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn toomer_is_invariant_under_isomorphism(c in prop_oneof![-5i64..=-1, 1i64..=5], which in 0usize..2) {
        let (p, base, expected) = match which {
            0 => (rescaled_nonformal(c), rescaled_nonformal(1), 3),
            _ => (rescaled_cp2(c), rescaled_cp2(1), 2),
        };
        let name = p.name().to_string();
        let e = toomer(&ctx_of(&p), &name, ModelSpec::Itself, 6).unwrap();
        let e1 = toomer(&ctx_of(&base), &name, ModelSpec::Itself, 6).unwrap();
        prop_assert_eq!(e.lower, e1.lower);
        prop_assert_eq!(&e.upper, &e1.upper);
        prop_assert_eq!(e.lower, expected);
        prop_assert_eq!(e.upper.map(|u| u.value), Some(expected));
    }
}

/// Cohomology algebras with zero differential, flagged formal.
fn formal(name: &str, gens: &[(&str, u32)], rels: &[&str], cap: u32) -> Arc<Presentation> {
    let mut b = PresentationBuilder::new(name).formal().cap(cap);
    for (g, d) in gens {
        b = b.gen(g, *d);
    }
    for r in rels {
        b = b.rel(r);
    }
    b.build().unwrap()
}

#[test]
fn formal_spaces_have_toomer_equal_to_nil() {
    let cases = [
        formal("HS2", &[("a", 2)], &["a^2"], 10),
        formal("HS3", &[("a", 3)], &[], 10),
        formal("HS4", &[("a", 4)], &["a^2"], 14),
        formal("HCP2", &[("a", 2)], &["a^3"], 12),
        formal("HS2xS3", &[("a", 2), ("b", 3)], &["a^2"], 12),
        formal("HS3xS3", &[("a", 3), ("b", 3)], &[], 10),
        formal("HS2xS2", &[("a", 2), ("b", 2)], &["a^2", "b^2"], 12),
    ];
    for p in cases {
        let name = p.name().to_string();
        let h = homology(&p, 0, p.cap() - 1).unwrap();
        let nil = nil_homology(&h).value as u32;
        let model = ModelSpec::Minimal { cap: p.cap() - 1 };
        let e = toomer(&ctx_of(&p), &name, model, 6).unwrap();
        assert_eq!(e.value(), Some(nil), "{name}: {e:?}");
    }
}

#[test]
fn htc_grows_with_n() {
    let opts = Options { ganea: false, ..Options::default() };
    for p in [sphere(3, 12), sphere(2, 12), nonformal(12)] {
        let name = p.name().to_string();
        let c = ctx_of(&p);
        let two = tc_bounds(&c, &name, 2, None, &opts).unwrap();
        let three = tc_bounds(&c, &name, 3, None, &opts).unwrap();
        let (h2, h3) = (two.bound("HTC_2").unwrap(), three.bound("HTC_3").unwrap());
        assert!(h2.lower <= h3.lower, "{name}: {} > {}", h2.lower, h3.lower);
        if let (Some(a), Some(b)) = (h2.value(), h3.value()) {
            assert!(a <= b, "{name}");
        }
    }
}
