//! Bounds for the chain `nil ker H(f) ≤ Hsecat ≤ msecat ≤ secat(f₀)` and its
//! specialisations to `cat` and `TC_n`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, Presentation};
use crate::certificate::{resolve, semifree_for, Certificate, Context, ModelSpec, Pedigree, Resolved, Scope, Subject};
use crate::error::{Error, Result};
use crate::homology::{homology, induced_map};
use crate::ideal::{nil_augmentation, nil_ideal, HomologyAlgebra, Homogeneous};
use crate::morphism::Morphism;
use crate::msecat::{find_module_retraction, ganea_semifree, poincare_duality_check};
use crate::relative::RelativeModel;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub value: u32,
    pub scope: Scope,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantBound {
    pub name: String,
    pub lower: u32,
    pub upper: Option<Bound>,
    pub lower_certificates: Vec<Certificate>,
    pub upper_certificates: Vec<Certificate>,
    /// Valid certificates whose conclusion holds only for the model used.
    pub model_relative: Vec<Certificate>,
    pub notes: Vec<String>,
}

impl InvariantBound {
    pub fn new(name: impl Into<String>) -> Self {
        InvariantBound {
            name: name.into(),
            lower: 0,
            upper: None,
            lower_certificates: Vec::new(),
            upper_certificates: Vec::new(),
            model_relative: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// The exact value, when the bounds meet and the upper bound holds in
    /// every degree.
    pub fn value(&self) -> Option<u32> {
        match &self.upper {
            Some(Bound {
                value,
                scope: Scope::AllDegrees,
            }) if *value == self.lower => Some(*value),
            _ => None,
        }
    }

    pub fn raise_lower(&mut self, m: u32, certs: &[Certificate]) {
        if m > self.lower {
            self.lower = m;
            self.lower_certificates = certs.to_vec();
        } else if m == self.lower && m > 0 {
            for c in certs {
                if !self.lower_certificates.contains(c) {
                    self.lower_certificates.push(c.clone());
                }
            }
        }
    }

    pub fn tighten_upper(&mut self, b: &Bound, certs: &[Certificate]) {
        let better = match &self.upper {
            None => true,
            Some(u) => {
                b.value < u.value
                    || (b.value == u.value && b.scope == Scope::AllDegrees && u.scope != Scope::AllDegrees)
                    || (b.value == u.value && scope_rank(&b.scope) > scope_rank(&u.scope))
            }
        };
        if better {
            self.upper = Some(b.clone());
            self.upper_certificates = certs.to_vec();
        } else if self.upper.as_ref() == Some(b) {
            for c in certs {
                if !self.upper_certificates.contains(c) {
                    self.upper_certificates.push(c.clone());
                }
            }
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.upper.as_ref().map_or(true, |u| self.lower <= u.value)
    }
}

fn scope_rank(s: &Scope) -> u32 {
    match s {
        Scope::AllDegrees => u32::MAX,
        Scope::UpToDegree { degree } => *degree,
    }
}

/// A computed nilpotency with its witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NilValue {
    pub name: String,
    pub value: u32,
    /// False when the ambient algebra extends past the computed range.
    pub exact: bool,
    pub certificates: Vec<Certificate>,
}

/// Bounds ordered so that each invariant is at most the next.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub subject: String,
    pub cap: u32,
    pub nil: Vec<NilValue>,
    pub bounds: Vec<InvariantBound>,
    pub notes: Vec<String>,
}

impl ChainReport {
    pub fn bound(&self, name: &str) -> Option<&InvariantBound> {
        self.bounds.iter().find(|b| b.name == name)
    }

    pub fn nil_value(&self, name: &str) -> Option<&NilValue> {
        self.nil.iter().find(|b| b.name == name)
    }

    /// Pushes lower bounds up the chain and upper bounds down it.
    pub fn propagate(&mut self) {
        for i in 1..self.bounds.len() {
            let (l, c) = (self.bounds[i - 1].lower, self.bounds[i - 1].lower_certificates.clone());
            self.bounds[i].raise_lower(l, &c);
        }
        for i in (0..self.bounds.len().saturating_sub(1)).rev() {
            if let Some(u) = self.bounds[i + 1].upper.clone() {
                let c = self.bounds[i + 1].upper_certificates.clone();
                self.bounds[i].tighten_upper(&u, &c);
            }
        }
    }

    /// Every lower bound is at most every upper bound further up the chain.
    pub fn is_consistent(&self) -> bool {
        let nil = self.nil.first().map_or(0, |n| n.value);
        self.bounds.iter().enumerate().all(|(i, b)| {
            b.is_consistent()
                && nil <= b.upper.as_ref().map_or(u32::MAX, |u| u.value)
                && self.bounds[..=i]
                    .iter()
                    .all(|lo| b.upper.as_ref().map_or(true, |u| lo.lower <= u.value))
        })
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Largest `m` tried in the ρ and Ganea loops.
    pub max_m: u32,
    /// Whether to run the Ganea route.
    pub ganea: bool,
    /// Ganea models with more module generators than this are skipped.
    pub ganea_limit: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_m: 6,
            ganea: true,
            ganea_limit: 400,
        }
    }
}

/// nil of `ker H(φ)` over the source's computable range, with a witness.
pub fn nil_kernel_homology(phi: &Morphism, subject: &Subject, name: &str) -> Result<NilValue> {
    let s = phi.source();
    let hi = s.cap().min(phi.target().cap()).saturating_sub(1);
    let h = homology(s, 0, hi)?;
    let map = induced_map(phi, 0, hi)?;
    let mut gens: Vec<Homogeneous> = Vec::new();
    for (&k, m) in &map.matrices {
        if k == 0 {
            continue;
        }
        gens.extend(m.kernel().into_iter().map(|v| (k, v)));
    }
    let alg = HomologyAlgebra { report: &h };
    let nil = nil_ideal(&alg, &gens);
    let exact = !nil.range_relative || s.top_degree().is_some_and(|t| t <= hi);
    let mut certificates = Vec::new();
    if nil.value > 0 {
        let factors: Vec<Element> = nil.witness.iter().map(|(k, v)| h.class_element(*k, v)).collect();
        let product = s.mul_all(factors.iter());
        certificates.push(Certificate::NilWitness {
            subject: subject.clone(),
            homology: true,
            factors: factors.iter().map(|f| s.format(f)).collect(),
            product: s.format(&product),
        });
    }
    Ok(NilValue {
        name: name.to_string(),
        value: nil.value as u32,
        exact,
        certificates,
    })
}

/// nil of an ideal given by generators, when the power eventually vanishes.
fn nil_of_ideal(r: &Resolved, subject: &Subject, name: &str, max_m: u32) -> Option<NilValue> {
    let crate::certificate::IdealKind::Generators(gens) = &r.ideal else {
        return None;
    };
    let mut last: Option<Vec<usize>> = None;
    for m in 0..=max_m {
        let p = r.power_generators(m)?;
        if p.is_empty() {
            let mut certificates = vec![Certificate::KernelPowerVanishes {
                subject: subject.clone(),
                m,
            }];
            if let Some(idx) = last {
                let factors: Vec<Element> = idx.iter().map(|&i| gens[i].clone()).collect();
                let product = r.source.mul_all(factors.iter());
                certificates.insert(
                    0,
                    Certificate::NilWitness {
                        subject: subject.clone(),
                        homology: false,
                        factors: factors.iter().map(|f| r.source.format(f)).collect(),
                        product: r.source.format(&product),
                    },
                );
            }
            return Some(NilValue {
                name: name.to_string(),
                value: m,
                exact: true,
                certificates,
            });
        }
        last = witness_tuple(r, gens, m as usize + 1);
    }
    None
}

fn witness_tuple(r: &Resolved, gens: &[Element], k: usize) -> Option<Vec<usize>> {
    fn go(r: &Resolved, gens: &[Element], k: usize, start: usize, cur: &mut Vec<usize>, acc: &Element) -> bool {
        if cur.len() == k {
            return !acc.is_zero();
        }
        for i in start..gens.len() {
            let next = r.source.mul(acc, &gens[i]);
            if next.is_zero() {
                continue;
            }
            cur.push(i);
            if go(r, gens, k, i, cur, &next) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::new();
    go(r, gens, k, 0, &mut cur, &r.source.one()).then_some(cur)
}

/// Outcome of the ρ_m loop on one subject.
#[derive(Clone, Debug, Default)]
pub struct RhoOutcome {
    pub lower: Option<(u32, Certificate)>,
    pub upper: Option<(Bound, Certificate)>,
    pub model_relative: Vec<Certificate>,
    pub notes: Vec<String>,
}

/// Runs `m = 0, 1, …` on `ρ_m`, recording non-injectivity witnesses and the
/// first injective `m`.
pub fn rho_bounds(ctx: &Context, subject: &Subject, max_m: u32) -> Result<RhoOutcome> {
    let r = resolve(subject, ctx)?;
    let mut out = RhoOutcome::default();
    let relative = r.pedigree == Pedigree::None;
    for m in 0..=max_m {
        if r.power_vanishes(m) {
            let cert = Certificate::KernelPowerVanishes {
                subject: subject.clone(),
                m,
            };
            if relative {
                out.notes.push(format!("ρ_{m} is the identity on this model"));
                out.model_relative.push(cert);
            } else {
                out.upper = Some((
                    Bound {
                        value: m,
                        scope: Scope::AllDegrees,
                    },
                    cert,
                ));
            }
            return Ok(out);
        }
        let (q, rho) = r.rho(m)?;
        let hi = r.source.cap().min(q.cap()).saturating_sub(1);
        let h = induced_map(&rho, 0, hi)?;
        match h.first_kernel() {
            Some((k, v)) => {
                let hs = homology(&r.source, k, k)?;
                let z = hs.class_element(k, &v);
                let rz = rho.apply(&z);
                let ybar = q
                    .differential_matrix(k - 1)
                    .solve(&q.coords(&rz, k))
                    .expect("class in the kernel is a boundary in the quotient");
                let y = q.from_coords(k - 1, &ybar);
                let omega = &z - &r.source.d(&y);
                let cert = Certificate::RhoNoninjectivityWitness {
                    subject: subject.clone(),
                    m,
                    z: r.source.format(&z),
                    y: r.source.format(&y),
                    omega: r.source.format(&omega),
                };
                if relative {
                    out.notes.push(format!(
                        "H(ρ_{m}) is not injective on this model (class of degree {k}); model-relative, no lower bound"
                    ));
                    out.model_relative.push(cert);
                } else {
                    out.lower = Some((m + 1, cert));
                }
            }
            None => {
                let cert = Certificate::RhoInjectivityRange {
                    subject: subject.clone(),
                    m,
                    up_to: hi,
                };
                let scope = match r.homology_top {
                    Some(t) if t <= hi => Scope::AllDegrees,
                    _ => Scope::UpToDegree { degree: hi },
                };
                if relative {
                    out.notes.push(format!("H(ρ_{m}) is injective up to degree {hi} on this model"));
                    out.model_relative.push(cert);
                } else {
                    out.upper = Some((Bound { value: m, scope }, cert));
                }
                return Ok(out);
            }
        }
    }
    out.notes.push(format!("ρ_m not injective for m ≤ {max_m}"));
    Ok(out)
}

fn apply_rho(b: &mut InvariantBound, o: RhoOutcome) {
    if let Some((m, c)) = o.lower {
        b.raise_lower(m, &[c]);
    }
    b.model_relative.extend(o.model_relative);
    if let Some((u, c)) = o.upper {
        b.tighten_upper(&u, &[c]);
    }
    b.notes.extend(o.notes);
}

/// Toomer's invariant `e` from word-length truncations.
pub fn toomer(ctx: &Context, algebra: &str, model: ModelSpec, max_m: u32) -> Result<InvariantBound> {
    let mut b = InvariantBound::new("e");
    let subject = Subject::WordLength {
        algebra: algebra.to_string(),
        model,
    };
    apply_rho(&mut b, rho_bounds(ctx, &subject, max_m)?);
    Ok(b)
}

/// The Ganea route: the least `m` up to `max_m` whose `j_m` has a module
/// retraction in range.
fn ganea_bounds(ctx: &Context, subject: &Subject, start: u32, opts: &Options, cap: u32, b: &mut InvariantBound) {
    let sf = match semifree_for(subject, ctx, cap) {
        Ok(sf) => sf,
        Err(e) => {
            b.notes.push(format!("no semi-free model: {e}"));
            return;
        }
    };
    for m in start..=opts.max_m {
        let g = match ganea_semifree(&sf, m as usize) {
            Ok(g) => g,
            Err(e) => {
                b.notes.push(format!("Ganea model m = {m}: {e}"));
                return;
            }
        };
        if g.generators.len() > opts.ganea_limit {
            b.notes.push(format!(
                "Ganea model m = {m} has {} module generators; skipped",
                g.generators.len()
            ));
            return;
        }
        match g.homology_kernel(cap) {
            Ok(Some((k, _))) => {
                b.notes.push(format!("H(j_{m}) is not injective (degree {k})"));
                continue;
            }
            Ok(None) => {}
            Err(e) => {
                b.notes.push(format!("H(j_{m}): {e}"));
                return;
            }
        }
        match find_module_retraction(&g, cap) {
            Some(r) => {
                let values: BTreeMap<String, String> = r
                    .values
                    .iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(k, v)| (k.clone(), g.base.format(v)))
                    .collect();
                let cert = Certificate::ModuleRetraction {
                    subject: subject.clone(),
                    m,
                    up_to: r.verified_up_to,
                    values,
                };
                b.tighten_upper(
                    &Bound {
                        value: m,
                        scope: Scope::UpToDegree {
                            degree: r.verified_up_to,
                        },
                    },
                    &[cert],
                );
                return;
            }
            None => b.notes.push(format!(
                "no module retraction of j_{m} whose equations up to degree {cap} are satisfiable (advisory)"
            )),
        }
    }
}

/// Poincaré duality of `H(A)` at its top nonzero degree.
fn duality_of(a: &Arc<Presentation>) -> Option<u32> {
    let top = a.finite_top_degree()?;
    let a = if a.cap() < top + 2 { a.with_cap(top + 2).ok()? } else { a.clone() };
    let h = homology(&a, 0, top + 1).ok()?;
    let n = (0..=top).rev().find(|&k| h.betti(k) > 0)?;
    poincare_duality_check(&h, n).ok()?.is_duality.then_some(n)
}

fn collapse(report: &mut ChainReport, h: usize, m: usize, subject: Subject, n: u32) {
    let cert = Certificate::PdCollapse {
        subject,
        formal_dimension: n,
    };
    if let Some(u) = report.bounds[h].upper.clone() {
        let mut certs = report.bounds[h].upper_certificates.clone();
        certs.push(cert.clone());
        report.bounds[m].tighten_upper(&u, &certs);
    }
    report.notes.push(format!("homology satisfies Poincaré duality in dimension {n}: msecat = Hsecat"));
}

fn default_max_m(a: &Arc<Presentation>, opts: &Options) -> u32 {
    match a.finite_top_degree() {
        Some(_) => {
            let n = nil_augmentation(a);
            (n.value as u32).max(1).min(opts.max_m.max(n.value as u32))
        }
        None => opts.max_m,
    }
}

/// Bounds for `e ≤ mcat ≤ cat(X₀)`.
pub fn cat_bounds(ctx: &Context, algebra: &str, opts: &Options) -> Result<ChainReport> {
    let a = ctx.algebra(algebra)?.clone();
    let cap = a.cap();
    let aug = Subject::Augmentation {
        algebra: algebra.to_string(),
    };
    let mut report = ChainReport {
        subject: format!("cat({algebra})"),
        cap,
        nil: Vec::new(),
        bounds: vec![
            InvariantBound::new("e"),
            InvariantBound::new("mcat"),
            InvariantBound::new("cat(X₀)"),
        ],
        notes: Vec::new(),
    };
    let eps = resolve(&aug, ctx)?.map.expect("augmentation");
    let nil_h = nil_kernel_homology(&eps, &aug, "nil H⁺")?;
    report.bounds[0].raise_lower(nil_h.value, &nil_h.certificates);
    report.nil.push(nil_h);

    let max_m = default_max_m(&a, opts);
    let model = if a.is_minimal() {
        ModelSpec::Itself
    } else {
        ModelSpec::Minimal { cap: cap - 1 }
    };
    match toomer(ctx, algebra, model, max_m) {
        Ok(e) => {
            let o = &mut report.bounds[0];
            o.raise_lower(e.lower, &e.lower_certificates);
            if let Some(u) = &e.upper {
                o.tighten_upper(u, &e.upper_certificates);
            }
            o.notes.extend(e.notes);
        }
        Err(e) => report.bounds[0].notes.push(format!("word-length route unavailable: {e}")),
    }

    if a.finite_top_degree().is_some() {
        let r = resolve(&aug, ctx)?;
        if let Some(n) = nil_of_ideal(&r, &aug, "nil A⁺", 64) {
            let ub = n.certificates.last().cloned().expect("vanishing certificate");
            report.bounds[2].tighten_upper(
                &Bound {
                    value: n.value,
                    scope: Scope::AllDegrees,
                },
                &[ub],
            );
            report.nil.push(n);
        }
    }

    if a.is_minimal() && a.generators().iter().all(|g| g.is_odd()) {
        let dim = a.ngens();
        let cert = Certificate::OddGenerated {
            algebra: algebra.to_string(),
            dim,
        };
        report.bounds[2].raise_lower(dim as u32, &[cert.clone()]);
        report.bounds[2].tighten_upper(
            &Bound {
                value: dim as u32,
                scope: Scope::AllDegrees,
            },
            &[cert],
        );
    }

    if opts.ganea {
        let start = report.bounds[0].lower;
        let hi = cap.saturating_sub(1);
        let mut mc = report.bounds[1].clone();
        ganea_bounds(ctx, &aug, start, opts, hi, &mut mc);
        report.bounds[1] = mc;
    }

    if let Some(n) = duality_of(&a) {
        collapse(&mut report, 0, 1, aug, n);
    }
    if a.flags().formal {
        report
            .notes
            .push("flagged formal: with the (H, 0) model every bound in the chain agrees".into());
    }
    report.propagate();
    Ok(report)
}

/// Bounds for `HTC_n ≤ mTC_n ≤ TC_n(X₀)`.
pub fn tc_bounds(ctx: &Context, algebra: &str, n: usize, model: Option<ModelSpec>, opts: &Options) -> Result<ChainReport> {
    let a = ctx.algebra(algebra)?.clone();
    let cap = a.cap();
    let model = model.unwrap_or(if a.is_sullivan() {
        ModelSpec::Itself
    } else {
        ModelSpec::Minimal { cap: cap - 1 }
    });
    let mut report = ChainReport {
        subject: format!("TC_{n}({algebra})"),
        cap,
        nil: Vec::new(),
        bounds: vec![
            InvariantBound::new(format!("HTC_{n}")),
            InvariantBound::new(format!("mTC_{n}")),
            InvariantBound::new(format!("TC_{n}(X₀)")),
        ],
        notes: Vec::new(),
    };
    let diag = Subject::Diagonal {
        algebra: algebra.to_string(),
        n,
        model: ModelSpec::Itself,
    };
    let mu = resolve(&diag, ctx)?.map.expect("multiplication");
    let nil_h = nil_kernel_homology(&mu, &diag, &format!("nil ker H(Δ_{n})"))?;
    report.bounds[0].raise_lower(nil_h.value, &nil_h.certificates);
    report.nil.push(nil_h);

    let max_m = default_max_m(&a, opts) * n as u32;
    let main = Subject::Diagonal {
        algebra: algebra.to_string(),
        n,
        model: model.clone(),
    };
    let o = rho_bounds(ctx, &main, max_m)?;
    apply_rho(&mut report.bounds[0], o);

    if a.finite_top_degree().is_some() {
        let r = resolve(&diag, ctx)?;
        if let Some(nv) = nil_of_ideal(&r, &diag, &format!("nil ker μ_{n}"), 64) {
            let ub = nv.certificates.last().cloned().expect("vanishing certificate");
            report.bounds[2].tighten_upper(
                &Bound {
                    value: nv.value,
                    scope: Scope::AllDegrees,
                },
                &[ub],
            );
            report.nil.push(nv);
        }
    }

    if opts.ganea && a.is_sullivan() {
        let start = report.bounds[0].lower;
        let hi = cap.saturating_sub(1);
        let mut mb = report.bounds[1].clone();
        ganea_bounds(ctx, &diag, start, opts, hi, &mut mb);
        report.bounds[1] = mb;
    }

    if let Some(d) = duality_of(&a) {
        collapse(&mut report, 0, 1, diag, d);
    }
    report.propagate();
    Ok(report)
}

/// Bounds for `Hsecat ≤ msecat ≤ secat(f₀)` of a morphism modelling `f`.
pub fn secat_bounds(ctx: &Context, morphism: &str, opts: &Options) -> Result<ChainReport> {
    let phi = ctx.morphism(morphism)?.clone();
    let s = phi.source().clone();
    let cap = s.cap().min(phi.target().cap());
    let subject = Subject::Kernel {
        morphism: morphism.to_string(),
    };
    let mut report = ChainReport {
        subject: format!("secat({morphism})"),
        cap,
        nil: Vec::new(),
        bounds: vec![
            InvariantBound::new("Hsecat"),
            InvariantBound::new("msecat"),
            InvariantBound::new("secat(f₀)"),
        ],
        notes: Vec::new(),
    };
    let nil_h = nil_kernel_homology(&phi, &subject, "nil ker H(f)")?;
    report.bounds[0].raise_lower(nil_h.value, &nil_h.certificates);
    report.nil.push(nil_h);

    let surjective = phi.check_surjective(cap.saturating_sub(1)).is_ok();
    if surjective {
        let max_m = default_max_m(&s, opts);
        match rho_bounds(ctx, &subject, max_m) {
            Ok(o) => {
                if resolve(&subject, ctx)?.pedigree == Pedigree::None {
                    report.notes.push(
                        "no s-model or Sullivan-augmentation pedigree: ρ_m results are model-relative".into(),
                    );
                }
                apply_rho(&mut report.bounds[0], o);
            }
            Err(e) => report.notes.push(format!("ρ route: {e}")),
        }
        if s.finite_top_degree().is_some() {
            let r = resolve(&subject, ctx)?;
            if let Some(nv) = nil_of_ideal(&r, &subject, "nil ker φ", 64) {
                let ub = nv.certificates.last().cloned().expect("vanishing certificate");
                report.bounds[2].tighten_upper(
                    &Bound {
                        value: nv.value,
                        scope: Scope::AllDegrees,
                    },
                    &[ub],
                );
                report.nil.push(nv);
            }
        }
    } else {
        report.notes.push("not surjective: ρ route skipped".into());
    }

    if opts.ganea && RelativeModel::from_inclusion(&phi).is_ok() {
        let start = report.bounds[0].lower;
        let mut mb = report.bounds[1].clone();
        ganea_bounds(ctx, &subject, start, opts, cap.saturating_sub(1), &mut mb);
        report.bounds[1] = mb;
    }

    if let Some(d) = duality_of(&s) {
        collapse(&mut report, 0, 1, subject, d);
    }
    report.propagate();
    if !report.is_consistent() {
        return Err(Error::Invalid(format!("inconsistent bounds for {morphism}")));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PresentationBuilder;

    fn ctx_of(p: Arc<Presentation>) -> Context {
        Context::new().with_algebra(&p)
    }

    fn nonformal() -> Arc<Presentation> {
        PresentationBuilder::new("N")
            .gen("a", 3)
            .gen("b", 3)
            .gen("x", 5)
            .d("x", "a*b")
            .cap(14)
            .build()
            .unwrap()
    }

    #[test]
    fn nonformal_cat() {
        let ctx = ctx_of(nonformal());
        let r = cat_bounds(&ctx, "N", &Options::default()).unwrap();
        assert_eq!(r.nil_value("nil H⁺").unwrap().value, 2);
        assert_eq!(r.bound("e").unwrap().value(), Some(3));
        assert_eq!(r.bound("cat(X₀)").unwrap().value(), Some(3));
        assert!(r.is_consistent());
    }

    #[test]
    fn s3_tc() {
        let s3 = PresentationBuilder::new("S3").gen("a", 3).cap(8).build().unwrap();
        let ctx = ctx_of(s3);
        let r = tc_bounds(&ctx, "S3", 2, None, &Options::default()).unwrap();
        let b = r.bound("HTC_2").unwrap();
        assert_eq!(b.value(), Some(1));
        assert_eq!(r.bound("TC_2(X₀)").unwrap().value(), Some(1));
        assert!(r.is_consistent());
    }

    #[test]
    fn sl81_toomer() {
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
        let ctx = ctx_of(p);
        let e = toomer(&ctx, "SL81", ModelSpec::Minimal { cap: 11 }, 4).unwrap();
        assert_eq!(e.lower, 2);
        assert_eq!(e.upper.as_ref().unwrap().value, 2);
    }
}
