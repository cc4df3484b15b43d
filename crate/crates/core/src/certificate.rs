//! Certificates for invariant bounds and their independent verifier.
//!
//! A certificate names its subject by the objects of a [`Context`] (usually a
//! parsed document); the verifier rebuilds every derived object itself.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, Presentation};
use crate::construct::{quotient_named, truncate_word_length};
use crate::error::{Error, Result};
use crate::homology::{homology, ideal_span, induced_map, is_acyclic_ideal, kernel_ideal};
use crate::morphism::Morphism;
use crate::msecat::{check_module_retraction, ganea_semifree, poincare_duality_check, semifree_from_relative};
use crate::relative::{acyclic_closure, augmentation, path_fibration_model, RelativeModel};
use crate::sullivan::{build_minimal_model, multiplication_model, s_model_for_tc};

/// Named algebras and morphisms.
#[derive(Clone, Debug, Default)]
pub struct Context {
    pub algebras: BTreeMap<String, Arc<Presentation>>,
    pub morphisms: BTreeMap<String, Morphism>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_algebra(mut self, p: &Arc<Presentation>) -> Self {
        self.algebras.insert(p.name().to_string(), p.clone());
        self
    }

    pub fn with_morphism(mut self, m: &Morphism) -> Self {
        self.morphisms.insert(m.name().to_string(), m.clone());
        self
    }

    pub fn algebra(&self, name: &str) -> Result<&Arc<Presentation>> {
        self.algebras
            .get(name)
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn morphism(&self, name: &str) -> Result<&Morphism> {
        self.morphisms
            .get(name)
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }
}

/// Which Sullivan model stands in for an algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    /// The algebra itself.
    #[default]
    Itself,
    /// A named quasi-isomorphism from a Sullivan algebra onto the algebra.
    Morphism { name: String },
    /// The minimal model built through the given degree.
    Minimal { cap: u32 },
}

/// The ideal a bound is about.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Subject {
    /// The augmentation ideal, i.e. the base-point inclusion.
    Augmentation { algebra: String },
    /// Word-length truncations of a Sullivan model.
    WordLength {
        algebra: String,
        #[serde(default)]
        model: ModelSpec,
    },
    /// The kernel of `μ_n` or of the s-model `μ_nθ`.
    Diagonal {
        algebra: String,
        n: usize,
        #[serde(default)]
        model: ModelSpec,
    },
    /// The kernel of a named morphism.
    Kernel { morphism: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pedigree {
    SModel,
    SullivanAugmentation,
    None,
}

#[derive(Clone, Debug)]
pub enum IdealKind {
    WordLength,
    Generators(Vec<Element>),
}

/// A subject rebuilt from a context.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub source: Arc<Presentation>,
    pub ideal: IdealKind,
    pub map: Option<Morphism>,
    pub pedigree: Pedigree,
    /// Degree above which the homology of the source is known to vanish.
    pub homology_top: Option<u32>,
}

fn widened(a: &Arc<Presentation>, cap: u32) -> Result<Arc<Presentation>> {
    if a.cap() < cap {
        a.with_cap(cap)
    } else {
        Ok(a.clone())
    }
}

/// `a` with a cap past the top degree of its `n`-th tensor power, when finite.
fn ample(a: &Arc<Presentation>, n: usize) -> Result<Arc<Presentation>> {
    match a.top_degree() {
        Some(t) => widened(a, n as u32 * t + 2),
        None => Ok(a.clone()),
    }
}

fn theta_for(a: &Arc<Presentation>, model: &ModelSpec, ctx: &Context) -> Result<Option<Morphism>> {
    match model {
        ModelSpec::Itself => Ok(None),
        ModelSpec::Morphism { name } => {
            let t = ctx.morphism(name)?.clone();
            if t.target().generators() != a.generators() {
                return Err(Error::PresentationMismatch);
            }
            Ok(Some(t))
        }
        ModelSpec::Minimal { cap } => {
            let a = widened(a, cap + 1)?;
            Ok(Some(build_minimal_model(&a, *cap)?.comparison))
        }
    }
}

pub fn resolve(subject: &Subject, ctx: &Context) -> Result<Resolved> {
    match subject {
        Subject::Augmentation { algebra } => {
            let a = ample(ctx.algebra(algebra)?, 1)?;
            let gens = (0..a.ngens()).map(|i| a.gen(i)).filter(|g| !g.is_zero()).collect();
            Ok(Resolved {
                map: Some(augmentation(&a)?),
                ideal: IdealKind::Generators(gens),
                pedigree: if a.is_sullivan() {
                    Pedigree::SullivanAugmentation
                } else {
                    Pedigree::None
                },
                homology_top: a.top_degree(),
                source: a,
            })
        }
        Subject::WordLength { algebra, model } => {
            let a = ctx.algebra(algebra)?.clone();
            let (source, top) = match theta_for(&a, model, ctx)? {
                None => {
                    if !a.is_sullivan() {
                        return Err(Error::NotFree(format!(
                            "{}: word-length truncation needs a Sullivan algebra",
                            a.name()
                        )));
                    }
                    (a.clone(), a.top_degree())
                }
                Some(t) => {
                    let top = match model {
                        ModelSpec::Minimal { .. } => a.top_degree(),
                        _ => None,
                    };
                    (t.source().clone(), top)
                }
            };
            if !source.is_sullivan() {
                return Err(Error::NotFree(source.name().to_string()));
            }
            Ok(Resolved {
                source,
                ideal: IdealKind::WordLength,
                map: None,
                pedigree: Pedigree::SullivanAugmentation,
                homology_top: top,
            })
        }
        Subject::Diagonal { algebra, n, model } => {
            let a = ctx.algebra(algebra)?.clone();
            let top = a.top_degree().map(|t| t * *n as u32);
            match theta_for(&a, model, ctx)? {
                None => {
                    let mm = multiplication_model(&ample(&a, *n)?, *n)?;
                    Ok(Resolved {
                        source: mm.tensor,
                        ideal: IdealKind::Generators(mm.kernel_generators),
                        map: Some(mm.mu),
                        pedigree: if a.is_sullivan() {
                            Pedigree::SModel
                        } else {
                            Pedigree::None
                        },
                        homology_top: top,
                    })
                }
                Some(theta) => {
                    let a = theta.target().clone();
                    let hi = a.cap().min(theta.source().cap()).saturating_sub(1);
                    let sm = s_model_for_tc(&a, &theta, *n, hi)?;
                    let top = match model {
                        ModelSpec::Minimal { .. } => top,
                        _ => None,
                    };
                    Ok(Resolved {
                        source: sm.total,
                        ideal: IdealKind::Generators(sm.kernel_generators),
                        map: Some(sm.mu),
                        pedigree: Pedigree::SModel,
                        homology_top: top,
                    })
                }
            }
        }
        Subject::Kernel { morphism } => {
            let phi = ctx.morphism(morphism)?.clone();
            let s = phi.source().clone();
            let ker = kernel_ideal(&phi, s.cap());
            let pedigree = if phi.target().ngens() == 0 && s.is_sullivan() {
                Pedigree::SullivanAugmentation
            } else {
                Pedigree::None
            };
            Ok(Resolved {
                homology_top: s.top_degree(),
                source: s,
                ideal: IdealKind::Generators(ker.generators),
                map: Some(phi),
                pedigree,
            })
        }
    }
}

fn multisets(n: usize, k: usize, start: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == k {
        out.push(prefix.clone());
        return;
    }
    for i in start..n {
        prefix.push(i);
        multisets(n, k, i, prefix, out);
        prefix.pop();
    }
}

impl Resolved {
    /// Nonzero products of `m + 1` ideal generators; empty when the power
    /// vanishes identically. `None` for word-length ideals.
    pub fn power_generators(&self, m: u32) -> Option<Vec<Element>> {
        let IdealKind::Generators(gens) = &self.ideal else {
            return None;
        };
        let mut idx = Vec::new();
        multisets(gens.len(), m as usize + 1, 0, &mut Vec::new(), &mut idx);
        let mut out: Vec<Element> = Vec::new();
        for t in idx {
            let p = self.source.mul_all(t.iter().map(|&i| &gens[i]));
            if !p.is_zero() && !out.contains(&p) {
                out.push(p);
            }
        }
        Some(out)
    }

    /// Whether the `(m+1)`-st power of the ideal is zero in every degree.
    pub fn power_vanishes(&self, m: u32) -> bool {
        match self.power_generators(m) {
            Some(p) => p.is_empty(),
            None => {
                self.source.generators().iter().all(|g| g.is_odd()) && self.source.ngens() <= m as usize
            }
        }
    }

    /// `ρ_m` onto the quotient by the `(m+1)`-st power.
    pub fn rho(&self, m: u32) -> Result<(Arc<Presentation>, Morphism)> {
        match self.power_generators(m) {
            None => truncate_word_length(&self.source, m),
            Some(p) => quotient_named(&self.source, &p, format!("{}/I^{}", self.source.name(), m + 1)),
        }
    }

    pub fn in_power(&self, e: &Element, m: u32) -> Result<bool> {
        if e.is_zero() {
            return Ok(true);
        }
        match self.power_generators(m) {
            None => Ok(e.terms().all(|(mono, _)| mono.word_length() > m)),
            Some(p) => {
                let Some(k) = self.source.degree_of(e)? else {
                    return Ok(true);
                };
                Ok(ideal_span(&self.source, &p, k).contains(&self.source.coords(e, k)))
            }
        }
    }

    /// Whether `e` lies in the ideal itself (`m = 0`) as seen in homology:
    /// its image under the map is a boundary.
    fn maps_to_boundary(&self, e: &Element) -> Result<bool> {
        let Some(phi) = &self.map else {
            return Ok(false);
        };
        let img = phi.apply(e);
        if img.is_zero() {
            return Ok(true);
        }
        let t = phi.target();
        let Some(k) = t.degree_of(&img)? else {
            return Ok(true);
        };
        if k == 0 {
            return Ok(false);
        }
        Ok(t.differential_matrix(k - 1).solve(&t.coords(&img, k)).is_some())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scope", rename_all = "kebab-case")]
pub enum Scope {
    AllDegrees,
    UpToDegree { degree: u32 },
}

impl std::fmt::Display for Scope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scope::AllDegrees => write!(f, "all degrees"),
            Scope::UpToDegree { degree } => write!(f, "verified up to degree {degree}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// A nonzero product of ideal elements (classes when `homology`).
    NilWitness {
        subject: Subject,
        homology: bool,
        factors: Vec<String>,
        product: String,
    },
    /// A nonzero class `z` with `z − dy = ω` in the `(m+1)`-st power.
    RhoNoninjectivityWitness {
        subject: Subject,
        m: u32,
        z: String,
        y: String,
        omega: String,
    },
    RhoInjectivityRange {
        subject: Subject,
        m: u32,
        up_to: u32,
    },
    KernelPowerVanishes {
        subject: Subject,
        m: u32,
    },
    AcyclicIdealContainment {
        subject: Subject,
        m: u32,
        ideal: Vec<String>,
        up_to: u32,
    },
    OddGenerated {
        algebra: String,
        dim: usize,
    },
    ModuleRetraction {
        subject: Subject,
        m: u32,
        up_to: u32,
        values: BTreeMap<String, String>,
    },
    PdCollapse {
        subject: Subject,
        formal_dimension: u32,
    },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::NilWitness { .. } => "nil-witness",
            Certificate::RhoNoninjectivityWitness { .. } => "rho-noninjectivity-witness",
            Certificate::RhoInjectivityRange { .. } => "rho-injectivity-range",
            Certificate::KernelPowerVanishes { .. } => "kernel-power-vanishes",
            Certificate::AcyclicIdealContainment { .. } => "acyclic-ideal-containment",
            Certificate::OddGenerated { .. } => "odd-generated",
            Certificate::ModuleRetraction { .. } => "module-retraction",
            Certificate::PdCollapse { .. } => "pd-collapse",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(s: &str) -> Result<Certificate> {
        serde_json::from_str(s).map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

/// What a valid certificate establishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: String,
    pub statement: String,
    pub scope: Scope,
    /// Set when the claim holds for the given model only.
    pub model_relative: bool,
}

fn reject(msg: impl Into<String>) -> Error {
    Error::CertificateRejected(msg.into())
}

fn parse_in(p: &Presentation, what: &str, s: &str) -> Result<Element> {
    p.parse(s)
        .map_err(|e| reject(format!("{what}: cannot read `{s}` in {}: {e}", p.name())))
}

fn positive_degree(p: &Presentation, what: &str, e: &Element) -> Result<u32> {
    match p.degree_of(e) {
        Ok(Some(k)) if k > 0 => Ok(k),
        _ => Err(reject(format!("{what} = {} is not homogeneous of positive degree", p.format(e)))),
    }
}

/// Whether a homogeneous cycle of `p` is a boundary.
fn is_boundary(p: &Presentation, e: &Element, k: u32) -> bool {
    e.is_zero() || (k > 0 && p.differential_matrix(k - 1).solve(&p.coords(e, k)).is_some())
}

pub fn semifree_for(subject: &Subject, ctx: &Context, cap: u32) -> Result<crate::msecat::SemiFreeModel> {
    let rm = match subject {
        Subject::Kernel { morphism } => RelativeModel::from_inclusion(ctx.morphism(morphism)?)?,
        Subject::Augmentation { algebra } => acyclic_closure(&widened(ctx.algebra(algebra)?, cap + 1)?)?,
        Subject::Diagonal {
            algebra,
            n,
            model: ModelSpec::Itself,
        } => path_fibration_model(&widened(ctx.algebra(algebra)?, cap + 1)?, *n)?,
        _ => return Err(Error::Invalid("no semi-free model for this subject".into())),
    };
    semifree_from_relative(&rm, cap)
}

/// Re-checks a certificate from scratch.
pub fn verify(cert: &Certificate, ctx: &Context) -> Result<Verdict> {
    let verdict = |statement: String, scope: Scope, model_relative: bool| Verdict {
        kind: cert.kind().to_string(),
        statement,
        scope,
        model_relative,
    };
    match cert {
        Certificate::NilWitness {
            subject,
            homology: in_homology,
            factors,
            product,
        } => {
            let r = resolve(subject, ctx)?;
            let p = &r.source;
            if factors.is_empty() {
                return Err(reject("no factors"));
            }
            let mut elems = Vec::new();
            for (i, f) in factors.iter().enumerate() {
                let e = parse_in(p, "factor", f)?;
                let k = positive_degree(p, &format!("factor {}", i + 1), &e)?;
                if *in_homology {
                    let de = p.d(&e);
                    if !de.is_zero() {
                        return Err(reject(format!(
                            "factor {} is not a cycle: d({}) = {} in degree {}",
                            i + 1,
                            p.format(&e),
                            p.format(&de),
                            k + 1
                        )));
                    }
                    if !r.maps_to_boundary(&e)? {
                        return Err(reject(format!(
                            "factor {} = {} is not in the kernel in homology (degree {k})",
                            i + 1,
                            p.format(&e)
                        )));
                    }
                } else if let Some(phi) = &r.map {
                    if !phi.apply(&e).is_zero() {
                        return Err(reject(format!("factor {} = {} is not in the kernel", i + 1, p.format(&e))));
                    }
                }
                elems.push(e);
            }
            let claimed = parse_in(p, "product", product)?;
            let actual = p.mul_all(elems.iter());
            if claimed != actual {
                return Err(reject(format!(
                    "product of factors is {}, certificate says {}",
                    p.format(&actual),
                    p.format(&claimed)
                )));
            }
            let k = positive_degree(p, "product", &actual)?;
            if *in_homology {
                if k + 1 > p.cap() {
                    return Err(reject(format!("product degree {k} is beyond the cap")));
                }
                if is_boundary(p, &actual, k) {
                    return Err(reject(format!("product {} is a boundary in degree {k}", p.format(&actual))));
                }
            }
            let n = factors.len();
            let what = if *in_homology { "nil of the kernel in homology" } else { "nil of the ideal" };
            Ok(verdict(format!("{what} ≥ {n}"), Scope::AllDegrees, false))
        }
        Certificate::RhoNoninjectivityWitness { subject, m, z, y, omega } => {
            let r = resolve(subject, ctx)?;
            let p = &r.source;
            let (z, y, w) = (parse_in(p, "z", z)?, parse_in(p, "y", y)?, parse_in(p, "omega", omega)?);
            let k = positive_degree(p, "z", &z)?;
            let dz = p.d(&z);
            if !dz.is_zero() {
                return Err(reject(format!("z is not a cycle: dz = {} in degree {}", p.format(&dz), k + 1)));
            }
            let lhs = &z - &p.d(&y);
            if lhs != w {
                return Err(reject(format!(
                    "z − dy = {} differs from omega = {} in degree {k}",
                    p.format(&lhs),
                    p.format(&w)
                )));
            }
            if k + 1 > p.cap() {
                return Err(reject(format!("degree {k} is beyond the cap")));
            }
            if is_boundary(p, &z, k) {
                return Err(reject(format!("z = {} is a boundary in degree {k}", p.format(&z))));
            }
            if !r.in_power(&w, *m)? {
                return Err(reject(format!(
                    "omega = {} is not in the power {} of the ideal (degree {k})",
                    p.format(&w),
                    m + 1
                )));
            }
            let relative = r.pedigree == Pedigree::None;
            let statement = if relative {
                format!("H(ρ_{m}) is not injective for this model; no invariant lower bound")
            } else {
                format!("lower bound {}", m + 1)
            };
            Ok(verdict(statement, Scope::AllDegrees, relative))
        }
        Certificate::RhoInjectivityRange { subject, m, up_to } => {
            let r = resolve(subject, ctx)?;
            if up_to + 1 > r.source.cap() {
                return Err(reject(format!("degree {up_to} is beyond the cap {}", r.source.cap())));
            }
            let (_, rho) = r.rho(*m)?;
            let h = induced_map(&rho, 0, *up_to)?;
            if let Some((k, v)) = h.first_kernel() {
                let hs = homology(&r.source, k, k)?;
                return Err(reject(format!(
                    "H(ρ_{m}) kills {} in degree {k}",
                    r.source.format(&hs.class_element(k, &v))
                )));
            }
            let scope = match r.homology_top {
                Some(t) if t <= *up_to => Scope::AllDegrees,
                _ => Scope::UpToDegree { degree: *up_to },
            };
            let relative = r.pedigree == Pedigree::None;
            let statement = if relative {
                format!("H(ρ_{m}) is injective for this model; no invariant upper bound")
            } else {
                format!("upper bound {m}")
            };
            Ok(verdict(statement, scope, relative))
        }
        Certificate::KernelPowerVanishes { subject, m } => {
            let r = resolve(subject, ctx)?;
            if let Some(p) = r.power_generators(*m) {
                if let Some(e) = p.first() {
                    let k = r.source.degree_of(e)?.unwrap_or(0);
                    return Err(reject(format!(
                        "the power {} contains {} in degree {k}",
                        m + 1,
                        r.source.format(e)
                    )));
                }
            } else if !r.power_vanishes(*m) {
                return Err(reject(format!("words of length {} do not vanish", m + 1)));
            }
            Ok(verdict(format!("upper bound {m}"), Scope::AllDegrees, false))
        }
        Certificate::AcyclicIdealContainment {
            subject,
            m,
            ideal,
            up_to,
        } => {
            let r = resolve(subject, ctx)?;
            let p = &r.source;
            let j = ideal
                .iter()
                .map(|s| parse_in(p, "ideal generator", s))
                .collect::<Result<Vec<_>>>()?;
            if !is_acyclic_ideal(p, &j, 0, *up_to).map_err(|e| reject(e.to_string()))? {
                return Err(reject("the ideal is not acyclic in range"));
            }
            let power = r
                .power_generators(*m)
                .ok_or_else(|| reject("containment needs an ideal given by generators"))?;
            for k in 1..=*up_to {
                let span = ideal_span(p, &j, k);
                for g in &power {
                    let Some(dg) = p.degree_of(g)? else { continue };
                    if dg > k {
                        continue;
                    }
                    for b in p.basis_elements(k - dg) {
                        let e = p.mul(&b, g);
                        if !span.contains(&p.coords(&e, k)) {
                            return Err(reject(format!("{} is not in the ideal (degree {k})", p.format(&e))));
                        }
                    }
                }
            }
            Ok(verdict(format!("secat(f₀) ≤ {m}"), Scope::UpToDegree { degree: *up_to }, false))
        }
        Certificate::OddGenerated { algebra, dim } => {
            let a = ctx.algebra(algebra)?;
            if !a.is_minimal() {
                return Err(reject(format!("{algebra} is not a minimal Sullivan algebra")));
            }
            if let Some(g) = a.generators().iter().find(|g| !g.is_odd()) {
                return Err(reject(format!("generator {} has even degree {}", g.name, g.degree)));
            }
            if a.ngens() != *dim {
                return Err(reject(format!("{algebra} has {} generators, not {dim}", a.ngens())));
            }
            Ok(verdict(format!("cat = {dim}"), Scope::AllDegrees, false))
        }
        Certificate::ModuleRetraction {
            subject,
            m,
            up_to,
            values,
        } => {
            let sf = semifree_for(subject, ctx, *up_to)?;
            let g = ganea_semifree(&sf, *m as usize)?;
            let mut parsed = BTreeMap::new();
            for (name, v) in values {
                parsed.insert(name.clone(), parse_in(&g.base, name, v)?);
            }
            if let Err((name, k, defect)) = check_module_retraction(&g, &parsed, *up_to) {
                return Err(reject(format!(
                    "retraction fails on {name}: defect {} in degree {k}",
                    g.base.format(&defect)
                )));
            }
            Ok(verdict(format!("msecat ≤ {m}"), Scope::UpToDegree { degree: *up_to }, false))
        }
        Certificate::PdCollapse {
            subject,
            formal_dimension,
        } => {
            let base = match subject {
                Subject::Augmentation { algebra } | Subject::Diagonal { algebra, .. } => ctx.algebra(algebra)?.clone(),
                Subject::WordLength { .. } => return Err(reject("duality collapse needs a map")),
                Subject::Kernel { morphism } => ctx.morphism(morphism)?.source().clone(),
            };
            let base = widened(&base, formal_dimension + 2)?;
            let h = homology(&base, 0, formal_dimension + 1).map_err(|e| reject(e.to_string()))?;
            let rep = poincare_duality_check(&h, *formal_dimension).map_err(|e| reject(e.to_string()))?;
            if !rep.is_duality {
                let (i, _, _, _) = rep
                    .pairings
                    .iter()
                    .find(|(_, a, b, r)| a != b || r != a)
                    .expect("some pairing degenerates");
                return Err(reject(format!("pairing in degree {i} is degenerate")));
            }
            Ok(verdict("msecat = Hsecat".into(), Scope::AllDegrees, false))
        }
    }
}
