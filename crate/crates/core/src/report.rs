//! Deterministic text and JSON renderings of command results.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::Presentation;
use crate::certificate::{Certificate, Scope, Subject, Verdict};
use crate::error::Result;
use crate::homology::homology;
use crate::ideal::nil_homology;
use crate::invariants::{ChainReport, InvariantBound};
use crate::sullivan::{Provenance, SullivanModel};

pub const SCHEMA: &str = "cdga-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomologySummary {
    pub algebra: String,
    pub cap: u32,
    pub range: (u32, u32),
    /// `(degree, betti number, class representatives)` for nonzero degrees.
    pub degrees: Vec<(u32, usize, Vec<String>)>,
    pub nil: u32,
}

pub fn homology_summary(p: &Arc<Presentation>, lo: u32, hi: u32) -> Result<HomologySummary> {
    let h = homology(p, lo, hi)?;
    let degrees = (lo..=hi)
        .filter(|&k| h.betti(k) > 0)
        .map(|k| {
            let reps = h.representatives(k).iter().map(|e| p.format(e)).collect();
            (k, h.betti(k), reps)
        })
        .collect();
    Ok(HomologySummary {
        algebra: p.name().to_string(),
        cap: p.cap(),
        range: (lo, hi),
        degrees,
        nil: nil_homology(&h).value as u32,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelGenerator {
    pub name: String,
    pub degree: u32,
    pub d: String,
    pub image: String,
    pub provenance: Option<Provenance>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub algebra: String,
    pub cap: u32,
    pub verified_up_to: u32,
    pub minimal: bool,
    pub generators: Vec<ModelGenerator>,
}

pub fn model_summary(a: &Presentation, m: &SullivanModel) -> ModelSummary {
    let p = &m.model;
    let generators = p
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| ModelGenerator {
            name: g.name.clone(),
            degree: g.degree,
            d: p.format(p.differential_of(i)),
            image: a.format(m.comparison.image_of(i)),
            provenance: m.provenance.iter().find(|(n, _, _)| *n == g.name).map(|t| t.2),
        })
        .collect();
    ModelSummary {
        algebra: a.name().to_string(),
        cap: m.verified_up_to,
        verified_up_to: m.verified_up_to,
        minimal: m.minimal,
        generators,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Body {
    Homology(HomologySummary),
    MinimalModel(ModelSummary),
    Bounds(ChainReport),
    Verdict { certificate: String, verdict: Verdict },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub body: Body,
}

impl Report {
    pub fn new(command: impl Into<String>, body: Body) -> Report {
        Report {
            schema: SCHEMA.to_string(),
            command: command.into(),
            body,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "$ {}", self.command);
        match &self.body {
            Body::Homology(h) => homology_text(&mut s, h),
            Body::MinimalModel(m) => model_text(&mut s, m),
            Body::Bounds(c) => chain_text(&mut s, c),
            Body::Verdict { certificate, verdict } => {
                let _ = writeln!(s, "certificate {certificate}: VALID");
                let _ = writeln!(s, "  {}", verdict.statement);
                let _ = writeln!(s, "  scope: {}", verdict.scope);
                if verdict.model_relative {
                    let _ = writeln!(s, "  model-relative");
                }
            }
        }
        s
    }
}

fn homology_text(s: &mut String, h: &HomologySummary) {
    let _ = writeln!(s, "homology of {} in degrees {}..{} (cap {})", h.algebra, h.range.0, h.range.1, h.cap);
    for (k, b, reps) in &h.degrees {
        let _ = writeln!(s, "  H^{k}: dim {b}: {}", reps.iter().map(|r| format!("[{r}]")).collect::<Vec<_>>().join(", "));
    }
    let _ = writeln!(s, "  nil H+ = {}", h.nil);
}

fn model_text(s: &mut String, m: &ModelSummary) {
    let kind = if m.minimal { "minimal model" } else { "model" };
    let _ = writeln!(s, "{kind} of {} (cap {}, verified up to degree {})", m.algebra, m.cap, m.verified_up_to);
    for g in &m.generators {
        let prov = match g.provenance {
            Some(Provenance::CokerHit) => "  (new class)",
            Some(Provenance::KerKill) => "  (kills a class)",
            None => "",
        };
        let _ = writeln!(s, "  {} : {}   d = {}   -> {}{prov}", g.name, g.degree, g.d, g.image);
    }
}

fn scope_text(sc: &Scope) -> String {
    match sc {
        Scope::AllDegrees => String::new(),
        Scope::UpToDegree { degree } => format!(" (verified up to degree {degree})"),
    }
}

fn bound_text(s: &mut String, b: &InvariantBound) {
    let range = match (&b.value(), &b.upper) {
        (Some(v), _) => format!("= {v}"),
        (None, Some(u)) => format!("in [{}, {}]{}", b.lower, u.value, scope_text(&u.scope)),
        (None, None) => format!(">= {}", b.lower),
    };
    let _ = writeln!(s, "  {} {range}", b.name);
    for c in &b.lower_certificates {
        let _ = writeln!(s, "    lower: {}", cert_line(c));
    }
    for c in &b.upper_certificates {
        let _ = writeln!(s, "    upper: {}", cert_line(c));
    }
    for c in &b.model_relative {
        let _ = writeln!(s, "    model-relative: {}", cert_line(c));
    }
    for n in &b.notes {
        let _ = writeln!(s, "    note: {n}");
    }
}

fn chain_text(s: &mut String, c: &ChainReport) {
    let _ = writeln!(s, "{} (cap {})", c.subject, c.cap);
    for n in &c.nil {
        let q = if n.exact { "" } else { " (in range)" };
        let _ = writeln!(s, "  {} = {}{q}", n.name, n.value);
        for cert in &n.certificates {
            let _ = writeln!(s, "    {}", cert_line(cert));
        }
    }
    for b in &c.bounds {
        bound_text(s, b);
    }
    for n in &c.notes {
        let _ = writeln!(s, "  note: {n}");
    }
}

fn subject_text(s: &Subject) -> &'static str {
    match s {
        Subject::Augmentation { .. } => "augmentation ideal",
        Subject::WordLength { .. } => "word length",
        Subject::Diagonal { .. } => "diagonal kernel",
        Subject::Kernel { .. } => "morphism kernel",
    }
}

/// One-line summary of a certificate.
pub fn cert_line(c: &Certificate) -> String {
    match c {
        Certificate::NilWitness { factors, product, .. } => {
            format!("nil-witness: ({}) = {product}", factors.join(")("))
        }
        Certificate::RhoNoninjectivityWitness { m, z, y, omega, .. } => {
            format!("rho-noninjectivity-witness m={m}: {omega} = ({z}) - d({y})")
        }
        Certificate::RhoInjectivityRange { m, up_to, .. } => {
            format!("rho-injectivity-range m={m} up to degree {up_to}")
        }
        Certificate::KernelPowerVanishes { subject, m } => {
            format!("kernel-power-vanishes m={m} ({})", subject_text(subject))
        }
        Certificate::AcyclicIdealContainment { m, up_to, .. } => {
            format!("acyclic-ideal-containment m={m} up to degree {up_to}")
        }
        Certificate::OddGenerated { dim, .. } => format!("odd-generated dim={dim}"),
        Certificate::ModuleRetraction { m, up_to, values, .. } => {
            format!("module-retraction m={m} up to degree {up_to} ({} values)", values.len())
        }
        Certificate::PdCollapse { formal_dimension, .. } => {
            format!("pd-collapse formal dimension {formal_dimension}")
        }
    }
}
