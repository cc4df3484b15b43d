use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cdga::certificate::{verify, Certificate, ModelSpec};
use cdga::document::Document;
use cdga::invariants::{cat_bounds, secat_bounds, tc_bounds, Options};
use cdga::report::{homology_summary, model_summary, Body, Report};
use cdga::sullivan::build_minimal_model;
use cdga::Error;

#[derive(Parser)]
#[command(name = "cdga", version, about = "Exact cdga computations and rational sectional-category bounds")]
struct Cli {
    /// Print the versioned JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers and class representatives.
    Homology {
        file: PathBuf,
        /// Degree range, e.g. `0..11`.
        #[arg(long, value_parser = parse_range)]
        range: (u32, u32),
        #[arg(long)]
        algebra: Option<String>,
    },
    /// Minimal Sullivan model up to a degree.
    MinimalModel {
        file: PathBuf,
        #[arg(long)]
        cap: u32,
        #[arg(long)]
        algebra: Option<String>,
    },
    /// Bounds for e, mcat and cat(X₀).
    Cat {
        file: PathBuf,
        #[arg(long)]
        cap: Option<u32>,
        #[arg(long)]
        algebra: Option<String>,
        #[command(flatten)]
        search: Search,
    },
    /// Bounds for HTC_n, mTC_n and TC_n(X₀).
    Tc {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        cap: Option<u32>,
        #[arg(long)]
        algebra: Option<String>,
        /// `itself`, `minimal`, or the name of a quasi-isomorphism onto the algebra.
        #[arg(long)]
        model: Option<String>,
        #[command(flatten)]
        search: Search,
    },
    /// Bounds for Hsecat, msecat and secat(f₀) of a morphism.
    Secat {
        file: PathBuf,
        #[arg(long)]
        cap: Option<u32>,
        #[arg(long)]
        morphism: Option<String>,
        #[command(flatten)]
        search: Search,
    },
    /// Re-check a certificate against a document.
    VerifyCert {
        cert: PathBuf,
        #[arg(long)]
        against: PathBuf,
        #[arg(long)]
        cap: Option<u32>,
    },
}

#[derive(clap::Args)]
struct Search {
    /// Largest m tried.
    #[arg(long, default_value_t = 6)]
    max_m: u32,
    /// Skip the Ganea module-retraction route.
    #[arg(long)]
    no_ganea: bool,
    /// Largest Ganea model (module generators) attempted.
    #[arg(long, default_value_t = 400)]
    ganea_limit: usize,
}

impl Search {
    fn options(&self) -> Options {
        Options {
            max_m: self.max_m,
            ganea: !self.no_ganea,
            ganea_limit: self.ganea_limit,
        }
    }
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo = a.trim().parse::<u32>().map_err(|e| e.to_string())?;
    let hi = b.trim().parse::<u32>().map_err(|e| e.to_string())?;
    if lo > hi {
        return Err("empty range".into());
    }
    Ok((lo, hi))
}

enum Failure {
    Input(String),
    Rejected(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CertificateRejected(_) => Failure::Rejected(e.to_string()),
            Error::SignCheckFailed(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Document, Failure> {
    let text = read(path)?;
    Document::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn pick<'a>(names: Vec<&'a str>, wanted: &Option<String>, what: &str) -> Result<String, Failure> {
    match wanted {
        Some(w) if names.contains(&w.as_str()) => Ok(w.clone()),
        Some(w) => Err(Failure::Input(format!("no {what} named `{w}`"))),
        None if names.len() == 1 => Ok(names[0].to_string()),
        None if names.is_empty() => Err(Failure::Input(format!("document declares no {what}"))),
        None => Err(Failure::Input(format!(
            "document declares several {what}s ({}); choose one with --{what}",
            names.join(", ")
        ))),
    }
}

fn algebra_cap(doc: &Document, name: &str, cap: Option<u32>) -> u32 {
    let decl = doc.cdgas().find(|c| c.name == name).expect("picked from the document");
    cap.or(decl.cap).unwrap_or_else(|| decl.default_cap())
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let line = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let command = format!("cdga {line}");
    let body = match &cli.command {
        Command::Homology { file, range, algebra } => {
            let doc = load(file)?;
            let name = pick(doc.cdgas().map(|c| c.name.as_str()).collect(), algebra, "algebra")?;
            let cap = algebra_cap(&doc, &name, None).max(range.1 + 1);
            let ctx = doc.build(Some(cap))?;
            Body::Homology(homology_summary(ctx.algebra(&name)?, range.0, range.1)?)
        }
        Command::MinimalModel { file, cap, algebra } => {
            let doc = load(file)?;
            let name = pick(doc.cdgas().map(|c| c.name.as_str()).collect(), algebra, "algebra")?;
            let ctx = doc.build(Some(cap + 1))?;
            let a = ctx.algebra(&name)?;
            let m = build_minimal_model(a, *cap)?;
            Body::MinimalModel(model_summary(a, &m))
        }
        Command::Cat {
            file,
            cap,
            algebra,
            search,
        } => {
            let doc = load(file)?;
            let name = pick(doc.cdgas().map(|c| c.name.as_str()).collect(), algebra, "algebra")?;
            let ctx = doc.build(Some(algebra_cap(&doc, &name, *cap)))?;
            Body::Bounds(cat_bounds(&ctx, &name, &search.options())?)
        }
        Command::Tc {
            file,
            n,
            cap,
            algebra,
            model,
            search,
        } => {
            let doc = load(file)?;
            let name = pick(doc.cdgas().map(|c| c.name.as_str()).collect(), algebra, "algebra")?;
            let cap = algebra_cap(&doc, &name, *cap);
            let ctx = doc.build(Some(cap))?;
            let spec = match model.as_deref() {
                None => None,
                Some("itself") => Some(ModelSpec::Itself),
                Some("minimal") => Some(ModelSpec::Minimal { cap: cap - 1 }),
                Some(m) => Some(ModelSpec::Morphism { name: m.to_string() }),
            };
            Body::Bounds(tc_bounds(&ctx, &name, *n, spec, &search.options())?)
        }
        Command::Secat {
            file,
            cap,
            morphism,
            search,
        } => {
            let doc = load(file)?;
            let name = pick(doc.morphisms().map(|m| m.name.as_str()).collect(), morphism, "morphism")?;
            let ctx = doc.build(*cap)?;
            Body::Bounds(secat_bounds(&ctx, &name, &search.options())?)
        }
        Command::VerifyCert { cert, against, cap } => {
            let text = read(cert)?;
            let c = Certificate::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", cert.display())))?;
            let ctx = load(against)?.build(*cap)?;
            let verdict = verify(&c, &ctx)?;
            Body::Verdict {
                certificate: c.kind().to_string(),
                verdict,
            }
        }
    };
    Ok(Report::new(command, body))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            let out = if cli.json { r.to_json() + "\n" } else { r.to_text() };
            let _ = std::io::stdout().lock().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Rejected(m)) => {
            eprintln!("{m}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(1)
        }
    }
}
