//! Browser bindings. Each entry point takes document source text and returns
//! a plain-text report, or a line starting with `error:`.

use wasm_bindgen::prelude::*;

use cdga::document::Document;
use cdga::invariants::{tc_bounds, Options};
use cdga::report::{homology_summary, model_summary, Body, Report};
use cdga::sullivan::build_minimal_model;

fn only_algebra(doc: &Document) -> Result<(String, Option<u32>, u32), String> {
    let mut it = doc.cdgas();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok((c.name.clone(), c.cap, c.default_cap())),
        (None, _) => Err("document declares no cdga".into()),
        _ => Err("the demo takes a document with a single cdga".into()),
    }
}

fn render(r: Result<Report, String>) -> String {
    match r {
        Ok(r) => r.to_text(),
        Err(e) => format!("error: {e}\n"),
    }
}

pub fn homology_report(source: &str, lo: u32, hi: u32) -> Result<Report, String> {
    if lo > hi {
        return Err("empty degree range".into());
    }
    let doc = Document::parse(source).map_err(|e| e.to_string())?;
    let (name, cap, default) = only_algebra(&doc)?;
    let ctx = doc.build(Some(cap.unwrap_or(default).max(hi + 1))).map_err(|e| e.to_string())?;
    let a = ctx.algebra(&name).map_err(|e| e.to_string())?;
    let h = homology_summary(a, lo, hi).map_err(|e| e.to_string())?;
    Ok(Report::new(format!("homology {lo}..{hi}"), Body::Homology(h)))
}

pub fn minimal_model_report(source: &str, cap: u32) -> Result<Report, String> {
    let doc = Document::parse(source).map_err(|e| e.to_string())?;
    let (name, _, _) = only_algebra(&doc)?;
    let ctx = doc.build(Some(cap + 1)).map_err(|e| e.to_string())?;
    let a = ctx.algebra(&name).map_err(|e| e.to_string())?;
    let m = build_minimal_model(a, cap).map_err(|e| e.to_string())?;
    Ok(Report::new(format!("minimal-model --cap {cap}"), Body::MinimalModel(model_summary(a, &m))))
}

pub fn tc_report(source: &str, n: usize, cap: u32) -> Result<Report, String> {
    if n < 2 {
        return Err("n must be at least 2".into());
    }
    let doc = Document::parse(source).map_err(|e| e.to_string())?;
    let (name, _, _) = only_algebra(&doc)?;
    let ctx = doc.build(Some(cap)).map_err(|e| e.to_string())?;
    let opts = Options {
        ganea_limit: 150,
        ..Options::default()
    };
    let chain = tc_bounds(&ctx, &name, n, None, &opts).map_err(|e| e.to_string())?;
    Ok(Report::new(format!("tc --n {n} --cap {cap}"), Body::Bounds(chain)))
}

#[wasm_bindgen]
pub fn homology(source: &str, lo: u32, hi: u32) -> String {
    render(homology_report(source, lo, hi))
}

#[wasm_bindgen]
pub fn minimal_model(source: &str, cap: u32) -> String {
    render(minimal_model_report(source, cap))
}

#[wasm_bindgen]
pub fn tc(source: &str, n: u32, cap: u32) -> String {
    render(tc_report(source, n as usize, cap))
}
