//! Source documents: named cdgas and morphisms.
//!
//! ```text
//! cdga S4 { gen a : 4; rel a^2; cap 12; }
//! cdga N { gen a : 3; gen b : 3; gen x : 5; d x = a*b; flag formal; }
//! morphism f : S4 -> N { a -> 0; }
//! ```

use std::fmt;
use std::sync::Arc;

use crate::algebra::{Flags, Presentation, PresentationBuilder};
use crate::certificate::Context;
use crate::error::{Error, Result};
use crate::expr::{tokenize, Cursor, Expr, Span};
use crate::morphism::Morphism;

#[derive(Clone, Debug, PartialEq)]
pub struct CdgaDecl {
    pub name: String,
    pub span: Span,
    pub gens: Vec<(String, u32, Span)>,
    pub differentials: Vec<(String, Expr, Span)>,
    pub relations: Vec<(Expr, Span)>,
    pub flags: Flags,
    pub cap: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorphismDecl {
    pub name: String,
    pub span: Span,
    pub source: String,
    pub target: String,
    pub images: Vec<(String, Expr, Span)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Cdga(CdgaDecl),
    Morphism(MorphismDecl),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    pub decls: Vec<Decl>,
}

fn at(span: Span, e: Error) -> Error {
    match e {
        Error::Syntax { .. } | Error::Located { .. } => e,
        inner => Error::Located {
            line: span.line,
            column: span.column,
            inner: Box::new(inner),
        },
    }
}

impl CdgaDecl {
    /// Cap used when neither the document nor the caller sets one.
    pub fn default_cap(&self) -> u32 {
        2 * self.gens.iter().map(|g| g.1).max().unwrap_or(0) + 2
    }

    pub fn build(&self, cap: Option<u32>) -> Result<Arc<Presentation>> {
        let cap = cap.or(self.cap).unwrap_or_else(|| self.default_cap());
        let mut b = PresentationBuilder::new(&self.name).cap(cap).flags(self.flags);
        for (g, k, _) in &self.gens {
            b = b.gen(g, *k);
        }
        // Validate names first so errors point at the offending line.
        let free = {
            let mut f = PresentationBuilder::new(&self.name).cap(0).flags(Flags {
                non_simply_connected: true,
                formal: false,
            });
            for (g, k, span) in &self.gens {
                if *k == 0 {
                    return Err(at(
                        *span,
                        Error::InvalidDegree {
                            name: g.clone(),
                            degree: 0,
                        },
                    ));
                }
                f = f.gen(g, *k);
            }
            f.build().map_err(|e| at(self.span, e))?
        };
        for (e, span) in &self.relations {
            free.eval(e).map_err(|err| at(*span, err))?;
            b = b.rel_expr(e.clone());
        }
        for (g, e, span) in &self.differentials {
            free.eval(e).map_err(|err| at(*span, err))?;
            let i = free
                .index_of(g)
                .ok_or_else(|| at(*span, Error::UnknownGenerator(g.clone())))?;
            let want = free.generator(i).degree + 1;
            if let Ok(Some(k)) = free.degree_of(&free.eval(e)?) {
                if k != want {
                    return Err(at(
                        *span,
                        Error::DegreeMismatch {
                            generator: g.clone(),
                            expected: want,
                            found: k,
                        },
                    ));
                }
            }
            b = b.d_expr(g, e.clone());
        }
        b.build().map_err(|e| at(self.span, e))
    }
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let toks = tokenize(text)?;
        let end = Span {
            line: text.lines().count().max(1),
            column: text.lines().last().map_or(1, |l| l.chars().count() + 1),
        };
        let mut c = Cursor::new(&toks, end);
        let mut decls = Vec::new();
        while c.peek().is_some() {
            let span = c.span();
            if c.keyword("cdga") {
                decls.push(Decl::Cdga(parse_cdga(&mut c, span)?));
            } else if c.keyword("morphism") {
                decls.push(Decl::Morphism(parse_morphism(&mut c, span)?));
            } else {
                return c.error("expected `cdga` or `morphism`");
            }
        }
        let doc = Document { decls };
        let mut seen = Vec::new();
        for d in &doc.decls {
            let (name, span) = match d {
                Decl::Cdga(c) => (&c.name, c.span),
                Decl::Morphism(m) => (&m.name, m.span),
            };
            if seen.contains(name) {
                return Err(at(span, Error::Invalid(format!("`{name}` declared twice"))));
            }
            seen.push(name.clone());
        }
        Ok(doc)
    }

    pub fn cdgas(&self) -> impl Iterator<Item = &CdgaDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Cdga(c) => Some(c),
            _ => None,
        })
    }

    pub fn morphisms(&self) -> impl Iterator<Item = &MorphismDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Morphism(m) => Some(m),
            _ => None,
        })
    }

    /// Validated objects. `cap` overrides every declared cap.
    pub fn build(&self, cap: Option<u32>) -> Result<Context> {
        let mut ctx = Context::new();
        for c in self.cdgas() {
            ctx = ctx.with_algebra(&c.build(cap)?);
        }
        for m in self.morphisms() {
            let src = ctx.algebra(&m.source).map_err(|e| at(m.span, e))?.clone();
            let tgt = ctx.algebra(&m.target).map_err(|e| at(m.span, e))?.clone();
            let mut images = vec![crate::algebra::Element::zero(); src.ngens()];
            for (g, e, span) in &m.images {
                let i = src
                    .index_of(g)
                    .ok_or_else(|| at(*span, Error::UnknownGenerator(g.clone())))?;
                images[i] = tgt.eval(e).map_err(|err| at(*span, err))?;
            }
            let phi = Morphism::new(&m.name, src, tgt, images).map_err(|e| at(m.span, e))?;
            ctx = ctx.with_morphism(&phi);
        }
        Ok(ctx)
    }
}

fn parse_cdga(c: &mut Cursor, span: Span) -> Result<CdgaDecl> {
    let (name, _) = c.ident()?;
    let mut d = CdgaDecl {
        name,
        span,
        gens: Vec::new(),
        differentials: Vec::new(),
        relations: Vec::new(),
        flags: Flags::default(),
        cap: None,
    };
    c.expect_sym('{')?;
    while !c.eat_sym('}') {
        let span = c.span();
        if c.keyword("gen") {
            loop {
                let (g, gs) = c.ident()?;
                c.expect_sym(':')?;
                let k = c.small_int()?;
                d.gens.push((g, k, gs));
                if !c.eat_sym(',') {
                    break;
                }
            }
        } else if c.keyword("d") {
            let (g, _) = c.ident()?;
            c.expect_sym('=')?;
            d.differentials.push((g, c.expr()?, span));
        } else if c.keyword("rel") {
            d.relations.push((c.expr()?, span));
        } else if c.keyword("flag") {
            let (f, _) = c.ident()?;
            match f.as_str() {
                "non_simply_connected" => d.flags.non_simply_connected = true,
                "formal" => d.flags.formal = true,
                _ => {
                    return Err(Error::Syntax {
                        line: span.line,
                        column: span.column,
                        message: format!("unknown flag `{f}`"),
                    })
                }
            }
        } else if c.keyword("cap") {
            d.cap = Some(c.small_int()?);
        } else {
            return c.error("expected `gen`, `d`, `rel`, `flag`, `cap` or `}`");
        }
        c.expect_sym(';')?;
    }
    Ok(d)
}

fn parse_morphism(c: &mut Cursor, span: Span) -> Result<MorphismDecl> {
    let (name, _) = c.ident()?;
    c.expect_sym(':')?;
    let (source, _) = c.ident()?;
    if !c.eat_arrow() {
        return c.error("expected `->`");
    }
    let (target, _) = c.ident()?;
    let mut m = MorphismDecl {
        name,
        span,
        source,
        target,
        images: Vec::new(),
    };
    c.expect_sym('{')?;
    while !c.eat_sym('}') {
        let (g, gs) = c.ident()?;
        if !c.eat_arrow() {
            return c.error("expected `->`");
        }
        m.images.push((g, c.expr()?, gs));
        c.expect_sym(';')?;
    }
    Ok(m)
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.decls.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            match d {
                Decl::Cdga(c) => {
                    writeln!(f, "cdga {} {{", c.name)?;
                    for (g, k, _) in &c.gens {
                        writeln!(f, "  gen {g} : {k};")?;
                    }
                    for (g, e, _) in &c.differentials {
                        writeln!(f, "  d {g} = {e};")?;
                    }
                    for (e, _) in &c.relations {
                        writeln!(f, "  rel {e};")?;
                    }
                    if c.flags.non_simply_connected {
                        writeln!(f, "  flag non_simply_connected;")?;
                    }
                    if c.flags.formal {
                        writeln!(f, "  flag formal;")?;
                    }
                    if let Some(k) = c.cap {
                        writeln!(f, "  cap {k};")?;
                    }
                    writeln!(f, "}}")?;
                }
                Decl::Morphism(m) => {
                    writeln!(f, "morphism {} : {} -> {} {{", m.name, m.source, m.target)?;
                    for (g, e, _) in &m.images {
                        writeln!(f, "  {g} -> {e};")?;
                    }
                    writeln!(f, "}}")?;
                }
            }
        }
        Ok(())
    }
}

/// Prints a presentation as a document declaration.
pub fn print_presentation(p: &Presentation) -> String {
    let mut s = format!("cdga {} {{\n", p.name());
    for g in p.generators() {
        s += &format!("  gen {} : {};\n", g.name, g.degree);
    }
    for (i, g) in p.generators().iter().enumerate() {
        let dg = p.differential_of(i);
        if !dg.is_zero() {
            s += &format!("  d {} = {};\n", g.name, p.format(dg));
        }
    }
    for r in p.relations() {
        s += &format!("  rel {};\n", p.format(r));
    }
    let flags = p.flags();
    if flags.non_simply_connected {
        s += "  flag non_simply_connected;\n";
    }
    if flags.formal {
        s += "  flag formal;\n";
    }
    s += &format!("  cap {};\n}}\n", p.cap());
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SL81: &str = "
cdga SL81 {
  gen a : 2;
  gen b : 3;
  gen x : 5;
  d x = a^3;
  rel a^4;
  rel a*b;
  rel a*x;
  cap 12;
}
";

    #[test]
    fn sl81_document() {
        let doc = Document::parse(SL81).unwrap();
        let ctx = doc.build(None).unwrap();
        let p = ctx.algebra("SL81").unwrap();
        assert_eq!(p.relations().len(), 3);
        assert_eq!(p.cap(), 12);
    }

    #[test]
    fn degree_clash_is_located() {
        let err = Document::parse("cdga T {\n  gen a : 3;\n  gen x : 5;\n  d x = a;\n}")
            .unwrap()
            .build(None)
            .unwrap_err();
        match err {
            Error::Located { line, column, inner } => {
                assert_eq!((line, column), (4, 3));
                assert!(matches!(*inner, Error::DegreeMismatch { expected: 6, found: 3, .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = Document::parse("cdga T {\n  gen a 3;\n}").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, column: 9, .. }), "{err:?}");
    }

    #[test]
    fn print_reparse() {
        let src = "cdga A { gen a : 2; cap 10; }\ncdga B { gen a : 2; gen b : 2; gen x : 3; d x = a^2 + b^2; flag formal; }\nmorphism phi : A -> B { a -> a; }";
        let doc = Document::parse(src).unwrap();
        let again = Document::parse(&doc.to_string()).unwrap();
        assert_eq!(doc.to_string(), again.to_string());
        let (c1, c2) = (doc.build(None).unwrap(), again.build(None).unwrap());
        let (b1, b2) = (c1.algebra("B").unwrap(), c2.algebra("B").unwrap());
        assert_eq!(b1.generators(), b2.generators());
        assert_eq!(b1.differentials(), b2.differentials());
        assert_eq!(b1.cap(), 8);
        assert_eq!(c1.morphism("phi").unwrap().images(), c2.morphism("phi").unwrap().images());
    }

    #[test]
    fn printed_presentation_rebuilds() {
        let ctx = Document::parse(SL81).unwrap().build(None).unwrap();
        let p = ctx.algebra("SL81").unwrap();
        let text = print_presentation(p);
        let q = Document::parse(&text).unwrap().build(None).unwrap();
        let q = q.algebra("SL81").unwrap();
        assert_eq!(p.generators(), q.generators());
        assert_eq!(p.differentials(), q.differentials());
        assert_eq!(p.relations(), q.relations());
    }
}
