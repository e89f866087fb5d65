//! Text format for workspaces: categories, coefficient algebras, named
//! modules, representations, and morphisms.
//!
//! ```text
//! category { kind = linear relation = d;d field = Q window = -3..3 }
//! rep X { at 0: dim 1 }
//! rep D { at 1: dim 1  at 0: dim 1  arrow d[1] = [[1]] }
//! mor f: D -> X { at 0 = [[1]] }
//! ```
//!
//! Paths compose diagrammatically: `a;b` is "a, then b". Relations are
//! sums of paths with rational coefficients; `except` drops listed anchor
//! positions of a translation-invariant relation. `#` starts a comment.

use crate::error::{Error, Result};
use crate::scalar::FieldSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct Ast {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Category(Vec<CatEntry>),
    AlgebraBlock(Vec<AlgEntry>),
    Module(String, Vec<ModEntry>),
    Rep(String, Vec<RepEntry>),
    Mor { name: String, from: String, to: String, comps: Vec<(RawLabel, RawAMatrix)> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum CatEntry {
    Kind(RawKind),
    Field(FieldSpec),
    Window(i64, i64),
    Relation { sum: RawRelSum, except: Vec<i64> },
    Object(RawLabel),
    Arrow { name: String, src: RawLabel, tgt: RawLabel },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RawKind {
    Linear,
    NLinear(u32),
    Cyclic(u32),
    Za3,
    Finite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawRelSum {
    /// (numerator, denominator, path of arrow scheme names).
    pub terms: Vec<(i64, i64, Vec<String>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlgEntry {
    Field,
    Vertex(String),
    Arrow { name: String, src: String, tgt: String },
    Relation(RawRelSum),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModEntry {
    /// `dim v = 2` (vertex name omitted on a field algebra: `dim = 2`).
    Dim(Option<String>, usize),
    Arrow(String, RawMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RepEntry {
    At(RawLabel, ValSpec),
    Arrow(ArrowRef, RawAMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ValSpec {
    Dim(usize),
    Free(usize),
    Module(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrowRef {
    pub name: String,
    pub anchor: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RawLabel {
    Int(i64),
    Name(String),
}

impl std::fmt::Display for RawLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RawLabel::Int(n) => write!(f, "{n}"),
            RawLabel::Name(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawMatrix {
    pub rows: Vec<Vec<(i64, i64)>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawAMatrix {
    Plain(RawMatrix),
    Blocks(Vec<(String, RawMatrix)>),
}

// --- lexer -------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TokKind {
    Ident,
    Int,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Eq,
    Colon,
    Semi,
    Arrow,
    DotDot,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

#[derive(Clone, Debug)]
struct Tok {
    kind: TokKind,
    text: String,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0usize;
    let err = |line: usize, col: usize, msg: String| Error::Parse { line, col, msg };
    while i < bytes.len() {
        let c = bytes[i];
        let (l0, c0) = (line, col);
        let mut push = |kind: TokKind, text: &str| {
            toks.push(Tok { kind, text: text.to_string(), line: l0, col: c0 });
        };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '#' => {
                while i < bytes.len() && bytes[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '{' => push(TokKind::LBrace, "{"),
            '}' => push(TokKind::RBrace, "}"),
            '(' => push(TokKind::LParen, "("),
            ')' => push(TokKind::RParen, ")"),
            '[' => push(TokKind::LBrack, "["),
            ']' => push(TokKind::RBrack, "]"),
            '=' => push(TokKind::Eq, "="),
            ':' => push(TokKind::Colon, ":"),
            ';' => push(TokKind::Semi, ";"),
            ',' => push(TokKind::Comma, ","),
            '+' => push(TokKind::Plus, "+"),
            '*' => push(TokKind::Star, "*"),
            '/' => push(TokKind::Slash, "/"),
            '.' => {
                if i + 1 < bytes.len() && bytes[i + 1] == '.' {
                    push(TokKind::DotDot, "..");
                    i += 1;
                    col += 1;
                } else {
                    return Err(err(line, col, "unexpected '.'".into()));
                }
            }
            '-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == '>' {
                    push(TokKind::Arrow, "->");
                    i += 1;
                    col += 1;
                } else if i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    let mut j = i + 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    let text: String = bytes[i..j].iter().collect();
                    push(TokKind::Int, &text);
                    col += j - i - 1;
                    i = j - 1;
                } else {
                    push(TokKind::Minus, "-");
                }
            }
            _ if c.is_ascii_digit() => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let text: String = bytes[i..j].iter().collect();
                push(TokKind::Int, &text);
                col += j - i - 1;
                i = j - 1;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == '_') {
                    j += 1;
                }
                let text: String = bytes[i..j].iter().collect();
                push(TokKind::Ident, &text);
                col += j - i - 1;
                i = j - 1;
            }
            _ => return Err(err(line, col, format!("unexpected character {c:?}"))),
        }
        i += 1;
        col += 1;
    }
    toks.push(Tok { kind: TokKind::Eof, text: String::new(), line, col });
    Ok(toks)
}

// --- parser ------------------------------------------------------------------

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Parse { line: t.line, col: t.col, msg: msg.into() })
    }

    fn expect(&mut self, kind: TokKind, what: &str) -> Result<Tok> {
        if self.peek().kind == kind {
            Ok(self.next())
        } else {
            self.err(format!("expected {what}, found {:?}", self.peek().text))
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.peek().kind == TokKind::Ident && self.peek().text == kw {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.err(format!("expected keyword {kw:?}, found {:?}", self.peek().text))
        }
    }

    fn int(&mut self) -> Result<i64> {
        let t = self.expect(TokKind::Int, "an integer")?;
        t.text.parse().map_err(|_| Error::Parse {
            line: t.line,
            col: t.col,
            msg: format!("bad integer {:?}", t.text),
        })
    }

    fn ident(&mut self) -> Result<String> {
        Ok(self.expect(TokKind::Ident, "an identifier")?.text)
    }

    fn label(&mut self) -> Result<RawLabel> {
        match self.peek().kind {
            TokKind::Int => Ok(RawLabel::Int(self.int()?)),
            TokKind::Ident => Ok(RawLabel::Name(self.ident()?)),
            _ => self.err("expected an object label (integer or name)"),
        }
    }

    fn workspace(&mut self) -> Result<Ast> {
        let mut items = Vec::new();
        loop {
            match self.peek().kind {
                TokKind::Eof => break,
                TokKind::Ident => {
                    let kw = self.peek().text.clone();
                    match kw.as_str() {
                        "category" => {
                            self.next();
                            items.push(Item::Category(self.category_block()?));
                        }
                        "algebra" => {
                            self.next();
                            items.push(Item::AlgebraBlock(self.algebra_block()?));
                        }
                        "module" => {
                            self.next();
                            let name = self.ident()?;
                            items.push(Item::Module(name, self.module_block()?));
                        }
                        "rep" => {
                            self.next();
                            let name = self.ident()?;
                            items.push(Item::Rep(name, self.rep_block()?));
                        }
                        "mor" => {
                            self.next();
                            items.push(self.mor_item()?);
                        }
                        _ => {
                            return self.err(format!(
                                "expected one of category, algebra, module, rep, mor; found {kw:?}"
                            ))
                        }
                    }
                }
                _ => return self.err("expected a top-level block"),
            }
        }
        Ok(Ast { items })
    }

    fn category_block(&mut self) -> Result<Vec<CatEntry>> {
        self.expect(TokKind::LBrace, "'{'")?;
        let mut out = Vec::new();
        while self.peek().kind != TokKind::RBrace {
            let kw = self.ident()?;
            match kw.as_str() {
                "kind" => {
                    self.expect(TokKind::Eq, "'='")?;
                    out.push(CatEntry::Kind(self.kind_spec()?));
                }
                "field" => {
                    self.expect(TokKind::Eq, "'='")?;
                    out.push(CatEntry::Field(self.field_spec()?));
                }
                "window" => {
                    self.expect(TokKind::Eq, "'='")?;
                    let lo = self.int()?;
                    self.expect(TokKind::DotDot, "'..'")?;
                    let hi = self.int()?;
                    out.push(CatEntry::Window(lo, hi));
                }
                "relation" => {
                    self.expect(TokKind::Eq, "'='")?;
                    let sum = self.rel_sum()?;
                    let mut except = Vec::new();
                    if self.eat_kw("except") {
                        except.push(self.int()?);
                        while self.peek().kind == TokKind::Comma {
                            self.next();
                            except.push(self.int()?);
                        }
                    }
                    out.push(CatEntry::Relation { sum, except });
                }
                "object" => out.push(CatEntry::Object(self.label()?)),
                "arrow" => {
                    let name = self.ident()?;
                    self.expect(TokKind::Colon, "':'")?;
                    let src = self.label()?;
                    self.expect(TokKind::Arrow, "'->'")?;
                    let tgt = self.label()?;
                    out.push(CatEntry::Arrow { name, src, tgt });
                }
                _ => return self.err(format!("unknown category entry {kw:?}")),
            }
        }
        self.next();
        Ok(out)
    }

    fn kind_spec(&mut self) -> Result<RawKind> {
        let kw = self.ident()?;
        match kw.as_str() {
            "linear" => Ok(RawKind::Linear),
            "za3" => Ok(RawKind::Za3),
            "finite" => Ok(RawKind::Finite),
            "nlinear" => {
                self.expect(TokKind::LParen, "'('")?;
                self.expect_kw("N")?;
                self.expect(TokKind::Eq, "'='")?;
                let n = self.int()?;
                self.expect(TokKind::RParen, "')'")?;
                Ok(RawKind::NLinear(n as u32))
            }
            "cyclic" => {
                self.expect(TokKind::LParen, "'('")?;
                self.expect_kw("m")?;
                self.expect(TokKind::Eq, "'='")?;
                let m = self.int()?;
                self.expect(TokKind::RParen, "')'")?;
                Ok(RawKind::Cyclic(m as u32))
            }
            _ => self.err(format!("unknown kind {kw:?}")),
        }
    }

    fn field_spec(&mut self) -> Result<FieldSpec> {
        let kw = self.ident()?;
        match kw.as_str() {
            "Q" => Ok(FieldSpec::Q),
            "Fp" => {
                self.expect(TokKind::LParen, "'('")?;
                let p = self.int()?;
                self.expect(TokKind::RParen, "')'")?;
                Ok(FieldSpec::Fp(p as u64))
            }
            _ => self.err(format!("unknown field {kw:?} (expected Q or Fp(p))")),
        }
    }

    fn rel_sum(&mut self) -> Result<RawRelSum> {
        let mut terms = Vec::new();
        let mut sign = 1i64;
        loop {
            let (mut num, mut den) = (sign, 1i64);
            if self.peek().kind == TokKind::Int {
                num = sign * self.int()?;
                if self.peek().kind == TokKind::Slash {
                    self.next();
                    den = self.int()?;
                }
                self.expect(TokKind::Star, "'*' after a coefficient")?;
            }
            let mut path = vec![self.ident()?];
            while self.peek().kind == TokKind::Semi {
                self.next();
                path.push(self.ident()?);
            }
            terms.push((num, den, path));
            match self.peek().kind {
                TokKind::Plus => {
                    self.next();
                    sign = 1;
                }
                TokKind::Minus => {
                    self.next();
                    sign = -1;
                }
                _ => break,
            }
        }
        Ok(RawRelSum { terms })
    }

    fn algebra_block(&mut self) -> Result<Vec<AlgEntry>> {
        self.expect(TokKind::LBrace, "'{'")?;
        let mut out = Vec::new();
        while self.peek().kind != TokKind::RBrace {
            let kw = self.ident()?;
            match kw.as_str() {
                "field" => out.push(AlgEntry::Field),
                "vertex" => out.push(AlgEntry::Vertex(self.ident()?)),
                "arrow" => {
                    let name = self.ident()?;
                    self.expect(TokKind::Colon, "':'")?;
                    let src = self.ident()?;
                    self.expect(TokKind::Arrow, "'->'")?;
                    let tgt = self.ident()?;
                    out.push(AlgEntry::Arrow { name, src, tgt });
                }
                "relation" => {
                    self.expect(TokKind::Eq, "'='")?;
                    out.push(AlgEntry::Relation(self.rel_sum()?));
                }
                _ => return self.err(format!("unknown algebra entry {kw:?}")),
            }
        }
        self.next();
        Ok(out)
    }

    fn module_block(&mut self) -> Result<Vec<ModEntry>> {
        self.expect(TokKind::LBrace, "'{'")?;
        let mut out = Vec::new();
        while self.peek().kind != TokKind::RBrace {
            let kw = self.ident()?;
            match kw.as_str() {
                "dim" => {
                    if self.peek().kind == TokKind::Eq {
                        self.next();
                        out.push(ModEntry::Dim(None, self.int()? as usize));
                    } else {
                        let v = self.ident()?;
                        self.expect(TokKind::Eq, "'='")?;
                        out.push(ModEntry::Dim(Some(v), self.int()? as usize));
                    }
                }
                "arrow" => {
                    let name = self.ident()?;
                    self.expect(TokKind::Eq, "'='")?;
                    out.push(ModEntry::Arrow(name, self.matrix()?));
                }
                _ => return self.err(format!("unknown module entry {kw:?}")),
            }
        }
        self.next();
        Ok(out)
    }

    fn rep_block(&mut self) -> Result<Vec<RepEntry>> {
        self.expect(TokKind::LBrace, "'{'")?;
        let mut out = Vec::new();
        while self.peek().kind != TokKind::RBrace {
            let kw = self.ident()?;
            match kw.as_str() {
                "at" => {
                    let l = self.label()?;
                    self.expect(TokKind::Colon, "':'")?;
                    let spec = match self.ident()?.as_str() {
                        "dim" => ValSpec::Dim(self.int()? as usize),
                        "free" => ValSpec::Free(self.int()? as usize),
                        "module" => ValSpec::Module(self.ident()?),
                        other => return self.err(format!("unknown value spec {other:?}")),
                    };
                    out.push(RepEntry::At(l, spec));
                }
                "arrow" => {
                    let r = self.arrow_ref()?;
                    self.expect(TokKind::Eq, "'='")?;
                    out.push(RepEntry::Arrow(r, self.amatrix()?));
                }
                _ => return self.err(format!("unknown rep entry {kw:?}")),
            }
        }
        self.next();
        Ok(out)
    }

    fn arrow_ref(&mut self) -> Result<ArrowRef> {
        let name = self.ident()?;
        if self.peek().kind == TokKind::LBrack {
            self.next();
            let anchor = self.int()?;
            self.expect(TokKind::RBrack, "']'")?;
            Ok(ArrowRef { name, anchor: Some(anchor) })
        } else {
            Ok(ArrowRef { name, anchor: None })
        }
    }

    fn mor_item(&mut self) -> Result<Item> {
        let name = self.ident()?;
        self.expect(TokKind::Colon, "':'")?;
        let from = self.ident()?;
        self.expect(TokKind::Arrow, "'->'")?;
        let to = self.ident()?;
        self.expect(TokKind::LBrace, "'{'")?;
        let mut comps = Vec::new();
        while self.peek().kind != TokKind::RBrace {
            self.expect_kw("at")?;
            let l = self.label()?;
            self.expect(TokKind::Eq, "'='")?;
            comps.push((l, self.amatrix()?));
        }
        self.next();
        Ok(Item::Mor { name, from, to, comps })
    }

    fn scalar(&mut self) -> Result<(i64, i64)> {
        let num = self.int()?;
        if self.peek().kind == TokKind::Slash {
            self.next();
            Ok((num, self.int()?))
        } else {
            Ok((num, 1))
        }
    }

    fn matrix(&mut self) -> Result<RawMatrix> {
        self.expect(TokKind::LBrack, "'['")?;
        let mut rows = Vec::new();
        if self.peek().kind == TokKind::RBrack {
            self.next();
            return Ok(RawMatrix { rows });
        }
        loop {
            self.expect(TokKind::LBrack, "'['")?;
            let mut row = Vec::new();
            if self.peek().kind != TokKind::RBrack {
                row.push(self.scalar()?);
                while self.peek().kind == TokKind::Comma {
                    self.next();
                    row.push(self.scalar()?);
                }
            }
            self.expect(TokKind::RBrack, "']'")?;
            rows.push(row);
            if self.peek().kind == TokKind::Comma {
                self.next();
            } else {
                break;
            }
        }
        self.expect(TokKind::RBrack, "']'")?;
        Ok(RawMatrix { rows })
    }

    fn amatrix(&mut self) -> Result<RawAMatrix> {
        if self.peek().kind == TokKind::LBrace {
            self.next();
            let mut blocks = Vec::new();
            while self.peek().kind != TokKind::RBrace {
                let v = self.ident()?;
                self.expect(TokKind::Colon, "':'")?;
                blocks.push((v, self.matrix()?));
                if self.peek().kind == TokKind::Comma {
                    self.next();
                }
            }
            self.next();
            Ok(RawAMatrix::Blocks(blocks))
        } else {
            Ok(RawAMatrix::Plain(self.matrix()?))
        }
    }
}

pub fn parse(src: &str) -> Result<Ast> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    p.workspace()
}

/// Canonical text form; `parse(pretty(a)) == a` for every parsed `a`.
pub fn pretty(ast: &Ast) -> String {
    let mut out = String::new();
    let relsum = |sum: &RawRelSum| -> String {
        let mut s = String::new();
        for (k, (num, den, path)) in sum.terms.iter().enumerate() {
            let mag = num.abs();
            let signed = if k == 0 {
                String::new()
            } else if *num < 0 {
                " - ".into()
            } else {
                " + ".into()
            };
            s.push_str(&signed);
            let shown_num = if k == 0 { *num } else { mag };
            if shown_num != 1 || *den != 1 {
                s.push_str(&format!("{shown_num}"));
                if *den != 1 {
                    s.push_str(&format!("/{den}"));
                }
                s.push_str(" * ");
            }
            s.push_str(&path.join(";"));
        }
        s
    };
    for item in &ast.items {
        match item {
            Item::Category(entries) => {
                out.push_str("category {\n");
                for e in entries {
                    match e {
                        CatEntry::Kind(k) => {
                            let s = match k {
                                RawKind::Linear => "linear".into(),
                                RawKind::NLinear(n) => format!("nlinear(N = {n})"),
                                RawKind::Cyclic(m) => format!("cyclic(m = {m})"),
                                RawKind::Za3 => "za3".into(),
                                RawKind::Finite => "finite".into(),
                            };
                            out.push_str(&format!("  kind = {s}\n"));
                        }
                        CatEntry::Field(f) => {
                            let s = match f {
                                FieldSpec::Q => "Q".into(),
                                FieldSpec::Fp(p) => format!("Fp({p})"),
                            };
                            out.push_str(&format!("  field = {s}\n"));
                        }
                        CatEntry::Window(lo, hi) => out.push_str(&format!("  window = {lo}..{hi}\n")),
                        CatEntry::Relation { sum, except } => {
                            out.push_str(&format!("  relation = {}", relsum(sum)));
                            if !except.is_empty() {
                                let list: Vec<String> = except.iter().map(|e| e.to_string()).collect();
                                out.push_str(&format!(" except {}", list.join(", ")));
                            }
                            out.push('\n');
                        }
                        CatEntry::Object(l) => out.push_str(&format!("  object {l}\n")),
                        CatEntry::Arrow { name, src, tgt } => {
                            out.push_str(&format!("  arrow {name}: {src} -> {tgt}\n"))
                        }
                    }
                }
                out.push_str("}\n");
            }
            Item::AlgebraBlock(entries) => {
                out.push_str("algebra {\n");
                for e in entries {
                    match e {
                        AlgEntry::Field => out.push_str("  field\n"),
                        AlgEntry::Vertex(v) => out.push_str(&format!("  vertex {v}\n")),
                        AlgEntry::Arrow { name, src, tgt } => {
                            out.push_str(&format!("  arrow {name}: {src} -> {tgt}\n"))
                        }
                        AlgEntry::Relation(sum) => out.push_str(&format!("  relation = {}\n", relsum(sum))),
                    }
                }
                out.push_str("}\n");
            }
            Item::Module(name, entries) => {
                out.push_str(&format!("module {name} {{\n"));
                for e in entries {
                    match e {
                        ModEntry::Dim(None, d) => out.push_str(&format!("  dim = {d}\n")),
                        ModEntry::Dim(Some(v), d) => out.push_str(&format!("  dim {v} = {d}\n")),
                        ModEntry::Arrow(a, m) => out.push_str(&format!("  arrow {a} = {}\n", matrix_text(m))),
                    }
                }
                out.push_str("}\n");
            }
            Item::Rep(name, entries) => {
                out.push_str(&format!("rep {name} {{\n"));
                for e in entries {
                    match e {
                        RepEntry::At(l, spec) => {
                            let s = match spec {
                                ValSpec::Dim(d) => format!("dim {d}"),
                                ValSpec::Free(d) => format!("free {d}"),
                                ValSpec::Module(m) => format!("module {m}"),
                            };
                            out.push_str(&format!("  at {l}: {s}\n"));
                        }
                        RepEntry::Arrow(r, m) => {
                            let name = match r.anchor {
                                Some(a) => format!("{}[{a}]", r.name),
                                None => r.name.clone(),
                            };
                            out.push_str(&format!("  arrow {name} = {}\n", amatrix_text(m)));
                        }
                    }
                }
                out.push_str("}\n");
            }
            Item::Mor { name, from, to, comps } => {
                out.push_str(&format!("mor {name}: {from} -> {to} {{\n"));
                for (l, m) in comps {
                    out.push_str(&format!("  at {l} = {}\n", amatrix_text(m)));
                }
                out.push_str("}\n");
            }
        }
    }
    out
}

fn matrix_text(m: &RawMatrix) -> String {
    let rows: Vec<String> = m
        .rows
        .iter()
        .map(|r| {
            let cells: Vec<String> = r
                .iter()
                .map(|(n, d)| if *d == 1 { n.to_string() } else { format!("{n}/{d}") })
                .collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn amatrix_text(m: &RawAMatrix) -> String {
    match m {
        RawAMatrix::Plain(m) => matrix_text(m),
        RawAMatrix::Blocks(bs) => {
            let cells: Vec<String> = bs.iter().map(|(v, m)| format!("{v}: {}", matrix_text(m))).collect();
            format!("{{ {} }}", cells.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_examples() {
        let ast = parse("category { kind = linear relation = d;d }").unwrap();
        assert_eq!(ast.items.len(), 1);
        let Item::Category(entries) = &ast.items[0] else { panic!() };
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0], CatEntry::Kind(RawKind::Linear));

        let ast = parse("category { kind = nlinear(N=3) }").unwrap();
        let Item::Category(entries) = &ast.items[0] else { panic!() };
        assert_eq!(entries[0], CatEntry::Kind(RawKind::NLinear(3)));

        let ast = parse("rep X { at 0: dim 1 }").unwrap();
        let Item::Rep(name, entries) = &ast.items[0] else { panic!() };
        assert_eq!(name, "X");
        assert_eq!(entries[0], RepEntry::At(RawLabel::Int(0), ValSpec::Dim(1)));
    }

    #[test]
    fn parses_relations_with_coefficients_and_except() {
        let ast = parse("category { kind = linear relation = 2 * d;d - 1/3 * d;d except 2, 5 }").unwrap();
        let Item::Category(entries) = &ast.items[0] else { panic!() };
        let CatEntry::Relation { sum, except } = &entries[1] else { panic!() };
        assert_eq!(sum.terms[0], (2, 1, vec!["d".into(), "d".into()]));
        assert_eq!(sum.terms[1], (-1, 3, vec!["d".into(), "d".into()]));
        assert_eq!(except, &vec![2, 5]);
    }

    #[test]
    fn errors_carry_location() {
        let err = parse("category { kind = }").unwrap_err();
        let Error::Parse { line, col, .. } = err else { panic!("{err}") };
        assert_eq!(line, 1);
        assert!(col > 1);
        let err = parse("category {\n  oops = 1\n}").unwrap_err();
        let Error::Parse { line, .. } = err else { panic!("{err}") };
        assert_eq!(line, 2);
    }

    #[test]
    fn morphisms_and_matrices() {
        let src = "mor f: A -> B { at 0 = [[1, -1/2], [0, 3]] at 1 = { v: [[2]] } }";
        let ast = parse(src).unwrap();
        let Item::Mor { comps, .. } = &ast.items[0] else { panic!() };
        let RawAMatrix::Plain(m) = &comps[0].1 else { panic!() };
        assert_eq!(m.rows[0], vec![(1, 1), (-1, 2)]);
        let RawAMatrix::Blocks(bs) = &comps[1].1 else { panic!() };
        assert_eq!(bs[0].0, "v");
    }

    #[test]
    fn pretty_round_trip() {
        let srcs = [
            "category { kind = linear relation = d;d field = Fp(5) window = -3..3 }\nrep X { at 0: dim 1 }",
            "category { kind = za3 }\nalgebra { vertex v arrow x: v -> v relation = x;x }\nmodule M { dim v = 2 arrow x = [[0, 0], [1, 0]] }",
            "category { kind = cyclic(m=3) relation = d;d }\nrep D { at 1: dim 1 at 0: dim 1 arrow d[1] = [[1]] }\nmor f: D -> D { at 0 = [[1]] }",
        ];
        for src in srcs {
            let a = parse(src).unwrap();
            let b = parse(&pretty(&a)).unwrap();
            assert_eq!(a, b, "round trip failed for {src:?}:\n{}", pretty(&a));
        }
    }
}
