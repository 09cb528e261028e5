//! Line-oriented knowledge-base format.
//!
//! ```text
//! species <id> [extant|extinct]
//! related <species-id> <species-id>
//! structure <id> category <organism-part|whole-organism|artifact|other> [in <species-id>] [name "<text>"]
//! realizable <id> [name "<text>"]
//! process <id> [name "<text>"]
//! realizes <realizable-id> <process-id>
//! bears <structure-id> <realizable-id> [prevalence <decimal in [0,1]>]
//! designed <structure-id> for <process-id>
//! homolog <structure-id> <structure-id>
//! asserted_function <structure-id> <realizable-id>
//! ```
//!
//! `#` starts a comment outside quoted text. Quoted text may escape `"` and
//! `\` with a backslash.

use std::fmt::Write as _;

use thiserror::Error;

use crate::kb::{build_kb, Category, KbError, KnowledgeBase, Record};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {reason}")]
pub struct SyntaxError {
    pub line: usize,
    pub reason: String,
}

/// A validation failure traced back to the first line mentioning the
/// offending id, when there is one.
#[derive(Debug, Error, Clone, PartialEq)]
pub struct LocatedKbError {
    pub line: Option<usize>,
    #[source]
    pub error: KbError,
}

impl std::fmt::Display for LocatedKbError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocatedRecord {
    pub line: usize,
    pub record: Record,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NativeDocument {
    pub records: Vec<LocatedRecord>,
}

impl NativeDocument {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records.into_iter().map(|r| r.record).collect()
    }

    pub fn build(&self) -> Result<KnowledgeBase, LocatedKbError> {
        build_kb(self.records.iter().map(|r| r.record.clone())).map_err(|error| {
            let subject = error.subject();
            let line = self
                .records
                .iter()
                .find(|r| r.record.mentions(subject))
                .map(|r| r.line);
            LocatedKbError { line, error }
        })
    }
}

#[derive(Debug, PartialEq)]
enum Token {
    Word(String),
    Quoted(String),
}

fn tokenize(line: &str) -> Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            break;
        } else if c == '"' {
            chars.next();
            let mut text = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some('\\') => match chars.next() {
                        Some(e @ ('"' | '\\')) => text.push(e),
                        Some(e) => return Err(format!("unknown escape `\\{e}`")),
                        None => return Err("unterminated string".into()),
                    },
                    Some(other) => text.push(other),
                    None => return Err("unterminated string".into()),
                }
            }
            tokens.push(Token::Quoted(text));
        } else {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() || c == '"' || c == '#' {
                    break;
                }
                word.push(c);
                chars.next();
            }
            tokens.push(Token::Word(word));
        }
    }
    Ok(tokens)
}

struct Cursor {
    tokens: std::vec::IntoIter<Token>,
}

impl Cursor {
    fn ident(&mut self, what: &str) -> Result<String, String> {
        match self.tokens.next() {
            Some(Token::Word(w)) => Ok(w),
            Some(Token::Quoted(_)) => Err(format!("expected {what}, found quoted text")),
            None => Err(format!("missing {what}")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), String> {
        match self.tokens.next() {
            Some(Token::Word(w)) if w == kw => Ok(()),
            Some(Token::Word(w)) => Err(format!("expected `{kw}`, found `{w}`")),
            Some(Token::Quoted(_)) => Err(format!("expected `{kw}`, found quoted text")),
            None => Err(format!("missing `{kw}`")),
        }
    }

    fn text(&mut self) -> Result<String, String> {
        match self.tokens.next() {
            Some(Token::Quoted(t)) => Ok(t),
            _ => Err("expected quoted name".into()),
        }
    }

    fn next_word(&mut self) -> Result<Option<String>, String> {
        match self.tokens.next() {
            Some(Token::Word(w)) => Ok(Some(w)),
            Some(Token::Quoted(_)) => Err("unexpected quoted text".into()),
            None => Ok(None),
        }
    }

    fn end(&mut self) -> Result<(), String> {
        match self.tokens.next() {
            None => Ok(()),
            Some(Token::Word(w)) => Err(format!("unexpected trailing `{w}`")),
            Some(Token::Quoted(_)) => Err("unexpected trailing quoted text".into()),
        }
    }

    /// Trailing `name "<text>"`, if present.
    fn optional_name(&mut self) -> Result<Option<String>, String> {
        match self.next_word()? {
            None => Ok(None),
            Some(w) if w == "name" => {
                let name = self.text()?;
                self.end()?;
                Ok(Some(name))
            }
            Some(w) => Err(format!("unexpected `{w}`")),
        }
    }
}

fn parse_fraction(text: &str) -> Result<f64, String> {
    let value: f64 = text
        .parse()
        .map_err(|_| format!("malformed fraction `{text}`"))?;
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(format!("fraction `{text}` outside [0, 1]"));
    }
    Ok(value)
}

fn parse_record(tokens: Vec<Token>) -> Result<Record, String> {
    let mut cur = Cursor {
        tokens: tokens.into_iter(),
    };
    let keyword = cur.ident("keyword")?;
    let record = match keyword.as_str() {
        "species" => {
            let id = cur.ident("species id")?;
            let extant = match cur.next_word()?.as_deref() {
                None | Some("extant") => true,
                Some("extinct") => false,
                Some(other) => return Err(format!("expected extant or extinct, found `{other}`")),
            };
            cur.end()?;
            Record::Species { id, extant }
        }
        "related" => {
            let a = cur.ident("species id")?;
            let b = cur.ident("species id")?;
            cur.end()?;
            Record::Related { a, b }
        }
        "structure" => {
            let id = cur.ident("structure id")?;
            cur.keyword("category")?;
            let category: Category = cur.ident("category")?.parse()?;
            let mut species = None;
            let mut name = None;
            while let Some(w) = cur.next_word()? {
                match w.as_str() {
                    "in" if species.is_none() && name.is_none() => {
                        species = Some(cur.ident("species id")?)
                    }
                    "name" if name.is_none() => name = Some(cur.text()?),
                    other => return Err(format!("unexpected `{other}`")),
                }
            }
            Record::Structure {
                id,
                category,
                species,
                name,
            }
        }
        "realizable" => {
            let id = cur.ident("realizable id")?;
            let name = cur.optional_name()?;
            Record::Realizable { id, name }
        }
        "process" => {
            let id = cur.ident("process id")?;
            let name = cur.optional_name()?;
            Record::Process { id, name }
        }
        "realizes" => {
            let realizable = cur.ident("realizable id")?;
            let process = cur.ident("process id")?;
            cur.end()?;
            Record::Realizes {
                realizable,
                process,
            }
        }
        "bears" => {
            let structure = cur.ident("structure id")?;
            let realizable = cur.ident("realizable id")?;
            let prevalence = match cur.next_word()?.as_deref() {
                None => None,
                Some("prevalence") => Some(parse_fraction(&cur.ident("fraction")?)?),
                Some(other) => return Err(format!("expected `prevalence`, found `{other}`")),
            };
            cur.end()?;
            Record::Bears {
                structure,
                realizable,
                prevalence,
            }
        }
        "designed" => {
            let structure = cur.ident("structure id")?;
            cur.keyword("for")?;
            let process = cur.ident("process id")?;
            cur.end()?;
            Record::Designed { structure, process }
        }
        "homolog" => {
            let left = cur.ident("structure id")?;
            let right = cur.ident("structure id")?;
            cur.end()?;
            Record::Homolog { left, right }
        }
        "asserted_function" => {
            let structure = cur.ident("structure id")?;
            let realizable = cur.ident("realizable id")?;
            cur.end()?;
            Record::AssertedFunction {
                structure,
                realizable,
            }
        }
        other => return Err(format!("unknown keyword `{other}`")),
    };
    Ok(record)
}

pub fn parse_native(text: &str) -> Result<NativeDocument, SyntaxError> {
    let mut records = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens = tokenize(raw).map_err(|reason| SyntaxError { line, reason })?;
        if tokens.is_empty() {
            continue;
        }
        let record = parse_record(tokens).map_err(|reason| SyntaxError { line, reason })?;
        records.push(LocatedRecord { line, record });
    }
    Ok(NativeDocument { records })
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Canonical text for a knowledge base: records grouped by kind in grammar
/// order, each group sorted by ids.
pub fn serialize_native(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for s in kb.species() {
        let status = if s.extant { "extant" } else { "extinct" };
        writeln!(out, "species {} {status}", s.id).unwrap();
    }
    for &(a, b) in kb.relatedness() {
        writeln!(
            out,
            "related {} {}",
            kb.species_at(a).id,
            kb.species_at(b).id
        )
        .unwrap();
    }
    for s in kb.structures() {
        write!(out, "structure {} category {}", s.id, s.category).unwrap();
        if let Some(sp) = s.species {
            write!(out, " in {}", kb.species_at(sp).id).unwrap();
        }
        if s.name != s.id {
            write!(out, " name {}", quote(&s.name)).unwrap();
        }
        out.push('\n');
    }
    for r in kb.realizables() {
        write!(out, "realizable {}", r.id).unwrap();
        if r.name != r.id {
            write!(out, " name {}", quote(&r.name)).unwrap();
        }
        out.push('\n');
    }
    for p in kb.processes() {
        write!(out, "process {}", p.id).unwrap();
        if p.name != p.id {
            write!(out, " name {}", quote(&p.name)).unwrap();
        }
        out.push('\n');
    }
    for (r, p) in kb.realization_links() {
        writeln!(out, "realizes {} {}", kb.realizable(r).id, kb.process(p).id).unwrap();
    }
    for b in kb.bearings() {
        write!(
            out,
            "bears {} {}",
            kb.structure(b.structure).id,
            kb.realizable(b.realizable).id
        )
        .unwrap();
        if let Some(p) = b.prevalence {
            write!(out, " prevalence {p}").unwrap();
        }
        out.push('\n');
    }
    for d in kb.designs() {
        writeln!(
            out,
            "designed {} for {}",
            kb.structure(d.designee).id,
            kb.process(d.purpose).id
        )
        .unwrap();
    }
    for &(l, r) in kb.homologies() {
        writeln!(out, "homolog {} {}", kb.structure(l).id, kb.structure(r).id).unwrap();
    }
    for &b in kb.asserted_functions() {
        let bearing = kb.bearing(b);
        writeln!(
            out,
            "asserted_function {} {}",
            kb.structure(bearing.structure).id,
            kb.realizable(bearing.realizable).id
        )
        .unwrap();
    }
    out
}
