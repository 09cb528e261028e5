//! A small subset of the OBO 1.2 flat-file format.
//!
//! `[Term]` and `[Typedef]` stanzas are parsed into ordered clauses. The tags
//! `id`, `name`, `def`, `is_a`, `relationship`, `union_of` and
//! `intersection_of` are interpreted; any other tag is kept verbatim, as are
//! stanzas of other types.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OboError {
    #[error("line {line}: {reason}")]
    SyntaxError { line: usize, reason: String },
    #[error("{stanza} stanza starting at line {line} has no id")]
    MissingId { stanza: String, line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clause {
    Name(String),
    Def {
        text: String,
        xrefs: String,
    },
    IsA(String),
    Relationship {
        relation: String,
        target: String,
    },
    UnionOf(String),
    IntersectionOf {
        relation: Option<String>,
        target: String,
    },
    Other {
        tag: String,
        value: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stanza {
    pub id: String,
    pub clauses: Vec<Clause>,
}

impl Stanza {
    pub fn new(id: impl Into<String>) -> Self {
        Stanza {
            id: id.into(),
            clauses: Vec::new(),
        }
    }

    pub fn with(mut self, clause: Clause) -> Self {
        self.clauses.push(clause);
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.clauses.iter().find_map(|c| match c {
            Clause::Name(n) => Some(n.as_str()),
            _ => None,
        })
    }

    pub fn def(&self) -> Option<&str> {
        self.clauses.iter().find_map(|c| match c {
            Clause::Def { text, .. } => Some(text.as_str()),
            _ => None,
        })
    }

    pub fn is_a(&self) -> impl Iterator<Item = &str> {
        self.clauses.iter().filter_map(|c| match c {
            Clause::IsA(p) => Some(p.as_str()),
            _ => None,
        })
    }

    pub fn relationships(&self) -> impl Iterator<Item = (&str, &str)> {
        self.clauses.iter().filter_map(|c| match c {
            Clause::Relationship { relation, target } => Some((relation.as_str(), target.as_str())),
            _ => None,
        })
    }

    pub fn union_of(&self) -> impl Iterator<Item = &str> {
        self.clauses.iter().filter_map(|c| match c {
            Clause::UnionOf(t) => Some(t.as_str()),
            _ => None,
        })
    }

    pub fn intersection_of(&self) -> impl Iterator<Item = (Option<&str>, &str)> {
        self.clauses.iter().filter_map(|c| match c {
            Clause::IntersectionOf { relation, target } => {
                Some((relation.as_deref(), target.as_str()))
            }
            _ => None,
        })
    }

    pub fn other<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.clauses.iter().filter_map(move |c| match c {
            Clause::Other { tag: t, value } if t == tag => Some(value.as_str()),
            _ => None,
        })
    }
}

/// Stanza of a type other than Term or Typedef, kept as raw tag-values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpaqueStanza {
    pub kind: String,
    pub tags: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OntologyDocument {
    pub header: Vec<(String, String)>,
    pub terms: Vec<Stanza>,
    pub typedefs: Vec<Stanza>,
    pub opaque: Vec<OpaqueStanza>,
}

impl OntologyDocument {
    pub fn term(&self, id: &str) -> Option<&Stanza> {
        self.terms.iter().find(|t| t.id == id)
    }
}

/// Drops a trailing `! comment` and surrounding whitespace.
fn strip_comment(value: &str) -> &str {
    match value.find(" !") {
        Some(pos) => value[..pos].trim(),
        None => value.trim(),
    }
}

fn parse_def(value: &str) -> Result<(String, String), String> {
    let rest = value
        .strip_prefix('"')
        .ok_or("def must start with a quoted string")?;
    let mut text = String::new();
    let mut chars = rest.char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some((_, e)) => text.push(e),
                None => break,
            },
            '"' => return Ok((text, rest[i + 1..].trim().to_owned())),
            _ => text.push(c),
        }
    }
    Err("unterminated def string".into())
}

fn parse_clause(tag: &str, value: &str) -> Result<Clause, String> {
    let words = || strip_comment(value).split_whitespace().collect::<Vec<_>>();
    Ok(match tag {
        "name" => Clause::Name(value.trim().to_owned()),
        "def" => {
            let (text, xrefs) = parse_def(value.trim())?;
            Clause::Def { text, xrefs }
        }
        "is_a" => match words()[..] {
            [parent] => Clause::IsA(parent.to_owned()),
            _ => return Err("is_a takes one id".into()),
        },
        "relationship" => match words()[..] {
            [relation, target] => Clause::Relationship {
                relation: relation.to_owned(),
                target: target.to_owned(),
            },
            _ => return Err("relationship takes a relation and a target".into()),
        },
        "union_of" => match words()[..] {
            [target] => Clause::UnionOf(target.to_owned()),
            _ => return Err("union_of takes one id".into()),
        },
        "intersection_of" => match words()[..] {
            [target] => Clause::IntersectionOf {
                relation: None,
                target: target.to_owned(),
            },
            [relation, target] => Clause::IntersectionOf {
                relation: Some(relation.to_owned()),
                target: target.to_owned(),
            },
            _ => return Err("intersection_of takes an id or a relation and an id".into()),
        },
        _ => Clause::Other {
            tag: tag.to_owned(),
            value: value.trim().to_owned(),
        },
    })
}

enum Open {
    Header,
    Frame {
        kind: String,
        line: usize,
        id: Option<String>,
        tags: Vec<(usize, String, String)>,
    },
}

struct Builder {
    doc: OntologyDocument,
    term_ids: HashSet<String>,
    typedef_ids: HashSet<String>,
}

impl Builder {
    fn close(&mut self, open: Open) -> Result<(), OboError> {
        let Open::Frame {
            kind,
            line,
            id,
            tags,
        } = open
        else {
            return Ok(());
        };
        if kind != "Term" && kind != "Typedef" {
            let tags = id
                .into_iter()
                .map(|id| ("id".to_owned(), id))
                .chain(tags.into_iter().map(|(_, t, v)| (t, v)))
                .collect();
            self.doc.opaque.push(OpaqueStanza { kind, tags });
            return Ok(());
        }
        let id = id.ok_or_else(|| OboError::MissingId {
            stanza: kind.clone(),
            line,
        })?;
        let mut stanza = Stanza::new(id);
        for (tag_line, tag, value) in tags {
            let clause = parse_clause(&tag, &value).map_err(|reason| OboError::SyntaxError {
                line: tag_line,
                reason,
            })?;
            stanza.clauses.push(clause);
        }
        for (what, count) in [
            ("union_of", stanza.union_of().count()),
            ("intersection_of", stanza.intersection_of().count()),
        ] {
            if count == 1 {
                return Err(OboError::SyntaxError {
                    line,
                    reason: format!("{} `{}` has a single {what} clause", kind, stanza.id),
                });
            }
        }
        let (ids, list) = if kind == "Term" {
            (&mut self.term_ids, &mut self.doc.terms)
        } else {
            (&mut self.typedef_ids, &mut self.doc.typedefs)
        };
        if !ids.insert(stanza.id.clone()) {
            return Err(OboError::SyntaxError {
                line,
                reason: format!("duplicate {kind} id `{}`", stanza.id),
            });
        }
        list.push(stanza);
        Ok(())
    }
}

pub fn parse_obo(text: &str) -> Result<OntologyDocument, OboError> {
    let mut builder = Builder {
        doc: OntologyDocument::default(),
        term_ids: HashSet::new(),
        typedef_ids: HashSet::new(),
    };
    let mut open = Open::Header;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('!') {
            continue;
        }
        if raw.starts_with('[') {
            let kind = trimmed
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| OboError::SyntaxError {
                    line,
                    reason: "malformed stanza header".into(),
                })?;
            let previous = std::mem::replace(
                &mut open,
                Open::Frame {
                    kind: kind.to_owned(),
                    line,
                    id: None,
                    tags: Vec::new(),
                },
            );
            builder.close(previous)?;
            continue;
        }
        let (tag, value) = trimmed
            .split_once(':')
            .ok_or_else(|| OboError::SyntaxError {
                line,
                reason: "expected `tag: value`".into(),
            })?;
        let (tag, value) = (tag.trim(), value.trim());
        match &mut open {
            Open::Header => builder.doc.header.push((tag.to_owned(), value.to_owned())),
            Open::Frame { id, tags, .. } => {
                if tag == "id" {
                    if id.is_some() {
                        return Err(OboError::SyntaxError {
                            line,
                            reason: "second id in stanza".into(),
                        });
                    }
                    *id = Some(strip_comment(value).to_owned());
                } else {
                    tags.push((line, tag.to_owned(), value.to_owned()));
                }
            }
        }
    }
    builder.close(open)?;
    Ok(builder.doc)
}

fn escape_def(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

fn write_clause(out: &mut String, clause: &Clause) {
    match clause {
        Clause::Name(n) => writeln!(out, "name: {n}"),
        Clause::Def { text, xrefs } if xrefs.is_empty() => {
            writeln!(out, "def: \"{}\"", escape_def(text))
        }
        Clause::Def { text, xrefs } => writeln!(out, "def: \"{}\" {xrefs}", escape_def(text)),
        Clause::IsA(p) => writeln!(out, "is_a: {p}"),
        Clause::Relationship { relation, target } => {
            writeln!(out, "relationship: {relation} {target}")
        }
        Clause::UnionOf(t) => writeln!(out, "union_of: {t}"),
        Clause::IntersectionOf {
            relation: Some(r),
            target,
        } => writeln!(out, "intersection_of: {r} {target}"),
        Clause::IntersectionOf {
            relation: None,
            target,
        } => writeln!(out, "intersection_of: {target}"),
        Clause::Other { tag, value } => writeln!(out, "{tag}: {value}"),
    }
    .unwrap();
}

fn write_stanza(out: &mut String, kind: &str, stanza: &Stanza) {
    writeln!(out, "\n[{kind}]\nid: {}", stanza.id).unwrap();
    for clause in &stanza.clauses {
        write_clause(out, clause);
    }
}

/// Writes the document back out: header, terms, typedefs, then opaque
/// stanzas, with clause order preserved inside every stanza.
pub fn serialize_obo(doc: &OntologyDocument) -> String {
    let mut out = String::new();
    for (tag, value) in &doc.header {
        writeln!(out, "{tag}: {value}").unwrap();
    }
    for term in &doc.terms {
        write_stanza(&mut out, "Term", term);
    }
    for typedef in &doc.typedefs {
        write_stanza(&mut out, "Typedef", typedef);
    }
    for stanza in &doc.opaque {
        writeln!(out, "\n[{}]", stanza.kind).unwrap();
        for (tag, value) in &stanza.tags {
            writeln!(out, "{tag}: {value}").unwrap();
        }
    }
    out
}
