use std::collections::BTreeSet;

use thiserror::Error;

use super::obo::{Clause, OntologyDocument, Stanza};
use crate::inference::{ClassificationReport, Label};
use crate::kb::KnowledgeBase;

pub const REALIZABLE_ENTITY: &str = "FR:RealizableEntity";
pub const FUNCTION: &str = "FR:Function";
pub const BIOLOGICAL_FUNCTION: &str = "FR:BiologicalFunction";
pub const ARTIFACTUAL_FUNCTION: &str = "FR:ArtifactualFunction";
pub const ROLE: &str = "FR:Role";
pub const PROCESS: &str = "FR:Process";
pub const REALIZED_BY: &str = "realized_by";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExportError {
    #[error("report does not match the knowledge base: {0}")]
    ReportMismatch(String),
    #[error("knowledge base id `{0}` collides with an upper-level term")]
    IdCollision(String),
}

fn upper_terms(assert_disjoint: bool) -> Vec<Stanza> {
    let mut function = Stanza::new(FUNCTION)
        .with(Clause::Name("Function".into()))
        .with(Clause::Def {
            text: "A realizable entity which is a biological function or an artifactual function."
                .into(),
            xrefs: "[]".into(),
        })
        .with(Clause::IsA(REALIZABLE_ENTITY.into()))
        .with(Clause::UnionOf(BIOLOGICAL_FUNCTION.into()))
        .with(Clause::UnionOf(ARTIFACTUAL_FUNCTION.into()));
    let mut biological = Stanza::new(BIOLOGICAL_FUNCTION)
        .with(Clause::Name("BiologicalFunction".into()))
        .with(Clause::Def {
            text: "A realizable entity inhering in an organismal continuant, realized in an activity, where homologous structures of closely related species and most individuals of the same species bear it.".into(),
            xrefs: "[]".into(),
        })
        .with(Clause::IsA(FUNCTION.into()));
    let artifactual = Stanza::new(ARTIFACTUAL_FUNCTION)
        .with(Clause::Name("ArtifactualFunction".into()))
        .with(Clause::Def {
            text:
                "A realizable entity of a continuant made for the kind of process that realizes it."
                    .into(),
            xrefs: "[]".into(),
        })
        .with(Clause::IsA(FUNCTION.into()));
    let mut role = Stanza::new(ROLE)
        .with(Clause::Name("Role".into()))
        .with(Clause::Def {
            text: "A realizable entity whose bearing is known to be neither a biological nor an artifactual function.".into(),
            xrefs: "[]".into(),
        })
        .with(Clause::IsA(REALIZABLE_ENTITY.into()));
    if assert_disjoint {
        biological.clauses.push(Clause::Other {
            tag: "disjoint_from".into(),
            value: ARTIFACTUAL_FUNCTION.into(),
        });
        role.clauses.push(Clause::Other {
            tag: "disjoint_from".into(),
            value: FUNCTION.into(),
        });
        function.clauses.push(Clause::Other {
            tag: "disjoint_from".into(),
            value: ROLE.into(),
        });
    }
    vec![
        Stanza::new(REALIZABLE_ENTITY).with(Clause::Name("RealizableEntity".into())),
        function,
        biological,
        artifactual,
        role,
    ]
}

/// The upper classes alone, with no knowledge-base content.
pub fn upper_scaffold(assert_disjoint: bool) -> OntologyDocument {
    OntologyDocument {
        header: header(),
        terms: upper_terms(assert_disjoint),
        ..OntologyDocument::default()
    }
}

fn header() -> Vec<(String, String)> {
    vec![
        ("format-version".into(), "1.2".into()),
        ("ontology".into(), "function-role".into()),
        (
            "remark".into(),
            "Realization links are encoded as one realized_by sub-relation per realizable; OBO has no direct form for the universal RealizableEntity-Process link.".into(),
        ),
    ]
}

/// Where a realizable sits in the hierarchy: under a specific class only
/// when every bearing of it carries that label.
pub fn placement(labels: &BTreeSet<Label>) -> Vec<&'static str> {
    if labels.len() != 1 {
        return vec![REALIZABLE_ENTITY];
    }
    match labels.iter().next().unwrap() {
        Label::BiologicalFunction => vec![BIOLOGICAL_FUNCTION],
        Label::ArtifactualFunction => vec![ARTIFACTUAL_FUNCTION],
        Label::BothFunction => vec![BIOLOGICAL_FUNCTION, ARTIFACTUAL_FUNCTION],
        Label::Role => vec![ROLE],
        Label::Undetermined => vec![REALIZABLE_ENTITY],
    }
}

fn realized_by_relation(realizable: &str) -> String {
    format!("{REALIZED_BY}_{realizable}")
}

pub fn export_axiomatisation(
    kb: &KnowledgeBase,
    report: &ClassificationReport,
) -> Result<OntologyDocument, ExportError> {
    if report.traces.len() != kb.bearings().len() {
        return Err(ExportError::ReportMismatch(format!(
            "{} rows for {} bearings",
            report.traces.len(),
            kb.bearings().len()
        )));
    }
    let mut labels = vec![BTreeSet::new(); kb.realizables().len()];
    for (b, trace) in kb.bearings().iter().zip(&report.traces) {
        let structure = &kb.structure(b.structure).id;
        let realizable = &kb.realizable(b.realizable).id;
        if &trace.structure != structure || &trace.realizable != realizable {
            return Err(ExportError::ReportMismatch(format!(
                "row ({}, {}) where ({structure}, {realizable}) was expected",
                trace.structure, trace.realizable
            )));
        }
        labels[b.realizable.index()].insert(trace.label);
    }

    let mut doc = upper_scaffold(report.params.assert_disjoint);
    let reserved: BTreeSet<&str> = doc.terms.iter().map(|t| t.id.as_str()).collect();
    for id in kb
        .realizables()
        .iter()
        .map(|r| &r.id)
        .chain(kb.processes().iter().map(|p| &p.id))
    {
        if reserved.contains(id.as_str()) || id == PROCESS {
            return Err(ExportError::IdCollision(id.clone()));
        }
    }

    for (pos, r) in kb.realizables().iter().enumerate() {
        let mut term = Stanza::new(&r.id).with(Clause::Name(r.name.clone()));
        for parent in placement(&labels[pos]) {
            term.clauses.push(Clause::IsA(parent.into()));
        }
        let r_ref = kb.realizable_ref(&r.id).expect("declared");
        if let Some(p) = kb.realized_by(r_ref) {
            term.clauses.push(Clause::Relationship {
                relation: realized_by_relation(&r.id),
                target: kb.process(p).id.clone(),
            });
        }
        doc.terms.push(term);
    }

    if !kb.processes().is_empty() {
        doc.terms
            .push(Stanza::new(PROCESS).with(Clause::Name("Process".into())));
        for p in kb.processes() {
            doc.terms.push(
                Stanza::new(&p.id)
                    .with(Clause::Name(p.name.clone()))
                    .with(Clause::IsA(PROCESS.into())),
            );
        }
    }

    let links: Vec<_> = kb.realization_links().collect();
    if !links.is_empty() {
        doc.typedefs
            .push(Stanza::new(REALIZED_BY).with(Clause::Name("realized by".into())));
        for (r, p) in links {
            let realizable = &kb.realizable(r).id;
            doc.typedefs.push(
                Stanza::new(realized_by_relation(realizable))
                    .with(Clause::Name(format!(
                        "{realizable} realized by {}",
                        kb.process(p).id
                    )))
                    .with(Clause::IsA(REALIZED_BY.into())),
            );
        }
    }
    Ok(doc)
}
