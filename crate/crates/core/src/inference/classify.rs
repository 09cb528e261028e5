use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{
    biological_fixpoint, design_match, ClassifyParams, Fixpoint, InferenceError, Label,
    SupportIndex, WorldMode,
};
use crate::kb::{BearingRef, KnowledgeBase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Organismal,
    Prevalent,
    CrossSpeciesSupport,
    DesignMatch,
    AssertedFunction,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Organismal => "organismal",
            CheckKind::Prevalent => "prevalent",
            CheckKind::CrossSpeciesSupport => "cross-species-support",
            CheckKind::DesignMatch => "design-match",
            CheckKind::AssertedFunction => "asserted-function",
        }
    }

    /// Name of the rule that defeats function status when this check fails.
    pub fn failure_rule(self) -> &'static str {
        match self {
            CheckKind::Organismal => "non-organismal",
            CheckKind::Prevalent => "drop-out",
            CheckKind::CrossSpeciesSupport => "drop-in",
            CheckKind::DesignMatch => "no-design",
            CheckKind::AssertedFunction => "asserted-function-conflict",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    /// The knowledge base lacks the data to decide (open-world only).
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub kind: CheckKind,
    pub outcome: Outcome,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.outcome {
            Outcome::Pass => write!(f, "[pass] {}: {}", self.kind.name(), self.detail),
            Outcome::Fail => write!(
                f,
                "[FAIL {}] {}: {}",
                self.kind.failure_rule(),
                self.kind.name(),
                self.detail
            ),
            Outcome::Unknown => write!(f, "[unknown] {}: {}", self.kind.name(), self.detail),
        }
    }
}

/// `supported` holds because `supporter`, a homologous bearing in a
/// distinct closely related species, is itself in the fixpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportEdge {
    pub supported_structure: String,
    pub supported_species: String,
    pub supporter_structure: String,
    pub supporter_species: String,
    pub realizable: String,
}

impl fmt::Display for SupportEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}) <- {} ({})",
            self.supported_structure,
            self.supported_species,
            self.supporter_structure,
            self.supporter_species
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplanationTrace {
    pub structure: String,
    pub realizable: String,
    pub label: Label,
    pub checks: Vec<Check>,
    /// Closed walk of support edges through the fixpoint; non-empty exactly
    /// when the bearing is a biological function.
    pub support_chain: Vec<SupportEdge>,
}

impl ExplanationTrace {
    pub fn failed_rules(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| c.outcome == Outcome::Fail)
            .map(|c| c.kind.failure_rule())
            .collect()
    }

    pub fn check(&self, kind: CheckKind) -> Option<&Check> {
        self.checks.iter().find(|c| c.kind == kind)
    }

    /// Compact rule column for reports.
    pub fn rule_summary(&self) -> String {
        match self.label {
            Label::BiologicalFunction => "cross-species-support".into(),
            Label::ArtifactualFunction => "design-match".into(),
            Label::BothFunction => "cross-species-support+design-match".into(),
            Label::Role => self.failed_rules().join(","),
            Label::Undetermined => {
                let unknown: Vec<_> = self
                    .checks
                    .iter()
                    .filter(|c| c.outcome == Outcome::Unknown)
                    .map(|c| format!("unknown:{}", c.kind.name()))
                    .collect();
                unknown.join(",")
            }
        }
    }
}

impl fmt::Display for ExplanationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} bears {}: {}",
            self.structure, self.realizable, self.label
        )?;
        for check in &self.checks {
            writeln!(f, "  {check}")?;
        }
        if !self.support_chain.is_empty() {
            writeln!(f, "  support chain:")?;
            for edge in &self.support_chain {
                writeln!(f, "    {edge}")?;
            }
        }
        Ok(())
    }
}

/// An asserted function that inference labels a role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub structure: String,
    pub realizable: String,
    pub inferred: Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// A bearing is both kinds of function while the function subclasses
    /// are asserted disjoint.
    DisjointFunctionsOverlap {
        structure: String,
        realizable: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub params: ClassifyParams,
    /// One trace per bearing, in knowledge-base bearing order.
    pub traces: Vec<ExplanationTrace>,
    pub conflicts: Vec<Conflict>,
    pub violations: Vec<Violation>,
    pub iterations: usize,
}

impl ClassificationReport {
    pub fn label_of(&self, structure: &str, realizable: &str) -> Option<Label> {
        self.trace_of(structure, realizable).map(|t| t.label)
    }

    pub fn trace_of(&self, structure: &str, realizable: &str) -> Option<&ExplanationTrace> {
        self.traces
            .iter()
            .find(|t| t.structure == structure && t.realizable == realizable)
    }

    pub fn labels(&self) -> Vec<Label> {
        self.traces.iter().map(|t| t.label).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }
}

struct Context<'a> {
    kb: &'a KnowledgeBase,
    params: &'a ClassifyParams,
    fixpoint: Fixpoint,
    index: SupportIndex,
}

impl<'a> Context<'a> {
    fn new(kb: &'a KnowledgeBase, params: &'a ClassifyParams) -> Self {
        let fixpoint = biological_fixpoint(kb, params);
        let index = SupportIndex::new(kb, &fixpoint.candidates);
        Context {
            kb,
            params,
            fixpoint,
            index,
        }
    }

    fn open(&self) -> bool {
        self.params.mode == WorldMode::Open
    }

    /// Follows first supporters through the fixpoint until a bearing
    /// repeats.
    fn support_chain(&self, start: BearingRef) -> Vec<SupportEdge> {
        let kb = self.kb;
        let mut chain = Vec::new();
        let mut seen = HashSet::from([start]);
        let mut current = start;
        loop {
            let pos = self.index.position(current).expect("member is a candidate");
            let Some(next) = self
                .index
                .supporters(kb, pos)
                .find(|b| self.fixpoint.members.contains(b))
            else {
                break;
            };
            chain.push(self.edge(current, next));
            if !seen.insert(next) {
                break;
            }
            current = next;
        }
        chain
    }

    fn edge(&self, supported: BearingRef, supporter: BearingRef) -> SupportEdge {
        let kb = self.kb;
        let species = |b: BearingRef| {
            let s = kb.species_of(kb.bearing(b).structure).expect("organismal");
            kb.species_at(s).id.clone()
        };
        let structure = |b: BearingRef| kb.structure(kb.bearing(b).structure).id.clone();
        SupportEdge {
            supported_structure: structure(supported),
            supported_species: species(supported),
            supporter_structure: structure(supporter),
            supporter_species: species(supporter),
            realizable: kb.realizable(kb.bearing(supported).realizable).id.clone(),
        }
    }

    fn trace(&self, b: BearingRef) -> ExplanationTrace {
        let kb = self.kb;
        let bearing = kb.bearing(b);
        let structure = kb.structure(bearing.structure);
        let realizable = kb.realizable(bearing.realizable);
        let mut checks = Vec::new();
        let mut support_chain = Vec::new();
        let mut biological = false;

        if let Some(species) = structure.species {
            let species_id = &kb.species_at(species).id;
            checks.push(Check {
                kind: CheckKind::Organismal,
                outcome: Outcome::Pass,
                detail: format!(
                    "{} is {} of {}",
                    structure.id, structure.category, species_id
                ),
            });
            let theta = self.params.theta();
            let prevalence = match bearing.prevalence {
                Some(p) if p > theta => Check {
                    kind: CheckKind::Prevalent,
                    outcome: Outcome::Pass,
                    detail: format!("prevalence {p} > theta {theta}"),
                },
                Some(p) => Check {
                    kind: CheckKind::Prevalent,
                    outcome: Outcome::Fail,
                    detail: format!("prevalence {p} <= theta {theta}"),
                },
                None => Check {
                    kind: CheckKind::Prevalent,
                    outcome: if self.open() {
                        Outcome::Unknown
                    } else {
                        Outcome::Fail
                    },
                    detail: "prevalence not recorded".into(),
                },
            };
            let prevalent = prevalence.outcome == Outcome::Pass;
            checks.push(prevalence);

            if prevalent {
                if self.fixpoint.members.contains(&b) {
                    biological = true;
                    support_chain = self.support_chain(b);
                    checks.push(Check {
                        kind: CheckKind::CrossSpeciesSupport,
                        outcome: Outcome::Pass,
                        detail: format!(
                            "{} bears {} in related species {}",
                            support_chain[0].supporter_structure,
                            realizable.id,
                            support_chain[0].supporter_species
                        ),
                    });
                } else if kb.related_species(species).is_empty() {
                    checks.push(Check {
                        kind: CheckKind::CrossSpeciesSupport,
                        outcome: if self.open() {
                            Outcome::Unknown
                        } else {
                            Outcome::Fail
                        },
                        detail: format!("no relatedness recorded for species {species_id}"),
                    });
                } else {
                    checks.push(Check {
                        kind: CheckKind::CrossSpeciesSupport,
                        outcome: Outcome::Fail,
                        detail: format!(
                            "no homolog of {} in a species related to {} prevalently bears {}",
                            structure.id, species_id, realizable.id
                        ),
                    });
                }
            }
        } else {
            checks.push(Check {
                kind: CheckKind::Organismal,
                outcome: Outcome::Fail,
                detail: format!("{} is {}", structure.id, structure.category),
            });
        }

        let artifactual = design_match(kb, b);
        let design = match kb.realized_by(bearing.realizable) {
            Some(p) if artifactual => Check {
                kind: CheckKind::DesignMatch,
                outcome: Outcome::Pass,
                detail: format!(
                    "{} designed for {}, which realizes {}",
                    structure.id,
                    kb.process(p).id,
                    realizable.id
                ),
            },
            Some(p) => Check {
                kind: CheckKind::DesignMatch,
                outcome: Outcome::Fail,
                detail: format!("{} not designed for {}", structure.id, kb.process(p).id),
            },
            None => Check {
                kind: CheckKind::DesignMatch,
                outcome: if self.open() {
                    Outcome::Unknown
                } else {
                    Outcome::Fail
                },
                detail: format!("no realization link for {}", realizable.id),
            },
        };
        checks.push(design);

        let label = match (biological, artifactual) {
            (true, true) => Label::BothFunction,
            (true, false) => Label::BiologicalFunction,
            (false, true) => Label::ArtifactualFunction,
            (false, false) => {
                if checks.iter().any(|c| c.outcome == Outcome::Unknown) {
                    Label::Undetermined
                } else {
                    Label::Role
                }
            }
        };

        if kb.is_asserted_function(b) {
            checks.push(Check {
                kind: CheckKind::AssertedFunction,
                outcome: if label == Label::Role {
                    Outcome::Fail
                } else {
                    Outcome::Pass
                },
                detail: format!(
                    "asserted: {} is_function_of {}",
                    realizable.id, structure.id
                ),
            });
        }

        ExplanationTrace {
            structure: structure.id.clone(),
            realizable: realizable.id.clone(),
            label,
            checks,
            support_chain,
        }
    }
}

/// Labels every bearing and collects conflicts with asserted functions.
pub fn classify(kb: &KnowledgeBase, params: &ClassifyParams) -> ClassificationReport {
    let ctx = Context::new(kb, params);
    let traces: Vec<_> = kb.bearing_refs().map(|b| ctx.trace(b)).collect();

    let conflicts = kb
        .asserted_functions()
        .iter()
        .map(|b| &traces[b.index()])
        .filter(|t| t.label == Label::Role)
        .map(|t| Conflict {
            structure: t.structure.clone(),
            realizable: t.realizable.clone(),
            inferred: t.label,
        })
        .collect();

    let violations = if params.assert_disjoint {
        traces
            .iter()
            .filter(|t| t.label == Label::BothFunction)
            .map(|t| Violation::DisjointFunctionsOverlap {
                structure: t.structure.clone(),
                realizable: t.realizable.clone(),
            })
            .collect()
    } else {
        Vec::new()
    };

    ClassificationReport {
        params: *params,
        traces,
        conflicts,
        violations,
        iterations: ctx.fixpoint.iterations,
    }
}

pub fn explain(
    kb: &KnowledgeBase,
    structure: &str,
    realizable: &str,
    params: &ClassifyParams,
) -> Result<ExplanationTrace, InferenceError> {
    let b =
        kb.bearing_ref(structure, realizable)
            .ok_or_else(|| InferenceError::UnknownBearing {
                structure: structure.to_owned(),
                realizable: realizable.to_owned(),
            })?;
    Ok(Context::new(kb, params).trace(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{biological_functions, supports};
    use crate::obo_io::native::parse_native;

    fn kb(text: &str) -> KnowledgeBase {
        parse_native(text).unwrap().build().unwrap()
    }

    const PRIMATES: &str = "
species human
species chimp
species gorilla
related human chimp
related human gorilla
related chimp gorilla
structure human_hand category organism-part in human
structure chimp_hand category organism-part in chimp
structure gorilla_hand category organism-part in gorilla
homolog human_hand chimp_hand
homolog chimp_hand gorilla_hand
structure human_larynx category organism-part in human
structure chimp_larynx category organism-part in chimp
homolog human_larynx chimp_larynx
realizable walking_on
realizable speech
realizable vocalisation
bears human_hand walking_on prevalence 0.01
bears chimp_hand walking_on prevalence 0.9
bears gorilla_hand walking_on prevalence 0.9
bears human_larynx speech prevalence 0.95
bears human_larynx vocalisation prevalence 0.99
bears chimp_larynx vocalisation prevalence 0.99
";

    #[test]
    fn drop_out_and_drop_in_traces() {
        let kb = kb(PRIMATES);
        let params = ClassifyParams::default();
        let hand = explain(&kb, "human_hand", "walking_on", &params).unwrap();
        assert_eq!(hand.label, Label::Role);
        assert_eq!(
            hand.check(CheckKind::Prevalent).unwrap().outcome,
            Outcome::Fail
        );
        assert!(hand.failed_rules().contains(&"drop-out"));
        assert!(!hand.failed_rules().contains(&"drop-in"));

        let larynx = explain(&kb, "human_larynx", "speech", &params).unwrap();
        assert_eq!(larynx.label, Label::Role);
        assert_eq!(
            larynx.check(CheckKind::Prevalent).unwrap().outcome,
            Outcome::Pass
        );
        assert_eq!(larynx.failed_rules(), vec!["drop-in", "no-design"]);
        assert!(larynx.to_string().contains("drop-in"));
    }

    #[test]
    fn support_chain_replays() {
        let kb = kb(PRIMATES);
        let params = ClassifyParams::default();
        let members = biological_functions(&kb, &params);
        let trace = explain(&kb, "chimp_hand", "walking_on", &params).unwrap();
        assert_eq!(trace.label, Label::BiologicalFunction);
        assert!(!trace.support_chain.is_empty());
        assert_eq!(trace.support_chain[0].supported_structure, "chimp_hand");
        for edge in &trace.support_chain {
            let supported = kb
                .bearing_ref(&edge.supported_structure, &edge.realizable)
                .unwrap();
            let supporter = kb
                .bearing_ref(&edge.supporter_structure, &edge.realizable)
                .unwrap();
            assert!(members.contains(&supported));
            assert!(members.contains(&supporter));
            assert!(supports(&kb, supporter, supported));
        }
        let last = trace.support_chain.last().unwrap();
        assert!(trace
            .support_chain
            .iter()
            .any(|e| e.supported_structure == last.supporter_structure));
    }

    #[test]
    fn unknown_bearing() {
        let kb = kb(PRIMATES);
        let err = explain(&kb, "human_hand", "speech", &ClassifyParams::default()).unwrap_err();
        assert!(matches!(err, InferenceError::UnknownBearing { .. }));
    }

    #[test]
    fn empty_kb_gives_empty_report() {
        let report = classify(&KnowledgeBase::empty(), &ClassifyParams::default());
        assert!(report.is_empty());
        assert!(report.conflicts.is_empty());
        assert_eq!(report.iterations, 0);
    }

    #[test]
    fn asserted_role_is_a_conflict() {
        let kb = kb("
species human
structure human_finger category organism-part in human
realizable phone_operation
bears human_finger phone_operation prevalence 0.9
asserted_function human_finger phone_operation
");
        let report = classify(&kb, &ClassifyParams::default());
        assert_eq!(report.labels(), vec![Label::Role]);
        assert_eq!(report.conflicts.len(), 1);
        assert_eq!(report.conflicts[0].structure, "human_finger");
    }

    #[test]
    fn disjointness_flags_overlap() {
        let text = "
species engineered
species wild
related engineered wild
structure sensor_colony category whole-organism in engineered
structure wild_colony category whole-organism in wild
homolog sensor_colony wild_colony
realizable toxin_detection
process detecting_toxin
realizes toxin_detection detecting_toxin
designed sensor_colony for detecting_toxin
bears sensor_colony toxin_detection prevalence 1
bears wild_colony toxin_detection prevalence 0.8
";
        let kb = kb(text);
        let lenient = classify(&kb, &ClassifyParams::default());
        assert_eq!(
            lenient.label_of("sensor_colony", "toxin_detection"),
            Some(Label::BothFunction)
        );
        assert!(lenient.violations.is_empty());
        let strict = classify(&kb, &ClassifyParams::default().with_disjointness(true));
        assert_eq!(strict.violations.len(), 1);
    }

    #[test]
    fn open_world_leaves_gaps_undetermined() {
        let kb = kb("
species human
species loner
structure human_gut category organism-part in human
structure loner_gut category organism-part in loner
structure rock category other
realizable digest
realizable holding_doors
bears human_gut digest
bears loner_gut digest prevalence 0.9
bears rock holding_doors
");
        let open = ClassifyParams::default().with_mode(WorldMode::Open);
        let report = classify(&kb, &open);
        assert_eq!(report.labels(), vec![Label::Undetermined; 3]);
        assert_eq!(
            report
                .trace_of("human_gut", "digest")
                .unwrap()
                .rule_summary(),
            "unknown:prevalent,unknown:design-match"
        );
        let closed = classify(&kb, &ClassifyParams::default());
        assert_eq!(closed.labels(), vec![Label::Role; 3]);
    }
}
