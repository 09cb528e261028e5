//! Classification rules.
//!
//! A bearing is a biological function when its structure is organismal,
//! most individuals of its species bear the realizable, and some homologous
//! structure in a distinct, closely related species bears the same
//! realizable as a biological function. That last clause is recursive; it is
//! read coinductively, so the biological functions are the greatest fixpoint
//! of [`support_operator`] below [`candidate_set`]. Mutual support between
//! two bearings is enough.
//!
//! A bearing is an artifactual function when its structure was designed for
//! the process that realizes the realizable. Anything that is neither is a
//! role.

mod classify;
mod oracle;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::kb::{BearingRef, GroupRef, KnowledgeBase, RealizableRef, SpeciesRef};

pub use classify::{
    classify, explain, Check, CheckKind, ClassificationReport, Conflict, ExplanationTrace, Outcome,
    SupportEdge, Violation,
};
pub use oracle::{brute_force_biological, ORACLE_LIMIT};

pub type BearingSet = BTreeSet<BearingRef>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("theta {0} is outside [0, 1]")]
    ThetaOutOfRange(f64),
    #[error("no bearing of `{realizable}` by `{structure}`")]
    UnknownBearing {
        structure: String,
        realizable: String,
    },
    #[error("{0} candidate bearings exceed the exhaustive oracle limit of {ORACLE_LIMIT}")]
    TooLargeForOracle(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WorldMode {
    /// Anything not derivable from the knowledge base is false.
    #[default]
    Closed,
    /// Negative conclusions that rest on missing data become `Undetermined`.
    Open,
}

impl FromStr for WorldMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed" | "closed-world" => Ok(WorldMode::Closed),
            "open" | "open-world" => Ok(WorldMode::Open),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyParams {
    theta: f64,
    pub mode: WorldMode,
    pub assert_disjoint: bool,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            theta: 0.5,
            mode: WorldMode::Closed,
            assert_disjoint: false,
        }
    }
}

impl ClassifyParams {
    pub fn new(theta: f64, mode: WorldMode, assert_disjoint: bool) -> Result<Self, InferenceError> {
        Self::default().with_theta(theta).map(|p| ClassifyParams {
            mode,
            assert_disjoint,
            ..p
        })
    }

    /// Prevalence threshold; "most" individuals means strictly more than
    /// this fraction.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn with_theta(self, theta: f64) -> Result<Self, InferenceError> {
        if (0.0..=1.0).contains(&theta) {
            Ok(ClassifyParams { theta, ..self })
        } else {
            Err(InferenceError::ThetaOutOfRange(theta))
        }
    }

    pub fn with_mode(self, mode: WorldMode) -> Self {
        ClassifyParams { mode, ..self }
    }

    pub fn with_disjointness(self, assert_disjoint: bool) -> Self {
        ClassifyParams {
            assert_disjoint,
            ..self
        }
    }

    pub fn is_prevalent(&self, prevalence: Option<f64>) -> bool {
        prevalence.is_some_and(|p| p > self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Label {
    BiologicalFunction,
    ArtifactualFunction,
    BothFunction,
    Role,
    /// Only produced in open-world mode.
    Undetermined,
}

impl Label {
    pub const ALL: [Label; 5] = [
        Label::BiologicalFunction,
        Label::ArtifactualFunction,
        Label::BothFunction,
        Label::Role,
        Label::Undetermined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::BiologicalFunction => "BiologicalFunction",
            Label::ArtifactualFunction => "ArtifactualFunction",
            Label::BothFunction => "BothFunction",
            Label::Role => "Role",
            Label::Undetermined => "Undetermined",
        }
    }

    pub fn is_function(self) -> bool {
        matches!(
            self,
            Label::BiologicalFunction | Label::ArtifactualFunction | Label::BothFunction
        )
    }

    pub fn is_biological(self) -> bool {
        matches!(self, Label::BiologicalFunction | Label::BothFunction)
    }

    pub fn is_artifactual(self) -> bool {
        matches!(self, Label::ArtifactualFunction | Label::BothFunction)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown label `{s}`"))
    }
}

/// Bearings on organismal structures whose prevalence exceeds theta.
pub fn candidate_set(kb: &KnowledgeBase, params: &ClassifyParams) -> BearingSet {
    kb.bearing_refs()
        .filter(|&b| is_candidate(kb, params, b))
        .collect()
}

pub(crate) fn is_candidate(kb: &KnowledgeBase, params: &ClassifyParams, b: BearingRef) -> bool {
    let bearing = kb.bearing(b);
    kb.structure(bearing.structure).category.is_organismal()
        && params.is_prevalent(bearing.prevalence)
}

/// Organismal bearings with no recorded prevalence. In open-world mode
/// these are neither candidates nor known failures.
pub fn unknown_prevalence(kb: &KnowledgeBase) -> BearingSet {
    kb.bearing_refs()
        .filter(|&b| {
            let bearing = kb.bearing(b);
            bearing.prevalence.is_none() && kb.structure(bearing.structure).category.is_organismal()
        })
        .collect()
}

/// True when `supporter` can justify `supported`: homologous structures,
/// distinct closely related species, same realizable.
pub fn supports(kb: &KnowledgeBase, supporter: BearingRef, supported: BearingRef) -> bool {
    let (x, y) = (kb.bearing(supporter), kb.bearing(supported));
    if x.realizable != y.realizable {
        return false;
    }
    match (
        kb.group_of(x.structure),
        kb.group_of(y.structure),
        kb.species_of(x.structure),
        kb.species_of(y.structure),
    ) {
        (Some(gx), Some(gy), Some(sx), Some(sy)) => gx == gy && kb.are_related(sx, sy),
        _ => false,
    }
}

/// One application of the recursive biological clause: the candidates that
/// have at least one supporter in `current`.
pub fn support_operator(
    kb: &KnowledgeBase,
    current: &BearingSet,
    params: &ClassifyParams,
) -> BearingSet {
    candidate_set(kb, params)
        .into_iter()
        .filter(|&b| current.iter().any(|&other| supports(kb, other, b)))
        .collect()
}

/// Greatest fixpoint of the support operator, with the number of rounds
/// that removed at least one bearing.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixpoint {
    pub members: BearingSet,
    pub candidates: BearingSet,
    pub iterations: usize,
}

/// Candidate bearings bucketed by (homology class, realizable) and then by
/// species, so supporters of a bearing are found by walking its species'
/// relatedness list.
pub(crate) struct SupportIndex {
    slot: HashMap<BearingRef, usize>,
    buckets: Vec<HashMap<SpeciesRef, Vec<BearingRef>>>,
    bucket_of: Vec<usize>,
    species_of: Vec<SpeciesRef>,
    order: Vec<BearingRef>,
}

impl SupportIndex {
    pub(crate) fn new(kb: &KnowledgeBase, candidates: &BearingSet) -> Self {
        let mut keys: HashMap<(GroupRef, RealizableRef), usize> = HashMap::new();
        let mut buckets: Vec<HashMap<SpeciesRef, Vec<BearingRef>>> = Vec::new();
        let mut slot = HashMap::with_capacity(candidates.len());
        let mut bucket_of = Vec::with_capacity(candidates.len());
        let mut species_of = Vec::with_capacity(candidates.len());
        let mut order = Vec::with_capacity(candidates.len());
        for &b in candidates {
            let bearing = kb.bearing(b);
            let group = kb
                .group_of(bearing.structure)
                .expect("candidates are organismal");
            let species = kb
                .species_of(bearing.structure)
                .expect("organismal structures have a species");
            let next = buckets.len();
            let bucket = *keys.entry((group, bearing.realizable)).or_insert(next);
            if bucket == buckets.len() {
                buckets.push(HashMap::new());
            }
            buckets[bucket].entry(species).or_default().push(b);
            slot.insert(b, order.len());
            bucket_of.push(bucket);
            species_of.push(species);
            order.push(b);
        }
        SupportIndex {
            slot,
            buckets,
            bucket_of,
            species_of,
            order,
        }
    }

    /// Candidates that could support the candidate at position `pos`, in
    /// species id order then bearing order.
    pub(crate) fn supporters<'a>(
        &'a self,
        kb: &'a KnowledgeBase,
        pos: usize,
    ) -> impl Iterator<Item = BearingRef> + 'a {
        let bucket = &self.buckets[self.bucket_of[pos]];
        kb.related_species(self.species_of[pos])
            .iter()
            .filter_map(move |s| bucket.get(s))
            .flatten()
            .copied()
    }

    pub(crate) fn position(&self, b: BearingRef) -> Option<usize> {
        self.slot.get(&b).copied()
    }
}

/// Computes the greatest fixpoint by support counting. Each candidate keeps
/// the number of its supporters still alive; a round removes every
/// candidate whose count is zero, exactly as one application of
/// [`support_operator`] would.
pub fn biological_fixpoint(kb: &KnowledgeBase, params: &ClassifyParams) -> Fixpoint {
    let candidates = candidate_set(kb, params);
    let index = SupportIndex::new(kb, &candidates);
    let n = index.order.len();
    let mut count: Vec<usize> = (0..n)
        .map(|pos| index.supporters(kb, pos).count())
        .collect();
    let mut alive = vec![true; n];
    let mut frontier: Vec<usize> = (0..n).filter(|&pos| count[pos] == 0).collect();
    let mut iterations = 0;

    while !frontier.is_empty() {
        iterations += 1;
        for &pos in &frontier {
            alive[pos] = false;
        }
        let mut next = Vec::new();
        for &pos in &frontier {
            // Support is symmetric, so the bearings `pos` supported are
            // exactly its own potential supporters.
            for other in index.supporters(kb, pos) {
                let q = index.slot[&other];
                if alive[q] {
                    count[q] -= 1;
                    if count[q] == 0 {
                        next.push(q);
                    }
                }
            }
        }
        frontier = next;
    }

    let members = (0..n)
        .filter(|&pos| alive[pos])
        .map(|pos| index.order[pos])
        .collect();
    Fixpoint {
        members,
        candidates,
        iterations,
    }
}

/// Bearings that are biological functions.
pub fn biological_functions(kb: &KnowledgeBase, params: &ClassifyParams) -> BearingSet {
    biological_fixpoint(kb, params).members
}

/// Bearings whose structure was designed for the process realizing the
/// realizable. Organismal structures qualify too, for engineered organisms.
pub fn artifactual_functions(kb: &KnowledgeBase) -> BearingSet {
    kb.bearing_refs().filter(|&b| design_match(kb, b)).collect()
}

pub(crate) fn design_match(kb: &KnowledgeBase, b: BearingRef) -> bool {
    let bearing = kb.bearing(b);
    kb.realized_by(bearing.realizable)
        .is_some_and(|p| kb.designed_for(bearing.structure).contains(&p))
}
