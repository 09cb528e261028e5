//! Built-in worked examples with their expected classifications.
//!
//! The knowledge bases live in `scenarios/*.kb` next to the crate manifest
//! and are embedded at compile time, so the same files can be fed to the
//! command-line tool.

use std::fmt;

use thiserror::Error;

use crate::inference::{classify, ClassifyParams, Label};
use crate::kb::{Category, KnowledgeBase};
use crate::obo_io::native::{parse_native, LocatedKbError, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    pub structure: String,
    pub realizable: String,
    pub label: Label,
}

impl Expectation {
    pub fn new(structure: &str, realizable: &str, label: Label) -> Self {
        Expectation {
            structure: structure.into(),
            realizable: realizable.into(),
            label,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub kb_source: String,
    pub expectations: Vec<Expectation>,
    pub params: ClassifyParams,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario {name}: {source}")]
    Syntax {
        name: String,
        #[source]
        source: SyntaxError,
    },
    #[error("scenario {name}: {source}")]
    Invalid {
        name: String,
        #[source]
        source: LocatedKbError,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationResult {
    pub expectation: Expectation,
    /// `None` when the knowledge base has no such bearing.
    pub actual: Option<Label>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub name: String,
    pub results: Vec<ExpectationResult>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ExpectationResult> {
        self.results.iter().filter(|r| !r.passed)
    }
}

impl fmt::Display for ScenarioOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{status} {}", self.name)?;
        for r in &self.results {
            let actual = r.actual.map_or("(no such bearing)", Label::as_str);
            writeln!(
                f,
                "  {}\t{}\t{}\texpected {}\tgot {}",
                if r.passed { "ok" } else { "MISMATCH" },
                r.expectation.structure,
                r.expectation.realizable,
                r.expectation.label,
                actual
            )?;
        }
        Ok(())
    }
}

impl Scenario {
    pub fn kb(&self) -> Result<KnowledgeBase, ScenarioError> {
        let doc = parse_native(&self.kb_source).map_err(|source| ScenarioError::Syntax {
            name: self.name.clone(),
            source,
        })?;
        doc.build().map_err(|source| ScenarioError::Invalid {
            name: self.name.clone(),
            source,
        })
    }
}

pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioOutcome, ScenarioError> {
    let kb = scenario.kb()?;
    let report = classify(&kb, &scenario.params);
    let results = scenario
        .expectations
        .iter()
        .map(|e| {
            let actual = report.label_of(&e.structure, &e.realizable);
            ExpectationResult {
                expectation: e.clone(),
                actual,
                passed: actual == Some(e.label),
            }
        })
        .collect();
    Ok(ScenarioOutcome {
        name: scenario.name.clone(),
        results,
    })
}

macro_rules! scenario_source {
    ($name:literal) => {
        ($name, include_str!(concat!("../scenarios/", $name, ".kb")))
    };
}

/// Names and native-format sources of the shipped scenarios.
pub const SOURCES: [(&str, &str); 11] = [
    scenario_source!("soles"),
    scenario_source!("tumour"),
    scenario_source!("male_ant"),
    scenario_source!("hand_walking"),
    scenario_source!("larynx_speech"),
    scenario_source!("phone_fingers"),
    scenario_source!("hammer"),
    scenario_source!("synthetic_bacterium"),
    scenario_source!("s35_label"),
    scenario_source!("reference_substance"),
    scenario_source!("obi_table1"),
];

fn expectations(name: &str) -> Vec<Expectation> {
    use Label::*;
    let e = Expectation::new;
    match name {
        "soles" => vec![
            e("human_foot_sole", "shock_resistance", BiologicalFunction),
            e("chimp_foot_sole", "shock_resistance", BiologicalFunction),
            e("shoe_sole", "shock_resistance", ArtifactualFunction),
        ],
        "tumour" => vec![
            e("tumour", "growing", Role),
            e("human_liver", "detoxification", BiologicalFunction),
        ],
        "male_ant" => vec![
            e("male_ant", "drone_behaviour", BiologicalFunction),
            e("male_polyctena", "drone_behaviour", BiologicalFunction),
            e("male_aquilonia", "drone_behaviour", BiologicalFunction),
        ],
        "hand_walking" => vec![
            e("human_hand", "walking_on", Role),
            e("chimp_hand", "walking_on", BiologicalFunction),
            e("gorilla_hand", "walking_on", BiologicalFunction),
            e("human_hand", "shock_resistance", Role),
            e("chimp_hand", "shock_resistance", BiologicalFunction),
        ],
        "larynx_speech" => vec![
            e("human_larynx", "speech", Role),
            e("human_larynx", "vocalisation", BiologicalFunction),
            e("chimp_larynx", "vocalisation", BiologicalFunction),
        ],
        "phone_fingers" => vec![
            e("human_finger", "phone_operation", Role),
            e("human_thumb", "phone_operation", Role),
            e("human_finger", "grasping", BiologicalFunction),
        ],
        "hammer" => vec![
            e("hammer", "to_hit", ArtifactualFunction),
            e("hammer", "to_hammer_nails", Role),
            e("nail_hammer", "to_hammer_nails", ArtifactualFunction),
        ],
        "synthetic_bacterium" => vec![
            e("sensor_colony", "toxin_detection", BothFunction),
            e("wild_colony", "toxin_detection", BiologicalFunction),
        ],
        "s35_label" => vec![
            e("s35_ctp", "label_capability", ArtifactualFunction),
            e("fluorescent_mineral", "label_capability", Role),
        ],
        "reference_substance" => vec![
            e(
                "lambda_hindiii",
                "reference_capability",
                ArtifactualFunction,
            ),
            e(
                "calibration_standard",
                "reference_capability",
                ArtifactualFunction,
            ),
            e("untreated_sample", "reference_capability", Role),
        ],
        "obi_table1" => vec![
            e("human_experimenter", "perturb", Role),
            e("computer", "consume_data", Role),
            e("campfire", "heat", Role),
            e("distant_galaxy", "magnify", Role),
            e("perturbation_device", "perturb", ArtifactualFunction),
            e("data_logger", "consume_data", ArtifactualFunction),
            e("heater", "heat", ArtifactualFunction),
            e("telescope_lens", "magnify", ArtifactualFunction),
        ],
        _ => Vec::new(),
    }
}

pub fn builtin_scenarios() -> Vec<Scenario> {
    SOURCES
        .iter()
        .map(|&(name, source)| Scenario {
            name: name.to_owned(),
            kb_source: source.to_owned(),
            expectations: expectations(name),
            params: ClassifyParams::default(),
        })
        .collect()
}

pub fn find_scenario(name: &str) -> Option<Scenario> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

/// The older anatomy-based rule for biological function: the bearer must
/// be part of an organism (and owe its structure to gene expression, which
/// every organismal structure here does). Kept to show where homology-based
/// classification disagrees with it.
pub fn organism_part_rule(kb: &KnowledgeBase, structure: &str, realizable: &str) -> Option<bool> {
    let b = kb.bearing_ref(structure, realizable)?;
    Some(kb.structure(kb.bearing(b).structure).category == Category::OrganismPart)
}
