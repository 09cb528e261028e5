//! Classifies realizable entities borne by continuants as biological
//! functions, artifactual functions, both, or roles.
//!
//! Biological function is defined through homology: a bearing qualifies when
//! most individuals of the bearer's species have it and a homologous
//! structure in a distinct, closely related species bears the same
//! realizable as a biological function. The definition refers to itself and
//! is evaluated as a greatest fixpoint. Artifactual function comes from
//! design, and a role is whatever is known to be neither.
//!
//! ```
//! use funrole::{classify, parse_native, ClassifyParams, Label};
//!
//! let kb = parse_native(
//!     "species human\nspecies chimp\nrelated human chimp\n\
//!      structure human_sole category organism-part in human\n\
//!      structure chimp_sole category organism-part in chimp\n\
//!      homolog human_sole chimp_sole\n\
//!      realizable shock_resistance\n\
//!      bears human_sole shock_resistance prevalence 0.98\n\
//!      bears chimp_sole shock_resistance prevalence 0.97\n",
//! )
//! .unwrap()
//! .build()
//! .unwrap();
//! let report = classify(&kb, &ClassifyParams::default());
//! assert_eq!(
//!     report.label_of("human_sole", "shock_resistance"),
//!     Some(Label::BiologicalFunction)
//! );
//! ```

pub mod cli;
pub mod inference;
pub mod kb;
pub mod obo_io;
pub mod scenarios;

pub use inference::{
    artifactual_functions, biological_functions, brute_force_biological, candidate_set, classify,
    explain, support_operator, ClassificationReport, ClassifyParams, ExplanationTrace, Label,
    WorldMode,
};
pub use kb::{build_kb, KbError, KnowledgeBase, Record};
pub use obo_io::{
    export_axiomatisation, parse_native, parse_obo, serialize_native, serialize_obo, write_report,
    ReportFormat,
};
pub use scenarios::{builtin_scenarios, run_scenario, Scenario};
