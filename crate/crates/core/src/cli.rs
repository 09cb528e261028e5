//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 parse error
//! (including unreadable files), 3 scenario mismatch.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::inference::{classify, explain, ClassificationReport, ClassifyParams, Label, WorldMode};
use crate::kb::KnowledgeBase;
use crate::obo_io::{
    export_axiomatisation, parse_native, parse_obo, serialize_obo, upper_scaffold, write_report,
    OntologyDocument, ReportFormat,
};
use crate::scenarios::{builtin_scenarios, find_scenario, run_scenario, ScenarioError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "funrole", version)]
#[command(
    about = "Classify realizable entities as biological functions, artifactual functions or roles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Label every bearing in a knowledge base
    Classify {
        #[arg(long)]
        kb: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = FormatArg::Tsv)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Show the condition checks behind one bearing's label
    Explain {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        structure: String,
        #[arg(long)]
        realizable: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Parse and validate a knowledge base
    Validate {
        #[arg(long)]
        kb: PathBuf,
    },
    /// Export the function/role axiomatisation as OBO
    ExportAxioms {
        #[arg(long)]
        kb: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        /// Emit only the upper-level classes
        #[arg(long)]
        no_classify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run built-in scenarios against their expected labels
    Scenario {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        all: bool,
    },
    /// Compare an OBO file's role/function placement with inferred labels
    AuditObo {
        #[arg(long)]
        obo: PathBuf,
        #[arg(long)]
        kb: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    /// Prevalence threshold; "most" means strictly above it
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Closed)]
    pub mode: ModeArg,
    /// Treat the function subclasses and role as disjoint
    #[arg(long)]
    pub assert_disjoint: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Closed,
    Open,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatArg {
    Tsv,
    Json,
}

/// A failed command: exit code plus message for standard error.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

impl ParamArgs {
    fn to_params(&self) -> Result<ClassifyParams, Failure> {
        let mode = match self.mode {
            ModeArg::Closed => WorldMode::Closed,
            ModeArg::Open => WorldMode::Open,
        };
        ClassifyParams::new(self.theta, mode, self.assert_disjoint)
            .map_err(|e| Failure::invalid(e.to_string()))
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn load_kb(path: &Path) -> Result<KnowledgeBase, Failure> {
    let text = read(path)?;
    let doc =
        parse_native(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    doc.build()
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, target: Option<&Path>, text: &str) -> CmdResult {
    match target {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?,
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::invalid(e.to_string()))?,
    }
    Ok(EXIT_OK)
}

fn report_diagnostics(report: &ClassificationReport, err: &mut dyn Write) {
    for c in &report.conflicts {
        let _ = writeln!(
            err,
            "warning: {} is asserted a function of {} but inferred {}",
            c.realizable, c.structure, c.inferred
        );
    }
    for v in &report.violations {
        let crate::inference::Violation::DisjointFunctionsOverlap {
            structure,
            realizable,
        } = v;
        let _ = writeln!(
            err,
            "violation: {realizable} of {structure} is both a biological and an artifactual function under asserted disjointness"
        );
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match command {
        Command::Classify {
            kb,
            params,
            format,
            out: target,
        } => {
            let params = params.to_params()?;
            let kb = load_kb(&kb)?;
            let report = classify(&kb, &params);
            report_diagnostics(&report, err);
            let format = match format {
                FormatArg::Tsv => ReportFormat::Tsv,
                FormatArg::Json => ReportFormat::Json,
            };
            emit(out, target.as_deref(), &write_report(&report, format))
        }
        Command::Explain {
            kb,
            structure,
            realizable,
            params,
        } => {
            let params = params.to_params()?;
            let kb = load_kb(&kb)?;
            let trace = explain(&kb, &structure, &realizable, &params)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            emit(out, None, &trace.to_string())
        }
        Command::Validate { kb } => {
            let kb = load_kb(&kb)?;
            let summary = format!(
                "ok: {} species, {} structures, {} realizables, {} processes, {} bearings, {} homology groups\n",
                kb.species().len(),
                kb.structures().len(),
                kb.realizables().len(),
                kb.processes().len(),
                kb.bearings().len(),
                kb.groups().len()
            );
            emit(out, None, &summary)
        }
        Command::ExportAxioms {
            kb,
            params,
            no_classify,
            out: target,
        } => {
            let params = params.to_params()?;
            let doc = if no_classify {
                upper_scaffold(params.assert_disjoint)
            } else {
                let path = kb.ok_or_else(|| {
                    Failure::invalid("--kb is required unless --no-classify is given")
                })?;
                let kb = load_kb(&path)?;
                let report = classify(&kb, &params);
                report_diagnostics(&report, err);
                export_axiomatisation(&kb, &report).map_err(|e| Failure::invalid(e.to_string()))?
            };
            emit(out, target.as_deref(), &serialize_obo(&doc))
        }
        Command::Scenario { name, all } => {
            let scenarios = match (name, all) {
                (_, true) => builtin_scenarios(),
                (Some(name), false) => vec![find_scenario(&name)
                    .ok_or_else(|| Failure::invalid(format!("unknown scenario `{name}`")))?],
                (None, false) => {
                    return Err(Failure::invalid("give a scenario name or --all"));
                }
            };
            let mut text = String::new();
            let mut all_passed = true;
            for scenario in &scenarios {
                let outcome = run_scenario(scenario).map_err(|e| match e {
                    ScenarioError::Syntax { .. } => Failure::parse(e.to_string()),
                    ScenarioError::Invalid { .. } => Failure::invalid(e.to_string()),
                })?;
                all_passed &= outcome.passed();
                text.push_str(&outcome.to_string());
            }
            emit(out, None, &text)?;
            Ok(if all_passed { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::AuditObo { obo, kb, params } => {
            let params = params.to_params()?;
            let text = read(&obo)?;
            let doc =
                parse_obo(&text).map_err(|e| Failure::parse(format!("{}: {e}", obo.display())))?;
            let kb = load_kb(&kb)?;
            let report = classify(&kb, &params);
            let audit = audit(&doc, &kb, &report);
            emit(out, None, &audit.to_string())
        }
    }
}

/// Role/function branch an ontology places a term under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Role,
    Function,
    BiologicalFunction,
    ArtifactualFunction,
    Unplaced,
}

impl Placement {
    fn of_term(id: &str, name: Option<&str>) -> Option<Placement> {
        let name = name.unwrap_or("").trim().to_lowercase();
        match (id, name.as_str()) {
            ("BFO:0000023" | "FR:Role", _) | (_, "role") => Some(Placement::Role),
            ("FR:BiologicalFunction", _) | (_, "biological function" | "biologicalfunction") => {
                Some(Placement::BiologicalFunction)
            }
            ("FR:ArtifactualFunction", _) | (_, "artifactual function" | "artifactualfunction") => {
                Some(Placement::ArtifactualFunction)
            }
            ("BFO:0000034" | "FR:Function", _) | (_, "function") => Some(Placement::Function),
            _ => None,
        }
    }

    pub fn accepts(self, label: Label) -> Option<bool> {
        match (self, label) {
            (Placement::Unplaced, _) | (_, Label::Undetermined) => None,
            (Placement::Role, l) => Some(l == Label::Role),
            (Placement::Function, l) => Some(l.is_function()),
            (Placement::BiologicalFunction, l) => Some(l.is_biological()),
            (Placement::ArtifactualFunction, l) => Some(l.is_artifactual()),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Placement::Role => "role",
            Placement::Function => "function",
            Placement::BiologicalFunction => "biological function",
            Placement::ArtifactualFunction => "artifactual function",
            Placement::Unplaced => "unplaced",
        }
    }
}

/// Nearest role/function ancestor reached by a breadth-first is_a walk.
pub fn placement(doc: &OntologyDocument, term_id: &str) -> Placement {
    let mut seen = HashSet::from([term_id.to_owned()]);
    let mut queue: VecDeque<&str> = doc
        .term(term_id)
        .map(|t| t.is_a().collect())
        .unwrap_or_default();
    while let Some(id) = queue.pop_front() {
        if !seen.insert(id.to_owned()) {
            continue;
        }
        let term = doc.term(id);
        if let Some(p) = Placement::of_term(id, term.and_then(|t| t.name())) {
            return p;
        }
        if let Some(t) = term {
            queue.extend(t.is_a());
        }
    }
    Placement::Unplaced
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditRow {
    pub term: String,
    pub realizable: String,
    pub placement: Placement,
    pub structure: String,
    pub label: Label,
    /// `None` when the comparison is not meaningful (unplaced term or
    /// undetermined label).
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Audit {
    pub rows: Vec<AuditRow>,
    pub matched_terms: usize,
    pub skipped_terms: usize,
}

impl Audit {
    pub fn mismatches(&self) -> impl Iterator<Item = &AuditRow> {
        self.rows.iter().filter(|r| r.agrees == Some(false))
    }
}

impl std::fmt::Display for Audit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut text = String::from("term\trealizable\tplacement\tstructure\tlabel\tstatus\n");
        for r in &self.rows {
            let status = match r.agrees {
                Some(true) => "agree",
                Some(false) => "MISMATCH",
                None => "n/a",
            };
            writeln!(
                text,
                "{}\t{}\t{}\t{}\t{}\t{status}",
                r.term,
                r.realizable,
                r.placement.as_str(),
                r.structure,
                r.label
            )?;
        }
        writeln!(
            text,
            "matched {} terms, skipped {}, {} mismatches",
            self.matched_terms,
            self.skipped_terms,
            self.mismatches().count()
        )?;
        f.write_str(&text)
    }
}

/// Matches OBO terms to realizables by exact id, then by case-insensitive
/// name, and compares each term's placement with every inferred label of
/// that realizable.
pub fn audit(doc: &OntologyDocument, kb: &KnowledgeBase, report: &ClassificationReport) -> Audit {
    let mut audit = Audit::default();
    let mut matched = BTreeSet::new();
    for term in &doc.terms {
        let realizable = kb.realizable_ref(&term.id).or_else(|| {
            let name = term.name()?.trim().to_lowercase();
            kb.realizables()
                .iter()
                .find(|r| r.name.to_lowercase() == name || r.id.to_lowercase() == name)
                .and_then(|r| kb.realizable_ref(&r.id))
        });
        let Some(r) = realizable else {
            audit.skipped_terms += 1;
            continue;
        };
        audit.matched_terms += 1;
        matched.insert(r);
        let placement = placement(doc, &term.id);
        let realizable_id = &kb.realizable(r).id;
        for trace in report
            .traces
            .iter()
            .filter(|t| &t.realizable == realizable_id)
        {
            audit.rows.push(AuditRow {
                term: term.id.clone(),
                realizable: realizable_id.clone(),
                placement,
                structure: trace.structure.clone(),
                label: trace.label,
                agrees: placement.accepts(trace.label),
            });
        }
    }
    audit
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_classify_flags() {
        let cli = Cli::try_parse_from([
            "funrole",
            "classify",
            "--kb",
            "a.kb",
            "--theta",
            "0.7",
            "--mode",
            "open",
            "--format",
            "json",
            "--assert-disjoint",
        ])
        .unwrap();
        match cli.command {
            Command::Classify {
                kb,
                params,
                format,
                out,
            } => {
                assert_eq!(kb, PathBuf::from("a.kb"));
                assert_eq!(params.theta, 0.7);
                assert_eq!(params.mode, ModeArg::Open);
                assert!(params.assert_disjoint);
                assert_eq!(format, FormatArg::Json);
                assert!(out.is_none());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            ["funrole", "classify", "--kb", "x", "--bogus"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_INVALID);
        assert!(!err.is_empty());
    }

    #[test]
    fn theta_out_of_range_is_invalid() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            ["funrole", "export-axioms", "--no-classify", "--theta", "3"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_INVALID);
    }

    #[test]
    fn placement_walks_is_a() {
        let doc = parse_obo(
            "[Term]\nid: BFO:0000023\nname: role\n\n[Term]\nid: OBI:1\nname: reagent role\nis_a: BFO:0000023\n\n[Term]\nid: OBI:2\nname: label role\nis_a: OBI:1\n\n[Term]\nid: OBI:3\nname: loose\n",
        )
        .unwrap();
        assert_eq!(placement(&doc, "OBI:2"), Placement::Role);
        assert_eq!(placement(&doc, "OBI:3"), Placement::Unplaced);
        assert_eq!(placement(&doc, "BFO:0000023"), Placement::Unplaced);
    }

    #[test]
    fn placement_survives_cycles() {
        let doc = parse_obo("[Term]\nid: A\nis_a: B\n\n[Term]\nid: B\nis_a: A\n").unwrap();
        assert_eq!(placement(&doc, "A"), Placement::Unplaced);
    }
}
