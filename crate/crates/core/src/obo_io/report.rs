use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::inference::{ClassificationReport, ExplanationTrace, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Tsv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(format!("unknown report format `{s}`")),
        }
    }
}

pub const TSV_HEADER: &str = "structure\trealizable\tlabel\trule";

#[derive(Serialize)]
struct Row<'a> {
    structure: &'a str,
    realizable: &'a str,
    label: Label,
    rule: String,
    trace: Vec<String>,
}

fn sorted_rows(report: &ClassificationReport) -> Vec<&ExplanationTrace> {
    let mut rows: Vec<_> = report.traces.iter().collect();
    rows.sort_by(|a, b| (&a.structure, &a.realizable).cmp(&(&b.structure, &b.realizable)));
    rows
}

pub fn write_report(report: &ClassificationReport, format: ReportFormat) -> String {
    let rows = sorted_rows(report);
    match format {
        ReportFormat::Tsv => {
            let mut out = String::from(TSV_HEADER);
            out.push('\n');
            for t in rows {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    t.structure,
                    t.realizable,
                    t.label,
                    t.rule_summary()
                )
                .unwrap();
            }
            out
        }
        ReportFormat::Json => {
            let rows: Vec<_> = rows
                .into_iter()
                .map(|t| Row {
                    structure: &t.structure,
                    realizable: &t.realizable,
                    label: t.label,
                    rule: t.rule_summary(),
                    trace: t
                        .checks
                        .iter()
                        .map(ToString::to_string)
                        .chain(t.support_chain.iter().map(|e| format!("support: {e}")))
                        .collect(),
                })
                .collect();
            let mut out = serde_json::to_string_pretty(&rows).expect("rows serialize");
            out.push('\n');
            out
        }
    }
}
