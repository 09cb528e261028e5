use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_funrole");

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.kb"))
}

fn funrole(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Writes `contents` to a fresh file under the system temp dir.
fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("funrole-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn classify_soles_tsv() {
    let kb = scenario_path("soles");
    let o = funrole(&["classify", "--kb", kb.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<_> = text.lines().collect();
    assert_eq!(rows[0], "structure\trealizable\tlabel\trule");
    assert!(rows
        .contains(&"human_foot_sole\tshock_resistance\tBiologicalFunction\tcross-species-support"));
    assert!(rows.contains(&"shoe_sole\tshock_resistance\tArtifactualFunction\tdesign-match"));
    assert_eq!(rows.len(), 4);
}

#[test]
fn classify_json_is_an_array_of_rows() {
    let kb = scenario_path("hammer");
    let o = funrole(&["classify", "--kb", kb.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = value.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().any(|r| r["structure"] == "hammer"
        && r["realizable"] == "to_hammer_nails"
        && r["label"] == "Role"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let kb = scenario_path("obi_table1");
    let a = funrole(&["classify", "--kb", kb.to_str().unwrap(), "--format", "json"]);
    let b = funrole(&["classify", "--kb", kb.to_str().unwrap(), "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let c = funrole(&["export-axioms", "--kb", kb.to_str().unwrap()]);
    let d = funrole(&["export-axioms", "--kb", kb.to_str().unwrap()]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn out_flag_writes_the_same_report() {
    let kb = scenario_path("soles");
    let target = std::env::temp_dir().join(format!("funrole-out-{}.tsv", std::process::id()));
    let o = funrole(&[
        "classify",
        "--kb",
        kb.to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    let direct = funrole(&["classify", "--kb", kb.to_str().unwrap()]);
    assert_eq!(written, stdout(&direct));
    std::fs::remove_file(target).unwrap();
}

#[test]
fn missing_file_is_a_parse_failure() {
    let o = funrole(&["classify", "--kb", "/nonexistent/funrole.kb"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn syntax_error_reports_the_line() {
    let kb = temp_file("syntax.kb", "species human\nstructure\n");
    let o = funrole(&["validate", "--kb", kb.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn dangling_reference_is_invalid() {
    let kb = temp_file(
        "dangling.kb",
        "species human\nstructure hand category organism-part in human\nbears hand grasping prevalence 0.9\n",
    );
    let o = funrole(&["classify", "--kb", kb.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("grasping"), "{}", stderr(&o));
}

#[test]
fn validate_summarises_a_good_kb() {
    let kb = scenario_path("male_ant");
    let o = funrole(&["validate", "--kb", kb.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok: 3 species"), "{}", stdout(&o));
}

#[test]
fn bad_theta_is_invalid() {
    let kb = scenario_path("soles");
    let o = funrole(&["classify", "--kb", kb.to_str().unwrap(), "--theta", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_subcommand_is_invalid() {
    assert_eq!(funrole(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(funrole(&["--help"]).status.code(), Some(0));
}

#[test]
fn explain_names_failed_rules() {
    let kb = scenario_path("hand_walking");
    let o = funrole(&[
        "explain",
        "--kb",
        kb.to_str().unwrap(),
        "--structure",
        "human_hand",
        "--realizable",
        "walking_on",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("human_hand bears walking_on: Role"));
    assert!(text.contains("[FAIL drop-out]"));

    let kb = scenario_path("tumour");
    let o = funrole(&[
        "explain",
        "--kb",
        kb.to_str().unwrap(),
        "--structure",
        "tumour",
        "--realizable",
        "growing",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[FAIL drop-in]"), "{}", stdout(&o));
}

#[test]
fn explain_unknown_bearing_is_invalid() {
    let kb = scenario_path("soles");
    let o = funrole(&[
        "explain",
        "--kb",
        kb.to_str().unwrap(),
        "--structure",
        "shoe_sole",
        "--realizable",
        "walking_on",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn scenarios_run_by_name_and_all() {
    let o = funrole(&["scenario", "--all"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o)
            .lines()
            .filter(|l| l.starts_with("PASS "))
            .count(),
        11
    );
    let o = funrole(&["scenario", "tumour"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS tumour"));
    assert_eq!(funrole(&["scenario", "no_such"]).status.code(), Some(1));
    assert_eq!(funrole(&["scenario"]).status.code(), Some(1));
}

#[test]
fn export_scaffold_without_kb() {
    let o = funrole(&["export-axioms", "--no-classify"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = funrole::parse_obo(&stdout(&o)).unwrap();
    let union: Vec<_> = doc.term("FR:Function").unwrap().union_of().collect();
    assert_eq!(union, ["FR:BiologicalFunction", "FR:ArtifactualFunction"]);
    assert_eq!(funrole(&["export-axioms"]).status.code(), Some(1));
}

#[test]
fn export_places_realizables() {
    let kb = scenario_path("hammer");
    let o = funrole(&["export-axioms", "--kb", kb.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let doc = funrole::parse_obo(&stdout(&o)).unwrap();
    let to_hit: Vec<_> = doc.term("to_hit").unwrap().is_a().collect();
    assert_eq!(to_hit, ["FR:ArtifactualFunction"]);
    let nails: Vec<_> = doc.term("to_hammer_nails").unwrap().is_a().collect();
    assert_eq!(nails, ["FR:RealizableEntity"]);
}

#[test]
fn disjointness_violation_goes_to_stderr() {
    let kb = scenario_path("synthetic_bacterium");
    let o = funrole(&[
        "classify",
        "--kb",
        kb.to_str().unwrap(),
        "--assert-disjoint",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("violation:"), "{}", stderr(&o));
}

const AUDIT_OBO: &str = "format-version: 1.2

[Term]
id: BFO:0000023
name: role

[Term]
id: FR:Function
name: function

[Term]
id: shock_resistance
name: shock resistance
is_a: BFO:0000023

[Term]
id: X:9
name: unrelated
";

#[test]
fn audit_flags_function_placed_as_role() {
    let obo = temp_file("audit.obo", AUDIT_OBO);
    let kb = scenario_path("soles");
    let o = funrole(&[
        "audit-obo",
        "--obo",
        obo.to_str().unwrap(),
        "--kb",
        kb.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.ends_with("MISMATCH")).count(), 3);
    assert!(
        text.ends_with("matched 1 terms, skipped 3, 3 mismatches\n"),
        "{text}"
    );
}

#[test]
fn audit_agreement_has_no_mismatches() {
    let obo = temp_file(
        "agree.obo",
        &AUDIT_OBO.replace("is_a: BFO:0000023", "is_a: FR:Function"),
    );
    let kb = scenario_path("soles");
    let o = funrole(&[
        "audit-obo",
        "--obo",
        obo.to_str().unwrap(),
        "--kb",
        kb.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("0 mismatches\n"), "{}", stdout(&o));
}

#[test]
fn audit_rejects_malformed_obo() {
    let obo = temp_file("bad.obo", "[Term]\nname: no id\n");
    let kb = scenario_path("soles");
    let o = funrole(&[
        "audit-obo",
        "--obo",
        obo.to_str().unwrap(),
        "--kb",
        kb.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn in_process_run_matches_binary() {
    let kb = scenario_path("soles");
    let args = ["funrole", "classify", "--kb", kb.to_str().unwrap()];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = funrole::cli::run(args, &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(out, funrole(&args[1..]).stdout);
}
