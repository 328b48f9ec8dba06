use std::fs;
use std::process::{Command, Output};

use dilemma_core::corpus;
use dilemma_core::dsl::serialize;

fn dilemma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dilemma"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn run_all_prints_three_tables_in_theory_order() {
    let o = dilemma(&["run", "newcomb"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).is_empty());
    let text = stdout(&o);
    let at = |s: &str| text.find(s).unwrap();
    assert!(at("EDT") < at("CDT") && at("CDT") < at("FDT"));
    assert!(text.contains("onebox  990000  $990,000"));
    assert!(text.contains("twobox  501000  $501,000"));
}

#[test]
fn run_json_has_one_report_per_theory() {
    let o = dilemma(&["run", "newcomb", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let reports = v.as_array().unwrap();
    let theories: Vec<&str> = reports
        .iter()
        .map(|r| r["theory"].as_str().unwrap())
        .collect();
    assert_eq!(theories, ["edt", "cdt", "fdt"]);
    assert_eq!(reports[0]["per_action"][0]["value"], "990000");
    assert_eq!(reports[0]["per_action"][0]["dollars"], "$990,000");
    assert_eq!(reports[0]["per_action"][0]["exact"], true);
    assert_eq!(reports[1]["chosen"], serde_json::json!(["twobox"]));
}

#[test]
fn table_and_json_carry_the_same_numbers() {
    let table = stdout(&dilemma(&["run", "cosmic_ray"]));
    let v = json(&dilemma(&["run", "cosmic_ray", "--format", "json"]));
    for report in v.as_array().unwrap() {
        for row in report["per_action"].as_array().unwrap() {
            assert!(table.contains(row["value"].as_str().unwrap()));
            assert!(table.contains(row["dollars"].as_str().unwrap()));
        }
    }
    assert!(table.contains("~$1.000000"));
}

#[test]
fn transparent_newcomb_fdt_takes_one_box_on_full() {
    let o = dilemma(&[
        "run",
        "transparent_newcomb",
        "--theory",
        "fdt",
        "--obs",
        "full",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)[0]["chosen"], serde_json::json!(["onebox"]));
}

#[test]
fn parameters_reach_the_model() {
    let o = dilemma(&[
        "run",
        "smoking_lesion",
        "--theory",
        "fdt",
        "--param",
        "p=1/4",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = &json(&o)[0]["per_action"];
    assert_eq!(rows.as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_two_with_one_line() {
    for args in [
        vec!["run", "nosuch"],
        vec!["run", "newcomb", "--param", "nosuch=1"],
        vec!["run", "newcomb", "--param", "accuracy=2"],
        vec!["run", "newcomb", "--param", "accuracy"],
        vec!["run", "missing/file.dlm"],
        vec!["golden", "nosuch"],
        vec!["golden", "--param", "accuracy=1/2"],
    ] {
        let o = dilemma(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stdout(&o).is_empty(), "{args:?}");
        assert_eq!(stderr(&o).lines().count(), 1, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn params_with_a_file_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.dlm");
    fs::write(
        &path,
        serialize(
            corpus::load_default("newcomb")
                .unwrap()
                .model("fdt")
                .unwrap(),
        ),
    )
    .unwrap();
    let o = dilemma(&["run", path.to_str().unwrap(), "--param", "accuracy=1/2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_file_exits_three_with_spans() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.dlm");
    fs::write(
        &path,
        "var A in {x, y} prior {x: 1/2, y: 1/3}\nutility V(A) { (x) -> 1; (y) -> 0 }\ndesignate act=A value=V fdt {∅: A}\n",
    )
    .unwrap();
    let o = dilemma(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("bad.dlm:1:"), "{}", stderr(&o));
    assert!(!stderr(&o).contains("designate"));
}

#[test]
fn theory_errors_exit_four() {
    let o = dilemma(&[
        "run",
        "parfit_hitchhiker",
        "--theory",
        "fdt",
        "--obs",
        "desert",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("no intervention node"));
    let o = dilemma(&["run", "newcomb", "--obs", "full"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn file_models_run_like_corpus_models() {
    let o = dilemma(&[
        "run",
        "../../dilemmas/newcomb.dlm",
        "--theory",
        "fdt",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v[0]["model"], "../../dilemmas/newcomb.dlm");
    assert_eq!(v[0]["per_action"][0]["value"], "990000");
}

#[test]
fn golden_filter_restricts_to_one_suite() {
    let o = dilemma(&["golden", "newcomb", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["suites"].as_array().unwrap().len(), 1);
    assert_eq!(v["suites"][0]["suite"], "newcomb");
    assert_eq!(v["failed"], 0);
}

#[test]
fn golden_reports_every_suite_on_a_pristine_build() {
    let o = dilemma(&["golden", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(
        v["suites"].as_array().unwrap().len(),
        corpus::DILEMMAS.len()
    );
    assert_eq!(v["failed"], 0);
}

#[test]
fn golden_fails_on_a_corrupted_utility_table() {
    let suite = corpus::load_default("newcomb").unwrap();
    let bad = suite.model("fdt").unwrap().map_utility(|u| {
        if *u == dilemma_core::rational::int(1000) {
            dilemma_core::rational::int(2000)
        } else {
            u.clone()
        }
    });
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.dlm");
    fs::write(&path, serialize(&bad)).unwrap();
    let spec = format!("fdt={}", path.display());
    let o = dilemma(&["golden", "newcomb", "--model", &spec]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL"), "{text}");
    assert!(text.contains("expected 11000, computed"), "{text}");
}

#[test]
fn trace_shows_the_damascus_cycle() {
    let o = dilemma(&[
        "trace",
        "death_in_damascus",
        "--start",
        "damascus",
        "--ratify",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(
        v["status"],
        serde_json::json!({"kind": "cycle", "period": 2})
    );
    assert_eq!(v["ratification"]["prior"][0]["probability"], "1001/2000");
    let table = stdout(&dilemma(&[
        "trace",
        "death_in_damascus",
        "--start",
        "aleppo",
    ]));
    assert!(table.contains("cycle detected (period 2)"));
}

#[test]
fn trace_newcomb_converges_to_two_boxing() {
    let o = dilemma(&["trace", "newcomb"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("converged to twobox"));
}

#[test]
fn trace_with_zero_budget_prints_only_the_initial_state() {
    let o = dilemma(&[
        "trace",
        "newcomb",
        "--budget",
        "0",
        "--prior",
        "onebox=1/3,twobox=2/3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("initial: {onebox: 1/3, twobox: 2/3}"));
    assert!(text.contains("budget exhausted"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn trace_rejects_bad_priors() {
    let o = dilemma(&["trace", "newcomb", "--prior", "onebox=1/3,twobox=1/3"]);
    assert_eq!(o.status.code(), Some(4));
    let o = dilemma(&["trace", "newcomb", "--start", "nobox"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn fmt_check_and_write() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.dlm");
    let canonical = serialize(
        corpus::load_default("twin_pd")
            .unwrap()
            .model("fdt")
            .unwrap(),
    );
    fs::write(&path, canonical.replace("\n\n", "\n\n\n")).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(dilemma(&["fmt", p, "--check"]).status.code(), Some(1));
    assert_eq!(stdout(&dilemma(&["fmt", p])), canonical);
    assert_eq!(dilemma(&["fmt", p, "--write"]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(&path).unwrap(), canonical);
    let o = dilemma(&["fmt", p, "--check"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty() && stderr(&o).is_empty());
}

#[test]
fn help_goes_to_stdout() {
    let o = dilemma(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for cmd in ["run", "golden", "trace", "fmt"] {
        assert!(stdout(&o).contains(cmd));
    }
}
