use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use fkcheb_cli::{build_report, load_problem, parse_problem, run, CliError, Mode, Report};

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("problems")
        .join(name)
}

fn fkcheb() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fkcheb"))
}

#[test]
fn bundled_problems_load() {
    let e = load_problem(&problem("example1.json")).unwrap();
    assert_eq!((e.degree, e.pieces, e.mode), (3, 2, Mode::Check));
    assert_eq!(e.initial_model.unwrap().internal_knots(), &[0.0]);
    let c = load_problem(&problem("counterexample.json")).unwrap();
    assert_eq!((c.degree, c.pieces, c.mode), (1, 2, Mode::FitHeuristic));
    assert!(load_problem(&problem("example1_points.json"))
        .unwrap()
        .target
        .is_discrete());
}

fn input_error(text: &str) -> String {
    match parse_problem(text) {
        Err(CliError::Input(msg)) => msg,
        other => panic!("expected an input error, got {other:?}"),
    }
}

#[test]
fn schema_errors_name_the_field() {
    assert!(input_error("").starts_with("schema"));
    let base = fs::read_to_string(problem("perfect_fit.json")).unwrap();
    let msg = input_error(&base.replace("\"degree\": 1", "\"degree\": \"one\""));
    assert!(msg.starts_with("degree"), "{msg}");
    let msg = input_error(&base.replace("\"mode\": \"analyze\"", "\"mode\": \"guess\""));
    assert!(msg.starts_with("mode"), "{msg}");
    let msg = input_error(&base.replace("\"degree\": 1", "\"degree\": 0"));
    assert!(msg.starts_with("degree"), "{msg}");
    let msg =
        input_error(&base.replace("\"mode\"", "\"tolerances\": {\"hull_tol\": -1.0}, \"mode\""));
    assert!(msg.starts_with("tolerances.hull_tol"), "{msg}");
    let msg = input_error(&base.replace("\"mode\"", "\"grid_n\": 3, \"mode\""));
    assert!(msg.starts_with("grid_n"), "{msg}");
    let msg = input_error(&base.replace("\"knots\": [1.0]", "\"knots\": [5.0]"));
    assert!(msg.starts_with("initial_model.knots"), "{msg}");
    let msg = input_error(&base.replace("\"knots\": [1.0]", "\"knots\": []"));
    assert!(msg.starts_with("initial_model.knots"), "{msg}");
    let msg = input_error(&base.replace("[[-1.0], [2.0]]", "[[-1.0]]"));
    assert!(msg.starts_with("initial_model.blocks"), "{msg}");
    let msg = input_error(&base.replace("\"fs\": [1.0, 0.0, 2.0]", "\"fs\": [1.0, 0.0]"));
    assert!(msg.starts_with("target"), "{msg}");
}

#[test]
fn unknown_expression_is_rejected() {
    let text = fs::read_to_string(problem("counterexample.json")).unwrap();
    let msg = input_error(&text.replacen("\"sin\"", "\"tan\"", 1));
    assert!(msg.starts_with("target.pieces[0].expr"), "{msg}");
    assert!(msg.contains("tan"), "{msg}");
}

#[test]
fn analyze_and_check_need_a_model() {
    let text = fs::read_to_string(problem("counterexample.json")).unwrap();
    let msg = input_error(&text.replace("fit-heuristic", "check"));
    assert!(msg.starts_with("initial_model"), "{msg}");
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["example1.json", "counterexample.json", "perfect_fit.json"] {
        let spec = load_problem(&problem(name)).unwrap();
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        run(&spec, &a).unwrap();
        run(&spec, &b).unwrap();
        for file in ["report.json", "deviation.csv", "extremes.csv"] {
            assert_eq!(
                fs::read(a.join(file)).unwrap(),
                fs::read(b.join(file)).unwrap(),
                "{name} {file}"
            );
        }
        let text = fs::read_to_string(a.join("report.json")).unwrap();
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back, build_report(&spec).unwrap());
        assert_eq!(back.to_json(), text);
    }
}

#[test]
fn example_verdicts() {
    let r = build_report(&load_problem(&problem("example1_points.json")).unwrap()).unwrap();
    assert_eq!(r.summary.psi, 1.0);
    assert!(r.summary.theorem1.passes);
    assert!(!r.summary.alternation_stationary);
    assert!(!r.summary.inf_stationary);
    assert!(r.analysis.is_none());

    let r = build_report(&load_problem(&problem("counterexample.json")).unwrap()).unwrap();
    assert!(!r.summary.whole_domain.passes);
    assert_eq!(
        (
            r.summary.whole_domain.required,
            r.summary.whole_domain.found
        ),
        (5, 4)
    );
    assert!(!r.summary.inf_stationary);
    assert_eq!(r.heuristic.unwrap().breakpoints.len(), 1);

    let r = build_report(&load_problem(&problem("perfect_fit.json")).unwrap()).unwrap();
    assert_eq!(r.summary.psi, 0.0);
    assert!(r.summary.inf_stationary && r.summary.degenerate);
}

#[test]
fn csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let spec = load_problem(&problem("example1_points.json")).unwrap();
    run(&spec, dir.path()).unwrap();
    let dev = fs::read_to_string(dir.path().join("deviation.csv")).unwrap();
    let mut lines = dev.lines();
    assert_eq!(lines.next(), Some("t,f,s,s_minus_f"));
    assert_eq!(lines.count(), 7);
    let ext = fs::read_to_string(dir.path().join("extremes.csv")).unwrap();
    assert_eq!(ext.lines().count(), 8);
    assert!(ext.contains("0,-1,-1,neutral_knot,not_applicable,1"));
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let ok = fkcheb()
        .args(["--problem", problem("perfect_fit.json").to_str().unwrap()])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(ok.code(), Some(0));
    assert!(out.join("report.json").exists());

    let missing = fkcheb()
        .args(["--problem", "/nonexistent.json"])
        .env("FKCHEB_OUT", &out)
        .status()
        .unwrap();
    assert_eq!(missing.code(), Some(2));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let unwritable = fkcheb()
        .args(["--problem", problem("perfect_fit.json").to_str().unwrap()])
        .args(["--out", blocker.join("sub").to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(unwritable.code(), Some(2));

    let bad_grid = fkcheb()
        .args([
            "--problem",
            problem("perfect_fit.json").to_str().unwrap(),
            "--grid",
            "2",
        ])
        .env("FKCHEB_OUT", &out)
        .status()
        .unwrap();
    assert_eq!(bad_grid.code(), Some(2));
}

#[test]
fn env_var_sets_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from_env");
    let st = fkcheb()
        .args([
            "--problem",
            problem("example1.json").to_str().unwrap(),
            "--mode",
            "fit-fixed",
        ])
        .env("FKCHEB_OUT", &out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let r = Report::from_json(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(r.mode, Mode::FitFixed);
    assert!(r.summary.psi < 0.999);
    assert!(r.summary.inf_stationary);
}

#[test]
fn exit_codes_by_error_kind() {
    assert_eq!(CliError::Input("x".into()).exit_code(), 2);
    assert_eq!(CliError::Output("x".into()).exit_code(), 2);
    let e = fkcheb_core::FkError::InvalidArgument("x".into());
    assert_eq!(CliError::Solver(e).exit_code(), 3);
}
