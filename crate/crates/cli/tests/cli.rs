use std::path::{Path, PathBuf};
use std::process::Command;

use affthermo::geometry::io;
use affthermo_cli::document::{Entry, IfsDocument, MapEntry, Options};
use affthermo_cli::run_with;
use proptest::prelude::*;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut argv = vec!["affthermo"];
    argv.extend_from_slice(args);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn value(report: &str, key: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
        .to_string()
}

fn num(report: &str, key: &str) -> f64 {
    value(report, key).parse().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn affdim_brackets_the_similarity_dimension() {
    let r = run(&["affdim", &data("similarities.json"), "--tol", "1e-4"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let (lo, hi) = (num(&r.out, "lo"), num(&r.out, "hi"));
    let oracle = 3f64.ln() / 2f64.ln();
    // the bounds are printed at 12 digits, so allow that much slack
    assert!(lo <= oracle + 1e-11 && oracle <= hi + 1e-11, "[{lo}, {hi}]");
    assert!(hi - lo <= 1e-4);
    assert_eq!(value(&r.out, "status"), "separated");
}

#[test]
fn pressure_curve_shows_the_jump_at_one() {
    let r = run(&[
        "pressure-curve",
        &data("discontinuous.json"),
        "--kind",
        "full",
        "--s-from",
        "1",
        "--s-to",
        "2",
        "--steps",
        "2",
        "--depth",
        "10",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let rows: Vec<Vec<&str>> = r.out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(r.out.lines().next().unwrap(), "s,kind,depth,lower,upper,certificate");
    let s: Vec<&str> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(s, ["1", "1.5", "2"]);
    let upper: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    let lower: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!((upper[0] - std::f64::consts::LN_2).abs() < 1e-11);
    assert_eq!(&upper[1..], &[0.0, 0.0]);
    assert_eq!(lower, upper);
}

#[test]
fn auto_kind_follows_the_exponent() {
    let r = run(&["pressure-curve", &data("discontinuous.json"), "--steps", "4", "--depth", "6"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let kinds: Vec<&str> = r.out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(kinds, ["full", "sigma", "sigma", "invertible", "invertible"]);
}

#[test]
fn zero_letter_breaks_continuity_at_zero() {
    let r = run(&["analyze", &data("zero_letter.json")]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(value(&r.out, "continuityAtZero.value"), "false");
    assert_eq!(value(&r.out, "zeroProduct.status"), "found");
    assert_eq!(value(&r.out, "rankProfile"), "[0, 2]");
}

#[test]
fn analyze_reports_a_common_fixed_point() {
    let doc = r#"{"maps": [
        {"matrix": [[0.5, 0], [0, 0.25]], "translation": [0.5, 0.75]},
        {"matrix": [[0, 0], [0, 0]], "translation": [1, 1]}
    ]}"#;
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["analyze", &write(dir.path(), "d.json", doc), "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["commonFixedPoint"], serde_json::json!([1.0, 1.0]));
    let r = run(&["analyze", &data("dominated.json"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert!(v["commonFixedPoint"].is_null());
    assert_eq!(v["dominated"]["status"], "certified");
    assert_eq!(v["continuityAtOne"]["value"], false);
}

#[test]
fn malformed_documents_name_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("{\n  \"maps\": [\n    {\"matrix\": [[1, 0], [0, \"1/0\"]]}\n  ]\n}", 3),
        ("{\n  \"maps\": []\n}", 3),
        ("{\n  \"maps\": [\n    {\"matrix\": [[1, 0], [0, 1]]},\n  ]\n}", 4),
        ("{\"maps\": [{\"matrix\": [[1, 0]]}]}", 1),
        ("{\"name\": \"x\",\n\"maps\": [{\"matrix\": [[1, 0], [0, 1]]}],\n\"options\": {\"seed\": -1}}", 3),
    ];
    for (text, line) in cases {
        let r = run(&["analyze", &write(dir.path(), "bad.json", text)]);
        assert_eq!(r.code, 2, "{text}");
        assert!(
            r.err.contains(&format!("cli: malformed IFS document at line {line}, column ")),
            "{text}: {}",
            r.err
        );
    }
}

#[test]
fn precondition_errors_exit_two_and_name_their_module() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(Vec<String>, &str)> = vec![
        (vec!["render".into(), data("discontinuous.json")], "error: geometry: maps must be contractive"),
        (
            vec!["gap".into(), data("similarities.json"), "--s".into(), "0.5".into()],
            "error: pressure: pressure gap needs a rank-one letter",
        ),
        (
            vec!["gap".into(), data("dominated.json"), "--s".into(), "1.5".into()],
            "error: pressure: invalid input: gap exponent must lie in [0, 1]",
        ),
        (
            vec!["pressure-curve".into(), data("dominated.json"), "--s-from".into(), "-1".into()],
            "error: pressure: invalid input: s must be",
        ),
        (
            vec!["boxdim".into(), data("dominated.json"), "--scales".into(), "3".into()],
            "error: cli: --scales expects",
        ),
        (
            vec!["analyze".into(), dir.path().join("missing.json").to_string_lossy().into_owned()],
            "error: cli: cannot read",
        ),
    ];
    for (args, want) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = run(&args);
        assert_eq!(r.code, 2, "{args:?}: {}", r.err);
        assert!(r.err.starts_with(want), "{args:?}: {}", r.err);
    }
    assert_eq!(run(&["nonsense"]).code, 2);
    assert_eq!(run(&["experiment", &data("dominated.json"), "--part", "4"]).code, 2);
    assert_eq!(run(&["--threads", "0", "analyze", &data("dominated.json")]).code, 2);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.out.contains("pressure-curve"));
}

#[test]
fn exhausted_budgets_exit_three_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["--budget", "5000", "pressure-curve", &data("dominated.json"), "--depth", "10", "--steps", "3"]);
    assert_eq!(r.code, 3, "{}", r.err);
    assert!(r.err.contains("node budget of 5000 exceeded"), "{}", r.err);
    let rows: Vec<&str> = r.out.lines().collect();
    assert_eq!(rows.len(), 2, "{}", r.out);
    assert!(rows[1].starts_with("0,full,10,1.09861228867,"));

    let out = dir.path().join("cloud.csv");
    let r = run(&[
        "--budget",
        "20000",
        "render",
        &data("dominated.json"),
        "--epsilon",
        "0.0001",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 3, "{}", r.err);
    let cloud = io::read_csv(std::fs::File::open(&out).unwrap()).unwrap();
    assert!(cloud.resolution > 0.0001 && !cloud.is_empty());

    let r = run(&["affdim", &data("dominated.json"), "--budget", "3000"]);
    assert_eq!(r.code, 3);
    assert_eq!(value(&r.out, "status"), "inconclusive");
    assert!(num(&r.out, "lo") < num(&r.out, "hi"));

    let r = run(&["gap", &data("dominated.json"), "--s", "1", "--max-depth", "4"]);
    assert_eq!(r.code, 3);
    assert_eq!(value(&r.out, "status"), "inconclusive");
}

#[test]
fn budget_comes_from_the_environment() {
    let bin = env!("CARGO_BIN_EXE_affthermo");
    let curve = |env: Option<&str>| {
        let mut c = Command::new(bin);
        c.args(["pressure-curve", &data("dominated.json"), "--depth", "10", "--steps", "3"]);
        c.env_remove(affthermo_cli::BUDGET_ENV);
        if let Some(v) = env {
            c.env(affthermo_cli::BUDGET_ENV, v);
        }
        c.output().unwrap()
    };
    assert_eq!(curve(None).status.code(), Some(0));
    let starved = curve(Some("5000"));
    assert_eq!(starved.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&starved.stderr).contains("node budget of 5000"));
    assert_eq!(curve(Some("zero")).status.code(), Some(2));

    // the document beats the environment, the flag beats both
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("dominated.json")).unwrap();
    let text = text.replace("\"seed\": 7", "\"seed\": 7, \"budgets\": {\"nodes\": 50000000}");
    let doc = write(dir.path(), "d.json", &text);
    let out = Command::new(bin)
        .args(["pressure-curve", &doc, "--depth", "10", "--steps", "3"])
        .env(affthermo_cli::BUDGET_ENV, "5000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(bin)
        .args(["pressure-curve", &doc, "--depth", "10", "--steps", "3", "--budget", "5000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let curve = |threads: &str| {
        run(&["--threads", threads, "pressure-curve", &data("dominated.json"), "--depth", "7", "--steps", "8"]).out
    };
    let one = curve("1");
    assert_eq!(one, curve("1"));
    assert_eq!(one, curve("4"));
    let cloud = |threads: &str| run(&["--threads", threads, "render", &data("dominated.json"), "--epsilon", "0.01"]).out;
    assert_eq!(cloud("1"), cloud("3"));
    let boxes = |threads: &str| {
        run(&["--threads", threads, "boxdim", &data("similarities.json"), "--epsilon", "0.002", "--scales", "1..6"]).out
    };
    assert_eq!(boxes("1"), boxes("4"));
}

/// Every number in a CSV curve has at most 12 significant digits.
#[test]
fn numbers_carry_twelve_significant_digits() {
    let r = run(&["pressure-curve", &data("dominated.json"), "--depth", "6", "--steps", "7"]);
    assert_eq!(r.code, 0);
    for line in r.out.lines().skip(1) {
        for field in line.split(',').filter(|f| f.parse::<f64>().is_ok()) {
            let mantissa = field.split('e').next().unwrap();
            let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
            assert!(digits.trim_start_matches('0').len() <= 12, "{field}");
        }
    }
    assert!(r.out.contains("0.69314718056") || r.out.contains("1.09861228867"));
}

#[test]
fn clouds_round_trip_through_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let bin = dir.path().join("c.afpc");
    let doc = data("dominated.json");
    for (path, extra) in [(&csv, None), (&bin, None), (&bin, Some("--binary"))] {
        let mut args = vec!["render", &doc[..], "--epsilon", "0.02", "-o", path.to_str().unwrap()];
        args.extend(extra);
        assert_eq!(run(&args).code, 0);
    }
    assert!(std::fs::read(&bin).unwrap().starts_with(io::MAGIC));
    let a = io::read_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    let b = io::read_binary(std::fs::File::open(&bin).unwrap()).unwrap();
    assert_eq!(a.len(), b.len());
    for (p, q) in a.points.iter().zip(&b.points) {
        assert!((p[0] - q[0]).abs() <= 1e-11 * (1.0 + q[0].abs()) && (p[1] - q[1]).abs() <= 1e-11 * (1.0 + q[1].abs()));
    }
    // both read back the same through boxdim
    let table = dir.path().join("t.csv");
    let ra = run(&["boxdim", csv.to_str().unwrap(), "--scales", "1..3"]);
    let rb = run(&["boxdim", bin.to_str().unwrap(), "--scales", "1..3", "--table", table.to_str().unwrap()]);
    assert_eq!(ra.code, 0, "{}", ra.err);
    assert_eq!(value(&ra.out, "counts"), value(&rb.out, "counts"));
    let t = std::fs::read_to_string(&table).unwrap();
    assert_eq!(t.lines().next().unwrap(), "scale,count,offsetId");
    // a projection is a cloud on the horizontal axis
    let proj = run(&["project", bin.to_str().unwrap(), "--angle", "-0.4"]);
    assert_eq!(proj.code, 0, "{}", proj.err);
    let p = io::read_csv(proj.out.as_bytes()).unwrap();
    assert!(!p.is_empty() && p.points.iter().all(|q| q[1] == 0.0));
}

#[test]
fn experiment_reports_hypotheses() {
    let r = run(&[
        "experiment",
        &data("dominated.json"),
        "--part",
        "3",
        "--epsilon",
        "0.001",
        "--scales",
        "2..7",
        "--format",
        "json",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["scenario"], "partThree");
    assert_eq!(v["seed"], 7);
    let names: Vec<&str> = v["hypotheses"].as_array().unwrap().iter().map(|h| h["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"strong open set condition"));
    assert_eq!(v["outcome"]["projections"][0]["letter"], 2);
}

fn entry() -> impl Strategy<Value = Entry> {
    prop_oneof![
        3 => (-1e3..1e3f64).prop_map(Entry::Number),
        1 => (-50i64..50, 1i64..50).prop_map(|(p, q)| format!("{p}/{q}").parse().unwrap()),
        1 => (-999i64..999).prop_map(|k| format!("{}", k as f64 / 100.0).parse().unwrap()),
    ]
}

fn document() -> impl Strategy<Value = IfsDocument> {
    let map = (entry(), entry(), entry(), entry(), entry(), entry()).prop_map(|(a, b, c, d, x, y)| MapEntry {
        matrix: [[a, b], [c, d]],
        translation: [x, y],
    });
    let options = (
        prop::option::of((prop::option::of(0.0..1e-6f64), prop::option::of(0.0..1e-12f64))),
        prop::option::of(prop::option::of(1u64..u64::MAX)),
        prop::option::of(any::<u64>()),
    )
        .prop_map(|(tol, budget, seed)| Options {
            rank_tolerance: tol.map(|(relative, absolute)| affthermo_cli::document::ToleranceOption { relative, absolute }),
            budgets: budget.map(|nodes| affthermo_cli::document::Budgets { nodes }),
            seed,
        });
    (".{0,12}", prop::collection::vec(map, 1..4), options).prop_map(|(name, maps, options)| IfsDocument {
        name,
        maps,
        options,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn documents_round_trip(doc in document()) {
        let text = doc.to_json();
        let back = IfsDocument::parse(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_json(), text);
    }
}
