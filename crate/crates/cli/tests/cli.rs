use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;
use tempfile::TempDir;

const GB_X: &str = r#"{"generator":{"family":"gumbel-barnett","theta":0.2},
"model":{"kind":"scale","baseline":{"family":"exp-weibull","params":[0.9,0.9]}},
"theta":[0.12,0.28,0.51,0.62,0.73]}"#;
const GB_Y: &str = r#"{"generator":{"family":"gumbel-barnett","theta":0.2},
"model":{"kind":"scale","baseline":{"family":"exp-weibull","params":[0.9,0.9]}},
"theta":[0.21,0.42,0.73,0.89,0.92]}"#;
const CLAYTON_X: &str = r#"{"generator":{"family":"clayton","theta":10},
"model":{"kind":"scale","baseline":{"family":"weibull","params":[1,0.9]}},
"theta":[0.13,0.31,0.49,0.61,0.72]}"#;
const CLAYTON_Y: &str = r#"{"generator":{"family":"clayton","theta":10},
"model":{"kind":"scale","baseline":{"family":"weibull","params":[1,0.9]}},
"theta":[0.22,0.41,0.71,0.88,0.92]}"#;
const DEMO: &str = r#"{"n":3,"generator":{"family":"clayton","theta":2},
"model":{"kind":"scale","baseline":{"family":"exponential","params":[1]}},
"theta":[1,2,3]}"#;
const INDEPENDENT: &str = r#"{"generator":{"family":"independence"},
"model":{"kind":"scale","baseline":{"family":"exponential","params":[1]}},
"theta":[1,1,1]}"#;

fn failsafe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_failsafe"))
        .args(args)
        .env_remove("FAILSAFE_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SCHEMA_BASE: &str = "https://failsafe.invalid/schemas/";

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

fn load_schema(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(schema_dir().join(name)).unwrap()).unwrap()
}

fn assert_valid(schema: &str, doc: &Value) {
    let root = load_schema(schema);
    let compiled = JSONSchema::options()
        .with_document(
            format!("{SCHEMA_BASE}condition-report.schema.json"),
            load_schema("condition-report.schema.json"),
        )
        .compile(&root)
        .expect("schema compiles");
    if let Err(errors) = compiled.validate(doc) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{schema} rejects output: {msgs:#?}");
    };
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with("max"))
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn preorder_reports_p_larger_for_gumbel_barnett_vectors() {
    let o = failsafe(&[
        "preorder",
        "--a",
        "0.12,0.28,0.51,0.62,0.73",
        "--b",
        "[0.21,0.42,0.73,0.89,0.92]",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["a_over_b"]["p_larger"], true);
    assert_eq!(r["b_over_a"]["p_larger"], false);
    assert_valid("order-report.schema.json", &r);
}

#[test]
fn preorder_equal_vectors_hold_every_relation() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.txt", "3 1\n2\n");
    let o = failsafe(&["preorder", "--a-file", &a, "--b", "1,2,3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for side in ["a_over_b", "b_over_a"] {
        for (name, v) in r[side].as_object().unwrap() {
            assert_eq!(v, &Value::Bool(true), "{side}.{name}");
        }
    }
}

#[test]
fn preorder_rejects_bad_input() {
    assert_eq!(code(&failsafe(&["preorder", "--a", "1,2", "--b", "1,2,3"])), 2);
    assert_eq!(code(&failsafe(&["preorder", "--a", "1,x", "--b", "1,2"])), 2);
    assert_eq!(code(&failsafe(&["preorder", "--a", "1,2"])), 2);
    assert_eq!(
        code(&failsafe(&["preorder", "--a-file", "/nonexistent/a", "--b", "1"])),
        2
    );
}

#[test]
fn curve_gap_is_nonnegative_for_gumbel_barnett_pair() {
    let dir = TempDir::new().unwrap();
    let x = write(dir.path(), "x.json", GB_X);
    let y = write(dir.path(), "y.json", GB_Y);
    let out = dir.path().join("paired.csv");
    let o = failsafe(&[
        "curve",
        &x,
        "--paired",
        &y,
        "--lo",
        "0.01",
        "--hi",
        "10",
        "--points",
        "1000",
        "--spacing",
        "linear",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("x,survival_x,survival_y,gap\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1000);
    assert!(rows.iter().all(|r| r[3] >= -1e-10));
    assert!((rows[999][0] - 10.0).abs() < 1e-12);
}

#[test]
fn curve_matches_closed_form_for_independent_exponentials() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "s.json", INDEPENDENT);
    let o = failsafe(&["curve", &s, "--lo", "0", "--hi", "3", "--points", "31"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("x,survival\n"));
    for r in csv_rows(&text) {
        let e = (-r[0]).exp();
        // at least two of three unit exponentials survive
        let exact = 3.0 * e * e * (1.0 - e) + e * e * e;
        assert!((r[1] - exact).abs() < 1e-12, "x={} {} vs {exact}", r[0], r[1]);
    }
}

#[test]
fn curve_rejects_invalid_specs() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"generator":{"family":"clayton","theta":-3},"model":{"kind":"scale","baseline":{"family":"exponential","params":[1]}},"theta":[1,2]}"#,
    );
    assert_eq!(code(&failsafe(&["curve", &bad])), 2);
    let s = write(dir.path(), "s.json", INDEPENDENT);
    assert_eq!(code(&failsafe(&["curve", &s, "--points", "1"])), 2);
    assert_eq!(code(&failsafe(&["curve", &s, "--lo", "0", "--spacing", "log"])), 2);
}

#[test]
fn emit_figures_writes_fixed_layout() {
    let dir = TempDir::new().unwrap();
    let o = failsafe(&[
        "curve",
        "--emit-figures",
        dir.path().to_str().unwrap(),
        "--points",
        "200",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for preset in ["gumbel-barnett", "clayton-crossing", "cable"] {
        for file in ["x.csv", "y.csv", "paired.csv"] {
            let text = std::fs::read_to_string(dir.path().join(preset).join(file)).unwrap();
            assert_eq!(text.lines().count(), 201, "{preset}/{file}");
        }
    }
    let gb = std::fs::read_to_string(dir.path().join("gumbel-barnett/paired.csv")).unwrap();
    let rows = csv_rows(&gb);
    assert!(rows[0][0] > 0.0);
    assert!(rows.iter().all(|r| r[3] >= -1e-10));
    let leftovers: Vec<_> = std::fs::read_dir(dir.path().join("cable")).unwrap().collect();
    assert_eq!(leftovers.len(), 3);
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let gx = write(dir.path(), "gx.json", GB_X);
    let gy = write(dir.path(), "gy.json", GB_Y);
    let cx = write(dir.path(), "cx.json", CLAYTON_X);
    let cy = write(dir.path(), "cy.json", CLAYTON_Y);

    let o = failsafe(&["verify", "t1", &gx, &gy]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("condition-report.schema.json", &r);
    assert_eq!(r["overall"], false);
    assert_eq!(r["dominance"]["relation"], "x-dominates-y");

    let o = failsafe(&["verify", "t1", &cx, &cy]);
    assert_eq!(code(&o), 1);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("condition-report.schema.json", &r);
    let generator = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "generator-log-concave")
        .unwrap();
    assert_eq!(generator["holds"], false);

    let bad = write(dir.path(), "bad.json", "{\"generator\":");
    assert_eq!(code(&failsafe(&["verify", "t1", &bad, &gy])), 2);
    assert_eq!(code(&failsafe(&["verify", "t7", &gx, &gy])), 2);
    let demo = write(dir.path(), "demo.json", DEMO);
    assert_eq!(code(&failsafe(&["verify", "t1", &gx, &demo])), 2);
    assert_eq!(code(&failsafe(&["verify", "t1", &gx, &cy])), 2);
}

#[test]
fn verify_identical_systems_tie() {
    let dir = TempDir::new().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        r#"{"generator":{"family":"clayton","theta":1},"model":{"kind":"scale","baseline":{"family":"weibull","params":[1,2]}},"theta":[1,2,3]}"#,
    );
    let o = failsafe(&["verify", "t1", &s, &s]);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("condition-report.schema.json", &r);
    assert_eq!(r["dominance"]["relation"], "ties-within-tol");
    assert!(code(&o) == 0 || code(&o) == 1);
}

#[test]
fn simulate_matches_analytic_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "demo.json", DEMO);
    let a = failsafe(&["simulate", &s, "--seed", "11"]);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    let text = stdout(&a);
    assert!(text.starts_with("x,analytic,empirical,abs_diff\n"));
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("max,,,"));
    let max: f64 = last.trim_start_matches("max,,,").parse().unwrap();
    assert!(max <= 0.009, "max deviation {max}");
    assert_eq!(csv_rows(&text).len(), 20);

    let b = failsafe(&["simulate", &s, "--seed", "11"]);
    assert_eq!(text, stdout(&b));
    let c = failsafe(&["simulate", &s, "--seed", "12"]);
    assert_ne!(text, stdout(&c));
}

#[test]
fn simulate_seed_comes_from_environment_and_config() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "demo.json", DEMO);
    let flag = stdout(&failsafe(&["simulate", &s, "--seed", "5", "--count", "5000"]));
    let env = Command::new(env!("CARGO_BIN_EXE_failsafe"))
        .args(["simulate", &s, "--count", "5000"])
        .env("FAILSAFE_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(flag, stdout(&env));
    let cfg = write(dir.path(), "cfg.json", r#"{"seed":5,"count":5000}"#);
    let from_cfg = failsafe(&["--config", &cfg, "simulate", &s]);
    assert_eq!(flag, stdout(&from_cfg));
    let overridden = failsafe(&["--config", &cfg, "simulate", &s, "--seed", "6"]);
    assert_ne!(flag, stdout(&overridden));
}

#[test]
fn simulate_independence_within_oracle_band() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "ind.json", INDEPENDENT);
    let lifetimes = dir.path().join("life.csv");
    let o = failsafe(&[
        "simulate",
        &s,
        "--seed",
        "3",
        "--lifetimes",
        lifetimes.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let last = stdout(&o).lines().last().unwrap().to_string();
    let max: f64 = last.trim_start_matches("max,,,").parse().unwrap();
    assert!(max <= 0.009, "max deviation {max}");
    let life = std::fs::read_to_string(lifetimes).unwrap();
    assert!(life.starts_with("x1,x2,x3\n"));
    assert_eq!(life.lines().count(), 200_001);
}

#[test]
fn simulate_gumbel_barnett_is_unsupported() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "gb.json", GB_X);
    let o = failsafe(&["simulate", &s]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unsupported"), "{}", stderr(&o));
}

#[test]
fn config_with_unknown_field_is_rejected() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "demo.json", DEMO);
    let cfg = write(dir.path(), "cfg.json", r#"{"seeds":5}"#);
    assert_eq!(code(&failsafe(&["--config", &cfg, "simulate", &s])), 2);
}

/// Weibull quantiles at plotting positions. Column `j` takes row `r ^ (j % 4)`,
/// so columns are strongly but not perfectly concordant.
fn weibull_csv(rows: usize, cols: usize) -> String {
    assert_eq!(rows % 4, 0);
    let mut out: Vec<String> = vec![(1..=cols).map(|j| j.to_string()).collect::<Vec<_>>().join(",")];
    let q = |i: usize, scale: f64| scale * (-(1.0 - (i as f64 + 0.5) / rows as f64).ln()).powf(1.0 / 4.0);
    for r in 0..rows {
        let line: Vec<String> = (0..cols)
            .map(|j| format!("{}", q(r ^ (j % 4), 10.0 + j as f64)))
            .collect();
        out.push(line.join(","));
    }
    out.join("\n") + "\n"
}

#[test]
fn fit_ranks_weibull_first_on_weibull_data() {
    let dir = TempDir::new().unwrap();
    let data = write(dir.path(), "w.csv", &weibull_csv(32, 4));
    let out = dir.path().join("out");
    let o = failsafe(&[
        "fit",
        &data,
        "--boot-n",
        "100",
        "--seed",
        "1",
        "--subsets",
        "1,2;3,4",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_valid("fit-report.schema.json", &report);
    assert_eq!(report["marginal"]["best"], "weibull");
    assert_eq!(report["marginal"]["ranking"][0]["fit"]["family"], "weibull");
    assert_eq!(report["copula"]["candidates"].as_array().unwrap().len(), 3);
    assert!(report["subsets"]["recommendation"]["labels"].as_array().unwrap().len() == 2);

    let t4 = std::fs::read_to_string(out.join("criteria.csv")).unwrap();
    assert!(t4.starts_with("criterion,exponential,gamma,weibull,burr\naic,"));
    let t5 = std::fs::read_to_string(out.join("copula_gof.csv")).unwrap();
    assert!(t5.starts_with("copula,theta,statistic,p_value\n"));

    let again = dir.path().join("again");
    failsafe(&[
        "fit",
        &data,
        "--boot-n",
        "100",
        "--seed",
        "1",
        "--subsets",
        "1,2;3,4",
        "--out-dir",
        again.to_str().unwrap(),
    ]);
    for f in ["report.json", "criteria.csv", "copula_gof.csv"] {
        assert_eq!(
            std::fs::read(out.join(f)).unwrap(),
            std::fs::read(again.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn fit_survival_orientation_prints_report() {
    let dir = TempDir::new().unwrap();
    let data = write(dir.path(), "w.csv", &weibull_csv(20, 2));
    let o = failsafe(&[
        "fit",
        &data,
        "--boot-n",
        "100",
        "--orientation",
        "survival",
        "--copula-method",
        "pseudo-likelihood",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("fit-report.schema.json", &report);
    assert_eq!(report["copula"]["orientation"], "survival");
    assert_eq!(report["copula"]["method"], "pseudo-likelihood");
}

#[test]
fn fit_rejects_small_or_missing_data() {
    let dir = TempDir::new().unwrap();
    let tiny = write(dir.path(), "tiny.csv", "a,b\n1,2\n2,3\n3,1\n");
    assert_eq!(code(&failsafe(&["fit", &tiny])), 2);
    assert_eq!(code(&failsafe(&["fit", "/nonexistent/data.csv"])), 2);
    let data = write(dir.path(), "w.csv", &weibull_csv(20, 2));
    assert_eq!(code(&failsafe(&["fit", &data, "--boot-n", "10"])), 2);
    assert_eq!(code(&failsafe(&["fit", &data, "--boot-n", "100", "--subsets", "1"])), 2);
    assert_eq!(
        code(&failsafe(&["fit", &data, "--boot-n", "100", "--subsets", "1;9"])),
        2
    );
}

#[test]
fn run_config_schema_accepts_documented_example() {
    let schema = JSONSchema::compile(&load_schema("run-config.schema.json")).unwrap();
    let ok: Value =
        serde_json::json!({"seed": 7, "policy": {"curve_points": 200, "dominance_tol": 1e-9}, "spacing": "log"});
    assert!(schema.is_valid(&ok));
    assert!(!schema.is_valid(&serde_json::json!({"seeds": 7})));
}

#[test]
fn verify_reports_inconsistency_when_tolerance_masks_a_failed_hypothesis() {
    let dir = TempDir::new().unwrap();
    let model = r#""generator":{"family":"independence"},"model":{"kind":"location","baseline":{"family":"exponential","params":[1]}}"#;
    let x = write(dir.path(), "x.json", &format!(r#"{{{model},"theta":[1,2]}}"#));
    let y = write(dir.path(), "y.json", &format!(r#"{{{model},"theta":[2,3]}}"#));
    assert_eq!(code(&failsafe(&["verify", "t1", &x, &y])), 1);
    let o = failsafe(&["verify", "t1", &x, &y, "--shape-tol", "1e12"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("dominance fails"));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("condition-report.schema.json", &r);
    assert_eq!(r["overall"], true);
    assert_eq!(r["dominance"]["relation"], "y-dominates-x");
}

#[test]
fn negative_tolerance_override_is_rejected() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "s.json", INDEPENDENT);
    assert_eq!(code(&failsafe(&["verify", "t1", &s, &s, "--dominance-tol", "-1"])), 2);
}
