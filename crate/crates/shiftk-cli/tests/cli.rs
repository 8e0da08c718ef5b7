//! End-to-end tests of the `shiftk` binary: exit codes, determinism of the
//! CSV outputs, the verify report against its shipped schema, and the
//! negative control.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shiftk"))
}

fn work_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("shiftk-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, contents: &str) {
    std::fs::write(path, contents).unwrap();
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Just enough of JSON Schema draft-07 to check the shipped schema: type
/// unions, required, properties, additionalProperties, items, minimum,
/// minItems.
fn validate_schema(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    if let Some(types) = schema.get("type") {
        let allowed: Vec<&str> = match types {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(|t| t.as_str()).collect(),
            _ => return Err(format!("{path}: bad schema type entry")),
        };
        let actual = match value {
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Number(n) => {
                if n.is_u64() || n.is_i64() {
                    "integer"
                } else {
                    "number"
                }
            }
            Value::String(_) => "string",
            Value::Array(_) => "array",
            Value::Object(_) => "object",
        };
        let ok = allowed.iter().any(|t| {
            *t == actual || (*t == "number" && actual == "integer")
        });
        if !ok {
            return Err(format!("{path}: type {actual} not in {allowed:?}"));
        }
    }
    if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
        if let Some(x) = value.as_f64() {
            if x < min {
                return Err(format!("{path}: {x} < minimum {min}"));
            }
        }
    }
    if let Value::Object(obj) = value {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                if !obj.contains_key(key) {
                    return Err(format!("{path}: missing required key {key}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            if let Some(props) = props {
                for key in obj.keys() {
                    if !props.contains_key(key) {
                        return Err(format!("{path}: unexpected key {key}"));
                    }
                }
            }
        }
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(v) = obj.get(key) {
                    validate_schema(sub, v, &format!("{path}.{key}"))?;
                }
            }
        }
    }
    if let Value::Array(items) = value {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (items.len() as u64) < min {
                return Err(format!("{path}: fewer than {min} items"));
            }
        }
        if let Some(item_schema) = schema.get("items") {
            for (i, item) in items.iter().enumerate() {
                validate_schema(item_schema, item, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}

fn shipped_schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas/verify_report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_passes_and_report_matches_schema() {
    let dir = work_dir("verify");
    let report_path = dir.join("report.json");
    let out = run(bin().args(["verify", "--out"]).arg(&report_path));
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    validate_schema(&shipped_schema(), &report, "$").unwrap();
    assert_eq!(report["all_passed"], Value::Bool(true));
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for expected in [
        "parseval_energy",
        "displacement_identity",
        "blaschke_unit_modulus",
        "semi_parseval",
        "toeplitz_eigen_monotone",
        "gradient_finite_difference",
    ] {
        assert!(names.contains(&expected), "missing check {expected}");
    }
}

#[test]
fn verify_negative_control_fails_displacement() {
    let dir = work_dir("verify-neg");
    let report_path = dir.join("report.json");
    let out = run(bin()
        .args(["verify", "--perturb-cauchy", "1e-3", "--out"])
        .arg(&report_path));
    assert_eq!(exit_code(&out), 1);

    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    validate_schema(&shipped_schema(), &report, "$").unwrap();
    assert_eq!(report["all_passed"], Value::Bool(false));
    let displacement = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "displacement_identity")
        .unwrap();
    assert_eq!(displacement["passed"], Value::Bool(false));
}

#[test]
fn loss_sweep_is_deterministic_and_respects_bounds() {
    let dir = work_dir("loss");
    let config_path = dir.join("loss.json");
    write(
        &config_path,
        r#"{
  "sweep": { "s": [51], "k": [500], "rho": [0.0], "alpha": [1.0] },
  "weights": "asymptotic",
  "out": "unused.csv"
}"#,
    );
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    let run_a = run(bin()
        .args(["loss", "--config"])
        .arg(&config_path)
        .args(["--threads", "1", "--out"])
        .arg(&out_a));
    assert_eq!(exit_code(&run_a), 0, "stderr: {}", String::from_utf8_lossy(&run_a.stderr));
    // Second run picks its thread count from the environment instead.
    let run_b = run(bin()
        .env("SHIFTK_THREADS", "4")
        .args(["loss", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out_b));
    assert_eq!(exit_code(&run_b), 0);
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "CSV bytes differ across runs/thread counts");

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "S,K,rho,alpha,time_closed,freq_quadrature,oracle_truncated,oracle_tail_bound,\
lower_bound,upper_asymptotic"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let time_closed: f64 = row[4].parse().unwrap();
    let lower: f64 = row[8].parse().unwrap();
    assert!((lower - 0.898204).abs() < 1e-6);
    assert!(time_closed > lower && time_closed < 1.0, "loss {time_closed}");
}

#[test]
fn loss_evaluates_loaded_delta_params() {
    let dir = work_dir("loss-params");
    let params_path = dir.join("delta.json");
    write(
        &params_path,
        r#"{ "convention": "one_to_S", "a": [[0.0, 0.0]], "b": [[1.0, 0.0]] }"#,
    );
    let config_path = dir.join("loss.json");
    write(
        &config_path,
        &format!(
            r#"{{
  "sweep": {{ "s": [], "k": [0], "rho": [0.0], "alpha": [1.0] }},
  "params_file": "{}",
  "out": "unused.csv"
}}"#,
            params_path.display()
        ),
    );
    let out_csv = dir.join("delta_loss.csv");
    let out = run(bin()
        .args(["loss", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out_csv));
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let time_closed: f64 = row[4].parse().unwrap();
    assert!(time_closed.abs() < 1e-12, "delta loss {time_closed}");
    // No shift-K parameterization: the upper-bound column is empty.
    assert_eq!(row[9], "");
}

#[test]
fn window_emits_three_ratio_curves_within_the_envelope() {
    let dir = work_dir("window");
    let config_path = dir.join("window.json");
    write(
        &config_path,
        r#"{ "s": 51, "k": 500, "alpha": 1.0, "omega_factor": 3.0, "points": 241, "out": "unused.csv" }"#,
    );
    let out_csv = dir.join("window.csv");
    let out = run(bin()
        .args(["window", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out_csv));
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&out_csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "Omega,T,K,alpha,re_ratio_limit,im_ratio_limit,re_ratio_asymptotic_b,\
im_ratio_asymptotic_b,re_ratio_solved_b,im_ratio_solved_b"
    );
    let envelope = 1.0 + (-2.0f64).exp() + 0.05;
    let mut interior = 0usize;
    let mut exterior = 0usize;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 10);
        let omega = cols[0];
        let limit_mag = (cols[4] * cols[4] + cols[5] * cols[5]).sqrt();
        if omega.abs() < 25.0 {
            interior += 1;
            assert!(limit_mag <= envelope, "Omega {omega}: |limit| = {limit_mag}");
        } else {
            exterior += 1;
        }
    }
    assert!(interior > 50 && exterior > 50);
}

#[test]
fn train_lr0_smoke_is_constant_and_deterministic() {
    let dir = work_dir("train-smoke");
    let config_path = dir.join("train.json");
    write(
        &config_path,
        &format!(
            r#"{{
  "mode": "single",
  "data": {{ "n": 40, "t_star": 10, "rho": 0.3, "num_samples": 50, "seed": 11 }},
  "train": {{
    "init_scheme": "shiftk_grid", "k_init": 30, "alpha": 1.0, "s": 5,
    "learning_rate": 0.0, "weight_decay": 0.0, "batch_size": 10, "epochs": 4, "seed": 11
  }},
  "out": "{}"
}}"#,
            dir.join("run").display()
        ),
    );
    let out = run(bin().args(["train", "--config"]).arg(&config_path));
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let curve = std::fs::read_to_string(dir.join("run_curve.csv")).unwrap();
    let values: Vec<&str> = curve
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(values.len(), 4);
    assert!(values.windows(2).all(|w| w[0] == w[1]), "curve not constant");

    // Saved parameters load back as a filter and the run is reproducible.
    let params: shiftk_core::FilterParams =
        serde_json::from_str(&std::fs::read_to_string(dir.join("run_params.json")).unwrap())
            .unwrap();
    assert_eq!(params.order(), 5);
    let first = std::fs::read(dir.join("run.json")).unwrap();
    let out = run(bin().args(["train", "--config"]).arg(&config_path));
    assert_eq!(exit_code(&out), 0);
    let second = std::fs::read(dir.join("run.json")).unwrap();
    assert_eq!(first, second, "train run JSON differs across identical runs");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = work_dir("badkey");
    let config_path = dir.join("loss.json");
    write(
        &config_path,
        r#"{ "sweep": { "s": [3], "k": [5], "rho": [0.0], "alpha": [1.0] }, "nodez": 64, "out": "x.csv" }"#,
    );
    let out = run(bin().args(["loss", "--config"]).arg(&config_path));
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("config error"));
}

#[test]
fn full_flag_without_full_block_is_a_config_error() {
    let dir = work_dir("nofull");
    let config_path = dir.join("train.json");
    write(
        &config_path,
        &format!(
            r#"{{
  "mode": "single",
  "data": {{ "n": 40, "t_star": 10, "rho": 0.3, "num_samples": 20, "seed": 1 }},
  "train": {{
    "init_scheme": "shiftk_grid", "k_init": 30, "alpha": 1.0, "s": 5,
    "learning_rate": 0.0, "weight_decay": 0.0, "batch_size": 10, "epochs": 2, "seed": 1
  }},
  "out": "{}"
}}"#,
            dir.join("run").display()
        ),
    );
    let out = run(bin().args(["train", "--full", "--config"]).arg(&config_path));
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn missing_config_is_a_config_error() {
    let out = run(bin().args(["loss", "--config", "/nonexistent/shiftk.json"]));
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn shipped_configs_parse_and_fast_ones_run() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = work_dir("shipped");

    // Training configs are heavyweight; parsing them is the contract here.
    for name in ["train_compare_init_desk.json", "train_kinit_robustness_desk.json"] {
        let text = std::fs::read_to_string(configs.join(name)).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        assert!(value.get("mode").is_some(), "{name} lacks a mode");
        assert!(value.get("full").is_some(), "{name} lacks a full-scale block");
    }

    let out_csv = dir.join("narrowing.csv");
    let out = run(bin()
        .args(["loss", "--config"])
        .arg(configs.join("loss_autocorrelation_narrowing.json"))
        .arg("--out")
        .arg(&out_csv));
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    // Loss shrinks as the autocorrelation narrows the window.
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let losses: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(losses.len(), 4);
    assert!(losses.windows(2).all(|w| w[1] < w[0]), "losses {losses:?}");

    let out = run(bin()
        .args(["window", "--config"])
        .arg(configs.join("window_figure.json"))
        .arg("--out")
        .arg(dir.join("window.csv")));
    assert_eq!(exit_code(&out), 0);

    let out = run(bin()
        .args(["verify", "--config"])
        .arg(configs.join("verify.json"))
        .arg("--out")
        .arg(dir.join("report.json")));
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn singular_closed_form_is_a_numeric_error() {
    // A pole sitting exactly on rho makes the autocorrelated closed form
    // singular; the command reports a numeric failure.
    let dir = work_dir("singular");
    let params_path = dir.join("params.json");
    write(
        &params_path,
        r#"{ "convention": "one_to_S", "a": [[0.3, 0.0]], "b": [[1.0, 0.0]] }"#,
    );
    let config_path = dir.join("loss.json");
    write(
        &config_path,
        &format!(
            r#"{{
  "sweep": {{ "s": [], "k": [5], "rho": [0.3], "alpha": [1.0] }},
  "params_file": "{}",
  "out": "{}"
}}"#,
            params_path.display(),
            dir.join("x.csv").display()
        ),
    );
    let out = run(bin().args(["loss", "--config"]).arg(&config_path));
    assert_eq!(exit_code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("numeric error"));
}
