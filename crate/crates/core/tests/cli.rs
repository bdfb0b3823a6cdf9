use std::process::Command;

use ozaki_core::cli::{run, Outcome};
use serde_json::Value;

fn call(line: &str) -> Outcome {
    let args: Vec<String> = line.split_whitespace().map(String::from).collect();
    run(&args)
}

fn json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).expect("stdout is JSON")
}

#[test]
fn extremal_coefficients_are_exact() {
    let out = call("extremal f1 --order 4");
    assert_eq!(out.exit_code, 0);
    let v = json(&out);
    assert_eq!(v["status"], "ok");
    let coeffs: Vec<f64> = v["payload"]["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_f64().unwrap())
        .collect();
    assert_eq!(coeffs, [0.0, 1.0, 1.5, 2.0, 2.5]);
    assert!(out.stdout.contains("[0, 1, 1.5, 2, 2.5]"));
}

#[test]
fn envelope_has_expected_fields() {
    let v = json(&call("sample --class G --samples 50 --seed 9"));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        ["tool_version", "command_echo", "seed", "payload", "status"]
    );
    assert_eq!(v["seed"], 9);
    assert_eq!(
        v["command_echo"],
        "ozaki sample --class G --samples 50 --seed 9"
    );

    let v = json(&call("verify --class F"));
    assert!(v.get("seed").is_none());
    assert_eq!(v["payload"]["entries"].as_array().unwrap().len(), 7);
}

#[test]
fn verify_reports_all_entries() {
    let out = call("verify --class all");
    assert_eq!(out.exit_code, 0);
    let v = json(&out);
    assert_eq!(v["payload"]["entries"].as_array().unwrap().len(), 13);
    assert_eq!(v["status"], "ok");
}

#[test]
fn optimize_csv_layout() {
    let out = call("optimize --objective DeltaG --resolution 100 --refine 1 --format csv");
    assert_eq!(out.exit_code, 0);
    let mut lines = out.stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "objective_id,mode,value,argpoint_u,argpoint_v,grid_resolution,refine_iterations,paper_value,gap"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "DeltaG");
    assert_eq!(row[1], "max");
    assert_eq!(row[2].parse::<f64>().unwrap(), 6.0);
    assert!(lines.next().is_none());
}

#[test]
fn sample_csv_layout() {
    let out = call("sample --class G --samples 200 --seed 1 --format csv");
    let mut lines = out.stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "name,empirical_min,empirical_max,bound,margin"
    );
    let names: Vec<String> = lines
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    assert!(names.iter().all(|n| n.starts_with("G/")));
    assert!(names.contains(&"G/|S4|".to_string()));
}

#[test]
fn csv_rejected_for_other_commands() {
    let out = call("verify --format csv");
    assert_eq!(out.exit_code, 1);
    assert_eq!(out.stderr.lines().count(), 1);
}

#[test]
fn usage_errors_exit_one() {
    for line in [
        "frobnicate",
        "extremal f9",
        "optimize --objective Nope",
        "optimize --objective SG --resolution 10",
        "sample --class H",
        "coeffs --class F --schwarz 0.9:0,0.9:0,0:0",
        "sample --class F --samples 0",
    ] {
        let out = call(line);
        assert_eq!(out.exit_code, 1, "{line}");
        assert!(!out.stderr.is_empty(), "{line}");
    }
}

#[test]
fn help_goes_to_stdout() {
    let out = call("--help");
    assert_eq!(out.exit_code, 0);
    assert!(out.stdout.contains("sample"));
}

#[test]
fn coefficient_inputs_agree() {
    // w = z/2 + z^2/4 + ... gives p_1 = 1, p_2 = 1, p_3 = 3/4
    let a = json(&call(
        "coeffs --class G --schwarz 0.5:0,0.25:0,0:0 --order 4",
    ));
    let b = json(&call(
        "coeffs --class G --caratheodory 1:0,1:0,0.75:0 --order 4",
    ));
    assert_eq!(a["status"], "ok");
    assert_eq!(b["status"], "ok");
    let coeffs = |v: &Value| -> Vec<f64> {
        v["payload"]["function"]["coefficients"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["re"].as_f64().unwrap())
            .collect()
    };
    let (ca, cb) = (coeffs(&a), coeffs(&b));
    assert_eq!(ca.len(), 5);
    for (x, y) in ca.iter().zip(&cb) {
        assert!((x - y).abs() < 1e-15);
    }
    assert_eq!(ca[2], -0.25);
}

#[test]
fn extremal_report_is_within_bounds() {
    for name in ["f1", "f2", "g1", "g2"] {
        let out = call(&format!("report --extremal {name}"));
        assert_eq!(out.exit_code, 0, "{name}");
    }
}

#[test]
fn bound_violation_exits_two() {
    // p_k = 2 cos(kθ) with 4 cos^2 θ = 464/121
    let theta = ((464.0f64 / 121.0).sqrt() / 2.0).acos();
    let p: Vec<String> = (1..=3)
        .map(|k| format!("{:?}:0", 2.0 * (k as f64 * theta).cos()))
        .collect();
    let out = call(&format!("report --class F --caratheodory {}", p.join(",")));
    assert_eq!(out.exit_code, 2);
    assert_eq!(json(&out)["status"], "bound_violation");
}

#[test]
fn binary_writes_one_stderr_line_on_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_ozaki"))
        .args(["verify", "--class", "X"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8(out.stderr).unwrap().lines().count(), 1);
}

#[test]
fn binary_respects_thread_override() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_ozaki"))
            .args(["sample", "--samples", "3000", "--seed", "5"])
            .env("OZAKI_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, three) = (run("1"), run("3"));
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(one.status.code(), three.status.code());
}
