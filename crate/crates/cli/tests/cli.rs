//! End-to-end tests of the binary: exit-code contract, report shapes, and
//! byte-level determinism across repeated runs and thread counts.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gradedsusy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        !output.stdout.is_empty(),
        "expected JSON on stdout; stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is valid JSON")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process exits normally")
}

#[test]
fn gamma_prints_matrix() {
    let out = run(&["gamma", "--m", "2", "--j", "1"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    // sigma_1 x sigma_1 is the anti-diagonal 4x4 permutation.
    assert_eq!(text.lines().next().unwrap(), "[0 0 0 1]");
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn gamma_verify_reports_all_relations() {
    let out = run(&["gamma", "--m", "3", "--verify"]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["m"], 3);
    assert_eq!(report["dim"], 8);
    assert_eq!(report["pass"], true);
    // 6 hermiticity checks plus 21 anticommutators.
    assert_eq!(report["checks"].as_array().unwrap().len(), 27);
}

#[test]
fn gamma_usage_errors_exit_2() {
    assert_eq!(exit_code(&run(&["gamma", "--m", "2"])), 2);
    assert_eq!(exit_code(&run(&["gamma", "--m", "2", "--j", "9"])), 2);
    // Missing required flag is a clap usage error.
    assert_eq!(exit_code(&run(&["gamma"])), 2);
}

#[test]
fn model_roundtrip_through_file_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    let path_str = path.to_str().unwrap();

    let out = run(&["model", "build", "--kind", "cl2nm2", "--n", "3", "--out", path_str]);
    assert_eq!(exit_code(&out), 0);
    assert!(path.exists());

    for pass_name in ["closure", "jacobi", "hermiticity", "gamma"] {
        let out = run(&["verify", pass_name, "--model", path_str]);
        assert_eq!(exit_code(&out), 0, "{} failed", pass_name);
        let report = stdout_json(&out);
        assert_eq!(report["command"], format!("verify {}", pass_name));
        assert_eq!(report["model"]["generators"], 20);
        let checks = report["checks"].as_array().unwrap();
        assert!(checks.iter().all(|c| c["status"] != "fail"));
    }
}

#[test]
fn verify_gamma_is_not_applicable_without_involution() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cl2n.json");
    let path_str = path.to_str().unwrap();
    run(&["model", "build", "--kind", "cl2n", "--n", "3", "--out", path_str]);

    let out = run(&["verify", "gamma", "--model", path_str]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["status"], "computed");
    assert!(checks[0]["details"].as_str().unwrap().contains("not applicable"));
}

#[test]
fn verify_rejects_unreadable_model_with_usage_error() {
    assert_eq!(exit_code(&run(&["verify", "closure", "--model", "/no/such/file.json"])), 2);
}

#[test]
fn verify_all_cl4_passes_and_is_deterministic_across_threads() {
    let one = run(&["verify-all", "--kind", "cl4", "--threads", "1"]);
    let four = run(&["verify-all", "--kind", "cl4", "--threads", "4"]);
    assert_eq!(exit_code(&one), 0);
    assert_eq!(exit_code(&four), 0);
    assert_eq!(one.stdout, four.stdout, "report bytes differ across thread counts");

    let report = stdout_json(&one);
    assert_eq!(report["model"]["generators"], 20);
    assert_eq!(report["model"]["dim"], 8);
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"closure"));
    assert!(names.contains(&"jacobi"));
    assert!(names.contains(&"hermiticity"));
    assert!(names.contains(&"oscillator"));
    assert!(names.contains(&"coupling-graph"));
    let graph = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "coupling-graph")
        .unwrap();
    assert!(graph["details"].as_str().unwrap().starts_with("connected"));
}

#[test]
fn verify_all_cl2n_flags_reducibility_but_passes() {
    let out = run(&["verify-all", "--kind", "cl2n"]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    let graph = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "coupling-graph")
        .unwrap();
    let details = graph["details"].as_str().unwrap();
    assert!(details.contains("reducible"), "details: {}", details);
    assert!(details.contains("{0, 2, 4, 6, 9, 11, 13, 15}"), "details: {}", details);
    assert!(details.contains("{1, 3, 5, 7, 8, 10, 12, 14}"), "details: {}", details);
}

#[test]
fn structure_constants_cl6b_match_reference_tables() {
    let out = run(&["structure-constants", "--kind", "cl6b", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let wire = stdout_json(&out);
    assert_eq!(wire["brackets"].as_array().unwrap().len(), 1600);

    let family = |key: &str| -> Vec<(String, i64)> {
        wire[key]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| {
                let digits: String = e["indices"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|d| d.as_u64().unwrap().to_string())
                    .collect();
                (digits, e["value"].as_i64().unwrap())
            })
            .collect()
    };
    let f = family("f");
    assert_eq!(
        f,
        [("0123", 1), ("1023", 1), ("2013", -1), ("3012", 1)]
            .map(|(s, v)| (s.to_string(), v))
    );
    let g = family("g");
    assert_eq!(
        g,
        [("0123", 1), ("0213", -1), ("0312", 1), ("1203", 1), ("1302", -1), ("2301", 1)]
            .map(|(s, v)| (s.to_string(), v))
    );
    let h = family("h");
    assert_eq!(
        h,
        [("0123", 1), ("0132", -1), ("0231", 1), ("1230", 1)]
            .map(|(s, v)| (s.to_string(), v))
    );
}

#[test]
fn structure_constants_text_is_aligned_and_complete() {
    let out = run(&["structure-constants", "--kind", "cl4", "--format", "text"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let eq_columns: Vec<usize> = text
        .lines()
        .filter(|l| l.contains(" = "))
        .map(|l| l.find(" = ").unwrap())
        .collect();
    assert_eq!(eq_columns.len(), 400);
    assert!(eq_columns.windows(2).all(|w| w[0] == w[1]), "columns not aligned");
    assert!(text.contains("[H_000, K_000] = (2i) D_000"));
}

#[test]
fn scqm_build_reports_defining_relations() {
    let out = run(&["scqm", "build", "--kind", "cl4"]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"{Q, Q} = (2) H"));
    assert!(names.contains(&"{Q, S} = (-2) D"));
}

#[test]
fn scqm_oscillator_notes_the_computed_raising_sign() {
    let out = run(&["scqm", "verify-oscillator", "--kind", "cl6b"]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    let checks = report["checks"].as_array().unwrap();
    // 5 global identities plus 10 per ladder pair (8 pairs at dim 16).
    assert_eq!(checks.len(), 85);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    let raising = checks
        .iter()
        .find(|c| c["name"].as_str().unwrap().starts_with("[R, a+_"))
        .unwrap();
    assert!(raising["details"].as_str().unwrap().contains("computed sign is +1"));
}

#[test]
fn spectrum_cl4_beta_2_matches_reference_levels() {
    let out = run(&["spectrum", "--kind", "cl4", "--beta", "2", "--levels", "4"]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["beta"], "2");
    assert_eq!(report["branch"], "+");
    let levels = report["levels"].as_array().unwrap();
    let summary: Vec<(String, u64)> = levels
        .iter()
        .map(|l| (l["energy"].as_str().unwrap().to_string(), l["degeneracy"].as_u64().unwrap()))
        .collect();
    assert_eq!(
        summary,
        [("5/2", 4), ("7/2", 4), ("9/2", 4), ("11/2", 4), ("13/2", 4)]
            .map(|(e, d)| (e.to_string(), d))
    );
}

#[test]
fn spectrum_cl6b_beta_3_halves_has_integer_energies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.json");
    let path_str = path.to_str().unwrap();
    let out = run(&[
        "spectrum", "--kind", "cl6b", "--beta", "3/2", "--levels", "2", "--json", path_str,
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(out.stdout.is_empty(), "report goes to the file, not stdout");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let summary: Vec<(String, u64)> = report["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| (l["energy"].as_str().unwrap().to_string(), l["degeneracy"].as_u64().unwrap()))
        .collect();
    assert_eq!(
        summary,
        [("2", 8), ("3", 8), ("4", 8)].map(|(e, d)| (e.to_string(), d))
    );
}

#[test]
fn spectrum_repeated_runs_are_byte_identical() {
    let args = ["spectrum", "--kind", "cl4", "--beta", "2", "--levels", "3"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn spectrum_usage_errors_exit_2() {
    // cl2n is not a spectrum preset: its representation is reducible.
    assert_eq!(
        exit_code(&run(&["spectrum", "--kind", "cl2n", "--beta", "2"])),
        2
    );
    // The ground-state analysis needs coupling > 1.
    assert_eq!(
        exit_code(&run(&["spectrum", "--kind", "cl4", "--beta", "1/2"])),
        2
    );
    assert_eq!(
        exit_code(&run(&["spectrum", "--kind", "cl4", "--beta", "x"])),
        2
    );
}

#[test]
fn timing_lines_go_to_stderr_not_stdout() {
    let out = run(&["verify-all", "--kind", "cl4"]);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.lines().any(|l| l.starts_with("# ")), "stderr: {}", stderr);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(!stdout.contains("# "), "timing leaked into stdout");
}

#[test]
fn model_build_writes_nothing_on_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("never.json");
    let out = run(&[
        "model", "build", "--kind", "cl6b", "--n", "4", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(!path.exists());
}
