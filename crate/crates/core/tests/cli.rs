use std::path::Path;
use std::process::{Command, Output};

fn whlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whlab"))
        .args(args)
        .env_remove("WHLAB_TOL")
        .output()
        .expect("binary runs")
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn moebius_suite_passes_for_dim_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let run = whlab(&["verify", "moebius", "--dim", "3", "--trials", "200", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let r = report(&out);
    assert_eq!(r["suite"], "moebius");
    let action = r["cases"].as_array().unwrap().iter().find(|c| c["name"] == "action_law").unwrap();
    assert_eq!(action["status"], "pass");
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let run = whlab(&["verify", "all", "--trials", "10", "--seed", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(run.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = dir.path().join("c.json");
    whlab(&["verify", "all", "--trials", "10", "--seed", "4", "--out", other.to_str().unwrap()]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&other).unwrap());
}

#[test]
fn all_suites_pass_at_default_sizes() {
    let run = whlab(&["verify", "all", "--tol", "1e-10"]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let r: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    let cases = r["cases"].as_array().unwrap();
    let names: Vec<&str> = cases.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted);
    for suite in ["moebius", "jordan", "fell", "toeplitz", "groupoid", "fibers", "homotopy"] {
        assert!(names.iter().any(|n| n.starts_with(&format!("{suite}.mutant_"))), "{suite}");
    }
}

#[test]
fn homotopy_halfline_clauses_pass() {
    let run = whlab(&["verify", "homotopy", "--model", "halfline"]);
    assert_eq!(run.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    let clauses: Vec<_> = r["cases"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["name"].as_str().unwrap().starts_with("halfline_"))
        .collect();
    assert_eq!(clauses.len(), 4);
    assert!(clauses.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn failing_case_sets_exit_code_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tight.json");
    // At a tolerance of 1e-40 every floating-point identity fails.
    let run = whlab(&["verify", "moebius", "--tol", "1e-40", "--trials", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    let r = report(&out);
    assert!(r["cases"].as_array().unwrap().iter().any(|c| c["status"] == "fail"));
}

#[test]
fn tolerance_comes_from_the_environment() {
    let run = Command::new(env!("CARGO_BIN_EXE_whlab"))
        .args(["verify", "jordan", "--trials", "5"])
        .env("WHLAB_TOL", "1e-8")
        .output()
        .unwrap();
    let r: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(r["config"]["tol"].as_f64(), Some(1e-8));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(whlab(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(whlab(&["verify", "jordan", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(whlab(&[]).status.code(), Some(2));
}

#[test]
fn fell_converge_reads_set_sequences() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sets.json");
    std::fs::write(
        &input,
        r#"{"ambient":"R","window":[-2,2],"step":0.5,
            "sets":[{"kind":"ray","endpoint":1},{"kind":"ray","endpoint":1},{"kind":"ray","endpoint":1},{"kind":"ray","endpoint":1}]}"#,
    )
    .unwrap();
    let run = whlab(&["fell", "converge", "--input", input.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(r["status"], "converges");
    let xs: Vec<f64> = r["limit"].as_array().unwrap().iter().map(|p| p[0].as_f64().unwrap()).collect();
    assert!(xs.contains(&1.0) && !xs.contains(&2.0));

    std::fs::write(
        &input,
        r#"{"ambient":"Z","window":[-3,3],"sets":[{"kind":"ray","endpoint":0},{"kind":"ray","endpoint":2},{"kind":"ray","endpoint":0},{"kind":"ray","endpoint":2}]}"#,
    )
    .unwrap();
    let r: serde_json::Value = serde_json::from_slice(&whlab(&["fell", "converge", "--input", input.to_str().unwrap()]).stdout).unwrap();
    assert_eq!(r["status"], "diverges");
}

#[test]
fn input_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(whlab(&["fell", "converge", "--input", missing.to_str().unwrap()]).status.code(), Some(3));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(whlab(&["fell", "converge", "--input", bad.to_str().unwrap()]).status.code(), Some(4));
    std::fs::write(&bad, r#"{"ambient":"R","window":[2,-2],"sets":[]}"#).unwrap();
    assert_eq!(whlab(&["fell", "converge", "--input", bad.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn unwritable_output_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("no/such/dir/r.json");
    let run = whlab(&["verify", "fell", "--trials", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(5));
}

#[test]
fn object_keys_are_sorted() {
    let run = whlab(&["verify", "fell", "--trials", "2"]);
    let text = String::from_utf8(run.stdout).unwrap();
    let mut depth_keys: Vec<Vec<String>> = vec![Vec::new()];
    for line in text.lines() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('"') {
            if let Some((key, _)) = rest.split_once("\":") {
                depth_keys.last_mut().unwrap().push(key.to_string());
            }
        }
        if t.ends_with('{') {
            depth_keys.push(Vec::new());
        }
        if t.starts_with('}') {
            let keys = depth_keys.pop().unwrap();
            let mut sorted = keys.clone();
            sorted.sort();
            assert_eq!(keys, sorted);
        }
    }
}
