use std::path::Path;
use std::process::{Command, Output};

fn wasep(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wasep"));
    cmd.args(args).env_remove("WASEP_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("WASEP_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(wasep(&["--bogus"], None).status.code(), Some(2));
    assert_eq!(wasep(&["oracle", "--L", "6", "--q", "1", "--digits", "19"], None).status.code(), Some(2));
}

#[test]
fn oracle_symmetric_gap() {
    let out = wasep(&["oracle", "--L", "6", "--N", "3", "--q", "1", "--digits", "30"], None);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    let gap: f64 = v["rows"][0]["gap_re"].as_str().unwrap().parse().unwrap();
    assert!((gap + 1.0).abs() < 1e-25, "{gap}");
}

#[test]
fn series_exact_tokens_through_order_four() {
    let out = wasep(&["series", "--order", "4", "--quiet"], None);
    assert!(out.status.success());
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    let toks: Vec<(i64, String)> =
        rows.iter().map(|r| (r["order"].as_i64().unwrap(), r["coeff"].as_str().unwrap().to_string())).collect();
    assert_eq!(
        toks,
        vec![
            (0, "-1/1*(2pi)^(4/2)".to_string()),
            (2, "-1/2*(2pi)^(0/2)".to_string()),
            (4, "-1/4*(2pi)^(-4/2) + 1/96*(2pi)^(0/2)".to_string()),
        ]
    );
}

#[test]
fn output_is_deterministic_and_cache_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gap-finite", "--L", "8,10", "--mu", "0.5,1", "--digits", "40", "--output", "csv", "--quiet"];
    let plain = wasep(&args, None);
    assert!(plain.status.success());
    assert_eq!(plain.stdout, wasep(&args, None).stdout);
    let cold = wasep(&args, Some(dir.path()));
    assert!(dir.path().join("bethe").read_dir().unwrap().count() == 4);
    let warm = wasep(&args, Some(dir.path()));
    assert_eq!(plain.stdout, cold.stdout);
    assert_eq!(cold.stdout, warm.stdout);
    let mut par = args.to_vec();
    par.extend(["--jobs", "2"]);
    assert_eq!(plain.stdout, wasep(&par, None).stdout);
}

#[test]
fn edge_roots_refuse_unreachable_tolerance() {
    let out = wasep(&["edge-roots", "--mu", "1", "--M", "16", "--tol", "1e-12", "--digits", "20"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("increase M"));
    let ok = wasep(&["edge-roots", "--mu", "0", "--M", "8", "--digits", "20", "--tol", "1e-10"], None);
    assert!(ok.status.success());
}

#[test]
fn tampered_reference_fails_the_gate_and_names_the_order() {
    let text = include_str!("../data/e1_reference.json").replacen("\"-77/64*", "\"-78/64*", 1);
    assert!(text.contains("-78/64"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ref.json");
    std::fs::write(&path, text).unwrap();
    let out = wasep(&["check-all", "--reference", path.to_str().unwrap(), "--quiet", "--digits", "30"], None);
    assert_eq!(out.status.code(), Some(4));
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows[0]["status"], "FAIL");
    assert!(rows[0]["measured"].as_str().unwrap().contains("mu^8"), "{}", rows[0]["measured"]);
}
