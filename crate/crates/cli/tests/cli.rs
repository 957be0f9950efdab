use std::path::Path;
use std::process::{Command, Output};

use fracext::container::{write_trial, Dtype};
use fracext::trial::default_gaussian;
use fracext::FrequencyGrid;
use serde_json::Value;
use sha2::{Digest, Sha256};

fn fracext(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracext"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_container(path: &Path, d: usize) {
    let f = default_gaussian(FrequencyGrid::default_for(d).unwrap()).unwrap();
    let mut file = std::fs::File::create(path).unwrap();
    write_trial(&mut file, &f, Dtype::Complex128).unwrap();
}

#[test]
fn missing_alpha_is_a_usage_error_naming_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracext(dir.path(), &["quotient", "--dim", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--alpha"), "{}", stderr(&o));
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn malformed_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["quotient", "--alpha", "abc"][..],
        &["quotient", "--alpha", "2", "--trial", "bogus"],
        &["quotient", "--alpha", "1.5"],
        &["quotient", "--alpha", "2", "--dim", "3"],
        &["no-such-command"],
        &["conv2d", "sweep", "--alpha", "3:2:0.5"],
        &["geometry", "hessian-scan"],
    ] {
        let o = fracext(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = Command::new(env!("CARGO_BIN_EXE_fracext")).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn wrong_dimension_header_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let tf = dir.path().join("f.tf");
    write_container(&tf, 2);
    let spec = format!("file:{}", tf.display());
    let o = fracext(dir.path(), &["quotient", "--alpha", "2", "--dim", "1", "--trial", &spec]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("dimension mismatch"), "{}", stderr(&o));

    std::fs::write(&tf, b"not a container").unwrap();
    let o = fracext(dir.path(), &["quotient", "--alpha", "2", "--dim", "1", "--trial", &spec]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    // grid flags conflict with a file trial
    let o = fracext(dir.path(), &["quotient", "--alpha", "2", "--trial", &spec, "--grid-m", "64"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--grid-m"));
}

#[test]
fn file_trial_reproduces_the_builtin_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let tf = dir.path().join("g.tf");
    write_container(&tf, 1);
    let spec = format!("file:{}", tf.display());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let common = ["quotient", "--alpha", "3", "--refine", "false", "--times", "257"];
    assert!(fracext(&a, &common).status.success());
    let mut args = common.to_vec();
    args.extend(["--trial", spec.as_str()]);
    assert!(fracext(&b, &args).status.success());
    let va = read_json(&a.join("quotient.json"))["value"].as_f64().unwrap();
    let vb = read_json(&b.join("quotient.json"))["value"].as_f64().unwrap();
    assert_eq!(va.to_bits(), vb.to_bits());
}

#[test]
fn manifest_records_outputs_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# shared settings\nalpha = 3\ntimes = 257\nrefine = false\nseed = 5\n").unwrap();
    let out = dir.path().join("out");
    let o = fracext(&out, &["--config", cfg.to_str().unwrap(), "quotient", "--times", "129"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["config"]["alpha"], "3");
    assert_eq!(m["config"]["times"], "129");
    assert_eq!(m["config"]["refine"], "false");
    assert_eq!(m["config"]["dim"], "1");
    assert_eq!(m["seed"], 5);
    assert_eq!(m["grid"]["time_nodes"], 129);
    assert!(m["version"].is_string() && m["wall_time_ms"].is_u64());
    assert!(m["command_line"].as_array().unwrap().iter().any(|a| a == "quotient"));

    let report = read_json(&out.join("quotient.json"));
    assert_eq!(report["manifest_digest"], m["manifest_digest"]);
    assert_eq!(report["grid"]["time_nodes"], 129);
    for (name, digest) in m["outputs"].as_object().unwrap() {
        let bytes = std::fs::read(out.join(name)).unwrap();
        assert_eq!(hex::encode(Sha256::digest(&bytes)), digest.as_str().unwrap(), "{name}");
    }
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracext(dir.path(), &["asymptotic", "--alpha", "3", "--ladder", "8,16"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("asymptotic.json")).unwrap();
    let re_digits = |tok: &str| tok.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
    let tokens: Vec<&str> = text
        .split(|c: char| c == ',' || c == ':' || c == '[' || c == ']' || c == '{' || c == '}')
        .filter(|t| t.contains('e') && t.starts_with(|c: char| c.is_ascii_digit() || c == '-'))
        .collect();
    assert!(!tokens.is_empty());
    assert!(tokens.iter().all(|t| re_digits(t) == 17), "{tokens:?}");
    let csv = std::fs::read_to_string(dir.path().join("asymptotic.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "xi_n,norm,target,rel_error");
    for line in lines {
        assert!(line.split(',').all(|t| re_digits(t) == 17), "{line}");
    }
}

#[test]
fn asymptotic_error_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracext(dir.path(), &["asymptotic", "--alpha", "3", "--dim", "1", "--ladder", "8,16,32,64"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("asymptotic.csv")).unwrap();
    let errs: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(errs.len(), 4);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn hessian_scan_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracext(dir.path(), &["geometry", "hessian-scan", "--alpha", "3", "--dim", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = read_json(&dir.path().join("hessian.json"));
    assert!(s["min_eig"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(dir.path().join("hessian.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "alpha,N,r,sector,quantity,value");
    assert_eq!(csv.lines().count() - 1, s["per_sector_min"].as_array().unwrap().len());
}

#[test]
fn sweep_has_one_row_per_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracext(dir.path(), &["conv2d", "sweep", "--alpha", "2.5:5:0.5", "--quad-n", "16"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "alpha,Q4_lower_witness,lower_endpoint,upper_endpoint,margin,profile_id,quad_error");
    assert_eq!(lines.len(), 7);
    for l in &lines[1..] {
        let cells: Vec<&str> = l.split(',').collect();
        assert_eq!(cells.len(), 7);
        assert!(cells.iter().all(|c| !c.is_empty()));
    }
    let all = std::fs::read_to_string(dir.path().join("sweep_all.csv")).unwrap();
    assert_eq!(all.lines().count(), 1 + 6 * 3);
}

#[test]
fn failed_assertion_exits_one_and_keeps_outputs() {
    // the level-set ratio tends to (α-1)² = 16 > 3α = 15 near the base point at α = 5
    let dir = tempfile::tempdir().unwrap();
    let o = fracext(dir.path(), &["geometry", "levelset-ratio", "--alpha", "5", "--samples", "20000"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("assertion failed"));
    let r = read_json(&dir.path().join("levelset_ratio.json"));
    assert_eq!(r["within_bounds"], false);
    assert!(dir.path().join("manifest.json").exists());

    let o = fracext(dir.path(), &["geometry", "levelset-ratio", "--alpha", "3", "--samples", "20000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn inconclusive_verdict_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracext(dir.path(), &["quotient", "--alpha", "2", "--times", "257"]);
    assert!(o.status.success());
    let r = read_json(&dir.path().join("quotient.json"));
    assert_eq!(r["criterion"]["verdict"], "inconclusive");
    // no refinement, no error bar, nothing witnessed
    let o = fracext(dir.path(), &["quotient", "--alpha", "3", "--refine", "false", "--times", "257"]);
    assert!(o.status.success());
    let r = read_json(&dir.path().join("quotient.json"));
    assert_eq!(r["criterion"]["verdict"], "inconclusive");
    assert!(r["refinement_delta"].is_null());
}
