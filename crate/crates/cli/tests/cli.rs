use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn subtori(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subtori")).args(args).env_remove("SUBTORI_THREADS").output().unwrap()
}

fn run_on(args: &[&str], file: &Path) -> (i32, String, String) {
    let mut all: Vec<&str> = args.to_vec();
    all.push(file.to_str().unwrap());
    let out = subtori(&all);
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("subtori-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn json(stdout: &str) -> Value {
    serde_json::from_str(stdout).unwrap()
}

fn ranks(v: &Value, key: &str) -> Vec<u64> {
    v[key].as_array().unwrap().iter().map(|g| g["rank"].as_u64().unwrap()).collect()
}

#[test]
fn poset_cross_lists_both_meeting_points() {
    let (code, out, _) = run_on(&["poset"], &corpus("t2_cross.json"));
    assert_eq!(code, 0);
    let row = out.lines().find(|l| l.starts_with("{1,2}")).unwrap();
    assert!(row.contains("(0, 0) (1/2, 1/2)"), "{row}");
    let (_, out, _) = run_on(&["poset", "--json"], &corpus("t2_cross.json"));
    let v = json(&out);
    let top = &v["strata"][3];
    assert_eq!(top["subset"], serde_json::json!([1, 2]));
    assert_eq!(top["components"], 2);
}

#[test]
fn poset_of_empty_arrangement_has_one_row() {
    let (code, out, _) = run_on(&["poset", "--json"], &corpus("t2_empty.json"));
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["strata"].as_array().unwrap().len(), 1);
    assert_eq!(v["strata"][0]["tangent_rank"], 2);
}

#[test]
fn poset_marks_disjoint_parallel_circles_empty() {
    let (_, out, _) = run_on(&["poset"], &corpus("t2_parallel.json"));
    let row = out.lines().find(|l| l.starts_with("{1,2}")).unwrap();
    assert!(row.contains("empty"), "{row}");
}

#[test]
fn homology_of_annulus_over_q() {
    let (code, out, _) = run_on(&["homology", "--coeff", "q", "--json"], &corpus("t2_single_circle.json"));
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(ranks(&v, "complement"), vec![1, 1, 0]);
    assert_eq!(v["model"], "rational-E1");
}

#[test]
fn homology_of_cross_at_two() {
    let (_, out, _) = run_on(&["homology", "--coeff", "zp:2", "--json"], &corpus("t2_cross.json"));
    let v = json(&out);
    assert_eq!(ranks(&v, "complement"), vec![2, 0, 0]);
    assert!(v["complement"].as_array().unwrap().iter().all(|g| g["torsion"].as_array().unwrap().is_empty()));
}

#[test]
fn homology_all_lists_every_ring() {
    let (code, out, _) = run_on(&["homology", "--coeff", "all", "--json"], &corpus("t2_cross.json"));
    assert_eq!(code, 0);
    let v = json(&out);
    let coeffs: Vec<&str> = v["answers"].as_array().unwrap().iter().map(|a| a["coeff"].as_str().unwrap()).collect();
    assert_eq!(coeffs, ["Q", "Z_(2)", "Z"]);
    let z = &v["answers"][2];
    assert_eq!(z["model"], "assembled");
    assert_eq!(z["primes_checked"], serde_json::json!([2]));
}

#[test]
fn assert_free_lift_reports_integral_e1() {
    let (_, out, _) = run_on(&["homology", "--assert-free-lift", "--json"], &corpus("t2_parallel.json"));
    let v = json(&out);
    assert_eq!(v["model"], "integral-E1");
    assert_eq!(ranks(&v, "complement"), vec![2, 2, 0]);
    assert!(!v["notes"].as_array().unwrap().is_empty());
}

#[test]
fn json_round_trips() {
    for args in [&["homology", "--coeff", "all", "--json"][..], &["poset", "--json"], &["certify", "--json"]] {
        let (_, out, _) = run_on(args, &corpus("t2_circle_and_point.json"));
        let again = serde_json::to_string_pretty(&json(&out)).unwrap() + "\n";
        assert_eq!(out, again);
    }
}

#[test]
fn certify_corpus_passes() {
    for entry in std::fs::read_dir(corpus("")).unwrap() {
        let path = entry.unwrap().path();
        let (code, out, err) = run_on(&["certify"], &path);
        assert_eq!(code, 0, "{}\n{out}{err}", path.display());
    }
}

#[test]
fn certify_catches_corrupted_differential() {
    let (code, out, _) = run_on(&["certify", "--inject-fault"], &corpus("t2_cross.json"));
    assert_eq!(code, 4);
    assert!(out.contains("FAIL bin-general complex"), "{out}");
}

#[test]
fn certify_without_subtori_prints_torus_table() {
    let (code, out, _) = run_on(&["certify"], &corpus("t2_empty.json"));
    assert_eq!(code, 0);
    assert!(out.contains("  0  Z            2  Z"), "{out}");
    assert!(out.contains("  1  Z^2          1  Z^2"), "{out}");
}

#[test]
fn input_errors_exit_two() {
    let bad_shift = temp_file("shift.json", r#"{"dim": 2, "subtori": [{"directions": [[1, 0]], "shift": ["x", 0]}]}"#);
    let (code, _, err) = run_on(&["homology"], &bad_shift);
    assert_eq!(code, 2);
    assert!(err.contains("subtori[0].shift[0]"), "{err}");
    let truncated = temp_file("truncated.json", "{\"dim\": 2,\n");
    let (code, _, err) = run_on(&["poset"], &truncated);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
    let (code, _, _) = run_on(&["homology", "--coeff", "zp:4"], &corpus("t2_cross.json"));
    assert_eq!(code, 2);
    let (code, _, _) = run_on(&["homology"], Path::new("no-such-file.json"));
    assert_eq!(code, 2);
}

#[test]
fn forced_connected_model_exits_three() {
    let (code, _, err) = run_on(&["homology", "--connected"], &corpus("t2_cross.json"));
    assert_eq!(code, 3);
    assert!(err.contains("{1,2}"), "{err}");
    let (code, out, _) =
        run_on(&["homology", "--connected", "--coeff", "zp:2", "--json"], &corpus("t2_three_concurrent.json"));
    assert_eq!(code, 0);
    assert_eq!(json(&out)["model"], "bin-connected");
}

#[test]
fn full_torus_member_gives_empty_complement() {
    let full = temp_file("full.json", r#"{"dim": 2, "subtori": [{"directions": [[1, 0], [0, 1]]}]}"#);
    let (code, out, _) = run_on(&["homology", "--json"], &full);
    assert_eq!(code, 0);
    assert_eq!(ranks(&json(&out), "complement"), vec![0, 0, 0]);
}

#[test]
fn low_truncation_warns() {
    let (code, _, err) = run_on(&["homology", "--truncation", "1"], &corpus("t2_single_circle.json"));
    assert_eq!(code, 0);
    assert!(err.contains("warning"), "{err}");
}

#[test]
fn thread_flag_overrides_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_subtori"))
        .args(["homology", "--threads", "2", corpus("t2_cross.json").to_str().unwrap()])
        .env("SUBTORI_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_subtori"))
        .args(["homology", corpus("t2_cross.json").to_str().unwrap()])
        .env("SUBTORI_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dump_writes_complexes() {
    let (code, out, _) = run_on(&["dump"], &corpus("t2_three_concurrent.json"));
    assert_eq!(code, 0);
    let v = json(&out);
    for key in ["e1", "bin_general", "bin_connected"] {
        assert!(v[key]["nodes"].is_array(), "{key}");
    }
    let path = std::env::temp_dir().join(format!("subtori-dump-{}.json", std::process::id()));
    let (code, _, _) = run_on(&["homology", "--dump", path.to_str().unwrap()], &corpus("t2_cross.json"));
    assert_eq!(code, 0);
    let dumped: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(dumped.get("bin_connected").is_none());
    std::fs::remove_file(path).unwrap();
}
