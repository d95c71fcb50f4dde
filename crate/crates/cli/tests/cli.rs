use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn snsqp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snsqp")).args(args).output().expect("spawn snsqp")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path, name: &str, family: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut args = vec!["generate", family];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["-o", path_str(&out)]);
    let o = snsqp(&args);
    assert!(o.status.success(), "generate {family} {extra:?}: {}", stderr(&o));
    out
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

const FAMILIES: [(&str, &[&str]); 4] = [
    ("recovery-simplex", &["--n", "60", "--d", "40", "--s", "3"]),
    ("recovery-qcqp", &["--n", "40", "--d", "42", "--k", "1", "--m", "1", "--s", "3"]),
    ("scca-synth", &["--n-x", "40", "--n-y", "48", "--s", "4"]),
    ("sps-synth", &["--n", "60", "--s", "5"]),
];

#[test]
fn generate_solve_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (family, dims) in FAMILIES {
        let mut ok = 0;
        for seed in 0..20u64 {
            let seed_s = seed.to_string();
            let mut args = dims.to_vec();
            args.extend_from_slice(&["--seed", &seed_s]);
            let inst = generate(dir.path(), &format!("{family}-{seed}.json"), family, &args);
            let report = dir.path().join(format!("{family}-{seed}.report.json"));
            let solved = snsqp(&["solve", path_str(&inst), "-o", path_str(&report)]);
            if !solved.status.success() {
                continue;
            }
            let checked = snsqp(&["check", path_str(&inst), path_str(&report)]);
            let metrics = &read_json(&report)["metrics"];
            let relerr_ok = match metrics["relerr"].as_f64() {
                Some(r) if family.starts_with("recovery") => r <= 1e-6,
                _ => true,
            };
            if checked.status.success() && stdout(&checked).starts_with("PASS") && relerr_ok {
                ok += 1;
            }
        }
        assert!(ok >= 19, "{family}: {ok}/20 round trips");
    }
}

#[test]
fn generation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for (family, dims) in FAMILIES {
        let mut args = dims.to_vec();
        args.extend_from_slice(&["--seed", "7"]);
        let a = generate(dir.path(), "a.json", family, &args);
        let b = generate(dir.path(), "b.json", family, &args);
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), "{family}");
    }
}

#[test]
fn box22_bounds_are_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(
        dir.path(),
        "box.json",
        "recovery-qcqp",
        &["--n", "20", "--d", "22", "--k", "1", "--m", "1", "--s", "2", "--box", "box22"],
    );
    let json = read_json(&inst);
    let bx = &json["box"];
    let lower = bx["lower"].as_array().unwrap();
    let upper = bx["upper"].as_array().unwrap();
    assert_eq!(lower.len(), 20);
    assert!(lower.iter().all(|v| v.as_f64() == Some(-2.0)), "{lower:?}");
    assert!(upper.iter().all(|v| v.as_f64() == Some(2.0)), "{upper:?}");
}

#[test]
fn sps_needs_four_nonzeros() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sps.json");
    let o = snsqp(&["generate", "sps-synth", "--n", "20", "--s", "3", "-o", path_str(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad dimensions"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn malformed_instance_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "ok.json", "sps-synth", &["--n", "12", "--s", "4"]);
    let mut json = read_json(&inst);
    json["s"] = Value::String("four".into());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, json.to_string()).unwrap();
    let o = snsqp(&["solve", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("at `s`"), "{}", stderr(&o));

    std::fs::write(&bad, "{\"n\": 3").unwrap();
    assert_eq!(snsqp(&["solve", path_str(&bad)]).status.code(), Some(1));
}

#[test]
fn sigma_must_stay_below_a_half() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "i.json", "sps-synth", &["--n", "12", "--s", "4"]);
    let o = snsqp(&["solve", path_str(&inst), "--sigma", "0.7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sigma"), "{}", stderr(&o));
}

#[test]
fn check_rejects_bad_points() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "i.json", "recovery-qcqp", &["--n", "10", "--d", "12", "--s", "2"]);

    let zero = dir.path().join("zero.json");
    std::fs::write(&zero, serde_json::to_string(&vec![0.0; 10]).unwrap()).unwrap();
    let o = snsqp(&["check", path_str(&inst), path_str(&zero)]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("FAIL"));

    let dense = dir.path().join("dense.json");
    std::fs::write(&dense, serde_json::to_string(&vec![0.5; 10]).unwrap()).unwrap();
    let o = snsqp(&["check", path_str(&inst), path_str(&dense)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("sparsity violated"), "{}", stdout(&o));
}

fn write_spec(dir: &Path, name: &str, spec: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, spec).unwrap();
    p
}

#[test]
fn bench_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "spec.json",
        r#"{"family": "recovery-qcqp", "grid": [{"n": 30, "d": 32, "k": 1, "m": 1, "s": 3}], "seeds": 3}"#,
    );
    let csv = dir.path().join("out.csv");
    let o = snsqp(&["bench", path_str(&spec), "-o", path_str(&csv), "--jobs", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 2, "{text}");
    assert!(dir.path().join("out.md").exists());

    let empty = write_spec(dir.path(), "empty.json", r#"{"family": "recovery-qcqp", "grid": [], "seeds": 3}"#);
    let o = snsqp(&["bench", path_str(&empty)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("grid"), "{}", stderr(&o));
}

#[test]
fn recovery_sweep_keeps_accuracy_as_n_grows() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "sweep.json",
        r#"{"family": "recovery-qcqp",
            "grid": [{"n": 200, "d": 205, "k": 1, "m": 1, "s": 5}, {"n": 400, "d": 405, "k": 1, "m": 1, "s": 5}],
            "seeds": 5}"#,
    );
    let csv = dir.path().join("sweep.csv");
    let o = snsqp(&["bench", path_str(&spec), "-o", path_str(&csv), "--jobs", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    let mut times = Vec::new();
    for row in &rows {
        let relerr: f64 = row[col("relerr_median")].parse().unwrap();
        assert!(relerr <= 1e-6, "relerr {relerr} at n = {}", &row[col("n")]);
        times.push(row[col("time_median_s")].parse::<f64>().unwrap());
    }
    assert!(times[1] >= times[0], "median times {times:?}");
}

/// Keys of a report, recursively, with array elements collapsed.
fn key_paths(v: &Value, prefix: &str, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let p = format!("{prefix}/{k}");
                out.push(p.clone());
                key_paths(child, &p, out);
            }
        }
        Value::Array(items) => {
            if let Some(first) = items.first() {
                key_paths(first, &format!("{prefix}[]"), out);
            }
        }
        _ => {}
    }
}

#[test]
fn report_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(
        dir.path(),
        "i.json",
        "recovery-qcqp",
        &["--n", "30", "--d", "32", "--k", "1", "--m", "1", "--s", "3", "--seed", "11"],
    );
    let o = snsqp(&["solve", path_str(&inst)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/report_keys.txt");

    let mut keys = Vec::new();
    key_paths(&report, "", &mut keys);
    keys.sort();
    keys.dedup();
    let golden = std::fs::read_to_string(&golden_path).unwrap();
    let expected: Vec<&str> = golden.lines().collect();
    assert_eq!(keys, expected);

    // Everything except timing is deterministic.
    report.as_object_mut().unwrap().remove("wall_time_s");
    report["metrics"].as_object_mut().unwrap().remove("solve_time_s");
    let o2 = snsqp(&["solve", path_str(&inst)]);
    let mut again: Value = serde_json::from_str(&stdout(&o2)).unwrap();
    again.as_object_mut().unwrap().remove("wall_time_s");
    again["metrics"].as_object_mut().unwrap().remove("solve_time_s");
    assert_eq!(report, again);
}
