//! The binary's external contract, exit codes and output bytes, checked by
//! running it as a subprocess.

use std::process::{Command, Output};

fn selfpower(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfpower")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_one_lambda() {
    let o = selfpower(&["solve", "--p", "7", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "p,lambda,J,ord_lambda\n7,1,2,1\n");
}

#[test]
fn solve_spectrum_sums_to_p_minus_one() {
    let o = selfpower(&["solve", "--p", "7", "--all-lambda"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(str::to_owned).collect();
    assert_eq!(rows.len(), 6);
    let total: u64 = rows.iter().map(|r| r.split(',').nth(2).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 6);
}

#[test]
fn solve_json() {
    let o = selfpower(&["solve", "--p", "5", "--all-lambda", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(v[0]["J"], 2);
}

#[test]
fn composite_modulus_exits_two() {
    let o = selfpower(&["solve", "--p", "9", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not prime"));
}

#[test]
fn caps_exit_three() {
    assert_eq!(selfpower(&["solve", "--p", "1009", "--all-lambda", "--cap-spectrum", "1000"]).status.code(), Some(3));
    assert_eq!(selfpower(&["expsum", "--p", "1009", "--cap-expsum-work", "100"]).status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    std::fs::write(&file, b"").unwrap();
    let out = file.join("nested");
    let o = selfpower(&["sweep", "--p-min", "3", "--p-max", "30", "--tasks", "t1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn sweep_fixed_points_small_range() {
    let dir = tempfile::tempdir().unwrap();
    let o = selfpower(&["sweep", "--p-min", "3", "--p-max", "50", "--tasks", "t1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("t1.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|r| r.split(',').nth(1).unwrap().parse::<u64>().unwrap() >= 2));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["suites"][0]["columns"][1], "J1");
    assert_eq!(manifest["primes"].as_array().unwrap().len(), 14);
}

#[test]
fn sweep_decomposition_has_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let o = selfpower(&["sweep", "--p-min", "3", "--p-max", "1000", "--tasks", "decomp", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn sweep_image_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let o = selfpower(&["sweep", "--p-min", "3", "--p-max", "100", "--tasks", "image", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(19, image"));
}

#[test]
fn sweep_bytes_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (name, threads) in [("a", "1"), ("b", "2")] {
        let out = dir.path().join(name);
        selfpower(&[
            "sweep", "--p-min", "3", "--p-max", "300", "--tasks", "t2,expsum", "--threads", threads, "--out",
            out.to_str().unwrap(),
        ]);
        outputs.push((std::fs::read(out.join("t2.csv")).unwrap(), std::fs::read(out.join("expsum.csv")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn verify_quick_and_fault() {
    let o = selfpower(&["verify", "--level", "quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    let o = selfpower(&["verify", "--inject-fault", "jd-off-by-one"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("(7, J_d d=2, expected 1, got 2)"));
}

#[test]
fn report_flags() {
    let o = selfpower(&["report", "--p", "7", "--t", "3", "--d", "2", "--n", "3", "--M", "6", "--u", "1", "--v", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for q in ["J1", "I", "ORDER_SUM_T", "TD", "LEMMA1", "L1SUM", "EXPSUM_MAX"] {
        assert!(text.lines().any(|l| l.split(',').nth(1) == Some(q)), "{q} missing:\n{text}");
    }
}
