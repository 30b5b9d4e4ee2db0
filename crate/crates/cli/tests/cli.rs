use std::path::Path;
use std::process::{Command, Output};

fn apinc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apinc")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|_| panic!("stdout: {}", String::from_utf8_lossy(&o.stdout)))
}

fn stderr_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).unwrap_or_else(|_| panic!("stderr: {}", String::from_utf8_lossy(&o.stderr)))
}

#[test]
fn count_and_gowers() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("a.json");
    std::fs::write(&set, r#"{"N": 8, "members": [1,2,3,4,5,6,7,8]}"#).unwrap();
    let o = apinc(&["count", "--set", set.to_str().unwrap(), "--k", "3", "--nontrivial"]);
    assert!(o.status.success());
    assert_eq!(stdout_json(&o), 12);

    let f = dir.path().join("f.json");
    let (re, im): (Vec<f64>, Vec<f64>) = (0..17)
        .map(|n: u64| {
            let t = 2.0 * std::f64::consts::PI * ((n * n) % 17) as f64 / 17.0;
            (t.cos(), t.sin())
        })
        .unzip();
    std::fs::write(&f, serde_json::json!({"M": 17, "re": re, "im": im}).to_string()).unwrap();
    for method in ["direct", "fft"] {
        let o = apinc(&["gowers", "--fn", f.to_str().unwrap(), "--k", "2", "--method", method]);
        assert!(o.status.success());
        assert!((stdout_json(&o).as_f64().unwrap() - 17f64.powf(-0.25)).abs() < 1e-9);
    }
}

#[test]
fn phase_certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let o = apinc(&["partition-phase", "--phase", "0.5 n", "--range", "1..100", "--eps", "0.1", "--out", cert.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["max_diam"], 0.0);
    let o = apinc(&["verify", "--cert", cert.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["ok"], true);
}

#[test]
fn outputs_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for i in 0..2 {
        let p = dir.path().join(format!("n{i}.json"));
        let o = apinc(&[
            "partition-nil", "--manifold", "heisenberg", "--seq", "sqrt(2) n; sqrt(3) n; 0", "--fn", "cutoff:1,0@1",
            "--range", "1..400", "--eps", "0.1", "--out", p.to_str().unwrap(), "--seed", "5",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        files.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let o = apinc(&["verify", "--cert", dir.path().join("n0.json").to_str().unwrap()]);
    assert!(o.status.success());
}

#[test]
fn corrupted_certificate_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let o = apinc(&["partition-phase", "--phase", "sqrt(2) n", "--range", "1..200", "--eps", "0.1", "--out", cert.to_str().unwrap()]);
    assert!(o.status.success());
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let parts = v["parts"].as_array_mut().unwrap();
    let i = parts.iter().position(|p| p["len"].as_u64().unwrap() >= 2).unwrap();
    let len = parts[i]["len"].as_u64().unwrap();
    parts[i]["len"] = (len - 1).into();
    let j = (i + 1) % parts.len();
    let len = parts[j]["len"].as_u64().unwrap();
    parts[j]["len"] = (len + 1).into();
    std::fs::write(&cert, v.to_string()).unwrap();
    let o = apinc(&["verify", "--cert", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let reasons = stderr_json(&o)["reasons"].clone();
    let reasons: Vec<String> = serde_json::from_value(reasons).unwrap();
    assert!(reasons.iter().any(|r| r == "parts-not-disjoint" || r == "coverage-gap"), "{reasons:?}");
}

#[test]
fn roth_on_digit_set() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let o = apinc(&["roth", "--set", &fixture("behrend729.json"), "--k", "3", "--floor", "8", "--trace", trace.to_str().unwrap()]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["outcome"], "inconclusive");
    assert_eq!(v["reason"], "length-floor");
    assert_eq!(v["densities_increase"], true);
    let lines: Vec<serde_json::Value> =
        std::fs::read_to_string(&trace).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), v["iterations"].as_u64().unwrap() as usize + 1);
    let d: Vec<f64> = lines[..lines.len() - 1].iter().map(|l| l["density"].as_f64().unwrap()).collect();
    assert!(d.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn structured_errors_and_exit_codes() {
    let o = apinc(&["partition-phase", "--phase", "n n", "--range", "1..10", "--eps", "0.1", "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr_json(&o)["error"], "parse-error");

    let o = apinc(&["count", "--set", "/nonexistent/set.json", "--k", "3"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr_json(&o)["error"], "io-error");

    let o = apinc(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(4));

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    std::fs::write(&f, serde_json::json!({"M": 64, "re": vec![0.5; 64], "im": vec![0.0; 64]}).to_string()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_apinc"))
        .args(["gowers", "--fn", f.to_str().unwrap(), "--k", "3", "--method", "direct"])
        .env("APINC_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "budget-exceeded");
}
