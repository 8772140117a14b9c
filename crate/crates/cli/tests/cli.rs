use std::path::Path;
use std::process::{Command, Output};

fn hardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy")).args(args).output().unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn params_for_level_500() {
    let o = hardy(&["params", "--n", "500"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["x_n"], 131);
    assert!(v["M_n"].as_f64().unwrap() < 0.0);
    assert!(!v["notes"].as_array().unwrap().is_empty());
    assert_eq!(v["m_first_digits"], 11);
    assert_eq!(v["m_last_digits"], 50);
    assert_eq!(hardy(&["params", "--n", "49"]).status.code(), Some(2));
}

#[test]
fn acov_range_and_aliases() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("acov.csv");
    let o = hardy(&["acov", "--lags", "0..2000", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = read(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lag,value,block,r");
    assert_eq!(lines.len(), 2002);
    assert!(lines[1].starts_with("0,5.0000000000000000e0,"));
    assert!(dir.path().join("acov.csv.manifest.json").exists());

    let o = hardy(&["acov", "--lags", "c2,qn1"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    let c2 = rows[0].split(',').next().unwrap();
    let q1 = rows[1].split(',').next().unwrap();
    assert_eq!(c2, add_small(q1, 2));
    assert!(rows[0].ends_with(",2,1"));

    assert_eq!(hardy(&["acov", "--lags=-1"]).status.code(), Some(2));
    assert_eq!(hardy(&["acov", "--lags", "12x"]).status.code(), Some(2));
}

/// s + k on decimal strings.
fn add_small(s: &str, k: u8) -> String {
    let mut digits: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
    let mut carry = k;
    for d in digits.iter_mut().rev() {
        let v = *d + carry;
        *d = v % 10;
        carry = v / 10;
        if carry == 0 {
            break;
        }
    }
    let mut out: String = digits.iter().map(|d| (d + b'0') as char).collect();
    if carry > 0 {
        out.insert(0, (carry + b'0') as char);
    }
    out
}

#[test]
fn density_grid() {
    let o = hardy(&["density", "--grid", "64"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let vals: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(vals.len(), 64);
    for i in 0..32 {
        assert_eq!(vals[i], vals[63 - i]);
    }
    assert!(vals.iter().all(|v| *v >= 0.474));
    assert_eq!(hardy(&["density", "--grid", "0"]).status.code(), Some(2));
}

#[test]
fn compare_is_reproducible_and_unflagged() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["compare", "--length", "600", "--count", "100", "--seed", "42", "--max-lag", "20"];
    for p in [&a, &b] {
        let mut v: Vec<&str> = args.to_vec();
        v.extend(["--out", p.to_str().unwrap()]);
        assert!(hardy(&v).status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = read(&a);
    assert_eq!(text.lines().next().unwrap(), "lag,theoretical,empirical_mean,empirical_se,z");
    assert_eq!(text.lines().count(), 22);
    assert!(!text.contains('\r'));
    let m: serde_json::Value = serde_json::from_str(&read(&dir.path().join("a.csv.manifest.json"))).unwrap();
    assert_eq!(m["results"]["flags"], serde_json::json!([]));
    assert_eq!(m["seed"], 42);
    assert_eq!(m["parameters"]["simulation"]["normal_method"], "marsaglia-polar/chacha8");
    assert_eq!(hardy(&["compare", "--count", "0"]).status.code(), Some(2));
}

#[test]
fn simulate_writes_rows() {
    let o = hardy(&["simulate", "--length", "5", "--count", "2", "--seed", "1"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "replicate,t,value");
    assert_eq!(text.lines().count(), 11);
    assert_eq!(hardy(&["simulate", "--length", "6000", "--count", "1"]).status.code(), Some(2));
}

#[test]
fn divergence_rows() {
    let o = hardy(&["divergence", "--block", "2", "--samples", "300", "--seed", "5"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 300);
    let inside: Vec<&&str> = rows.iter().filter(|r| r.contains(",true,")).collect();
    assert!(!inside.is_empty());
    assert!(inside.iter().all(|r| r.ends_with(",true")));
    let one = hardy(&["divergence", "--block", "1", "--samples", "1"]);
    assert!(one.status.success());
    assert_eq!(String::from_utf8(one.stdout).unwrap().lines().count(), 2);
    assert_eq!(hardy(&["divergence", "--block", "3"]).status.code(), Some(2));
}

#[test]
fn mini_mode_chain_and_usage_errors() {
    let o = hardy(&["acov", "--levels", "50", "--mini-mode", "--lags", "0..3"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 5);
    assert_eq!(hardy(&["acov", "--levels", "600,500"]).status.code(), Some(3));
    assert_eq!(hardy(&["nope"]).status.code(), Some(2));
}
