use std::process::{Command, Output};

use hyperlat::sampling::read_dump;

fn hyperlat(args: &[&str]) -> Output {
    hyperlat_env(args, &[])
}

fn hyperlat_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hyperlat"));
    for key in [
        "HYPERLAT_THREADS",
        "HYPERLAT_CACHE_DIR",
        "HYPERLAT_BUDGET",
        "HYPERLAT_FORMAT",
        "HYPERLAT_OUTPUT",
        "HYPERLAT_SEED",
    ] {
        cmd.env_remove(key);
    }
    cmd.args(args)
        .envs(env.iter().copied())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_prints_the_cardinality() {
    let o = hyperlat(&["count", "--l", "2", "--r", "2", "--n", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "8\n");
}

#[test]
fn u_cdf_at_the_endpoint() {
    let o = hyperlat(&["u-cdf", "--l", "1", "--r", "2", "--x", "0.25"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1.0\n");
}

#[test]
fn exit_codes() {
    assert_eq!(
        hyperlat(&["count", "--l", "3", "--r", "2", "--n", "4"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        hyperlat(&["count", "--l", "2", "--r", "2", "--n", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        hyperlat(&["count", "--l", "2", "--r", "2"]).status.code(),
        Some(1)
    );
    assert_eq!(hyperlat(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(hyperlat(&["--help"]).status.code(), Some(0));
    let budget = hyperlat(&[
        "count",
        "--l",
        "2",
        "--r",
        "3",
        "--n",
        "10000000000",
        "--budget",
        "1000",
    ]);
    assert_eq!(budget.status.code(), Some(2));
    assert!(budget.stdout.is_empty());
    // a failing gate
    let gate = hyperlat(&["spacings", "--r", "3", "--n", "100000", "-m", "5000"]);
    assert_eq!(gate.status.code(), Some(3));
}

#[test]
fn dump_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.csv");
    let p = path.to_str().unwrap();
    let args = [
        "sample", "--l", "2", "--r", "3", "--n", "5000", "-m", "300", "--seed", "17",
    ];
    let o = hyperlat(&[&args[..], &["--dump", p]].concat());
    assert!(o.status.success());
    let dumped = read_dump(&path).unwrap();
    assert_eq!(dumped.len(), 300);
    let csv = stdout(&hyperlat(&[&args[..], &["--format", "csv"]].concat()));
    let printed: Vec<Vec<u128>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let dumped: Vec<Vec<u128>> = dumped.into_iter().map(|p| p.coords).collect();
    assert_eq!(printed, dumped);
    assert!(dir.path().join("pts.csv.meta.json").exists());
}

#[test]
fn seed_determines_output() {
    let run = |seed: &str, threads: &str| {
        stdout(&hyperlat(&[
            "sample",
            "--l",
            "2",
            "--r",
            "2",
            "--n",
            "100000",
            "-m",
            "9000",
            "--seed",
            seed,
            "--threads",
            threads,
        ]))
    };
    let a = run("3", "1");
    assert_eq!(a, run("3", "4"));
    assert_ne!(a, run("4", "1"));
    let sum = |threads: &str| {
        stdout(&hyperlat(&[
            "hypersum",
            "--l",
            "2",
            "--r",
            "3",
            "--n",
            "20000",
            "--f",
            "log",
            "--mode",
            "lcm",
            "--threads",
            threads,
        ]))
    };
    assert_eq!(sum("1"), sum("3"));
}

#[test]
fn flags_override_environment() {
    let args = ["sample", "--l", "2", "--r", "2", "--n", "1000", "-m", "20"];
    let env_only = stdout(&hyperlat_env(&args, &[("HYPERLAT_SEED", "8")]));
    assert_eq!(
        env_only,
        stdout(&hyperlat(&[&args[..], &["--seed", "8"]].concat()))
    );
    let flagged = stdout(&hyperlat_env(
        &[&args[..], &["--seed", "9"]].concat(),
        &[("HYPERLAT_SEED", "8")],
    ));
    assert_eq!(
        flagged,
        stdout(&hyperlat(&[&args[..], &["--seed", "9"]].concat()))
    );
    assert_ne!(flagged, env_only);
    let json = stdout(&hyperlat_env(
        &["count", "--l", "2", "--r", "2", "--n", "4"],
        &[("HYPERLAT_FORMAT", "json")],
    ));
    assert!(json.contains("\"count\": \"8\""));
}

#[test]
fn cache_directory_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = hyperlat_env(
        &["count", "--l", "2", "--r", "3", "--n", "30000"],
        &[("HYPERLAT_CACHE_DIR", d)],
    );
    assert!(o.status.success());
    let table = std::fs::read_to_string(dir.path().join("counts.tsv")).unwrap();
    assert!(table.contains("v1:count:2:3:30000\t"));
    let again = hyperlat(&[
        "count",
        "--l",
        "2",
        "--r",
        "3",
        "--n",
        "30000",
        "--cache-dir",
        d,
    ]);
    assert_eq!(stdout(&again), stdout(&o));
}

#[test]
fn output_file_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = hyperlat(&[
        "lcm-moment",
        "--r",
        "2",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.730_763).abs() < 1e-5);
    let csv = stdout(&hyperlat(&[
        "gcd-dist",
        "--r",
        "2",
        "--max-value",
        "3",
        "--format",
        "csv",
    ]));
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("m,limit_pmf\n1,0.6079"));
    let h = stdout(&hyperlat(&[
        "hypersum",
        "--l",
        "2",
        "--r",
        "2",
        "--n",
        "4",
        "--f",
        "indicator-of-one",
    ]));
    assert_eq!(h, "7\n");
}

#[test]
fn quick_verify_exit_status_follows_the_reports() {
    let o = hyperlat(&["verify", "--quick", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let criteria = v.as_array().unwrap();
    assert_eq!(criteria.len(), 15);
    let all_pass = criteria.iter().all(|c| c["verdict"] == "pass");
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 3 }));
}

#[test]
fn quick_verify_reports_are_reproducible() {
    let args = [
        "verify",
        "--quick",
        "--criteria",
        "6,7,8,11,12,13",
        "--format",
        "json",
        "--seed",
        "5",
    ];
    let a = hyperlat(&args);
    let b = hyperlat(&args);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}
