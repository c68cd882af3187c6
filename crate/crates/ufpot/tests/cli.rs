//! End-to-end checks of the command-line surface: exit codes, report
//! files, and table output.

use std::process::Command;

fn ufpot() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ufpot"))
}

fn write_trace(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("ufpot-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_tiny_trace_writes_reports() {
    let trace = write_trace("tiny.txt", "n 2\nu 0 1\nf 1\n");
    let out_dir = std::env::temp_dir().join("ufpot-cli-tests/tiny-out");
    let output = ufpot()
        .args(["run"])
        .arg(&trace)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["overall_pass"], true);

    // Two internal finds from the union plus the explicit find.
    let csv = std::fs::read_to_string(out_dir.join("finds.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 4, "header + 3 rows: {csv}");
    assert!(rows[0].starts_with("step,sub,path_nodes,path_edges"));
    assert!(rows[0].contains("sqrt_delta_phi,sqrt_events,sqrt_verdict"));
}

#[test]
fn corrupted_constant_fails_with_exit_1() {
    let trace = write_trace("corrupt.txt", "n 8\nu 0 1\nu 2 3\nu 0 2\nf 3\nf 1\n");
    let output = ufpot()
        .args(["run"])
        .arg(&trace)
        .args(["--override-constant", "C_SQRT=0.1"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("FAIL  account-sqrt"), "{stdout}");
}

#[test]
fn syntax_error_fails_with_exit_2() {
    let trace = write_trace("syntax.txt", "n 4\nu 0 1\nx 9 9\n");
    let output = ufpot().args(["run"]).arg(&trace).output().unwrap();
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let missing = std::env::temp_dir().join("ufpot-cli-tests/does-not-exist.txt");
    let output = ufpot().args(["run"]).arg(&missing).output().unwrap();
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn bounds_table_values() {
    let output = ufpot()
        .args(["bounds", "1", "16", "1000000"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let rows: Vec<&str> = stdout.lines().collect();
    assert_eq!(rows[0], "n,log2,log2log2,log_star,loghat_star,loghat_star2,alpha");
    assert_eq!(rows[1], "1,0.000,0.000,0,0,0,0");
    let r16: Vec<&str> = rows[2].split(',').collect();
    assert_eq!(r16[3], "3"); // log*(16)
    let r1m: Vec<&str> = rows[3].split(',').collect();
    assert_eq!(r1m[6], "5"); // alpha(10^6)
}

#[test]
fn check_lemmas_passes_and_empty_grid_warns() {
    let output = ufpot().args(["check-lemmas", "--samples", "64"]).output().unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert_eq!(stdout.matches("PASS").count(), 3, "{stdout}");

    let output = ufpot()
        .args(["check-lemmas", "--samples", "0", "--lo-exp", "63"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("warning"), "{stderr}");
}

#[test]
fn gen_round_trips_through_run() {
    let output = ufpot()
        .args(["gen", "random", "--n", "100", "--m", "500", "--seed", "11"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let trace_text = String::from_utf8(output.stdout).unwrap();
    let trace = write_trace("gen.txt", &trace_text);
    let run = ufpot().args(["run"]).arg(&trace).output().unwrap();
    assert!(run.status.success(), "{run:?}");
}

#[test]
fn seed_env_var_changes_generation() {
    let gen = |env: Option<&str>| {
        let mut cmd = ufpot();
        cmd.args(["gen", "random", "--n", "50", "--m", "100"]);
        if let Some(seed) = env {
            cmd.env("UFPOT_SEED", seed);
        }
        String::from_utf8(cmd.output().unwrap().stdout).unwrap()
    };
    let a = gen(Some("123"));
    let b = gen(Some("123"));
    let c = gen(Some("456"));
    assert_eq!(a, b);
    assert_ne!(a, c);
    // explicit flag beats the environment
    let mut cmd = ufpot();
    cmd.args(["gen", "random", "--n", "50", "--m", "100", "--seed", "123"]);
    cmd.env("UFPOT_SEED", "456");
    let d = String::from_utf8(cmd.output().unwrap().stdout).unwrap();
    assert_eq!(a, d);
}

#[test]
fn run_on_binomial_generator_output() {
    let output = ufpot()
        .args(["gen", "binomial", "--k", "16", "--finds", "3"])
        .output()
        .unwrap();
    let trace = write_trace("binom16.txt", &String::from_utf8(output.stdout).unwrap());
    let run = ufpot().args(["run"]).arg(&trace).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{run:?}");
}

#[test]
fn bench_single_repeat_prints_one_row() {
    let output = ufpot()
        .args(["bench", "--n", "1000", "--m", "10000", "--repeats", "1"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1, "{stdout}");
    assert!(!stdout.contains("median"));
}
