//! End-to-end checks of the command-line interface: determinism, exit codes,
//! overrides, diagnostics.

use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fouprice"))
}

fn config_file(body: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

fn small_config() -> NamedTempFile {
    config_file(
        r#"{
            "H": 0.6,
            "vol": {"kind": "sqrt_abs_shift", "c": 0.1},
            "payoff": {"calls": [{"w": 1, "k": 1}], "digitals": [{"w": 1, "l": 1}]},
            "methods": ["direct", "level1", "level2", "level3"],
            "n_list": [64, 128],
            "n_paths": 300
        }"#,
    )
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn table_output_is_byte_identical_across_runs_and_thread_counts() {
    let cfg = small_config();
    let path = cfg.path().to_str().unwrap();
    let base = run(&["table", "--config", path]);
    assert!(base.status.success(), "{}", String::from_utf8_lossy(&base.stderr));
    for threads in ["1", "8"] {
        for _ in 0..2 {
            let out = run(&["table", "--config", path, "--threads", threads]);
            assert!(out.status.success());
            assert_eq!(
                out.stdout, base.stdout,
                "output differs at --threads {threads}"
            );
        }
    }
}

#[test]
fn price_with_override_is_deterministic_and_echoes_the_override() {
    let cfg = small_config();
    let path = cfg.path().to_str().unwrap();
    let args = [
        "price",
        "--method",
        "level2",
        "--config",
        path,
        "--override",
        "master_seed=7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let stdout = String::from_utf8(a.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 2, "one header plus one row:\n{stdout}");
    assert!(stdout.lines().nth(1).unwrap().starts_with("level2,128,300,7,"));
    // the effective-config block on stderr carries the override verbatim
    let stderr = String::from_utf8(a.stderr).unwrap();
    assert!(stderr.contains("effective config"), "{stderr}");
    assert!(stderr.contains("\"master_seed\": 7"), "{stderr}");
}

#[test]
fn default_table_has_21_rows() {
    let cfg = config_file(
        r#"{
            "H": 0.75,
            "vol": {"kind": "abs_shift", "c": 0.2},
            "payoff": {"calls": [{"w": 1, "k": 1}], "digitals": [{"w": 1, "l": 1}]},
            "n_paths": 100
        }"#,
    );
    let out = run(&["table", "--config", cfg.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    // 3 default methods x 7 default grid sizes, plus the header
    assert_eq!(stdout.lines().count(), 22, "{stdout}");
    assert!(stdout.starts_with("method,n_grid,n_paths,master_seed,value,std_error,runtime_ms\n"));
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    // 3: missing config file
    let out = run(&["table", "--config", "/nonexistent/nope.json"]);
    assert_eq!(out.status.code(), Some(3));

    // 4: malformed document
    let bad = config_file("{ not json");
    let out = run(&["table", "--config", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));

    // 4: unknown key introduced by an override
    let cfg = small_config();
    let out = run(&[
        "table",
        "--config",
        cfg.path().to_str().unwrap(),
        "--override",
        "bogus_key=3",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_key"));

    // 5: well-formed but invalid
    let out = run(&[
        "table",
        "--config",
        cfg.path().to_str().unwrap(),
        "--override",
        "H=1.2",
    ]);
    assert_eq!(out.status.code(), Some(5));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("hurst must lie in (0.5, 1)"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // 2: clap usage error
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_documents_exit_codes() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Exit codes"), "{text}");
    assert!(text.contains("self-test failed"), "{text}");
}

#[test]
fn fbm_selftest_passes_for_brownian_motion() {
    let out = run(&[
        "fbm-selftest",
        "--H",
        "0.5",
        "--n",
        "1000",
        "--paths",
        "20000",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("all checks passed"), "{text}");
}

#[test]
fn fbm_selftest_rejects_invalid_hurst() {
    let out = run(&["fbm-selftest", "--H", "0.3", "--n", "64", "--paths", "1000"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn converge_emits_csv_and_slopes() {
    let cfg = config_file(
        r#"{
            "H": 0.6,
            "vol": {"kind": "sqrt_quadratic"},
            "payoff": {"calls": [{"w": 1, "k": 1}], "digitals": [{"w": 1, "l": 1}]},
            "n_list": [128, 256, 512],
            "n_paths": 100
        }"#,
    );
    let path = cfg.path().to_str().unwrap();
    let a = run(&["converge", "--config", path, "--paths", "10"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let stdout = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(stdout.starts_with("n_grid,value,abs_error,fitted_slope,predicted_slope\n"));
    assert_eq!(stdout.lines().count(), 4);
    let stderr = String::from_utf8(a.stderr).unwrap();
    assert!(stderr.contains("fitted slope"), "{stderr}");
    let b = run(&["converge", "--config", path, "--paths", "10"]);
    assert_eq!(a.stdout, b.stdout);

    // non-divisible grid sizes are a validation error
    let bad = config_file(
        r#"{
            "H": 0.6,
            "vol": {"kind": "sqrt_quadratic"},
            "payoff": {"calls": [{"w": 1, "k": 1}]},
            "n_list": [125, 250],
            "n_paths": 100
        }"#,
    );
    let out = run(&["converge", "--config", bad.path().to_str().unwrap(), "--paths", "5"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn out_flag_writes_the_csv_to_a_file() {
    let cfg = small_config();
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("rows.csv");
    let out = run(&[
        "price",
        "--config",
        cfg.path().to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    // no --method: falls back to the first configured method
    assert!(text.lines().nth(1).unwrap().starts_with("direct,128,"));
}
