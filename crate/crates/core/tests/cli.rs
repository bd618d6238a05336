//! End-to-end runs of the `parasitech` binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin(dir: &Path) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_parasitech"));
    cmd.current_dir(dir)
        .env("SOURCE_DATE_EPOCH", "0")
        .env_remove("PARASITECH_SEED");
    cmd
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const SIMULATE: &[&str] = &[
    "simulate",
    "--k1",
    "100",
    "--b1",
    "0.05",
    "--t1",
    "2000",
    "--k2",
    "50",
    "--b2",
    "0.087",
    "--t2",
    "2000",
    "--t-start",
    "1850",
    "--t-end",
    "1893",
    "--n",
    "44",
    "--noise",
    "0.03",
    "--seed",
    "42",
    "--out-prefix",
    "run",
];

fn simulated() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), SIMULATE);
    assert!(o.status.success(), "{}", stderr(&o));
    dir
}

#[test]
fn classify_prints_grade_mode_and_symbol() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["classify", "--b", "1.74", "--se", "0.11", "--n", "44"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.contains("grade 3") && out.contains("symbiosis") && out.contains('!'),
        "{out}"
    );
    let o = run(dir.path(), &["classify", "--b", "0.23"]);
    assert!(stdout(&o).contains("grade 1"));
}

#[test]
fn usage_errors_exit_four_with_code_line() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["classify", "--b", "abc"][..],
        &["classify", "--b", "1", "--bogus"],
        &["nonsense"],
    ] {
        let o = run(dir.path(), args);
        assert_eq!(o.status.code(), Some(4), "{args:?}");
        assert!(stderr(&o).starts_with("error[USAGE]: "), "{}", stderr(&o));
    }
}

#[test]
fn data_and_fit_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["stats", "--input", "missing.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[IO]: "));

    std::fs::write(dir.path().join("bad.csv"), "t,value\n1,2\n2,x\n").unwrap();
    let o = run(dir.path(), &["stats", "--input", "bad.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("error[FORMAT]") && stderr(&o).contains("bad.csv:3:"),
        "{}",
        stderr(&o)
    );

    std::fs::write(dir.path().join("down.csv"), "t,value\n1,9\n2,7\n3,5\n4,4\n5,3\n").unwrap();
    let o = run(dir.path(), &["fit-logistic", "--input", "down.csv"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error[FIT_FAILURE]"));
}

#[test]
fn every_help_lists_defaults() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in [
        "evolve",
        "evolve-multi",
        "fit-logistic",
        "forecast",
        "correlate",
        "classify",
        "simulate",
        "recover",
        "stats",
        "standardize",
    ] {
        let o = run(dir.path(), &[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        let help = stdout(&o);
        assert!(help.contains("--format") || cmd == "simulate", "{cmd}");
        assert!(help.contains("[default: "), "{cmd}: {help}");
    }
}

#[test]
fn simulate_then_evolve_is_deterministic() {
    let dir = simulated();
    let args = [
        "evolve",
        "--host",
        "run_host.csv",
        "--parasite",
        "run_parasite.csv",
        "--format",
        "json",
    ];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["meta"]["generated_at"], "1970-01-01T00:00:00Z");
    assert_eq!(
        v["meta"]["inputs"],
        serde_json::json!(["run_host.csv", "run_parasite.csv"])
    );
    let b_hat = v["fits"][0]["b"].as_f64().unwrap();
    assert!((b_hat - 1.74).abs() < 0.05, "{b_hat}");
    assert_eq!(v["fits"][0]["classification"]["grade"], 3);
}

#[test]
fn simulate_seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let no_seed: Vec<&str> = SIMULATE
        .iter()
        .copied()
        .filter(|a| *a != "--seed" && *a != "42")
        .collect();
    let o = bin(dir.path())
        .args(&no_seed)
        .env("PARASITECH_SEED", "42")
        .output()
        .unwrap();
    assert!(o.status.success());
    let from_env = std::fs::read(dir.path().join("run_host.csv")).unwrap();
    let flagged = simulated();
    assert_eq!(from_env, std::fs::read(flagged.path().join("run_host.csv")).unwrap());

    let o = bin(dir.path())
        .args(SIMULATE)
        .env("PARASITECH_SEED", "7")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(
        from_env,
        std::fs::read(dir.path().join("run_host.csv")).unwrap(),
        "flag wins"
    );
}

#[test]
fn text_and_csv_reports_and_plot_data() {
    let dir = simulated();
    let o = run(
        dir.path(),
        &[
            "evolve",
            "--host",
            "run_host.csv",
            "--parasite",
            "run_parasite.csv",
            "--plot-data",
            "plot",
        ],
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("Evolutionary coefficient B"));
    assert!(dir.path().join("plot_fit1.csv").exists());
    assert!(dir.path().join("plot_trajectories.csv").exists());

    let o = run(
        dir.path(),
        &[
            "evolve",
            "--host",
            "run_host.csv",
            "--parasite",
            "run_parasite.csv",
            "--format",
            "csv",
        ],
    );
    assert!(
        stdout(&o)
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("simple,run_parasite,run_host,44,"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn evolve_multi_and_correlate() {
    let dir = simulated();
    let o = run(
        dir.path(),
        &[
            "simulate",
            "--k1",
            "100",
            "--b1",
            "0.05",
            "--t1",
            "2000",
            "--k2",
            "80",
            "--b2",
            "0.03",
            "--t2",
            "1990",
            "--t-start",
            "1850",
            "--t-end",
            "1893",
            "--n",
            "44",
            "--noise",
            "0.05",
            "--seed",
            "3",
            "--out-prefix",
            "other",
        ],
    );
    assert!(o.status.success());
    let o = run(
        dir.path(),
        &[
            "evolve-multi",
            "--host",
            "run_host.csv",
            "--parasite",
            "run_parasite.csv",
            "--parasite",
            "other_parasite.csv",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("Multidimensional evolution of `run_parasite`"),
        "{}",
        stdout(&o)
    );

    let o = run(
        dir.path(),
        &[
            "correlate",
            "--series",
            "run_host.csv",
            "--series",
            "run_parasite.csv",
            "--format",
            "json",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["entries"][0][1]["r"].as_f64().unwrap() > 0.99);
}

#[test]
fn single_series_commands() {
    let dir = simulated();
    let o = run(dir.path(), &["stats", "--input", "run_host.csv", "--log"]);
    assert!(stdout(&o).contains("n: 44"), "{}", stdout(&o));
    let o = run(dir.path(), &["standardize", "--input", "run_host.csv"]);
    assert_eq!(stdout(&o).lines().count(), 45);

    std::fs::write(
        dir.path().join("s.csv"),
        (0..30).fold(String::from("t,value\n"), |acc, i| {
            let t = 1990.0 + i as f64;
            acc + &format!("{t},{}\n", 500.0 / (1.0 + (-(0.2 * (t - 2010.0))).exp()))
        }),
    )
    .unwrap();
    let o = run(dir.path(), &["fit-logistic", "--input", "s.csv", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["params"]["k"].as_f64().unwrap() - 500.0).abs() < 1e-3, "{v}");

    let o = run(dir.path(), &["forecast", "--input", "s.csv", "--to", "2025"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("2020,"));
}

#[test]
fn recover_seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"host": {"k": 100, "a": 100, "b": 0.05}, "parasites": [{"k": 50, "a": 174, "b": 0.087}],
        "t_start": 1850, "t_end": 1893, "n_points": 44, "noise_sigma": 0.03}"#;
    std::fs::write(dir.path().join("sim.json"), config).unwrap();
    let go = |extra: &[&str], env: Option<&str>| {
        let mut cmd = bin(dir.path());
        cmd.args([
            "recover",
            "--config",
            "sim.json",
            "--replicates",
            "10",
            "--format",
            "json",
        ])
        .args(extra);
        if let Some(seed) = env {
            cmd.env("PARASITECH_SEED", seed);
        }
        let o = cmd.output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        o.stdout
    };
    let env5 = go(&[], Some("5"));
    let flag5 = go(&["--seed", "5"], None);
    let flag_over_env = go(&["--seed", "5"], Some("9"));
    let default = go(&[], None);
    assert_eq!(env5, flag5);
    assert_eq!(flag5, flag_over_env);
    assert_ne!(env5, default);
}
