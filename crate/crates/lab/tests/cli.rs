use std::path::Path;
use std::process::Command;

use biped_core::control::{GainName, GainSet};
use biped_core::nets::{GaussianMlpPolicy, PolicyKind};
use biped_core::rng::rng_from;
use biped_lab::checkpoint::{load_policy, save_policy};
use biped_lab::cli::run;
use biped_lab::logs::{Table, REWARD_CURVE_COLUMNS, TRAJECTORY_COLUMNS, TRANSFER_COLUMNS};

fn lab(args: &[&str]) -> i32 {
    let mut argv = vec!["biped-lab"];
    argv.extend_from_slice(args);
    run(argv)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn policy(kind: PolicyKind) -> GaussianMlpPolicy {
    GaussianMlpPolicy::new(kind, &[8], -1.0, &GainSet::default(), &mut rng_from(5)).unwrap()
}

#[test]
fn expert_rollout_writes_full_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lab(&["rollout-expert", "--terrain", "flat", "--out", path(dir.path())]), 0);
    let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), TRAJECTORY_COLUMNS.join(","));
    assert_eq!(text.lines().count(), 10_001);
    let table = Table::parse(&text).unwrap();
    let fell = table.column("fell").unwrap();
    assert!(table.rows.iter().all(|r| r[fell] == "0"));
}

#[test]
fn short_episode_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.ini");
    std::fs::write(&cfg, "[ppo]\nepisode_len_max_s = 0.1\n").unwrap();
    assert_eq!(lab(&["rollout-expert", "--terrain", "flat", "--config", path(&cfg), "--out", path(dir.path())]), 0);
    let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(text.lines().count(), 101);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert_eq!(lab(&["rollout-expert", "--terrain", "rough", "--seed", "11", "--out", path(d.path())]), 0);
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("trajectory.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn train_zero_iterations_writes_empty_curve() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lab(&["train", "--iterations", "0", "--out", path(dir.path())]), 0);
    let text = std::fs::read_to_string(dir.path().join("reward_curve.csv")).unwrap();
    assert_eq!(text, format!("{}\n", REWARD_CURVE_COLUMNS.join(",")));
    load_policy(&dir.path().join("policy.ckpt")).unwrap();
}

#[test]
fn retune_pure_policy_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("pure.ckpt");
    save_policy(&ckpt, &policy(PolicyKind::PureNn)).unwrap();
    let code = lab(&["retune", "--policy", path(&ckpt), "--gain", "k", "--value", "0.3", "--out", path(dir.path())]);
    assert_eq!(code, 2);
}

#[test]
fn retune_heuristic_keeps_network() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("h.ckpt");
    let p = policy(PolicyKind::HeuristicNn);
    save_policy(&ckpt, &p).unwrap();
    let out = dir.path().join("tuned.ckpt");
    let code = lab(&["retune", "--policy", path(&ckpt), "--gain", "k", "--value", "0.35", "--output", path(&out)]);
    assert_eq!(code, 0);
    let q = load_policy(&out).unwrap();
    assert_eq!(q.mean_net, p.mean_net);
    assert_eq!(q.log_std, p.log_std);
    assert_eq!(q.gains.unwrap().get(GainName::K), 0.35);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(lab(&["bogus"]), 1);
    assert_eq!(lab(&["eval", "--seed", "x"]), 1);
    assert_eq!(lab(&["eval"]), 1);
    assert_eq!(lab(&["retune", "--policy", "p.ckpt", "--gain", "nope", "--value", "1"]), 1);
    assert_eq!(lab(&["--help"]), 0);
}

#[test]
fn bad_config_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.ini");
    std::fs::write(&cfg, "[sim]\ndt = -1\n").unwrap();
    assert_eq!(lab(&["rollout-expert", "--config", path(&cfg), "--out", path(dir.path())]), 2);
    assert_eq!(lab(&["eval", "--policy", path(&dir.path().join("missing.ckpt"))]), 2);
}

#[test]
fn eval_and_transfer_reports() {
    let dir = tempfile::tempdir().unwrap();
    let pols = dir.path().join("policies");
    std::fs::create_dir(&pols).unwrap();
    save_policy(&pols.join("a.ckpt"), &policy(PolicyKind::HeuristicNn)).unwrap();
    save_policy(&pols.join("b.ckpt"), &policy(PolicyKind::PureNn)).unwrap();
    std::fs::write(pols.join("notes.txt"), "not a checkpoint").unwrap();
    let cfg = dir.path().join("short.ini");
    std::fs::write(&cfg, "[ppo]\nepisode_len_max_s = 1.0\n").unwrap();
    let out = dir.path().join("out");
    let code = lab(&[
        "transfer", "--policy", path(&pols), "--episodes", "2", "--terrain", "flat", "--config", path(&cfg), "--out",
        path(&out),
    ]);
    assert_eq!(code, 0);
    let table = Table::parse(&std::fs::read_to_string(out.join("transfer_report.csv")).unwrap()).unwrap();
    assert_eq!(table.header, TRANSFER_COLUMNS);
    assert_eq!(table.rows.len(), 4);
    assert_eq!(table.rows[0][1], "heuristic_nn");
    assert_eq!(table.rows[0][4], "2");
    assert_eq!(table.rows[2][1], "pure_nn");
    assert_eq!(table.rows[3][2], "surrogate");
    for name in ["transfer_summary.csv", "transfer_falls.csv"] {
        assert!(out.join(name).is_file());
    }

    let code = lab(&[
        "eval", "--policy", path(&pols.join("a.ckpt")), "--episodes", "1", "--surrogate", "--terrain", "flat",
        "--config", path(&cfg), "--out", path(&out),
    ]);
    assert_eq!(code, 0);
    let t = Table::parse(&std::fs::read_to_string(out.join("eval.csv")).unwrap()).unwrap();
    assert_eq!(t.rows[0][2], "surrogate");

    assert_eq!(lab(&["plot-data", "--input", path(&out.join("transfer_report.csv")), "--out", path(&out)]), 0);
    let plot = Table::parse(&std::fs::read_to_string(out.join("transfer_report_plot.csv")).unwrap()).unwrap();
    assert_eq!(plot.rows[0][1], "1");
}

#[test]
fn binary_prints_seed_and_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_biped-lab");
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(exe)
        .args(["rollout-expert", "--terrain", "flat", "--seed", "42", "--out", path(dir.path())])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("seed 42\n"));
    let out = Command::new(exe).arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frobnicate"));
}
