mod common;

use common::tiny_config;
use retcap_core::algo::{Algorithm, FairnessMode};
use retcap_core::stats::empirical_cvar;
use retcap_harness::eval::read_returns;
use retcap_harness::experiment::{run_dir, seed_dir, Manifest};
use retcap_harness::metrics::{parse_csv, COLUMNS};
use retcap_harness::{run_experiment, run_seed, RunError, RunOptions};

fn read(path: &std::path::Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn three_seeds_three_files_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut cfg = tiny_config(Algorithm::ReturnCapping);
    cfg.seeds = vec![1, 2, 3];
    let first = run_experiment(&cfg, a.path(), RunOptions::default()).unwrap();
    run_experiment(&cfg, b.path(), RunOptions::default()).unwrap();
    assert_eq!(first.len(), 3);
    let mut distinct = std::collections::HashSet::new();
    for seed in [1, 2, 3] {
        let rel = cfg.output.join(format!("seed-{seed}"));
        let text = read(&a.path().join(&rel).join("metrics.csv"));
        assert_eq!(text, read(&b.path().join(&rel).join("metrics.csv")));
        assert_eq!(text.lines().next().unwrap(), COLUMNS.join(","));
        let rows = parse_csv(&text).unwrap();
        assert_eq!(rows.len(), 6);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.update_index, i + 1);
            assert_eq!(r.cumulative_env_steps, 300 * (i as u64 + 1));
            assert_eq!(r.eval_cvar_alpha.is_some(), (i + 1) % 2 == 0);
            assert!(r.cap_value.unwrap() >= -90.0);
            assert_eq!(r.wall_seconds, 0.0);
        }
        for file in ["policy.bin", "trainer.json", "manifest.json", "final_eval_returns.txt"] {
            assert!(a.path().join(&rel).join(file).exists(), "{file}");
        }
        distinct.insert(text);
    }
    assert_eq!(distinct.len(), 3, "seeds should differ");
}

#[test]
fn final_eval_matches_returns_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(Algorithm::Ppo);
    let out = run_experiment(&cfg, dir.path(), RunOptions::default()).unwrap();
    let seed = &out[0];
    let returns = read_returns(&read(&seed.dir.join("final_eval_returns.txt"))).unwrap();
    assert_eq!(returns.len(), cfg.eval_episodes);
    let cvar = empirical_cvar(&returns, cfg.report_alpha()).unwrap();
    assert_eq!(Some(cvar), seed.final_eval_cvar());
    assert_eq!(seed.rows.last().unwrap().eval_cvar_alpha, Some(cvar));
    assert!(seed.rows.iter().all(|r| r.cap_value.is_none()));
    let manifest: Manifest = serde_json::from_str(&read(&seed.dir.join("manifest.json"))).unwrap();
    assert!(manifest.finished);
    assert_eq!(manifest.config, cfg.to_text());
    assert_eq!(manifest.updates_done, 6);
}

#[test]
fn interrupted_run_resumes_identically() {
    let (whole, split) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = tiny_config(Algorithm::ReturnCapping);
    run_experiment(&cfg, whole.path(), RunOptions::default()).unwrap();
    let dir = seed_dir(&run_dir(&cfg, split.path()), 1);
    // stop after update 3; the last checkpoint is at update 2
    let partial = run_seed(&cfg, 1, &dir, RunOptions { stop_after: Some(3), ..Default::default() }).unwrap();
    assert_eq!(partial.updates_done, 3);
    let state: serde_json::Value = serde_json::from_str(&read(&dir.join("trainer.json"))).unwrap();
    assert_eq!(state["updates_done"], 3);
    // simulate a crash after the checkpoint at update 2 by replaying from it
    let cfg2 = cfg.clone();
    let crash_dir = seed_dir(&run_dir(&cfg2, split.path()).join("crash"), 1);
    run_seed(&cfg2, 1, &crash_dir, RunOptions { stop_after: Some(2), ..Default::default() }).unwrap();
    let mut csv = read(&crash_dir.join("metrics.csv"));
    csv.push_str("3,900,0.0,0.0,0.0,,,,0.0\n");
    std::fs::write(crash_dir.join("metrics.csv"), csv).unwrap();
    let resumed = run_seed(&cfg2, 1, &crash_dir, RunOptions { resume: true, ..Default::default() }).unwrap();
    assert_eq!(resumed.updates_done, 6);
    let finished = run_seed(&cfg, 1, &dir, RunOptions { resume: true, ..Default::default() }).unwrap();
    let reference = read(&seed_dir(&run_dir(&cfg, whole.path()), 1).join("metrics.csv"));
    assert_eq!(read(&dir.join("metrics.csv")), reference);
    assert_eq!(read(&crash_dir.join("metrics.csv")), reference);
    assert_eq!(finished.final_eval, resumed.final_eval);
}

#[test]
fn resume_refuses_a_different_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(Algorithm::Ppo);
    let seed = seed_dir(&run_dir(&cfg, dir.path()), 1);
    run_seed(&cfg, 1, &seed, RunOptions { stop_after: Some(2), ..Default::default() }).unwrap();
    let mut other = cfg.clone();
    other.algo.learning_rate = 5e-4;
    let e = run_seed(&other, 1, &seed, RunOptions { resume: true, ..Default::default() }).unwrap_err();
    assert!(matches!(e, RunError::Resume { .. }), "{e}");
}

#[test]
fn fairness_accounting() {
    let dir = tempfile::tempdir().unwrap();
    let steps = |algorithm: Algorithm, mode: FairnessMode| -> Vec<u64> {
        let mut cfg = tiny_config(algorithm);
        cfg.algo.updates = 3;
        cfg.algo.alpha = 0.2;
        cfg.algo.fairness_mode = mode;
        cfg.output = format!("{algorithm}-{}", mode.name()).into();
        let out = run_experiment(&cfg, dir.path(), RunOptions::default()).unwrap();
        out[0].rows.iter().map(|r| r.cumulative_env_steps).collect()
    };
    let equal: Vec<Vec<u64>> = [Algorithm::Ppo, Algorithm::ReturnCapping, Algorithm::CvarPpo, Algorithm::CvarPg]
        .into_iter()
        .map(|a| steps(a, FairnessMode::EqualEnvSteps))
        .collect();
    assert!(equal.iter().all(|s| s == &equal[0]));
    assert_eq!(equal[0], vec![300, 600, 900]);
    assert_eq!(steps(Algorithm::CvarPpo, FairnessMode::EqualUpdates), vec![1500, 3000, 4500]);
    assert_eq!(steps(Algorithm::CvarPg, FairnessMode::EqualUpdates), vec![1500, 3000, 4500]);
    assert_eq!(steps(Algorithm::ReturnCapping, FairnessMode::EqualUpdates), vec![300, 600, 900]);
}

#[test]
fn wall_time_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = tiny_config(Algorithm::CvarPg);
    cfg.algo.updates = 2;
    cfg.record_wall_time = true;
    let out = run_experiment(&cfg, dir.path(), RunOptions::default()).unwrap();
    assert!(out[0].rows.iter().all(|r| r.wall_seconds > 0.0));
}
