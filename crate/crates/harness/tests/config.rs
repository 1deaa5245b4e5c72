use proptest::prelude::*;
use retcap_core::algo::{Algorithm, FairnessMode};
use retcap_core::env::EnvKind;
use retcap_harness::{parse_config, parse_config_str, ConfigError, ExperimentConfig, MinCapChoice};

fn line_of(e: ConfigError) -> usize {
    match e {
        ConfigError::Invalid { line, .. } => line,
        other => panic!("expected a line error, got {other}"),
    }
}

#[test]
fn betting_defaults_are_materialized() {
    let cfg = parse_config_str("[experiment]\nenv = betting\nalgorithm = return_capping\n").unwrap();
    assert_eq!(cfg.algo.alpha, 0.2);
    assert_eq!(cfg.algo.gamma, 0.99);
    assert_eq!(cfg.algo.learning_rate, 1e-3);
    assert_eq!(cfg.algo.updates, 200);
    assert_eq!(cfg.algo.batch_env_steps, 5000);
    assert_eq!(cfg.min_cap, MinCapChoice::ConservativeCvar);
    assert_eq!(cfg.resolved_min_cap(), Some(0.0));
    assert_eq!((cfg.eval_episodes, cfg.eval_every), (1000, 5));
    let text = cfg.to_text();
    for key in ["alpha = 0.2", "updates = 200", "batch_env_steps = 5000", "min_cap = conservative_cvar"] {
        assert!(text.contains(key), "{key} missing from\n{text}");
    }
}

#[test]
fn range_errors_point_at_their_line() {
    let text = "[experiment]\nenv = betting\nalgorithm = ppo\n\n[training]\nalpha = 1.5\n";
    let e = parse_config_str(text).unwrap_err();
    assert!(e.to_string().contains("alpha"), "{e}");
    assert_eq!(line_of(e), 6);
    let text = "[experiment]\nenv = betting\nalgorithm = ppo\n[training]\ngamma = 0.9\nclip_epsilon = 0\n";
    assert_eq!(line_of(parse_config_str(text).unwrap_err()), 6);
}

#[test]
fn strictness() {
    let base = "[experiment]\nenv = av\nalgorithm = cvar_pg\n";
    let cases = [
        (format!("{base}[training]\nlearning_rat = 0.1\n"), 5),
        (format!("{base}[trainin]\n"), 4),
        (format!("{base}[training]\nupdates = 0\n"), 5),
        (format!("{base}[training]\nupdates = many\n"), 5),
        (format!("{base}[training]\nupdates = 3\nupdates = 4\n"), 6),
        (format!("{base}[evaluation]\nevery\n"), 5),
        (format!("{base}[training]\nmin_cap = conservative_cvar\n"), 5),
        (format!("{base}[training]\nfairness_mode = sometimes\n"), 5),
        ("env = betting\n".to_string(), 1),
        ("[experiment]\nenv = chess\nalgorithm = ppo\n".to_string(), 2),
        ("[experiment]\nenv = betting\nalgorithm = ppo\nseeds = 1, 1\n".to_string(), 4),
    ];
    for (text, line) in cases {
        let e = parse_config_str(&text).unwrap_err();
        assert_eq!(line_of(e), line, "{text}");
    }
    assert!(parse_config_str("[experiment]\nenv = betting\n").is_err());
}

#[test]
fn min_cap_choices_resolve_per_environment() {
    let expect = [
        (EnvKind::Betting, MinCapChoice::ConservativeCvar, 0.0),
        (EnvKind::Betting, MinCapChoice::OptimalVar, 16.0),
        (EnvKind::MazeDiscrete, MinCapChoice::OptimalVar, -4.0),
        (EnvKind::MazeDiscrete, MinCapChoice::ConservativeCvar, -90.0),
        (EnvKind::Av, MinCapChoice::RandomCvar, -256.0),
        (EnvKind::Av, MinCapChoice::ExpectedValueCvar, 6.0),
        (EnvKind::MazeContinuous, MinCapChoice::ConservativeCvar, -151.0),
        (EnvKind::MazeContinuous, MinCapChoice::OptimalVar, -3.7),
    ];
    for (env, choice, value) in expect {
        assert_eq!(choice.resolve(env), Some(value), "{env} {choice}");
    }
    assert_eq!(MinCapChoice::RandomCvar.resolve(EnvKind::Betting), None);
    let cfg = parse_config_str("[experiment]\nenv = av\nalgorithm = return_capping\n[training]\nmin_cap = -12.5\n").unwrap();
    assert_eq!(cfg.resolved_min_cap(), Some(-12.5));
    let ppo = ExperimentConfig::new(EnvKind::Av, Algorithm::Ppo);
    assert_eq!(ppo.resolved_min_cap(), None);
}

#[test]
fn reads_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.cfg");
    std::fs::write(&path, ExperimentConfig::new(EnvKind::MazeDiscrete, Algorithm::CvarPpo).to_text()).unwrap();
    let cfg = parse_config(&path).unwrap();
    assert_eq!(cfg.algo.updates, 40);
    assert!(matches!(parse_config(&dir.path().join("missing")), Err(ConfigError::Io { .. })));
}

fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
    (
        0..4usize,
        0..4usize,
        prop::collection::btree_set(0u64..1000, 1..4),
        (1e-3..1.0f64, 0.0..1.0f64, 1e-6..0.1f64, 1..5000usize),
        (any::<bool>(), any::<bool>(), -300.0..300.0f64, 0..5usize),
    )
        .prop_map(|(e, a, seeds, (alpha, gamma, lr, steps), (mode, norm, cap, choice))| {
            let env = EnvKind::ALL[e];
            let algorithm = [Algorithm::Ppo, Algorithm::CvarPg, Algorithm::CvarPpo, Algorithm::ReturnCapping][a];
            let mut cfg = ExperimentConfig::new(env, algorithm);
            cfg.seeds = seeds.into_iter().collect();
            cfg.algo.alpha = alpha;
            cfg.algo.gamma = gamma;
            cfg.algo.learning_rate = lr;
            cfg.algo.batch_env_steps = steps;
            cfg.algo.normalize_advantages = norm;
            cfg.algo.fairness_mode = if mode { FairnessMode::EqualUpdates } else { FairnessMode::EqualEnvSteps };
            cfg.min_cap = match choice {
                0 => MinCapChoice::Explicit(cap),
                1 => MinCapChoice::OptimalVar,
                2 => MinCapChoice::ExpectedValueCvar,
                _ => MinCapChoice::default_for(env),
            };
            cfg.output = format!("out/{env}-{a}").into();
            cfg
        })
}

proptest! {
    #[test]
    fn round_trip(cfg in arb_config()) {
        let text = cfg.to_text();
        let again = parse_config_str(&text).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.to_text(), text);
    }
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "ini") {
            let cfg = parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(cfg.seeds, vec![1, 2, 3, 4, 5]);
            count += 1;
        }
    }
    assert_eq!(count, 17);
}
