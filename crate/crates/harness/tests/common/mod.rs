#![allow(dead_code)]

use retcap_core::algo::Algorithm;
use retcap_core::env::{EnvKind, Environment};
use retcap_core::nn::{write_checkpoint, Mlp, MlpSpec};
use retcap_harness::ExperimentConfig;
use std::path::Path;

pub const UP: usize = 0;
pub const DOWN: usize = 1;
pub const LEFT: usize = 2;
pub const RIGHT: usize = 3;

/// Goes around the guard: 14 steps, return -4.
pub const AVOIDING_ROUTE: [usize; 14] = [UP, UP, UP, RIGHT, RIGHT, RIGHT, RIGHT, RIGHT, RIGHT, RIGHT, DOWN, DOWN, DOWN, LEFT];

/// A policy that always picks `action` with probability one.
pub fn constant_policy(inputs: usize, actions: usize, action: usize) -> Mlp {
    let spec = MlpSpec::new(inputs, vec![1], actions);
    let mut values = vec![0.0; spec.param_count()];
    let n = values.len();
    values[n - actions + action] = 1000.0;
    Mlp::from_values(spec, values).unwrap()
}

/// A discrete-maze policy that follows [`AVOIDING_ROUTE`] from the start cell.
pub fn route_policy() -> Mlp {
    let mut env = EnvKind::MazeDiscrete.build();
    let cells = env.spec().observation_dim;
    let actions = env.spec().action_count;
    let mut obs = env.reset(0);
    let mut choice = vec![None; cells];
    for &a in &AVOIDING_ROUTE {
        let cell = obs.iter().position(|&v| v == 1.0).unwrap();
        assert!(choice[cell].is_none(), "route revisits a cell");
        choice[cell] = Some(a);
        obs = env.step(a).unwrap().next_observation;
    }
    // hidden unit j lights up on cell j; its outgoing weight favours the route action
    let mut net = Mlp::new(MlpSpec::new(cells + 1, vec![cells], actions), 0).unwrap();
    let layers = net.params().layout().to_vec();
    let values = net.params_mut().values_mut();
    values.iter_mut().for_each(|v| *v = 0.0);
    for j in 0..cells {
        // weight blocks are inputs x outputs, row-major
        values[layers[0].weight_offset + j * cells + j] = 5.0;
        if let Some(a) = choice[j] {
            values[layers[1].weight_offset + j * actions + a] = 2000.0;
        }
    }
    net
}

pub fn save_policy(net: &Mlp, path: &Path) {
    let mut f = std::fs::File::create(path).unwrap();
    write_checkpoint(net, &mut f).unwrap();
}

/// A few cheap discrete-maze updates with frequent evaluation.
pub fn tiny_config(algorithm: Algorithm) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(EnvKind::MazeDiscrete, algorithm);
    cfg.algo.updates = 6;
    cfg.algo.batch_env_steps = 300;
    cfg.algo.epochs_per_batch = 2;
    cfg.eval_episodes = 40;
    cfg.eval_every = 2;
    cfg.checkpoint_every = 2;
    cfg
}
