use crate::env::{augment, Augmented, EnvKind, Environment};
use crate::error::Result;
use crate::nn::{categorical_head, sample_action, stack_rows, Mlp};
use crate::rng::{derive_seed, tag};
use rand::Rng;

/// Number of environments stepped together during sampling.
pub const LANES: usize = 16;

/// One complete episode as seen by the policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Augmented policy input before each action.
    pub features: Vec<Vec<f64>>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    /// Log-probability of each action under the sampling policy.
    pub log_probs: Vec<f64>,
    pub terminated: bool,
    /// Augmented observation after the last step.
    pub final_features: Vec<f64>,
    /// Index of the episode within the run, used to derive its seed.
    pub episode_index: u64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Undiscounted sum of raw rewards.
    pub fn total_return(&self) -> f64 {
        self.rewards.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// Keep starting episodes until at least this many steps have been taken.
    Steps(usize),
    Episodes(usize),
}

/// Seeds for episode `index` of a stream.
#[derive(Debug, Clone, Copy)]
pub struct EpisodeSeeds {
    pub base: u64,
    pub tag: u64,
}

impl EpisodeSeeds {
    pub fn training(base: u64) -> Self {
        Self { base, tag: tag::EPISODES }
    }

    pub fn evaluation(base: u64) -> Self {
        Self { base, tag: tag::EVAL }
    }

    pub fn seed(&self, index: u64) -> u64 {
        derive_seed(self.base, self.tag, index)
    }
}

struct Lane {
    env: Augmented<Box<dyn Environment>>,
    current: Option<Trajectory>,
    obs: Vec<f64>,
}

/// Rolls out `policy` until the budget is met and returns the finished episodes
/// ordered by episode index. Episodes are numbered from `first_episode`.
pub fn sample_trajectories<R: Rng + ?Sized>(
    policy: &Mlp,
    env: EnvKind,
    budget: Budget,
    seeds: EpisodeSeeds,
    first_episode: u64,
    action_rng: &mut R,
) -> Result<Vec<Trajectory>> {
    let mut lanes: Vec<Lane> = (0..LANES)
        .map(|_| Lane {
            env: augment(env.build()),
            current: None,
            obs: Vec::new(),
        })
        .collect();
    let mut next_episode = first_episode;
    let mut steps_taken = 0usize;
    let mut done = Vec::new();
    let want_more = |started: u64, steps: usize| match budget {
        Budget::Steps(n) => steps < n,
        Budget::Episodes(n) => ((started - first_episode) as usize) < n,
    };

    let width = lanes[0].env.spec().observation_dim;
    loop {
        for lane in lanes.iter_mut() {
            if lane.current.is_none() && want_more(next_episode, steps_taken) {
                lane.obs = lane.env.reset(seeds.seed(next_episode));
                lane.current = Some(Trajectory {
                    features: Vec::new(),
                    actions: Vec::new(),
                    rewards: Vec::new(),
                    log_probs: Vec::new(),
                    terminated: false,
                    final_features: Vec::new(),
                    episode_index: next_episode,
                });
                next_episode += 1;
            }
        }
        let active: Vec<usize> = (0..LANES).filter(|&i| lanes[i].current.is_some()).collect();
        if active.is_empty() {
            break;
        }
        let rows: Vec<Vec<f64>> = active.iter().map(|&i| lanes[i].obs.clone()).collect();
        let logits = policy.predict_batch(stack_rows(&rows, width).view())?;
        for (row, &i) in active.iter().enumerate() {
            let (probs, log_probs) = categorical_head(logits.row(row).as_slice().expect("row-major"));
            let action = sample_action(&probs, action_rng);
            let lane = &mut lanes[i];
            let t = lane.env.step(action)?;
            steps_taken += 1;
            let traj = lane.current.as_mut().expect("active lane");
            traj.features.push(std::mem::take(&mut lane.obs));
            traj.actions.push(action);
            traj.rewards.push(t.reward);
            traj.log_probs.push(log_probs[action]);
            if t.done() {
                let mut finished = lane.current.take().expect("active lane");
                finished.terminated = t.terminated;
                finished.final_features = t.next_observation;
                done.push(finished);
            } else {
                lane.obs = t.next_observation;
            }
        }
    }
    done.sort_by_key(|t| t.episode_index);
    Ok(done)
}
