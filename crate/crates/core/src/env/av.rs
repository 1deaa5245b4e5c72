use super::layout::{RoadGraph, RoadType, AV_ROADS, ROAD_COST_PROBS};
use super::{check_action, finished_episode, EnvKind, EnvSpec, Environment, Transition};
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GOAL_REWARD: f64 = 80.0;
/// Charged for a move with no road in that direction; the car stays put.
pub const BLOCKED_MOVE_PENALTY: f64 = -1.0;

/// (dx, dy) for up, down, left, right.
const DIRECTIONS: [(isize, isize); 4] = [(0, 1), (0, -1), (-1, 0), (1, 0)];

/// Navigation on a road graph with stochastic traversal costs.
///
/// Observation: one-hot over lattice nodes.
#[derive(Debug, Clone)]
pub struct AvGraph {
    spec: EnvSpec,
    graph: RoadGraph,
    node: (usize, usize),
    steps: usize,
    done: bool,
    rng: ChaCha8Rng,
}

impl AvGraph {
    pub fn new(graph: RoadGraph) -> Self {
        Self {
            spec: EnvSpec {
                kind: EnvKind::Av,
                observation_dim: graph.node_count(),
                action_count: 4,
                max_steps: 32,
                return_scale: 80.0,
            },
            node: graph.start,
            graph,
            steps: 0,
            done: true,
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }

    pub fn shipped() -> Self {
        Self::new(RoadGraph::parse(AV_ROADS).expect("shipped road graph is valid"))
    }

    pub fn graph(&self) -> &RoadGraph {
        &self.graph
    }

    pub fn node(&self) -> (usize, usize) {
        self.node
    }

    fn observation(&self) -> Vec<f64> {
        let mut obs = vec![0.0; self.graph.node_count()];
        obs[self.graph.node_index(self.node)] = 1.0;
        obs
    }

    fn neighbour(&self, action: usize) -> Option<(usize, usize)> {
        let (dx, dy) = DIRECTIONS[action];
        let x = self.node.0 as isize + dx;
        let y = self.node.1 as isize + dy;
        if x < 0 || y < 0 || x as usize >= self.graph.width || y as usize >= self.graph.height {
            None
        } else {
            Some((x as usize, y as usize))
        }
    }

    /// Moves with a known cost category (0 small, 1 medium, 2 large).
    pub fn step_with_category(&mut self, action: usize, category: usize) -> Result<Transition> {
        check_action(&self.spec, action)?;
        if self.done {
            return Err(finished_episode(self.spec.kind));
        }
        self.steps += 1;
        let road = self
            .neighbour(action)
            .and_then(|n| self.graph.road(self.node, n).map(|r| (n, r)));
        let mut terminated = false;
        let reward = match road {
            Some((next, kind)) => {
                self.node = next;
                let cost = kind.costs()[category];
                if next == self.graph.goal {
                    terminated = true;
                    GOAL_REWARD - cost
                } else {
                    -cost
                }
            }
            None => BLOCKED_MOVE_PENALTY,
        };
        let truncated = !terminated && self.steps >= self.spec.max_steps;
        self.done = terminated || truncated;
        Ok(Transition {
            next_observation: self.observation(),
            reward,
            terminated,
            truncated,
        })
    }

    pub fn road_ahead(&self, action: usize) -> Option<RoadType> {
        self.neighbour(action).and_then(|n| self.graph.road(self.node, n))
    }
}

impl Environment for AvGraph {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self.node = self.graph.start;
        self.steps = 0;
        self.done = false;
        self.observation()
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        let u: f64 = self.rng.random();
        let category = if u < ROAD_COST_PROBS[0] {
            0
        } else if u < ROAD_COST_PROBS[0] + ROAD_COST_PROBS[1] {
            1
        } else {
            2
        };
        self.step_with_category(action, category)
    }
}
