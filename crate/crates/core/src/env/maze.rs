use super::layout::{Cell, GridLayout, CONTINUOUS_MAZE, DISCRETE_MAZE, MOVES};
use super::{check_action, finished_episode, EnvKind, EnvSpec, Environment, Transition};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

pub const STEP_REWARD: f64 = -1.0;
pub const DISCRETE_GOAL_REWARD: f64 = 10.0;
/// Scale applied to the standard normal guard draw in the discrete maze.
pub const DISCRETE_GUARD_SCALE: f64 = 30.0;
pub const CONTINUOUS_GOAL_REWARD: f64 = 16.0;
pub const GUARD_PRESENCE_PROB: f64 = 0.2;
pub const GUARD_COST_MEAN: f64 = 32.0;
pub const STEP_LENGTH: f64 = 1.0;
/// Standard deviation of the per-axis movement noise, as a fraction of the step.
pub const NOISE_FRACTION: f64 = 0.1;

/// Grid maze with a guard cell on the short route.
///
/// Each entry into the guard cell subtracts `30·z`, `z ~ N(0, 1)`.
/// Observation: one-hot over cells.
#[derive(Debug, Clone)]
pub struct DiscreteMaze {
    spec: EnvSpec,
    layout: GridLayout,
    pos: (usize, usize),
    steps: usize,
    done: bool,
    rng: ChaCha8Rng,
}

impl DiscreteMaze {
    pub fn new(layout: GridLayout) -> Self {
        Self {
            spec: EnvSpec {
                kind: EnvKind::MazeDiscrete,
                observation_dim: layout.cell_count(),
                action_count: 4,
                max_steps: 100,
                return_scale: 32.0,
            },
            pos: layout.start,
            layout,
            steps: 0,
            done: true,
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }

    pub fn shipped() -> Self {
        Self::new(GridLayout::parse(DISCRETE_MAZE).expect("shipped maze is valid"))
    }

    pub fn layout(&self) -> &GridLayout {
        &self.layout
    }

    /// (row, col) of the agent.
    pub fn position(&self) -> (usize, usize) {
        self.pos
    }

    fn observation(&self) -> Vec<f64> {
        let mut obs = vec![0.0; self.layout.cell_count()];
        obs[self.layout.index(self.pos.0, self.pos.1)] = 1.0;
        obs
    }

    /// Steps with the standard normal guard draw supplied by the caller.
    pub fn step_with_guard_draw(&mut self, action: usize, z: f64) -> Result<Transition> {
        check_action(&self.spec, action)?;
        if self.done {
            return Err(finished_episode(self.spec.kind));
        }
        self.steps += 1;
        let (dr, dc) = MOVES[action];
        let (nr, nc) = (self.pos.0 as isize + dr, self.pos.1 as isize + dc);
        let target = self.layout.cell(nr, nc);
        let mut reward = STEP_REWARD;
        let mut terminated = false;
        if target != Cell::Wall {
            self.pos = (nr as usize, nc as usize);
            match target {
                Cell::Guard => reward -= DISCRETE_GUARD_SCALE * z,
                Cell::Goal => {
                    reward += DISCRETE_GOAL_REWARD;
                    terminated = true;
                }
                _ => {}
            }
        }
        let truncated = !terminated && self.steps >= self.spec.max_steps;
        self.done = terminated || truncated;
        Ok(Transition {
            next_observation: self.observation(),
            reward,
            terminated,
            truncated,
        })
    }
}

impl Environment for DiscreteMaze {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self.pos = self.layout.start;
        self.steps = 0;
        self.done = false;
        self.observation()
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.step_with_guard_draw(action, z)
    }
}

/// Continuous arena laid over a grid layout, one unit per cell.
///
/// Moves have length 1 plus Gaussian noise on both axes. A move whose end
/// point lies in a wall cell or outside the arena leaves the agent in place.
/// The guard is present with probability 0.2 per episode and, if present,
/// charges one `Exp(mean 32)` cost on the first entry into its cell.
/// Observation: `(x / width, y / height)`.
#[derive(Debug, Clone)]
pub struct ContinuousMaze {
    spec: EnvSpec,
    layout: GridLayout,
    /// (x, y) = (column, row) in cell units.
    pos: (f64, f64),
    steps: usize,
    done: bool,
    guard_cost: Option<f64>,
    guard_charged: bool,
    rng: ChaCha8Rng,
}

impl ContinuousMaze {
    pub fn new(layout: GridLayout) -> Self {
        Self {
            spec: EnvSpec {
                kind: EnvKind::MazeContinuous,
                observation_dim: 2,
                action_count: 4,
                max_steps: 161,
                return_scale: 32.0,
            },
            pos: start_point(&layout),
            layout,
            steps: 0,
            done: true,
            guard_cost: None,
            guard_charged: false,
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }

    pub fn shipped() -> Self {
        Self::new(GridLayout::parse(CONTINUOUS_MAZE).expect("shipped maze is valid"))
    }

    pub fn layout(&self) -> &GridLayout {
        &self.layout
    }

    pub fn position(&self) -> (f64, f64) {
        self.pos
    }

    /// Cost the guard would charge this episode, if it is present.
    pub fn guard_cost(&self) -> Option<f64> {
        self.guard_cost
    }

    /// Overrides this episode's guard draw.
    pub fn set_guard(&mut self, cost: Option<f64>) -> Result<()> {
        if let Some(c) = cost {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::invalid(format!("guard cost must be finite and non-negative, got {c}")));
            }
        }
        self.guard_cost = cost;
        Ok(())
    }

    pub fn sample_guard_cost<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        Exp::new(1.0 / GUARD_COST_MEAN)
            .expect("positive rate")
            .sample(rng)
    }

    fn cell_at(&self, (x, y): (f64, f64)) -> Cell {
        if x < 0.0 || y < 0.0 {
            return Cell::Wall;
        }
        self.layout.cell(y.floor() as isize, x.floor() as isize)
    }

    fn observation(&self) -> Vec<f64> {
        vec![
            self.pos.0 / self.layout.width as f64,
            self.pos.1 / self.layout.height as f64,
        ]
    }

    /// Steps with the movement noise supplied by the caller.
    pub fn step_with_noise(&mut self, action: usize, noise: (f64, f64)) -> Result<Transition> {
        check_action(&self.spec, action)?;
        if self.done {
            return Err(finished_episode(self.spec.kind));
        }
        self.steps += 1;
        let (dr, dc) = MOVES[action];
        let target = (
            self.pos.0 + dc as f64 * STEP_LENGTH + noise.0,
            self.pos.1 + dr as f64 * STEP_LENGTH + noise.1,
        );
        let mut reward = STEP_REWARD;
        let mut terminated = false;
        let cell = self.cell_at(target);
        if cell != Cell::Wall {
            self.pos = target;
            match cell {
                Cell::Guard if !self.guard_charged => {
                    self.guard_charged = true;
                    if let Some(c) = self.guard_cost {
                        reward -= c;
                    }
                }
                Cell::Goal => {
                    reward += CONTINUOUS_GOAL_REWARD;
                    terminated = true;
                }
                _ => {}
            }
        }
        let truncated = !terminated && self.steps >= self.spec.max_steps;
        self.done = terminated || truncated;
        Ok(Transition {
            next_observation: self.observation(),
            reward,
            terminated,
            truncated,
        })
    }
}

fn start_point(layout: &GridLayout) -> (f64, f64) {
    (layout.start.1 as f64 + 0.5, layout.start.0 as f64 + 0.5)
}

impl Environment for ContinuousMaze {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self.pos = start_point(&self.layout);
        self.steps = 0;
        self.done = false;
        self.guard_charged = false;
        let present = self.rng.random::<f64>() < GUARD_PRESENCE_PROB;
        let cost = Self::sample_guard_cost(&mut self.rng);
        self.guard_cost = present.then_some(cost);
        self.observation()
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        let sd = NOISE_FRACTION * STEP_LENGTH;
        let nx: f64 = StandardNormal.sample(&mut self.rng);
        let ny: f64 = StandardNormal.sample(&mut self.rng);
        self.step_with_noise(action, (sd * nx, sd * ny))
    }
}
