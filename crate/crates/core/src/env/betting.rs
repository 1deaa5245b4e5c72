use super::{check_action, finished_episode, EnvKind, EnvSpec, Environment, Transition};
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const START_TOKENS: f64 = 16.0;
pub const ROUNDS: usize = 6;
pub const WIN_PROB: f64 = 0.8;
/// Bet sizes are multiples of 12.5% of the current tokens: 0%, 12.5%, …, 100%.
pub const BET_LEVELS: usize = 9;

/// Repeated even-money bets on a biased coin.
///
/// Observation: `(tokens / 16, turn / 6)`. The episode ends after six bets
/// or once the agent holds no tokens.
#[derive(Debug, Clone)]
pub struct BettingGame {
    spec: EnvSpec,
    tokens: f64,
    turn: usize,
    done: bool,
    rng: ChaCha8Rng,
}

impl BettingGame {
    pub fn new() -> Self {
        Self {
            spec: EnvSpec {
                kind: EnvKind::Betting,
                observation_dim: 2,
                action_count: BET_LEVELS,
                max_steps: ROUNDS,
                return_scale: 16.0,
            },
            tokens: START_TOKENS,
            turn: 0,
            done: true,
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }

    pub fn tokens(&self) -> f64 {
        self.tokens
    }

    pub fn turn(&self) -> usize {
        self.turn
    }

    pub fn bet_fraction(action: usize) -> f64 {
        action as f64 / (BET_LEVELS - 1) as f64
    }

    fn observation(&self) -> Vec<f64> {
        vec![self.tokens / START_TOKENS, self.turn as f64 / ROUNDS as f64]
    }

    /// Resolves a bet with a known coin outcome.
    pub fn step_with_outcome(&mut self, action: usize, win: bool) -> Result<Transition> {
        check_action(&self.spec, action)?;
        if self.done {
            return Err(finished_episode(self.spec.kind));
        }
        let wager = Self::bet_fraction(action) * self.tokens;
        let reward = if win { wager } else { -wager };
        self.tokens += reward;
        self.turn += 1;
        self.done = self.turn >= ROUNDS || self.tokens <= 0.0;
        Ok(Transition {
            next_observation: self.observation(),
            reward,
            terminated: self.done,
            truncated: false,
        })
    }
}

impl Default for BettingGame {
    fn default() -> Self {
        Self::new()
    }
}

impl Environment for BettingGame {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self.tokens = START_TOKENS;
        self.turn = 0;
        self.done = false;
        self.observation()
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        check_action(&self.spec, action)?;
        let win = self.rng.random::<f64>() < WIN_PROB;
        self.step_with_outcome(action, win)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reset_state() {
        let mut g = BettingGame::new();
        assert_eq!(g.reset(3), vec![1.0, 0.0]);
        assert_eq!((g.tokens(), g.turn()), (16.0, 0));
    }

    #[test]
    fn all_in_win_and_loss() {
        let mut g = BettingGame::new();
        g.reset(0);
        let t = g.step_with_outcome(8, true).unwrap();
        assert_eq!(t.reward, 16.0);
        assert_eq!(g.tokens(), 32.0);
        assert!(!t.terminated);

        g.reset(0);
        let t = g.step_with_outcome(8, false).unwrap();
        assert_eq!(t.reward, -16.0);
        assert_eq!(g.tokens(), 0.0);
        assert!(t.terminated);
    }

    #[test]
    fn zero_bet_changes_nothing() {
        let mut g = BettingGame::new();
        g.reset(0);
        g.step_with_outcome(4, true).unwrap();
        let before = g.tokens();
        for win in [true, false] {
            let t = g.step_with_outcome(0, win).unwrap();
            assert_eq!(t.reward, 0.0);
            assert_eq!(g.tokens(), before);
        }
    }

    #[test]
    fn rejects_bad_action() {
        let mut g = BettingGame::new();
        g.reset(0);
        assert!(g.step(9).is_err());
    }

    #[test]
    fn return_equals_final_tokens_minus_start() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut g = BettingGame::new();
        for ep in 0..500 {
            g.reset(ep);
            let mut total = 0.0;
            loop {
                let t = g.step(rng.random_range(0..BET_LEVELS)).unwrap();
                total += t.reward;
                assert!(g.tokens() >= 0.0);
                if t.done() {
                    break;
                }
            }
            assert_eq!(total, g.tokens() - START_TOKENS);
        }
    }
}
