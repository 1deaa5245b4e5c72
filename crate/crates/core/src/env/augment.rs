use super::{EnvSpec, Environment, Transition};
use crate::error::Result;

/// Base observation together with the raw return collected so far.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedObservation {
    pub base: Vec<f64>,
    pub running_return: f64,
    /// `running_return / return_scale`, the value the policy sees.
    pub scaled: f64,
}

impl AugmentedObservation {
    pub fn features(&self) -> Vec<f64> {
        let mut f = Vec::with_capacity(self.base.len() + 1);
        f.extend_from_slice(&self.base);
        f.push(self.scaled);
        f
    }
}

/// Appends the scaled running return to every observation of `E`.
#[derive(Debug, Clone)]
pub struct Augmented<E> {
    inner: E,
    spec: EnvSpec,
    current: AugmentedObservation,
}

impl<E: Environment> Augmented<E> {
    pub fn new(inner: E) -> Self {
        let mut spec = inner.spec().clone();
        spec.observation_dim += 1;
        Self {
            inner,
            spec,
            current: AugmentedObservation {
                base: Vec::new(),
                running_return: 0.0,
                scaled: 0.0,
            },
        }
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }

    pub fn inner_mut(&mut self) -> &mut E {
        &mut self.inner
    }

    pub fn observation(&self) -> &AugmentedObservation {
        &self.current
    }

    pub fn running_return(&self) -> f64 {
        self.current.running_return
    }

    fn set(&mut self, base: Vec<f64>, running_return: f64) {
        self.current = AugmentedObservation {
            base,
            running_return,
            scaled: running_return / self.spec.return_scale,
        };
    }
}

impl<E: Environment> Environment for Augmented<E> {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, seed: u64) -> Vec<f64> {
        let base = self.inner.reset(seed);
        self.set(base, 0.0);
        self.current.features()
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        let mut t = self.inner.step(action)?;
        let running = self.current.running_return + t.reward;
        self.set(std::mem::take(&mut t.next_observation), running);
        t.next_observation = self.current.features();
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{augment, DiscreteMaze, EnvKind};

    #[test]
    fn reset_feature_is_zero() {
        let mut env = augment(EnvKind::Betting.build());
        assert_eq!(env.spec().observation_dim, 3);
        assert_eq!(env.reset(1), vec![1.0, 0.0, 0.0]);
        assert_eq!(env.running_return(), 0.0);
    }

    #[test]
    fn tracks_raw_running_return() {
        let mut env = augment(DiscreteMaze::shipped());
        env.reset(0);
        env.step(2).unwrap();
        let t = env.step(1).unwrap();
        let obs = env.observation();
        assert_eq!(obs.running_return, -2.0);
        assert_eq!(obs.scaled, -2.0 / 32.0);
        assert_eq!(*t.next_observation.last().unwrap(), -2.0 / 32.0);
        assert_eq!(t.next_observation.len(), 65);
        assert_eq!(&t.next_observation[..64], &obs.base[..]);
    }
}
