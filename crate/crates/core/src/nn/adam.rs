use super::mlp::ParamVector;
use serde::{Deserialize, Serialize};

/// Bias-corrected adaptive moment estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    first: Vec<f64>,
    second: Vec<f64>,
    steps: u64,
}

impl Adam {
    pub fn new(len: usize, lr: f64) -> Self {
        Self::with_betas(len, lr, (0.9, 0.999), 1e-8)
    }

    pub fn with_betas(len: usize, lr: f64, betas: (f64, f64), eps: f64) -> Self {
        Self {
            lr,
            beta1: betas.0,
            beta2: betas.1,
            eps,
            first: vec![0.0; len],
            second: vec![0.0; len],
            steps: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Descends along the accumulated gradients, then zeroes them.
    pub fn step(&mut self, params: &mut ParamVector) {
        assert_eq!(params.len(), self.first.len(), "optimizer built for a different network");
        self.steps += 1;
        let t = self.steps as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (values, grads) = params.split_mut();
        for i in 0..values.len() {
            let g = grads[i];
            self.first[i] = self.beta1 * self.first[i] + (1.0 - self.beta1) * g;
            self.second[i] = self.beta2 * self.second[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.first[i] / c1;
            let v_hat = self.second[i] / c2;
            values[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
            grads[i] = 0.0;
        }
    }
}
