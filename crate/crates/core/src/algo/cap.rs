use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The moving return cap and its floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapState {
    pub cap: f64,
    pub min_cap: f64,
    pub eta: f64,
}

impl CapState {
    /// Starts at the floor.
    pub fn new(min_cap: f64, eta: f64) -> Result<Self> {
        if !min_cap.is_finite() {
            return Err(Error::invalid(format!("minimum cap must be finite, got {min_cap}")));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::invalid(format!("cap step size must lie in [0, 1], got {eta}")));
        }
        Ok(Self {
            cap: min_cap,
            min_cap,
            eta,
        })
    }

    /// Moves the cap toward the batch VaR, never below the floor.
    pub fn update(&mut self, batch_var: f64) {
        self.cap = update_cap(self.cap, self.min_cap, self.eta, batch_var);
    }
}

pub fn update_cap(cap: f64, min_cap: f64, eta: f64, batch_var: f64) -> f64 {
    (cap + eta * (batch_var - cap)).max(min_cap)
}
