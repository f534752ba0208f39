use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Tuning of the three-phase one-bit mechanism for a horizon `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbbParams {
    pub horizon: u64,
    /// Candidate-grid size.
    pub k: usize,
    /// Profit threshold that ends the first phase.
    pub beta: f64,
    /// Index of the last elimination stage.
    pub stages: usize,
    pub delta: f64,
}

pub fn params_for_horizon(horizon: u64) -> Result<GbbParams> {
    if horizon < 2 {
        return Err(domain(format!("horizon must be at least 2, got {horizon}")));
    }
    let t = horizon as f64;
    let ln_t = t.ln();
    let raw_k = t.cbrt() * ln_t.powf(-2.0 / 3.0) / 8.0;
    let k = (raw_k.round() as usize).max(2);
    if raw_k.round() < 2.0 {
        log::info!("T = {horizon}: grid size {raw_k:.3} floored to K = 2");
    }
    let raw_l = (ln_t / 3.0).ceil();
    let stages = (raw_l as usize).max(1);
    if raw_l < 1.0 {
        log::info!("T = {horizon}: stage count floored to L = 1");
    }
    Ok(GbbParams {
        horizon,
        k,
        beta: 9.0 * t.powf(2.0 / 3.0) * ln_t.powf(2.0 / 3.0),
        stages,
        delta: t.powf(-4.0 / 3.0) * ln_t.powf(-1.0 / 3.0),
    })
}

impl GbbParams {
    pub fn with_k(mut self, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(domain(format!("K must be at least 2, got {k}")));
        }
        self.k = k;
        Ok(self)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(domain(format!("beta must be positive, got {beta}")));
        }
        self.beta = beta;
        Ok(self)
    }

    /// Confidence radius `2^{-l/2} K^{-1/2} + (6l - 1)/K`.
    pub fn gamma(&self, stage: usize) -> f64 {
        let k = self.k as f64;
        2f64.powf(-(stage as f64) / 2.0) / k.sqrt() + (6.0 * stage as f64 - 1.0) / k
    }

    pub fn log_two_over_delta(&self) -> f64 {
        (2.0 / self.delta).ln()
    }

    /// Rounds per query action at elimination stage `stage`.
    pub fn stage_repeat(&self, stage: usize) -> u64 {
        let r = 2f64.powi(stage as i32 + 2) * self.k as f64 * self.log_two_over_delta();
        (r.ceil() as u64).max(1)
    }

    /// Rounds per calibration action.
    pub fn calibration_repeat(&self) -> u64 {
        let k = self.k as f64;
        ((0.5 * k * k * self.log_two_over_delta()).ceil() as u64).max(1)
    }
}
