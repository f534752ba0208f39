//! Simulation toolkit for repeated bilateral trade under posted prices.
//!
//! * [`trade`]: round mechanics, feedback models, and the firewall that keeps
//!   realized values away from mechanisms.
//! * [`dist`]: value distributions with exact expected-value oracles.
//! * [`mechanisms`]: the three-phase globally budget-balanced one-bit
//!   mechanism and baselines.
//! * [`instances`]: hard-instance families, their verification, and
//!   information-theoretic utilities.
//! * [`harness`]: seeded trial runner, regret reports and scaling fits.

pub mod dist;
pub mod error;
pub mod harness;
pub mod instances;
pub mod mechanisms;
pub mod trade;

pub use error::{Error, Result};
