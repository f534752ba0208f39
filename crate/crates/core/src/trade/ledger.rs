use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{PhaseId, TradeOutcome};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTotals {
    pub gft: f64,
    pub profit: f64,
    pub rounds: u64,
}

/// Realized cumulative accounting for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundLedger {
    horizon: u64,
    pub cumulative_gft: f64,
    pub cumulative_profit: f64,
    pub rounds_elapsed: u64,
    pub phases: BTreeMap<PhaseId, PhaseTotals>,
}

impl RoundLedger {
    pub fn new(horizon: u64) -> Self {
        Self {
            horizon,
            cumulative_gft: 0.0,
            cumulative_profit: 0.0,
            rounds_elapsed: 0,
            phases: BTreeMap::new(),
        }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn record(&mut self, phase: PhaseId, outcome: &TradeOutcome) -> Result<()> {
        if self.rounds_elapsed >= self.horizon {
            return Err(Error::HorizonExceeded(self.horizon));
        }
        self.rounds_elapsed += 1;
        self.cumulative_gft += outcome.gft;
        self.cumulative_profit += outcome.profit;
        let t = self.phases.entry(phase).or_default();
        t.gft += outcome.gft;
        t.profit += outcome.profit;
        t.rounds += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn horizon_is_enforced() {
        let mut l = RoundLedger::new(1);
        let o = TradeOutcome { traded: false, gft: 0.0, profit: 0.0 };
        l.record(1, &o).unwrap();
        assert!(matches!(l.record(1, &o), Err(Error::HorizonExceeded(1))));
        assert_eq!(l.rounds_elapsed, 1);
    }

    proptest! {
        #[test]
        fn totals_fold_over_phases(rounds in prop::collection::vec((1u8..4, -1.0f64..1.0, -1.0f64..1.0), 0..200)) {
            let mut l = RoundLedger::new(rounds.len() as u64);
            let (mut g, mut p) = (0.0, 0.0);
            for &(ph, gft, profit) in &rounds {
                l.record(ph, &TradeOutcome { traded: true, gft, profit }).unwrap();
                g += gft;
                p += profit;
            }
            prop_assert!((l.cumulative_gft - g).abs() < 1e-9);
            prop_assert!((l.cumulative_profit - p).abs() < 1e-9);
            let sg: f64 = l.phases.values().map(|t| t.gft).sum();
            let sp: f64 = l.phases.values().map(|t| t.profit).sum();
            let sr: u64 = l.phases.values().map(|t| t.rounds).sum();
            prop_assert!((l.cumulative_gft - sg).abs() < 1e-9);
            prop_assert!((l.cumulative_profit - sp).abs() < 1e-9);
            prop_assert_eq!(sr, l.rounds_elapsed);
        }
    }
}
