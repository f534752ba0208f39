//! Round-level mechanics: actions, values, outcomes, feedback and the
//! information firewall between environment and mechanism.

mod feedback;
mod firewall;
mod ledger;

pub use feedback::{extract_feedback, Feedback, FeedbackKind};
pub use firewall::{firewall_run_round, Mechanism, MechanismSummary, PhaseId, RoundRecord};
pub use ledger::{PhaseTotals, RoundLedger};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain(format!("{name} = {x} outside [0, 1]")))
    }
}

/// Posted price pair: `p` is offered to the seller, `q` asked from the buyer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    p: f64,
    q: f64,
}

impl Action {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        check_unit("p", p)?;
        check_unit("q", q)?;
        Ok(Self { p, q })
    }

    /// Diagonal (budget-neutral) action `(p, p)`.
    pub fn diagonal(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Upper-left halfspace: every trade yields nonnegative profit.
    pub fn is_budget_safe(&self) -> bool {
        self.p <= self.q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValuePair {
    s: f64,
    b: f64,
}

impl ValuePair {
    pub fn new(s: f64, b: f64) -> Result<Self> {
        check_unit("s", s)?;
        check_unit("b", b)?;
        Ok(Self { s, b })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeOutcome {
    pub traded: bool,
    pub gft: f64,
    pub profit: f64,
}

/// Trade happens iff `s <= p` and `q <= b`, both inclusive.
pub fn trade(values: ValuePair, action: Action) -> TradeOutcome {
    let traded = values.s <= action.p && action.q <= values.b;
    if traded {
        TradeOutcome {
            traded,
            gft: values.b - values.s,
            profit: action.q - action.p,
        }
    } else {
        TradeOutcome {
            traded,
            gft: 0.0,
            profit: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vp(s: f64, b: f64) -> ValuePair {
        ValuePair::new(s, b).unwrap()
    }
    fn act(p: f64, q: f64) -> Action {
        Action::new(p, q).unwrap()
    }

    #[test]
    fn diagonal_trade_succeeds() {
        let o = trade(vp(0.3, 0.7), act(0.5, 0.5));
        assert!(o.traded);
        assert!((o.gft - 0.4).abs() < 1e-15);
        assert_eq!(o.profit, 0.0);
    }

    #[test]
    fn seller_rejects() {
        let o = trade(vp(0.6, 0.7), act(0.5, 0.5));
        assert_eq!(
            o,
            TradeOutcome {
                traded: false,
                gft: 0.0,
                profit: 0.0
            }
        );
    }

    #[test]
    fn boundaries_are_inclusive() {
        let o = trade(vp(0.5, 0.5), act(0.5, 0.5));
        assert!(o.traded);
        assert_eq!(o.gft, 0.0);
        assert_eq!(o.profit, 0.0);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(Action::new(1.2, 0.5).is_err());
        assert!(Action::new(0.2, -0.1).is_err());
        assert!(ValuePair::new(f64::NAN, 0.5).is_err());
        assert!(ValuePair::new(0.5, 1.0000001).is_err());
    }
}
