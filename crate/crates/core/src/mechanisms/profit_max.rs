use rand_chacha::ChaCha8Rng;

use super::exp3p::Exp3P;
use crate::error::{domain, Result};
use crate::trade::{Action, Feedback, FeedbackKind, Mechanism, PhaseId};

/// Upper-left action set of size `2K(ceil(ln T) + 1)`: the diagonal grid,
/// its upward shifts by `2^{-j}` for `j` in `1..=n+1`, and downward seller
/// shifts for `j` in `1..=n` (`n = ceil(ln T)`). Duplicates are kept.
pub fn profit_max_actions(k: usize, horizon: u64) -> Vec<Action> {
    let n = (horizon.max(2) as f64).ln().ceil() as i32;
    let kf = k as f64;
    let mut out = Vec::with_capacity(2 * k * (n as usize + 1));
    for i in 1..=k {
        let x = i as f64 / kf;
        out.push(Action::diagonal(x).expect("grid point in [0,1]"));
        for j in 1..=n + 1 {
            out.push(Action::new(x, (x + 2f64.powi(-j)).min(1.0)).expect("clamped"));
        }
        for j in 1..=n {
            out.push(Action::new((x - 2f64.powi(-j)).max(0.0), x).expect("clamped"));
        }
    }
    out
}

/// Bandit over [`profit_max_actions`] rewarded by realized profit; stops
/// after the first round whose cumulative profit reaches `beta`, or at the
/// horizon.
#[derive(Debug, Clone)]
pub struct ProfitMax {
    actions: Vec<Action>,
    learner: Exp3P,
    rng: ChaCha8Rng,
    beta: f64,
    horizon: u64,
    rounds: u64,
    profit: f64,
    current: Option<Action>,
    done: bool,
}

impl ProfitMax {
    pub fn new(k: usize, beta: f64, horizon: u64, rng: ChaCha8Rng) -> Result<Self> {
        if k < 2 {
            return Err(domain(format!("K must be at least 2, got {k}")));
        }
        if !(beta > 0.0) {
            return Err(domain(format!("beta must be positive, got {beta}")));
        }
        let actions = profit_max_actions(k, horizon);
        let learner = Exp3P::new(actions.len(), horizon, 1.0 / horizon.max(2) as f64);
        Ok(ProfitMax {
            actions,
            learner,
            rng,
            beta,
            horizon,
            rounds: 0,
            profit: 0.0,
            current: None,
            done: horizon == 0,
        })
    }

    pub fn cumulative_profit(&self) -> f64 {
        self.profit
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Whether the stop was triggered by the profit threshold.
    pub fn reached_threshold(&self) -> bool {
        self.profit >= self.beta
    }
}

impl Mechanism for ProfitMax {
    fn feedback_kind(&self) -> FeedbackKind {
        FeedbackKind::OneBit
    }

    fn next_action(&mut self) -> Action {
        let a = self.actions[self.learner.select(&mut self.rng)];
        self.current = Some(a);
        a
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        let a = self
            .current
            .take()
            .ok_or_else(|| crate::Error::Internal("feedback without a pending action".into()))?;
        let z = if feedback.trade_bit()? { 1.0 } else { 0.0 };
        let reward = (a.q() - a.p()) * z;
        self.learner.update(reward);
        self.profit += reward;
        self.rounds += 1;
        if self.profit >= self.beta || self.rounds >= self.horizon {
            self.done = true;
        }
        Ok(())
    }

    fn finished(&self) -> bool {
        self.done
    }

    fn phase(&self) -> PhaseId {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::JointDistribution;
    use crate::trade::firewall_run_round;
    use rand::SeedableRng;

    #[test]
    fn action_set_size_and_halfspace() {
        for (k, t) in [(2, 100), (5, 50_000), (16, 1_000_000)] {
            let n = (t as f64).ln().ceil() as usize;
            let a = profit_max_actions(k, t);
            assert_eq!(a.len(), 2 * k * (n + 1));
            assert!(a.iter().all(|x| x.p() <= x.q()));
        }
    }

    #[test]
    fn stops_just_past_threshold() {
        let dist = JointDistribution::uniform();
        let mut m = ProfitMax::new(4, 50.0, 100_000, ChaCha8Rng::seed_from_u64(3)).unwrap();
        let mut env = ChaCha8Rng::seed_from_u64(4);
        let mut profit = 0.0;
        while !m.finished() {
            let r = firewall_run_round(&mut m, dist.sample(&mut env)).unwrap();
            assert!(r.action.p() <= r.action.q());
            assert!(r.outcome.profit >= 0.0);
            profit += r.outcome.profit;
        }
        assert!((50.0..=51.0).contains(&profit), "{profit}");
        assert!((profit - m.cumulative_profit()).abs() < 1e-9);
        assert!(m.rounds() < 100_000);
    }

    #[test]
    fn stops_at_horizon() {
        let dist = JointDistribution::uniform();
        let mut m = ProfitMax::new(2, 1e9, 300, ChaCha8Rng::seed_from_u64(0)).unwrap();
        let mut env = ChaCha8Rng::seed_from_u64(1);
        let mut n = 0;
        while !m.finished() {
            firewall_run_round(&mut m, dist.sample(&mut env)).unwrap();
            n += 1;
        }
        assert_eq!(n, 300);
        assert!(!m.reached_threshold());
    }
}
