use crate::error::{domain, Result};
use crate::trade::{Action, Feedback, FeedbackKind, Mechanism, PhaseId};

/// Posts the same action every round.
#[derive(Debug, Clone, Copy)]
pub struct FixedPrice {
    action: Action,
}

impl FixedPrice {
    pub fn new(action: Action) -> Self {
        FixedPrice { action }
    }
}

impl Mechanism for FixedPrice {
    fn feedback_kind(&self) -> FeedbackKind {
        FeedbackKind::OneBit
    }
    fn next_action(&mut self) -> Action {
        self.action
    }
    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        feedback.trade_bit().map(|_| ())
    }
    fn finished(&self) -> bool {
        false
    }
    fn phase(&self) -> PhaseId {
        0
    }
}

/// Explore-then-commit with two-bit feedback on the diagonal grid
/// `{g/(G-1)}`: round-robin for `explore` rounds, estimate the seller CDF and
/// buyer survival at each grid point, score each price by the trapezoid
/// version of `H + V`, then post the best one forever.
#[derive(Debug, Clone)]
pub struct EtcTwoBit {
    grid: Vec<f64>,
    explore: u64,
    rounds: u64,
    seller_hits: Vec<u64>,
    buyer_hits: Vec<u64>,
    pulls: Vec<u64>,
    committed: Option<Action>,
    current: usize,
}

impl EtcTwoBit {
    pub fn new(explore: u64, grid: usize) -> Result<Self> {
        if grid < 2 {
            return Err(domain(format!("grid must have at least 2 points, got {grid}")));
        }
        let pts = (0..grid).map(|g| g as f64 / (grid - 1) as f64).collect();
        Ok(EtcTwoBit {
            grid: pts,
            explore,
            rounds: 0,
            seller_hits: vec![0; grid],
            buyer_hits: vec![0; grid],
            pulls: vec![0; grid],
            committed: None,
            current: 0,
        })
    }

    pub fn committed(&self) -> Option<Action> {
        self.committed
    }

    /// Estimated diagonal GFT per grid point from the exploration counts.
    pub fn scores(&self) -> Vec<f64> {
        let n = self.grid.len();
        let rate = |hits: &[u64], g: usize| {
            if self.pulls[g] == 0 {
                0.0
            } else {
                hits[g] as f64 / self.pulls[g] as f64
            }
        };
        let cdf: Vec<f64> = (0..n).map(|g| rate(&self.seller_hits, g)).collect();
        let surv: Vec<f64> = (0..n).map(|g| rate(&self.buyer_hits, g)).collect();
        let step = 1.0 / (n - 1) as f64;
        let mut below = vec![0.0; n];
        for g in 1..n {
            below[g] = below[g - 1] + 0.5 * step * (cdf[g - 1] + cdf[g]);
        }
        let mut above = vec![0.0; n];
        for g in (0..n - 1).rev() {
            above[g] = above[g + 1] + 0.5 * step * (surv[g] + surv[g + 1]);
        }
        (0..n).map(|g| below[g] * surv[g] + cdf[g] * above[g]).collect()
    }

    fn commit(&mut self) {
        let scores = self.scores();
        let best = (0..scores.len()).fold(0, |b, g| if scores[g] > scores[b] { g } else { b });
        self.committed = Some(Action::diagonal(self.grid[best]).expect("grid in [0,1]"));
    }
}

impl Mechanism for EtcTwoBit {
    fn feedback_kind(&self) -> FeedbackKind {
        FeedbackKind::TwoBit
    }

    fn next_action(&mut self) -> Action {
        if let Some(a) = self.committed {
            return a;
        }
        self.current = (self.rounds % self.grid.len() as u64) as usize;
        Action::diagonal(self.grid[self.current]).expect("grid in [0,1]")
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        if self.committed.is_none() {
            let g = self.current;
            self.seller_hits[g] += feedback.seller_bit()? as u64;
            self.buyer_hits[g] += feedback.buyer_bit()? as u64;
            self.pulls[g] += 1;
            self.rounds += 1;
            if self.rounds >= self.explore {
                self.commit();
            }
        } else {
            feedback.seller_bit()?;
        }
        Ok(())
    }

    fn finished(&self) -> bool {
        false
    }

    fn phase(&self) -> PhaseId {
        if self.committed.is_some() {
            2
        } else {
            1
        }
    }
}
