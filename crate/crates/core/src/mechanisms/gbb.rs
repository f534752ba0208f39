use rand_chacha::ChaCha8Rng;

use super::fractal::FractalElimination;
use super::params::{params_for_horizon, GbbParams};
use super::profit_max::ProfitMax;
use crate::dist::grid_action;
use crate::error::{Error, Result};
use crate::trade::{Action, Feedback, FeedbackKind, Mechanism, MechanismSummary, PhaseId};

#[derive(Debug, Clone)]
enum Stage {
    Profit(ProfitMax),
    Explore(FractalElimination),
    Exploit { survivors: Vec<usize>, next: usize },
}

/// Three phases: profit accumulation on the upper-left halfspace,
/// elimination on the lower-right halfspace, then round-robin over the
/// surviving candidates `a_{k,k}` until the horizon.
#[derive(Debug, Clone)]
pub struct GbbOneBit {
    params: GbbParams,
    stage: Stage,
    rounds: u64,
    phase_rounds: [u64; 3],
    last_phase: PhaseId,
    history: Vec<Vec<usize>>,
}

impl GbbOneBit {
    pub fn new(horizon: u64, rng: ChaCha8Rng) -> Result<Self> {
        Self::with_params(params_for_horizon(horizon)?, rng)
    }

    pub fn with_params(params: GbbParams, rng: ChaCha8Rng) -> Result<Self> {
        let pm = ProfitMax::new(params.k, params.beta, params.horizon, rng)?;
        Ok(GbbOneBit {
            params,
            stage: Stage::Profit(pm),
            rounds: 0,
            phase_rounds: [0; 3],
            last_phase: 1,
            history: vec![],
        })
    }

    pub fn params(&self) -> &GbbParams {
        &self.params
    }

    /// Rounds spent in phases 1, 2 and 3.
    pub fn phase_rounds(&self) -> [u64; 3] {
        self.phase_rounds
    }

    /// Elimination candidate sets `C_0, C_1, ...` reached so far.
    pub fn candidate_history(&self) -> &[Vec<usize>] {
        match &self.stage {
            Stage::Explore(fe) => fe.candidate_history(),
            _ => &self.history,
        }
    }

    fn transition(&mut self) {
        loop {
            match &mut self.stage {
                Stage::Profit(pm) if pm.finished() => {
                    self.stage = Stage::Explore(FractalElimination::new(self.params));
                }
                Stage::Explore(fe) if fe.finished() => {
                    self.history = fe.candidate_history().to_vec();
                    let survivors = fe.survivors().expect("finished").to_vec();
                    self.stage = Stage::Exploit { survivors, next: 0 };
                }
                _ => return,
            }
        }
    }
}

impl Mechanism for GbbOneBit {
    fn feedback_kind(&self) -> FeedbackKind {
        FeedbackKind::OneBit
    }

    fn next_action(&mut self) -> Action {
        match &mut self.stage {
            Stage::Profit(pm) => {
                self.last_phase = 1;
                pm.next_action()
            }
            Stage::Explore(fe) => {
                self.last_phase = 2;
                fe.next_action()
            }
            Stage::Exploit { survivors, next } => {
                self.last_phase = 3;
                let k = survivors[*next % survivors.len()];
                grid_action(k, k, self.params.k).expect("candidate in grid")
            }
        }
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        if self.rounds >= self.params.horizon {
            return Err(Error::HorizonExceeded(self.params.horizon));
        }
        match &mut self.stage {
            Stage::Profit(pm) => pm.observe(feedback)?,
            Stage::Explore(fe) => fe.observe(feedback)?,
            Stage::Exploit { next, .. } => {
                feedback.trade_bit()?;
                *next += 1;
            }
        }
        self.rounds += 1;
        self.phase_rounds[self.last_phase as usize - 1] += 1;
        self.transition();
        Ok(())
    }

    fn finished(&self) -> bool {
        self.rounds >= self.params.horizon
    }

    fn phase(&self) -> PhaseId {
        self.last_phase
    }

    fn summary(&self) -> MechanismSummary {
        let hist = self.candidate_history();
        let survivors = match &self.stage {
            Stage::Exploit { survivors, .. } => survivors.clone(),
            _ => vec![],
        };
        MechanismSummary {
            candidate_sizes: hist.iter().map(Vec::len).collect(),
            survivors,
            exploration_rounds: self.phase_rounds[1],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::JointDistribution;
    use crate::trade::firewall_run_round;
    use rand::SeedableRng;

    fn run(m: &mut GbbOneBit, seed: u64) -> (f64, Vec<(Action, PhaseId)>) {
        let dist = JointDistribution::uniform();
        let mut env = ChaCha8Rng::seed_from_u64(seed);
        let mut profit = 0.0;
        let mut log = vec![];
        while !m.finished() {
            let r = firewall_run_round(m, dist.sample(&mut env)).unwrap();
            profit += r.outcome.profit;
            log.push((r.action, r.phase));
        }
        (profit, log)
    }

    #[test]
    fn paper_parameters_budget_balanced() {
        let mut m = GbbOneBit::new(100_000, ChaCha8Rng::seed_from_u64(11)).unwrap();
        let (profit, log) = run(&mut m, 12);
        assert_eq!(log.len(), 100_000);
        assert!(profit >= 0.0);
    }

    #[test]
    fn forced_parameters_reach_all_phases() {
        let params = params_for_horizon(400_000).unwrap().with_k(4).unwrap().with_beta(800.0).unwrap();
        let mut m = GbbOneBit::with_params(params, ChaCha8Rng::seed_from_u64(5)).unwrap();
        let (_, log) = run(&mut m, 6);
        let [p1, p2, p3] = m.phase_rounds();
        assert!(p1 > 0 && p2 > 0 && p3 > 0, "{:?}", m.phase_rounds());
        assert_eq!(p1 + p2 + p3, 400_000);
        for (a, ph) in &log {
            match ph {
                1 => assert!(a.p() <= a.q()),
                _ => assert!(a.p() > a.q()),
            }
        }
        let s = m.summary();
        assert_eq!(s.candidate_sizes.len(), params.stages + 2);
        assert!(!s.survivors.is_empty());
        let k = params.k as f64;
        for (a, _) in log.iter().filter(|x| x.1 == 3) {
            assert!((a.p() - a.q() - 1.0 / k).abs() < 1e-12);
        }
    }

    #[test]
    fn horizon_cuts_elimination_short() {
        let params = params_for_horizon(20_000).unwrap().with_k(8).unwrap().with_beta(100.0).unwrap();
        let mut m = GbbOneBit::with_params(params, ChaCha8Rng::seed_from_u64(5)).unwrap();
        let (_, log) = run(&mut m, 9);
        assert_eq!(log.len(), 20_000);
        assert_eq!(m.phase_rounds()[2], 0);
    }

    #[test]
    fn deterministic_given_seeds() {
        let params = params_for_horizon(50_000).unwrap().with_k(4).unwrap().with_beta(500.0).unwrap();
        let a = run(&mut GbbOneBit::with_params(params, ChaCha8Rng::seed_from_u64(1)).unwrap(), 2).1;
        let b = run(&mut GbbOneBit::with_params(params, ChaCha8Rng::seed_from_u64(1)).unwrap(), 2).1;
        assert_eq!(a, b);
    }
}
