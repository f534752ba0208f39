use serde::{Deserialize, Serialize};

use super::{extract_feedback, trade, Action, Feedback, FeedbackKind, TradeOutcome, ValuePair};
use crate::error::{Error, Result};

/// Phase tag attached to each round for ledgers (1-based; 0 for single-phase policies).
pub type PhaseId = u8;

/// Diagnostic summary a mechanism may expose after a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MechanismSummary {
    /// Candidate-set sizes per elimination stage, `|C_0|, |C_1|, ...`.
    pub candidate_sizes: Vec<usize>,
    /// Final surviving candidate indices.
    pub survivors: Vec<usize>,
    /// Rounds spent in the exploration phase.
    pub exploration_rounds: u64,
}

/// An online posted-price policy. It only ever sees the feedback payload of
/// the kind it declares.
pub trait Mechanism {
    fn feedback_kind(&self) -> FeedbackKind;
    fn next_action(&mut self) -> Action;
    fn observe(&mut self, feedback: &Feedback) -> Result<()>;
    fn finished(&self) -> bool;
    /// Phase of the most recently emitted action.
    fn phase(&self) -> PhaseId;

    fn summary(&self) -> MechanismSummary {
        MechanismSummary::default()
    }
}

impl<M: Mechanism + ?Sized> Mechanism for Box<M> {
    fn feedback_kind(&self) -> FeedbackKind {
        (**self).feedback_kind()
    }
    fn next_action(&mut self) -> Action {
        (**self).next_action()
    }
    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        (**self).observe(feedback)
    }
    fn finished(&self) -> bool {
        (**self).finished()
    }
    fn phase(&self) -> PhaseId {
        (**self).phase()
    }
    fn summary(&self) -> MechanismSummary {
        (**self).summary()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub action: Action,
    pub phase: PhaseId,
    pub feedback: Feedback,
    pub outcome: TradeOutcome,
}

pub fn firewall_run_round<M: Mechanism + ?Sized>(mechanism: &mut M, values: ValuePair) -> Result<RoundRecord> {
    if mechanism.finished() {
        return Err(Error::MechanismFinished);
    }
    let action = mechanism.next_action();
    let phase = mechanism.phase();
    let outcome = trade(values, action);
    let feedback = extract_feedback(values, action, mechanism.feedback_kind());
    mechanism.observe(&feedback)?;
    Ok(RoundRecord {
        action,
        phase,
        feedback,
        outcome,
    })
}
