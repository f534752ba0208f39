//! Stage-synchronous elimination over near-diagonal candidates
//! `a_{k,k} = (k/K, (k-1)/K)` driven by one-bit trade feedback only.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::params::GbbParams;
use crate::dist::grid_action;
use crate::error::{Error, Result};
use crate::trade::{Action, Feedback, FeedbackKind, Mechanism, MechanismSummary, PhaseId};

/// Candidate segment `[sigma : tau]` with running estimates of the
/// horizontal mass left of `sigma` and vertical mass above `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub sigma: usize,
    pub tau: usize,
    pub h_est: f64,
    pub v_est: f64,
}

impl Segment {
    pub fn contains(&self, k: usize) -> bool {
        (self.sigma..=self.tau).contains(&k)
    }
}

/// Play grid action `a_{i,j}` for `repeat` consecutive rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryBlock {
    pub i: usize,
    pub j: usize,
    pub repeat: u64,
}

/// Empirical trade rates `Z_{i,j}` on a `K` grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EstimateTable {
    k: usize,
    entries: BTreeMap<(usize, usize), (f64, u64)>,
}

impl EstimateTable {
    pub fn new(k: usize) -> Self {
        EstimateTable {
            k,
            entries: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, i: usize, j: usize, traded: bool) {
        let e = self.entries.entry((i, j)).or_insert((0.0, 0));
        e.0 += traded as u8 as f64;
        e.1 += 1;
    }

    /// Overwrites an entry with a known rate.
    pub fn set(&mut self, i: usize, j: usize, rate: f64) {
        self.entries.insert((i, j), (rate, 1));
    }

    pub fn samples(&self, i: usize, j: usize) -> u64 {
        self.entries.get(&(i, j)).map_or(0, |e| e.1)
    }

    pub fn z(&self, i: usize, j: usize) -> Result<f64> {
        match self.entries.get(&(i, j)) {
            Some(&(sum, n)) if n > 0 => Ok(sum / n as f64),
            _ => Err(Error::Internal(format!("no estimate for Z[{i},{j}]"))),
        }
    }

    /// `(1/K) sum_{i in [lo:hi]} Z_{i,j}`; zero on an empty range.
    pub fn h_hat(&self, lo: usize, hi: usize, j: usize) -> Result<f64> {
        let mut s = 0.0;
        for i in lo..=hi {
            s += self.z(i, j)?;
        }
        Ok(s / self.k as f64)
    }

    /// `(1/K) sum_{j in [lo:hi]} Z_{i,j}`; zero on an empty range.
    pub fn v_hat(&self, i: usize, lo: usize, hi: usize) -> Result<f64> {
        let mut s = 0.0;
        for j in lo..=hi {
            s += self.z(i, j)?;
        }
        Ok(s / self.k as f64)
    }
}

/// `[num/den]` clipped at 1; a zero denominator gives 1.
pub fn clipped_ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        1.0
    } else {
        (num / den).min(1.0)
    }
}

/// Stage queries of one segment: the bottom row `a_{i,sigma}` and right
/// column `a_{tau,j}` over `[sigma:tau]`, corner once.
pub fn schedule_segment_queries(segment: &Segment, stage: usize, params: &GbbParams) -> Vec<QueryBlock> {
    let repeat = params.stage_repeat(stage);
    let (s, t) = (segment.sigma, segment.tau);
    let mut out: Vec<QueryBlock> = (s..=t).map(|i| QueryBlock { i, j: s, repeat }).collect();
    out.extend((s..=t).filter(|&j| j != s).map(|j| QueryBlock { i: t, j, repeat }));
    out
}

/// Estimated GFT of candidate `k` in `segment` from that segment's stage table.
pub fn estimate_gft(k: usize, segment: &Segment, table: &EstimateTable) -> Result<f64> {
    if !segment.contains(k) {
        return Err(Error::IndexOutOfRange(format!(
            "candidate {k} outside [{}:{}]",
            segment.sigma, segment.tau
        )));
    }
    let (s, t) = (segment.sigma, segment.tau);
    let corner = table.z(t, s)?;
    let horizontal = (segment.h_est + table.h_hat(s, k, s)?) * clipped_ratio(table.z(t, k)?, corner);
    let vertical = (segment.v_est + table.v_hat(t, k, t)?) * clipped_ratio(table.z(k, s)?, corner);
    Ok(horizontal + vertical)
}

/// Candidates whose estimate is within `2 * gamma_next` of the best.
pub fn eliminate(estimates: &[(usize, f64)], gamma_next: f64) -> Vec<usize> {
    let best = estimates.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    estimates
        .iter()
        .filter(|e| e.1 >= best - 2.0 * gamma_next)
        .map(|e| e.0)
        .collect()
}

/// A child segment awaiting its calibration queries.
#[derive(Debug, Clone, PartialEq)]
pub struct PendingChild {
    pub sigma: usize,
    pub tau: usize,
    pub calibration: Vec<QueryBlock>,
}

/// Splits `segment` at its midpoint around the surviving candidates and
/// plans the calibration triple `{a_{tau,sigma}, a_{tau',sigma}, a_{tau,sigma'}}`
/// for each nonempty half.
pub fn split_and_calibrate(segment: &Segment, survivors: &[usize], params: &GbbParams) -> Vec<PendingChild> {
    let (s, t) = (segment.sigma, segment.tau);
    let mid = (s + t) / 2;
    let repeat = params.calibration_repeat();
    [(s, mid), (mid + 1, t)]
        .into_iter()
        .filter_map(|(lo, hi)| {
            let inside = survivors.iter().copied().filter(|k| (lo..=hi).contains(k));
            let (c_lo, c_hi) = inside.fold((usize::MAX, 0), |(a, b), k| (a.min(k), b.max(k)));
            if c_lo == usize::MAX {
                return None;
            }
            let mut calibration: Vec<QueryBlock> = vec![];
            for (i, j) in [(t, s), (c_hi, s), (t, c_lo)] {
                if !calibration.iter().any(|b| b.i == i && b.j == j) {
                    calibration.push(QueryBlock { i, j, repeat });
                }
            }
            Some(PendingChild {
                sigma: c_lo,
                tau: c_hi,
                calibration,
            })
        })
        .collect()
}

impl PendingChild {
    /// Child estimates from the parent's stage table and this child's
    /// calibration table.
    pub fn finish(&self, parent: &Segment, stage: &EstimateTable, calibration: &EstimateTable) -> Result<Segment> {
        let (s, t) = (parent.sigma, parent.tau);
        let corner = calibration.z(t, s)?;
        let h = (parent.h_est + stage.h_hat(s, self.sigma - 1, s)?) * clipped_ratio(calibration.z(t, self.sigma)?, corner);
        let v = (parent.v_est + stage.v_hat(t, self.tau + 1, t)?) * clipped_ratio(calibration.z(self.tau, s)?, corner);
        Ok(Segment {
            sigma: self.sigma,
            tau: self.tau,
            h_est: h,
            v_est: v,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Stage,
    Calibration,
}

/// Breadth-first elimination run over stages `0..=L`; no calibration follows
/// the last stage.
#[derive(Debug, Clone)]
pub struct FractalElimination {
    params: GbbParams,
    stage: usize,
    step: Step,
    segments: Vec<Segment>,
    candidates: Vec<usize>,
    history: Vec<Vec<usize>>,
    estimates: Vec<Vec<(usize, f64)>>,
    stage_tables: Vec<EstimateTable>,
    pending: Vec<(usize, PendingChild)>,
    calib_tables: Vec<EstimateTable>,
    queue: VecDeque<(usize, QueryBlock)>,
    served: u64,
    in_flight: Option<(usize, usize, usize)>,
    rounds: u64,
    done: bool,
}

impl FractalElimination {
    pub fn new(params: GbbParams) -> Self {
        let k = params.k;
        let mut fe = FractalElimination {
            params,
            stage: 0,
            step: Step::Stage,
            segments: vec![Segment {
                sigma: 1,
                tau: k,
                h_est: 0.0,
                v_est: 0.0,
            }],
            candidates: (1..=k).collect(),
            history: vec![(1..=k).collect()],
            estimates: vec![],
            stage_tables: vec![],
            pending: vec![],
            calib_tables: vec![],
            queue: VecDeque::new(),
            served: 0,
            in_flight: None,
            rounds: 0,
            done: false,
        };
        fe.enqueue_stage();
        fe
    }

    pub fn params(&self) -> &GbbParams {
        &self.params
    }

    /// `C_0, C_1, ...` so far.
    pub fn candidate_history(&self) -> &[Vec<usize>] {
        &self.history
    }

    /// Final candidate set `C_{L+1}` once finished.
    pub fn survivors(&self) -> Option<&[usize]> {
        self.done.then(|| self.history.last().expect("nonempty").as_slice())
    }

    /// Per-stage `(candidate, estimated GFT)` lists.
    pub fn stage_estimates(&self) -> &[Vec<(usize, f64)>] {
        &self.estimates
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn current_stage(&self) -> usize {
        self.stage
    }

    fn enqueue_stage(&mut self) {
        self.stage_tables = vec![EstimateTable::new(self.params.k); self.segments.len()];
        for (idx, seg) in self.segments.iter().enumerate() {
            for b in schedule_segment_queries(seg, self.stage, &self.params) {
                self.queue.push_back((idx, b));
            }
        }
    }

    fn table_mut(&mut self, idx: usize) -> &mut EstimateTable {
        match self.step {
            Step::Stage => &mut self.stage_tables[idx],
            Step::Calibration => &mut self.calib_tables[idx],
        }
    }

    fn advance(&mut self) -> Result<()> {
        match self.step {
            Step::Stage => {
                let mut est = vec![];
                for (seg, table) in self.segments.iter().zip(&self.stage_tables) {
                    for &k in self.candidates.iter().filter(|&&k| seg.contains(k)) {
                        est.push((k, estimate_gft(k, seg, table)?));
                    }
                }
                let next = eliminate(&est, self.params.gamma(self.stage + 1));
                self.estimates.push(est);
                self.history.push(next.clone());
                self.candidates = next;
                if self.stage >= self.params.stages {
                    self.done = true;
                    return Ok(());
                }
                self.pending.clear();
                for (idx, seg) in self.segments.iter().enumerate() {
                    for child in split_and_calibrate(seg, &self.candidates, &self.params) {
                        self.pending.push((idx, child));
                    }
                }
                self.calib_tables = vec![EstimateTable::new(self.params.k); self.pending.len()];
                for (c, (_, child)) in self.pending.iter().enumerate() {
                    for &b in &child.calibration {
                        self.queue.push_back((c, b));
                    }
                }
                self.step = Step::Calibration;
            }
            Step::Calibration => {
                let mut children = Vec::with_capacity(self.pending.len());
                for (c, (parent, child)) in self.pending.iter().enumerate() {
                    children.push(child.finish(&self.segments[*parent], &self.stage_tables[*parent], &self.calib_tables[c])?);
                }
                self.segments = children;
                self.stage += 1;
                self.step = Step::Stage;
                self.enqueue_stage();
            }
        }
        Ok(())
    }
}

impl Mechanism for FractalElimination {
    fn feedback_kind(&self) -> FeedbackKind {
        FeedbackKind::OneBit
    }

    fn next_action(&mut self) -> Action {
        let &(idx, b) = self.queue.front().expect("unfinished elimination has queued work");
        self.in_flight = Some((idx, b.i, b.j));
        grid_action(b.i, b.j, self.params.k).expect("grid indices in range")
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        let (idx, i, j) = self
            .in_flight
            .take()
            .ok_or_else(|| Error::Internal("feedback without a pending action".into()))?;
        let bit = feedback.trade_bit()?;
        self.table_mut(idx).record(i, j, bit);
        self.rounds += 1;
        self.served += 1;
        let repeat = self.queue.front().map_or(0, |b| b.1.repeat);
        if self.served >= repeat {
            self.queue.pop_front();
            self.served = 0;
        }
        while self.queue.is_empty() && !self.done {
            self.advance()?;
        }
        Ok(())
    }

    fn finished(&self) -> bool {
        self.done
    }

    fn phase(&self) -> PhaseId {
        2
    }

    fn summary(&self) -> MechanismSummary {
        MechanismSummary {
            candidate_sizes: self.history.iter().map(Vec::len).collect(),
            survivors: self.history.last().cloned().unwrap_or_default(),
            exploration_rounds: self.rounds,
        }
    }
}
