use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::{Instance, InstanceSpec};
use super::report::{fit_scaling, HorizonSummary, RegretReport};
use super::seeds::{trial_rngs, trial_seed};
use crate::error::{Error, Result};
use crate::mechanisms::MechanismSpec;
use crate::trade::{firewall_run_round, PhaseId};

/// Per-phase realized totals of one trial.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub rounds: u64,
    pub gft: f64,
    pub profit: f64,
    /// Rounds whose action had `p <= q`.
    pub budget_safe_rounds: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub p: f64,
    pub q: f64,
    pub phase: PhaseId,
    pub s: f64,
    pub b: f64,
    pub traded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    #[serde(rename = "T")]
    pub horizon: u64,
    pub seed: u64,
    pub total_gft: f64,
    pub total_profit: f64,
    pub benchmark_total: f64,
    pub regret: f64,
    pub gbb_ok: bool,
    /// Realized `Σ (q - p)` over posted actions.
    pub gpb_sum: f64,
    pub phases: BTreeMap<PhaseId, PhaseStats>,
    /// Rounds the mechanism was finished before the horizon; nothing trades in them.
    pub idle_rounds: u64,
    pub exploration_rounds: u64,
    pub candidate_sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<Vec<RoundLog>>,
}

/// Realized profits at or above this count as budget balanced.
pub const GBB_TOL: f64 = 1e-12;

/// Runs `horizon` rounds of `mechanism` on `instance` with per-round
/// benchmark `benchmark` (expected GFT per round of the best diagonal price).
pub fn run_trial(
    instance: &Instance,
    mechanism: &MechanismSpec,
    horizon: u64,
    benchmark: f64,
    seed: u64,
    log_rounds: bool,
) -> Result<TrialResult> {
    let (mut env, mech_rng) = trial_rngs(seed);
    let mut mech = mechanism.build(horizon, mech_rng)?;
    if let Instance::Sequence(v) = instance {
        if (v.len() as u64) < horizon {
            return Err(Error::Config(format!("sequence has {} rows but T = {horizon}", v.len())));
        }
    }
    let mut phases: BTreeMap<PhaseId, PhaseStats> = BTreeMap::new();
    let (mut gft, mut profit, mut gpb) = (0.0, 0.0, 0.0);
    let mut log = log_rounds.then(|| Vec::with_capacity(horizon as usize));
    let mut idle = 0;
    for t in 0..horizon {
        let values = match instance {
            Instance::Distribution(d) => d.sample(&mut env),
            Instance::Sequence(v) => v[t as usize],
        };
        if mech.finished() {
            idle += 1;
            continue;
        }
        let r = firewall_run_round(&mut mech, values)?;
        gft += r.outcome.gft;
        profit += r.outcome.profit;
        gpb += r.action.q() - r.action.p();
        let ph = phases.entry(r.phase).or_default();
        ph.rounds += 1;
        ph.gft += r.outcome.gft;
        ph.profit += r.outcome.profit;
        ph.budget_safe_rounds += r.action.is_budget_safe() as u64;
        if let Some(l) = log.as_mut() {
            l.push(RoundLog {
                p: r.action.p(),
                q: r.action.q(),
                phase: r.phase,
                s: values.s(),
                b: values.b(),
                traded: r.outcome.traded,
            });
        }
    }
    let summary = mech.summary();
    let benchmark_total = horizon as f64 * benchmark;
    Ok(TrialResult {
        horizon,
        seed,
        total_gft: gft,
        total_profit: profit,
        benchmark_total,
        regret: benchmark_total - gft,
        gbb_ok: profit >= -GBB_TOL,
        gpb_sum: gpb,
        phases,
        idle_rounds: idle,
        exploration_rounds: summary.exploration_rounds,
        candidate_sizes: summary.candidate_sizes,
        rounds: log,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub mechanism: MechanismSpec,
    pub horizons: Vec<u64>,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; `TRADE_SIM_WORKERS` overrides, default is all cores.
    pub workers: Option<usize>,
    pub log_rounds: bool,
}

impl ExperimentConfig {
    pub fn new(instance: InstanceSpec, mechanism: MechanismSpec, horizons: Vec<u64>, trials: usize, seed: u64) -> Self {
        ExperimentConfig { instance, mechanism, horizons, trials, seed, workers: None, log_rounds: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() {
            return Err(Error::Config("no horizons given".into()));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("horizons must be strictly increasing".into()));
        }
        if self.horizons[0] == 0 {
            return Err(Error::Config("horizons must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        Ok(())
    }

    fn worker_count(&self) -> Result<Option<usize>> {
        match std::env::var("TRADE_SIM_WORKERS") {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(Some(n)),
                _ => Err(Error::Config(format!("TRADE_SIM_WORKERS must be a positive integer, got '{v}'"))),
            },
            Err(_) => Ok(self.workers),
        }
    }
}

/// All trials of every horizon, in `[horizon][trial]` order.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<Vec<TrialResult>>> {
    config.validate()?;
    let instance = config.instance.resolve()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.worker_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Internal(e.to_string()))?;
    let mut cached = None;
    let mut out = Vec::with_capacity(config.horizons.len());
    for (h, &horizon) in config.horizons.iter().enumerate() {
        let bench = match (&instance, cached) {
            (Instance::Distribution(_), Some(b)) => b,
            _ => {
                let b = instance.benchmark(horizon)?.gft;
                cached = Some(b);
                b
            }
        };
        let trials: Vec<TrialResult> = pool.install(|| {
            (0..config.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = trial_seed(config.seed, h, t);
                    run_trial(&instance, &config.mechanism, horizon, bench, seed, config.log_rounds)
                        .map_err(|e| with_context(e, horizon, t))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        out.push(trials);
    }
    Ok(out)
}

fn with_context(e: Error, horizon: u64, trial: usize) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("T={horizon} trial {trial}: {m}")),
        other => Error::Internal(format!("T={horizon} trial {trial}: {other}")),
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<RegretReport> {
    let trials = run_trials(config)?;
    let rows = trials.iter().map(|t| HorizonSummary::from_trials(t)).collect();
    Ok(RegretReport {
        family: config.instance.to_string(),
        mechanism: config.mechanism.to_string(),
        rows,
        fit: None,
        trials: Some(trials),
    })
}

/// `run_experiment` plus a log-log fit of mean regret against `T`.
pub fn scaling_experiment(config: &ExperimentConfig) -> Result<RegretReport> {
    if config.horizons.len() < 3 {
        return Err(Error::Config("scaling needs at least 3 horizons".into()));
    }
    let mut report = run_experiment(config)?;
    report.fit = fit_scaling(&report.rows);
    Ok(report)
}
