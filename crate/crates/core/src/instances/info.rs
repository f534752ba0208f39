use crate::error::{domain, Error, Result};
use crate::trade::Action;

/// Relative tolerance when asserting an inequality between computed quantities.
const CHECK_TOL: f64 = 1e-12;

fn xlogy_ratio(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (x / y).ln()
    }
}

/// `KL(Bern(a) || Bern(b))` in nats.
pub fn kl_bernoulli(a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(domain(format!("a = {a} not a probability")));
    }
    if !(b > 0.0 && b < 1.0) {
        return Err(domain(format!("b = {b} must lie in (0, 1)")));
    }
    if a == b {
        return Ok(0.0);
    }
    Ok((xlogy_ratio(a, b) + xlogy_ratio(1.0 - a, 1.0 - b)).max(0.0))
}

/// Returns `(max over ± of KL(Bern(a) || Bern((1±δ)a)), 2aδ²)` and fails if
/// the first exceeds the second.
pub fn kl_bernoulli_bound_check(a: f64, delta: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a <= 0.5 && (0.0..=0.5).contains(&delta)) {
        return Err(domain(format!("need a in (0, 1/2] and delta in [0, 1/2], got ({a}, {delta})")));
    }
    let kl = kl_bernoulli(a, a * (1.0 + delta))?.max(kl_bernoulli(a, a * (1.0 - delta))?);
    let bound = 2.0 * a * delta * delta;
    if kl > bound * (1.0 + CHECK_TOL) + f64::MIN_POSITIVE {
        return Err(Error::Verification(format!("KL {kl} exceeds 2a*delta^2 = {bound} at a={a}, delta={delta}")));
    }
    Ok((kl, bound))
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
        return Err(domain("probabilities must be finite and nonnegative"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(domain(format!("probabilities sum to {total}")));
    }
    Ok(())
}

fn check_pair(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(domain(format!("support sizes differ: {} vs {}", p.len(), q.len())));
    }
    check_distribution(p)?;
    check_distribution(q)
}

/// `KL(P || Q)` in nats over a shared finite support.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    let mut kl = 0.0;
    for (i, (&a, &b)) in p.iter().zip(q).enumerate() {
        if a > 0.0 && b == 0.0 {
            return Err(domain(format!("P puts mass on outcome {i} where Q has none")));
        }
        kl += xlogy_ratio(a, b);
    }
    Ok(kl.max(0.0))
}

pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Returns `(TV(P, Q), sqrt(KL(P || Q) / 2))` and fails if the first exceeds the second.
pub fn pinsker_check(p: &[f64], q: &[f64]) -> Result<(f64, f64)> {
    let kl = kl_divergence(p, q)?;
    let tv = total_variation(p, q)?;
    let bound = (0.5 * kl).sqrt();
    if tv > bound * (1.0 + CHECK_TOL) + 1e-15 {
        return Err(Error::Verification(format!("TV {tv} exceeds sqrt(KL/2) = {bound}")));
    }
    Ok((tv, bound))
}

/// Mean over trials of `Σ_t (q_t - p_t)`.
pub fn gpb_audit<L: AsRef<[Action]>>(run_logs: &[L]) -> f64 {
    if run_logs.is_empty() {
        return 0.0;
    }
    let total: f64 = run_logs
        .iter()
        .map(|log| log.as_ref().iter().map(|a| a.q() - a.p()).sum::<f64>())
        .sum();
    total / run_logs.len() as f64
}
