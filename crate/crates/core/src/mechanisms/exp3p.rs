use rand::Rng;

/// EXP3.P adversarial bandit (Auer, Cesa-Bianchi, Freund, Schapire) with
/// rewards in `[0, 1]`. Weights are kept in log space.
#[derive(Debug, Clone)]
pub struct Exp3P {
    log_weights: Vec<f64>,
    probs: Vec<f64>,
    alpha: f64,
    gamma: f64,
    horizon: f64,
    last: Option<usize>,
}

impl Exp3P {
    /// Standard tuning for `arms` arms over `horizon` rounds with failure
    /// probability `delta`.
    pub fn new(arms: usize, horizon: u64, delta: f64) -> Self {
        assert!(arms >= 1, "need at least one arm");
        let n = arms as f64;
        let t = horizon.max(1) as f64;
        let alpha = 2.0 * (n * t / delta).ln().max(0.0).sqrt();
        let gamma = if arms == 1 {
            0.0
        } else {
            (0.6f64).min(2.0 * (0.6 * n * n.ln() / t).sqrt())
        };
        let init = alpha * gamma / 3.0 * (t / n).sqrt();
        Exp3P {
            log_weights: vec![init; arms],
            probs: vec![1.0 / n; arms],
            alpha,
            gamma,
            horizon: t,
            last: None,
        }
    }

    pub fn arms(&self) -> usize {
        self.log_weights.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    fn refresh(&mut self) {
        let n = self.arms() as f64;
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (p, lw) in self.probs.iter_mut().zip(&self.log_weights) {
            *p = (lw - max).exp();
            total += *p;
        }
        for p in &mut self.probs {
            *p = (1.0 - self.gamma) * *p / total + self.gamma / n;
        }
    }

    pub fn select<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        self.refresh();
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = self.arms() - 1;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                pick = i;
                break;
            }
        }
        self.last = Some(pick);
        pick
    }

    /// Feeds the reward of the arm returned by the last `select`.
    pub fn update(&mut self, reward: f64) {
        let Some(chosen) = self.last.take() else { return };
        let n = self.arms() as f64;
        let bonus = self.alpha / (n * self.horizon).sqrt();
        let eta = self.gamma / (3.0 * n);
        for (i, (lw, p)) in self.log_weights.iter_mut().zip(&self.probs).enumerate() {
            let est = if i == chosen { reward / p } else { 0.0 };
            *lw += eta * (est + bonus / p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn probabilities_form_distribution_with_floor() {
        let mut e = Exp3P::new(7, 1000, 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for t in 0..500 {
            let a = e.select(&mut rng);
            let s: f64 = e.probabilities().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(e.probabilities().iter().all(|&p| p >= e.gamma / 7.0 - 1e-15));
            e.update(if a == 3 { 1.0 } else { (t % 2) as f64 * 0.1 });
        }
    }

    #[test]
    fn concentrates_on_best_arm() {
        let horizon = 20_000;
        let mut e = Exp3P::new(5, horizon, 1.0 / horizon as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let means = [0.1, 0.2, 0.8, 0.3, 0.2];
        let mut pulls = [0u64; 5];
        for _ in 0..horizon {
            let a = e.select(&mut rng);
            pulls[a] += 1;
            let r = if rng.random::<f64>() < means[a] { 1.0 } else { 0.0 };
            e.update(r);
        }
        assert!(pulls[2] as f64 > 0.6 * horizon as f64, "{pulls:?}");
    }
}
