use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{check_context, Policy, PolicyContext, PolicyError, RoundGuard};
use crate::seed;

/// Exp3 restarted in batches, tuned by a variation budget `V_T`.
///
/// Batch length is `ceil((k ln k)^(1/3) (T / V_T)^(2/3))` and the Exp3
/// mixing rate `min(1, sqrt(k ln k / ((e - 1) batch)))`. Rewards are mapped
/// affinely from `[-R - 4 sigma_max, R + 4 sigma_max]` onto `[0, 1]` and
/// clipped. Weights are kept in log space.
#[derive(Debug, Clone)]
pub struct Rexp3 {
    variation_budget: f64,
    batch: usize,
    gamma: f64,
    lo: f64,
    hi: f64,
    log_weights: Vec<f64>,
    probs: Vec<f64>,
    rng: Option<ChaCha8Rng>,
    guard: RoundGuard,
}

impl Rexp3 {
    pub fn new(variation_budget: f64) -> Result<Self, PolicyError> {
        if !(variation_budget > 0.0 && variation_budget.is_finite()) {
            return Err(PolicyError::Config(alloc::format!(
                "variation budget {variation_budget} must be positive"
            )));
        }
        Ok(Self {
            variation_budget,
            batch: 0,
            gamma: 0.0,
            lo: 0.0,
            hi: 1.0,
            log_weights: Vec::new(),
            probs: Vec::new(),
            rng: None,
            guard: RoundGuard::default(),
        })
    }

    pub fn batch_len(k: usize, horizon: usize, variation_budget: f64) -> usize {
        let kk = k as f64 * libm::log(k as f64);
        let len = libm::cbrt(kk) * libm::pow(horizon as f64 / variation_budget, 2.0 / 3.0);
        (libm::ceil(len) as usize).max(1)
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Sampling distribution used at the most recent selection.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    fn refresh_probs(&mut self) {
        let k = self.log_weights.len() as f64;
        let top = self
            .log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (p, &lw) in self.probs.iter_mut().zip(&self.log_weights) {
            *p = libm::exp(lw - top);
            total += *p;
        }
        for p in &mut self.probs {
            *p = (1.0 - self.gamma) * *p / total + self.gamma / k;
        }
    }
}

impl Policy for Rexp3 {
    fn name(&self) -> &'static str {
        "Rexp3"
    }

    fn reset(&mut self, ctx: &PolicyContext, seed: u64) -> Result<(), PolicyError> {
        check_context(ctx)?;
        let k = ctx.arm_count();
        self.batch = Self::batch_len(k, ctx.horizon, self.variation_budget);
        let kk = k as f64 * libm::log(k as f64);
        self.gamma = libm::sqrt(kk / ((core::f64::consts::E - 1.0) * self.batch as f64)).min(1.0);
        let r = ctx.arms.iter().map(|p| p.boundary()).fold(0.0, f64::max);
        let s = ctx.arms.iter().map(|p| p.sigma()).fold(0.0, f64::max);
        self.lo = -r - 4.0 * s;
        self.hi = r + 4.0 * s;
        self.log_weights = alloc::vec![0.0; k];
        self.probs = alloc::vec![1.0 / k as f64; k];
        self.rng = Some(seed::rng_from_seed(seed));
        self.guard = RoundGuard::default();
        Ok(())
    }

    fn select_arm(&mut self, t: usize) -> Result<usize, PolicyError> {
        if self.rng.is_none() {
            return Err(PolicyError::NotReset);
        }
        self.guard.begin(t)?;
        if t.is_multiple_of(self.batch) {
            self.log_weights.iter_mut().for_each(|w| *w = 0.0);
        }
        self.refresh_probs();
        let u: f64 = self.rng.as_mut().expect("checked").random();
        let mut acc = 0.0;
        let mut arm = self.probs.len() - 1;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                arm = i;
                break;
            }
        }
        self.guard.selected(arm);
        Ok(arm)
    }

    fn observe(&mut self, t: usize, arm: usize, reward: f64) -> Result<(), PolicyError> {
        self.guard.finish(t, arm, reward)?;
        let x = ((reward - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0);
        let k = self.log_weights.len() as f64;
        self.log_weights[arm] += self.gamma * (x / self.probs[arm]) / k;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::{drive, params, trajectory};
    use super::*;

    #[test]
    fn batch_formula() {
        // V_T = T leaves (k ln k)^(1/3).
        let want = libm::ceil(libm::cbrt(4.0 * libm::log(4.0))) as usize;
        assert_eq!(Rexp3::batch_len(4, 10_000, 10_000.0), want);
        assert_eq!(Rexp3::batch_len(1, 100, 1.0), 1);
    }

    #[test]
    fn probabilities_stay_on_simplex() {
        let ps = [params(0.9, 0.3), params(0.7, 0.2), params(0.95, 0.45)];
        let tr = trajectory(&ps, 5000, 4);
        let mut p = Rexp3::new(50.0).unwrap();
        p.reset(&PolicyContext::new(5000, ps.to_vec()), 9).unwrap();
        for t in 0..5000 {
            let a = p.select_arm(t).unwrap();
            let s: f64 = p.probabilities().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(p.probabilities().iter().all(|&q| q > 0.0));
            p.observe(t, a, tr.realized(a, t)).unwrap();
        }
    }

    #[test]
    fn seeded_determinism() {
        let ps = [params(0.9, 0.3), params(0.7, 0.2)];
        let tr = trajectory(&ps, 1000, 4);
        let a = drive(&mut Rexp3::new(20.0).unwrap(), &tr, 5);
        let b = drive(&mut Rexp3::new(20.0).unwrap(), &tr, 5);
        let c = drive(&mut Rexp3::new(20.0).unwrap(), &tr, 6);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
