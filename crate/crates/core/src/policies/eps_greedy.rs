use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{argmax, check_context, ArEstimates, Policy, PolicyContext, PolicyError, RoundGuard};
use crate::env::ArParams;
use crate::seed;

/// Epsilon-greedy over AR-aware estimates.
///
/// Estimates start at 0 (the stationary mean) and follow the same recursion
/// as AR2. With probability `epsilon` a uniformly random arm is pulled,
/// otherwise the arm with the largest estimate (lowest index on ties).
#[derive(Debug, Clone)]
pub struct EpsilonGreedy {
    epsilon: f64,
    params: Vec<ArParams>,
    estimates: ArEstimates,
    rng: Option<ChaCha8Rng>,
    guard: RoundGuard,
    explorations: usize,
}

impl EpsilonGreedy {
    pub fn new(epsilon: f64) -> Result<Self, PolicyError> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(PolicyError::Config(alloc::format!(
                "epsilon {epsilon} outside [0, 1]"
            )));
        }
        Ok(Self {
            epsilon,
            params: Vec::new(),
            estimates: ArEstimates::new(0),
            rng: None,
            guard: RoundGuard::default(),
            explorations: 0,
        })
    }

    /// Rounds on which the exploration coin came up.
    pub fn explorations(&self) -> usize {
        self.explorations
    }

    pub fn estimates(&self) -> &ArEstimates {
        &self.estimates
    }
}

impl Policy for EpsilonGreedy {
    fn name(&self) -> &'static str {
        "eps-greedy"
    }

    fn reset(&mut self, ctx: &PolicyContext, seed: u64) -> Result<(), PolicyError> {
        check_context(ctx)?;
        self.params = ctx.arms.clone();
        self.estimates = ArEstimates::new(ctx.arm_count());
        self.rng = Some(seed::rng_from_seed(seed));
        self.guard = RoundGuard::default();
        self.explorations = 0;
        Ok(())
    }

    fn select_arm(&mut self, t: usize) -> Result<usize, PolicyError> {
        let rng = self.rng.as_mut().ok_or(PolicyError::NotReset)?;
        self.guard.begin(t)?;
        let k = self.params.len();
        let arm = if rng.random::<f64>() < self.epsilon {
            self.explorations += 1;
            rng.random_range(0..k)
        } else {
            argmax(self.estimates.estimates().iter().copied())
        };
        self.guard.selected(arm);
        Ok(arm)
    }

    fn observe(&mut self, t: usize, arm: usize, reward: f64) -> Result<(), PolicyError> {
        self.guard.finish(t, arm, reward)?;
        self.estimates.record(&self.params, t, arm, reward);
        Ok(())
    }
}
