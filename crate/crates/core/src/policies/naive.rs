use rand::Rng;

use super::{check_context, Policy, PolicyContext, PolicyError, RoundGuard};
use crate::seed;

/// Picks one arm uniformly at random and pulls it forever.
#[derive(Debug, Clone, Default)]
pub struct Naive {
    arm: Option<usize>,
    guard: RoundGuard,
}

impl Naive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn chosen(&self) -> Option<usize> {
        self.arm
    }
}

impl Policy for Naive {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn reset(&mut self, ctx: &PolicyContext, seed: u64) -> Result<(), PolicyError> {
        check_context(ctx)?;
        let mut rng = seed::rng_from_seed(seed);
        self.arm = Some(rng.random_range(0..ctx.arm_count()));
        self.guard = RoundGuard::default();
        Ok(())
    }

    fn select_arm(&mut self, t: usize) -> Result<usize, PolicyError> {
        let arm = self.arm.ok_or(PolicyError::NotReset)?;
        self.guard.begin(t)?;
        self.guard.selected(arm);
        Ok(arm)
    }

    fn observe(&mut self, t: usize, arm: usize, reward: f64) -> Result<(), PolicyError> {
        self.guard.finish(t, arm, reward)
    }
}
