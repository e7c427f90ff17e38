use alloc::vec::Vec;

use super::{
    argmax, check_context, trigger_width, ArEstimates, Policy, PolicyContext, PolicyError,
    RoundGuard,
};
use crate::env::ArParams;

/// UCB with an AR-shaped confidence bonus.
///
/// After one round-robin pass, pulls the arm maximizing
/// `est_i + sqrt(2 ln(2/delta)) * sigma_i * sqrt((alpha_i^2 - alpha_i^(2 g_i)) / (1 - alpha_i^2))`
/// with `g_i` the rounds since arm `i` was last pulled.
#[derive(Debug, Clone)]
pub struct ModUcb {
    delta: f64,
    scale: f64,
    params: Vec<ArParams>,
    estimates: ArEstimates,
    guard: RoundGuard,
}

impl ModUcb {
    pub fn new(delta: f64) -> Result<Self, PolicyError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(PolicyError::Config(alloc::format!(
                "delta {delta} outside (0, 1)"
            )));
        }
        Ok(Self {
            delta,
            scale: libm::sqrt(2.0 * libm::log(2.0 / delta)),
            params: Vec::new(),
            estimates: ArEstimates::new(0),
            guard: RoundGuard::default(),
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Exploration bonus for an arm last pulled `gap >= 1` rounds ago.
    pub fn bonus(&self, params: &ArParams, gap: usize) -> f64 {
        trigger_width(
            params.alpha(),
            params.sigma(),
            gap.saturating_sub(1),
            self.scale,
        )
    }

    pub fn estimates(&self) -> &ArEstimates {
        &self.estimates
    }
}

impl Policy for ModUcb {
    fn name(&self) -> &'static str {
        "mod-UCB"
    }

    fn reset(&mut self, ctx: &PolicyContext, _seed: u64) -> Result<(), PolicyError> {
        check_context(ctx)?;
        self.params = ctx.arms.clone();
        self.estimates = ArEstimates::new(ctx.arm_count());
        self.guard = RoundGuard::default();
        Ok(())
    }

    fn select_arm(&mut self, t: usize) -> Result<usize, PolicyError> {
        if self.params.is_empty() {
            return Err(PolicyError::NotReset);
        }
        self.guard.begin(t)?;
        let k = self.params.len();
        let arm = if t < k {
            t
        } else {
            argmax((0..k).map(|i| {
                let gap = self.estimates.gap(i, t).unwrap_or(t + 1);
                self.estimates.estimate(i) + self.bonus(&self.params[i], gap)
            }))
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
