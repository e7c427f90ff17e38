//! Bandit policies behind one round-by-round interface.
//!
//! A driver calls [`Policy::reset`] once, then for each round `t = 0, 1, ...`
//! calls [`Policy::select_arm`] followed by [`Policy::observe`] with the
//! realized reward of the selected arm. Policies see nothing else of the
//! environment.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::env::{fold, ArParams};

mod ar2;
mod eps_greedy;
mod etc;
mod mod_ucb;
mod naive;
mod rexp3;
mod ucb1;

pub use ar2::{
    ar2_c0, default_epoch_len, Ar2, Ar2Config, Ar2State, ExploreRule, ResolvedAr2, SuperiorRule,
    TriggerMembership,
};
pub use eps_greedy::EpsilonGreedy;
pub use etc::ExploreThenCommit;
pub use mod_ucb::ModUcb;
pub use naive::Naive;
pub use rexp3::Rexp3;
pub use ucb1::Ucb1;

/// What a policy is told about the instance: horizon and per-arm parameters
/// (possibly perturbed or upper-bounded relative to the truth).
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyContext {
    pub horizon: usize,
    pub arms: Vec<ArParams>,
}

impl PolicyContext {
    pub fn new(horizon: usize, arms: Vec<ArParams>) -> Self {
        Self { horizon, arms }
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    pub fn mean_alpha(&self) -> f64 {
        self.arms.iter().map(ArParams::alpha).sum::<f64>() / self.arms.len() as f64
    }

    pub fn mean_sigma(&self) -> f64 {
        self.arms.iter().map(ArParams::sigma).sum::<f64>() / self.arms.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("policy used before reset")]
    NotReset,
    #[error("policy needs at least one arm")]
    NoArms,
    #[error("round {got} out of order, expected {expected}")]
    RoundOrder { expected: usize, got: usize },
    #[error("observed arm {got} but arm {expected} was selected")]
    ArmMismatch { expected: usize, got: usize },
    #[error("observe called without a pending selection")]
    NothingPending,
    #[error("non-finite reward {0}")]
    NonFiniteReward(f64),
    #[error("round {0} is inside the initialization phase")]
    InitializationPhase(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Uniform round-by-round policy contract.
pub trait Policy: Send {
    fn name(&self) -> &'static str;

    /// Prepares for a fresh run. All randomness is drawn from streams keyed
    /// by `seed`.
    fn reset(&mut self, ctx: &PolicyContext, seed: u64) -> Result<(), PolicyError>;

    fn select_arm(&mut self, t: usize) -> Result<usize, PolicyError>;

    fn observe(&mut self, t: usize, arm: usize, reward: f64) -> Result<(), PolicyError>;
}

impl<P: Policy + ?Sized> Policy for alloc::boxed::Box<P> {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn reset(&mut self, ctx: &PolicyContext, seed: u64) -> Result<(), PolicyError> {
        (**self).reset(ctx, seed)
    }
    fn select_arm(&mut self, t: usize) -> Result<usize, PolicyError> {
        (**self).select_arm(t)
    }
    fn observe(&mut self, t: usize, arm: usize, reward: f64) -> Result<(), PolicyError> {
        (**self).observe(t, arm, reward)
    }
}

/// Tracks the select/observe handshake shared by every policy.
#[derive(Debug, Clone, Default)]
pub(crate) struct RoundGuard {
    next_round: usize,
    pending: Option<usize>,
}

impl RoundGuard {
    pub(crate) fn begin(&mut self, t: usize) -> Result<(), PolicyError> {
        if self.pending.is_some() || t != self.next_round {
            return Err(PolicyError::RoundOrder {
                expected: self.next_round,
                got: t,
            });
        }
        Ok(())
    }

    pub(crate) fn selected(&mut self, arm: usize) {
        self.pending = Some(arm);
    }

    pub(crate) fn finish(&mut self, t: usize, arm: usize, reward: f64) -> Result<(), PolicyError> {
        let expected = self.pending.ok_or(PolicyError::NothingPending)?;
        if t != self.next_round {
            return Err(PolicyError::RoundOrder {
                expected: self.next_round,
                got: t,
            });
        }
        if arm != expected {
            return Err(PolicyError::ArmMismatch { expected, got: arm });
        }
        if !reward.is_finite() {
            return Err(PolicyError::NonFiniteReward(reward));
        }
        self.pending = None;
        self.next_round += 1;
        Ok(())
    }
}

/// AR-aware reward estimates.
///
/// After observing `R_i(t)` for the pulled arm, `est_i(t+1) = reflect(alpha_i
/// R_i(t))`, which equals the true `r_i(t+1)`. Every other arm decays:
/// `est_j(t+1) = alpha_j est_j(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArEstimates {
    estimates: Vec<f64>,
    last_pull: Vec<Option<usize>>,
}

impl ArEstimates {
    pub fn new(arms: usize) -> Self {
        Self {
            estimates: alloc::vec![0.0; arms],
            last_pull: alloc::vec![None; arms],
        }
    }

    pub fn clear(&mut self) {
        self.estimates.iter_mut().for_each(|e| *e = 0.0);
        self.last_pull.iter_mut().for_each(|p| *p = None);
    }

    pub fn record(&mut self, params: &[ArParams], t: usize, arm: usize, reward: f64) {
        for (i, (est, p)) in self.estimates.iter_mut().zip(params).enumerate() {
            if i == arm {
                *est = fold(p.alpha() * reward, p.boundary());
            } else {
                *est *= p.alpha();
            }
        }
        self.last_pull[arm] = Some(t);
    }

    pub fn estimate(&self, arm: usize) -> f64 {
        self.estimates[arm]
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    pub fn last_pull(&self, arm: usize) -> Option<usize> {
        self.last_pull[arm]
    }

    /// Rounds since the last pull of `arm`, if it has been pulled.
    pub fn gap(&self, arm: usize, t: usize) -> Option<usize> {
        self.last_pull[arm].map(|tau| t - tau)
    }
}

/// Confidence width `scale * sigma * sqrt((alpha^2 - alpha^(2(g+1))) / (1 - alpha^2))`
/// for an arm last observed `gap` rounds ago.
///
/// This is the trigger width of AR2 and, evaluated at `gap - 1`, the
/// exploration bonus of mod-UCB. It is zero at `gap = 0`, equals
/// `scale * sigma * alpha` at `gap = 1` and approaches
/// `scale * sigma * alpha / sqrt(1 - alpha^2)`.
pub fn trigger_width(alpha: f64, sigma: f64, gap: usize, scale: f64) -> f64 {
    let a2 = alpha * alpha;
    let decay = libm::pow(a2, gap as f64);
    scale * sigma * alpha * libm::sqrt((1.0 - decay) / (1.0 - a2))
}

/// Index of the largest value, lowest index on ties.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

pub(crate) fn check_context(ctx: &PolicyContext) -> Result<(), PolicyError> {
    if ctx.arms.is_empty() {
        return Err(PolicyError::NoArms);
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::env::{generate_trajectory, InitialState, Trajectory};

    pub fn params(alpha: f64, sigma: f64) -> ArParams {
        ArParams::new(alpha, sigma, 1.0).unwrap()
    }

    pub fn trajectory(arms: &[ArParams], horizon: usize, seed: u64) -> Trajectory {
        generate_trajectory(arms, horizon, seed, &InitialState::Stationary).unwrap()
    }

    /// Drives `policy` over the trajectory and returns the pull sequence.
    pub fn drive<P: Policy + ?Sized>(policy: &mut P, tr: &Trajectory, seed: u64) -> Vec<usize> {
        let ctx = PolicyContext::new(tr.horizon(), tr.params().to_vec());
        policy.reset(&ctx, seed).unwrap();
        (0..tr.horizon())
            .map(|t| {
                let arm = policy.select_arm(t).unwrap();
                policy.observe(t, arm, tr.realized(arm, t)).unwrap();
                arm
            })
            .collect()
    }
}
