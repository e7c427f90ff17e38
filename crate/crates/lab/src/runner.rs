//! Running policies on shared trajectories and aggregating the results.

use arbandit::env::Trajectory;
use arbandit::metrics::{summarize, RegretLedger};
use arbandit::policies::{
    Ar2, EpsilonGreedy, ExploreThenCommit, ModUcb, Naive, Policy, PolicyContext, PolicyError,
    Rexp3, Ucb1,
};
use arbandit::seed::{self, domain};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, PolicySetting};
use crate::error::{LabError, Result};
use crate::instance::{build_instance, cell_seed, InstanceSpec};

/// Pulls the best arm of every round by reading the trajectory. Only useful
/// as a reference and for testing the plumbing.
pub struct Oracle<'a> {
    trajectory: &'a Trajectory,
    next: usize,
}

impl<'a> Oracle<'a> {
    pub fn new(trajectory: &'a Trajectory) -> Self {
        Self {
            trajectory,
            next: 0,
        }
    }
}

impl Policy for Oracle<'_> {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn reset(&mut self, _ctx: &PolicyContext, _seed: u64) -> std::result::Result<(), PolicyError> {
        self.next = 0;
        Ok(())
    }

    fn select_arm(&mut self, t: usize) -> std::result::Result<usize, PolicyError> {
        if t != self.next {
            return Err(PolicyError::RoundOrder {
                expected: self.next,
                got: t,
            });
        }
        Ok(self.trajectory.best_arm(t))
    }

    fn observe(
        &mut self,
        t: usize,
        _arm: usize,
        _reward: f64,
    ) -> std::result::Result<(), PolicyError> {
        self.next = t + 1;
        Ok(())
    }
}

/// Instantiates a policy. The oracle borrows the trajectory it will run on.
pub fn build_policy<'a>(
    setting: &PolicySetting,
    trajectory: &'a Trajectory,
) -> std::result::Result<Box<dyn Policy + 'a>, PolicyError> {
    Ok(match setting {
        PolicySetting::Ar2(c) => Box::new(Ar2::new(c.clone())),
        PolicySetting::Naive => Box::new(Naive::new()),
        PolicySetting::Etc { m } => Box::new(ExploreThenCommit::new(*m)?),
        PolicySetting::EpsGreedy { epsilon } => Box::new(EpsilonGreedy::new(*epsilon)?),
        PolicySetting::Ucb1 => Box::new(Ucb1::new()),
        PolicySetting::Rexp3 { variation_budget } => Box::new(Rexp3::new(*variation_budget)?),
        PolicySetting::ModUcb { delta } => Box::new(ModUcb::new(*delta)?),
        PolicySetting::Oracle => Box::new(Oracle::new(trajectory)),
    })
}

/// Drives `policy` over the whole trajectory. The policy only sees `ctx`
/// and the realized rewards of the arms it pulls.
pub fn run_single<P: Policy + ?Sized>(
    trajectory: &Trajectory,
    ctx: &PolicyContext,
    policy: &mut P,
    seed: u64,
) -> std::result::Result<RegretLedger, PolicyError> {
    let horizon = trajectory.horizon();
    let mut ledger = RegretLedger::with_capacity(horizon);
    policy.reset(ctx, seed)?;
    for t in 0..horizon {
        let arm = policy.select_arm(t)?;
        if arm >= trajectory.arm_count() {
            return Err(PolicyError::ArmMismatch {
                expected: trajectory.arm_count() - 1,
                got: arm,
            });
        }
        policy.observe(t, arm, trajectory.realized(arm, t))?;
        ledger.record_values(arm, trajectory.optimal(t), trajectory.expected(arm, t));
    }
    Ok(ledger)
}

/// Seed of a policy's private stream on one instance, keyed by its label so
/// that roster changes never shift another policy's draws.
pub fn policy_seed(instance: &InstanceSpec, label: &str) -> u64 {
    seed::derive(instance.seed, &[domain::POLICY, seed::label_key(label)])
}

/// One grid point of one rostered policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub policy: String,
    pub setting: PolicySetting,
}

/// Outcome of one (instance, candidate) run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub total_regret: f64,
    pub total_oracle_reward: f64,
    pub normalized_regret: f64,
}

impl RunStats {
    fn of(ledger: &RegretLedger) -> Self {
        Self {
            total_regret: ledger.total_regret(),
            total_oracle_reward: ledger.total_oracle_reward(),
            normalized_regret: ledger.normalized_regret(),
        }
    }
}

/// Aggregated normalized regret of one policy in one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub regime: String,
    pub k: usize,
    pub alpha_noise_pct: f64,
    pub policy: String,
    pub mean_normalized_regret: f64,
    pub std_normalized_regret: f64,
    pub instances_used: usize,
    pub instances_excluded: usize,
}

/// The grid point kept for a policy in a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunedChoice {
    pub regime: String,
    pub k: usize,
    pub alpha_noise_pct: f64,
    pub policy: String,
    pub setting: PolicySetting,
    pub candidates: usize,
}

/// Per-instance normalized regret of a tuned policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub regime: String,
    pub k: usize,
    pub alpha_noise_pct: f64,
    pub instance: usize,
    pub policy: String,
    pub normalized_regret: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellOutcome {
    pub seed: u64,
    pub rows: Vec<ResultRow>,
    pub tuned: Vec<TunedChoice>,
    pub instances: Vec<InstanceRecord>,
}

impl CellOutcome {
    pub fn row(&self, policy: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.policy == policy)
    }
}

/// Every grid point of the roster, grouped by policy in roster order.
pub fn candidates(cfg: &ExperimentConfig) -> Vec<Vec<Candidate>> {
    cfg.policies
        .iter()
        .map(|spec| {
            let policy = spec.label();
            spec.settings(cfg)
                .into_iter()
                .map(|setting| Candidate {
                    policy: policy.clone(),
                    setting,
                })
                .collect()
        })
        .collect()
}

/// Runs every candidate on one instance's trajectory.
fn run_instance(
    cfg: &ExperimentConfig,
    spec: &InstanceSpec,
    roster: &[Vec<Candidate>],
) -> Result<(bool, Vec<Vec<RunStats>>)> {
    let trajectory = spec.trajectory(cfg.horizon)?;
    let ctx = PolicyContext::new(cfg.horizon, spec.policy_arms.clone());
    let mut stats = Vec::with_capacity(roster.len());
    let mut degenerate = false;
    for group in roster {
        let mut row = Vec::with_capacity(group.len());
        for cand in group {
            let fail = |source| LabError::Policy {
                policy: cand.policy.clone(),
                instance: spec.index,
                source,
            };
            let mut policy = build_policy(&cand.setting, &trajectory).map_err(fail)?;
            let ledger = run_single(
                &trajectory,
                &ctx,
                &mut policy,
                policy_seed(spec, &cand.policy),
            )
            .map_err(fail)?;
            degenerate = ledger.is_degenerate(cfg.degenerate_threshold, spec.mean_sigma());
            row.push(RunStats::of(&ledger));
        }
        stats.push(row);
    }
    Ok((degenerate, stats))
}

/// Runs one cell: every candidate of every rostered policy on every
/// instance, then keeps per policy the candidate with the lowest mean
/// normalized regret over the non-degenerate instances (first on ties).
///
/// Work is spread over the current rayon pool; the result does not depend on
/// the number of threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<CellOutcome> {
    cfg.validate()?;
    let cell = cell_seed(cfg.master_seed, cfg.alpha_law.target_mean, cfg.k);
    let roster = candidates(cfg);
    let specs = (0..cfg.instance_count)
        .map(|i| build_instance(cfg, cell, i))
        .collect::<Result<Vec<_>>>()?;
    let per_instance = specs
        .par_iter()
        .map(|spec| run_instance(cfg, spec, &roster))
        .collect::<Result<Vec<_>>>()?;

    let regime = cfg.regime();
    let used: Vec<usize> = (0..specs.len()).filter(|&i| !per_instance[i].0).collect();
    let excluded = specs.len() - used.len();
    let mut rows = Vec::new();
    let mut tuned = Vec::new();
    let mut instances = Vec::new();
    for (p, group) in roster.iter().enumerate() {
        let scores: Vec<Vec<f64>> = (0..group.len())
            .map(|c| {
                used.iter()
                    .map(|&i| per_instance[i].1[p][c].normalized_regret)
                    .collect()
            })
            .collect();
        let mut best = 0;
        let mut best_mean = f64::INFINITY;
        for (c, s) in scores.iter().enumerate() {
            let mean = summarize(s).mean;
            if mean < best_mean {
                best = c;
                best_mean = mean;
            }
        }
        let summary = summarize(&scores[best]);
        let label = &group[best].policy;
        rows.push(ResultRow {
            regime: regime.clone(),
            k: cfg.k,
            alpha_noise_pct: cfg.alpha_noise_pct,
            policy: label.clone(),
            mean_normalized_regret: summary.mean,
            std_normalized_regret: summary.std,
            instances_used: used.len(),
            instances_excluded: excluded,
        });
        tuned.push(TunedChoice {
            regime: regime.clone(),
            k: cfg.k,
            alpha_noise_pct: cfg.alpha_noise_pct,
            policy: label.clone(),
            setting: group[best].setting.clone(),
            candidates: group.len(),
        });
        for (i, (degenerate, stats)) in per_instance.iter().enumerate() {
            instances.push(InstanceRecord {
                regime: regime.clone(),
                k: cfg.k,
                alpha_noise_pct: cfg.alpha_noise_pct,
                instance: i,
                policy: label.clone(),
                normalized_regret: stats[p][best].normalized_regret,
                degenerate: *degenerate,
            });
        }
    }
    Ok(CellOutcome {
        seed: cell,
        rows,
        tuned,
        instances,
    })
}

/// Re-runs a tuned choice on one instance and returns its ledger.
pub fn tuned_ledger(
    cfg: &ExperimentConfig,
    choice: &TunedChoice,
    index: usize,
) -> Result<RegretLedger> {
    let cell = cell_seed(cfg.master_seed, cfg.alpha_law.target_mean, cfg.k);
    let spec = build_instance(cfg, cell, index)?;
    let trajectory = spec.trajectory(cfg.horizon)?;
    let ctx = PolicyContext::new(cfg.horizon, spec.policy_arms.clone());
    let fail = |source| LabError::Policy {
        policy: choice.policy.clone(),
        instance: index,
        source,
    };
    let mut policy = build_policy(&choice.setting, &trajectory).map_err(fail)?;
    run_single(
        &trajectory,
        &ctx,
        &mut policy,
        policy_seed(&spec, &choice.policy),
    )
    .map_err(fail)
}
