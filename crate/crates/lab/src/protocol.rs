//! The canonical benchmark protocol: 100 instances of T = 10 000 rounds per
//! cell, arm counts 2, 4, 6, alpha regimes 0.4 and 0.9, and a tuning grid for
//! every policy.

use arbandit::policies::{ExploreRule, SuperiorRule, TriggerMembership};

use crate::config::{AlphaLaw, ExperimentConfig, PolicySpec, SigmaKnowledge, SigmaLaw};

pub const REGIMES: [f64; 2] = [0.4, 0.9];
pub const ARM_COUNTS: [usize; 3] = [2, 4, 6];
pub const HORIZON: usize = 10_000;
pub const INSTANCES: usize = 100;
pub const NOISE_LEVELS: [f64; 3] = [0.0, 10.0, 20.0];

/// AR2 with all-arm superior selection and highest-UCB exploration, tuned
/// over `c1` and the triggered-set membership rule.
pub fn ar2_spec() -> PolicySpec {
    PolicySpec::Ar2 {
        label: None,
        epoch_len: Vec::new(),
        c0: None,
        c1: vec![0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.5],
        superior: vec![SuperiorRule::AllArms],
        explore: vec![ExploreRule::HighestUcb],
        membership: vec![TriggerMembership::Sticky, TriggerMembership::Refresh],
    }
}

pub fn eps_greedy_spec() -> PolicySpec {
    PolicySpec::EpsGreedy {
        label: None,
        epsilon: vec![0.01, 0.05, 0.1, 0.2],
    }
}

pub fn mod_ucb_spec() -> PolicySpec {
    PolicySpec::ModUcb {
        label: None,
        delta: vec![0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99],
    }
}

/// All seven policies, in table column order.
pub fn full_roster(horizon: usize) -> Vec<PolicySpec> {
    let t = horizon as f64;
    vec![
        ar2_spec(),
        PolicySpec::Naive { label: None },
        PolicySpec::Etc {
            label: None,
            m: vec![5, 10, 25, 50, 100],
        },
        eps_greedy_spec(),
        PolicySpec::Ucb1 { label: None },
        PolicySpec::Rexp3 {
            label: None,
            variation_budget: [0.01, 0.03, 0.1, 0.3, 1.0].iter().map(|f| f * t).collect(),
        },
        mod_ucb_spec(),
    ]
}

/// The AR-aware policies compared under noisy alphas.
pub fn robustness_roster() -> Vec<PolicySpec> {
    vec![ar2_spec(), eps_greedy_spec(), mod_ucb_spec()]
}

/// One canonical cell.
pub fn cell_config(
    target_mean: f64,
    k: usize,
    roster: Vec<PolicySpec>,
    master_seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        k,
        horizon: HORIZON,
        instance_count: INSTANCES,
        alpha_law: AlphaLaw::new(target_mean),
        sigma_law: SigmaLaw::default(),
        boundary: 1.0,
        policies: roster,
        alpha_noise_pct: 0.0,
        sigma_knowledge: SigmaKnowledge::Exact,
        master_seed,
        output_dir: None,
        degenerate_threshold: 0.01,
        export: Default::default(),
    }
}

/// Table cells for the given regimes, in row order.
pub fn table1_configs(regimes: &[f64], master_seed: u64) -> Vec<ExperimentConfig> {
    regimes
        .iter()
        .flat_map(|&m| {
            ARM_COUNTS
                .iter()
                .map(move |&k| cell_config(m, k, full_roster(HORIZON), master_seed))
        })
        .collect()
}

/// One cell per noise level.
pub fn robustness_configs(
    target_mean: f64,
    k: usize,
    noise_levels: &[f64],
    master_seed: u64,
) -> Vec<ExperimentConfig> {
    noise_levels
        .iter()
        .map(|&p| ExperimentConfig {
            alpha_noise_pct: p,
            ..cell_config(target_mean, k, robustness_roster(), master_seed)
        })
        .collect()
}
