//! Experiment configuration (JSON).
//!
//! A config describes one cell: an arm count, an instance law and a roster of
//! policies. Every hyperparameter of a rostered policy is a list; the harness
//! runs the full grid and keeps the setting with the lowest mean normalized
//! regret for the cell.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use arbandit::policies::{Ar2Config, ExploreRule, SuperiorRule, TriggerMembership};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub k: usize,
    pub horizon: usize,
    pub instance_count: usize,
    pub alpha_law: AlphaLaw,
    #[serde(default)]
    pub sigma_law: SigmaLaw,
    #[serde(default = "unit")]
    pub boundary: f64,
    pub policies: Vec<PolicySpec>,
    /// Standard deviation of the noise added to the alphas handed to the
    /// policies, in percent of the target mean.
    #[serde(default)]
    pub alpha_noise_pct: f64,
    #[serde(default)]
    pub sigma_knowledge: SigmaKnowledge,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Instances with total oracle reward at most `threshold * T * mean(sigma)`
    /// are excluded from aggregation.
    #[serde(default = "default_threshold")]
    pub degenerate_threshold: f64,
    #[serde(default)]
    pub export: ExportOptions,
}

fn unit() -> f64 {
    1.0
}

fn default_threshold() -> f64 {
    0.01
}

/// `alpha_i = clip(d_i * k * target_mean)` with `d ~ Dirichlet(concentration)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaLaw {
    pub target_mean: f64,
    #[serde(default = "default_concentration")]
    pub concentration: f64,
    #[serde(default = "default_clip")]
    pub clip: [f64; 2],
}

fn default_concentration() -> f64 {
    5.0
}

fn default_clip() -> [f64; 2] {
    [0.02, 0.995]
}

impl AlphaLaw {
    pub fn new(target_mean: f64) -> Self {
        Self {
            target_mean,
            concentration: default_concentration(),
            clip: default_clip(),
        }
    }

    pub fn clamp(&self, alpha: f64) -> f64 {
        alpha.clamp(self.clip[0], self.clip[1])
    }
}

/// `sigma_i ~ Uniform(low, high)`, never equal to `low`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaLaw {
    pub low: f64,
    pub high: f64,
}

impl Default for SigmaLaw {
    fn default() -> Self {
        Self {
            low: 0.0,
            high: 0.5,
        }
    }
}

impl SigmaLaw {
    pub fn mean(&self) -> f64 {
        0.5 * (self.low + self.high)
    }
}

/// What the policies are told about the noise levels.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaKnowledge {
    #[default]
    Exact,
    /// Every arm is reported with this common upper bound.
    UpperBound(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportOptions {
    #[serde(default)]
    pub trajectories: bool,
    #[serde(default)]
    pub ledgers: bool,
}

/// One roster entry. Empty grids fall back to the defaults listed per field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Ar2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        /// Default `ceil(k / (alpha sigma)^3)` at the mean alpha and sigma.
        #[serde(default)]
        epoch_len: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c0: Option<f64>,
        /// Default `24 c0`.
        #[serde(default)]
        c1: Vec<f64>,
        /// Default `recent(2)`.
        #[serde(default)]
        superior: Vec<SuperiorRule>,
        /// Default `earliest_trigger`.
        #[serde(default)]
        explore: Vec<ExploreRule>,
        /// Default `sticky`.
        #[serde(default)]
        membership: Vec<TriggerMembership>,
    },
    Naive {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Etc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        /// Default 25.
        #[serde(default)]
        m: Vec<usize>,
    },
    EpsGreedy {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        /// Default 0.1.
        #[serde(default)]
        epsilon: Vec<f64>,
    },
    Ucb1 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Rexp3 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        /// Default `T * target_mean * mean(sigma)`.
        #[serde(default)]
        variation_budget: Vec<f64>,
    },
    ModUcb {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        /// Default 0.1.
        #[serde(default)]
        delta: Vec<f64>,
    },
    /// Omniscient reference that always pulls the best arm.
    Oracle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

/// A fully specified policy, one point of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySetting {
    Ar2(Ar2Config),
    Naive,
    Etc { m: usize },
    EpsGreedy { epsilon: f64 },
    Ucb1,
    Rexp3 { variation_budget: f64 },
    ModUcb { delta: f64 },
    Oracle,
}

impl PolicySetting {
    /// Short human-readable description of the hyperparameters.
    pub fn describe(&self) -> String {
        match self {
            PolicySetting::Ar2(c) => {
                let mut s = String::new();
                match c.superior {
                    SuperiorRule::Recent(m) => write!(s, "superior=recent({m})"),
                    SuperiorRule::AllArms => write!(s, "superior=all_arms"),
                }
                .unwrap();
                match c.explore {
                    ExploreRule::EarliestTrigger => s.push_str(" explore=earliest_trigger"),
                    ExploreRule::HighestUcb => s.push_str(" explore=highest_ucb"),
                }
                match c.membership {
                    TriggerMembership::Sticky => s.push_str(" membership=sticky"),
                    TriggerMembership::Refresh => s.push_str(" membership=refresh"),
                }
                if let Some(e) = c.epoch_len {
                    write!(s, " epoch_len={e}").unwrap();
                }
                if let Some(c0) = c.c0 {
                    write!(s, " c0={c0}").unwrap();
                }
                if let Some(c1) = c.c1 {
                    write!(s, " c1={c1}").unwrap();
                }
                s
            }
            PolicySetting::Naive | PolicySetting::Ucb1 | PolicySetting::Oracle => String::new(),
            PolicySetting::Etc { m } => format!("m={m}"),
            PolicySetting::EpsGreedy { epsilon } => format!("epsilon={epsilon}"),
            PolicySetting::Rexp3 { variation_budget } => {
                format!("variation_budget={variation_budget}")
            }
            PolicySetting::ModUcb { delta } => format!("delta={delta}"),
        }
    }
}

fn or_default<T: Clone>(grid: &[T], default: T) -> Vec<T> {
    if grid.is_empty() {
        vec![default]
    } else {
        grid.to_vec()
    }
}

impl PolicySpec {
    pub fn label(&self) -> String {
        let (label, default) = match self {
            PolicySpec::Ar2 { label, .. } => (label, "AR2"),
            PolicySpec::Naive { label } => (label, "naive"),
            PolicySpec::Etc { label, .. } => (label, "ETC"),
            PolicySpec::EpsGreedy { label, .. } => (label, "eps-greedy"),
            PolicySpec::Ucb1 { label } => (label, "UCB"),
            PolicySpec::Rexp3 { label, .. } => (label, "Rexp3"),
            PolicySpec::ModUcb { label, .. } => (label, "mod-UCB"),
            PolicySpec::Oracle { label } => (label, "oracle"),
        };
        label.clone().unwrap_or_else(|| default.to_string())
    }

    /// Expands the grid into concrete settings, in a fixed order.
    pub fn settings(&self, cfg: &ExperimentConfig) -> Vec<PolicySetting> {
        match self {
            PolicySpec::Ar2 {
                epoch_len,
                c0,
                c1,
                superior,
                explore,
                membership,
                ..
            } => {
                let epochs: Vec<Option<usize>> = if epoch_len.is_empty() {
                    vec![None]
                } else {
                    epoch_len.iter().copied().map(Some).collect()
                };
                let c1s: Vec<Option<f64>> = if c1.is_empty() {
                    vec![None]
                } else {
                    c1.iter().copied().map(Some).collect()
                };
                let mut out = Vec::new();
                for &sup in &or_default(superior, SuperiorRule::Recent(2)) {
                    for &exp in &or_default(explore, ExploreRule::EarliestTrigger) {
                        for &mem in &or_default(membership, TriggerMembership::Sticky) {
                            for &e in &epochs {
                                for &c in &c1s {
                                    out.push(PolicySetting::Ar2(Ar2Config {
                                        epoch_len: e,
                                        c0: *c0,
                                        c1: c,
                                        superior: sup,
                                        explore: exp,
                                        membership: mem,
                                    }));
                                }
                            }
                        }
                    }
                }
                out
            }
            PolicySpec::Naive { .. } => vec![PolicySetting::Naive],
            PolicySpec::Etc { m, .. } => or_default(m, 25)
                .into_iter()
                .map(|m| PolicySetting::Etc { m })
                .collect(),
            PolicySpec::EpsGreedy { epsilon, .. } => or_default(epsilon, 0.1)
                .into_iter()
                .map(|epsilon| PolicySetting::EpsGreedy { epsilon })
                .collect(),
            PolicySpec::Ucb1 { .. } => vec![PolicySetting::Ucb1],
            PolicySpec::Rexp3 {
                variation_budget, ..
            } => {
                let default = cfg.horizon as f64 * cfg.alpha_law.target_mean * cfg.sigma_law.mean();
                or_default(variation_budget, default)
                    .into_iter()
                    .map(|variation_budget| PolicySetting::Rexp3 { variation_budget })
                    .collect()
            }
            PolicySpec::ModUcb { delta, .. } => or_default(delta, 0.1)
                .into_iter()
                .map(|delta| PolicySetting::ModUcb { delta })
                .collect(),
            PolicySpec::Oracle { .. } => vec![PolicySetting::Oracle],
        }
    }

    fn validate(&self, cfg: &ExperimentConfig) -> Result<()> {
        let label = self.label();
        let bad = |what: String| Err(LabError::config(format!("policy {label}: {what}")));
        match self {
            PolicySpec::Ar2 {
                epoch_len,
                c0,
                c1,
                superior,
                ..
            } => {
                if let Some(&e) = epoch_len.iter().find(|&&e| e < cfg.k + 1) {
                    return bad(format!("epoch_len {e} must be at least k + 1"));
                }
                if let Some(c) = c0.filter(|c| !(*c > 0.0 && c.is_finite())) {
                    return bad(format!("c0 {c} must be positive"));
                }
                if let Some(c) = c1.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
                    return bad(format!("c1 {c} must be positive"));
                }
                if superior
                    .iter()
                    .any(|s| matches!(s, SuperiorRule::Recent(m) if *m < 2))
                {
                    return bad("superior window must be at least 2".into());
                }
            }
            PolicySpec::Etc { m, .. } => {
                if m.contains(&0) {
                    return bad("m must be at least 1".into());
                }
            }
            PolicySpec::EpsGreedy { epsilon, .. } => {
                if let Some(e) = epsilon.iter().find(|e| !(0.0..=1.0).contains(*e)) {
                    return bad(format!("epsilon {e} must lie in [0, 1]"));
                }
            }
            PolicySpec::Rexp3 {
                variation_budget, ..
            } => {
                if let Some(v) = variation_budget
                    .iter()
                    .find(|v| !(**v > 0.0 && v.is_finite()))
                {
                    return bad(format!("variation_budget {v} must be positive"));
                }
            }
            PolicySpec::ModUcb { delta, .. } => {
                if let Some(d) = delta.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
                    return bad(format!("delta {d} must lie in (0, 1)"));
                }
            }
            PolicySpec::Naive { .. } | PolicySpec::Ucb1 { .. } | PolicySpec::Oracle { .. } => {}
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| LabError::config(format!("invalid experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Label for the alpha regime, e.g. `0.9`.
    pub fn regime(&self) -> String {
        format!("{}", self.alpha_law.target_mean)
    }

    pub fn labels(&self) -> Vec<String> {
        self.policies.iter().map(PolicySpec::label).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(LabError::config(m));
        if self.k == 0 {
            return err("k must be at least 1".into());
        }
        if self.horizon < self.k + 1 {
            return err(format!("horizon {} must be at least k + 1", self.horizon));
        }
        if self.instance_count == 0 {
            return err("instance_count must be at least 1".into());
        }
        let a = &self.alpha_law;
        let [lo, hi] = a.clip;
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return err(format!(
                "alpha clip interval [{lo}, {hi}] must lie inside (0, 1)"
            ));
        }
        if !(a.target_mean > 0.0 && a.target_mean < 1.0) {
            return err(format!(
                "alpha target_mean {} must lie in (0, 1)",
                a.target_mean
            ));
        }
        if !(a.concentration > 0.0 && a.concentration.is_finite()) {
            return err(format!(
                "dirichlet concentration {} must be positive",
                a.concentration
            ));
        }
        let s = &self.sigma_law;
        if !(s.low >= 0.0 && s.low < s.high && s.high < 1.0) {
            return err(format!(
                "sigma interval ({}, {}) must satisfy 0 <= low < high < 1",
                s.low, s.high
            ));
        }
        if let SigmaKnowledge::UpperBound(b) = self.sigma_knowledge {
            if !(b >= s.high && b < 1.0) {
                return err(format!("sigma upper bound {b} must lie in [sigma high, 1)"));
            }
        }
        if !(self.boundary > 0.0 && self.boundary.is_finite()) {
            return err(format!("boundary {} must be positive", self.boundary));
        }
        if !(self.alpha_noise_pct >= 0.0 && self.alpha_noise_pct.is_finite()) {
            return err(format!(
                "alpha_noise_pct {} must be non-negative",
                self.alpha_noise_pct
            ));
        }
        if !(self.degenerate_threshold >= 0.0 && self.degenerate_threshold.is_finite()) {
            return err("degenerate_threshold must be non-negative".into());
        }
        if self.policies.is_empty() {
            return err("policy roster is empty".into());
        }
        let mut seen = BTreeSet::new();
        for p in &self.policies {
            if !seen.insert(p.label()) {
                return err(format!("duplicate policy label {}", p.label()));
            }
            p.validate(self)?;
        }
        Ok(())
    }
}
