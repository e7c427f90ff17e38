//! Dynamic-regret accounting.
//!
//! Regret at round `t` is measured against the best expected reward of that
//! round, `r*(t) - r_{I_t}(t)`. The distributed-regret view spreads each
//! pull's regret geometrically over the rounds until the same arm is pulled
//! again.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `max_i r_i(t) - r_chosen(t)`.
pub fn instantaneous_regret(expected: &[f64], chosen: usize) -> Result<f64> {
    let r = *expected.get(chosen).ok_or(Error::Dimension {
        expected: expected.len(),
        got: chosen,
    })?;
    let best = expected.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(best - r)
}

/// Append-only record of one policy run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RegretLedger {
    chosen: Vec<usize>,
    oracle: Vec<f64>,
    regret: Vec<f64>,
    cumulative: f64,
    oracle_total: f64,
}

impl RegretLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(horizon: usize) -> Self {
        Self {
            chosen: Vec::with_capacity(horizon),
            oracle: Vec::with_capacity(horizon),
            regret: Vec::with_capacity(horizon),
            ..Self::default()
        }
    }

    /// Records a round from the per-arm expected rewards.
    pub fn record(&mut self, expected: &[f64], chosen: usize) -> Result<f64> {
        let reg = instantaneous_regret(expected, chosen)?;
        let best = expected[chosen] + reg;
        self.push(chosen, best, reg);
        Ok(reg)
    }

    /// Records a round from precomputed `r*(t)` and `r_chosen(t)`.
    pub fn record_values(&mut self, chosen: usize, oracle: f64, chosen_expected: f64) -> f64 {
        let reg = oracle - chosen_expected;
        self.push(chosen, oracle, reg);
        reg
    }

    fn push(&mut self, chosen: usize, oracle: f64, reg: f64) {
        self.chosen.push(chosen);
        self.oracle.push(oracle);
        self.regret.push(reg);
        self.cumulative += reg;
        self.oracle_total += oracle;
    }

    pub fn horizon(&self) -> usize {
        self.regret.len()
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn oracle_rewards(&self) -> &[f64] {
        &self.oracle
    }

    pub fn regrets(&self) -> &[f64] {
        &self.regret
    }

    pub fn total_regret(&self) -> f64 {
        self.cumulative
    }

    pub fn total_oracle_reward(&self) -> f64 {
        self.oracle_total
    }

    /// Finite-horizon estimate of the per-round steady-state regret.
    pub fn per_round_average(&self) -> f64 {
        if self.regret.is_empty() {
            return 0.0;
        }
        self.cumulative / self.regret.len() as f64
    }

    /// Total regret over the total reward of the round-by-round optimal
    /// policy. Can exceed 1 because rewards can be negative.
    pub fn normalized_regret(&self) -> f64 {
        self.cumulative / self.oracle_total
    }

    /// True when `sum r*(t) <= threshold * T * mean_sigma`; such ledgers
    /// yield unstable normalized regret and are excluded from aggregation.
    pub fn is_degenerate(&self, threshold: f64, mean_sigma: f64) -> bool {
        self.oracle_total <= threshold * self.horizon() as f64 * mean_sigma
    }
}

/// Pull times of every arm, for distributed-regret queries.
#[derive(Debug, Clone, PartialEq)]
pub struct PullIndex {
    per_arm: Vec<Vec<usize>>,
}

impl PullIndex {
    pub fn new(ledger: &RegretLedger, arms: usize) -> Self {
        let mut per_arm = alloc::vec![Vec::new(); arms];
        for (t, &a) in ledger.chosen().iter().enumerate() {
            per_arm[a].push(t);
        }
        Self { per_arm }
    }

    pub fn pulls(&self, arm: usize) -> &[usize] {
        &self.per_arm[arm]
    }

    /// `(tau_i(t), next pull after t)` if both exist.
    pub fn window(&self, arm: usize, t: usize) -> Option<(usize, usize)> {
        let pulls = &self.per_arm[arm];
        let idx = pulls.partition_point(|&p| p <= t);
        if idx == 0 || idx == pulls.len() {
            return None;
        }
        Some((pulls[idx - 1], pulls[idx]))
    }
}

/// `1 + a^2 + ... + a^(2(n-1))`.
fn geometric_mass(alpha: f64, n: usize) -> f64 {
    let a2 = alpha * alpha;
    let mut term = 1.0;
    let mut total = 0.0;
    for _ in 0..n {
        total += term;
        term *= a2;
    }
    total
}

/// `D_i(t) = dr_i(tau) alpha^(2(t - tau)) / (1 + alpha^2 + ... + alpha^(2(dtau - 1)))`
/// where `tau` is the last pull of `arm` at or before `t` and `dtau` the gap
/// to its next pull. `None` when either pull is missing.
pub fn distributed_regret(
    ledger: &RegretLedger,
    index: &PullIndex,
    alpha: f64,
    arm: usize,
    t: usize,
) -> Option<f64> {
    let (tau, next) = index.window(arm, t)?;
    let dr = ledger.regrets()[tau];
    let mass = geometric_mass(alpha, next - tau);
    Some(dr * libm::pow(alpha * alpha, (t - tau) as f64) / mass)
}

/// One between-pull window of an arm with its distributed regrets.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretWindow {
    pub arm: usize,
    pub start: usize,
    pub next: usize,
    pub regret: f64,
    pub distributed: Vec<f64>,
}

/// Every complete window of `arm`.
pub fn regret_windows(
    ledger: &RegretLedger,
    index: &PullIndex,
    alpha: f64,
    arm: usize,
) -> Vec<RegretWindow> {
    index
        .pulls(arm)
        .windows(2)
        .map(|w| {
            let (start, next) = (w[0], w[1]);
            let distributed = (start..next)
                .map(|t| distributed_regret(ledger, index, alpha, arm, t).expect("inside window"))
                .collect();
            RegretWindow {
                arm,
                start,
                next,
                regret: ledger.regrets()[start],
                distributed,
            }
        })
        .collect()
}

/// Total regret split into the distributed part (complete windows) and the
/// boundary part (each arm's final pull, which has no next pull).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretDecomposition {
    pub distributed: f64,
    pub boundary: f64,
}

impl RegretDecomposition {
    pub fn total(&self) -> f64 {
        self.distributed + self.boundary
    }
}

pub fn decompose(ledger: &RegretLedger, alphas: &[f64]) -> RegretDecomposition {
    let index = PullIndex::new(ledger, alphas.len());
    let mut distributed = 0.0;
    let mut boundary = 0.0;
    for (arm, &alpha) in alphas.iter().enumerate() {
        for w in regret_windows(ledger, &index, alpha, arm) {
            distributed += w.distributed.iter().sum::<f64>();
        }
        if let Some(&last) = index.pulls(arm).last() {
            boundary += ledger.regrets()[last];
        }
    }
    RegretDecomposition {
        distributed,
        boundary,
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for a single value.
    pub std: f64,
}

/// Single-pass Welford summary.
pub fn summarize(values: &[f64]) -> Summary {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (n, &x) in values.iter().enumerate() {
        let d = x - mean;
        mean += d / (n + 1) as f64;
        m2 += d * (x - mean);
    }
    let count = values.len();
    let std = if count > 1 {
        libm::sqrt(m2 / (count - 1) as f64)
    } else {
        0.0
    };
    Summary {
        count,
        mean: if count == 0 { f64::NAN } else { mean },
        std,
    }
}

/// Linear-interpolation quantile (the "type 7" definition) of unsorted data.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}
