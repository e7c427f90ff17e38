//! Random problem instances.

use arbandit::env::{generate_trajectory, InitialState, Trajectory};
use arbandit::seed::{self, domain};
use arbandit::ArParams;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::config::{AlphaLaw, ExperimentConfig, SigmaKnowledge};
use crate::error::{LabError, Result};

/// True arm parameters and the version handed to the policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub index: usize,
    pub seed: u64,
    pub arms: Vec<ArParams>,
    pub policy_arms: Vec<ArParams>,
    pub boundary: f64,
}

impl InstanceSpec {
    pub fn mean_sigma(&self) -> f64 {
        self.arms.iter().map(ArParams::sigma).sum::<f64>() / self.arms.len() as f64
    }

    /// The shared, policy-independent realization of this instance.
    pub fn trajectory(&self, horizon: usize) -> Result<Trajectory> {
        Ok(generate_trajectory(
            &self.arms,
            horizon,
            seed::derive(self.seed, &[domain::NOISE]),
            &InitialState::Stationary,
        )?)
    }
}

/// Seed of the cell `(target_mean, k)` under `master`.
pub fn cell_seed(master: u64, target_mean: f64, k: usize) -> u64 {
    let regime = (target_mean * 1e6).round() as u64;
    seed::derive(master, &[domain::CELL, regime, k as u64])
}

/// Seed of instance `index` within a cell.
pub fn instance_seed(cell: u64, index: usize) -> u64 {
    seed::derive(cell, &[domain::INSTANCE, index as u64])
}

/// Normalized Gamma draws, i.e. one `Dirichlet(c, ..., c)` sample.
pub fn dirichlet<R: Rng + ?Sized>(k: usize, concentration: f64, rng: &mut R) -> Result<Vec<f64>> {
    let gamma = Gamma::new(concentration, 1.0)
        .map_err(|e| LabError::config(format!("dirichlet concentration: {e}")))?;
    let mut d: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
    let total: f64 = d.iter().sum();
    d.iter_mut().for_each(|x| *x /= total);
    Ok(d)
}

/// Draws instance `index` of the cell seeded by `cell`.
///
/// `alpha_i = clip(d_i * k * E[alpha])` with `d ~ Dirichlet`, and
/// `sigma_i ~ Uniform(low, high]`. The policies see the true parameters,
/// with sigma replaced by the configured upper bound if any.
pub fn gen_instance(cfg: &ExperimentConfig, cell: u64, index: usize) -> Result<InstanceSpec> {
    let seed = instance_seed(cell, index);
    let mut rng = seed::substream(seed, &[domain::INSTANCE]);
    let law = &cfg.alpha_law;
    let d = dirichlet(cfg.k, law.concentration, &mut rng)?;
    let scale = cfg.k as f64 * law.target_mean;
    let mut arms = Vec::with_capacity(cfg.k);
    for di in d {
        let u: f64 = rng.random();
        let sigma = cfg.sigma_law.low + (cfg.sigma_law.high - cfg.sigma_law.low) * (1.0 - u);
        arms.push(ArParams::new(law.clamp(di * scale), sigma, cfg.boundary)?);
    }
    let policy_arms = match cfg.sigma_knowledge {
        SigmaKnowledge::Exact => arms.clone(),
        SigmaKnowledge::UpperBound(b) => arms
            .iter()
            .map(|a| a.with_sigma(b))
            .collect::<arbandit::Result<_>>()?,
    };
    Ok(InstanceSpec {
        index,
        seed,
        arms,
        policy_arms,
        boundary: cfg.boundary,
    })
}

/// Replaces the policy-side alphas by `clip(alpha_i + N(0, (p / 100) E[alpha]))`.
/// `p = 0` leaves the spec untouched and draws nothing.
pub fn perturb_alphas<R: Rng + ?Sized>(
    spec: &mut InstanceSpec,
    law: &AlphaLaw,
    pct: f64,
    rng: &mut R,
) -> Result<()> {
    if pct == 0.0 {
        return Ok(());
    }
    let noise = Normal::new(0.0, pct / 100.0 * law.target_mean)
        .map_err(|e| LabError::config(format!("alpha noise: {e}")))?;
    for (shown, truth) in spec.policy_arms.iter_mut().zip(&spec.arms) {
        let alpha = law.clamp(truth.alpha() + noise.sample(rng));
        *shown = shown.with_alpha(alpha)?;
    }
    Ok(())
}

/// [`gen_instance`] followed by the configured alpha perturbation, drawn from
/// the instance's own perturbation stream.
pub fn build_instance(cfg: &ExperimentConfig, cell: u64, index: usize) -> Result<InstanceSpec> {
    let mut spec = gen_instance(cfg, cell, index)?;
    let mut rng = seed::substream(spec.seed, &[domain::PERTURB]);
    perturb_alphas(&mut spec, &cfg.alpha_law, cfg.alpha_noise_pct, &mut rng)?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    fn cfg(k: usize, mean: f64) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{"k": {k}, "horizon": 100, "instance_count": 1,
                "alpha_law": {{"target_mean": {mean}}},
                "policies": [{{"kind": "naive"}}]}}"#
        ))
        .unwrap()
    }

    #[test]
    fn instances_are_reproducible_and_clipped() {
        let c = cfg(6, 0.9);
        let a = gen_instance(&c, 11, 3).unwrap();
        assert_eq!(a, gen_instance(&c, 11, 3).unwrap());
        assert_ne!(a, gen_instance(&c, 11, 4).unwrap());
        for i in 0..200 {
            let s = gen_instance(&c, 5, i).unwrap();
            for p in &s.arms {
                assert!((0.02..=0.995).contains(&p.alpha()));
                assert!(p.sigma() > 0.0 && p.sigma() <= 0.5);
            }
            assert_eq!(s.arms, s.policy_arms);
        }
    }

    #[test]
    fn unperturbed_alphas_are_identity() {
        let c = cfg(4, 0.4);
        let mut s = gen_instance(&c, 1, 0).unwrap();
        let before = s.clone();
        let mut rng = seed::rng_from_seed(9);
        perturb_alphas(&mut s, &c.alpha_law, 0.0, &mut rng).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn upper_bound_knowledge_replaces_sigma() {
        let mut c = cfg(3, 0.4);
        c.sigma_knowledge = SigmaKnowledge::UpperBound(0.5);
        let s = gen_instance(&c, 1, 0).unwrap();
        assert!(s.policy_arms.iter().all(|p| p.sigma() == 0.5));
        assert!(s.arms.iter().all(|p| p.sigma() < 0.5));
    }
}
