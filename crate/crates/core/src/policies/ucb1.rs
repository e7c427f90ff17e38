use alloc::vec::Vec;

use super::{argmax, check_context, Policy, PolicyContext, PolicyError, RoundGuard};

/// UCB1 on empirical means with bonus `sqrt(2 ln n / n_i)`, where `n` is the
/// number of pulls so far. Rewards are used as observed.
#[derive(Debug, Clone, Default)]
pub struct Ucb1 {
    sums: Vec<f64>,
    counts: Vec<usize>,
    guard: RoundGuard,
}

impl Ucb1 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bonus(total: usize, pulls: usize) -> f64 {
        libm::sqrt(2.0 * libm::log(total as f64) / pulls as f64)
    }

    pub fn index(&self, arm: usize, total: usize) -> f64 {
        self.sums[arm] / self.counts[arm] as f64 + Self::bonus(total, self.counts[arm])
    }
}

impl Policy for Ucb1 {
    fn name(&self) -> &'static str {
        "UCB"
    }

    fn reset(&mut self, ctx: &PolicyContext, _seed: u64) -> Result<(), PolicyError> {
        check_context(ctx)?;
        self.sums = alloc::vec![0.0; ctx.arm_count()];
        self.counts = alloc::vec![0; ctx.arm_count()];
        self.guard = RoundGuard::default();
        Ok(())
    }

    fn select_arm(&mut self, t: usize) -> Result<usize, PolicyError> {
        if self.counts.is_empty() {
            return Err(PolicyError::NotReset);
        }
        self.guard.begin(t)?;
        let arm = match self.counts.iter().position(|&n| n == 0) {
            Some(a) => a,
            None => argmax((0..self.counts.len()).map(|i| self.index(i, t))),
        };
        self.guard.selected(arm);
        Ok(arm)
    }

    fn observe(&mut self, t: usize, arm: usize, reward: f64) -> Result<(), PolicyError> {
        self.guard.finish(t, arm, reward)?;
        self.sums[arm] += reward;
        self.counts[arm] += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::{drive, params, trajectory};
    use super::*;

    #[test]
    fn pulls_each_arm_first() {
        let ps = [params(0.9, 0.2); 4];
        let tr = trajectory(&ps, 50, 3);
        assert_eq!(&drive(&mut Ucb1::new(), &tr, 0)[..4], &[0, 1, 2, 3]);
    }

    #[test]
    fn bonus_shrinks_with_pulls() {
        assert!(Ucb1::bonus(100, 5) < Ucb1::bonus(100, 4));
    }

    #[test]
    fn hand_trace_k2() {
        let mut p = Ucb1::new();
        p.reset(&PolicyContext::new(5, alloc::vec![params(0.5, 0.5); 2]), 0)
            .unwrap();
        let script = [0.5, 0.0, 0.2, 0.1];
        let mut pulls = alloc::vec::Vec::new();
        for (t, r) in script.iter().enumerate() {
            let a = p.select_arm(t).unwrap();
            pulls.push(a);
            p.observe(t, a, *r).unwrap();
        }
        // t=2: indices 0.5 + sqrt(2 ln2) vs 0.0 + sqrt(2 ln2) -> arm 0.
        // t=3: arm0 mean 0.35 + sqrt(2 ln3 / 2) = 1.3981; arm1 0 + sqrt(2 ln 3) = 1.4823 -> arm 1.
        assert_eq!(pulls, [0, 1, 0, 1]);
    }

    #[test]
    fn shift_invariant() {
        let ps = [params(0.9, 0.3), params(0.8, 0.2), params(0.95, 0.4)];
        let tr = trajectory(&ps, 3000, 17);
        let run = |shift: f64| {
            let mut p = Ucb1::new();
            p.reset(&PolicyContext::new(tr.horizon(), ps.to_vec()), 0)
                .unwrap();
            (0..tr.horizon())
                .map(|t| {
                    let a = p.select_arm(t).unwrap();
                    p.observe(t, a, tr.realized(a, t) + shift).unwrap();
                    a
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(0.0), run(1.0));
    }
}
