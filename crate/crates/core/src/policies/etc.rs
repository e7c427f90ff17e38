use alloc::vec::Vec;

use super::{argmax, check_context, Policy, PolicyContext, PolicyError, RoundGuard};

/// Explore-then-commit: `m` round-robin pulls per arm, then the best
/// empirical mean forever (lowest index on ties).
#[derive(Debug, Clone)]
pub struct ExploreThenCommit {
    m: usize,
    sums: Vec<f64>,
    counts: Vec<usize>,
    committed: Option<usize>,
    guard: RoundGuard,
    ready: bool,
}

impl ExploreThenCommit {
    pub fn new(m: usize) -> Result<Self, PolicyError> {
        if m == 0 {
            return Err(PolicyError::Config("ETC needs m >= 1".into()));
        }
        Ok(Self {
            m,
            sums: Vec::new(),
            counts: Vec::new(),
            committed: None,
            guard: RoundGuard::default(),
            ready: false,
        })
    }

    pub fn committed(&self) -> Option<usize> {
        self.committed
    }

    pub fn means(&self) -> impl Iterator<Item = f64> + '_ {
        self.sums.iter().zip(&self.counts).map(|(s, &n)| {
            if n == 0 {
                f64::NEG_INFINITY
            } else {
                s / n as f64
            }
        })
    }
}

impl Policy for ExploreThenCommit {
    fn name(&self) -> &'static str {
        "ETC"
    }

    fn reset(&mut self, ctx: &PolicyContext, _seed: u64) -> Result<(), PolicyError> {
        check_context(ctx)?;
        let k = ctx.arm_count();
        self.sums = alloc::vec![0.0; k];
        self.counts = alloc::vec![0; k];
        self.committed = None;
        self.guard = RoundGuard::default();
        self.ready = true;
        Ok(())
    }

    fn select_arm(&mut self, t: usize) -> Result<usize, PolicyError> {
        if !self.ready {
            return Err(PolicyError::NotReset);
        }
        self.guard.begin(t)?;
        let k = self.sums.len();
        let arm = if t < self.m * k {
            t % k
        } else {
            match self.committed {
                Some(a) => a,
                None => {
                    let a = argmax(self.means());
                    self.committed = Some(a);
                    a
                }
            }
        };
        self.guard.selected(arm);
        Ok(arm)
    }

    fn observe(&mut self, t: usize, arm: usize, reward: f64) -> Result<(), PolicyError> {
        self.guard.finish(t, arm, reward)?;
        if self.committed.is_none() {
            self.sums[arm] += reward;
            self.counts[arm] += 1;
        }
        Ok(())
    }
}
