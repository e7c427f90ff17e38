//! The reflected AR-1 reward environment.
//!
//! Arm `i` has expected reward `r_i(t)` in `[-R, R]` and realized reward
//! `R_i(t) = r_i(t) + sigma_i * z` with `z ~ N(0, 1)`. The next expected
//! reward is `reflect(alpha_i * R_i(t))`. Arms evolve every round regardless
//! of which arm is pulled, so a whole [`Trajectory`] can be generated before
//! any policy runs and shared between policies.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Parameters of one reflected AR-1 arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArParams", into = "RawArParams")]
pub struct ArParams {
    alpha: f64,
    sigma: f64,
    boundary: f64,
}

#[derive(Serialize, Deserialize)]
struct RawArParams {
    alpha: f64,
    sigma: f64,
    #[serde(default = "unit_boundary")]
    boundary: f64,
}

fn unit_boundary() -> f64 {
    1.0
}

impl TryFrom<RawArParams> for ArParams {
    type Error = Error;
    fn try_from(raw: RawArParams) -> Result<Self> {
        ArParams::new(raw.alpha, raw.sigma, raw.boundary)
    }
}

impl From<ArParams> for RawArParams {
    fn from(p: ArParams) -> Self {
        RawArParams {
            alpha: p.alpha,
            sigma: p.sigma,
            boundary: p.boundary,
        }
    }
}

impl ArParams {
    /// Requires `0 < alpha < 1`, `0 < sigma < 1` and `boundary > 0`.
    pub fn new(alpha: f64, sigma: f64, boundary: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param("alpha", alpha, "must lie in (0, 1)"));
        }
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::param("sigma", sigma, "must lie in (0, 1)"));
        }
        if !(boundary > 0.0 && boundary.is_finite()) {
            return Err(Error::param(
                "boundary",
                boundary,
                "must be positive and finite",
            ));
        }
        Ok(Self {
            alpha,
            sigma,
            boundary,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn boundary(&self) -> f64 {
        self.boundary
    }

    /// Same arm with a different AR coefficient.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.sigma, self.boundary)
    }

    /// Same arm with a different noise level.
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.alpha, sigma, self.boundary)
    }

    /// Precision of the stationary law: `sqrt(1 - alpha) / (alpha * sigma)`.
    pub fn lambda(&self) -> f64 {
        libm::sqrt(1.0 - self.alpha) / (self.alpha * self.sigma)
    }
}

/// Folds `y` into `[-boundary, boundary]` by mirroring about the endpoints.
///
/// Equivalent to `y' - R` when `y' = (y + R) mod 4R` lies in `[0, 2R)` and
/// `3R - y'` otherwise, with a mathematical (floored) modulus. The map is
/// evaluated on `|y|` and the sign restored, so `reflect(-y) == -reflect(y)`
/// holds bit for bit, and values already inside the band are returned
/// unchanged.
pub fn reflect(y: f64, boundary: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::NonFinite(y));
    }
    if !(boundary > 0.0 && boundary.is_finite()) {
        return Err(Error::param(
            "boundary",
            boundary,
            "must be positive and finite",
        ));
    }
    Ok(fold(y, boundary))
}

/// [`reflect`] without input validation.
#[inline]
pub(crate) fn fold(y: f64, r: f64) -> f64 {
    let a = y.abs();
    if a <= r {
        return y;
    }
    // a > R: with z = (a - R) mod 4R the mirror image is R - z on [0, 2R)
    // and z - 3R on [2R, 4R).
    let z = floored_mod(a - r, 4.0 * r);
    let folded = if z < 2.0 * r { r - z } else { z - 3.0 * r };
    let folded = folded.clamp(-r, r);
    if y < 0.0 {
        -folded
    } else {
        folded
    }
}

/// `x - m * floor(x / m)`, always in `[0, m)` for finite `x` and `m > 0`.
#[inline]
pub fn floored_mod(x: f64, m: f64) -> f64 {
    let v = x - m * libm::floor(x / m);
    if v >= m || v < 0.0 {
        0.0
    } else {
        v
    }
}

/// One arm's AR-1 state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmProcess {
    params: ArParams,
    expected: f64,
}

impl ArmProcess {
    pub fn new(params: ArParams, expected: f64) -> Result<Self> {
        if !expected.is_finite() || expected.abs() > params.boundary {
            return Err(Error::param(
                "expected_reward",
                expected,
                "must lie in [-boundary, boundary]",
            ));
        }
        Ok(Self { params, expected })
    }

    pub fn params(&self) -> &ArParams {
        &self.params
    }

    pub fn expected_reward(&self) -> f64 {
        self.expected
    }

    /// Advances one round with a standard-normal draw `noise`.
    ///
    /// Returns the next state and the realized reward of the current round.
    /// The realized reward is not clipped; only the expected reward is
    /// reflected back into the band.
    pub fn step(&self, noise: f64) -> (ArmProcess, f64) {
        let realized = self.expected + self.params.sigma * noise;
        let next = fold(self.params.alpha * realized, self.params.boundary);
        (
            ArmProcess {
                params: self.params,
                expected: next,
            },
            realized,
        )
    }
}

/// Closed-form stationary law of the expected reward.
///
/// The density is `C * exp(-lambda^2 x^2)` on `[-R, R]` with
/// `lambda = sqrt(1 - alpha) / (alpha sigma)` and
/// `C = lambda / (sqrt(pi) * erf(lambda R))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationary {
    params: ArParams,
    lambda: f64,
    erf_lr: f64,
    erfc_lr: f64,
    norm: f64,
}

/// Absolute tolerance of the inverse-CDF sampler.
pub const SAMPLER_TOLERANCE: f64 = 1e-12;

impl Stationary {
    pub fn new(params: ArParams) -> Self {
        let lambda = params.lambda();
        let lr = lambda * params.boundary;
        let erf_lr = libm::erf(lr);
        Self {
            params,
            lambda,
            erf_lr,
            erfc_lr: libm::erfc(lr),
            norm: lambda / (libm::sqrt(PI) * erf_lr),
        }
    }

    pub fn params(&self) -> &ArParams {
        &self.params
    }

    /// The normalization constant `C(alpha, sigma)`, i.e. the density at 0.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x.is_nan() || x.abs() > self.params.boundary {
            return 0.0;
        }
        let s = self.lambda * x;
        self.norm * libm::exp(-s * s)
    }

    /// Probability mass in `[|x|, R]`, evaluated through `erfc` to keep tail
    /// precision.
    fn upper_tail(&self, ax: f64) -> f64 {
        ((libm::erfc(self.lambda * ax) - self.erfc_lr) / (2.0 * self.erf_lr)).max(0.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let r = self.params.boundary;
        if x <= -r {
            0.0
        } else if x >= r {
            1.0
        } else if x < 0.0 {
            self.upper_tail(-x).min(0.5)
        } else {
            (1.0 - self.upper_tail(x)).clamp(0.5, 1.0)
        }
    }

    /// Inverse CDF by bisection to [`SAMPLER_TOLERANCE`].
    pub fn quantile(&self, u: f64) -> f64 {
        let r = self.params.boundary;
        let (mut lo, mut hi) = (-r, r);
        if u <= 0.0 {
            return lo;
        }
        if u >= 1.0 {
            return hi;
        }
        while hi - lo > SAMPLER_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.quantile(u)
    }
}

pub fn stationary_pdf(x: f64, params: &ArParams) -> f64 {
    Stationary::new(*params).pdf(x)
}

pub fn stationary_cdf(x: f64, params: &ArParams) -> f64 {
    Stationary::new(*params).cdf(x)
}

pub fn sample_stationary<R: Rng + ?Sized>(params: &ArParams, rng: &mut R) -> f64 {
    Stationary::new(*params).sample(rng)
}

/// How `r_i(0)` is chosen when generating a trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialState {
    /// Draw each arm from its stationary law (first draw of the arm's stream).
    #[default]
    Stationary,
    /// Use these values, one per arm.
    Fixed(Vec<f64>),
}

/// A full policy-independent realization of an instance.
///
/// Rounds are indexed `0..horizon`. Column 0 holds the initial state and
/// `expected[i][t + 1] == reflect(alpha_i * realized[i][t])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    horizon: usize,
    params: Vec<ArParams>,
    expected: Vec<f64>,
    realized: Vec<f64>,
    optimal: Vec<f64>,
}

impl Trajectory {
    /// Builds a trajectory from explicit initial states and a per-arm matrix
    /// of standard-normal draws (`noise[arm][t]`, at least `horizon` each).
    pub fn from_noise<N: AsRef<[f64]>>(
        params: &[ArParams],
        initial: &[f64],
        noise: &[N],
        horizon: usize,
    ) -> Result<Self> {
        let k = params.len();
        if k == 0 {
            return Err(Error::Domain("trajectory needs at least one arm"));
        }
        if horizon == 0 {
            return Err(Error::Domain("horizon must be at least 1"));
        }
        if initial.len() != k {
            return Err(Error::Dimension {
                expected: k,
                got: initial.len(),
            });
        }
        if noise.len() != k {
            return Err(Error::Dimension {
                expected: k,
                got: noise.len(),
            });
        }
        let mut expected = Vec::with_capacity(k * horizon);
        let mut realized = Vec::with_capacity(k * horizon);
        for ((p, &r0), z) in params.iter().zip(initial).zip(noise) {
            let z = z.as_ref();
            if z.len() < horizon {
                return Err(Error::Dimension {
                    expected: horizon,
                    got: z.len(),
                });
            }
            let mut arm = ArmProcess::new(*p, r0)?;
            for &eps in &z[..horizon] {
                let (next, obs) = arm.step(eps);
                expected.push(arm.expected_reward());
                realized.push(obs);
                arm = next;
            }
        }
        Ok(Self::assemble(horizon, params.to_vec(), expected, realized))
    }

    fn assemble(
        horizon: usize,
        params: Vec<ArParams>,
        expected: Vec<f64>,
        realized: Vec<f64>,
    ) -> Self {
        let k = params.len();
        let optimal = (0..horizon)
            .map(|t| {
                (0..k)
                    .map(|i| expected[i * horizon + t])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        Self {
            horizon,
            params,
            expected,
            realized,
            optimal,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn arm_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[ArParams] {
        &self.params
    }

    pub fn expected(&self, arm: usize, t: usize) -> f64 {
        self.expected[arm * self.horizon + t]
    }

    pub fn realized(&self, arm: usize, t: usize) -> f64 {
        self.realized[arm * self.horizon + t]
    }

    pub fn expected_row(&self, arm: usize) -> &[f64] {
        &self.expected[arm * self.horizon..(arm + 1) * self.horizon]
    }

    pub fn realized_row(&self, arm: usize) -> &[f64] {
        &self.realized[arm * self.horizon..(arm + 1) * self.horizon]
    }

    /// Expected rewards of every arm at round `t`.
    pub fn expected_at(&self, t: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.arm_count()).map(move |i| self.expected(i, t))
    }

    /// `r*(t) = max_i r_i(t)`.
    pub fn optimal(&self, t: usize) -> f64 {
        self.optimal[t]
    }

    pub fn optimal_rewards(&self) -> &[f64] {
        &self.optimal
    }

    /// Lowest-index arm attaining `r*(t)`.
    pub fn best_arm(&self, t: usize) -> usize {
        let best = self.optimal[t];
        (0..self.arm_count())
            .find(|&i| self.expected(i, t) == best)
            .unwrap_or(0)
    }
}

/// Generates a trajectory with one independent random stream per arm.
///
/// Arm `i` draws from `seed::substream(seed, &[i])`: first its initial state
/// (when [`InitialState::Stationary`]) and then one standard normal per
/// round. The arm count therefore never perturbs another arm's draws.
pub fn generate_trajectory(
    params: &[ArParams],
    horizon: usize,
    seed: u64,
    initial: &InitialState,
) -> Result<Trajectory> {
    let k = params.len();
    if k == 0 {
        return Err(Error::Domain("trajectory needs at least one arm"));
    }
    if horizon == 0 {
        return Err(Error::Domain("horizon must be at least 1"));
    }
    if let InitialState::Fixed(v) = initial {
        if v.len() != k {
            return Err(Error::Dimension {
                expected: k,
                got: v.len(),
            });
        }
    }
    let mut expected = Vec::with_capacity(k * horizon);
    let mut realized = Vec::with_capacity(k * horizon);
    for (i, p) in params.iter().enumerate() {
        let mut rng = seed::substream(seed, &[i as u64]);
        let r0 = match initial {
            InitialState::Stationary => sample_stationary(p, &mut rng),
            InitialState::Fixed(v) => v[i],
        };
        let mut arm = ArmProcess::new(*p, r0)?;
        for _ in 0..horizon {
            let z: f64 = rng.sample(StandardNormal);
            let (next, obs) = arm.step(z);
            expected.push(arm.expected_reward());
            realized.push(obs);
            arm = next;
        }
    }
    Ok(Trajectory::assemble(
        horizon,
        params.to_vec(),
        expected,
        realized,
    ))
}
