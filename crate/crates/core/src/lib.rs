//! Dynamic multi-armed bandits whose arm rewards follow reflected AR-1
//! processes.
//!
//! Each arm carries an expected reward `r(t)` confined to `[-R, R]`. Every
//! round, whether or not the arm is pulled, the realized reward is
//! `R(t) = r(t) + eps(t)` with `eps ~ N(0, sigma^2)`, and the next expected
//! reward is `reflect(alpha * R(t))`. The crate provides:
//!
//! - [`env`]: the reflection map, the analytic stationary law of `r(t)`, a
//!   sampler for it, and policy-independent [`env::Trajectory`] generation.
//! - [`policies`]: a uniform [`policies::Policy`] interface with the
//!   alternating/restarting AR2 policy and six benchmarks.
//! - [`bounds`]: numerical lower bound and upper-bound orders for the
//!   per-round steady-state regret.
//! - [`metrics`]: dynamic regret accounting and the distributed-regret
//!   decomposition.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the
//! experiment harness and the command line live in `arbandit-lab`.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bounds;
pub mod env;
pub mod error;
pub mod metrics;
pub mod policies;
pub mod quadrature;
pub mod seed;

pub use env::{reflect, ArParams, ArmProcess, Trajectory};
pub use error::{Error, Result};
pub use metrics::RegretLedger;
pub use policies::{Policy, PolicyContext, PolicyError};
