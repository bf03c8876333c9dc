//! Robust MOSS for heavy-tailed stochastic multi-armed bandits.
//!
//! The crate provides:
//!
//! - [`math`]: the scalar building blocks (`psi`, `ln_+`, `phi`, `c_n`,
//!   `h(m)`, `B_m`) and the tuning condition `eta psi(2 eta / a) >= 2 a`.
//! - [`estimators`]: the saturated empirical mean, plus the truncated mean
//!   and Catoni's estimator used by the Robust UCB baselines.
//! - [`policies`]: Robust MOSS, MOSS and both Robust UCB variants behind
//!   one [`Policy`] type.
//! - [`environments`]: symmetric generalized-Pareto reward models and the
//!   seeded [`RngStream`].
//! - [`simulator`]: seeded single runs, parallel batches, and aggregation.
//! - [`bounds`]: closed-form regret bounds.
//!
//! ```
//! use robust_moss::{ArmModel, PolicyKind, ProblemParams, run_single, recording_grid};
//!
//! let params = ProblemParams::experiment_defaults(1_000, 3).unwrap();
//! let env: Vec<_> = [-0.3, 0.0, 0.3]
//!     .iter()
//!     .map(|&mu| ArmModel::gpd_symmetric(mu, 0.33, 0.32, 1.0).unwrap())
//!     .collect();
//! let grid = recording_grid(1_000, 50);
//! let trace = run_single(&env, PolicyKind::RobustMoss, &params, 42, 0, &grid).unwrap();
//! assert_eq!(trace.pull_counts.iter().sum::<usize>(), 1_000);
//! ```

// Domain guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod environments;
pub mod error;
pub mod estimators;
pub mod math;
pub mod policies;
pub mod quadrature;
pub mod simulator;

pub use bounds::{
    dist_dependent_bound, minimax_lower_bound, minimax_upper_bound, DistDependentBound, GapProfile,
    MinimaxUpperBound,
};
pub use environments::{gpd_quantile, moment_bound_check, ArmModel, Noise, RngStream};
pub use error::{Error, Result};
pub use estimators::{catoni_mean, sat, truncated_mean, SaturatedMean};
pub use math::{
    conf_radius, gamma_fn, h_of, log_plus, phi, psi, saturation_point, validate_condition,
    validate_params, ParamCheck, ProblemParams,
};
pub use policies::{Policy, PolicyKind};
pub use simulator::{
    aggregate, recording_grid, run_batch, run_single, AggregateStats, AlgorithmResult, BatchConfig,
    RegretTrace, DEFAULT_MASTER_SEED, DEFAULT_QUANTILES,
};
