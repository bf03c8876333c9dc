//! Seeded batch simulation with pseudo-regret accounting.
//!
//! A run pulls arms for `T` rounds and accumulates the gap
//! `mu* - mu_arm` of every chosen arm (pseudo-regret, not realized reward).
//! Run `r` draws all of its rewards from `RngStream::new(master_seed, r)`,
//! so results do not depend on how runs are spread over threads.

use rayon::prelude::*;

use crate::environments::{ArmModel, RngStream};
use crate::error::{Error, Result};
use crate::math::ProblemParams;
use crate::policies::{Policy, PolicyKind};

/// Default quantile levels of the aggregate output.
pub const DEFAULT_QUANTILES: [f64; 3] = [0.05, 0.5, 0.95];

/// Master seed used when a configuration does not name one.
pub const DEFAULT_MASTER_SEED: u64 = 20_190_917;

/// Cumulative pseudo-regret of one run sampled on a recording grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub run_index: u64,
    pub grid: Vec<usize>,
    pub cum_regret: Vec<f64>,
    /// Pull counts per arm after the final round.
    pub pull_counts: Vec<usize>,
}

/// Pointwise mean and nearest-rank quantiles across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateStats {
    pub grid: Vec<usize>,
    pub mean: Vec<f64>,
    pub levels: Vec<f64>,
    /// `quantiles[j][i]` is the `levels[j]` quantile at `grid[i]`.
    pub quantiles: Vec<Vec<f64>>,
    pub run_count: usize,
}

impl AggregateStats {
    /// Quantile series for `level`, if it was computed.
    pub fn quantile(&self, level: f64) -> Option<&[f64]> {
        self.levels
            .iter()
            .position(|&l| (l - level).abs() < 1e-12)
            .map(|j| self.quantiles[j].as_slice())
    }

    /// Position of time `t` on the grid.
    pub fn position(&self, t: usize) -> Option<usize> {
        self.grid.iter().position(|&g| g == t)
    }
}

/// Roughly geometric grid of at most `points` rounds from 1 to `horizon`,
/// always ending at `horizon`.
pub fn recording_grid(horizon: usize, points: usize) -> Vec<usize> {
    if horizon == 0 {
        return Vec::new();
    }
    let points = points.max(2);
    let log_t = (horizon as f64).ln();
    let mut grid: Vec<usize> = (0..points)
        .map(|i| {
            let t = (log_t * i as f64 / (points - 1) as f64).exp().round() as usize;
            t.clamp(1, horizon)
        })
        .collect();
    grid.push(horizon);
    grid.sort_unstable();
    grid.dedup();
    grid
}

fn check_grid(grid: &[usize], horizon: usize) -> Result<()> {
    let increasing = grid.windows(2).all(|w| w[0] < w[1]);
    let in_range = grid.iter().all(|&t| (1..=horizon).contains(&t));
    if !increasing || !in_range {
        return Err(Error::Config(format!(
            "recording grid must be strictly increasing within 1..={horizon}"
        )));
    }
    Ok(())
}

fn gaps(env: &[ArmModel]) -> Vec<f64> {
    let best = env.iter().map(|a| a.mean).fold(f64::NEG_INFINITY, f64::max);
    env.iter().map(|a| best - a.mean).collect()
}

fn simulate(
    env: &[ArmModel],
    kind: PolicyKind,
    params: &ProblemParams,
    master_seed: u64,
    run_index: u64,
    grid: &[usize],
    mut on_pull: impl FnMut(usize, f64),
) -> Result<RegretTrace> {
    if env.len() != params.arms {
        return Err(Error::Config(format!(
            "K = {} but {} arm models were given",
            params.arms,
            env.len()
        )));
    }
    check_grid(grid, params.horizon)?;
    let mut policy = Policy::new(kind, *params)?;
    let gaps = gaps(env);
    let mut rng = RngStream::new(master_seed, run_index);
    let mut cum = 0.0;
    let mut cum_regret = Vec::with_capacity(grid.len());
    let mut next = grid.iter().peekable();
    for t in 1..=params.horizon {
        let arm = policy.select_arm()?;
        let reward = env[arm].sample(&mut rng);
        policy.update(arm, reward)?;
        cum += gaps[arm];
        on_pull(arm, reward);
        if next.peek() == Some(&&t) {
            cum_regret.push(cum);
            next.next();
        }
    }
    Ok(RegretTrace {
        run_index,
        grid: grid.to_vec(),
        cum_regret,
        pull_counts: policy.pull_counts(),
    })
}

/// Runs one policy for `T` rounds on `env`.
pub fn run_single(
    env: &[ArmModel],
    kind: PolicyKind,
    params: &ProblemParams,
    master_seed: u64,
    run_index: u64,
    grid: &[usize],
) -> Result<RegretTrace> {
    simulate(env, kind, params, master_seed, run_index, grid, |_, _| {})
}

/// Per-round log of a run: chosen arm and observed reward.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLog {
    pub arms: Vec<usize>,
    pub rewards: Vec<f64>,
}

/// Like [`run_single`], also returning every chosen arm and reward.
pub fn run_single_logged(
    env: &[ArmModel],
    kind: PolicyKind,
    params: &ProblemParams,
    master_seed: u64,
    run_index: u64,
    grid: &[usize],
) -> Result<(RegretTrace, RunLog)> {
    let mut log = RunLog::default();
    let trace = simulate(
        env,
        kind,
        params,
        master_seed,
        run_index,
        grid,
        |arm, reward| {
            log.arms.push(arm);
            log.rewards.push(reward);
        },
    )?;
    Ok((trace, log))
}

/// Everything needed to run a batch of simulations.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchConfig {
    pub env: Vec<ArmModel>,
    pub algorithms: Vec<PolicyKind>,
    pub params: ProblemParams,
    pub runs: usize,
    pub master_seed: u64,
    pub grid: Vec<usize>,
    pub quantile_levels: Vec<f64>,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
}

/// Traces and aggregate of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmResult {
    pub kind: PolicyKind,
    pub stats: AggregateStats,
    pub traces: Vec<RegretTrace>,
}

/// Runs every algorithm `runs` times and aggregates across runs.
pub fn run_batch(config: &BatchConfig) -> Result<Vec<AlgorithmResult>> {
    if config.runs == 0 {
        return Err(Error::Config("at least one run is required".into()));
    }
    if config.algorithms.is_empty() {
        return Err(Error::Config("no algorithms selected".into()));
    }
    check_levels(&config.quantile_levels)?;
    // Fail on configuration problems before any sampling.
    for &kind in &config.algorithms {
        Policy::new(kind, config.params)?;
    }
    check_grid(&config.grid, config.params.horizon)?;

    let jobs: Vec<(PolicyKind, u64)> = config
        .algorithms
        .iter()
        .flat_map(|&kind| (0..config.runs as u64).map(move |r| (kind, r)))
        .collect();
    let work = || -> Vec<Result<RegretTrace>> {
        jobs.par_iter()
            .map(|&(kind, r)| {
                run_single(
                    &config.env,
                    kind,
                    &config.params,
                    config.master_seed,
                    r,
                    &config.grid,
                )
            })
            .collect()
    };
    let results = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut traces = results.into_iter().collect::<Result<Vec<_>>>()?.into_iter();

    config
        .algorithms
        .iter()
        .map(|&kind| {
            let runs: Vec<RegretTrace> = traces.by_ref().take(config.runs).collect();
            let stats = aggregate(&runs, &config.quantile_levels)?;
            Ok(AlgorithmResult {
                kind,
                stats,
                traces: runs,
            })
        })
        .collect()
}

fn check_levels(levels: &[f64]) -> Result<()> {
    let valid =
        levels.iter().all(|&q| q > 0.0 && q <= 1.0) && levels.windows(2).all(|w| w[0] < w[1]);
    if !valid {
        return Err(Error::Config(
            "quantile levels must be strictly increasing within (0, 1]".into(),
        ));
    }
    Ok(())
}

/// Nearest-rank quantile: the `ceil(q R)`-th smallest of `sorted`.
pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let r = sorted.len();
    // Guard against q * R landing a hair above an integer.
    let rank = ((q * r as f64) - 1e-9).ceil().clamp(1.0, r as f64) as usize;
    sorted[rank - 1]
}

/// Pointwise mean and nearest-rank quantiles of traces sharing one grid.
pub fn aggregate(traces: &[RegretTrace], levels: &[f64]) -> Result<AggregateStats> {
    let first = traces.first().ok_or(Error::EmptyInput)?;
    check_levels(levels)?;
    if traces
        .iter()
        .any(|tr| tr.grid != first.grid || tr.cum_regret.len() != first.grid.len())
    {
        return Err(Error::GridMismatch);
    }
    let points = first.grid.len();
    let r = traces.len();
    let mut mean = Vec::with_capacity(points);
    let mut quantiles = vec![Vec::with_capacity(points); levels.len()];
    let mut column = Vec::with_capacity(r);
    for i in 0..points {
        column.clear();
        column.extend(traces.iter().map(|tr| tr.cum_regret[i]));
        mean.push(column.iter().sum::<f64>() / r as f64);
        column.sort_by(f64::total_cmp);
        for (j, &q) in levels.iter().enumerate() {
            quantiles[j].push(nearest_rank(&column, q));
        }
    }
    Ok(AggregateStats {
        grid: first.grid.clone(),
        mean,
        levels: levels.to_vec(),
        quantiles,
        run_count: r,
    })
}
