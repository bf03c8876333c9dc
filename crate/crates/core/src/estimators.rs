//! Mean estimators for heavy-tailed rewards.
//!
//! [`SaturatedMean`] is the estimator behind Robust MOSS: samples are
//! clipped to `±B_m`, where the saturation point `B_m` grows with the sample
//! count through geometric blocks. Because `B_m` changes when `m` enters a
//! new block, every stored sample is re-clipped at block boundaries.
//!
//! The Robust UCB baselines use the index-wise truncated mean
//! ([`truncated_mean`], [`TruncatedMean`]) and Catoni's M-estimator
//! ([`catoni_mean`], [`CatoniMean`]). MOSS uses the plain [`EmpiricalMean`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::math::{saturation_for_block, Block, ProblemParams};

/// Sign-preserving clamp `sign(x) * min(|x|, b)`.
#[inline]
pub fn sat(x: f64, b: f64) -> f64 {
    x.clamp(-b, b)
}

/// Mean of `samples` clipped at a fixed saturation point `b`.
pub fn mean_saturated_at(samples: &[f64], b: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sum: f64 = samples.iter().map(|&x| sat(x, b)).sum();
    Ok(sum / samples.len() as f64)
}

/// Saturated empirical mean of a whole sample, with `B_m` taken at
/// `m = samples.len()`.
pub fn saturated_mean_batch(samples: &[f64], params: &ProblemParams) -> Result<f64> {
    let b = crate::math::saturation_point(samples.len().max(1), params)?;
    mean_saturated_at(samples, b)
}

/// Online saturated empirical mean for one arm.
///
/// Keeps every raw sample so that the running clipped sum can be rebuilt
/// when the pull count crosses into a new geometric block.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturatedMean {
    params: ProblemParams,
    samples: Vec<f64>,
    block: Block,
    saturation: f64,
    saturated_sum: f64,
}

impl SaturatedMean {
    pub fn new(params: ProblemParams) -> Self {
        let block = Block::FIRST;
        Self {
            saturation: saturation_for_block(&block, &params),
            params,
            samples: Vec::new(),
            block,
            saturated_sum: 0.0,
        }
    }

    /// Adds one sample, re-saturating the stored samples if `B_m` moved.
    pub fn update(&mut self, x: f64) {
        self.samples.push(x);
        let m = self.samples.len();
        if self.block.advance_to(m, self.params.grid_base) {
            self.saturation = saturation_for_block(&self.block, &self.params);
            let b = self.saturation;
            self.saturated_sum = self.samples.iter().map(|&s| sat(s, b)).sum();
        } else {
            self.saturated_sum += sat(x, self.saturation);
        }
    }

    /// `(1/m) * sum sat(X_i, B_m)`.
    pub fn value(&self) -> Result<f64> {
        if self.samples.is_empty() {
            return Err(Error::NoSamples);
        }
        Ok(self.saturated_sum / self.samples.len() as f64)
    }

    pub fn pull_count(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Current saturation point `B_max(m,1)`.
    pub fn saturation(&self) -> f64 {
        self.saturation
    }

    pub fn block_exponent(&self) -> u32 {
        self.block.exponent
    }

    pub fn saturated_sum(&self) -> f64 {
        self.saturated_sum
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }
}

/// Running sample mean.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmpiricalMean {
    count: usize,
    sum: f64,
}

impl EmpiricalMean {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
    }

    pub fn value(&self) -> Result<f64> {
        if self.count == 0 {
            return Err(Error::NoSamples);
        }
        Ok(self.sum / self.count as f64)
    }

    pub fn pull_count(&self) -> usize {
        self.count
    }
}

fn check_confidence(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(crate::error::domain("confidence", delta, "0 < delta < 1"));
    }
    Ok((1.0 / delta).ln())
}

/// Index-wise truncated mean
/// `(1/n) * sum_i X_i 1{|X_i| <= (u^(1+eps) i / ln(1/delta))^(1/(1+eps))}`.
///
/// Truncated samples contribute zero but still count in the divisor.
pub fn truncated_mean(samples: &[f64], u: f64, eps: f64, delta: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let level = check_confidence(delta)?;
    Ok(truncated_mean_at_level(samples, u, eps, level))
}

pub(crate) fn truncated_mean_at_level(samples: &[f64], u: f64, eps: f64, level: f64) -> f64 {
    let u_pow = u.powf(1.0 + eps);
    let sum: f64 = samples
        .iter()
        .enumerate()
        .filter(|(i, x)| {
            let threshold = (u_pow * (*i as f64 + 1.0) / level).powf(1.0 / (1.0 + eps));
            x.abs() <= threshold
        })
        .map(|(_, x)| *x)
        .sum();
    sum / samples.len() as f64
}

#[derive(Debug, Clone, Copy)]
struct Expiry {
    // Sample i stays inside its threshold while ln(1/delta) <= key.
    key: f64,
    value: f64,
}

impl PartialEq for Expiry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Expiry {}

impl PartialOrd for Expiry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expiry {
    // Reversed so that `BinaryHeap` pops the earliest expiry first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.value.total_cmp(&self.value))
    }
}

/// Online truncated mean for a non-decreasing confidence level.
///
/// Sample `i` is kept while `ln(1/delta) <= u^(1+eps) i / |X_i|^(1+eps)`;
/// since the Robust UCB level `2 ln t` only grows, each sample leaves the
/// kept set at most once and a min-heap of expiry levels replaces the full
/// rescan.
#[derive(Debug, Clone)]
pub struct TruncatedMean {
    u_pow: f64,
    eps: f64,
    count: usize,
    kept_sum: f64,
    kept: BinaryHeap<Expiry>,
    level: f64,
}

impl TruncatedMean {
    pub fn new(u: f64, eps: f64) -> Self {
        Self {
            u_pow: u.powf(1.0 + eps),
            eps,
            count: 0,
            kept_sum: 0.0,
            kept: BinaryHeap::new(),
            level: 0.0,
        }
    }

    pub fn update(&mut self, x: f64) {
        self.count += 1;
        let key = if x == 0.0 {
            f64::INFINITY
        } else {
            self.u_pow * self.count as f64 / x.abs().powf(1.0 + self.eps)
        };
        if key >= self.level {
            self.kept_sum += x;
            self.kept.push(Expiry { key, value: x });
        }
    }

    /// Estimate at confidence level `ln(1/delta)`. Levels must not decrease
    /// between calls.
    pub fn value_at_level(&mut self, level: f64) -> Result<f64> {
        if self.count == 0 {
            return Err(Error::NoSamples);
        }
        debug_assert!(level >= self.level, "truncation level decreased");
        self.level = self.level.max(level);
        while let Some(top) = self.kept.peek() {
            if top.key >= self.level {
                break;
            }
            self.kept_sum -= top.value;
            self.kept.pop();
        }
        if self.kept.is_empty() {
            self.kept_sum = 0.0;
        }
        Ok(self.kept_sum / self.count as f64)
    }

    pub fn pull_count(&self) -> usize {
        self.count
    }

    fn sorted_keys(&self) -> Vec<(u64, u64)> {
        let mut keys: Vec<_> = self
            .kept
            .iter()
            .map(|e| (e.key.to_bits(), e.value.to_bits()))
            .collect();
        keys.sort_unstable();
        keys
    }
}

impl PartialEq for TruncatedMean {
    fn eq(&self, other: &Self) -> bool {
        self.u_pow == other.u_pow
            && self.eps == other.eps
            && self.count == other.count
            && self.kept_sum == other.kept_sum
            && self.level == other.level
            && self.sorted_keys() == other.sorted_keys()
    }
}

/// Catoni's influence function `sign(x) ln(1 + |x| + x^2/2)`.
#[inline]
pub fn catoni_influence(x: f64) -> f64 {
    let ax = x.abs();
    (ax + 0.5 * ax * ax).ln_1p().copysign(x)
}

#[inline]
fn catoni_influence_slope(x: f64) -> f64 {
    let ax = x.abs();
    (1.0 + ax) / (1.0 + ax + 0.5 * ax * ax)
}

/// Scale `alpha` of Catoni's estimator for `n` samples, variance bound `v`
/// and level `ln(1/delta)`.
pub fn catoni_alpha(n: usize, v: f64, level: f64) -> Result<f64> {
    let nf = n as f64;
    if !(nf > 2.0 * level) {
        return Err(Error::NotEnoughSamples {
            n,
            required: 2.0 * level,
        });
    }
    Ok((2.0 * level / (nf * v * (1.0 + 2.0 * level / (nf - 2.0 * level)))).sqrt())
}

fn catoni_score(samples: &[f64], alpha: f64, theta: f64) -> f64 {
    samples
        .iter()
        .map(|&x| catoni_influence(alpha * (x - theta)))
        .sum()
}

const CATONI_TOL: f64 = 1e-10;

fn sample_range(samples: &[f64]) -> (f64, f64) {
    samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

/// Catoni's M-estimator: the root `theta` of
/// `sum_i psi_C(alpha (X_i - theta)) = 0`, found by bisection to an absolute
/// tolerance of `1e-10`.
pub fn catoni_mean(samples: &[f64], v: f64, delta: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(v > 0.0) {
        return Err(crate::error::domain("catoni_mean", v, "v > 0"));
    }
    let level = check_confidence(delta)?;
    let alpha = catoni_alpha(samples.len(), v, level)?;
    let (min, max) = sample_range(samples);
    let (mut lo, mut hi) = (min - v, max + v);
    // The score is strictly decreasing in theta; widen until it changes sign.
    let mut width = v;
    while catoni_score(samples, alpha, lo) < 0.0 {
        width *= 2.0;
        lo -= width;
    }
    width = v;
    while catoni_score(samples, alpha, hi) > 0.0 {
        width *= 2.0;
        hi += width;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 2.0 * CATONI_TOL || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let score = catoni_score(samples, alpha, mid);
        if score == 0.0 {
            return Ok(mid);
        }
        if score > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Catoni's estimator maintained across rounds for one arm.
///
/// Each call re-solves for the root at the current level, warm-started from
/// the previous root with Newton steps that fall back to bisection whenever
/// they leave the bracket `[min - v, max + v]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CatoniMean {
    samples: Vec<f64>,
    min: f64,
    max: f64,
    last_root: Option<f64>,
}

impl Default for CatoniMean {
    fn default() -> Self {
        Self::new()
    }
}

impl CatoniMean {
    pub fn new() -> Self {
        Self {
            samples: Vec::new(),
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            last_root: None,
        }
    }

    pub fn update(&mut self, x: f64) {
        self.samples.push(x);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    pub fn pull_count(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Estimate for variance bound `v` at level `ln(1/delta)`.
    pub fn value_at_level(&mut self, v: f64, level: f64) -> Result<f64> {
        if self.samples.is_empty() {
            return Err(Error::NoSamples);
        }
        let alpha = catoni_alpha(self.samples.len(), v, level)?;
        let (mut lo, mut hi) = (self.min - v, self.max + v);
        let mut theta = match self.last_root {
            Some(r) if r > lo && r < hi => r,
            _ => 0.5 * (lo + hi),
        };
        for _ in 0..400 {
            let (score, slope) = self.samples.iter().fold((0.0, 0.0), |(f, df), &x| {
                let y = alpha * (x - theta);
                (f + catoni_influence(y), df + catoni_influence_slope(y))
            });
            if score == 0.0 {
                break;
            }
            if score > 0.0 {
                lo = theta;
            } else {
                hi = theta;
            }
            let mut next = theta + score / (alpha * slope);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - theta).abs();
            theta = next;
            if step <= 0.1 * CATONI_TOL || hi - lo <= 2.0 * CATONI_TOL {
                break;
            }
        }
        self.last_root = Some(theta);
        Ok(theta)
    }
}
