//! Arm-selection policies.
//!
//! All four policies pull every arm once in ascending order during rounds
//! `1..=K`, then pull the arm with the largest index, breaking ties toward
//! the lowest arm. Arms are numbered from 0 in this API.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{CatoniMean, EmpiricalMean, SaturatedMean, TruncatedMean};
use crate::math::{conf_radius_unchecked, validate_params, ProblemParams};

/// The policies available to the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    RobustMoss,
    Moss,
    RobustUcbTruncated,
    RobustUcbCatoni,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::RobustMoss,
        PolicyKind::Moss,
        PolicyKind::RobustUcbTruncated,
        PolicyKind::RobustUcbCatoni,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::RobustMoss => "robust_moss",
            PolicyKind::Moss => "moss",
            PolicyKind::RobustUcbTruncated => "robust_ucb_truncated",
            PolicyKind::RobustUcbCatoni => "robust_ucb_catoni",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{s}'")))
    }
}

/// Robust MOSS index `mu_hat + (1 + eta) c_n`.
pub fn robust_moss_index(arm: &SaturatedMean, params: &ProblemParams) -> Result<f64> {
    let mean = arm.value()?;
    let n = arm.pull_count() as f64;
    Ok(mean + (1.0 + params.inflation) * conf_radius_unchecked(n, params))
}

/// MOSS radius `sqrt(max(ln(T / (K n)), 0) / n)`.
pub fn moss_radius(n: f64, params: &ProblemParams) -> f64 {
    let ratio = params.horizon as f64 / (params.arms as f64 * n);
    (ratio.ln().max(0.0) / n).sqrt()
}

/// MOSS index on the plain empirical mean.
pub fn moss_index(arm: &EmpiricalMean, params: &ProblemParams) -> Result<f64> {
    let mean = arm.value()?;
    Ok(mean + moss_radius(arm.pull_count() as f64, params))
}

/// `ln(1/delta)` for the Robust UCB confidence `delta = t^-2`.
#[inline]
pub fn robust_ucb_level(t: usize) -> f64 {
    2.0 * (t as f64).ln()
}

/// Truncated-mean Robust UCB radius `4 u (ln(1/delta) / n)^(eps/(1+eps))`.
pub fn truncated_ucb_radius(n: f64, t: usize, params: &ProblemParams) -> f64 {
    4.0 * params.moment_scale * (robust_ucb_level(t) / n).powf(params.radius_exponent())
}

/// Catoni Robust UCB radius `2 sqrt(v ln(1/delta) / n)` with `v = u^2`.
pub fn catoni_ucb_radius(n: f64, t: usize, params: &ProblemParams) -> f64 {
    let v = params.moment_scale * params.moment_scale;
    2.0 * (v * robust_ucb_level(t) / n).sqrt()
}

/// Robust UCB index on the truncated mean at round `t >= 2`.
pub fn robust_ucb_truncated_index(
    arm: &mut TruncatedMean,
    t: usize,
    params: &ProblemParams,
) -> Result<f64> {
    check_round(t)?;
    let mean = arm.value_at_level(robust_ucb_level(t))?;
    Ok(mean + truncated_ucb_radius(arm.pull_count() as f64, t, params))
}

/// Robust UCB index on Catoni's estimator at round `t >= 2`.
///
/// The deviation bound behind the radius needs `n >= 4 ln(1/delta)`; below
/// that the index is `+inf` so the arm is sampled.
pub fn robust_ucb_catoni_index(
    arm: &mut CatoniMean,
    t: usize,
    params: &ProblemParams,
) -> Result<f64> {
    check_round(t)?;
    if params.moment_order != 1.0 {
        return Err(Error::Config(format!(
            "Catoni's estimator needs a finite variance (eps = 1), got eps = {}",
            params.moment_order
        )));
    }
    let n = arm.pull_count();
    if n == 0 {
        return Err(Error::NoSamples);
    }
    let level = robust_ucb_level(t);
    if (n as f64) < 4.0 * level {
        return Ok(f64::INFINITY);
    }
    let v = params.moment_scale * params.moment_scale;
    let mean = arm.value_at_level(v, level)?;
    Ok(mean + catoni_ucb_radius(n as f64, t, params))
}

fn check_round(t: usize) -> Result<()> {
    if t < 2 {
        return Err(Error::Config(format!(
            "Robust UCB index needs t >= 2, got {t}"
        )));
    }
    Ok(())
}

/// Per-arm estimator, one variant per policy family.
#[derive(Debug, Clone, PartialEq)]
pub enum ArmEstimator {
    Saturated(SaturatedMean),
    Empirical(EmpiricalMean),
    Truncated(TruncatedMean),
    Catoni(CatoniMean),
}

impl ArmEstimator {
    fn update(&mut self, x: f64) {
        match self {
            ArmEstimator::Saturated(e) => e.update(x),
            ArmEstimator::Empirical(e) => e.update(x),
            ArmEstimator::Truncated(e) => e.update(x),
            ArmEstimator::Catoni(e) => e.update(x),
        }
    }

    pub fn pull_count(&self) -> usize {
        match self {
            ArmEstimator::Saturated(e) => e.pull_count(),
            ArmEstimator::Empirical(e) => e.pull_count(),
            ArmEstimator::Truncated(e) => e.pull_count(),
            ArmEstimator::Catoni(e) => e.pull_count(),
        }
    }
}

/// State of one policy over one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    kind: PolicyKind,
    params: ProblemParams,
    arms: Vec<ArmEstimator>,
    /// Current round, 1-based.
    t: usize,
}

impl Policy {
    /// Creates a policy after checking the parameters it depends on.
    ///
    /// Robust MOSS requires the tuning condition; Catoni's variant requires
    /// `eps = 1`.
    pub fn new(kind: PolicyKind, params: ProblemParams) -> Result<Self> {
        params.check()?;
        match kind {
            PolicyKind::RobustMoss => {
                validate_params(&params).into_result()?;
            }
            PolicyKind::RobustUcbCatoni if params.moment_order != 1.0 => {
                return Err(Error::Config(format!(
                    "robust_ucb_catoni needs eps = 1, got eps = {}",
                    params.moment_order
                )));
            }
            _ => {}
        }
        let arms = (0..params.arms)
            .map(|_| match kind {
                PolicyKind::RobustMoss => ArmEstimator::Saturated(SaturatedMean::new(params)),
                PolicyKind::Moss => ArmEstimator::Empirical(EmpiricalMean::new()),
                PolicyKind::RobustUcbTruncated => ArmEstimator::Truncated(TruncatedMean::new(
                    params.moment_scale,
                    params.moment_order,
                )),
                PolicyKind::RobustUcbCatoni => ArmEstimator::Catoni(CatoniMean::new()),
            })
            .collect();
        Ok(Self {
            kind,
            params,
            arms,
            t: 1,
        })
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    /// The round whose arm is chosen next (1-based).
    pub fn round(&self) -> usize {
        self.t
    }

    pub fn arms(&self) -> &[ArmEstimator] {
        &self.arms
    }

    pub fn pull_counts(&self) -> Vec<usize> {
        self.arms.iter().map(ArmEstimator::pull_count).collect()
    }

    /// Index of `arm` at the current round.
    pub fn index(&mut self, arm: usize) -> Result<f64> {
        let t = self.t;
        let params = self.params;
        let k = self.arms.len();
        let est = self
            .arms
            .get_mut(arm)
            .ok_or(Error::ArmOutOfRange { arm, arms: k })?;
        match est {
            ArmEstimator::Saturated(e) => robust_moss_index(e, &params),
            ArmEstimator::Empirical(e) => moss_index(e, &params),
            ArmEstimator::Truncated(e) => robust_ucb_truncated_index(e, t, &params),
            ArmEstimator::Catoni(e) => robust_ucb_catoni_index(e, t, &params),
        }
    }

    /// Arm to pull at the current round.
    pub fn select_arm(&mut self) -> Result<usize> {
        if self.t > self.params.horizon {
            return Err(Error::HorizonExceeded {
                t: self.t,
                horizon: self.params.horizon,
            });
        }
        if self.t <= self.arms.len() {
            return Ok(self.t - 1);
        }
        let mut best = 0;
        let mut best_index = f64::NEG_INFINITY;
        for arm in 0..self.arms.len() {
            let g = self.index(arm)?;
            if g > best_index {
                best = arm;
                best_index = g;
            }
        }
        Ok(best)
    }

    /// Records the reward of `arm` and advances the round.
    pub fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        let k = self.arms.len();
        let est = self
            .arms
            .get_mut(arm)
            .ok_or(Error::ArmOutOfRange { arm, arms: k })?;
        est.update(reward);
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ProblemParams {
        ProblemParams::new(100, 10, 1.0, 1.0, 1.1, 2.2).unwrap()
    }

    #[test]
    fn robust_moss_index_example() {
        let mut arm = SaturatedMean::new(params());
        arm.update(0.5);
        let g = robust_moss_index(&arm, &params()).unwrap();
        assert!((g - 5.355_766_814_032_469).abs() < 1e-12, "{g}");
    }

    #[test]
    fn robust_moss_index_at_floor() {
        let p = params();
        let mut arm = SaturatedMean::new(p);
        for _ in 0..10 {
            arm.update(0.1);
        }
        // T/(Kn) = 1 so ln_+ floors to 1
        let g = robust_moss_index(&arm, &p).unwrap();
        let expected = arm.value().unwrap() + 3.2 * 10f64.powf(-0.5);
        assert!((g - expected).abs() < 1e-14);
    }

    #[test]
    fn unpulled_arm_has_no_index() {
        let arm = SaturatedMean::new(params());
        assert!(matches!(
            robust_moss_index(&arm, &params()),
            Err(Error::NoSamples)
        ));
        assert!(matches!(
            moss_index(&EmpiricalMean::new(), &params()),
            Err(Error::NoSamples)
        ));
    }

    #[test]
    fn moss_index_examples() {
        let p = params();
        let mut arm = EmpiricalMean::new();
        arm.update(0.0);
        assert!((moss_index(&arm, &p).unwrap() - 1.517_427_129_385_146).abs() < 1e-12);
        for _ in 0..9 {
            arm.update(0.4);
        }
        assert_eq!(moss_index(&arm, &p).unwrap(), arm.value().unwrap());
        for _ in 0..20 {
            arm.update(0.4);
        }
        assert_eq!(moss_index(&arm, &p).unwrap(), arm.value().unwrap());
    }

    #[test]
    fn truncated_radius_example() {
        let r = truncated_ucb_radius(4.0, 10, &params());
        assert!((r - 4.291_932_052_578_694).abs() < 1e-12, "{r}");
        let scaled = ProblemParams {
            moment_scale: 3.0,
            ..params()
        };
        assert!((truncated_ucb_radius(4.0, 10, &scaled) - 3.0 * r).abs() < 1e-12);
        assert!(truncated_ucb_radius(1e12, 10, &params()) < 1e-5);
    }

    #[test]
    fn catoni_needs_finite_variance() {
        let p = ProblemParams::new(100, 2, 1.0, 0.5, 1.1, 2.2).unwrap();
        assert!(matches!(
            Policy::new(PolicyKind::RobustUcbCatoni, p),
            Err(Error::Config(_))
        ));
        let mut arm = CatoniMean::new();
        arm.update(1.0);
        assert!(matches!(
            robust_ucb_catoni_index(&mut arm, 5, &p),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn robust_moss_rejects_bad_tuning() {
        let p = ProblemParams::new(100, 2, 1.0, 1.0, 1.1, 1.0).unwrap();
        assert!(matches!(
            Policy::new(PolicyKind::RobustMoss, p),
            Err(Error::ConditionViolated { .. })
        ));
        assert!(Policy::new(PolicyKind::Moss, p).is_ok());
    }

    #[test]
    fn initialization_sweep_and_counts() {
        for kind in PolicyKind::ALL {
            let mut policy = Policy::new(kind, params()).unwrap();
            for t in 1..=10 {
                assert_eq!(policy.select_arm().unwrap(), t - 1);
                policy.update(t - 1, 0.0).unwrap();
            }
            assert!(policy.pull_counts().iter().all(|&n| n == 1));
            for t in 11..=100 {
                let arm = policy.select_arm().unwrap();
                policy.update(arm, 0.1 * arm as f64).unwrap();
                assert_eq!(policy.pull_counts().iter().sum::<usize>(), t);
            }
            assert!(matches!(
                policy.select_arm(),
                Err(Error::HorizonExceeded { .. })
            ));
        }
    }

    #[test]
    fn ties_go_to_lowest_arm() {
        let p = ProblemParams::new(50, 2, 1.0, 1.0, 1.1, 2.2).unwrap();
        for kind in [
            PolicyKind::RobustMoss,
            PolicyKind::Moss,
            PolicyKind::RobustUcbTruncated,
        ] {
            let mut policy = Policy::new(kind, p).unwrap();
            policy.update(0, 0.2).unwrap();
            policy.update(1, 0.2).unwrap();
            assert_eq!(policy.select_arm().unwrap(), 0, "{kind}");
        }
    }

    #[test]
    fn update_rejects_unknown_arm() {
        let mut policy = Policy::new(PolicyKind::Moss, params()).unwrap();
        assert!(matches!(
            policy.update(10, 0.0),
            Err(Error::ArmOutOfRange { .. })
        ));
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in PolicyKind::ALL {
            assert_eq!(kind.name().parse::<PolicyKind>().unwrap(), kind);
        }
        assert!("ucb1".parse::<PolicyKind>().is_err());
    }
}
