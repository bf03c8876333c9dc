//! Closed-form regret bounds for Robust MOSS.
//!
//! Constants are transcribed term by term without algebraic
//! simplification. The worst-case bound and the gap-dependent bound both
//! name constants `C1`, `C2`; they are unrelated and live in
//! [`MinimaxConstants`] and [`DistDependentBound`] respectively.

use crate::error::{Error, Result};
use crate::math::{gamma_fn, psi_unchecked, validate_params, ProblemParams};

/// Suboptimality gaps `Delta_k = mu* - mu_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProfile {
    gaps: Vec<f64>,
}

impl GapProfile {
    /// Checks that there is a zero gap and that all gaps lie in `[0, 2u]`.
    pub fn new(gaps: Vec<f64>, moment_scale: f64) -> Result<Self> {
        if gaps.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !gaps.contains(&0.0) {
            return Err(Error::Config(
                "gap profile has no optimal arm (zero gap)".into(),
            ));
        }
        let cap = 2.0 * moment_scale * (1.0 + 1e-12);
        if let Some(&d) = gaps.iter().find(|&&d| !(d >= 0.0 && d <= cap)) {
            return Err(Error::Config(format!(
                "gap {d} outside [0, 2u] = [0, {}]",
                2.0 * moment_scale
            )));
        }
        Ok(Self { gaps })
    }

    /// Gaps of arms with the given means.
    pub fn from_means(means: &[f64], moment_scale: f64) -> Result<Self> {
        let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::new(means.iter().map(|&m| best - m).collect(), moment_scale)
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }
}

/// Lower bound `0.01 u K^(eps/(1+eps)) T^(1/(1+eps))` on the worst-case regret.
pub fn minimax_lower_bound(params: &ProblemParams) -> f64 {
    let eps = params.moment_order;
    0.01 * params.moment_scale
        * (params.arms as f64).powf(eps / (1.0 + eps))
        * (params.horizon as f64).powf(1.0 / (1.0 + eps))
}

/// Constants assembled in the proof of the worst-case bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaxConstants {
    /// `eps Gamma(1/eps+2) [6a/psi(2eta/a)]^((1+eps)/eps) a/ln a`
    pub c1: f64,
    /// `Gamma(1/eps+2) a^(1/eps) [3/psi(6+3eta)]^((1+eps)/eps)`
    pub c2: f64,
    /// `(6+3eta)^((1+eps)/eps)`
    pub c3: f64,
}

/// Worst-case regret bound `C u K^(eps/(1+eps)) (T/e)^(1/(1+eps)) + 2uK`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaxUpperBound {
    pub c: f64,
    /// The three summands of `C`, in printed order.
    pub c_terms: [f64; 3],
    pub constants: MinimaxConstants,
    pub value: f64,
}

/// Evaluates the worst-case bound; fails if the tuning condition does not hold.
pub fn minimax_upper_bound(params: &ProblemParams) -> Result<MinimaxUpperBound> {
    params.check()?;
    validate_params(params).into_result()?;
    let (t, k, u) = (
        params.horizon as f64,
        params.arms as f64,
        params.moment_scale,
    );
    let (eps, a, eta) = (params.moment_order, params.grid_base, params.inflation);
    let g = gamma_fn(1.0 / eps + 2.0)?;
    let e = std::f64::consts::E;
    let big = 6.0 + 3.0 * eta;
    let expo = (1.0 + eps) / eps;

    let term1 = g * (a / big).powf(1.0 / eps) * (3.0 / psi_unchecked(big)).powf(expo);
    let term2 =
        eps * g * big.powf(-1.0 / eps) * (6.0 * a / psi_unchecked(2.0 * eta / a)).powf(expo) * a
            / a.ln();
    let term3 = big * (e + (1.0 + eps) * (-eps / (1.0 + eps)).exp());
    let c = term1 + term2 + term3;

    let constants = MinimaxConstants {
        c1: eps * g * (6.0 * a / psi_unchecked(2.0 * eta / a)).powf(expo) * a / a.ln(),
        c2: g * a.powf(1.0 / eps) * (3.0 / psi_unchecked(big)).powf(expo),
        c3: big.powf(expo),
    };

    let value = c * u * k.powf(eps / (1.0 + eps)) * (t / e).powf(1.0 / (1.0 + eps)) + 2.0 * u * k;
    Ok(MinimaxUpperBound {
        c,
        c_terms: [term1, term2, term3],
        constants,
        value,
    })
}

/// Contribution of one suboptimal arm to the gap-dependent bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmBoundTerm {
    pub arm: usize,
    pub gap: f64,
    /// `(T/(K C1)) (Delta/u)^((1+eps)/eps)`.
    pub log_argument: f64,
    pub value: f64,
    /// Set when `log_argument <= 1`, i.e. the logarithm is not positive.
    pub log_warning: bool,
}

/// Gap-dependent (logarithmic in `T`) regret bound.
#[derive(Debug, Clone, PartialEq)]
pub struct DistDependentBound {
    /// `(4+4eta)^((1+eps)/eps)`
    pub c1: f64,
    /// `max(e C1, C2')`
    pub c2: f64,
    /// `2 Gamma(1/eps+2) (8a/psi(2eta/a))^((1+eps)/eps) a/ln a`
    pub c2_prime: f64,
    pub per_arm: Vec<ArmBoundTerm>,
    pub total: f64,
    pub log_warning: bool,
}

/// Evaluates
/// `sum_{Delta_k > 0} (u^(1+eps)/Delta_k)^(1/eps) [C1 ln((T/(K C1)) (Delta_k/u)^((1+eps)/eps)) + C2 K] + Delta_k`.
///
/// The logarithm is reported as printed, even when negative.
pub fn dist_dependent_bound(
    gaps: &GapProfile,
    params: &ProblemParams,
) -> Result<DistDependentBound> {
    params.check()?;
    validate_params(params).into_result()?;
    let (t, k, u) = (
        params.horizon as f64,
        params.arms as f64,
        params.moment_scale,
    );
    let (eps, a, eta) = (params.moment_order, params.grid_base, params.inflation);
    let expo = (1.0 + eps) / eps;
    let g = gamma_fn(1.0 / eps + 2.0)?;

    let c1 = (4.0 + 4.0 * eta).powf(expo);
    let c2_prime = 2.0 * g * (8.0 * a / psi_unchecked(2.0 * eta / a)).powf(expo) * a / a.ln();
    let c2 = (std::f64::consts::E * c1).max(c2_prime);

    let per_arm: Vec<ArmBoundTerm> = gaps
        .gaps()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0.0)
        .map(|(arm, &d)| {
            let log_argument = t / (k * c1) * (d / u).powf(expo);
            let value =
                (u.powf(1.0 + eps) / d).powf(1.0 / eps) * (c1 * log_argument.ln() + c2 * k) + d;
            ArmBoundTerm {
                arm,
                gap: d,
                log_argument,
                value,
                log_warning: log_argument <= 1.0,
            }
        })
        .collect();
    let total = per_arm.iter().fold(0.0, |acc, a| acc + a.value);
    let log_warning = per_arm.iter().any(|a| a.log_warning);
    Ok(DistDependentBound {
        c1,
        c2,
        c2_prime,
        per_arm,
        total,
        log_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(t: usize, k: usize) -> ProblemParams {
        ProblemParams::new(t, k, 1.0, 1.0, 1.1, 2.2).unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        assert!(
            (minimax_lower_bound(&params(10_000, 10)) - 0.01 * 10f64.sqrt() * 100.0).abs() < 1e-12
        );
        assert!((minimax_lower_bound(&params(1000, 10)) - 1.0).abs() < 1e-12);
        let doubled = ProblemParams {
            moment_scale: 2.0,
            ..params(1000, 10)
        };
        assert!((minimax_lower_bound(&doubled) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_constant_terms() {
        let b = minimax_upper_bound(&params(10_000, 3)).unwrap();
        assert!((b.c_terms[0] - 0.475_861_418_538_522_4).abs() < 1e-9);
        assert!((b.c_terms[1] - 77.949_549_199_781_78).abs() < 1e-7);
        assert!((b.c_terms[2] - 49.534_923_663_342_33).abs() < 1e-9);
        assert!((b.c - 127.960_334_281_662_6).abs() < 1e-7);
    }

    #[test]
    fn printed_constant_matches_proof_assembly() {
        // C = (C1 + C2) (6+3eta)^(-1/eps) + (6+3eta) e + (1+eps) e^(-eps/(1+eps)) C3 (6+3eta)^(-1/eps)
        for eps in [0.3, 0.5, 1.0] {
            for (a, eta) in [(1.1, 2.2), (1.5, 4.0), (2.0, 10.0)] {
                let p = ProblemParams::new(1000, 5, 1.0, eps, a, eta).unwrap();
                let b = minimax_upper_bound(&p).unwrap();
                let big: f64 = 6.0 + 3.0 * eta;
                let scale = big.powf(-1.0 / eps);
                let assembled = (b.constants.c1 + b.constants.c2) * scale
                    + big * std::f64::consts::E
                    + (1.0 + eps) * (-eps / (1.0 + eps)).exp() * b.constants.c3 * scale;
                assert!(
                    (assembled - b.c).abs() <= 1e-10 * b.c,
                    "eps={eps} a={a} eta={eta}"
                );
            }
        }
    }

    #[test]
    fn upper_bound_requires_condition() {
        let bad = ProblemParams::new(1000, 5, 1.0, 1.0, 1.1, 1.0).unwrap();
        assert!(matches!(
            minimax_upper_bound(&bad),
            Err(Error::ConditionViolated { .. })
        ));
        let gaps = GapProfile::new(vec![0.0, 0.3], 1.0).unwrap();
        assert!(dist_dependent_bound(&gaps, &bad).is_err());
    }

    #[test]
    fn upper_bound_increases_in_horizon() {
        let mut prev = 0.0;
        for t in [10, 100, 1000, 10_000, 100_000] {
            let v = minimax_upper_bound(&params(t, 5)).unwrap().value;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn dist_dependent_constants() {
        let gaps = GapProfile::from_means(&[-0.3, 0.0, 0.3], 1.0).unwrap();
        let b = dist_dependent_bound(&gaps, &params(100_000, 3)).unwrap();
        assert!((b.c1 - 163.84).abs() < 1e-10);
        assert!((b.c2_prime - 3_492.139_804_150_224).abs() < 1e-6);
        assert_eq!(b.c2, b.c2_prime);
        assert_eq!(b.per_arm.len(), 2);
        assert!((b.total - b.per_arm.iter().map(|a| a.value).sum::<f64>()).abs() < 1e-9);
    }

    #[test]
    fn dist_dependent_flags_small_log_argument() {
        let gaps = GapProfile::new(vec![0.0, 1e-3], 1.0).unwrap();
        let b = dist_dependent_bound(&gaps, &params(1000, 2)).unwrap();
        assert!(b.log_warning);
        assert!(b.per_arm[0].log_argument <= 1.0);
    }

    #[test]
    fn all_zero_gaps_give_zero() {
        let gaps = GapProfile::new(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        let b = dist_dependent_bound(&gaps, &params(1000, 3)).unwrap();
        assert_eq!(b.total, 0.0);
        assert!(b.total.is_sign_positive());
        assert!(b.per_arm.is_empty());
    }

    #[test]
    fn gap_profile_validation() {
        assert!(GapProfile::new(vec![0.1, 0.2], 1.0).is_err());
        assert!(GapProfile::new(vec![0.0, 2.5], 1.0).is_err());
        assert!(GapProfile::new(vec![0.0, -0.1], 1.0).is_err());
        assert!(GapProfile::new(vec![0.0, 2.0], 1.0).is_ok());
    }
}
