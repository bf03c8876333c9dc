//! Shared fixtures for the benchmarks.

use robust_moss::{ArmModel, RngStream};

pub const MEANS: [f64; 3] = [-0.3, 0.0, 0.3];

/// The three heavy-tailed arms of the reference experiment.
pub fn experiment_env() -> Vec<ArmModel> {
    MEANS
        .iter()
        .map(|&mu| ArmModel::gpd_symmetric(mu, 0.33, 0.32, 1.0).expect("valid arm"))
        .collect()
}

/// `n` draws from the best arm of the reference experiment.
pub fn heavy_samples(n: usize, seed: u64) -> Vec<f64> {
    let arm = experiment_env()[2];
    let mut rng = RngStream::new(seed, 0);
    (0..n).map(|_| arm.sample(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_deterministic() {
        assert_eq!(heavy_samples(10, 1), heavy_samples(10, 1));
        assert_eq!(experiment_env().len(), 3);
    }
}
