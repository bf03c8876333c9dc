//! Reward models and the deterministic random stream that drives them.
//!
//! A reward is `mu + S * Y` with an independent fair sign `S` and a
//! non-negative magnitude `Y`. For the heavy-tailed model `Y` follows a
//! generalized Pareto law (location 0, shape `xi`, scale `sigma`), which
//! gives the two-sided density `(1/2 sigma) (1 + xi |x - mu| / sigma)^(-1/xi - 1)`.
//!
//! # Random stream
//!
//! [`RngStream`] is ChaCha20 (`rand_chacha::ChaCha20Rng`), keyed with
//! `seed_from_u64(master_seed)` and positioned on stream `run_index`. Each
//! uniform is the top 53 bits of one `u64` output scaled by `2^-53`. Every
//! reward consumes exactly two outputs, sign first and magnitude second, for
//! every noise kind.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::estimators::sat;
use crate::quadrature::integrate;

/// Deterministic pseudo-random stream for one simulation run.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha20Rng,
    draws: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, run_index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        rng.set_stream(run_index);
        Self { rng, draws: 0 }
    }

    /// Next raw 64-bit output.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Number of `u64` outputs consumed so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }
}

/// Quantile of the one-sided generalized Pareto law with location 0.
///
/// `(sigma/xi) ((1-p)^(-xi) - 1)`, or `-sigma ln(1-p)` when `xi = 0`.
pub fn gpd_quantile(p: f64, shape: f64, scale: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(domain("gpd_quantile", p, "0 <= p < 1"));
    }
    if !(scale > 0.0) {
        return Err(domain("gpd_quantile", scale, "sigma > 0"));
    }
    if !(shape >= 0.0) {
        return Err(domain("gpd_quantile", shape, "xi >= 0"));
    }
    Ok(gpd_quantile_unchecked(p, shape, scale))
}

#[inline]
fn gpd_quantile_unchecked(p: f64, shape: f64, scale: f64) -> f64 {
    let log_tail = (-p).ln_1p();
    if shape == 0.0 {
        -scale * log_tail
    } else {
        scale / shape * (-shape * log_tail).exp_m1()
    }
}

/// CDF of the one-sided generalized Pareto law with location 0.
pub fn gpd_cdf(y: f64, shape: f64, scale: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if shape == 0.0 {
        -(-y / scale).exp_m1()
    } else {
        -(-(shape * y / scale).ln_1p() / shape).exp_m1()
    }
}

/// Distribution of the noise magnitude `|X - mu|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Noise {
    /// Symmetric generalized Pareto noise.
    GpdSymmetric { shape: f64, scale: f64 },
    /// Degenerate arm: the reward is always the mean.
    None,
    /// Uniform noise on `[-half_width, half_width)`.
    BoundedUniform { half_width: f64 },
}

/// Reward distribution of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmModel {
    pub mean: f64,
    pub noise: Noise,
}

/// `E[sat(X, B)]` and `E[sat(X, B)^2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturatedMoments {
    pub mean: f64,
    pub second: f64,
}

const QUAD_ABS_TOL: f64 = 1e-14;
const QUAD_REL_TOL: f64 = 1e-11;

impl ArmModel {
    /// Builds a model whose `(1+eps)`-th moment exists.
    pub fn new(mean: f64, noise: Noise, eps: f64) -> Result<Self> {
        let model = Self { mean, noise };
        model.check(eps)?;
        Ok(model)
    }

    pub fn gpd_symmetric(mean: f64, shape: f64, scale: f64, eps: f64) -> Result<Self> {
        Self::new(mean, Noise::GpdSymmetric { shape, scale }, eps)
    }

    pub fn degenerate(mean: f64) -> Self {
        Self {
            mean,
            noise: Noise::None,
        }
    }

    /// Checks the noise parameters and the existence of `E|X|^(1+eps)`.
    pub fn check(&self, eps: f64) -> Result<()> {
        if !self.mean.is_finite() {
            return Err(Error::Config(format!(
                "arm mean {} is not finite",
                self.mean
            )));
        }
        match self.noise {
            Noise::GpdSymmetric { shape, scale } => {
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::Config(format!("GPD scale {scale} must be positive")));
                }
                if !(shape >= 0.0) {
                    return Err(Error::Config(format!(
                        "GPD shape {shape} must be non-negative"
                    )));
                }
                if shape * (1.0 + eps) >= 1.0 {
                    return Err(Error::DivergentMoment {
                        order: 1.0 + eps,
                        condition: format!(
                            "GPD shape xi = {shape} must satisfy xi < 1/(1+eps) = {}",
                            1.0 / (1.0 + eps)
                        ),
                    });
                }
            }
            Noise::None => {}
            Noise::BoundedUniform { half_width } => {
                if !(half_width >= 0.0 && half_width.is_finite()) {
                    return Err(Error::Config(format!(
                        "uniform half width {half_width} must be non-negative"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Draws one reward: sign first, magnitude second.
    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let sign = if rng.next_uniform() < 0.5 { 1.0 } else { -1.0 };
        let u = rng.next_uniform();
        let magnitude = match self.noise {
            Noise::GpdSymmetric { shape, scale } => gpd_quantile_unchecked(u, shape, scale),
            Noise::None => 0.0,
            Noise::BoundedUniform { half_width } => u * half_width,
        };
        self.mean + sign * magnitude
    }

    /// `E[g(X)]` by quadrature over the magnitude law.
    ///
    /// `growth` bounds the polynomial growth order of `g` (used to smooth
    /// the heavy tail) and `breakpoints` lists magnitudes `y` where
    /// `g(mu + y)` or `g(mu - y)` has a kink.
    pub fn expectation<G: Fn(f64) -> f64>(&self, g: G, growth: f64, breakpoints: &[f64]) -> f64 {
        let mu = self.mean;
        let sym = |y: f64| 0.5 * (g(mu + y) + g(mu - y));
        match self.noise {
            Noise::None => g(mu),
            Noise::BoundedUniform { half_width } => {
                if half_width == 0.0 {
                    return g(mu);
                }
                let cuts = interior_cuts(breakpoints.iter().map(|&y| y / half_width), 0.0, 1.0);
                integrate_pieces(|w| sym(w * half_width), &cuts)
            }
            Noise::GpdSymmetric { shape, scale } => {
                // w = 1 - s^k maps the tail to s -> 0 with Jacobian k s^(k-1).
                let k = if shape * growth < 1.0 {
                    (2.0 / (1.0 - shape * growth)).ceil().max(2.0)
                } else {
                    2.0
                };
                let magnitude = |s: f64| {
                    if shape == 0.0 {
                        -scale * k * s.ln()
                    } else {
                        scale / shape * (-shape * k * s.ln()).exp_m1()
                    }
                };
                let to_s = |y: f64| (1.0 - gpd_cdf(y, shape, scale)).powf(1.0 / k);
                let cuts = interior_cuts(breakpoints.iter().map(|&y| to_s(y)), 0.0, 1.0);
                integrate_pieces(
                    |s| {
                        if s <= 0.0 {
                            return 0.0;
                        }
                        sym(magnitude(s)) * k * s.powf(k - 1.0)
                    },
                    &cuts,
                )
            }
        }
    }

    /// `E|X|^order`, by quadrature.
    pub fn abs_moment(&self, order: f64) -> Result<f64> {
        if let Noise::GpdSymmetric { shape, .. } = self.noise {
            if shape * order >= 1.0 {
                return Err(Error::DivergentMoment {
                    order,
                    condition: format!("GPD shape xi = {shape} must satisfy xi < 1/{order}"),
                });
            }
        }
        let mu = self.mean;
        Ok(self.expectation(|x| x.abs().powf(order), order, &[mu.abs()]))
    }

    /// `E[sat(X, b)]` and `E[sat(X, b)^2]`, by quadrature.
    pub fn saturated_moments(&self, b: f64) -> SaturatedMoments {
        let mu = self.mean;
        let kinks = [mu.abs(), (b - mu).abs(), b + mu.abs()];
        SaturatedMoments {
            mean: self.expectation(|x| sat(x, b), 0.0, &kinks),
            second: self.expectation(|x| sat(x, b).powi(2), 0.0, &kinks),
        }
    }
}

fn interior_cuts(points: impl Iterator<Item = f64>, lo: f64, hi: f64) -> Vec<f64> {
    let mut cuts: Vec<f64> = points.filter(|p| *p > lo && *p < hi).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

fn integrate_pieces<F: Fn(f64) -> f64>(f: F, cuts: &[f64]) -> f64 {
    cuts.windows(2)
        .map(|w| integrate(&f, w[0], w[1], QUAD_ABS_TOL, QUAD_REL_TOL).value)
        .sum()
}

/// Smallest `u` with `E|X|^(1+eps) <= u^(1+eps)`.
///
/// Closed form for `eps = 1`: `sqrt(mu^2 + 2 sigma^2 / ((1 - xi)(1 - 2 xi)))`
/// for GPD noise and `sqrt(mu^2 + w^2/3)` for uniform noise; quadrature
/// otherwise.
pub fn moment_bound_check(model: &ArmModel, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(domain("moment_bound_check", eps, "0 < eps <= 1"));
    }
    model.check(eps)?;
    let mu = model.mean;
    match model.noise {
        Noise::None => Ok(mu.abs()),
        Noise::GpdSymmetric { shape, scale } if eps == 1.0 => {
            let second = mu * mu + 2.0 * scale * scale / ((1.0 - shape) * (1.0 - 2.0 * shape));
            Ok(second.sqrt())
        }
        Noise::BoundedUniform { half_width } if eps == 1.0 => {
            Ok((mu * mu + half_width * half_width / 3.0).sqrt())
        }
        _ => Ok(model.abs_moment(1.0 + eps)?.powf(1.0 / (1.0 + eps))),
    }
}
