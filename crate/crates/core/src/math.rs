//! Scalar functions shared by the policies and the regret bounds.
//!
//! Everything here is pure `f64` arithmetic. The index of Robust MOSS is
//! built from [`phi`] and [`conf_radius`]; the saturated mean uses
//! [`h_of`] and [`saturation_point`]; the tuning condition and the bound
//! constants use [`psi`].

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Relative slack used when deciding whether `m` has reached the next power
/// of the grid base.
pub const BLOCK_EPS: f64 = 1e-12;

/// The tuple `(T, K, u, eps, a, eta)` that parameterizes every index and bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    /// Time horizon `T`.
    pub horizon: usize,
    /// Number of arms `K`.
    pub arms: usize,
    /// Moment scale `u`: `E|X|^(1+eps) <= u^(1+eps)` for every arm.
    pub moment_scale: f64,
    /// Moment order `eps` in `(0, 1]`.
    pub moment_order: f64,
    /// Grid base `a > 1` of the geometric sample-count blocks.
    pub grid_base: f64,
    /// Inflation `eta > 0` of the confidence radius.
    pub inflation: f64,
}

impl ProblemParams {
    /// Builds parameters after checking the structural invariants
    /// `T >= K >= 2`, `u > 0`, `0 < eps <= 1`, `a > 1`, `eta > 0`.
    ///
    /// The tuning condition is checked separately by [`validate_params`].
    pub fn new(
        horizon: usize,
        arms: usize,
        moment_scale: f64,
        moment_order: f64,
        grid_base: f64,
        inflation: f64,
    ) -> Result<Self> {
        let params = Self {
            horizon,
            arms,
            moment_scale,
            moment_order,
            grid_base,
            inflation,
        };
        params.check()?;
        Ok(params)
    }

    /// Parameters used for the heavy-tailed three-arm experiment:
    /// `u = 1`, `eps = 1`, `a = 1.1`, `eta = 2.2`.
    pub fn experiment_defaults(horizon: usize, arms: usize) -> Result<Self> {
        Self::new(horizon, arms, 1.0, 1.0, 1.1, 2.2)
    }

    /// Re-checks the structural invariants.
    pub fn check(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if self.arms < 2 {
            return fail(format!(
                "K = {} but at least 2 arms are required",
                self.arms
            ));
        }
        if self.horizon < self.arms {
            return fail(format!(
                "T = {} is smaller than K = {}",
                self.horizon, self.arms
            ));
        }
        if !(self.moment_scale > 0.0 && self.moment_scale.is_finite()) {
            return fail(format!(
                "u = {} must be positive and finite",
                self.moment_scale
            ));
        }
        if !(self.moment_order > 0.0 && self.moment_order <= 1.0) {
            return fail(format!("eps = {} must lie in (0, 1]", self.moment_order));
        }
        if !(self.grid_base > 1.0 && self.grid_base.is_finite()) {
            return fail(format!("a = {} must be greater than 1", self.grid_base));
        }
        if !(self.inflation > 0.0 && self.inflation.is_finite()) {
            return fail(format!(
                "eta = {} must be positive and finite",
                self.inflation
            ));
        }
        Ok(())
    }

    /// `eps / (1 + eps)`, the exponent of the confidence radius.
    #[inline]
    pub fn radius_exponent(&self) -> f64 {
        self.moment_order / (1.0 + self.moment_order)
    }
}

/// `psi(x) = (1 + 1/x) ln(1 + x) - 1`, the Bennett rate function.
///
/// Strictly increasing and positive on `(0, inf)`. A short alternating
/// series is used below `x = 0.01` where the closed form cancels.
pub fn psi(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("psi", x, "x > 0"));
    }
    Ok(psi_unchecked(x))
}

pub(crate) fn psi_unchecked(x: f64) -> f64 {
    if x < 1e-2 {
        // sum_{j>=1} (-1)^(j+1) x^j / (j (j+1))
        let mut term = x;
        let mut acc = 0.0;
        for j in 1..=10u32 {
            let jf = f64::from(j);
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * term / (jf * (jf + 1.0));
            term *= x;
        }
        acc
    } else {
        (1.0 + 1.0 / x) * x.ln_1p() - 1.0
    }
}

/// `ln_+(x) = max(ln x, 1)`. Note the floor is 1, not 0.
pub fn log_plus(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("log_plus", x, "x > 0"));
    }
    Ok(x.ln().max(1.0))
}

/// `phi(n) = ln_+(T / (K n)) / n`.
///
/// `n` is real because the saturation point evaluates `phi` at `h(m)`,
/// which is a non-integer power of `a`.
pub fn phi(n: f64, params: &ProblemParams) -> Result<f64> {
    if !(n > 0.0) {
        return Err(domain("phi", n, "n > 0"));
    }
    Ok(phi_unchecked(n, params))
}

#[inline]
pub(crate) fn phi_unchecked(n: f64, params: &ProblemParams) -> f64 {
    let ratio = params.horizon as f64 / (params.arms as f64 * n);
    ratio.ln().max(1.0) / n
}

/// Confidence radius `c_n = u * phi(n)^(eps / (1 + eps))`.
pub fn conf_radius(n: f64, params: &ProblemParams) -> Result<f64> {
    let p = phi(n, params)?;
    Ok(params.moment_scale * p.powf(params.radius_exponent()))
}

#[inline]
pub(crate) fn conf_radius_unchecked(n: f64, params: &ProblemParams) -> f64 {
    params.moment_scale * phi_unchecked(n, params).powf(params.radius_exponent())
}

/// Geometric block containing a sample count: `a^s <= m < a^(s+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    /// Block exponent `s`.
    pub exponent: u32,
    /// `a^s`, accumulated by repeated multiplication.
    pub lower: f64,
}

impl Block {
    /// The block of `m = 1`.
    pub const FIRST: Block = Block {
        exponent: 0,
        lower: 1.0,
    };

    /// `a^(s+1)`, i.e. `h(m)` for every `m` in this block.
    #[inline]
    pub fn upper(&self, a: f64) -> f64 {
        self.lower * a
    }

    /// Advances the block until it contains `m`. Returns whether it moved.
    ///
    /// Powers are built by repeated multiplication, and `m` counts as
    /// reaching `a^(s+1)` when within a relative `BLOCK_EPS` of it, so
    /// exact integer powers land in the upper block.
    #[inline]
    pub fn advance_to(&mut self, m: usize, a: f64) -> bool {
        let target = m as f64 * (1.0 + BLOCK_EPS);
        let mut moved = false;
        while self.lower * a <= target {
            self.lower *= a;
            self.exponent += 1;
            moved = true;
        }
        moved
    }
}

/// Block of `m` with respect to grid base `a`.
pub fn block_of(m: usize, a: f64) -> Result<Block> {
    if m == 0 {
        return Err(domain("block_of", 0.0, "m >= 1"));
    }
    if !(a > 1.0 && a.is_finite()) {
        return Err(domain("block_of", a, "a > 1"));
    }
    let mut block = Block::FIRST;
    block.advance_to(m, a);
    Ok(block)
}

/// `h(m) = a^(floor(log_a m) + 1)`, so that `m <= h(m) <= a m`.
pub fn h_of(m: usize, a: f64) -> Result<f64> {
    Ok(block_of(m, a)?.upper(a))
}

/// Saturation point `B_m = u * phi(h(m))^(-1 / (1 + eps))`.
pub fn saturation_point(m: usize, params: &ProblemParams) -> Result<f64> {
    let block = block_of(m, params.grid_base)?;
    Ok(saturation_for_block(&block, params))
}

#[inline]
pub(crate) fn saturation_for_block(block: &Block, params: &ProblemParams) -> f64 {
    let h = block.upper(params.grid_base);
    params.moment_scale * phi_unchecked(h, params).powf(-1.0 / (1.0 + params.moment_order))
}

/// Both sides of the tuning condition `eta * psi(2 eta / a) >= 2 a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamCheck {
    pub grid_base: f64,
    pub inflation: f64,
    /// `eta * psi(2 eta / a)`.
    pub lhs: f64,
    /// `2 a`.
    pub rhs: f64,
    pub holds: bool,
}

impl ParamCheck {
    /// Converts a failed check into [`Error::ConditionViolated`].
    pub fn into_result(self) -> Result<Self> {
        if self.holds {
            Ok(self)
        } else {
            Err(Error::ConditionViolated {
                a: self.grid_base,
                eta: self.inflation,
                lhs: self.lhs,
                rhs: self.rhs,
            })
        }
    }
}

/// Evaluates the Robust MOSS tuning condition for `(a, eta)`.
pub fn validate_condition(grid_base: f64, inflation: f64) -> ParamCheck {
    let lhs = if inflation.is_infinite() {
        f64::INFINITY
    } else {
        inflation * psi_unchecked(2.0 * inflation / grid_base)
    };
    let rhs = 2.0 * grid_base;
    ParamCheck {
        grid_base,
        inflation,
        lhs,
        rhs,
        holds: lhs >= rhs,
    }
}

/// Evaluates the tuning condition for a parameter set.
pub fn validate_params(params: &ProblemParams) -> ParamCheck {
    validate_condition(params.grid_base, params.inflation)
}

/// Euler gamma function.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("gamma_fn", x, "x > 0"));
    }
    Ok(statrs::function::gamma::gamma(x))
}
