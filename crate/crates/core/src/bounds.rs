//! Closed-form loss bounds and operation-count models for the planners.
//!
//! The windowed planners trade optimality for time; the `epsilon_*`
//! evaluators give the worst-case loss of that trade in nats, and
//! [`cost_model`] gives dominant-term operation counts used for budget
//! guards and reports. Cost counts are order-of-magnitude guards, not
//! wall-clock predictions.

use crate::error::{Error, Result};
use crate::grid::binomial;
use crate::planners::Algorithm;

/// Inputs of the loss bounds: problem shape plus the two dimensionless
/// field characteristics they depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// Robots per column.
    pub k: usize,
    /// Planning horizon (columns).
    pub n: usize,
    /// Markov order of the windowed planner.
    pub m: usize,
    /// Rows per column.
    pub r: usize,
    /// Horizontal length-scale normalized by the column spacing
    /// (`l1 / spacing_h`), dimensionless.
    pub lengthscale_norm_h: f64,
    /// Noise-to-signal variance ratio, dimensionless.
    pub eta: f64,
}

impl BoundInputs {
    pub fn new(
        k: usize,
        n: usize,
        m: usize,
        r: usize,
        lengthscale_norm_h: f64,
        eta: f64,
    ) -> Result<Self> {
        if k == 0 || n == 0 || m == 0 || r == 0 {
            return Err(Error::InvalidParameter(format!(
                "bound inputs must be positive integers (k={k}, n={n}, m={m}, r={r})"
            )));
        }
        if !(lengthscale_norm_h > 0.0 && lengthscale_norm_h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "normalized length-scale must be positive and finite (got {lengthscale_norm_h})"
            )));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eta must be nonnegative and finite (got {eta})"
            )));
        }
        Ok(Self {
            k,
            n,
            m,
            r,
            lengthscale_norm_h,
            eta,
        })
    }

    /// Residual correlation factor across a window of `m` columns:
    /// `exp(-(m+1)^2 / (2 * lengthscale_norm_h^2))`, in (0, 1].
    pub fn xi(&self) -> f64 {
        let a = (self.m + 1) as f64 / self.lengthscale_norm_h;
        (-0.5 * a * a).exp()
    }
}

/// Shared log factor `ln(1 + xi^2 / (eta * (1 + eta)))` of both bounds.
fn log_factor(b: &BoundInputs) -> Result<f64> {
    if b.eta <= 0.0 {
        return Err(Error::DegenerateNoise);
    }
    let xi = b.xi();
    Ok((xi * xi / (b.eta * (1.0 + b.eta))).ln_1p())
}

/// Worst-case joint-entropy loss of the order-`m` entropy planner relative
/// to the exact one: `[k(n-m)]^2 * ln(1 + xi^2/(eta(1+eta)))` nats.
/// Exactly zero once the window covers the whole horizon (`m >= n`).
pub fn epsilon_mepp(b: &BoundInputs) -> Result<f64> {
    let log = log_factor(b)?;
    let span = b.n.saturating_sub(b.m) as f64;
    let lead = b.k as f64 * span;
    Ok(lead * lead * log)
}

/// Worst-case mutual-information loss of the order-`m` MI planner:
/// `k(n-2m) * [rn + k(n-2m)/2] * ln(1 + xi^2/(eta(1+eta)))` nats.
/// Exactly zero once `2m >= n`.
pub fn epsilon_m2ipp(b: &BoundInputs) -> Result<f64> {
    let log = log_factor(b)?;
    let span = b.n.saturating_sub(2 * b.m) as f64;
    let lead = b.k as f64 * span;
    let bracket = (b.r * b.n) as f64 + 0.5 * lead;
    Ok(lead * bracket * log)
}

fn sat_pow(base: u128, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

fn cube(x: u128) -> u128 {
    x.saturating_mul(x).saturating_mul(x)
}

/// Dominant-term operation estimate for an algorithm on the given shape,
/// saturating at `u128::MAX`:
///
/// - order-m entropy DP: `chi^(m+1) * (n + (km)^3)`
/// - order-m MI DP: `chi^(2m+1) * (n + 2*(r(2m+1))^3)`
/// - exact entropy: `chi^n * (kn)^3`
/// - exact MI: `chi^n * (rn)^3`
/// - greedy entropy: `n * chi * (kn)^3`
/// - greedy MI: `n * chi * (rn)^3`
///
/// where `chi = C(r, k)` is the per-stage action count.
pub fn cost_model(algo: Algorithm, b: &BoundInputs) -> u128 {
    let chi = binomial(b.r, b.k);
    let (k, n, m, r) = (b.k as u128, b.n as u128, b.m as u128, b.r as u128);
    match algo {
        Algorithm::MeppM => {
            sat_pow(chi, b.m + 1).saturating_mul(n.saturating_add(cube(k * m)))
        }
        Algorithm::M2ippM => sat_pow(chi, 2 * b.m + 1)
            .saturating_mul(n.saturating_add(2u128.saturating_mul(cube(r * (2 * m + 1))))),
        Algorithm::ExactMepp => sat_pow(chi, b.n).saturating_mul(cube(k * n)),
        Algorithm::ExactM2ipp => sat_pow(chi, b.n).saturating_mul(cube(r * n)),
        Algorithm::GMepp => n.saturating_mul(chi).saturating_mul(cube(k * n)),
        Algorithm::GM2ipp => n.saturating_mul(chi).saturating_mul(cube(r * n)),
    }
}
