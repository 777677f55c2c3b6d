//! Gaussian-process model of the sampled field: squared-exponential kernel,
//! posterior inference, and information measures over location sets.
//!
//! All entropies are differential entropies in nats (natural log). All
//! solves go through Cholesky factorization with a bounded jitter-retry
//! policy; explicit matrix inverses appear only in test oracles.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::grid::{Location, TransectGrid};

/// ln(2*pi*e), the per-dimension constant of Gaussian differential entropy.
pub const LN_2PI_E: f64 = 2.837877066409345483560659472811;

/// Hyperparameters of the squared-exponential covariance with anisotropic
/// length-scales and a constant prior mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpHyperParams {
    /// Signal variance (field units squared), > 0.
    pub signal_variance: f64,
    /// I.i.d. measurement-noise variance (field units squared), >= 0.
    pub noise_variance: f64,
    /// Length-scale along the transect (meters), > 0.
    pub lengthscale_h: f64,
    /// Length-scale perpendicular to the transect (meters), > 0.
    pub lengthscale_v: f64,
    /// Constant prior mean (field units).
    pub prior_mean: f64,
}

impl GpHyperParams {
    pub fn new(
        signal_variance: f64,
        noise_variance: f64,
        lengthscale_h: f64,
        lengthscale_v: f64,
        prior_mean: f64,
    ) -> Result<Self> {
        let p = Self {
            signal_variance,
            noise_variance,
            lengthscale_h,
            lengthscale_v,
            prior_mean,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.signal_variance) {
            return Err(Error::InvalidParameter(format!(
                "signal variance must be positive and finite (got {})",
                self.signal_variance
            )));
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be nonnegative and finite (got {})",
                self.noise_variance
            )));
        }
        if !pos(self.lengthscale_h) || !pos(self.lengthscale_v) {
            return Err(Error::InvalidParameter(format!(
                "length-scales must be positive and finite (got {}, {})",
                self.lengthscale_h, self.lengthscale_v
            )));
        }
        if !self.prior_mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "prior mean must be finite (got {})",
                self.prior_mean
            )));
        }
        Ok(())
    }

    /// Noise-to-signal variance ratio.
    pub fn eta(&self) -> f64 {
        self.noise_variance / self.signal_variance
    }

    /// Length-scales normalized by the grid spacings (dimensionless
    /// correlation lengths in units of grid cells).
    pub fn normalized_lengthscales(&self, grid: &TransectGrid) -> (f64, f64) {
        (
            self.lengthscale_h / grid.spacing_h(),
            self.lengthscale_v / grid.spacing_v(),
        )
    }
}

/// A dense symmetric covariance matrix in field units squared.
///
/// Instances built by [`cov_matrix`] and [`posterior_cov`] are symmetric by
/// construction and positive semi-definite up to round-off; downstream
/// factorization applies the jitter policy before giving up.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    m: DMatrix<f64>,
}

impl CovMatrix {
    /// Wraps a raw square matrix, checking symmetry to 1e-12 relative
    /// tolerance. Positive-definiteness is established later, at
    /// factorization time.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                msg: format!("covariance must be square and nonempty, got {}x{}", m.nrows(), m.ncols()),
            });
        }
        let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
        for i in 0..m.nrows() {
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }
}

/// Squared-exponential covariance between two locations:
/// `s2 * exp(-0.5 * ((dh/l1)^2 + (dv/l2)^2))`, plus the noise variance when
/// the two locations are exactly the same coordinates.
pub fn kernel(x: &Location, y: &Location, p: &GpHyperParams) -> f64 {
    let dh = (x.horizontal - y.horizontal) / p.lengthscale_h;
    let dv = (x.vertical - y.vertical) / p.lengthscale_v;
    let cov = p.signal_variance * (-0.5 * (dh * dh + dv * dv)).exp();
    if x == y {
        cov + p.noise_variance
    } else {
        cov
    }
}

fn kernel_block(a: &[Location], b: &[Location], p: &GpHyperParams) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| kernel(&a[i], &b[j], p))
}

/// Prior covariance matrix of a nonempty location list.
pub fn cov_matrix(locs: &[Location], p: &GpHyperParams) -> CovMatrix {
    assert!(!locs.is_empty(), "cov_matrix requires at least one location");
    CovMatrix {
        m: kernel_block(locs, locs, p),
    }
}

/// Cholesky factorization with the jitter policy: on failure, add
/// `1e-10 * (trace/dim)` to the diagonal and retry up to 3 times with
/// 10x escalation before reporting a singular system.
pub(crate) fn cholesky_with_jitter(m: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    if let Some(c) = m.clone().cholesky() {
        return Ok(c);
    }
    let dim = m.nrows();
    let mut jitter = 1e-10 * m.trace() / dim as f64;
    for _ in 0..3 {
        let mut jm = m.clone();
        for i in 0..dim {
            jm[(i, i)] += jitter;
        }
        if let Some(c) = jm.cholesky() {
            return Ok(c);
        }
        jitter *= 10.0;
    }
    Err(Error::SingularSystem { dim })
}

/// Posterior mean at locations `u` given measurements `z_s` at locations
/// `s`, with the constant prior mean from `p`.
pub fn posterior_mean(
    u: &[Location],
    s: &[Location],
    z_s: &[f64],
    p: &GpHyperParams,
) -> Result<DVector<f64>> {
    if s.is_empty() {
        return Err(Error::InvalidParameter(
            "posterior mean requires at least one sampled location".into(),
        ));
    }
    if z_s.len() != s.len() {
        return Err(Error::DimensionMismatch {
            msg: format!("{} measurements for {} sampled locations", z_s.len(), s.len()),
        });
    }
    let sigma_ss = kernel_block(s, s, p);
    let chol = cholesky_with_jitter(&sigma_ss)?;
    let resid = DVector::from_iterator(s.len(), z_s.iter().map(|z| z - p.prior_mean));
    let alpha = chol.solve(&resid);
    let sigma_us = kernel_block(u, s, p);
    Ok(sigma_us * alpha + DVector::from_element(u.len(), p.prior_mean))
}

/// Posterior covariance of `u` given that `s` is observed; independent of
/// the measured values. With `s` empty this is the prior covariance.
pub fn posterior_cov(u: &[Location], s: &[Location], p: &GpHyperParams) -> Result<CovMatrix> {
    assert!(!u.is_empty(), "posterior_cov requires at least one target location");
    if s.is_empty() {
        return Ok(cov_matrix(u, p));
    }
    let sigma_ss = kernel_block(s, s, p);
    let chol = cholesky_with_jitter(&sigma_ss)?;
    let sigma_su = kernel_block(s, u, p);
    let solved = chol.solve(&sigma_su); // Sigma_ss^{-1} Sigma_su
    let mut post = kernel_block(u, u, p) - sigma_su.transpose() * solved;
    // Symmetrize round-off from the solve.
    for i in 0..post.nrows() {
        for j in 0..i {
            let avg = 0.5 * (post[(i, j)] + post[(j, i)]);
            post[(i, j)] = avg;
            post[(j, i)] = avg;
        }
    }
    Ok(CovMatrix { m: post })
}

/// Joint Gaussian entropy `0.5 * ln((2*pi*e)^dim * det(c))` in nats,
/// computed through the Cholesky log-determinant.
pub fn joint_entropy(c: &CovMatrix) -> Result<f64> {
    let chol = cholesky_with_jitter(&c.m)?;
    let l = chol.l_dirty();
    let mut log_det = 0.0;
    for i in 0..c.dim() {
        let pivot = l[(i, i)];
        if pivot <= 0.0 || !pivot.is_finite() {
            return Err(Error::SingularSystem { dim: c.dim() });
        }
        log_det += pivot.ln();
    }
    log_det *= 2.0;
    Ok(0.5 * (c.dim() as f64 * LN_2PI_E + log_det))
}

/// Conditional entropy `H(Z_a | Z_b)` in nats; with `b` empty this is the
/// prior joint entropy of `a`.
pub fn conditional_entropy(a: &[Location], b: &[Location], p: &GpHyperParams) -> Result<f64> {
    joint_entropy(&posterior_cov(a, b, p)?)
}

/// Conditional mutual information `I(Z_a ; Z_b | Z_given)` in nats,
/// computed as `H(Z_b | Z_given) - H(Z_b | Z_given, Z_a)`. Requires `a`
/// and `b` to be nonempty and disjoint; pass an empty `given` for the
/// unconditional form.
pub fn mutual_information(
    a: &[Location],
    b: &[Location],
    given: &[Location],
    p: &GpHyperParams,
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter(
            "mutual information requires nonempty location sets".into(),
        ));
    }
    let shared = a
        .iter()
        .filter(|loc_a| b.iter().any(|loc_b| loc_a == &loc_b))
        .count();
    if shared > 0 {
        return Err(Error::OverlappingSets { shared });
    }
    let mut given_and_a = given.to_vec();
    given_and_a.extend_from_slice(a);
    Ok(conditional_entropy(b, given, p)? - conditional_entropy(b, &given_and_a, p)?)
}
