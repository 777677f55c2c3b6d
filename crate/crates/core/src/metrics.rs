//! Evaluation metrics for planned paths.
//!
//! EN and MI are geometry-only (they depend on the kernel, never on
//! measured values); ER compares posterior-mean predictions against a
//! field realization's ground truth.

use crate::error::{Error, Result};
use crate::fields::FieldRealization;
use crate::gp::{self, GpHyperParams};
use crate::grid::{Location, Path, TransectGrid};

/// Locations the path leaves unobserved, column-major (column 1
/// top-to-bottom first). Errors with [`Error::NoUnobserved`] when `k = r`.
pub fn unobserved_locations(grid: &TransectGrid, path: &Path) -> Result<Vec<Location>> {
    path.check_against(grid)?;
    let r = grid.rows();
    if path.k() == r {
        return Err(Error::NoUnobserved);
    }
    let mut out = Vec::with_capacity(grid.cols() * (r - path.k()));
    for (col0, action) in path.actions().iter().enumerate() {
        for row in action.complement(r) {
            out.push(grid.location(col0 + 1, row as usize)?);
        }
    }
    Ok(out)
}

/// Like [`unobserved_locations`] but returning `(col, row)` index pairs,
/// for reading measurements out of a field realization.
fn unobserved_cells(grid: &TransectGrid, path: &Path) -> Result<Vec<(usize, usize)>> {
    path.check_against(grid)?;
    let r = grid.rows();
    if path.k() == r {
        return Err(Error::NoUnobserved);
    }
    let mut out = Vec::with_capacity(grid.cols() * (r - path.k()));
    for (col0, action) in path.actions().iter().enumerate() {
        for row in action.complement(r) {
            out.push((col0 + 1, row as usize));
        }
    }
    Ok(out)
}

/// Posterior entropy of everything the path does not sample, given the
/// path: `H(Z_unobserved | Z_path)` in nats. Measurement-free.
pub fn en_metric(path: &Path, grid: &TransectGrid, params: &GpHyperParams) -> Result<f64> {
    let u = unobserved_locations(grid, path)?;
    let x = path.locations(grid)?;
    gp::conditional_entropy(&u, &x, params)
}

/// Mutual information between the path and everything it does not sample:
/// `I(Z_path ; Z_unobserved)` in nats. Measurement-free.
pub fn mi_metric(path: &Path, grid: &TransectGrid, params: &GpHyperParams) -> Result<f64> {
    let u = unobserved_locations(grid, path)?;
    let x = path.locations(grid)?;
    gp::mutual_information(&x, &u, &[], params)
}

/// Joint entropy of the path's own sampled locations, `H(Z_path)` in nats:
/// the exact maximum-entropy objective evaluated on an arbitrary path.
pub fn path_entropy(path: &Path, grid: &TransectGrid, params: &GpHyperParams) -> Result<f64> {
    path.check_against(grid)?;
    let x = path.locations(grid)?;
    gp::joint_entropy(&gp::cov_matrix(&x, params))
}

/// Mean-squared relative prediction error at the unobserved locations:
/// `||z_u - mu_{u|x}||^2 / (mean(z_u)^2 * n(r-k))`, dimensionless.
///
/// The posterior mean uses the constant prior mean carried by `params`;
/// callers that have not fitted one usually plug in the sample mean of the
/// path's own measurements.
pub fn er_metric(path: &Path, field: &FieldRealization, params: &GpHyperParams) -> Result<f64> {
    let grid = field.grid();
    let cells = unobserved_cells(grid, path)?;
    let u: Vec<Location> = cells
        .iter()
        .map(|&(col, row)| grid.location(col, row))
        .collect::<Result<_>>()?;
    let z_u: Vec<f64> = cells
        .iter()
        .map(|&(col, row)| field.value(col, row))
        .collect();

    let x = path.locations(grid)?;
    let mut z_x = Vec::with_capacity(x.len());
    for (col0, action) in path.actions().iter().enumerate() {
        for &row in action.rows() {
            z_x.push(field.value(col0 + 1, row as usize));
        }
    }

    let mu_bar = z_u.iter().sum::<f64>() / z_u.len() as f64;
    if mu_bar.abs() < 1e-12 {
        return Err(Error::ZeroMeanField);
    }
    let predicted = gp::posterior_mean(&u, &x, &z_x, params)?;
    let sq_err: f64 = z_u
        .iter()
        .zip(predicted.iter())
        .map(|(z, p)| (z - p) * (z - p))
        .sum();
    Ok(sq_err / (mu_bar * mu_bar * z_u.len() as f64))
}
