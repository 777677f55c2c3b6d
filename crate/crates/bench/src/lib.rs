//! Shared fixtures for the criterion benchmarks.

use transect_core::planners::{Algorithm, PlanRequest};
use transect_core::{GpHyperParams, TransectGrid};

/// A mid-sized anisotropic instance: long horizon, moderate action count.
pub fn standard_request(rows: usize, cols: usize, k: usize, algo: Algorithm) -> PlanRequest {
    let grid = TransectGrid::new(rows, cols, 1.0, 1.0).expect("valid grid");
    let params = GpHyperParams::new(1.0, 0.05, 2.5, 1.0, 0.0).expect("valid params");
    PlanRequest::new(grid, params, k, algo)
}
