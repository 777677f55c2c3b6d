//! Gaussian-process informative path planning for multi-robot transect
//! sampling.
//!
//! A team of `k` robots sweeps an `r x n` grid column by column, sampling
//! `k` rows per column. The field over the grid is a Gaussian process with
//! a squared-exponential kernel whose horizontal and vertical length-scales
//! may differ. This crate provides:
//!
//! - [`gp`]: kernel, posterior inference, and entropy / mutual-information
//!   measures over arbitrary location sets;
//! - [`grid`]: transect geometry, per-stage action enumeration, paths;
//! - [`planners`]: windowed dynamic programs (`mepp(m)`, `m2ipp(m)`) with
//!   policy tables, greedy baselines, and exact enumeration oracles;
//! - [`bounds`]: closed-form worst-case loss bounds for the windowed
//!   planners and dominant-term cost models;
//! - [`metrics`]: posterior-entropy, mutual-information, and relative
//!   prediction-error metrics for comparing planned paths;
//! - [`fields`]: seeded synthetic field sampling, field-file persistence,
//!   and maximum-likelihood hyperparameter fitting;
//! - [`pathfile`]: plain-text path persistence.
//!
//! Everything is deterministic: solvers break ties lexicographically,
//! generators are seeded, and parallel sections reduce in fixed order.
//!
//! # Example
//!
//! Plan a single-robot path over a 3 x 8 transect with the order-2
//! windowed entropy planner:
//!
//! ```
//! use transect_core::planners::{solve, Algorithm, PlanRequest};
//! use transect_core::{GpHyperParams, TransectGrid};
//!
//! let grid = TransectGrid::new(3, 8, 1.0, 1.0)?;
//! let params = GpHyperParams::new(1.0, 0.05, 2.0, 1.0, 0.0)?;
//! let req = PlanRequest::new(grid, params, 1, Algorithm::MeppM).with_m(2);
//! let plan = solve(&req)?;
//! assert_eq!(plan.path.len(), 8);
//! assert!(plan.objective.is_finite());
//! # Ok::<(), transect_core::Error>(())
//! ```

pub mod bounds;
pub mod error;
pub mod fields;
pub mod gp;
pub mod grid;
pub mod metrics;
pub mod pathfile;
pub mod planners;

pub use error::{Error, Result};
pub use fields::{FieldRealization, FieldSpec};
pub use gp::{CovMatrix, GpHyperParams};
pub use grid::{Location, Path, StageAction, TransectGrid};
pub use planners::{Algorithm, PlanRequest, PlanResult, ValueTable};
