//! Field acquisition: seeded synthetic sampling, text-format persistence,
//! and derivative-free maximum-likelihood hyperparameter fitting.
//!
//! ## Reproducible randomness
//!
//! Synthetic fields must be reproducible across runs, platforms, and
//! reimplementations, so the generator is pinned rather than left to a
//! library default: a ChaCha20 stream keyed from the 64-bit seed by the
//! standard SplitMix64 expansion (`SeedableRng::seed_from_u64`), mapped to
//! uniforms in (0, 1) as `(x >> 11 + 0.5) * 2^-53`, and to standard
//! normals by the Box-Muller transform (`sqrt(-2 ln u1) * cos(2 pi u2)`,
//! then the matching `sin` term). Fields are drawn as `mean + L * w` with
//! `L` the Cholesky factor of the full-grid covariance in column-major
//! location order.

use std::fmt::Write as _;
use std::path::Path as FsPath;

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha20Rng;
use rand_core::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::gp::{self, cholesky_with_jitter, GpHyperParams};
use crate::grid::TransectGrid;

/// Full-covariance sampling guard: refuse grids above this many cells.
pub const MAX_SAMPLE_CELLS: usize = 4096;

/// Everything needed to draw one reproducible synthetic field.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub grid: TransectGrid,
    pub params: GpHyperParams,
    pub seed: u64,
}

/// A realized field: one measurement per grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    grid: TransectGrid,
    /// `rows x cols` matrix; entry `(row-1, col-1)` is cell `(col, row)`.
    values: DMatrix<f64>,
}

impl FieldRealization {
    pub fn new(grid: TransectGrid, values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != grid.rows() || values.ncols() != grid.cols() {
            return Err(Error::DimensionMismatch {
                msg: format!(
                    "field is {}x{} but grid is {}x{}",
                    values.nrows(),
                    values.ncols(),
                    grid.rows(),
                    grid.cols()
                ),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "field contains a non-finite value: {bad}"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &TransectGrid {
        &self.grid
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Measurement at 1-indexed `(col, row)`.
    pub fn value(&self, col: usize, row: usize) -> f64 {
        self.values[(row - 1, col - 1)]
    }

    pub fn sample_mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sample_variance(&self) -> f64 {
        let mean = self.sample_mean();
        self.values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / self.values.len() as f64
    }
}

/// Deterministic standard-normal stream; see the module docs for the
/// exact state transition.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform draw in the open interval (0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw via Box-Muller; pairs are emitted cos-first.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

/// Draws one field realization: `mean + L * w` with `L` the Cholesky
/// factor of the full-grid covariance (column-major location order) and
/// `w` from the seeded normal stream. Identical specs give bit-identical
/// fields.
pub fn sample_field(spec: &FieldSpec) -> Result<FieldRealization> {
    spec.params.validate()?;
    let cells = spec.grid.cells();
    if cells > MAX_SAMPLE_CELLS {
        return Err(Error::TooLarge {
            cells,
            max: MAX_SAMPLE_CELLS,
        });
    }
    let locs = spec.grid.all_locations();
    let cov = gp::cov_matrix(&locs, &spec.params);
    let chol = cholesky_with_jitter(cov.as_matrix())?;
    let mut stream = NormalStream::new(spec.seed);
    let w = DVector::from_fn(cells, |_, _| stream.next_normal());
    let z = chol.l() * w;

    let (r, n) = (spec.grid.rows(), spec.grid.cols());
    let values = DMatrix::from_fn(r, n, |row0, col0| {
        spec.params.prior_mean + z[col0 * r + row0]
    });
    FieldRealization::new(spec.grid.clone(), values)
}

/// Serializes a float with 17 significant digits, enough for bit-exact
/// round-tripping through text.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the field file format: a header line
/// `# transect r=<rows> n=<cols> w1=<spacing_h> w2=<spacing_v>` followed
/// by `r` lines of `n` comma-separated values, top row first.
pub fn save_field_csv(field: &FieldRealization, path: &FsPath) -> Result<()> {
    let mut out = String::new();
    let g = field.grid();
    writeln!(
        out,
        "# transect r={} n={} w1={} w2={}",
        g.rows(),
        g.cols(),
        fmt_f64(g.spacing_h()),
        fmt_f64(g.spacing_v())
    )
    .expect("string write");
    for row in 1..=g.rows() {
        let line: Vec<String> = (1..=g.cols()).map(|col| fmt_f64(field.value(col, row))).collect();
        writeln!(out, "{}", line.join(",")).expect("string write");
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn header_field(token: &str, key: &str, line: usize, col: usize) -> Result<f64> {
    let value = token.strip_prefix(key).ok_or_else(|| Error::Parse {
        line,
        col,
        msg: format!("expected `{key}<value>`, found `{token}`"),
    })?;
    value.parse::<f64>().map_err(|e| Error::Parse {
        line,
        col,
        msg: format!("bad number in `{token}`: {e}"),
    })
}

fn header_int(token: &str, key: &str, line: usize, col: usize) -> Result<usize> {
    let value = token.strip_prefix(key).ok_or_else(|| Error::Parse {
        line,
        col,
        msg: format!("expected `{key}<value>`, found `{token}`"),
    })?;
    value.parse::<usize>().map_err(|e| Error::Parse {
        line,
        col,
        msg: format!("bad integer in `{token}`: {e}"),
    })
}

/// Reads a field file written by [`save_field_csv`].
pub fn load_field_csv(path: &FsPath) -> Result<FieldRealization> {
    let text = std::fs::read_to_string(path)?;
    load_field_str(&text)
}

fn load_field_str(text: &str) -> Result<FieldRealization> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        col: 1,
        msg: "empty field file".into(),
    })?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 6 || tokens[0] != "#" || tokens[1] != "transect" {
        return Err(Error::Parse {
            line: 1,
            col: 1,
            msg: "header must be `# transect r=<int> n=<int> w1=<dec> w2=<dec>`".into(),
        });
    }
    let r = header_int(tokens[2], "r=", 1, 3)?;
    let n = header_int(tokens[3], "n=", 1, 4)?;
    let w1 = header_field(tokens[4], "w1=", 1, 5)?;
    let w2 = header_field(tokens[5], "w2=", 1, 6)?;
    let grid = TransectGrid::new(r, n, w1, w2)?;

    let mut values = DMatrix::zeros(r, n);
    let mut row = 0usize;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if row >= r {
            return Err(Error::Parse {
                line: idx + 1,
                col: 1,
                msg: format!("more than the declared {r} data rows"),
            });
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n {
            return Err(Error::Parse {
                line: idx + 1,
                col: cells.len().min(n) + 1,
                msg: format!("row has {} values, expected {n}", cells.len()),
            });
        }
        for (col0, cell) in cells.iter().enumerate() {
            values[(row, col0)] = cell.trim().parse::<f64>().map_err(|e| Error::Parse {
                line: idx + 1,
                col: col0 + 1,
                msg: format!("bad value `{}`: {e}", cell.trim()),
            })?;
        }
        row += 1;
    }
    if row != r {
        return Err(Error::Parse {
            line: text.lines().count(),
            col: 1,
            msg: format!("found {row} data rows, expected {r}"),
        });
    }
    FieldRealization::new(grid, values)
}

/// Log marginal likelihood of the whole-grid measurements under the given
/// hyperparameters (column-major location order; constant prior mean from
/// `params`): `-z'S^-1 z/2 - ln det(S)/2 - cells ln(2 pi)/2` in nats.
pub fn log_marginal_likelihood(field: &FieldRealization, params: &GpHyperParams) -> Result<f64> {
    params.validate()?;
    let g = field.grid();
    let locs = g.all_locations();
    let cells = locs.len();
    let z = DVector::from_fn(cells, |i, _| {
        let (col0, row0) = (i / g.rows(), i % g.rows());
        field.value(col0 + 1, row0 + 1) - params.prior_mean
    });
    let cov = gp::cov_matrix(&locs, params);
    let chol = cholesky_with_jitter(cov.as_matrix())?;
    let alpha = chol.solve(&z);
    let log_det: f64 = 2.0 * (0..cells).map(|i| chol.l_dirty()[(i, i)].ln()).sum::<f64>();
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    Ok(-0.5 * z.dot(&alpha) - 0.5 * log_det - 0.5 * cells as f64 * ln_2pi)
}

/// Search box and schedule for [`fit_mle`]: per-axis positive ranges
/// scanned on a log grid, then refined by coordinate descent with a
/// halving bracket.
#[derive(Debug, Clone)]
pub struct MleSearch {
    pub signal_variance: (f64, f64),
    pub noise_variance: (f64, f64),
    pub lengthscale_h: (f64, f64),
    pub lengthscale_v: (f64, f64),
    pub points_per_axis: usize,
    pub refine_rounds: usize,
}

impl MleSearch {
    pub fn new(
        signal_variance: (f64, f64),
        noise_variance: (f64, f64),
        lengthscale_h: (f64, f64),
        lengthscale_v: (f64, f64),
    ) -> Self {
        Self {
            signal_variance,
            noise_variance,
            lengthscale_h,
            lengthscale_v,
            points_per_axis: 8,
            refine_rounds: 3,
        }
    }

    /// Data-driven default box: variances bracket the field's sample
    /// variance, length-scales bracket the grid extent.
    pub fn suggest(field: &FieldRealization) -> Self {
        let var = field.sample_variance().max(1e-8);
        let g = field.grid();
        Self::new(
            (var / 20.0, var * 20.0),
            (var * 1e-4, var),
            (0.5 * g.spacing_h(), g.cols() as f64 * g.spacing_h()),
            (0.5 * g.spacing_v(), (g.rows() as f64).max(2.0) * g.spacing_v()),
        )
    }

    fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("signal_variance", self.signal_variance),
            ("noise_variance", self.noise_variance),
            ("lengthscale_h", self.lengthscale_h),
            ("lengthscale_v", self.lengthscale_v),
        ] {
            if !(lo > 0.0 && lo.is_finite() && hi >= lo && hi.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "search range for {name} must satisfy 0 < lo <= hi (got {lo}..{hi})"
                )));
            }
        }
        if self.points_per_axis < 1 {
            return Err(Error::InvalidParameter(
                "points_per_axis must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

fn log_grid(range: (f64, f64), points: usize) -> Vec<f64> {
    if points == 1 || range.1 <= range.0 {
        return vec![range.0];
    }
    let (lo, hi) = (range.0.ln(), range.1.ln());
    (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Fits hyperparameters by maximizing [`log_marginal_likelihood`] with a
/// derivative-free search: a full log-grid scan of the box followed by
/// `refine_rounds` rounds of per-axis coordinate descent on halving
/// brackets. The prior mean is fixed to the field's sample mean.
/// Deterministic for fixed settings; candidates whose covariance is
/// singular are skipped, and if every candidate is skipped the search
/// fails.
pub fn fit_mle(field: &FieldRealization, search: &MleSearch) -> Result<GpHyperParams> {
    search.validate()?;
    let prior_mean = field.sample_mean();
    let make = |axes: [f64; 4]| GpHyperParams {
        signal_variance: axes[0],
        noise_variance: axes[1],
        lengthscale_h: axes[2],
        lengthscale_v: axes[3],
        prior_mean,
    };
    let evaluate = |axes: [f64; 4]| -> Result<Option<f64>> {
        match log_marginal_likelihood(field, &make(axes)) {
            Ok(v) => Ok(Some(v)),
            Err(Error::SingularSystem { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let ranges = [
        search.signal_variance,
        search.noise_variance,
        search.lengthscale_h,
        search.lengthscale_v,
    ];
    let grids: Vec<Vec<f64>> = ranges
        .iter()
        .map(|&r| log_grid(r, search.points_per_axis))
        .collect();

    let mut best: Option<(f64, [f64; 4])> = None;
    for &s2 in &grids[0] {
        for &n2 in &grids[1] {
            for &l1 in &grids[2] {
                for &l2 in &grids[3] {
                    let axes = [s2, n2, l1, l2];
                    if let Some(v) = evaluate(axes)? {
                        if best.is_none_or(|(bv, _)| v > bv) {
                            best = Some((v, axes));
                        }
                    }
                }
            }
        }
    }
    let (mut best_val, mut best_axes) = best.ok_or(Error::SearchFailed)?;

    // Coordinate refinement around the grid winner; the bracket starts at
    // one grid step in log space and halves every round.
    let steps: Vec<f64> = ranges
        .iter()
        .map(|&(lo, hi)| {
            if search.points_per_axis > 1 && hi > lo {
                (hi.ln() - lo.ln()) / (search.points_per_axis - 1) as f64
            } else {
                0.0
            }
        })
        .collect();
    for round in 0..search.refine_rounds {
        for axis in 0..4 {
            let half = steps[axis] * 0.5f64.powi(round as i32);
            if half <= 0.0 {
                continue;
            }
            let center = best_axes[axis].ln();
            for i in 0..search.points_per_axis {
                let frac = if search.points_per_axis == 1 {
                    0.5
                } else {
                    i as f64 / (search.points_per_axis - 1) as f64
                };
                let cand = (center - half + 2.0 * half * frac).exp();
                let mut axes = best_axes;
                axes[axis] = cand;
                if let Some(v) = evaluate(axes)? {
                    if v > best_val {
                        best_val = v;
                        best_axes = axes;
                    }
                }
            }
        }
    }
    Ok(make(best_axes))
}
