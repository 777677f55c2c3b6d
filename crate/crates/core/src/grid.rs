//! Transect grid geometry and per-stage action bookkeeping.
//!
//! A transect is an `r x n` lattice of sampling locations traversed
//! column-by-column from left to right. Columns and rows are 1-indexed;
//! column `i`, row `j` sits at physical coordinates
//! `((i-1) * spacing_h, (j-1) * spacing_v)` in meters.
//!
//! A [`StageAction`] is the set of `k` distinct rows a team of `k` robots
//! samples in one column, and a [`Path`] is one action per column.

use crate::error::{Error, Result};

/// A sampling location in meters: `horizontal` runs along the transect,
/// `vertical` runs perpendicular to it.
///
/// Equality is exact coordinate equality. Grid locations are constructed
/// once from integer indices, so two distinct grid cells never compare equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub horizontal: f64,
    pub vertical: f64,
}

impl Location {
    pub fn new(horizontal: f64, vertical: f64) -> Self {
        Self {
            horizontal,
            vertical,
        }
    }
}

/// An `r x n` lattice of sampling locations with physical spacings.
#[derive(Debug, Clone, PartialEq)]
pub struct TransectGrid {
    rows: usize,
    cols: usize,
    spacing_h: f64,
    spacing_v: f64,
}

impl TransectGrid {
    /// Builds a grid. Requires `rows >= 1`, `cols >= 1`, and positive
    /// finite spacings. Transects are expected to be much longer than they
    /// are tall; `cols <= rows` is legal but logged as a warning.
    pub fn new(rows: usize, cols: usize, spacing_h: f64, spacing_v: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid must have at least one row and one column (got {rows} x {cols})"
            )));
        }
        if !(spacing_h > 0.0 && spacing_h.is_finite()) || !(spacing_v > 0.0 && spacing_v.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "grid spacings must be positive and finite (got {spacing_h}, {spacing_v})"
            )));
        }
        if cols <= rows {
            log::warn!(
                "transect grid has cols ({cols}) <= rows ({rows}); \
                 transects are normally much longer than they are tall"
            );
        }
        Ok(Self {
            rows,
            cols,
            spacing_h,
            spacing_v,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn spacing_h(&self) -> f64 {
        self.spacing_h
    }

    pub fn spacing_v(&self) -> f64 {
        self.spacing_v
    }

    /// Total number of grid cells.
    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    /// Physical coordinates of 1-indexed `(col, row)`.
    pub fn location(&self, col: usize, row: usize) -> Result<Location> {
        if col < 1 || col > self.cols {
            return Err(Error::OutOfRange {
                what: format!("column {col} not in 1..={}", self.cols),
            });
        }
        if row < 1 || row > self.rows {
            return Err(Error::OutOfRange {
                what: format!("row {row} not in 1..={}", self.rows),
            });
        }
        Ok(Location::new(
            (col - 1) as f64 * self.spacing_h,
            (row - 1) as f64 * self.spacing_v,
        ))
    }

    /// All grid locations in column-major order (column 1 top-to-bottom
    /// first). This ordering is the crate-wide convention for whole-grid
    /// vectors; information quantities are order-invariant anyway.
    pub fn all_locations(&self) -> Vec<Location> {
        let mut out = Vec::with_capacity(self.cells());
        for col in 1..=self.cols {
            for row in 1..=self.rows {
                out.push(self.location(col, row).expect("indices in range"));
            }
        }
        out
    }
}

/// The rows a team of `k` robots samples in one column: a sorted set of
/// `k` distinct 1-indexed row indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StageAction {
    rows: Vec<u32>,
}

impl StageAction {
    /// Builds an action from row indices, sorting them. Rejects an empty
    /// set, duplicates, and rows outside `1..=r`.
    pub fn new(mut rows: Vec<u32>, r: usize) -> Result<Self> {
        if rows.is_empty() || rows.len() > r {
            return Err(Error::InvalidArity {
                k: rows.len(),
                r,
            });
        }
        rows.sort_unstable();
        if rows.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!(
                "duplicate row index in action {rows:?}"
            )));
        }
        if rows[0] < 1 || rows[rows.len() - 1] as usize > r {
            return Err(Error::OutOfRange {
                what: format!("action rows {rows:?} not all in 1..={r}"),
            });
        }
        Ok(Self { rows })
    }

    /// Builds an action when no grid is in scope to bound the row indices
    /// (e.g. while parsing a path file); range checking against a grid
    /// happens later via [`Path::check_against`].
    pub fn from_rows(mut rows: Vec<u32>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter(
                "action must contain at least one row".into(),
            ));
        }
        rows.sort_unstable();
        if rows.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!(
                "duplicate row index in action {rows:?}"
            )));
        }
        if rows[0] < 1 {
            return Err(Error::OutOfRange {
                what: "row indices are 1-indexed".into(),
            });
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    /// Number of robots, `k`.
    pub fn arity(&self) -> usize {
        self.rows.len()
    }

    /// Sorted rows of this column left unobserved: `[1..=r] \ rows`.
    /// Empty when `k = r`.
    pub fn complement(&self, r: usize) -> Vec<u32> {
        complement_rows(&self.rows, r)
    }
}

/// Sorted set difference `[1..=r] \ rows` for sorted `rows`.
pub fn complement_rows(rows: &[u32], r: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(r.saturating_sub(rows.len()));
    let mut it = rows.iter().peekable();
    for row in 1..=r as u32 {
        if it.peek() == Some(&&row) {
            it.next();
        } else {
            out.push(row);
        }
    }
    out
}

/// Binomial coefficient C(r, k); saturates at `u128::MAX`.
pub fn binomial(r: usize, k: usize) -> u128 {
    if k > r {
        return 0;
    }
    let k = k.min(r - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((r - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// All C(r, k) actions of k distinct rows, in lexicographic order.
///
/// The ordering is load-bearing: planners break value ties by picking the
/// first maximizer in this enumeration order.
pub fn enumerate_actions(r: usize, k: usize) -> Result<Vec<StageAction>> {
    if k < 1 || k > r {
        return Err(Error::InvalidArity { k, r });
    }
    let mut out = Vec::with_capacity(binomial(r, k).min(1 << 24) as usize);
    let mut current: Vec<u32> = (1..=k as u32).collect();
    loop {
        out.push(StageAction {
            rows: current.clone(),
        });
        // Advance to the next k-subset in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if current[i] < (r - k + i + 1) as u32 {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Locations of an action's rows in the given 1-indexed column.
pub fn action_locations(grid: &TransectGrid, col: usize, action: &StageAction) -> Result<Vec<Location>> {
    rows_locations(grid, col, action.rows())
}

/// Locations of arbitrary row indices in the given column (used for both
/// actions and their complements).
pub fn rows_locations(grid: &TransectGrid, col: usize, rows: &[u32]) -> Result<Vec<Location>> {
    rows.iter()
        .map(|&row| grid.location(col, row as usize))
        .collect()
}

/// A full plan: one action per column, all with the same arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    actions: Vec<StageAction>,
}

impl Path {
    /// Builds a path, requiring at least one stage and a uniform arity.
    pub fn new(actions: Vec<StageAction>) -> Result<Self> {
        let first_k = match actions.first() {
            Some(a) => a.arity(),
            None => {
                return Err(Error::InvalidParameter(
                    "path must contain at least one stage".into(),
                ))
            }
        };
        if let Some(bad) = actions.iter().find(|a| a.arity() != first_k) {
            return Err(Error::DimensionMismatch {
                msg: format!(
                    "path mixes arities: expected k={first_k}, found action {:?}",
                    bad.rows()
                ),
            });
        }
        Ok(Self { actions })
    }

    pub fn actions(&self) -> &[StageAction] {
        &self.actions
    }

    /// Number of stages (columns covered).
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Robots per column.
    pub fn k(&self) -> usize {
        self.actions[0].arity()
    }

    /// Checks the path against a grid: one action per column and every row
    /// index within range.
    pub fn check_against(&self, grid: &TransectGrid) -> Result<()> {
        if self.len() != grid.cols() {
            return Err(Error::DimensionMismatch {
                msg: format!(
                    "path has {} stages but grid has {} columns",
                    self.len(),
                    grid.cols()
                ),
            });
        }
        for (i, action) in self.actions.iter().enumerate() {
            if let Some(&row) = action.rows().iter().find(|&&row| row as usize > grid.rows()) {
                return Err(Error::OutOfRange {
                    what: format!("path stage {}: row {row} exceeds r={}", i + 1, grid.rows()),
                });
            }
        }
        Ok(())
    }

    /// All sampled locations in stage order (column-major within the path).
    pub fn locations(&self, grid: &TransectGrid) -> Result<Vec<Location>> {
        let mut out = Vec::with_capacity(self.len() * self.k());
        for (i, action) in self.actions.iter().enumerate() {
            out.extend(action_locations(grid, i + 1, action)?);
        }
        Ok(out)
    }
}

/// Actions of the `m` stages preceding stage `i`: stages
/// `max(1, i-m) ..= i-1`. Truncated (shorter than `m`) near the left
/// boundary; empty for `i = 1`.
pub fn window(path: &Path, i: usize, m: usize) -> Result<&[StageAction]> {
    if i < 1 || i > path.len() {
        return Err(Error::OutOfRange {
            what: format!("stage {i} not in 1..={}", path.len()),
        });
    }
    let lo = i.saturating_sub(m).max(1);
    Ok(&path.actions[lo - 1..i - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_locations_are_scaled_indices() {
        let g = TransectGrid::new(5, 30, 5.0, 5.0).unwrap();
        let loc = g.location(1, 1).unwrap();
        assert_eq!(loc, Location::new(0.0, 0.0));
        // Rightmost column, bottom row of the 25 m x 150 m transect.
        let loc = g.location(30, 5).unwrap();
        assert_eq!(loc, Location::new(145.0, 20.0));
        assert!(g.location(31, 1).is_err());
        assert!(g.location(1, 6).is_err());
    }

    #[test]
    fn grid_location_map_is_injective() {
        let g = TransectGrid::new(4, 7, 2.5, 1.5).unwrap();
        let locs = g.all_locations();
        assert_eq!(locs.len(), 28);
        for (i, a) in locs.iter().enumerate() {
            for b in &locs[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn enumerate_counts_match_binomial() {
        for r in 1..=8 {
            for k in 1..=r {
                let actions = enumerate_actions(r, k).unwrap();
                assert_eq!(actions.len() as u128, binomial(r, k), "r={r} k={k}");
                // Lexicographic and strictly increasing within each action.
                for w in actions.windows(2) {
                    assert!(w[0] < w[1]);
                }
                for a in &actions {
                    assert!(a.rows().windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_actions(5, 2).unwrap().len(), 10);
        let single = enumerate_actions(3, 3).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].rows(), &[1, 2, 3]);
        assert_eq!(enumerate_actions(4, 2).unwrap().len(), 6);
        assert!(matches!(
            enumerate_actions(3, 4),
            Err(Error::InvalidArity { .. })
        ));
        assert!(matches!(
            enumerate_actions(3, 0),
            Err(Error::InvalidArity { .. })
        ));
    }

    #[test]
    fn enumerate_matches_bruteforce_subsets() {
        // Independent enumeration: filter all bitmasks of 4 rows with 2 bits set.
        let mut expect = Vec::new();
        for mask in 0u32..16 {
            if mask.count_ones() == 2 {
                let rows: Vec<u32> = (0..4).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect();
                expect.push(rows);
            }
        }
        expect.sort();
        let got: Vec<Vec<u32>> = enumerate_actions(4, 2)
            .unwrap()
            .iter()
            .map(|a| a.rows().to_vec())
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn complement_partitions_rows() {
        for r in 1..=6 {
            for k in 1..=r {
                for a in enumerate_actions(r, k).unwrap() {
                    let c = a.complement(r);
                    assert_eq!(c.len(), r - k);
                    let mut all: Vec<u32> = a.rows().to_vec();
                    all.extend(&c);
                    all.sort_unstable();
                    assert_eq!(all, (1..=r as u32).collect::<Vec<_>>());
                    // Involution.
                    assert_eq!(complement_rows(&c, r), a.rows());
                }
            }
        }
        let a = StageAction::new(vec![1, 2], 5).unwrap();
        assert_eq!(a.complement(5), vec![3, 4, 5]);
        let full = StageAction::new(vec![1, 2, 3], 3).unwrap();
        assert!(full.complement(3).is_empty());
    }

    #[test]
    fn action_locations_and_complement_cover_column() {
        let g = TransectGrid::new(5, 30, 5.0, 5.0).unwrap();
        let a = StageAction::new(vec![1], 5).unwrap();
        assert_eq!(
            action_locations(&g, 1, &a).unwrap(),
            vec![Location::new(0.0, 0.0)]
        );
        let a = StageAction::new(vec![2, 4], 5).unwrap();
        let mut covered = action_locations(&g, 7, &a).unwrap();
        covered.extend(rows_locations(&g, 7, &a.complement(5)).unwrap());
        assert_eq!(covered.len(), 5);
        for row in 1..=5 {
            assert!(covered.contains(&g.location(7, row).unwrap()));
        }
    }

    #[test]
    fn window_truncates_at_left_boundary() {
        let r = 3;
        let actions: Vec<StageAction> = (0..6)
            .map(|i| StageAction::new(vec![(i % r) as u32 + 1], r).unwrap())
            .collect();
        let path = Path::new(actions.clone()).unwrap();
        assert!(window(&path, 1, 2).unwrap().is_empty());
        assert_eq!(window(&path, 3, 2).unwrap(), &actions[0..2]);
        assert_eq!(window(&path, 5, 2).unwrap(), &actions[2..4]);
        assert_eq!(window(&path, 2, 4).unwrap(), &actions[0..1]);
        assert!(window(&path, 7, 2).is_err());
    }

    #[test]
    fn path_requires_uniform_arity() {
        let a = StageAction::new(vec![1], 3).unwrap();
        let b = StageAction::new(vec![1, 2], 3).unwrap();
        assert!(Path::new(vec![a.clone(), b]).is_err());
        assert!(Path::new(vec![]).is_err());
        let p = Path::new(vec![a.clone(), a]).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.k(), 1);
    }
}
