//! The six path planners.
//!
//! Two families share one objective each:
//!
//! - entropy: exact enumeration ([`solve_exact_mepp`]), the order-m
//!   windowed dynamic program ([`solve_mepp_m`]), and the full-history
//!   greedy ([`solve_gmepp`]);
//! - mutual information against the unobserved remainder of the grid:
//!   [`solve_exact_m2ipp`], [`solve_m2ipp_m`], [`solve_gm2ipp`].
//!
//! The windowed programs condition each stage on the previous `m` (entropy)
//! or `2m` (mutual information) stages only. Because the kernel is
//! stationary, the per-stage terms are identical at every interior stage,
//! so one term table is computed and reused; value propagation is then a
//! linear number of max-composition sweeps. Solving also yields a policy
//! table ([`ValueTable`]) holding the optimal next action for *every*
//! window, so a plan can be resumed from a diverged history via
//! [`query_policy`] without re-solving.
//!
//! ## Determinism
//!
//! All argmax loops take the first maximizer in lexicographic action
//! order; a candidate replaces the incumbent only when it exceeds it by
//! more than [`TIE_TOL`]. Identical requests therefore produce bit-identical
//! paths, counters, and objectives (wall time excepted), regardless of the
//! rayon thread count: parallel sections write independent slots and are
//! reduced in a fixed order.
//!
//! ## Instrumentation
//!
//! [`PlanResult`] carries deterministic work counters. `entropy_evals` and
//! `mi_evals` count information terms *requested* by the recursions,
//! whether served by the stationarity cache or freshly computed;
//! `terms_computed` counts the computed ones only. `factor_cost`
//! accumulates `dim^3` units per triangular factorization performed, the
//! dominant solve cost. Exact per-algorithm counts are documented on each
//! solver.

mod dp;
mod exact;
mod greedy;

use std::time::Duration;

use crate::error::{Error, Result};
use crate::gp::GpHyperParams;
use crate::grid::{binomial, Path, StageAction, TransectGrid};

pub use dp::{solve_m2ipp_m, solve_m2ipp_m_with_policy, solve_mepp_m, solve_mepp_m_with_policy};
pub use exact::{solve_exact_m2ipp, solve_exact_mepp};
pub use greedy::{solve_gm2ipp, solve_gmepp};

/// Absolute tolerance for argmax value comparisons: a candidate must beat
/// the incumbent by more than this to replace it, which pins tie-breaking
/// to lexicographic order under floating-point noise.
pub const TIE_TOL: f64 = 1e-12;

/// Default cap on enumeration and table sizes (entries).
pub const DEFAULT_BUDGET_GUARD: u64 = 10_000_000;

/// Planner selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Order-m windowed maximum-entropy dynamic program.
    MeppM,
    /// Order-m windowed maximum-mutual-information dynamic program.
    M2ippM,
    /// Greedy maximum entropy conditioned on the full history.
    GMepp,
    /// Greedy maximum mutual information against the rest of the domain.
    GM2ipp,
    /// Exhaustive maximum entropy (desk-scale oracle).
    ExactMepp,
    /// Exhaustive maximum mutual information (desk-scale oracle).
    ExactM2ipp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::MeppM,
        Algorithm::M2ippM,
        Algorithm::GMepp,
        Algorithm::GM2ipp,
        Algorithm::ExactMepp,
        Algorithm::ExactM2ipp,
    ];

    /// Stable external name, as used by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::MeppM => "mepp",
            Algorithm::M2ippM => "m2ipp",
            Algorithm::GMepp => "gmepp",
            Algorithm::GM2ipp => "gm2ipp",
            Algorithm::ExactMepp => "exact-mepp",
            Algorithm::ExactM2ipp => "exact-m2ipp",
        }
    }

    pub fn parse(s: &str) -> Option<Algorithm> {
        Algorithm::ALL.iter().copied().find(|a| a.name() == s)
    }

    /// Whether the algorithm takes a Markov order `m`.
    pub fn windowed(&self) -> bool {
        matches!(self, Algorithm::MeppM | Algorithm::M2ippM)
    }

    /// Whether the objective needs a nonempty unobserved complement (k < r).
    pub fn needs_unobserved(&self) -> bool {
        matches!(
            self,
            Algorithm::M2ippM | Algorithm::GM2ipp | Algorithm::ExactM2ipp
        )
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A planning problem: grid geometry, field hyperparameters, team size,
/// algorithm choice, and resource guard.
#[derive(Debug, Clone)]
pub struct PlanRequest {
    pub grid: TransectGrid,
    pub params: GpHyperParams,
    /// Robots per column.
    pub k: usize,
    pub algorithm: Algorithm,
    /// Markov order; required by the windowed algorithms, ignored otherwise.
    pub m: Option<usize>,
    /// Maximum permitted enumeration/table size in entries.
    pub budget_guard: u64,
}

impl PlanRequest {
    pub fn new(grid: TransectGrid, params: GpHyperParams, k: usize, algorithm: Algorithm) -> Self {
        Self {
            grid,
            params,
            k,
            algorithm,
            m: None,
            budget_guard: DEFAULT_BUDGET_GUARD,
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_budget_guard(mut self, guard: u64) -> Self {
        self.budget_guard = guard;
        self
    }

    /// Per-stage action count `chi = C(r, k)`.
    pub fn chi(&self) -> u128 {
        binomial(self.grid.rows(), self.k)
    }

    /// Validates the request against its chosen algorithm's preconditions.
    pub fn validate(&self) -> Result<()> {
        self.validate_common()?;
        if self.algorithm.needs_unobserved() && self.k == self.grid.rows() {
            return Err(Error::NoUnobserved);
        }
        match self.algorithm {
            Algorithm::MeppM => {
                let m = self.markov_order()?;
                if m >= self.grid.cols() {
                    return Err(Error::InvalidParameter(format!(
                        "order m={m} must be below the horizon n={}",
                        self.grid.cols()
                    )));
                }
            }
            Algorithm::M2ippM => {
                let m = self.markov_order()?;
                if 2 * m >= self.grid.cols() {
                    return Err(Error::InvalidParameter(format!(
                        "order m={m} must satisfy 2m < n={}",
                        self.grid.cols()
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub(crate) fn validate_common(&self) -> Result<()> {
        self.params.validate()?;
        if self.k < 1 || self.k > self.grid.rows() {
            return Err(Error::InvalidArity {
                k: self.k,
                r: self.grid.rows(),
            });
        }
        Ok(())
    }

    pub(crate) fn markov_order(&self) -> Result<usize> {
        match self.m {
            Some(m) if m >= 1 => Ok(m),
            Some(m) => Err(Error::InvalidParameter(format!(
                "Markov order must be at least 1 (got {m})"
            ))),
            None => Err(Error::InvalidParameter(
                "this algorithm requires a Markov order m".into(),
            )),
        }
    }
}

/// A planned path with its objective value and work counters.
///
/// `objective` is the algorithm's *own* criterion: the exact solvers report
/// the true joint entropy / mutual information of the returned path; the
/// windowed solvers report their windowed surrogate value; the greedy
/// entropy solver reports the accumulated stage values (which telescope to
/// the path's joint entropy) and the greedy MI solver its final-stage
/// value. Cross-algorithm comparisons should use the `metrics` module.
#[derive(Debug, Clone)]
pub struct PlanResult {
    pub path: Path,
    /// The algorithm's own criterion value, nats.
    pub objective: f64,
    /// Entropy terms requested by the recursion (cache hits included).
    pub entropy_evals: u64,
    /// Mutual-information terms requested (cache hits included).
    pub mi_evals: u64,
    /// Information terms actually computed at the GP level.
    pub terms_computed: u64,
    /// Sum of dim^3 over performed factorizations; deterministic work units.
    pub factor_cost: u64,
    pub wall_time: Duration,
}

/// Dispatches on `req.algorithm`.
pub fn solve(req: &PlanRequest) -> Result<PlanResult> {
    match req.algorithm {
        Algorithm::MeppM => solve_mepp_m(req),
        Algorithm::M2ippM => solve_m2ipp_m(req),
        Algorithm::GMepp => solve_gmepp(req),
        Algorithm::GM2ipp => solve_gm2ipp(req),
        Algorithm::ExactMepp => solve_exact_mepp(req),
        Algorithm::ExactM2ipp => solve_exact_m2ipp(req),
    }
}

/// First-maximizer-wins comparison: `candidate` must exceed `best` by more
/// than [`TIE_TOL`] to replace it.
#[inline]
pub(crate) fn improves(candidate: f64, best: f64) -> bool {
    candidate > best + TIE_TOL
}

/// Deterministic work counters threaded through the solvers.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Counters {
    pub entropy_evals: u64,
    pub mi_evals: u64,
    pub terms_computed: u64,
    pub factor_cost: u64,
}

/// `dim^3` factorization cost units.
#[inline]
pub(crate) fn cube_cost(dim: usize) -> u64 {
    (dim as u64).saturating_pow(3)
}

/// Cost units of one conditional entropy H(a | b): factor the conditioning
/// block, then the posterior block.
#[inline]
pub(crate) fn cond_entropy_cost(target: usize, given: usize) -> u64 {
    cube_cost(given).saturating_add(cube_cost(target))
}

/// Cost units of one mutual-information term I(a ; b | given), evaluated
/// as H(b | given) - H(b | given, a).
#[inline]
pub(crate) fn mi_cost(a: usize, b: usize, given: usize) -> u64 {
    cond_entropy_cost(b, given).saturating_add(cond_entropy_cost(b, given + a))
}

/// Argmax state for sequential folds in enumeration order.
pub(crate) struct ArgMax {
    pub value: f64,
    pub index: usize,
    seen: bool,
}

impl ArgMax {
    pub fn new() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            index: 0,
            seen: false,
        }
    }

    /// Offers a candidate; earlier offers win ties.
    pub fn offer(&mut self, value: f64, index: usize) {
        if !self.seen || improves(value, self.value) {
            self.value = value;
            self.index = index;
            self.seen = true;
        }
    }

    pub fn finish(self) -> (f64, usize) {
        debug_assert!(self.seen, "argmax over empty candidate set");
        (self.value, self.index)
    }
}

/// Per-stage action policy of a solved windowed program.
///
/// For every stage from `first_stage` to the horizon and every possible
/// window of the previous `arity` actions, the table stores the optimal
/// value-to-go and the optimal next action. Windows are dense: all
/// `chi^arity` of them are populated.
#[derive(Debug, Clone)]
pub struct ValueTable {
    arity: usize,
    first_stage: usize,
    horizon: usize,
    chi: usize,
    actions: Vec<StageAction>,
    /// `stages[j]` holds stage `first_stage + j`; the last entry is the
    /// terminal stage `horizon`.
    stages: Vec<StageTable>,
}

#[derive(Debug, Clone)]
pub(crate) struct StageTable {
    pub values: Vec<f64>,
    pub best: Vec<u32>,
}

impl ValueTable {
    pub(crate) fn new(
        arity: usize,
        horizon: usize,
        chi: usize,
        actions: Vec<StageAction>,
        stages: Vec<StageTable>,
    ) -> Self {
        Self {
            arity,
            first_stage: arity + 1,
            horizon,
            chi,
            actions,
            stages,
        }
    }

    /// Window length: `m` for the entropy program, `2m` for the MI program.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Earliest stage with a policy entry (`arity + 1`).
    pub fn first_stage(&self) -> usize {
        self.first_stage
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Number of windows per stage, `chi^arity`.
    pub fn window_count(&self) -> usize {
        self.stages[0].values.len()
    }

    /// Value-to-go at `stage` for the given window of previous actions.
    pub fn value(&self, stage: usize, window: &[StageAction]) -> Result<f64> {
        let (table, code) = self.locate(stage, window)?;
        Ok(table.values[code])
    }

    /// Optimal next action at `stage` for the given window.
    pub fn best_next(&self, stage: usize, window: &[StageAction]) -> Result<StageAction> {
        let (table, code) = self.locate(stage, window)?;
        Ok(self.actions[table.best[code] as usize].clone())
    }

    fn locate(&self, stage: usize, window: &[StageAction]) -> Result<(&StageTable, usize)> {
        if stage < self.first_stage || stage > self.horizon {
            return Err(Error::OutOfRange {
                what: format!(
                    "stage {stage} outside policy range {}..={}",
                    self.first_stage, self.horizon
                ),
            });
        }
        let code = self.encode(window)?;
        Ok((&self.stages[stage - self.first_stage], code))
    }

    fn encode(&self, window: &[StageAction]) -> Result<usize> {
        if window.len() != self.arity {
            return Err(Error::UnknownWindow {
                why: format!(
                    "window has {} actions but the table arity is {}",
                    window.len(),
                    self.arity
                ),
            });
        }
        let mut code = 0usize;
        for action in window {
            let idx = self
                .actions
                .binary_search(action)
                .map_err(|_| Error::UnknownWindow {
                    why: format!("action {:?} is not a valid stage action here", action.rows()),
                })?;
            code = code * self.chi + idx;
        }
        Ok(code)
    }
}

/// Looks up the optimal next action for an arbitrary window of previous
/// actions at the given stage. This is how a team replans after an external
/// disturbance pushed it off the planned path: no re-solve needed.
pub fn query_policy(table: &ValueTable, stage: usize, window: &[StageAction]) -> Result<StageAction> {
    table.best_next(stage, window)
}

/// Window-code arithmetic shared by the dynamic programs: codes are base
/// `chi` numerals with the oldest action in the most significant digit, so
/// numeric order equals lexicographic window order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WindowCoder {
    pub chi: usize,
    pub arity: usize,
    /// `chi^(arity-1)`, the modulus that drops the oldest action.
    tail: usize,
}

impl WindowCoder {
    pub fn new(chi: usize, arity: usize) -> Self {
        let tail = chi.pow((arity - 1) as u32);
        Self { chi, arity, tail }
    }

    pub fn count(&self) -> usize {
        self.tail * self.chi
    }

    /// Window after appending candidate `c` and dropping the oldest action.
    #[inline]
    pub fn shift(&self, code: usize, c: usize) -> usize {
        (code % self.tail) * self.chi + c
    }

    /// Action indices of a window code, oldest first.
    pub fn digits(&self, mut code: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.arity];
        for slot in out.iter_mut().rev() {
            *slot = code % self.chi;
            code /= self.chi;
        }
        out
    }
}
