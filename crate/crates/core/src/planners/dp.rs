//! The order-m windowed dynamic programs.
//!
//! Both programs exploit kernel stationarity: the per-stage information
//! terms depend only on the relative geometry of the window and the
//! candidate column, so a single term table (indexed by window code and
//! candidate) is computed at representative columns and reused for every
//! interior stage. Value propagation is then one max-composition sweep per
//! stage, and the first window-length stages are chosen by a joint argmax
//! over all window codes.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gp;
use crate::grid::{action_locations, enumerate_actions, rows_locations, Location, Path, StageAction};

use super::{
    cond_entropy_cost, cube_cost, mi_cost, ArgMax, Counters, PlanRequest, PlanResult, StageTable,
    ValueTable, WindowCoder,
};

fn check_budget(entries: u128, guard: u64) -> Result<()> {
    if entries > guard as u128 {
        return Err(Error::BudgetExceeded {
            required: entries,
            guard,
        });
    }
    Ok(())
}

fn pow_u128(base: u128, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// Selected locations per representative column (1-indexed up to `cols`)
/// and per action index.
fn selected_by_column(
    req: &PlanRequest,
    actions: &[StageAction],
    cols: usize,
) -> Result<Vec<Vec<Vec<Location>>>> {
    (1..=cols)
        .map(|col| {
            actions
                .iter()
                .map(|a| action_locations(&req.grid, col, a))
                .collect()
        })
        .collect()
}

/// Complement locations per representative column and per action index.
fn complements_by_column(
    req: &PlanRequest,
    actions: &[StageAction],
    cols: usize,
) -> Result<Vec<Vec<Vec<Location>>>> {
    let r = req.grid.rows();
    (1..=cols)
        .map(|col| {
            actions
                .iter()
                .map(|a| rows_locations(&req.grid, col, &a.complement(r)))
                .collect()
        })
        .collect()
}

/// Sweeps one stage: for every window, the best candidate under
/// `term + next-stage value`, or `term` alone for the terminal stage.
fn sweep_stage(
    term: &[f64],
    coder: &WindowCoder,
    next: Option<&StageTable>,
    windows: usize,
) -> StageTable {
    let chi = coder.chi;
    let mut st = StageTable {
        values: vec![0.0; windows],
        best: vec![0; windows],
    };
    for w in 0..windows {
        let mut arg = ArgMax::new();
        for c in 0..chi {
            let tail = match next {
                Some(next) => next.values[coder.shift(w, c)],
                None => 0.0,
            };
            arg.offer(term[w * chi + c] + tail, c);
        }
        let (v, c) = arg.finish();
        st.values[w] = v;
        st.best[w] = c as u32;
    }
    st
}

/// Unrolls the planned path from the best first-block window through the
/// per-stage policy tables.
fn unroll(
    best_window: usize,
    coder: &WindowCoder,
    stages: &[StageTable],
    actions: &[StageAction],
) -> Result<Path> {
    let mut idxs = coder.digits(best_window);
    let mut wcode = best_window;
    for stage in stages {
        let c = stage.best[wcode] as usize;
        idxs.push(c);
        wcode = coder.shift(wcode, c);
    }
    Path::new(idxs.into_iter().map(|ai| actions[ai].clone()).collect())
}

/// Order-m maximum-entropy planner. See [`solve_mepp_m_with_policy`].
pub fn solve_mepp_m(req: &PlanRequest) -> Result<PlanResult> {
    solve_mepp_m_with_policy(req).map(|(res, _)| res)
}

/// Order-m maximum-entropy planner, also returning the policy table.
///
/// Backward induction over windows of the previous `m` actions with the
/// stage term `H(Z_candidate | Z_window)`, followed by a joint argmax of
/// `H(Z_first_m_stages) + value-to-go` over all `chi^m` first blocks.
/// The reported objective is the windowed surrogate value
/// `H(Z_{1:m}) + sum_i H(Z_i | Z_window_i)`.
///
/// Counter accounting under the stationarity cache:
/// `entropy_evals = (n-m) * chi^(m+1) + chi^m` (every stage requests
/// `chi^(m+1)` terms, the first block `chi^m`), of which
/// `terms_computed = chi^(m+1) + chi^m` are actually computed.
pub fn solve_mepp_m_with_policy(req: &PlanRequest) -> Result<(PlanResult, ValueTable)> {
    let start = Instant::now();
    req.validate_common()?;
    let m = req.markov_order()?;
    let n = req.grid.cols();
    let k = req.k;
    if m >= n {
        return Err(Error::InvalidParameter(format!(
            "order m={m} must be below the horizon n={n}"
        )));
    }

    let actions = enumerate_actions(req.grid.rows(), k)?;
    let chi = actions.len();
    let windows_u = pow_u128(chi as u128, m);
    check_budget(windows_u.saturating_mul(chi as u128), req.budget_guard)?;
    check_budget(windows_u.saturating_mul((n - m) as u128), req.budget_guard)?;
    let coder = WindowCoder::new(chi, m);
    let windows = coder.count();
    let params = &req.params;

    // Representative geometry: window at columns 1..=m, candidate at m+1.
    let sel = selected_by_column(req, &actions, m + 1)?;

    let gather = |digits: &[usize]| -> Vec<Location> {
        let mut locs = Vec::with_capacity(k * digits.len());
        for (col0, &ai) in digits.iter().enumerate() {
            locs.extend_from_slice(&sel[col0][ai]);
        }
        locs
    };

    // Term table: H(Z_c at column m+1 | Z_w at columns 1..m).
    let term: Vec<f64> = (0..windows)
        .into_par_iter()
        .map(|w| -> Result<Vec<f64>> {
            let given = gather(&coder.digits(w));
            (0..chi)
                .map(|c| gp::conditional_entropy(&sel[m][c], &given, params))
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut counters = Counters::default();
    let term_entries = (windows * chi) as u64;
    counters.entropy_evals = term_entries; // terminal-stage requests
    counters.terms_computed = term_entries;
    counters.factor_cost = term_entries.saturating_mul(cond_entropy_cost(k, k * m));

    // Terminal stage, then interior sweeps n-1 down to m+1.
    let mut stages_rev = Vec::with_capacity(n - m);
    stages_rev.push(sweep_stage(&term, &coder, None, windows));
    for _ in (m + 1..n).rev() {
        counters.entropy_evals = counters.entropy_evals.saturating_add(term_entries);
        let st = sweep_stage(&term, &coder, stages_rev.last(), windows);
        stages_rev.push(st);
    }
    stages_rev.reverse();

    // First block: H(Z_{x_{1:m}}) + V_{m+1}(x_{1:m}) over all chi^m blocks.
    let first: Vec<f64> = (0..windows)
        .into_par_iter()
        .map(|w| gp::joint_entropy(&gp::cov_matrix(&gather(&coder.digits(w)), params)))
        .collect::<Result<Vec<f64>>>()?;
    counters.entropy_evals = counters.entropy_evals.saturating_add(windows as u64);
    counters.terms_computed = counters.terms_computed.saturating_add(windows as u64);
    counters.factor_cost = counters
        .factor_cost
        .saturating_add((windows as u64).saturating_mul(cube_cost(k * m)));

    let mut arg = ArgMax::new();
    for (w, (head, tail)) in first.iter().zip(&stages_rev[0].values).enumerate() {
        arg.offer(head + tail, w);
    }
    let (objective, best_window) = arg.finish();

    let path = unroll(best_window, &coder, &stages_rev, &actions)?;
    let result = PlanResult {
        path,
        objective,
        entropy_evals: counters.entropy_evals,
        mi_evals: 0,
        terms_computed: counters.terms_computed,
        factor_cost: counters.factor_cost,
        wall_time: start.elapsed(),
    };
    Ok((result, ValueTable::new(m, n, chi, actions, stages_rev)))
}

/// Order-m maximum-mutual-information planner. See
/// [`solve_m2ipp_m_with_policy`].
pub fn solve_m2ipp_m(req: &PlanRequest) -> Result<PlanResult> {
    solve_m2ipp_m_with_policy(req).map(|(res, _)| res)
}

/// Order-m maximum-mutual-information planner, also returning the policy
/// table. Windows span the previous `2m` stages.
///
/// Stage terms, at representative columns `1..=2m+1` with the window at
/// columns `1..=2m` and the candidate at column `2m+1`:
///
/// - interior: `I(Z_x[m+1] ; Z_u[1..=2m+1] | Z_x[1..=m])` where the
///   unobserved set pools the complements of all `2m+1` columns;
/// - terminal: `I(Z_x[m+1..=2m+1] ; Z_u[1..=2m+1] | Z_x[1..=m])`;
/// - first block, over all `chi^(2m)` blocks:
///   `I(Z_x[1..=m] ; Z_u[1..=2m]) + value-to-go`.
///
/// The reported objective is the windowed surrogate value (the sum of the
/// selected terms). Counters: `mi_evals = (n-2m) * chi^(2m+1) + chi^(2m)`;
/// `terms_computed` is `chi^(2m+1)` for the terminal table, another
/// `chi^(2m+1)` for the interior table when interior stages exist, plus
/// `chi^(2m)` for the first block.
pub fn solve_m2ipp_m_with_policy(req: &PlanRequest) -> Result<(PlanResult, ValueTable)> {
    let start = Instant::now();
    req.validate_common()?;
    let m = req.markov_order()?;
    let n = req.grid.cols();
    let r = req.grid.rows();
    let k = req.k;
    if k == r {
        return Err(Error::NoUnobserved);
    }
    if 2 * m >= n {
        return Err(Error::InvalidParameter(format!(
            "order m={m} must satisfy 2m < n={n}"
        )));
    }
    let arity = 2 * m;

    let actions = enumerate_actions(r, k)?;
    let chi = actions.len();
    let windows_u = pow_u128(chi as u128, arity);
    check_budget(windows_u.saturating_mul(chi as u128), req.budget_guard)?;
    check_budget(windows_u.saturating_mul((n - arity) as u128), req.budget_guard)?;
    let coder = WindowCoder::new(chi, arity);
    let windows = coder.count();
    let params = &req.params;

    // Representative geometry: columns 1..=2m+1.
    let sel = selected_by_column(req, &actions, arity + 1)?;
    let comp = complements_by_column(req, &actions, arity + 1)?;
    let u_per_col = r - k;

    // Terminal term table: I(Z_x[m+1..=2m+1]; Z_u[all 2m+1 cols] | Z_x[1..=m]).
    let terminal: Vec<f64> = (0..windows)
        .into_par_iter()
        .map(|w| -> Result<Vec<f64>> {
            let digits = coder.digits(w);
            let mut given = Vec::with_capacity(k * m);
            for col0 in 0..m {
                given.extend_from_slice(&sel[col0][digits[col0]]);
            }
            let mut a_head = Vec::with_capacity(k * (m + 1));
            for col0 in m..arity {
                a_head.extend_from_slice(&sel[col0][digits[col0]]);
            }
            let mut b_head = Vec::with_capacity(u_per_col * (arity + 1));
            for col0 in 0..arity {
                b_head.extend_from_slice(&comp[col0][digits[col0]]);
            }
            (0..chi)
                .map(|c| {
                    let mut a = a_head.clone();
                    a.extend_from_slice(&sel[arity][c]);
                    let mut b = b_head.clone();
                    b.extend_from_slice(&comp[arity][c]);
                    gp::mutual_information(&a, &b, &given, params)
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut counters = Counters::default();
    let term_entries = (windows * chi) as u64;
    counters.mi_evals = term_entries; // terminal-stage requests
    counters.terms_computed = term_entries;
    counters.factor_cost = term_entries.saturating_mul(mi_cost(
        k * (m + 1),
        u_per_col * (arity + 1),
        k * m,
    ));

    let mut stages_rev = Vec::with_capacity(n - arity);
    stages_rev.push(sweep_stage(&terminal, &coder, None, windows));

    // Interior term table, only needed when interior stages exist.
    let interior_stage_count = n - arity - 1;
    if interior_stage_count > 0 {
        let interior: Vec<f64> = (0..windows)
            .into_par_iter()
            .map(|w| -> Result<Vec<f64>> {
                let digits = coder.digits(w);
                let mut given = Vec::with_capacity(k * m);
                for col0 in 0..m {
                    given.extend_from_slice(&sel[col0][digits[col0]]);
                }
                let a = &sel[m][digits[m]];
                let mut b_head = Vec::with_capacity(u_per_col * (arity + 1));
                for col0 in 0..arity {
                    b_head.extend_from_slice(&comp[col0][digits[col0]]);
                }
                (0..chi)
                    .map(|c| {
                        let mut b = b_head.clone();
                        b.extend_from_slice(&comp[arity][c]);
                        gp::mutual_information(a, &b, &given, params)
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<f64>>>>()?
            .into_iter()
            .flatten()
            .collect();
        counters.terms_computed = counters.terms_computed.saturating_add(term_entries);
        counters.factor_cost = counters.factor_cost.saturating_add(
            term_entries.saturating_mul(mi_cost(k, u_per_col * (arity + 1), k * m)),
        );
        for _ in 0..interior_stage_count {
            counters.mi_evals = counters.mi_evals.saturating_add(term_entries);
            let st = sweep_stage(&interior, &coder, stages_rev.last(), windows);
            stages_rev.push(st);
        }
    }
    stages_rev.reverse();

    // First block: I(Z_x[1..=m]; Z_u[1..=2m]) + U_{2m+1}(x_{1:2m}).
    let first: Vec<f64> = (0..windows)
        .into_par_iter()
        .map(|w| -> Result<f64> {
            let digits = coder.digits(w);
            let mut a = Vec::with_capacity(k * m);
            for col0 in 0..m {
                a.extend_from_slice(&sel[col0][digits[col0]]);
            }
            let mut b = Vec::with_capacity(u_per_col * arity);
            for col0 in 0..arity {
                b.extend_from_slice(&comp[col0][digits[col0]]);
            }
            gp::mutual_information(&a, &b, &[], params)
        })
        .collect::<Result<Vec<f64>>>()?;
    counters.mi_evals = counters.mi_evals.saturating_add(windows as u64);
    counters.terms_computed = counters.terms_computed.saturating_add(windows as u64);
    counters.factor_cost = counters.factor_cost.saturating_add(
        (windows as u64).saturating_mul(mi_cost(k * m, u_per_col * arity, 0)),
    );

    let mut arg = ArgMax::new();
    for (w, (head, tail)) in first.iter().zip(&stages_rev[0].values).enumerate() {
        arg.offer(head + tail, w);
    }
    let (objective, best_window) = arg.finish();

    let path = unroll(best_window, &coder, &stages_rev, &actions)?;
    let result = PlanResult {
        path,
        objective,
        entropy_evals: 0,
        mi_evals: counters.mi_evals,
        terms_computed: counters.terms_computed,
        factor_cost: counters.factor_cost,
        wall_time: start.elapsed(),
    };
    Ok((result, ValueTable::new(arity, n, chi, actions, stages_rev)))
}
