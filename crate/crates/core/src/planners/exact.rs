//! Exhaustive-enumeration planners: the ground truth for both objectives
//! at desk scale. Cost is `chi^n` objective evaluations, so these refuse
//! to run past the request's budget guard instead of hanging.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gp;
use crate::grid::{action_locations, enumerate_actions, rows_locations, Location, Path, StageAction};

use super::{cube_cost, mi_cost, ArgMax, PlanRequest, PlanResult};

fn pow_checked(chi: usize, n: usize, guard: u64) -> Result<usize> {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.saturating_mul(chi as u128);
    }
    if acc > guard as u128 {
        return Err(Error::BudgetExceeded {
            required: acc,
            guard,
        });
    }
    Ok(acc as usize)
}

fn decode(mut code: usize, chi: usize, digits: &mut [usize]) {
    for slot in digits.iter_mut().rev() {
        *slot = code % chi;
        code /= chi;
    }
}

/// Enumerates all `chi^n` paths in lexicographic order, keeping the first
/// maximizer of `value`. Parallel over the first-stage action with a fixed
/// in-order reduction, so the result is independent of thread count.
fn enumerate_best<F>(chi: usize, n: usize, total: usize, value: F) -> Result<(f64, Vec<usize>)>
where
    F: Fn(&[usize]) -> Result<f64> + Sync,
{
    let block = total / chi;
    let winners: Vec<(f64, usize)> = (0..chi)
        .into_par_iter()
        .map(|first| -> Result<(f64, usize)> {
            let mut arg = ArgMax::new();
            let mut digits = vec![0usize; n];
            for sub in 0..block {
                let code = first * block + sub;
                decode(code, chi, &mut digits);
                arg.offer(value(&digits)?, code);
            }
            Ok(arg.finish())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut arg = ArgMax::new();
    for (v, code) in winners {
        arg.offer(v, code);
    }
    let (best, code) = arg.finish();
    let mut digits = vec![0usize; n];
    decode(code, chi, &mut digits);
    Ok((best, digits))
}

fn path_from(digits: &[usize], actions: &[StageAction]) -> Result<Path> {
    Path::new(digits.iter().map(|&ai| actions[ai].clone()).collect())
}

/// Exhaustive maximum-entropy planning: the path maximizing the joint
/// entropy of its sampled locations, ties broken by lexicographic path
/// order. `entropy_evals = terms_computed = chi^n`.
pub fn solve_exact_mepp(req: &PlanRequest) -> Result<PlanResult> {
    let start = Instant::now();
    req.validate_common()?;
    let n = req.grid.cols();
    let k = req.k;
    let actions = enumerate_actions(req.grid.rows(), k)?;
    let chi = actions.len();
    let total = pow_checked(chi, n, req.budget_guard)?;

    let sel: Vec<Vec<Vec<Location>>> = (1..=n)
        .map(|col| {
            actions
                .iter()
                .map(|a| action_locations(&req.grid, col, a))
                .collect()
        })
        .collect::<Result<_>>()?;
    let params = &req.params;

    let (objective, digits) = enumerate_best(chi, n, total, |digits| {
        let mut locs = Vec::with_capacity(n * k);
        for (col0, &ai) in digits.iter().enumerate() {
            locs.extend_from_slice(&sel[col0][ai]);
        }
        gp::joint_entropy(&gp::cov_matrix(&locs, params))
    })?;

    Ok(PlanResult {
        path: path_from(&digits, &actions)?,
        objective,
        entropy_evals: total as u64,
        mi_evals: 0,
        terms_computed: total as u64,
        factor_cost: (total as u64).saturating_mul(cube_cost(k * n)),
        wall_time: start.elapsed(),
    })
}

/// Exhaustive maximum-mutual-information planning: the path sharing the
/// most information with the unobserved remainder of the grid, ties
/// broken by lexicographic path order. `mi_evals = terms_computed = chi^n`.
pub fn solve_exact_m2ipp(req: &PlanRequest) -> Result<PlanResult> {
    let start = Instant::now();
    req.validate_common()?;
    let n = req.grid.cols();
    let r = req.grid.rows();
    let k = req.k;
    if k == r {
        return Err(Error::NoUnobserved);
    }
    let actions = enumerate_actions(r, k)?;
    let chi = actions.len();
    let total = pow_checked(chi, n, req.budget_guard)?;

    let sel: Vec<Vec<Vec<Location>>> = (1..=n)
        .map(|col| {
            actions
                .iter()
                .map(|a| action_locations(&req.grid, col, a))
                .collect()
        })
        .collect::<Result<_>>()?;
    let comp: Vec<Vec<Vec<Location>>> = (1..=n)
        .map(|col| {
            actions
                .iter()
                .map(|a| rows_locations(&req.grid, col, &a.complement(r)))
                .collect()
        })
        .collect::<Result<_>>()?;
    let params = &req.params;

    let (objective, digits) = enumerate_best(chi, n, total, |digits| {
        let mut x = Vec::with_capacity(n * k);
        let mut u = Vec::with_capacity(n * (r - k));
        for (col0, &ai) in digits.iter().enumerate() {
            x.extend_from_slice(&sel[col0][ai]);
            u.extend_from_slice(&comp[col0][ai]);
        }
        gp::mutual_information(&x, &u, &[], params)
    })?;

    Ok(PlanResult {
        path: path_from(&digits, &actions)?,
        objective,
        entropy_evals: 0,
        mi_evals: total as u64,
        terms_computed: total as u64,
        factor_cost: (total as u64).saturating_mul(mi_cost(k * n, (r - k) * n, 0)),
        wall_time: start.elapsed(),
    })
}
