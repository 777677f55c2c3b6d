//! Acceptance suite: one test per criterion, each ending with a printed
//! `[acceptance] criterion N (...): PASS` line (run with `--nocapture` to
//! see them). Tolerances are pinned in the assertions.
//!
//! Oracles here are independent of the solver code paths: exhaustive
//! enumeration, direct surrogate evaluation at true columns, and the
//! closed-form bounds.

use std::path::Path as FsPath;
use std::process::Command;
use std::time::Instant;

use transect_core::bounds::{cost_model, epsilon_m2ipp, epsilon_mepp, BoundInputs};
use transect_core::fields::{fit_mle, sample_field, FieldSpec, MleSearch, NormalStream};
use transect_core::gp::{self, GpHyperParams};
use transect_core::grid::{
    action_locations, enumerate_actions, rows_locations, Location, Path, StageAction, TransectGrid,
};
use transect_core::metrics::{en_metric, mi_metric, path_entropy, unobserved_locations};
use transect_core::planners::{
    solve_exact_m2ipp, solve_exact_mepp, solve_m2ipp_m, solve_mepp_m, Algorithm, PlanRequest,
    TIE_TOL,
};

fn pass(criterion: usize, name: &str) {
    println!("[acceptance] criterion {criterion} ({name}): PASS");
}

fn rand_params(u: &mut NormalStream, eta_lo: f64, eta_hi: f64) -> GpHyperParams {
    let sig2 = 0.3 + 1.7 * u.next_uniform();
    let eta = eta_lo + (eta_hi - eta_lo) * u.next_uniform();
    GpHyperParams::new(
        sig2,
        eta * sig2,
        0.2 + 2.3 * u.next_uniform(),
        0.2 + 2.3 * u.next_uniform(),
        2.0 * u.next_uniform() - 1.0,
    )
    .unwrap()
}

fn unit_grid(r: usize, n: usize) -> TransectGrid {
    TransectGrid::new(r, n, 1.0, 1.0).unwrap()
}

fn request(r: usize, n: usize, k: usize, params: GpHyperParams, algo: Algorithm) -> PlanRequest {
    PlanRequest::new(unit_grid(r, n), params, k, algo)
}

fn all_paths(chi: usize, n: usize) -> Vec<Vec<usize>> {
    (0..chi.pow(n as u32))
        .map(|mut code| {
            let mut digits = vec![0usize; n];
            for slot in digits.iter_mut().rev() {
                *slot = code % chi;
                code /= chi;
            }
            digits
        })
        .collect()
}

fn argmax_first<I: Iterator<Item = f64>>(values: I) -> usize {
    let mut best = f64::NEG_INFINITY;
    let mut best_i = usize::MAX;
    for (i, v) in values.enumerate() {
        if best_i == usize::MAX || v > best + TIE_TOL {
            best = v;
            best_i = i;
        }
    }
    best_i
}

fn path_of(digits: &[usize], actions: &[StageAction]) -> Path {
    Path::new(digits.iter().map(|&ai| actions[ai].clone()).collect()).unwrap()
}

fn stage_locs(
    grid: &TransectGrid,
    actions: &[StageAction],
    digits: &[usize],
    stages: std::ops::RangeInclusive<usize>,
) -> Vec<Location> {
    let mut out = Vec::new();
    for i in stages {
        out.extend(action_locations(grid, i, &actions[digits[i - 1]]).unwrap());
    }
    out
}

fn stage_comp_locs(
    grid: &TransectGrid,
    actions: &[StageAction],
    digits: &[usize],
    stages: std::ops::RangeInclusive<usize>,
) -> Vec<Location> {
    let r = grid.rows();
    let mut out = Vec::new();
    for i in stages {
        out.extend(rows_locations(grid, i, &actions[digits[i - 1]].complement(r)).unwrap());
    }
    out
}

fn mepp_surrogate(
    grid: &TransectGrid,
    params: &GpHyperParams,
    actions: &[StageAction],
    digits: &[usize],
    m: usize,
) -> f64 {
    let n = digits.len();
    let first = stage_locs(grid, actions, digits, 1..=m);
    let mut total = gp::joint_entropy(&gp::cov_matrix(&first, params)).unwrap();
    for i in m + 1..=n {
        let target = stage_locs(grid, actions, digits, i..=i);
        let given = stage_locs(grid, actions, digits, i - m..=i - 1);
        total += gp::conditional_entropy(&target, &given, params).unwrap();
    }
    total
}

fn m2ipp_surrogate(
    grid: &TransectGrid,
    params: &GpHyperParams,
    actions: &[StageAction],
    digits: &[usize],
    m: usize,
) -> f64 {
    let n = digits.len();
    let first_a = stage_locs(grid, actions, digits, 1..=m);
    let first_b = stage_comp_locs(grid, actions, digits, 1..=2 * m);
    let mut total = gp::mutual_information(&first_a, &first_b, &[], params).unwrap();
    for i in 2 * m + 1..=n - 1 {
        let a = stage_locs(grid, actions, digits, i - m..=i - m);
        let b = stage_comp_locs(grid, actions, digits, i - 2 * m..=i);
        let given = stage_locs(grid, actions, digits, i - 2 * m..=i - m - 1);
        total += gp::mutual_information(&a, &b, &given, params).unwrap();
    }
    let a = stage_locs(grid, actions, digits, n - m..=n);
    let b = stage_comp_locs(grid, actions, digits, n - 2 * m..=n);
    let given = stage_locs(grid, actions, digits, n - 2 * m..=n - m - 1);
    total + gp::mutual_information(&a, &b, &given, params).unwrap()
}

#[test]
fn acceptance_c1_exact_entropy_oracle_equivalence() {
    let started = Instant::now();
    let mut u = NormalStream::new(101);
    for trial in 0..50 {
        let params = rand_params(&mut u, 0.01, 1.0);
        let exact = solve_exact_mepp(&request(3, 4, 1, params, Algorithm::ExactMepp)).unwrap();
        let req = request(3, 4, 1, params, Algorithm::MeppM).with_m(3);
        let dp = solve_mepp_m(&req).unwrap();
        let h_dp = path_entropy(&dp.path, &req.grid, &params).unwrap();
        assert!(
            (exact.objective - h_dp).abs() <= 1e-9,
            "trial {trial}: exact {} vs windowed {}",
            exact.objective,
            h_dp
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "50 instances took {elapsed:?}, budget is 10 s"
    );
    pass(1, "exact-entropy oracle equivalence, 50 instances, <10 s");
}

#[test]
fn acceptance_c2_surrogate_argmax_equivalence() {
    let mut u = NormalStream::new(202);
    let shapes = [
        (3usize, 4usize, 1usize, 1usize),
        (3, 5, 1, 1),
        (3, 5, 1, 2),
        (4, 4, 1, 1),
        (4, 5, 1, 2),
        (4, 4, 2, 1),
    ];
    // Entropy surrogate: 30 instances.
    for trial in 0..30 {
        let (r, n, k, m) = shapes[trial % shapes.len()];
        let params = rand_params(&mut u, 0.01, 1.0);
        let req = request(r, n, k, params, Algorithm::MeppM).with_m(m);
        let dp = solve_mepp_m(&req).unwrap();
        let actions = enumerate_actions(r, k).unwrap();
        assert!(actions.len().pow(n as u32) <= 10_000);
        let paths = all_paths(actions.len(), n);
        let best = argmax_first(
            paths
                .iter()
                .map(|d| mepp_surrogate(&req.grid, &params, &actions, d, m)),
        );
        assert_eq!(
            dp.path,
            path_of(&paths[best], &actions),
            "entropy surrogate argmax mismatch, trial {trial} (r={r} n={n} k={k} m={m})"
        );
    }
    // Mutual-information surrogate: 30 instances on the 2m < n shapes.
    let mi_shapes: Vec<_> = shapes.iter().filter(|&&(_, n, _, m)| 2 * m < n).collect();
    for trial in 0..30 {
        let &&(r, n, k, m) = &mi_shapes[trial % mi_shapes.len()];
        let params = rand_params(&mut u, 0.01, 1.0);
        let req = request(r, n, k, params, Algorithm::M2ippM).with_m(m);
        let dp = solve_m2ipp_m(&req).unwrap();
        let actions = enumerate_actions(r, k).unwrap();
        let paths = all_paths(actions.len(), n);
        let best = argmax_first(
            paths
                .iter()
                .map(|d| m2ipp_surrogate(&req.grid, &params, &actions, d, m)),
        );
        assert_eq!(
            dp.path,
            path_of(&paths[best], &actions),
            "mi surrogate argmax mismatch, trial {trial} (r={r} n={n} k={k} m={m})"
        );
    }
    pass(2, "windowed planners maximize their surrogates, 30+30 instances");
}

#[test]
fn acceptance_c3_loss_bounds_never_violated() {
    let mut u = NormalStream::new(303);
    let mut entropy_checks = 0usize;
    let mut mi_checks = 0usize;
    for _ in 0..100 {
        let r = 2 + (u.next_uniform() * 3.0) as usize; // 2..=4
        let n = 3 + (u.next_uniform() * 3.0) as usize; // 3..=5
        let params = rand_params(&mut u, 0.01, 1.0);
        let eta = params.eta();
        let l1_norm = params.lengthscale_h; // unit spacing

        let exact_h = solve_exact_mepp(&request(r, n, 1, params, Algorithm::ExactMepp)).unwrap();
        for m in [1usize, 2] {
            if m >= n {
                continue;
            }
            let req = request(r, n, 1, params, Algorithm::MeppM).with_m(m);
            let dp = solve_mepp_m(&req).unwrap();
            let h_dp = path_entropy(&dp.path, &req.grid, &params).unwrap();
            let eps =
                epsilon_mepp(&BoundInputs::new(1, n, m, r, l1_norm, eta).unwrap()).unwrap();
            let gap = exact_h.objective - h_dp;
            assert!(gap <= eps + 1e-9, "entropy gap {gap} above bound {eps}");
            entropy_checks += 1;
        }

        let exact_mi = solve_exact_m2ipp(&request(r, n, 1, params, Algorithm::ExactM2ipp)).unwrap();
        for m in [1usize, 2] {
            if 2 * m >= n {
                continue;
            }
            let req = request(r, n, 1, params, Algorithm::M2ippM).with_m(m);
            let dp = solve_m2ipp_m(&req).unwrap();
            let mi_dp = mi_metric(&dp.path, &req.grid, &params).unwrap();
            let eps =
                epsilon_m2ipp(&BoundInputs::new(1, n, m, r, l1_norm, eta).unwrap()).unwrap();
            let gap = exact_mi.objective - mi_dp;
            assert!(gap <= eps + 1e-9, "mi gap {gap} above bound {eps}");
            mi_checks += 1;
        }
    }
    assert!(entropy_checks >= 100 && mi_checks >= 100);
    pass(3, "loss bounds hold on 100 instances for both planners");
}

#[test]
fn acceptance_c4_posterior_variance_floor() {
    let mut u = NormalStream::new(404);
    for trial in 0..1000 {
        let r = 1 + (u.next_uniform() * 4.0) as usize;
        let n = 1 + (u.next_uniform() * 5.0) as usize;
        let grid = TransectGrid::new(
            r,
            n,
            0.5 + 2.0 * u.next_uniform(),
            0.5 + 2.0 * u.next_uniform(),
        )
        .unwrap();
        let params = rand_params(&mut u, 0.0, 1.0); // eta may be zero here
        let cells: Vec<(usize, usize)> = (1..=n)
            .flat_map(|c| (1..=r).map(move |row| (c, row)))
            .collect();
        let probe = (u.next_uniform() * cells.len() as f64) as usize;
        let y = [grid.location(cells[probe].0, cells[probe].1).unwrap()];
        let observed: Vec<Location> = cells
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != probe && u.next_uniform() < 0.5)
            .map(|(_, &(c, row))| grid.location(c, row).unwrap())
            .collect();
        let post = gp::posterior_cov(&y, &observed, &params).unwrap();
        assert!(
            post.get(0, 0) >= params.noise_variance - 1e-9,
            "trial {trial}: variance {} below noise floor {}",
            post.get(0, 0),
            params.noise_variance
        );
    }
    pass(4, "posterior variance >= noise variance on 1000 configurations");
}

#[test]
fn acceptance_c5_information_identities() {
    let mut u = NormalStream::new(505);
    for _ in 0..200 {
        let r = 2 + (u.next_uniform() * 3.0) as usize; // 2..=4
        let n = 2 + (u.next_uniform() * 4.0) as usize; // 2..=5
        let k = 1 + (u.next_uniform() * (r - 1) as f64) as usize; // 1..=r-1
        let grid = unit_grid(r, n);
        let params = rand_params(&mut u, 0.01, 1.0);
        let actions = enumerate_actions(r, k).unwrap();
        let digits: Vec<usize> = (0..n)
            .map(|_| (u.next_uniform() * actions.len() as f64) as usize)
            .collect();
        let path = path_of(&digits, &actions);

        // Chain rule along the path's stages.
        let joint = path_entropy(&path, &grid, &params).unwrap();
        let mut chained = 0.0;
        for i in 1..=n {
            let target = stage_locs(&grid, &actions, &digits, i..=i);
            let given = if i == 1 {
                Vec::new()
            } else {
                stage_locs(&grid, &actions, &digits, 1..=i - 1)
            };
            chained += gp::conditional_entropy(&target, &given, &params).unwrap();
        }
        assert!(
            (joint - chained).abs() <= 1e-8,
            "chain rule: {joint} vs {chained}"
        );

        // MI(path; unobserved) = H(unobserved) - H(unobserved | path).
        let mi = mi_metric(&path, &grid, &params).unwrap();
        let en = en_metric(&path, &grid, &params).unwrap();
        let unobserved = unobserved_locations(&grid, &path).unwrap();
        let h_u = gp::joint_entropy(&gp::cov_matrix(&unobserved, &params)).unwrap();
        assert!(
            (mi - (h_u - en)).abs() <= 1e-8,
            "mi identity: {mi} vs {}",
            h_u - en
        );
    }
    pass(5, "chain rule and MI identity hold on 200 instances");
}

#[test]
fn acceptance_c6_complexity_scaling_split() {
    let params = GpHyperParams::new(1.0, 0.1, 1.5, 1.5, 0.0).unwrap();
    let m = 1usize;
    let (r, k) = (3usize, 1usize);
    let short = solve_mepp_m(&request(r, 20, k, params, Algorithm::MeppM).with_m(m)).unwrap();
    let long = solve_mepp_m(&request(r, 40, k, params, Algorithm::MeppM).with_m(m)).unwrap();
    let evals_ratio = long.entropy_evals as f64 / short.entropy_evals as f64;
    assert!(
        (1.8..=2.2).contains(&evals_ratio),
        "windowed planner request counter ratio {evals_ratio} is not linear in n"
    );

    let chi = 3f64;
    let cost = |n: usize| {
        cost_model(
            Algorithm::ExactMepp,
            &BoundInputs::new(k, n, m, r, 1.0, 0.1).unwrap(),
        ) as f64
    };
    let exact_ratio = cost(40) / cost(20);
    assert!(
        exact_ratio / evals_ratio >= chi.powi(20),
        "exponential/linear split too small: {exact_ratio} vs {evals_ratio}"
    );
    pass(6, "windowed cost linear in n, exact cost exponentially larger");
}

#[test]
fn acceptance_c7_reported_parameter_consistency() {
    // Temperature and plankton hyperparameters as reported; the fit
    // pipeline must accept them and reproduce the noise-to-signal ratios.
    let temperature = GpHyperParams::new(0.1542, 0.0036, 40.45, 16.0, 0.0).unwrap();
    assert!((temperature.eta() - 0.023).abs() <= 1e-3);
    let plankton = GpHyperParams::new(2.152, 0.041, 27.53, 134.64, 0.0).unwrap();
    assert!((plankton.eta() - 0.019).abs() <= 1e-3);

    // Run them through the fitting machinery with collapsed ranges: the
    // fit must accept and return exactly these values.
    let grid = TransectGrid::new(5, 6, 5.0, 5.0).unwrap();
    let field = sample_field(&FieldSpec {
        grid,
        params: temperature,
        seed: 7,
    })
    .unwrap();
    let search = MleSearch::new(
        (0.1542, 0.1542),
        (0.0036, 0.0036),
        (40.45, 40.45),
        (16.0, 16.0),
    );
    let fit = fit_mle(&field, &search).unwrap();
    assert!((fit.eta() - 0.023).abs() <= 1e-3, "fit eta {}", fit.eta());
    pass(7, "reported eta ratios 0.023 and 0.019 reproduced");
}

#[test]
fn acceptance_c8_bound_monotonicity_and_exact_zeros() {
    let mut u = NormalStream::new(808);
    for trial in 0..50 {
        let k = 1 + (u.next_uniform() * 3.0) as usize; // 1..=3
        let r = k + 1 + (u.next_uniform() * (5 - k) as f64) as usize; // k+1..=5
        let n = 2 * (3 + (u.next_uniform() * 3.0) as usize); // even, 6..=10
        let l1_norm = 0.2 + 2.8 * u.next_uniform();
        let eta = 0.01 + 0.99 * u.next_uniform();
        let inputs = |m: usize| BoundInputs::new(k, n, m, r, l1_norm, eta).unwrap();

        let mut prev_e = f64::INFINITY;
        let mut prev_i = f64::INFINITY;
        for m in 1..=(n / 2 - 1) {
            let e = epsilon_mepp(&inputs(m)).unwrap();
            let i = epsilon_m2ipp(&inputs(m)).unwrap();
            assert!(e >= 0.0 && e.is_finite() && i >= 0.0 && i.is_finite());
            assert!(e <= prev_e + 1e-12, "trial {trial}: entropy bound rose at m={m}");
            assert!(i <= prev_i + 1e-12, "trial {trial}: mi bound rose at m={m}");
            prev_e = e;
            prev_i = i;
        }
        assert_eq!(epsilon_mepp(&inputs(n)).unwrap(), 0.0);
        assert_eq!(epsilon_m2ipp(&inputs(n / 2)).unwrap(), 0.0);
    }
    pass(8, "bounds non-increasing in m, exactly zero at full window");
}

#[test]
fn acceptance_c9_cli_determinism_and_round_trip() {
    let bin = env!("CARGO_BIN_EXE_transect");
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        Command::new(bin)
            .current_dir(dir.path())
            .env("SOURCE_DATE_EPOCH", "1700000000")
            .args(args)
            .output()
            .expect("binary runs")
    };
    let run_ok = |args: &[&str]| -> String {
        let out = run(args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    };
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
    let strip = |report: &str| -> String {
        report
            .lines()
            .filter(|l| !l.contains("wall_time"))
            .collect::<Vec<_>>()
            .join("\n")
    };

    let gen_args = [
        "gen", "--rows", "4", "--cols", "10", "--spacing-h", "2", "--spacing-v", "1", "--l1",
        "3.1", "--l2", "1.2", "--sig2", "0.9", "--noise2", "0.04", "--seed", "99", "--out",
        "field.csv",
    ];
    let gen_a = run_ok(&gen_args);
    let field_a = read("field.csv");
    let gen_b = run_ok(&gen_args);
    assert_eq!(field_a, read("field.csv"), "gen is not reproducible");
    assert_eq!(gen_a, gen_b, "gen reports differ");

    let plan_args = [
        "plan", "--algo", "mepp", "--m", "2", "--robots", "2", "--field", "field.csv", "--l1",
        "3.1", "--l2", "1.2", "--sig2", "0.9", "--noise2", "0.04", "--out", "plan.path",
    ];
    let plan_a = run_ok(&plan_args);
    let path_a = read("plan.path");
    let plan_b = run_ok(&plan_args);
    assert_eq!(path_a, read("plan.path"), "plan output is not reproducible");
    assert_eq!(strip(&plan_a), strip(&plan_b), "plan reports differ beyond wall_time");

    // The plan's path file feeds eval untouched, and eval agrees with the
    // plan report's metric values.
    let eval_report = run_ok(&[
        "eval", "--path", "plan.path", "--field", "field.csv", "--l1", "3.1", "--l2", "1.2",
        "--sig2", "0.9", "--noise2", "0.04",
    ]);
    for key in ["en_nats", "mi_nats", "er_dimensionless"] {
        let pick = |report: &str| -> String {
            report
                .lines()
                .find(|l| l.trim_start().starts_with(key))
                .unwrap_or_else(|| panic!("{key} missing"))
                .trim()
                .to_string()
        };
        assert_eq!(pick(&plan_a), pick(&eval_report), "{key} differs across plan/eval");
    }

    // Loading and re-saving a generated field is byte-identical.
    let field = transect_core::fields::load_field_csv(&dir.path().join("field.csv")).unwrap();
    transect_core::fields::save_field_csv(&field, &dir.path().join("resaved.csv")).unwrap();
    assert_eq!(read("field.csv"), read("resaved.csv"));

    let _ = FsPath::new("unused");
    pass(9, "CLI reproducible and gen->plan->eval round-trips bit-exactly");
}
