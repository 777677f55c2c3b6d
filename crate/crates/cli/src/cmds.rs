//! The five subcommands. Each one prints a structured report to stdout;
//! file outputs (fields, paths, sweep data) go wherever `--out` points.

use transect_core::bounds::{cost_model, epsilon_m2ipp, epsilon_mepp, BoundInputs};
use transect_core::fields::{
    fit_mle, load_field_csv, sample_field, save_field_csv, FieldRealization, FieldSpec, MleSearch,
};
use transect_core::metrics::{en_metric, er_metric, mi_metric};
use transect_core::pathfile::{load_path_file, save_path_file};
use transect_core::planners::{solve, Algorithm, PlanRequest, PlanResult};
use transect_core::{GpHyperParams, Path, TransectGrid};

use crate::report::Report;
use crate::{BenchArgs, BoundArgs, CliError, EvalArgs, GenArgs, GridArgs, ParamArgs, PlanArgs};

type CmdResult = Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn grid_from(args: &GridArgs) -> Result<TransectGrid, CliError> {
    let rows = args
        .rows
        .ok_or_else(|| usage("--rows is required when no --field is given"))?;
    let cols = args
        .cols
        .ok_or_else(|| usage("--cols is required when no --field is given"))?;
    Ok(TransectGrid::new(rows, cols, args.spacing_h, args.spacing_v)?)
}

fn params_from(args: &ParamArgs) -> Result<GpHyperParams, CliError> {
    fn need(name: &str, v: Option<f64>) -> Result<f64, CliError> {
        v.ok_or_else(|| usage(format!("--{name} is required")))
    }
    Ok(GpHyperParams::new(
        need("sig2", args.sig2)?,
        need("noise2", args.noise2)?,
        need("l1", args.l1)?,
        need("l2", args.l2)?,
        args.mean.unwrap_or(0.0),
    )?)
}

fn parse_algo(name: &str) -> Result<Algorithm, CliError> {
    Algorithm::parse(name).ok_or_else(|| {
        usage(format!(
            "unknown algorithm `{name}`; expected one of mepp, m2ipp, gmepp, gm2ipp, exact-mepp, exact-m2ipp"
        ))
    })
}

fn echo_grid(rep: &mut Report, grid: &TransectGrid) {
    rep.kv("rows", grid.rows());
    rep.kv("cols", grid.cols());
    rep.kv("spacing_h_m", grid.spacing_h());
    rep.kv("spacing_v_m", grid.spacing_v());
}

fn echo_params(rep: &mut Report, p: &GpHyperParams) {
    rep.kv("signal_variance", p.signal_variance);
    rep.kv("noise_variance", p.noise_variance);
    rep.kv("lengthscale_h_m", p.lengthscale_h);
    rep.kv("lengthscale_v_m", p.lengthscale_v);
    rep.kv("prior_mean", p.prior_mean);
    rep.kv("eta_dimensionless", p.eta());
}

/// Mean of the measurements sampled along the path: the plug-in prior
/// mean for the relative-error metric when none was fitted or given.
fn path_sample_mean(path: &Path, field: &FieldRealization) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (col0, action) in path.actions().iter().enumerate() {
        for &row in action.rows() {
            sum += field.value(col0 + 1, row as usize);
            count += 1;
        }
    }
    sum / count as f64
}

pub fn gen(args: GenArgs) -> CmdResult {
    let grid = grid_from(&args.grid)?;
    let params = params_from(&args.params)?;
    let spec = FieldSpec {
        grid: grid.clone(),
        params,
        seed: args.seed,
    };
    let field = sample_field(&spec)?;
    save_field_csv(&field, &args.out)?;

    let mut rep = Report::new("gen");
    rep.section("request");
    echo_grid(&mut rep, &grid);
    echo_params(&mut rep, &params);
    rep.section("result");
    rep.kv("field_file", args.out.display());
    rep.kv("cells_count", grid.cells());
    rep.kv("sample_mean", field.sample_mean());
    rep.kv("sample_variance", field.sample_variance());
    rep.section("provenance");
    rep.kv("seed", args.seed);
    rep.print();
    Ok(())
}

pub fn plan(args: PlanArgs) -> CmdResult {
    let algo = parse_algo(&args.algo)?;
    let field = match &args.field {
        Some(p) => Some(load_field_csv(p)?),
        None => None,
    };
    let grid = match &field {
        Some(f) => f.grid().clone(),
        None => grid_from(&args.grid)?,
    };
    let (params, params_source) = if args.fit {
        let f = field
            .as_ref()
            .ok_or_else(|| usage("--fit requires --field"))?;
        (fit_mle(f, &MleSearch::suggest(f))?, "mle-fit")
    } else {
        (params_from(&args.params)?, "flags")
    };

    let mut req = PlanRequest::new(grid.clone(), params, args.robots, algo)
        .with_budget_guard(args.budget_guard);
    if let Some(m) = args.m {
        req = req.with_m(m);
    }
    req.validate()?;
    let res = solve(&req)?;
    save_path_file(&res.path, &args.out)?;

    let mut rep = Report::new("plan");
    rep.section("request");
    rep.kv("algo", algo);
    if let Some(m) = args.m {
        rep.kv("m", m);
    }
    rep.kv("robots", args.robots);
    rep.kv("budget_guard_entries", args.budget_guard);
    echo_grid(&mut rep, &grid);
    echo_params(&mut rep, &params);
    rep.kv("params_source", params_source);

    rep.section("result");
    rep.kv("objective_nats", res.objective);
    rep.kv("entropy_evals_count", res.entropy_evals);
    rep.kv("mi_evals_count", res.mi_evals);
    rep.kv("terms_computed_count", res.terms_computed);
    rep.kv("factor_cost_units", res.factor_cost);
    rep.kv("wall_time_s", res.wall_time.as_secs_f64());
    rep.kv("path_file", args.out.display());

    if args.robots < grid.rows() {
        rep.section("metrics");
        rep.kv("en_nats", en_metric(&res.path, &grid, &params)?);
        rep.kv("mi_nats", mi_metric(&res.path, &grid, &params)?);
        if let Some(f) = &field {
            let (er_params, mean_source) = if args.fit || args.params.mean.is_some() {
                (params, "params")
            } else {
                let mut p = params;
                p.prior_mean = path_sample_mean(&res.path, f);
                (p, "path-sample-mean")
            };
            rep.kv("er_dimensionless", er_metric(&res.path, f, &er_params)?);
            rep.kv("er_prior_mean", er_params.prior_mean);
            rep.kv("er_prior_mean_source", mean_source);
        }
    }

    if algo.windowed() && params.noise_variance > 0.0 {
        let b = BoundInputs::new(
            args.robots,
            grid.cols(),
            req.m.unwrap_or(1),
            grid.rows(),
            params.lengthscale_h / grid.spacing_h(),
            params.eta(),
        )?;
        rep.section("bounds");
        let eps = match algo {
            Algorithm::MeppM => epsilon_mepp(&b)?,
            _ => epsilon_m2ipp(&b)?,
        };
        rep.kv("epsilon_nats", eps);
        rep.kv("xi_dimensionless", b.xi());
        rep.kv("lengthscale_norm_h_dimensionless", b.lengthscale_norm_h);
        rep.kv("cost_model_ops", cost_model(algo, &b));
    }

    rep.section("provenance");
    rep.kv("seed", "none (planning is deterministic)");
    rep.print();
    Ok(())
}

pub fn eval(args: EvalArgs) -> CmdResult {
    let field = load_field_csv(&args.field)?;
    let path = load_path_file(&args.path)?;
    let grid = field.grid().clone();
    path.check_against(&grid)?;
    let params = params_from(&args.params)?;

    let en = en_metric(&path, &grid, &params)?;
    let mi = mi_metric(&path, &grid, &params)?;
    let (er_params, mean_source) = if args.params.mean.is_some() {
        (params, "params")
    } else {
        let mut p = params;
        p.prior_mean = path_sample_mean(&path, &field);
        (p, "path-sample-mean")
    };
    let er = er_metric(&path, &field, &er_params)?;

    let mut rep = Report::new("eval");
    rep.section("request");
    rep.kv("path_file", args.path.display());
    rep.kv("field_file", args.field.display());
    rep.kv("robots", path.k());
    echo_grid(&mut rep, &grid);
    echo_params(&mut rep, &params);
    rep.section("metrics");
    rep.kv("en_nats", en);
    rep.kv("mi_nats", mi);
    rep.kv("er_dimensionless", er);
    rep.kv("er_prior_mean", er_params.prior_mean);
    rep.kv("er_prior_mean_source", mean_source);
    rep.section("provenance");
    rep.kv("seed", "none (evaluation is deterministic)");
    rep.print();
    Ok(())
}

pub fn bound(args: BoundArgs) -> CmdResult {
    let algo = match args.algo.as_deref() {
        None => None,
        Some("mepp") => Some(Algorithm::MeppM),
        Some("m2ipp") => Some(Algorithm::M2ippM),
        Some(other) => {
            return Err(usage(format!(
                "--algo for bounds must be mepp or m2ipp, got `{other}`"
            )))
        }
    };
    let inputs = |m: usize| {
        BoundInputs::new(
            args.robots,
            args.cols,
            m,
            args.rows,
            args.lengthscale_norm,
            args.eta,
        )
    };

    let mut rep = Report::new("bound");
    rep.section("request");
    rep.kv("robots", args.robots);
    rep.kv("rows", args.rows);
    rep.kv("cols", args.cols);
    rep.kv("m", args.m);
    rep.kv("lengthscale_norm_h_dimensionless", args.lengthscale_norm);
    rep.kv("eta_dimensionless", args.eta);

    let b = inputs(args.m)?;
    rep.section("bounds");
    rep.kv("xi_dimensionless", b.xi());
    if algo.is_none() || algo == Some(Algorithm::MeppM) {
        rep.kv("epsilon_mepp_nats", epsilon_mepp(&b)?);
        rep.kv("cost_model_mepp_ops", cost_model(Algorithm::MeppM, &b));
    }
    if algo.is_none() || algo == Some(Algorithm::M2ippM) {
        rep.kv("epsilon_m2ipp_nats", epsilon_m2ipp(&b)?);
        rep.kv("cost_model_m2ipp_ops", cost_model(Algorithm::M2ippM, &b));
    }

    if let Some(sweep_max) = args.sweep_max {
        let algo = algo.ok_or_else(|| usage("--sweep-max requires --algo mepp or m2ipp"))?;
        let out = args
            .out
            .as_ref()
            .ok_or_else(|| usage("--sweep-max requires --out"))?;
        let mut text = format!(
            "# transect bound sweep algo={} k={} n={} r={} lengthscale_norm={} eta={}\n# columns: m epsilon_nats\n",
            algo, args.robots, args.cols, args.rows, args.lengthscale_norm, args.eta
        );
        for m in 1..=sweep_max {
            let b = inputs(m)?;
            let eps = match algo {
                Algorithm::MeppM => epsilon_mepp(&b)?,
                _ => epsilon_m2ipp(&b)?,
            };
            text.push_str(&format!("{m} {eps}\n"));
        }
        std::fs::write(out, text).map_err(transect_core::Error::from)?;
        rep.section("sweep");
        rep.kv("sweep_file", out.display());
        rep.kv("m_max", sweep_max);
    }
    rep.print();
    Ok(())
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("wall times are finite"));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

pub fn bench(args: BenchArgs) -> CmdResult {
    if !matches!(args.measure.as_str(), "time" | "work" | "evals") {
        return Err(usage(format!(
            "--measure must be time, work, or evals, got `{}`",
            args.measure
        )));
    }
    if args.m_min < 1 || args.m_max < args.m_min {
        return Err(usage("need 1 <= m_min <= m_max"));
    }
    if args.reps < 1 {
        return Err(usage("--reps must be at least 1"));
    }
    let algos: Vec<Algorithm> = args
        .algos
        .split(',')
        .map(|s| parse_algo(s.trim()))
        .collect::<Result<_, _>>()?;
    let grid = grid_from(&args.grid)?;
    let params = params_from(&args.params)?;

    let mut text = format!(
        "# transect bench measure={} reps={} rows={} cols={} robots={}\n# columns: m value\n",
        args.measure,
        args.reps,
        grid.rows(),
        grid.cols(),
        args.robots
    );
    let mut data_rows = 0usize;
    for algo in &algos {
        text.push_str(&format!("# algo={algo}\n"));
        let orders: Vec<usize> = if algo.windowed() {
            (args.m_min..=args.m_max).collect()
        } else {
            vec![0] // order is meaningless for this algorithm; single row
        };
        for m in orders {
            let mut req = PlanRequest::new(grid.clone(), params, args.robots, *algo)
                .with_budget_guard(args.budget_guard);
            if algo.windowed() {
                req = req.with_m(m);
            }
            let mut runs: Vec<PlanResult> = Vec::with_capacity(args.reps);
            let mut failed = None;
            for _ in 0..args.reps {
                match solve(&req) {
                    Ok(res) => runs.push(res),
                    Err(e) => {
                        failed = Some(e);
                        break;
                    }
                }
            }
            match failed {
                Some(e) => {
                    text.push_str(&format!("# error algo={algo} m={m}: {e}\n"));
                }
                None => {
                    let value = match args.measure.as_str() {
                        "time" => median(runs.iter().map(|r| r.wall_time.as_secs_f64()).collect()),
                        "work" => runs[0].factor_cost as f64,
                        _ => (runs[0].entropy_evals + runs[0].mi_evals) as f64,
                    };
                    text.push_str(&format!("{m} {value}\n"));
                    data_rows += 1;
                }
            }
        }
    }
    std::fs::write(&args.out, text).map_err(transect_core::Error::from)?;

    let mut rep = Report::new("bench");
    rep.section("request");
    rep.kv("algos", &args.algos);
    rep.kv("m_min", args.m_min);
    rep.kv("m_max", args.m_max);
    rep.kv("reps_count", args.reps);
    rep.kv("measure", &args.measure);
    rep.kv("robots", args.robots);
    echo_grid(&mut rep, &grid);
    echo_params(&mut rep, &params);
    rep.section("result");
    rep.kv("data_file", args.out.display());
    rep.kv("data_rows_count", data_rows);
    rep.print();
    Ok(())
}
