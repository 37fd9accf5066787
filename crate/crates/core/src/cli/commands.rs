use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};

use mtkcs::checks::{run_suite, Suite};
use mtkcs::choquard::{
    build_riesz, build_riesz_cached, KirchhoffModel, NonlinearityModel, RieszOperator, DEFAULT_ANGULAR_ORDER,
};
use mtkcs::functionals::{blowup_sweep_with_support, threshold};
use mtkcs::kcs::{
    level_bound, mountain_pass, ray_profile, solve, verify_weak_solution, write_solution_csv, KCSProblem,
    NehariOptions, SolverOptions,
};
use mtkcs::radial::{RadialGrid, Space};
use mtkcs::special::{DimensionParams, SharpConstants};
use mtkcs::{Error, Result};

use super::{BlowupArgs, CheckArgs, Cli, ConstantsArgs, Format, GridArgs, ModelArgs, RayArgs, SolveArgs};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(path: Option<&Path>, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    emit(path, &text)
}

fn grid(args: &GridArgs) -> Result<RadialGrid> {
    RadialGrid::new(args.radius, args.points, args.grading)
}

pub fn constants(cli: &Cli, args: &ConstantsArgs) -> Result<bool> {
    let dims = DimensionParams::new(args.n, args.m)?;
    let c = SharpConstants::compute(dims, args.lambda, args.mu)?;
    let threshold_y = threshold(args.n, args.m, args.lambda, Space::Y).ok();
    let threshold_z = if args.m == 1 { threshold(args.n, 1, args.lambda, Space::Z).ok() } else { None };
    match cli.format {
        Format::Json => emit_json(
            cli.output.as_deref(),
            &json!({"command": "constants", "constants": c, "threshold_y": threshold_y, "threshold_z": threshold_z}),
        )?,
        Format::Csv => {
            let mut rows = vec![
                ("n", c.n as f64),
                ("m", c.m as f64),
                ("omega", c.omega),
                ("alpha_n", c.alpha_n),
                ("zeta", c.zeta_nm),
                ("two_nm", c.two_nm),
                ("lambda", c.lambda),
                ("kappa", c.kappa),
            ];
            if let (Some(mu), Some(h)) = (c.mu, c.hls_c) {
                rows.push(("mu", mu));
                rows.push(("hls_constant", h));
            }
            if let Some(t) = threshold_y {
                rows.push(("threshold_y", t));
            }
            if let Some(t) = threshold_z {
                rows.push(("threshold_z", t));
            }
            let mut text = String::from("name,value\n");
            for (name, value) in rows {
                writeln!(text, "{name},{}", num(value)).unwrap();
            }
            emit(cli.output.as_deref(), &text)?;
        }
    }
    Ok(true)
}

pub fn blowup(cli: &Cli, args: &BlowupArgs) -> Result<bool> {
    let grid = grid(&args.grid)?;
    let epsilon = args.theta_factor.map_or(args.epsilon, |f| f - 1.0);
    let rho = args.rho.unwrap_or(grid.radius());
    let sweep = blowup_sweep_with_support(epsilon, args.lambda, args.n, &args.ks, rho, &grid)?;
    match cli.format {
        Format::Json => emit_json(cli.output.as_deref(), &json!({"command": "blowup", "sweep": sweep}))?,
        Format::Csv => {
            let mut text = String::from("k,value,overflow_radius\n");
            for row in &sweep.rows {
                let overflow = row.overflow_radius.map(num).unwrap_or_default();
                writeln!(text, "{},{},{overflow}", row.k, num(row.value)).unwrap();
            }
            emit(cli.output.as_deref(), &text)?;
            eprintln!("epsilon,lambda,fitted_slope,expected_lower_bound,max_min_ratio,bounded,pass");
            eprintln!(
                "{},{},{},{},{},{},{}",
                num(sweep.epsilon),
                num(sweep.lambda),
                num(sweep.fitted_slope),
                num(sweep.expected_lower_bound),
                num(sweep.max_min_ratio),
                sweep.bounded,
                sweep.pass
            );
        }
    }
    Ok(true)
}

pub fn check(cli: &Cli, args: &CheckArgs) -> Result<bool> {
    let suite: Suite = args.suite.parse()?;
    let report = run_suite(suite, args.trials, args.seed)?;
    match cli.format {
        Format::Json => emit_json(cli.output.as_deref(), &json!({"command": "check", "report": report}))?,
        Format::Csv => {
            let text = format!(
                "suite,seed,trials,failures,metric,worst,pass\n{},{},{},{},{},{},{}\n",
                report.suite,
                report.seed,
                report.trials,
                report.failures,
                report.metric,
                num(report.worst),
                report.pass
            );
            emit(cli.output.as_deref(), &text)?;
        }
    }
    if let Some(case) = &report.first_failure {
        eprintln!("first failing case: {case}");
    }
    Ok(report.pass)
}

fn operator(model: &ModelArgs) -> Result<Arc<RieszOperator>> {
    let grid = grid(&model.grid)?;
    let op = match &model.cache_dir {
        Some(dir) => build_riesz_cached(model.mu, model.n, &grid, DEFAULT_ANGULAR_ORDER, dir)?,
        None => build_riesz(model.mu, model.n, &grid, DEFAULT_ANGULAR_ORDER)?,
    };
    Ok(Arc::new(op))
}

fn problem(model: &ModelArgs) -> Result<KCSProblem> {
    let kirchhoff = KirchhoffModel::new(model.d0, model.d1, model.beta)?;
    DimensionParams::first_order(model.n)?;
    let nonlinearity = match model.a {
        Some(a) => NonlinearityModel::new(a, model.n)?,
        None => NonlinearityModel::default_for(model.n, &kirchhoff),
    };
    KCSProblem::new(kirchhoff, nonlinearity, operator(model)?)
}

/// `(1 - r/R)_+^2` in both components.
fn initial_bump(prob: &KCSProblem) -> Vec<f64> {
    let radius = prob.grid().radius();
    prob.grid().nodes().iter().map(|r| (1.0 - r / radius).max(0.0).powi(2)).collect()
}

fn model_json(prob: &KCSProblem, model: &ModelArgs) -> Value {
    json!({
        "n": prob.n(),
        "mu": prob.mu(),
        "radius": model.grid.radius,
        "points": model.grid.points,
        "grading": model.grid.grading,
        "kirchhoff": prob.kirchhoff,
        "degenerate": prob.kirchhoff.is_degenerate(),
        "a": prob.nonlinearity.a,
    })
}

pub fn solve_cmd(cli: &Cli, args: &SolveArgs) -> Result<bool> {
    let prob = problem(&args.model)?;
    let opts = SolverOptions {
        grad_tol: args.grad_tol,
        max_iter: args.max_iter,
        nehari: NehariOptions { tol: args.nehari_tol, ..NehariOptions::default() },
        ..SolverOptions::default()
    };
    let init = initial_bump(&prob);
    let state = solve(&prob, (&init, &init), &opts)?;
    let residual = verify_weak_solution(&prob, &state.u, &state.v, args.tests, args.seed)?;
    let bound = level_bound(&prob)?;
    let below_bound = state.energy > 0.0 && state.energy < bound;
    let pass = state.converged && residual.pass && below_bound;

    let mut csv = Vec::new();
    write_solution_csv(&mut csv, prob.grid().nodes(), &state.u, &state.v)?;
    emit(cli.output.as_deref(), &String::from_utf8(csv).expect("ascii"))?;

    let report = json!({
        "command": "solve",
        "model": model_json(&prob, &args.model),
        "energy": state.energy,
        "level_bound": bound,
        "below_level_bound": below_bound,
        "residual": residual,
        "positive": state.is_positive(),
        "converged": state.converged,
        "iterations": state.iterations,
        "projections": state.projections,
        "relative_gradient_norm": state.gradient_norm / state.initial_gradient_norm,
        "nehari_residual": state.nehari_residual,
        "pass": pass,
    });
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    match &args.report {
        Some(p) => fs::write(p, text)?,
        None => io::stderr().write_all(text.as_bytes())?,
    }
    Ok(pass)
}

pub fn ray(cli: &Cli, args: &RayArgs) -> Result<bool> {
    if args.xi_count < 2 || !(args.xi_max > 0.0) {
        return Err(Error::InvalidParameter("need --xi-count >= 2 and --xi-max > 0".into()));
    }
    let prob = problem(&args.model)?;
    let init = initial_bump(&prob);
    let xis: Vec<f64> = (0..args.xi_count).map(|i| args.xi_max * i as f64 / (args.xi_count - 1) as f64).collect();
    let rows = ray_profile(&prob, &init, &init, &xis)?;
    let summary = mountain_pass(&rows).expect("at least one positive xi");
    match cli.format {
        Format::Json => emit_json(
            cli.output.as_deref(),
            &json!({"command": "ray-profile", "model": model_json(&prob, &args.model), "rows": rows, "summary": summary}),
        )?,
        Format::Csv => {
            let mut text = String::from("xi,norm,energy,overflow\n");
            for r in &rows {
                let energy = r.energy.map(num).unwrap_or_default();
                writeln!(text, "{},{},{energy},{}", num(r.xi), num(r.norm), r.overflow).unwrap();
            }
            emit(cli.output.as_deref(), &text)?;
            let from = summary.negative_from.map(num).unwrap_or_default();
            eprintln!("small_norm,small_energy,negative_from,pass");
            eprintln!("{},{},{from},{}", num(summary.small_norm), num(summary.small_energy), summary.pass);
        }
    }
    Ok(summary.pass)
}
