//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mtkcs::checks::{run_suite, Suite, DEFAULT_SEED};
use mtkcs::choquard::{build_riesz, riesz_form, KirchhoffModel, NonlinearityModel, DEFAULT_ANGULAR_ORDER};
use mtkcs::functionals::{blowup_sweep, BlowupSweep};
use mtkcs::kcs::{
    level_bound, mountain_pass, nehari_project, ray_profile, solve, verify_weak_solution, KCSProblem, NehariOptions,
    SolverOptions,
};
use mtkcs::radial::{dirichlet_seminorm, pair_norm, RadialGrid, Space};
use mtkcs::sequences::{moser_fn, product_pair_sequence, MoserParams};
use mtkcs::special::{alpha_n, hls_constant, kappa_singular, two_nm, zeta_nm};
use mtkcs::Result;

struct Outcome {
    pass: bool,
    detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn constants() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in 2..=10 {
        worst = worst.max(rel(zeta_nm(n, 1)?, alpha_n(n)?));
    }
    let checks = [
        (zeta_nm(4, 2)?, 32.0 * PI * PI),
        (alpha_n(2)?, 4.0 * PI),
        (two_nm(2, 1)?, 1.0),
        (kappa_singular(1.0, 2, 1)?, 2.0 * PI),
        (hls_constant(2, 1.0)?, 2.0 * PI.sqrt()),
    ];
    for (got, want) in checks {
        worst = worst.max(rel(got, want));
    }
    Ok(Outcome { pass: worst < 1e-12, detail: format!("max rel err {worst:.2e}") })
}

fn moser_norms() -> Result<Outcome> {
    let grid = RadialGrid::default_for(1.0)?;
    let mut worst: f64 = 0.0;
    for k in [4, 16, 64, 256] {
        let p = MoserParams::new(k, 1.0, 2)?;
        worst = worst.max((dirichlet_seminorm(&moser_fn(&p)?, 2, &grid)? - 1.0).abs());
        worst = worst.max((pair_norm(&product_pair_sequence(&p)?, Space::Y, &grid)? - 1.0).abs());
    }
    Ok(Outcome { pass: worst <= 1e-6, detail: format!("max |norm - 1| {worst:.2e}") })
}

fn dichotomy() -> Result<Outcome> {
    let grid = RadialGrid::default_for(1.0)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for lambda in [0.0, 1.0] {
        let low: BlowupSweep = blowup_sweep(-0.1, lambda, 2, &[16, 32, 64, 128, 256], &grid)?;
        let high = blowup_sweep(0.25, lambda, 2, &[4, 8, 16, 32, 64, 128, 256], &grid)?;
        let bound = 0.8 * 0.25 * (2.0 - lambda);
        pass &= low.max_min_ratio <= 2.0 && high.fitted_slope >= bound;
        parts.push(format!(
            "lambda={lambda}: max/min {:.3}, slope {:.3} >= {bound:.3}",
            low.max_min_ratio, high.fitted_slope
        ));
    }
    Ok(Outcome { pass, detail: parts.join("; ") })
}

fn suite_outcome(suite: Suite, trials: usize) -> Result<(bool, String)> {
    let r = run_suite(suite, Some(trials), DEFAULT_SEED)?;
    let extras: Vec<String> = r.extras.iter().map(|(k, v)| format!("{k} {v:.4}")).collect();
    let mut detail = format!("{suite}: {}/{} failures, {} {:.3e}", r.failures, r.trials, r.metric, r.worst);
    if !extras.is_empty() {
        detail.push_str(&format!(" ({})", extras.join(", ")));
    }
    Ok((r.pass, detail))
}

fn scaling() -> Result<Outcome> {
    let (pass, detail) = suite_outcome(Suite::Scaling, 20)?;
    Ok(Outcome { pass, detail })
}

fn splits() -> Result<Outcome> {
    let (ph, dh) = suite_outcome(Suite::Holder, 100)?;
    let (py, dy) = suite_outcome(Suite::Young, 1000)?;
    Ok(Outcome { pass: ph && py, detail: format!("{dh}; {dy}") })
}

/// `D(1_B, 1_B)` for the unit disk and `mu = 1`. With `x` uniform in the disk,
/// a uniform direction `e` and `d ~ U[0, 2]`, the polar Jacobian cancels the
/// kernel, so `D = pi * 2 pi * 2 * P(x + d e in B)`.
fn disk_oracle(samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let (x, y) = loop {
            let (x, y) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if x * x + y * y <= 1.0 {
                break (x, y);
            }
        };
        let theta: f64 = rng.gen_range(0.0..2.0 * PI);
        let d: f64 = rng.gen_range(0.0..2.0);
        let (px, py) = (x + d * theta.cos(), y + d * theta.sin());
        if px * px + py * py <= 1.0 {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let scale = 4.0 * PI * PI;
    (scale * p, scale * (p * (1.0 - p) / samples as f64).sqrt())
}

fn hls() -> Result<Outcome> {
    let (suite_pass, detail) = suite_outcome(Suite::Hls, 200)?;
    let grid = RadialGrid::default_for(1.0)?;
    let op = build_riesz(1.0, 2, &grid, DEFAULT_ANGULAR_ORDER)?;
    let ones = vec![1.0; grid.len()];
    let d = riesz_form(&op, &ones, &ones)?;
    let (mc, se) = disk_oracle(10_000_000, DEFAULT_SEED);
    let z = (d - mc).abs() / se;
    Ok(Outcome {
        pass: suite_pass && z <= 3.0,
        detail: format!("{detail}; disk D {d:.6} vs MC {mc:.6} +- {se:.2e} ({z:.2} se)"),
    })
}

fn random_state(rng: &mut ChaCha8Rng, nodes: &[f64]) -> Vec<f64> {
    let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..0.6)).collect();
    let power = rng.gen_range(1.5..3.0);
    let mut u: Vec<f64> = nodes
        .iter()
        .map(|r| {
            let base = (1.0 - r).max(0.0).powf(power);
            base * (0.2 + coeffs.iter().enumerate().map(|(k, c)| c * ((k as f64 + 0.5) * PI * r).cos()).sum::<f64>())
        })
        .collect();
    *u.last_mut().unwrap() = 0.0;
    u
}

/// Central differences against the analytic gradient, as `max |fd - g| / max |g|`.
fn fd_error(p: &KCSProblem, u: &[f64], v: &[f64]) -> Result<f64> {
    let (gu, gv) = p.gradient(u, v)?;
    let scale = gu.iter().chain(&gv).fold(0.0f64, |m, x| m.max(x.abs()));
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for i in 0..p.len() - 1 {
        for (which, g) in [(0, &gu), (1, &gv)] {
            let (mut a, mut b) = ((u.to_vec(), v.to_vec()), (u.to_vec(), v.to_vec()));
            if which == 0 {
                a.0[i] += h;
                b.0[i] -= h;
            } else {
                a.1[i] += h;
                b.1[i] -= h;
            }
            let fd = (p.energy(&a.0, &a.1)? - p.energy(&b.0, &b.1)?) / (2.0 * h);
            worst = worst.max((fd - g[i]).abs() / scale);
        }
    }
    Ok(worst)
}

fn solver() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let models = [KirchhoffModel::constant(), KirchhoffModel::new(0.5, 1.0, 0.5)?];
    let mut fd_worst: f64 = 0.0;
    let mut homog_worst: f64 = 0.0;
    let mut states = 0;
    for (points, grading) in [(64, 1.06), (128, 1.03)] {
        let grid = RadialGrid::new(1.0, points, grading)?;
        let op = Arc::new(build_riesz(1.0, 2, &grid, DEFAULT_ANGULAR_ORDER)?);
        for i in 0..10 {
            let k = models[i % 2];
            let p = KCSProblem::new(k, NonlinearityModel::default_for(2, &k), op.clone())?;
            let u = random_state(&mut rng, grid.nodes());
            let v = random_state(&mut rng, grid.nodes());
            fd_worst = fd_worst.max(fd_error(&p, &u, &v)?);
            let opts = NehariOptions::default();
            let t = nehari_project(&p, &u, &v, &opts)?;
            let c = rng.gen_range(0.2..5.0);
            let cu: Vec<f64> = u.iter().map(|x| c * x).collect();
            let cv: Vec<f64> = v.iter().map(|x| c * x).collect();
            homog_worst = homog_worst.max(rel(nehari_project(&p, &cu, &cv, &opts)? * c, t));
            states += 1;
        }
    }

    let grid = RadialGrid::default_for(1.0)?;
    let op = Arc::new(build_riesz(1.0, 2, &grid, DEFAULT_ANGULAR_ORDER)?);
    let k = KirchhoffModel::constant();
    let p = KCSProblem::new(k, NonlinearityModel::default_for(2, &k), op)?;
    let init: Vec<f64> = grid.nodes().iter().map(|r| (1.0 - r).powi(2)).collect();
    let state = solve(&p, (&init, &init), &SolverOptions::default())?;
    let cert = verify_weak_solution(&p, &state.u, &state.v, 50, DEFAULT_SEED)?;
    let bound = level_bound(&p)?;
    let pass = fd_worst < 1e-5
        && homog_worst <= 1e-8
        && state.converged
        && cert.max_residual < 1e-6
        && state.is_positive()
        && state.energy > 0.0
        && state.energy < bound
        && (bound - 1.5 * PI).abs() < 1e-12;
    Ok(Outcome {
        pass,
        detail: format!(
            "fd {fd_worst:.2e} over {states} states, homogeneity {homog_worst:.2e}, converged {} in {} its, \
             residual {:.2e}, positive {}, J {:.6} in (0, {bound:.6})",
            state.converged,
            state.iterations,
            cert.max_residual,
            state.is_positive(),
            state.energy
        ),
    })
}

fn mountain_pass_geometry() -> Result<Outcome> {
    let grid = RadialGrid::default_for(1.0)?;
    let op = Arc::new(build_riesz(1.0, 2, &grid, DEFAULT_ANGULAR_ORDER)?);
    let init: Vec<f64> = grid.nodes().iter().map(|r| (1.0 - r).powi(2)).collect();
    let xis: Vec<f64> = (0..41).map(|i| 0.1 * i as f64).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, k) in [("constant", KirchhoffModel::constant()), ("degenerate", KirchhoffModel::new(0.0, 1.0, 0.5)?)] {
        let p = KCSProblem::new(k, NonlinearityModel::default_for(2, &k), op.clone())?;
        let rows = ray_profile(&p, &init, &init, &xis)?;
        let mp = mountain_pass(&rows).expect("positive xi present");
        pass &= mp.pass;
        parts.push(format!(
            "{name}: J {:.3e} at norm {:.3}, negative from xi {:?}",
            mp.small_energy, mp.small_norm, mp.negative_from
        ));
    }
    Ok(Outcome { pass, detail: parts.join("; ") })
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);
    let criteria: [Criterion; 8] = [
        ("constant identities", Duration::from_secs(1), constants),
        ("Moser sequence normalization", Duration::from_secs(5), moser_norms),
        ("sharp threshold dichotomy", Duration::from_secs(30), dichotomy),
        ("scaling identity", Duration::from_secs(10), scaling),
        ("Holder and Young splits", Duration::from_secs(10), splits),
        ("HLS bound, probe and Monte-Carlo oracle", Duration::from_secs(120), hls),
        ("solver correctness", Duration::from_secs(300), solver),
        ("mountain-pass geometry", Duration::from_secs(30), mountain_pass_geometry),
    ];
    let mut all = true;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        println!(
            "{} {}. {name} [{:.2}s / {}s]: {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
