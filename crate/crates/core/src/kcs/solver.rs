use serde::Serialize;

use super::KCSProblem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NehariOptions {
    /// Relative width of the final bracket.
    pub tol: f64,
    pub t_max: f64,
}

impl Default for NehariOptions {
    fn default() -> Self {
        Self { tol: 1e-10, t_max: 1e6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Stop once the dual gradient norm falls below `grad_tol` times its initial value.
    pub grad_tol: f64,
    pub max_iter: usize,
    pub nehari: NehariOptions,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    /// Trial states whose Dirichlet energy drops below this fraction of the
    /// current one are rejected (guards `m -> 0` in the degenerate model).
    pub norm_floor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { grad_tol: 1e-8, max_iter: 10_000, nehari: NehariOptions::default(), armijo: 1e-4, norm_floor: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub energy: f64,
    pub gradient_norm: f64,
    pub initial_gradient_norm: f64,
    /// `<J'(U,V), (U,V)>` relative to the Kirchhoff part of the pairing.
    pub nehari_residual: f64,
    pub iterations: usize,
    pub projections: usize,
    pub converged: bool,
    /// Energy after every accepted step, starting with the projected initial state.
    pub energy_history: Vec<f64>,
}

impl SolverState {
    /// Strictly positive at every node except the pinned boundary one.
    pub fn is_positive(&self) -> bool {
        let last = self.u.len().saturating_sub(1);
        self.u[..last].iter().chain(&self.v[..last]).all(|&x| x > 0.0)
    }
}

/// `d/dt J(tU, tV)`. Overflowing evaluations count as negative: the
/// exponential has taken over.
pub fn ray_derivative(prob: &KCSProblem, u: &[f64], v: &[f64], t: f64) -> f64 {
    let nf = prob.dims.nf();
    let e = prob.dirichlet_energy(u) + prob.dirichlet_energy(v);
    let kirchhoff = prob.kirchhoff.m(t.powf(nf) * e) * t.powf(nf - 1.0) * e;
    let tu: Vec<f64> = u.iter().map(|x| t * x).collect();
    let tv: Vec<f64> = v.iter().map(|x| t * x).collect();
    let f = prob.nodal_f(&tu, &tv);
    let Ok(af) = prob.riesz().apply(&f) else {
        return f64::NEG_INFINITY;
    };
    let nl = &prob.nonlinearity;
    let choquard: f64 = (0..u.len())
        .map(|i| {
            let (a, b) = (tu[i], tv[i]);
            let w = nl.f1(a, b) * u[i] + nl.f2(a, b) * v[i];
            if w == 0.0 {
                0.0
            } else {
                af[i] * w
            }
        })
        .sum();
    let d = kirchhoff - choquard;
    if d.is_nan() {
        f64::NEG_INFINITY
    } else {
        d
    }
}

/// Scale `t*` putting `(t*U, t*V)` on the Nehari manifold.
pub fn nehari_project(prob: &KCSProblem, u: &[f64], v: &[f64], opts: &NehariOptions) -> Result<f64> {
    prob.check(u, v)?;
    if !u.iter().zip(v).any(|(&a, &b)| a > 0.0 && b > 0.0) {
        return Err(Error::DegenerateRay);
    }
    if prob.dirichlet_energy(u) + prob.dirichlet_energy(v) == 0.0 {
        return Err(Error::Degenerate("pair has zero Dirichlet energy".into()));
    }
    let h = |t: f64| ray_derivative(prob, u, v, t);

    let (mut lo, mut hi);
    if h(1.0) > 0.0 {
        lo = 1.0;
        hi = 2.0;
        while h(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            if lo >= opts.t_max {
                return Err(Error::NoNehariRoot { t_max: opts.t_max });
            }
        }
    } else {
        hi = 1.0;
        lo = 0.5;
        while h(lo) <= 0.0 {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::DegenerateRay);
            }
        }
    }
    while hi - lo > opts.tol * lo {
        let mid = (lo * hi).sqrt();
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

fn scale(x: &mut [f64], t: f64) {
    x.iter_mut().for_each(|y| *y *= t);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes the energy over the Nehari manifold by preconditioned descent
/// of `W -> J(t*(W) W)`. The metric is the weighted stiffness matrix, steps
/// follow Barzilai-Borwein with Armijo backtracking, and negative parts are
/// clipped after each step.
pub fn solve(prob: &KCSProblem, init: (&[f64], &[f64]), opts: &SolverOptions) -> Result<SolverState> {
    let (u0, v0) = init;
    prob.check(u0, v0)?;
    let last = prob.len() - 1;
    let clip = |x: &[f64]| -> Vec<f64> {
        let mut y: Vec<f64> = x.iter().map(|&a| a.max(0.0)).collect();
        y[last] = 0.0;
        y
    };
    let mut u = clip(u0);
    let mut v = clip(v0);
    let t = nehari_project(prob, &u, &v, &opts.nehari)?;
    scale(&mut u, t);
    scale(&mut v, t);
    let mut projections = 1;

    let metric = prob.stiffness();
    let mut energy = prob.energy(&u, &v)?;
    let mut history = vec![energy];
    let mut g = prob.gradient(&u, &v)?;
    let mut d = (metric.solve(&g.0), metric.solve(&g.1));
    let mut gnorm = (dot(&g.0, &d.0) + dot(&g.1, &d.1)).max(0.0).sqrt();
    let g0 = gnorm;
    let mut alpha = 1.0;
    let mut converged = gnorm == 0.0;
    let mut iterations = 0;

    while !converged {
        if iterations >= opts.max_iter {
            return Err(Error::MaxIterations(opts.max_iter));
        }
        iterations += 1;
        let base_e = prob.dirichlet_energy(&u) + prob.dirichlet_energy(&v);
        let slack = 1e-13 * energy.abs().max(prob.kirchhoff.big_m(base_e) / prob.dims.nf());
        let mut accepted = None;
        for _ in 0..60 {
            let tu = clip(&u.iter().zip(&d.0).map(|(a, b)| a - alpha * b).collect::<Vec<_>>());
            let tv = clip(&v.iter().zip(&d.1).map(|(a, b)| a - alpha * b).collect::<Vec<_>>());
            let e_trial = prob.dirichlet_energy(&tu) + prob.dirichlet_energy(&tv);
            if e_trial < opts.norm_floor * base_e {
                alpha *= 0.5;
                continue;
            }
            let projected = nehari_project(prob, &tu, &tv, &opts.nehari);
            projections += 1;
            let Ok(t) = projected else {
                alpha *= 0.5;
                continue;
            };
            let (mut tu, mut tv) = (tu, tv);
            scale(&mut tu, t);
            scale(&mut tv, t);
            match prob.energy(&tu, &tv) {
                Ok(j) if j <= energy - opts.armijo * alpha * gnorm * gnorm + slack && j <= energy + slack => {
                    accepted = Some((tu, tv, j));
                    break;
                }
                _ => alpha *= 0.5,
            }
        }
        let Some((nu, nv, j)) = accepted else {
            return Err(Error::LineSearchFailure(iterations));
        };

        let ng = prob.gradient(&nu, &nv)?;
        let nd = (metric.solve(&ng.0), metric.solve(&ng.1));
        // Barzilai-Borwein step in the stiffness metric: <s, P s> / <s, y>
        let s: (Vec<f64>, Vec<f64>) =
            (nu.iter().zip(&u).map(|(a, b)| a - b).collect(), nv.iter().zip(&v).map(|(a, b)| a - b).collect());
        let y: (Vec<f64>, Vec<f64>) =
            (ng.0.iter().zip(&g.0).map(|(a, b)| a - b).collect(), ng.1.iter().zip(&g.1).map(|(a, b)| a - b).collect());
        let sps = dot(&s.0, &metric.apply(&s.0)) + dot(&s.1, &metric.apply(&s.1));
        let sy = dot(&s.0, &y.0) + dot(&s.1, &y.1);
        alpha = if sy > 0.0 && sps > 0.0 { sps / sy } else { alpha * 2.0 };

        u = nu;
        v = nv;
        energy = j;
        history.push(j);
        g = ng;
        d = nd;
        gnorm = (dot(&g.0, &d.0) + dot(&g.1, &d.1)).max(0.0).sqrt();
        converged = gnorm <= opts.grad_tol * g0;
    }

    let nehari_residual = nehari_residual(prob, &u, &v)?;
    Ok(SolverState {
        u,
        v,
        energy,
        gradient_norm: gnorm,
        initial_gradient_norm: g0,
        nehari_residual,
        iterations,
        projections,
        converged,
        energy_history: history,
    })
}

/// `|<J'(W), W>| / (m(||W||^n) ||W||^n)`.
pub fn nehari_residual(prob: &KCSProblem, u: &[f64], v: &[f64]) -> Result<f64> {
    let e = prob.dirichlet_energy(u) + prob.dirichlet_energy(v);
    let scale = prob.kirchhoff.m(e) * e;
    if scale == 0.0 {
        return Ok(0.0);
    }
    let (gu, gv) = prob.gradient(u, v)?;
    Ok((dot(&gu, u) + dot(&gv, v)).abs() / scale)
}
