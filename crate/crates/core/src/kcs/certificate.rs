use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::KCSProblem;
use crate::error::Result;
use crate::special::{alpha_n, two_nm};

/// Residuals above this fail the certificate.
pub const RESIDUAL_THRESHOLD: f64 = 1e-6;

const TEST_MODES: usize = 6;

/// `(1/n) M((((2n - mu)/(2n)) alpha_n / 2_n)^{n-1})`.
pub fn level_bound(prob: &KCSProblem) -> Result<f64> {
    let n = prob.n();
    let nf = n as f64;
    let base = (2.0 * nf - prob.mu()) / (2.0 * nf) * alpha_n(n)? / two_nm(n, 1)?;
    Ok(prob.kirchhoff.big_m(base.powf(nf - 1.0)) / nf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub tests: usize,
    /// Largest `|<J'(U,V), (phi,psi)>|` over the tests, divided by the dual
    /// norm of the Kirchhoff side and the energy norm of `(phi, psi)`.
    pub max_residual: f64,
    pub positive: bool,
    pub pass: bool,
}

/// Weak-form residual against seeded smooth test pairs: each `phi`, `psi` is a
/// random combination of `cos((k + 1/2) pi r / R)`, interpolated at the nodes.
pub fn verify_weak_solution(
    prob: &KCSProblem,
    u: &[f64],
    v: &[f64],
    tests: usize,
    seed: u64,
) -> Result<ResidualReport> {
    prob.check(u, v)?;
    let parts = prob.gradient_parts(u, v)?;
    let nodes = prob.grid().nodes();
    let radius = prob.grid().radius();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test_fn = || {
        let c: Vec<f64> = (0..TEST_MODES).map(|_| rng.gen_range(-1.0..1.0)).collect();
        nodes
            .iter()
            .map(|&r| c.iter().enumerate().map(|(k, ck)| ck * ((k as f64 + 0.5) * PI * r / radius).cos()).sum::<f64>())
            .collect::<Vec<f64>>()
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let metric = prob.stiffness();
    let dual = |x: &[f64]| dot(x, &metric.solve(x));
    let primal = |x: &[f64]| dot(x, &metric.apply(x));
    let kirchhoff_norm = (dual(&parts.kirchhoff_u) + dual(&parts.kirchhoff_v)).sqrt();
    let mut max_residual: f64 = 0.0;
    for _ in 0..tests {
        let mut phi = test_fn();
        let mut psi = test_fn();
        let last = phi.len() - 1;
        phi[last] = 0.0;
        psi[last] = 0.0;
        let lhs = dot(&parts.kirchhoff_u, &phi) + dot(&parts.kirchhoff_v, &psi);
        let rhs = dot(&parts.choquard_u, &phi) + dot(&parts.choquard_v, &psi);
        let scale = kirchhoff_norm * (primal(&phi) + primal(&psi)).sqrt();
        if scale > 0.0 {
            max_residual = max_residual.max((lhs - rhs).abs() / scale);
        }
    }
    let last = u.len() - 1;
    let positive = u[..last].iter().chain(&v[..last]).all(|&x| x > 0.0);
    Ok(ResidualReport { tests, max_residual, positive, pass: positive && max_residual < RESIDUAL_THRESHOLD })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayRow {
    pub xi: f64,
    /// `||(xi U, xi V)||`.
    pub norm: f64,
    /// `J(xi U, xi V)`; `None` when the evaluation overflowed.
    pub energy: Option<f64>,
    pub overflow: bool,
}

/// Energy along the ray through `(U, V)`.
pub fn ray_profile(prob: &KCSProblem, u: &[f64], v: &[f64], xis: &[f64]) -> Result<Vec<RayRow>> {
    prob.check(u, v)?;
    let nf = prob.dims.nf();
    let base = (prob.dirichlet_energy(u) + prob.dirichlet_energy(v)).powf(1.0 / nf);
    Ok(xis
        .iter()
        .map(|&xi| {
            let su: Vec<f64> = u.iter().map(|x| xi * x).collect();
            let sv: Vec<f64> = v.iter().map(|x| xi * x).collect();
            let energy = prob.energy(&su, &sv).ok();
            RayRow { xi, norm: xi.abs() * base, energy, overflow: energy.is_none() }
        })
        .collect())
}

/// Writes `r,u,v` rows with 17 significant digits.
pub fn write_solution_csv<W: Write>(out: &mut W, nodes: &[f64], u: &[f64], v: &[f64]) -> Result<()> {
    writeln!(out, "r,u,v")?;
    for ((r, a), b) in nodes.iter().zip(u).zip(v) {
        writeln!(out, "{r:.16e},{a:.16e},{b:.16e}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MountainPass {
    /// Norm and energy of the first sampled point past the origin.
    pub small_norm: f64,
    pub small_energy: f64,
    /// Smallest sampled `xi` from which every later energy is negative.
    pub negative_from: Option<f64>,
    pub pass: bool,
}

/// Reads the mountain-pass shape off a ray profile sampled at increasing `xi`:
/// positive energy at the first nonzero sample, negative for all samples from
/// some `xi` on.
pub fn mountain_pass(rows: &[RayRow]) -> Option<MountainPass> {
    let first = rows.iter().find(|r| r.xi > 0.0)?;
    let negative = |r: &RayRow| r.overflow || r.energy.is_some_and(|e| e < 0.0);
    let tail = rows.iter().rev().take_while(|r| negative(r)).count();
    let negative_from = (tail > 0).then(|| rows[rows.len() - tail].xi);
    let small_energy = first.energy.unwrap_or(f64::NAN);
    Some(MountainPass {
        small_norm: first.norm,
        small_energy,
        negative_from,
        pass: small_energy > 0.0 && negative_from.is_some_and(|xi| xi > first.xi),
    })
}
