//! Radial reduction of the Riesz pairing `int int f(x) g(y) |x-y|^{-mu} dx dy`.
//!
//! For radial `f, g` the pairing is `omega_{n-1} int int f(r) g(rho) r^{n-1} rho^{n-1} K(r,rho)`
//! with the sphere kernel `K(r,rho) = int_{S^{n-1}} |r e_1 - rho w|^{-mu} dw`. We assemble
//! the Galerkin matrix of that double integral over piecewise-linear hat
//! functions on the radial grid, so `D(f,g) = f^T A g` is the exact pairing of
//! the nodal interpolants up to quadrature error.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::quadrature::UnitRule;
use crate::radial::{RadialGrid, RadialProfile};
use crate::special::{hls_constant, hls_exponent, sphere_area};

pub const DEFAULT_ANGULAR_ORDER: usize = 12;

// Innermost polar angle on the diagonal; below it the leading-order term is
// integrated in closed form (relative error ~ THETA_MIN^2).
const THETA_MIN: f64 = 1e-6;

/// `omega_{n-2} int_0^pi (d^2 + 4 p sin^2(theta/2))^{-mu/2} sin^{n-2}(theta) dtheta`
/// with `d = |r - rho|`, `p = r rho`.
fn angular_integral(d: f64, p: f64, n: u32, mu: f64, rule: &UnitRule) -> f64 {
    let w = sphere_area(n - 1).expect("n >= 2");
    let integrand = |t: f64| {
        let s = (0.5 * t).sin();
        (d * d + 4.0 * p * s * s).powf(-0.5 * mu) * t.sin().powi(n as i32 - 2)
    };
    let delta = d / p.sqrt();
    let mut sum = 0.0;
    let mut lo;
    if delta == 0.0 {
        let e = n as f64 - 1.0 - mu;
        if e <= 0.0 {
            return f64::INFINITY;
        }
        sum += p.powf(-0.5 * mu) * THETA_MIN.powf(e) / e;
        lo = THETA_MIN;
    } else if delta < std::f64::consts::FRAC_PI_2 {
        sum += rule.integrate(0.0, delta, integrand);
        lo = delta;
    } else {
        lo = 0.0;
    }
    while lo < std::f64::consts::PI {
        let hi = if lo == 0.0 { std::f64::consts::FRAC_PI_2 } else { (2.0 * lo).min(std::f64::consts::PI) };
        sum += rule.integrate(lo, hi, integrand);
        lo = hi;
    }
    w * sum
}

/// Sphere average kernel `K(r, rho)` by graded Gauss quadrature in the polar
/// angle, `angular_order` points per panel. `K(r, 0) = omega_{n-1} r^{-mu}`;
/// on the diagonal the value is `+inf` once `mu >= n - 1`.
pub fn sphere_kernel(r: f64, rho: f64, n: u32, mu: f64, angular_order: usize) -> Result<f64> {
    check_mu(n, mu)?;
    if r < 0.0 || rho < 0.0 {
        return Err(Error::Domain("radii must be >= 0".into()));
    }
    let big = r.max(rho);
    if big == 0.0 {
        return Ok(f64::INFINITY);
    }
    if r.min(rho) == 0.0 {
        return Ok(sphere_area(n)? * big.powf(-mu));
    }
    let rule = UnitRule::legendre(angular_order);
    Ok(angular_integral((r - rho).abs(), r * rho, n, mu, &rule))
}

fn check_mu(n: u32, mu: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension must be >= 2, got {n}")));
    }
    if !(mu > 0.0 && mu < n as f64) {
        return Err(Error::Domain(format!("mu must lie in (0, {n}), got {mu}")));
    }
    Ok(())
}

/// `K(r, rho) = r_>^{-mu} G(tau)` with `tau = 1 - r_</r_>`; `log G` is tabulated
/// on a uniform grid in `log tau`, where both the smooth far field and the
/// power or logarithmic diagonal behaviour are slowly varying.
struct KernelTable {
    mu: f64,
    x0: f64,
    inv_dx: f64,
    log_g: Vec<f64>,
}

const TABLE_POINTS: usize = 8192;
const TABLE_TAU_MIN: f64 = 1e-15;

impl KernelTable {
    fn new(n: u32, mu: f64, angular_order: usize) -> Self {
        let rule = UnitRule::legendre(angular_order);
        let x0 = TABLE_TAU_MIN.ln();
        let dx = -x0 / (TABLE_POINTS - 1) as f64;
        let log_g = (0..TABLE_POINTS)
            .into_par_iter()
            .map(|i| {
                let tau = (x0 + i as f64 * dx).exp().min(1.0);
                if tau == 1.0 {
                    return sphere_area(n).unwrap().ln();
                }
                angular_integral(tau, 1.0 - tau, n, mu, &rule).ln()
            })
            .collect();
        Self { mu, x0, inv_dx: 1.0 / dx, log_g }
    }

    #[inline]
    fn g(&self, tau: f64) -> f64 {
        let last = self.log_g.len() - 1;
        let s = (tau.ln() - self.x0) * self.inv_dx;
        if s <= 0.0 {
            let slope = self.log_g[1] - self.log_g[0];
            return (self.log_g[0] + s * slope).exp();
        }
        // four-point Lagrange on the cell containing s
        let i = (s as usize).clamp(1, last - 2);
        let u = s - i as f64;
        let (a, b, c, d) = (self.log_g[i - 1], self.log_g[i], self.log_g[i + 1], self.log_g[i + 2]);
        let v = -u * (u - 1.0) * (u - 2.0) / 6.0 * a + (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0 * b
            - (u + 1.0) * u * (u - 2.0) / 2.0 * c
            + (u + 1.0) * u * (u - 1.0) / 6.0 * d;
        v.exp()
    }

    #[cfg(test)]
    fn kernel(&self, r: f64, rho: f64) -> f64 {
        self.kernel_gap(r.max(rho), (r - rho).abs())
    }

    /// Kernel from the larger radius and the separation, which callers can
    /// often form without cancellation.
    #[inline]
    fn kernel_gap(&self, big: f64, gap: f64) -> f64 {
        big.powf(-self.mu) * self.g(gap / big)
    }
}

/// Points and weights on `[0, 1]` graded geometrically toward 0.
fn graded_unit(rule: &UnitRule, levels: usize, ratio: f64) -> Vec<(f64, f64)> {
    let mut edges = Vec::with_capacity(levels + 2);
    edges.push(0.0);
    edges.extend((1..=levels).rev().map(|l| ratio.powi(l as i32)));
    edges.push(1.0);
    edges.windows(2).flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>()).collect()
}

const GRADING_RATIO: f64 = 0.25;

/// Assembled Galerkin matrix of the radial Riesz pairing.
#[derive(Debug, Clone)]
pub struct RieszOperator {
    n: u32,
    mu: f64,
    angular_order: usize,
    grid: RadialGrid,
    matrix: Vec<f64>,
    weights: Vec<f64>,
}

/// Which exponent class the diagonal of the sphere kernel falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiagonalBehaviour {
    Bounded,
    Logarithmic,
    Power,
}

impl RieszOperator {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn angular_order(&self) -> usize {
        self.angular_order
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `A[i][j] = omega_{n-1} int int phi_i phi_j r^{n-1} rho^{n-1} K`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.len() + j]
    }

    /// Radial weights `q_i = int phi_i r^{n-1} dr`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Cell-averaged sphere kernel `A[i][j] / (omega_{n-1} q_i q_j)`.
    pub fn kernel(&self, i: usize, j: usize) -> f64 {
        let omega = sphere_area(self.n).unwrap();
        self.entry(i, j) / (omega * self.weights[i] * self.weights[j])
    }

    /// The pointwise diagonal `K(r, r)` diverges once `mu >= n - 1`; the
    /// assembly then relies on the graded near-diagonal quadrature.
    pub fn diagonal_behaviour(&self) -> DiagonalBehaviour {
        diagonal_behaviour(self.n, self.mu)
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        let n = self.len();
        Ok(self.matrix.chunks_exact(n).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect())
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::GridMismatch { expected: self.len(), got });
        }
        Ok(())
    }

    /// Writes the matrix to `path` in a little-endian binary format keyed by
    /// `(n, mu, grid fingerprint, angular order)`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(48 + 8 * self.matrix.len());
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&self.n.to_le_bytes());
        buf.extend_from_slice(&self.mu.to_le_bytes());
        buf.extend_from_slice(&self.grid.fingerprint().to_le_bytes());
        buf.extend_from_slice(&(self.angular_order as u64).to_le_bytes());
        buf.extend_from_slice(&(self.len() as u64).to_le_bytes());
        for x in &self.matrix {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        let mut f = fs::File::create(path)?;
        f.write_all(&buf)?;
        Ok(())
    }

    /// Reads a matrix written by [`save`](Self::save); `Ok(None)` if the file
    /// was built for a different key.
    pub fn load(path: &Path, mu: f64, n: u32, grid: &RadialGrid, angular_order: usize) -> Result<Option<Self>> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        let header = CACHE_MAGIC.len() + 4 + 8 * 4;
        if bytes.len() < header || &bytes[..CACHE_MAGIC.len()] != CACHE_MAGIC {
            return Err(Error::Io(format!("{} is not a kernel cache", path.display())));
        }
        let mut at = CACHE_MAGIC.len();
        let mut take = |k: usize| {
            let s = &bytes[at..at + k];
            at += k;
            s.to_vec()
        };
        let file_n = u32::from_le_bytes(take(4).try_into().unwrap());
        let file_mu = f64::from_le_bytes(take(8).try_into().unwrap());
        let fp = u64::from_le_bytes(take(8).try_into().unwrap());
        let order = u64::from_le_bytes(take(8).try_into().unwrap());
        let len = u64::from_le_bytes(take(8).try_into().unwrap()) as usize;
        if file_n != n
            || file_mu != mu
            || fp != grid.fingerprint()
            || order != angular_order as u64
            || len != grid.len()
        {
            return Ok(None);
        }
        if bytes.len() != header + 8 * len * len {
            return Err(Error::Io(format!("{} is truncated", path.display())));
        }
        let matrix = bytes[header..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(Some(Self { n, mu, angular_order, grid: grid.clone(), matrix, weights: hat_weights(grid, n) }))
    }
}

const CACHE_MAGIC: &[u8; 8] = b"MTKCSRZ1";

/// File name used by [`build_riesz_cached`] for a given key.
pub fn cache_file_name(mu: f64, n: u32, grid: &RadialGrid, angular_order: usize) -> String {
    format!("riesz-n{n}-mu{:016x}-g{:016x}-a{angular_order}.bin", mu.to_bits(), grid.fingerprint())
}

/// Loads the operator from `dir` if a matching cache exists, otherwise builds
/// and stores it.
pub fn build_riesz_cached(
    mu: f64,
    n: u32,
    grid: &RadialGrid,
    angular_order: usize,
    dir: &Path,
) -> Result<RieszOperator> {
    let path: PathBuf = dir.join(cache_file_name(mu, n, grid, angular_order));
    if path.exists() {
        if let Some(op) = RieszOperator::load(&path, mu, n, grid, angular_order)? {
            return Ok(op);
        }
    }
    let op = build_riesz(mu, n, grid, angular_order)?;
    fs::create_dir_all(dir)?;
    op.save(&path)?;
    Ok(op)
}

fn diagonal_behaviour(n: u32, mu: f64) -> DiagonalBehaviour {
    let e = n as f64 - 1.0 - mu;
    if e > 0.0 {
        DiagonalBehaviour::Bounded
    } else if e == 0.0 {
        DiagonalBehaviour::Logarithmic
    } else {
        DiagonalBehaviour::Power
    }
}

fn hat_weights(grid: &RadialGrid, n: u32) -> Vec<f64> {
    let nodes = grid.nodes();
    let mut w = vec![0.0; nodes.len()];
    let pts = grid.weighted_nodes(n as f64 - 1.0, &[]);
    for (c, cell) in pts.chunks(grid.order()).enumerate() {
        let (a, h) = (nodes[c], nodes[c + 1] - nodes[c]);
        for &(r, wt) in cell {
            let x = (r - a) / h;
            w[c] += wt * (1.0 - x);
            w[c + 1] += wt * x;
        }
    }
    w
}

/// Builds the Galerkin matrix of the radial Riesz pairing on `grid`.
pub fn build_riesz(mu: f64, n: u32, grid: &RadialGrid, angular_order: usize) -> Result<RieszOperator> {
    check_mu(n, mu)?;
    if !(2..=64).contains(&angular_order) {
        return Err(Error::InvalidParameter(format!("angular order {angular_order} out of range")));
    }
    let table = KernelTable::new(n, mu, angular_order);
    let nodes = grid.nodes();
    let cells = nodes.len() - 1;
    let pw = n as f64 - 1.0;

    // singular exponent of K across the diagonal, and graded levels that
    // push the truncated corner below ~1e-11 relative
    let sigma = (mu - (n as f64 - 1.0)).max(0.0);
    let digits = 11.0 * std::f64::consts::LN_10 / (1.0 / GRADING_RATIO).ln();
    let inner_levels = ((digits / (1.0 - sigma)).ceil() as usize).clamp(8, 60);
    let outer_levels = ((digits / (2.0 - sigma)).ceil() as usize).max(6);

    let graded_rule = UnitRule::legendre(8);
    let inner = graded_unit(&graded_rule, inner_levels, GRADING_RATIO);
    let outer = graded_unit(&graded_rule, outer_levels, GRADING_RATIO);
    let corner = graded_unit(&graded_rule, inner_levels, GRADING_RATIO);
    let rules: Vec<UnitRule> = [4, 6, 8].iter().map(|&q| UnitRule::legendre(q)).collect();

    let cell = |c: usize| (nodes[c], nodes[c + 1]);
    let weight = |r: f64, rho: f64, gap: f64| (r * rho).powf(pw) * table.kernel_gap(r.max(rho), gap);

    // local 2x2 block for cells (c, d), c <= d; entry [alpha][beta] pairs the
    // hat of node c+alpha with that of node d+beta
    let block = |c: usize, d: usize| -> [[f64; 2]; 2] {
        let (a, b) = cell(c);
        let (e, f) = cell(d);
        let (h, k) = (b - a, f - e);
        let mut m = [[0.0; 2]; 2];
        let mut add = |r: f64, rho: f64, gap: f64, w: f64| {
            let x = (r - a) / h;
            let y = (rho - e) / k;
            let kw = w * weight(r, rho, gap);
            let (pa, pb) = ([1.0 - x, x], [1.0 - y, y]);
            for al in 0..2 {
                for be in 0..2 {
                    m[al][be] += kw * pa[al] * pb[be];
                }
            }
        };
        if c == d {
            // Duffy split of the lower triangle rho < r: r = a + h x,
            // rho = r - (r - a) y; the upper triangle is its transpose
            for &(x, wx) in &outer {
                let r = a + h * x;
                let span = r - a;
                for &(y, wy) in &inner {
                    add(r, r - span * y, span * y, wx * wy * h * span);
                }
            }
            let off = m[0][1] + m[1][0];
            m[0][0] *= 2.0;
            m[1][1] *= 2.0;
            m[0][1] = off;
            m[1][0] = off;
        } else if d == c + 1 {
            // corner singularity at the shared node b = e
            for &(u, wu) in &corner {
                let r = b - h * u;
                for &(v, wv) in &corner {
                    add(r, e + k * v, h * u + k * v, wu * wv * h * k);
                }
            }
        } else {
            let q = match d - c {
                2..=3 => &rules[2],
                4..=8 => &rules[1],
                _ => &rules[0],
            };
            for (r, wr) in q.mapped(a, b) {
                for (rho, wrho) in q.mapped(e, f) {
                    add(r, rho, rho - r, wr * wrho);
                }
            }
        }
        m
    };

    let rows: Vec<Vec<[[f64; 2]; 2]>> =
        (0..cells).into_par_iter().map(|c| (c..cells).map(|d| block(c, d)).collect()).collect();

    let len = nodes.len();
    let omega = sphere_area(n)?;
    let mut matrix = vec![0.0; len * len];
    for (c, row) in rows.iter().enumerate() {
        for (off, m) in row.iter().enumerate() {
            let d = c + off;
            for (al, m_row) in m.iter().enumerate() {
                for (be, &entry) in m_row.iter().enumerate() {
                    let (i, j) = (c + al, d + be);
                    let v = omega * entry;
                    matrix[i * len + j] += v;
                    if c != d {
                        matrix[j * len + i] += v;
                    }
                }
            }
        }
    }
    Ok(RieszOperator { n, mu, angular_order, grid: grid.clone(), matrix, weights: hat_weights(grid, n) })
}

/// `D(f, g) = f^T A g`.
pub fn riesz_form(op: &RieszOperator, f: &[f64], g: &[f64]) -> Result<f64> {
    op.check_len(f.len())?;
    let ag = op.apply(g)?;
    Ok(f.iter().zip(&ag).map(|(a, b)| a * b).sum())
}

/// `L^t` norm of the nodal interpolant, `t` the diagonal HLS exponent.
pub fn nodal_lebesgue_norm(op: &RieszOperator, f: &[f64], t: f64) -> Result<f64> {
    op.check_len(f.len())?;
    let grid = op.grid();
    let profile = RadialProfile::nodal(grid.nodes().to_vec(), f.to_vec())?;
    let integral = grid.integrate_power(|r| profile.value(r).abs().powf(t), op.n as f64 - 1.0, profile.breaks());
    Ok((sphere_area(op.n)? * integral).powf(1.0 / t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HlsCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// `D(f, g)` against `C(n, mu) ||f||_t ||g||_t`, `t = 2n/(2n - mu)`.
pub fn hls_check(op: &RieszOperator, f: &[f64], g: &[f64]) -> Result<HlsCheck> {
    let lhs = riesz_form(op, f, g)?;
    let t = hls_exponent(op.n, op.mu);
    let rhs = hls_constant(op.n, op.mu)? * nodal_lebesgue_norm(op, f, t)? * nodal_lebesgue_norm(op, g, t)?;
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(HlsCheck { lhs, rhs, ratio })
}
