//! Discrete energy of the Kirchhoff-Choquard system on piecewise-linear radial
//! pairs, its gradient, the Nehari projection and a projected descent for
//! ground states.

mod certificate;
mod solver;

use std::sync::Arc;

pub use certificate::{
    level_bound, mountain_pass, ray_profile, verify_weak_solution, write_solution_csv, MountainPass, RayRow,
    ResidualReport, RESIDUAL_THRESHOLD,
};
pub use solver::{nehari_project, nehari_residual, ray_derivative, solve, NehariOptions, SolverOptions, SolverState};

use crate::choquard::{KirchhoffModel, NonlinearityModel, RieszOperator};
use crate::error::{Error, Result};
use crate::radial::RadialGrid;
use crate::special::{sphere_area, DimensionParams};

/// One instance of the system on a ball, discretized on the Riesz operator's grid.
#[derive(Debug, Clone)]
pub struct KCSProblem {
    pub dims: DimensionParams,
    pub kirchhoff: KirchhoffModel,
    pub nonlinearity: NonlinearityModel,
    riesz: Arc<RieszOperator>,
    omega: f64,
    // (b^n - a^n) / (n h^2) per cell: the weighted stiffness of a hat pair
    cell_stiffness: Vec<f64>,
}

impl KCSProblem {
    pub fn new(kirchhoff: KirchhoffModel, nonlinearity: NonlinearityModel, riesz: Arc<RieszOperator>) -> Result<Self> {
        let n = riesz.n();
        let dims = DimensionParams::first_order(n)?;
        if nonlinearity.n != n {
            return Err(Error::InvalidParameter(format!(
                "nonlinearity dimension {} differs from operator dimension {n}",
                nonlinearity.n
            )));
        }
        let nf = n as f64;
        let cell_stiffness =
            riesz.grid().cells().map(|(a, b)| (b.powf(nf) - a.powf(nf)) / (nf * (b - a) * (b - a))).collect();
        Ok(Self { dims, kirchhoff, nonlinearity, omega: sphere_area(n)?, riesz, cell_stiffness })
    }

    pub fn n(&self) -> u32 {
        self.dims.n()
    }

    pub fn mu(&self) -> f64 {
        self.riesz.mu()
    }

    pub fn riesz(&self) -> &RieszOperator {
        &self.riesz
    }

    pub fn grid(&self) -> &RadialGrid {
        self.riesz.grid()
    }

    /// Number of nodal values per component (the last one is pinned to 0).
    pub fn len(&self) -> usize {
        self.riesz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.riesz.is_empty()
    }

    fn check(&self, u: &[f64], v: &[f64]) -> Result<()> {
        for x in [u, v] {
            if x.len() != self.len() {
                return Err(Error::GridMismatch { expected: self.len(), got: x.len() });
            }
        }
        Ok(())
    }

    /// `||u||^n = omega int |u'|^n r^{n-1} dr`, exact for piecewise-linear `u`.
    pub fn dirichlet_energy(&self, u: &[f64]) -> f64 {
        let nf = self.dims.nf();
        let nodes = self.grid().nodes();
        let e: f64 = u
            .windows(2)
            .zip(&self.cell_stiffness)
            .zip(nodes.windows(2))
            .map(|((w, s), x)| {
                let h = x[1] - x[0];
                // s h^2 = (b^n - a^n)/n and |u'| = |du|/h
                s * h * h * ((w[1] - w[0]).abs() / h).powf(nf)
            })
            .sum();
        self.omega * e
    }

    /// `sum_c omega |g_c|^{n-2} g_c (b^n - a^n)/(n h)` scattered to nodes: the
    /// gradient of `||u||^n / n`.
    fn p_laplacian(&self, u: &[f64]) -> Vec<f64> {
        let nf = self.dims.nf();
        let nodes = self.grid().nodes();
        let mut out = vec![0.0; u.len()];
        for (c, s) in self.cell_stiffness.iter().enumerate() {
            let h = nodes[c + 1] - nodes[c];
            let g = (u[c + 1] - u[c]) / h;
            let flux = self.omega * s * h * g.abs().powf(nf - 2.0) * g;
            out[c + 1] += flux;
            out[c] -= flux;
        }
        out
    }

    fn nodal_f(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        u.iter().zip(v).map(|(&a, &b)| self.nonlinearity.f(a, b)).collect()
    }

    /// `J = M(||u||^n + ||v||^n)/n - D(F, F)/2` with `F` interpolated at the nodes.
    pub fn energy(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check(u, v)?;
        let norm_n = self.dirichlet_energy(u) + self.dirichlet_energy(v);
        let f = self.nodal_f(u, v);
        let af = self.riesz.apply(&f)?;
        let pairing: f64 = f.iter().zip(&af).map(|(a, b)| a * b).sum();
        let j = self.kirchhoff.big_m(norm_n) / self.dims.nf() - 0.5 * pairing;
        finite(j)
    }

    /// Nodal partial derivatives of [`energy`](Self::energy); the pinned
    /// boundary entry is zero.
    pub fn gradient(&self, u: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(u, v)?;
        let parts = self.gradient_parts(u, v)?;
        let gu = parts.kirchhoff_u.iter().zip(&parts.choquard_u).map(|(a, b)| a - b).collect();
        let gv = parts.kirchhoff_v.iter().zip(&parts.choquard_v).map(|(a, b)| a - b).collect();
        Ok((gu, gv))
    }

    /// Kirchhoff and Choquard sides of the gradient separately.
    pub(crate) fn gradient_parts(&self, u: &[f64], v: &[f64]) -> Result<GradientParts> {
        let norm_n = self.dirichlet_energy(u) + self.dirichlet_energy(v);
        let m = self.kirchhoff.m(norm_n);
        let f = self.nodal_f(u, v);
        let af = self.riesz.apply(&f)?;
        let last = self.len() - 1;
        let mut kirchhoff_u: Vec<f64> = self.p_laplacian(u).into_iter().map(|x| m * x).collect();
        let mut kirchhoff_v: Vec<f64> = self.p_laplacian(v).into_iter().map(|x| m * x).collect();
        let nl = &self.nonlinearity;
        let mut choquard_u: Vec<f64> = (0..=last).map(|i| af[i] * nl.f1(u[i], v[i])).collect();
        let mut choquard_v: Vec<f64> = (0..=last).map(|i| af[i] * nl.f2(u[i], v[i])).collect();
        for x in [&mut kirchhoff_u, &mut kirchhoff_v, &mut choquard_u, &mut choquard_v] {
            x[last] = 0.0;
            if x.iter().any(|y| !y.is_finite()) {
                return Err(Error::QuadratureOverflow { radius: overflow_radius(self.grid(), x) });
            }
        }
        Ok(GradientParts { kirchhoff_u, kirchhoff_v, choquard_u, choquard_v })
    }

    /// Tridiagonal weighted stiffness matrix `omega int phi_i' phi_j' r^{n-1}`
    /// with the boundary row replaced by the identity; used as the metric of
    /// the descent.
    pub(crate) fn stiffness(&self) -> Tridiagonal {
        let len = self.len();
        let mut diag = vec![0.0; len];
        let mut off = vec![0.0; len - 1];
        for (c, s) in self.cell_stiffness.iter().enumerate() {
            let w = self.omega * s;
            diag[c] += w;
            diag[c + 1] += w;
            off[c] -= w;
        }
        diag[len - 1] = 1.0;
        off[len - 2] = 0.0;
        Tridiagonal { diag, off }
    }
}

pub(crate) struct GradientParts {
    pub kirchhoff_u: Vec<f64>,
    pub kirchhoff_v: Vec<f64>,
    pub choquard_u: Vec<f64>,
    pub choquard_v: Vec<f64>,
}

/// Symmetric tridiagonal matrix.
pub(crate) struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Thomas algorithm.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = if n > 1 { self.off[0] / self.diag[0] } else { 0.0 };
        d[0] = rhs[0] / self.diag[0];
        for i in 1..n {
            let denom = self.diag[i] - self.off[i - 1] * c[i - 1];
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        d
    }
}

fn finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::QuadratureOverflow { radius: f64::NAN })
    }
}

fn overflow_radius(grid: &RadialGrid, x: &[f64]) -> f64 {
    x.iter().position(|y| !y.is_finite()).map(|i| grid.nodes()[i]).unwrap_or(f64::NAN)
}

/// Richardson extrapolation of second-order energies computed on a grid and
/// on its refinement with half the mesh size.
pub fn richardson_energy(coarse: f64, fine: f64) -> f64 {
    fine + (fine - coarse) / 3.0
}
