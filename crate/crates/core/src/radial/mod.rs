//! Radial reduction on a ball `B(0,R)`: graded grids, Sobolev norms of radial
//! profiles, product norms and the power-law rescaling `r -> r^s`.

mod grid;
mod profile;
pub mod quadrature;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use grid::{RadialGrid, DEFAULT_CELL_ORDER, DEFAULT_GRADING, DEFAULT_NODE_COUNT, LOG_OVERFLOW};
pub use profile::{Evaluator, ProfileKind, RadialProfile};

use crate::error::{Error, Result};
use crate::special::{sphere_area, DimensionParams};

/// Which product space a norm or threshold refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    /// `W_0^{1,n} x W_0^{1,n}` with the Dirichlet norm.
    Y,
    /// `W^{1,n} x W^{1,n}` with the full norm.
    Z,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Y => "Y",
            Space::Z => "Z",
        })
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Y" | "y" => Ok(Space::Y),
            "Z" | "z" => Ok(Space::Z),
            _ => Err(Error::InvalidParameter(format!("unknown space {s:?}"))),
        }
    }
}

fn checked(value: f64, grid: &RadialGrid, bad: impl Fn(f64) -> bool) -> Result<f64> {
    if value.is_finite() {
        return Ok(value);
    }
    let radius = grid.nodes().iter().copied().find(|&r| bad(r)).unwrap_or(0.0);
    Err(Error::QuadratureOverflow { radius })
}

fn dirichlet_energy(u: &RadialProfile, n: u32, grid: &RadialGrid) -> Result<f64> {
    let nf = n as f64;
    let omega = sphere_area(n)?;
    let integrand = |r: f64| u.derivative(r).abs().powf(nf);
    let value = omega * grid.integrate_power(integrand, nf - 1.0, u.breaks());
    checked(value, grid, |r| !integrand(r).is_finite())
}

/// `(omega_{n-1} int_0^R |u'|^n r^{n-1} dr)^{1/n}`.
pub fn dirichlet_seminorm(u: &RadialProfile, n: u32, grid: &RadialGrid) -> Result<f64> {
    Ok(dirichlet_energy(u, n, grid)?.powf(1.0 / n as f64))
}

/// Full `W^{1,n}` norm including the zeroth-order term.
pub fn full_norm(u: &RadialProfile, n: u32, grid: &RadialGrid) -> Result<f64> {
    let nf = n as f64;
    let omega = sphere_area(n)?;
    let integrand = |r: f64| {
        let (v, d) = u.eval(r);
        v.abs().powf(nf) + d.abs().powf(nf)
    };
    let value = omega * grid.integrate_power(integrand, nf - 1.0, u.breaks());
    checked(value, grid, |r| !integrand(r).is_finite()).map(|e| e.powf(1.0 / nf))
}

/// An ordered pair `(u, v)` of radial profiles.
#[derive(Debug, Clone)]
pub struct ProductPair {
    pub u: RadialProfile,
    pub v: RadialProfile,
    pub dims: DimensionParams,
}

impl ProductPair {
    pub fn new(u: RadialProfile, v: RadialProfile, dims: DimensionParams) -> Self {
        Self { u, v, dims }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(self.u.scaled(c), self.v.scaled(c), self.dims)
    }

    /// Union of the breakpoints of both components.
    pub fn breaks(&self) -> Vec<f64> {
        self.u.breaks().iter().chain(self.v.breaks()).copied().collect()
    }

    /// Component norms `(||u||, ||v||)` in the given space.
    pub fn component_norms(&self, space: Space, grid: &RadialGrid) -> Result<(f64, f64)> {
        self.dims.require_first_order()?;
        let n = self.dims.n();
        match space {
            Space::Y => Ok((dirichlet_seminorm(&self.u, n, grid)?, dirichlet_seminorm(&self.v, n, grid)?)),
            Space::Z => Ok((full_norm(&self.u, n, grid)?, full_norm(&self.v, n, grid)?)),
        }
    }
}

/// `(||u||^{n/m} + ||v||^{n/m})^{m/n}`; only `m = 1` is discretized.
pub fn pair_norm(p: &ProductPair, space: Space, grid: &RadialGrid) -> Result<f64> {
    let (a, b) = p.component_norms(space, grid)?;
    let q = p.dims.sobolev_exponent();
    Ok((a.powf(q) + b.powf(q)).powf(1.0 / q))
}

/// `u~(r) = s^{(n-1)/n} u(r^{1/s})` on `[0, R^s]`; preserves the Dirichlet integral.
pub fn scale_map(u: &RadialProfile, s: f64, n: u32, radius: f64) -> Result<RadialProfile> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParameter(format!("scale s must lie in (0,1], got {s}")));
    }
    if s == 1.0 {
        return Ok(u.clone());
    }
    let nf = n as f64;
    let amp = s.powf((nf - 1.0) / nf);
    let inv = 1.0 / s;
    let inner = u.clone();
    let breaks = u.breaks().iter().map(|b| b.powf(s)).collect();
    Ok(RadialProfile::analytic(
        move |r| {
            if r <= 0.0 {
                let (v, _) = inner.eval(0.0);
                return (amp * v, 0.0);
            }
            let x = r.powf(inv);
            let (v, d) = inner.eval(x);
            (amp * v, amp * d * inv * x / r)
        },
        radius.powf(s),
        breaks,
    ))
}

/// `omega_{n-1} int_0^R g(r) r^{n-1-lambda} dr`.
pub fn weighted_volume_integral(
    g: impl Fn(f64) -> f64,
    breaks: &[f64],
    lambda: f64,
    n: u32,
    grid: &RadialGrid,
) -> Result<f64> {
    let nf = n as f64;
    if !(lambda < nf) || lambda < 0.0 {
        return Err(Error::Domain(format!("singular weight exponent must lie in [0, {n}), got {lambda}")));
    }
    Ok(sphere_area(n)? * grid.integrate_power(g, nf - 1.0 - lambda, breaks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn linear() -> RadialProfile {
        RadialProfile::analytic(|r| (1.0 - r, -1.0), 1.0, vec![])
    }

    #[test]
    fn seminorm_of_linear_profile() {
        let g = RadialGrid::default_for(1.0).unwrap();
        assert_relative_eq!(dirichlet_seminorm(&linear(), 2, &g).unwrap(), PI.sqrt(), max_relative = 1e-12);
        assert_eq!(dirichlet_seminorm(&RadialProfile::zero(1.0), 2, &g).unwrap(), 0.0);
    }

    #[test]
    fn full_norms() {
        let g = RadialGrid::default_for(1.0).unwrap();
        let expect = (2.0 * PI * (1.0 / 12.0 + 0.5)).sqrt();
        assert_relative_eq!(full_norm(&linear(), 2, &g).unwrap(), expect, max_relative = 1e-12);
        let one = RadialProfile::analytic(|_| (1.0, 0.0), 1.0, vec![]);
        assert_relative_eq!(full_norm(&one, 2, &g).unwrap(), PI.sqrt(), max_relative = 1e-12);
        assert_eq!(full_norm(&RadialProfile::zero(1.0), 2, &g).unwrap(), 0.0);
    }

    #[test]
    fn pair_norm_consistency() {
        let g = RadialGrid::default_for(1.0).unwrap();
        let dims = DimensionParams::new(2, 1).unwrap();
        let zero = RadialProfile::zero(1.0);
        let p0 = ProductPair::new(zero.clone(), zero.clone(), dims);
        assert_eq!(pair_norm(&p0, Space::Y, &g).unwrap(), 0.0);
        let p1 = ProductPair::new(linear(), zero, dims);
        assert_relative_eq!(
            pair_norm(&p1, Space::Y, &g).unwrap(),
            dirichlet_seminorm(&linear(), 2, &g).unwrap(),
            max_relative = 1e-15
        );
        let bad = ProductPair::new(linear(), linear(), DimensionParams::new(4, 2).unwrap());
        assert_eq!(pair_norm(&bad, Space::Y, &g), Err(Error::UnsupportedOrder(2)));
    }

    #[test]
    fn volume_integrals() {
        let g = RadialGrid::default_for(1.0).unwrap();
        assert_relative_eq!(weighted_volume_integral(|_| 1.0, &[], 0.0, 2, &g).unwrap(), PI, max_relative = 1e-12);
        assert_relative_eq!(
            weighted_volume_integral(|_| 1.0, &[], 1.0, 2, &g).unwrap(),
            2.0 * PI,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            weighted_volume_integral(|_| 1.0, &[], 0.0, 3, &g).unwrap(),
            4.0 * PI / 3.0,
            max_relative = 1e-12
        );
        assert!(weighted_volume_integral(|_| 1.0, &[], 2.0, 2, &g).is_err());
    }

    #[test]
    fn scale_identity_is_noop() {
        let u = linear();
        let v = scale_map(&u, 1.0, 2, 1.0).unwrap();
        assert_eq!(v.eval(0.3), u.eval(0.3));
        assert!(scale_map(&u, 0.0, 2, 1.0).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let g = RadialGrid::new(1.0, 32, 1.0).unwrap();
        let wild = RadialProfile::analytic(|r| (0.0, if r > 0.5 { f64::INFINITY } else { 0.0 }), 1.0, vec![]);
        assert!(matches!(dirichlet_seminorm(&wild, 2, &g), Err(Error::QuadratureOverflow { .. })));
    }
}
