//! Exponential functionals of product pairs, their sharp thresholds, and the
//! sweeps and pointwise splits that probe them.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::{pair_norm, ProductPair, RadialGrid, Space};
use crate::sequences::{product_pair_sequence, MoserParams};
use crate::special::{alpha_n, sphere_area, two_nm, zeta_nm, DimensionParams};

/// Coefficient, singular exponent and space of one exponential functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MTQuery {
    pub theta: f64,
    pub lambda: f64,
    pub space: Space,
    pub dims: DimensionParams,
}

impl MTQuery {
    pub fn new(theta: f64, lambda: f64, space: Space, dims: DimensionParams) -> Result<Self> {
        if !(theta >= 0.0) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("theta must be >= 0, got {theta}")));
        }
        if !(lambda >= 0.0 && lambda < dims.nf()) {
            return Err(Error::Domain(format!("singular exponent must lie in [0, {}), got {lambda}", dims.n())));
        }
        Ok(Self { theta, lambda, space, dims })
    }
}

/// `int_{B_R} exp(theta (|u|^{n'} + |v|^{n'})) |x|^{-lambda} dx`, summed in
/// log space. Overflow is reported with the first offending radius.
pub fn exp_functional(p: &ProductPair, q: &MTQuery, grid: &RadialGrid) -> Result<f64> {
    p.dims.require_first_order()?;
    let n = p.dims.n();
    let nf = n as f64;
    let e = p.dims.critical_exponent();
    let log_f = |r: f64| q.theta * (p.u.value(r).abs().powf(e) + p.v.value(r).abs().powf(e));
    let breaks = p.breaks();
    let sum = grid
        .integrate_power_log(log_f, nf - 1.0 - q.lambda, &breaks)
        .map_err(|radius| Error::QuadratureOverflow { radius })?;
    Ok(sphere_area(n)? * sum)
}

/// Critical coefficient of the (singular) exponential inequality.
///
/// For `m = 1`: `(1 - lambda/n) alpha_n / 2_n` on `Y` and `(1 - lambda/n) alpha_n / 2`
/// on `Z`. For `m >= 2` only the unweighted `zeta_{n,m} / 2_{n,m}` is known.
pub fn threshold(n: u32, m: u32, lambda: f64, space: Space) -> Result<f64> {
    let dims = DimensionParams::new(n, m)?;
    let nf = n as f64;
    if !(lambda >= 0.0 && lambda < nf) {
        return Err(Error::Domain(format!("singular exponent must lie in [0, {n}), got {lambda}")));
    }
    if dims.m() == 1 {
        let split = match space {
            Space::Y => two_nm(n, 1)?,
            Space::Z => 2.0,
        };
        return Ok((1.0 - lambda / nf) * alpha_n(n)? / split);
    }
    if lambda == 0.0 && space == Space::Y {
        return Ok(zeta_nm(n, m)? / two_nm(n, m)?);
    }
    Err(Error::UnsupportedOrder(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: u64,
    /// `+inf` when the integrand overflowed.
    pub value: f64,
    pub overflow_radius: Option<f64>,
}

impl SweepRow {
    fn from_result(k: u64, r: Result<f64>) -> Result<Self> {
        match r {
            Ok(value) => Ok(Self { k, value, overflow_radius: None }),
            Err(Error::QuadratureOverflow { radius }) => {
                Ok(Self { k, value: f64::INFINITY, overflow_radius: Some(radius) })
            }
            Err(e) => Err(e),
        }
    }
}

fn check_k_list(ks: &[u64]) -> Result<()> {
    if ks.len() < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 k values, got {}", ks.len())));
    }
    if ks[0] < 2 || ks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("k values must be >= 2 and strictly increasing".into()));
    }
    Ok(())
}

/// Least-squares slope of `log(value)` against `log(k)` over the last
/// `ceil(len/2)` rows; `+inf` if any of those rows overflowed.
pub fn tail_slope(rows: &[SweepRow]) -> f64 {
    let tail = &rows[rows.len() - rows.len().div_ceil(2)..];
    if tail.iter().any(|r| !r.value.is_finite()) {
        return f64::INFINITY;
    }
    let xs: Vec<f64> = tail.iter().map(|r| (r.k as f64).ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|r| r.value.ln()).collect();
    let len = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / len, ys.iter().sum::<f64>() / len);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn max_min_ratio(rows: &[SweepRow]) -> f64 {
    let max = rows.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    max / min
}

/// Slope below which a sweep counts as bounded.
pub const BOUNDED_SLOPE: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct BlowupSweep {
    pub epsilon: f64,
    pub lambda: f64,
    pub n: u32,
    pub rho: f64,
    pub theta: f64,
    pub rows: Vec<SweepRow>,
    pub fitted_slope: f64,
    /// `0.8 epsilon (n - lambda)`.
    pub expected_lower_bound: f64,
    pub max_min_ratio: f64,
    pub bounded: bool,
    pub pass: bool,
}

/// Functional of the Moser pair sequence at `theta = (1 + epsilon) * threshold`
/// with the Moser support equal to the whole ball.
pub fn blowup_sweep(epsilon: f64, lambda: f64, n: u32, ks: &[u64], grid: &RadialGrid) -> Result<BlowupSweep> {
    blowup_sweep_with_support(epsilon, lambda, n, ks, grid.radius(), grid)
}

pub fn blowup_sweep_with_support(
    epsilon: f64,
    lambda: f64,
    n: u32,
    ks: &[u64],
    rho: f64,
    grid: &RadialGrid,
) -> Result<BlowupSweep> {
    check_k_list(ks)?;
    if !(epsilon > -1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must exceed -1, got {epsilon}")));
    }
    if !(rho > 0.0 && rho <= grid.radius()) {
        return Err(Error::InvalidParameter(format!("support radius {rho} outside (0, R]")));
    }
    let dims = DimensionParams::first_order(n)?;
    let theta = (1.0 + epsilon) * threshold(n, 1, lambda, Space::Y)?;
    let q = MTQuery::new(theta, lambda, Space::Y, dims)?;
    let rows = ks
        .iter()
        .map(|&k| {
            let pair = product_pair_sequence(&MoserParams::new(k, rho, n)?)?;
            SweepRow::from_result(k, exp_functional(&pair, &q, grid))
        })
        .collect::<Result<Vec<_>>>()?;
    let fitted_slope = tail_slope(&rows);
    let expected_lower_bound = 0.8 * epsilon * (n as f64 - lambda);
    let bounded = fitted_slope < BOUNDED_SLOPE;
    let pass = if epsilon > 0.0 { fitted_slope >= expected_lower_bound } else { bounded };
    Ok(BlowupSweep {
        epsilon,
        lambda,
        n,
        rho,
        theta,
        max_min_ratio: max_min_ratio(&rows),
        rows,
        fitted_slope,
        expected_lower_bound,
        bounded,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderSplit {
    pub lhs: f64,
    pub rhs: f64,
    /// Exponent of the volume factor; zero in the symmetric (equality) case.
    pub inv_c: f64,
}

impl HolderSplit {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-6)
    }
}

/// Both sides of the generalized Hölder bound used to reduce the product
/// functional to two scalar ones. The pair must have unit `Y` norm.
pub fn holder_split_check(p: &ProductPair, theta: f64, grid: &RadialGrid) -> Result<HolderSplit> {
    let dims = p.dims;
    dims.require_first_order()?;
    let n = dims.n();
    let limit = threshold(n, 1, 0.0, Space::Y)?;
    if !(theta > 0.0 && theta <= limit * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!("theta {theta} outside (0, {limit}]")));
    }
    let (a, b) = p.component_norms(Space::Y, grid)?;
    let norm = (a.powf(dims.nf()) + b.powf(dims.nf())).powf(1.0 / dims.nf());
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::Normalization { norm });
    }
    if a < 1e-12 || b < 1e-12 {
        return Err(Error::Degenerate("one component of the pair vanishes".into()));
    }
    let e = dims.critical_exponent();
    let split = two_nm(n, 1)?;
    let (wa, wb) = (a.powf(e) / split, b.powf(e) / split);
    let mut inv_c = 1.0 - wa - wb;
    if inv_c.abs() < 1e-6 {
        inv_c = 0.0;
    }
    let zero = crate::radial::RadialProfile::zero(grid.radius());
    let q = MTQuery::new(theta * split, 0.0, Space::Y, dims)?;
    let single = |u: &crate::radial::RadialProfile, norm: f64| {
        let unit = ProductPair::new(u.scaled(1.0 / norm), zero.clone(), dims);
        exp_functional(&unit, &q, grid)
    };
    let volume = sphere_area(n)? * grid.radius().powi(n as i32) / dims.nf();
    let rhs = volume.powf(inv_c) * single(&p.u, a)?.powf(wa) * single(&p.v, b)?.powf(wb);
    let lhs = exp_functional(p, &MTQuery::new(theta, 0.0, Space::Y, dims)?, grid)?;
    Ok(HolderSplit { lhs, rhs, inv_c })
}

fn binomial_remainder_constant(p: f64) -> f64 {
    // sup over x in (0,1) of [1 - x^p - (1-x)^p] / [x^{p-1}(1-x) + x(1-x)^{p-1}]
    let ratio = |x: f64| {
        let y = 1.0 - x;
        (1.0 - x.powf(p) - y.powf(p)) / (x.powf(p - 1.0) * y + x * y.powf(p - 1.0))
    };
    let steps = 20_000;
    let (mut best_x, mut best) = (0.5, ratio(0.5));
    for i in 1..steps {
        let x = i as f64 / steps as f64;
        let v = ratio(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    // golden-section polish around the grid maximizer
    let h = 1.0 / steps as f64;
    let (mut lo, mut hi) = ((best_x - h).max(h * 1e-3), (best_x + h).min(1.0 - h * 1e-3));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if ratio(x1) < ratio(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    best.max(ratio(0.5 * (lo + hi)))
}

/// `C_1(n,m)`: the binomial remainder constant times the larger Young weight.
/// Computed once per `(n, m)` and cached.
pub fn young_constant(dims: DimensionParams) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), f64>>> = OnceLock::new();
    let key = (dims.n(), dims.m());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&c) = cache.lock().unwrap().get(&key) {
        return c;
    }
    let (nf, mf) = (dims.nf(), dims.m() as f64);
    let c = binomial_remainder_constant(dims.critical_exponent()) * (mf / nf).max((nf - mf) / nf);
    cache.lock().unwrap().insert(key, c);
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YoungSplit {
    pub lhs: f64,
    pub rhs: f64,
    pub c_eps: f64,
    pub c_eps_prime: f64,
}

impl YoungSplit {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

/// `(a + b)^{p}` against `C_{1,eps} a^p + C'_{1,eps} b^p`, `p = n/(n-m)`.
pub fn young_split_check(a: f64, b: f64, eps: f64, dims: DimensionParams) -> Result<YoungSplit> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::InvalidParameter(format!("samples must be >= 0, got ({a}, {b})")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("eps must be > 0, got {eps}")));
    }
    let (nf, mf) = (dims.nf(), dims.m() as f64);
    let p = dims.critical_exponent();
    let c1 = young_constant(dims);
    let (s, t) = (nf / mf, nf / (nf - mf));
    let c_eps = 1.0 + c1 * eps.powf(s) + c1 * eps.powf(t);
    let c_eps_prime = 1.0 + c1 * eps.powf(-s) + c1 * eps.powf(-t);
    Ok(YoungSplit { lhs: (a + b).powf(p), rhs: c_eps * a.powf(p) + c_eps_prime * b.powf(p), c_eps, c_eps_prime })
}

#[derive(Debug, Clone, Serialize)]
pub struct LionsSweep {
    pub limit_norm: f64,
    /// The improved exponent `alpha_n / (2_n (1 - ||limit||^n)^{1/(n-1)})`.
    pub improved_bound: f64,
    pub p_factor: f64,
    pub theta: f64,
    pub rows: Vec<SweepRow>,
    pub max_min_ratio: f64,
    /// Strict increase over the last three rows.
    pub increasing_tail: bool,
}

/// Functional along `limit + (1 - ||limit||^n)^{1/n} (c1 w_k, c2 w_k)`
/// (renormalized) at `p_factor` times the improved exponent. The Moser part
/// lives on `[0, rho]`; the limit pair should live away from it.
pub fn lions_bound_check(
    limit: &ProductPair,
    ks: &[u64],
    p_factor: f64,
    rho: f64,
    grid: &RadialGrid,
) -> Result<LionsSweep> {
    check_k_list(ks)?;
    if !(p_factor > 0.0) {
        return Err(Error::InvalidParameter(format!("p_factor must be > 0, got {p_factor}")));
    }
    let dims = limit.dims;
    dims.require_first_order()?;
    let n = dims.n();
    let nf = dims.nf();
    let limit_norm = pair_norm(limit, Space::Y, grid)?;
    if !(limit_norm > 0.0 && limit_norm < 1.0) {
        return Err(Error::Degenerate(format!("limit pair norm {limit_norm} outside (0,1)")));
    }
    let rest = 1.0 - limit_norm.powf(nf);
    let improved_bound = zeta_nm(n, 1)? / (two_nm(n, 1)? * rest.powf(1.0 / (nf - 1.0)));
    let theta = p_factor * improved_bound;
    let q = MTQuery::new(theta, 0.0, Space::Y, dims)?;
    let rows = ks
        .iter()
        .map(|&k| {
            let moser = product_pair_sequence(&MoserParams::new(k, rho, n)?)?.scaled(rest.powf(1.0 / nf));
            let sum = ProductPair::new(limit.u.add(&moser.u), limit.v.add(&moser.v), dims);
            let norm = pair_norm(&sum, Space::Y, grid)?;
            SweepRow::from_result(k, exp_functional(&sum.scaled(1.0 / norm), &q, grid))
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = &rows[rows.len() - 3..];
    let increasing_tail = tail.windows(2).all(|w| w[1].value > w[0].value);
    Ok(LionsSweep {
        limit_norm,
        improved_bound,
        p_factor,
        theta,
        max_min_ratio: max_min_ratio(&rows),
        rows,
        increasing_tail,
    })
}
