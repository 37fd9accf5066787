//! Moser concentration functions and the product pairs built from them.

use crate::error::{Error, Result};
use crate::radial::{ProductPair, RadialProfile};
use crate::special::{sphere_area, split_pair, zeta_nm, DimensionParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserParams {
    pub k: u64,
    pub rho: f64,
    pub n: u32,
}

impl MoserParams {
    pub fn new(k: u64, rho: f64, n: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("concentration index k must be >= 2, got {k}")));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("support radius must be > 0, got {rho}")));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {n}")));
        }
        Ok(Self { k, rho, n })
    }
}

/// `w_k`: plateau `omega^{-1/n} (log k)^{(n-1)/n}` on `[0, rho/k]`, then
/// `log(rho/r) / (omega^{1/n} (log k)^{1/n})` down to zero at `rho`.
pub fn moser_fn(p: &MoserParams) -> Result<RadialProfile> {
    moser_fn_real(p.k as f64, p.rho, p.n)
}

/// Same profile for a real concentration index `k > 1`.
pub fn moser_fn_real(k: f64, rho: f64, n: u32) -> Result<RadialProfile> {
    if !(k > 1.0) || !k.is_finite() {
        return Err(Error::InvalidParameter(format!("concentration index must exceed 1, got {k}")));
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("support radius must be > 0, got {rho}")));
    }
    let nf = n as f64;
    let omega = sphere_area(n)?;
    let log_k = k.ln();
    let plateau = omega.powf(-1.0 / nf) * log_k.powf((nf - 1.0) / nf);
    let slope = 1.0 / (omega.powf(1.0 / nf) * log_k.powf(1.0 / nf));
    let inner = rho / k;
    Ok(RadialProfile::analytic(
        move |r| {
            if r <= inner {
                (plateau, 0.0)
            } else if r < rho {
                (slope * (rho / r).ln(), -slope / r)
            } else {
                (0.0, 0.0)
            }
        },
        rho,
        vec![inner, rho],
    ))
}

/// `(c1 w_k, c2 w_k)` with the symmetric split coefficients.
pub fn product_pair_sequence(p: &MoserParams) -> Result<ProductPair> {
    let dims = DimensionParams::first_order(p.n)?;
    let (c1, c2) = split_pair(p.n, 1)?;
    let w = moser_fn(p)?;
    Ok(ProductPair::new(w.scaled(c1), w.scaled(c2), dims))
}

/// Upper bound `(zeta_{n,m} / (n log(1/l)))^{(n-m)/m}` on the conductor
/// capacity of `B_l` in `B_1`.
pub fn adams_capacity_bound(l: f64, dims: DimensionParams) -> Result<f64> {
    if !(l > 0.0 && l < 1.0) {
        return Err(Error::Domain(format!("ball radius must lie in (0,1), got {l}")));
    }
    let (n, m) = (dims.n(), dims.m());
    let zeta = zeta_nm(n, m)?;
    Ok((zeta / (n as f64 * (1.0 / l).ln())).powf((n - m) as f64 / m as f64))
}
