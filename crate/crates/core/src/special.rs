//! Closed-form constants: the Moser and Adams exponents, their singular and
//! product-space variants, the diagonal Hardy-Littlewood-Sobolev constant and
//! the symmetric splitting coefficients.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Ambient dimension `n` and derivative order `m`, with `n >= 2m >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DimensionParams {
    n: u32,
    m: u32,
}

impl DimensionParams {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidParameter(format!("m = {m} must be >= 1")));
        }
        if n < 2 * m {
            return Err(Error::InvalidParameter(format!("n = {n}, m = {m} violates n >= 2m")));
        }
        Ok(Self { n, m })
    }

    /// `(n, 1)`, the only order whose norms are discretized.
    pub fn first_order(n: u32) -> Result<Self> {
        Self::new(n, 1)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// The critical exponent `n/(n-m)` of the exponential nonlinearity.
    pub fn critical_exponent(&self) -> f64 {
        self.n as f64 / (self.n - self.m) as f64
    }

    /// The Sobolev integrability exponent `n/m`.
    pub fn sobolev_exponent(&self) -> f64 {
        self.n as f64 / self.m as f64
    }

    pub(crate) fn require_first_order(&self) -> Result<()> {
        if self.m != 1 {
            return Err(Error::UnsupportedOrder(self.m));
        }
        Ok(())
    }
}

// Lanczos approximation, g = 607/128 with 15 terms (Godfrey).
const LANCZOS_G: f64 = 607.0 / 128.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

/// Gamma function for `x > 0`, relative error below `1e-13` on `(0, 50]`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        // reflection keeps the series argument >= 1/2
        return Ok(PI / ((PI * x).sin() * lanczos(1.0 - x)));
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 171.0 {
        return (1..x as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    let z = x - 1.0;
    let mut series = LANCZOS_COEF[0];
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // split the power so t^(z+1/2) cannot overflow before exp(-t) is applied
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * series
}

/// Surface area `omega_{n-1}` of the unit sphere in `R^n`.
pub fn sphere_area(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("sphere_area requires n >= 1".into()));
    }
    let half = n as f64 / 2.0;
    Ok(2.0 * PI.powf(half) / gamma(half)?)
}

/// Moser's constant `alpha_n = n * omega_{n-1}^{1/(n-1)}`.
pub fn alpha_n(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain("alpha_n requires n >= 2".into()));
    }
    let omega = sphere_area(n)?;
    Ok(n as f64 * omega.powf(1.0 / (n as f64 - 1.0)))
}

/// Adams' sharp constant `zeta_{n,m}`; the Gamma ratio depends on the parity of `m`.
pub fn zeta_nm(n: u32, m: u32) -> Result<f64> {
    if m < 1 || m >= n {
        return Err(Error::Domain(format!("zeta_nm requires 1 <= m < n, got n = {n}, m = {m}")));
    }
    let (nf, mf) = (n as f64, m as f64);
    let ratio = if m % 2 == 1 {
        gamma((mf + 1.0) / 2.0)? / gamma((nf - mf + 1.0) / 2.0)?
    } else {
        gamma(mf / 2.0)? / gamma((nf - mf) / 2.0)?
    };
    let base = PI.powf(nf / 2.0) * 2f64.powf(mf) * ratio;
    Ok(nf / sphere_area(n)? * base.powf(nf / (nf - mf)))
}

/// Product-space loss factor `2^{(n-2m)/(n-m)}`.
pub fn two_nm(n: u32, m: u32) -> Result<f64> {
    let d = DimensionParams::new(n, m)?;
    let (nf, mf) = (d.n as f64, d.m as f64);
    Ok(2f64.powf((nf - 2.0 * mf) / (nf - mf)))
}

/// Singular Adams constant `(1 - alpha/n) * zeta_{n,m}`.
pub fn kappa_singular(alpha: f64, n: u32, m: u32) -> Result<f64> {
    if !(0.0..n as f64).contains(&alpha) {
        return Err(Error::Domain(format!("singular exponent must lie in [0, {n}), got {alpha}")));
    }
    Ok((1.0 - alpha / n as f64) * zeta_nm(n, m)?)
}

/// Sharp HLS constant on the diagonal `t = r = 2n/(2n - mu)`.
pub fn hls_constant(n: u32, mu: f64) -> Result<f64> {
    let nf = n as f64;
    if n < 1 || !(mu > 0.0 && mu < nf) {
        return Err(Error::Domain(format!("hls_constant requires 0 < mu < n, got {mu}")));
    }
    let ratio = gamma(nf / 2.0 - mu / 2.0)? / gamma(nf - mu / 2.0)?;
    let inner = gamma(nf / 2.0)? / gamma(nf)?;
    Ok(PI.powf(mu / 2.0) * ratio * inner.powf(-1.0 + mu / nf))
}

/// HLS Lebesgue exponent `2n/(2n - mu)` on the diagonal.
pub fn hls_exponent(n: u32, mu: f64) -> f64 {
    let nf = n as f64;
    2.0 * nf / (2.0 * nf - mu)
}

/// Maximizer and maximum of `a^alpha + (1-a)^alpha` over `a` in `(0,1)`.
pub fn concave_power_sum_max(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    Ok((0.5, 2f64.powf(1.0 - alpha)))
}

/// Coefficients with `c1^{n/m} + c2^{n/m} = 1` and `c1^{n/(n-m)} + c2^{n/(n-m)} = 2_{n,m}`.
pub fn split_pair(n: u32, m: u32) -> Result<(f64, f64)> {
    let d = DimensionParams::new(n, m)?;
    let c = 2f64.powf(-(d.m as f64) / d.n as f64);
    Ok((c, c))
}

/// All sharp constants for one parameter set.
#[derive(Debug, Clone, Serialize)]
pub struct SharpConstants {
    pub n: u32,
    pub m: u32,
    pub omega: f64,
    pub alpha_n: f64,
    pub zeta_nm: f64,
    pub two_nm: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub mu: Option<f64>,
    pub hls_c: Option<f64>,
}

impl SharpConstants {
    pub fn compute(dims: DimensionParams, lambda: f64, mu: Option<f64>) -> Result<Self> {
        let (n, m) = (dims.n(), dims.m());
        let hls_c = mu.map(|mu| hls_constant(n, mu)).transpose()?;
        Ok(Self {
            n,
            m,
            omega: sphere_area(n)?,
            alpha_n: alpha_n(n)?,
            zeta_nm: zeta_nm(n, m)?,
            two_nm: two_nm(n, m)?,
            lambda,
            kappa: kappa_singular(lambda, n, m)?,
            mu,
            hls_c,
        })
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // 40-digit reference values (mpmath)
    const GAMMA_REF: &[(f64, f64)] = &[
        (0.001, 999.423_772_484_595_466_114_982_2),
        (0.1, 9.513_507_698_668_731_836_292_487),
        (0.5, 1.772_453_850_905_516_027_298_167),
        (1.0, 1.0),
        (1.5, 0.886_226_925_452_758_013_649_083_7),
        (2.5, 1.329_340_388_179_137_020_473_626),
        (3.7, 4.170_651_783_796_603_165_393_603),
        (7.25, 1_155.381_013_919_989_687_202_704),
        (10.0, 362_880.0),
        (17.3, 48_647_628_546_156.867_817_818_18),
        (25.5, 3.086_770_540_528_696_782_770_882e24),
        (33.3, 7.487_577_596_522_706_607_992_066e35),
        (42.1, 4.856_093_781_177_067_413_457_531e49),
        (49.9, 4.118_011_034_253_058_041_880_115e62),
        (50.0, 6.082_818_640_342_675_608_722_522e62),
    ];

    #[test]
    fn gamma_matches_extended_precision() {
        for &(x, g) in GAMMA_REF {
            let got = gamma(x).unwrap();
            assert!(((got - g) / g).abs() < 1e-13, "x = {x}: {got} vs {g}");
        }
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
        assert!(gamma(f64::NAN).is_err());
    }

    #[test]
    fn gamma_recurrence() {
        for i in 1..400 {
            let x = 0.123 * i as f64;
            if x + 1.0 > 50.0 {
                break;
            }
            assert_relative_eq!(gamma(x + 1.0).unwrap(), x * gamma(x).unwrap(), max_relative = 1e-13);
        }
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(2).unwrap(), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(3).unwrap(), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(4).unwrap(), 2.0 * PI * PI, max_relative = 1e-15);
    }

    #[test]
    fn moser_constants() {
        assert_relative_eq!(alpha_n(2).unwrap(), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(alpha_n(3).unwrap(), 3.0 * (4.0 * PI).sqrt(), max_relative = 1e-15);
        for n in 2..=10 {
            assert_relative_eq!(zeta_nm(n, 1).unwrap(), alpha_n(n).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn adams_even_branch() {
        assert_relative_eq!(zeta_nm(4, 2).unwrap(), 32.0 * PI * PI, max_relative = 1e-13);
        assert!(zeta_nm(2, 2).is_err());
        assert!(zeta_nm(3, 0).is_err());
    }

    #[test]
    fn splitting_constant() {
        assert_eq!(two_nm(2, 1).unwrap(), 1.0);
        assert_relative_eq!(two_nm(3, 1).unwrap(), 2f64.sqrt(), max_relative = 1e-15);
        assert_eq!(two_nm(4, 2).unwrap(), 1.0);
        assert!(two_nm(3, 2).is_err());
    }

    #[test]
    fn singular_constant() {
        assert_eq!(kappa_singular(0.0, 4, 2).unwrap(), zeta_nm(4, 2).unwrap());
        assert_relative_eq!(kappa_singular(1.5, 3, 1).unwrap(), zeta_nm(3, 1).unwrap() / 2.0);
        assert_relative_eq!(kappa_singular(1.0, 2, 1).unwrap(), 2.0 * PI, max_relative = 1e-15);
        assert!(kappa_singular(2.0, 2, 1).is_err());
        // affine and strictly decreasing in alpha
        let k = |a| kappa_singular(a, 3, 1).unwrap();
        assert!(k(0.5) > k(1.0));
        assert_relative_eq!(k(1.0) - k(0.5), k(2.5) - k(2.0), max_relative = 1e-12);
    }

    #[test]
    fn hls_values() {
        assert_relative_eq!(hls_constant(2, 1.0).unwrap(), 2.0 * PI.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(hls_constant(3, 2.0).unwrap(), 7.303_872_119_375_109_164_834_016, max_relative = 1e-12);
        assert_relative_eq!(hls_constant(3, 1.5).unwrap(), 3.834_048_751_153_895_063_807_752, max_relative = 1e-12);
        assert!(hls_constant(2, 2.0).is_err());
        assert!(hls_constant(2, 0.0).is_err());
        // continuity probe toward mu -> 0
        let a = hls_constant(3, 1e-3).unwrap();
        let b = hls_constant(3, 2e-3).unwrap();
        assert!((a - b).abs() < 1e-2 * a);
    }

    #[test]
    fn basic_max_against_grid() {
        for alpha in [1.0 / 3.0, 0.5, 0.9] {
            let (arg, max) = concave_power_sum_max(alpha).unwrap();
            let mut best = (0.0, f64::MIN);
            let steps = 1_000_000;
            for i in 1..steps {
                let a = i as f64 / steps as f64;
                let v = a.powf(alpha) + (1.0 - a).powf(alpha);
                if v > best.1 {
                    best = (a, v);
                }
            }
            assert!((best.1 - max).abs() < 1e-9);
            assert!((best.0 - arg).abs() < 1e-5);
        }
        assert_relative_eq!(concave_power_sum_max(0.5).unwrap().1, 2f64.sqrt());
        assert!((concave_power_sum_max(1.0 - 1e-12).unwrap().1 - 1.0).abs() < 1e-11);
        assert!(concave_power_sum_max(1.0).is_err());
    }

    #[test]
    fn split_pair_constraints() {
        for (n, m) in [(2, 1), (3, 1), (4, 1), (4, 2), (5, 2), (6, 3), (9, 4)] {
            let (c1, c2) = split_pair(n, m).unwrap();
            let d = DimensionParams::new(n, m).unwrap();
            let first = c1.powf(d.sobolev_exponent()) + c2.powf(d.sobolev_exponent());
            let second = c1.powf(d.critical_exponent()) + c2.powf(d.critical_exponent());
            assert!((first - 1.0).abs() < 1e-14);
            assert!((second - two_nm(n, m).unwrap()).abs() < 1e-14);
        }
        let (c1, _) = split_pair(3, 1).unwrap();
        assert_relative_eq!(c1, 2f64.powf(-1.0 / 3.0));
    }

    #[test]
    fn dimension_validation() {
        assert!(DimensionParams::new(2, 2).is_err());
        assert!(DimensionParams::new(3, 0).is_err());
        let d = DimensionParams::new(4, 2).unwrap();
        assert_eq!(d.critical_exponent(), 2.0);
    }

    #[test]
    fn constants_bundle() {
        let c = SharpConstants::compute(DimensionParams::new(2, 1).unwrap(), 1.0, Some(1.0)).unwrap();
        assert_relative_eq!(c.kappa, 2.0 * PI, max_relative = 1e-15);
        assert_eq!(c.zeta_nm, c.alpha_n);
        assert!(c.hls_c.unwrap() > 0.0);
    }
}
