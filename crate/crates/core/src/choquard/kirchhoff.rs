use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `m(t) = d0 + d1 t^beta` and its primitive `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KirchhoffModel {
    pub d0: f64,
    pub d1: f64,
    pub beta: f64,
}

impl KirchhoffModel {
    /// Superadditivity of `M` needs `beta >= 0` whenever `d1 > 0`, and the
    /// monotonicity of `m(t)/t` needs `beta < 1`.
    pub fn new(d0: f64, d1: f64, beta: f64) -> Result<Self> {
        if !(d0 >= 0.0 && d1 >= 0.0) || !(d0 + d1 > 0.0) || !d0.is_finite() || !d1.is_finite() {
            return Err(Error::InvalidParameter(format!("need d0, d1 >= 0 not both zero, got ({d0}, {d1})")));
        }
        if d1 > 0.0 && !(0.0..1.0).contains(&beta) {
            return Err(Error::InvalidParameter(format!("beta must lie in [0, 1), got {beta}")));
        }
        Ok(Self { d0, d1, beta })
    }

    /// `m(t) = 1`.
    pub fn constant() -> Self {
        Self { d0: 1.0, d1: 0.0, beta: 0.0 }
    }

    pub fn m(&self, t: f64) -> f64 {
        if self.d1 == 0.0 {
            return self.d0;
        }
        self.d0 + self.d1 * t.max(0.0).powf(self.beta)
    }

    /// `M(t) = d0 t + d1 t^{beta+1}/(beta+1)`.
    pub fn big_m(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        if self.d1 == 0.0 {
            return self.d0 * t;
        }
        self.d0 * t + self.d1 * t.powf(self.beta + 1.0) / (self.beta + 1.0)
    }

    /// `m(0) = 0`.
    pub fn is_degenerate(&self) -> bool {
        self.d0 == 0.0
    }

    /// Exponent `r` of the upper growth bound `m(t) <= c1 + c2 t^r`.
    pub fn growth_exponent(&self) -> f64 {
        if self.d1 > 0.0 {
            self.beta
        } else {
            0.0
        }
    }

    /// Exponent `z` of the lower bound `m(t) >= t^z` in the degenerate case.
    pub fn degenerate_exponent(&self) -> Option<f64> {
        self.is_degenerate().then_some(self.beta)
    }

    /// Samples `t -> m(t)/t` on a log grid over `[1e-6, 1e6]` and checks it never increases.
    pub fn check_ratio_monotone(&self, samples: usize) -> bool {
        let ratio: Vec<f64> = log_grid(1e-6, 1e6, samples).map(|t| self.m(t) / t).collect();
        ratio.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
    }

    /// Samples `M(t + s) >= M(t) + M(s)` on a log grid.
    pub fn check_superadditive(&self, samples: usize) -> bool {
        let pts: Vec<f64> = log_grid(1e-4, 1e4, samples).collect();
        pts.iter().all(|&t| {
            pts.iter().all(|&s| {
                let lhs = self.big_m(t + s);
                lhs >= (self.big_m(t) + self.big_m(s)) * (1.0 - 1e-12)
            })
        })
    }
}

pub(crate) fn log_grid(lo: f64, hi: f64, samples: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let steps = samples.max(2) - 1;
    (0..=steps).map(move |i| (a + (b - a) * i as f64 / steps as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn validation() {
        assert!(KirchhoffModel::new(0.0, 0.0, 0.5).is_err());
        assert!(KirchhoffModel::new(1.0, 1.0, 1.0).is_err());
        assert!(KirchhoffModel::new(-1.0, 1.0, 0.5).is_err());
        assert!(KirchhoffModel::new(1.0, 1.0, -0.5).is_err());
        assert!(KirchhoffModel::new(1.0, 0.0, 7.0).is_ok());
    }

    #[test]
    fn primitive() {
        let k = KirchhoffModel::new(0.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(k.big_m(4.0), 16.0 / 3.0, max_relative = 1e-15);
        assert!(k.is_degenerate());
        assert_eq!(k.m(0.0), 0.0);
        let c = KirchhoffModel::constant();
        assert_eq!(c.big_m(2.5), 2.5);
        assert_eq!(c.degenerate_exponent(), None);
    }

    #[test]
    fn assumptions_hold_on_samples() {
        for (d0, d1, beta) in [(1.0, 0.0, 0.0), (0.0, 1.0, 0.5), (1.0, 2.0, 0.9), (0.5, 1.0, 0.0)] {
            let k = KirchhoffModel::new(d0, d1, beta).unwrap();
            assert!(k.check_ratio_monotone(200));
            assert!(k.check_superadditive(40));
        }
    }

    #[test]
    fn negative_beta_breaks_superadditivity() {
        let k = KirchhoffModel { d0: 0.0, d1: 1.0, beta: -0.5 };
        assert!(!k.check_superadditive(40));
    }
}
