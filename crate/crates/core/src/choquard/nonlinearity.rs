//! `F(t, s) = (t_+ s_+)^a exp(t_+^{n'} + s_+^{n'})` and its partial derivatives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::kirchhoff::{log_grid, KirchhoffModel};
use crate::error::{Error, Result};

/// Log-values above this saturate to `f64::MAX` in the direct evaluators.
const LOG_CAP: f64 = 709.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlinearityModel {
    pub a: f64,
    pub n: u32,
}

impl NonlinearityModel {
    pub fn new(a: f64, n: u32) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("power a must be >= 0, got {a}")));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {n}")));
        }
        Ok(Self { a, n })
    }

    /// Smallest integer power above `l + 1`, where `l` is the monotonicity
    /// exponent demanded by the Kirchhoff model, and at least 3.
    pub fn default_for(n: u32, kirchhoff: &KirchhoffModel) -> Self {
        let l = monotonicity_exponent(n, kirchhoff);
        Self { a: (l + 1.0).floor().max(2.0) + 1.0, n }
    }

    /// `n / (n - 1)`.
    pub fn exponent(&self) -> f64 {
        self.n as f64 / (self.n as f64 - 1.0)
    }

    /// `log F`, `-inf` off the open positive quadrant.
    pub fn log_f(&self, t: f64, s: f64) -> f64 {
        if t <= 0.0 || s <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let e = self.exponent();
        self.a * (t.ln() + s.ln()) + t.powf(e) + s.powf(e)
    }

    /// `f1 / F = a/t + n' t^{1/(n-1)}` on the quadrant.
    pub fn log_derivative(&self, t: f64) -> f64 {
        let tail = self.exponent() * t.powf(1.0 / (self.n as f64 - 1.0));
        if self.a == 0.0 {
            tail
        } else {
            self.a / t + tail
        }
    }

    pub fn f(&self, t: f64, s: f64) -> f64 {
        saturating_exp(self.log_f(t, s))
    }

    pub fn f1(&self, t: f64, s: f64) -> f64 {
        if t <= 0.0 || s <= 0.0 {
            return 0.0;
        }
        saturating_exp(self.log_f(t, s) + self.log_derivative(t).ln())
    }

    pub fn f2(&self, t: f64, s: f64) -> f64 {
        self.f1(s, t)
    }

    /// `t -> f1(t, s) / t^l` is increasing on a log grid, for several `s`.
    pub fn check_monotone_quotient(&self, l: f64, samples: usize) -> bool {
        let ts: Vec<f64> = log_grid(1e-3, 6.0, samples).collect();
        log_grid(1e-2, 4.0, 7).all(|s| {
            let q: Vec<f64> = ts.iter().map(|&t| self.log_f(t, s) + self.log_derivative(t).ln() - l * t.ln()).collect();
            q.windows(2).all(|w| w[1] > w[0])
        })
    }

    /// Samples `f_i / (t^gamma + s^gamma)` and `F` approaching the origin
    /// along several rays; both must decay. Since `F(t, s) = int_0^t f1`,
    /// a jump of `F` at the origin means `f1` carries mass there.
    pub fn check_origin_decay(&self, gamma: f64) -> bool {
        let radii: Vec<f64> = log_grid(1e-8, 1e-2, 25).collect();
        [0.1, 1.0, 10.0].iter().all(|&slope| {
            let ratios: Vec<(f64, f64)> = radii
                .iter()
                .map(|&t| {
                    let s = slope * t;
                    (self.f1(t, s).max(self.f2(t, s)) / (t.powf(gamma) + s.powf(gamma)), self.f(t, s))
                })
                .collect();
            let (q_small, f_small) = ratios[0];
            let (q_big, f_big) = ratios[ratios.len() - 1];
            q_small < 1e-6 && q_small <= q_big && f_small < 1e-6 && f_small <= f_big
        })
    }

    /// Samples all assumptions on `F` that the solver relies on.
    pub fn assumption_report(&self, kirchhoff: &KirchhoffModel) -> AssumptionReport {
        let l = monotonicity_exponent(self.n, kirchhoff) + 0.05;
        let gamma = (self.n as f64 - 2.0) / 2.0 + 0.05;
        let symmetric = log_grid(1e-2, 3.0, 20).all(|t| (self.f1(t, t) - self.f2(t, t)).abs() <= 1e-12 * self.f1(t, t));
        let monotone = self.check_monotone_quotient(l, 400);
        let origin = self.check_origin_decay(gamma);
        AssumptionReport {
            l,
            gamma,
            monotone_quotient: monotone,
            origin_decay: origin,
            symmetric,
            pass: monotone && origin && symmetric,
        }
    }
}

/// `max{n-1, n(r+1)/2}`, plus `n(z+1)/2` when the Kirchhoff term is degenerate.
pub fn monotonicity_exponent(n: u32, kirchhoff: &KirchhoffModel) -> f64 {
    let nf = n as f64;
    let mut l = (nf - 1.0).max(nf * (kirchhoff.growth_exponent() + 1.0) / 2.0);
    if let Some(z) = kirchhoff.degenerate_exponent() {
        l = l.max(nf * (z + 1.0) / 2.0);
    }
    l
}

fn saturating_exp(x: f64) -> f64 {
    if x > LOG_CAP {
        f64::MAX
    } else {
        x.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub l: f64,
    pub gamma: f64,
    pub monotone_quotient: bool,
    pub origin_decay: bool,
    pub symmetric: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthReport {
    pub c1: f64,
    pub c2: f64,
    pub held_out: usize,
    pub violations: usize,
    pub max_ratio: f64,
}

/// Fits `C1, C2` with `|F| <= C1(|s|^k + |t|^k) + C2(|s|^p + |t|^p) exp((1+eps)(|t|^{n'} + |s|^{n'}))`
/// on `trials` seeded samples in `[-range, range]^2`, then validates on as many
/// fresh samples. `C1` is fitted on the unit box, `C2` on the remainder; both get
/// a 25% margin.
pub fn growth_bound_check(
    model: &NonlinearityModel,
    eps: f64,
    k_exp: f64,
    p_exp: f64,
    trials: usize,
    range: f64,
    seed: u64,
) -> Result<GrowthReport> {
    if !(eps > 0.0) || !(k_exp >= 1.0) || !(p_exp >= 1.0) || trials == 0 {
        return Err(Error::InvalidParameter("need eps > 0, k, p >= 1 and trials > 0".into()));
    }
    let e = model.exponent();
    let small = |t: f64, s: f64| s.abs().powf(k_exp) + t.abs().powf(k_exp);
    let large = |t: f64, s: f64| {
        (s.abs().powf(p_exp) + t.abs().powf(p_exp)) * ((1.0 + eps) * (t.abs().powf(e) + s.abs().powf(e))).exp()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || (rng.gen_range(-range..=range), rng.gen_range(-range..=range));
    let train: Vec<(f64, f64)> = (0..trials).map(|_| draw()).collect();

    let mut c1: f64 = 0.0;
    for &(t, s) in train.iter().filter(|(t, s)| t.abs() <= 1.0 && s.abs() <= 1.0) {
        let d = small(t, s);
        if d > 0.0 {
            c1 = c1.max(model.f(t, s) / d);
        }
    }
    c1 *= 1.25;
    let mut c2: f64 = 0.0;
    for &(t, s) in &train {
        let excess = model.f(t, s) - c1 * small(t, s);
        if excess > 0.0 {
            c2 = c2.max(excess / large(t, s));
        }
    }
    c2 *= 1.25;
    if !c1.is_finite() || !c2.is_finite() {
        return Err(Error::FitFailure(format!("constants diverged: C1 = {c1}, C2 = {c2}")));
    }

    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let (t, s) = draw();
        let bound = c1 * small(t, s) + c2 * large(t, s);
        let value = model.f(t, s);
        if value > 0.0 {
            max_ratio = max_ratio.max(value / bound);
        }
        if value > bound {
            violations += 1;
        }
    }
    Ok(GrowthReport { c1, c2, held_out: trials, violations, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model() -> NonlinearityModel {
        NonlinearityModel::new(3.0, 2).unwrap()
    }

    #[test]
    fn vanishes_off_quadrant() {
        let m = model();
        assert_eq!(m.f(-1.0, 5.0), 0.0);
        assert_eq!(m.f(1.0, 0.0), 0.0);
        assert_eq!(m.f1(-1.0, 5.0), 0.0);
        assert_eq!(m.f2(3.0, -0.1), 0.0);
    }

    #[test]
    fn closed_form_value() {
        let m = model();
        assert_relative_eq!(m.f(1.0, 2.0), 8.0 * (5.0f64).exp(), max_relative = 1e-14);
        // f1 = (a t^{a-1} s^a + 2 t^{a+1} s^a) e^{t^2+s^2}
        let expect = (3.0 * 8.0 + 2.0 * 8.0) * (5.0f64).exp();
        assert_relative_eq!(m.f1(1.0, 2.0), expect, max_relative = 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for n in [2, 3] {
            let m = NonlinearityModel::new(3.0, n).unwrap();
            for &(t, s) in &[(0.5, 0.7), (1.3, 0.2), (2.0, 2.5), (0.1, 1.9)] {
                let h = 1e-5 * t;
                let fd = (m.f(t + h, s) - m.f(t - h, s)) / (2.0 * h);
                assert_relative_eq!(m.f1(t, s), fd, max_relative = 1e-6);
                let h = 1e-5 * s;
                let fd = (m.f(t, s + h) - m.f(t, s - h)) / (2.0 * h);
                assert_relative_eq!(m.f2(t, s), fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn default_model_satisfies_assumptions() {
        for k in [KirchhoffModel::constant(), KirchhoffModel::new(0.0, 1.0, 0.5).unwrap()] {
            let m = NonlinearityModel::default_for(2, &k);
            assert_eq!(m.a, 3.0);
            let rep = m.assumption_report(&k);
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn flat_model_fails_at_origin() {
        let m = NonlinearityModel::new(0.0, 2).unwrap();
        assert!(!m.check_origin_decay(0.05));
        assert!(!m.assumption_report(&KirchhoffModel::constant()).pass);
    }

    #[test]
    fn growth_bound_holds() {
        let rep = growth_bound_check(&model(), 0.5, 1.5, 1.0, 10_000, 3.0, 11).unwrap();
        assert_eq!(rep.violations, 0, "{rep:?}");
        assert!(rep.c1 > 0.0 && rep.c2 > 0.0);
    }
}
