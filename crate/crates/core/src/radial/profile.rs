use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// `r -> (value, radial derivative)`.
pub type Evaluator = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Analytic,
    NodalLinear,
}

#[derive(Clone)]
enum Repr {
    Analytic(Evaluator),
    Nodal { radii: Arc<[f64]>, values: Arc<[f64]> },
}

/// A radial function on a ball, known either in closed form or by its nodal
/// values with linear interpolation. Breakpoints mark where the derivative
/// may jump; quadrature splits cells there.
#[derive(Clone)]
pub struct RadialProfile {
    repr: Repr,
    support: f64,
    breaks: Arc<[f64]>,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("kind", &self.kind())
            .field("support", &self.support)
            .field("breaks", &self.breaks.len())
            .finish()
    }
}

impl RadialProfile {
    pub fn analytic(eval: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static, support: f64, breaks: Vec<f64>) -> Self {
        let mut breaks = breaks;
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        Self { repr: Repr::Analytic(Arc::new(eval)), support, breaks: breaks.into() }
    }

    /// Piecewise-linear profile through `(radii[i], values[i])`; zero beyond the
    /// last radius.
    pub fn nodal(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.len() < 2 {
            return Err(Error::InvalidParameter(
                "nodal profile needs matching radii/values with at least two nodes".into(),
            ));
        }
        if radii[0] != 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("nodal radii must start at 0 and increase strictly".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("nodal values must be finite".into()));
        }
        let support = *radii.last().unwrap();
        let radii: Arc<[f64]> = radii.into();
        Ok(Self { breaks: radii.clone(), repr: Repr::Nodal { radii, values: values.into() }, support })
    }

    pub fn zero(support: f64) -> Self {
        Self::analytic(|_| (0.0, 0.0), support, Vec::new())
    }

    pub fn kind(&self) -> ProfileKind {
        match self.repr {
            Repr::Analytic(_) => ProfileKind::Analytic,
            Repr::Nodal { .. } => ProfileKind::NodalLinear,
        }
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Value and radial derivative at `r`; the derivative is one-sided
    /// (from the right) at nodal breakpoints.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        match &self.repr {
            Repr::Analytic(f) => f(r),
            Repr::Nodal { radii, values } => {
                let last = radii.len() - 1;
                if r < 0.0 || r > radii[last] {
                    return (0.0, 0.0);
                }
                let i = match radii.binary_search_by(|x| x.total_cmp(&r)) {
                    Ok(i) => i.min(last - 1),
                    Err(i) => i - 1,
                };
                let (r0, r1) = (radii[i], radii[i + 1]);
                let slope = (values[i + 1] - values[i]) / (r1 - r0);
                (values[i] + slope * (r - r0), slope)
            }
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.eval(r).1
    }

    /// Nodal values (not derivatives) if this profile is piecewise linear.
    pub fn nodal_values(&self) -> Option<(&[f64], &[f64])> {
        match &self.repr {
            Repr::Nodal { radii, values } => Some((radii, values)),
            Repr::Analytic(_) => None,
        }
    }

    pub fn has_zero_trace(&self, radius: f64, tol: f64) -> bool {
        self.value(radius).abs() <= tol
    }

    pub fn scaled(&self, c: f64) -> Self {
        match &self.repr {
            Repr::Nodal { radii, values } => Self {
                repr: Repr::Nodal { radii: radii.clone(), values: values.iter().map(|v| c * v).collect() },
                support: self.support,
                breaks: self.breaks.clone(),
            },
            Repr::Analytic(f) => {
                let f = f.clone();
                Self {
                    repr: Repr::Analytic(Arc::new(move |r| {
                        let (v, d) = f(r);
                        (c * v, c * d)
                    })),
                    support: self.support,
                    breaks: self.breaks.clone(),
                }
            }
        }
    }

    pub fn add(&self, other: &RadialProfile) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let breaks = self.breaks.iter().chain(other.breaks.iter()).copied().collect();
        Self::analytic(
            move |r| {
                let (va, da) = a.eval(r);
                let (vb, db) = b.eval(r);
                (va + vb, da + db)
            },
            self.support.max(other.support),
            breaks,
        )
    }

    /// Values at the given radii.
    pub fn sample(&self, radii: &[f64]) -> Vec<f64> {
        radii.iter().map(|&r| self.value(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodal_interpolation() {
        let p = RadialProfile::nodal(vec![0.0, 0.5, 1.0], vec![1.0, 0.5, 0.0]).unwrap();
        assert_eq!(p.kind(), ProfileKind::NodalLinear);
        assert_eq!(p.eval(0.25), (0.75, -1.0));
        assert_eq!(p.eval(1.0), (0.0, -1.0));
        assert_eq!(p.eval(2.0), (0.0, 0.0));
        assert!(p.has_zero_trace(1.0, 0.0));
    }

    #[test]
    fn nodal_validation() {
        assert!(RadialProfile::nodal(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(RadialProfile::nodal(vec![0.1, 1.0], vec![1.0, 0.0]).is_err());
        assert!(RadialProfile::nodal(vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn scaled_and_sum() {
        let a = RadialProfile::analytic(|r| (1.0 - r, -1.0), 1.0, vec![]);
        let b = RadialProfile::nodal(vec![0.0, 1.0], vec![2.0, 0.0]).unwrap();
        let s = a.scaled(3.0).add(&b);
        let (v, d) = s.eval(0.5);
        assert!((v - 2.5).abs() < 1e-15);
        assert!((d + 5.0).abs() < 1e-15);
        assert_eq!(b.scaled(0.5).kind(), ProfileKind::NodalLinear);
    }
}
