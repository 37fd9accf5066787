//! Per-cell Gauss rules, including the product rule for `r^p` on a cell that
//! touches the origin.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct UnitRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl UnitRule {
    pub fn legendre(order: usize) -> Self {
        let order = NonZeroUsize::new(order.max(1)).unwrap();
        let rule = GaussLegendre::new(order);
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            nodes: pairs.iter().map(|p| 0.5 * (p.0 + 1.0)).collect(),
            weights: pairs.iter().map(|p| 0.5 * p.1).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = b - a;
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (a + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Weights `W_j` with `sum_j W_j g(h x_j) = int_0^h g(r) r^p dr` for every
    /// polynomial `g` of degree below the rule order. The moments of `r^p`
    /// are exact, so `r = 0` is never sampled.
    pub fn power_weights(&self, p: f64, h: f64) -> Vec<f64> {
        let q = self.nodes.len();
        let scale = h.powf(p + 1.0);
        (0..q)
            .map(|j| {
                // monomial coefficients of the Lagrange basis polynomial L_j
                let mut coef = vec![0.0; q];
                coef[0] = 1.0;
                let mut deg = 0;
                let mut denom = 1.0;
                for (k, &xk) in self.nodes.iter().enumerate() {
                    if k == j {
                        continue;
                    }
                    for d in (0..=deg).rev() {
                        coef[d + 1] += coef[d];
                        coef[d] *= -xk;
                    }
                    deg += 1;
                    denom *= self.nodes[j] - xk;
                }
                let moment: f64 = coef.iter().enumerate().map(|(d, c)| c / (p + d as f64 + 1.0)).sum();
                scale * moment / denom
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_exact_for_polynomials() {
        let rule = UnitRule::legendre(6);
        for p in 0..12 {
            let got = rule.integrate(0.0, 2.0, |x| x.powi(p));
            let exact = 2f64.powi(p + 1) / (p + 1) as f64;
            assert!(((got - exact) / exact).abs() < 1e-13, "p = {p}");
        }
    }

    #[test]
    fn power_weights_integrate_singular_weight() {
        let rule = UnitRule::legendre(8);
        for p in [-0.9, -0.5, 0.0, 0.3, 1.0, 2.5] {
            let h = 0.37;
            let w = rule.power_weights(p, h);
            for deg in 0..8 {
                let got: f64 = rule.nodes().iter().zip(&w).map(|(&x, &wj)| wj * (h * x).powi(deg)).sum();
                let exact = h.powf(p + deg as f64 + 1.0) / (p + deg as f64 + 1.0);
                assert!(((got - exact) / exact).abs() < 1e-11, "p = {p}, deg = {deg}");
            }
        }
    }
}
