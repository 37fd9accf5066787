use std::sync::Arc;

use crate::error::{Error, Result};
use crate::radial::quadrature::UnitRule;

pub const DEFAULT_NODE_COUNT: usize = 512;
pub const DEFAULT_GRADING: f64 = 1.05;
pub const DEFAULT_CELL_ORDER: usize = 8;

/// Log-integrands above this are treated as overflow.
pub const LOG_OVERFLOW: f64 = 700.0;

/// Nodes `0 = r_0 < ... < r_{N-1} = R` with cell widths growing geometrically
/// away from the origin.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    radius: f64,
    nodes: Arc<[f64]>,
    grading: f64,
    rule: Arc<UnitRule>,
}

impl RadialGrid {
    pub fn new(radius: f64, node_count: usize, grading: f64) -> Result<Self> {
        Self::with_order(radius, node_count, grading, DEFAULT_CELL_ORDER)
    }

    pub fn with_order(radius: f64, node_count: usize, grading: f64, order: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("radius must be > 0, got {radius}")));
        }
        if node_count < 16 {
            return Err(Error::InvalidParameter(format!("node_count must be >= 16, got {node_count}")));
        }
        if !(grading >= 1.0) || !grading.is_finite() {
            return Err(Error::InvalidParameter(format!("grading must be >= 1, got {grading}")));
        }
        if !(1..=64).contains(&order) {
            return Err(Error::InvalidParameter(format!("cell order {order} out of range")));
        }
        let cells = node_count - 1;
        let mut nodes = Vec::with_capacity(node_count);
        nodes.push(0.0);
        if grading == 1.0 {
            nodes.extend((1..=cells).map(|i| radius * i as f64 / cells as f64));
        } else {
            // h_i = h_0 g^i, so r_i = R (g^i - 1)/(g^N - 1)
            let total = grading.powi(cells as i32) - 1.0;
            nodes.extend((1..=cells).map(|i| radius * (grading.powi(i as i32) - 1.0) / total));
        }
        nodes[cells] = radius;
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(format!(
                "grading {grading} with {node_count} nodes underflows near the origin"
            )));
        }
        Ok(Self { radius, nodes: nodes.into(), grading, rule: Arc::new(UnitRule::legendre(order)) })
    }

    /// Default graded grid on `[0, R]`.
    pub fn default_for(radius: f64) -> Result<Self> {
        Self::new(radius, DEFAULT_NODE_COUNT, DEFAULT_GRADING)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    pub fn rule(&self) -> &UnitRule {
        &self.rule
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.windows(2).map(|w| (w[0], w[1]))
    }

    /// Stable fingerprint of the node positions, used to key kernel caches.
    pub fn fingerprint(&self) -> u64 {
        // FNV-1a over the bit patterns
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for x in self.nodes.iter().chain(std::iter::once(&(self.order() as f64))) {
            for b in x.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        h
    }

    /// Grid cells further split at `breaks` (points outside `(0, R)` ignored).
    pub fn pieces(&self, breaks: &[f64]) -> Vec<(f64, f64)> {
        let mut pts: Vec<f64> =
            self.nodes.iter().copied().chain(breaks.iter().copied().filter(|&b| b > 0.0 && b < self.radius)).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1e-300));
        pts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// `int_0^R f(r) dr` with the cell rule on every piece.
    pub fn integrate(&self, f: impl Fn(f64) -> f64, breaks: &[f64]) -> f64 {
        self.pieces(breaks).iter().map(|&(a, b)| self.rule.integrate(a, b, &f)).sum()
    }

    /// `int_0^R f(r) r^p dr` for `p > -1`. The piece at the origin uses exact
    /// moments of `r^p`; the others carry the weight inside the integrand.
    pub fn integrate_power(&self, f: impl Fn(f64) -> f64, p: f64, breaks: &[f64]) -> f64 {
        self.weighted_nodes(p, breaks).into_iter().map(|(r, w)| w * f(r)).sum()
    }

    /// Quadrature points and weights for `int_0^R f(r) r^p dr`.
    pub fn weighted_nodes(&self, p: f64, breaks: &[f64]) -> Vec<(f64, f64)> {
        let pieces = self.pieces(breaks);
        let mut out = Vec::with_capacity(pieces.len() * self.order());
        for (idx, &(a, b)) in pieces.iter().enumerate() {
            if idx == 0 && a == 0.0 {
                let w = self.rule.power_weights(p, b);
                out.extend(self.rule.nodes().iter().zip(w).map(|(&x, wj)| (b * x, wj)));
            } else {
                out.extend(self.rule.mapped(a, b).map(|(r, w)| (r, w * r.powf(p))));
            }
        }
        out
    }

    /// Log-space variant: returns `int exp(log_f(r)) r^p dr`, or the radius at
    /// which the log-integrand first exceeds [`LOG_OVERFLOW`].
    pub fn integrate_power_log(
        &self,
        log_f: impl Fn(f64) -> f64,
        p: f64,
        breaks: &[f64],
    ) -> std::result::Result<f64, f64> {
        let pts = self.weighted_nodes(p, breaks);
        let mut sum = 0.0;
        for (r, w) in pts {
            let lf = log_f(r);
            if lf > LOG_OVERFLOW || lf.is_nan() {
                return Err(r);
            }
            sum += w * lf.exp();
        }
        Ok(sum)
    }
}
