//! The trivial diagonal approximator `R = diag(1 / deg(i))`.
//!
//! Routing `|b_i|` into or out of vertex `i` congests some incident edge by at
//! least `|b_i| / deg(i)`, so the lower bound is unconditional. The upper
//! bound factor is the inverse conductance of the graph, which is not cheap
//! to certify; callers supply the `alpha` they want to claim (usually a
//! measured value).

use serde::{Deserialize, Serialize};

use crate::approx::CongestionApproximator;
use crate::graph::Graph;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeApproximator {
    inv_degree: Vec<f64>,
    alpha: f64,
}

impl DegreeApproximator {
    pub fn new(g: &Graph, alpha_claimed: f64) -> Self {
        let inv_degree = (0..g.vertex_count()).map(|v| 1.0 / g.weighted_degree(v)).collect();
        DegreeApproximator { inv_degree, alpha: alpha_claimed.max(1.0) }
    }
}

impl CongestionApproximator for DegreeApproximator {
    fn rows(&self) -> usize {
        self.inv_degree.len()
    }

    fn alpha_claimed(&self) -> f64 {
        self.alpha
    }

    fn apply(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.inv_degree.len(), "demand length mismatch");
        b.iter().zip(&self.inv_degree).map(|(x, d)| x * d).collect()
    }

    fn apply_adjoint(&self, p: &[f64]) -> Vec<f64> {
        assert_eq!(p.len(), self.inv_degree.len(), "price length mismatch");
        p.iter().zip(&self.inv_degree).map(|(x, d)| x * d).collect()
    }
}
