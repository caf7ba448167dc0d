//! The symmetric softmax `lmax` and the congestion potential built from it.
//!
//! `lmax(x) = log(sum_i e^{x_i} + e^{-x_i})` is a smooth overestimate of the
//! infinity norm: `max(||x||_inf, log 2d) <= lmax(x) <= ||x||_inf + log(2d)`.
//! Its gradient has three properties the descent analysis leans on:
//!
//! * `||grad lmax(x)||_1 <= 1`
//! * `grad lmax(x) . x >= lmax(x) - log(2d)`
//! * `||grad lmax(x) - grad lmax(y)||_1 <= ||x - y||_inf`
//!
//! Arguments reach magnitudes around `16 log(n) / eps` inside the solver, so
//! every exponential here is max-shifted; value and gradient share one pass.

use thiserror::Error;

use crate::approx::CongestionApproximator;
use crate::graph::{Flow, Graph, Potentials};

#[derive(Debug, Error)]
pub enum SmoothingError {
    #[error("lmax of an empty vector is undefined")]
    Empty,
}

/// `log(sum_i e^{x_i} + e^{-x_i})`, computed overflow-safely.
pub fn lmax(x: &[f64]) -> Result<f64, SmoothingError> {
    if x.is_empty() {
        return Err(SmoothingError::Empty);
    }
    let shift = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sum: f64 = x.iter().map(|&v| (v - shift).exp() + (-v - shift).exp()).sum();
    Ok(shift + sum.ln())
}

/// Gradient of [`lmax`]: component `i` is
/// `(e^{x_i} - e^{-x_i}) / sum_j (e^{x_j} + e^{-x_j})`.
pub fn grad_lmax(x: &[f64]) -> Vec<f64> {
    let (_, _, grad) = lmax_with_grad(x);
    grad
}

/// One-pass value and gradient; returns `(shift, lmax, grad)`.
fn lmax_with_grad(x: &[f64]) -> (f64, f64, Vec<f64>) {
    let shift = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut sum = 0.0;
    let mut grad: Vec<f64> = x
        .iter()
        .map(|&v| {
            let up = (v - shift).exp();
            let down = (-v - shift).exp();
            sum += up + down;
            up - down
        })
        .collect();
    for g in &mut grad {
        *g /= sum;
    }
    (shift, shift + sum.ln(), grad)
}

/// The two halves of the congestion potential at a given flow.
#[derive(Debug, Clone)]
pub struct PotentialParts {
    /// Edge congestions `C^{-1} f`.
    pub x1: Vec<f64>,
    /// Scaled residual estimate `2 alpha R (b - Bf)`.
    pub x2: Vec<f64>,
    /// `grad lmax(x1)`; `||p1||_1 <= 1`.
    pub p1: Vec<f64>,
    /// `grad lmax(x2)`; `||p2||_1 <= 1`.
    pub p2: Vec<f64>,
    /// `lmax(x1) + lmax(x2)`.
    pub phi: f64,
}

/// Evaluates the potential `phi(f) = lmax(C^{-1} f) + lmax(2 alpha R (b - Bf))`
/// together with both gradient pieces. Applies `R` exactly once.
///
/// `b` is passed as a raw slice so callers can hand in scaled demands.
pub fn potential(
    g: &Graph,
    r: &dyn CongestionApproximator,
    alpha: f64,
    b: &[f64],
    f: &Flow,
) -> Result<PotentialParts, SmoothingError> {
    assert_eq!(b.len(), g.vertex_count(), "demand length mismatch");
    assert_eq!(f.len(), g.edge_count(), "flow length mismatch");
    let x1: Vec<f64> = g.edges().iter().zip(f.values()).map(|(e, fe)| fe / e.capacity).collect();
    // Residual b - Bf, inlined to avoid an intermediate DemandVector.
    let mut residual = b.to_vec();
    for (e, fe) in g.edges().iter().zip(f.values()) {
        residual[e.head] -= fe;
        residual[e.tail] += fe;
    }
    let mut x2 = r.apply(&residual);
    for v in &mut x2 {
        *v *= 2.0 * alpha;
    }
    if x1.is_empty() || x2.is_empty() {
        return Err(SmoothingError::Empty);
    }
    let (_, l1, p1) = lmax_with_grad(&x1);
    let (_, l2, p2) = lmax_with_grad(&x2);
    Ok(PotentialParts { x1, x2, p1, p2, phi: l1 + l2 })
}

/// Gradient of the potential at the flow `potential` was evaluated on, plus
/// the vertex potentials `v = R^T p2` it is built from.
#[derive(Debug, Clone)]
pub struct PotentialGradient {
    /// `grad phi(f)` per edge: `p1_e / c_e - 2 alpha (B^T v)_e`.
    pub edge_grad: Vec<f64>,
    /// `v = R^T p2`.
    pub potentials: Potentials,
}

/// Computes `grad phi(f) = C^{-1} p1 - 2 alpha B^T R^T p2` from previously
/// evaluated [`PotentialParts`]. Applies `R^T` exactly once.
pub fn potential_gradient(
    g: &Graph,
    r: &dyn CongestionApproximator,
    alpha: f64,
    parts: &PotentialParts,
) -> PotentialGradient {
    let mut p2 = parts.p2.clone();
    for v in &mut p2 {
        *v *= 2.0 * alpha;
    }
    let v = r.apply_adjoint(&p2);
    let edge_grad: Vec<f64> = g
        .edges()
        .iter()
        .zip(&parts.p1)
        .map(|(e, p1e)| p1e / e.capacity - (v[e.head] - v[e.tail]))
        .collect();
    // Report v without the 2 alpha factor folded in; the dual certificate is
    // scale-invariant in v but tests compare against R^T p2 directly.
    let potentials = r.apply_adjoint(&parts.p2);
    PotentialGradient { edge_grad, potentials: Potentials::new(potentials) }
}
