//! Congestion approximators: linear maps `R` with
//! `||Rb||_inf <= opt(b) <= alpha * ||Rb||_inf` for every balanced demand `b`.
//!
//! The solver only ever touches the [`CongestionApproximator`] trait; the
//! concrete implementations here are a diagonal degree map, a single spanning
//! tree, and a recursive forest hierarchy.

mod degree;
mod hierarchy;
mod tree;

pub use degree::DegreeApproximator;
pub use hierarchy::{
    build_hierarchy, load_hierarchy, save_hierarchy, ForestHierarchy, HierarchyError,
};
pub use tree::{build_tree_approximator, tree_flow, tree_potential, TreeApproximator, TreeError};

pub(crate) use tree::RootedForest;

use crate::graph::{DemandVector, Graph};

/// A matrix `R` whose infinity norm of `Rb` sandwiches the optimal congestion
/// of routing `b`, together with its exact adjoint.
///
/// Implementations whose rows are genuine cut congestions satisfy the lower
/// bound `||Rb||_inf <= opt(b)` unconditionally; the upper bound holds up to
/// the claimed `alpha`. A consequence the descent step size relies on:
/// `||R(Bf)||_inf <= ||C^{-1}f||_inf` for any flow `f`.
pub trait CongestionApproximator {
    /// Number of rows of `R`.
    fn rows(&self) -> usize;

    /// The factor `alpha` the implementation claims for the upper bound.
    fn alpha_claimed(&self) -> f64;

    /// `R b`.
    fn apply(&self, b: &[f64]) -> Vec<f64>;

    /// `R^T p`; exact adjoint of [`CongestionApproximator::apply`].
    fn apply_adjoint(&self, p: &[f64]) -> Vec<f64>;
}

impl<T: CongestionApproximator + ?Sized> CongestionApproximator for &T {
    fn rows(&self) -> usize {
        (**self).rows()
    }
    fn alpha_claimed(&self) -> f64 {
        (**self).alpha_claimed()
    }
    fn apply(&self, b: &[f64]) -> Vec<f64> {
        (**self).apply(b)
    }
    fn apply_adjoint(&self, p: &[f64]) -> Vec<f64> {
        (**self).apply_adjoint(p)
    }
}

/// Empirical estimate of `alpha`: the maximum of `opt(b) / ||Rb||_inf` over
/// sampled balanced demands plus source-sink pairs (exhaustive pairs when
/// `n <= 12`, sampled otherwise). Uses the exact oracle, so keep `g` at desk
/// scale.
pub fn measure_alpha(
    r: &dyn CongestionApproximator,
    g: &Graph,
    trials: usize,
    seed: u64,
) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = g.vertex_count();
    let mut demands: Vec<DemandVector> = Vec::new();
    for _ in 0..trials {
        let mut vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        vals.iter_mut().for_each(|x| *x -= mean);
        demands.push(DemandVector::from_raw_unchecked(vals));
    }
    if n <= 12 {
        for s in 0..n {
            for t in (s + 1)..n {
                demands.push(DemandVector::unit_pair(n, s, t));
            }
        }
    } else {
        for _ in 0..trials.max(1) {
            let s = rng.gen_range(0..n);
            let t = rng.gen_range(0..n);
            if s != t {
                demands.push(DemandVector::unit_pair(n, s, t));
            }
        }
    }
    let mut alpha = 1.0f64;
    for b in &demands {
        let rb_inf = crate::graph::linf(&r.apply(b.values()));
        if rb_inf <= 1e-300 {
            continue;
        }
        let opt = crate::oracle::exact_opt_congestion(g, b, 1e-9)
            .expect("balanced demand")
            .opt_value;
        alpha = alpha.max(opt / rb_inf);
    }
    alpha
}
