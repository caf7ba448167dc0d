//! Approximate minimum-congestion flows on undirected capacitated graphs.
//!
//! Given a balanced demand vector `b`, the solver finds a flow `f` with
//! `Bf = b` whose maximum edge congestion is within `1 + eps` of optimal,
//! together with a cut certifying the bound from the other side. The engine
//! is gradient descent on a softmax potential that charges both the current
//! congestion and an overestimate of the cost of routing what remains; the
//! overestimate comes from a pluggable congestion approximator.
//!
//! Modules:
//! * [`graph`] — graphs, demands, flows, cuts, and the divergence operators.
//! * [`smoothing`] — the softmax `lmax`, its gradient, and the potential.
//! * [`approx`] — congestion approximators (degree, spanning tree, forest
//!   hierarchy) behind one trait.
//! * [`solver`] — the descent, the outer residual recursion, threshold cuts,
//!   and certification.
//! * [`oracle`] — exact baselines (max flow, exact congestion, brute cuts).
//! * [`gen`] / [`io`] — instance generators and file formats.

pub mod approx;
pub mod gen;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod smoothing;
pub mod solver;

pub use approx::{
    build_hierarchy, build_tree_approximator, load_hierarchy, measure_alpha, save_hierarchy,
    tree_flow, tree_potential, CongestionApproximator, DegreeApproximator, ForestHierarchy,
    TreeApproximator,
};
pub use gen::CapDist;
pub use graph::{
    adjoint_divergence, cut_quantities, divergence, max_congestion, maximal_spanning_tree, Cut,
    DemandVector, Edge, Flow, Graph, GraphError, Potentials,
};
pub use oracle::{brute_opt_cut, exact_max_flow, exact_opt_congestion, OracleResult};
pub use smoothing::{grad_lmax, lmax, potential, potential_gradient, PotentialParts};
pub use solver::{
    almost_route, certify, route, st_max_flow, threshold_cut, AlmostRouteResult, CertifyReport,
    DescentMethod, FlowSolution, RoundStats, SolverConfig, SolverError,
};
