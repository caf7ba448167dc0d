//! Exact baselines used for testing and for `--method exact` on small inputs:
//! an augmenting-path max flow, exact minimum congestion by binary search, and
//! brute-force cut enumeration on tiny graphs.
//!
//! Nothing here shares code with the descent solver; the point is an
//! independent route to the same numbers.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{cut_quantities, max_congestion, Cut, DemandVector, Flow, Graph};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("demand vector is unbalanced")]
    Unbalanced,
    #[error("graph too large for brute-force enumeration: n = {n}, limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("source and sink must differ")]
    SameEndpoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    BinarySearch,
    BruteCuts,
}

/// Result of an exact minimum-congestion computation.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub opt_value: f64,
    pub witness_flow: Option<Flow>,
    pub witness_cut: Option<Cut>,
    pub method: OracleMethod,
}

// ---------------------------------------------------------------------------
// Dinic max flow on a directed expansion of the undirected graph.

struct Arc {
    to: usize,
    cap: f64,
}

struct FlowNet {
    arcs: Vec<Arc>,
    // adj[v] holds arc indices; arc i and i^1 are a forward/backward pair.
    adj: Vec<Vec<usize>>,
    eps: f64,
}

impl FlowNet {
    fn new(n: usize, cap_scale: f64) -> Self {
        FlowNet { arcs: Vec::new(), adj: vec![Vec::new(); n], eps: 1e-12 * cap_scale.max(1e-300) }
    }

    fn add_edge(&mut self, u: usize, v: usize, cap_uv: f64, cap_vu: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: v, cap: cap_uv });
        self.arcs.push(Arc { to: u, cap: cap_vu });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    fn bfs(&self, s: usize, t: usize, level: &mut [i32]) -> bool {
        level.fill(-1);
        level[s] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > self.eps && level[arc.to] < 0 {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: f64, level: &[i32], it: &mut [usize]) -> f64 {
        if u == t {
            return pushed;
        }
        while it[u] < self.adj[u].len() {
            let a = self.adj[u][it[u]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > self.eps && level[to] == level[u] + 1 {
                let got = self.dfs(to, t, pushed.min(cap), level, it);
                if got > 0.0 {
                    self.arcs[a].cap -= got;
                    self.arcs[a ^ 1].cap += got;
                    return got;
                }
            }
            it[u] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let n = self.adj.len();
        let mut level = vec![-1; n];
        let mut total = 0.0;
        while self.bfs(s, t, &mut level) {
            let mut it = vec![0usize; n];
            loop {
                let pushed = self.dfs(s, t, f64::INFINITY, &level, &mut it);
                if pushed <= 0.0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Vertices reachable from `s` in the residual network.
    fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::new();
        seen[s] = true;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > self.eps && !seen[arc.to] {
                    seen[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        seen
    }
}

/// Exact max `s`-`t` flow treating each undirected edge as usable in either
/// direction at full capacity with net-flow semantics.
///
/// Returns the flow value and a witness flow in the undirected sign
/// convention (`|f_e| <= c_e`).
pub fn exact_max_flow(g: &Graph, s: usize, t: usize) -> Result<(f64, Flow), OracleError> {
    if s == t {
        return Err(OracleError::SameEndpoints);
    }
    let cap_scale = g.edges().iter().fold(0.0f64, |m, e| m.max(e.capacity));
    let mut net = FlowNet::new(g.vertex_count(), cap_scale);
    let arc_ids: Vec<usize> = g
        .edges()
        .iter()
        .map(|e| net.add_edge(e.tail, e.head, e.capacity, e.capacity))
        .collect();
    let value = net.max_flow(s, t);
    // Net flow across an undirected edge: original forward capacity minus the
    // residual, minus whatever went the other way.
    let flow: Vec<f64> = g
        .edges()
        .iter()
        .zip(&arc_ids)
        .map(|(e, &a)| {
            let fwd_used = e.capacity - net.arcs[a].cap;
            let bwd_used = e.capacity - net.arcs[a ^ 1].cap;
            (fwd_used - bwd_used) / 2.0
        })
        .collect();
    Ok((value, Flow::new(flow).expect("finite flow")))
}

/// Min `s`-`t` cut side (containing `s`) for the same model as
/// [`exact_max_flow`]; computed by residual reachability after a max flow.
pub fn exact_min_cut(g: &Graph, s: usize, t: usize) -> Result<(f64, Vec<usize>), OracleError> {
    if s == t {
        return Err(OracleError::SameEndpoints);
    }
    let cap_scale = g.edges().iter().fold(0.0f64, |m, e| m.max(e.capacity));
    let mut net = FlowNet::new(g.vertex_count(), cap_scale);
    for e in g.edges() {
        net.add_edge(e.tail, e.head, e.capacity, e.capacity);
    }
    let value = net.max_flow(s, t);
    let seen = net.residual_reachable(s);
    let side: Vec<usize> = (0..g.vertex_count()).filter(|&v| seen[v]).collect();
    Ok((value, side))
}

// ---------------------------------------------------------------------------
// Exact minimum congestion via binary search on the feasibility max flow.

/// Exact `opt(b)`: the minimum over flows routing `b` of the maximum edge
/// congestion, found by binary search on the congestion bound.
///
/// Routing `b` with congestion `<= lambda` is feasible iff the max flow from a
/// super-source (arcs of capacity `|b_v|` to each supply vertex) to a
/// super-sink (arcs from each excess vertex), with internal capacities
/// `lambda * c_e`, saturates all super arcs.
pub fn exact_opt_congestion(g: &Graph, b: &DemandVector, tol: f64) -> Result<OracleResult, OracleError> {
    assert_eq!(b.len(), g.vertex_count(), "demand length mismatch");
    let supply: f64 = b.values().iter().filter(|x| **x < 0.0).map(|x| -x).sum();
    if b.is_zero() || supply == 0.0 {
        return Ok(OracleResult {
            opt_value: 0.0,
            witness_flow: Some(Flow::zeros(g.edge_count())),
            witness_cut: None,
            method: OracleMethod::BinarySearch,
        });
    }

    let n = g.vertex_count();
    let (ss, tt) = (n, n + 1);
    let build = |lambda: f64| -> (FlowNet, Vec<usize>) {
        let cap_scale = g.edges().iter().fold(supply, |m, e| m.max(e.capacity * lambda));
        let mut net = FlowNet::new(n + 2, cap_scale);
        let arc_ids: Vec<usize> =
            g.edges().iter().map(|e| net.add_edge(e.tail, e.head, lambda * e.capacity, lambda * e.capacity)).collect();
        for (v, &x) in b.values().iter().enumerate() {
            if x < 0.0 {
                net.add_edge(ss, v, -x, 0.0);
            } else if x > 0.0 {
                net.add_edge(v, tt, x, 0.0);
            }
        }
        (net, arc_ids)
    };
    let feasible_at = |lambda: f64| -> (bool, FlowNet, Vec<usize>) {
        let (mut net, arc_ids) = build(lambda);
        let value = net.max_flow(ss, tt);
        (value >= supply * (1.0 - 1e-11), net, arc_ids)
    };

    // Sound bracket: every unit leaving v crosses v's incident capacity, and
    // routing through a maximal spanning tree is always feasible.
    let mut lo = (0..n).fold(0.0f64, |m, v| m.max(b.values()[v].abs() / g.weighted_degree(v)));
    let tree = crate::graph::maximal_spanning_tree(g);
    let tree_flow = crate::approx::tree_flow(g, &tree, b).expect("spanning tree routes any balanced demand");
    let mut hi = max_congestion(g, &tree_flow).max(lo);
    if hi == 0.0 {
        hi = 1.0;
    }
    if !feasible_at(hi).0 {
        // Numerical slack; the tree routing is feasible in exact arithmetic.
        hi *= 1.0 + 1e-9;
    }
    for _ in 0..200 {
        if hi - lo <= tol * hi.max(1e-300) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible_at(mid).0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // Witness flow at the feasible endpoint.
    let (_, net, arc_ids) = feasible_at(hi);
    let flow: Vec<f64> = g
        .edges()
        .iter()
        .zip(&arc_ids)
        .map(|(e, &a)| {
            let fwd_used = hi * e.capacity - net.arcs[a].cap;
            let bwd_used = hi * e.capacity - net.arcs[a ^ 1].cap;
            (fwd_used - bwd_used) / 2.0
        })
        .collect();

    // Witness cut from the residual of an infeasible run just below opt.
    let probe = hi * (1.0 - (100.0 * tol).max(1e-7));
    let witness_cut = if probe > 0.0 {
        let (feas, net, _) = feasible_at(probe);
        if feas {
            None
        } else {
            let seen = net.residual_reachable(ss);
            let side: Vec<usize> = (0..n).filter(|&v| seen[v]).collect();
            if side.is_empty() || side.len() == n {
                None
            } else {
                let mut cut = cut_quantities(g, b, &side).expect("proper side");
                if cut.demand < 0.0 {
                    cut = complement_cut(g, b, &cut);
                }
                Some(cut)
            }
        }
    } else {
        None
    };

    Ok(OracleResult {
        opt_value: hi,
        witness_flow: Some(Flow::new(flow).expect("finite witness")),
        witness_cut,
        method: OracleMethod::BinarySearch,
    })
}

fn complement_cut(g: &Graph, b: &DemandVector, cut: &Cut) -> Cut {
    let mut in_side = vec![false; g.vertex_count()];
    for &v in &cut.side {
        in_side[v] = true;
    }
    let side: Vec<usize> = (0..g.vertex_count()).filter(|&v| !in_side[v]).collect();
    cut_quantities(g, b, &side).expect("complement of proper side is proper")
}

// ---------------------------------------------------------------------------
// Brute-force cut enumeration.

const BRUTE_LIMIT: usize = 24;

/// The most congested cut `max_S |b_S| / c_S` by exhaustive enumeration
/// (complement symmetry halves the search). Only for `n <= 24`.
///
/// The returned side is oriented so its demand is nonnegative.
pub fn brute_opt_cut(g: &Graph, b: &DemandVector) -> Result<Cut, OracleError> {
    let n = g.vertex_count();
    if n > BRUTE_LIMIT {
        return Err(OracleError::TooLarge { n, limit: BRUTE_LIMIT });
    }
    assert_eq!(b.len(), n, "demand length mismatch");
    let mut best: Option<(f64, u64)> = None;
    // Fix vertex 0 out of S; complements cover the rest.
    for mask in 1u64..(1 << (n - 1)) {
        let full = mask << 1;
        let mut demand = 0.0;
        for v in 1..n {
            if full >> v & 1 == 1 {
                demand += b.values()[v];
            }
        }
        let mut cap = 0.0;
        for e in g.edges() {
            if (full >> e.tail & 1) != (full >> e.head & 1) {
                cap += e.capacity;
            }
        }
        let ratio = demand.abs() / cap;
        if best.map_or(true, |(r, _)| ratio > r) {
            best = Some((ratio, full));
        }
    }
    let (_, mask) = best.expect("n >= 2 has a proper cut");
    let side: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
    let mut cut = cut_quantities(g, b, &side).expect("proper side");
    if cut.demand < 0.0 {
        cut = complement_cut(g, b, &cut);
    }
    Ok(cut)
}

/// Exhaustive conductance: `min_S c_S / min(vol(S), vol(V \ S))`.
pub fn conductance(g: &Graph) -> Result<f64, OracleError> {
    let n = g.vertex_count();
    if n > BRUTE_LIMIT {
        return Err(OracleError::TooLarge { n, limit: BRUTE_LIMIT });
    }
    let total_vol: f64 = (0..n).map(|v| g.weighted_degree(v)).sum();
    let mut best = f64::INFINITY;
    for mask in 1u64..(1 << (n - 1)) {
        let full = mask << 1;
        let mut vol = 0.0;
        for v in 1..n {
            if full >> v & 1 == 1 {
                vol += g.weighted_degree(v);
            }
        }
        let mut cap = 0.0;
        for e in g.edges() {
            if (full >> e.tail & 1) != (full >> e.head & 1) {
                cap += e.capacity;
            }
        }
        let denom = vol.min(total_vol - vol);
        if denom > 0.0 {
            best = best.min(cap / denom);
        }
    }
    Ok(best)
}
