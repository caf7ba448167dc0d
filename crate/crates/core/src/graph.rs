//! Undirected capacitated graphs and the basic linear operators on them.
//!
//! Every edge carries a fixed orientation chosen at construction time; a flow
//! value `f_e > 0` moves from `tail` to `head` and `f_e < 0` moves the other
//! way. The orientation only fixes signs, it does not restrict routing.
//!
//! Sign convention: a demand vector holds the *excess desired* at each vertex,
//! so a unit flow from `s` to `t` corresponds to `b[s] = -1`, `b[t] = +1`, and
//! `divergence` returns net inflow.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("edge {edge} has endpoint {vertex} out of range for {n} vertices")]
    VertexOutOfRange { edge: usize, vertex: usize, n: usize },
    #[error("edge {edge} is a self-loop at vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("edge {edge} has non-positive capacity {capacity}")]
    NonPositiveCapacity { edge: usize, capacity: f64 },
    #[error("graph is not connected")]
    Disconnected,
    #[error("demand vector is unbalanced: sum {sum}, l1 norm {l1}")]
    UnbalancedDemand { sum: f64, l1: f64 },
    #[error("vector entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("cut side must be a nonempty proper vertex subset")]
    DegenerateCut,
}

/// An undirected edge with a fixed orientation `tail -> head`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub capacity: f64,
}

impl Edge {
    pub fn new(tail: usize, head: usize, capacity: f64) -> Self {
        Edge { tail, head, capacity }
    }

    /// The endpoint that is not `v`. Panics if `v` is not an endpoint.
    pub fn other(&self, v: usize) -> usize {
        if v == self.tail {
            self.head
        } else {
            debug_assert_eq!(v, self.head);
            self.tail
        }
    }
}

/// A connected undirected graph with positive edge capacities.
///
/// Self-loops and disconnected inputs are rejected at construction. Parallel
/// edges are allowed and kept distinct.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    /// Per vertex: `(edge index, other endpoint)` pairs.
    adj: Vec<Vec<(usize, usize)>>,
    /// Weighted degree per vertex (sum of incident capacities).
    degree: Vec<f64>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut adj = vec![Vec::new(); n];
        let mut degree = vec![0.0; n];
        for (i, e) in edges.iter().enumerate() {
            for &v in &[e.tail, e.head] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { edge: i, vertex: v, n });
                }
            }
            if e.tail == e.head {
                return Err(GraphError::SelfLoop { edge: i, vertex: e.tail });
            }
            if !(e.capacity > 0.0) || !e.capacity.is_finite() {
                return Err(GraphError::NonPositiveCapacity { edge: i, capacity: e.capacity });
            }
            adj[e.tail].push((i, e.head));
            adj[e.head].push((i, e.tail));
            degree[e.tail] += e.capacity;
            degree[e.head] += e.capacity;
        }
        let g = Graph { n, edges, adj, degree };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    /// Incident edges of `v` as `(edge index, other endpoint)` pairs.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// Sum of capacities incident to `v` (the `c_{{v}}` of a single-vertex cut).
    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.degree[v]
    }

    pub fn total_capacity(&self) -> f64 {
        self.edges.iter().map(|e| e.capacity).sum()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0);
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(_, w) in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }
}

/// Excess desired per vertex. Entries sum to zero (within `1e-9 * ||b||_1`).
#[derive(Debug, Clone, PartialEq)]
pub struct DemandVector {
    values: Vec<f64>,
}

impl DemandVector {
    pub fn new(values: Vec<f64>) -> Result<Self, GraphError> {
        for (i, x) in values.iter().enumerate() {
            if !x.is_finite() {
                return Err(GraphError::NonFinite { index: i });
            }
        }
        let sum: f64 = values.iter().sum();
        let l1: f64 = values.iter().map(|x| x.abs()).sum();
        if sum.abs() > 1e-9 * l1 {
            return Err(GraphError::UnbalancedDemand { sum, l1 });
        }
        Ok(DemandVector { values })
    }

    /// Wraps values the caller asserts are balanced (e.g. a divergence, which
    /// is balanced by construction up to rounding).
    pub fn from_raw_unchecked(values: Vec<f64>) -> Self {
        DemandVector { values }
    }

    pub fn zeros(n: usize) -> Self {
        DemandVector { values: vec![0.0; n] }
    }

    /// Unit flow demand from `s` to `t`: `b[s] = -1`, `b[t] = +1`.
    pub fn unit_pair(n: usize, s: usize, t: usize) -> Self {
        let mut values = vec![0.0; n];
        values[s] = -1.0;
        values[t] = 1.0;
        DemandVector { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0.0)
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|x| x.abs()).sum()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Signed flow per edge; positive means tail -> head.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    values: Vec<f64>,
}

impl Flow {
    pub fn new(values: Vec<f64>) -> Result<Self, GraphError> {
        for (i, x) in values.iter().enumerate() {
            if !x.is_finite() {
                return Err(GraphError::NonFinite { index: i });
            }
        }
        Ok(Flow { values })
    }

    pub fn zeros(m: usize) -> Self {
        Flow { values: vec![0.0; m] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Adds `other` edgewise.
    pub fn add_assign(&mut self, other: &Flow) {
        assert_eq!(self.values.len(), other.values.len(), "flow length mismatch");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for x in &mut self.values {
            *x *= factor;
        }
    }
}

/// Vertex potentials (dual variables).
#[derive(Debug, Clone, PartialEq)]
pub struct Potentials {
    values: Vec<f64>,
}

impl Potentials {
    pub fn new(values: Vec<f64>) -> Self {
        Potentials { values }
    }

    pub fn zeros(n: usize) -> Self {
        Potentials { values: vec![0.0; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A vertex cut with its demand and capacity totals.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    /// Sorted vertex ids on one side of the cut.
    pub side: Vec<usize>,
    /// Total demand of `side`.
    pub demand: f64,
    /// Total capacity of edges with exactly one endpoint in `side`.
    pub capacity: f64,
    /// `demand / capacity`.
    pub ratio: f64,
}

/// Net inflow per vertex: `(Bf)_v = sum of f_e into v - sum of f_e out of v`.
///
/// The output always sums to zero up to rounding, since every edge contributes
/// `+f_e` at its head and `-f_e` at its tail.
///
/// Panics if `f` does not have one entry per edge.
pub fn divergence(g: &Graph, f: &Flow) -> DemandVector {
    assert_eq!(f.len(), g.edge_count(), "flow length mismatch");
    let mut out = vec![0.0; g.vertex_count()];
    for (e, fe) in g.edges().iter().zip(f.values()) {
        out[e.head] += fe;
        out[e.tail] -= fe;
    }
    DemandVector::from_raw_unchecked(out)
}

/// Potential difference per edge: `(B^T v)_e = v[head] - v[tail]`.
///
/// Adjoint of [`divergence`]: `<Bf, v> = <f, B^T v>` for all `f`, `v`.
///
/// Panics if `v` does not have one entry per vertex.
pub fn adjoint_divergence(g: &Graph, v: &Potentials) -> Vec<f64> {
    assert_eq!(v.len(), g.vertex_count(), "potentials length mismatch");
    let vals = v.values();
    g.edges().iter().map(|e| vals[e.head] - vals[e.tail]).collect()
}

/// Maximum edge congestion `max_e |f_e| / c_e`; zero for the zero flow.
pub fn max_congestion(g: &Graph, f: &Flow) -> f64 {
    assert_eq!(f.len(), g.edge_count(), "flow length mismatch");
    g.edges()
        .iter()
        .zip(f.values())
        .fold(0.0, |m, (e, fe)| m.max(fe.abs() / e.capacity))
}

/// Demand, capacity, and ratio of the cut `(side, rest)`.
pub fn cut_quantities(g: &Graph, b: &DemandVector, side: &[usize]) -> Result<Cut, GraphError> {
    assert_eq!(b.len(), g.vertex_count(), "demand length mismatch");
    if side.is_empty() || side.len() >= g.vertex_count() {
        return Err(GraphError::DegenerateCut);
    }
    let mut in_side = vec![false; g.vertex_count()];
    for &v in side {
        if v >= g.vertex_count() {
            return Err(GraphError::VertexOutOfRange { edge: usize::MAX, vertex: v, n: g.vertex_count() });
        }
        in_side[v] = true;
    }
    let demand: f64 = side.iter().map(|&v| b.values()[v]).sum();
    let capacity: f64 = g
        .edges()
        .iter()
        .filter(|e| in_side[e.tail] != in_side[e.head])
        .map(|e| e.capacity)
        .sum();
    let mut side = side.to_vec();
    side.sort_unstable();
    side.dedup();
    Ok(Cut { side, demand, capacity, ratio: demand / capacity })
}

/// Edge indices of a spanning tree maximizing total capacity.
///
/// Greedy by descending capacity with ties broken by edge index, so the
/// result is deterministic.
pub fn maximal_spanning_tree(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by(|&a, &b| {
        g.edge(b)
            .capacity
            .partial_cmp(&g.edge(a).capacity)
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut dsu = DisjointSets::new(g.vertex_count());
    let mut tree = Vec::with_capacity(g.vertex_count().saturating_sub(1));
    for e in order {
        let Edge { tail, head, .. } = g.edge(e);
        if dsu.union(tail, head) {
            tree.push(e);
            if tree.len() + 1 == g.vertex_count() {
                break;
            }
        }
    }
    tree.sort_unstable();
    tree
}

pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true if the two sets were distinct.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[lo] = hi;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        true
    }
}

pub(crate) fn linf(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn path3() -> Graph {
        // 1 -- 2 -- 3 with caps (1, 2), both edges oriented toward vertex 3.
        Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)]).unwrap()
    }

    fn random_graph(n: usize, seed: u64) -> Graph {
        // Random spanning tree plus extra edges; always connected.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for v in 1..n {
            let u = rng.gen_range(0..v);
            edges.push(Edge::new(u, v, rng.gen_range(0.5..2.0)));
        }
        for _ in 0..n {
            let u = rng.gen_range(0..n);
            let w = rng.gen_range(0..n);
            if u != w {
                edges.push(Edge::new(u, w, rng.gen_range(0.5..2.0)));
            }
        }
        Graph::new(n, edges).unwrap()
    }

    #[test]
    fn construction_rejects_bad_inputs() {
        assert!(matches!(Graph::new(0, vec![]), Err(GraphError::Empty)));
        assert!(matches!(
            Graph::new(2, vec![Edge::new(0, 0, 1.0)]),
            Err(GraphError::SelfLoop { .. })
        ));
        assert!(matches!(
            Graph::new(2, vec![Edge::new(0, 1, 0.0)]),
            Err(GraphError::NonPositiveCapacity { .. })
        ));
        assert!(matches!(
            Graph::new(3, vec![Edge::new(0, 1, 1.0)]),
            Err(GraphError::Disconnected)
        ));
        assert!(matches!(
            Graph::new(2, vec![Edge::new(0, 5, 1.0)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn parallel_edges_are_kept() {
        let g = Graph::new(2, vec![Edge::new(0, 1, 1.0), Edge::new(0, 1, 3.0)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.weighted_degree(0), 4.0);
    }

    #[test]
    fn divergence_on_unit_path_flow() {
        let g = path3();
        let f = Flow::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(divergence(&g, &f).values(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn divergence_of_zero_flow_is_zero() {
        let g = path3();
        let f = Flow::zeros(2);
        assert_eq!(divergence(&g, &f).values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn divergence_of_circulation_is_zero() {
        // Unit-capacity triangle, flow 1 around the cycle.
        let g = Graph::new(
            3,
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(2, 0, 1.0)],
        )
        .unwrap();
        let f = Flow::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(divergence(&g, &f).values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn adjoint_divergence_on_linear_potentials() {
        let g = path3();
        let v = Potentials::new(vec![0.0, 1.0, 2.0]);
        assert_eq!(adjoint_divergence(&g, &v), vec![1.0, 1.0]);
    }

    #[test]
    fn constants_in_kernel_of_adjoint() {
        let g = random_graph(8, 3);
        let v = Potentials::new(vec![2.5; 8]);
        assert!(adjoint_divergence(&g, &v).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn max_congestion_examples() {
        let g = path3();
        let f = Flow::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(max_congestion(&g, &f), 1.0);
        assert_eq!(max_congestion(&g, &Flow::zeros(2)), 0.0);
    }

    #[test]
    fn max_congestion_matches_brute_maximum() {
        let g = random_graph(10, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = Flow::new((0..g.edge_count()).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap();
        let brute = g
            .edges()
            .iter()
            .zip(f.values())
            .map(|(e, fe)| fe.abs() / e.capacity)
            .fold(0.0f64, f64::max);
        assert_eq!(max_congestion(&g, &f), brute);
    }

    #[test]
    fn cut_quantities_on_path() {
        let g = path3();
        let b = DemandVector::new(vec![-1.0, 0.0, 1.0]).unwrap();
        let cut = cut_quantities(&g, &b, &[2]).unwrap();
        assert_eq!(cut.demand, 1.0);
        assert_eq!(cut.capacity, 2.0);
        assert_eq!(cut.ratio, 0.5);

        let cut = cut_quantities(&g, &b, &[1, 2]).unwrap();
        assert_eq!(cut.ratio, 1.0);

        assert!(cut_quantities(&g, &b, &[]).is_err());
        assert!(cut_quantities(&g, &b, &[0, 1, 2]).is_err());
    }

    #[test]
    fn demand_balance_is_enforced() {
        assert!(DemandVector::new(vec![-1.0, 0.0, 1.0]).is_ok());
        assert!(matches!(
            DemandVector::new(vec![-1.0, 0.0, 1.5]),
            Err(GraphError::UnbalancedDemand { .. })
        ));
        assert!(matches!(
            DemandVector::new(vec![f64::NAN, 0.0]),
            Err(GraphError::NonFinite { .. })
        ));
    }

    #[test]
    fn spanning_tree_of_tree_is_the_tree() {
        let g = path3();
        assert_eq!(maximal_spanning_tree(&g), vec![0, 1]);
    }

    #[test]
    fn spanning_tree_greedy_on_triangle() {
        let g = Graph::new(
            3,
            vec![Edge::new(0, 1, 3.0), Edge::new(1, 2, 2.0), Edge::new(2, 0, 1.0)],
        )
        .unwrap();
        assert_eq!(maximal_spanning_tree(&g), vec![0, 1]);
    }

    #[test]
    fn spanning_tree_exchange_property() {
        for seed in 0..20 {
            let g = random_graph(12, seed);
            let tree = maximal_spanning_tree(&g);
            assert_eq!(tree.len(), g.vertex_count() - 1);
            let in_tree: std::collections::HashSet<usize> = tree.iter().copied().collect();
            // Spanning and acyclic.
            let mut dsu = DisjointSets::new(g.vertex_count());
            for &e in &tree {
                assert!(dsu.union(g.edge(e).tail, g.edge(e).head), "cycle in tree");
            }
            // No non-tree edge crosses its tree path with larger capacity than
            // the minimum tree edge on that path (exchange optimality).
            for e in 0..g.edge_count() {
                if in_tree.contains(&e) {
                    continue;
                }
                let path = tree_path(&g, &tree, g.edge(e).tail, g.edge(e).head);
                let min_on_path = path.iter().map(|&t| g.edge(t).capacity).fold(f64::MAX, f64::min);
                assert!(
                    g.edge(e).capacity <= min_on_path + 1e-12,
                    "swap would increase tree weight"
                );
            }
        }
    }

    fn tree_path(g: &Graph, tree: &[usize], from: usize, to: usize) -> Vec<usize> {
        // BFS restricted to tree edges.
        let tree_set: std::collections::HashSet<usize> = tree.iter().copied().collect();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; g.vertex_count()];
        let mut queue = VecDeque::new();
        queue.push_back(from);
        prev[from] = Some((from, usize::MAX));
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for &(e, w) in g.neighbors(u) {
                if tree_set.contains(&e) && prev[w].is_none() {
                    prev[w] = Some((u, e));
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let (p, e) = prev[cur].unwrap();
            path.push(e);
            cur = p;
        }
        path
    }

    proptest! {
        #[test]
        fn adjoint_identity_holds(seed in 0u64..200) {
            let g = random_graph(9, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let f = Flow::new((0..g.edge_count()).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
            let v = Potentials::new((0..g.vertex_count()).map(|_| rng.gen_range(-2.0..2.0)).collect());
            let bf = divergence(&g, &f);
            let btv = adjoint_divergence(&g, &v);
            let lhs: f64 = bf.values().iter().zip(v.values()).map(|(a, b)| a * b).sum();
            let rhs: f64 = f.values().iter().zip(&btv).map(|(a, b)| a * b).sum();
            let scale = lhs.abs().max(rhs.abs()).max(1e-30);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
        }

        #[test]
        fn divergence_sums_to_zero(seed in 0u64..200) {
            let g = random_graph(8, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1234);
            let f = Flow::new((0..g.edge_count()).map(|_| rng.gen_range(-5.0..5.0)).collect()).unwrap();
            let sum: f64 = divergence(&g, &f).values().iter().sum();
            prop_assert!(sum.abs() <= 1e-12 * (1.0 + f.values().iter().map(|x| x.abs()).sum::<f64>()));
        }
    }
}
