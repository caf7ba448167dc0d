//! Tree routing primitives and the spanning-tree approximator.
//!
//! Everything here works on rooted forests with a parents-before-children
//! order, so flows (one leaf-to-root pass) and potentials (one root-to-leaf
//! pass) both run in linear time.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::CongestionApproximator;
use crate::graph::{maximal_spanning_tree, DemandVector, Flow, Graph, Potentials};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("edge set contains a cycle or repeated edge")]
    NotAForest,
    #[error("component of vertex {root} has demand imbalance {imbalance}")]
    ComponentImbalance { root: usize, imbalance: f64 },
    #[error("prices length {got} does not match tree edge count {want}")]
    PriceLength { got: usize, want: usize },
}

/// A forest rooted at chosen vertices: per-vertex parent links plus a
/// parents-before-children ordering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct RootedForest {
    /// `None` for roots; otherwise `(parent, position of the edge in the
    /// caller's edge list, sign)` where sign is +1 if the edge is oriented
    /// parent -> vertex.
    pub links: Vec<Option<(u32, u32, i8)>>,
    /// All vertices, roots first, each parent before its children.
    pub order: Vec<u32>,
}

impl RootedForest {
    /// Builds the forest from undirected `(a, b)` edges, rooting each
    /// component at its smallest reachable vertex in `roots`. Every vertex
    /// must be reachable from some root and the edges must form a forest.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize)],
        roots: &[usize],
    ) -> Result<Self, TreeError> {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (pos, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((pos, b));
            adj[b].push((pos, a));
        }
        let mut links: Vec<Option<(u32, u32, i8)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        for &r in roots {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            order.push(r as u32);
            queue.push_back(r);
            while let Some(u) = queue.pop_front() {
                for &(pos, w) in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        let sign = if edges[pos].0 == u { 1 } else { -1 };
                        links[w] = Some((u as u32, pos as u32, sign));
                        order.push(w as u32);
                        queue.push_back(w);
                    }
                }
            }
        }
        if order.len() != n || edges.len() + roots_used(&links, roots) != n {
            return Err(TreeError::NotAForest);
        }
        Ok(RootedForest { links, order })
    }

    /// Signed flow per forest edge (in the caller's edge orientation) routing
    /// demands `b`, plus the accumulated subtree demand per vertex. The
    /// subtree demand at each root is its component's total demand.
    pub fn route(&self, b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut sub = b.to_vec();
        let mut flow = vec![0.0; self.links.iter().filter(|l| l.is_some()).count()];
        for &u in self.order.iter().rev() {
            if let Some((p, pos, sign)) = self.links[u as usize] {
                flow[pos as usize] = sign as f64 * sub[u as usize];
                sub[p as usize] += sub[u as usize];
            }
        }
        (flow, sub)
    }

    /// Potentials from per-edge prices `q` (indexed like the edge list used to
    /// build the forest): walking an edge tail -> head adds its price. Roots
    /// take the values in `base` (indexed by root order of `self.order`), or
    /// zero if `base` is empty.
    pub fn potentials(&self, q: &[f64], base: &[f64]) -> Vec<f64> {
        let mut pot = vec![0.0; self.links.len()];
        let mut root_idx = 0;
        for &u in &self.order {
            match self.links[u as usize] {
                Some((p, pos, sign)) => {
                    pot[u as usize] = pot[p as usize] + sign as f64 * q[pos as usize];
                }
                None => {
                    pot[u as usize] = base.get(root_idx).copied().unwrap_or(0.0);
                    root_idx += 1;
                }
            }
        }
        pot
    }

    /// For every non-root vertex `v`, the capacity (within `edges`) of the cut
    /// separating `subtree(v)` from the rest. Entries for roots are zero.
    ///
    /// Uses the identity `cut(S) = sum_{v in S} deg(v) - 2 * inside(S)` with
    /// `inside` aggregated at lowest common ancestors, so the whole forest is
    /// handled in `O((n + m) log n)`.
    pub fn subtree_cut_capacities(&self, n: usize, edges: &[(usize, usize, f64)]) -> Vec<f64> {
        // Depth, component id, and binary lifting table.
        let mut depth = vec![0u32; n];
        let mut comp = vec![u32::MAX; n];
        let mut comp_count = 0u32;
        for &u in &self.order {
            match self.links[u as usize] {
                Some((p, _, _)) => {
                    depth[u as usize] = depth[p as usize] + 1;
                    comp[u as usize] = comp[p as usize];
                }
                None => {
                    comp[u as usize] = comp_count;
                    comp_count += 1;
                }
            }
        }
        let levels = (usize::BITS - n.leading_zeros()).max(1) as usize;
        let mut up = vec![vec![u32::MAX; n]; levels];
        for v in 0..n {
            up[0][v] = match self.links[v] {
                Some((p, _, _)) => p,
                None => v as u32,
            };
        }
        for k in 1..levels {
            for v in 0..n {
                up[k][v] = up[k - 1][up[k - 1][v] as usize];
            }
        }
        let lca = |mut a: usize, mut b: usize| -> usize {
            if depth[a] < depth[b] {
                std::mem::swap(&mut a, &mut b);
            }
            let mut diff = depth[a] - depth[b];
            let mut k = 0;
            while diff > 0 {
                if diff & 1 == 1 {
                    a = up[k][a] as usize;
                }
                diff >>= 1;
                k += 1;
            }
            if a == b {
                return a;
            }
            for k in (0..levels).rev() {
                if up[k][a] != up[k][b] {
                    a = up[k][a] as usize;
                    b = up[k][b] as usize;
                }
            }
            up[0][a] as usize
        };

        let mut weight = vec![0.0; n];
        let mut lca_acc = vec![0.0; n];
        for &(a, b, c) in edges {
            weight[a] += c;
            weight[b] += c;
            if comp[a] == comp[b] {
                lca_acc[lca(a, b)] += c;
            }
        }
        // Subtree sums, children before parents.
        let mut sub_w = weight;
        let mut sub_in = lca_acc;
        for &u in self.order.iter().rev() {
            if let Some((p, _, _)) = self.links[u as usize] {
                sub_w[p as usize] += sub_w[u as usize];
                sub_in[p as usize] += sub_in[u as usize];
            }
        }
        (0..n)
            .map(|v| if self.links[v].is_some() { sub_w[v] - 2.0 * sub_in[v] } else { 0.0 })
            .collect()
    }
}

fn roots_used(links: &[Option<(u32, u32, i8)>], roots: &[usize]) -> usize {
    // Count distinct roots that actually rooted a component.
    let mut used = 0;
    let mut seen = std::collections::HashSet::new();
    for &r in roots {
        if links[r].is_none() && seen.insert(r) {
            used += 1;
        }
    }
    used
}

/// Routes `b` through the given tree (or forest) edges; the unique such flow.
///
/// Returns a flow over all graph edges, zero off the tree. Each forest
/// component must balance on its own.
pub fn tree_flow(g: &Graph, tree_edges: &[usize], b: &DemandVector) -> Result<Flow, TreeError> {
    assert_eq!(b.len(), g.vertex_count(), "demand length mismatch");
    let pairs: Vec<(usize, usize)> =
        tree_edges.iter().map(|&e| (g.edge(e).tail, g.edge(e).head)).collect();
    let roots: Vec<usize> = (0..g.vertex_count()).collect();
    let forest = RootedForest::from_edges(g.vertex_count(), &pairs, &roots)?;
    let (per_edge, sub) = forest.route(b.values());
    // Per-component balance: the leftover at each root must vanish.
    let scale = 1.0 + b.l1_norm();
    for v in 0..g.vertex_count() {
        if forest.links[v].is_none() && sub[v].abs() > 1e-9 * scale {
            return Err(TreeError::ComponentImbalance { root: v, imbalance: sub[v] });
        }
    }
    let mut flow = vec![0.0; g.edge_count()];
    for (pos, &e) in tree_edges.iter().enumerate() {
        flow[e] = per_edge[pos];
    }
    Ok(Flow::new(flow).expect("finite flow"))
}

/// Vertex potentials from per-edge prices on a tree: traversing an edge
/// tail -> head adds its price, and each component's root (its smallest
/// vertex) is fixed at zero. `prices` is indexed parallel to `tree_edges`.
pub fn tree_potential(
    g: &Graph,
    tree_edges: &[usize],
    prices: &[f64],
) -> Result<Potentials, TreeError> {
    if prices.len() != tree_edges.len() {
        return Err(TreeError::PriceLength { got: prices.len(), want: tree_edges.len() });
    }
    let pairs: Vec<(usize, usize)> =
        tree_edges.iter().map(|&e| (g.edge(e).tail, g.edge(e).head)).collect();
    let roots: Vec<usize> = (0..g.vertex_count()).collect();
    let forest = RootedForest::from_edges(g.vertex_count(), &pairs, &roots)?;
    Ok(Potentials::new(forest.potentials(prices, &[])))
}

/// Spanning-tree approximator: one row per tree edge holding the congestion
/// `b_S / c_S` of the cut the edge induces in the graph.
///
/// Built on a maximum-capacity spanning tree, so the claimed upper-bound
/// factor is the edge count: at least a `1/m` fraction of every induced cut's
/// capacity sits on the tree edge itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeApproximator {
    tree_edges: Vec<usize>,
    /// Cut capacity in the graph per tree edge (row), parallel to `tree_edges`.
    cut_caps: Vec<f64>,
    forest: RootedForest,
    alpha: f64,
}

/// Builds the spanning-tree approximator on a maximum-capacity spanning tree.
pub fn build_tree_approximator(g: &Graph) -> TreeApproximator {
    let tree_edges = maximal_spanning_tree(g);
    let pairs: Vec<(usize, usize)> =
        tree_edges.iter().map(|&e| (g.edge(e).tail, g.edge(e).head)).collect();
    let forest = RootedForest::from_edges(g.vertex_count(), &pairs, &[0])
        .expect("spanning tree is a forest");
    let triples: Vec<(usize, usize, f64)> =
        g.edges().iter().map(|e| (e.tail, e.head, e.capacity)).collect();
    let per_vertex = forest.subtree_cut_capacities(g.vertex_count(), &triples);
    // Map per-vertex cut capacities onto rows (tree edge positions).
    let mut cut_caps = vec![0.0; tree_edges.len()];
    for v in 0..g.vertex_count() {
        if let Some((_, pos, _)) = forest.links[v] {
            cut_caps[pos as usize] = per_vertex[v];
        }
    }
    TreeApproximator { tree_edges, cut_caps, forest, alpha: g.edge_count() as f64 }
}

impl TreeApproximator {
    pub fn tree_edges(&self) -> &[usize] {
        &self.tree_edges
    }

    /// Cut capacity per row.
    pub fn cut_capacities(&self) -> &[f64] {
        &self.cut_caps
    }

    /// The vertex side of the cut row `pos` measures (the subtree split off
    /// by removing that tree edge).
    pub fn row_cut_side(&self, pos: usize) -> Vec<usize> {
        let n = self.forest.links.len();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut below = usize::MAX;
        for v in 0..n {
            if let Some((p, epos, _)) = self.forest.links[v] {
                children[p as usize].push(v);
                if epos as usize == pos {
                    below = v;
                }
            }
        }
        let mut side = Vec::new();
        let mut stack = vec![below];
        while let Some(u) = stack.pop() {
            side.push(u);
            stack.extend(&children[u]);
        }
        side.sort_unstable();
        side
    }
}

impl CongestionApproximator for TreeApproximator {
    fn rows(&self) -> usize {
        self.tree_edges.len()
    }

    fn alpha_claimed(&self) -> f64 {
        self.alpha
    }

    fn apply(&self, b: &[f64]) -> Vec<f64> {
        let (flow, _) = self.forest.route(b);
        flow.iter().zip(&self.cut_caps).map(|(f, c)| f / c).collect()
    }

    fn apply_adjoint(&self, p: &[f64]) -> Vec<f64> {
        assert_eq!(p.len(), self.cut_caps.len(), "price length mismatch");
        let q: Vec<f64> = p.iter().zip(&self.cut_caps).map(|(p, c)| p / c).collect();
        self.forest.potentials(&q, &[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_connected, CapDist};
    use crate::graph::{divergence, Edge};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path3() -> Graph {
        Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)]).unwrap()
    }

    fn random_demand(n: usize, seed: u64) -> DemandVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        vals.iter_mut().for_each(|x| *x -= mean);
        DemandVector::new(vals).unwrap()
    }

    #[test]
    fn tree_flow_on_path() {
        let g = path3();
        let b = DemandVector::new(vec![-1.0, 0.0, 1.0]).unwrap();
        let f = tree_flow(&g, &[0, 1], &b).unwrap();
        assert_eq!(f.values(), &[1.0, 1.0]);
    }

    #[test]
    fn tree_flow_on_star() {
        // Center 0, demand +1 at two leaves, -2 at the center.
        let g = Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(0, 2, 1.0)]).unwrap();
        let b = DemandVector::new(vec![-2.0, 1.0, 1.0]).unwrap();
        let f = tree_flow(&g, &[0, 1], &b).unwrap();
        assert_eq!(f.values(), &[1.0, 1.0]);
    }

    #[test]
    fn tree_flow_detects_forest_imbalance() {
        // Two components: {0,1} and {2,3}; demand moves across them.
        let g = Graph::new(
            4,
            vec![Edge::new(0, 1, 1.0), Edge::new(2, 3, 1.0), Edge::new(1, 2, 1.0)],
        )
        .unwrap();
        let b = DemandVector::new(vec![-1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            tree_flow(&g, &[0, 1], &b),
            Err(TreeError::ComponentImbalance { .. })
        ));
    }

    #[test]
    fn tree_flow_round_trip() {
        for seed in 0..20 {
            let g = random_connected(12, 10, CapDist::default(), seed).unwrap();
            let tree = maximal_spanning_tree(&g);
            let b = random_demand(12, seed ^ 0x55);
            let f = tree_flow(&g, &tree, &b).unwrap();
            let div = divergence(&g, &f);
            for v in 0..12 {
                assert!((div.values()[v] - b.values()[v]).abs() <= 1e-12 * (1.0 + b.l1_norm()));
            }
        }
    }

    #[test]
    fn tree_potential_on_path() {
        let g = path3();
        let v = tree_potential(&g, &[0, 1], &[1.0, 1.0]).unwrap();
        assert_eq!(v.values(), &[0.0, 1.0, 2.0]);
        let zero = tree_potential(&g, &[0, 1], &[0.0, 0.0]).unwrap();
        assert!(zero.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn tree_potential_path_price_identity() {
        for seed in 0..10 {
            let g = random_connected(14, 0, CapDist::default(), seed).unwrap();
            let tree: Vec<usize> = (0..g.edge_count()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x99);
            let prices: Vec<f64> = (0..tree.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v = tree_potential(&g, &tree, &prices).unwrap();
            for _ in 0..100 {
                let i = rng.gen_range(0..14);
                let j = rng.gen_range(0..14);
                // Walk j -> i along tree edges, accumulating signed prices.
                let walked = walk_price(&g, &tree, &prices, j, i);
                assert!((v.values()[i] - v.values()[j] - walked).abs() < 1e-12);
            }
        }
    }

    fn walk_price(g: &Graph, tree: &[usize], prices: &[f64], from: usize, to: usize) -> f64 {
        // BFS over the tree recording signed price sums from `from`.
        let mut acc = vec![f64::NAN; g.vertex_count()];
        acc[from] = 0.0;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for (pos, &e) in tree.iter().enumerate() {
                let edge = g.edge(e);
                let (a, h) = (edge.tail, edge.head);
                if a == u && acc[h].is_nan() {
                    acc[h] = acc[u] + prices[pos];
                    queue.push_back(h);
                } else if h == u && acc[a].is_nan() {
                    acc[a] = acc[u] - prices[pos];
                    queue.push_back(a);
                }
            }
        }
        acc[to]
    }

    #[test]
    fn tree_approximator_on_path() {
        let g = path3();
        let r = build_tree_approximator(&g);
        assert_eq!(r.rows(), 2);
        // Each cut is crossed only by its own edge.
        assert_eq!(r.cut_capacities(), &[1.0, 2.0]);
        let b = [-1.0, 0.0, 1.0];
        let rb = r.apply(&b);
        let mags: Vec<f64> = rb.iter().map(|x| x.abs()).collect();
        assert!((mags[0] - 1.0).abs() < 1e-12 && (mags[1] - 0.5).abs() < 1e-12);
        assert!(r.apply(&[0.0; 3]).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn tree_approximator_on_triangle() {
        let g = Graph::new(
            3,
            vec![Edge::new(0, 1, 3.0), Edge::new(1, 2, 2.0), Edge::new(2, 0, 1.0)],
        )
        .unwrap();
        let r = build_tree_approximator(&g);
        assert_eq!(r.tree_edges(), &[0, 1]);
        // Removing the cap-3 edge cuts {0} off: capacity 3 + 1 = 4.
        // Removing the cap-2 edge cuts {2} off: capacity 2 + 1 = 3.
        let mut caps = r.cut_capacities().to_vec();
        caps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(caps, vec![3.0, 4.0]);
    }

    #[test]
    fn cut_capacities_match_brute_force() {
        for seed in 0..20 {
            let g = random_connected(12, 12, CapDist::default(), seed).unwrap();
            let r = build_tree_approximator(&g);
            for pos in 0..r.rows() {
                let side = r.row_cut_side(pos);
                let mut inside = vec![false; g.vertex_count()];
                for &v in &side {
                    inside[v] = true;
                }
                let brute: f64 = g
                    .edges()
                    .iter()
                    .filter(|e| inside[e.tail] != inside[e.head])
                    .map(|e| e.capacity)
                    .sum();
                assert!(
                    (r.cut_capacities()[pos] - brute).abs() <= 1e-9 * brute,
                    "row {pos}: {} vs brute {brute}",
                    r.cut_capacities()[pos]
                );
            }
        }
    }

    #[test]
    fn tree_apply_adjoint_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for seed in 0..20 {
            let g = random_connected(10, 6, CapDist::default(), seed).unwrap();
            let r = build_tree_approximator(&g);
            let b = random_demand(10, seed ^ 0x31);
            let p: Vec<f64> = (0..r.rows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lhs: f64 = r.apply(b.values()).iter().zip(&p).map(|(a, b)| a * b).sum();
            let rhs: f64 =
                b.values().iter().zip(r.apply_adjoint(&p)).map(|(a, b)| a * b).sum();
            let scale = lhs.abs().max(rhs.abs()).max(1e-12);
            assert!((lhs - rhs).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn tree_rows_are_cut_congestions() {
        // Lower-bound direction of the sandwich: every row is b_S / c_S for a
        // real cut, so |row| <= opt(b).
        for seed in 0..10 {
            let g = random_connected(9, 6, CapDist::default(), seed).unwrap();
            let r = build_tree_approximator(&g);
            let b = random_demand(9, seed ^ 0x77);
            let rb = r.apply(b.values());
            for pos in 0..r.rows() {
                let side = r.row_cut_side(pos);
                let cut = crate::graph::cut_quantities(&g, &b, &side).unwrap();
                assert!((rb[pos].abs() - cut.ratio.abs()).abs() <= 1e-9 * (1.0 + cut.ratio.abs()));
            }
        }
    }
}
