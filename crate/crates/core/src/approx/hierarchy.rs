//! Recursive forest hierarchy approximator.
//!
//! The structure is a list of `t` entries per level. Each entry holds a forest
//! over the current vertex set whose components each contain exactly one
//! designated core vertex, with every forest edge annotated by the capacity of
//! the cut it splits off *in the original graph*; the entry then recurses on
//! the graph obtained by contracting each component to its core. Rows of the
//! operator are the forest edges in a fixed depth-first order (entry rows
//! first, then the entry's child, then the next entry).
//!
//! Construction is a heuristic: each entry samples a capacity-perturbed
//! maximum-weight spanning tree (the first entry unperturbed), takes the
//! `ceil(n/t)` largest-degree vertices as cores, and splits the tree so each
//! component keeps one core. Because every row is a genuine cut congestion,
//! the lower bound `||Rb||_inf <= opt(b)` holds unconditionally; the claimed
//! upper-bound factor is certified from the structure itself: any demand can
//! be routed along the best embedded spanning tree (choosing one entry per
//! node and each forest edge's strongest constituent original edge), which
//! congests a tree edge by at most `cut_cap / rep_cap` times the row value.
//! `alpha_claimed` is that factor, minimized over entry choices.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::{CongestionApproximator, RootedForest};
use crate::graph::Graph;

pub const HIERARCHY_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HierarchyError {
    #[error("branching factor must be at least 1")]
    InvalidBranching,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
    #[error("unsupported hierarchy file version {got} (expected {want})")]
    Version { got: u32, want: u32 },
    #[error("hierarchy was built for a different graph")]
    GraphMismatch,
    #[error("corrupt hierarchy structure: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
struct EntryLink {
    parent: u32,
    /// +1 if the underlying edge is oriented parent -> vertex.
    sign: i8,
    /// Capacity in the original graph of the cut below this forest edge.
    cut_cap: f64,
    /// Representative original edge: the largest-capacity constituent of the
    /// (possibly contracted) edge bundle.
    rep_edge: u32,
    rep_cap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct HierarchyEntry {
    lambda: f64,
    /// Sorted core vertex ids; child vertex `j` is the contraction of the
    /// component containing `cores[j]`.
    cores: Vec<u32>,
    /// Per vertex: `None` for cores, a parent link toward the core otherwise.
    /// Rows of this entry are the linked vertices in increasing id order.
    links: Vec<Option<EntryLink>>,
    /// All vertices, cores first, each parent before its children.
    order: Vec<u32>,
    child: Option<Box<HierarchyNode>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct HierarchyNode {
    n: usize,
    entries: Vec<HierarchyEntry>,
}

/// The built hierarchy; immutable after construction, cheap to apply.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestHierarchy {
    seed: u64,
    t: usize,
    graph_n: usize,
    graph_m: usize,
    graph_cap_sum: f64,
    alpha: f64,
    rows: usize,
    root: HierarchyNode,
}

#[derive(Serialize, Deserialize)]
struct HierarchyFile {
    version: u32,
    hierarchy: ForestHierarchy,
}

// ---------------------------------------------------------------------------
// Construction.

struct LevelEdge {
    a: usize,
    b: usize,
    cap: f64,
    rep_edge: u32,
    rep_cap: f64,
}

struct LevelGraph {
    n: usize,
    edges: Vec<LevelEdge>,
}

fn mix(a: u64, b: u64, c: u64) -> u64 {
    let mut x = a ^ b.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ c.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Builds a hierarchy with branching factor `t`, deterministic under `seed`.
///
/// `t = 1` keeps a single maximum-weight spanning tree (one core per level);
/// `t >= n` degenerates to `t` spanning trees with empty children.
pub fn build_hierarchy(g: &Graph, t: usize, seed: u64) -> Result<ForestHierarchy, HierarchyError> {
    if t < 1 {
        return Err(HierarchyError::InvalidBranching);
    }
    let lg = LevelGraph {
        n: g.vertex_count(),
        edges: g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| LevelEdge {
                a: e.tail,
                b: e.head,
                cap: e.capacity,
                rep_edge: i as u32,
                rep_cap: e.capacity,
            })
            .collect(),
    };
    let (root, beta, rows) = build_node(&lg, t, seed, 0);
    Ok(ForestHierarchy {
        seed,
        t,
        graph_n: g.vertex_count(),
        graph_m: g.edge_count(),
        graph_cap_sum: g.total_capacity(),
        alpha: beta.max(1.0),
        rows,
        root,
    })
}

fn build_node(lg: &LevelGraph, t: usize, seed: u64, depth: u32) -> (HierarchyNode, f64, usize) {
    let n = lg.n;
    if n <= 1 {
        return (HierarchyNode { n, entries: Vec::new() }, 1.0, 0);
    }
    // Core count: the ceil(n/t) largest weighted degrees. A single tree per
    // level (t = 1) keeps one core; otherwise clamp so the recursion shrinks.
    let k = if t == 1 { 1 } else { n.div_ceil(t).min(n - 1) };
    let mut degree = vec![0.0; n];
    for e in &lg.edges {
        degree[e.a] += e.cap;
        degree[e.b] += e.cap;
    }
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by(|&x, &y| degree[y].partial_cmp(&degree[x]).unwrap().then(x.cmp(&y)));
    let mut cores: Vec<u32> = by_degree[..k].iter().map(|&v| v as u32).collect();
    cores.sort_unstable();

    let mut entries = Vec::with_capacity(t);
    let mut node_beta = f64::INFINITY;
    let mut rows = 0usize;
    for i in 0..t {
        let entry_seed = mix(seed, depth as u64 + 1, i as u64 + 1);
        let perturbation = if i == 0 { 0.0 } else { 0.5 };
        let tree = perturbed_max_tree(lg, entry_seed, perturbation);
        let kept = split_at_cores(lg, &tree, &cores);
        let kept_pairs: Vec<(usize, usize)> =
            kept.iter().map(|&e| (lg.edges[e].a, lg.edges[e].b)).collect();
        let core_roots: Vec<usize> = cores.iter().map(|&c| c as usize).collect();
        let forest = RootedForest::from_edges(n, &kept_pairs, &core_roots)
            .expect("split tree is a forest with one core per component");
        let triples: Vec<(usize, usize, f64)> =
            lg.edges.iter().map(|e| (e.a, e.b, e.cap)).collect();
        let cut_caps = forest.subtree_cut_capacities(n, &triples);

        let mut links: Vec<Option<EntryLink>> = vec![None; n];
        let mut entry_ratio = 1.0f64;
        for v in 0..n {
            if let Some((parent, pos, sign)) = forest.links[v] {
                let le = &lg.edges[kept[pos as usize]];
                links[v] = Some(EntryLink {
                    parent,
                    sign,
                    cut_cap: cut_caps[v],
                    rep_edge: le.rep_edge,
                    rep_cap: le.rep_cap,
                });
                entry_ratio = entry_ratio.max(cut_caps[v] / le.rep_cap);
            }
        }

        let (child_lg, _) = contract(lg, &forest, &cores);
        let child_seed = mix(entry_seed, 0x5eed_c41d, depth as u64);
        let (child_node, child_beta, child_rows) = build_node(&child_lg, t, child_seed, depth + 1);
        rows += (n - k) + child_rows;
        node_beta = node_beta.min(entry_ratio.max(child_beta));
        entries.push(HierarchyEntry {
            lambda: 1.0 / t as f64,
            cores: cores.clone(),
            links,
            order: forest.order.clone(),
            child: if child_node.entries.is_empty() { None } else { Some(Box::new(child_node)) },
        });
    }
    (HierarchyNode { n, entries }, node_beta, rows)
}

/// Edge ids of a spanning tree maximizing perturbed capacity
/// `cap * (1 + perturbation * u)`, `u` uniform in `[0, 1)`. Deterministic.
fn perturbed_max_tree(lg: &LevelGraph, seed: u64, perturbation: f64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = lg
        .edges
        .iter()
        .map(|e| e.cap * (1.0 + perturbation * rng.gen_range(0.0..1.0)))
        .collect();
    let mut order: Vec<usize> = (0..lg.edges.len()).collect();
    order.sort_by(|&x, &y| weights[y].partial_cmp(&weights[x]).unwrap().then(x.cmp(&y)));
    let mut dsu = crate::graph::DisjointSets::new(lg.n);
    let mut tree = Vec::with_capacity(lg.n - 1);
    for e in order {
        if dsu.union(lg.edges[e].a, lg.edges[e].b) {
            tree.push(e);
            if tree.len() + 1 == lg.n {
                break;
            }
        }
    }
    tree
}

/// Removes tree edges so every remaining component contains exactly one core.
///
/// Processing children before parents, a subtree is split off as soon as it
/// contains one core; subtrees without a core stay attached upward. Exactly
/// `k - 1` edges are removed.
fn split_at_cores(lg: &LevelGraph, tree: &[usize], cores: &[u32]) -> Vec<usize> {
    let n = lg.n;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (pos, &e) in tree.iter().enumerate() {
        adj[lg.edges[e].a].push((pos, lg.edges[e].b));
        adj[lg.edges[e].b].push((pos, lg.edges[e].a));
    }
    let root = cores[0] as usize;
    let mut parent_pos: Vec<Option<usize>> = vec![None; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    seen[root] = true;
    order.push(root);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &(pos, w) in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                parent_pos[w] = Some(pos);
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    let mut is_core = vec![false; n];
    for &c in cores {
        is_core[c as usize] = true;
    }
    let mut residual_cores = vec![0u32; n];
    let mut cut = vec![false; tree.len()];
    for &u in order.iter().rev() {
        residual_cores[u] += is_core[u] as u32;
        if u != root {
            let pos = parent_pos[u].unwrap();
            if residual_cores[u] == 1 {
                cut[pos] = true;
            } else {
                let p = lg.edges[tree[pos]].a + lg.edges[tree[pos]].b - u;
                residual_cores[p] += residual_cores[u];
            }
        }
    }
    tree.iter().enumerate().filter(|&(pos, _)| !cut[pos]).map(|(_, &e)| e).collect()
}

/// Contracts each forest component to its core, merging parallel bundles
/// (capacities summed, strongest constituent kept as representative) and
/// dropping internal edges. Deterministic via ordered maps.
fn contract(lg: &LevelGraph, forest: &RootedForest, cores: &[u32]) -> (LevelGraph, Vec<usize>) {
    let n = lg.n;
    let mut core_index = vec![usize::MAX; n];
    for (j, &c) in cores.iter().enumerate() {
        core_index[c as usize] = j;
    }
    let mut comp = vec![usize::MAX; n];
    for &u in &forest.order {
        comp[u as usize] = match forest.links[u as usize] {
            Some((p, _, _)) => comp[p as usize],
            None => core_index[u as usize],
        };
    }
    let mut merged: BTreeMap<(usize, usize), (f64, u32, f64)> = BTreeMap::new();
    for e in &lg.edges {
        let (ca, cb) = (comp[e.a], comp[e.b]);
        if ca == cb {
            continue;
        }
        let key = (ca.min(cb), ca.max(cb));
        let slot = merged.entry(key).or_insert((0.0, e.rep_edge, e.rep_cap));
        slot.0 += e.cap;
        if e.rep_cap > slot.2 || (e.rep_cap == slot.2 && e.rep_edge < slot.1) {
            slot.1 = e.rep_edge;
            slot.2 = e.rep_cap;
        }
    }
    let edges = merged
        .into_iter()
        .map(|((a, b), (cap, rep_edge, rep_cap))| LevelEdge { a, b, cap, rep_edge, rep_cap })
        .collect();
    (LevelGraph { n: cores.len(), edges }, comp)
}

// ---------------------------------------------------------------------------
// Apply / adjoint.

fn node_apply(node: &HierarchyNode, b: &[f64], out: &mut Vec<f64>) {
    for entry in &node.entries {
        // One leaf-to-root pass accumulates subtree demands; the value at each
        // core is its component's net demand, which the child level routes.
        let mut sub = b.to_vec();
        for &u in entry.order.iter().rev() {
            if let Some(link) = entry.links[u as usize] {
                sub[link.parent as usize] += sub[u as usize];
            }
        }
        for (u, link) in entry.links.iter().enumerate() {
            if let Some(link) = link {
                out.push(link.sign as f64 * sub[u] / link.cut_cap);
            }
        }
        if let Some(child) = &entry.child {
            let b_core: Vec<f64> = entry.cores.iter().map(|&c| sub[c as usize]).collect();
            node_apply(child, &b_core, out);
        }
    }
}

fn node_adjoint(node: &HierarchyNode, p: &[f64], pos: &mut usize, v: &mut [f64]) {
    for entry in &node.entries {
        let row_count = node.n - entry.cores.len();
        let q = &p[*pos..*pos + row_count];
        *pos += row_count;
        // Row index per linked vertex (rows are linked vertices by id).
        let mut row_of = vec![u32::MAX; node.n];
        let mut next = 0u32;
        for (u, link) in entry.links.iter().enumerate() {
            if link.is_some() {
                row_of[u] = next;
                next += 1;
            }
        }
        let mut base = vec![0.0; entry.cores.len()];
        if let Some(child) = &entry.child {
            node_adjoint(child, p, pos, &mut base);
        }
        let mut pot = vec![0.0; node.n];
        for (j, &c) in entry.cores.iter().enumerate() {
            pot[c as usize] = base[j];
        }
        for &u in &entry.order {
            if let Some(link) = entry.links[u as usize] {
                pot[u as usize] = pot[link.parent as usize]
                    + link.sign as f64 * q[row_of[u as usize] as usize] / link.cut_cap;
            }
        }
        for (vi, pi) in v.iter_mut().zip(&pot) {
            *vi += pi;
        }
    }
}

impl CongestionApproximator for ForestHierarchy {
    fn rows(&self) -> usize {
        self.rows
    }

    fn alpha_claimed(&self) -> f64 {
        self.alpha
    }

    fn apply(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.graph_n, "demand length mismatch");
        let mut out = Vec::with_capacity(self.rows);
        node_apply(&self.root, b, &mut out);
        out
    }

    fn apply_adjoint(&self, p: &[f64]) -> Vec<f64> {
        assert_eq!(p.len(), self.rows, "price length mismatch");
        let mut v = vec![0.0; self.graph_n];
        let mut pos = 0;
        node_adjoint(&self.root, p, &mut pos, &mut v);
        debug_assert_eq!(pos, self.rows);
        v
    }
}

// ---------------------------------------------------------------------------
// Diagnostics and persistence.

impl ForestHierarchy {
    pub fn branching(&self) -> usize {
        self.t
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Original-graph vertex sets of the cut each row measures, in row order.
    /// Costs `O(rows * n)`; intended for tests and diagnostics.
    pub fn row_cuts(&self) -> Vec<Vec<usize>> {
        let blobs: Vec<Vec<usize>> = (0..self.graph_n).map(|v| vec![v]).collect();
        let mut out = Vec::with_capacity(self.rows);
        cuts_node(&self.root, &blobs, &mut out);
        out
    }

    /// Samples one embedded spanning tree: picks one entry per node with
    /// probability `lambda` and maps forest edges back through contractions
    /// via their representative original edges. Returns sorted edge ids.
    pub fn sample_tree(&self, seed: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(self.graph_n.saturating_sub(1));
        sample_node(&self.root, &mut rng, &mut out);
        out.sort_unstable();
        out
    }

    fn validate(&self, g: Option<&Graph>) -> Result<(), HierarchyError> {
        if let Some(g) = g {
            let cap_ok =
                (self.graph_cap_sum - g.total_capacity()).abs() <= 1e-9 * self.graph_cap_sum.abs();
            if self.graph_n != g.vertex_count() || self.graph_m != g.edge_count() || !cap_ok {
                return Err(HierarchyError::GraphMismatch);
            }
        }
        let rows = validate_node(&self.root, self.graph_m)?;
        if rows != self.rows {
            return Err(HierarchyError::Corrupt(format!(
                "row count mismatch: {} recorded, {} found",
                self.rows, rows
            )));
        }
        Ok(())
    }
}

fn sample_node(node: &HierarchyNode, rng: &mut ChaCha8Rng, out: &mut Vec<usize>) {
    if node.entries.is_empty() {
        return;
    }
    let mut pick = rng.gen_range(0.0..1.0);
    let mut chosen = node.entries.len() - 1;
    for (i, entry) in node.entries.iter().enumerate() {
        if pick < entry.lambda {
            chosen = i;
            break;
        }
        pick -= entry.lambda;
    }
    let entry = &node.entries[chosen];
    for link in entry.links.iter().flatten() {
        out.push(link.rep_edge as usize);
    }
    if let Some(child) = &entry.child {
        sample_node(child, rng, out);
    }
}

fn cuts_node(node: &HierarchyNode, blobs: &[Vec<usize>], out: &mut Vec<Vec<usize>>) {
    for entry in &node.entries {
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); node.n];
        for (v, link) in entry.links.iter().enumerate() {
            if let Some(link) = link {
                children[link.parent as usize].push(v);
            }
        }
        for v in 0..node.n {
            if entry.links[v].is_none() {
                continue;
            }
            let mut side = Vec::new();
            let mut stack = vec![v];
            while let Some(u) = stack.pop() {
                side.extend(blobs[u].iter().copied());
                stack.extend(children[u].iter().copied());
            }
            side.sort_unstable();
            out.push(side);
        }
        if let Some(child) = &entry.child {
            let mut comp = vec![usize::MAX; node.n];
            let mut core_index = vec![usize::MAX; node.n];
            for (j, &c) in entry.cores.iter().enumerate() {
                core_index[c as usize] = j;
            }
            for &u in &entry.order {
                comp[u as usize] = match entry.links[u as usize] {
                    Some(link) => comp[link.parent as usize],
                    None => core_index[u as usize],
                };
            }
            let mut child_blobs: Vec<Vec<usize>> = vec![Vec::new(); entry.cores.len()];
            for u in 0..node.n {
                child_blobs[comp[u]].extend(blobs[u].iter().copied());
            }
            cuts_node(child, &child_blobs, out);
        }
    }
}

fn validate_node(node: &HierarchyNode, graph_m: usize) -> Result<usize, HierarchyError> {
    let corrupt = |msg: &str| HierarchyError::Corrupt(msg.to_string());
    let mut rows = 0usize;
    for entry in &node.entries {
        if entry.links.len() != node.n || entry.order.len() != node.n {
            return Err(corrupt("entry arrays do not match vertex count"));
        }
        if !(entry.lambda > 0.0 && entry.lambda <= 1.0) {
            return Err(corrupt("entry weight out of range"));
        }
        let mut seen = vec![false; node.n];
        for &u in &entry.order {
            let u = u as usize;
            if u >= node.n || seen[u] {
                return Err(corrupt("order is not a permutation"));
            }
            if let Some(link) = entry.links[u] {
                if link.parent as usize >= node.n || !seen[link.parent as usize] {
                    return Err(corrupt("parent does not precede child"));
                }
                if !(link.cut_cap > 0.0) || !(link.rep_cap > 0.0) {
                    return Err(corrupt("non-positive capacity annotation"));
                }
                if link.rep_edge as usize >= graph_m {
                    return Err(corrupt("representative edge out of range"));
                }
            } else if core_rank(&entry.cores, u).is_none() {
                return Err(corrupt("unlinked vertex is not a core"));
            }
            seen[u] = true;
        }
        rows += node.n - entry.cores.len();
        if let Some(child) = &entry.child {
            if child.n != entry.cores.len() {
                return Err(corrupt("child size does not match core count"));
            }
            rows += validate_node(child, graph_m)?;
        }
    }
    Ok(rows)
}

fn core_rank(cores: &[u32], v: usize) -> Option<usize> {
    cores.binary_search(&(v as u32)).ok()
}

/// Writes the hierarchy to a versioned JSON file.
pub fn save_hierarchy(h: &ForestHierarchy, path: &Path) -> Result<(), HierarchyError> {
    let file = HierarchyFile { version: HIERARCHY_FORMAT_VERSION, hierarchy: h.clone() };
    std::fs::write(path, serde_json::to_string(&file)?)?;
    Ok(())
}

/// Loads a hierarchy, checking the format version, structural invariants, and
/// that it was built for `g`.
pub fn load_hierarchy(path: &Path, g: &Graph) -> Result<ForestHierarchy, HierarchyError> {
    let text = std::fs::read_to_string(path)?;
    let file: HierarchyFile = serde_json::from_str(&text)?;
    if file.version != HIERARCHY_FORMAT_VERSION {
        return Err(HierarchyError::Version { got: file.version, want: HIERARCHY_FORMAT_VERSION });
    }
    file.hierarchy.validate(Some(g))?;
    Ok(file.hierarchy)
}
