//! Deterministic instance generators for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
    #[error("generator produced a disconnected graph after {0} attempts")]
    Disconnected(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Capacity distribution for generated edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapDist {
    Uniform { lo: f64, hi: f64 },
    Exponential { mean: f64 },
}

impl Default for CapDist {
    fn default() -> Self {
        CapDist::Uniform { lo: 1.0, hi: 2.0 }
    }
}

impl CapDist {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            CapDist::Uniform { lo, hi } => rng.gen_range(lo..hi),
            CapDist::Exponential { mean } => {
                // Inverse CDF, floored away from zero to keep capacities positive.
                let u: f64 = rng.gen_range(0.0..1.0);
                (-mean * (1.0 - u).ln()).max(1e-9 * mean)
            }
        }
    }
}

/// Path on `n` vertices, edges oriented toward the higher id.
pub fn path(n: usize, dist: CapDist, seed: u64) -> Result<Graph, GenError> {
    if n < 1 {
        return Err(GenError::BadParams("path needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (0..n.saturating_sub(1))
        .map(|i| Edge::new(i, i + 1, dist.sample(&mut rng)))
        .collect();
    Ok(Graph::new(n, edges)?)
}

pub fn cycle(n: usize, dist: CapDist, seed: u64) -> Result<Graph, GenError> {
    if n < 3 {
        return Err(GenError::BadParams("cycle needs n >= 3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (0..n).map(|i| Edge::new(i, (i + 1) % n, dist.sample(&mut rng))).collect();
    Ok(Graph::new(n, edges)?)
}

/// `k x k` grid: `k^2` vertices and `2k(k-1)` edges.
pub fn grid(k: usize, dist: CapDist, seed: u64) -> Result<Graph, GenError> {
    if k < 1 {
        return Err(GenError::BadParams("grid needs k >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = |r: usize, c: usize| r * k + c;
    let mut edges = Vec::with_capacity(2 * k * (k - 1));
    for r in 0..k {
        for c in 0..k {
            if c + 1 < k {
                edges.push(Edge::new(idx(r, c), idx(r, c + 1), dist.sample(&mut rng)));
            }
            if r + 1 < k {
                edges.push(Edge::new(idx(r, c), idx(r + 1, c), dist.sample(&mut rng)));
            }
        }
    }
    Ok(Graph::new(k * k, edges)?)
}

/// Erdos-Renyi `G(n, p)`. Retries with derived seeds until connected, erroring
/// after 100 attempts. Deterministic for a given `(n, p, seed)`.
pub fn gnp(n: usize, p: f64, dist: CapDist, seed: u64) -> Result<Graph, GenError> {
    if n < 2 || !(0.0..=1.0).contains(&p) {
        return Err(GenError::BadParams("gnp needs n >= 2 and p in [0, 1]".into()));
    }
    const ATTEMPTS: usize = 100;
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64).wrapping_mul(0x9e3779b97f4a7c15) ^ seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_range(0.0..1.0) < p {
                    edges.push(Edge::new(u, v, dist.sample(&mut rng)));
                }
            }
        }
        match Graph::new(n, edges) {
            Ok(g) => return Ok(g),
            Err(GraphError::Disconnected) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(GenError::Disconnected(ATTEMPTS))
}

/// Two `k`-cliques joined by a single bridge of capacity `bridge_cap`.
///
/// Clique edges get capacity `clique_cap`, so for demands routed across the
/// bridge the bottleneck cut is the bridge itself.
pub fn barbell(k: usize, clique_cap: f64, bridge_cap: f64) -> Result<Graph, GenError> {
    if k < 2 {
        return Err(GenError::BadParams("barbell needs cliques of size >= 2".into()));
    }
    if clique_cap <= 0.0 || bridge_cap <= 0.0 {
        return Err(GenError::BadParams("capacities must be positive".into()));
    }
    let n = 2 * k;
    let mut edges = Vec::new();
    for base in [0, k] {
        for u in 0..k {
            for v in (u + 1)..k {
                edges.push(Edge::new(base + u, base + v, clique_cap));
            }
        }
    }
    // Bridge between the last vertex of clique A and the first of clique B.
    edges.push(Edge::new(k - 1, k, bridge_cap));
    Ok(Graph::new(n, edges)?)
}

/// Random spanning tree plus `extra` random edges; always connected.
pub fn random_connected(n: usize, extra: usize, dist: CapDist, seed: u64) -> Result<Graph, GenError> {
    if n < 1 {
        return Err(GenError::BadParams("random_connected needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n - 1 + extra);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push(Edge::new(u, v, dist.sample(&mut rng)));
    }
    let mut added = 0;
    while added < extra && n >= 2 {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.push(Edge::new(u.min(v), u.max(v), dist.sample(&mut rng)));
            added += 1;
        }
    }
    Ok(Graph::new(n, edges)?)
}
