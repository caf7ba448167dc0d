//! Shared fixtures for the criterion benchmarks.

use congestflow::{CapDist, DemandVector, Graph};

pub fn grid(k: usize, seed: u64) -> Graph {
    congestflow::gen::grid(k, CapDist::Uniform { lo: 0.5, hi: 2.0 }, seed).unwrap()
}

pub fn random_graph(n: usize, seed: u64) -> Graph {
    congestflow::gen::random_connected(n, 2 * n, CapDist::Uniform { lo: 0.5, hi: 2.0 }, seed)
        .unwrap()
}

pub fn balanced_demand(n: usize, seed: u64) -> DemandVector {
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut vals: Vec<f64> =
        (0..n).map(|_| rng.next_u64() as f64 / u64::MAX as f64 * 2.0 - 1.0).collect();
    let mean = vals.iter().sum::<f64>() / n as f64;
    vals.iter_mut().for_each(|x| *x -= mean);
    DemandVector::new(vals).unwrap()
}
