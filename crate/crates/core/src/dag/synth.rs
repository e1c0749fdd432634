//! Small synthetic graphs for tests, demos and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Dag;

/// `n0 -> n1 -> .. -> n{len-1}`.
pub fn chain(len: usize) -> Dag {
    let names = (0..len).map(|i| format!("n{i}")).collect();
    let edges = (1..len).map(|i| (i - 1, i)).collect();
    Dag::new(names, edges).expect("chain is acyclic")
}

/// Balanced binary tree with `2^depth - 1` nodes in heap order; node `i` is-a `(i-1)/2`.
pub fn binary_tree(depth: u32) -> Dag {
    let n = (1usize << depth) - 1;
    let names = (0..n).map(|i| format!("t{i}")).collect();
    let edges = (1..n).map(|i| (i, (i - 1) / 2)).collect();
    Dag::new(names, edges).expect("tree is acyclic")
}

/// `layers` layers of `width` nodes; each node of layer `l + 1` gets an edge
/// to each node of layer `l` independently with probability `p`.
pub fn layered_dag(layers: usize, width: usize, p: f64, seed: u64) -> Dag {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names = Vec::with_capacity(layers * width);
    for l in 0..layers {
        for k in 0..width {
            names.push(format!("L{l}_{k}"));
        }
    }
    let mut edges = Vec::new();
    for l in 1..layers {
        for c in 0..width {
            for q in 0..width {
                if rng.random_bool(p) {
                    edges.push((l * width + c, (l - 1) * width + q));
                }
            }
        }
    }
    Dag::new(names, edges).expect("layered graph is acyclic")
}

/// Random DAG on `n` nodes: a hidden random topological order, and each
/// forward pair becomes an edge with probability `p`.
pub fn random_dag(n: usize, p: f64, seed: u64) -> Dag {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((order[a], order[b]));
            }
        }
    }
    let names = (0..n).map(|i| format!("v{i}")).collect();
    Dag::new(names, edges).expect("forward edges are acyclic")
}

/// Random DAG with exactly `m` distinct edges (requires `m <= n(n-1)/2`).
pub fn random_dag_with_edges(n: usize, m: usize, seed: u64) -> Dag {
    assert!(m <= n * n.saturating_sub(1) / 2, "too many edges requested");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut seen = std::collections::HashSet::with_capacity(m);
    while seen.len() < m {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a < b {
            seen.insert((order[a], order[b]));
        }
    }
    let names = (0..n).map(|i| format!("v{i}")).collect();
    Dag::new(names, seen.into_iter().collect()).expect("forward edges are acyclic")
}
