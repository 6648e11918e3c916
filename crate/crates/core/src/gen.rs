//! Seeded random instance generators shared by tests, the acceptance suite
//! and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::forest::Forest;
use crate::graph::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random labelled tree on `n` vertices grown by attaching each new vertex
/// to a uniformly chosen earlier one, then relabelled by a random
/// permutation.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Forest {
    random_forest_with(rng, n, 1.0)
}

/// Random forest with `1..=max_n` vertices; each vertex joins an earlier
/// one with probability 0.85, otherwise starts a new component.
pub fn random_forest<R: Rng>(rng: &mut R, max_n: usize) -> Forest {
    let n = rng.gen_range(1..=max_n);
    random_forest_with(rng, n, 0.85)
}

pub fn random_forest_with<R: Rng>(rng: &mut R, n: usize, attach: f64) -> Forest {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges = Vec::new();
    for v in 1..n {
        if rng.gen_bool(attach) {
            let u = rng.gen_range(0..v);
            edges.push((perm[u], perm[v]));
        }
    }
    Forest::new(Graph::from_edges(n, &edges).expect("grown forest is simple"))
        .expect("grown forest is acyclic")
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("G(n,p) is simple")
}
