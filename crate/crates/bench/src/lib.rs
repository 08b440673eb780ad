//! Digraph generators shared by the benchmarks.

use forestmat::corpus::{self, WEIGHTS};
use forestmat::Digraph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random digraph with arc probability `density` and weights drawn from the corpus set.
pub fn random_digraph(n: usize, density: f64, seed: u64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    corpus::random_digraph(n, density, &WEIGHTS, &mut rng)
}

/// Directed cycle `0 -> 1 -> ... -> n-1 -> 0` with unit weights.
pub fn cycle(n: usize) -> Digraph {
    Digraph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).expect("valid cycle")
}

/// Path `0 -> 1 -> ... -> n-1` with arc probabilities `p`.
pub fn probability_path(n: usize, p: f64) -> Digraph {
    Digraph::new(n, (0..n - 1).map(|i| (i, i + 1, p))).expect("valid path")
}
