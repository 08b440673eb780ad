//! Reproducible digraph collections for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digraph::{load_digraph, Digraph};

/// Seed of [`standard`].
pub const CORPUS_SEED: u64 = 20_020_503;

/// Random digraphs per vertex count in [`standard`].
pub const RANDOM_PER_SIZE: usize = 10;

/// Arc weights drawn by [`random_weighted`].
pub const WEIGHTS: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Debug, Clone)]
pub struct Named {
    pub name: String,
    pub graph: Digraph,
}

/// Every labeled digraph on 3 vertices with unit weights, 64 in all.
pub fn all_three_vertex() -> Vec<Named> {
    let pairs: Vec<(usize, usize)> = (0..3)
        .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let arcs = pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &(i, j))| (i, j, 1.0));
            Named {
                name: format!("k3-{mask:02}"),
                graph: Digraph::new(3, arcs.collect::<Vec<_>>()).expect("valid arcs"),
            }
        })
        .collect()
}

/// Digraph on `n` vertices with each ordered pair present with probability
/// `density` and weight drawn uniformly from `weights`.
pub fn random_digraph(n: usize, density: f64, weights: &[f64], rng: &mut ChaCha8Rng) -> Digraph {
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            if rng.random_bool(density) {
                arcs.push((i, j, weights[rng.random_range(0..weights.len())]));
            }
        }
    }
    Digraph::new(n, arcs).expect("valid arcs")
}

/// `count` random digraphs on `n` vertices with weights from [`WEIGHTS`],
/// cycling through densities 0.2, 0.35 and 0.5.
pub fn random_weighted(n: usize, count: usize, seed: u64) -> Vec<Named> {
    random_family(n, count, seed, &WEIGHTS, "rand")
}

/// Like [`random_weighted`] with all weights 1.
pub fn random_unit(n: usize, count: usize, seed: u64) -> Vec<Named> {
    random_family(n, count, seed, &[1.0], "unit")
}

fn random_family(n: usize, count: usize, seed: u64, weights: &[f64], tag: &str) -> Vec<Named> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    (0..count)
        .map(|c| Named {
            name: format!("{tag}-n{n}-{c}"),
            graph: random_digraph(n, [0.2, 0.35, 0.5][c % 3], weights, &mut rng),
        })
        .collect()
}

/// The small named examples: a path, a 2-cycle, two sources, edgeless.
pub fn fixtures() -> Vec<Named> {
    [
        ("path3", "3\n1 2\n2 3"),
        ("two-cycle", "2\n1 2\n2 1"),
        ("two-sources", "3\n1 3\n2 3"),
        ("edgeless3", "3"),
    ]
    .into_iter()
    .map(|(name, text)| Named {
        name: name.into(),
        graph: load_digraph(text).expect("fixture parses"),
    })
    .collect()
}

/// All 3-vertex digraphs, [`RANDOM_PER_SIZE`] random weighted digraphs for
/// each `n` in 4..=6, and the fixtures.
pub fn standard() -> Vec<Named> {
    let mut all = all_three_vertex();
    for n in 4..=6 {
        all.extend(random_weighted(n, RANDOM_PER_SIZE, CORPUS_SEED));
    }
    all.extend(fixtures());
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_reproducibility() {
        let c = standard();
        assert_eq!(c.len(), 64 + 30 + 4);
        let again = standard();
        for (a, b) in c.iter().zip(&again) {
            assert_eq!(a.graph, b.graph);
        }
        let mut names: Vec<&str> = c.iter().map(|g| g.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), c.len());
        assert!(random_unit(5, 4, 1).iter().all(|g| g.graph.is_unit_weighted()));
    }
}
