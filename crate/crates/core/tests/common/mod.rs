#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strucnet::structmat::{read_graph, OutputPattern, Pattern, WeightRange, WeightedMatrix};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn star_replica() -> Pattern {
    read_graph(data_path("star_replica.json")).unwrap().pattern().unwrap()
}

pub fn factor_cycle3() -> Pattern {
    read_graph(data_path("factor_cycle3.json")).unwrap().pattern().unwrap()
}

/// Strongly connected, self-damped: directed ring with self-loops.
pub fn ring_self_damped(n: usize) -> Pattern {
    let mut edges: Vec<_> = (0..n).map(|i| (i, i)).collect();
    edges.extend((0..n).map(|i| (i, (i + 1) % n)));
    Pattern::from_edges(n, edges).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_pattern(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Pattern {
    let entries: Vec<_> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .filter(|_| rng.random_bool(density))
        .collect();
    Pattern::new(n, entries).unwrap()
}

pub fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let p = rng.random_range(0.0..=1.0);
    (0..n).filter(|_| rng.random_bool(p)).collect()
}

pub fn random_weighted(rng: &mut ChaCha8Rng, p: &Pattern) -> WeightedMatrix {
    let range = WeightRange::default();
    let values: Vec<f64> = (0..p.nnz()).map(|_| range.sample(rng)).collect();
    WeightedMatrix::from_pattern(p, &values).unwrap()
}

pub fn random_output(rng: &mut ChaCha8Rng, h: &OutputPattern) -> WeightedMatrix {
    let range = WeightRange::default();
    let mut m = DMatrix::zeros(h.rows(), h.n());
    for (r, c) in h.entries() {
        m[(r, c)] = range.sample(rng);
    }
    WeightedMatrix::new(m)
}

/// Structural rank by enumerating permutations: the largest number of entries
/// `(i, σ(i))` in the pattern over all permutations σ.
pub fn permutation_srank(p: &Pattern) -> usize {
    fn go(p: &Pattern, row: usize, used: &mut Vec<bool>, hits: usize, best: &mut usize) {
        let n = p.n();
        if row == n {
            *best = (*best).max(hits);
            return;
        }
        for c in 0..n {
            if !used[c] {
                used[c] = true;
                go(p, row + 1, used, hits + usize::from(p.contains(row, c)), best);
                used[c] = false;
            }
        }
    }
    let mut best = 0;
    go(p, 0, &mut vec![false; p.n()], 0, &mut best);
    best
}

/// Permutation-enumeration S-rank of the pattern stacked with extra dedicated rows.
pub fn permutation_srank_stacked(p: &Pattern, measured: &[usize]) -> usize {
    let n = p.n();
    let rows = n + measured.len();
    // square it up with empty columns so a permutation search applies
    let size = rows;
    let mut entries: Vec<(usize, usize)> = p.entries().collect();
    entries.extend(measured.iter().enumerate().map(|(i, &v)| (n + i, v)));
    let sq = Pattern::new(size, entries).unwrap();
    permutation_srank(&sq)
}

/// Reachability via boolean powers of the adjacency matrix: entry (w, v) of
/// I + A + A² + ... + A^(n-1).
pub fn boolean_closure(p: &Pattern) -> Vec<Vec<bool>> {
    let n = p.n();
    let adj: Vec<Vec<bool>> = (0..n).map(|r| (0..n).map(|c| p.contains(r, c)).collect()).collect();
    let mut power: Vec<Vec<bool>> = (0..n).map(|r| (0..n).map(|c| r == c).collect()).collect();
    let mut closure = power.clone();
    for _ in 1..n.max(1) {
        let mut next = vec![vec![false; n]; n];
        for r in 0..n {
            for k in 0..n {
                if adj[r][k] {
                    for c in 0..n {
                        next[r][c] |= power[k][c];
                    }
                }
            }
        }
        power = next;
        for r in 0..n {
            for c in 0..n {
                closure[r][c] |= power[r][c];
            }
        }
    }
    closure
}
