//! Structured (zero/nonzero) matrices and their influence digraphs.
//!
//! A [`Pattern`] stores the nonzero positions of an `n x n` system matrix.
//! Entry `(w, u)` being nonzero means node `u` influences node `w`, i.e. the
//! digraph has the edge `u -> w` and the dynamics read `x(k+1) = A x(k)`.

mod io;
mod random;
mod weighted;

pub use io::{read_graph, read_matrix_market, GraphFile};
pub use random::{random_pattern, random_weights, WeightRange};
pub use weighted::WeightedMatrix;

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the number of states of a Kronecker composite.
pub const DEFAULT_SIZE_CAP: usize = 10_000;

/// Environment variable overriding [`DEFAULT_SIZE_CAP`].
pub const SIZE_CAP_ENV: &str = "STRUCNET_SIZE_CAP";

/// Reads the composite size cap from `STRUCNET_SIZE_CAP`, falling back to the default.
pub fn size_cap_from_env() -> Result<usize> {
    match std::env::var(SIZE_CAP_ENV) {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Error::InvalidConfig(format!("{SIZE_CAP_ENV}={raw:?} is not a non-negative integer"))
        }),
        Err(_) => Ok(DEFAULT_SIZE_CAP),
    }
}

/// Square zero/nonzero pattern, stored as a sorted set of `(row, col)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern {
    n: usize,
    nonzeros: BTreeSet<(usize, usize)>,
}

impl Pattern {
    pub fn new(n: usize, entries: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut nonzeros = BTreeSet::new();
        for (row, col) in entries {
            if row >= n || col >= n {
                return Err(Error::EntryOutOfRange {
                    row,
                    col,
                    rows: n,
                    cols: n,
                });
            }
            nonzeros.insert((row, col));
        }
        Ok(Self { n, nonzeros })
    }

    /// Builds a pattern from influence edges `u -> v`, which land at entry `(v, u)`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut nonzeros = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::EdgeOutOfRange { u, v, n });
            }
            nonzeros.insert((v, u));
        }
        Ok(Self { n, nonzeros })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            nonzeros: BTreeSet::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            nonzeros: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            n,
            nonzeros: (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
        }
    }

    /// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn cycle(n: usize) -> Self {
        Self {
            n,
            nonzeros: (0..n).map(|u| ((u + 1) % n, u)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.nonzeros.len()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.nonzeros.contains(&(row, col))
    }

    /// Nonzero `(row, col)` positions in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nonzeros.iter().copied()
    }

    /// Influence edges `(u, w)` meaning `u -> w`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nonzeros.iter().map(|&(w, u)| (u, w))
    }

    /// Out-neighbours along influence edges, each list sorted ascending.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (w, u) in self.entries() {
            out[u].push(w);
        }
        for list in &mut out {
            list.sort_unstable();
        }
        out
    }

    /// In-neighbours along influence edges (the columns of each row), sorted ascending.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (w, u) in self.entries() {
            out[w].push(u);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self {
            n: self.n,
            nonzeros: self.nonzeros.iter().map(|&(r, c)| (c, r)).collect(),
        }
    }

    pub fn is_self_damped(&self) -> bool {
        (0..self.n).all(|i| self.contains(i, i))
    }

    /// Kronecker product bounded by [`DEFAULT_SIZE_CAP`].
    pub fn kronecker(&self, other: &Pattern) -> Result<Self> {
        self.kronecker_capped(other, DEFAULT_SIZE_CAP)
    }

    /// Kronecker product `self ⊗ other`: entry `(i*n + k, j*n + l)` is nonzero iff
    /// `(i, j)` is in `self` and `(k, l)` is in `other`, with `n = other.n()`.
    pub fn kronecker_capped(&self, other: &Pattern, cap: usize) -> Result<Self> {
        let size = self
            .n
            .checked_mul(other.n)
            .ok_or(Error::SizeCap { size: usize::MAX, cap })?;
        if size > cap {
            return Err(Error::SizeCap { size, cap });
        }
        let m = other.n;
        let mut nonzeros = BTreeSet::new();
        for &(i, j) in &self.nonzeros {
            for &(k, l) in &other.nonzeros {
                nonzeros.insert((i * m + k, j * m + l));
            }
        }
        Ok(Self { n: size, nonzeros })
    }

    /// Marks every node that can reach some node of `targets` along influence edges
    /// (targets included).
    pub fn can_reach(&self, targets: impl IntoIterator<Item = usize>) -> Vec<bool> {
        bfs(&self.predecessors(), targets)
    }

    /// Marks every node reachable from some node of `sources` (sources included).
    pub fn reachable_from(&self, sources: impl IntoIterator<Item = usize>) -> Vec<bool> {
        bfs(&self.successors(), sources)
    }
}

fn bfs(adjacency: &[Vec<usize>], seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::new();
    for s in seeds {
        if s < seen.len() && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Measurement (or input) structure: `rows x n`, one row per output/input.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OutputPattern {
    rows: usize,
    n: usize,
    nonzeros: BTreeSet<(usize, usize)>,
}

impl OutputPattern {
    pub fn new(
        rows: usize,
        n: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut nonzeros = BTreeSet::new();
        for (row, col) in entries {
            if row >= rows || col >= n {
                return Err(Error::EntryOutOfRange {
                    row,
                    col,
                    rows,
                    cols: n,
                });
            }
            nonzeros.insert((row, col));
        }
        Ok(Self { rows, n, nonzeros })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            rows: 0,
            n,
            nonzeros: BTreeSet::new(),
        }
    }

    /// One dedicated row `e_v` per listed node, in the given order.
    pub fn dedicated(n: usize, nodes: &[usize]) -> Result<Self> {
        Self::new(nodes.len(), n, nodes.iter().copied().enumerate())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.nonzeros.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nonzeros.iter().copied()
    }

    /// Distinct state nodes touched by some row, ascending.
    pub fn nodes(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.nonzeros.iter().map(|&(_, c)| c).collect();
        set.into_iter().collect()
    }

    pub fn is_dedicated(&self) -> bool {
        let mut counts = vec![0usize; self.rows];
        for &(r, _) in &self.nonzeros {
            counts[r] += 1;
        }
        counts.iter().all(|&c| c == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_follows_influence_convention() {
        let p = Pattern::from_edges(1, [(0, 0)]).unwrap();
        assert_eq!(p.entries().collect::<Vec<_>>(), vec![(0, 0)]);

        let p = Pattern::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(p.entries().collect::<Vec<_>>(), vec![(1, 0), (2, 1)]);

        let p = Pattern::from_edges(2, [(0, 1), (0, 1)]).unwrap();
        assert_eq!(p.entries().collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn from_edges_rejects_out_of_range() {
        let err = Pattern::from_edges(2, [(0, 1), (1, 2)]).unwrap_err();
        assert!(matches!(err, Error::EdgeOutOfRange { u: 1, v: 2, n: 2 }));
    }

    #[test]
    fn kronecker_identity_gives_block_diagonal_copies() {
        let p = Pattern::from_edges(3, [(0, 1), (1, 2), (2, 2)]).unwrap();
        let k = Pattern::identity(2).kronecker(&p).unwrap();
        assert_eq!(k.n(), 6);
        let mut expected: Vec<_> = p
            .entries()
            .chain(p.entries().map(|(r, c)| (r + 3, c + 3)))
            .collect();
        expected.sort();
        assert_eq!(k.entries().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn kronecker_counts_multiply() {
        let p1 = Pattern::new(3, [(0, 0), (1, 2), (2, 1)]).unwrap();
        let p2 = Pattern::new(2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(p1.kronecker(&p2).unwrap().nnz(), 12);
    }

    #[test]
    fn kronecker_of_two_lines_disconnects() {
        let line = Pattern::from_edges(2, [(0, 1)]).unwrap();
        let k = line.kronecker(&line).unwrap();
        assert_eq!(k.n(), 4);
        // (1,0) ⊗ (1,0) lands at (3, 0): the single edge 0 -> 3.
        assert_eq!(k.entries().collect::<Vec<_>>(), vec![(3, 0)]);
        let reach = k.reachable_from([0]);
        assert_eq!(reach, vec![true, false, false, true]);
    }

    #[test]
    fn kronecker_respects_size_cap() {
        let p = Pattern::identity(100);
        let err = p.kronecker_capped(&p, 9_999).unwrap_err();
        assert!(matches!(err, Error::SizeCap { size: 10_000, cap: 9_999 }));
        assert!(p.kronecker_capped(&p, 10_000).is_ok());
    }

    #[test]
    fn transpose_examples() {
        let sym = Pattern::new(2, [(0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(sym.transpose(), sym);
        let p = Pattern::new(2, [(1, 0)]).unwrap();
        assert_eq!(p.transpose().entries().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn self_damped_examples() {
        assert!(Pattern::identity(4).is_self_damped());
        assert!(!Pattern::new(3, [(1, 0), (2, 1)]).unwrap().is_self_damped());
        assert!(Pattern::full(3).is_self_damped());
    }

    #[test]
    fn dedicated_output_pattern() {
        let h = OutputPattern::dedicated(4, &[3, 1]).unwrap();
        assert_eq!(h.rows(), 2);
        assert!(h.is_dedicated());
        assert_eq!(h.nodes(), vec![1, 3]);
        assert!(OutputPattern::dedicated(2, &[2]).is_err());
    }
}
