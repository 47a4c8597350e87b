use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::structmat::{OutputPattern, Pattern};

/// Maximum matching between columns (influencers) and rows (influenced nodes).
///
/// Column indices `>= n` denote appended input columns and row indices `>= n`
/// appended measurement rows. The exposable sets only list state nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingResult {
    /// Matched `(column, row)` pairs.
    pub pairs: BTreeSet<(usize, usize)>,
    pub srank: usize,
    /// State columns left unsaturated by at least one maximum matching.
    pub exposable_cols: BTreeSet<usize>,
    /// State rows left unsaturated by at least one maximum matching.
    pub exposable_rows: BTreeSet<usize>,
}

impl MatchingResult {
    /// State columns not covered by this particular matching.
    pub fn unmatched_cols(&self, n: usize) -> Vec<usize> {
        let matched: BTreeSet<usize> = self.pairs.iter().map(|&(c, _)| c).collect();
        (0..n).filter(|c| !matched.contains(c)).collect()
    }

    pub fn unmatched_rows(&self, n: usize) -> Vec<usize> {
        let matched: BTreeSet<usize> = self.pairs.iter().map(|&(_, r)| r).collect();
        (0..n).filter(|r| !matched.contains(r)).collect()
    }
}

/// Structural rank via maximum matching.
pub fn srank(pattern: &Pattern) -> usize {
    bipartite(pattern, None, None)
        .matching(None)
        .expect("no initial pairs")
        .size
}

/// Maximum matching of the pattern stacked with `extra_rows` (`[A; H]`) and/or
/// augmented with `extra_cols` (`[A | Bᵀ]`, one column per row of the given pattern).
pub fn max_matching(
    pattern: &Pattern,
    extra_rows: Option<&OutputPattern>,
    extra_cols: Option<&OutputPattern>,
) -> Result<MatchingResult> {
    max_matching_from(pattern, extra_rows, extra_cols, &BTreeSet::new())
}

/// Like [`max_matching`], but grows the matching from `initial` pairs. Augmenting
/// paths never unmatch a vertex, so every vertex covered by `initial` stays covered.
pub fn max_matching_from(
    pattern: &Pattern,
    extra_rows: Option<&OutputPattern>,
    extra_cols: Option<&OutputPattern>,
    initial: &BTreeSet<(usize, usize)>,
) -> Result<MatchingResult> {
    for extra in [extra_rows, extra_cols].into_iter().flatten() {
        if extra.n() != pattern.n() {
            return Err(Error::DimensionMismatch(format!(
                "extra pattern has {} state columns, network has {} nodes",
                extra.n(),
                pattern.n()
            )));
        }
    }
    let graph = bipartite(pattern, extra_rows, extra_cols);
    let m = graph.matching(Some(initial))?;
    let n = pattern.n();
    let exposable_cols = graph
        .exposable_left(&m)
        .into_iter()
        .filter(|&c| c < n)
        .collect();
    let exposable_rows = graph
        .exposable_right(&m)
        .into_iter()
        .filter(|&r| r < n)
        .collect();
    let pairs = m
        .left_mate
        .iter()
        .enumerate()
        .filter_map(|(c, r)| r.map(|r| (c, r)))
        .collect();
    Ok(MatchingResult {
        pairs,
        srank: m.size,
        exposable_cols,
        exposable_rows,
    })
}

fn bipartite(
    pattern: &Pattern,
    extra_rows: Option<&OutputPattern>,
    extra_cols: Option<&OutputPattern>,
) -> Bipartite {
    let n = pattern.n();
    let n_cols = n + extra_cols.map_or(0, OutputPattern::rows);
    let n_rows = n + extra_rows.map_or(0, OutputPattern::rows);
    let mut adj = vec![Vec::new(); n_cols];
    for (row, col) in pattern.entries() {
        adj[col].push(row);
    }
    if let Some(h) = extra_rows {
        for (r, col) in h.entries() {
            adj[col].push(n + r);
        }
    }
    if let Some(b) = extra_cols {
        for (c, row) in b.entries() {
            adj[n + c].push(row);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Bipartite { adj, n_right: n_rows }
}

pub(crate) struct Bipartite {
    adj: Vec<Vec<usize>>,
    n_right: usize,
}

pub(crate) struct Matching {
    left_mate: Vec<Option<usize>>,
    right_mate: Vec<Option<usize>>,
    size: usize,
}

const INF: usize = usize::MAX;

impl Bipartite {
    fn matching(&self, initial: Option<&BTreeSet<(usize, usize)>>) -> Result<Matching> {
        let mut m = Matching {
            left_mate: vec![None; self.adj.len()],
            right_mate: vec![None; self.n_right],
            size: 0,
        };
        for &(l, r) in initial.into_iter().flatten() {
            let valid = l < self.adj.len()
                && self.adj[l].binary_search(&r).is_ok()
                && m.left_mate[l].is_none()
                && m.right_mate[r].is_none();
            if !valid {
                return Err(Error::DimensionMismatch(format!(
                    "initial pair ({l}, {r}) is not a valid matching edge"
                )));
            }
            m.left_mate[l] = Some(r);
            m.right_mate[r] = Some(l);
            m.size += 1;
        }
        self.hopcroft_karp(&mut m);
        Ok(m)
    }

    fn hopcroft_karp(&self, m: &mut Matching) {
        let n_left = self.adj.len();
        let mut dist = vec![INF; n_left];
        let mut it = vec![0usize; n_left];
        while self.bfs(m, &mut dist) {
            it.iter_mut().for_each(|x| *x = 0);
            for u in 0..n_left {
                if m.left_mate[u].is_none() && self.augment(u, m, &mut dist, &mut it) {
                    m.size += 1;
                }
            }
        }
    }

    fn bfs(&self, m: &Matching, dist: &mut [usize]) -> bool {
        let mut queue = VecDeque::new();
        for (u, d) in dist.iter_mut().enumerate() {
            if m.left_mate[u].is_none() {
                *d = 0;
                queue.push_back(u);
            } else {
                *d = INF;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &r in &self.adj[u] {
                match m.right_mate[r] {
                    None => found = true,
                    Some(u2) if dist[u2] == INF => {
                        dist[u2] = dist[u] + 1;
                        queue.push_back(u2);
                    }
                    Some(_) => {}
                }
            }
        }
        found
    }

    /// Layered DFS from a free left vertex, iterative to bound stack depth.
    fn augment(&self, root: usize, m: &mut Matching, dist: &mut [usize], it: &mut [usize]) -> bool {
        let mut stack = vec![root];
        while let Some(&u) = stack.last() {
            let Some(&r) = self.adj[u].get(it[u]) else {
                dist[u] = INF;
                stack.pop();
                if let Some(&p) = stack.last() {
                    it[p] += 1;
                }
                continue;
            };
            match m.right_mate[r] {
                None => {
                    for &v in &stack {
                        let row = self.adj[v][it[v]];
                        m.left_mate[v] = Some(row);
                        m.right_mate[row] = Some(v);
                    }
                    return true;
                }
                Some(u2) if dist[u2] != INF && dist[u2] == dist[u] + 1 => stack.push(u2),
                Some(_) => it[u] += 1,
            }
        }
        false
    }

    /// Left vertices reachable from a free left vertex by alternating paths.
    fn exposable_left(&self, m: &Matching) -> Vec<usize> {
        let mut seen = vec![false; self.adj.len()];
        let mut queue: VecDeque<usize> = (0..self.adj.len())
            .filter(|&u| m.left_mate[u].is_none())
            .collect();
        for &u in &queue {
            seen[u] = true;
        }
        while let Some(u) = queue.pop_front() {
            for &r in &self.adj[u] {
                if let Some(u2) = m.right_mate[r] {
                    if !seen[u2] {
                        seen[u2] = true;
                        queue.push_back(u2);
                    }
                }
            }
        }
        (0..self.adj.len()).filter(|&u| seen[u]).collect()
    }

    /// Right vertices reachable from a free right vertex by alternating paths.
    fn exposable_right(&self, m: &Matching) -> Vec<usize> {
        let mut radj = vec![Vec::new(); self.n_right];
        for (u, rows) in self.adj.iter().enumerate() {
            for &r in rows {
                radj[r].push(u);
            }
        }
        let mut seen = vec![false; self.n_right];
        let mut queue: VecDeque<usize> = (0..self.n_right)
            .filter(|&r| m.right_mate[r].is_none())
            .collect();
        for &r in &queue {
            seen[r] = true;
        }
        while let Some(r) = queue.pop_front() {
            for &u in &radj[r] {
                if let Some(r2) = m.left_mate[u] {
                    if !seen[r2] {
                        seen[r2] = true;
                        queue.push_back(r2);
                    }
                }
            }
        }
        (0..self.n_right).filter(|&r| seen[r]).collect()
    }
}
