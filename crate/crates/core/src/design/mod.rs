//! Structural observability/controllability verdicts and sensor/input placement.
//!
//! Controllability is handled through duality: driving nodes of `P` is the same
//! problem as measuring nodes of `Pᵀ`, with child SCCs of `P` becoming parent
//! SCCs of `Pᵀ`.

mod composite;

pub use composite::{
    composite_placement, hypothesis_report, verify_composite, CompositePlacement,
    HypothesisReport,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::decompose::{max_matching, max_matching_from, recover_from, scc_decompose, srank};
use crate::error::{Error, Result};
use crate::structmat::{OutputPattern, Pattern};
use crate::Mode;

/// Largest network the exhaustive placement search accepts by default.
pub const DEFAULT_BRUTE_FORCE_MAX_N: usize = 6;

/// Why a node is measured (or driven).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reason {
    /// Covers a parent (observability) or child (controllability) SCC.
    Connectivity,
    /// Recovers one unit of structural rank.
    Rank,
    /// Does both at once.
    Shared,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasuredNode {
    pub node: usize,
    pub reason: Reason,
}

/// Dedicated measurements (or inputs), one per listed node, sorted by node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub mode: Mode,
    pub n: usize,
    pub measured: Vec<MeasuredNode>,
}

impl Placement {
    pub fn new(mode: Mode, n: usize, mut measured: Vec<MeasuredNode>) -> Self {
        measured.sort_by_key(|m| m.node);
        Self { mode, n, measured }
    }

    pub fn len(&self) -> usize {
        self.measured.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measured.is_empty()
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.measured.iter().map(|m| m.node).collect()
    }

    pub fn nodes_with(&self, reasons: &[Reason]) -> Vec<usize> {
        self.measured
            .iter()
            .filter(|m| reasons.contains(&m.reason))
            .map(|m| m.node)
            .collect()
    }

    pub fn count(&self, reason: Reason) -> usize {
        self.measured.iter().filter(|m| m.reason == reason).count()
    }

    pub fn output_pattern(&self) -> OutputPattern {
        OutputPattern::dedicated(self.n, &self.nodes()).expect("placement nodes are in range")
    }
}

/// Outcome of the two-condition structural test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralVerdict {
    pub mode: Mode,
    pub observable_or_controllable: bool,
    /// Per node: reaches a measured node (obs) / is reached from a driven node (ctl).
    pub connectivity_ok: Vec<bool>,
    pub srank_ok: bool,
    pub srank: usize,
}

impl StructuralVerdict {
    pub fn connectivity_failures(&self) -> Vec<usize> {
        self.connectivity_ok
            .iter()
            .enumerate()
            .filter(|(_, ok)| !**ok)
            .map(|(v, _)| v)
            .collect()
    }
}

/// Output/input connectivity plus structural-rank recovery of `[P; H]`
/// (observability) or `[P | Hᵀ]` (controllability).
pub fn check_structural(pattern: &Pattern, h: &OutputPattern, mode: Mode) -> Result<StructuralVerdict> {
    if h.n() != pattern.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} has {} state columns, network has {} nodes",
            if mode == Mode::Observability { "output pattern" } else { "input pattern" },
            h.n(),
            pattern.n()
        )));
    }
    let nodes = h.nodes();
    let (connectivity_ok, matching) = match mode {
        Mode::Observability => (pattern.can_reach(nodes), max_matching(pattern, Some(h), None)?),
        Mode::Controllability => (pattern.reachable_from(nodes), max_matching(pattern, None, Some(h))?),
    };
    let srank_ok = matching.srank == pattern.n();
    Ok(StructuralVerdict {
        mode,
        observable_or_controllable: srank_ok && connectivity_ok.iter().all(|&ok| ok),
        connectivity_ok,
        srank_ok,
        srank: matching.srank,
    })
}

fn observability_form(pattern: &Pattern, mode: Mode) -> Pattern {
    match mode {
        Mode::Observability => pattern.clone(),
        Mode::Controllability => pattern.transpose(),
    }
}

/// Minimum set of dedicated measurements (inputs) making the network
/// structurally observable (controllable).
///
/// Size is `parents + d - s` with `d = n - srank`, and `s` the largest number of
/// parent SCCs that can each contribute one node raising the structural rank
/// simultaneously. `s` is a maximum matching in the bipartite graph of the
/// pattern stacked with one virtual row per parent SCC spanning all its nodes,
/// grown from a maximum matching of the pattern alone.
pub fn minimal_placement(pattern: &Pattern, mode: Mode) -> Placement {
    let q = observability_form(pattern, mode);
    let n = q.n();
    let scc = scc_decompose(&q);
    let base = max_matching(&q, None, None).expect("no extras");

    let virtual_rows = OutputPattern::new(
        scc.parents.len(),
        n,
        scc.parents
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| scc.components[c].iter().map(move |&v| (i, v))),
    )
    .expect("component nodes are in range");
    let grown = max_matching_from(&q, Some(&virtual_rows), None, &base.pairs).expect("dimensions agree");

    let shared: BTreeMap<usize, usize> = grown
        .pairs
        .iter()
        .filter(|&&(_, row)| row >= n)
        .map(|&(col, row)| (row - n, col))
        .collect();
    debug_assert_eq!(shared.len(), grown.srank - base.srank);

    let mut measured: Vec<MeasuredNode> = scc
        .parents
        .iter()
        .enumerate()
        .map(|(i, &c)| match shared.get(&i) {
            Some(&node) => MeasuredNode { node, reason: Reason::Shared },
            None => MeasuredNode {
                node: scc.components[c][0],
                reason: Reason::Connectivity,
            },
        })
        .collect();

    let chosen: Vec<usize> = measured.iter().map(|m| m.node).collect();
    let rank_nodes = recover_from(&q, &chosen);
    debug_assert_eq!(rank_nodes.len(), n - base.srank - shared.len());
    measured.extend(rank_nodes.into_iter().map(|node| MeasuredNode { node, reason: Reason::Rank }));

    Placement::new(mode, n, measured)
}

/// Exhaustive oracle: the lexicographically first smallest node set passing
/// [`check_structural`], searched by increasing size.
pub fn brute_force_minimal(pattern: &Pattern, mode: Mode, max_n: usize) -> Result<Placement> {
    let n = pattern.n();
    if n > max_n {
        return Err(Error::TooLarge { n, max: max_n });
    }
    for size in 0..=n {
        for combo in Combinations::new(n, size) {
            let h = OutputPattern::dedicated(n, &combo)?;
            if check_structural(pattern, &h, mode)?.observable_or_controllable {
                return Ok(classify(pattern, mode, &combo));
            }
        }
    }
    unreachable!("measuring every node always passes the structural check")
}

/// Labels an arbitrary node set: a node that raises the structural rank is `rank`
/// (or `shared` if it also covers a not-yet-covered parent SCC), otherwise it is
/// `connectivity`. Nodes are visited in ascending order.
pub fn classify(pattern: &Pattern, mode: Mode, nodes: &[usize]) -> Placement {
    let q = observability_form(pattern, mode);
    let scc = scc_decompose(&q);
    let mut is_parent = vec![false; scc.len()];
    for &c in &scc.parents {
        is_parent[c] = true;
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let mut rank = srank(&q);
    let mut current = Vec::new();
    let mut measured = Vec::new();
    for v in sorted {
        current.push(v);
        let h = OutputPattern::dedicated(q.n(), &current).expect("nodes in range");
        let next = max_matching(&q, Some(&h), None).expect("dimensions agree").srank;
        let c = scc.comp_of[v];
        let new_parent = is_parent[c];
        is_parent[c] = false;
        let reason = match (next > rank, new_parent) {
            (true, true) => Reason::Shared,
            (true, false) => Reason::Rank,
            (false, _) => Reason::Connectivity,
        };
        rank = next;
        measured.push(MeasuredNode { node: v, reason });
    }
    Placement::new(mode, q.n(), measured)
}

/// k-subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Pattern {
        Pattern::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    /// SCC {0,1,2} (hub 0 with two spokes) feeding the self-loop sink 3.
    fn star_into_sink() -> Pattern {
        Pattern::from_edges(4, [(0, 1), (1, 0), (0, 2), (2, 0), (0, 3), (3, 3)]).unwrap()
    }

    #[test]
    fn combinations_enumerate_lexicographically() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(Combinations::new(3, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn cycle_with_one_measurement_is_observable() {
        for n in 1..6 {
            for v in 0..n {
                let h = OutputPattern::dedicated(n, &[v]).unwrap();
                let verdict = check_structural(&Pattern::cycle(n), &h, Mode::Observability).unwrap();
                assert!(verdict.observable_or_controllable);
            }
        }
    }

    #[test]
    fn no_outputs_means_unobservable() {
        let verdict =
            check_structural(&Pattern::cycle(3), &OutputPattern::empty(3), Mode::Observability).unwrap();
        assert!(!verdict.observable_or_controllable);
    }

    #[test]
    fn chain_measured_at_sink_or_source() {
        let sink = OutputPattern::dedicated(3, &[2]).unwrap();
        assert!(check_structural(&chain(), &sink, Mode::Observability)
            .unwrap()
            .observable_or_controllable);
        let source = OutputPattern::dedicated(3, &[0]).unwrap();
        let v = check_structural(&chain(), &source, Mode::Observability).unwrap();
        assert!(!v.observable_or_controllable);
        assert_eq!(v.connectivity_failures(), vec![1, 2]);
    }

    #[test]
    fn dimension_mismatch() {
        let h = OutputPattern::dedicated(2, &[0]).unwrap();
        assert!(check_structural(&chain(), &h, Mode::Observability).is_err());
    }

    #[test]
    fn sc_self_damped_needs_one_measurement() {
        let mut edges: Vec<_> = (0..4).map(|i| (i, i)).collect();
        edges.extend([(0, 1), (1, 2), (2, 3), (3, 0)]);
        let p = Pattern::from_edges(4, edges).unwrap();
        let placement = minimal_placement(&p, Mode::Observability);
        assert_eq!(placement.len(), 1);
        assert_eq!(placement.measured[0].reason, Reason::Connectivity);
        assert_eq!(brute_force_minimal(&p, Mode::Observability, 6).unwrap().len(), 1);
    }

    #[test]
    fn chain_needs_one_shared_measurement() {
        let placement = minimal_placement(&chain(), Mode::Observability);
        assert_eq!(
            placement.measured,
            vec![MeasuredNode { node: 2, reason: Reason::Shared }]
        );
        let brute = brute_force_minimal(&chain(), Mode::Observability, 6).unwrap();
        assert_eq!(brute.nodes(), vec![2]);
    }

    #[test]
    fn rank_and_connectivity_separate_when_not_shareable() {
        let p = star_into_sink();
        let placement = minimal_placement(&p, Mode::Observability);
        assert_eq!(
            placement.measured,
            vec![
                MeasuredNode { node: 1, reason: Reason::Rank },
                MeasuredNode { node: 3, reason: Reason::Connectivity },
            ]
        );
        let verdict = check_structural(&p, &placement.output_pattern(), Mode::Observability).unwrap();
        assert!(verdict.observable_or_controllable);
        assert_eq!(brute_force_minimal(&p, Mode::Observability, 6).unwrap().len(), 2);
    }

    #[test]
    fn controllability_uses_children() {
        let placement = minimal_placement(&chain(), Mode::Controllability);
        assert_eq!(placement.nodes(), vec![0]);
        let verdict =
            check_structural(&chain(), &placement.output_pattern(), Mode::Controllability).unwrap();
        assert!(verdict.observable_or_controllable);
    }

    #[test]
    fn brute_force_rejects_large_networks() {
        assert!(matches!(
            brute_force_minimal(&Pattern::cycle(7), Mode::Observability, 6),
            Err(Error::TooLarge { n: 7, max: 6 })
        ));
    }

    #[test]
    fn classify_labels_chain_sink_as_shared() {
        let p = classify(&chain(), Mode::Observability, &[2]);
        assert_eq!(p.measured[0].reason, Reason::Shared);
    }
}
