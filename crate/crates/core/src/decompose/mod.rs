//! Combinatorial decompositions: strongly connected components, maximum
//! bipartite matching, structural rank and exposable nodes.

mod matching;
mod scc;

pub use matching::{max_matching, max_matching_from, srank, MatchingResult};
pub use scc::{scc_decompose, SccReport};

use crate::structmat::{OutputPattern, Pattern};
use crate::Mode;

/// Greedy structural-rank recovery.
///
/// Returns exactly `n - srank(pattern)` nodes. Each step takes the smallest
/// exposable column (observability) or row (controllability) of the currently
/// augmented matrix, which raises its structural rank by one.
pub fn recovery_placement(pattern: &Pattern, mode: Mode) -> Vec<usize> {
    let pattern = match mode {
        Mode::Observability => pattern.clone(),
        Mode::Controllability => pattern.transpose(),
    };
    recover_from(&pattern, &[])
}

/// Extends `measured` with greedy rank-recovery nodes (observability form) until
/// the stacked matrix has full structural rank; returns only the added nodes.
pub(crate) fn recover_from(pattern: &Pattern, measured: &[usize]) -> Vec<usize> {
    let n = pattern.n();
    let mut all = measured.to_vec();
    let mut added = Vec::new();
    loop {
        let h = OutputPattern::dedicated(n, &all).expect("nodes in range");
        let m = max_matching(pattern, Some(&h), None).expect("dimensions agree");
        if m.srank == n {
            return added;
        }
        let v = *m
            .exposable_cols
            .first()
            .expect("a rank-deficient stack always has an exposable state column");
        all.push(v);
        added.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_srank_needs_nothing() {
        assert!(recovery_placement(&Pattern::cycle(4), Mode::Observability).is_empty());
        assert!(recovery_placement(&Pattern::identity(3), Mode::Controllability).is_empty());
    }

    #[test]
    fn chain_recovers_at_sink_for_observability() {
        let chain = Pattern::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(recovery_placement(&chain, Mode::Observability), vec![2]);
        assert_eq!(recovery_placement(&chain, Mode::Controllability), vec![0]);
        let h = OutputPattern::dedicated(3, &[2]).unwrap();
        assert_eq!(max_matching(&chain, Some(&h), None).unwrap().srank, 3);
    }

    #[test]
    fn empty_pattern_needs_every_node() {
        assert_eq!(
            recovery_placement(&Pattern::empty(3), Mode::Observability),
            vec![0, 1, 2]
        );
    }
}
