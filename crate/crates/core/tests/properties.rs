#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use proptest::prelude::*;
use strucnet::decompose::{max_matching, scc_decompose, srank};
use strucnet::design::{check_structural, minimal_placement};
use strucnet::numeric::numeric_rank;
use strucnet::structmat::{OutputPattern, Pattern};
use strucnet::Mode;

fn pattern_strategy(max_n: usize) -> impl Strategy<Value = Pattern> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let entries = bits
                .iter()
                .enumerate()
                .filter(|(_, b)| **b)
                .map(|(i, _)| (i / n, i % n));
            Pattern::new(n, entries).unwrap()
        })
    })
}

fn pattern_and_nodes(max_n: usize) -> impl Strategy<Value = (Pattern, Vec<usize>)> {
    pattern_strategy(max_n).prop_flat_map(|p| {
        let n = p.n();
        (Just(p), proptest::collection::btree_set(0..n, 0..=n))
            .prop_map(|(p, s)| (p, s.into_iter().collect()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kronecker_nonzeros_multiply(p1 in pattern_strategy(5), p2 in pattern_strategy(5)) {
        let k = p1.kronecker(&p2).unwrap();
        prop_assert_eq!(k.nnz(), p1.nnz() * p2.nnz());
        prop_assert_eq!(k.transpose(), p1.transpose().kronecker(&p2.transpose()).unwrap());
    }

    #[test]
    fn transpose_is_an_involution(p in pattern_strategy(7)) {
        prop_assert_eq!(p.transpose().transpose(), p);
    }

    #[test]
    fn reachability_matches_boolean_closure(p in pattern_strategy(7)) {
        let closure = boolean_closure(&p);
        for v in 0..p.n() {
            let reach = p.reachable_from([v]);
            for w in 0..p.n() {
                prop_assert_eq!(reach[w], closure[w][v], "v={} w={}", v, w);
            }
        }
    }

    #[test]
    fn srank_matches_permutation_enumeration(p in pattern_strategy(6)) {
        prop_assert_eq!(srank(&p), permutation_srank(&p));
    }

    #[test]
    fn srank_and_exposable_sets_are_dual(p in pattern_strategy(7)) {
        let m = max_matching(&p, None, None).unwrap();
        let mt = max_matching(&p.transpose(), None, None).unwrap();
        prop_assert_eq!(m.srank, mt.srank);
        prop_assert_eq!(&m.exposable_cols, &mt.exposable_rows);
        prop_assert_eq!(&m.exposable_rows, &mt.exposable_cols);
        let unmatched = m.unmatched_cols(p.n());
        prop_assert!(unmatched.iter().all(|c| m.exposable_cols.contains(c)));
        let mut cols = std::collections::BTreeSet::new();
        let mut rows = std::collections::BTreeSet::new();
        for &(c, r) in &m.pairs {
            prop_assert!(p.contains(r, c));
            prop_assert!(cols.insert(c) && rows.insert(r));
        }
    }

    #[test]
    fn exposable_columns_are_exactly_the_rank_raising_sensors(p in pattern_strategy(6)) {
        let m = max_matching(&p, None, None).unwrap();
        for v in 0..p.n() {
            let h = OutputPattern::dedicated(p.n(), &[v]).unwrap();
            let augmented = max_matching(&p, Some(&h), None).unwrap().srank;
            let expected = if m.exposable_cols.contains(&v) { m.srank + 1 } else { m.srank };
            prop_assert_eq!(augmented, expected, "node {}", v);
            prop_assert_eq!(augmented, permutation_srank_stacked(&p, &[v]));
        }
    }

    #[test]
    fn scc_partition_is_valid(p in pattern_strategy(9)) {
        let r = scc_decompose(&p);
        let mut seen = vec![false; p.n()];
        for (ci, comp) in r.components.iter().enumerate() {
            for &v in comp {
                prop_assert!(!seen[v]);
                seen[v] = true;
                prop_assert_eq!(r.comp_of[v], ci);
            }
        }
        prop_assert!(seen.iter().all(|s| *s));
        // mutual reachability inside, and an acyclic condensation
        let closure = boolean_closure(&p);
        for u in 0..p.n() {
            for w in 0..p.n() {
                let same = r.comp_of[u] == r.comp_of[w];
                prop_assert_eq!(same, closure[w][u] && closure[u][w]);
            }
        }
        for &(a, b) in &r.condensation_edges {
            prop_assert!(a != b);
            let (u, w) = (r.components[a][0], r.components[b][0]);
            prop_assert!(!closure[u][w], "condensation cycle through {} and {}", a, b);
        }
        for &c in &r.parents {
            prop_assert!(r.condensation_edges.iter().all(|&(a, _)| a != c));
        }
        for &c in &r.children {
            prop_assert!(r.condensation_edges.iter().all(|&(_, b)| b != c));
        }
    }

    #[test]
    fn verdict_is_dual_under_transposition((p, nodes) in pattern_and_nodes(7)) {
        let h = OutputPattern::dedicated(p.n(), &nodes).unwrap();
        let obs = check_structural(&p, &h, Mode::Observability).unwrap();
        let ctl = check_structural(&p.transpose(), &h, Mode::Controllability).unwrap();
        prop_assert_eq!(obs.observable_or_controllable, ctl.observable_or_controllable);
        prop_assert_eq!(&obs.connectivity_ok, &ctl.connectivity_ok);
        prop_assert_eq!(obs.srank_ok, ctl.srank_ok);
        let v = &obs;
        prop_assert_eq!(v.observable_or_controllable, v.srank_ok && v.connectivity_ok.iter().all(|x| *x));
    }

    #[test]
    fn minimal_placement_always_passes(p in pattern_strategy(9)) {
        for mode in [Mode::Observability, Mode::Controllability] {
            let placement = minimal_placement(&p, mode);
            let verdict = check_structural(&p, &placement.output_pattern(), mode).unwrap();
            prop_assert!(verdict.observable_or_controllable);
            let scc = scc_decompose(&p);
            let terminal = if mode == Mode::Observability { scc.parents.len() } else { scc.children.len() };
            let d = p.n() - srank(&p);
            prop_assert!(placement.len() <= terminal + d);
            prop_assert!(placement.len() >= terminal.max(d));
        }
    }
}

#[test]
fn numeric_rank_is_generic_in_the_weights() {
    let mut rng = rng(77);
    for case in 0..20 {
        let n = 2 + case % 6;
        let p = random_pattern(&mut rng, n, 0.35);
        let s = srank(&p);
        for _ in 0..100 {
            let w = random_weighted(&mut rng, &p);
            assert_eq!(numeric_rank(w.matrix()), s, "case {case}");
        }
    }
}
