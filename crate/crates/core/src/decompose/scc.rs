use std::collections::BTreeSet;

use serde::Serialize;

use crate::structmat::Pattern;

/// Strongly connected components of the influence digraph and their partial order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SccReport {
    /// Components ordered by smallest member; members ascending.
    pub components: Vec<Vec<usize>>,
    pub comp_of: Vec<usize>,
    pub condensation_edges: BTreeSet<(usize, usize)>,
    /// Components without outgoing condensation edges (sinks).
    pub parents: Vec<usize>,
    /// Components without incoming condensation edges (sources).
    pub children: Vec<usize>,
}

impl SccReport {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.components.len() == 1
    }
}

pub fn scc_decompose(pattern: &Pattern) -> SccReport {
    let succ = pattern.successors();
    let raw = tarjan(&succ);

    let mut components: Vec<Vec<usize>> = raw
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    components.sort_unstable_by_key(|c| c[0]);

    let mut comp_of = vec![0; pattern.n()];
    for (ci, comp) in components.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }

    let condensation_edges: BTreeSet<(usize, usize)> = pattern
        .edges()
        .map(|(u, w)| (comp_of[u], comp_of[w]))
        .filter(|(a, b)| a != b)
        .collect();

    let mut has_out = vec![false; components.len()];
    let mut has_in = vec![false; components.len()];
    for &(a, b) in &condensation_edges {
        has_out[a] = true;
        has_in[b] = true;
    }
    let parents = (0..components.len()).filter(|&c| !has_out[c]).collect();
    let children = (0..components.len()).filter(|&c| !has_in[c]).collect();

    SccReport {
        components,
        comp_of,
        condensation_edges,
        parents,
        children,
    }
}

/// Iterative Tarjan; components come out in reverse topological order.
fn tarjan(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    let mut comps = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        while let Some(&(v, edge)) = call.last() {
            if edge == 0 && index[v] == UNVISITED {
                index[v] = next;
                low[v] = next;
                next += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = succ[v].get(edge) {
                call.last_mut().unwrap().1 += 1;
                if index[w] == UNVISITED {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comps.push(comp);
            }
        }
    }
    comps
}
