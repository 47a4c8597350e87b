use serde::Serialize;

use super::{check_structural, MeasuredNode, Placement, Reason, StructuralVerdict};
use crate::decompose::{scc_decompose, srank};
use crate::error::{Error, Result};
use crate::structmat::{OutputPattern, Pattern};
use crate::Mode;

/// Which factor-network hypotheses hold for a composite `P1 ⊗ P2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub mode: Mode,
    pub factor_nodes: usize,
    pub replica_nodes: usize,
    pub factor_self_damped: bool,
    pub factor_strongly_connected: bool,
    pub factor_srank: usize,
    pub factor_full_srank: bool,
    pub replica_srank: usize,
    pub replica_deficiency: usize,
    /// Parent SCCs (observability) or child SCCs (controllability) of the replica.
    pub replica_terminal_sccs: usize,
}

pub fn hypothesis_report(factor: &Pattern, replica: &Pattern, mode: Mode) -> HypothesisReport {
    let factor_srank = srank(factor);
    let replica_srank = srank(replica);
    let replica_scc = scc_decompose(replica);
    HypothesisReport {
        mode,
        factor_nodes: factor.n(),
        replica_nodes: replica.n(),
        factor_self_damped: factor.is_self_damped(),
        factor_strongly_connected: scc_decompose(factor).is_strongly_connected(),
        factor_srank,
        factor_full_srank: factor_srank == factor.n(),
        replica_srank,
        replica_deficiency: replica.n() - replica_srank,
        replica_terminal_sccs: match mode {
            Mode::Observability => replica_scc.parents.len(),
            Mode::Controllability => replica_scc.children.len(),
        },
    }
}

/// Composite measurement (input) structure with its audit trail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositePlacement {
    pub mode: Mode,
    /// Composite node ids `i * replica_nodes + v` with the replica-level reason.
    pub measured: Vec<MeasuredNode>,
    pub hc: OutputPattern,
    pub report: HypothesisReport,
    pub verdict: StructuralVerdict,
}

/// Lifts a replica placement to `factor ⊗ replica`.
///
/// Rank and shared nodes are measured in every replica (`I_N ⊗ H_rank`); the
/// connectivity nodes are measured once, in replica 0. The factor must be full
/// S-rank, self-damped and strongly connected, and the result is checked on the
/// composite before being returned.
pub fn composite_placement(
    factor: &Pattern,
    replica: &Pattern,
    h: &Placement,
    cap: usize,
) -> Result<CompositePlacement> {
    let mode = h.mode;
    if h.n != replica.n() {
        return Err(Error::DimensionMismatch(format!(
            "placement is for {} nodes, replica has {}",
            h.n,
            replica.n()
        )));
    }
    let replica_verdict = check_structural(replica, &h.output_pattern(), mode)?;
    if !replica_verdict.observable_or_controllable {
        return Err(Error::PlacementInvalid(format!(
            "replica placement {:?} fails the {} check",
            h.nodes(),
            mode
        )));
    }

    let report = hypothesis_report(factor, replica, mode);
    if !report.factor_full_srank {
        return Err(Error::NotFullSRank {
            srank: report.factor_srank,
            n: factor.n(),
        });
    }
    if let Some(node) = (0..factor.n()).find(|&i| !factor.contains(i, i)) {
        return Err(Error::NotSelfDamped { node });
    }
    if !report.factor_strongly_connected {
        return Err(Error::NotStronglyConnected {
            components: scc_decompose(factor).len(),
        });
    }

    let n = replica.n();
    let mut measured = Vec::new();
    for i in 0..factor.n() {
        for m in h.measured.iter().filter(|m| m.reason != Reason::Connectivity) {
            measured.push(MeasuredNode {
                node: i * n + m.node,
                reason: m.reason,
            });
        }
    }
    measured.extend(h.measured.iter().filter(|m| m.reason == Reason::Connectivity).copied());
    measured.sort_by_key(|m| m.node);

    let nodes: Vec<usize> = measured.iter().map(|m| m.node).collect();
    let hc = OutputPattern::dedicated(factor.n() * n, &nodes)?;
    let verdict = verify_composite(factor, replica, &hc, mode, cap)?;
    if !verdict.observable_or_controllable {
        return Err(Error::VerificationFailed(format!(
            "srank_ok={}, {} nodes fail connectivity",
            verdict.srank_ok,
            verdict.connectivity_failures().len()
        )));
    }
    Ok(CompositePlacement {
        mode,
        measured,
        hc,
        report,
        verdict,
    })
}

/// Structural check of `hc` on the composite `factor ⊗ replica`.
pub fn verify_composite(
    factor: &Pattern,
    replica: &Pattern,
    hc: &OutputPattern,
    mode: Mode,
    cap: usize,
) -> Result<StructuralVerdict> {
    let composite = factor.kronecker_capped(replica, cap)?;
    check_structural(&composite, hc, mode)
}
