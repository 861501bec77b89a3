use rand::Rng;

use super::threshold::{leach_threshold, sleach_threshold};
use crate::config::ProtocolVariant;
use crate::model::{EpochState, Node, NodeId};

/// Distributed self-election.
///
/// Every alive node in the eligible set draws `u ~ U[0, 1)` in id order and
/// becomes a head when `u < T(n)`. `SLeachD` uses the solar-aware threshold
/// with the meta-round head count as it stood at the start of the round;
/// every other variant uses the LEACH threshold. Winners leave the eligible
/// set until the next epoch and are added to the meta-round count.
pub fn elect_chs_distributed<R: Rng + ?Sized>(
    nodes: &mut [Node],
    epoch: &mut EpochState,
    variant: ProtocolVariant,
    p: f64,
    rng: &mut R,
) -> Vec<NodeId> {
    let num_nodes = nodes.len();
    let cheads = epoch.chs_this_metaround;
    let mut elected = Vec::new();
    for node in nodes.iter_mut().filter(|n| n.alive && n.eligible) {
        let threshold = match variant {
            ProtocolVariant::SLeachD => sleach_threshold(p, node.is_solar, cheads, num_nodes),
            _ => leach_threshold(p, epoch.round, true),
        };
        let draw: f64 = rng.gen();
        if draw < threshold {
            node.eligible = false;
            elected.push(node.id);
        }
    }
    epoch.chs_this_metaround += elected.len() as u32;
    elected
}

/// Rank-based M-LEACH election: the `k = max(1, round(p * alive))` slowest
/// nodes, residual energy breaking speed ties.
pub fn mleach_elect(nodes: &[Node], p: f64) -> Vec<NodeId> {
    let mut alive: Vec<&Node> = nodes.iter().filter(|n| n.alive).collect();
    if alive.is_empty() {
        return Vec::new();
    }
    let k = super::centralized_k(p, alive.len());
    alive.sort_by(|a, b| {
        a.velocity
            .speed
            .total_cmp(&b.velocity.speed)
            .then(b.residual_energy.total_cmp(&a.residual_energy))
            .then(a.id.cmp(&b.id))
    });
    let mut chosen: Vec<NodeId> = alive.iter().take(k).map(|n| n.id).collect();
    chosen.sort_unstable();
    chosen
}
