use std::collections::BTreeSet;

use crate::geometry::{midpoint, Position};
use crate::model::{Node, NodeId};

/// Head whose position is closest to `target`; ties go to the lowest id.
fn closest_head(target: Position, ch_ids: &BTreeSet<NodeId>, nodes: &[Node]) -> Option<NodeId> {
    let mut best: Option<(NodeId, f64)> = None;
    // BTreeSet iterates in ascending id order, so a strict comparison keeps
    // the lowest id on ties.
    for &ch in ch_ids {
        let d = target.distance_sq_to(&nodes[ch].pos);
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((ch, d));
        }
    }
    best.map(|(ch, _)| ch)
}

/// Strongest advertisement wins. Free-space received power falls
/// monotonically with distance, so this is the nearest head.
pub fn join_by_rssi(node: &Node, ch_ids: &BTreeSet<NodeId>, nodes: &[Node]) -> Option<NodeId> {
    closest_head(node.pos, ch_ids, nodes)
}

/// LEACH-SC join: the head nearest to the midpoint between the node and the
/// base station.
pub fn join_by_midpoint(
    node: &Node,
    ch_ids: &BTreeSet<NodeId>,
    nodes: &[Node],
    bs_pos: Position,
) -> Option<NodeId> {
    closest_head(midpoint(node.pos, bs_pos), ch_ids, nodes)
}

/// M-LEACH join: among heads within `range`, the one with the most residual
/// energy; nearest head when none is in range.
pub fn mleach_join(
    node: &Node,
    ch_ids: &BTreeSet<NodeId>,
    nodes: &[Node],
    range: f64,
) -> Option<NodeId> {
    let mut best: Option<(NodeId, f64)> = None;
    for &ch in ch_ids {
        if node.pos.distance_to(&nodes[ch].pos) <= range {
            let e = nodes[ch].residual_energy;
            if best.is_none_or(|(_, b)| e > b) {
                best = Some((ch, e));
            }
        }
    }
    best.map(|(ch, _)| ch).or_else(|| join_by_rssi(node, ch_ids, nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn layout(points: &[(f64, f64)]) -> Vec<Node> {
        points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Node::new(i, Position::new(x, y), 0.5))
            .collect()
    }

    fn heads(ids: &[NodeId]) -> BTreeSet<NodeId> {
        ids.iter().copied().collect()
    }

    #[test]
    fn rssi_picks_nearer_head() {
        let nodes = layout(&[(0.0, 0.0), (10.0, 0.0), (20.0, 0.0)]);
        assert_eq!(join_by_rssi(&nodes[0], &heads(&[1, 2]), &nodes), Some(1));
    }

    #[test]
    fn rssi_coincident_head() {
        let nodes = layout(&[(5.0, 5.0), (30.0, 0.0), (5.0, 5.0)]);
        assert_eq!(join_by_rssi(&nodes[0], &heads(&[1, 2]), &nodes), Some(2));
    }

    #[test]
    fn rssi_equidistant_tie_goes_to_lowest_id() {
        let nodes = layout(&[(50.0, 50.0), (60.0, 60.0), (40.0, 40.0)]);
        assert_eq!(join_by_rssi(&nodes[0], &heads(&[1, 2]), &nodes), Some(1));
    }

    #[test]
    fn no_heads_means_unclustered() {
        let nodes = layout(&[(0.0, 0.0)]);
        assert_eq!(join_by_rssi(&nodes[0], &heads(&[]), &nodes), None);
        assert_eq!(join_by_midpoint(&nodes[0], &heads(&[]), &nodes, Position::new(1.0, 1.0)), None);
        assert_eq!(mleach_join(&nodes[0], &heads(&[]), &nodes, 10.0), None);
    }

    #[test]
    fn midpoint_join_examples() {
        let nodes = layout(&[(0.0, 0.0), (40.0, 40.0), (80.0, 80.0)]);
        let bs = Position::new(100.0, 100.0);
        assert_eq!(join_by_midpoint(&nodes[0], &heads(&[1, 2]), &nodes, bs), Some(1));

        // Node sitting on the BS: degenerates to the RSSI rule.
        let nodes = layout(&[(100.0, 100.0), (40.0, 40.0), (80.0, 80.0)]);
        assert_eq!(join_by_midpoint(&nodes[0], &heads(&[1, 2]), &nodes, bs), Some(2));
        assert_eq!(join_by_rssi(&nodes[0], &heads(&[1, 2]), &nodes), Some(2));

        // Head exactly at the midpoint.
        let nodes = layout(&[(0.0, 0.0), (10.0, 0.0), (50.0, 50.0)]);
        assert_eq!(join_by_midpoint(&nodes[0], &heads(&[1, 2]), &nodes, bs), Some(2));
    }

    #[test]
    fn mleach_join_examples() {
        let mut nodes = layout(&[(0.0, 0.0), (5.0, 0.0), (8.0, 0.0), (60.0, 0.0)]);
        assert_eq!(mleach_join(&nodes[0], &heads(&[1, 3]), &nodes, 10.0), Some(1));

        nodes[1].residual_energy = 0.3;
        nodes[2].residual_energy = 0.4;
        assert_eq!(mleach_join(&nodes[0], &heads(&[1, 2, 3]), &nodes, 10.0), Some(2));

        assert_eq!(mleach_join(&nodes[0], &heads(&[1, 2, 3]), &nodes, 1.0), Some(1));
    }

    proptest! {
        #[test]
        fn joins_are_translation_invariant(
            coords in proptest::collection::vec((0i32..100, 0i32..100), 2..12),
            dx in -500i32..500, dy in -500i32..500,
            bx in -50i32..150, by in -50i32..250,
        ) {
            // Integer lattice keeps squared distances exact, so ties survive
            // the shift.
            let (dx, dy) = (dx as f64, dy as f64);
            let coords: Vec<(f64, f64)> = coords.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
            let nodes = layout(&coords);
            let moved: Vec<Node> = nodes.iter().map(|n| {
                let mut m = n.clone();
                m.pos = n.pos.translated(dx, dy);
                m
            }).collect();
            let chs: BTreeSet<NodeId> = (1..nodes.len()).step_by(2).collect();
            let bs = Position::new(bx as f64, by as f64);
            let bs_moved = bs.translated(dx, dy);
            prop_assert_eq!(
                join_by_rssi(&nodes[0], &chs, &nodes),
                join_by_rssi(&moved[0], &chs, &moved)
            );
            prop_assert_eq!(
                join_by_midpoint(&nodes[0], &chs, &nodes, bs),
                join_by_midpoint(&moved[0], &chs, &moved, bs_moved)
            );
        }
    }
}
