use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::NextHop;
use crate::geometry::Position;
use crate::model::{Node, NodeId};

/// Hop distance from every head to the BS on the graph whose edges join
/// heads (and heads and the BS) no more than `range` apart. Heads with no
/// path are absent.
pub fn hop_counts(
    ch_ids: &BTreeSet<NodeId>,
    nodes: &[Node],
    bs_pos: Position,
    range: f64,
) -> BTreeMap<NodeId, u32> {
    let range_sq = range * range;
    let mut hops = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &c in ch_ids {
        if nodes[c].pos.distance_sq_to(&bs_pos) <= range_sq {
            hops.insert(c, 1);
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        let h = hops[&c];
        for &other in ch_ids {
            if !hops.contains_key(&other) && nodes[c].pos.distance_sq_to(&nodes[other].pos) <= range_sq {
                hops.insert(other, h + 1);
                queue.push_back(other);
            }
        }
    }
    hops
}

/// Minimum-hop inter-cluster routes.
///
/// Each reachable head forwards to a neighbour one hop closer to the BS,
/// preferring the shortest link (cheapest transmission) and then the lowest
/// id. Heads in range of the BS, and heads with no path at all, send
/// directly.
pub fn multihop_route(
    ch_ids: &BTreeSet<NodeId>,
    nodes: &[Node],
    bs_pos: Position,
    range: f64,
) -> BTreeMap<NodeId, NextHop> {
    let hops = hop_counts(ch_ids, nodes, bs_pos, range);
    let range_sq = range * range;
    let mut routes = BTreeMap::new();
    for &c in ch_ids {
        let next = match hops.get(&c) {
            None | Some(1) => NextHop::BaseStation,
            Some(&h) => {
                let mut best: Option<(NodeId, f64)> = None;
                for (&other, &oh) in &hops {
                    if oh + 1 != h {
                        continue;
                    }
                    let d = nodes[c].pos.distance_sq_to(&nodes[other].pos);
                    if d <= range_sq && best.is_none_or(|(_, b)| d < b) {
                        best = Some((other, d));
                    }
                }
                best.map_or(NextHop::BaseStation, |(o, _)| NextHop::Head(o))
            }
        };
        routes.insert(c, next);
    }
    routes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::ClusterAssignment;
    use proptest::prelude::*;

    fn layout(points: &[(f64, f64)]) -> Vec<Node> {
        points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Node::new(i, Position::new(x, y), 0.5))
            .collect()
    }

    #[test]
    fn lone_head_goes_direct() {
        let nodes = layout(&[(0.0, 0.0)]);
        let routes = multihop_route(&[0].into(), &nodes, Position::new(500.0, 500.0), 20.0);
        assert_eq!(routes[&0], NextHop::BaseStation);
    }

    #[test]
    fn collinear_chain_relays() {
        let nodes = layout(&[(100.0, 50.0), (60.0, 50.0)]);
        let routes = multihop_route(&[0, 1].into(), &nodes, Position::new(20.0, 50.0), 45.0);
        assert_eq!(routes[&0], NextHop::Head(1));
        assert_eq!(routes[&1], NextHop::BaseStation);
    }

    #[test]
    fn everyone_in_range_goes_direct() {
        let nodes = layout(&[(10.0, 0.0), (0.0, 10.0), (5.0, 5.0)]);
        let routes = multihop_route(&[0, 1, 2].into(), &nodes, Position::new(0.0, 0.0), 50.0);
        assert!(routes.values().all(|&r| r == NextHop::BaseStation));
    }

    #[test]
    fn shortest_link_breaks_hop_ties() {
        // Both 1 and 2 are one hop from the BS; 0 is closer to 2.
        let nodes = layout(&[(0.0, 0.0), (30.0, 10.0), (30.0, -5.0)]);
        let routes = multihop_route(&[0, 1, 2].into(), &nodes, Position::new(60.0, 0.0), 35.0);
        assert_eq!(routes[&0], NextHop::Head(2));
    }

    proptest! {
        #[test]
        fn routes_are_min_hop_and_acyclic(
            coords in proptest::collection::vec((0.0f64..100.0, 0.0f64..100.0), 1..25),
            range in 10.0f64..80.0,
        ) {
            let nodes = layout(&coords);
            let bs = Position::new(50.0, 175.0);
            let ch_ids: BTreeSet<NodeId> = (0..nodes.len()).collect();
            let routes = multihop_route(&ch_ids, &nodes, bs, range);
            let hops = hop_counts(&ch_ids, &nodes, bs, range);
            let assignment = ClusterAssignment { ch_ids: ch_ids.clone(), routes: routes.clone(), ..Default::default() };
            for &c in &ch_ids {
                let path = assignment.path_to_bs(c);
                prop_assert!(path.is_some());
                if let Some(&h) = hops.get(&c) {
                    prop_assert_eq!(path.unwrap().len() as u32, h);
                    for &o in &ch_ids {
                        if let Some(&oh) = hops.get(&o) {
                            if nodes[c].pos.distance_sq_to(&nodes[o].pos) <= range * range {
                                prop_assert!(h <= oh + 1);
                            }
                        }
                    }
                } else {
                    prop_assert_eq!(routes[&c], NextHop::BaseStation);
                }
            }
        }
    }
}
