//! Cluster-head election, cluster joining, handover and inter-cluster
//! routing rules for the seven LEACH-family variants.
//!
//! Everything here is a pure function of node state plus, where the rule is
//! randomized, an explicit generator. The simulation engine decides when each
//! rule runs and what it costs.

mod centralized;
mod election;
mod handover;
mod join;
mod routing;
mod threshold;

use std::collections::{BTreeMap, BTreeSet};

use crate::model::NodeId;

pub use centralized::{
    centralized_k, clustering_cost, elect_chs_centralized, medoid_search, AnnealSchedule,
};
pub use election::{elect_chs_distributed, mleach_elect};
pub use handover::{mleach_handover, sleach_handover, HandoverMessages};
pub use join::{join_by_midpoint, join_by_rssi, mleach_join};
pub use routing::{hop_counts, multihop_route};
pub use threshold::{leach_threshold, rounds_per_epoch, sleach_threshold};

/// Where a cluster head sends its aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NextHop {
    BaseStation,
    Head(NodeId),
}

/// Clusters formed for one round.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClusterAssignment {
    pub ch_ids: BTreeSet<NodeId>,
    /// Alive non-head node to its head; `None` is the unclustered sentinel.
    pub membership: BTreeMap<NodeId, Option<NodeId>>,
    /// Next hop of every head.
    pub routes: BTreeMap<NodeId, NextHop>,
}

impl ClusterAssignment {
    pub fn is_empty(&self) -> bool {
        self.ch_ids.is_empty()
    }

    /// Members of `ch` in id order.
    pub fn members_of(&self, ch: NodeId) -> Vec<NodeId> {
        self.membership
            .iter()
            .filter(|(_, head)| **head == Some(ch))
            .map(|(&m, _)| m)
            .collect()
    }

    pub fn head_of(&self, member: NodeId) -> Option<NodeId> {
        self.membership.get(&member).copied().flatten()
    }

    /// Drops nodes for which `alive` is false; members of a removed head
    /// become unclustered and routes through it fall back to the BS.
    pub fn prune(&mut self, alive: impl Fn(NodeId) -> bool) {
        let dead_heads: BTreeSet<NodeId> =
            self.ch_ids.iter().copied().filter(|&c| !alive(c)).collect();
        if !dead_heads.is_empty() {
            self.ch_ids.retain(|c| !dead_heads.contains(c));
            for head in self.membership.values_mut() {
                if matches!(head, Some(h) if dead_heads.contains(h)) {
                    *head = None;
                }
            }
            self.routes.retain(|c, _| !dead_heads.contains(c));
            for hop in self.routes.values_mut() {
                if matches!(hop, NextHop::Head(h) if dead_heads.contains(h)) {
                    *hop = NextHop::BaseStation;
                }
            }
        }
        self.membership.retain(|&m, _| alive(m));
    }

    /// Follows routes from `ch`; `None` if the path revisits a head or
    /// leaves the head set.
    pub fn path_to_bs(&self, ch: NodeId) -> Option<Vec<NodeId>> {
        let mut path = vec![ch];
        let mut cur = ch;
        loop {
            match self.routes.get(&cur).copied().unwrap_or(NextHop::BaseStation) {
                NextHop::BaseStation => return Some(path),
                NextHop::Head(next) => {
                    if !self.ch_ids.contains(&next) || path.contains(&next) {
                        return None;
                    }
                    path.push(next);
                    cur = next;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prune_detaches_members_and_reroutes() {
        let mut a = ClusterAssignment::default();
        a.ch_ids.extend([1, 2]);
        a.membership.extend([(3, Some(1)), (4, Some(2)), (5, Some(2))]);
        a.routes.insert(1, NextHop::Head(2));
        a.routes.insert(2, NextHop::BaseStation);
        a.prune(|id| id != 2 && id != 5);
        assert_eq!(a.ch_ids.iter().copied().collect::<Vec<_>>(), vec![1]);
        assert_eq!(a.head_of(4), None);
        assert!(!a.membership.contains_key(&5));
        assert_eq!(a.routes[&1], NextHop::BaseStation);
        assert_eq!(a.members_of(1), vec![3]);
    }

    #[test]
    fn cyclic_routes_have_no_path() {
        let mut a = ClusterAssignment::default();
        a.ch_ids.extend([1, 2]);
        a.routes.insert(1, NextHop::Head(2));
        a.routes.insert(2, NextHop::Head(1));
        assert_eq!(a.path_to_bs(1), None);
    }
}
