use super::ClusterAssignment;
use crate::model::{Node, NodeId};

/// Control messages a member sends when switching heads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HandoverMessages {
    /// DIS-JOIN recipient (the old head, if still alive).
    pub dis_join: Option<NodeId>,
    /// JOIN-REQ recipient (the new head).
    pub join_req: Option<NodeId>,
}

impl HandoverMessages {
    pub fn is_empty(&self) -> bool {
        self.dis_join.is_none() && self.join_req.is_none()
    }
}

/// Moves `member` from its current head to `new_ch`.
///
/// Returns the messages the member has to transmit; the caller charges
/// them. Switching to the current head is a no-op, and a dead old head gets
/// no DIS-JOIN.
pub fn mleach_handover(
    assignment: &mut ClusterAssignment,
    member: NodeId,
    new_ch: NodeId,
    nodes: &[Node],
) -> HandoverMessages {
    let old = assignment.head_of(member);
    if old == Some(new_ch) || member == new_ch || !assignment.ch_ids.contains(&new_ch) {
        return HandoverMessages::default();
    }
    assignment.membership.insert(member, Some(new_ch));
    HandoverMessages {
        dis_join: old.filter(|&o| nodes[o].alive),
        join_req: Some(new_ch),
    }
}

/// Solar-aware steady-state handover.
///
/// A head that is not harvesting (battery node, or no sun this round) hands
/// the role to its solar-active member with the most residual energy, lowest
/// id on ties. A node is solar-active when it is an alive solar node and
/// `sun_up` holds.
pub fn sleach_handover(members: &[NodeId], current_ch: NodeId, nodes: &[Node], sun_up: bool) -> NodeId {
    let active = |id: NodeId| sun_up && nodes[id].alive && nodes[id].is_solar;
    if active(current_ch) {
        return current_ch;
    }
    let mut best: Option<NodeId> = None;
    for &m in members.iter().filter(|&&m| m != current_ch && active(m)) {
        best = match best {
            Some(b)
                if nodes[b].residual_energy > nodes[m].residual_energy
                    || (nodes[b].residual_energy == nodes[m].residual_energy && b < m) =>
            {
                Some(b)
            }
            _ => Some(m),
        };
    }
    best.unwrap_or(current_ch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Position;

    fn nodes(n: usize) -> Vec<Node> {
        (0..n).map(|i| Node::new(i, Position::new(i as f64, 0.0), 0.5)).collect()
    }

    fn assignment() -> ClusterAssignment {
        let mut a = ClusterAssignment::default();
        a.ch_ids.extend([0, 1]);
        a.membership.extend([(2, Some(0)), (3, Some(0))]);
        a
    }

    #[test]
    fn member_switch_sends_both_messages() {
        let ns = nodes(4);
        let mut a = assignment();
        let msgs = mleach_handover(&mut a, 2, 1, &ns);
        assert_eq!(msgs, HandoverMessages { dis_join: Some(0), join_req: Some(1) });
        assert_eq!(a.head_of(2), Some(1));
        assert_eq!(a.members_of(0), vec![3]);
    }

    #[test]
    fn same_head_is_noop() {
        let ns = nodes(4);
        let mut a = assignment();
        let before = a.clone();
        assert!(mleach_handover(&mut a, 2, 0, &ns).is_empty());
        assert_eq!(a, before);
    }

    #[test]
    fn dead_old_head_gets_no_dis_join() {
        let mut ns = nodes(4);
        ns[0].alive = false;
        let mut a = assignment();
        let msgs = mleach_handover(&mut a, 3, 1, &ns);
        assert_eq!(msgs, HandoverMessages { dis_join: None, join_req: Some(1) });
    }

    #[test]
    fn battery_head_hands_over_to_richest_solar_member() {
        let mut ns = nodes(5);
        ns[2].is_solar = true;
        ns[3].is_solar = true;
        ns[2].residual_energy = 0.2;
        ns[3].residual_energy = 0.4;
        assert_eq!(sleach_handover(&[1, 2, 3, 4], 0, &ns, true), 3);
        // No sun, nobody is harvesting.
        assert_eq!(sleach_handover(&[1, 2, 3, 4], 0, &ns, false), 0);
    }

    #[test]
    fn solar_head_keeps_role() {
        let mut ns = nodes(3);
        ns[0].is_solar = true;
        ns[1].is_solar = true;
        ns[1].residual_energy = 0.5;
        ns[0].residual_energy = 0.1;
        assert_eq!(sleach_handover(&[1, 2], 0, &ns, true), 0);
    }

    #[test]
    fn battery_cluster_keeps_head() {
        let ns = nodes(3);
        assert_eq!(sleach_handover(&[1, 2], 0, &ns, true), 0);
    }
}
