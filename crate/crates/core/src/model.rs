//! Sensor nodes and round bookkeeping.

use crate::geometry::Position;

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    ClusterHead,
    Member,
    Unassigned,
}

/// Speed in m/round and heading in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Velocity {
    pub speed: f64,
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub pos: Position,
    pub velocity: Velocity,
    /// Current random-waypoint target.
    pub waypoint: Position,
    pub residual_energy: f64,
    pub initial_energy: f64,
    pub is_solar: bool,
    pub alive: bool,
    pub role: Role,
    /// Not yet elected cluster head in the current epoch (set G).
    pub eligible: bool,
    pub cluster_of: Option<NodeId>,
}

/// Outcome of charging a node for an action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Charge {
    /// Joules actually removed from the battery.
    pub spent: f64,
    /// The action went through.
    pub performed: bool,
}

impl Node {
    pub fn new(id: NodeId, pos: Position, initial_energy: f64) -> Self {
        Self {
            id,
            pos,
            velocity: Velocity::default(),
            waypoint: pos,
            residual_energy: initial_energy,
            initial_energy,
            is_solar: false,
            alive: true,
            role: Role::Unassigned,
            eligible: true,
            cluster_of: None,
        }
    }

    pub fn is_cluster_head(&self) -> bool {
        self.role == Role::ClusterHead
    }

    /// Debits `cost` joules.
    ///
    /// A node that cannot afford the action drains what is left, does not
    /// perform it, and dies. Dead nodes are never charged.
    pub fn spend(&mut self, cost: f64) -> Charge {
        if !self.alive {
            return Charge { spent: 0.0, performed: false };
        }
        if cost > self.residual_energy {
            let spent = self.residual_energy;
            self.kill();
            return Charge { spent, performed: false };
        }
        self.residual_energy -= cost;
        if self.residual_energy <= 0.0 {
            self.residual_energy = 0.0;
            self.kill();
        }
        Charge { spent: cost, performed: true }
    }

    /// Adds harvested energy up to `cap`; returns the amount actually stored.
    pub fn harvest(&mut self, amount: f64, cap: f64) -> f64 {
        if !self.alive || amount <= 0.0 {
            return 0.0;
        }
        let before = self.residual_energy;
        self.residual_energy = (before + amount).min(cap.max(before));
        self.residual_energy - before
    }

    fn kill(&mut self) {
        self.residual_energy = 0.0;
        self.alive = false;
        self.role = Role::Unassigned;
        self.cluster_of = None;
    }
}

/// Round and epoch counters shared by the election rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpochState {
    pub round: u32,
    /// Rounds per epoch, `round(1 / P)`.
    pub epoch_len: u32,
    /// Cluster heads elected since `metaround_start`.
    pub chs_this_metaround: u32,
    pub metaround_start: u32,
}

impl EpochState {
    pub fn new(epoch_len: u32) -> Self {
        Self {
            round: 0,
            epoch_len: epoch_len.max(1),
            chs_this_metaround: 0,
            metaround_start: 0,
        }
    }

    pub fn round_in_epoch(&self) -> u32 {
        self.round % self.epoch_len
    }

    pub fn is_epoch_start(&self) -> bool {
        self.round_in_epoch() == 0
    }

    /// Moves to round `round`, resetting the meta-round counter at epoch
    /// boundaries. Returns whether a new epoch started.
    pub fn enter_round(&mut self, round: u32) -> bool {
        self.round = round;
        if self.is_epoch_start() {
            self.metaround_start = round;
            self.chs_this_metaround = 0;
            true
        } else {
            false
        }
    }
}
