//! Round loop: deployment, setup phase, steady-state phase, mobility, solar
//! harvesting and death bookkeeping.
//!
//! A run is a pure function of its [`ScenarioConfig`] (seed included). One
//! round executes, in order:
//!
//! 1. epoch bookkeeping (eligibility reset, M-LEACH speed redraw),
//! 2. [`solar_step`],
//! 3. [`run_setup_phase`]: election, advertisements, joins, routes,
//! 4. [`run_steady_phase`]: handovers (M-LEACH moves first, via
//!    [`mobility_step`]), optional BS downlink, then the data frames,
//! 5. a [`RoundReport`].
//!
//! Every joule removed from a battery goes through [`NetworkState::charge`],
//! which applies the death rule and feeds the energy ledger.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, ProtocolVariant, ScenarioConfig};
use crate::geometry::Position;
use crate::metrics::{RoundReport, SimulationTrace};
use crate::model::{EpochState, Node, NodeId, Role};
use crate::protocol::{
    elect_chs_centralized, elect_chs_distributed, join_by_midpoint, join_by_rssi,
    mleach_elect, mleach_handover, mleach_join, multihop_route, rounds_per_epoch, sleach_handover,
    AnnealSchedule, ClusterAssignment, NextHop,
};
use crate::rng::SimRng;

/// Compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Network-wide energy accounting.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyLedger {
    pub initial: f64,
    pub dissipated: KahanSum,
    pub harvested: KahanSum,
}

/// Packets delivered during one steady phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PacketCounts {
    pub to_ch: u64,
    pub to_bs: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub nodes: Vec<Node>,
    pub epoch: EpochState,
    pub assignment: ClusterAssignment,
    pub ledger: EnergyLedger,
    /// Cumulative deliveries.
    pub pkts_to_ch: u64,
    pub pkts_to_bs: u64,
    /// Heads elected in the latest setup phase.
    pub chs_elected: u32,
}

impl NetworkState {
    /// Debits `cost` from node `id`; false if the node could not act.
    pub fn charge(&mut self, id: NodeId, cost: f64) -> bool {
        let c = self.nodes[id].spend(cost);
        self.ledger.dissipated.add(c.spent);
        c.performed
    }

    pub fn is_alive(&self, id: NodeId) -> bool {
        self.nodes[id].alive
    }

    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn residual_total(&self) -> f64 {
        let mut s = KahanSum::default();
        for n in &self.nodes {
            s.add(n.residual_energy);
        }
        s.value()
    }

    /// `|initial + harvested - residual - dissipated|`.
    pub fn ledger_imbalance(&self) -> f64 {
        (self.ledger.initial + self.ledger.harvested.value()
            - self.residual_total()
            - self.ledger.dissipated.value())
        .abs()
    }

    fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        self.nodes[a].pos.distance_to(&self.nodes[b].pos)
    }

    /// Copies roles and head pointers from `assignment` onto the nodes.
    fn apply_roles(&mut self, assignment: &ClusterAssignment) {
        for n in &mut self.nodes {
            n.role = Role::Unassigned;
            n.cluster_of = None;
        }
        for &ch in &assignment.ch_ids {
            self.nodes[ch].role = Role::ClusterHead;
            self.nodes[ch].cluster_of = Some(ch);
        }
        for (&m, &head) in &assignment.membership {
            if let Some(h) = head {
                self.nodes[m].role = Role::Member;
                self.nodes[m].cluster_of = Some(h);
            }
        }
    }

    fn prune(&mut self, assignment: &mut ClusterAssignment) {
        let alive: Vec<bool> = self.nodes.iter().map(|n| n.alive).collect();
        assignment.prune(|id| alive[id]);
    }
}

/// Scatters nodes uniformly over the field from the deployment stream.
/// Ids below `floor(solar_fraction * n)` are solar powered.
pub fn deploy(config: &ScenarioConfig, rng: &mut SimRng) -> Result<NetworkState, ConfigError> {
    config.validate()?;
    let solar = (config.solar_fraction * config.num_nodes as f64).floor() as usize;
    let nodes: Vec<Node> = (0..config.num_nodes)
        .map(|id| {
            let x = rng.deployment.gen::<f64>() * config.field_width;
            let y = rng.deployment.gen::<f64>() * config.field_height;
            let mut node = Node::new(id, Position::new(x, y), config.initial_energy);
            node.is_solar = id < solar;
            node
        })
        .collect();
    Ok(NetworkState {
        ledger: EnergyLedger {
            initial: config.initial_energy * nodes.len() as f64,
            ..Default::default()
        },
        nodes,
        epoch: EpochState::new(rounds_per_epoch(config.p_ch)),
        assignment: ClusterAssignment::default(),
        pkts_to_ch: 0,
        pkts_to_bs: 0,
        chs_elected: 0,
    })
}

/// True while solar nodes harvest in `round`.
pub fn sun_up(config: &ScenarioConfig, round: u32) -> bool {
    let cycle = config.sun_cycle_rounds.max(1);
    ((round % cycle) as f64) < config.sun_fraction * cycle as f64
}

/// Adds one round of harvest to every alive solar node while the sun is up,
/// never beyond its initial energy. Returns the energy stored.
///
/// Only the solar-aware variants run on harvesting hardware; for the others
/// the solar flag is inert and every node is battery-only.
pub fn solar_step(state: &mut NetworkState, config: &ScenarioConfig) -> f64 {
    if !config.protocol.is_solar_aware()
        || config.harvest_j_per_round <= 0.0
        || !sun_up(config, state.epoch.round)
    {
        return 0.0;
    }
    let mut total = 0.0;
    for n in state.nodes.iter_mut().filter(|n| n.is_solar) {
        let cap = n.initial_energy;
        let got = n.harvest(config.harvest_j_per_round, cap);
        state.ledger.harvested.add(got);
        total += got;
    }
    total
}

/// Draws a fresh speed in `[0, v_max]` for every alive node.
pub fn redraw_speeds(state: &mut NetworkState, config: &ScenarioConfig, rng: &mut ChaCha8Rng) {
    for n in state.nodes.iter_mut().filter(|n| n.alive) {
        n.velocity.speed = if config.v_max > 0.0 { rng.gen::<f64>() * config.v_max } else { 0.0 };
    }
}

/// One random-waypoint move. Nodes standing on their waypoint first draw a
/// new one uniformly over the field; every node then advances towards its
/// waypoint by at most its speed.
pub fn mobility_step(state: &mut NetworkState, config: &ScenarioConfig, rng: &mut ChaCha8Rng) {
    if config.protocol != ProtocolVariant::MLeach {
        return;
    }
    let field = config.field();
    for n in state.nodes.iter_mut().filter(|n| n.alive) {
        if n.pos.distance_to(&n.waypoint) < 1e-9 {
            n.waypoint = Position::new(
                rng.gen::<f64>() * config.field_width,
                rng.gen::<f64>() * config.field_height,
            );
        }
        let speed = n.velocity.speed;
        if speed <= 0.0 {
            continue;
        }
        let dx = n.waypoint.x - n.pos.x;
        let dy = n.waypoint.y - n.pos.y;
        let dist = dx.hypot(dy);
        n.velocity.heading = dy.atan2(dx);
        n.pos = if dist <= speed {
            n.waypoint
        } else {
            field.clamp(n.pos.translated(dx / dist * speed, dy / dist * speed))
        };
    }
}

fn choose_head(
    variant: ProtocolVariant,
    node: &Node,
    ch_ids: &BTreeSet<NodeId>,
    nodes: &[Node],
    config: &ScenarioConfig,
) -> Option<NodeId> {
    match variant {
        ProtocolVariant::LeachSC => join_by_midpoint(node, ch_ids, nodes, config.bs_pos),
        ProtocolVariant::MLeach => mleach_join(node, ch_ids, nodes, config.join_range),
        _ => join_by_rssi(node, ch_ids, nodes),
    }
}

/// Election and cluster formation.
///
/// With `setup_costs` on, the phase charges:
/// - centralized variants: a status report from every alive node to the BS
///   before the election and reception of the BS head announcement after it;
/// - every head: one advertisement sent far enough to reach the farthest
///   alive node;
/// - every other alive node: reception of each advertisement;
/// - every joining node: one join message, received by its head.
pub fn run_setup_phase(
    state: &mut NetworkState,
    config: &ScenarioConfig,
    rng: &mut SimRng,
    schedule: &AnnealSchedule,
) -> ClusterAssignment {
    let variant = config.protocol;
    let radio = config.radio;
    let l_c = config.packet_bits_data as f64;
    let charging = config.setup_costs;

    if variant.is_centralized() && charging {
        for id in 0..state.nodes.len() {
            if state.nodes[id].alive {
                let d = state.nodes[id].pos.distance_to(&config.bs_pos);
                state.charge(id, radio.tx(l_c, d));
            }
        }
    }

    let elected: Vec<NodeId> = match variant {
        ProtocolVariant::LeachC | ProtocolVariant::SLeachC => elect_chs_centralized(
            &state.nodes,
            config.p_ch,
            variant.is_solar_aware(),
            schedule,
            &mut rng.annealing,
        ),
        ProtocolVariant::MLeach => mleach_elect(&state.nodes, config.p_ch),
        _ => elect_chs_distributed(
            &mut state.nodes,
            &mut state.epoch,
            variant,
            config.p_ch,
            &mut rng.election,
        ),
    };
    state.chs_elected = elected.len() as u32;

    if variant.is_centralized() && charging {
        for id in 0..state.nodes.len() {
            if state.nodes[id].alive {
                state.charge(id, radio.rx(l_c));
            }
        }
    }

    let mut ch_ids: BTreeSet<NodeId> = elected.into_iter().filter(|&c| state.is_alive(c)).collect();

    if charging && !ch_ids.is_empty() {
        let mut advertised = 0usize;
        for &ch in &ch_ids.clone() {
            let reach = state
                .nodes
                .iter()
                .filter(|n| n.alive && n.id != ch)
                .map(|n| n.pos.distance_to(&state.nodes[ch].pos))
                .fold(0.0, f64::max);
            if state.charge(ch, radio.tx(l_c, reach)) {
                advertised += 1;
            } else {
                ch_ids.remove(&ch);
            }
        }
        let listen = advertised as f64 * radio.rx(l_c);
        for id in 0..state.nodes.len() {
            if state.nodes[id].alive && !ch_ids.contains(&id) {
                state.charge(id, listen);
            }
        }
        ch_ids.retain(|&c| state.is_alive(c));
    }

    let mut assignment = ClusterAssignment { ch_ids, ..Default::default() };
    for id in 0..state.nodes.len() {
        if !state.nodes[id].alive || assignment.ch_ids.contains(&id) {
            continue;
        }
        let head = choose_head(variant, &state.nodes[id], &assignment.ch_ids, &state.nodes, config);
        let joined = match head {
            Some(h) if charging => {
                state.charge(id, radio.tx(l_c, state.distance(id, h))) && state.charge(h, radio.rx(l_c))
            }
            Some(_) => true,
            None => false,
        };
        if state.nodes[id].alive {
            assignment.membership.insert(id, head.filter(|_| joined));
        }
    }
    state.prune(&mut assignment);

    if variant == ProtocolVariant::MultiHopLeach {
        assignment.routes =
            multihop_route(&assignment.ch_ids, &state.nodes, config.bs_pos, config.ch_radio_range);
    } else {
        assignment.routes = assignment.ch_ids.iter().map(|&c| (c, NextHop::BaseStation)).collect();
    }
    state.apply_roles(&assignment);
    assignment
}

/// Hands a cluster from `old` to `new`, which must be one of its members.
fn transfer_head(assignment: &mut ClusterAssignment, old: NodeId, new: NodeId) {
    let hop = assignment.routes.remove(&old).unwrap_or(NextHop::BaseStation);
    assignment.ch_ids.remove(&old);
    assignment.ch_ids.insert(new);
    assignment.routes.insert(new, hop);
    assignment.membership.remove(&new);
    for head in assignment.membership.values_mut() {
        if *head == Some(old) {
            *head = Some(new);
        }
    }
    assignment.membership.insert(old, Some(new));
    for hop in assignment.routes.values_mut() {
        if *hop == NextHop::Head(old) {
            *hop = NextHop::Head(new);
        }
    }
}

fn solar_handovers(state: &mut NetworkState, assignment: &mut ClusterAssignment, config: &ScenarioConfig) {
    let up = sun_up(config, state.epoch.round);
    for ch in assignment.ch_ids.clone() {
        let members = assignment.members_of(ch);
        let new = sleach_handover(&members, ch, &state.nodes, up);
        if new != ch {
            transfer_head(assignment, ch, new);
        }
    }
}

fn mobility_handovers(
    state: &mut NetworkState,
    assignment: &mut ClusterAssignment,
    config: &ScenarioConfig,
) {
    let radio = config.radio;
    let l_c = config.packet_bits_data as f64;
    let members: Vec<NodeId> = assignment.membership.keys().copied().collect();
    for m in members {
        if !state.is_alive(m) {
            continue;
        }
        let target = mleach_join(&state.nodes[m], &assignment.ch_ids, &state.nodes, config.join_range);
        let Some(target) = target else { continue };
        let msgs = mleach_handover(assignment, m, target, &state.nodes);
        if let Some(old) = msgs.dis_join {
            let d = state.distance(m, old);
            state.charge(m, radio.tx(l_c, d));
        }
        if let Some(new) = msgs.join_req {
            if state.is_alive(m) {
                let d = state.distance(m, new);
                state.charge(m, radio.tx(l_c, d));
            }
        }
    }
    state.prune(assignment);
}

fn downlink(state: &mut NetworkState, assignment: &ClusterAssignment, config: &ScenarioConfig) {
    let radio = config.radio;
    let l_bs = config.packet_bits_bs as f64;
    for &ch in &assignment.ch_ids {
        let members = assignment.members_of(ch);
        let cluster = (members.len() + 1) as f64;
        if !state.charge(ch, cluster * radio.rx(l_bs)) {
            continue;
        }
        for m in members {
            if !state.is_alive(ch) {
                break;
            }
            if state.is_alive(m) && state.charge(ch, radio.tx(l_bs, state.distance(ch, m))) {
                state.charge(m, radio.rx(l_bs));
            }
        }
    }
}

/// Data frames of one round.
///
/// Per frame, every member whose head is alive sends `L_C` bits (the head
/// pays reception); each head aggregates its members' packets plus its own
/// reading and sends the `L_A`-bit aggregate to its next hop. A relay head
/// receives the incoming bundle and forwards it together with its own
/// aggregate in one packet. Packets are counted on delivery.
pub fn run_steady_phase(
    state: &mut NetworkState,
    assignment: &mut ClusterAssignment,
    config: &ScenarioConfig,
    rng: &mut SimRng,
) -> PacketCounts {
    let radio = config.radio;
    let l_c = config.packet_bits_data as f64;
    let l_a = config.packet_bits_agg as f64;
    let mut counts = PacketCounts::default();

    match config.protocol {
        ProtocolVariant::SLeachC | ProtocolVariant::SLeachD => {
            solar_handovers(state, assignment, config)
        }
        ProtocolVariant::MLeach => {
            mobility_step(state, config, &mut rng.mobility);
            mobility_handovers(state, assignment, config);
        }
        _ => {}
    }
    state.apply_roles(assignment);

    if config.downlink {
        downlink(state, assignment, config);
        state.prune(assignment);
    }
    if assignment.ch_ids.is_empty() {
        if config.direct_fallback {
            for _ in 0..config.frames_per_round {
                for id in 0..state.nodes.len() {
                    if state.is_alive(id) {
                        let d = state.nodes[id].pos.distance_to(&config.bs_pos);
                        if state.charge(id, radio.tx(l_c, d)) {
                            counts.to_bs += 1;
                        }
                    }
                }
            }
        }
        return counts;
    }

    // Heads farthest (in hops) from the BS transmit first so relays hold
    // their full bundle when their turn comes.
    let mut order: Vec<(usize, NodeId)> = assignment
        .ch_ids
        .iter()
        .map(|&c| (assignment.path_to_bs(c).map_or(1, |p| p.len()), c))
        .collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    for _ in 0..config.frames_per_round {
        let mut received: std::collections::BTreeMap<NodeId, u64> =
            assignment.ch_ids.iter().map(|&c| (c, 0)).collect();
        let members: Vec<(NodeId, NodeId)> = assignment
            .membership
            .iter()
            .filter_map(|(&m, &h)| h.map(|h| (m, h)))
            .collect();
        for (m, h) in members {
            if !state.is_alive(m) || !state.is_alive(h) {
                continue;
            }
            if state.charge(m, radio.tx(l_c, state.distance(m, h))) && state.charge(h, radio.rx(l_c)) {
                counts.to_ch += 1;
                *received.entry(h).or_default() += 1;
            }
        }

        let mut inbound: std::collections::BTreeMap<NodeId, u64> = Default::default();
        for &(_, ch) in &order {
            if !state.is_alive(ch) {
                continue;
            }
            let readings = received.get(&ch).copied().unwrap_or(0) + 1;
            if !state.charge(ch, radio.agg(readings as f64 * l_c)) {
                continue;
            }
            let bundle = 1 + inbound.remove(&ch).unwrap_or(0);
            let next = match assignment.routes.get(&ch).copied().unwrap_or(NextHop::BaseStation) {
                NextHop::Head(h) if state.is_alive(h) => NextHop::Head(h),
                _ => NextHop::BaseStation,
            };
            let bits = bundle as f64 * l_a;
            match next {
                NextHop::BaseStation => {
                    let d = state.nodes[ch].pos.distance_to(&config.bs_pos);
                    if state.charge(ch, radio.tx(bits, d)) {
                        counts.to_bs += bundle;
                    }
                }
                NextHop::Head(h) => {
                    if state.charge(ch, radio.tx(bits, state.distance(ch, h)))
                        && state.charge(h, radio.rx(bits))
                    {
                        *inbound.entry(h).or_default() += bundle;
                    }
                }
            }
        }
        state.prune(assignment);
    }
    state.apply_roles(assignment);
    counts
}

/// A simulation in progress.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: ScenarioConfig,
    pub state: NetworkState,
    rng: SimRng,
    schedule: AnnealSchedule,
    next_round: u32,
}

impl Simulation {
    pub fn new(config: ScenarioConfig) -> Result<Self, ConfigError> {
        let mut rng = SimRng::new(config.seed);
        let state = deploy(&config, &mut rng)?;
        Ok(Self {
            config,
            state,
            rng,
            schedule: AnnealSchedule::default(),
            next_round: 0,
        })
    }

    pub fn with_schedule(mut self, schedule: AnnealSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn finished(&self) -> bool {
        self.next_round >= self.config.rounds_max || self.state.alive_count() == 0
    }

    /// Runs one full round and reports the network state after it.
    pub fn step(&mut self) -> RoundReport {
        let round = self.next_round;
        self.next_round += 1;
        let config = &self.config;
        let state = &mut self.state;

        if state.epoch.enter_round(round) {
            for n in state.nodes.iter_mut().filter(|n| n.alive) {
                n.eligible = true;
            }
            if config.protocol == ProtocolVariant::MLeach {
                redraw_speeds(state, config, &mut self.rng.mobility);
            }
        }

        solar_step(state, config);
        let mut assignment = run_setup_phase(state, config, &mut self.rng, &self.schedule);
        let packets = run_steady_phase(state, &mut assignment, config, &mut self.rng);
        state.assignment = assignment;
        state.pkts_to_ch += packets.to_ch;
        state.pkts_to_bs += packets.to_bs;

        debug_assert!(
            state.ledger_imbalance()
                <= 1e-9 * (state.ledger.initial + state.ledger.harvested.value()).max(1.0),
            "energy ledger out of balance by {} J in round {round}",
            state.ledger_imbalance()
        );

        let alive = state.alive_count() as u32;
        RoundReport {
            round,
            alive,
            dead: state.nodes.len() as u32 - alive,
            chs_elected: state.chs_elected,
            pkts_to_ch: state.pkts_to_ch,
            pkts_to_bs: state.pkts_to_bs,
            energy_dissipated_j: state.ledger.dissipated.value(),
            energy_harvested_j: state.ledger.harvested.value(),
        }
    }

    pub fn run_to_end(mut self) -> SimulationTrace {
        let mut reports = Vec::new();
        while !self.finished() {
            reports.push(self.step());
        }
        SimulationTrace { config: self.config, reports }
    }
}

/// Runs a scenario to `rounds_max` or until every node is dead.
///
/// `rounds_max = 0` yields an empty trace; every other field must validate.
pub fn run(config: &ScenarioConfig) -> Result<SimulationTrace, ConfigError> {
    if config.rounds_max == 0 {
        let probe = ScenarioConfig { rounds_max: 1, ..config.clone() };
        probe.validate()?;
        return Ok(SimulationTrace { config: config.clone(), reports: Vec::new() });
    }
    Ok(Simulation::new(config.clone())?.run_to_end())
}
