//! Base-station cluster-head selection.
//!
//! Heads are chosen among the nodes whose residual energy is at least the
//! alive-node mean, so as to minimise the sum of squared distances from every
//! alive node to its nearest head. This is a k-medoids problem restricted to
//! a candidate set; it is solved by greedy BUILD seeding, a few restarted
//! simulated-annealing swap searches with a geometric temperature schedule,
//! and a final best-improvement swap descent.

use rand::Rng;

use crate::geometry::Position;
use crate::model::{Node, NodeId};

/// Number of heads a centrally controlled round uses.
pub fn centralized_k(p: f64, alive: usize) -> usize {
    ((p * alive as f64).round() as usize).max(1).min(alive.max(1))
}

/// Annealing budget and temperature schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    /// Proposed swaps per chain.
    pub iterations: usize,
    /// Starting temperature as a fraction of the chain's starting cost.
    pub initial_temperature: f64,
    /// Final temperature as a fraction of the starting one.
    pub final_ratio: f64,
    /// Independent chains; the first starts from the greedy seed, the
    /// others from random medoid sets.
    pub restarts: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            iterations: 100,
            initial_temperature: 0.025,
            final_ratio: 1e-3,
            restarts: 4,
        }
    }
}

/// Sum over `points` of the squared distance to the nearest medoid.
pub fn clustering_cost(points: &[Position], medoids: &[usize]) -> f64 {
    points
        .iter()
        .map(|p| {
            medoids
                .iter()
                .map(|&m| p.distance_sq_to(&points[m]))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

// Squared distances from every candidate to every point, one row each.
struct Distances {
    n: usize,
    rows: Vec<f64>,
    row_of: Vec<usize>,
}

impl Distances {
    fn new(points: &[Position], candidates: &[usize]) -> Self {
        let n = points.len();
        let mut row_of = vec![usize::MAX; n];
        let mut rows = Vec::with_capacity(candidates.len() * n);
        for (r, &c) in candidates.iter().enumerate() {
            row_of[c] = r;
            rows.extend(points.iter().map(|p| p.distance_sq_to(&points[c])));
        }
        Self { n, rows, row_of }
    }

    fn row(&self, c: usize) -> &[f64] {
        let r = self.row_of[c];
        &self.rows[r * self.n..(r + 1) * self.n]
    }
}

struct Nearest {
    slot: Vec<usize>,
    second_slot: Vec<usize>,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl Nearest {
    fn compute(dist: &Distances, medoids: &[usize]) -> Self {
        let n = dist.n;
        let mut this = Self {
            slot: vec![0; n],
            second_slot: vec![0; n],
            first: vec![f64::INFINITY; n],
            second: vec![f64::INFINITY; n],
        };
        for i in 0..n {
            this.rescan(dist, medoids, i);
        }
        this
    }

    fn rescan(&mut self, dist: &Distances, medoids: &[usize], i: usize) {
        self.first[i] = f64::INFINITY;
        self.second[i] = f64::INFINITY;
        for (s, &m) in medoids.iter().enumerate() {
            self.offer(i, s, dist.row(m)[i]);
        }
    }

    fn offer(&mut self, i: usize, s: usize, d: f64) {
        if d < self.first[i] {
            self.second[i] = self.first[i];
            self.second_slot[i] = self.slot[i];
            self.first[i] = d;
            self.slot[i] = s;
        } else if d < self.second[i] {
            self.second[i] = d;
            self.second_slot[i] = s;
        }
    }

    /// Updates after `medoids[slot]` has been replaced. Only points that
    /// had the old medoid as first or second choice need a full rescan.
    fn replaced(&mut self, dist: &Distances, medoids: &[usize], slot: usize) {
        let row = dist.row(medoids[slot]);
        for (i, &d) in row.iter().enumerate() {
            if self.slot[i] == slot || self.second_slot[i] == slot {
                self.rescan(dist, medoids, i);
            } else {
                self.offer(i, slot, d);
            }
        }
    }

    fn cost(&self) -> f64 {
        self.first.iter().sum()
    }

    /// Cost after replacing the medoid in `slot` by candidate `x`.
    fn swap_cost(&self, dist: &Distances, slot: usize, x: usize) -> f64 {
        dist.row(x)
            .iter()
            .zip(self.slot.iter().zip(self.first.iter().zip(&self.second)))
            .map(|(&d, (&s, (&f, &sec)))| {
                let without = if s == slot { sec } else { f };
                without.min(d)
            })
            .sum()
    }
}

/// Chooses `k` medoids among `candidates` (indices into `points`, listed in
/// preference order) minimising [`clustering_cost`].
///
/// Seeding adds, one at a time, the candidate with the largest strict cost
/// reduction, so preference order settles ties. The first annealing chain
/// starts from that seed and the others from random medoid sets; each
/// proposes random medoid/candidate swaps and keeps the best configuration
/// it saw. The best chain result is then driven to a swap-local optimum.
pub fn medoid_search<R: Rng + ?Sized>(
    points: &[Position],
    candidates: &[usize],
    k: usize,
    schedule: &AnnealSchedule,
    rng: &mut R,
) -> Vec<usize> {
    if k == 0 || candidates.is_empty() {
        return Vec::new();
    }
    if k >= candidates.len() {
        return candidates.to_vec();
    }
    let dist = Distances::new(points, candidates);

    // BUILD.
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let mut nearest = vec![f64::INFINITY; points.len()];
    while medoids.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for &c in candidates.iter().filter(|c| !medoids.contains(c)) {
            let cost: f64 = dist.row(c).iter().zip(&nearest).map(|(&d, &n)| n.min(d)).sum();
            if best.is_none_or(|(_, b)| cost < b) {
                best = Some((c, cost));
            }
        }
        let (c, _) = best.expect("candidates outnumber k");
        for (n, &d) in nearest.iter_mut().zip(dist.row(c)) {
            *n = n.min(d);
        }
        medoids.push(c);
    }

    let (mut best, mut best_cost) = anneal(&dist, candidates, medoids, schedule, rng);
    for _ in 1..schedule.restarts.max(1) {
        let start: Vec<usize> =
            rand::seq::index::sample(rng, candidates.len(), k).iter().map(|i| candidates[i]).collect();
        let (found, cost) = anneal(&dist, candidates, start, schedule, rng);
        if cost < best_cost {
            best = found;
            best_cost = cost;
        }
    }
    sorted(polish(&dist, candidates, best))
}

// One annealing chain from `medoids`; returns the best configuration seen
// and its cost.
fn anneal<R: Rng + ?Sized>(
    dist: &Distances,
    candidates: &[usize],
    mut medoids: Vec<usize>,
    schedule: &AnnealSchedule,
    rng: &mut R,
) -> (Vec<usize>, f64) {
    let mut state = Nearest::compute(dist, &medoids);
    let mut current = state.cost();
    let mut best = medoids.clone();
    let mut best_cost = current;
    let mut outsiders: Vec<usize> = candidates.iter().copied().filter(|c| !medoids.contains(c)).collect();
    if outsiders.is_empty() || schedule.iterations == 0 || current <= 0.0 {
        return (best, best_cost);
    }

    let cooling = schedule.final_ratio.powf(1.0 / schedule.iterations as f64);
    let mut temperature = schedule.initial_temperature * current;
    for _ in 0..schedule.iterations {
        let slot = rng.gen_range(0..medoids.len());
        let pick = rng.gen_range(0..outsiders.len());
        let x = outsiders[pick];
        // Metropolis: accept when delta < -T ln u.
        let limit = current - temperature * rng.gen::<f64>().ln();
        if state.swap_cost(dist, slot, x) <= limit {
            outsiders[pick] = medoids[slot];
            medoids[slot] = x;
            state.replaced(dist, &medoids, slot);
            current = state.cost();
            if current < best_cost {
                best_cost = current;
                best.clone_from(&medoids);
            }
        }
        temperature *= cooling;
    }
    (best, best_cost)
}

// Best-improvement swaps until no single swap lowers the cost. One pass
// over the points prices a candidate against every slot at once: a point
// whose medoid stays gains min(d - first, 0), a point whose medoid leaves
// moves to min(d, second).
fn polish(dist: &Distances, candidates: &[usize], mut medoids: Vec<usize>) -> Vec<usize> {
    let mut state = Nearest::compute(dist, &medoids);
    let mut per_slot = vec![0.0; medoids.len()];
    loop {
        let floor = -1e-12 * state.cost();
        let mut best: Option<(usize, usize, f64)> = None;
        for &x in candidates.iter().filter(|c| !medoids.contains(c)) {
            per_slot.iter_mut().for_each(|v| *v = 0.0);
            let mut shared = 0.0;
            for (i, &d) in dist.row(x).iter().enumerate() {
                let stay = (d - state.first[i]).min(0.0);
                shared += stay;
                per_slot[state.slot[i]] += d.min(state.second[i]) - state.first[i] - stay;
            }
            for (slot, extra) in per_slot.iter().enumerate() {
                let delta = shared + extra;
                if delta < best.map_or(floor, |b| b.2) {
                    best = Some((slot, x, delta));
                }
            }
        }
        let Some((slot, x, _)) = best else { return medoids };
        medoids[slot] = x;
        state.replaced(dist, &medoids, slot);
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Base-station election used by LEACH-C and, with `solar_aware`, by
/// solar-aware centralized LEACH.
///
/// Candidates are the alive nodes at or above the mean residual energy. When
/// fewer than `k` qualify, all of them are taken and the remainder is filled
/// with the highest-energy nodes below the mean, so the head count is always
/// `max(1, round(p * alive))`. Candidate preference (which settles cost ties)
/// is residual energy descending, with solar nodes first when `solar_aware`,
/// then lowest id.
pub fn elect_chs_centralized<R: Rng + ?Sized>(
    nodes: &[Node],
    p: f64,
    solar_aware: bool,
    schedule: &AnnealSchedule,
    rng: &mut R,
) -> Vec<NodeId> {
    let alive: Vec<&Node> = nodes.iter().filter(|n| n.alive).collect();
    if alive.is_empty() {
        return Vec::new();
    }
    let k = centralized_k(p, alive.len());
    let mean = alive.iter().map(|n| n.residual_energy).sum::<f64>() / alive.len() as f64;
    let floor = mean - 1e-12 * mean.abs();

    let mut ranked: Vec<usize> = (0..alive.len()).collect();
    ranked.sort_by(|&a, &b| {
        let (a, b) = (alive[a], alive[b]);
        let solar = if solar_aware { b.is_solar.cmp(&a.is_solar) } else { std::cmp::Ordering::Equal };
        solar
            .then(b.residual_energy.total_cmp(&a.residual_energy))
            .then(a.id.cmp(&b.id))
    });
    let (mut candidates, below): (Vec<usize>, Vec<usize>) =
        ranked.into_iter().partition(|&i| alive[i].residual_energy >= floor);

    let chosen = if candidates.len() <= k {
        let mut fill = below;
        fill.sort_by(|&a, &b| {
            alive[b]
                .residual_energy
                .total_cmp(&alive[a].residual_energy)
                .then(alive[a].id.cmp(&alive[b].id))
        });
        candidates.extend(fill.into_iter().take(k - candidates.len()));
        candidates
    } else {
        let points: Vec<Position> = alive.iter().map(|n| n.pos).collect();
        medoid_search(&points, &candidates, k, schedule, rng)
    };
    let mut ids: Vec<NodeId> = chosen.into_iter().map(|i| alive[i].id).collect();
    ids.sort_unstable();
    ids
}
