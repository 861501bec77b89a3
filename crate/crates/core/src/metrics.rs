//! Per-round measurements and lifetime statistics.

use thiserror::Error;

use crate::config::ScenarioConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("trace has no rounds")]
    EmptyTrace,
    #[error("no traces to aggregate")]
    NoTraces,
    #[error("trace {index} was produced by a different scenario than trace 0")]
    MismatchedConfig { index: usize },
    #[error("baseline lifetime must be positive, got {0}")]
    ZeroBaseline(f64),
}

/// State of the network at the end of one round. Packet and energy fields
/// are cumulative since round 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RoundReport {
    pub round: u32,
    pub alive: u32,
    pub dead: u32,
    pub chs_elected: u32,
    pub pkts_to_ch: u64,
    pub pkts_to_bs: u64,
    pub energy_dissipated_j: f64,
    pub energy_harvested_j: f64,
}

/// One simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub config: ScenarioConfig,
    pub reports: Vec<RoundReport>,
}

impl SimulationTrace {
    pub fn num_nodes(&self) -> u32 {
        self.config.num_nodes as u32
    }
}

/// Death milestones (round indices) and delivery totals. A milestone that
/// is never reached holds `rounds_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LifetimeSummary {
    pub first_node_death: u32,
    pub half_nodes_death: u32,
    pub last_node_death: u32,
    pub total_pkts_to_bs: u64,
    pub total_pkts_to_ch: u64,
}

/// Anything that carries a network lifetime (last node death, in rounds).
pub trait NetworkLifetime {
    fn lifetime(&self) -> f64;
}

impl NetworkLifetime for LifetimeSummary {
    fn lifetime(&self) -> f64 {
        self.last_node_death as f64
    }
}

pub fn summarize(trace: &SimulationTrace) -> Result<LifetimeSummary, MetricsError> {
    let last = trace.reports.last().ok_or(MetricsError::EmptyTrace)?;
    let n = trace.num_nodes();
    let sentinel = trace.config.rounds_max;
    let first_where = |pred: &dyn Fn(&RoundReport) -> bool| {
        trace.reports.iter().find(|r| pred(r)).map_or(sentinel, |r| r.round)
    };
    Ok(LifetimeSummary {
        first_node_death: first_where(&|r| r.dead >= 1),
        half_nodes_death: first_where(&|r| 2 * r.dead >= n),
        last_node_death: first_where(&|r| r.dead >= n),
        total_pkts_to_bs: last.pkts_to_bs,
        total_pkts_to_ch: last.pkts_to_ch,
    })
}

/// Relative lifetime gain of `other` over `base`, in percent.
pub fn percent_improvement<A: NetworkLifetime, B: NetworkLifetime>(
    base: &A,
    other: &B,
) -> Result<f64, MetricsError> {
    let b = base.lifetime();
    if !(b > 0.0) {
        return Err(MetricsError::ZeroBaseline(b));
    }
    Ok(100.0 * (other.lifetime() - b) / b)
}

/// Median and mean of one metric across seeds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stat {
    pub median: f64,
    pub mean: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        if values.is_empty() {
            return Stat::default();
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        };
        // Summing in sorted order keeps the mean independent of input order.
        let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
        Stat { median, mean }
    }
}

/// Element-wise statistics of one round across seeds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AggregateRow {
    pub round: u32,
    pub alive: Stat,
    pub dead: Stat,
    pub chs_elected: Stat,
    pub pkts_to_ch: Stat,
    pub pkts_to_bs: Stat,
    pub energy_dissipated_j: Stat,
    pub energy_harvested_j: Stat,
}

/// Median of the per-seed lifetime summaries.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MedianSummary {
    pub first_node_death: f64,
    pub half_nodes_death: f64,
    pub last_node_death: f64,
    pub total_pkts_to_bs: f64,
    pub total_pkts_to_ch: f64,
}

impl NetworkLifetime for MedianSummary {
    fn lifetime(&self) -> f64 {
        self.last_node_death
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateTrace {
    pub config: ScenarioConfig,
    pub seeds: Vec<u64>,
    pub rows: Vec<AggregateRow>,
    pub summary: MedianSummary,
    pub per_seed: Vec<LifetimeSummary>,
}

/// Combines runs that differ only in seed.
///
/// Shorter traces (runs that ended when every node died) are extended with
/// their final row so every round has one sample per seed.
pub fn aggregate_seeds(traces: &[SimulationTrace]) -> Result<AggregateTrace, MetricsError> {
    let first = traces.first().ok_or(MetricsError::NoTraces)?;
    let reference = first.config.with_seed(0);
    for (index, t) in traces.iter().enumerate() {
        if t.config.with_seed(0) != reference {
            return Err(MetricsError::MismatchedConfig { index });
        }
        if t.reports.is_empty() {
            return Err(MetricsError::EmptyTrace);
        }
    }
    let len = traces.iter().map(|t| t.reports.len()).max().unwrap_or(0);
    let rows = (0..len)
        .map(|i| {
            let at: Vec<RoundReport> = traces
                .iter()
                .map(|t| {
                    let mut r = *t.reports.get(i).unwrap_or_else(|| t.reports.last().unwrap());
                    r.round = i as u32;
                    if i >= t.reports.len() {
                        r.chs_elected = 0;
                    }
                    r
                })
                .collect();
            let stat = |f: fn(&RoundReport) -> f64| Stat::of(&at.iter().map(f).collect::<Vec<_>>());
            AggregateRow {
                round: i as u32,
                alive: stat(|r| r.alive as f64),
                dead: stat(|r| r.dead as f64),
                chs_elected: stat(|r| r.chs_elected as f64),
                pkts_to_ch: stat(|r| r.pkts_to_ch as f64),
                pkts_to_bs: stat(|r| r.pkts_to_bs as f64),
                energy_dissipated_j: stat(|r| r.energy_dissipated_j),
                energy_harvested_j: stat(|r| r.energy_harvested_j),
            }
        })
        .collect();

    let per_seed = traces.iter().map(summarize).collect::<Result<Vec<_>, _>>()?;
    let med = |f: fn(&LifetimeSummary) -> f64| Stat::of(&per_seed.iter().map(f).collect::<Vec<_>>()).median;
    let summary = MedianSummary {
        first_node_death: med(|s| s.first_node_death as f64),
        half_nodes_death: med(|s| s.half_nodes_death as f64),
        last_node_death: med(|s| s.last_node_death as f64),
        total_pkts_to_bs: med(|s| s.total_pkts_to_bs as f64),
        total_pkts_to_ch: med(|s| s.total_pkts_to_ch as f64),
    };
    Ok(AggregateTrace {
        config: reference,
        seeds: traces.iter().map(|t| t.config.seed).collect(),
        rows,
        summary,
        per_seed,
    })
}
