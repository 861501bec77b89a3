//! Deterministic round-based simulator for LEACH-family cluster routing in
//! wireless sensor networks.
//!
//! Seven variants are provided: LEACH, LEACH-C, solar-aware centralized and
//! distributed LEACH, multi-hop LEACH, M-LEACH and LEACH-SC. Every radio
//! action is priced with the first-order radio model in [`radio`], which also
//! exposes the closed-form cluster and linear-chain energy expressions.
//!
//! ```
//! use leach_core::{run, summarize, ProtocolVariant, ScenarioConfig};
//!
//! let config = ScenarioConfig {
//!     protocol: ProtocolVariant::LeachC,
//!     rounds_max: 50,
//!     ..Default::default()
//! };
//! let trace = run(&config).unwrap();
//! assert_eq!(trace.reports.len(), 50);
//! let summary = summarize(&trace).unwrap();
//! assert!(summary.total_pkts_to_bs > 0);
//! ```

pub mod compare;
pub mod config;
pub mod engine;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod model;
pub mod protocol;
pub mod radio;
pub mod rng;

pub use config::{ConfigError, ProtocolVariant, ScenarioConfig};
pub use engine::{run, NetworkState, Simulation};
pub use geometry::{distance, midpoint, Position};
pub use metrics::{
    aggregate_seeds, percent_improvement, summarize, AggregateTrace, LifetimeSummary, RoundReport,
    SimulationTrace,
};
pub use model::{EpochState, Node, NodeId, Role};
pub use radio::RadioParams;
