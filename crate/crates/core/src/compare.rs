//! Batch runs across seeds and protocols, written out as CSV files.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, ProtocolVariant, ScenarioConfig};
use crate::engine::run;
use crate::io::{
    aggregate_csv, gnuplot_script, load_config, summary_csv, trace_csv, write_atomic, IoError,
    SummaryRow,
};
use crate::metrics::{aggregate_seeds, percent_improvement, summarize, AggregateTrace, LifetimeSummary, MetricsError};

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("at least one seed is required")]
    NoSeeds,
    #[error("no protocols to compare")]
    NoProtocols,
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("invalid scenario: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// What to run and where to put the results.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunRequest {
    /// Scenario file; defaults are used when absent.
    pub config_path: Option<PathBuf>,
    pub protocol_override: Option<ProtocolVariant>,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Protocols for a comparison; all seven when absent.
    pub compare_list: Option<Vec<ProtocolVariant>>,
}

impl RunRequest {
    /// The scenario after loading the file and applying the override.
    pub fn scenario(&self) -> Result<ScenarioConfig, CompareError> {
        let mut config = match &self.config_path {
            Some(p) => load_config(p)?,
            None => ScenarioConfig::default(),
        };
        if let Some(p) = self.protocol_override {
            config.protocol = p;
        }
        Ok(config)
    }

    fn check(&self) -> Result<(), CompareError> {
        if self.seeds.is_empty() {
            return Err(CompareError::NoSeeds);
        }
        Ok(())
    }
}

/// One protocol's results in a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantResult {
    pub aggregate: AggregateTrace,
    pub row: SummaryRow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// In the requested order, LEACH first when it had to be added as the
    /// baseline.
    pub variants: Vec<VariantResult>,
    pub files: Vec<PathBuf>,
}

impl ComparisonReport {
    pub fn get(&self, protocol: ProtocolVariant) -> Option<&VariantResult> {
        self.variants.iter().find(|v| v.row.protocol == protocol)
    }
}

/// Runs every (protocol, seed) cell and aggregates per protocol, without
/// touching the filesystem. LEACH is always run because it is the baseline.
pub fn compare_in_memory(
    base: &ScenarioConfig,
    protocols: &[ProtocolVariant],
    seeds: &[u64],
) -> Result<Vec<VariantResult>, CompareError> {
    if seeds.is_empty() {
        return Err(CompareError::NoSeeds);
    }
    if protocols.is_empty() {
        return Err(CompareError::NoProtocols);
    }
    base.validate()?;
    let mut list: Vec<ProtocolVariant> = Vec::new();
    if !protocols.contains(&ProtocolVariant::Leach) {
        list.push(ProtocolVariant::Leach);
    }
    for &p in protocols {
        if !list.contains(&p) {
            list.push(p);
        }
    }

    let cells: Vec<(ProtocolVariant, u64)> =
        list.iter().flat_map(|&p| seeds.iter().map(move |&s| (p, s))).collect();
    let traces = cells
        .par_iter()
        .map(|&(p, s)| run(&base.with_protocol(p).with_seed(s)))
        .collect::<Result<Vec<_>, _>>()?;

    let aggregates = traces
        .chunks(seeds.len())
        .map(aggregate_seeds)
        .collect::<Result<Vec<_>, _>>()?;
    let baseline = aggregates[list.iter().position(|&p| p == ProtocolVariant::Leach).unwrap()].summary;
    aggregates
        .into_iter()
        .zip(&list)
        .map(|(aggregate, &protocol)| {
            let s = aggregate.summary;
            let row = SummaryRow {
                protocol,
                seeds: seeds.len(),
                first_node_death: s.first_node_death,
                half_nodes_death: s.half_nodes_death,
                last_node_death: s.last_node_death,
                total_pkts_to_bs: s.total_pkts_to_bs,
                total_pkts_to_ch: s.total_pkts_to_ch,
                improvement_pct: percent_improvement(&baseline, &s)?,
            };
            Ok(VariantResult { aggregate, row })
        })
        .collect()
}

/// Comparison run: writes `<protocol>.csv` (per-round median and mean across
/// seeds) for every protocol, `summary.csv` and `plot.gp` into the output
/// directory. Either every file is written or none is left behind.
pub fn run_compare(request: &RunRequest) -> Result<ComparisonReport, CompareError> {
    request.check()?;
    let base = request.scenario()?;
    let protocols = request.compare_list.clone().unwrap_or_else(|| ProtocolVariant::ALL.to_vec());
    let variants = compare_in_memory(&base, &protocols, &request.seeds)?;

    let mut outputs: Vec<(String, String)> = variants
        .iter()
        .map(|v| (format!("{}.csv", v.row.protocol.tag()), aggregate_csv(&v.aggregate)))
        .collect();
    let rows: Vec<SummaryRow> = variants.iter().map(|v| v.row.clone()).collect();
    outputs.push(("summary.csv".to_string(), summary_csv(&rows)));
    let tags: Vec<ProtocolVariant> = rows.iter().map(|r| r.protocol).collect();
    outputs.push(("plot.gp".to_string(), gnuplot_script(&tags)));

    let files = write_all(&request.output_dir, &outputs)?;
    Ok(ComparisonReport { variants, files })
}

/// Single-protocol run: one trace CSV per seed, named `<protocol>_seed<N>.csv`.
pub fn run_single(request: &RunRequest) -> Result<Vec<(u64, LifetimeSummary)>, CompareError> {
    request.check()?;
    let base = request.scenario()?;
    base.validate()?;
    let traces = request
        .seeds
        .par_iter()
        .map(|&s| run(&base.with_seed(s)))
        .collect::<Result<Vec<_>, _>>()?;
    let outputs: Vec<(String, String)> = traces
        .iter()
        .map(|t| (format!("{}_seed{}.csv", t.config.protocol.tag(), t.config.seed), trace_csv(t)))
        .collect();
    write_all(&request.output_dir, &outputs)?;
    traces
        .iter()
        .map(|t| Ok((t.config.seed, summarize(t)?)))
        .collect()
}

fn write_all(dir: &Path, outputs: &[(String, String)]) -> Result<Vec<PathBuf>, CompareError> {
    fs::create_dir_all(dir).map_err(|e| IoError::fs(dir, e))?;
    let mut written = Vec::with_capacity(outputs.len());
    for (name, text) in outputs {
        let path = dir.join(name);
        if let Err(e) = write_atomic(&path, text.as_bytes()) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e.into());
        }
        written.push(path);
    }
    Ok(written)
}
