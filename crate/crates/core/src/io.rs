//! Scenario files, CSV traces and plot scripts.
//!
//! Scenario files are UTF-8 `key = value` lines. `#` starts a comment, blank
//! lines are ignored, and every key is a [`ScenarioConfig`] field name in
//! snake_case (radio constants use their bare names, `bs_pos` is written
//! `x, y`). Missing keys keep their defaults, so an empty file is the
//! default scenario.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{ConfigError, ProtocolVariant, ScenarioConfig};
use crate::geometry::Position;
use crate::metrics::{AggregateTrace, RoundReport, SimulationTrace};

/// Header of a per-run trace CSV.
pub const TRACE_HEADER: &str =
    "round,alive,dead,chs_elected,pkts_to_ch,pkts_to_bs,energy_dissipated_j,energy_harvested_j";

/// Every key a scenario file may contain, in the order [`format_config`]
/// writes them.
pub const CONFIG_KEYS: [&str; 27] = [
    "num_nodes",
    "field_width",
    "field_height",
    "bs_pos",
    "protocol",
    "p_ch",
    "packet_bits_data",
    "packet_bits_agg",
    "packet_bits_bs",
    "initial_energy",
    "rounds_max",
    "frames_per_round",
    "seed",
    "solar_fraction",
    "harvest_j_per_round",
    "sun_cycle_rounds",
    "sun_fraction",
    "v_max",
    "ch_radio_range",
    "join_range",
    "setup_costs",
    "downlink",
    "direct_fallback",
    "e_elec_tx",
    "e_elec_rx",
    "eps_fs",
    "e_da",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("expected `key = value`")]
    Malformed,
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{0}` given more than once")]
    Duplicate(String),
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error(transparent)]
    OutOfRange(ConfigError),
}

/// A scenario file problem. `line` is 1-based; it is `None` only for a range
/// error on a key the file did not set.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{}{kind}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ParseError {
    pub line: Option<usize>,
    pub kind: ParseErrorKind,
}

/// A filesystem or parse failure tied to a path.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Fs {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Config {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("{path}: line {line}: {reason}")]
    Csv { path: PathBuf, line: usize, reason: String },
}

impl IoError {
    pub(crate) fn fs(path: &Path, source: std::io::Error) -> Self {
        IoError::Fs { path: path.to_path_buf(), source }
    }
}

fn bad(key: &str, reason: impl Into<String>) -> ParseErrorKind {
    ParseErrorKind::BadValue { key: key.to_string(), reason: reason.into() }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ParseErrorKind>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| bad(key, format!("`{v}`: {e}")))
}

fn flag(key: &str, v: &str) -> Result<bool, ParseErrorKind> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(bad(key, format!("`{v}` is not a boolean"))),
    }
}

fn position(key: &str, v: &str) -> Result<Position, ParseErrorKind> {
    let inner = v.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => Ok(Position::new(num(key, x)?, num(key, y)?)),
        _ => Err(bad(key, format!("`{v}` is not an `x, y` pair"))),
    }
}

fn apply(c: &mut ScenarioConfig, key: &str, v: &str) -> Result<(), ParseErrorKind> {
    match key {
        "num_nodes" => c.num_nodes = num(key, v)?,
        "field_width" => c.field_width = num(key, v)?,
        "field_height" => c.field_height = num(key, v)?,
        "bs_pos" => c.bs_pos = position(key, v)?,
        "protocol" => c.protocol = v.parse::<ProtocolVariant>().map_err(|e| bad(key, e.to_string()))?,
        "p_ch" => c.p_ch = num(key, v)?,
        "packet_bits_data" => c.packet_bits_data = num(key, v)?,
        "packet_bits_agg" => c.packet_bits_agg = num(key, v)?,
        "packet_bits_bs" => c.packet_bits_bs = num(key, v)?,
        "initial_energy" => c.initial_energy = num(key, v)?,
        "rounds_max" => c.rounds_max = num(key, v)?,
        "frames_per_round" => c.frames_per_round = num(key, v)?,
        "seed" => c.seed = num(key, v)?,
        "solar_fraction" => c.solar_fraction = num(key, v)?,
        "harvest_j_per_round" => c.harvest_j_per_round = num(key, v)?,
        "sun_cycle_rounds" => c.sun_cycle_rounds = num(key, v)?,
        "sun_fraction" => c.sun_fraction = num(key, v)?,
        "v_max" => c.v_max = num(key, v)?,
        "ch_radio_range" => c.ch_radio_range = num(key, v)?,
        "join_range" => c.join_range = num(key, v)?,
        "setup_costs" => c.setup_costs = flag(key, v)?,
        "downlink" => c.downlink = flag(key, v)?,
        "direct_fallback" => c.direct_fallback = flag(key, v)?,
        "e_elec_tx" => c.radio.e_elec_tx = num(key, v)?,
        "e_elec_rx" => c.radio.e_elec_rx = num(key, v)?,
        "eps_fs" => c.radio.eps_fs = num(key, v)?,
        "e_da" => c.radio.e_da = num(key, v)?,
        _ => return Err(ParseErrorKind::UnknownKey(key.to_string())),
    }
    Ok(())
}

/// Parses and validates a scenario file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ParseError> {
    let mut config = ScenarioConfig::default();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |kind| ParseError { line: Some(line), kind };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| err(ParseErrorKind::Malformed))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(err(ParseErrorKind::Malformed));
        }
        if seen.insert(key.to_string(), line).is_some() {
            return Err(err(ParseErrorKind::Duplicate(key.to_string())));
        }
        apply(&mut config, key, value).map_err(err)?;
    }
    config.validate().map_err(|e| ParseError {
        line: seen.get(e.key).copied(),
        kind: ParseErrorKind::OutOfRange(e),
    })?;
    Ok(config)
}

/// Writes every field in scenario-file form. `parse_config` of the result
/// gives back an equal config.
pub fn format_config(c: &ScenarioConfig) -> String {
    let r = &c.radio;
    let values: [String; 27] = [
        c.num_nodes.to_string(),
        c.field_width.to_string(),
        c.field_height.to_string(),
        format!("{}, {}", c.bs_pos.x, c.bs_pos.y),
        c.protocol.tag().to_string(),
        c.p_ch.to_string(),
        c.packet_bits_data.to_string(),
        c.packet_bits_agg.to_string(),
        c.packet_bits_bs.to_string(),
        c.initial_energy.to_string(),
        c.rounds_max.to_string(),
        c.frames_per_round.to_string(),
        c.seed.to_string(),
        c.solar_fraction.to_string(),
        c.harvest_j_per_round.to_string(),
        c.sun_cycle_rounds.to_string(),
        c.sun_fraction.to_string(),
        c.v_max.to_string(),
        c.ch_radio_range.to_string(),
        c.join_range.to_string(),
        c.setup_costs.to_string(),
        c.downlink.to_string(),
        c.direct_fallback.to_string(),
        r.e_elec_tx.to_string(),
        r.e_elec_rx.to_string(),
        r.eps_fs.to_string(),
        r.e_da.to_string(),
    ];
    let mut out = String::new();
    for (k, v) in CONFIG_KEYS.iter().zip(values) {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

/// Reads and parses a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::fs(path, e))?;
    parse_config(&text).map_err(|source| IoError::Config { path: path.to_path_buf(), source })
}

/// Nine significant digits.
pub fn fmt_sig9(v: f64) -> String {
    format!("{v:.8e}")
}

/// Trace CSV text: header plus one line per round.
pub fn trace_csv(trace: &SimulationTrace) -> String {
    let mut out = String::with_capacity(64 * (trace.reports.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.round,
            r.alive,
            r.dead,
            r.chs_elected,
            r.pkts_to_ch,
            r.pkts_to_bs,
            fmt_sig9(r.energy_dissipated_j),
            fmt_sig9(r.energy_harvested_j),
        );
    }
    out
}

/// Reads the rows of a trace CSV written by [`trace_csv`].
pub fn parse_trace_csv(text: &str) -> Result<Vec<RoundReport>, (usize, String)> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TRACE_HEADER => {}
        _ => return Err((1, "missing or unexpected header".to_string())),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err((i + 1, format!("expected 8 fields, found {}", f.len())));
        }
        let e = |what: &str| (i + 1, format!("bad {what}"));
        out.push(RoundReport {
            round: f[0].parse().map_err(|_| e("round"))?,
            alive: f[1].parse().map_err(|_| e("alive"))?,
            dead: f[2].parse().map_err(|_| e("dead"))?,
            chs_elected: f[3].parse().map_err(|_| e("chs_elected"))?,
            pkts_to_ch: f[4].parse().map_err(|_| e("pkts_to_ch"))?,
            pkts_to_bs: f[5].parse().map_err(|_| e("pkts_to_bs"))?,
            energy_dissipated_j: f[6].parse().map_err(|_| e("energy_dissipated_j"))?,
            energy_harvested_j: f[7].parse().map_err(|_| e("energy_harvested_j"))?,
        });
    }
    Ok(out)
}

/// Writes a trace CSV atomically.
pub fn emit_trace_csv(trace: &SimulationTrace, path: &Path) -> Result<(), IoError> {
    write_atomic(path, trace_csv(trace).as_bytes())
}

/// Reads a trace CSV file.
pub fn read_trace_csv(path: &Path) -> Result<Vec<RoundReport>, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::fs(path, e))?;
    parse_trace_csv(&text).map_err(|(line, reason)| IoError::Csv { path: path.to_path_buf(), line, reason })
}

/// Header of a seed-aggregated trace CSV.
pub const AGGREGATE_HEADER: &str = "round,alive_median,alive_mean,dead_median,dead_mean,\
chs_elected_median,chs_elected_mean,pkts_to_ch_median,pkts_to_ch_mean,pkts_to_bs_median,\
pkts_to_bs_mean,energy_dissipated_j_median,energy_dissipated_j_mean,\
energy_harvested_j_median,energy_harvested_j_mean";

/// Per-round median and mean across seeds.
pub fn aggregate_csv(agg: &AggregateTrace) -> String {
    let mut out = String::new();
    out.push_str(AGGREGATE_HEADER);
    out.push('\n');
    for r in &agg.rows {
        let _ = write!(out, "{}", r.round);
        for s in [
            r.alive,
            r.dead,
            r.chs_elected,
            r.pkts_to_ch,
            r.pkts_to_bs,
            r.energy_dissipated_j,
            r.energy_harvested_j,
        ] {
            let _ = write!(out, ",{},{}", fmt_sig9(s.median), fmt_sig9(s.mean));
        }
        out.push('\n');
    }
    out
}

/// One line of a comparison summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub protocol: ProtocolVariant,
    pub seeds: usize,
    pub first_node_death: f64,
    pub half_nodes_death: f64,
    pub last_node_death: f64,
    pub total_pkts_to_bs: f64,
    pub total_pkts_to_ch: f64,
    /// Lifetime gain over LEACH, percent.
    pub improvement_pct: f64,
}

pub const SUMMARY_HEADER: &str = "protocol,seeds,first_node_death,half_nodes_death,last_node_death,\
total_pkts_to_bs,total_pkts_to_ch,improvement_vs_leach_pct";

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{:.4}",
            r.protocol.tag(),
            r.seeds,
            r.first_node_death,
            r.half_nodes_death,
            r.last_node_death,
            r.total_pkts_to_bs,
            r.total_pkts_to_ch,
            r.improvement_pct,
        );
    }
    out
}

/// A gnuplot script drawing alive nodes, packets to the BS and cluster
/// heads per round from the per-protocol aggregate CSVs in the same
/// directory.
pub fn gnuplot_script(protocols: &[ProtocolVariant]) -> String {
    let mut out = String::new();
    out.push_str("set datafile separator ','\nset key outside right\nset xlabel 'round'\nset terminal pngcairo size 1000,600\n");
    for (png, title, col) in [
        ("alive.png", "alive nodes", 2),
        ("pkts_to_bs.png", "packets to BS (cumulative)", 10),
        ("chs.png", "cluster heads per round", 6),
    ] {
        let _ = writeln!(out, "\nset output '{png}'\nset ylabel '{title}'");
        let plots: Vec<String> = protocols
            .iter()
            .map(|p| format!("'{}.csv' using 1:{col} with lines title '{}'", p.tag(), p.tag()))
            .collect();
        let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    }
    out
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(IoError::fs(path, e));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(parse_config("").unwrap(), ScenarioConfig::default());
        assert_eq!(parse_config("# nothing\n\n   \n").unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn single_override() {
        let c = parse_config("num_nodes = 50\n").unwrap();
        assert_eq!(c, ScenarioConfig { num_nodes: 50, ..Default::default() });
    }

    #[test]
    fn range_error_names_key_and_line() {
        let e = parse_config("num_nodes = 10\np_ch = 1.5\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(matches!(&e.kind, ParseErrorKind::OutOfRange(c) if c.key == "p_ch"));
        assert!(e.to_string().contains("p_ch"));
    }

    #[test]
    fn unknown_and_malformed_lines() {
        let e = parse_config("\n\nnodes = 3").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert_eq!(e.kind, ParseErrorKind::UnknownKey("nodes".into()));
        let e = parse_config("num_nodes 3").unwrap_err();
        assert_eq!((e.line, e.kind), (Some(1), ParseErrorKind::Malformed));
        let e = parse_config("num_nodes = x").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::BadValue { .. }));
        let e = parse_config("seed = 1\nseed = 2").unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn comments_positions_and_flags() {
        let c = parse_config("bs_pos = (10, -20.5)  # outside\nprotocol = LEACH-C\nsetup_costs = off\n").unwrap();
        assert_eq!(c.bs_pos, Position::new(10.0, -20.5));
        assert_eq!(c.protocol, ProtocolVariant::LeachC);
        assert!(!c.setup_costs);
    }

    #[test]
    fn default_round_trips() {
        let c = ScenarioConfig::default();
        assert_eq!(parse_config(&format_config(&c)).unwrap(), c);
        assert_eq!(format_config(&c).lines().count(), CONFIG_KEYS.len());
    }

    #[test]
    fn trace_csv_shapes() {
        let empty = SimulationTrace { config: ScenarioConfig::default(), reports: vec![] };
        assert_eq!(trace_csv(&empty), format!("{TRACE_HEADER}\n"));
        let one = SimulationTrace {
            config: ScenarioConfig::default(),
            reports: vec![RoundReport { alive: 100, energy_dissipated_j: 0.0123456789123, ..Default::default() }],
        };
        let text = trace_csv(&one);
        assert_eq!(text.lines().count(), 2);
        assert!(text.ends_with('\n'));
        assert!(text.contains("1.23456789e-2"));
    }
}
