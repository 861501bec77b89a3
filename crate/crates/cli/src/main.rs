use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use leach_core::compare::{run_compare, run_single, RunRequest};
use leach_core::io::{format_config, load_config};
use leach_core::radio::{
    ch_downward_energy, ch_upward_energy, cluster_downward_energy, cluster_total_energy, cluster_upward_energy,
    linear_direct_cost, linear_multihop_cost, member_upward_energy, multihop_breakeven_m, network_total_energy,
    ClusterGeometry, LinearScenario,
};
use leach_core::{ProtocolVariant, RadioParams};

#[derive(Parser)]
#[command(name = "leachsim", version, about = "Round-based simulator for LEACH-family WSN routing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol and write a trace CSV per seed.
    Run(RunArgs),
    /// Run several protocols over seeds 1..=N and write aggregate CSVs and a summary.
    Compare(CompareArgs),
    /// Evaluate the closed-form radio energy expressions.
    EnergyCalc(EnergyArgs),
    /// Print the default scenario file.
    Defaults,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (`key = value` lines). Defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Protocol tag, overriding the scenario file.
    #[arg(long)]
    protocol: Option<ProtocolVariant>,
    /// Seed; repeat for several runs. Defaults to the scenario's seed.
    #[arg(long = "seed")]
    seeds: Vec<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated protocol tags; all seven when omitted.
    #[arg(long, value_delimiter = ',')]
    protocols: Vec<ProtocolVariant>,
    /// Number of seeds; runs use seeds 1..=N.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct EnergyArgs {
    /// Take radio constants and packet sizes from this scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Nodes in the network.
    #[arg(long, default_value_t = 100)]
    n: u32,
    /// Clusters.
    #[arg(long, default_value_t = 10)]
    k: u32,
    /// Head to BS distance, meters.
    #[arg(long, default_value_t = 100.0)]
    d_bs: f64,
    /// Member to head distance, meters.
    #[arg(long, default_value_t = 20.0)]
    d_ch: f64,
    /// Head spacing for the two-head chain, meters.
    #[arg(long, default_value_t = 30.0)]
    m: f64,
    /// Print direct and relayed chain costs for spacings 0..=MAX in 1 m steps.
    #[arg(long, value_name = "MAX")]
    sweep: Option<u32>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::EnergyCalc(a) => cmd_energy(a),
        Command::Defaults => {
            print!("{}", format_config(&Default::default()));
            Ok(())
        }
    }
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let mut request = RunRequest {
        config_path: a.config,
        protocol_override: a.protocol,
        seeds: a.seeds,
        output_dir: a.out,
        compare_list: None,
    };
    if request.seeds.is_empty() {
        request.seeds = vec![request.scenario()?.seed];
    }
    let protocol = request.scenario()?.protocol;
    let results = run_single(&request)?;
    println!("protocol,seed,first_node_death,half_nodes_death,last_node_death,total_pkts_to_bs,total_pkts_to_ch");
    for (seed, s) in results {
        println!(
            "{},{},{},{},{},{},{}",
            protocol.tag(),
            seed,
            s.first_node_death,
            s.half_nodes_death,
            s.last_node_death,
            s.total_pkts_to_bs,
            s.total_pkts_to_ch
        );
    }
    Ok(())
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    if a.seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    let request = RunRequest {
        config_path: a.config,
        protocol_override: None,
        seeds: (1..=a.seeds).collect(),
        output_dir: a.out.clone(),
        compare_list: (!a.protocols.is_empty()).then_some(a.protocols),
    };
    let report = run_compare(&request)?;
    println!("{:<16}{:>10}{:>10}{:>10}{:>12}{:>10}", "protocol", "first", "half", "last", "to_bs", "vs_leach");
    for v in &report.variants {
        let r = &v.row;
        println!(
            "{:<16}{:>10}{:>10}{:>10}{:>12}{:>9.1}%",
            r.protocol.tag(),
            r.first_node_death,
            r.half_nodes_death,
            r.last_node_death,
            r.total_pkts_to_bs,
            r.improvement_pct
        );
    }
    println!("wrote {} files to {}", report.files.len(), a.out.display());
    Ok(())
}

fn cmd_energy(a: EnergyArgs) -> Result<()> {
    let (radio, l_c, l_a, l_bs): (RadioParams, f64, f64, f64) = match &a.config {
        Some(p) => {
            let c = load_config(p)?;
            (c.radio, c.packet_bits_data as f64, c.packet_bits_agg as f64, c.packet_bits_bs as f64)
        }
        None => (RadioParams::default(), 200.0, 200.0, 200.0),
    };
    let g = ClusterGeometry { n: a.n, k: a.k, l_c, l_a, l_bs, d_to_bs: a.d_bs, d_to_ch: a.d_ch };
    let line = |name: &str, v: f64| println!("{name:<24}{v:.6e} J");
    line("ch_upward", ch_upward_energy(&radio, &g).context("cluster geometry")?);
    line("member_upward", member_upward_energy(&radio, l_c, a.d_ch)?);
    line("cluster_upward", cluster_upward_energy(&radio, &g)?);
    line("ch_downward", ch_downward_energy(&radio, &g)?);
    line("cluster_downward", cluster_downward_energy(&radio, &g)?);
    line("cluster_total", cluster_total_energy(&radio, &g)?);
    line("network_total", network_total_energy(&radio, &g)?);

    let chain = LinearScenario { m: a.m, l_a, l_b: l_a };
    line("chain_direct", linear_direct_cost(&radio, &chain)?);
    line("chain_multihop", linear_multihop_cost(&radio, &chain)?);
    println!("{:<24}{:.4} m", "breakeven_spacing", multihop_breakeven_m(&radio, l_a, l_a)?);

    if let Some(max) = a.sweep {
        println!("m,direct_j,multihop_j,cheaper");
        for m in 0..=max {
            let s = LinearScenario { m: m as f64, ..chain };
            let (d, h) = (linear_direct_cost(&radio, &s)?, linear_multihop_cost(&radio, &s)?);
            let cheaper = if h < d { "multihop" } else if d < h { "direct" } else { "equal" };
            println!("{m},{d:.8e},{h:.8e},{cheaper}");
        }
    }
    Ok(())
}
