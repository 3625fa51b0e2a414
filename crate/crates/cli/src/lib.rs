//! Command-line front end: scenario runner, report comparison, feed replay
//! and scenario linting over the simulation core.

use std::ffi::OsString;
use std::net::UdpSocket;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use tagnet_core::wire::StatusMsg;
use tagnet_core::{Policy, Simulation};

pub mod compare;
pub mod error;
pub mod replay;
pub mod report;
pub mod scenario;
pub mod udp;

#[cfg(test)]
mod testutil;

use compare::Format;
use error::CliError;
use report::ReportDoc;
use scenario::load_scenario;

#[derive(Parser)]
#[command(
    name = "tagnet",
    version,
    about = "Deterministic bandwidth-allocation simulator driven by tag telemetry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Markdown => Format::Markdown,
            FormatArg::Json => Format::Json,
        }
    }
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse().map_err(|e: tagnet_core::DomainError| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario under one policy and write a JSON report.
    Run {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// Allocation policy: rfid or baseline4g.
        #[arg(long, value_parser = parse_policy, default_value = "rfid")]
        policy: Policy,
        /// Override the scenario's RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write the report.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare two reports and print absolute metrics with deltas.
    Compare {
        /// Report A (deltas are oriented so positive favors A).
        report_a: PathBuf,
        /// Report B, the reference side.
        report_b: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
        format: FormatArg,
        /// Append the published literature comparison rows.
        #[arg(long)]
        with_literature: bool,
    },
    /// Drive a scenario from a recorded feed file or a udp:// endpoint.
    Replay {
        /// Feed file path, or udp://HOST:PORT to serve a live endpoint.
        feed: String,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_policy, default_value = "rfid")]
        policy: Policy,
        /// Endpoint mode: quiet period that ends the feed, in milliseconds.
        #[arg(long, default_value_t = 1000)]
        idle_timeout_ms: u64,
    },
    /// Parse and validate a scenario file.
    Validate { scenario: PathBuf },
}

/// Parses arguments and executes; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Run { scenario, policy, seed, out } => cmd_run(&scenario, policy, seed, &out),
        Command::Compare { report_a, report_b, format, with_literature } => {
            cmd_compare(&report_a, &report_b, format.into(), with_literature)
        }
        Command::Replay { feed, scenario, out, policy, idle_timeout_ms } => {
            cmd_replay(&feed, &scenario, &out, policy, idle_timeout_ms)
        }
        Command::Validate { scenario } => cmd_validate(&scenario),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn cmd_run(
    scenario_path: &std::path::Path,
    policy: Policy,
    seed: Option<u64>,
    out: &std::path::Path,
) -> Result<(), CliError> {
    let mut scenario = load_scenario(scenario_path)?;
    if let Some(seed) = seed {
        scenario.sim.seed = seed;
    }
    let outcome = Simulation::new(&scenario, policy)?.run()?;
    let last_delta = outcome.stats.last_delta;
    let doc = ReportDoc::from_report(outcome.report);
    doc.save(out)?;
    println!("policy: {}", doc.policy.as_str());
    println!("seed: {}", doc.seed);
    println!("scenario digest: {}", doc.scenario_digest);
    println!("spectrum utilization: {:.4}", doc.spectrum_utilization);
    println!("mean latency: {:.3} ms", doc.mean_latency_ms);
    println!("throughput: {:.3e} bps", doc.throughput_bps);
    println!("energy: {:.3} J", doc.energy_joules);
    println!("delivered packets: {}", doc.delivered_packets);
    if let Some(d) = last_delta {
        for line in StatusMsg::from_delta(&d).display_lines() {
            println!("{line}");
        }
    }
    println!("report written to {}", out.display());
    Ok(())
}

pub fn cmd_compare(
    report_a: &std::path::Path,
    report_b: &std::path::Path,
    format: Format,
    with_literature: bool,
) -> Result<(), CliError> {
    let a = ReportDoc::load(report_a)?;
    let b = ReportDoc::load(report_b)?;
    if a.scenario_digest != b.scenario_digest {
        eprintln!(
            "warning: reports come from different scenarios ({} vs {})",
            a.scenario_digest, b.scenario_digest
        );
    }
    print!("{}", compare::render(&a, &b, format, with_literature));
    Ok(())
}

pub fn cmd_replay(
    feed: &str,
    scenario_path: &std::path::Path,
    out: &std::path::Path,
    policy: Policy,
    idle_timeout_ms: u64,
) -> Result<(), CliError> {
    let scenario = load_scenario(scenario_path)?;
    if let Some(bind) = feed.strip_prefix("udp://") {
        let socket =
            UdpSocket::bind(bind).map_err(|e| CliError::Io(format!("bind {bind}: {e}")))?;
        if let Ok(addr) = socket.local_addr() {
            eprintln!("listening on udp://{addr}");
        }
        let outcome =
            udp::serve(&socket, &scenario, policy, Duration::from_millis(idle_timeout_ms))?;
        ReportDoc::from_report(outcome.report).save(out)
    } else {
        replay::replay_file(std::path::Path::new(feed), &scenario, policy, out)
    }
}

pub fn cmd_validate(scenario_path: &std::path::Path) -> Result<(), CliError> {
    let scenario = load_scenario(scenario_path)?;
    println!(
        "ok: {} ({} nodes, {} ticks, digest {})",
        scenario_path.display(),
        scenario.total_nodes(),
        scenario.sim.duration_ticks,
        scenario.digest()
    );
    Ok(())
}
