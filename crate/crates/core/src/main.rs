//! Command-line front end for the simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sentinet::attacks::{taxonomy_of, AttackKind};
use sentinet::{run_scenario, RunOptions, Scenario};

#[derive(Parser)]
#[command(
    name = "sentinet",
    version,
    about = "Discrete-event simulation of DoS attacks and agent-based network defense"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario and write its report and event log.
    Run {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// Seed override; defaults to the scenario's seed, then 42.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for the report and log; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report format.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Parse and cross-check a scenario without running it.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Print the supported attack kinds and their classification.
    ListAttacks,
}

/// Scenario problems exit 1, everything else unexpected exits 2.
enum CliError {
    Scenario(String),
    Internal(String),
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Run {
            scenario,
            seed,
            out,
            format,
        } => {
            let sc = Scenario::load(&scenario).map_err(|e| CliError::Scenario(e.to_string()))?;
            let output = std::panic::catch_unwind(|| {
                run_scenario(
                    &sc,
                    &RunOptions {
                        seed,
                        strip_tags: false,
                    },
                )
            })
            .map_err(|_| CliError::Internal("simulation panicked".to_string()))?;
            let (report_text, ext) = match format {
                Format::Csv => (output.report.to_csv(), "csv"),
                Format::Json => (output.report.to_json() + "\n", "json"),
            };
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)
                        .map_err(|e| CliError::Internal(e.to_string()))?;
                    let base = format!("{}-{}", sc.name, output.report.seed);
                    let report_path = dir.join(format!("{base}.{ext}"));
                    let log_path = dir.join(format!("{base}.log"));
                    std::fs::write(&report_path, report_text)
                        .map_err(|e| CliError::Internal(e.to_string()))?;
                    std::fs::write(&log_path, output.log.render())
                        .map_err(|e| CliError::Internal(e.to_string()))?;
                    println!(
                        "wrote {} and {} (injected={} delivered={} hash={})",
                        report_path.display(),
                        log_path.display(),
                        output.stats.injected,
                        output.stats.delivered,
                        &output.report.log_hash[..16],
                    );
                }
                None => print!("{report_text}"),
            }
            Ok(())
        }
        Cmd::Validate { scenario } => {
            let sc = Scenario::load(&scenario).map_err(|e| CliError::Scenario(e.to_string()))?;
            println!(
                "scenario OK: {} (nodes={} links={} senders={} attacks={} agents={})",
                sc.name,
                sc.topology.nodes.len(),
                sc.topology.links.len(),
                sc.senders.len(),
                sc.attacks.len(),
                sc.ns.len() + sc.hs.len() + sc.dra.len(),
            );
            Ok(())
        }
        Cmd::ListAttacks => {
            for kind in AttackKind::ALL {
                let t = taxonomy_of(kind);
                println!(
                    "{kind}: dispersion={} target={} scheme={} impact={}",
                    t.dispersion, t.target, t.scheme, t.impact
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Scenario(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
