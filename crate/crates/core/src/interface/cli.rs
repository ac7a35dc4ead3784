//! `binsim` command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::engine::{run, SimConfig};
use crate::interface::config::{load_config, parse_graph, ConfigError, SCHEMA};
use crate::interface::export::{write_all, LEDGER_FILE, LEVELS_FILE, MANIFEST_FILE, SUMMARY_FILE};
use crate::routing::{plan_tour, PickupRequest, StopAction};

pub const SEED_ENV: &str = "BINSIM_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "binsim",
    version,
    about = "Smart waste bin collection simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a simulation and write levels.csv, ledger.csv, summary.txt and manifest.txt.
    Run {
        /// Config file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config seed and BINSIM_SEED.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        ticks: Option<u64>,
        #[arg(long, default_value = "binsim-out")]
        out: PathBuf,
    },
    /// Plan a single collection tour over a graph file.
    Plan {
        #[arg(long)]
        graph: PathBuf,
        /// Label of the truck's starting vertex.
        #[arg(long)]
        start: String,
        /// Comma-separated labels of full bins; bin ids follow list order.
        #[arg(long, value_delimiter = ',', required = true)]
        bins: Vec<String>,
        #[arg(long)]
        dump: String,
        /// Truck capacity in waste units.
        #[arg(long)]
        capacity: u32,
        /// Load of every listed bin.
        #[arg(long, default_value_t = 25)]
        load: u32,
    },
    /// Check a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Runs the CLI with explicit arguments and environment seed, writing to the
/// given streams. Returns the process exit code.
pub fn run_cli<I, T>(
    args: I,
    env_seed: Option<String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}\n{SCHEMA}");
            return EXIT_USAGE;
        }
    };
    match execute(cli.command, env_seed, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\n{SCHEMA}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_RUNTIME
        }
    }
}

/// Seed precedence: CLI flag, then environment, then config file.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, file: u64) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match env {
        Some(raw) => raw
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV}=`{raw}` is not a u64")),
        None => Ok(file),
    }
}

fn execute(command: Command, env_seed: Option<String>, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Run {
            config,
            seed,
            ticks,
            out: dir,
        } => {
            let mut config = match config {
                Some(path) => load_config(path)?,
                None => SimConfig::default(),
            };
            config.seed =
                resolve_seed(seed, env_seed.as_deref(), config.seed).map_err(Failure::Usage)?;
            if let Some(t) = ticks {
                config.ticks = t;
            }
            let result = run(config).map_err(|e| Failure::Runtime(e.to_string()))?;
            write_all(&result, &dir)
                .map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
            let m = &result.metrics;
            let _ = writeln!(
                out,
                "ran {} ticks (seed {}): collected {} units, revenue {} UC, {} full bins left",
                result.final_record().tick,
                result.config.seed,
                m.total_units_collected,
                m.total_revenue,
                result.final_record().full_bins_uncollected
            );
            for file in [LEVELS_FILE, LEDGER_FILE, SUMMARY_FILE, MANIFEST_FILE] {
                let _ = writeln!(out, "wrote {}", dir.join(file).display());
            }
            Ok(())
        }
        Command::Plan {
            graph,
            start,
            bins,
            dump,
            capacity,
            load,
        } => {
            let text = fs::read_to_string(&graph)
                .map_err(|e| Failure::Usage(format!("{}: {e}", graph.display())))?;
            let graph = parse_graph(&text)?;
            let find = |label: &str| {
                graph
                    .find_label(label)
                    .ok_or_else(|| Failure::Usage(format!("no vertex labelled `{label}`")))
            };
            let start_v = find(&start)?;
            let dump_v = find(&dump)?;
            let requests = bins
                .iter()
                .enumerate()
                .map(|(bin, label)| {
                    Ok(PickupRequest {
                        bin,
                        vertex: find(label)?,
                        load,
                    })
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let route = plan_tour(&graph, start_v, &requests, dump_v, capacity, 0)
                .map_err(|e| Failure::Runtime(e.to_string()))?;
            let label = |v: usize| graph.vertices()[v].label.as_str();
            let pickups: Vec<&str> = route
                .planned_pickups
                .iter()
                .map(|&b| bins[b].as_str())
                .collect();
            let stops: Vec<String> = route
                .stops
                .iter()
                .map(|s| {
                    let action = match s.action {
                        StopAction::Start => "start",
                        StopAction::Pickup { .. } => "pickup",
                        StopAction::Dump => "dump",
                    };
                    format!("{}({action})", label(s.vertex))
                })
                .collect();
            let _ = writeln!(out, "pickups: {}", pickups.join(" "));
            let _ = writeln!(out, "stops: {}", stops.join(" "));
            let _ = writeln!(out, "total_distance = {:.6}", route.total_distance);
            Ok(())
        }
        Command::Validate { config } => {
            let config = load_config(config)?;
            let _ = writeln!(
                out,
                "ok: {} bins, {} trucks, {} ticks, seed {}",
                config.world.bin_count, config.truck_count, config.ticks, config.seed
            );
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(1), Some("2"), 3), Ok(1));
        assert_eq!(resolve_seed(None, Some("2"), 3), Ok(2));
        assert_eq!(resolve_seed(None, None, 3), Ok(3));
        assert!(resolve_seed(None, Some("x"), 3).is_err());
    }
}
