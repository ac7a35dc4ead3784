//! CSV time series, ledger, run summary and manifest writers.
//!
//! All writers build the full text first; output depends only on the
//! `SimResult`, so reruns of the same config and seed give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::engine::SimResult;
use crate::interface::config::write_config;

pub const LEVELS_HEADER: &str = "tick,bin_id,level,state";
pub const LEDGER_HEADER: &str = "tick,bin_id,citizen_id,units,amount";

pub const LEVELS_FILE: &str = "levels.csv";
pub const LEDGER_FILE: &str = "ledger.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const MANIFEST_FILE: &str = "manifest.txt";

pub fn levels_csv(result: &SimResult) -> String {
    let rows: usize = result.records.iter().map(|r| r.bins.len()).sum();
    let mut out = String::with_capacity(24 * (rows + 1));
    out.push_str(LEVELS_HEADER);
    out.push('\n');
    for record in &result.records {
        for bin in &record.bins {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                record.tick, bin.id, bin.level, bin.state
            );
        }
    }
    out
}

pub fn ledger_csv(result: &SimResult) -> String {
    let mut out = String::from(LEDGER_HEADER);
    out.push('\n');
    for e in &result.ledger {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.tick, e.bin, e.citizen, e.units, e.amount
        );
    }
    out
}

/// `key = value` lines in a fixed order.
pub fn summary(result: &SimResult) -> String {
    let m = &result.metrics;
    let last = result.final_record();
    let net = m.total_revenue as i128 - m.total_trip_cost as i128;
    let fields: [(&str, String); 13] = [
        ("bins", last.bins.len().to_string()),
        ("ticks", last.tick.to_string()),
        ("full_bins_final", last.full_bins_uncollected.to_string()),
        ("units_generated", m.units_generated.to_string()),
        ("total_units_collected", m.total_units_collected.to_string()),
        ("total_units_dumped", m.total_units_dumped.to_string()),
        ("total_revenue", m.total_revenue.to_string()),
        ("total_trip_cost", m.total_trip_cost.to_string()),
        ("net_revenue", net.to_string()),
        ("total_distance", format!("{:.6}", m.total_distance)),
        (
            "mean_collection_delay",
            format!("{:.6}", m.mean_collection_delay),
        ),
        ("max_collection_delay", m.max_collection_delay.to_string()),
        ("trips", m.trips.to_string()),
    ];
    let mut out = String::new();
    for (k, v) in fields {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

/// Reads `key = value` lines, e.g. a summary written by [`summary`].
pub fn parse_summary(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

/// Resolved config plus a `[manifest]` section. Loading it as a config
/// reproduces the run.
pub fn manifest(result: &SimResult, out_dir: &Path) -> String {
    let mut out = write_config(&result.config);
    out.push_str("\n[manifest]\n");
    let _ = writeln!(out, "version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "seed = {}", result.config.seed);
    for (key, file) in [
        ("levels_csv", LEVELS_FILE),
        ("ledger_csv", LEDGER_FILE),
        ("summary", SUMMARY_FILE),
        ("manifest", MANIFEST_FILE),
    ] {
        let _ = writeln!(out, "{key} = {}", out_dir.join(file).display());
    }
    out
}

pub fn export_levels_csv(result: &SimResult, path: impl AsRef<Path>) -> io::Result<()> {
    fs::write(path, levels_csv(result))
}

pub fn export_ledger_csv(result: &SimResult, path: impl AsRef<Path>) -> io::Result<()> {
    fs::write(path, ledger_csv(result))
}

pub fn write_summary(result: &SimResult, path: impl AsRef<Path>) -> io::Result<()> {
    fs::write(path, summary(result))
}

/// Writes all four run artifacts into `dir`, creating it if needed.
pub fn write_all(result: &SimResult, dir: impl AsRef<Path>) -> io::Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    export_levels_csv(result, dir.join(LEVELS_FILE))?;
    export_ledger_csv(result, dir.join(LEDGER_FILE))?;
    write_summary(result, dir.join(SUMMARY_FILE))?;
    fs::write(dir.join(MANIFEST_FILE), manifest(result, dir))
}
