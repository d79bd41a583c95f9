//! Result tables as CSV and JSON.
//!
//! CSV has one header comment line carrying the resolved configuration,
//! then a column header, then one row per batch:
//!
//! ```text
//! # config: {"games":200,...}
//! label,n,wins,winrate,ci_halfwidth,mean_rounds,wall_time_s
//! 4-2-4,200,151,0.755000,0.059612,11.4200,3.127
//! ```

use std::io::{self, Write};

use serde::Serialize;

use super::RunStats;

pub const CSV_COLUMNS: [&str; 7] = [
    "label",
    "n",
    "wins",
    "winrate",
    "ci_halfwidth",
    "mean_rounds",
    "wall_time_s",
];

pub fn csv_header() -> String {
    CSV_COLUMNS.join(",")
}

pub fn csv_row(label: &str, s: &RunStats) -> String {
    format!(
        "{},{},{},{:.6},{:.6},{:.4},{:.3}",
        label, s.n, s.wins, s.winrate, s.ci_halfwidth, s.mean_rounds, s.wall_time_s
    )
}

pub fn write_csv<W: Write>(
    mut out: W,
    config: &impl Serialize,
    rows: &[(String, RunStats)],
) -> io::Result<()> {
    let meta = serde_json::to_string(config).map_err(io::Error::other)?;
    writeln!(out, "# config: {meta}")?;
    writeln!(out, "{}", csv_header())?;
    for (label, stats) in rows {
        writeln!(out, "{}", csv_row(label, stats))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    label: &'a str,
    #[serde(flatten)]
    stats: &'a RunStats,
}

#[derive(Serialize)]
struct JsonDoc<'a, C: Serialize> {
    config: &'a C,
    rows: Vec<JsonRow<'a>>,
}

pub fn write_json<W: Write>(
    out: W,
    config: &impl Serialize,
    rows: &[(String, RunStats)],
) -> io::Result<()> {
    let doc = JsonDoc {
        config,
        rows: rows
            .iter()
            .map(|(label, stats)| JsonRow { label, stats })
            .collect(),
    };
    serde_json::to_writer_pretty(out, &doc).map_err(io::Error::other)
}
