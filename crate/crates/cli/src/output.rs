use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use bip_ramsey_core::experiments::{ExperimentRow, CSV_COLUMNS, CSV_SCHEMA_VERSION};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// What a command hands back for emission.
pub struct Report {
    pub command: &'static str,
    pub json: serde_json::Value,
    pub rows: Vec<ExperimentRow>,
    /// Verdict: false maps to exit code 1.
    pub pass: bool,
}

impl Report {
    pub fn new<T: Serialize>(command: &'static str, body: &T, rows: Vec<ExperimentRow>, pass: bool) -> Self {
        Report {
            command,
            json: serde_json::to_value(body).expect("reports serialize"),
            rows,
            pass,
        }
    }
}

pub struct Emit<'a> {
    pub format: Format,
    pub out: Option<&'a Path>,
    pub timestamp: bool,
    pub seed: u64,
}

fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl Emit<'_> {
    pub fn write(&self, report: Report) -> io::Result<()> {
        let mut sink: Box<dyn Write> = match self.out {
            Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        };
        match self.format {
            Format::Json => {
                let mut doc = serde_json::json!({
                    "schema_version": CSV_SCHEMA_VERSION,
                    "command": report.command,
                    "seed": self.seed,
                    "pass": report.pass,
                    "report": report.json,
                });
                if self.timestamp {
                    doc["generated_at"] = unix_time().into();
                }
                serde_json::to_writer_pretty(&mut sink, &doc)?;
                writeln!(sink)?;
            }
            Format::Csv => {
                // Comment lines are skipped by gnuplot and most CSV readers.
                writeln!(sink, "# bip-ramsey-lab csv v{CSV_SCHEMA_VERSION} command={} seed={}", report.command, self.seed)?;
                if self.timestamp {
                    writeln!(sink, "# generated_at={}", unix_time())?;
                }
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut sink);
                w.write_record(CSV_COLUMNS)?;
                for row in report.rows {
                    let row = if self.timestamp { row } else { row.without_timing() };
                    w.serialize(row).map_err(io::Error::other)?;
                }
                w.flush()?;
            }
        }
        sink.flush()
    }
}
