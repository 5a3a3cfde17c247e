//! The output envelope shared by every subcommand.
//!
//! JSON output is one document: tool, version, the full run configuration,
//! the overall verdict, warnings and the command result. CSV output starts
//! with a `#` line carrying the same metadata as compact JSON, followed by
//! the header row and one row per record.

use std::fs::File;
use std::io::{self, Write};

use serde::Serialize;

use crate::{Command, Common, Format};

pub const TOOL: &str = "heavytail";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct RunConfig<'a> {
    #[serde(flatten)]
    pub command: &'a Command,
    pub seed: u64,
    pub jobs: usize,
    pub tol: Option<f64>,
    pub format: Format,
}

impl<'a> RunConfig<'a> {
    pub fn new(command: &'a Command, common: &Common) -> Self {
        RunConfig {
            command,
            seed: common.seed,
            jobs: common.jobs.unwrap_or(1),
            tol: common.tol,
            format: common.format,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig<'a>,
    passed: bool,
    warnings: &'a [String],
    result: &'a R,
}

#[derive(Serialize)]
struct Preamble<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig<'a>,
    passed: bool,
    warnings: &'a [String],
}

/// Rows for CSV output; every cell is already formatted.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub struct Emission<'a, R: Serialize> {
    pub config: &'a RunConfig<'a>,
    pub result: &'a R,
    pub table: Table,
    pub passed: bool,
    pub warnings: Vec<String>,
}

impl<R: Serialize> Emission<'_, R> {
    pub fn render(&self) -> io::Result<Vec<u8>> {
        let mut buf = Vec::new();
        match self.config.format {
            Format::Json => {
                let env = Envelope {
                    tool: TOOL,
                    version: VERSION,
                    config: self.config,
                    passed: self.passed,
                    warnings: &self.warnings,
                    result: self.result,
                };
                serde_json::to_writer_pretty(&mut buf, &env)?;
                buf.push(b'\n');
            }
            Format::Csv => {
                let pre = Preamble {
                    tool: TOOL,
                    version: VERSION,
                    config: self.config,
                    passed: self.passed,
                    warnings: &self.warnings,
                };
                buf.extend_from_slice(b"# ");
                serde_json::to_writer(&mut buf, &pre)?;
                buf.push(b'\n');
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(&self.table.header)?;
                for row in &self.table.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
        }
        Ok(buf)
    }

    pub fn write(&self, common: &Common) -> io::Result<()> {
        let bytes = self.render()?;
        match &common.out {
            Some(path) => File::create(path)?.write_all(&bytes),
            None => {
                let mut out = io::stdout().lock();
                out.write_all(&bytes)?;
                out.flush()
            }
        }
    }
}

/// Shortest round-trip decimal; `NaN` and infinities spelled out.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn vector(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ")
}
