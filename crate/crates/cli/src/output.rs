//! Report envelopes and their JSON / CSV rendering.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::{CliResult, Failure};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Every report carries the tool version, the parsed command line and the seed.
#[derive(Serialize)]
pub struct Envelope {
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub result: Value,
}

impl Envelope {
    pub fn new(command: &'static str, config: Value, seed: Option<u64>, threads: Option<usize>, result: Value) -> Self {
        Envelope { version: env!("CARGO_PKG_VERSION"), command, config, seed, threads, result }
    }
}

pub fn emit(envelope: &Envelope, format: OutputFormat, table: Option<&str>, path: Option<&Path>) -> CliResult<()> {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, envelope).map_err(io_failure)?;
            writeln!(sink)?;
        }
        OutputFormat::Csv => write_csv(&mut sink, envelope, table)?,
    }
    sink.flush()?;
    Ok(())
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure { code: 3, message: e.to_string() }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Header comment lines, then one row per element of `result[table]`, or a
/// single row of the result's fields when there is no table.
fn write_csv(sink: &mut dyn Write, envelope: &Envelope, table: Option<&str>) -> CliResult<()> {
    writeln!(sink, "# prg {} {}", envelope.version, envelope.command)?;
    writeln!(sink, "# seed={}", envelope.seed.map(|s| s.to_string()).unwrap_or_default())?;
    writeln!(sink, "# config={}", envelope.config)?;
    let rows: Vec<Map<String, Value>> = match table.and_then(|t| envelope.result.get(t)).and_then(Value::as_array) {
        Some(items) => items
            .iter()
            .map(|item| match item {
                Value::Object(m) => m.clone(),
                other => Map::from_iter([("value".to_string(), other.clone())]),
            })
            .collect(),
        None => match &envelope.result {
            Value::Object(m) => vec![m.clone()],
            other => vec![Map::from_iter([("value".to_string(), other.clone())])],
        },
    };
    let mut w = csv::Writer::from_writer(sink);
    if let Some(first) = rows.first() {
        let header: Vec<&String> = first.keys().collect();
        w.write_record(&header).map_err(io_failure)?;
        for row in &rows {
            w.write_record(header.iter().map(|k| row.get(*k).map(cell).unwrap_or_default())).map_err(io_failure)?;
        }
    }
    w.flush()?;
    Ok(())
}
