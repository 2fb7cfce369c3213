//! CSV (header row always present) or `{"config": ..., "results": [...]}`.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::args::{Cli, Format};
use crate::error::CliError;

pub fn render<R: Serialize>(cli: &Cli, header: &[&str], rows: &[R]) -> Result<Vec<u8>, CliError> {
    match cli.format {
        Format::Csv => csv_bytes(header, rows),
        Format::Json => {
            #[derive(Serialize)]
            struct Document<'a, R> {
                config: &'a Cli,
                results: &'a [R],
            }
            let mut bytes = serde_json::to_vec_pretty(&Document {
                config: cli,
                results: rows,
            })?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// CSV with an explicit header, so an empty table still has one.
pub fn csv_bytes<R: Serialize>(header: &[&str], rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.into_inner().map_err(|e| CliError::Write(e.to_string()))
}

pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Write(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}
