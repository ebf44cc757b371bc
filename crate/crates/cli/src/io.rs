//! File helpers: JSONL reading and writing with line-numbered errors.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))
}

/// One record per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let mut out = Vec::new();
    for (n, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|e| CliError::Input(format!("{} line {}: {e}", path.display(), n + 1)))?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> CliResult<()> {
    let file = File::create(path)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).map_err(CliError::internal)?;
        writeln!(w, "{line}").map_err(CliError::internal)?;
    }
    w.flush().map_err(CliError::internal)
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

pub fn ensure_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path)
        .map_err(|e| CliError::Internal(format!("cannot create directory {}: {e}", path.display())))
}
