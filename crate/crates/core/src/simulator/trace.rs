//! JSON Lines trace files: one [`RoundRecord`] per line.

use std::io::{BufRead, Write};

use thiserror::Error;

use super::RoundRecord;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_trace<W: Write>(mut out: W, records: &[RoundRecord]) -> Result<(), TraceError> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::other)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Parse a trace; blank lines are skipped, anything else malformed names its line.
pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<RoundRecord>, TraceError> {
    let mut records = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line).map_err(|e| TraceError::Parse { line: k + 1, message: e.to_string() })?;
        records.push(r);
    }
    Ok(records)
}
