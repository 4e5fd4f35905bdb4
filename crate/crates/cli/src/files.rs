//! JSON and JSON Lines file handling.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::Path;

use anyhow::{Context, Result};
use apf_core::simulator::{read_trace, write_trace};
use apf_core::{Configuration, RoundRecord, TargetPattern};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn save<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn load_config(path: &Path) -> Result<Configuration> {
    load(path)
}

pub fn load_pattern(path: &Path) -> Result<TargetPattern> {
    load(path)
}

pub fn save_trace(path: &Path, records: &[RoundRecord]) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_trace(BufWriter::new(f), records).with_context(|| format!("writing {}", path.display()))
}

pub fn load_trace(path: &Path) -> Result<Vec<RoundRecord>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_trace(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}
