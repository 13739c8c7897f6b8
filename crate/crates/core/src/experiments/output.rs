//! CSV and JSON writers plus the run manifest.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::SuiteConfig;
use super::{Report, Row, Verdict};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Rows as CSV with a header line.
pub fn csv_string(rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record(["experiment", "group", "n", "p_tuple", "parameter", "value", "bound", "tolerance", "pass"])
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn json_string(rows: &[Row]) -> Result<String> {
    serde_json::to_string_pretty(rows).map_err(|e| Error::Io(e.to_string()))
}

/// SHA-256 of the canonical TOML form of the configuration.
pub fn config_hash(cfg: &SuiteConfig) -> Result<String> {
    let digest = Sha256::digest(cfg.to_toml()?.as_bytes());
    Ok(digest.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    }))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub kind: String,
    pub seed: u64,
    pub file: String,
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    pub recorded: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub crate_name: String,
    pub crate_version: String,
    pub base_seed: u64,
    pub total_seconds: f64,
    pub experiments: Vec<ManifestEntry>,
}

/// Writes one table per experiment and `manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, cfg: &SuiteConfig, reports: &[Report], format: OutputFormat) -> Result<Manifest> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut entries = Vec::new();
    for r in reports {
        let (file, body) = match format {
            OutputFormat::Csv => (format!("{}.csv", r.id), csv_string(&r.rows)?),
            OutputFormat::Json => (format!("{}.json", r.id), json_string(&r.rows)?),
        };
        let path = dir.join(&file);
        std::fs::write(&path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let count = |v: Verdict| r.rows.iter().filter(|row| row.pass == v).count();
        entries.push(ManifestEntry {
            id: r.id.clone(),
            kind: r.kind.clone(),
            seed: r.seed,
            file,
            rows: r.rows.len(),
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            recorded: count(Verdict::Record),
            seconds: r.seconds,
        });
    }
    let manifest = Manifest {
        config_hash: config_hash(cfg)?,
        crate_name: env!("CARGO_PKG_NAME").into(),
        crate_version: env!("CARGO_PKG_VERSION").into(),
        base_seed: cfg.seed,
        total_seconds: reports.iter().map(|r| r.seconds).sum(),
        experiments: entries,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
    let path = dir.join("manifest.json");
    std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(manifest)
}
