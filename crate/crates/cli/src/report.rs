//! Integrity check and summary of a finished run directory.

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::manifest::{sha256_hex, RunManifest, MANIFEST_FILE};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FileStatus {
    Ok,
    Missing,
    DigestMismatch { expected: String, actual: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct FileReport {
    pub path: String,
    pub status: FileStatus,
    /// Data rows (header excluded) for CSV outputs.
    pub rows: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: String,
    pub instances: usize,
    pub tasks: usize,
    pub files: Vec<FileReport>,
    /// Problems found: digest mismatches, missing files, row count errors.
    pub problems: Vec<String>,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.problems.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "experiment: {}", self.experiment)?;
        writeln!(f, "instances:  {}", self.instances)?;
        writeln!(f, "tasks:      {}", self.tasks)?;
        let w = self.files.iter().map(|x| x.path.len()).max().unwrap_or(4).max(4);
        writeln!(f, "{:<w$}  {:>8}  status", "file", "rows")?;
        for x in &self.files {
            let rows = x.rows.map_or("-".to_string(), |r| r.to_string());
            let status = match &x.status {
                FileStatus::Ok => "ok",
                FileStatus::Missing => "MISSING",
                FileStatus::DigestMismatch { .. } => "DIGEST MISMATCH",
            };
            writeln!(f, "{:<w$}  {rows:>8}  {status}", x.path)?;
        }
        if self.problems.is_empty() {
            write!(f, "integrity: ok")
        } else {
            writeln!(f, "integrity: {} problem(s)", self.problems.len())?;
            for p in &self.problems {
                writeln!(f, "  {p}")?;
            }
            Ok(())
        }
    }
}

fn csv_rows(bytes: &[u8]) -> Option<usize> {
    let mut r = csv::Reader::from_reader(bytes);
    let mut n = 0;
    for rec in r.records() {
        rec.ok()?;
        n += 1;
    }
    Some(n)
}

/// Reads the manifest in `dir`, recomputes every output digest, checks row
/// counts where the config fixes them, and writes `summary.json`.
///
/// A missing or unreadable manifest is an error; content problems are
/// listed in the returned report.
pub fn emit_report(dir: &Path) -> Result<Report> {
    let mpath = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&mpath)
        .map_err(|e| CliError::Integrity(format!("cannot read {}: {e}", mpath.display())))?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .map_err(|e| CliError::Integrity(format!("corrupt manifest {}: {e}", mpath.display())))?;

    let mut files = Vec::new();
    let mut problems = Vec::new();
    for (path, expected) in &manifest.outputs {
        let full = dir.join(path);
        let (status, rows) = match std::fs::read(&full) {
            Err(_) => (FileStatus::Missing, None),
            Ok(bytes) => {
                let actual = sha256_hex(&bytes);
                let rows = path.ends_with(".csv").then(|| csv_rows(&bytes)).flatten();
                if &actual == expected {
                    (FileStatus::Ok, rows)
                } else {
                    (
                        FileStatus::DigestMismatch {
                            expected: expected.clone(),
                            actual,
                        },
                        rows,
                    )
                }
            }
        };
        match &status {
            FileStatus::Ok => {}
            FileStatus::Missing => problems.push(format!("{path}: missing")),
            FileStatus::DigestMismatch { .. } => problems.push(format!("{path}: digest mismatch")),
        }
        files.push(FileReport {
            path: path.clone(),
            status,
            rows,
        });
    }

    let rows: BTreeMap<&str, Option<usize>> = files.iter().map(|f| (f.path.as_str(), f.rows)).collect();
    if manifest.experiment == Experiment::Ksat.name() {
        let expected = serde_json::from_value::<ExperimentConfig>(manifest.config.clone())
            .ok()
            .and_then(|c| c.ksat)
            .map(|k| k.densities.values().len());
        match (expected, rows.get("sat_curve.csv").copied().flatten()) {
            (Some(e), Some(r)) if e != r => {
                problems.push(format!("sat_curve.csv: {r} rows, density grid has {e} points"))
            }
            (None, _) => problems.push("manifest config has no readable ksat section".into()),
            (_, None) => problems.push("sat_curve.csv: missing or unreadable".into()),
            _ => {}
        }
    }

    let report = Report {
        experiment: manifest.experiment,
        instances: manifest.instances.len(),
        tasks: manifest.tasks.len(),
        files,
        problems,
    };
    let mut bytes = serde_json::to_vec_pretty(&report).expect("report serializes");
    bytes.push(b'\n');
    std::fs::write(dir.join(SUMMARY_FILE), bytes).map_err(CliError::io("writing summary"))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_csv_rows() {
        assert_eq!(csv_rows(b"a,b\n1,2\n3,4\n"), Some(2));
        assert_eq!(csv_rows(b"a,b\n"), Some(0));
        assert_eq!(csv_rows(b"a,b\n1,2,3\n"), None);
    }

    #[test]
    fn missing_manifest_is_integrity_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(emit_report(dir.path()), Err(CliError::Integrity(_))));
        std::fs::write(dir.path().join(MANIFEST_FILE), "{not json").unwrap();
        assert!(matches!(emit_report(dir.path()), Err(CliError::Integrity(_))));
    }
}
