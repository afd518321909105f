//! Artifact writing: CSV tables, JSON documents and their run manifests.
//!
//! A file `out.json` written with a manifest gets a sidecar
//! `out.json.manifest.json`, and JSON artifacts also name it in a
//! `"manifest"` field. Timing lives only in the sidecar, so repeated runs
//! with the same seed produce byte-identical artifacts.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Formats with 9 significant digits, fixed-point for moderate magnitudes
/// and scientific otherwise.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 {
            "0".to_string()
        } else {
            x.to_string()
        };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.8e}")
    }
}

/// Header plus rows of numbers rendered by [`sig9`].
#[derive(Clone, Debug, PartialEq)]
pub struct NumericTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl NumericTable {
    pub fn new(header: &[&str]) -> NumericTable {
        NumericTable {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let ser = |e: csv::Error| CliError::Parse(format!("csv: {e}"));
        w.write_record(&self.header).map_err(ser)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| sig9(*x))).map_err(ser)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Parse(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Provenance of one command invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tool_version: String,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, seed: Option<u64>) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds: 0.0,
            outputs: Vec::new(),
        }
    }
}

pub fn manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| CliError::io(path.display().to_string(), e))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Destination of a command's main artifact.
#[derive(Debug)]
pub struct Sink {
    path: Option<PathBuf>,
    manifest: RunManifest,
}

impl Sink {
    pub fn new(path: Option<PathBuf>, manifest: RunManifest) -> Sink {
        Sink { path, manifest }
    }

    /// Writes a JSON artifact. With a file destination the document gains a
    /// `"manifest"` field and the sidecar is written next to it.
    pub fn json<T: Serialize>(&mut self, value: &T, elapsed: f64) -> Result<(), CliError> {
        let mut doc = serde_json::to_value(value).expect("report types serialize");
        match self.path.clone() {
            None => {
                print!("{}", to_json(&doc));
                Ok(())
            }
            Some(path) => {
                if let Value::Object(map) = &mut doc {
                    let name = manifest_path(&path);
                    let name = name.file_name().expect("file path").to_string_lossy();
                    map.insert("manifest".into(), Value::String(name.into_owned()));
                }
                write_file(&path, &to_json(&doc))?;
                self.finish(&path, elapsed)
            }
        }
    }

    pub fn csv(&mut self, table: &NumericTable, elapsed: f64) -> Result<(), CliError> {
        let text = table.to_csv()?;
        match self.path.clone() {
            None => {
                print!("{text}");
                Ok(())
            }
            Some(path) => {
                write_file(&path, &text)?;
                self.finish(&path, elapsed)
            }
        }
    }

    fn finish(&mut self, path: &Path, elapsed: f64) -> Result<(), CliError> {
        self.manifest.wall_time_seconds = elapsed;
        self.manifest.outputs = vec![path.display().to_string()];
        write_file(&manifest_path(path), &to_json(&self.manifest))
    }
}

/// Reads and deserializes a JSON file; any failure is a parse error.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig9(2.0 * std::f64::consts::SQRT_2), "2.82842712");
        assert_eq!(sig9(12.866188), "12.8661880");
        assert_eq!(sig9(1e6), "1000000.00");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.5e-7), "1.50000000e-7");
        assert_eq!(sig9(-0.5), "-0.500000000");
    }

    #[test]
    fn csv_layout() {
        let mut t = NumericTable::new(&["r", "lambda_max"]);
        t.push(vec![0.0, 2.0 * std::f64::consts::SQRT_2]);
        assert_eq!(t.to_csv().unwrap(), "r,lambda_max\n0,2.82842712\n");
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            manifest_path(Path::new("/tmp/x.csv")),
            PathBuf::from("/tmp/x.csv.manifest.json")
        );
    }
}
