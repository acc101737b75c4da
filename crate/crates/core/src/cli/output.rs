//! File output for the command-line front end.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;

/// Formats a value for a column header: shortest round-trip form with at least one decimal.
pub(crate) fn header_value(v: f64) -> String {
    let rounded = (v * 1e12).round() / 1e12;
    let s = format!("{rounded}");
    if s.contains(['.', 'e', 'E']) || !rounded.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

/// Collects output files of one run and writes the manifest last.
pub(crate) struct OutputDir {
    dir: PathBuf,
    outputs: Vec<String>,
}

impl OutputDir {
    pub(crate) fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.outputs.push(p.display().to_string());
        p
    }

    /// Writes `t,u,<columns...>`; every column must have one value per row of `t`.
    pub(crate) fn write_columns(
        &mut self,
        name: &str,
        t: &[f64],
        u: &[f64],
        columns: &[(String, Vec<f64>)],
    ) -> Result<(), CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::io(&path, e))?;
        let mut header = vec!["t".to_string(), "u".to_string()];
        header.extend(columns.iter().map(|(h, _)| h.clone()));
        w.write_record(&header)
            .map_err(|e| CliError::io(&path, e))?;
        for i in 0..t.len() {
            let mut row = vec![t[i].to_string(), u[i].to_string()];
            row.extend(columns.iter().map(|(_, c)| c[i].to_string()));
            w.write_record(&row).map_err(|e| CliError::io(&path, e))?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(())
    }

    pub(crate) fn write_json<T: Serialize>(
        &mut self,
        name: &str,
        value: &T,
    ) -> Result<(), CliError> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(&path, e))?;
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
    }

    /// Writes `manifest.json` listing every earlier output.
    pub(crate) fn finish<P: Serialize>(
        self,
        command: &str,
        parameters: &P,
    ) -> Result<(), CliError> {
        let parameters = match serde_json::to_value(parameters) {
            Ok(serde_json::Value::Object(map)) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        let manifest = RunManifest {
            command: command.to_string(),
            parameters,
            outputs: self.outputs,
            version: format!("subfrac {}", env!("CARGO_PKG_VERSION")),
            timestamp: chrono::Utc::now().to_rfc3339(),
        };
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::io(&path, e))?;
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
    }
}

#[derive(Debug, Serialize)]
struct RunManifest {
    command: String,
    parameters: BTreeMap<String, serde_json::Value>,
    outputs: Vec<String>,
    version: String,
    timestamp: String,
}

/// Reads a `t,value` CSV.
pub(crate) fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    let headers = rdr.headers().map_err(|e| CliError::io(path, e))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (ti, vi) = match (col("t"), col("value")) {
        (Some(t), Some(v)) => (t, v),
        _ => {
            return Err(CliError::Invalid(format!(
                "{} must have a header with columns t and value",
                path.display()
            )))
        }
    };
    let mut t = Vec::new();
    let mut v = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::io(path, e))?;
        let parse = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::Invalid(format!(
                        "{}: bad number on data row {}",
                        path.display(),
                        line + 1
                    ))
                })
        };
        t.push(parse(ti)?);
        v.push(parse(vi)?);
    }
    Ok((t, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_values() {
        assert_eq!(header_value(0.7), "0.7");
        assert_eq!(header_value(1.0), "1.0");
        assert_eq!(header_value(0.7 + 3.0 * 0.1), "1.0");
        assert_eq!(header_value(0.8000000000000002), "0.8");
        assert_eq!(header_value(5.0), "5.0");
    }
}
