//! Experiment reports: deterministic CSV plus a JSON summary.
//!
//! CSV bytes are a pure function of (config, seed): floats are printed with
//! Rust's shortest round-trip formatting and all parallel reductions happen
//! in fixed index order upstream. Wall-clock time lives only in the JSON
//! summary so reruns stay byte-identical on the CSV side.

use crate::Result;
use serde_json::Value;
use std::io::Write;
use std::path::Path;

/// Outcome of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    /// Canonical JSON echo of the effective config.
    pub config_echo: String,
    /// Full CSV payload (header + rows, trailing newline).
    pub csv: String,
    /// Summary statistics, pass/fail flags, wall clock, version, seed.
    pub summary: Value,
    /// All hard assertions passed.
    pub pass: bool,
}

/// Shortest round-trip float formatting shared by every CSV writer.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Join fields into one CSV record.
pub fn csv_row<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = String::new();
    for (i, f) in fields.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(f.as_ref());
    }
    out.push('\n');
    out
}

impl ExperimentReport {
    /// Write the CSV to `output` (or stdout) and the summary JSON next to
    /// it (or to stderr).
    pub fn write_outputs(&self, output: Option<&Path>) -> Result<()> {
        match output {
            Some(path) => {
                std::fs::write(path, self.csv.as_bytes())?;
                let mut summary_path = path.as_os_str().to_owned();
                summary_path.push(".summary.json");
                std::fs::write(
                    &summary_path,
                    serde_json::to_string_pretty(&self.summary)?,
                )?;
            }
            None => {
                let stdout = std::io::stdout();
                stdout.lock().write_all(self.csv.as_bytes())?;
                eprintln!("{}", serde_json::to_string(&self.summary)?);
            }
        }
        Ok(())
    }
}
