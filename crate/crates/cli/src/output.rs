//! Files written by a command: CSV tables (header row, LF endings, shortest
//! round-trip floats) and plain-text reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::output(dir, e))?;
        Ok(Outputs { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let path = self.dir.join(name);
        let fail = |e: csv::Error| CliError::output(&path, e);
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(&path).map_err(fail)?;
        w.write_record(header).map_err(fail)?;
        for row in rows {
            w.write_record(row.into_iter()).map_err(fail)?;
        }
        w.flush().map_err(|e| CliError::output(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn text(&mut self, name: &str, report: &Report) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, &report.0).map_err(|e| CliError::output(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn finish(self) -> Vec<PathBuf> {
        self.written
    }
}

/// Line-oriented text report.
#[derive(Default)]
pub struct Report(String);

impl Report {
    pub fn line(&mut self, text: impl AsRef<str>) {
        self.0.push_str(text.as_ref());
        self.0.push('\n');
    }

    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key:<34} {value}");
    }
}
