//! CSV and JSON writers. Every file starts with the config digest and seed.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Destination of one output: a file, or stdout when no path is configured.
pub struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    /// Relative paths are placed under `WIREBILL_OUT_DIR` when it is set.
    pub fn new(path: Option<&Path>) -> Self {
        let path = path.map(|p| match std::env::var_os("WIREBILL_OUT_DIR") {
            Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
            _ => p.to_path_buf(),
        });
        Self { path }
    }

    fn open(&self) -> Result<Box<dyn Write>, CliError> {
        match &self.path {
            Some(p) => {
                if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
                }
                let f = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                Ok(Box::new(BufWriter::new(f)))
            }
            None => Ok(Box::new(io::stdout().lock())),
        }
    }

    pub fn csv(&self, digest: &str, seed: u64, header: &[&str]) -> Result<CsvOut, CliError> {
        let mut inner = self.open()?;
        writeln!(inner, "# config-sha256={digest} seed={seed}").map_err(io_err)?;
        let mut writer = csv::Writer::from_writer(inner);
        writer.write_record(header).map_err(csv_err)?;
        Ok(CsvOut { writer })
    }

    /// Writes `report` with `config_sha256` and `seed` fields added.
    pub fn json<T: Serialize>(&self, digest: &str, seed: u64, report: &T) -> Result<(), CliError> {
        let mut value = serde_json::to_value(report).map_err(|e| CliError::Io(e.to_string()))?;
        if let Some(map) = value.as_object_mut() {
            map.insert("config_sha256".into(), digest.into());
            map.insert("seed".into(), seed.into());
        }
        let mut out = self.open()?;
        serde_json::to_writer_pretty(&mut out, &value).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(out).map_err(io_err)?;
        out.flush().map_err(io_err)
    }
}

pub struct CsvOut {
    writer: csv::Writer<Box<dyn Write>>,
}

/// One CSV field.
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl CsvOut {
    /// Floats are written with 17 significant digits.
    pub fn row(&mut self, cells: Vec<Cell>) -> Result<(), CliError> {
        let fields: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Int(i) => i.to_string(),
                Cell::Float(f) => format!("{f:.16e}"),
                Cell::Bool(b) => b.to_string(),
                Cell::Empty => String::new(),
            })
            .collect();
        self.writer.write_record(&fields).map_err(csv_err)
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush().map_err(io_err)
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}
