//! CSV/JSON emission and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// `x` with 12 significant digits, shortest form (like C's `%.12g`).
pub fn num(x: f64) -> String {
    sig(x, 12)
}

pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // the exponent after rounding, so 9.99…e11 becomes 1e12
    let s = format!("{:.*e}", digits - 1, x);
    let (mant, e) = s.split_once('e').expect("exponent form");
    let e: i32 = e.parse().expect("integer exponent");
    if e < -5 || e >= digits as i32 {
        let mant = trim_zeros(mant);
        return format!("{mant}e{e}");
    }
    let decimals = (digits as i32 - 1 - e).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One cell of a CSV row.
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($crate::output::Cell::from($x)),*] };
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        Ok(w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?)
    }
}

#[derive(Serialize)]
pub struct Digest256 {
    pub path: String,
    pub sha256: String,
}

/// Provenance record written next to every output file.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub timestamp: String,
    pub outputs: Vec<Digest256>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Where a command's output goes, and what to record about it.
pub struct Sink {
    pub command: &'static str,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
}

impl Sink {
    pub fn new<P: Serialize>(command: &'static str, params: &P, seed: Option<u64>) -> Result<Self> {
        Ok(Self { command, parameters: serde_json::to_value(params)?, seed })
    }

    /// Write `bytes` to `path` plus its manifest, or to stdout.
    pub fn emit(&self, path: Option<&Path>, bytes: &[u8]) -> Result<()> {
        let Some(path) = path else {
            std::io::stdout().write_all(bytes)?;
            return Ok(());
        };
        fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
        let manifest = RunManifest {
            command: self.command.to_string(),
            parameters: self.parameters.clone(),
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            outputs: vec![Digest256 { path: path.display().to_string(), sha256: sha256_hex(bytes) }],
        };
        let mp = manifest_path(path);
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&mp, text).with_context(|| format!("writing {}", mp.display()))?;
        eprintln!("wrote {} (+ manifest)", path.display());
        Ok(())
    }

    pub fn emit_table(&self, path: Option<&Path>, t: &Table) -> Result<()> {
        self.emit(path, &t.to_csv()?)
    }

    pub fn emit_json<T: Serialize>(&self, path: Option<&Path>, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.emit(path, s.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(2.0 / 3.0 * 1000.0), "666.666666667");
        assert_eq!(num(1820.0), "1820");
        assert_eq!(num(-1.25e-7), "-1.25e-7");
        assert_eq!(num(9.9999999999999e11), "1e12");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(0.218369677896), "0.218369677896");
    }

    #[test]
    fn csv_has_unix_newlines() {
        let mut t = Table::new(&["p", "name"]);
        t.push(row![0.1, "a,b"]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "p,name\n0.1,\"a,b\"\n");
    }
}
