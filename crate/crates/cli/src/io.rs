//! CSV ingestion, draws files and input hashing.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use hs_core::faer::Mat;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Parsed numeric table: predictor columns, response, and header names.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub names: Vec<String>,
    pub response_name: String,
    pub x: Mat<f64>,
    pub y: Vec<f64>,
}

impl Table {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.names.len()
    }
}

/// Read a UTF-8 CSV whose first row is a header and whose last column is the
/// response. Locations in errors are 1-based file lines and columns.
pub fn load_csv(path: &Path) -> CliResult<Table> {
    let bytes = fs::read(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    parse_csv(&bytes).map_err(|e| CliError::data(format!("{}: {}", path.display(), e.message)))
}

pub fn parse_csv(bytes: &[u8]) -> CliResult<Table> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| CliError::data(format!("unreadable header: {e}")))?
        .clone();
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(CliError::data("empty file"));
    }
    if header.len() < 2 {
        return Err(CliError::data("need at least one predictor column and a response column"));
    }
    let cols = header.len();
    let mut values: Vec<f64> = Vec::new();
    let mut rows = 0;
    for (k, record) in reader.records().enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { len, .. } => CliError::data(format!(
                "row {line}: expected {cols} columns, found {len}"
            )),
            _ => CliError::data(format!("row {line}: {e}")),
        })?;
        for (j, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            if cell.is_empty() {
                return Err(CliError::data(format!(
                    "row {line}, column {} ({}): missing value",
                    j + 1,
                    &header[j]
                )));
            }
            let v: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| {
                CliError::data(format!(
                    "row {line}, column {} ({}): not a finite number: {cell:?}",
                    j + 1,
                    &header[j]
                ))
            })?;
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(CliError::data("no data rows"));
    }
    let p = cols - 1;
    Ok(Table {
        names: header.iter().take(p).map(str::to_string).collect(),
        response_name: header[p].to_string(),
        x: Mat::from_fn(rows, p, |i, j| values[i * cols + j]),
        y: (0..rows).map(|i| values[i * cols + p]).collect(),
    })
}

/// SHA-256 of the bytes framed as a git blob (`"blob <len>\0" + bytes`), the
/// object id git assigns to the file in a SHA-256 repository.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn hash_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    Ok(content_hash(&bytes))
}

/// Retained draws with one named column per parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Draws {
    pub names: Vec<String>,
    pub values: Mat<f64>,
}

pub const BINARY_MAGIC: &[u8; 8] = b"HSDRAWS1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DrawsFormat {
    Csv,
    Binary,
}

impl DrawsFormat {
    pub fn file_name(self) -> &'static str {
        match self {
            DrawsFormat::Csv => "draws.csv",
            DrawsFormat::Binary => "draws.bin",
        }
    }
}

/// CSV with the names as header; values use the shortest representation
/// that parses back to the same double.
pub fn write_draws_csv(path: &Path, draws: &Draws) -> CliResult<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{}", draws.names.join(","))?;
    let m = &draws.values;
    let mut line = String::new();
    for i in 0..m.nrows() {
        line.clear();
        for j in 0..m.ncols() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format!("{:?}", m[(i, j)]));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

/// Columnar binary layout, little endian:
///
/// ```text
/// b"HSDRAWS1" | rows: u32 | cols: u32          (16-byte header)
/// cols x { name_len: u32 | name: UTF-8 }
/// cols x rows x f64                             (column-major)
/// ```
pub fn write_draws_binary(path: &Path, draws: &Draws) -> CliResult<()> {
    let m = &draws.values;
    let dim = |v: usize| {
        u32::try_from(v).map_err(|_| CliError::data("draws too large for the binary format"))
    };
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&dim(m.nrows())?.to_le_bytes())?;
    w.write_all(&dim(m.ncols())?.to_le_bytes())?;
    for name in &draws.names {
        w.write_all(&dim(name.len())?.to_le_bytes())?;
        w.write_all(name.as_bytes())?;
    }
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            w.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_draws(path: &Path, draws: &Draws, format: DrawsFormat) -> CliResult<()> {
    match format {
        DrawsFormat::Csv => write_draws_csv(path, draws),
        DrawsFormat::Binary => write_draws_binary(path, draws),
    }
}

fn parse_binary(bytes: &[u8]) -> CliResult<Draws> {
    let bad = |what: &str| CliError::data(format!("malformed binary draws file: {what}"));
    let mut pos = 8;
    let mut take = |k: usize| -> CliResult<&[u8]> {
        let s = bytes.get(pos..pos + k).ok_or_else(|| bad("truncated"))?;
        pos += k;
        Ok(s)
    };
    let u32_at = |s: &[u8]| u32::from_le_bytes(s.try_into().unwrap()) as usize;
    let rows = u32_at(take(4)?);
    let cols = u32_at(take(4)?);
    let mut names = Vec::with_capacity(cols);
    for _ in 0..cols {
        let len = u32_at(take(4)?);
        let name = std::str::from_utf8(take(len)?).map_err(|_| bad("column name is not UTF-8"))?;
        names.push(name.to_string());
    }
    let body = take(rows * cols * 8)?;
    let f = |k: usize| f64::from_le_bytes(body[8 * k..8 * k + 8].try_into().unwrap());
    let values = Mat::from_fn(rows, cols, |i, j| f(j * rows + i));
    if pos != bytes.len() {
        return Err(bad("trailing bytes"));
    }
    Ok(Draws { names, values })
}

fn parse_draws_csv(bytes: &[u8]) -> CliResult<Draws> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(bytes);
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::data(format!("malformed draws file: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(CliError::data("malformed draws file: empty"));
    }
    let mut values = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::data(format!("malformed draws file, row {}: {e}", k + 2)))?;
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                CliError::data(format!("malformed draws file, row {}, column {}: {cell:?}", k + 2, j + 1))
            })?;
            values.push(v);
        }
    }
    let cols = names.len();
    let rows = values.len() / cols;
    Ok(Draws { names, values: Mat::from_fn(rows, cols, |i, j| values[i * cols + j]) })
}

/// Read a draws file in either format, recognized by the magic bytes.
pub fn read_draws(path: &Path) -> CliResult<Draws> {
    let bytes = fs::read(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    if bytes.starts_with(BINARY_MAGIC) {
        parse_binary(&bytes)
    } else {
        parse_draws_csv(&bytes)
    }
}
