//! CSV matrices and the built-in datasets.
//!
//! Files are comma-separated, headerless, one matrix row per line. The names
//! `paper_s` and `paper_t` refer to the built-in 6 x 2 instance unless a
//! file of that name exists.

use std::path::Path;

use nalgebra::DMatrix;
use relugeo::{datasets, ResponseMatrix, SampleMatrix};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const BUILTIN_SAMPLE: &str = "paper_s";
pub const BUILTIN_RESPONSE: &str = "paper_t";

/// Where an input matrix came from and the SHA-256 of its bytes (the CSV
/// rendering, for built-ins).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub source: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Parse(e.to_string()))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        CliError::Parse(format!(
                            "row {}: '{field}' is not a finite number",
                            line + 1
                        ))
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 {
        return Err(CliError::Parse("matrix file is empty".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn render_matrix(m: &DMatrix<f64>) -> String {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for i in 0..m.nrows() {
        writer
            .write_record(m.row(i).iter().map(|v| v.to_string()))
            .expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("flush to memory")).expect("ascii output")
}

fn builtin(name: &str) -> Option<DMatrix<f64>> {
    match name {
        BUILTIN_SAMPLE => Some(datasets::paper_sample().matrix().clone()),
        BUILTIN_RESPONSE => Some(datasets::paper_response().matrix().clone()),
        _ => None,
    }
}

pub fn load_matrix(name: &str) -> Result<(DMatrix<f64>, InputDigest), CliError> {
    let path = Path::new(name);
    if !path.exists() {
        if let Some(m) = builtin(name) {
            let digest = InputDigest {
                source: format!("builtin:{name}"),
                sha256: sha256_hex(render_matrix(&m).as_bytes()),
            };
            return Ok((m, digest));
        }
    }
    let bytes = std::fs::read(path).map_err(|e| CliError::Parse(format!("{name}: {e}")))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Parse(format!("{name}: not UTF-8 text")))?;
    let m = parse_matrix(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{name}: {msg}")),
        other => other,
    })?;
    Ok((
        m,
        InputDigest {
            source: name.to_string(),
            sha256: sha256_hex(&bytes),
        },
    ))
}

pub fn load_sample(name: &str) -> Result<(SampleMatrix, InputDigest), CliError> {
    let (m, d) = load_matrix(name)?;
    Ok((SampleMatrix::new(m)?, d))
}

pub fn load_response(name: &str) -> Result<(ResponseMatrix, InputDigest), CliError> {
    let (m, d) = load_matrix(name)?;
    Ok((ResponseMatrix::new(m)?, d))
}

/// A vector stored as a single column or a single row.
pub fn load_vector(name: &str) -> Result<(Vec<f64>, InputDigest), CliError> {
    let (m, d) = load_matrix(name)?;
    if m.ncols() != 1 && m.nrows() != 1 {
        return Err(CliError::Shape(format!(
            "{name} is {}x{}, expected a vector",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok((m.iter().copied().collect(), d))
}

/// Writes the built-in sample and response as `paper_s.csv` and
/// `paper_t.csv` into `dir`.
pub fn dump_builtins(dir: &Path) -> Result<Vec<String>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for name in [BUILTIN_SAMPLE, BUILTIN_RESPONSE] {
        let path = dir.join(format!("{name}.csv"));
        let m = builtin(name).expect("known built-in");
        std::fs::write(&path, render_matrix(&m))
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        written.push(path.display().to_string());
    }
    Ok(written)
}
