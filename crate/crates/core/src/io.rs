//! File formats: polytope, equality-model and transform JSON, sample CSV.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lp::{EqualityModel, EqualityPolytope};
use crate::polytope::HPolytope;

/// `{"dim": d, "A": [[...]], "b": [...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl PolytopeFile {
    pub fn from_polytope(p: &HPolytope) -> Self {
        Self { dim: p.dim(), a: p.normals().to_rows(), b: p.offsets().to_vec() }
    }

    /// Validates and normalizes the body.
    pub fn into_polytope(self) -> Result<HPolytope> {
        if let Some(row) = self.a.iter().find(|r| r.len() != self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, got: row.len() });
        }
        if self.a.len() != self.b.len() {
            return Err(Error::DimensionMismatch { expected: self.a.len(), got: self.b.len() });
        }
        let rows = self.a.len();
        let a = Matrix::from_vec(rows, self.dim, self.a.concat())?;
        HPolytope::new(a, self.b)
    }
}

/// `{"W": [[...]], "x_s": [...]}` with `x = x_s + W y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformFile {
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
    pub x_s: Vec<f64>,
}

impl TransformFile {
    pub fn from_equality(e: &EqualityPolytope) -> Self {
        Self { w: e.w.to_rows(), x_s: e.x_s.clone() }
    }

    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        let k = self.w.first().map_or(0, |r| r.len());
        if y.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: y.len() });
        }
        Ok(self
            .x_s
            .iter()
            .zip(&self.w)
            .map(|(xs, row)| xs + crate::linalg::dot(row, y))
            .collect())
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_polytope(path: &Path) -> Result<HPolytope> {
    read_json::<PolytopeFile>(path)?.into_polytope()
}

pub fn write_polytope(path: &Path, p: &HPolytope) -> Result<()> {
    write_json(path, &PolytopeFile::from_polytope(p))
}

pub fn read_equality_model(path: &Path) -> Result<EqualityModel> {
    read_json(path)
}

/// Shortest representation that round-trips: 17 significant digits.
fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// One draw per row, no header.
pub fn write_samples<'a>(path: &Path, rows: impl IntoIterator<Item = &'a [f64]>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| format_value(v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_chain(path: &Path, chain: &Chain) -> Result<()> {
    write_samples(path, chain.iter())
}

pub fn read_samples(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    r.records()
        .map(|rec| {
            rec?.iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad sample `{s}`: {e}"))))
                .collect()
        })
        .collect()
}
