//! Embedding files.
//!
//! CSV: a header `graph_id,<c0>,<c1>,...` where the `c` are walk indices
//! (feature-based) or vector coordinates (data-driven), then one row per
//! graph. Feature-based files only carry walk indices that are nonzero in
//! at least one graph; absent columns are zero everywhere.
//!
//! JSON: an array of `{graph_id, l, mode, values}` records; `values` is an
//! `{index: probability}` map for feature-based and a plain array for
//! data-driven embeddings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature::{EmbeddingMode, FeatureEmbedding};

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    /// Column labels: walk index or coordinate.
    pub columns: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

impl EmbeddingMatrix {
    /// Columns are the union of the supports.
    pub fn from_feature(embeddings: &[FeatureEmbedding]) -> Self {
        let columns: Vec<usize> = embeddings
            .iter()
            .flat_map(|e| e.values.iter().map(|(i, _)| i))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let rows = embeddings
            .iter()
            .map(|e| columns.iter().map(|&c| e.get(c)).collect())
            .collect();
        EmbeddingMatrix { columns, rows }
    }

    pub fn from_dense(rows: Vec<Vec<f64>>) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        EmbeddingMatrix {
            columns: (0..dim).collect(),
            rows,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("graph_id");
        for c in &self.columns {
            write!(s, ",{c}").unwrap();
        }
        s.push('\n');
        for (g, row) in self.rows.iter().enumerate() {
            write!(s, "{g}").unwrap();
            for v in row {
                write!(s, ",{v}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "empty embedding file"))?;
        let mut fields = header.split(',');
        if fields.next().map(str::trim) != Some("graph_id") {
            return Err(Error::parse(path, 1, "header must start with graph_id"));
        }
        let columns = fields
            .map(|f| f.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(path, 1, format!("bad column index: {e}")))?;
        let mut rows = Vec::new();
        for (n, line) in lines {
            let mut fields = line.split(',');
            let id: usize = fields
                .next()
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|e| Error::parse(path, n + 1, format!("bad graph id: {e}")))?;
            if id != rows.len() {
                return Err(Error::parse(
                    path,
                    n + 1,
                    format!("expected graph id {}, found {id}", rows.len()),
                ));
            }
            let row = fields
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(path, n + 1, format!("bad value: {e}")))?;
            if row.len() != columns.len() {
                return Err(Error::parse(
                    path,
                    n + 1,
                    format!("{} values for {} columns", row.len(), columns.len()),
                ));
            }
            rows.push(row);
        }
        Ok(EmbeddingMatrix { columns, rows })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Values {
    Dense(Vec<f64>),
    Sparse(BTreeMap<usize, f64>),
}

impl<'de> Deserialize<'de> for Values {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Array(_) => serde_json::from_value(v).map(Values::Dense),
            serde_json::Value::Object(_) => serde_json::from_value(v).map(Values::Sparse),
            _ => return Err(D::Error::custom("values must be an array or an object")),
        }
        .map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub graph_id: usize,
    pub l: usize,
    /// `exact`, `sampled` or `data_driven`.
    pub mode: String,
    pub values: Values,
}

pub fn feature_records(embeddings: &[FeatureEmbedding]) -> Vec<EmbeddingRecord> {
    embeddings
        .iter()
        .enumerate()
        .map(|(g, e)| EmbeddingRecord {
            graph_id: g,
            l: e.length,
            mode: match e.mode {
                EmbeddingMode::Exact => "exact".into(),
                EmbeddingMode::Sampled { .. } => "sampled".into(),
            },
            values: Values::Sparse(e.values.iter().collect()),
        })
        .collect()
}

pub fn dense_records(rows: &[Vec<f64>], l: usize) -> Vec<EmbeddingRecord> {
    rows.iter()
        .enumerate()
        .map(|(g, r)| EmbeddingRecord {
            graph_id: g,
            l,
            mode: "data_driven".into(),
            values: Values::Dense(r.clone()),
        })
        .collect()
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<EmbeddingRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
