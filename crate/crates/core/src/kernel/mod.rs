//! Kernels on embedding vectors and Gram matrices over graph collections.

mod sparse;

use std::fmt;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sparse::SparseVector;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `<x, y>`
    Inner,
    /// `(<x, y> + c)^degree`
    Polynomial { c: f64, degree: u32 },
    /// `exp(-|x - y|^2 / (2 sigma^2))`
    Rbf { sigma: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Polynomial { degree: 0, .. } => {
                Err(Error::Invalid("polynomial degree must be at least 1".into()))
            }
            KernelSpec::Polynomial { c, .. } if !c.is_finite() => {
                Err(Error::Invalid("polynomial offset must be finite".into()))
            }
            KernelSpec::Rbf { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                Err(Error::Invalid(format!("rbf sigma must be positive, got {sigma}")))
            }
            _ => Ok(()),
        }
    }

    /// Kernel value from the inner product and squared distance of a pair.
    #[inline]
    pub fn from_pair(&self, inner: f64, squared_distance: f64) -> f64 {
        match *self {
            KernelSpec::Inner => inner,
            KernelSpec::Polynomial { c, degree } => (inner + c).powi(degree as i32),
            KernelSpec::Rbf { sigma } => (-squared_distance / (2.0 * sigma * sigma)).exp(),
        }
    }

    /// Whether positive semidefiniteness is asserted for this kernel.
    pub fn checks_psd(&self) -> bool {
        !matches!(self, KernelSpec::Polynomial { .. })
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Inner => write!(f, "inner"),
            KernelSpec::Polynomial { c, degree } => write!(f, "poly(c={c},d={degree})"),
            KernelSpec::Rbf { sigma } => write!(f, "rbf(sigma={sigma:e})"),
        }
    }
}

impl std::str::FromStr for KernelSpec {
    type Err = Error;

    /// `inner`, `poly:C:D` (or `poly` for c=0, d=2), `rbf:SIGMA`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| -> Result<f64> {
            t.parse()
                .map_err(|_| Error::Invalid(format!("bad number {t:?} in kernel {s:?}")))
        };
        let spec = match parts.as_slice() {
            ["inner"] => KernelSpec::Inner,
            ["poly"] => KernelSpec::Polynomial { c: 0.0, degree: 2 },
            ["poly", c, d] => KernelSpec::Polynomial {
                c: num(c)?,
                degree: d
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad degree in kernel {s:?}")))?,
            },
            ["rbf", sigma] => KernelSpec::Rbf { sigma: num(sigma)? },
            _ => return Err(Error::Invalid(format!("unknown kernel {s:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub fn kernel_value(x: &[f64], y: &[f64], spec: &KernelSpec) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "kernel on vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(spec.from_pair(dot(x, y), squared_distance(x, y)))
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// The submatrix with the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            let row = self.row(i);
            data.extend(cols.iter().map(|&j| row[j]));
        }
        DenseMatrix {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j).to_bits() == self.get(j, i).to_bits()))
    }

    /// Eigenvalues of a symmetric matrix, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Describes the embeddings a Gram matrix was computed from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingFingerprint {
    pub mode: String,
    pub length: Option<usize>,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub values: DenseMatrix,
    pub spec: KernelSpec,
    pub fingerprint: EmbeddingFingerprint,
}

/// Inner products and squared distances of every pair of a vector set.
/// Any kernel's Gram matrix can be read off it without touching the
/// vectors again.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseTable {
    pub inner: DenseMatrix,
    pub squared_distance: DenseMatrix,
    pub fingerprint: EmbeddingFingerprint,
}

impl PairwiseTable {
    fn build(
        n: usize,
        fingerprint: EmbeddingFingerprint,
        pair: impl Fn(usize, usize) -> (f64, f64) + Sync,
    ) -> Self {
        // each unordered pair once, mirrored
        let rows: Vec<Vec<(f64, f64)>> = (0..n)
            .into_par_iter()
            .map(|i| (0..=i).map(|j| pair(i, j)).collect())
            .collect();
        let mut inner = DenseMatrix::zeros(n, n);
        let mut dist = DenseMatrix::zeros(n, n);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, (ip, d)) in row.into_iter().enumerate() {
                let d = if i == j { 0.0 } else { d };
                inner.set(i, j, ip);
                inner.set(j, i, ip);
                dist.set(i, j, d);
                dist.set(j, i, d);
            }
        }
        PairwiseTable {
            inner,
            squared_distance: dist,
            fingerprint,
        }
    }

    pub fn from_dense(vectors: &[Vec<f64>], fingerprint: EmbeddingFingerprint) -> Result<Self> {
        uniform_dim(vectors.iter().map(Vec::len))?;
        Ok(Self::build(vectors.len(), fingerprint, |i, j| {
            (
                dot(&vectors[i], &vectors[j]),
                squared_distance(&vectors[i], &vectors[j]),
            )
        }))
    }

    pub fn from_sparse(vectors: &[SparseVector], fingerprint: EmbeddingFingerprint) -> Result<Self> {
        uniform_dim(vectors.iter().map(SparseVector::dim))?;
        Ok(Self::build(vectors.len(), fingerprint, |i, j| {
            (
                vectors[i].dot(&vectors[j]),
                vectors[i].squared_distance(&vectors[j]),
            )
        }))
    }

    pub fn len(&self) -> usize {
        self.inner.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn gram(&self, spec: KernelSpec) -> Result<GramMatrix> {
        spec.validate()?;
        let n = self.len();
        let data = self
            .inner
            .data()
            .iter()
            .zip(self.squared_distance.data())
            .map(|(&ip, &d)| spec.from_pair(ip, d))
            .collect();
        let gram = GramMatrix {
            values: DenseMatrix::new(n, n, data)?,
            spec,
            fingerprint: self.fingerprint.clone(),
        };
        gram.check()?;
        Ok(gram)
    }
}

fn uniform_dim(mut dims: impl Iterator<Item = usize>) -> Result<()> {
    if let Some(first) = dims.next() {
        if let Some(other) = dims.find(|&d| d != first) {
            return Err(Error::DimensionMismatch(format!(
                "embeddings of dimension {first} and {other}"
            )));
        }
    }
    Ok(())
}

/// Gram matrix of dense embeddings.
pub fn gram(
    embeddings: &[Vec<f64>],
    spec: KernelSpec,
    fingerprint: EmbeddingFingerprint,
) -> Result<GramMatrix> {
    PairwiseTable::from_dense(embeddings, fingerprint)?.gram(spec)
}

impl GramMatrix {
    pub fn len(&self) -> usize {
        self.values.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Minimum eigenvalue relative to the largest one, for kernels that
    /// are positive semidefinite.
    fn check(&self) -> Result<()> {
        if !self.values.is_symmetric() {
            return Err(Error::Numeric("Gram matrix is not symmetric".into()));
        }
        if self.spec.checks_psd() && self.len() > 0 {
            let ev = self.values.symmetric_eigenvalues();
            let (min, max) = (ev[0], ev[ev.len() - 1]);
            if min < -1e-8 * max.abs().max(f64::MIN_POSITIVE) {
                return Err(Error::Numeric(format!(
                    "{} Gram matrix has eigenvalue {min:e} (largest {max:e})",
                    self.spec
                )));
            }
        }
        Ok(())
    }

    /// Write the values as headerless CSV and the kernel description as a
    /// JSON sidecar next to it (`<path>.json`).
    pub fn export(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
        for i in 0..self.len() {
            let row: Vec<String> = self.values.row(i).iter().map(|v| format!("{v:?}")).collect();
            writeln!(out, "{}", row.join(",")).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))?;
        let sidecar = path.with_extension("json");
        let meta = serde_json::json!({
            "n": self.len(),
            "kernel": self.spec,
            "embedding": self.fingerprint,
        });
        std::fs::write(&sidecar, serde_json::to_string_pretty(&meta)?).map_err(|e| Error::io(&sidecar, e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn fp(dim: usize) -> EmbeddingFingerprint {
        EmbeddingFingerprint {
            mode: "test".into(),
            length: None,
            dim,
        }
    }

    #[test]
    fn kernel_values() {
        let rbf = KernelSpec::Rbf { sigma: 0.3 };
        assert_eq!(kernel_value(&[0.2, 0.8], &[0.2, 0.8], &rbf).unwrap(), 1.0);
        assert_eq!(
            kernel_value(&[1.0, 0.0], &[0.0, 1.0], &KernelSpec::Inner).unwrap(),
            0.0
        );
        let poly = KernelSpec::Polynomial { c: 0.0, degree: 2 };
        assert_eq!(kernel_value(&[1.0, 2.0], &[3.0, 4.0], &poly).unwrap(), 121.0);
        assert!(kernel_value(&[1.0], &[1.0, 2.0], &poly).is_err());
    }

    #[test]
    fn parse_specs() {
        assert_eq!("inner".parse::<KernelSpec>().unwrap(), KernelSpec::Inner);
        assert_eq!(
            "rbf:0.5".parse::<KernelSpec>().unwrap(),
            KernelSpec::Rbf { sigma: 0.5 }
        );
        assert_eq!(
            "poly:1:3".parse::<KernelSpec>().unwrap(),
            KernelSpec::Polynomial { c: 1.0, degree: 3 }
        );
        assert!("rbf:0".parse::<KernelSpec>().is_err());
        assert!("poly:0:0".parse::<KernelSpec>().is_err());
        assert!("linear".parse::<KernelSpec>().is_err());
    }

    #[test]
    fn identical_embeddings_give_all_ones_rbf() {
        let e = vec![vec![0.1, 0.9]; 4];
        let g = gram(&e, KernelSpec::Rbf { sigma: 1.0 }, fp(2)).unwrap();
        assert!(g.values.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn sparse_and_dense_routes_agree() {
        let mut rng = crate::rng::stream(2, &[]);
        let dense: Vec<Vec<f64>> = (0..6)
            .map(|_| {
                (0..8)
                    .map(|_| {
                        if rng.random::<f64>() < 0.5 {
                            0.0
                        } else {
                            rng.random()
                        }
                    })
                    .collect()
            })
            .collect();
        let sparse: Vec<SparseVector> = dense.iter().map(|v| SparseVector::from_dense(v)).collect();
        let a = PairwiseTable::from_dense(&dense, fp(8)).unwrap();
        let b = PairwiseTable::from_sparse(&sparse, fp(8)).unwrap();
        for (x, y) in a.inner.data().iter().zip(b.inner.data()) {
            assert!((x - y).abs() < 1e-14);
        }
        for (x, y) in a.squared_distance.data().iter().zip(b.squared_distance.data()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn export_writes_csv_and_sidecar() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("gram.csv");
        let g = gram(&[vec![1.0, 0.0], vec![0.0, 1.0]], KernelSpec::Inner, fp(2)).unwrap();
        g.export(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "1.0,0.0\n0.0,1.0\n");
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(tmp.path().join("gram.json")).unwrap()).unwrap();
        assert_eq!(meta["kernel"]["kind"], "inner");
        assert_eq!(meta["n"], 2);
    }

    proptest! {
        #[test]
        fn symmetric_kernels(x in prop::collection::vec(-2.0f64..2.0, 5), y in prop::collection::vec(-2.0f64..2.0, 5), sigma in 0.01f64..10.0) {
            for spec in [KernelSpec::Inner, KernelSpec::Polynomial { c: 1.0, degree: 3 }, KernelSpec::Rbf { sigma }] {
                prop_assert_eq!(kernel_value(&x, &y, &spec).unwrap(), kernel_value(&y, &x, &spec).unwrap());
            }
        }

        #[test]
        fn rbf_decreases_with_distance(x in prop::collection::vec(-1.0f64..1.0, 4), dir in prop::collection::vec(-1.0f64..1.0, 4), t in 0.05f64..0.5) {
            let norm: f64 = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            let y: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
            let z: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + 2.0 * t * d).collect();
            let spec = KernelSpec::Rbf { sigma: 1.0 };
            prop_assert!(kernel_value(&x, &y, &spec).unwrap() > kernel_value(&x, &z, &spec).unwrap());
        }
    }
}
