//! Kernel SVM on precomputed Gram matrices, one-vs-one for multiclass.

pub mod smo;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::DenseMatrix;

pub use smo::{max_kkt_violation, BinarySolution, SmoParams};

/// Binary classifier separating `positive` (+1) from `negative` (−1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairModel {
    pub positive: usize,
    pub negative: usize,
    /// Training-set indices with nonzero multipliers.
    pub support: Vec<usize>,
    pub alpha: Vec<f64>,
    /// `alpha_i * y_i`, aligned with `support`.
    pub coef: Vec<f64>,
    pub bias: f64,
}

impl PairModel {
    pub fn decision(&self, kernel_row: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(&j, &c)| c * kernel_row[j])
            .sum::<f64>()
            + self.bias
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub classes: Vec<usize>,
    pub pairs: Vec<PairModel>,
    pub c: f64,
    pub train_size: usize,
}

pub fn svm_train(kernel: &DenseMatrix, labels: &[usize], c: f64) -> Result<SvmModel> {
    svm_train_with(kernel, labels, c, SmoParams::default())
}

/// Train one binary SVM per class pair on a square training kernel.
pub fn svm_train_with(kernel: &DenseMatrix, labels: &[usize], c: f64, params: SmoParams) -> Result<SvmModel> {
    let n = labels.len();
    if kernel.rows() != n || kernel.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} kernel for {n} labels",
            kernel.rows(),
            kernel.cols()
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Invalid(format!("C must be positive, got {c}")));
    }
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Invalid("SVM training needs at least two classes".into()));
    }

    let mut pairs = Vec::new();
    for (ai, &a) in classes.iter().enumerate() {
        for &b in &classes[ai + 1..] {
            let idx: Vec<usize> = (0..n).filter(|&i| labels[i] == a || labels[i] == b).collect();
            let y: Vec<f64> = idx
                .iter()
                .map(|&i| if labels[i] == a { 1.0 } else { -1.0 })
                .collect();
            let sub = kernel.select(&idx, &idx);
            let sol = smo::solve(&sub, &y, c, params).ok_or(Error::NoConvergence(a, b, params.max_passes))?;
            let mut pm = PairModel {
                positive: a,
                negative: b,
                support: Vec::new(),
                alpha: Vec::new(),
                coef: Vec::new(),
                bias: sol.bias,
            };
            for (k, &alpha) in sol.alpha.iter().enumerate() {
                if alpha > 0.0 {
                    pm.support.push(idx[k]);
                    pm.alpha.push(alpha);
                    pm.coef.push(alpha * y[k]);
                }
            }
            pairs.push(pm);
        }
    }
    Ok(SvmModel {
        classes,
        pairs,
        c,
        train_size: n,
    })
}

impl SvmModel {
    fn check_rows(&self, rows: &DenseMatrix) -> Result<()> {
        if rows.cols() != self.train_size {
            return Err(Error::DimensionMismatch(format!(
                "kernel rows have {} columns, model was trained on {} graphs",
                rows.cols(),
                self.train_size
            )));
        }
        Ok(())
    }

    /// Decision value of every pair model for every row.
    pub fn decision_values(&self, rows: &DenseMatrix) -> Result<Vec<Vec<f64>>> {
        self.check_rows(rows)?;
        Ok((0..rows.rows())
            .map(|r| self.pairs.iter().map(|p| p.decision(rows.row(r))).collect())
            .collect())
    }
}

/// One-vs-one vote per row of test-vs-train kernel values. A zero decision
/// value and tied vote counts both go to the lower class id.
pub fn svm_predict(model: &SvmModel, rows: &DenseMatrix) -> Result<Vec<usize>> {
    let values = model.decision_values(rows)?;
    Ok(values
        .iter()
        .map(|dv| {
            let mut votes = vec![0usize; model.classes.len()];
            for (p, &v) in model.pairs.iter().zip(dv) {
                let winner = if v >= 0.0 { p.positive } else { p.negative };
                votes[model.classes.binary_search(&winner).unwrap()] += 1;
            }
            let best = votes
                .iter()
                .enumerate()
                .fold(0, |best, (i, &v)| if v > votes[best] { i } else { best });
            model.classes[best]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{gram, EmbeddingFingerprint, KernelSpec};

    fn fp() -> EmbeddingFingerprint {
        EmbeddingFingerprint {
            mode: "test".into(),
            length: None,
            dim: 2,
        }
    }

    fn kernel(points: &[Vec<f64>], spec: KernelSpec) -> DenseMatrix {
        gram(points, spec, fp()).unwrap().values
    }

    #[test]
    fn two_points_inner_kernel() {
        let pts = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        let k = kernel(&pts, KernelSpec::Inner);
        let m = svm_train(&k, &[0, 1], 1.0).unwrap();
        assert_eq!(svm_predict(&m, &k).unwrap(), vec![0, 1]);
        let pm = &m.pairs[0];
        let sum: f64 = pm.coef.iter().sum();
        assert!(sum.abs() < 1e-8);
        assert!(pm.alpha.iter().all(|&a| a > 0.0 && a <= 1.0));
    }

    #[test]
    fn xor_with_rbf() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        let labels = [0, 0, 1, 1];
        let k = kernel(&pts, KernelSpec::Rbf { sigma: 0.5 });
        let m = svm_train(&k, &labels, 10.0).unwrap();
        assert_eq!(svm_predict(&m, &k).unwrap(), labels.to_vec());
    }

    #[test]
    fn conflicting_duplicates() {
        let pts = vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![2.0, 2.0]];
        let labels = [0, 1, 1];
        let k = kernel(&pts, KernelSpec::Inner);
        let m = svm_train(&k, &labels, 1.0).unwrap();
        let pred = svm_predict(&m, &k).unwrap();
        let wrong = pred.iter().zip(&labels).filter(|(a, b)| a != b).count();
        assert!(wrong >= 1);
    }

    #[test]
    fn three_class_vote() {
        // hand-made model: three pair classifiers with fixed decisions
        let model = SvmModel {
            classes: vec![0, 1, 2],
            pairs: vec![
                PairModel {
                    positive: 0,
                    negative: 1,
                    support: vec![0],
                    alpha: vec![1.0],
                    coef: vec![1.0],
                    bias: 0.0,
                },
                PairModel {
                    positive: 0,
                    negative: 2,
                    support: vec![0],
                    alpha: vec![1.0],
                    coef: vec![-1.0],
                    bias: 0.0,
                },
                PairModel {
                    positive: 1,
                    negative: 2,
                    support: vec![0],
                    alpha: vec![1.0],
                    coef: vec![-1.0],
                    bias: 0.0,
                },
            ],
            c: 1.0,
            train_size: 1,
        };
        // row value 1: votes 0, 2, 2 -> class 2
        // row value -1: votes 1, 0, 1 -> class 1
        // row value 0: all decisions 0 -> votes 0, 0, 1 -> class 0
        let rows = DenseMatrix::new(3, 1, vec![1.0, -1.0, 0.0]).unwrap();
        assert_eq!(svm_predict(&model, &rows).unwrap(), vec![2, 1, 0]);
    }

    #[test]
    fn all_tied_votes_pick_lowest_class() {
        // three classes, each wins one pair
        let model = SvmModel {
            classes: vec![0, 1, 2],
            pairs: vec![
                PairModel {
                    positive: 0,
                    negative: 1,
                    support: vec![],
                    alpha: vec![],
                    coef: vec![],
                    bias: 1.0,
                },
                PairModel {
                    positive: 0,
                    negative: 2,
                    support: vec![],
                    alpha: vec![],
                    coef: vec![],
                    bias: -1.0,
                },
                PairModel {
                    positive: 1,
                    negative: 2,
                    support: vec![],
                    alpha: vec![],
                    coef: vec![],
                    bias: 1.0,
                },
            ],
            c: 1.0,
            train_size: 2,
        };
        let rows = DenseMatrix::zeros(1, 2);
        assert_eq!(svm_predict(&model, &rows).unwrap(), vec![0]);
    }

    #[test]
    fn input_validation() {
        let k = DenseMatrix::zeros(2, 2);
        assert!(svm_train(&k, &[0, 0], 1.0).is_err());
        assert!(svm_train(&k, &[0, 1], 0.0).is_err());
        assert!(svm_train(&k, &[0, 1, 1], 1.0).is_err());
        let m = svm_train(
            &kernel(&[vec![1.0, 0.0], vec![0.0, 1.0]], KernelSpec::Inner),
            &[0, 1],
            1.0,
        )
        .unwrap();
        assert!(svm_predict(&m, &DenseMatrix::zeros(1, 3)).is_err());
    }

    fn random_points(seed: u64, n: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
        use rand::Rng;
        let mut rng = crate::rng::stream(seed, &[]);
        (0..n)
            .map(|i| {
                let shift = if i % 2 == 0 { 1.5 } else { -1.5 };
                (
                    vec![shift + rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
                    i % 2,
                )
            })
            .unzip()
    }

    #[test]
    fn separable_set_satisfies_kkt() {
        let (pts, labels) = random_points(1, 30);
        let k = kernel(&pts, KernelSpec::Rbf { sigma: 1.0 });
        let y: Vec<f64> = labels.iter().map(|&l| if l == 0 { 1.0 } else { -1.0 }).collect();
        let params = SmoParams::default();
        let sol = smo::solve(&k, &y, 100.0, params).unwrap();
        assert!(max_kkt_violation(&k, &y, 100.0, &sol) < 10.0 * params.tolerance);
        let m = svm_train(&k, &labels, 100.0).unwrap();
        assert_eq!(svm_predict(&m, &k).unwrap(), labels);
        let pm = &m.pairs[0];
        assert!(pm.coef.iter().sum::<f64>().abs() < 1e-8);
        assert!(pm.alpha.iter().all(|&a| a > 0.0 && a <= 100.0));
    }

    #[test]
    fn two_classes_equal_binary_solver() {
        let (pts, labels) = random_points(2, 24);
        let k = kernel(&pts, KernelSpec::Rbf { sigma: 0.7 });
        let y: Vec<f64> = labels.iter().map(|&l| if l == 0 { 1.0 } else { -1.0 }).collect();
        let sol = smo::solve(&k, &y, 1.0, SmoParams::default()).unwrap();
        let m = svm_train(&k, &labels, 1.0).unwrap();
        let pred = svm_predict(&m, &k).unwrap();
        for i in 0..24 {
            let f: f64 = (0..24).map(|j| sol.alpha[j] * y[j] * k.get(i, j)).sum::<f64>() + sol.bias;
            assert_eq!(pred[i], if f >= 0.0 { 0 } else { 1 });
        }
    }

    #[test]
    fn training_order_does_not_change_decisions() {
        let (pts, labels) = random_points(3, 20);
        let spec = KernelSpec::Rbf { sigma: 1.0 };
        let k = kernel(&pts, spec);
        let m = svm_train(&k, &labels, 10.0).unwrap();
        let perm: Vec<usize> = (0..20).rev().collect();
        let pp: Vec<Vec<f64>> = perm.iter().map(|&i| pts[i].clone()).collect();
        let pl: Vec<usize> = perm.iter().map(|&i| labels[i]).collect();
        let mp = svm_train(&kernel(&pp, spec), &pl, 10.0).unwrap();
        // decision values on the original points
        let probe = DenseMatrix::new(
            20,
            20,
            (0..20)
                .flat_map(|i| perm.iter().map(move |&j| (i, j)))
                .map(|(i, j)| k.get(i, j))
                .collect(),
        )
        .unwrap();
        let a = m.decision_values(&k).unwrap();
        let b = mp.decision_values(&probe).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x[0] - y[0]).abs() < 1e-2, "{} vs {}", x[0], y[0]);
        }
    }
}
