use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{DenseMatrix, KernelSpec, PairwiseTable};
use crate::rng::{self, derive_seed};
use crate::svm::{svm_predict, svm_train};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub folds: usize,
    pub repeats: usize,
    pub c_grid: Vec<f64>,
    pub kernels: Vec<KernelSpec>,
    pub seed: u64,
}

/// RBF widths tried by default.
pub const SIGMA_GRID: [f64; 7] = [1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0];
pub const C_GRID: [f64; 5] = [0.001, 0.01, 0.1, 1.0, 10.0];

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            folds: 10,
            repeats: 10,
            c_grid: C_GRID.to_vec(),
            kernels: SIGMA_GRID
                .iter()
                .map(|&sigma| KernelSpec::Rbf { sigma })
                .collect(),
            seed: 0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::Invalid("at least 2 folds are needed".into()));
        }
        if self.repeats == 0 {
            return Err(Error::Invalid("at least one repeat is needed".into()));
        }
        if self.c_grid.is_empty() || self.kernels.is_empty() {
            return Err(Error::Invalid("C grid and kernel grid must be nonempty".into()));
        }
        if let Some(c) = self.c_grid.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(Error::Invalid(format!("C must be positive, got {c}")));
        }
        for k in &self.kernels {
            k.validate()?;
        }
        Ok(())
    }
}

/// Pairwise table of one embedding choice, e.g. one walk length.
#[derive(Clone, Debug)]
pub struct EmbeddingVariant {
    pub name: String,
    pub table: PairwiseTable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub repeat: usize,
    pub fold: usize,
    pub accuracy: f64,
    pub variant: String,
    pub kernel: KernelSpec,
    pub c: f64,
    pub validation_accuracy: f64,
    /// Grid points skipped because SMO did not converge.
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: EvalConfig,
    pub variants: Vec<String>,
    pub folds: Vec<FoldRecord>,
    pub mean: f64,
    /// Population standard deviation over all repeat × fold accuracies.
    pub std: f64,
    /// Wall-clock seconds; left out of the serialized report so that
    /// reports of identical runs are identical files.
    #[serde(skip)]
    pub seconds: f64,
}

impl EvalReport {
    /// Mean accuracy of every repeat.
    pub fn repeat_means(&self) -> Vec<f64> {
        (0..self.config.repeats)
            .map(|r| {
                let v: Vec<f64> = self
                    .folds
                    .iter()
                    .filter(|f| f.repeat == r)
                    .map(|f| f.accuracy)
                    .collect();
                v.iter().sum::<f64>() / v.len() as f64
            })
            .collect()
    }
}

/// Fold id of every graph. Each class is shuffled and dealt round-robin,
/// continuing the count across classes, so every fold holds each class's
/// share up to one graph.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64) -> Result<Vec<usize>> {
    let num_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    if let Some((c, m)) = members
        .iter()
        .enumerate()
        .find(|(_, m)| !m.is_empty() && m.len() < folds)
    {
        return Err(Error::Invalid(format!(
            "class {c} has {} graphs, fewer than {folds} folds; use at most {} folds",
            m.len(),
            m.len()
        )));
    }
    let mut rng = rng::stream(seed, &[]);
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for m in &mut members {
        m.shuffle(&mut rng);
        for &i in m.iter() {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

fn accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

/// Fit on `train`, score on `test`. `Ok(None)` when SMO does not converge.
fn fit_score(
    gram: &DenseMatrix,
    labels: &[usize],
    train: &[usize],
    test: &[usize],
    c: f64,
) -> Result<Option<f64>> {
    let train_labels: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
    let model = match svm_train(&gram.select(train, train), &train_labels, c) {
        Ok(m) => m,
        Err(Error::NoConvergence(..)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let pred = svm_predict(&model, &gram.select(test, train))?;
    let truth: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
    Ok(Some(accuracy(&pred, &truth)))
}

/// Repeated stratified k-fold cross-validation.
///
/// For test fold `f` the next fold `(f + 1) mod k` is held out for
/// validation; every (variant, kernel, C) is fit on the remaining folds
/// and scored there. The best one (first in grid order on ties) is refit
/// on all `k - 1` training folds and scored on fold `f`.
pub fn cross_validate(
    labels: &[usize],
    variants: &[EmbeddingVariant],
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    let start = Instant::now();
    cfg.validate()?;
    if variants.is_empty() {
        return Err(Error::Invalid("no embedding variants to evaluate".into()));
    }
    if let Some(v) = variants.iter().find(|v| v.table.len() != labels.len()) {
        return Err(Error::DimensionMismatch(format!(
            "variant {} covers {} graphs, there are {} labels",
            v.name,
            v.table.len(),
            labels.len()
        )));
    }
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Invalid(
            "cross-validation needs at least two classes".into(),
        ));
    }

    // grid in selection order: variant, kernel, C
    let grams: Vec<(usize, KernelSpec, DenseMatrix)> = variants
        .iter()
        .enumerate()
        .flat_map(|(v, var)| cfg.kernels.iter().map(move |k| (v, *k, var)))
        .map(|(v, k, var)| Ok((v, k, var.table.gram(k)?.values)))
        .collect::<Result<_>>()?;

    let k = cfg.folds;
    let assignments: Vec<Vec<usize>> = (0..cfg.repeats)
        .map(|r| stratified_folds(labels, k, derive_seed(cfg.seed, &[r as u64])))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.repeats)
        .flat_map(|r| (0..k).map(move |f| (r, f)))
        .collect();

    let folds = jobs
        .par_iter()
        .map(|&(r, f)| -> Result<FoldRecord> {
            let fold_of = &assignments[r];
            let v = (f + 1) % k;
            let pick = |keep: &dyn Fn(usize) -> bool| -> Vec<usize> {
                (0..labels.len()).filter(|&i| keep(fold_of[i])).collect()
            };
            let test = pick(&|x| x == f);
            let valid = pick(&|x| x == v);
            let inner = pick(&|x| x != f && x != v);
            let train = pick(&|x| x != f);

            let mut best: Option<(f64, usize, f64)> = None;
            let mut skipped = 0;
            for (g, (_, _, gram)) in grams.iter().enumerate() {
                for &c in &cfg.c_grid {
                    match fit_score(gram, labels, &inner, &valid, c)? {
                        Some(acc) if best.is_none_or(|(b, _, _)| acc > b) => best = Some((acc, g, c)),
                        Some(_) => {}
                        None => skipped += 1,
                    }
                }
            }
            let (validation_accuracy, g, c) = best.ok_or_else(|| {
                Error::Numeric(format!("repeat {r}, fold {f}: SMO failed for every grid point"))
            })?;
            let (var, kernel, gram) = &grams[g];
            let accuracy = fit_score(gram, labels, &train, &test, c)?.ok_or_else(|| {
                Error::Numeric(format!("repeat {r}, fold {f}: SMO did not converge on refit"))
            })?;
            Ok(FoldRecord {
                repeat: r,
                fold: f,
                accuracy,
                variant: variants[*var].name.clone(),
                kernel: *kernel,
                c,
                validation_accuracy,
                skipped,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let n = folds.len() as f64;
    let mean = folds.iter().map(|f| f.accuracy).sum::<f64>() / n;
    let std = (folds.iter().map(|f| (f.accuracy - mean).powi(2)).sum::<f64>() / n).sqrt();
    log::info!("cross-validation: {:.2}% ± {:.2}", 100.0 * mean, 100.0 * std);
    Ok(EvalReport {
        config: cfg.clone(),
        variants: variants.iter().map(|v| v.name.clone()).collect(),
        folds,
        mean,
        std,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::EmbeddingFingerprint;

    fn blobs(n_per: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        use rand::Rng;
        let mut rng = rng::stream(seed, &[]);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for class in 0..2 {
            for _ in 0..n_per {
                let c = if class == 0 { -2.0 } else { 2.0 };
                x.push(vec![c + rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
                y.push(class);
            }
        }
        (x, y)
    }

    fn variant(x: &[Vec<f64>]) -> EmbeddingVariant {
        EmbeddingVariant {
            name: "blobs".into(),
            table: PairwiseTable::from_dense(
                x,
                EmbeddingFingerprint {
                    mode: "test".into(),
                    length: None,
                    dim: 2,
                },
            )
            .unwrap(),
        }
    }

    fn small() -> EvalConfig {
        EvalConfig {
            folds: 5,
            repeats: 3,
            c_grid: vec![0.1, 1.0],
            kernels: vec![KernelSpec::Inner, KernelSpec::Rbf { sigma: 1.0 }],
            seed: 4,
        }
    }

    #[test]
    fn folds_are_stratified_partitions() {
        let labels: Vec<usize> = (0..53).map(|i| if i % 3 == 0 { 1 } else { 0 }).collect();
        let a = stratified_folds(&labels, 10, 7).unwrap();
        for f in 0..10 {
            for c in 0..2 {
                let total = labels.iter().filter(|&&l| l == c).count() as f64;
                let inside = (0..53).filter(|&i| a[i] == f && labels[i] == c).count() as f64;
                assert!((inside - total / 10.0).abs() <= 1.0);
            }
        }
        assert!(stratified_folds(&[0, 0, 1, 1, 1], 3, 0).is_err());
    }

    #[test]
    fn separable_blobs_score_perfectly() {
        let (x, y) = blobs(20, 1);
        let r = cross_validate(&y, &[variant(&x)], &small()).unwrap();
        assert_eq!(r.folds.len(), 15);
        assert_eq!(r.mean, 1.0);
        assert_eq!(r.std, 0.0);
    }

    #[test]
    fn deterministic_and_consistent() {
        let (x, mut y) = blobs(15, 2);
        y.shuffle(&mut rng::stream(3, &[]));
        let a = cross_validate(&y, &[variant(&x)], &small()).unwrap();
        let b = cross_validate(&y, &[variant(&x)], &small()).unwrap();
        assert_eq!(a.folds, b.folds);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let mean = a.folds.iter().map(|f| f.accuracy).sum::<f64>() / 15.0;
        assert!((mean - a.mean).abs() < 1e-12);
        assert!(a.folds.iter().all(|f| (0.0..=1.0).contains(&f.accuracy)));
        let rm = a.repeat_means();
        assert!((rm.iter().sum::<f64>() / 3.0 - a.mean).abs() < 1e-12);
    }
}
