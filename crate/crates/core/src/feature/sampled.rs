use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use super::{EmbeddingMode, FeatureEmbedding, SamplingPlan};
use crate::error::{Error, Result};
use crate::kernel::SparseVector;
use crate::rng;
use crate::walk::{Anonymizer, RandomWalkGraph, WalkVocabulary};

/// Walks per independently seeded batch. Fixed, so sample `j` always comes
/// from the same stream and a longer run extends a shorter one.
const BATCH: u64 = 1 << 16;

/// Walks advanced together by one sampler.
const GROUP: usize = 4;

/// Vocabularies up to this size are counted in a dense array.
const DENSE_LIMIT: usize = 1 << 22;

enum Counts {
    Dense(Vec<u64>),
    Sparse(HashMap<usize, u64>),
}

impl Counts {
    fn new(eta: usize) -> Self {
        if eta <= DENSE_LIMIT {
            Counts::Dense(vec![0; eta])
        } else {
            Counts::Sparse(HashMap::new())
        }
    }

    #[inline]
    fn add(&mut self, index: usize, count: u64) {
        match self {
            Counts::Dense(v) => v[index] += count,
            Counts::Sparse(m) => *m.entry(index).or_insert(0) += count,
        }
    }

    fn merge(mut self, other: Counts) -> Counts {
        match other {
            Counts::Dense(v) => {
                for (i, c) in v.into_iter().enumerate().filter(|(_, c)| *c > 0) {
                    self.add(i, c);
                }
            }
            Counts::Sparse(m) => {
                for (i, c) in m {
                    self.add(i, c);
                }
            }
        }
        self
    }

    fn into_sorted(self) -> Vec<(usize, u64)> {
        match self {
            Counts::Dense(v) => v.into_iter().enumerate().filter(|(_, c)| *c > 0).collect(),
            Counts::Sparse(m) => {
                let mut v: Vec<_> = m.into_iter().collect();
                v.sort_unstable();
                v
            }
        }
    }
}

/// Empirical anonymous-walk distribution from `plan.samples` walks, each
/// started at a uniformly chosen startable node.
///
/// Deterministic for a fixed seed and independent of the thread count;
/// the first `k` samples of a run with `m > k` samples are exactly the
/// samples of a run with `k`.
pub fn sampled_embedding(
    rwg: &RandomWalkGraph,
    vocab: &WalkVocabulary,
    plan: &SamplingPlan,
    seed: u64,
) -> Result<FeatureEmbedding> {
    let starts = rwg.startable_nodes();
    if starts.is_empty() {
        return Err(Error::Invalid("graph has no node with outgoing arcs".into()));
    }
    let m = plan.samples;
    let eta = vocab.len();
    let batches = m.div_ceil(BATCH);

    let counts = (0..batches)
        .into_par_iter()
        .map(|b| -> Result<Counts> {
            let mut rng = rng::stream(seed, &[b]);
            let size = BATCH.min(m - b * BATCH);
            let mut counts = Counts::new(eta);
            let mut an = [0; GROUP].map(|_| Anonymizer::new(rwg.node_count()));
            // a trailing partial group is still drawn in full, so sample j
            // never depends on how many follow it
            for g in 0..size.div_ceil(GROUP as u64) {
                let group = [0; GROUP].map(|_| starts[rng.random_range(0..starts.len())]);
                let walks = rwg.sample_group(vocab, group, &mut rng, &mut an)?;
                let keep = (size - g * GROUP as u64).min(GROUP as u64) as usize;
                for &w in &walks[..keep] {
                    counts.add(w, 1);
                }
            }
            Ok(counts)
        })
        .try_reduce(|| Counts::new(eta), |a, b| Ok(a.merge(b)))?;

    let total = m as f64;
    let entries = counts
        .into_sorted()
        .into_iter()
        .map(|(i, c)| (i, c as f64 / total))
        .collect();
    Ok(FeatureEmbedding {
        length: vocab.length(),
        mode: EmbeddingMode::Sampled { samples: m, seed },
        values: SparseVector::new(eta, entries)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::{exact_embedding, l1_distance};
    use crate::graph::{complete, cycle, path, Graph};
    use crate::walk::enumerate_vocabulary;

    fn sample(g: &Graph, l: usize, m: u64, seed: u64) -> FeatureEmbedding {
        sampled_embedding(
            &RandomWalkGraph::new(g),
            &enumerate_vocabulary(l).unwrap(),
            &SamplingPlan::fixed(m).unwrap(),
            seed,
        )
        .unwrap()
    }

    #[test]
    fn forced_walk() {
        assert_eq!(sample(&path(2).unwrap(), 2, 777, 1).to_dense(), vec![1.0, 0.0]);
    }

    #[test]
    fn components_are_counts_over_m() {
        let m = 1001;
        let e = sample(&cycle(5).unwrap(), 4, m, 9);
        let total: u64 = e
            .values
            .iter()
            .map(|(_, v)| {
                let c = v * m as f64;
                assert_eq!(c, c.round());
                c as u64
            })
            .sum();
        assert_eq!(total, m);
    }

    #[test]
    fn triangle_close_to_exact() {
        let g = complete(3).unwrap();
        let exact = exact_embedding(&RandomWalkGraph::new(&g), &enumerate_vocabulary(2).unwrap()).unwrap();
        let e = sample(&g, 2, 10_000, 4);
        assert!(l1_distance(&e, &exact).unwrap() < 0.05);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let g = Graph::undirected(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
        assert_eq!(sample(&g, 5, 70_000, 3), sample(&g, 5, 70_000, 3));
        assert_ne!(sample(&g, 5, 70_000, 3), sample(&g, 5, 70_000, 4));
    }

    #[test]
    fn dead_end_propagates() {
        let g = Graph::from_edges(3, true, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let rwg = RandomWalkGraph::new(&g);
        let err = sampled_embedding(
            &rwg,
            &enumerate_vocabulary(3).unwrap(),
            &SamplingPlan::fixed(10).unwrap(),
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DeadEnd { node: 2 }));
    }

    #[test]
    fn error_decreases_with_more_samples() {
        // median over seeds of the L1 error at m = 100, 1000, 10000
        let g = Graph::undirected(
            6,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3), (1, 4)],
        )
        .unwrap();
        let vocab = enumerate_vocabulary(4).unwrap();
        let rwg = RandomWalkGraph::new(&g);
        let exact = exact_embedding(&rwg, &vocab).unwrap();
        let mut medians = Vec::new();
        for m in [100, 1000, 10_000] {
            let mut errs: Vec<f64> = (0..21)
                .map(|s| {
                    let e = sampled_embedding(&rwg, &vocab, &SamplingPlan::fixed(m).unwrap(), s).unwrap();
                    l1_distance(&e, &exact).unwrap()
                })
                .collect();
            errs.sort_by(f64::total_cmp);
            medians.push(errs[10]);
        }
        assert!(
            medians[0] >= medians[1] && medians[1] >= medians[2],
            "{medians:?}"
        );
    }
}
