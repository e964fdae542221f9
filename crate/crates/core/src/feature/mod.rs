//! Feature-based embeddings: the distribution of anonymous walks of a
//! fixed length in a graph, exact or estimated from samples.

mod exact;
mod plan;
mod sampled;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphCollection;
use crate::kernel::SparseVector;
use crate::rng::derive_seed;
use crate::walk::{RandomWalkGraph, WalkVocabulary};

pub use exact::{estimate_walk_count, exact_embedding, exact_embedding_with_budget, DEFAULT_WALK_BUDGET};
pub use plan::{required_samples, SamplingPlan};
pub use sampled::sampled_embedding;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingMode {
    Exact,
    Sampled { samples: u64, seed: u64 },
}

/// Probability of every anonymous walk of one length in one graph.
///
/// Stored sparsely; component `i` belongs to vocabulary index `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureEmbedding {
    pub length: usize,
    pub mode: EmbeddingMode,
    pub values: SparseVector,
}

impl FeatureEmbedding {
    /// Vocabulary size η.
    pub fn len(&self) -> usize {
        self.values.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.values.dim() == 0
    }

    pub fn get(&self, index: usize) -> f64 {
        self.values.get(index)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        self.values.to_dense()
    }

    pub fn sum(&self) -> f64 {
        self.values.sum()
    }
}

/// L1 distance between two embeddings over the same vocabulary.
pub fn l1_distance(p: &FeatureEmbedding, q: &FeatureEmbedding) -> Result<f64> {
    if p.length != q.length || p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "embeddings of length {} (η={}) and {} (η={})",
            p.length,
            p.len(),
            q.length,
            q.len()
        )));
    }
    Ok(p.values.l1_distance(&q.values))
}

/// How to embed every graph of a collection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureRecipe {
    Exact { budget: f64 },
    Sampled { samples: u64, seed: u64 },
}

/// Embed all graphs of a collection. In sampled mode graph `i` draws from
/// the stream seeded by `(seed, i)`.
pub fn embed_collection(
    collection: &GraphCollection,
    vocab: &WalkVocabulary,
    recipe: FeatureRecipe,
) -> Result<Vec<FeatureEmbedding>> {
    collection
        .graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let rwg = RandomWalkGraph::new(g);
            match recipe {
                FeatureRecipe::Exact { budget } => exact_embedding_with_budget(&rwg, vocab, budget),
                FeatureRecipe::Sampled { samples, seed } => sampled_embedding(
                    &rwg,
                    vocab,
                    &SamplingPlan::fixed(samples)?,
                    derive_seed(seed, &[i as u64]),
                ),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emb(values: &[f64]) -> FeatureEmbedding {
        FeatureEmbedding {
            length: 2,
            mode: EmbeddingMode::Exact,
            values: SparseVector::from_dense(values),
        }
    }

    #[test]
    fn l1_cases() {
        let p = emb(&[0.3, 0.7]);
        assert_eq!(l1_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(l1_distance(&emb(&[1.0, 0.0]), &emb(&[0.0, 1.0])).unwrap(), 2.0);
        let mut other = emb(&[1.0, 0.0, 0.0]);
        other.length = 3;
        assert!(l1_distance(&p, &other).is_err());
    }
}
