//! Data-driven embeddings: graph vectors trained together with anonymous
//! walk vectors to predict a walk from the walks sampled around it.

mod checkpoint;
mod corpus;
mod model;
mod sgd;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::GraphCollection;
use crate::rng::derive_seed;
use crate::walk::enumerate_vocabulary;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use corpus::{build_corpora, build_corpus, Corpus};
pub use model::{
    apply_gradients, loss_and_gradients, CandidateSampler, Example, Gradients, GraphVectors, ModelParams,
    Softmax, WalkModel,
};
pub use sgd::{infer_embedding, train, Inferred, TrainConfig, TrainOutcome};

/// Everything needed to go from a collection to data-driven vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataDrivenRecipe {
    /// Walk length `l`.
    pub length: usize,
    /// Walks sampled from every node (`T`).
    pub walks_per_node: usize,
    pub train: TrainConfig,
}

impl Default for DataDrivenRecipe {
    fn default() -> Self {
        DataDrivenRecipe {
            length: 10,
            walks_per_node: 20,
            train: TrainConfig::default(),
        }
    }
}

/// Corpus sampling and joint training over a whole collection.
pub fn embed_collection_dd(collection: &GraphCollection, recipe: &DataDrivenRecipe) -> Result<TrainOutcome> {
    let vocab = enumerate_vocabulary(recipe.length)?;
    let corpora = build_corpora(
        collection,
        &vocab,
        recipe.walks_per_node,
        derive_seed(recipe.train.seed, &[u64::MAX]),
    )?;
    train(&corpora, &recipe.train)
}
