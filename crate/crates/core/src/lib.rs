//! Whole-graph embeddings built from anonymous walks.
//!
//! Two families of graph vectors are provided:
//!
//! * feature-based: the distribution of anonymous walks of a fixed length,
//!   computed exactly by enumeration or estimated by sampling
//!   ([`feature`]);
//! * data-driven: graph vectors learned jointly with walk vectors by
//!   predicting a target walk from co-occurring walks ([`train`]).
//!
//! Either kind can be turned into a graph kernel ([`kernel`]) and fed to a
//! one-vs-one kernel SVM ([`svm`]). [`eval`] runs repeated stratified
//! cross-validation and the Erdős–Rényi timing experiment.

pub mod error;
pub mod eval;
pub mod export;
pub mod feature;
pub mod graph;
pub mod kernel;
pub mod rng;
pub mod svm;
pub mod train;
pub mod walk;

pub use error::{Error, Result};
pub use feature::{
    exact_embedding, l1_distance, required_samples, sampled_embedding, FeatureEmbedding, SamplingPlan,
};
pub use graph::{Graph, GraphCollection};
pub use kernel::{gram, kernel_value, GramMatrix, KernelSpec};
pub use svm::{svm_predict, svm_train, SvmModel};
pub use walk::{anonymize, enumerate_vocabulary, AnonymousWalk, RandomWalkGraph, WalkVocabulary};
