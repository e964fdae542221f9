use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::GraphCollection;
use crate::rng::{self, derive_seed};
use crate::walk::{Anonymizer, RandomWalkGraph, WalkVocabulary};

/// Walk-id sequences of one graph: `walks_per_node` anonymous walks from
/// every startable node, in sampling order.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    length: usize,
    eta: usize,
    walks_per_node: usize,
    sequences: Vec<Vec<usize>>,
}

impl Corpus {
    /// Walk length `l` of the vocabulary the ids refer to.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn vocabulary_size(&self) -> usize {
        self.eta
    }

    pub fn walks_per_node(&self) -> usize {
        self.walks_per_node
    }

    /// One sequence per startable node, ordered by node id.
    pub fn sequences(&self) -> &[Vec<usize>] {
        &self.sequences
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }
}

/// Sample `walks_per_node` walks from each startable node. Node `u` draws
/// from its own stream, so the result does not depend on the thread count.
pub fn build_corpus(
    rwg: &RandomWalkGraph,
    vocab: &WalkVocabulary,
    walks_per_node: usize,
    seed: u64,
) -> Result<Corpus> {
    if walks_per_node == 0 {
        return Err(Error::Invalid("walks per node must be at least 1".into()));
    }
    let sequences = rwg
        .startable_nodes()
        .par_iter()
        .map_init(
            || Anonymizer::new(rwg.node_count()),
            |an, &u| {
                let mut rng = rng::stream(seed, &[u as u64]);
                (0..walks_per_node)
                    .map(|_| rwg.sample_index_with(vocab, u, &mut rng, an))
                    .collect::<Result<Vec<_>>>()
            },
        )
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus {
        length: vocab.length(),
        eta: vocab.len(),
        walks_per_node,
        sequences,
    })
}

/// One corpus per graph; graph `i` is seeded with `derive_seed(seed, [i])`.
pub fn build_corpora(
    collection: &GraphCollection,
    vocab: &WalkVocabulary,
    walks_per_node: usize,
    seed: u64,
) -> Result<Vec<Corpus>> {
    collection
        .graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let rwg = RandomWalkGraph::new(g);
            let corpus = build_corpus(&rwg, vocab, walks_per_node, derive_seed(seed, &[i as u64]))?;
            if corpus.is_empty() {
                log::warn!("graph {i} has no edges; its vector stays at initialization");
            }
            Ok(corpus)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, path};
    use crate::walk::enumerate_vocabulary;

    #[test]
    fn shape() {
        let c = build_corpus(
            &RandomWalkGraph::new(&cycle(5).unwrap()),
            &enumerate_vocabulary(4).unwrap(),
            20,
            1,
        )
        .unwrap();
        assert_eq!(c.sequences().len(), 5);
        assert!(c
            .sequences()
            .iter()
            .all(|s| s.len() == 20 && s.iter().all(|&i| i < 15)));
    }

    #[test]
    fn forced_walk() {
        let c = build_corpus(
            &RandomWalkGraph::new(&path(2).unwrap()),
            &enumerate_vocabulary(2).unwrap(),
            10,
            3,
        )
        .unwrap();
        assert!(c.sequences().iter().flatten().all(|&i| i == 0));
    }

    #[test]
    fn triangle_frequency() {
        let c = build_corpus(
            &RandomWalkGraph::new(&complete(3).unwrap()),
            &enumerate_vocabulary(2).unwrap(),
            10_000,
            5,
        )
        .unwrap();
        let all: Vec<usize> = c.sequences().iter().flatten().copied().collect();
        let freq = all.iter().filter(|&&i| i == 0).count() as f64 / all.len() as f64;
        assert!((freq - 0.5).abs() < 0.02, "{freq}");
    }

    #[test]
    fn deterministic() {
        let rwg = RandomWalkGraph::new(&complete(6).unwrap());
        let v = enumerate_vocabulary(5).unwrap();
        assert_eq!(
            build_corpus(&rwg, &v, 30, 8).unwrap(),
            build_corpus(&rwg, &v, 30, 8).unwrap()
        );
        assert!(build_corpus(&rwg, &v, 0, 8).is_err());
    }
}
