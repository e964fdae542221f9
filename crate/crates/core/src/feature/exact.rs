use rayon::prelude::*;

use super::{EmbeddingMode, FeatureEmbedding};
use crate::error::{Error, Result};
use crate::kernel::SparseVector;
use crate::walk::{RandomWalkGraph, RankCursor, WalkVocabulary, MAX_ENUMERATION_LENGTH};

pub const DEFAULT_WALK_BUDGET: f64 = 1e8;

/// Upper bound on the number of walks with `length` edges:
/// `n · (d_in_max · d_out_max)^(length / 2)`.
pub fn estimate_walk_count(rwg: &RandomWalkGraph, length: usize) -> f64 {
    let degrees = (rwg.max_in_degree() * rwg.max_out_degree()) as f64;
    rwg.node_count() as f64 * degrees.powf(length as f64 / 2.0)
}

pub fn exact_embedding(rwg: &RandomWalkGraph, vocab: &WalkVocabulary) -> Result<FeatureEmbedding> {
    exact_embedding_with_budget(rwg, vocab, DEFAULT_WALK_BUDGET)
}

/// Enumerate every walk from every startable node and add up walk
/// probabilities per anonymous walk, averaged over startable nodes.
///
/// Partial sums are accumulated in sorted order, so the result is bit-equal
/// under any renumbering of the nodes. Walks that hit a node without
/// outgoing arcs are dropped.
pub fn exact_embedding_with_budget(
    rwg: &RandomWalkGraph,
    vocab: &WalkVocabulary,
    budget: f64,
) -> Result<FeatureEmbedding> {
    let estimate = estimate_walk_count(rwg, vocab.length());
    if estimate > budget {
        return Err(Error::CostGuard { estimate, budget });
    }
    let starts = rwg.startable_nodes();
    let per_node: Vec<Vec<(usize, f64)>> = starts
        .par_iter()
        .map(|&u| {
            let mut walks = Vec::new();
            let mut seen = [0usize; MAX_ENUMERATION_LENGTH + 1];
            seen[0] = u;
            enumerate(rwg, vocab, u, 1.0, vocab.cursor(), &mut seen, 1, &mut walks);
            sum_sorted(walks)
        })
        .collect();

    let mut entries = sum_sorted(per_node.into_iter().flatten().collect());
    let n = starts.len().max(1) as f64;
    for e in &mut entries {
        e.1 /= n;
    }
    Ok(FeatureEmbedding {
        length: vocab.length(),
        mode: EmbeddingMode::Exact,
        values: SparseVector::new(vocab.len(), entries)?,
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    rwg: &RandomWalkGraph,
    vocab: &WalkVocabulary,
    u: usize,
    prob: f64,
    cursor: RankCursor,
    seen: &mut [usize; MAX_ENUMERATION_LENGTH + 1],
    distinct: usize,
    out: &mut Vec<(usize, f64)>,
) {
    if cursor.remaining == 0 {
        out.push((cursor.rank as usize, prob));
        return;
    }
    for (&v, &p) in rwg.neighbors(u).iter().zip(rwg.probabilities(u)) {
        let v = v as usize;
        let (state, next_distinct) = match seen[..distinct].iter().position(|&s| s == v) {
            Some(i) => (i as u32 + 1, distinct),
            None => {
                seen[distinct] = v;
                (distinct as u32 + 1, distinct + 1)
            }
        };
        let mut next = cursor;
        next.push(vocab, state);
        enumerate(rwg, vocab, v, prob * p, next, seen, next_distinct, out);
    }
}

/// Sort `(index, value)` pairs by index then value and sum equal indices.
fn sum_sorted(mut items: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    items.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, v) in items {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += v,
            _ => out.push((i, v)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, generate_erdos_renyi, path, Graph};
    use crate::walk::enumerate_vocabulary;
    use proptest::prelude::*;

    fn embed(g: &Graph, l: usize) -> FeatureEmbedding {
        exact_embedding(&RandomWalkGraph::new(g), &enumerate_vocabulary(l).unwrap()).unwrap()
    }

    #[test]
    fn triangle_length_two() {
        let e = embed(&complete(3).unwrap(), 2);
        assert_eq!(e.to_dense(), vec![0.5, 0.5]);
    }

    #[test]
    fn single_edge_length_two() {
        let e = embed(&path(2).unwrap(), 2);
        assert_eq!(e.to_dense(), vec![1.0, 0.0]);
    }

    #[test]
    fn vertex_transitive_graph_matches_any_node() {
        let g = cycle(7).unwrap();
        let rwg = RandomWalkGraph::new(&g);
        let vocab = enumerate_vocabulary(5).unwrap();
        let whole = exact_embedding(&rwg, &vocab).unwrap().to_dense();
        // single-node distribution from node 3
        let mut walks = Vec::new();
        let mut seen = [0usize; MAX_ENUMERATION_LENGTH + 1];
        seen[0] = 3;
        enumerate(&rwg, &vocab, 3, 1.0, vocab.cursor(), &mut seen, 1, &mut walks);
        let mut node = vec![0.0; vocab.len()];
        for (i, p) in sum_sorted(walks) {
            node[i] = p;
        }
        for (a, b) in whole.iter().zip(&node) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn cost_guard_trips_on_dense_graph() {
        let g = complete(30).unwrap();
        let rwg = RandomWalkGraph::new(&g);
        let err = exact_embedding(&rwg, &enumerate_vocabulary(12).unwrap()).unwrap_err();
        assert!(matches!(err, Error::CostGuard { .. }));
        assert!(err.to_string().contains("sampled mode"));
    }

    #[test]
    fn isolated_nodes_do_not_count() {
        let with = Graph::undirected(5, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let without = complete(3).unwrap();
        assert_eq!(embed(&with, 3), embed(&without, 3));
    }

    proptest! {
        #[test]
        fn permutation_invariant_bit_equal(seed in 0u64..500, n in 3usize..9, l in 1usize..5) {
            let g = generate_erdos_renyi(n, 0.5, seed).unwrap();
            let mut perm: Vec<usize> = (0..n).collect();
            use rand::seq::SliceRandom;
            perm.shuffle(&mut crate::rng::stream(seed, &[1]));
            let a = embed(&g, l);
            let b = embed(&g.permuted(&perm).unwrap(), l);
            prop_assert_eq!(a.to_dense(), b.to_dense());
        }

        #[test]
        fn sums_to_one(seed in 0u64..500, n in 2usize..9, l in 1usize..5) {
            let g = generate_erdos_renyi(n, 0.6, seed).unwrap();
            prop_assume!(g.edge_count() > 0);
            let e = embed(&g, l);
            prop_assert!((e.sum() - 1.0).abs() < 1e-9);
        }
    }
}
