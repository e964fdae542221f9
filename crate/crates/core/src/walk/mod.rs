//! Random walk graphs, anonymous walks and the walk vocabulary.

mod alias;
mod anonymous;
mod vocab;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub use alias::AliasTable;
pub use anonymous::{anonymize, AnonymousWalk};
pub use vocab::{enumerate_vocabulary, WalkVocabulary, MAX_ENUMERATION_LENGTH};

pub(crate) use vocab::RankCursor;

/// Alias slot with both outcomes resolved to node ids.
#[derive(Clone, Copy, Debug)]
struct Slot {
    threshold: u64,
    keep: u32,
    alias: u32,
}

/// Hands out 32 random bits at a time, two per 64-bit draw.
struct HalfWords {
    word: u64,
    full: bool,
}

impl HalfWords {
    #[inline]
    fn next<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> u32 {
        if self.full {
            self.full = false;
            self.word as u32
        } else {
            self.word = rng.next_u64();
            self.full = true;
            (self.word >> 32) as u32
        }
    }
}

/// Transition structure of a graph: arc weights normalized per source node
/// into probabilities, with an alias table per node.
#[derive(Clone, Debug)]
pub struct RandomWalkGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    probs: Vec<f64>,
    tables: Vec<AliasTable>,
    slots: Vec<Slot>,
    startable: Vec<usize>,
    max_in_degree: usize,
    max_out_degree: usize,
}

pub fn build_random_walk_graph(graph: &Graph) -> RandomWalkGraph {
    RandomWalkGraph::new(graph)
}

impl RandomWalkGraph {
    pub fn new(graph: &Graph) -> Self {
        let n = graph.node_count();
        let mut offsets = vec![0usize; n + 1];
        for a in graph.arcs() {
            offsets[a.source + 1] += 1;
        }
        for u in 0..n {
            offsets[u + 1] += offsets[u];
        }
        // arcs are sorted by (source, target)
        let targets: Vec<u32> = graph.arcs().iter().map(|a| a.target as u32).collect();
        let weights: Vec<f64> = graph.arcs().iter().map(|a| a.weight).collect();

        let mut probs = Vec::with_capacity(weights.len());
        let mut tables = Vec::with_capacity(n);
        for u in 0..n {
            let w = &weights[offsets[u]..offsets[u + 1]];
            // Sum in sorted order so the normalizer does not depend on how
            // neighbors happen to be numbered.
            let mut sorted = w.to_vec();
            sorted.sort_by(f64::total_cmp);
            let total: f64 = sorted.iter().sum();
            let p: Vec<f64> = w.iter().map(|x| x / total).collect();
            tables.push(AliasTable::new(&p));
            probs.extend(p);
        }
        let mut slots = Vec::with_capacity(targets.len());
        for (u, t) in tables.iter().enumerate() {
            let nbrs = &targets[offsets[u]..offsets[u + 1]];
            slots.extend(t.slots().enumerate().map(|(i, (threshold, a))| Slot {
                threshold,
                keep: nbrs[i],
                alias: nbrs[a as usize],
            }));
        }
        let startable = (0..n).filter(|&u| offsets[u + 1] > offsets[u]).collect();
        let out = graph.out_degrees();
        let inn = graph.in_degrees();
        RandomWalkGraph {
            offsets,
            targets,
            probs,
            tables,
            slots,
            startable,
            max_in_degree: inn.into_iter().max().unwrap_or(0),
            max_out_degree: out.into_iter().max().unwrap_or(0),
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Transition probabilities, aligned with [`neighbors`](Self::neighbors).
    pub fn probabilities(&self, u: usize) -> &[f64] {
        &self.probs[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn alias_table(&self, u: usize) -> &AliasTable {
        &self.tables[u]
    }

    pub fn is_startable(&self, u: usize) -> bool {
        self.offsets[u + 1] > self.offsets[u]
    }

    /// Nodes with at least one outgoing arc, ascending.
    pub fn startable_nodes(&self) -> &[usize] {
        &self.startable
    }

    pub fn max_in_degree(&self) -> usize {
        self.max_in_degree
    }

    pub fn max_out_degree(&self) -> usize {
        self.max_out_degree
    }

    #[inline]
    pub fn step<R: RngCore + ?Sized>(&self, u: usize, rng: &mut R) -> Option<usize> {
        self.step_with(u, (rng.next_u64() >> 32) as u32)
    }

    /// One step from 32 random bits. The high part of `bits * degree`
    /// picks the slot and the low part serves as the coin, which leaves
    /// the coin `32 - log2(degree)` bits of resolution.
    #[inline]
    fn step_with(&self, u: usize, bits: u32) -> Option<usize> {
        let (lo, hi) = (self.offsets[u], self.offsets[u + 1]);
        if lo == hi {
            return None;
        }
        let x = bits as u64 * (hi - lo) as u64;
        let slot = &self.slots[lo + (x >> 32) as usize];
        Some(if (x & 0xffff_ffff) < slot.threshold {
            slot.keep
        } else {
            slot.alias
        } as usize)
    }

    /// Random walk with `length` edges (`length + 1` nodes) from `start`.
    pub fn sample_walk<R: RngCore + ?Sized>(
        &self,
        start: usize,
        length: usize,
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        if start >= self.node_count() {
            return Err(Error::Invalid(format!("start node {start} out of range")));
        }
        let mut walk = Vec::with_capacity(length + 1);
        walk.push(start);
        let mut u = start;
        let mut bits = HalfWords { word: 0, full: false };
        for _ in 0..length {
            u = self
                .step_with(u, bits.next(rng))
                .ok_or_else(|| Error::DeadEnd { node: u })?;
            walk.push(u);
        }
        Ok(walk)
    }

    /// Sample a walk from `start` and return the vocabulary index of its
    /// anonymous walk, without materializing either sequence.
    pub fn sample_walk_index<R: RngCore + ?Sized>(
        &self,
        vocab: &WalkVocabulary,
        start: usize,
        rng: &mut R,
    ) -> Result<usize> {
        self.sample_index_with(vocab, start, rng, &mut Anonymizer::new(self.node_count()))
    }

    /// [`sample_walk_index`](Self::sample_walk_index) reusing a scratch
    /// anonymizer sized for this graph.
    #[inline]
    pub(crate) fn sample_index_with<R: RngCore + ?Sized>(
        &self,
        vocab: &WalkVocabulary,
        start: usize,
        rng: &mut R,
        an: &mut Anonymizer,
    ) -> Result<usize> {
        let id = an.begin();
        an.stamp[start] = id;
        an.state[start] = 1;
        let mut cursor = vocab.cursor();
        let mut u = start;
        let mut bits = HalfWords { word: 0, full: false };
        for _ in 0..vocab.length() {
            u = self
                .step_with(u, bits.next(rng))
                .ok_or_else(|| Error::DeadEnd { node: u })?;
            // both loads happen unconditionally so the choice needs no branch
            let (stamp, known) = (an.stamp[u], an.state[u]);
            let state = if stamp == id { known } else { cursor.max + 1 };
            an.stamp[u] = id;
            an.state[u] = state;
            cursor.push(vocab, state);
        }
        Ok(cursor.rank as usize)
    }
}

impl RandomWalkGraph {
    /// `K` walks advanced in lockstep, which lets their memory accesses
    /// overlap. Walk `j` takes the `j`-th 32-bit half of each step's draws.
    #[inline]
    pub(crate) fn sample_group<R: RngCore + ?Sized, const K: usize>(
        &self,
        vocab: &WalkVocabulary,
        starts: [usize; K],
        rng: &mut R,
        an: &mut [Anonymizer; K],
    ) -> Result<[usize; K]> {
        let mut ids = [0u32; K];
        let mut cursors = [vocab.cursor(); K];
        let mut u = starts;
        for j in 0..K {
            ids[j] = an[j].begin();
            an[j].stamp[u[j]] = ids[j];
            an[j].state[u[j]] = 1;
        }
        let mut bits = HalfWords { word: 0, full: false };
        for _ in 0..vocab.length() {
            for j in 0..K {
                u[j] = self
                    .step_with(u[j], bits.next(rng))
                    .ok_or_else(|| Error::DeadEnd { node: u[j] })?;
            }
            for j in 0..K {
                let a = &mut an[j];
                let (stamp, known) = (a.stamp[u[j]], a.state[u[j]]);
                let state = if stamp == ids[j] {
                    known
                } else {
                    cursors[j].max + 1
                };
                a.stamp[u[j]] = ids[j];
                a.state[u[j]] = state;
                cursors[j].push(vocab, state);
            }
        }
        Ok(cursors.map(|c| c.rank as usize))
    }
}

/// Per-node first-visit states of the walk in progress. A node's entry is
/// valid only while its stamp matches the current walk.
pub(crate) struct Anonymizer {
    stamp: Vec<u32>,
    state: Vec<u32>,
    walk: u32,
}

impl Anonymizer {
    pub(crate) fn new(nodes: usize) -> Self {
        Anonymizer {
            stamp: vec![0; nodes],
            state: vec![0; nodes],
            walk: 0,
        }
    }

    fn begin(&mut self) -> u32 {
        self.walk = self.walk.wrapping_add(1);
        if self.walk == 0 {
            self.stamp.fill(0);
            self.walk = 1;
        }
        self.walk
    }
}
