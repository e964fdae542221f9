use std::io::Write;

use super::AnonymousWalk;
use crate::error::{Error, Result};

/// Largest walk length accepted by [`enumerate_vocabulary`].
pub const MAX_ENUMERATION_LENGTH: usize = 16;

/// All anonymous walks with `length` edges, in lexicographic order.
///
/// Walks never repeat a state twice in a row (graphs carry no self-loops).
/// The walks are not materialized: the index of a walk is its
/// lexicographic rank, computed from a table of completion counts, so
/// lookup and reverse lookup are `O(length)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkVocabulary {
    length: usize,
    stride: usize,
    completions: Vec<u64>,
}

pub fn enumerate_vocabulary(length: usize) -> Result<WalkVocabulary> {
    WalkVocabulary::new(length)
}

impl WalkVocabulary {
    pub fn new(length: usize) -> Result<Self> {
        if length == 0 || length > MAX_ENUMERATION_LENGTH {
            return Err(Error::WalkLengthTooLarge {
                length,
                max: MAX_ENUMERATION_LENGTH,
            });
        }
        // completions[r][k]: ways to append r more states when the running
        // maximum is k. Each step may revisit any of the k - 1 states other
        // than the current one, or open state k + 1.
        let stride = length + 3;
        let mut completions = vec![0u64; (length + 1) * stride];
        for k in 0..stride {
            completions[k] = 1;
        }
        for r in 1..=length {
            for k in 1..stride - 1 {
                // cells with large k are unreachable and may saturate
                completions[r * stride + k] = (k as u64 - 1)
                    .saturating_mul(completions[(r - 1) * stride + k])
                    .saturating_add(completions[(r - 1) * stride + k + 1]);
            }
        }
        Ok(WalkVocabulary {
            length,
            stride,
            completions,
        })
    }

    /// Number of edges per walk.
    pub fn length(&self) -> usize {
        self.length
    }

    /// Vocabulary size η.
    pub fn len(&self) -> usize {
        self.completions(self.length, 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub(crate) fn completions(&self, remaining: usize, max: u32) -> u64 {
        self.completions[remaining * self.stride + max as usize]
    }

    pub(crate) fn cursor(&self) -> RankCursor {
        RankCursor {
            rank: 0,
            max: 1,
            last: 1,
            remaining: self.length,
        }
    }

    /// Index of `walk`, or `None` if it is not in the vocabulary.
    pub fn index_of(&self, walk: &AnonymousWalk) -> Option<usize> {
        let states = walk.states();
        if states.len() != self.length + 1 || states[0] != 1 {
            return None;
        }
        let mut cursor = self.cursor();
        for &s in &states[1..] {
            if s == 0 || s == cursor.last || s > cursor.max + 1 {
                return None;
            }
            cursor.push(self, s);
        }
        Some(cursor.rank as usize)
    }

    /// The walk with index `index`.
    pub fn walk(&self, index: usize) -> Option<AnonymousWalk> {
        if index >= self.len() {
            return None;
        }
        let mut rest = index as u64;
        let mut states = vec![1u32];
        let (mut max, mut last) = (1u32, 1u32);
        for remaining in (0..self.length).rev() {
            let mut chosen = None;
            for v in 1..=max + 1 {
                if v == last {
                    continue;
                }
                let block = self.completions(remaining, max.max(v));
                if rest < block {
                    chosen = Some(v);
                    break;
                }
                rest -= block;
            }
            let v = chosen.expect("rank within vocabulary size");
            max = max.max(v);
            last = v;
            states.push(v);
        }
        AnonymousWalk::from_states(states)
    }

    pub fn iter(&self) -> impl Iterator<Item = AnonymousWalk> + '_ {
        (0..self.len()).map(move |i| self.walk(i).expect("index in range"))
    }

    /// One walk per line, states separated by spaces; line `i` holds
    /// index `i - 1`.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for walk in self.iter() {
            writeln!(out, "{walk}")?;
        }
        Ok(())
    }
}

/// Incremental rank of a walk being built state by state.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RankCursor {
    pub rank: u64,
    pub max: u32,
    pub last: u32,
    pub remaining: usize,
}

impl RankCursor {
    /// Append a state. Must differ from the last state and be at most
    /// `max + 1`.
    #[inline]
    pub fn push(&mut self, vocab: &WalkVocabulary, state: u32) {
        debug_assert!(state != self.last && state >= 1 && state <= self.max + 1);
        self.remaining -= 1;
        // Every smaller admissible state keeps the running maximum.
        let smaller = (state - 1) - u32::from(self.last < state);
        self.rank += smaller as u64 * vocab.completions(self.remaining, self.max);
        self.max = self.max.max(state);
        self.last = state;
    }
}
