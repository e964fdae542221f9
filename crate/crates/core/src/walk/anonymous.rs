use std::fmt;

use serde::{Deserialize, Serialize};

/// A walk with node identities replaced by first-occurrence ranks.
///
/// States start at 1 and every new node gets the current maximum plus one,
/// so `a -> b -> c -> b -> c` becomes `1 2 3 2 3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AnonymousWalk(Vec<u32>);

impl AnonymousWalk {
    /// Wrap a state sequence, checking that it is a valid anonymous walk
    /// (starts at 1, never jumps more than one above the running maximum).
    pub fn from_states(states: Vec<u32>) -> Option<Self> {
        let mut max = 0;
        for &s in &states {
            if s == 0 || s > max + 1 {
                return None;
            }
            max = max.max(s);
        }
        (!states.is_empty()).then_some(AnonymousWalk(states))
    }

    pub fn states(&self) -> &[u32] {
        &self.0
    }

    /// Number of edges in the walk.
    pub fn length(&self) -> usize {
        self.0.len() - 1
    }

    pub fn distinct_states(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn has_consecutive_repeat(&self) -> bool {
        self.0.windows(2).any(|w| w[0] == w[1])
    }
}

impl fmt::Display for AnonymousWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Map a walk over arbitrary node names to its anonymous walk.
pub fn anonymize<T: PartialEq>(walk: &[T]) -> AnonymousWalk {
    let mut seen: Vec<&T> = Vec::new();
    let states = walk
        .iter()
        .map(|v| match seen.iter().position(|s| *s == v) {
            Some(i) => i as u32 + 1,
            None => {
                seen.push(v);
                seen.len() as u32
            }
        })
        .collect();
    AnonymousWalk(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn aw(s: &[u32]) -> AnonymousWalk {
        AnonymousWalk::from_states(s.to_vec()).unwrap()
    }

    #[test]
    fn walks_from_the_figure() {
        assert_eq!(anonymize(&['a', 'b', 'c', 'b', 'c']), aw(&[1, 2, 3, 2, 3]));
        assert_eq!(anonymize(&['c', 'd', 'b', 'd', 'b']), aw(&[1, 2, 3, 2, 3]));
        assert_eq!(anonymize(&['a', 'b', 'a', 'b', 'd']), aw(&[1, 2, 1, 2, 3]));
    }

    #[test]
    fn validation() {
        assert!(AnonymousWalk::from_states(vec![2, 1]).is_none());
        assert!(AnonymousWalk::from_states(vec![1, 3]).is_none());
        assert!(AnonymousWalk::from_states(vec![]).is_none());
        assert_eq!(aw(&[1, 2, 1]).to_string(), "1 2 1");
    }

    proptest! {
        #[test]
        fn relabeling_invariance(walk in prop::collection::vec(0u32..12, 1..20), shift in 1u32..1000) {
            // injective renaming: u -> u * 7919 + shift
            let renamed: Vec<u32> = walk.iter().map(|u| u * 7919 + shift).collect();
            prop_assert_eq!(anonymize(&walk), anonymize(&renamed));
        }

        #[test]
        fn idempotent(walk in prop::collection::vec(0u32..12, 1..20)) {
            let a = anonymize(&walk);
            prop_assert_eq!(anonymize(a.states()), a.clone());
        }

        #[test]
        fn distinct_counts_agree(walk in prop::collection::vec(0u32..12, 1..20)) {
            let mut distinct = walk.clone();
            distinct.sort();
            distinct.dedup();
            prop_assert_eq!(anonymize(&walk).distinct_states(), distinct.len());
        }
    }
}
