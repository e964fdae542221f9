//! Walker/Vose alias tables.

use rand::RngCore;

const SCALE: f64 = 4_294_967_296.0; // 2^32

/// Constant-time sampler for a fixed discrete distribution.
///
/// Slot `i` keeps itself with probability `threshold[i] / 2^32` and
/// otherwise yields `alias[i]`. One 64-bit draw picks both the slot (high
/// half) and the coin (low half).
#[derive(Clone, Debug, PartialEq)]
pub struct AliasTable {
    threshold: Vec<u64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// Build from probabilities that sum to one.
    pub fn new(probs: &[f64]) -> Self {
        let n = probs.len();
        let mut scaled: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
        let mut threshold = vec![1u64 << 32; n];
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| scaled[i] < 1.0);

        while let (Some(s), Some(&l)) = (small.pop(), large.last()) {
            threshold[s] = (scaled[s] * SCALE).round() as u64;
            alias[s] = l as u32;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in small.into_iter().chain(large) {
            threshold[i] = 1 << 32;
        }
        AliasTable { threshold, alias }
    }

    pub fn len(&self) -> usize {
        self.threshold.len()
    }

    pub fn is_empty(&self) -> bool {
        self.threshold.is_empty()
    }

    /// Draw an index in `0..len()`. The table must be non-empty.
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> usize {
        let r = rng.next_u64();
        let slot = (((r >> 32) * self.threshold.len() as u64) >> 32) as usize;
        if (r & 0xffff_ffff) < self.threshold[slot] {
            slot
        } else {
            self.alias[slot] as usize
        }
    }

    pub(crate) fn slots(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.threshold.iter().copied().zip(self.alias.iter().copied())
    }

    /// The distribution the table actually samples from.
    pub fn implied_probabilities(&self) -> Vec<f64> {
        let n = self.len() as f64;
        let mut p = vec![0.0; self.len()];
        for (i, (&t, &a)) in self.threshold.iter().zip(&self.alias).enumerate() {
            let keep = t as f64 / SCALE;
            p[i] += keep / n;
            p[a as usize] += (1.0 - keep) / n;
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn degenerate_distribution() {
        let t = AliasTable::new(&[1.0]);
        let mut rng = crate::rng::stream(0, &[]);
        for _ in 0..100 {
            assert_eq!(t.sample(&mut rng), 0);
        }
    }

    #[test]
    fn empirical_frequencies() {
        let probs = [0.25, 0.25, 0.5];
        let t = AliasTable::new(&probs);
        let mut rng = crate::rng::stream(3, &[]);
        let mut counts = [0usize; 3];
        let n = 100_000;
        for _ in 0..n {
            counts[t.sample(&mut rng)] += 1;
        }
        for (c, p) in counts.iter().zip(probs) {
            assert!((*c as f64 / n as f64 - p).abs() < 0.01);
        }
    }

    proptest! {
        #[test]
        fn table_reproduces_distribution(weights in prop::collection::vec(0.01f64..10.0, 1..40)) {
            let total: f64 = weights.iter().sum();
            let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
            let t = AliasTable::new(&probs);
            for (a, b) in t.implied_probabilities().iter().zip(&probs) {
                prop_assert!((a - b).abs() < 1e-8);
            }
        }
    }
}
