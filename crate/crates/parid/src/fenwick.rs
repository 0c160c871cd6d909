//! Fenwick (binary indexed) tree over `f64` weights with inverse-prefix
//! sampling. This is the dynamic structure behind endpoint selection: point
//! update, append and weighted sampling are all `O(log n)`.
//!
//! Weights are floats because the attachment shift may be irrational. Float
//! updates accumulate drift, so the tree keeps an update counter and can be
//! rebuilt from exact leaf weights; the owner decides when (see the engine).

use rand::Rng;

#[derive(Debug, Clone)]
pub struct SamplerTree {
    // tree[0] unused; tree[i] holds the sum of leaves (i - lsb(i), i].
    tree: Vec<f64>,
    leaves: Vec<f64>,
    updates: u64,
}

#[inline]
fn lsb(i: usize) -> usize {
    i & i.wrapping_neg()
}

impl SamplerTree {
    pub fn from_weights<I: IntoIterator<Item = f64>>(weights: I) -> Self {
        let leaves: Vec<f64> = weights.into_iter().collect();
        let mut t = SamplerTree {
            tree: Vec::new(),
            leaves,
            updates: 0,
        };
        t.build();
        t
    }

    fn build(&mut self) {
        let n = self.leaves.len();
        let mut tree = vec![0.0; n + 1];
        tree[1..].copy_from_slice(&self.leaves);
        for i in 1..=n {
            let j = i + lsb(i);
            if j <= n {
                tree[j] += tree[i];
            }
        }
        self.tree = tree;
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    #[inline]
    pub fn leaf(&self, i: usize) -> f64 {
        self.leaves[i]
    }

    /// Sum of leaves `0..=i` (0-based).
    pub fn prefix_sum(&self, i: usize) -> f64 {
        let mut idx = i + 1;
        let mut s = 0.0;
        while idx > 0 {
            s += self.tree[idx];
            idx -= lsb(idx);
        }
        s
    }

    pub fn total(&self) -> f64 {
        if self.leaves.is_empty() {
            0.0
        } else {
            self.prefix_sum(self.leaves.len() - 1)
        }
    }

    /// Add `delta` to leaf `i`.
    pub fn add(&mut self, i: usize, delta: f64) {
        self.leaves[i] += delta;
        let mut idx = i + 1;
        while idx < self.tree.len() {
            self.tree[idx] += delta;
            idx += lsb(idx);
        }
        self.updates += 1;
    }

    /// Append a new leaf with weight `w`.
    pub fn append(&mut self, w: f64) {
        self.leaves.push(w);
        let p = self.leaves.len(); // 1-based position of the new leaf
        let below = if lsb(p) == 1 {
            0.0
        } else {
            // sum of leaves (p - lsb(p), p - 1] = prefix(p-1) - prefix(p - lsb(p))
            let hi = self.prefix_sum(p - 2);
            let lo = if p - lsb(p) == 0 {
                0.0
            } else {
                self.prefix_sum(p - lsb(p) - 1)
            };
            hi - lo
        };
        self.tree.push(w + below);
        self.updates += 1;
    }

    /// Draw a leaf index with probability proportional to its weight.
    ///
    /// Requires a strictly positive total. Zero-weight leaves are never
    /// returned except on exact floating-point boundaries.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let n = self.leaves.len();
        debug_assert!(n > 0);
        let mut target = rng.random::<f64>() * self.total();
        let mut idx = 0usize;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = idx + step;
            if next <= n && self.tree[next] <= target {
                target -= self.tree[next];
                idx = next;
            }
            step >>= 1;
        }
        // idx = largest index with prefix(idx) <= target; leaf idx covers
        // (prefix(idx), prefix(idx+1)]. Clamp against rounding overrun.
        idx.min(n - 1)
    }

    pub fn updates_since_rebuild(&self) -> u64 {
        self.updates
    }

    /// Rebuild the tree from exact leaf weights supplied by the caller.
    pub fn rebuild_from<I: IntoIterator<Item = f64>>(&mut self, weights: I) {
        self.leaves.clear();
        self.leaves.extend(weights);
        self.build();
        self.updates = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn naive_prefix(leaves: &[f64], i: usize) -> f64 {
        leaves[..=i].iter().sum()
    }

    #[test]
    fn prefix_sums_match_naive() {
        let w = vec![2.0, 4.0, 1.0, 0.5, 1.2, 3.3, 0.25];
        let t = SamplerTree::from_weights(w.clone());
        for i in 0..w.len() {
            assert!((t.prefix_sum(i) - naive_prefix(&w, i)).abs() < 1e-12);
        }
    }

    #[test]
    fn add_and_append_track_prefix_sums() {
        let mut t = SamplerTree::from_weights(vec![1.0, 2.0, 3.0]);
        t.add(1, 0.5);
        t.append(4.0);
        t.append(0.25);
        let w = [1.0, 2.5, 3.0, 4.0, 0.25];
        for i in 0..w.len() {
            assert!((t.prefix_sum(i) - naive_prefix(&w, i)).abs() < 1e-12);
        }
        assert_eq!(t.updates_since_rebuild(), 3);
        t.rebuild_from(w.iter().copied());
        assert_eq!(t.updates_since_rebuild(), 0);
        assert!((t.total() - 10.75).abs() < 1e-12);
    }

    #[test]
    fn sampling_matches_weights() {
        let w = vec![1.0, 0.0, 3.0, 6.0];
        let t = SamplerTree::from_weights(w.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 200_000;
        let mut counts = [0u64; 4];
        for _ in 0..n {
            counts[t.sample(&mut rng)] += 1;
        }
        assert_eq!(counts[1], 0);
        for (i, &c) in counts.iter().enumerate() {
            let p = w[i] / 10.0;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!(
                (c as f64 / n as f64 - p).abs() <= 4.0 * sigma.max(1e-9),
                "leaf {i}: freq {} vs p {p}",
                c as f64 / n as f64
            );
        }
    }

    proptest! {
        #[test]
        fn incremental_append_equals_bulk_build(w in proptest::collection::vec(0.0f64..10.0, 1..200)) {
            let bulk = SamplerTree::from_weights(w.clone());
            let mut inc = SamplerTree::from_weights(w[..1].to_vec());
            for &x in &w[1..] {
                inc.append(x);
            }
            for i in 0..w.len() {
                prop_assert!((bulk.prefix_sum(i) - inc.prefix_sum(i)).abs() <= 1e-9 * (1.0 + bulk.total()));
            }
        }
    }
}
