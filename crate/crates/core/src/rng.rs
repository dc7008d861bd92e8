//! Small deterministic PRNG (splitmix64) for generators and randomized tests.
//!
//! The point is stability: a seed must reproduce the same instance across
//! builds and platforms, which rules out RNGs whose streams are allowed to
//! change between library versions.

#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, bound)`. `bound` must be nonzero.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        // Rejection sampling to avoid modulo bias.
        let bound = bound as u64;
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % bound) as usize;
            }
        }
    }

    /// Uniform value in `[lo, hi]`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) < p
    }

    /// Geometric-ish count: starts at 1, keeps growing with probability `p`.
    pub fn geometric_from_one(&mut self, p: f64, cap: usize) -> usize {
        let mut v = 1;
        while v < cap && self.chance(p) {
            v += 1;
        }
        v
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// `count` distinct values sampled from `[0, bound)`, ascending.
    pub fn distinct_sorted(&mut self, bound: usize, count: usize) -> Vec<usize> {
        debug_assert!(count <= bound);
        let mut picked = std::collections::BTreeSet::new();
        while picked.len() < count {
            picked.insert(self.below(bound));
        }
        picked.into_iter().collect()
    }
}
