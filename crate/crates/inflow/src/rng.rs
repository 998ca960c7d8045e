//! Seeded, portable random number generation.
//!
//! Everything downstream (corpus synthesis, k-means restarts, forest
//! bootstraps, SMO pair picks) must be byte-reproducible from a single
//! 64-bit seed, on any platform, forever. The generator is therefore
//! pinned in-repo: splitmix64 for seeding and stream derivation,
//! xoshiro256** for the draws.
//!
//! Streams are derived by name so that adding draws to one entity never
//! perturbs another: `Rng::stream(seed, "commits/F0042")` always yields
//! the same sequence regardless of what other streams were consumed.

/// splitmix64 step; used to expand seeds and mix stream tags.
#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a over a stream tag, mixed into stream seeds.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// xoshiro256** generator with a fixed, documented state layout.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    /// Seeds the generator by running splitmix64 four times.
    pub fn seed_from(seed: u64) -> Self {
        let mut sm = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            *slot = splitmix64(&mut sm);
        }
        // xoshiro must not start from the all-zero state
        if s == [0, 0, 0, 0] {
            s[0] = 0x9e37_79b9_7f4a_7c15;
        }
        Self { s }
    }

    /// Derives an independent named stream from a master seed.
    pub fn stream(master: u64, tag: &str) -> Self {
        Self::seed_from(master ^ fnv1a(tag.as_bytes()))
    }

    /// Collapses a master seed and tag into a derived 64-bit seed.
    pub fn derive_seed(master: u64, tag: &str) -> u64 {
        let mut mix = master ^ fnv1a(tag.as_bytes());
        splitmix64(&mut mix)
    }

    /// Derives an independent indexed stream (e.g. one per tree/restart).
    pub fn substream(master: u64, tag: &str, index: u64) -> Self {
        let mut mix = master ^ fnv1a(tag.as_bytes());
        mix = mix.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        Self::seed_from(splitmix64(&mut mix))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, bound) via Lemire-style rejection.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_below bound must be positive");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            let m = u128::from(x) * u128::from(bound);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform integer in [lo, hi] inclusive.
    pub fn next_range(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.next_below((hi - lo + 1) as u64) as i64
    }

    /// Uniform in [lo, hi).
    pub fn next_f64_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via the polar method.
    pub fn next_gaussian(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return u * (-2.0 * s.ln() / s).sqrt();
            }
        }
    }

    /// Poisson sample, Knuth's product method (fine for the rates used here).
    pub fn next_poisson(&mut self, lambda: f64) -> u64 {
        if lambda <= 0.0 {
            return 0;
        }
        // Split large rates so the product never underflows.
        if lambda > 30.0 {
            let half = lambda / 2.0;
            return self.next_poisson(half) + self.next_poisson(lambda - half);
        }
        let limit = (-lambda).exp();
        let mut count = 0u64;
        let mut product = self.next_f64();
        while product > limit {
            count += 1;
            product *= self.next_f64();
        }
        count
    }

    /// Index sampled from unnormalized nonnegative weights.
    pub fn next_weighted(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return 0;
        }
        let mut target = self.next_f64() * total;
        for (i, &w) in weights.iter().enumerate() {
            target -= w;
            if target < 0.0 {
                return i;
            }
        }
        weights.len() - 1
    }
}
