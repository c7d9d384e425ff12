//! Counter-based random number streams.
//!
//! Every random quantity in this crate is a pure function of a 64-bit key,
//! so simulations are reproducible bit-for-bit regardless of thread count or
//! evaluation order. Keys are derived by chaining the splitmix64 finalizer
//! over (seed, stream kind, group, counter) words.

/// splitmix64 finalizer: a cheap, well-mixed 64-bit hash.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines a key with another word.
#[inline]
pub fn chain(key: u64, word: u64) -> u64 {
    mix(key ^ mix(word))
}

#[inline]
fn to_unit(bits: u64) -> f64 {
    // 53 uniform bits in [0, 1)
    (bits >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Sequential splitmix64 generator for test scaffolding.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        to_unit(self.next_u64())
    }
}

/// A keyed stream of standard normal variates, addressed by counter. The
/// value at a given counter never depends on which other counters were
/// consumed.
#[derive(Clone, Copy, Debug)]
pub struct NormalStream {
    key: u64,
}

impl NormalStream {
    pub fn new(key: u64) -> Self {
        NormalStream { key }
    }

    /// Two independent N(0,1) variates via Box-Muller at pair counter `pair`.
    #[inline]
    pub fn normal_pair(&self, pair: u64) -> (f64, f64) {
        let a = chain(self.key, 2 * pair);
        let b = chain(self.key, 2 * pair + 1);
        // shift into (0, 1] so the logarithm is finite
        let u1 = to_unit(a) + (1.0 / 9_007_199_254_740_992.0);
        let u2 = to_unit(b);
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// Fills `out` with consecutive standard normals starting at counter 0.
    pub fn fill_normals(&self, out: &mut [f64]) {
        let mut k = 0;
        while k + 1 < out.len() {
            let (a, b) = self.normal_pair((k / 2) as u64);
            out[k] = a;
            out[k + 1] = b;
            k += 2;
        }
        if k < out.len() {
            out[k] = self.normal_pair((k / 2) as u64).0;
        }
    }
}
