//! Counter-based pseudorandom numbers.
//!
//! Every random quantity in an environment is a pure function of
//! `(seed, i, j, stream)`. There is no generator state to advance, so values
//! do not depend on the order in which lattice sites are visited, and any
//! sub-rectangle of an environment sees exactly the values of the enclosing
//! one.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent streams drawn at every lattice site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamTag {
    Switch = 1,
    Horizontal = 2,
    Vertical = 3,
}

/// Keyed hash from lattice coordinates to 64 uniform bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    offsets: [u64; 4],
    // Odd per-stream multipliers: with a shared multiplier, streams with
    // different offsets would be shifted copies of one another.
    gammas: [u64; 4],
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        let root = mix64(seed ^ 0x5EED_5EED_5EED_5EED);
        let mut offsets = [0u64; 4];
        let mut gammas = [0u64; 4];
        for tag in 0..4u64 {
            let base = root.wrapping_add((2 * tag + 1).wrapping_mul(GOLDEN));
            offsets[tag as usize] = mix64(base);
            gammas[tag as usize] = mix64(base.wrapping_add(GOLDEN)) | 1;
        }
        Self { offsets, gammas }
    }

    #[inline(always)]
    pub fn bits(&self, tag: StreamTag, i: usize, j: usize) -> u64 {
        let t = tag as usize;
        let counter = ((i as u64) << 32) | (j as u64);
        mix64(counter.wrapping_add(self.offsets[t]).wrapping_mul(self.gammas[t]))
    }

    /// Uniform draw in `[0, 1)` with 53 bits of resolution.
    #[inline(always)]
    pub fn uniform(&self, tag: StreamTag, i: usize, j: usize) -> f64 {
        bits_to_unit(self.bits(tag, i, j))
    }
}

#[inline(always)]
pub fn bits_to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seed of replica `index` in an experiment with the given base seed.
pub fn replica_seed(base_seed: u64, index: u64) -> u64 {
    base_seed.wrapping_add(index)
}
