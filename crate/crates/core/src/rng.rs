//! Coordinate-keyed uniform draws.
//!
//! Every `(row, col)` maps to a fixed position in a ChaCha8 keystream derived
//! from `(seed, domain)`, so results do not depend on evaluation order or on
//! how work is split across threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Keystream domain for the embedding simulator.
pub const DOMAIN_EMBED: u64 = 0x0065_6d62_6564;
/// Keystream domain for synthetic cover texture.
pub const DOMAIN_SYNTH: u64 = 0x0073_796e_7468;

#[derive(Clone, Debug)]
pub struct CoordRng {
    base: ChaCha8Rng,
}

impl CoordRng {
    pub fn new(seed: u64, domain: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&domain.to_le_bytes());
        CoordRng { base: ChaCha8Rng::from_seed(key) }
    }

    /// Fills `out[col]` with the uniform in [0, 1) for `(row, col)`.
    pub fn fill_row(&self, row: usize, out: &mut [f64]) {
        let mut rng = self.base.clone();
        rng.set_stream(row as u64);
        rng.set_word_pos(0);
        for v in out {
            *v = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        }
    }

    pub fn uniform(&self, row: usize, col: usize) -> f64 {
        let mut rng = self.base.clone();
        rng.set_stream(row as u64);
        rng.set_word_pos(2 * col as u128);
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
