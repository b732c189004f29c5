//! Reproducible random streams.
//!
//! Every replicate owns a ChaCha8 stream. The 256-bit key is expanded with
//! SplitMix64 from `(master seed, grid index)` and the replicate index selects
//! the ChaCha stream, so any replicate can be regenerated on its own.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifier of the generator and the seeding scheme, recorded in reports.
pub const RNG_ALGORITHM: &str = "chacha8-splitmix64-v1";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replicate_rng(master: u64, grid: u64, replicate: u64) -> ChaCha8Rng {
    let mut state = master;
    let mixed = splitmix64(&mut state) ^ grid.wrapping_mul(GOLDEN).rotate_left(17);
    let mut state = mixed;
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(replicate);
    rng
}

/// Uniform on the open interval `(0, 1)`: midpoints of a 2^-52 grid, all
/// exactly representable.
#[inline]
pub fn open_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Exponential variate with the given rate, by inversion.
#[inline]
pub fn exponential<R: RngCore + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    -open_uniform(rng).ln() / rate
}
