//! Seeding helpers. Every random draw in the crate comes from a
//! [`ChaCha8Rng`] whose seed is derived from the run seed plus a purpose tag,
//! so results never depend on call order across threads.

use core::f64::consts::TAU;

use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

use crate::math::{ln, sqrt};

/// Stream tags for [`derive`].
pub mod stream {
    pub const INIT: u64 = 1;
    pub const SHUFFLE: u64 = 2;
    pub const DROPOUT: u64 = 3;
    pub const SPLIT: u64 = 4;
    pub const CORPUS: u64 = 5;
}

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic child generator for `(seed, stream...)`.
pub fn derive(seed: u64, stream: &[u64]) -> ChaCha8Rng {
    let s = stream.iter().fold(mix(seed), |acc, &x| mix(acc ^ mix(x)));
    ChaCha8Rng::seed_from_u64(s)
}

/// Box-Muller standard normal.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2 = rng.gen::<f64>();
    sqrt(-2.0 * ln(u1)) * libm::cos(TAU * u2)
}

/// Fills `out` with a point drawn uniformly from the unit L2 ball:
/// direction uniform on the sphere, radius `u^(1/dim)`.
pub fn unit_ball<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let dim = out.len();
    if dim == 0 {
        return;
    }
    let norm = loop {
        for v in out.iter_mut() {
            *v = standard_normal(rng);
        }
        let n = sqrt(out.iter().map(|v| v * v).sum::<f64>());
        if n > 0.0 {
            break n;
        }
    };
    let radius = crate::math::powf(rng.gen::<f64>(), 1.0 / dim as f64);
    for v in out.iter_mut() {
        *v *= radius / norm;
    }
}
