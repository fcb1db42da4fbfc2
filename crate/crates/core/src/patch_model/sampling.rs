//! Drawing random blocks from the background model.
//!
//! Components are independent; each is drawn by inverse-CDF sampling of its empirical
//! distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ComponentCdf, PatchBasis};
use crate::error::Result;

pub fn sample_background_coefficients<R: Rng + ?Sized>(cdfs: &[ComponentCdf], rng: &mut R) -> Vec<f64> {
    cdfs.iter().map(|cdf| cdf.quantile(rng.random::<f64>())).collect()
}

/// A random block under the background model, deterministic in `seed`.
pub fn sample_background_block(
    basis: &PatchBasis,
    cdfs: &[ComponentCdf],
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coefficients = sample_background_coefficients(cdfs, &mut rng);
    basis.reconstruct(&coefficients)
}
