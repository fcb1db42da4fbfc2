//! Empirical false-alarm count under the background model.
//!
//! Each reference pixel is compared with `2R + 1` independent random blocks drawn from the
//! model, using the same number of tests as a real run. Every comparison whose NFA is at most
//! epsilon is a false alarm; the expected count per image is bounded by epsilon.
//!
//! Only the `N` compared coefficients of a random block influence its NFA, and with an
//! orthonormal basis a reconstructed block projects back onto the coefficients it was drawn
//! from. Trials therefore draw those coefficients directly instead of reconstructing and
//! re-projecting whole blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contrario::{
    ceiling_exponent, is_meaningful, nfa_from_exponent_sum, number_of_tests, resemblance_probability,
    top_components, AcbmParams,
};
use crate::error::{AcbmError, Result};
use crate::image::GrayImage;
use crate::par;
use crate::patch_model::{extract_block_into, BackgroundModel};

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    /// False alarms in each trial.
    pub counts: Vec<u64>,
    /// Comparisons per trial: interior reference pixels times `2R + 1`.
    pub comparisons_per_trial: u64,
}

impl MonteCarloReport {
    pub fn mean(&self) -> f64 {
        if self.counts.is_empty() {
            return 0.0;
        }
        self.counts.iter().sum::<u64>() as f64 / self.counts.len() as f64
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        let n = self.counts.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let m = self.mean();
        let var = self.counts.iter().map(|&c| (c as f64 - m).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }
}

/// Runs `trials` independent trials; trial `t` uses the seed `seed + t`.
///
/// `params.epsilon` may be zero here, in which case no comparison can succeed.
pub fn monte_carlo_false_alarms(
    model: &BackgroundModel,
    reference: &GrayImage,
    params: &AcbmParams,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    params.validate_structure()?;
    if !(params.epsilon >= 0.0) {
        return Err(AcbmError::InvalidParameter(format!(
            "epsilon must be non-negative, got {}",
            params.epsilon
        )));
    }
    if model.block_side() != params.block_side {
        return Err(AcbmError::InvalidParameter(format!(
            "model block side {} differs from requested {}",
            model.block_side(),
            params.block_side
        )));
    }
    let n_test = number_of_tests(reference.len(), params)?;
    let side = params.block_side;
    let r = side / 2;
    if reference.complete_block_count(side) == 0 {
        return Err(AcbmError::ImageTooSmall {
            width: reference.width(),
            height: reference.height(),
            side,
            needed: 1,
        });
    }

    // Per interior pixel: the compared components and their reference CDF values.
    let basis = model.basis();
    let rows = par::map_range(r..reference.height() - r, |y| {
        let mut block = vec![0.0; basis.dim()];
        let mut coeffs = vec![0.0; basis.dim()];
        (r..reference.width() - r)
            .map(|x| {
                extract_block_into(reference, x, y, side, &mut block).expect("interior block");
                basis.project_into(&block, &mut coeffs).expect("basis dimension");
                top_components(&coeffs, params.components)
                    .into_iter()
                    .map(|i| (i, model.cdf(i).eval(coeffs[i])))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    });
    let references: Vec<Vec<(usize, f64)>> = rows.into_iter().flatten().collect();
    let draws = 2 * params.range + 1;

    let counts = par::map_range(0..trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let mut alarms = 0u64;
        for compared in &references {
            for _ in 0..draws {
                let mut running = u8::MAX;
                let mut sum = 0u32;
                for &(i, h_ref) in compared {
                    let cdf = model.cdf(i);
                    let h_rand = cdf.eval(cdf.quantile(rng.random::<f64>()));
                    let p = resemblance_probability(h_ref, h_rand);
                    running = running.min(ceiling_exponent(p, params.quanta));
                    sum += running as u32;
                }
                if is_meaningful(nfa_from_exponent_sum(n_test, sum), params.epsilon) {
                    alarms += 1;
                }
            }
        }
        alarms
    });
    Ok(MonteCarloReport {
        counts,
        comparisons_per_trial: (references.len() * draws) as u64,
    })
}
