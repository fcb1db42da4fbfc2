//! A contrario decision rule for block matches.
//!
//! For a reference block and a candidate block, each of the `N` locally most significant PCA
//! components yields a resemblance probability under the background model. The probabilities
//! are bounded from above by the smallest non-decreasing profile over the dyadic levels
//! `{1, 1/2, ..., 1/2^(Q-1)}`, and the number of false alarms is the number of tests times
//! the product of that profile.

mod combinatorics;

pub use combinatorics::{binomial, count_nondecreasing};

use crate::error::{AcbmError, Result};

/// Matching parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcbmParams {
    /// Side of the square comparison block (odd, at least 3).
    pub block_side: usize,
    /// Number `N` of compared components.
    pub components: usize,
    /// Number `Q` of dyadic probability levels.
    pub quanta: usize,
    /// Search radius `R`: candidates lie at horizontal offsets `-R..=R`.
    pub range: usize,
    /// Threshold on the number of false alarms.
    pub epsilon: f64,
}

impl AcbmParams {
    pub const DEFAULT_BLOCK_SIDE: usize = 9;
    pub const DEFAULT_COMPONENTS: usize = 9;
    pub const DEFAULT_QUANTA: usize = 5;
    pub const DEFAULT_EPSILON: f64 = 1.0;

    /// Default 9x9 blocks, 9 components, 5 levels and one false alarm per image.
    pub fn with_range(range: usize) -> Self {
        AcbmParams {
            block_side: Self::DEFAULT_BLOCK_SIDE,
            components: Self::DEFAULT_COMPONENTS,
            quanta: Self::DEFAULT_QUANTA,
            range,
            epsilon: Self::DEFAULT_EPSILON,
        }
    }

    /// Block dimension `s`.
    pub fn block_dim(&self) -> usize {
        self.block_side * self.block_side
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_structure()?;
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(AcbmError::InvalidParameter(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Everything except the epsilon check.
    pub(crate) fn validate_structure(&self) -> Result<()> {
        let bad = |msg: String| Err(AcbmError::InvalidParameter(msg));
        if self.block_side < 3 || self.block_side % 2 == 0 {
            return bad(format!("block side must be odd and >= 3, got {}", self.block_side));
        }
        if self.components == 0 || self.components > self.block_dim() {
            return bad(format!(
                "components must be in 1..={}, got {}",
                self.block_dim(),
                self.components
            ));
        }
        if self.quanta == 0 {
            return bad("quanta must be at least 1".into());
        }
        // Keeps the smallest attainable probability 2^-(N(Q-1)) a normal f64.
        if self.components * (self.quanta - 1) > 1000 {
            return bad(format!(
                "N*(Q-1) = {} exceeds 1000",
                self.components * (self.quanta - 1)
            ));
        }
        Ok(())
    }
}

/// Component indices sorted by decreasing `|coefficient|`; ties keep ascending index order.
pub fn order_components(coefficients: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..coefficients.len()).collect();
    order.sort_by(|&a, &b| coefficients[b].abs().total_cmp(&coefficients[a].abs()));
    order
}

/// The `n` first entries of [`order_components`].
pub fn top_components(coefficients: &[f64], n: usize) -> Vec<usize> {
    let mut order = order_components(coefficients);
    order.truncate(n);
    order
}

/// Probability that a background block resembles the reference in one component as closely
/// as the candidate does, from the CDF values of the reference (`h_ref`) and the candidate
/// (`h_cand`) coefficients.
pub fn resemblance_probability(h_ref: f64, h_cand: f64) -> f64 {
    let p = if h_cand - h_ref > h_ref {
        h_cand
    } else if h_ref - h_cand > 1.0 - h_ref {
        1.0 - h_cand
    } else {
        2.0 * (h_ref - h_cand).abs()
    };
    p.clamp(0.0, 1.0)
}

/// Non-decreasing profile of dyadic probability levels.
///
/// Level `e` stands for the probability `2^-e`, `0 <= e < Q`. Non-decreasing probabilities
/// mean non-increasing exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantizedProbVector {
    exponents: Vec<u8>,
    quanta: usize,
}

impl QuantizedProbVector {
    /// Checks level range and monotonicity.
    pub fn from_exponents(exponents: Vec<u8>, quanta: usize) -> Result<Self> {
        if quanta == 0 || quanta > 256 {
            return Err(AcbmError::InvalidParameter(format!("bad level count {quanta}")));
        }
        if exponents.iter().any(|&e| e as usize >= quanta) {
            return Err(AcbmError::InvalidParameter(format!(
                "exponent outside 0..{quanta}"
            )));
        }
        if exponents.windows(2).any(|w| w[1] > w[0]) {
            return Err(AcbmError::InvalidParameter(
                "probabilities must be non-decreasing".into(),
            ));
        }
        Ok(QuantizedProbVector { exponents, quanta })
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exponents
    }

    pub fn quanta(&self) -> usize {
        self.quanta
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.exponents.iter().map(|&e| level(e)).collect()
    }

    /// `-log2` of the product of the levels.
    pub fn exponent_sum(&self) -> u32 {
        self.exponents.iter().map(|&e| e as u32).sum()
    }

    /// Product of the levels, computed exactly.
    pub fn probability(&self) -> f64 {
        pow2_neg(self.exponent_sum())
    }
}

#[inline]
fn level(exponent: u8) -> f64 {
    pow2_neg(exponent as u32)
}

/// `2^-e`, exact for every `e` with a normal result.
#[inline]
pub(crate) fn pow2_neg(e: u32) -> f64 {
    debug_assert!(e <= 1022);
    f64::from_bits((1023 - e as u64) << 52)
}

/// Exponent of the smallest level `2^-e >= p`, with `e` capped at `quanta - 1`.
#[inline]
pub(crate) fn ceiling_exponent(p: f64, quanta: usize) -> u8 {
    let mut e = 0u32;
    while (e + 1) < quanta as u32 && pow2_neg(e + 1) >= p {
        e += 1;
    }
    e as u8
}

/// Smallest non-decreasing dyadic profile dominating `p_hat` elementwise.
pub fn quantize_sequence(p_hat: &[f64], quanta: usize) -> QuantizedProbVector {
    assert!((1..=256).contains(&quanta), "quanta must be in 1..=256");
    let mut exponents = Vec::with_capacity(p_hat.len());
    let mut running = u8::MAX;
    for &p in p_hat {
        running = running.min(ceiling_exponent(p, quanta));
        exponents.push(running);
    }
    QuantizedProbVector { exponents, quanta }
}

/// Number of tests `n (2R + 1) FC_{N,Q}` for a reference image of `n` pixels.
pub fn number_of_tests(n: usize, params: &AcbmParams) -> Result<u64> {
    if n == 0 {
        return Err(AcbmError::InvalidParameter("pixel count must be positive".into()));
    }
    let fc = count_nondecreasing(params.components, params.quanta)?;
    let span = 2 * params.range as u128 + 1;
    let total = (n as u128)
        .checked_mul(span)
        .and_then(|v| v.checked_mul(fc as u128))
        .ok_or(AcbmError::Overflow("number of tests"))?;
    u64::try_from(total).map_err(|_| AcbmError::Overflow("number of tests"))
}

pub fn nfa(n_test: u64, quantized: &QuantizedProbVector) -> f64 {
    n_test as f64 * quantized.probability()
}

/// NFA from the exponent sum of a quantized profile.
#[inline]
pub(crate) fn nfa_from_exponent_sum(n_test: u64, exponent_sum: u32) -> f64 {
    n_test as f64 * pow2_neg(exponent_sum)
}

#[inline]
pub fn is_meaningful(nfa: f64, epsilon: f64) -> bool {
    nfa <= epsilon
}
