//! Synthetic data, Monte Carlo false-alarm checks and ground-truth evaluation.

mod eval;
mod monte_carlo;
mod synth;

pub use eval::{
    evaluate, evaluate_disparities, evaluate_grid, EvalReport, GroundTruth, GtDecoding,
    BAD_MATCH_THRESHOLD,
};
pub use monte_carlo::{monte_carlo_false_alarms, MonteCarloReport};
pub use synth::{gen_noise_pair, gen_translated_pair, smooth_texture, StripeBand, TranslatedPair};
