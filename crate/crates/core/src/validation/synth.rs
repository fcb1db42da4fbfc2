//! Synthetic stereo pairs with known answers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::GroundTruth;
use crate::error::{AcbmError, Result};
use crate::image::GrayImage;

/// Two independent images of i.i.d. Gaussian samples with mean 128 and deviation `sigma`.
pub fn gen_noise_pair(width: usize, height: usize, sigma: f64, seed: u64) -> Result<(GrayImage, GrayImage)> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(AcbmError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let normal = Normal::new(128.0, sigma).expect("valid normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| (0..width * height).map(|_| normal.sample(rng)).collect::<Vec<_>>();
    let first = draw(&mut rng);
    let second = draw(&mut rng);
    Ok((GrayImage::new(width, height, first)?, GrayImage::new(width, height, second)?))
}

/// Gaussian white noise smoothed by a 3x3 box filter (periodic boundary), stretched to
/// `[0, 255]` and rounded to integers.
pub fn smooth_texture(width: usize, height: usize, seed: u64) -> Result<GrayImage> {
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..width * height).map(|_| normal.sample(&mut rng)).collect();
    let mut smooth = vec![0.0; width * height];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let sx = (x as isize + dx).rem_euclid(width as isize) as usize;
                    let sy = (y as isize + dy).rem_euclid(height as isize) as usize;
                    acc += noise[sy * width + sx];
                }
            }
            smooth[y * width + x] = acc / 9.0;
        }
    }
    let (lo, hi) = smooth
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let samples = smooth.iter().map(|v| ((v - lo) / span * 255.0).round()).collect();
    GrayImage::new(width, height, samples)
}

/// Horizontal band of rows filled with vertical square-wave stripes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripeBand {
    pub rows: std::ops::Range<usize>,
    pub period: usize,
}

impl StripeBand {
    pub const LOW: f64 = 60.0;
    pub const HIGH: f64 = 190.0;

    pub fn value(&self, x: usize) -> f64 {
        if x % self.period < self.period / 2 {
            Self::LOW
        } else {
            Self::HIGH
        }
    }

    /// Whether a `side`x`side` block centred on row `y` lies entirely inside the band.
    pub fn contains_block(&self, y: usize, side: usize) -> bool {
        let r = side / 2;
        y >= self.rows.start + r && y + r < self.rows.end
    }

    /// Whether a block centred on row `y` overlaps the band at all.
    pub fn touches_block(&self, y: usize, side: usize) -> bool {
        let r = side / 2;
        y + r >= self.rows.start && y < self.rows.end + r
    }
}

/// A synthetic pair: the secondary image is the reference translated right by `shift`
/// columns with wrap-around. Reference pixels whose match would wrap are invalid in the
/// ground truth; every valid pixel has disparity `shift`.
#[derive(Debug, Clone)]
pub struct TranslatedPair {
    pub reference: GrayImage,
    pub secondary: GrayImage,
    pub truth: GroundTruth,
}

pub fn gen_translated_pair(
    width: usize,
    height: usize,
    texture_seed: u64,
    shift: i32,
    stripes: Option<&StripeBand>,
) -> Result<TranslatedPair> {
    if shift.unsigned_abs() as usize * 4 >= width {
        return Err(AcbmError::InvalidParameter(format!(
            "|shift| = {} must be below width/4 = {}",
            shift.unsigned_abs(),
            width as f64 / 4.0
        )));
    }
    if let Some(band) = stripes {
        if band.period < 2 || band.rows.end > height || band.rows.start >= band.rows.end {
            return Err(AcbmError::InvalidParameter(format!("bad stripe band {band:?}")));
        }
    }
    let texture = smooth_texture(width, height, texture_seed)?;
    let reference = GrayImage::from_fn(width, height, |x, y| match stripes {
        Some(band) if band.rows.contains(&y) => band.value(x),
        _ => texture.get(x, y),
    })?;
    let secondary = GrayImage::from_fn(width, height, |x, y| {
        let src = (x as isize - shift as isize).rem_euclid(width as isize) as usize;
        reference.get(src, y)
    })?;
    let valid: Vec<bool> = (0..height)
        .flat_map(|_| (0..width).map(|x| (0..width as isize).contains(&(x as isize + shift as isize))))
        .collect();
    let truth = GroundTruth::new(width, height, vec![shift as f64; width * height], valid)?;
    Ok(TranslatedPair {
        reference,
        secondary,
        truth,
    })
}
