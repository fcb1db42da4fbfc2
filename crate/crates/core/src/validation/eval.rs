//! Ground truth and density / bad-match statistics.

use crate::disparity::DisparityMap;
use crate::error::{AcbmError, Result};
use crate::image::GrayImage;
use crate::imgio::DisparityGrid;

/// Reference disparities with a validity mask (false for occluded or unknown pixels).
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    width: usize,
    height: usize,
    disparity: Vec<f64>,
    valid: Vec<bool>,
}

/// How stored ground-truth values map to disparities in matcher convention:
/// `sign * (value - offset) / scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtDecoding {
    pub scale: f64,
    pub offset: f64,
    /// Flip the sign, e.g. for datasets that store `x_ref - x_sec`.
    pub negate: bool,
}

impl Default for GtDecoding {
    fn default() -> Self {
        GtDecoding {
            scale: 1.0,
            offset: 0.0,
            negate: false,
        }
    }
}

impl GtDecoding {
    pub fn decode(&self, value: f64) -> f64 {
        let d = (value - self.offset) / self.scale;
        if self.negate {
            -d
        } else {
            d
        }
    }
}

impl GroundTruth {
    pub fn new(width: usize, height: usize, disparity: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        for len in [disparity.len(), valid.len()] {
            if len != width * height {
                return Err(AcbmError::DimensionMismatch {
                    expected: width * height,
                    actual: len,
                });
            }
        }
        Ok(GroundTruth {
            width,
            height,
            disparity,
            valid,
        })
    }

    /// Ground truth from a disparity image and an optional mask (non-zero = valid).
    pub fn from_image(image: &GrayImage, mask: Option<&GrayImage>, decoding: GtDecoding) -> Result<Self> {
        if !(decoding.scale != 0.0 && decoding.scale.is_finite()) {
            return Err(AcbmError::InvalidParameter(format!(
                "ground-truth scale must be non-zero, got {}",
                decoding.scale
            )));
        }
        let valid = match mask {
            Some(m) => {
                if (m.width(), m.height()) != (image.width(), image.height()) {
                    return Err(AcbmError::DimensionMismatch {
                        expected: image.len(),
                        actual: m.len(),
                    });
                }
                m.samples().iter().map(|&v| v != 0.0).collect()
            }
            None => vec![true; image.len()],
        };
        let disparity = image.samples().iter().map(|&v| decoding.decode(v)).collect();
        Self::new(image.width(), image.height(), disparity, valid)
    }

    /// Ground truth stored in the disparity text format; `NaN` cells are invalid.
    pub fn from_grid(grid: &DisparityGrid, mask: Option<&GrayImage>) -> Result<Self> {
        let mut valid: Vec<bool> = grid.values.iter().map(Option::is_some).collect();
        if let Some(m) = mask {
            if m.len() != valid.len() || m.width() != grid.width {
                return Err(AcbmError::DimensionMismatch {
                    expected: valid.len(),
                    actual: m.len(),
                });
            }
            for (v, &keep) in valid.iter_mut().zip(m.samples()) {
                *v &= keep != 0.0;
            }
        }
        let disparity = grid.values.iter().map(|v| v.unwrap_or(0.0)).collect();
        Self::new(grid.width, grid.height, disparity, valid)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn disparity(&self, x: usize, y: usize) -> f64 {
        self.disparity[y * self.width + x]
    }

    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[y * self.width + x]
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn disparities(&self) -> &[f64] {
        &self.disparity
    }
}

/// Error above which an accepted disparity counts as a bad match.
pub const BAD_MATCH_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    /// Accepted pixels over all pixels, in percent.
    pub density_percent: f64,
    /// Bad matches over accepted pixels inside the valid mask, in percent.
    pub bad_match_percent: f64,
    pub total: usize,
    pub accepted: usize,
    /// Accepted pixels inside the valid mask.
    pub evaluated: usize,
    pub bad: usize,
}

impl EvalReport {
    /// One tab-separated line: density, bad rate, accepted, evaluated, bad, total.
    pub fn record(&self) -> String {
        format!(
            "{:.4}\t{:.4}\t{}\t{}\t{}\t{}",
            self.density_percent, self.bad_match_percent, self.accepted, self.evaluated, self.bad, self.total
        )
    }

    pub fn human(&self) -> String {
        format!(
            "density:     {:.2}% ({} of {} pixels, whole image)\n\
             bad matches: {:.2}% ({} of {} accepted pixels inside the valid mask, |error| > {})\n",
            self.density_percent,
            self.accepted,
            self.total,
            self.bad_match_percent,
            self.bad,
            self.evaluated,
            BAD_MATCH_THRESHOLD
        )
    }
}

/// Scores disparities (`None` = rejected) against ground truth.
pub fn evaluate_disparities(width: usize, height: usize, values: &[Option<f64>], gt: &GroundTruth) -> Result<EvalReport> {
    if (width, height) != (gt.width, gt.height) || values.len() != width * height {
        return Err(AcbmError::DimensionMismatch {
            expected: gt.width * gt.height,
            actual: values.len(),
        });
    }
    let mut accepted = 0;
    let mut evaluated = 0;
    let mut bad = 0;
    for ((value, &truth), &valid) in values.iter().zip(&gt.disparity).zip(&gt.valid) {
        let Some(d) = value else { continue };
        accepted += 1;
        if valid {
            evaluated += 1;
            if (d - truth).abs() > BAD_MATCH_THRESHOLD {
                bad += 1;
            }
        }
    }
    let total = values.len();
    let pct = |num: usize, den: usize| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
    Ok(EvalReport {
        density_percent: pct(accepted, total),
        bad_match_percent: pct(bad, evaluated),
        total,
        accepted,
        evaluated,
        bad,
    })
}

pub fn evaluate(map: &DisparityMap, gt: &GroundTruth) -> Result<EvalReport> {
    let values: Vec<Option<f64>> = map.cells().iter().map(|c| c.disparity().map(f64::from)).collect();
    evaluate_disparities(map.width(), map.height(), &values, gt)
}

pub fn evaluate_grid(grid: &DisparityGrid, gt: &GroundTruth) -> Result<EvalReport> {
    evaluate_disparities(grid.width, grid.height, &grid.values, gt)
}
