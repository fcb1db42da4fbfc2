//! Self-similarity veto against repeated structures along the epipolar line.
//!
//! A match `(q, q')` survives when its block distance is strictly smaller than the distance
//! from `B_q` to every block of the reference image centred on the same row at horizontal
//! offsets `2..=R` on either side.

use crate::error::{AcbmError, Result};
use crate::image::GrayImage;

/// Sum of squared differences of two equally sized blocks.
pub fn ssd(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(AcbmError::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// SSD between the block at `(xa, ya)` of `a` and the block at `(xb, yb)` of `b`, without
/// copying either block. Both blocks must fit.
pub fn block_ssd(
    a: &GrayImage,
    (xa, ya): (usize, usize),
    b: &GrayImage,
    (xb, yb): (usize, usize),
    side: usize,
) -> f64 {
    let r = side / 2;
    let mut total = 0.0;
    for dy in 0..side {
        let ra = &a.row(ya + dy - r)[xa - r..xa + r + 1];
        let rb = &b.row(yb + dy - r)[xb - r..xb + r + 1];
        total += ra.iter().zip(rb).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    }
    total
}

#[derive(Debug, Clone, Copy)]
pub struct SsContext<'a> {
    pub image: &'a GrayImage,
    pub range: usize,
    pub block_side: usize,
}

impl<'a> SsContext<'a> {
    pub fn new(image: &'a GrayImage, range: usize, block_side: usize) -> Self {
        SsContext {
            image,
            range,
            block_side,
        }
    }

    /// Smallest SSD between `B_q` and the blocks at `q.x + k`, `2 <= |k| <= R`, that fit in
    /// the image. `+inf` when no such block exists.
    pub fn neighbor_min(&self, (x, y): (usize, usize)) -> f64 {
        let side = self.block_side;
        let mut best = f64::INFINITY;
        for k in 2..=self.range as isize {
            for rx in [x as isize - k, x as isize + k] {
                if self.image.block_fits(rx, y as isize, side) {
                    let d = block_ssd(self.image, (x, y), self.image, (rx as usize, y), side);
                    best = best.min(d);
                }
            }
        }
        best
    }

    /// Accepts when `cross_distance` is strictly below every neighbor distance.
    pub fn accept(&self, q: (usize, usize), cross_distance: f64) -> bool {
        cross_distance < self.neighbor_min(q)
    }
}
