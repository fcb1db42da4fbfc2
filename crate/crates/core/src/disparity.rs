//! Per-pixel matching decisions.

use crate::error::{AcbmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    /// The best candidate's NFA exceeds the threshold.
    NotMeaningful,
    /// The best candidate failed the self-similarity test.
    SelfSimilar,
    /// The block around the pixel leaves the image, or no candidate block fits.
    Border,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Accepted { disparity: i32, nfa: f64 },
    Rejected(RejectReason),
}

impl Cell {
    #[inline]
    pub fn disparity(&self) -> Option<i32> {
        match *self {
            Cell::Accepted { disparity, .. } => Some(disparity),
            Cell::Rejected(_) => None,
        }
    }

    #[inline]
    pub fn is_accepted(&self) -> bool {
        matches!(self, Cell::Accepted { .. })
    }
}

/// Disparity map over the reference image. Disparity is `q'.x - q.x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
}

impl DisparityMap {
    pub fn new(width: usize, height: usize, cells: Vec<Cell>) -> Result<Self> {
        if cells.len() != width * height {
            return Err(AcbmError::DimensionMismatch {
                expected: width * height,
                actual: cells.len(),
            });
        }
        for cell in &cells {
            if let Cell::Accepted { nfa, .. } = *cell {
                if !(nfa > 0.0) {
                    return Err(AcbmError::InvalidParameter(format!(
                        "accepted cell with non-positive NFA {nfa}"
                    )));
                }
            }
        }
        Ok(DisparityMap {
            width,
            height,
            cells,
        })
    }

    pub fn rejected(width: usize, height: usize, reason: RejectReason) -> Self {
        DisparityMap {
            width,
            height,
            cells: vec![Cell::Rejected(reason); width * height],
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Cell {
        self.cells[y * self.width + x]
    }

    #[inline]
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn disparities(&self) -> Vec<Option<i32>> {
        self.cells.iter().map(Cell::disparity).collect()
    }

    pub fn accepted_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_accepted()).count()
    }

    /// Percentage of accepted pixels over the whole image.
    pub fn density_percent(&self) -> f64 {
        100.0 * self.accepted_count() as f64 / self.cells.len() as f64
    }

    /// Largest accepted |disparity|, if any pixel was accepted.
    pub fn max_abs_disparity(&self) -> Option<u32> {
        self.cells
            .iter()
            .filter_map(Cell::disparity)
            .map(i32::unsigned_abs)
            .max()
    }
}
