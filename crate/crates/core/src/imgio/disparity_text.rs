//! Tab-separated disparity text format and the 8-bit visualization.
//!
//! One line per image row, cells separated by `\t`. Accepted cells are written as decimal
//! integers, rejected cells as `NaN`. The reader also accepts real values so ground truth can
//! be supplied in the same format.

use crate::disparity::{Cell, DisparityMap};
use crate::error::{AcbmError, Result};

/// Pixel value marking rejected pixels in the visualization.
pub const REJECTED_SENTINEL: u8 = 255;

/// Disparity grid read back from text. `None` marks rejected or invalid pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityGrid {
    pub width: usize,
    pub height: usize,
    pub values: Vec<Option<f64>>,
}

impl From<&DisparityMap> for DisparityGrid {
    fn from(map: &DisparityMap) -> Self {
        DisparityGrid {
            width: map.width(),
            height: map.height(),
            values: map
                .cells()
                .iter()
                .map(|c| c.disparity().map(f64::from))
                .collect(),
        }
    }
}

pub fn encode_disparity_text(map: &DisparityMap) -> String {
    let mut out = String::with_capacity(map.width() * map.height() * 4);
    for y in 0..map.height() {
        for x in 0..map.width() {
            if x > 0 {
                out.push('\t');
            }
            match map.get(x, y) {
                Cell::Accepted { disparity, .. } => out.push_str(&disparity.to_string()),
                Cell::Rejected(_) => out.push_str("NaN"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_disparity_text(text: &str) -> Result<DisparityGrid> {
    let mut width = None;
    let mut values = Vec::new();
    let mut height = 0;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut count = 0;
        for tok in line.split('\t') {
            let tok = tok.trim();
            let v = if tok.eq_ignore_ascii_case("nan") {
                None
            } else {
                let v: f64 = tok.parse().map_err(|_| AcbmError::MalformedDisparity {
                    line: i + 1,
                    reason: format!("unparsable cell {tok:?}"),
                })?;
                v.is_finite().then_some(v)
            };
            values.push(v);
            count += 1;
        }
        match width {
            None => width = Some(count),
            Some(w) if w != count => {
                return Err(AcbmError::MalformedDisparity {
                    line: i + 1,
                    reason: format!("expected {w} cells, found {count}"),
                })
            }
            Some(_) => {}
        }
        height += 1;
    }
    let width = width.ok_or(AcbmError::MalformedDisparity {
        line: 0,
        reason: "empty file".into(),
    })?;
    Ok(DisparityGrid {
        width,
        height,
        values,
    })
}

/// Maps accepted disparities affinely onto `0..=254`; rejected pixels get 255.
/// A map whose accepted disparities are all equal renders them as 127.
pub fn disparity_viz(map: &DisparityMap) -> Vec<u8> {
    let accepted = map.cells().iter().filter_map(Cell::disparity);
    let (lo, hi) = accepted.fold((i32::MAX, i32::MIN), |(lo, hi), d| (lo.min(d), hi.max(d)));
    map.cells()
        .iter()
        .map(|c| match c.disparity() {
            None => REJECTED_SENTINEL,
            Some(_) if hi == lo => 127,
            Some(d) => {
                let t = (d - lo) as f64 / (hi - lo) as f64;
                (t * 254.0).round() as u8
            }
        })
        .collect()
}

/// The visualization as a binary 8-bit PGM file.
pub fn encode_disparity_viz(map: &DisparityMap) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", map.width(), map.height()).into_bytes();
    out.extend(disparity_viz(map));
    out
}
