//! Browser demo: synthetic pairs matched in the page, maps drawn on canvases.
//!
//! Build with `wasm-pack build crates/web --target web --out-dir www/pkg` and serve `www/`.

use acbm::contrario::{count_nondecreasing, quantize_sequence};
use acbm::validation::{gen_noise_pair, gen_translated_pair, StripeBand};
use acbm::{AcbmParams, DisparityMap, GrayImage, MatchMode, StereoMatcher};
use wasm_bindgen::prelude::*;

const REJECTED_RGBA: [u8; 4] = [220, 30, 30, 255];

fn gray_rgba(img: &GrayImage) -> Vec<u8> {
    img.samples()
        .iter()
        .flat_map(|&v| {
            let g = v.round().clamp(0.0, 255.0) as u8;
            [g, g, g, 255]
        })
        .collect()
}

/// Accepted disparities in gray from -range (black) to +range (white); rejected pixels red.
fn disparity_rgba(map: &DisparityMap, range: usize) -> Vec<u8> {
    let span = (2 * range).max(1) as f64;
    map.cells()
        .iter()
        .flat_map(|c| match c.disparity() {
            Some(d) => {
                let g = (((d as f64 + range as f64) / span) * 255.0).round() as u8;
                [g, g, g, 255]
            }
            None => REJECTED_RGBA,
        })
        .collect()
}

fn parse_mode(mode: &str) -> Result<MatchMode, String> {
    match mode {
        "combined" => Ok(MatchMode::Combined),
        "acbm" => Ok(MatchMode::AcbmOnly),
        "ss" => Ok(MatchMode::SsOnly),
        other => Err(format!("unknown mode {other:?}")),
    }
}

#[wasm_bindgen]
pub struct ShiftResult {
    width: usize,
    height: usize,
    reference: Vec<u8>,
    disparity: Vec<u8>,
    accepted: usize,
    wrong: usize,
    band_accepted: usize,
    band_total: usize,
}

#[wasm_bindgen]
impl ShiftResult {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }
    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }
    /// RGBA pixels of the reference image.
    pub fn reference_rgba(&self) -> Vec<u8> {
        self.reference.clone()
    }
    pub fn disparity_rgba(&self) -> Vec<u8> {
        self.disparity.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn accepted(&self) -> usize {
        self.accepted
    }
    /// Accepted pixels whose disparity differs from the applied shift.
    #[wasm_bindgen(getter)]
    pub fn wrong(&self) -> usize {
        self.wrong
    }
    #[wasm_bindgen(getter)]
    pub fn band_accepted(&self) -> usize {
        self.band_accepted
    }
    #[wasm_bindgen(getter)]
    pub fn band_total(&self) -> usize {
        self.band_total
    }
}

/// Matches a translated texture, optionally with a band of vertical stripes in the middle
/// third of the rows. `mode` is `combined`, `acbm` or `ss`.
#[wasm_bindgen]
pub fn shift_demo(
    width: usize,
    height: usize,
    shift: i32,
    stripe_period: usize,
    range: usize,
    mode: &str,
    seed: u64,
) -> Result<ShiftResult, String> {
    let mode = parse_mode(mode)?;
    let band = (stripe_period >= 2).then(|| StripeBand {
        rows: height / 3..2 * height / 3,
        period: stripe_period,
    });
    let pair = gen_translated_pair(width, height, seed, shift, band.as_ref()).map_err(|e| e.to_string())?;
    let params = AcbmParams::with_range(range);
    let map = StereoMatcher::new(&pair.reference, &pair.secondary, params)
        .map_err(|e| e.to_string())?
        .with_mode(mode)
        .run();

    let (mut wrong, mut band_accepted, mut band_total) = (0, 0, 0);
    for y in 0..height {
        let in_band = band.as_ref().is_some_and(|b| b.contains_block(y, params.block_side));
        for x in 0..width {
            let cell = map.get(x, y);
            if in_band && pair.reference.block_fits(x as isize, y as isize, params.block_side) {
                band_total += 1;
                band_accepted += cell.is_accepted() as usize;
            }
            if cell.disparity().is_some_and(|d| d != shift) {
                wrong += 1;
            }
        }
    }
    Ok(ShiftResult {
        width,
        height,
        reference: gray_rgba(&pair.reference),
        disparity: disparity_rgba(&map, range),
        accepted: map.accepted_count(),
        wrong,
        band_accepted,
        band_total,
    })
}

#[wasm_bindgen]
pub struct NoiseResult {
    combined: Vec<u8>,
    ss_only: Vec<u8>,
    combined_accepted: usize,
    ss_accepted: usize,
}

#[wasm_bindgen]
impl NoiseResult {
    pub fn combined_rgba(&self) -> Vec<u8> {
        self.combined.clone()
    }
    pub fn ss_rgba(&self) -> Vec<u8> {
        self.ss_only.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn combined_accepted(&self) -> usize {
        self.combined_accepted
    }
    #[wasm_bindgen(getter)]
    pub fn ss_accepted(&self) -> usize {
        self.ss_accepted
    }
}

/// Two independent noise images matched with the full test and with self-similarity alone.
#[wasm_bindgen]
pub fn noise_demo(size: usize, sigma: f64, range: usize, seed: u64) -> Result<NoiseResult, String> {
    let (left, right) = gen_noise_pair(size, size, sigma, seed).map_err(|e| e.to_string())?;
    let matcher = StereoMatcher::new(&left, &right, AcbmParams::with_range(range)).map_err(|e| e.to_string())?;
    let combined = matcher.run();
    let ss = matcher.with_mode(MatchMode::SsOnly).run();
    Ok(NoiseResult {
        combined: disparity_rgba(&combined, range),
        ss_only: disparity_rgba(&ss, range),
        combined_accepted: combined.accepted_count(),
        ss_accepted: ss.accepted_count(),
    })
}

#[wasm_bindgen]
pub struct QuantizeResult {
    levels: Vec<f64>,
    exponents: Vec<u8>,
    nfa: f64,
    tests: f64,
}

#[wasm_bindgen]
impl QuantizeResult {
    /// Quantized probabilities, one per component.
    pub fn levels(&self) -> Vec<f64> {
        self.levels.clone()
    }
    pub fn exponents(&self) -> Vec<u8> {
        self.exponents.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn nfa(&self) -> f64 {
        self.nfa
    }
    #[wasm_bindgen(getter)]
    pub fn tests(&self) -> f64 {
        self.tests
    }
}

/// Quantizes per-component resemblance probabilities and gives the resulting NFA for an
/// image of `pixels` pixels searched over `[-range, range]`.
#[wasm_bindgen]
pub fn quantize_demo(p_hat: Vec<f64>, quanta: usize, pixels: usize, range: usize) -> Result<QuantizeResult, String> {
    if p_hat.is_empty() || p_hat.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err("probabilities must lie in [0, 1]".into());
    }
    if !(1..=64).contains(&quanta) {
        return Err("levels must be between 1 and 64".into());
    }
    let q = quantize_sequence(&p_hat, quanta);
    let fc = count_nondecreasing(p_hat.len(), quanta).map_err(|e| e.to_string())?;
    let tests = pixels as f64 * (2 * range + 1) as f64 * fc as f64;
    Ok(QuantizeResult {
        levels: q.values(),
        exponents: q.exponents().to_vec(),
        nfa: tests * q.probability(),
        tests,
    })
}
