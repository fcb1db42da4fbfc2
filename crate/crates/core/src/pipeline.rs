//! Dense stereo matching with a contrario and self-similarity acceptance.
//!
//! For every reference pixel `q` the candidates are `q' = (q.x + d, q.y)` with `|d| <= R`
//! whose block fits in the secondary image. The candidate with the smallest NFA is kept (ties
//! go to the smaller `|d|`, then to the negative offset) and accepted when its NFA is at most
//! epsilon and it passes the self-similarity test.

use crate::contrario::{
    ceiling_exponent, is_meaningful, nfa_from_exponent_sum, number_of_tests,
    resemblance_probability, top_components, AcbmParams, QuantizedProbVector,
};
use crate::disparity::{Cell, DisparityMap, RejectReason};
use crate::error::{AcbmError, Result};
use crate::image::GrayImage;
use crate::par;
use crate::patch_model::{extract_block_into, BackgroundModel};
use crate::self_sim::{block_ssd, SsContext};

/// Which acceptance tests run. Only [`MatchMode::Combined`] is the full method; the other
/// two exist for ablation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    /// Minimal-NFA candidate, accepted if meaningful and not self-similar.
    #[default]
    Combined,
    /// Minimal-NFA candidate, accepted if meaningful.
    AcbmOnly,
    /// Minimal-SSD candidate, accepted if not self-similar.
    SsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchDecision {
    pub x: usize,
    pub y: usize,
    pub cell: Cell,
}

/// Score of one candidate offset.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateScore {
    pub disparity: i32,
    pub quantized: QuantizedProbVector,
    pub nfa: f64,
    /// SSD between the reference and candidate blocks.
    pub cross_distance: f64,
}

/// Everything computed for one reference pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelEvaluation {
    /// Components compared, most significant first.
    pub components: Vec<usize>,
    /// Candidates in scan order: `0, -1, 1, -2, 2, ...`.
    pub candidates: Vec<CandidateScore>,
    /// Index into `candidates` of the selected one.
    pub chosen: Option<usize>,
    pub cell: Cell,
}

/// Scan order of offsets, which also encodes the tie-break.
fn offsets(range: usize) -> impl Iterator<Item = i32> {
    std::iter::once(0).chain((1..=range as i32).flat_map(|k| [-k, k]))
}

/// CDF values of every component for the secondary blocks centred in one row span.
struct SecondaryRow {
    x0: usize,
    dim: usize,
    fits: Vec<bool>,
    h: Vec<f64>,
}

impl SecondaryRow {
    #[inline]
    fn get(&self, x: isize) -> Option<&[f64]> {
        let k = x.checked_sub(self.x0 as isize)?;
        if k < 0 || k as usize >= self.fits.len() || !self.fits[k as usize] {
            return None;
        }
        let k = k as usize;
        Some(&self.h[k * self.dim..(k + 1) * self.dim])
    }
}

#[derive(Debug, Clone)]
pub struct StereoMatcher<'a> {
    reference: &'a GrayImage,
    secondary: &'a GrayImage,
    model: BackgroundModel,
    params: AcbmParams,
    mode: MatchMode,
    n_test: u64,
}

impl<'a> StereoMatcher<'a> {
    /// Learns the background model from the secondary image.
    pub fn new(reference: &'a GrayImage, secondary: &'a GrayImage, params: AcbmParams) -> Result<Self> {
        params.validate()?;
        check_pair(reference, secondary, params.block_side)?;
        let model = BackgroundModel::learn(secondary, params.block_side)?;
        Self::with_model(reference, secondary, model, params)
    }

    /// Uses a model built elsewhere, typically from a stored basis.
    pub fn with_model(
        reference: &'a GrayImage,
        secondary: &'a GrayImage,
        model: BackgroundModel,
        params: AcbmParams,
    ) -> Result<Self> {
        params.validate()?;
        check_pair(reference, secondary, params.block_side)?;
        if model.block_side() != params.block_side {
            return Err(AcbmError::InvalidParameter(format!(
                "model block side {} differs from requested {}",
                model.block_side(),
                params.block_side
            )));
        }
        let n_test = number_of_tests(reference.len(), &params)?;
        Ok(StereoMatcher {
            reference,
            secondary,
            model,
            params,
            mode: MatchMode::Combined,
            n_test,
        })
    }

    pub fn with_mode(mut self, mode: MatchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> MatchMode {
        self.mode
    }

    pub fn params(&self) -> &AcbmParams {
        &self.params
    }

    pub fn model(&self) -> &BackgroundModel {
        &self.model
    }

    pub fn number_of_tests(&self) -> u64 {
        self.n_test
    }

    fn secondary_row(&self, y: usize, x_lo: isize, x_hi: isize) -> SecondaryRow {
        let side = self.params.block_side;
        let basis = self.model.basis();
        let dim = basis.dim();
        let x0 = x_lo.max(0) as usize;
        let x1 = (x_hi + 1).clamp(0, self.secondary.width() as isize) as usize;
        let span = x1.saturating_sub(x0);
        let mut fits = vec![false; span];
        let mut h = vec![0.0; span * dim];
        let mut block = vec![0.0; dim];
        let mut coeffs = vec![0.0; dim];
        for k in 0..span {
            let x = x0 + k;
            if !self.secondary.block_fits(x as isize, y as isize, side) {
                continue;
            }
            fits[k] = true;
            extract_block_into(self.secondary, x, y, side, &mut block).expect("block fits");
            basis.project_into(&block, &mut coeffs).expect("basis dimension");
            for (i, c) in coeffs.iter().enumerate() {
                h[k * dim + i] = self.model.cdf(i).eval(*c);
            }
        }
        SecondaryRow { x0, dim, fits, h }
    }

    fn scan(
        &self,
        x: usize,
        y: usize,
        row: &SecondaryRow,
        mut record: Option<&mut PixelEvaluation>,
    ) -> Cell {
        let side = self.params.block_side;
        if !self.reference.block_fits(x as isize, y as isize, side) {
            return Cell::Rejected(RejectReason::Border);
        }
        let basis = self.model.basis();
        let mut block = vec![0.0; basis.dim()];
        extract_block_into(self.reference, x, y, side, &mut block).expect("block fits");
        let coeffs = basis.project(&block).expect("basis dimension");
        let components = top_components(&coeffs, self.params.components);
        let h_ref: Vec<f64> = components
            .iter()
            .map(|&i| self.model.cdf(i).eval(coeffs[i]))
            .collect();
        if let Some(rec) = record.as_deref_mut() {
            rec.components = components.clone();
        }

        let quanta = self.params.quanta;
        let need_ssd = self.mode == MatchMode::SsOnly || record.is_some();
        let mut exponents = Vec::with_capacity(components.len());
        // (offset, exponent sum, cross distance); a larger sum is a smaller NFA
        let mut best: Option<(i32, u32, f64)> = None;
        for d in offsets(self.params.range) {
            let xc = x as isize + d as isize;
            let Some(h_cand) = row.get(xc) else { continue };
            exponents.clear();
            let mut running = u8::MAX;
            let mut sum = 0u32;
            for (k, &i) in components.iter().enumerate() {
                let p = resemblance_probability(h_ref[k], h_cand[i]);
                running = running.min(ceiling_exponent(p, quanta));
                exponents.push(running);
                sum += running as u32;
            }
            let cross = if need_ssd {
                block_ssd(self.reference, (x, y), self.secondary, (xc as usize, y), side)
            } else {
                f64::NAN
            };
            if let Some(rec) = record.as_deref_mut() {
                rec.candidates.push(CandidateScore {
                    disparity: d,
                    quantized: QuantizedProbVector::from_exponents(exponents.clone(), quanta)
                        .expect("non-increasing exponents"),
                    nfa: nfa_from_exponent_sum(self.n_test, sum),
                    cross_distance: cross,
                });
            }
            let better = match best {
                None => true,
                Some((_, best_sum, best_cross)) => match self.mode {
                    MatchMode::SsOnly => cross < best_cross,
                    _ => sum > best_sum,
                },
            };
            if better {
                best = Some((d, sum, cross));
                if let Some(rec) = record.as_deref_mut() {
                    rec.chosen = Some(rec.candidates.len() - 1);
                }
            }
        }

        let Some((d, sum, cross)) = best else {
            return Cell::Rejected(RejectReason::Border);
        };
        let nfa = nfa_from_exponent_sum(self.n_test, sum);
        let self_similar = |cross: f64| {
            let cross = if cross.is_nan() {
                block_ssd(self.reference, (x, y), self.secondary, ((x as isize + d as isize) as usize, y), side)
            } else {
                cross
            };
            !SsContext::new(self.reference, self.params.range, side).accept((x, y), cross)
        };
        let meaningful = is_meaningful(nfa, self.params.epsilon);
        let outcome = match self.mode {
            MatchMode::Combined if !meaningful => Err(RejectReason::NotMeaningful),
            MatchMode::Combined if self_similar(cross) => Err(RejectReason::SelfSimilar),
            MatchMode::AcbmOnly if !meaningful => Err(RejectReason::NotMeaningful),
            MatchMode::SsOnly if self_similar(cross) => Err(RejectReason::SelfSimilar),
            _ => Ok(()),
        };
        match outcome {
            Ok(()) => Cell::Accepted { disparity: d, nfa },
            Err(reason) => Cell::Rejected(reason),
        }
    }

    fn row_span(&self, x: usize) -> (isize, isize) {
        let r = self.params.range as isize;
        (x as isize - r, x as isize + r)
    }

    /// Full evaluation of one pixel, with every candidate's quantized profile and NFA.
    pub fn evaluate_pixel(&self, x: usize, y: usize) -> PixelEvaluation {
        let (lo, hi) = self.row_span(x);
        let row = self.secondary_row(y, lo, hi);
        let mut eval = PixelEvaluation {
            components: Vec::new(),
            candidates: Vec::new(),
            chosen: None,
            cell: Cell::Rejected(RejectReason::Border),
        };
        eval.cell = self.scan(x, y, &row, Some(&mut eval));
        eval
    }

    pub fn match_pixel(&self, x: usize, y: usize) -> MatchDecision {
        let (lo, hi) = self.row_span(x);
        let row = self.secondary_row(y, lo, hi);
        MatchDecision {
            x,
            y,
            cell: self.scan(x, y, &row, None),
        }
    }

    /// Matches every pixel of the reference image. Rows run in parallel when the `parallel`
    /// feature is enabled; the result does not depend on the number of workers.
    pub fn run(&self) -> DisparityMap {
        let width = self.reference.width();
        let r = self.params.block_side / 2;
        let rows = par::map_range(0..self.reference.height(), |y| {
            if y < r || y + r >= self.reference.height() {
                return vec![Cell::Rejected(RejectReason::Border); width];
            }
            let range = self.params.range as isize;
            let row = self.secondary_row(y, -range, width as isize - 1 + range);
            (0..width).map(|x| self.scan(x, y, &row, None)).collect()
        });
        DisparityMap::new(width, self.reference.height(), rows.concat())
            .expect("dimensions and NFA are valid by construction")
    }
}

fn check_pair(reference: &GrayImage, secondary: &GrayImage, side: usize) -> Result<()> {
    if reference.height() != secondary.height() {
        return Err(AcbmError::HeightMismatch {
            reference: reference.height(),
            secondary: secondary.height(),
        });
    }
    if reference.complete_block_count(side) == 0 {
        return Err(AcbmError::ImageTooSmall {
            width: reference.width(),
            height: reference.height(),
            side,
            needed: 1,
        });
    }
    Ok(())
}

/// Matches a rectified pair with the full method.
pub fn match_pair(reference: &GrayImage, secondary: &GrayImage, params: &AcbmParams) -> Result<DisparityMap> {
    Ok(StereoMatcher::new(reference, secondary, *params)?.run())
}

/// One pass of 3x3 median filling.
///
/// A rejected, non-border pixel with at least five accepted pixels in its 3x3 neighbourhood
/// takes the lower median of their disparities and the smallest NFA among the accepted
/// neighbours carrying that disparity. Accepted and border pixels are left untouched.
pub fn densify_median(map: &DisparityMap) -> DisparityMap {
    let (w, h) = (map.width(), map.height());
    let mut cells = map.cells().to_vec();
    let mut neighbours: Vec<(i32, f64)> = Vec::with_capacity(9);
    for y in 0..h {
        for x in 0..w {
            match map.get(x, y) {
                Cell::Rejected(RejectReason::NotMeaningful | RejectReason::SelfSimilar) => {}
                _ => continue,
            }
            neighbours.clear();
            for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    if let Cell::Accepted { disparity, nfa } = map.get(nx, ny) {
                        neighbours.push((disparity, nfa));
                    }
                }
            }
            if neighbours.len() < 5 {
                continue;
            }
            neighbours.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let median = neighbours[(neighbours.len() - 1) / 2].0;
            let nfa = neighbours
                .iter()
                .filter(|(d, _)| *d == median)
                .map(|&(_, nfa)| nfa)
                .fold(f64::INFINITY, f64::min);
            cells[y * w + x] = Cell::Accepted {
                disparity: median,
                nfa,
            };
        }
    }
    DisparityMap::new(w, h, cells).expect("same dimensions")
}
