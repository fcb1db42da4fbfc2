//! Straightforward reimplementation of the matcher, written for clarity rather than speed.
//! Shares only the PCA basis with the library.
#![allow(dead_code)]

use acbm::patch_model::PatchBasis;
use acbm::{AcbmParams, Cell, GrayImage, RejectReason};

pub fn block(img: &GrayImage, x: usize, y: usize, side: usize) -> Vec<f64> {
    let r = side / 2;
    let mut out = Vec::with_capacity(side * side);
    for dy in 0..side {
        for dx in 0..side {
            out.push(img.get(x + dx - r, y + dy - r));
        }
    }
    out
}

pub fn coefficients(basis: &PatchBasis, b: &[f64]) -> Vec<f64> {
    (0..basis.dim())
        .map(|i| {
            let v = basis.eigenvector(i);
            let mut acc = 0.0;
            for k in 0..b.len() {
                acc += v[k] * (b[k] - basis.mean_block()[k]);
            }
            acc
        })
        .collect()
}

/// All coefficient values of component `i` over the complete blocks of `img`.
pub fn component_samples(img: &GrayImage, basis: &PatchBasis) -> Vec<Vec<f64>> {
    let side = basis.block_side();
    let r = side / 2;
    let mut out = vec![Vec::new(); basis.dim()];
    for y in r..img.height() - r {
        for x in r..img.width() - r {
            for (i, c) in coefficients(basis, &block(img, x, y, side)).into_iter().enumerate() {
                out[i].push(c);
            }
        }
    }
    out
}

/// Normalised cumulative histogram by counting: a value equal to a sample sits at the last
/// rank of its tie group, values between two consecutive distinct samples interpolate.
pub fn naive_cdf(samples: &[f64], x: f64) -> f64 {
    let n = samples.len();
    let le = samples.iter().filter(|&&v| v <= x).count();
    if le == 0 {
        return 0.0;
    }
    if le == n {
        return 1.0;
    }
    let lo = samples.iter().copied().filter(|&v| v <= x).fold(f64::NEG_INFINITY, f64::max);
    let hi = samples.iter().copied().filter(|&v| v > x).fold(f64::INFINITY, f64::min);
    if x == lo {
        return le as f64 / n as f64;
    }
    let le_hi = samples.iter().filter(|&&v| v <= hi).count();
    let frac = (x - lo) / (hi - lo);
    (le as f64 + frac * (le_hi - le) as f64) / n as f64
}

pub fn naive_resemblance(h_ref: f64, h_cand: f64) -> f64 {
    if h_cand - h_ref > h_ref {
        h_cand
    } else if h_ref - h_cand > 1.0 - h_ref {
        1.0 - h_cand
    } else {
        2.0 * (h_ref - h_cand).abs()
    }
}

/// Every non-increasing exponent tuple of length `n` with entries below `q`.
pub fn enumerate_profiles(n: usize, q: usize) -> Vec<Vec<u8>> {
    let mut all = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for t in &all {
            let cap = t.last().map_or(q as u8 - 1, |&e| e);
            for e in 0..=cap {
                let mut t2 = t.clone();
                t2.push(e);
                next.push(t2);
            }
        }
        all = next;
    }
    all
}

/// Infimum over the enumerated profiles that dominate `p_hat`.
pub fn brute_force_quantize(p_hat: &[f64], q: usize, profiles: &[Vec<u8>]) -> Vec<u8> {
    let dominating: Vec<&Vec<u8>> = profiles
        .iter()
        .filter(|t| t.iter().zip(p_hat).all(|(&e, &p)| 0.5f64.powi(e as i32) >= p))
        .collect();
    let inf: Vec<u8> = (0..p_hat.len())
        .map(|i| dominating.iter().map(|t| t[i]).max().unwrap())
        .collect();
    assert!(dominating.contains(&&inf), "infimum must itself dominate");
    let _ = q;
    inf
}

pub fn naive_fc(n: usize, q: usize) -> u64 {
    enumerate_profiles(n, q).len() as u64
}

pub fn ssd_blocks(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone)]
pub struct NaiveCandidate {
    pub disparity: i32,
    pub exponents: Vec<u8>,
    pub nfa: f64,
}

#[derive(Debug, Clone)]
pub struct NaivePixel {
    pub candidates: Vec<NaiveCandidate>,
    pub chosen: Option<i32>,
    pub cell: Cell,
}

pub struct NaiveMatcher<'a> {
    pub reference: &'a GrayImage,
    pub secondary: &'a GrayImage,
    pub basis: &'a PatchBasis,
    pub params: AcbmParams,
    samples: Vec<Vec<f64>>,
    profiles: Vec<Vec<u8>>,
    n_test: f64,
}

impl<'a> NaiveMatcher<'a> {
    pub fn new(reference: &'a GrayImage, secondary: &'a GrayImage, basis: &'a PatchBasis, params: AcbmParams) -> Self {
        let samples = component_samples(secondary, basis);
        let profiles = enumerate_profiles(params.components, params.quanta);
        let n_test = (reference.len() * (2 * params.range + 1)) as f64 * profiles.len() as f64;
        NaiveMatcher { reference, secondary, basis, params, samples, profiles, n_test }
    }

    fn fits(img: &GrayImage, x: i64, y: i64, side: usize) -> bool {
        let r = (side / 2) as i64;
        x - r >= 0 && y - r >= 0 && x + r < img.width() as i64 && y + r < img.height() as i64
    }

    pub fn pixel(&self, x: usize, y: usize) -> NaivePixel {
        let side = self.params.block_side;
        if !Self::fits(self.reference, x as i64, y as i64, side) {
            return NaivePixel { candidates: vec![], chosen: None, cell: Cell::Rejected(RejectReason::Border) };
        }
        let b_ref = block(self.reference, x, y, side);
        let c_ref = coefficients(self.basis, &b_ref);
        // stable sort by decreasing magnitude
        let mut order: Vec<usize> = (0..c_ref.len()).collect();
        order.sort_by(|&a, &b| c_ref[b].abs().partial_cmp(&c_ref[a].abs()).unwrap());
        let comps = &order[..self.params.components];

        let r = self.params.range as i32;
        let mut candidates = Vec::new();
        for d in -r..=r {
            let xc = x as i64 + d as i64;
            if !Self::fits(self.secondary, xc, y as i64, side) {
                continue;
            }
            let c_cand = coefficients(self.basis, &block(self.secondary, xc as usize, y, side));
            let p_hat: Vec<f64> = comps
                .iter()
                .map(|&i| {
                    naive_resemblance(naive_cdf(&self.samples[i], c_ref[i]), naive_cdf(&self.samples[i], c_cand[i]))
                })
                .collect();
            let exponents = brute_force_quantize(&p_hat, self.params.quanta, &self.profiles);
            let prob: f64 = exponents.iter().map(|&e| 0.5f64.powi(e as i32)).product();
            candidates.push(NaiveCandidate { disparity: d, exponents, nfa: self.n_test * prob });
        }
        // lowest NFA, then smallest |d|, then negative first
        let best = candidates
            .iter()
            .min_by(|a, b| {
                a.nfa
                    .partial_cmp(&b.nfa)
                    .unwrap()
                    .then(a.disparity.abs().cmp(&b.disparity.abs()))
                    .then(a.disparity.cmp(&b.disparity))
            })
            .cloned();
        let Some(best) = best else {
            return NaivePixel { candidates, chosen: None, cell: Cell::Rejected(RejectReason::Border) };
        };
        let cell = if best.nfa > self.params.epsilon {
            Cell::Rejected(RejectReason::NotMeaningful)
        } else {
            let cross = ssd_blocks(&b_ref, &block(self.secondary, (x as i32 + best.disparity) as usize, y, side));
            let mut self_min = f64::INFINITY;
            for k in 2..=r {
                for xn in [x as i64 - k as i64, x as i64 + k as i64] {
                    if Self::fits(self.reference, xn, y as i64, side) {
                        self_min = self_min.min(ssd_blocks(&b_ref, &block(self.reference, xn as usize, y, side)));
                    }
                }
            }
            if cross < self_min {
                Cell::Accepted { disparity: best.disparity, nfa: best.nfa }
            } else {
                Cell::Rejected(RejectReason::SelfSimilar)
            }
        };
        NaivePixel { candidates, chosen: Some(best.disparity), cell }
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}
