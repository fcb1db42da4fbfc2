//! Background model of image blocks: a PCA basis learned from every complete block of an
//! image, plus the empirical distribution of each PCA coefficient.

mod basis_file;
mod cdf;
mod jacobi;
mod sampling;

pub use basis_file::{decode_basis, encode_basis, load_basis, save_basis, BASIS_MAGIC};
pub use cdf::ComponentCdf;
pub use jacobi::{symmetric_eigen, SymmetricEigen};
pub use sampling::{sample_background_block, sample_background_coefficients};

use crate::error::{AcbmError, Result};
use crate::image::GrayImage;
use crate::par;

/// Rows of blocks accumulated together when forming the covariance.
const COVARIANCE_ROW_CHUNK: usize = 8;

/// Copies the `side`x`side` window centred at `(x, y)` into `out`, row-major.
pub fn extract_block_into(
    image: &GrayImage,
    x: usize,
    y: usize,
    side: usize,
    out: &mut [f64],
) -> Result<()> {
    if side % 2 == 0 || !image.block_fits(x as isize, y as isize, side) {
        return Err(AcbmError::BlockOutOfBounds { x, y, side });
    }
    debug_assert_eq!(out.len(), side * side);
    let r = side / 2;
    for dy in 0..side {
        let row = image.row(y + dy - r);
        out[dy * side..(dy + 1) * side].copy_from_slice(&row[x - r..x + r + 1]);
    }
    Ok(())
}

pub fn extract_block(image: &GrayImage, x: usize, y: usize, side: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; side * side];
    extract_block_into(image, x, y, side, &mut out)?;
    Ok(out)
}

/// Orthonormal PCA basis of `side`x`side` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchBasis {
    block_side: usize,
    mean_block: Vec<f64>,
    /// Row `i` holds eigenvector `i`; rows sorted by descending eigenvalue.
    eigenvectors: Vec<f64>,
    eigenvalues: Vec<f64>,
}

impl PatchBasis {
    /// Assembles a basis from raw parts, checking dimensions and orthonormality (1e-6).
    pub fn from_parts(
        block_side: usize,
        mean_block: Vec<f64>,
        eigenvectors: Vec<f64>,
        eigenvalues: Vec<f64>,
    ) -> Result<Self> {
        let s = block_side * block_side;
        if block_side == 0 || block_side % 2 == 0 {
            return Err(AcbmError::InvalidParameter(format!(
                "block side {block_side} must be odd"
            )));
        }
        for (what, len, want) in [
            ("mean block", mean_block.len(), s),
            ("eigenvectors", eigenvectors.len(), s * s),
            ("eigenvalues", eigenvalues.len(), s),
        ] {
            if len != want {
                return Err(AcbmError::InvalidParameter(format!(
                    "{what}: expected {want} values, found {len}"
                )));
            }
        }
        let basis = PatchBasis {
            block_side,
            mean_block,
            eigenvectors,
            eigenvalues,
        };
        let err = basis.orthonormality_error();
        if !(err <= 1e-6) {
            return Err(AcbmError::InvalidParameter(format!(
                "eigenvectors not orthonormal (max Gram error {err:e})"
            )));
        }
        Ok(basis)
    }

    pub fn block_side(&self) -> usize {
        self.block_side
    }

    /// Block dimension `s = side^2`.
    pub fn dim(&self) -> usize {
        self.mean_block.len()
    }

    pub fn mean_block(&self) -> &[f64] {
        &self.mean_block
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, i: usize) -> &[f64] {
        let s = self.dim();
        &self.eigenvectors[i * s..(i + 1) * s]
    }

    pub fn eigenvectors(&self) -> &[f64] {
        &self.eigenvectors
    }

    /// Largest `|<v_i, v_j> - delta_ij|` over all pairs of eigenvectors.
    pub fn orthonormality_error(&self) -> f64 {
        let s = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..s {
            for j in i..s {
                let dot: f64 = self
                    .eigenvector(i)
                    .iter()
                    .zip(self.eigenvector(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Coefficients of the mean-centred block on every eigenvector.
    pub fn project(&self, block: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.project_into(block, &mut out)?;
        Ok(out)
    }

    pub fn project_into(&self, block: &[f64], out: &mut [f64]) -> Result<()> {
        let s = self.dim();
        if block.len() != s {
            return Err(AcbmError::DimensionMismatch {
                expected: s,
                actual: block.len(),
            });
        }
        let centred: Vec<f64> = block
            .iter()
            .zip(&self.mean_block)
            .map(|(b, m)| b - m)
            .collect();
        for (i, c) in out.iter_mut().enumerate() {
            *c = dot(self.eigenvector(i), &centred);
        }
        Ok(())
    }

    /// Block with the given coefficients: `mean + sum_i c_i v_i`.
    pub fn reconstruct(&self, coefficients: &[f64]) -> Result<Vec<f64>> {
        let s = self.dim();
        if coefficients.len() != s {
            return Err(AcbmError::DimensionMismatch {
                expected: s,
                actual: coefficients.len(),
            });
        }
        let mut block = self.mean_block.clone();
        for (i, &c) in coefficients.iter().enumerate() {
            for (b, v) in block.iter_mut().zip(self.eigenvector(i)) {
                *b += c * v;
            }
        }
        Ok(block)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn require_blocks(image: &GrayImage, side: usize, needed: usize) -> Result<usize> {
    if side == 0 || side % 2 == 0 {
        return Err(AcbmError::InvalidParameter(format!(
            "block side {side} must be odd"
        )));
    }
    let count = image.complete_block_count(side);
    if count < needed {
        return Err(AcbmError::ImageTooSmall {
            width: image.width(),
            height: image.height(),
            side,
            needed,
        });
    }
    Ok(count)
}

/// Learns the PCA basis of all complete `side`x`side` blocks of `image`.
///
/// The covariance is the population covariance of the mean-centred blocks. Eigenvalues are
/// clamped at zero and each eigenvector's sign is fixed so that its entries sum to a
/// non-negative value.
pub fn compute_patch_basis(image: &GrayImage, side: usize) -> Result<PatchBasis> {
    let s = side * side;
    let count = require_blocks(image, side, s)?;
    let r = side / 2;
    let ys = r..image.height() - r;
    let xs = r..image.width() - r;

    let row_sums = par::map_range(ys.clone(), |y| {
        let mut sum = vec![0.0; s];
        let mut block = vec![0.0; s];
        for x in xs.clone() {
            extract_block_into(image, x, y, side, &mut block).expect("interior block");
            for (acc, v) in sum.iter_mut().zip(&block) {
                *acc += v;
            }
        }
        sum
    });
    let mut mean = vec![0.0; s];
    for row in &row_sums {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= count as f64;
    }

    let y_start = ys.start;
    let chunks = ys.len().div_ceil(COVARIANCE_ROW_CHUNK);
    let partials = par::map_range(0..chunks, |chunk| {
        let mut acc = vec![0.0; s * s];
        let mut block = vec![0.0; s];
        let lo = y_start + chunk * COVARIANCE_ROW_CHUNK;
        let hi = (lo + COVARIANCE_ROW_CHUNK).min(ys.end);
        for y in lo..hi {
            for x in xs.clone() {
                extract_block_into(image, x, y, side, &mut block).expect("interior block");
                for (b, m) in block.iter_mut().zip(&mean) {
                    *b -= m;
                }
                for i in 0..s {
                    let bi = block[i];
                    let row = &mut acc[i * s..(i + 1) * s];
                    for j in i..s {
                        row[j] += bi * block[j];
                    }
                }
            }
        }
        acc
    });
    let mut cov = vec![0.0; s * s];
    for part in &partials {
        for (c, p) in cov.iter_mut().zip(part) {
            *c += p;
        }
    }
    for i in 0..s {
        for j in i..s {
            let v = cov[i * s + j] / count as f64;
            cov[i * s + j] = v;
            cov[j * s + i] = v;
        }
    }

    let eig = symmetric_eigen(&cov, s)?;
    let mut eigenvectors = eig.vectors;
    for i in 0..s {
        let v = &mut eigenvectors[i * s..(i + 1) * s];
        let total: f64 = v.iter().sum();
        let flip = if total.abs() > 1e-12 {
            total < 0.0
        } else {
            v.iter().find(|x| x.abs() > 1e-12).is_some_and(|&x| x < 0.0)
        };
        if flip {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let eigenvalues = eig.values.into_iter().map(|l| l.max(0.0)).collect();
    Ok(PatchBasis {
        block_side: side,
        mean_block: mean,
        eigenvectors,
        eigenvalues,
    })
}

/// Projects every complete block of `image` on `basis`. Returns one `s`-vector per block,
/// flattened in row-major pixel order of the block centres.
pub fn block_coefficients(image: &GrayImage, basis: &PatchBasis) -> Result<Vec<f64>> {
    let side = basis.block_side();
    let s = basis.dim();
    require_blocks(image, side, 1)?;
    let r = side / 2;
    let xs = r..image.width() - r;
    let rows = par::map_range(r..image.height() - r, |y| {
        let mut block = vec![0.0; s];
        let mut out = vec![0.0; xs.len() * s];
        for (k, x) in xs.clone().enumerate() {
            extract_block_into(image, x, y, side, &mut block).expect("interior block");
            basis
                .project_into(&block, &mut out[k * s..(k + 1) * s])
                .expect("basis dimension");
        }
        out
    });
    Ok(rows.concat())
}

/// Empirical CDF of each PCA coefficient over all complete blocks of `image`.
pub fn build_component_cdfs(image: &GrayImage, basis: &PatchBasis) -> Result<Vec<ComponentCdf>> {
    let s = basis.dim();
    require_blocks(image, basis.block_side(), 2)?;
    let coeffs = block_coefficients(image, basis)?;
    let count = coeffs.len() / s;
    Ok(par::map_range(0..s, |i| {
        let values = (0..count).map(|k| coeffs[k * s + i]).collect();
        ComponentCdf::new(i, values)
    }))
}

/// Basis and per-component CDFs learned from the secondary image.
#[derive(Debug, Clone)]
pub struct BackgroundModel {
    basis: PatchBasis,
    cdfs: Vec<ComponentCdf>,
}

impl BackgroundModel {
    pub fn learn(image: &GrayImage, side: usize) -> Result<Self> {
        let basis = compute_patch_basis(image, side)?;
        Self::with_basis(image, basis)
    }

    /// Keeps a pre-computed basis and learns only the coefficient distributions.
    pub fn with_basis(image: &GrayImage, basis: PatchBasis) -> Result<Self> {
        let cdfs = build_component_cdfs(image, &basis)?;
        Ok(BackgroundModel { basis, cdfs })
    }

    pub fn basis(&self) -> &PatchBasis {
        &self.basis
    }

    pub fn cdfs(&self) -> &[ComponentCdf] {
        &self.cdfs
    }

    pub fn cdf(&self, component: usize) -> &ComponentCdf {
        &self.cdfs[component]
    }

    pub fn block_side(&self) -> usize {
        self.basis.block_side()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}
