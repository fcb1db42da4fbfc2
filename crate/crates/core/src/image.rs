use crate::error::{AcbmError, Result};

/// Grayscale image with real-valued samples stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(AcbmError::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if samples.len() != width * height {
            return Err(AcbmError::DimensionMismatch {
                expected: width * height,
                actual: samples.len(),
            });
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(AcbmError::InvalidImage(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(GrayImage {
            width,
            height,
            samples,
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self::new(width, height, samples)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
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
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.samples[y * self.width..(y + 1) * self.width]
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Whether the `side`x`side` window centred at `(x, y)` lies inside the image.
    #[inline]
    pub fn block_fits(&self, x: isize, y: isize, side: usize) -> bool {
        let r = (side / 2) as isize;
        x - r >= 0 && y - r >= 0 && x + r < self.width as isize && y + r < self.height as isize
    }

    /// Number of pixels whose `side`x`side` window lies entirely inside the image.
    pub fn complete_block_count(&self, side: usize) -> usize {
        if side > self.width || side > self.height {
            return 0;
        }
        (self.width - side + 1) * (self.height - side + 1)
    }
}
