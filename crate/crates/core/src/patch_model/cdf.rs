//! Empirical cumulative distribution of one PCA coefficient.

/// Piecewise-linear empirical CDF over a sorted training sample.
///
/// At a sample value `v` the CDF equals `#{x <= v} / n` (tied values share the rank of their
/// last occurrence). Between two adjacent distinct sample values it is linear. Below the
/// minimum it is 0, above the maximum it is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentCdf {
    component: usize,
    sorted: Vec<f64>,
}

impl ComponentCdf {
    /// Builds the CDF from unsorted training values. Panics on an empty or non-finite sample.
    pub fn new(component: usize, mut values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "empirical CDF needs at least one value");
        assert!(values.iter().all(|v| v.is_finite()), "non-finite training value");
        for v in &mut values {
            // Fold -0.0 onto +0.0 so sorting agrees with `<=`.
            *v += 0.0;
        }
        values.sort_unstable_by(f64::total_cmp);
        ComponentCdf {
            component,
            sorted: values,
        }
    }

    /// Zero-based component index this CDF describes.
    pub fn component(&self) -> usize {
        self.component
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn eval(&self, value: f64) -> f64 {
        let n = self.sorted.len();
        let below = self.sorted.partition_point(|&v| v <= value);
        if below == 0 {
            return 0.0;
        }
        if below == n {
            return 1.0;
        }
        let lo = self.sorted[below - 1];
        let hi = self.sorted[below];
        if value == lo {
            return below as f64 / n as f64;
        }
        let hi_end = below + self.sorted[below..].partition_point(|&v| v <= hi);
        let frac = (value - lo) / (hi - lo);
        (below as f64 + frac * (hi_end - below) as f64) / n as f64
    }

    /// Inverse of [`eval`](Self::eval): the smallest value whose CDF reaches `u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.sorted.len();
        let t = u.clamp(0.0, 1.0) * n as f64;
        let idx = (t.ceil() as usize).saturating_sub(1).min(n - 1);
        let hi = self.sorted[idx];
        let start = self.sorted.partition_point(|&v| v < hi);
        if start == 0 {
            return hi;
        }
        let end = start + self.sorted[start..].partition_point(|&v| v <= hi);
        let lo = self.sorted[start - 1];
        let frac = ((t - start as f64) / (end - start) as f64).clamp(0.0, 1.0);
        lo + frac * (hi - lo)
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }
}
