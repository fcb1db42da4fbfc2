//! Counting non-decreasing probability profiles.

use crate::error::{AcbmError, Result};

/// Binomial coefficients `C(m, k)` for `0 <= k <= max_k`, built row by row from Pascal's
/// rule. Returns `table[k]` for the requested row `m`.
fn pascal_row(m: usize, max_k: usize) -> Result<Vec<u128>> {
    let mut row = vec![0u128; max_k + 1];
    row[0] = 1;
    for _ in 0..m {
        for k in (1..=max_k).rev() {
            row[k] = row[k]
                .checked_add(row[k - 1])
                .ok_or(AcbmError::Overflow("binomial coefficient"))?;
        }
    }
    Ok(row)
}

/// `C(m, k)` with `C(m, 0) = 1` for every `m >= -1` and `C(m, k) = 0` when `m < k`.
pub fn binomial(m: i64, k: i64) -> Result<u128> {
    if k == 0 && m >= -1 {
        return Ok(1);
    }
    if k < 0 || m < k {
        return Ok(0);
    }
    Ok(pascal_row(m as usize, k as usize)?[k as usize])
}

/// Number of non-decreasing maps `{1..N} -> {1..Q}`, summed by the range of values taken:
/// `sum_{t=0}^{Q-1} (t+1) * C(N+Q-t-3, Q-t-1)`.
pub fn count_nondecreasing(n: usize, q: usize) -> Result<u64> {
    if n == 0 || q == 0 {
        return Err(AcbmError::InvalidParameter(format!(
            "count_nondecreasing needs N >= 1 and Q >= 1, got N={n} Q={q}"
        )));
    }
    let (n, q) = (n as i64, q as i64);
    let mut total: u128 = 0;
    for t in 0..q {
        let c = binomial(n + q - t - 3, q - t - 1)?;
        let term = c
            .checked_mul((t + 1) as u128)
            .ok_or(AcbmError::Overflow("FC_{N,Q}"))?;
        total = total
            .checked_add(term)
            .ok_or(AcbmError::Overflow("FC_{N,Q}"))?;
    }
    u64::try_from(total).map_err(|_| AcbmError::Overflow("FC_{N,Q}"))
}
