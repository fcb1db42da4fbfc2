//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use crate::error::{AcbmError, Result};

pub(crate) const MAX_SWEEPS: usize = 100;
const CONVERGENCE_RATIO: f64 = 1e-12;

/// Eigenvalues and eigenvectors of a symmetric matrix.
///
/// `vectors` is row-major with one eigenvector per row, rows ordered by descending eigenvalue.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub sweeps: usize,
}

fn off_and_diag_norms(a: &[f64], n: usize) -> (f64, f64) {
    let mut off = 0.0;
    let mut diag = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = a[i * n + j];
            if i == j {
                diag += v * v;
            } else {
                off += v * v;
            }
        }
    }
    (off.sqrt(), diag.sqrt())
}

/// Diagonalizes the symmetric `n`x`n` row-major matrix `a` by cyclic Jacobi rotations.
///
/// Stops once the off-diagonal Frobenius norm is at most `1e-12` times the diagonal norm.
pub fn symmetric_eigen(matrix: &[f64], n: usize) -> Result<SymmetricEigen> {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n");
    let mut a = matrix.to_vec();
    // Columns of `v` accumulate the rotations.
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let mut sweeps = 0;
    loop {
        let (off, diag) = off_and_diag_norms(&a, n);
        if off <= CONVERGENCE_RATIO * diag {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(AcbmError::EigenNoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, n, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        values.push(a[k * n + k]);
        vectors.extend((0..n).map(|r| v[r * n + k]));
    }
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Applies `A <- J^T A J` and `V <- V J` for the rotation in the `(p, q)` plane.
fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}
