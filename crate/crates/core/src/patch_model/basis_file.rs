//! Binary container for a learned basis.
//!
//! Layout (little-endian): magic `ACBM1`, `u32` block side, `u32` dimension `s`, then `s`
//! mean-block values, `s*s` eigenvector values (one eigenvector per run of `s`) and `s`
//! eigenvalues, all `f64`.

use std::path::Path;

use super::PatchBasis;
use crate::error::{AcbmError, Result};
use crate::imgio::{read_file, write_file};

pub const BASIS_MAGIC: &[u8; 5] = b"ACBM1";

pub fn encode_basis(basis: &PatchBasis) -> Vec<u8> {
    let s = basis.dim();
    let mut out = Vec::with_capacity(13 + 8 * (s * s + 2 * s));
    out.extend_from_slice(BASIS_MAGIC);
    out.extend_from_slice(&(basis.block_side() as u32).to_le_bytes());
    out.extend_from_slice(&(s as u32).to_le_bytes());
    let floats = basis
        .mean_block()
        .iter()
        .chain(basis.eigenvectors())
        .chain(basis.eigenvalues());
    for v in floats {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_basis(bytes: &[u8]) -> Result<PatchBasis> {
    let bad = |msg: String| AcbmError::MalformedBasis(msg);
    if bytes.len() < 13 || &bytes[..5] != BASIS_MAGIC {
        return Err(bad("missing ACBM1 magic".into()));
    }
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
    let side = u32_at(5);
    let s = u32_at(9);
    if side == 0 || side % 2 == 0 || side.checked_mul(side) != Some(s) {
        return Err(bad(format!("inconsistent block side {side} and dimension {s}")));
    }
    let floats = s * s + 2 * s;
    let body = &bytes[13..];
    if body.len() != 8 * floats {
        return Err(bad(format!(
            "expected {} payload bytes, found {}",
            8 * floats,
            body.len()
        )));
    }
    let mut values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad("non-finite value".into()));
    }
    let eigenvalues = values.split_off(s + s * s);
    let eigenvectors = values.split_off(s);
    PatchBasis::from_parts(side, values, eigenvectors, eigenvalues)
        .map_err(|e| bad(e.to_string()))
}

pub fn save_basis(basis: &PatchBasis, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_basis(basis))
}

pub fn load_basis(path: impl AsRef<Path>) -> Result<PatchBasis> {
    decode_basis(&read_file(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::GrayImage;
    use crate::patch_model::compute_patch_basis;

    #[test]
    fn roundtrip_is_exact() {
        let img = GrayImage::from_fn(15, 12, |x, y| ((x * x + 3 * y) % 23) as f64).unwrap();
        let basis = compute_patch_basis(&img, 3).unwrap();
        let bytes = encode_basis(&basis);
        assert_eq!(&bytes[..5], b"ACBM1");
        assert_eq!(decode_basis(&bytes).unwrap(), basis);
    }

    #[test]
    fn rejects_damaged_files() {
        let img = GrayImage::from_fn(15, 12, |x, y| ((x * 5 + y * y) % 19) as f64).unwrap();
        let bytes = encode_basis(&compute_patch_basis(&img, 3).unwrap());
        assert!(decode_basis(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode_basis(b"ACBM2aaaaaaaaaaaaa").is_err());
        let mut skewed = bytes.clone();
        // Corrupt the first eigenvector entry.
        let at = 13 + 8 * 9;
        skewed[at..at + 8].copy_from_slice(&5.0f64.to_le_bytes());
        assert!(matches!(decode_basis(&skewed), Err(AcbmError::MalformedBasis(_))));
    }
}
