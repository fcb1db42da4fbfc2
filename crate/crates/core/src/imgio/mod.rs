//! Image and disparity file I/O.

mod disparity_text;
mod netpbm;

use std::fs;
use std::path::Path;

pub use disparity_text::{
    disparity_viz, encode_disparity_text, encode_disparity_viz, parse_disparity_text,
    DisparityGrid, REJECTED_SENTINEL,
};
pub use netpbm::{decode_gray, encode_pfm, encode_pgm, quantize_to_u8};

use crate::disparity::DisparityMap;
use crate::error::{AcbmError, Result};
use crate::image::GrayImage;

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| AcbmError::UnreadableFile {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| AcbmError::WriteFailure {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a PGM (P2/P5, up to 16 bits) or grayscale PFM file.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    decode_gray(&read_file(path.as_ref())?)
}

pub fn save_pgm(image: &GrayImage, path: impl AsRef<Path>, maxval: u16) -> Result<()> {
    write_file(path.as_ref(), &encode_pgm(image, maxval)?)
}

pub fn save_pfm(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_pfm(image))
}

/// Saves an image choosing the format from the extension: `.pfm` keeps real values, anything
/// else becomes an 8-bit PGM after rounding and clamping.
pub fn save_gray(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_pfm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pfm"));
    if is_pfm {
        save_pfm(image, path)
    } else {
        save_pgm(&quantize_to_u8(image), path, 255)
    }
}

/// Writes the disparity text file and, optionally, the PGM visualization.
pub fn save_disparity(
    map: &DisparityMap,
    data_path: impl AsRef<Path>,
    viz_path: Option<&Path>,
) -> Result<()> {
    write_file(data_path.as_ref(), encode_disparity_text(map).as_bytes())?;
    if let Some(viz) = viz_path {
        write_file(viz, &encode_disparity_viz(map))?;
    }
    Ok(())
}

pub fn load_disparity_text(path: impl AsRef<Path>) -> Result<DisparityGrid> {
    let bytes = read_file(path.as_ref())?;
    let text = String::from_utf8(bytes).map_err(|_| AcbmError::MalformedDisparity {
        line: 0,
        reason: "not UTF-8".into(),
    })?;
    parse_disparity_text(&text)
}
