//! PGM (P2/P5) and grayscale PFM (Pf) codecs.
//!
//! Samples decode to `f64` luminance without rescaling: 8- and 16-bit PGM values keep their
//! integer value and PFM floats are widened exactly.

use crate::error::{AcbmError, Result};
use crate::image::GrayImage;

/// Cursor over a netpbm header: whitespace separated tokens with `#` comments.
struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn new(bytes: &'a [u8], pos: usize) -> Self {
        HeaderReader { bytes, pos }
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self, what: &str) -> Result<&'a str> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(AcbmError::CorruptHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| AcbmError::CorruptHeader(format!("non-ASCII {what}")))
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let tok = self.token(what)?;
        tok.parse()
            .map_err(|_| AcbmError::CorruptHeader(format!("unparsable {what} {tok:?}")))
    }

    /// Consumes the single whitespace byte separating the header from binary data.
    fn end_of_header(&mut self) -> Result<usize> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(self.pos + 1),
            Some(_) => Err(AcbmError::CorruptHeader(
                "missing whitespace after header".into(),
            )),
            None => Ok(self.pos),
        }
    }
}

fn dimensions(header: &mut HeaderReader<'_>) -> Result<(usize, usize)> {
    let width: usize = header.parse("width")?;
    let height: usize = header.parse("height")?;
    if width == 0 || height == 0 {
        return Err(AcbmError::CorruptHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    width
        .checked_mul(height)
        .ok_or_else(|| AcbmError::CorruptHeader("dimensions overflow".into()))?;
    Ok((width, height))
}

/// Decodes an in-memory PGM or PFM file.
pub fn decode_gray(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 {
        return Err(AcbmError::UnsupportedFormat {
            magic: String::from_utf8_lossy(bytes).into_owned(),
        });
    }
    match &bytes[..2] {
        b"P2" => decode_pgm_ascii(bytes),
        b"P5" => decode_pgm_binary(bytes),
        b"Pf" => decode_pfm(bytes),
        magic => Err(AcbmError::UnsupportedFormat {
            magic: String::from_utf8_lossy(magic).into_owned(),
        }),
    }
}

fn read_maxval(header: &mut HeaderReader<'_>) -> Result<u32> {
    let maxval: u32 = header.parse("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(AcbmError::CorruptHeader(format!(
            "maxval {maxval} outside 1..=65535"
        )));
    }
    Ok(maxval)
}

fn decode_pgm_ascii(bytes: &[u8]) -> Result<GrayImage> {
    let mut header = HeaderReader::new(bytes, 2);
    let (width, height) = dimensions(&mut header)?;
    let maxval = read_maxval(&mut header)?;
    let expected = width * height;
    let mut samples = Vec::with_capacity(expected);
    while samples.len() < expected {
        header.skip_space_and_comments();
        if header.pos >= bytes.len() {
            return Err(AcbmError::TruncatedData {
                expected,
                found: samples.len(),
            });
        }
        let v: u32 = header.parse("sample")?;
        if v > maxval {
            return Err(AcbmError::CorruptHeader(format!(
                "sample {v} exceeds maxval {maxval}"
            )));
        }
        samples.push(v as f64);
    }
    GrayImage::new(width, height, samples)
}

fn decode_pgm_binary(bytes: &[u8]) -> Result<GrayImage> {
    let mut header = HeaderReader::new(bytes, 2);
    let (width, height) = dimensions(&mut header)?;
    let maxval = read_maxval(&mut header)?;
    let data = &bytes[header.end_of_header()?..];
    let expected = width * height;
    let samples: Vec<f64> = if maxval < 256 {
        if data.len() < expected {
            return Err(AcbmError::TruncatedData {
                expected,
                found: data.len(),
            });
        }
        data[..expected].iter().map(|&b| b as f64).collect()
    } else {
        if data.len() < 2 * expected {
            return Err(AcbmError::TruncatedData {
                expected,
                found: data.len() / 2,
            });
        }
        data[..2 * expected]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64)
            .collect()
    };
    GrayImage::new(width, height, samples)
}

fn decode_pfm(bytes: &[u8]) -> Result<GrayImage> {
    let mut header = HeaderReader::new(bytes, 2);
    let (width, height) = dimensions(&mut header)?;
    let scale: f32 = header.parse("scale")?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(AcbmError::CorruptHeader(format!("bad PFM scale {scale}")));
    }
    let little_endian = scale < 0.0;
    let data = &bytes[header.end_of_header()?..];
    let expected = width * height;
    if data.len() < 4 * expected {
        return Err(AcbmError::TruncatedData {
            expected,
            found: data.len() / 4,
        });
    }
    let mut samples = vec![0.0; expected];
    // PFM stores rows bottom to top.
    for (i, chunk) in data[..4 * expected].chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little_endian {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let (row, col) = (i / width, i % width);
        samples[(height - 1 - row) * width + col] = v as f64;
    }
    GrayImage::new(width, height, samples)
}

/// Encodes a binary PGM (P5). Every sample must be an integer in `0..=maxval`.
pub fn encode_pgm(image: &GrayImage, maxval: u16) -> Result<Vec<u8>> {
    if maxval == 0 {
        return Err(AcbmError::InvalidParameter("maxval must be positive".into()));
    }
    let mut out = format!("P5\n{} {}\n{}\n", image.width(), image.height(), maxval).into_bytes();
    let wide = maxval > 255;
    out.reserve(image.len() * if wide { 2 } else { 1 });
    for (i, &v) in image.samples().iter().enumerate() {
        if v < 0.0 || v > maxval as f64 || v.fract() != 0.0 {
            return Err(AcbmError::InvalidImage(format!(
                "sample {v} at index {i} is not an integer in 0..={maxval}"
            )));
        }
        if wide {
            out.extend_from_slice(&(v as u16).to_be_bytes());
        } else {
            out.push(v as u8);
        }
    }
    Ok(out)
}

/// Encodes a little-endian grayscale PFM. Samples are narrowed to `f32`.
pub fn encode_pfm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("Pf\n{} {}\n-1.0\n", image.width(), image.height()).into_bytes();
    out.reserve(4 * image.len());
    for y in (0..image.height()).rev() {
        for &v in image.row(y) {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

/// Rounds and clamps every sample into `0..=255` for 8-bit output.
pub fn quantize_to_u8(image: &GrayImage) -> GrayImage {
    let samples = image
        .samples()
        .iter()
        .map(|v| v.round().clamp(0.0, 255.0))
        .collect();
    GrayImage::new(image.width(), image.height(), samples).expect("same dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_p5_bytes_verbatim() {
        let mut file = b"P5\n2 2\n255\n".to_vec();
        file.extend_from_slice(&[0, 128, 255, 64]);
        let img = decode_gray(&file).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.samples(), &[0.0, 128.0, 255.0, 64.0]);
    }

    #[test]
    fn rejects_unknown_magic() {
        let err = decode_gray(b"P7\nWIDTH 2\n").unwrap_err();
        assert!(matches!(err, AcbmError::UnsupportedFormat { .. }), "{err}");
    }

    #[test]
    fn comments_after_magic() {
        let file = b"P2\n# made by hand\n3 1 # width height\n# maxval next\n9\n1 2\n# mid-data\n 9\n";
        let img = decode_gray(file).unwrap();
        assert_eq!(img.samples(), &[1.0, 2.0, 9.0]);
    }

    #[test]
    fn sixteen_bit_is_big_endian() {
        let mut file = b"P5 2 1 65535\n".to_vec();
        file.extend_from_slice(&[0x01, 0x02, 0xff, 0xfe]);
        let img = decode_gray(&file).unwrap();
        assert_eq!(img.samples(), &[258.0, 65534.0]);
    }

    #[test]
    fn corrupt_and_truncated_headers() {
        assert!(matches!(
            decode_gray(b"P5\nx 2\n255\n"),
            Err(AcbmError::CorruptHeader(_))
        ));
        assert!(matches!(
            decode_gray(b"P5\n2 2\n70000\n"),
            Err(AcbmError::CorruptHeader(_))
        ));
        assert!(matches!(
            decode_gray(b"P5\n2 2\n255\n\x01\x02"),
            Err(AcbmError::TruncatedData {
                expected: 4,
                found: 2
            })
        ));
        assert!(matches!(
            decode_gray(b"P2\n2 2\n255\n1 2 3"),
            Err(AcbmError::TruncatedData { .. })
        ));
        assert!(matches!(
            decode_gray(b"P5\n2"),
            Err(AcbmError::CorruptHeader(_))
        ));
    }

    #[test]
    fn pfm_row_order_and_endianness() {
        // Big-endian file (positive scale), bottom row first.
        let mut file = b"Pf\n2 2\n1.0\n".to_vec();
        for v in [3.0f32, 4.0, 1.0, 2.5] {
            file.extend_from_slice(&v.to_be_bytes());
        }
        let img = decode_gray(&file).unwrap();
        assert_eq!(img.samples(), &[1.0, 2.5, 3.0, 4.0]);

        let encoded = encode_pfm(&img);
        assert_eq!(decode_gray(&encoded).unwrap(), img);
    }

    #[test]
    fn encode_rejects_fractional_samples() {
        let img = GrayImage::new(2, 1, vec![1.5, 2.0]).unwrap();
        assert!(encode_pgm(&img, 255).is_err());
    }
}
