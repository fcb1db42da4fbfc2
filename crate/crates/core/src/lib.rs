//! A contrario block matching for rectified stereo pairs.
//!
//! A block match is accepted only when it is unlikely to arise by chance under a background
//! model learned from the secondary image (its number of false alarms is at most epsilon) and
//! when the reference block is not repeated along its own epipolar line. The result is a
//! sparse disparity map whose accepted pixels are reliable.
//!
//! ```no_run
//! use acbm::{imgio, match_pair, AcbmParams};
//!
//! # fn main() -> acbm::Result<()> {
//! let left = imgio::load_gray("left.pgm")?;
//! let right = imgio::load_gray("right.pgm")?;
//! let map = match_pair(&left, &right, &AcbmParams::with_range(8))?;
//! imgio::save_disparity(&map, "disp.tsv", None)?;
//! # Ok(())
//! # }
//! ```

pub mod contrario;
pub mod disparity;
pub mod error;
pub mod image;
pub mod imgio;
mod par;
pub mod patch_model;
pub mod pipeline;
pub mod self_sim;
pub mod validation;

pub use contrario::AcbmParams;
pub use disparity::{Cell, DisparityMap, RejectReason};
pub use error::{AcbmError, Result};
pub use image::GrayImage;
pub use patch_model::{BackgroundModel, PatchBasis};
pub use pipeline::{densify_median, match_pair, MatchMode, StereoMatcher};
