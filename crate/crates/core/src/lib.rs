//! # msbhide
//!
//! Reversible data hiding in encrypted grayscale images.
//!
//! A content owner labels every pixel with the number of leading bits it shares with
//! its median-edge-detector prediction, encrypts the image with a keyed XOR stream and
//! embeds the prefix-coded label map into the vacated most significant bits. A data
//! hider can then decode the label map without any key and fill the remaining space
//! with a payload masked by a separate key. A receiver extracts the payload with the
//! data-hiding key and, independently, restores the original image bit for bit with
//! the encryption key.

pub mod analysis;
pub mod bitstream;
pub mod cipher;
pub mod code;
pub mod codec;
mod error;
pub mod image;
pub mod metrics;
pub mod prediction;

pub use bitstream::{AuxHeader, BitReader, Bits, HEADER_BITS};
pub use cipher::{KeySpec, Keystream};
pub use code::{assign_codes, CodeTable, CODEWORDS};
pub use codec::{
    hider_decode_labels, hider_embed, owner_encode, plan_container, receiver_extract,
    receiver_recover, CapacityReport, DecodedContainer, EmbedReport, OwnerOutput,
};
pub use error::{Error, Result};
pub use image::{read_pgm, write_pgm, GrayImage};
pub use metrics::Scalar;
pub use prediction::{build_label_map, histogram, LabelHistogram, LabelMap, Tag};

/// Quality report in double precision.
pub type QualityReport = metrics::QualityReport<f64>;
/// Quality report in single precision.
pub type QualityReport32 = metrics::QualityReport<f32>;
