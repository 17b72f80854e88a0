//! Keyed XOR stream used for image encryption and payload masking.
//!
//! The generator is an xorshift64* variant seeded by FNV-1a over the key bytes. It is
//! deterministic across platforms, which the container format relies on, but it is
//! **not** a cryptographically secure cipher.

use crate::bitstream::Bits;
use crate::error::{Error, Result};
use crate::image::GrayImage;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const ZERO_SEED_SUBSTITUTE: u64 = 0x9E37_79B9_7F4A_7C15;
const OUTPUT_MULTIPLIER: u64 = 0x2545_F491_4F6C_DD1D;

/// Raw key material.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct KeySpec(Vec<u8>);

impl KeySpec {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Self {
        Self(bytes.into())
    }

    /// Even-length, case-insensitive hex.
    pub fn from_hex(text: &str) -> Result<Self> {
        hex::decode(text.trim())
            .map(Self)
            .map_err(|e| Error::InvalidKey(e.to_string()))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn seed(&self) -> u64 {
        derive_seed(self)
    }

    pub fn keystream(&self) -> Keystream {
        Keystream::new(self.seed())
    }
}

pub fn derive_seed(key: &KeySpec) -> u64 {
    let state = key
        .0
        .iter()
        .fold(FNV_OFFSET, |s, &b| (s ^ b as u64).wrapping_mul(FNV_PRIME));
    if state == 0 {
        ZERO_SEED_SUBSTITUTE
    } else {
        state
    }
}

/// Byte generator; one state update per output byte.
#[derive(Clone, Debug)]
pub struct Keystream {
    state: u64,
}

impl Keystream {
    pub fn new(seed: u64) -> Self {
        debug_assert_ne!(seed, 0, "xorshift state must be nonzero");
        Self { state: seed }
    }

    #[inline]
    pub fn next_byte(&mut self) -> u8 {
        let mut s = self.state;
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        self.state = s;
        (s.wrapping_mul(OUTPUT_MULTIPLIER) >> 56) as u8
    }

    /// Expands successive bytes into bits, most significant first.
    pub fn bits(self) -> impl Iterator<Item = bool> {
        self.flat_map(|b| (0..8).rev().map(move |k| (b >> k) & 1 == 1))
    }
}

impl Iterator for Keystream {
    type Item = u8;

    #[inline]
    fn next(&mut self) -> Option<u8> {
        Some(self.next_byte())
    }
}

pub fn keystream_bytes(seed: u64, count: usize) -> Vec<u8> {
    Keystream::new(seed).take(count).collect()
}

/// XORs every pixel with the row-major keystream.
pub fn xor_image(img: &GrayImage, key: &KeySpec) -> GrayImage {
    let mut out = img.clone();
    for (p, r) in out.pixels_mut().iter_mut().zip(key.keystream()) {
        *p ^= r;
    }
    out
}

pub fn xor_bits(bits: &Bits, key: &KeySpec) -> Bits {
    bits.iter()
        .zip(key.keystream().bits())
        .map(|(a, b)| a ^ b)
        .collect()
}
