//! MSB-first bit buffers and the auxiliary header wire format.
//!
//! Header layout (84 bits, every field big-endian):
//!
//! ```text
//! | ref_rows: 8 | ref_cols: 8 | code table: 9 x 4 | aux_len: 32 |
//! ```

use std::fmt;
use std::str::FromStr;

use crate::code::CodeTable;
use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Growable bit sequence stored MSB-first within each byte.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits {
    bytes: Vec<u8>,
    len: usize,
}

impl Bits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    /// Takes the first `len` bits of `bytes`.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if len > bytes.len() * 8 {
            return Err(Error::Underflow {
                needed: len,
                available: bytes.len() * 8,
            });
        }
        let mut out = Self {
            bytes: bytes[..len.div_ceil(8)].to_vec(),
            len,
        };
        out.clear_tail();
        Ok(out)
    }

    /// Every bit of `bytes`.
    pub fn from_byte_slice(bytes: &[u8]) -> Self {
        Self {
            bytes: bytes.to_vec(),
            len: bytes.len() * 8,
        }
    }

    fn clear_tail(&mut self) {
        let used = self.len % 8;
        if used != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= 0xFFu8 << (8 - used);
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let shift = 7 - (self.len % 8);
        if shift == 7 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().expect("byte pushed above") |= 1 << shift;
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for k in (0..width).rev() {
            self.push((value >> k) & 1 == 1);
        }
    }

    pub fn extend_from_bits(&mut self, other: &Bits) {
        if self.len.is_multiple_of(8) {
            self.bytes.truncate(self.len / 8);
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
        } else {
            for bit in other.iter() {
                self.push(bit);
            }
        }
    }

    #[inline]
    pub fn get(&self, index: usize) -> Option<bool> {
        (index < self.len).then(|| (self.bytes[index / 8] >> (7 - index % 8)) & 1 == 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| (self.bytes[i / 8] >> (7 - i % 8)) & 1 == 1)
    }

    /// Backing bytes; the final partial byte is zero-padded.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn slice(&self, start: usize, len: usize) -> Result<Bits> {
        if start + len > self.len {
            return Err(Error::Underflow {
                needed: start + len,
                available: self.len,
            });
        }
        let mut out = Bits::with_capacity(len);
        for i in start..start + len {
            out.push(self.get(i).expect("bounds checked"));
        }
        Ok(out)
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader::new(self)
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut out = Bits::new();
        for bit in iter {
            out.push(bit);
        }
        out
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({}; {})", self.len, self)
    }
}

/// Parses strings of `0` and `1`; spaces and underscores are ignored.
impl FromStr for Bits {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| *c != ' ' && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidHeader(format!("not a bit: {other:?}"))),
            })
            .collect()
    }
}

/// Sequential reader over a [`Bits`] value.
#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    bits: &'a Bits,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a Bits) -> Self {
        Self { bits, pos: 0 }
    }

    /// Reader starting at bit `pos`.
    pub fn at(bits: &'a Bits, pos: usize) -> Self {
        debug_assert!(pos <= bits.len());
        Self { bits, pos }
    }

    #[inline]
    pub fn position(&self) -> usize {
        self.pos
    }

    #[inline]
    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool> {
        let bit = self.bits.get(self.pos).ok_or(Error::Underflow {
            needed: 1,
            available: 0,
        })?;
        self.pos += 1;
        Ok(bit)
    }

    /// Reads `width` bits as a big-endian unsigned integer.
    pub fn read_uint(&mut self, width: u32) -> Result<u64> {
        debug_assert!(width <= 64);
        if self.remaining() < width as usize {
            return Err(Error::Underflow {
                needed: width as usize,
                available: self.remaining(),
            });
        }
        let mut value = 0u64;
        for _ in 0..width {
            value = (value << 1) | self.read_bit()? as u64;
        }
        Ok(value)
    }

    pub fn read_bits(&mut self, len: usize) -> Result<Bits> {
        let out = self
            .bits
            .slice(self.pos, len)
            .map_err(|_| Error::Underflow {
                needed: len,
                available: self.remaining(),
            })?;
        self.pos += len;
        Ok(out)
    }
}

pub const HEADER_BITS: usize = 84;

/// Fixed-size container header carried at the front of the storage stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxHeader {
    pub ref_rows: u8,
    pub ref_cols: u8,
    pub code_table: CodeTable,
    /// Bit length of the auxiliary stream (label codes followed by reference values).
    pub aux_len: u32,
}

impl AuxHeader {
    /// Checks the reference region against concrete image dimensions.
    pub fn validate_for(&self, rows: usize, cols: usize) -> Result<()> {
        let (r, c) = (self.ref_rows as usize, self.ref_cols as usize);
        if r == 0 || c == 0 || r >= rows || c >= cols {
            return Err(Error::InvalidHeader(format!(
                "reference region {r}x{c} does not fit a {rows}x{cols} image"
            )));
        }
        Ok(())
    }
}

pub fn write_header(header: &AuxHeader) -> Bits {
    let mut out = Bits::with_capacity(HEADER_BITS);
    out.push_uint(header.ref_rows as u64, 8);
    out.push_uint(header.ref_cols as u64, 8);
    out.extend_from_bits(&header.code_table.serialize());
    out.push_uint(header.aux_len as u64, 32);
    debug_assert_eq!(out.len(), HEADER_BITS);
    out
}

/// Parses the first 84 bits read from `reader`.
pub fn read_header_from(reader: &mut BitReader<'_>) -> Result<AuxHeader> {
    if reader.remaining() < HEADER_BITS {
        return Err(Error::Underflow {
            needed: HEADER_BITS,
            available: reader.remaining(),
        });
    }
    let ref_rows = reader.read_uint(8)? as u8;
    let ref_cols = reader.read_uint(8)? as u8;
    if ref_rows == 0 || ref_cols == 0 {
        return Err(Error::InvalidHeader(format!(
            "empty reference region {ref_rows}x{ref_cols}"
        )));
    }
    let code_table = CodeTable::deserialize(&reader.read_bits(CodeTable::SERIALIZED_BITS)?)?;
    let aux_len = reader.read_uint(32)? as u32;
    Ok(AuxHeader {
        ref_rows,
        ref_cols,
        code_table,
        aux_len,
    })
}

pub fn read_header(bits: &Bits) -> Result<AuxHeader> {
    read_header_from(&mut bits.reader())
}

/// Row-major positions of the reference region: rows `0..r` at full width, then the
/// first `c` columns of rows `r..m`.
pub fn reference_positions(
    rows: usize,
    cols: usize,
    ref_rows: usize,
    ref_cols: usize,
) -> impl Iterator<Item = (usize, usize)> {
    (0..rows).flat_map(move |i| {
        let width = if i < ref_rows { cols } else { ref_cols };
        (0..width).map(move |j| (i, j))
    })
}

/// Original values of the reference pixels, 8 bits each in reference order.
pub fn pack_reference_values(img: &GrayImage, ref_rows: usize, ref_cols: usize) -> Result<Bits> {
    crate::prediction::check_region(img.rows(), img.cols(), ref_rows, ref_cols)?;
    let count = crate::prediction::reference_count(img.rows(), img.cols(), ref_rows, ref_cols);
    let mut out = Bits::with_capacity(8 * count);
    for (i, j) in reference_positions(img.rows(), img.cols(), ref_rows, ref_cols) {
        out.push_uint(img.get(i, j) as u64, 8);
    }
    Ok(out)
}

/// Writes reference values produced by [`pack_reference_values`] back into `img`.
pub fn unpack_reference_values(
    bits: &Bits,
    img: &mut GrayImage,
    ref_rows: usize,
    ref_cols: usize,
) -> Result<()> {
    crate::prediction::check_region(img.rows(), img.cols(), ref_rows, ref_cols)?;
    let count = crate::prediction::reference_count(img.rows(), img.cols(), ref_rows, ref_cols);
    if bits.len() != 8 * count {
        return Err(Error::BitCount {
            expected: 8 * count,
            found: bits.len(),
        });
    }
    let mut reader = bits.reader();
    for (i, j) in reference_positions(img.rows(), img.cols(), ref_rows, ref_cols) {
        img.set(i, j, reader.read_uint(8)? as u8);
    }
    Ok(())
}
