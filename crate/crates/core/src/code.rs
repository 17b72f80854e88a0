//! The fixed nine-codeword prefix code and its frequency-ranked assignment to tags.

use crate::bitstream::{BitReader, Bits};
use crate::error::{Error, Result};
use crate::prediction::{LabelHistogram, Tag};

/// Codeword `k` as (value, bit length), shortest first.
pub const CODEWORDS: [(u8, u8); 9] = [
    (0b00, 2),
    (0b01, 2),
    (0b100, 3),
    (0b101, 3),
    (0b1100, 4),
    (0b1101, 4),
    (0b1110, 4),
    (0b11110, 5),
    (0b11111, 5),
];

const MAX_CODE_LEN: u8 = 5;

pub fn codeword_string(index: usize) -> String {
    let (value, len) = CODEWORDS[index];
    format!("{:0width$b}", value, width = len as usize)
}

/// Bijective mapping from tag to codeword index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeTable {
    by_tag: [u8; 9],
    by_index: [u8; 9],
}

impl CodeTable {
    pub const SERIALIZED_BITS: usize = 36;

    /// `indices[t]` is the codeword index given to tag `t`.
    pub fn from_indices(indices: [u8; 9]) -> Result<Self> {
        let mut by_index = [u8::MAX; 9];
        for (tag, &idx) in indices.iter().enumerate() {
            let slot = by_index
                .get_mut(idx as usize)
                .ok_or(Error::InvalidCodeTable)?;
            if *slot != u8::MAX {
                return Err(Error::InvalidCodeTable);
            }
            *slot = tag as u8;
        }
        Ok(Self {
            by_tag: indices,
            by_index,
        })
    }

    pub fn identity() -> Self {
        let idx = [0, 1, 2, 3, 4, 5, 6, 7, 8];
        Self {
            by_tag: idx,
            by_index: idx,
        }
    }

    #[inline]
    pub fn codeword_index(&self, tag: Tag) -> u8 {
        self.by_tag[tag.index()]
    }

    #[inline]
    pub fn codeword(&self, tag: Tag) -> (u8, u8) {
        CODEWORDS[self.by_tag[tag.index()] as usize]
    }

    #[inline]
    pub fn code_len(&self, tag: Tag) -> u8 {
        self.codeword(tag).1
    }

    pub fn tag_for_index(&self, index: usize) -> Tag {
        Tag::new(self.by_index[index]).expect("table holds valid tags")
    }

    /// Nine 4-bit codeword indices, tag 0 first.
    pub fn serialize(&self) -> Bits {
        let mut out = Bits::with_capacity(Self::SERIALIZED_BITS);
        for &idx in &self.by_tag {
            out.push_uint(idx as u64, 4);
        }
        out
    }

    pub fn deserialize(bits: &Bits) -> Result<Self> {
        if bits.len() != Self::SERIALIZED_BITS {
            return Err(Error::BitCount {
                expected: Self::SERIALIZED_BITS,
                found: bits.len(),
            });
        }
        let mut reader = bits.reader();
        let mut indices = [0u8; 9];
        for slot in &mut indices {
            *slot = reader.read_uint(4)? as u8;
        }
        Self::from_indices(indices)
    }

    /// Total label-code bits for a histogram.
    pub fn coded_bits(&self, hist: &LabelHistogram) -> u64 {
        Tag::all()
            .map(|t| hist.count(t) * self.code_len(t) as u64)
            .sum()
    }
}

/// Ranks tags by descending count (ties: smaller tag first) onto codewords `00`, `01`, ...
pub fn assign_codes(hist: &LabelHistogram) -> CodeTable {
    let mut order: Vec<u8> = (0..9).collect();
    order.sort_by(|&a, &b| {
        hist.counts[b as usize]
            .cmp(&hist.counts[a as usize])
            .then(a.cmp(&b))
    });
    let mut indices = [0u8; 9];
    for (rank, &tag) in order.iter().enumerate() {
        indices[tag as usize] = rank as u8;
    }
    CodeTable::from_indices(indices).expect("ranking is a permutation")
}

pub fn encode_labels(tags: impl IntoIterator<Item = Tag>, table: &CodeTable) -> Bits {
    let mut out = Bits::new();
    for tag in tags {
        let (value, len) = table.codeword(tag);
        out.push_uint(value as u64, len as u32);
    }
    out
}

/// Consumes one codeword. On underflow the reader is left where it was.
pub fn decode_next_label(reader: &mut BitReader<'_>, table: &CodeTable) -> Result<Tag> {
    let mut probe = reader.clone();
    let mut value = 0u8;
    for len in 1..=MAX_CODE_LEN {
        let bit = probe.read_bit().map_err(|_| Error::Underflow {
            needed: len as usize,
            available: len as usize - 1,
        })?;
        value = (value << 1) | bit as u8;
        if let Some(index) = CODEWORDS.iter().position(|&cw| cw == (value, len)) {
            *reader = probe;
            return Ok(table.tag_for_index(index));
        }
    }
    unreachable!("the codeword set is complete")
}

pub fn decode_labels(bits: &Bits, count: usize, table: &CodeTable) -> Result<Vec<Tag>> {
    let mut reader = bits.reader();
    (0..count)
        .map(|_| decode_next_label(&mut reader, table))
        .collect()
}
