//! MED prediction and per-pixel MSB labeling.

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Length of the shared most-significant-bit prefix between a pixel and its prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag(u8);

impl Tag {
    pub const MAX: Tag = Tag(8);

    pub fn new(value: u8) -> Result<Self> {
        if value <= 8 {
            Ok(Tag(value))
        } else {
            Err(Error::InvalidTag(value))
        }
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// All nine tags in ascending order.
    pub fn all() -> impl Iterator<Item = Tag> {
        (0..=8).map(Tag)
    }
}

impl TryFrom<u8> for Tag {
    type Error = Error;
    fn try_from(value: u8) -> Result<Self> {
        Tag::new(value)
    }
}

/// Median edge detector over the causal neighbourhood.
#[inline]
pub fn med_predict(top_left: u8, top: u8, left: u8) -> u8 {
    let (lo, hi) = if top <= left {
        (top, left)
    } else {
        (left, top)
    };
    if top_left <= lo {
        hi
    } else if top_left >= hi {
        lo
    } else {
        // lo < top_left < hi, so the sum stays within [lo, hi]
        (top as i16 + left as i16 - top_left as i16) as u8
    }
}

/// Number of leading bits `x` and `px` agree on.
#[inline]
pub fn label_of(x: u8, px: u8) -> Tag {
    Tag((x ^ px).leading_zeros() as u8)
}

/// Tag field over an image; the first `ref_rows` rows and `ref_cols` columns are reference cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    rows: usize,
    cols: usize,
    ref_rows: usize,
    ref_cols: usize,
    tags: Vec<Option<Tag>>,
}

impl LabelMap {
    /// Builds a map from tags listed for the non-reference cells in raster order.
    pub fn from_raster_tags(
        rows: usize,
        cols: usize,
        ref_rows: usize,
        ref_cols: usize,
        tags: &[Tag],
    ) -> Result<Self> {
        check_region(rows, cols, ref_rows, ref_cols)?;
        let expected = (rows - ref_rows) * (cols - ref_cols);
        if tags.len() != expected {
            return Err(Error::BitCount {
                expected,
                found: tags.len(),
            });
        }
        let mut it = tags.iter();
        let cells = (0..rows * cols)
            .map(|k| {
                let (i, j) = (k / cols, k % cols);
                if i < ref_rows || j < ref_cols {
                    None
                } else {
                    it.next().copied()
                }
            })
            .collect();
        Ok(Self {
            rows,
            cols,
            ref_rows,
            ref_cols,
            tags: cells,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ref_rows(&self) -> usize {
        self.ref_rows
    }

    pub fn ref_cols(&self) -> usize {
        self.ref_cols
    }

    /// `None` for reference cells.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<Tag> {
        self.tags[row * self.cols + col]
    }

    #[inline]
    pub fn is_reference(&self, row: usize, col: usize) -> bool {
        row < self.ref_rows || col < self.ref_cols
    }

    pub fn cells(&self) -> &[Option<Tag>] {
        &self.tags
    }

    /// Tags of the non-reference cells in raster order.
    pub fn raster_tags(&self) -> impl Iterator<Item = Tag> + '_ {
        self.tags.iter().filter_map(|t| *t)
    }

    pub fn reference_count(&self) -> usize {
        reference_count(self.rows, self.cols, self.ref_rows, self.ref_cols)
    }
}

/// Per-tag pixel counts plus the number of reference pixels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LabelHistogram {
    pub counts: [u64; 9],
    pub ref_count: u64,
}

impl LabelHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.ref_count
    }

    pub fn count(&self, tag: Tag) -> u64 {
        self.counts[tag.index()]
    }
}

pub(crate) fn reference_count(rows: usize, cols: usize, ref_rows: usize, ref_cols: usize) -> usize {
    ref_rows * cols + ref_cols * rows - ref_rows * ref_cols
}

pub(crate) fn check_region(
    rows: usize,
    cols: usize,
    ref_rows: usize,
    ref_cols: usize,
) -> Result<()> {
    if ref_rows == 0 || ref_cols == 0 || ref_rows >= rows || ref_cols >= cols {
        return Err(Error::InvalidReferenceRegion {
            ref_rows,
            ref_cols,
            rows,
            cols,
        });
    }
    Ok(())
}

/// Tag of every pixel with a full causal neighbourhood (row and column ≥ 1), row-major.
/// Entries in row 0 and column 0 are `None`. The result does not depend on the reference
/// region, so callers trying several regions can compute it once.
pub(crate) fn full_tag_grid(img: &GrayImage) -> Vec<Option<Tag>> {
    let (m, n) = (img.rows(), img.cols());
    let px = img.pixels();
    let mut out = vec![None; m * n];
    for i in 1..m {
        let above = &px[(i - 1) * n..i * n];
        let row = &px[i * n..(i + 1) * n];
        for j in 1..n {
            let p = med_predict(above[j - 1], above[j], row[j - 1]);
            out[i * n + j] = Some(label_of(row[j], p));
        }
    }
    out
}

pub(crate) fn mask_grid(
    img: &GrayImage,
    grid: &[Option<Tag>],
    ref_rows: usize,
    ref_cols: usize,
) -> LabelMap {
    let n = img.cols();
    let tags = grid
        .iter()
        .enumerate()
        .map(|(k, t)| {
            if k / n < ref_rows || k % n < ref_cols {
                None
            } else {
                *t
            }
        })
        .collect();
    LabelMap {
        rows: img.rows(),
        cols: n,
        ref_rows,
        ref_cols,
        tags,
    }
}

/// Labels every non-reference pixel against the MED prediction from its original neighbours.
pub fn build_label_map(img: &GrayImage, ref_rows: usize, ref_cols: usize) -> Result<LabelMap> {
    check_region(img.rows(), img.cols(), ref_rows, ref_cols)?;
    Ok(mask_grid(img, &full_tag_grid(img), ref_rows, ref_cols))
}

pub fn histogram(map: &LabelMap) -> LabelHistogram {
    let mut hist = LabelHistogram::default();
    for cell in map.cells() {
        match cell {
            Some(t) => hist.counts[t.index()] += 1,
            None => hist.ref_count += 1,
        }
    }
    hist
}
