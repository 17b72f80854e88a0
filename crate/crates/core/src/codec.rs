//! Content-owner, data-hider and receiver stages.
//!
//! Every pixel contributes a *slot* of bits to one storage stream: reference pixels give
//! all eight bits, a pixel with tag `t` gives its top `capacity_of(t)` bits. Slots are
//! ordered reference region first, then the remaining pixels in raster order. The owner
//! writes `header ++ label codes ++ reference values` from the start of the stream; the
//! data hider continues right after it with a ciphered, length-prefixed payload.

use std::fmt;

use crate::bitstream::{
    pack_reference_values, read_header_from, reference_positions, unpack_reference_values,
    write_header, AuxHeader, BitReader, Bits, HEADER_BITS,
};
use crate::cipher::{xor_bits, xor_image, KeySpec};
use crate::code::{assign_codes, codeword_string, decode_next_label, encode_labels, CodeTable};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::prediction::{
    check_region, full_tag_grid, histogram, mask_grid, med_predict, reference_count,
    LabelHistogram, LabelMap, Tag,
};

/// Width of the in-band payload length prefix.
pub const LENGTH_PREFIX_BITS: usize = 32;

const MAX_REF_EXTENT: usize = u8::MAX as usize;

/// Bits a pixel with tag `t` can carry.
#[inline]
pub fn capacity_of(t: Tag) -> usize {
    (t.index() + 1).min(8)
}

/// Replaces the top `capacity_of(t)` bits of `xe` with `bits`.
pub fn substitute_msbs(xe: u8, t: Tag, bits: &Bits) -> Result<u8> {
    let width = capacity_of(t);
    if bits.len() != width {
        return Err(Error::BitCount {
            expected: width,
            found: bits.len(),
        });
    }
    let top = bits.iter().fold(0u16, |acc, b| (acc << 1) | b as u16);
    let shift = 8 - width;
    let low = if shift == 0 { 0 } else { xe & (0xFF >> width) };
    Ok(((top << shift) as u8) | low)
}

/// Complement of bit `t + 1` (counted from the MSB) of the prediction.
#[inline]
pub fn recover_bit(px: u8, t: Tag) -> bool {
    assert!(t.get() < 8, "tag 8 pixels are fully predicted");
    (px >> (7 - t.get())) & 1 == 0
}

/// Reconstructs an original pixel from its prediction, tag and decrypted low bits.
#[inline]
pub fn restore_pixel(px: u8, t: Tag, decrypted: u8) -> u8 {
    let t = t.get();
    if t == 8 {
        return px;
    }
    let low_width = 7 - t;
    let prefix = if t == 0 { 0 } else { px & (0xFFu8 << (8 - t)) };
    let flipped = (recover_bit(px, Tag::new(t).expect("t < 8")) as u8) << low_width;
    let low = decrypted & ((1u16 << low_width) - 1) as u8;
    prefix | flipped | low
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Slot {
    pixel: usize,
    tag: Tag,
}

/// Ordered per-pixel bit slots making up the storage stream.
#[derive(Clone, Debug)]
pub struct StorageLayout {
    slots: Vec<Slot>,
    offsets: Vec<usize>,
    reference_bits: usize,
}

impl StorageLayout {
    pub fn new(map: &LabelMap) -> Self {
        let (m, n) = (map.rows(), map.cols());
        let ref_count = map.reference_count();
        let mut slots = Vec::with_capacity(m * n);
        for (i, j) in reference_positions(m, n, map.ref_rows(), map.ref_cols()) {
            slots.push(Slot {
                pixel: i * n + j,
                tag: Tag::MAX,
            });
        }
        for (k, cell) in map.cells().iter().enumerate() {
            if let Some(tag) = cell {
                slots.push(Slot {
                    pixel: k,
                    tag: *tag,
                });
            }
        }
        let mut offsets = Vec::with_capacity(slots.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for s in &slots {
            acc += capacity_of(s.tag);
            offsets.push(acc);
        }
        Self {
            slots,
            offsets,
            reference_bits: 8 * ref_count,
        }
    }

    pub fn total_bits(&self) -> usize {
        *self.offsets.last().expect("offsets start with 0")
    }

    pub fn reference_bits(&self) -> usize {
        self.reference_bits
    }

    fn slot_at(&self, pos: usize) -> usize {
        self.offsets.partition_point(|&o| o <= pos) - 1
    }

    fn check_range(&self, start: usize, len: usize) -> Result<()> {
        if start + len > self.total_bits() {
            return Err(Error::Underflow {
                needed: start + len,
                available: self.total_bits(),
            });
        }
        Ok(())
    }

    pub fn read(&self, img: &GrayImage, start: usize, len: usize) -> Result<Bits> {
        self.check_range(start, len)?;
        let mut out = Bits::with_capacity(len);
        if len == 0 {
            return Ok(out);
        }
        let px = img.pixels();
        let mut k = self.slot_at(start);
        let mut offset = start - self.offsets[k];
        while out.len() < len {
            let slot = self.slots[k];
            let width = capacity_of(slot.tag);
            let value = px[slot.pixel];
            while offset < width && out.len() < len {
                out.push((value >> (7 - offset)) & 1 == 1);
                offset += 1;
            }
            k += 1;
            offset = 0;
        }
        Ok(out)
    }

    /// Overwrites stream bits `start..start + bits.len()`; other bits of touched pixels are kept.
    pub fn write(&self, img: &mut GrayImage, start: usize, bits: &Bits) -> Result<()> {
        self.check_range(start, bits.len())?;
        if bits.is_empty() {
            return Ok(());
        }
        let mut src = bits.iter();
        let mut remaining = bits.len();
        let mut k = self.slot_at(start);
        let mut offset = start - self.offsets[k];
        let px = img.pixels_mut();
        while remaining > 0 {
            let slot = self.slots[k];
            let width = capacity_of(slot.tag);
            let current = px[slot.pixel];
            let mut slice = Bits::with_capacity(width);
            for b in 0..width {
                let keep = (current >> (7 - b)) & 1 == 1;
                if b >= offset && remaining > 0 {
                    slice.push(src.next().expect("length checked"));
                    remaining -= 1;
                } else {
                    slice.push(keep);
                }
            }
            px[slot.pixel] = substitute_msbs(current, slot.tag, &slice)?;
            k += 1;
            offset = 0;
        }
        Ok(())
    }
}

/// Capacity accounting for one image and reference region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityReport {
    pub rows: usize,
    pub cols: usize,
    pub ref_rows: usize,
    pub ref_cols: usize,
    pub histogram: LabelHistogram,
    pub code_table: CodeTable,
    /// Sum of `capacity_of(t)` over non-reference pixels.
    pub total_capacity: u64,
    /// Label-map code length.
    pub code_bits: u64,
    /// Original reference values carried in the aux stream (offset by the reference slots).
    pub reference_bits: u64,
    pub header_bits: u64,
    /// `total_capacity - code_bits - header_bits`; includes the payload length prefix.
    pub net_payload: i64,
}

impl CapacityReport {
    fn new(rows: usize, cols: usize, map: &LabelMap, table: CodeTable) -> Self {
        Self::from_histogram(
            rows,
            cols,
            map.ref_rows(),
            map.ref_cols(),
            histogram(map),
            table,
        )
    }

    /// Accounting from a label distribution alone.
    pub fn from_histogram(
        rows: usize,
        cols: usize,
        ref_rows: usize,
        ref_cols: usize,
        hist: LabelHistogram,
        table: CodeTable,
    ) -> Self {
        let total_capacity = Tag::all()
            .map(|t| hist.count(t) * capacity_of(t) as u64)
            .sum::<u64>();
        let code_bits = table.coded_bits(&hist);
        Self {
            rows,
            cols,
            ref_rows,
            ref_cols,
            histogram: hist,
            code_table: table,
            total_capacity,
            code_bits,
            reference_bits: 8 * hist.ref_count,
            header_bits: HEADER_BITS as u64,
            net_payload: total_capacity as i64 - code_bits as i64 - HEADER_BITS as i64,
        }
    }

    pub fn pixels(&self) -> usize {
        self.rows * self.cols
    }

    pub fn aux_len(&self) -> u64 {
        self.code_bits + self.reference_bits
    }

    /// Largest payload accepted by [`hider_embed`].
    pub fn max_payload_bits(&self) -> usize {
        (self.net_payload - LENGTH_PREFIX_BITS as i64).max(0) as usize
    }

    /// Net payload over all pixels, reference region included.
    pub fn embedding_rate(&self) -> f64 {
        crate::metrics::embedding_rate(self.net_payload.max(0) as u64, self.rows, self.cols)
    }
}

impl fmt::Display for CapacityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "image {}x{}  reference region {} rows x {} cols",
            self.rows, self.cols, self.ref_rows, self.ref_cols
        )?;
        writeln!(
            f,
            "{:>5} {:>12} {:>6} {:>15} {:>18} {:>14}",
            "Label",
            "Distribution",
            "Code",
            "Capacity (bits)",
            "Code length (bits)",
            "Payload (bits)"
        )?;
        writeln!(
            f,
            "{:>5} {:>12} {:>6} {:>15} {:>18} {:>14}",
            -1, self.histogram.ref_count, "-", "-", "-", "-"
        )?;
        for t in Tag::all() {
            let cap = capacity_of(t);
            let len = self.code_table.code_len(t) as usize;
            writeln!(
                f,
                "{:>5} {:>12} {:>6} {:>15} {:>18} {:>14}",
                t.get(),
                self.histogram.count(t),
                codeword_string(self.code_table.codeword_index(t) as usize),
                cap,
                len,
                cap as i64 - len as i64
            )?;
        }
        writeln!(
            f,
            "{:>5} {:>12} {:>6} {:>15} {:>18} {:>14}",
            "Total",
            "-",
            "-",
            self.total_capacity,
            self.code_bits,
            self.total_capacity as i64 - self.code_bits as i64
        )?;
        writeln!(f, "header bits: {}", self.header_bits)?;
        writeln!(f, "net payload (bits): {}", self.net_payload)?;
        write!(f, "ER: {:.3} bpp", self.embedding_rate())
    }
}

/// Replays the data hider's streaming decode using bit counts only.
fn bootstrap_ok(report: &CapacityReport, tags: impl Iterator<Item = Tag>) -> bool {
    if report.aux_len() > u32::MAX as u64 {
        return false;
    }
    let mut available = report.reference_bits as usize;
    let mut consumed = HEADER_BITS;
    if consumed > available {
        return false;
    }
    for t in tags {
        consumed += report.code_table.code_len(t) as usize;
        if consumed > available {
            return false;
        }
        available += capacity_of(t);
    }
    report.net_payload >= LENGTH_PREFIX_BITS as i64
}

/// Reference-region sizes tried in order: (1,1), (2,1), (2,2), (3,2), ...
fn region_candidates(rows: usize, cols: usize) -> impl Iterator<Item = (usize, usize)> {
    let r_max = (rows - 1).min(MAX_REF_EXTENT);
    let c_max = (cols - 1).min(MAX_REF_EXTENT);
    let mut state = Some((1usize, 1usize));
    let mut grow_rows = true;
    std::iter::from_fn(move || {
        let current = state?;
        let (r, c) = current;
        let can_r = r < r_max;
        let can_c = c < c_max;
        state = match (grow_rows, can_r, can_c) {
            (true, true, _) | (false, true, false) => Some((r + 1, c)),
            (_, _, true) => Some((r, c + 1)),
            _ => None,
        };
        grow_rows = !grow_rows;
        Some(current)
    })
}

/// A label map whose storage stream passes the bootstrap check.
#[derive(Clone, Debug)]
pub struct ContainerPlan {
    pub map: LabelMap,
    pub report: CapacityReport,
}

impl ContainerPlan {
    pub fn code_table(&self) -> &CodeTable {
        &self.report.code_table
    }
}

/// Label map and capacity for a fixed reference region, without the bootstrap check.
pub fn capacity_for_region(
    img: &GrayImage,
    ref_rows: usize,
    ref_cols: usize,
) -> Result<ContainerPlan> {
    check_region(img.rows(), img.cols(), ref_rows, ref_cols)?;
    let map = mask_grid(img, &full_tag_grid(img), ref_rows, ref_cols);
    let table = assign_codes(&histogram(&map));
    let report = CapacityReport::new(img.rows(), img.cols(), &map, table);
    Ok(ContainerPlan { map, report })
}

/// Smallest reference region (in the fixed growth order) whose stream bootstraps.
pub fn plan_container(img: &GrayImage) -> Result<ContainerPlan> {
    let grid = full_tag_grid(img);
    for (r, c) in region_candidates(img.rows(), img.cols()) {
        let map = mask_grid(img, &grid, r, c);
        let table = assign_codes(&histogram(&map));
        let report = CapacityReport::new(img.rows(), img.cols(), &map, table);
        if bootstrap_ok(&report, map.raster_tags()) {
            return Ok(ContainerPlan { map, report });
        }
    }
    Err(Error::InsufficientBootstrap)
}

/// Marked encrypted image plus its capacity accounting.
#[derive(Clone, Debug)]
pub struct OwnerOutput {
    pub image: GrayImage,
    pub report: CapacityReport,
}

/// Labels, encrypts and embeds the auxiliary stream.
pub fn owner_encode(img: &GrayImage, ke: &KeySpec) -> Result<OwnerOutput> {
    let plan = plan_container(img)?;
    let (r, c) = (plan.map.ref_rows(), plan.map.ref_cols());
    let mut aux = encode_labels(plan.map.raster_tags(), plan.code_table());
    aux.extend_from_bits(&pack_reference_values(img, r, c)?);
    debug_assert_eq!(aux.len() as u64, plan.report.aux_len());

    let header = AuxHeader {
        ref_rows: r as u8,
        ref_cols: c as u8,
        code_table: *plan.code_table(),
        aux_len: aux.len() as u32,
    };
    let mut stream = write_header(&header);
    stream.extend_from_bits(&aux);

    let mut marked = xor_image(img, ke);
    StorageLayout::new(&plan.map).write(&mut marked, 0, &stream)?;
    Ok(OwnerOutput {
        image: marked,
        report: plan.report,
    })
}

/// Everything a data hider or receiver learns from a marked image without keys.
#[derive(Clone, Debug)]
pub struct DecodedContainer {
    pub header: AuxHeader,
    pub map: LabelMap,
    pub layout: StorageLayout,
    /// Original reference-pixel values, 8 bits each.
    pub reference_values: Bits,
    /// Stream position of the first bit after the auxiliary stream.
    pub payload_start: usize,
}

impl DecodedContainer {
    /// Stream bits after the auxiliary stream, length prefix included.
    pub fn payload_space(&self) -> usize {
        self.layout.total_bits() - self.payload_start
    }

    pub fn max_payload_bits(&self) -> usize {
        self.payload_space().saturating_sub(LENGTH_PREFIX_BITS)
    }
}

fn top_bits(value: u8, width: usize, out: &mut Bits) {
    for k in 0..width {
        out.push((value >> (7 - k)) & 1 == 1);
    }
}

/// Streaming recovery of the label map from a marked encrypted image.
pub fn hider_decode_labels(img_e: &GrayImage) -> Result<DecodedContainer> {
    let (m, n) = (img_e.rows(), img_e.cols());
    // the first two pixels always belong to the reference region and hold r and c
    let (r, c) = (img_e.get(0, 0) as usize, img_e.get(0, 1) as usize);
    if r == 0 || c == 0 || r >= m || c >= n {
        return Err(Error::InvalidHeader(format!(
            "reference region {r}x{c} does not fit a {m}x{n} image"
        )));
    }
    let ref_count = reference_count(m, n, r, c);
    let mut buffer = Bits::with_capacity(8 * ref_count + 2 * m * n);
    for (i, j) in reference_positions(m, n, r, c) {
        top_bits(img_e.get(i, j), 8, &mut buffer);
    }

    let header = {
        let mut reader = buffer.reader();
        read_header_from(&mut reader)?
    };
    header.validate_for(m, n)?;
    let reference_bits = 8 * ref_count;
    let aux_end = HEADER_BITS + header.aux_len as usize;
    let codes_end = aux_end
        .checked_sub(reference_bits)
        .filter(|&e| e >= HEADER_BITS)
        .ok_or_else(|| {
            Error::InvalidHeader("aux length shorter than the reference values".into())
        })?;

    let mut pos = HEADER_BITS;
    let mut tags = Vec::with_capacity((m - r) * (n - c));
    for i in r..m {
        for j in c..n {
            let tag = {
                let mut reader = BitReader::at(&buffer, pos);
                let tag = decode_next_label(&mut reader, &header.code_table)?;
                pos = reader.position();
                tag
            };
            if pos > codes_end {
                return Err(Error::InvalidHeader(
                    "label codes overrun the aux stream".into(),
                ));
            }
            tags.push(tag);
            if buffer.len() < aux_end {
                top_bits(img_e.get(i, j), capacity_of(tag), &mut buffer);
            }
        }
    }
    if pos != codes_end {
        return Err(Error::InvalidHeader(
            "label codes do not fill the aux stream".into(),
        ));
    }
    if buffer.len() < aux_end {
        return Err(Error::Underflow {
            needed: aux_end,
            available: buffer.len(),
        });
    }
    let reference_values = buffer.slice(codes_end, reference_bits)?;
    let map = LabelMap::from_raster_tags(m, n, r, c, &tags)?;
    let layout = StorageLayout::new(&map);
    Ok(DecodedContainer {
        header,
        map,
        layout,
        reference_values,
        payload_start: aux_end,
    })
}

/// Result of embedding a payload.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmbedReport {
    pub payload_bits: usize,
    pub embedding_rate: f64,
}

/// Embeds `payload` after the auxiliary stream, masked with the data-hiding key.
pub fn hider_embed(
    img_e: &GrayImage,
    payload: &Bits,
    kw: &KeySpec,
) -> Result<(GrayImage, EmbedReport)> {
    let decoded = hider_decode_labels(img_e)?;
    let capacity = decoded.max_payload_bits();
    if payload.len() + LENGTH_PREFIX_BITS > decoded.payload_space()
        || payload.len() > u32::MAX as usize
    {
        return Err(Error::PayloadTooLarge { capacity });
    }
    let mut segment = Bits::with_capacity(LENGTH_PREFIX_BITS + payload.len());
    segment.push_uint(payload.len() as u64, LENGTH_PREFIX_BITS as u32);
    segment.extend_from_bits(payload);
    let segment = xor_bits(&segment, kw);

    let mut marked = img_e.clone();
    decoded
        .layout
        .write(&mut marked, decoded.payload_start, &segment)?;
    let report = EmbedReport {
        payload_bits: payload.len(),
        embedding_rate: crate::metrics::embedding_rate(
            payload.len() as u64,
            img_e.rows(),
            img_e.cols(),
        ),
    };
    Ok((marked, report))
}

/// Recovers the payload using only the data-hiding key.
pub fn receiver_extract(img_ew: &GrayImage, kw: &KeySpec) -> Result<Bits> {
    let decoded = hider_decode_labels(img_ew)?;
    let space = decoded.payload_space();
    if space < LENGTH_PREFIX_BITS {
        return Err(Error::ExtractionFailed);
    }
    let prefix = xor_bits(
        &decoded
            .layout
            .read(img_ew, decoded.payload_start, LENGTH_PREFIX_BITS)?,
        kw,
    );
    let len = prefix.reader().read_uint(LENGTH_PREFIX_BITS as u32)? as usize;
    if len > space - LENGTH_PREFIX_BITS {
        return Err(Error::ExtractionFailed);
    }
    let segment = decoded
        .layout
        .read(img_ew, decoded.payload_start, LENGTH_PREFIX_BITS + len)?;
    xor_bits(&segment, kw).slice(LENGTH_PREFIX_BITS, len)
}

/// Reconstructs the original image using only the encryption key.
pub fn receiver_recover(img_ew: &GrayImage, ke: &KeySpec) -> Result<GrayImage> {
    let decoded = hider_decode_labels(img_ew)?;
    let (r, c) = (decoded.map.ref_rows(), decoded.map.ref_cols());
    let mut out = xor_image(img_ew, ke);
    unpack_reference_values(&decoded.reference_values, &mut out, r, c)?;
    let n = out.cols();
    for i in r..out.rows() {
        for j in c..n {
            let tag = decoded.map.get(i, j).expect("non-reference cell");
            let px = med_predict(out.get(i - 1, j - 1), out.get(i - 1, j), out.get(i, j - 1));
            let value = restore_pixel(px, tag, out.get(i, j));
            out.set(i, j, value);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prediction::build_label_map;

    fn tag(v: u8) -> Tag {
        Tag::new(v).unwrap()
    }

    #[test]
    fn capacities() {
        assert_eq!(capacity_of(tag(5)), 6);
        assert_eq!(capacity_of(tag(8)), 8);
        assert_eq!(capacity_of(tag(7)), 8);
        assert_eq!(capacity_of(tag(0)), 1);
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(
            substitute_msbs(181, tag(2), &"011".parse().unwrap()).unwrap(),
            117
        );
        assert_eq!(
            substitute_msbs(3, tag(8), &"11111111".parse().unwrap()).unwrap(),
            255
        );
        assert_eq!(
            substitute_msbs(5, tag(0), &"1".parse().unwrap()).unwrap(),
            133
        );
        assert_eq!(
            substitute_msbs(0xAB, tag(7), &"00000001".parse().unwrap()).unwrap(),
            1
        );
        assert_eq!(
            substitute_msbs(5, tag(3), &"1".parse().unwrap()),
            Err(Error::BitCount {
                expected: 4,
                found: 1
            })
        );
    }

    #[test]
    fn recover_bit_examples() {
        assert!(recover_bit(150, tag(4)));
        for t in 0..8 {
            assert!(!recover_bit(255, tag(t)));
            assert!(recover_bit(0, tag(t)));
        }
    }

    #[test]
    fn restore_examples() {
        // x = 156, px = 150, t = 4: decrypted low three bits are those of 156
        assert_eq!(restore_pixel(150, tag(4), 156), 156);
        assert_eq!(restore_pixel(150, tag(4), 0b1111_0100), 156);
        assert_eq!(restore_pixel(150, tag(7), 0), 151);
        assert_eq!(restore_pixel(150, tag(8), 3), 150);
    }

    #[test]
    fn restore_inverts_labeling_exhaustively() {
        for x in 0..=255u8 {
            for px in 0..=255u8 {
                let t = crate::prediction::label_of(x, px);
                assert_eq!(restore_pixel(px, t, x), x, "x={x} px={px}");
            }
        }
    }

    #[test]
    fn region_growth_order() {
        let seq: Vec<_> = region_candidates(4, 3).collect();
        assert_eq!(seq, vec![(1, 1), (2, 1), (2, 2), (3, 2)]);
        let seq: Vec<_> = region_candidates(2, 2).collect();
        assert_eq!(seq, vec![(1, 1)]);
        assert_eq!(region_candidates(600, 600).count(), 254 * 2 + 1);
    }

    #[test]
    fn constant_16x16_accounting() {
        let img = GrayImage::filled(16, 16, 90).unwrap();
        let out = owner_encode(&img, &KeySpec::new(*b"k")).unwrap();
        let rep = &out.report;
        assert_eq!((rep.ref_rows, rep.ref_cols), (1, 1));
        assert_eq!(rep.histogram.counts[8], 225);
        assert_eq!(rep.total_capacity, 225 * 8);
        assert_eq!(rep.code_bits, 450);
        assert_eq!(rep.reference_bits, 248);
        assert_eq!(rep.net_payload, 1800 - 450 - 84);

        let decoded = hider_decode_labels(&out.image).unwrap();
        assert!(decoded.map.raster_tags().all(|t| t == Tag::MAX));
        assert_eq!(decoded.map.raster_tags().count(), 225);
        assert_eq!(decoded.payload_space() as i64, rep.net_payload);
    }

    #[test]
    fn layout_read_write_round_trip() {
        let img = GrayImage::from_fn(9, 11, |i, j| (i * 13 + j * 7) as u8).unwrap();
        let map = build_label_map(&img, 1, 2).unwrap();
        let layout = StorageLayout::new(&map);
        let mut canvas = img.clone();
        let bits: Bits = (0..37).map(|k| k % 3 == 0).collect();
        layout.write(&mut canvas, 101, &bits).unwrap();
        assert_eq!(layout.read(&canvas, 101, 37).unwrap(), bits);
        // untouched ranges keep their bits
        assert_eq!(
            layout.read(&canvas, 0, 101).unwrap(),
            layout.read(&img, 0, 101).unwrap()
        );
        let tail = layout.total_bits() - 138;
        assert_eq!(
            layout.read(&canvas, 138, tail).unwrap(),
            layout.read(&img, 138, tail).unwrap()
        );
        assert!(layout.read(&canvas, layout.total_bits(), 1).is_err());
    }

    #[test]
    fn corrupted_region_fields_are_rejected() {
        let img = GrayImage::filled(16, 16, 90).unwrap();
        let mut marked = owner_encode(&img, &KeySpec::default()).unwrap().image;
        marked.set(0, 0, 0);
        assert!(matches!(
            hider_decode_labels(&marked),
            Err(Error::InvalidHeader(_))
        ));
        marked.set(0, 0, 16);
        assert!(matches!(
            hider_decode_labels(&marked),
            Err(Error::InvalidHeader(_))
        ));
    }

    #[test]
    fn noise_fails_cleanly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let img = GrayImage::from_fn(24, 24, |_, _| rng.gen()).unwrap();
        assert_eq!(
            owner_encode(&img, &KeySpec::default()).unwrap_err(),
            Error::InsufficientBootstrap
        );
    }

    #[test]
    fn empty_payload_round_trip() {
        let img = GrayImage::from_fn(12, 12, |i, j| (100 + i + j) as u8).unwrap();
        let (ke, kw) = (KeySpec::new(*b"e"), KeySpec::new(*b"w"));
        let owner = owner_encode(&img, &ke).unwrap();
        let (marked, rep) = hider_embed(&owner.image, &Bits::new(), &kw).unwrap();
        assert_eq!(rep.payload_bits, 0);
        assert_eq!(rep.embedding_rate, 0.0);
        assert!(receiver_extract(&marked, &kw).unwrap().is_empty());
        assert_eq!(receiver_recover(&marked, &ke).unwrap(), img);
    }

    #[test]
    fn oversize_payload_is_rejected() {
        let img = GrayImage::filled(10, 10, 0).unwrap();
        let owner = owner_encode(&img, &KeySpec::default()).unwrap();
        let max = owner.report.max_payload_bits();
        let too_big: Bits = (0..=max).map(|_| true).collect();
        assert_eq!(
            hider_embed(&owner.image, &too_big, &KeySpec::default()).unwrap_err(),
            Error::PayloadTooLarge { capacity: max }
        );
        let fits: Bits = (0..max).map(|k| k % 2 == 0).collect();
        let (marked, _) = hider_embed(&owner.image, &fits, &KeySpec::default()).unwrap();
        assert_eq!(
            receiver_extract(&marked, &KeySpec::default()).unwrap(),
            fits
        );
    }
}
