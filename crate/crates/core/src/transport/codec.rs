//! Byte-exact codecs for panels, field snapshots, and rank grids.
//!
//! Panel wire format, all integers little-endian:
//!
//! | offset | field       | type          |
//! |--------|-------------|---------------|
//! | 0      | magic       | b"SWP2"       |
//! | 4      | version     | u16 (= 1)     |
//! | 6      | direction   | u8            |
//! | 7      | orientation | u8            |
//! | 8      | n           | u32           |
//! | 12     | start_step  | u64           |
//! | 20     | arity       | u16 (level 0) |
//! | 22     | reserved    | 6 zero bytes  |
//!
//! The 28-byte header is followed by the payload: levels concatenated in
//! increasing k, each slab's state vectors in the slab's canonical scan
//! order, each value IEEE-754 binary64 little-endian. For a constant arity
//! `a` the payload is exactly `(n^2/2 + n) * a * 8` bytes. Kernels with a
//! per-sub-step arity schedule are decoded with [`decode_panel_with_arity`];
//! the header's arity field then records the level-0 arity.
//!
//! Field snapshots ("SWF2") and rank grids ("SWG2") use the same value
//! encoding with their own headers.

use crate::grid::{
    panel_shape, Direction, GlobalField, Grid, Orientation, Panel, Slab,
};
use thiserror::Error;

pub const PANEL_MAGIC: [u8; 4] = *b"SWP2";
pub const FIELD_MAGIC: [u8; 4] = *b"SWF2";
pub const GRID_MAGIC: [u8; 4] = *b"SWG2";
pub const PANEL_VERSION: u16 = 1;
pub const FIELD_VERSION: u16 = 1;
pub const PANEL_HEADER_LEN: usize = 28;
pub const FIELD_HEADER_LEN: usize = 32;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("bad magic: expected {expected:?}, got {got:?}")]
    BadMagic { expected: [u8; 4], got: [u8; 4] },
    #[error("unsupported version {got}")]
    BadVersion { got: u16 },
    #[error("bad field {field}: {detail}")]
    BadField {
        field: &'static str,
        detail: String,
    },
    #[error("length mismatch: expected {expected} bytes, got {got}")]
    Length { expected: usize, got: usize },
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Reader<'a> {
        Reader { bytes, pos: 0 }
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8], CodecError> {
        if self.pos + len > self.bytes.len() {
            return Err(CodecError::Length {
                expected: self.pos + len,
                got: self.bytes.len(),
            });
        }
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16, CodecError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    fn values(&mut self, count: usize) -> Result<Vec<f64>, CodecError> {
        let raw = self.take(count * 8)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

fn push_values(out: &mut Vec<u8>, values: &[f64]) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

/// Bare f64 little-endian value block, used for halo rows and columns.
pub fn encode_values(values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 8);
    push_values(&mut out, values);
    out
}

pub fn decode_values(bytes: &[u8], expected: usize) -> Result<Vec<f64>, CodecError> {
    if bytes.len() != expected * 8 {
        return Err(CodecError::Length {
            expected: expected * 8,
            got: bytes.len(),
        });
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn check_magic(got: &[u8], expected: [u8; 4]) -> Result<(), CodecError> {
    let got: [u8; 4] = got.try_into().unwrap();
    if got != expected {
        return Err(CodecError::BadMagic { expected, got });
    }
    Ok(())
}

/// Encode a panel with its 28-byte header and canonical payload.
pub fn encode_panel(p: &Panel) -> Vec<u8> {
    let total_values: usize = p.levels().iter().map(|s| s.values().len()).sum();
    let mut out = Vec::with_capacity(PANEL_HEADER_LEN + total_values * 8);
    out.extend_from_slice(&PANEL_MAGIC);
    out.extend_from_slice(&PANEL_VERSION.to_le_bytes());
    out.push(p.direction.code());
    out.push(p.orientation.code());
    out.extend_from_slice(&(p.n as u32).to_le_bytes());
    out.extend_from_slice(&p.start_step.to_le_bytes());
    out.extend_from_slice(&(p.level(0).arity() as u16).to_le_bytes());
    out.extend_from_slice(&[0u8; 6]);
    for slab in p.levels() {
        push_values(&mut out, slab.values());
    }
    out
}

/// Decode a constant-arity panel using the header's arity for every level.
pub fn decode_panel(bytes: &[u8]) -> Result<Panel, CodecError> {
    let header = decode_panel_header(bytes)?;
    decode_panel_levels(bytes, &header, |_| header.arity as usize)
}

/// Decode a panel whose per-level arity follows the kernel's schedule
/// (`arity_at` maps a global sub-step index to a state vector length).
pub fn decode_panel_with_arity(
    bytes: &[u8],
    arity_at: impl Fn(u64) -> usize,
) -> Result<Panel, CodecError> {
    let header = decode_panel_header(bytes)?;
    decode_panel_levels(bytes, &header, arity_at)
}

/// Decoded panel header fields.
#[derive(Debug, Clone, Copy)]
pub struct PanelHeader {
    pub direction: Direction,
    pub orientation: Orientation,
    pub n: usize,
    pub start_step: u64,
    pub arity: u16,
}

pub fn decode_panel_header(bytes: &[u8]) -> Result<PanelHeader, CodecError> {
    let mut r = Reader::new(bytes);
    check_magic(r.take(4)?, PANEL_MAGIC)?;
    let version = r.u16()?;
    if version != PANEL_VERSION {
        return Err(CodecError::BadVersion { got: version });
    }
    let direction = Direction::from_code(r.u8()?).ok_or(CodecError::BadField {
        field: "direction",
        detail: "unknown direction code".into(),
    })?;
    let orientation = Orientation::from_code(r.u8()?).ok_or(CodecError::BadField {
        field: "orientation",
        detail: "unknown orientation code".into(),
    })?;
    let n = r.u32()? as usize;
    if n < 4 || n % 2 != 0 {
        return Err(CodecError::BadField {
            field: "n",
            detail: format!("invalid side length {n}"),
        });
    }
    let start_step = r.u64()?;
    let arity = r.u16()?;
    if arity == 0 {
        return Err(CodecError::BadField {
            field: "arity",
            detail: "arity must be >= 1".into(),
        });
    }
    Ok(PanelHeader {
        direction,
        orientation,
        n,
        start_step,
        arity,
    })
}

fn decode_panel_levels(
    bytes: &[u8],
    header: &PanelHeader,
    arity_at: impl Fn(u64) -> usize,
) -> Result<Panel, CodecError> {
    let shape = panel_shape(header.n, header.orientation).map_err(|e| CodecError::BadField {
        field: "n",
        detail: e.to_string(),
    })?;
    let expected: usize = shape
        .per_level
        .iter()
        .enumerate()
        .map(|(k, count)| count * arity_at(header.start_step + k as u64) * 8)
        .sum();
    if bytes.len() != PANEL_HEADER_LEN + expected {
        return Err(CodecError::Length {
            expected: PANEL_HEADER_LEN + expected,
            got: bytes.len(),
        });
    }
    if arity_at(header.start_step) != header.arity as usize {
        return Err(CodecError::BadField {
            field: "arity",
            detail: format!(
                "header arity {} does not match schedule arity {}",
                header.arity,
                arity_at(header.start_step)
            ),
        });
    }
    let mut r = Reader::new(bytes);
    r.take(PANEL_HEADER_LEN)?;
    let mut levels = Vec::with_capacity(shape.per_level.len());
    for (k, count) in shape.per_level.iter().enumerate() {
        let arity = arity_at(header.start_step + k as u64);
        levels.push(Slab::new(arity, r.values(count * arity)?));
    }
    Panel::from_levels(
        header.direction,
        header.orientation,
        header.n,
        header.start_step,
        levels,
    )
    .map_err(|e| CodecError::BadField {
        field: "levels",
        detail: e.to_string(),
    })
}

/// Encode a global field snapshot ("SWF2").
pub fn encode_field(f: &GlobalField) -> Vec<u8> {
    let mut out = Vec::with_capacity(FIELD_HEADER_LEN + f.values().len() * 8);
    out.extend_from_slice(&FIELD_MAGIC);
    out.extend_from_slice(&FIELD_VERSION.to_le_bytes());
    out.extend_from_slice(&(f.arity() as u16).to_le_bytes());
    out.extend_from_slice(&(f.width() as u32).to_le_bytes());
    out.extend_from_slice(&(f.height() as u32).to_le_bytes());
    out.extend_from_slice(&f.step().to_le_bytes());
    out.extend_from_slice(&(f.shift().0 as u32).to_le_bytes());
    out.extend_from_slice(&(f.shift().1 as u32).to_le_bytes());
    push_values(&mut out, f.values());
    out
}

pub fn decode_field(bytes: &[u8]) -> Result<GlobalField, CodecError> {
    let mut r = Reader::new(bytes);
    check_magic(r.take(4)?, FIELD_MAGIC)?;
    let version = r.u16()?;
    if version != FIELD_VERSION {
        return Err(CodecError::BadVersion { got: version });
    }
    let arity = r.u16()? as usize;
    let width = r.u32()? as usize;
    let height = r.u32()? as usize;
    let step = r.u64()?;
    let shift = (r.u32()? as usize, r.u32()? as usize);
    let count = width * height * arity;
    if bytes.len() != FIELD_HEADER_LEN + count * 8 {
        return Err(CodecError::Length {
            expected: FIELD_HEADER_LEN + count * 8,
            got: bytes.len(),
        });
    }
    let data = r.values(count)?;
    let mut field = GlobalField::new(width, height, step, arity, shift, data).map_err(|e| {
        CodecError::BadField {
            field: "dimensions",
            detail: e.to_string(),
        }
    })?;
    field.set_shift(shift);
    Ok(field)
}

/// Encode one rank's grid ("SWG2"); used when ranks stream their final
/// blocks to a gathering rank over TCP.
pub fn encode_grid(g: &Grid) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + g.values().len() * 8);
    out.extend_from_slice(&GRID_MAGIC);
    out.extend_from_slice(&FIELD_VERSION.to_le_bytes());
    out.extend_from_slice(&(g.arity() as u16).to_le_bytes());
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    out.extend_from_slice(&g.step().to_le_bytes());
    push_values(&mut out, g.values());
    out
}

pub fn decode_grid(bytes: &[u8]) -> Result<Grid, CodecError> {
    let mut r = Reader::new(bytes);
    check_magic(r.take(4)?, GRID_MAGIC)?;
    let version = r.u16()?;
    if version != FIELD_VERSION {
        return Err(CodecError::BadVersion { got: version });
    }
    let arity = r.u16()? as usize;
    let n = r.u32()? as usize;
    let step = r.u64()?;
    let count = n * n * arity;
    if bytes.len() != 20 + count * 8 {
        return Err(CodecError::Length {
            expected: 20 + count * 8,
            got: bytes.len(),
        });
    }
    let data = r.values(count)?;
    Grid::new(n, step, arity, data).map_err(|e| CodecError::BadField {
        field: "dimensions",
        detail: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_panel(
        n: usize,
        orientation: Orientation,
        direction: Direction,
        arity: usize,
        value: f64,
    ) -> Panel {
        let shape = panel_shape(n, orientation).unwrap();
        let levels = shape
            .per_level
            .iter()
            .map(|count| Slab::new(arity, vec![value; count * arity]))
            .collect();
        Panel::from_levels(direction, orientation, n, 0, levels).unwrap()
    }

    #[test]
    fn n8_arity1_panel_is_348_bytes() {
        let p = constant_panel(8, Orientation::Upward, Direction::North, 1, 0.0);
        assert_eq!(encode_panel(&p).len(), 348);
    }

    #[test]
    fn all_ones_payload_bytes() {
        let p = constant_panel(8, Orientation::Upward, Direction::North, 1, 1.0);
        let bytes = encode_panel(&p);
        let one = [0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xF0, 0x3F];
        for chunk in bytes[PANEL_HEADER_LEN..].chunks_exact(8) {
            assert_eq!(chunk, one);
        }
    }

    #[test]
    fn truncated_buffer_is_length_error() {
        let p = constant_panel(8, Orientation::Upward, Direction::West, 1, 2.0);
        let mut bytes = encode_panel(&p);
        bytes.truncate(bytes.len() - 1);
        assert!(matches!(
            decode_panel(&bytes),
            Err(CodecError::Length { .. })
        ));
    }

    #[test]
    fn bad_magic_is_reported() {
        let p = constant_panel(4, Orientation::Downward, Direction::East, 1, 0.5);
        let mut bytes = encode_panel(&p);
        bytes[0] = b'X';
        assert!(matches!(
            decode_panel(&bytes),
            Err(CodecError::BadMagic { .. })
        ));
    }

    #[test]
    fn bad_version_is_reported() {
        let p = constant_panel(4, Orientation::Downward, Direction::East, 1, 0.5);
        let mut bytes = encode_panel(&p);
        bytes[4] = 9;
        assert!(matches!(
            decode_panel(&bytes),
            Err(CodecError::BadVersion { got: 9 })
        ));
    }

    #[test]
    fn mixed_arity_panel_round_trips() {
        // Alternating arity 1/5 schedule, as the wide-stencil kernel uses.
        let arity_at = |step: u64| if step % 2 == 0 { 1 } else { 5 };
        let n = 8;
        let shape = panel_shape(n, Orientation::Upward).unwrap();
        let levels: Vec<Slab> = shape
            .per_level
            .iter()
            .enumerate()
            .map(|(k, count)| {
                let arity = arity_at(k as u64);
                Slab::new(
                    arity,
                    (0..count * arity).map(|i| i as f64 + k as f64).collect(),
                )
            })
            .collect();
        let p = Panel::from_levels(Direction::South, Orientation::Upward, n, 0, levels).unwrap();
        let bytes = encode_panel(&p);
        let back = decode_panel_with_arity(&bytes, arity_at).unwrap();
        assert_eq!(back, p);
        // Uniform decode must reject the mismatched length.
        assert!(decode_panel(&bytes).is_err());
    }

    #[test]
    fn field_snapshot_round_trips() {
        let mut f = GlobalField::zeroed(6, 4, 17, 3);
        for j in 0..4 {
            for i in 0..6 {
                let cell = f.value_mut(i, j);
                for (c, slot) in cell.iter_mut().enumerate() {
                    *slot = (i * 100 + j * 10 + c) as f64 * 0.25;
                }
            }
        }
        f.set_shift((3, 2));
        let bytes = encode_field(&f);
        let back = decode_field(&bytes).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.shift(), (3, 2));
    }

    #[test]
    fn grid_round_trips() {
        let mut g = Grid::zeroed(4, 9, 2).unwrap();
        for y in 0..4 {
            for x in 0..4 {
                g.value_mut(x, y).copy_from_slice(&[x as f64, y as f64]);
            }
        }
        let bytes = encode_grid(&g);
        assert_eq!(decode_grid(&bytes).unwrap(), g);
    }
}
