//! SPL depth-array files.
//!
//! Little-endian layout:
//!
//! | offset | size | field                               |
//! |-------:|-----:|-------------------------------------|
//! | 0      | 4    | magic `SPLT`                        |
//! | 4      | 2    | version (u16, = 1)                  |
//! | 6      | 4    | primary count N (u32)               |
//! | 10     | 4    | secondary count M (u32)             |
//! | 14     | 8    | opening angle, radians (f64)        |
//! | 22     | 24   | frame centre x, y, z (f64)          |
//! | 46     | 8    | frame radius (f64)                  |
//! | 54     | 8    | model id                            |
//! | 62     | 4·NM | depths (f32), primary-major         |

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{BoundingSphere, Vec3};
use crate::spotlights::{DepthArray, ModelDescriptor, ModelId};

pub const MAGIC: [u8; 4] = *b"SPLT";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 62;

/// A decoded SPL file: the arrangement parameters and the depths.
#[derive(Debug, Clone, PartialEq)]
pub struct SplFile {
    pub descriptor: ModelDescriptor,
    pub depths: DepthArray,
}

pub fn encoded_len(descriptor: &ModelDescriptor) -> usize {
    HEADER_LEN + 4 * descriptor.ray_count()
}

pub fn to_bytes(descriptor: &ModelDescriptor, depths: &DepthArray) -> Result<Vec<u8>> {
    if depths.model_id() != descriptor.id() {
        return Err(Error::ModelMismatch);
    }
    if depths.len() != descriptor.ray_count() {
        return Err(Error::SizeMismatch {
            expected: descriptor.ray_count(),
            actual: depths.len(),
        });
    }
    let frame = depths.frame();
    let mut out = Vec::with_capacity(encoded_len(descriptor));
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&descriptor.n_primary.to_le_bytes());
    out.extend_from_slice(&descriptor.m_secondary.to_le_bytes());
    out.extend_from_slice(&descriptor.opening_angle.to_le_bytes());
    for c in frame.center.to_array() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out.extend_from_slice(&frame.radius.to_le_bytes());
    out.extend_from_slice(&depths.model_id().0);
    for v in depths.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let mut a = [0u8; N];
        a.copy_from_slice(&self.bytes[self.pos..self.pos + N]);
        self.pos += N;
        a
    }

    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }

    fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take())
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<SplFile> {
    if bytes.len() >= 4 && bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::HeaderTruncated);
    }
    let mut c = Cursor { bytes, pos: 4 };
    let version = u16::from_le_bytes(c.take());
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let n_primary = c.u32();
    let m_secondary = c.u32();
    let opening_angle = c.f64();
    let center = Vec3::new(c.f64(), c.f64(), c.f64());
    let radius = c.f64();
    let model_id = ModelId(c.take());
    let descriptor = ModelDescriptor::new(n_primary, m_secondary, opening_angle)?;
    if descriptor.id() != model_id {
        return Err(Error::ModelMismatch);
    }
    let frame = BoundingSphere::new(center, radius).map_err(|_| Error::InvalidFrame(radius))?;
    let expected = 4 * descriptor.ray_count();
    let payload = &bytes[HEADER_LEN..];
    if payload.len() < expected {
        return Err(Error::PayloadTruncated {
            expected,
            actual: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(Error::TrailingData(payload.len() - expected));
    }
    let values = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    let depths = DepthArray::new(model_id, values, frame)?;
    Ok(SplFile { descriptor, depths })
}

pub fn write_spl(path: impl AsRef<Path>, descriptor: &ModelDescriptor, depths: &DepthArray) -> Result<()> {
    let bytes = to_bytes(descriptor, depths)?;
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

pub fn read_spl(path: impl AsRef<Path>) -> Result<SplFile> {
    from_bytes(&fs::read(path)?)
}
