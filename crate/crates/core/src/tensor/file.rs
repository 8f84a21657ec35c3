//! `C3TF` binary tensor files.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! magic   4 bytes  "C3TF"
//! version u32      1
//! rank    u8
//! dims    rank × u32
//! payload product(dims) × f32, row-major
//! ```

use std::fs;
use std::path::Path;

use super::FeatureMap;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"C3TF";
const VERSION: u32 = 1;

/// A tensor of arbitrary rank as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTensor {
    pub dims: Vec<usize>,
    pub data: Vec<f32>,
}

impl RawTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if n != data.len() {
            return Err(Error::Dimension(format!(
                "dims {dims:?} need {n} values, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }
}

impl From<&FeatureMap<f32>> for RawTensor {
    fn from(x: &FeatureMap<f32>) -> Self {
        let (c, h, w) = x.shape();
        Self {
            dims: vec![c, h, w],
            data: x.data().to_vec(),
        }
    }
}

impl TryFrom<RawTensor> for FeatureMap<f32> {
    type Error = Error;

    fn try_from(raw: RawTensor) -> Result<Self> {
        match raw.dims[..] {
            [c, h, w] => FeatureMap::new(c, h, w, raw.data),
            _ => Err(Error::Dimension(format!(
                "feature maps are rank 3, file has dims {:?}",
                raw.dims
            ))),
        }
    }
}

pub fn encode_tensor(t: &RawTensor) -> Result<Vec<u8>> {
    if t.dims.len() > u8::MAX as usize {
        return Err(Error::Dimension(format!("rank {} too large", t.dims.len())));
    }
    let mut out = Vec::with_capacity(9 + 4 * t.dims.len() + 4 * t.data.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(t.dims.len() as u8);
    for &d in &t.dims {
        let d = u32::try_from(d)
            .map_err(|_| Error::Dimension(format!("dimension {d} exceeds u32")))?;
        out.extend_from_slice(&d.to_le_bytes());
    }
    for v in &t.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

fn take<'a>(bytes: &'a [u8], offset: usize, n: usize, what: &str) -> Result<&'a [u8]> {
    bytes.get(offset..offset + n).ok_or_else(|| Error::Format {
        offset: bytes.len(),
        reason: format!("truncated while reading {what} ({n} bytes needed at {offset})"),
    })
}

pub fn decode_tensor(bytes: &[u8]) -> Result<RawTensor> {
    let magic = take(bytes, 0, 4, "magic")?;
    if magic != MAGIC {
        return Err(Error::Format {
            offset: 0,
            reason: format!("bad magic {:?}", String::from_utf8_lossy(magic)),
        });
    }
    let version = u32::from_le_bytes(take(bytes, 4, 4, "version")?.try_into().unwrap());
    if version != VERSION {
        return Err(Error::Format {
            offset: 4,
            reason: format!("unsupported version {version}"),
        });
    }
    let rank = take(bytes, 8, 1, "rank")?[0] as usize;
    let mut offset = 9;
    let mut dims = Vec::with_capacity(rank);
    for _ in 0..rank {
        let d = u32::from_le_bytes(take(bytes, offset, 4, "dims")?.try_into().unwrap());
        dims.push(d as usize);
        offset += 4;
    }
    let count: usize = dims.iter().product();
    let payload_len = count * 4;
    let available = bytes.len() - offset;
    if available < payload_len {
        return Err(Error::Format {
            offset: bytes.len(),
            reason: format!("truncated payload: expected {payload_len} bytes, found {available}"),
        });
    }
    if available > payload_len {
        return Err(Error::Format {
            offset: offset + payload_len,
            reason: format!("{} trailing bytes after payload", available - payload_len),
        });
    }
    let data = bytes[offset..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(RawTensor { dims, data })
}

pub fn save_raw(path: impl AsRef<Path>, t: &RawTensor) -> Result<()> {
    fs::write(path, encode_tensor(t)?)?;
    Ok(())
}

pub fn load_raw(path: impl AsRef<Path>) -> Result<RawTensor> {
    decode_tensor(&fs::read(path)?)
}

pub fn save_tensor(path: impl AsRef<Path>, x: &FeatureMap<f32>) -> Result<()> {
    save_raw(path, &RawTensor::from(x))
}

pub fn load_tensor(path: impl AsRef<Path>) -> Result<FeatureMap<f32>> {
    load_raw(path)?.try_into()
}
