use crate::error::{Error, Result};
use crate::frames::{FrameTensor, POLARITIES};

pub const MAGIC: [u8; 4] = *b"NDAF";
pub const VERSION: u8 = 1;
/// magic (4) + version (1) + T, P, H, W as u32 LE (16) + dtype (1)
pub const HEADER_LEN: usize = 22;

/// Payload element type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    /// Code 0, one byte per entry. Used for binarized tensors.
    U8 = 0,
    /// Code 1, little-endian u16 counts.
    U16 = 1,
}

impl Dtype {
    pub fn size(self) -> usize {
        match self {
            Dtype::U8 => 1,
            Dtype::U16 => 2,
        }
    }

    fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Dtype::U8),
            1 => Ok(Dtype::U16),
            other => Err(Error::Dtype(other)),
        }
    }
}

/// Serializes with `u8` payload for binarized tensors and `u16` otherwise.
pub fn write_frames(frames: &FrameTensor) -> Vec<u8> {
    let dtype = if frames.is_binarized() { Dtype::U8 } else { Dtype::U16 };
    write_frames_as(frames, dtype).expect("binarized entries always fit u8")
}

/// Serializes with an explicit payload type; `U8` rejects counts above 255.
pub fn write_frames_as(frames: &FrameTensor, dtype: Dtype) -> Result<Vec<u8>> {
    let data = frames.data();
    let mut out = Vec::with_capacity(HEADER_LEN + data.len() * dtype.size());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    for d in frames.shape() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    out.push(dtype as u8);
    match dtype {
        Dtype::U8 => {
            for &v in data {
                let b = u8::try_from(v).map_err(|_| Error::Overflow {
                    field: "u8 entry",
                    value: v.into(),
                    max: 255,
                })?;
                out.push(b);
            }
        }
        Dtype::U16 => data.iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
    }
    Ok(out)
}

/// Parses a container. A `u8` payload whose entries are all 0/1 comes back binarized.
pub fn read_frames(bytes: &[u8]) -> Result<FrameTensor> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Length {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    if bytes[4] != VERSION {
        return Err(Error::Version(bytes[4]));
    }
    let mut dims = [0usize; 4];
    for (i, d) in dims.iter_mut().enumerate() {
        let off = 5 + 4 * i;
        *d = u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as usize;
    }
    let [t, p, h, w] = dims;
    if p != POLARITIES {
        return Err(Error::Shape(format!("polarity axis of {p}, expected {POLARITIES}")));
    }
    let dtype = Dtype::from_code(bytes[21])?;
    let count = t
        .checked_mul(p)
        .and_then(|n| n.checked_mul(h))
        .and_then(|n| n.checked_mul(w))
        .ok_or_else(|| Error::Shape(format!("dimensions ({t}, {p}, {h}, {w}) overflow")))?;
    let payload = &bytes[HEADER_LEN..];
    let expected = count.saturating_mul(dtype.size());
    if payload.len() != expected {
        return Err(Error::Length {
            expected: HEADER_LEN.saturating_add(expected),
            found: bytes.len(),
        });
    }
    let data: Vec<u16> = match dtype {
        Dtype::U8 => payload.iter().map(|&b| b.into()).collect(),
        Dtype::U16 => payload
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect(),
    };
    let binarized = dtype == Dtype::U8 && data.iter().all(|&v| v <= 1);
    FrameTensor::from_vec(t, h, w, data, binarized)
}
