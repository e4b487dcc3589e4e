use std::fs;
use std::path::Path;

use super::prepare::RawDataset;
use crate::error::{Error, Result};

/// Unsigned-byte tensor with three dimensions (images).
pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
/// Unsigned-byte tensor with one dimension (labels).
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

fn read_u32(bytes: &[u8], offset: usize, what: &str) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::Format(format!("truncated {what} header")))
}

/// Parses an IDX image file into `(count, rows, cols, pixels)`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(usize, usize, usize, Vec<u8>)> {
    let magic = read_u32(bytes, 0, "image")?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::Format(format!(
            "image file has magic {magic:#010x}, expected {IDX_IMAGES_MAGIC:#010x}"
        )));
    }
    let count = read_u32(bytes, 4, "image")? as usize;
    let rows = read_u32(bytes, 8, "image")? as usize;
    let cols = read_u32(bytes, 12, "image")? as usize;
    let len = count
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or_else(|| Error::Format("image dimensions overflow".into()))?;
    let payload = &bytes[16..];
    if payload.len() < len {
        return Err(Error::Format(format!(
            "image payload has {} bytes, header promises {len}",
            payload.len()
        )));
    }
    Ok((count, rows, cols, payload[..len].to_vec()))
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = read_u32(bytes, 0, "label")?;
    if magic != IDX_LABELS_MAGIC {
        return Err(Error::Format(format!(
            "label file has magic {magic:#010x}, expected {IDX_LABELS_MAGIC:#010x}"
        )));
    }
    let count = read_u32(bytes, 4, "label")? as usize;
    let payload = &bytes[8..];
    if payload.len() < count {
        return Err(Error::Format(format!(
            "label payload has {} bytes, header promises {count}",
            payload.len()
        )));
    }
    Ok(payload[..count].to_vec())
}

/// Loads an IDX image/label pair. Pixels are flattened row-major and kept
/// as raw byte values.
pub fn load_idx(images: impl AsRef<Path>, labels: impl AsRef<Path>) -> Result<RawDataset> {
    let (count, rows, cols, pixels) = parse_idx_images(&fs::read(images)?)?;
    let labels = parse_idx_labels(&fs::read(labels)?)?;
    if labels.len() != count {
        return Err(Error::Format(format!(
            "{count} images but {} labels",
            labels.len()
        )));
    }
    RawDataset::new(
        pixels.into_iter().map(f64::from).collect(),
        rows * cols,
        Some(labels.into_iter().map(u32::from).collect()),
    )
}
