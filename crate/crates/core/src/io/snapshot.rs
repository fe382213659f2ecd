//! Binary field snapshots.
//!
//! Layout, all little-endian:
//!
//! | offset | size   | content                                   |
//! |--------|--------|-------------------------------------------|
//! | 0      | 4      | magic `DSBU`                              |
//! | 4      | 4      | format version (u32)                      |
//! | 8      | 4      | n (u32)                                   |
//! | 12     | 4      | nu (i32)                                  |
//! | 16     | 8      | box length (f64)                          |
//! | 24     | 8      | t (f64)                                   |
//! | 32     | 8      | gamma (f64)                               |
//! | 40     | 16 n^2 | `(re, im)` f64 pairs, row-major, x2 fastest |
//! | end-8  | 4      | CRC32 of the header                       |
//! | end-4  | 4      | CRC32 of the payload                      |

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use super::write_atomic;
use crate::error::{Error, Result};
use crate::spectral::{Field, Grid2D, Space};

pub const MAGIC: &[u8; 4] = b"DSBU";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 40;
pub const TRAILER_LEN: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotMeta {
    pub t: f64,
    pub nu: i32,
    pub gamma: f64,
}

pub fn file_len(n: usize) -> usize {
    HEADER_LEN + 16 * n * n + TRAILER_LEN
}

pub fn encode_snapshot(u: &Field, meta: &SnapshotMeta) -> Vec<u8> {
    let phys = u.to_physical();
    let grid = phys.grid();
    let n = grid.n();
    let mut buf = Vec::with_capacity(file_len(n));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    buf.extend_from_slice(&meta.nu.to_le_bytes());
    buf.extend_from_slice(&grid.box_length().to_le_bytes());
    buf.extend_from_slice(&meta.t.to_le_bytes());
    buf.extend_from_slice(&meta.gamma.to_le_bytes());
    for v in phys.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    let header_crc = crc32fast::hash(&buf[..HEADER_LEN]);
    let payload_crc = crc32fast::hash(&buf[HEADER_LEN..]);
    buf.extend_from_slice(&header_crc.to_le_bytes());
    buf.extend_from_slice(&payload_crc.to_le_bytes());
    buf
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"))
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode_snapshot(bytes: &[u8], path: &Path) -> Result<(Field, SnapshotMeta)> {
    let structural = |msg: String| Error::Snapshot {
        path: path.to_path_buf(),
        msg,
    };
    if bytes.len() < HEADER_LEN + TRAILER_LEN {
        return Err(structural(format!("truncated: {} bytes is shorter than header and trailer", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(structural("bad magic, not a DSBU snapshot".into()));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(structural(format!("unsupported format version {version} (expected {VERSION})")));
    }
    let n = u32_at(bytes, 8) as usize;
    let expected = file_len(n);
    if bytes.len() != expected {
        return Err(structural(format!(
            "length {} does not match n = {n} (expected {expected} bytes)",
            bytes.len()
        )));
    }
    let end = bytes.len() - TRAILER_LEN;
    let header_crc = u32_at(bytes, end);
    let payload_crc = u32_at(bytes, end + 4);
    if crc32fast::hash(&bytes[..HEADER_LEN]) != header_crc {
        return Err(Error::Checksum {
            path: path.to_path_buf(),
            region: format!("header (bytes 0..{HEADER_LEN})"),
        });
    }
    if crc32fast::hash(&bytes[HEADER_LEN..end]) != payload_crc {
        return Err(Error::Checksum {
            path: path.to_path_buf(),
            region: format!("payload (bytes {HEADER_LEN}..{end})"),
        });
    }
    let nu = i32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes"));
    let box_length = f64_at(bytes, 16);
    let t = f64_at(bytes, 24);
    let gamma = f64_at(bytes, 32);
    let grid = Grid2D::new(n, box_length).map_err(|e| structural(e.to_string()))?;
    let values = bytes[HEADER_LEN..end]
        .chunks_exact(16)
        .map(|c| Complex64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    let field = Field::from_values(grid, values, Space::Physical)?;
    Ok((field, SnapshotMeta { t, nu, gamma }))
}

pub fn write_snapshot(path: &Path, u: &Field, meta: &SnapshotMeta) -> Result<()> {
    write_atomic(path, &encode_snapshot(u, meta))
}

pub fn read_snapshot(path: &Path) -> Result<(Field, SnapshotMeta)> {
    let bytes = fs::read(path)?;
    decode_snapshot(&bytes, path)
}
