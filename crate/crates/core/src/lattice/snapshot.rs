//! Binary lattice snapshots.
//!
//! Little-endian layout: magic `SU2LAT\0\0`, `u32` version (1), four `u32`
//! extents, `f64` beta, `u64` sweep index, then every link as four `f64`
//! quaternion components, site-major with x fastest and direction minor,
//! and finally the SHA-256 of everything before it.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::field::GaugeField;
use crate::error::{Error, Result};
use crate::su2::GroupElement;

pub const MAGIC: &[u8; 8] = b"SU2LAT\0\0";
pub const VERSION: u32 = 2;
const HEADER_LEN: usize = 8 + 4 + 16 + 8 + 8;
const DIGEST_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub beta: f64,
    pub sweep: u64,
    pub field: GaugeField,
}

pub fn encode(field: &GaugeField, beta: f64, sweep: u64) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + field.links().len() * 32 + DIGEST_LEN);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    for d in field.dims() {
        buf.extend_from_slice(&(d as u32).to_le_bytes());
    }
    buf.extend_from_slice(&beta.to_le_bytes());
    buf.extend_from_slice(&sweep.to_le_bytes());
    for g in field.links() {
        for c in g.components() {
            buf.extend_from_slice(&c.to_le_bytes());
        }
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

pub fn decode(bytes: &[u8]) -> Result<Snapshot> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Corrupt(format!("snapshot header truncated ({} bytes)", bytes.len())));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Corrupt("bad snapshot magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let version = u32_at(8);
    if version != VERSION {
        return Err(Error::Corrupt(format!("unsupported snapshot version {version}")));
    }
    let dims = [u32_at(12) as usize, u32_at(16) as usize, u32_at(20) as usize, u32_at(24) as usize];
    let beta = f64::from_le_bytes(bytes[28..36].try_into().unwrap());
    let sweep = u64::from_le_bytes(bytes[36..44].try_into().unwrap());
    let n_links = dims.iter().try_fold(4usize, |acc, &d| acc.checked_mul(d));
    let expected = n_links.and_then(|n| n.checked_mul(32)).and_then(|p| p.checked_add(HEADER_LEN + DIGEST_LEN));
    match expected {
        Some(e) if e == bytes.len() => {}
        Some(e) => {
            return Err(Error::Corrupt(format!(
                "snapshot payload has {} bytes, expected {}",
                bytes.len().saturating_sub(HEADER_LEN + DIGEST_LEN),
                e - HEADER_LEN - DIGEST_LEN
            )))
        }
        None => return Err(Error::Corrupt(format!("snapshot dims {dims:?} overflow"))),
    }
    let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
    if Sha256::digest(body).as_slice() != digest {
        return Err(Error::Corrupt("snapshot digest mismatch".into()));
    }
    let links = body[HEADER_LEN..]
        .chunks_exact(32)
        .map(|c| {
            let f = |i: usize| f64::from_le_bytes(c[8 * i..8 * i + 8].try_into().unwrap());
            GroupElement::from_components_unchecked([f(0), f(1), f(2), f(3)])
        })
        .collect::<Vec<_>>();
    if links.iter().any(|g| !(g.norm_sqr() - 1.0).abs().lt(&1e-8)) {
        return Err(Error::Corrupt("snapshot contains non-unitary links".into()));
    }
    let field = GaugeField::from_links_exact(dims, links).map_err(|e| Error::Corrupt(e.to_string()))?;
    Ok(Snapshot { beta, sweep, field })
}

pub fn write(path: &Path, field: &GaugeField, beta: f64, sweep: u64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode(field, beta, sweep))?;
    w.flush()?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let f = GaugeField::cold_start([2, 2, 2, 4]).unwrap();
        let b = encode(&f, 2.25, 17);
        assert_eq!(&b[..8], b"SU2LAT\0\0");
        assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(b[24..28].try_into().unwrap()), 4);
        assert_eq!(f64::from_le_bytes(b[28..36].try_into().unwrap()), 2.25);
        assert_eq!(u64::from_le_bytes(b[36..44].try_into().unwrap()), 17);
        assert_eq!(b.len(), 44 + 32 * 4 * 32 + 32);
        assert_eq!(&b[b.len() - 32..], Sha256::digest(&b[..b.len() - 32]).as_slice());
        // first link quaternion: identity
        assert_eq!(f64::from_le_bytes(b[44..52].try_into().unwrap()), 1.0);
    }

    #[test]
    fn roundtrip_and_corruption() {
        let f = GaugeField::hot_start([2, 4, 2, 2], 3).unwrap();
        let b = encode(&f, 1.5, 9);
        let s = decode(&b).unwrap();
        assert_eq!(s.field.links(), f.links());
        assert_eq!((s.beta, s.sweep), (1.5, 9));

        assert!(matches!(decode(&b[..b.len() - 8]), Err(Error::Corrupt(_))));
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(matches!(decode(&bad), Err(Error::Corrupt(_))));
        assert!(matches!(decode(&b[..10]), Err(Error::Corrupt(_))));
        // a flipped payload bit is caught by the digest even though the link stays unitary
        let mut flipped = b.clone();
        flipped[44] ^= 0x01;
        let e = decode(&flipped).unwrap_err();
        assert!(e.to_string().contains("digest"), "{e}");
    }
}
