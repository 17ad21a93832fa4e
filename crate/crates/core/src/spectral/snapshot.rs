//! Binary field snapshots.
//!
//! Layout (all multi-byte values in the byte order named at offset 12):
//!
//! | offset | size | content                                          |
//! |--------|------|--------------------------------------------------|
//! | 0      | 8    | magic `b"LCDFIELD"`                              |
//! | 8      | 4    | format version, u32 (currently 1)                |
//! | 12     | 1    | byte order: 0 little-endian, 1 big-endian        |
//! | 13     | 1    | representation: 0 physical, 1 spectral           |
//! | 14     | 1    | component count (1 or 3)                         |
//! | 15     | 1    | reserved, 0                                      |
//! | 16     | 4    | n, u32                                           |
//! | 20     | 4    | reserved, 0                                      |
//! | 24     | 8    | box length L, f64                                |
//! | 32     | 8    | dealias fraction, f64                            |
//! | 40     | ...  | payload, f64                                     |
//!
//! Physical payload: per component, `n^3` values with the z index fastest.
//! Spectral payload: per component, `n * n * (n/2 + 1)` coefficients in the
//! same index order, each written as `(re, im)`.

use std::fs;
use std::path::Path;

use ndarray::Array3;
use num_complex::Complex64;

use super::field::{Representation, Samples, ScalarField, VectorField};
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"LCDFIELD";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByteOrder {
    Little,
    Big,
}

/// Decoded snapshot header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotHeader {
    pub grid: GridSpec,
    pub representation: Representation,
    pub components: usize,
    pub byte_order: ByteOrder,
}

/// A field read back from disk, of either rank.
#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Scalar(ScalarField),
    Vector(VectorField),
}

fn put_u32(out: &mut Vec<u8>, v: u32, order: ByteOrder) {
    out.extend_from_slice(&match order {
        ByteOrder::Little => v.to_le_bytes(),
        ByteOrder::Big => v.to_be_bytes(),
    });
}

fn put_f64(out: &mut Vec<u8>, v: f64, order: ByteOrder) {
    out.extend_from_slice(&match order {
        ByteOrder::Little => v.to_le_bytes(),
        ByteOrder::Big => v.to_be_bytes(),
    });
}

fn get_u32(b: &[u8], order: ByteOrder) -> u32 {
    let a: [u8; 4] = b[..4].try_into().unwrap();
    match order {
        ByteOrder::Little => u32::from_le_bytes(a),
        ByteOrder::Big => u32::from_be_bytes(a),
    }
}

fn get_f64(b: &[u8], order: ByteOrder) -> f64 {
    let a: [u8; 8] = b[..8].try_into().unwrap();
    match order {
        ByteOrder::Little => f64::from_le_bytes(a),
        ByteOrder::Big => f64::from_be_bytes(a),
    }
}

fn encode(components: &[&ScalarField], order: ByteOrder) -> Vec<u8> {
    let grid = *components[0].grid();
    let repr = components[0].representation();
    let mut out = Vec::with_capacity(HEADER_LEN + components.len() * 16 * grid.n.pow(3));
    out.extend_from_slice(MAGIC);
    put_u32(&mut out, VERSION, order);
    out.push(match order {
        ByteOrder::Little => 0,
        ByteOrder::Big => 1,
    });
    out.push(match repr {
        Representation::Physical => 0,
        Representation::Spectral => 1,
    });
    out.push(components.len() as u8);
    out.push(0);
    put_u32(&mut out, grid.n as u32, order);
    put_u32(&mut out, 0, order);
    put_f64(&mut out, grid.box_length, order);
    put_f64(&mut out, grid.dealias_fraction, order);
    for c in components {
        match c.samples() {
            Samples::Physical(v) => v.iter().for_each(|x| put_f64(&mut out, *x, order)),
            Samples::Spectral(v) => v.iter().for_each(|z| {
                put_f64(&mut out, z.re, order);
                put_f64(&mut out, z.im, order);
            }),
        }
    }
    out
}

pub fn encode_scalar(field: &ScalarField, order: ByteOrder) -> Vec<u8> {
    encode(&[field], order)
}

pub fn encode_vector(field: &VectorField, order: ByteOrder) -> Vec<u8> {
    let c = field.components();
    encode(&[&c[0], &c[1], &c[2]], order)
}

pub fn decode_header(bytes: &[u8]) -> Result<SnapshotHeader> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let byte_order = match bytes[12] {
        0 => ByteOrder::Little,
        1 => ByteOrder::Big,
        other => return Err(Error::Format(format!("unknown byte order tag {other}"))),
    };
    let version = get_u32(&bytes[8..], byte_order);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let representation = match bytes[13] {
        0 => Representation::Physical,
        1 => Representation::Spectral,
        other => return Err(Error::Format(format!("unknown representation tag {other}"))),
    };
    let components = bytes[14] as usize;
    if components != 1 && components != 3 {
        return Err(Error::Format(format!("component count {components}")));
    }
    let n = get_u32(&bytes[16..], byte_order) as usize;
    let box_length = get_f64(&bytes[24..], byte_order);
    let dealias_fraction = get_f64(&bytes[32..], byte_order);
    let grid = GridSpec::new(n, box_length, dealias_fraction)
        .map_err(|e| Error::Format(format!("header grid: {e}")))?;
    Ok(SnapshotHeader {
        grid,
        representation,
        components,
        byte_order,
    })
}

pub fn decode(bytes: &[u8]) -> Result<Snapshot> {
    let h = decode_header(bytes)?;
    let grid = h.grid;
    let per = match h.representation {
        Representation::Physical => grid.n.pow(3),
        Representation::Spectral => 2 * grid.n * grid.n * grid.nz(),
    };
    let expected = HEADER_LEN + 8 * per * h.components;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "payload length {} does not match header (expected {expected})",
            bytes.len()
        )));
    }
    let mut comps = Vec::with_capacity(h.components);
    for c in 0..h.components {
        let start = HEADER_LEN + 8 * per * c;
        let payload = &bytes[start..start + 8 * per];
        let values: Vec<f64> = payload.chunks_exact(8).map(|b| get_f64(b, h.byte_order)).collect();
        let field = match h.representation {
            Representation::Physical => {
                let a = Array3::from_shape_vec(grid.physical_shape(), values)
                    .map_err(|e| Error::Format(e.to_string()))?;
                ScalarField::from_physical(grid, a)?
            }
            Representation::Spectral => {
                let z: Vec<Complex64> = values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
                let a = Array3::from_shape_vec(grid.spectral_shape(), z)
                    .map_err(|e| Error::Format(e.to_string()))?;
                ScalarField::from_spectral(grid, a)?
            }
        };
        comps.push(field);
    }
    Ok(if h.components == 1 {
        Snapshot::Scalar(comps.pop().unwrap())
    } else {
        let [a, b, c]: [ScalarField; 3] = comps.try_into().unwrap();
        Snapshot::Vector(VectorField::from_components([a, b, c])?)
    })
}

pub fn write_vector(path: &Path, field: &VectorField) -> Result<()> {
    fs::write(path, encode_vector(field, ByteOrder::Little)).map_err(|e| Error::io(path, e))
}

pub fn write_scalar(path: &Path, field: &ScalarField) -> Result<()> {
    fs::write(path, encode_scalar(field, ByteOrder::Little)).map_err(|e| Error::io(path, e))
}

pub fn read(path: &Path) -> Result<Snapshot> {
    decode(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

pub fn read_vector(path: &Path) -> Result<VectorField> {
    match read(path)? {
        Snapshot::Vector(v) => Ok(v),
        Snapshot::Scalar(_) => Err(Error::Rank {
            expected: 3,
            found: 1,
        }),
    }
}

pub fn read_scalar(path: &Path) -> Result<ScalarField> {
    match read(path)? {
        Snapshot::Scalar(s) => Ok(s),
        Snapshot::Vector(_) => Err(Error::Rank {
            expected: 1,
            found: 3,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VectorField {
        let grid = GridSpec::cube(8, 2.5).unwrap();
        VectorField::from_fn(grid, |[x, y, z]| [x.sin(), y * z, (x + z).cos()])
    }

    #[test]
    fn header_layout_is_fixed() {
        let v = sample();
        let bytes = encode_vector(&v, ByteOrder::Little);
        assert_eq!(&bytes[..8], b"LCDFIELD");
        assert_eq!(&bytes[8..12], &1u32.to_le_bytes());
        assert_eq!(bytes[12..16], [0, 0, 3, 0]);
        assert_eq!(&bytes[16..20], &8u32.to_le_bytes());
        assert_eq!(&bytes[24..32], &2.5f64.to_le_bytes());
        assert_eq!(bytes.len(), HEADER_LEN + 3 * 8 * 512);
    }

    #[test]
    fn both_byte_orders_decode() {
        let v = sample();
        let s = v.forward().unwrap();
        for order in [ByteOrder::Little, ByteOrder::Big] {
            assert_eq!(decode(&encode_vector(&v, order)).unwrap(), Snapshot::Vector(v.clone()));
            assert_eq!(decode(&encode_vector(&s, order)).unwrap(), Snapshot::Vector(s.clone()));
        }
    }

    #[test]
    fn truncated_and_wrong_rank() {
        let v = sample();
        let bytes = encode_vector(&v, ByteOrder::Little);
        assert!(matches!(decode(&bytes[..bytes.len() - 8]), Err(Error::Format(_))));
        assert!(matches!(decode(&bytes[..10]), Err(Error::Format(_))));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.field");
        write_vector(&p, &v).unwrap();
        assert!(matches!(read_scalar(&p), Err(Error::Rank { .. })));
    }
}
