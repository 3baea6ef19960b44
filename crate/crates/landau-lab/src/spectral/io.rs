//! Binary field snapshots.
//!
//! Layout: a 32-byte header — magic `LLFIELD1`, `n` (u64), `L` (f64),
//! representation (u32: 0 physical, 1 spectral), component count (u32) —
//! followed by the components one after another, each in x-fastest order.
//! Physical samples are f64; spectral samples are (re, im) f64 pairs. All
//! numbers are little-endian.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{Grid, Representation, ScalarField, VectorField};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"LLFIELD1";

/// Anything that can be written as a snapshot.
pub enum Snapshot<'a> {
    Scalar(&'a ScalarField),
    Vector(&'a VectorField),
}

/// A snapshot read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Loaded {
    Scalar(ScalarField),
    Vector(VectorField),
}

pub fn write_field(path: &Path, field: Snapshot<'_>) -> Result<()> {
    let mut out = Vec::new();
    let (grid, repr, comps) = match &field {
        Snapshot::Scalar(f) => (*f.grid(), f.representation(), 1u32),
        Snapshot::Vector(v) => (*v.grid(), v.representation(), 3u32),
    };
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(grid.n() as u64).to_le_bytes());
    out.extend_from_slice(&grid.l().to_le_bytes());
    out.extend_from_slice(&(repr as u32).to_le_bytes());
    out.extend_from_slice(&comps.to_le_bytes());
    let put_real = |out: &mut Vec<u8>, v: &[f64]| v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes()));
    let put_cplx = |out: &mut Vec<u8>, v: &[Complex64]| {
        v.iter().for_each(|z| {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        })
    };
    match field {
        Snapshot::Scalar(f) => match (f.values(), f.coeffs()) {
            (Some(v), _) => put_real(&mut out, v),
            (_, Some(c)) => put_cplx(&mut out, c),
            _ => unreachable!(),
        },
        Snapshot::Vector(v) => match (v.values(), v.coeffs()) {
            (Some(x), _) => x.iter().for_each(|c| put_real(&mut out, c)),
            (_, Some(c)) => c.iter().for_each(|c| put_cplx(&mut out, c)),
            _ => unreachable!(),
        },
    }
    fs::File::create(path)?.write_all(&out)?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<Loaded> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 32 || &bytes[..8] != MAGIC {
        return Err(Error::Format(format!("{} is not a field snapshot", path.display())));
    }
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let n = u64_at(8) as usize;
    let l = f64::from_bits(u64_at(16));
    let repr = match u32_at(24) {
        0 => Representation::Physical,
        1 => Representation::Spectral,
        r => return Err(Error::Format(format!("unknown representation tag {r}"))),
    };
    let comps = u32_at(28) as usize;
    let grid = Grid::new(n, l)?;
    let per = if repr == Representation::Physical { 1 } else { 2 };
    let expect = 32 + comps * grid.len() * per * 8;
    if !(comps == 1 || comps == 3) || bytes.len() != expect {
        return Err(Error::Format(format!("bad payload: {} bytes for {comps} components", bytes.len())));
    }
    let f = |i: usize| f64::from_bits(u64_at(32 + 8 * i));
    let len = grid.len();
    let real = |c: usize| (0..len).map(|i| f(c * len + i)).collect::<Vec<_>>();
    let cplx = |c: usize| (0..len).map(|i| Complex64::new(f(2 * (c * len + i)), f(2 * (c * len + i) + 1))).collect::<Vec<_>>();
    Ok(match (comps, repr) {
        (1, Representation::Physical) => Loaded::Scalar(ScalarField::from_values(grid, real(0))?),
        (1, Representation::Spectral) => Loaded::Scalar(ScalarField::from_coeffs(grid, cplx(0))?),
        (_, Representation::Physical) => Loaded::Vector(VectorField::from_components(grid, [real(0), real(1), real(2)])?),
        (_, Representation::Spectral) => Loaded::Vector(VectorField::from_coeffs(grid, [cplx(0), cplx(1), cplx(2)])?),
    })
}
