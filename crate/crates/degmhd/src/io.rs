//! Flat binary field container and CSV export.
//!
//! Layout: an 8-byte magic, grid dimensions and extents as little-endian
//! 8-byte values, then each component as a row-major (`r` slow, `z` fast)
//! array of little-endian f64.

use crate::field::{AxiVectorField, ScalarField};
use crate::grid::RZGrid;
use ndarray::Array2;
use std::io::{self, Read, Write};
use thiserror::Error;

const MAGIC: &[u8; 8] = b"AXIFLD01";

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic (not an axisymmetric field container)")]
    BadMagic,
    #[error("container holds {found} components, expected {expected}")]
    ComponentCount { expected: u64, found: u64 },
    #[error("grid parameters in container are invalid")]
    BadGrid,
}

fn write_f64<W: Write>(w: &mut W, v: f64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn write_header<W: Write>(w: &mut W, grid: &RZGrid, n_comp: u64) -> io::Result<()> {
    w.write_all(MAGIC)?;
    write_u64(w, grid.n_r() as u64)?;
    write_u64(w, grid.n_z as u64)?;
    write_u64(w, n_comp)?;
    write_f64(w, grid.r.r_max)?;
    write_f64(w, grid.z_max)?;
    Ok(())
}

fn read_header<R: Read>(r: &mut R) -> Result<(RZGrid, u64), ContainerError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    let n_r = read_u64(r)? as usize;
    let n_z = read_u64(r)? as usize;
    let n_comp = read_u64(r)?;
    let r_max = read_f64(r)?;
    let z_max = read_f64(r)?;
    let grid = RZGrid::new(r_max, n_r, z_max, n_z).map_err(|_| ContainerError::BadGrid)?;
    Ok((grid, n_comp))
}

fn write_component<W: Write>(w: &mut W, data: &Array2<f64>) -> io::Result<()> {
    for row in data.rows() {
        for &v in row {
            write_f64(w, v)?;
        }
    }
    Ok(())
}

fn read_component<R: Read>(r: &mut R, grid: &RZGrid) -> io::Result<Array2<f64>> {
    let mut data = Array2::zeros((grid.n_r(), grid.n_z));
    for j in 0..grid.n_r() {
        for k in 0..grid.n_z {
            data[[j, k]] = read_f64(r)?;
        }
    }
    Ok(data)
}

pub fn write_scalar<W: Write>(w: &mut W, f: &ScalarField) -> Result<(), ContainerError> {
    write_header(w, &f.grid, 1)?;
    write_component(w, &f.data)?;
    Ok(())
}

pub fn read_scalar<R: Read>(r: &mut R) -> Result<ScalarField, ContainerError> {
    let (grid, n_comp) = read_header(r)?;
    if n_comp != 1 {
        return Err(ContainerError::ComponentCount { expected: 1, found: n_comp });
    }
    let data = read_component(r, &grid)?;
    Ok(ScalarField { grid, data })
}

pub fn write_vector<W: Write>(w: &mut W, f: &AxiVectorField) -> Result<(), ContainerError> {
    write_header(w, &f.grid, 3)?;
    write_component(w, &f.r)?;
    write_component(w, &f.theta)?;
    write_component(w, &f.z)?;
    Ok(())
}

pub fn read_vector<R: Read>(r: &mut R) -> Result<AxiVectorField, ContainerError> {
    let (grid, n_comp) = read_header(r)?;
    if n_comp != 3 {
        return Err(ContainerError::ComponentCount { expected: 3, found: n_comp });
    }
    let rr = read_component(r, &grid)?;
    let th = read_component(r, &grid)?;
    let zz = read_component(r, &grid)?;
    Ok(AxiVectorField { grid, r: rr, theta: th, z: zz })
}

/// CSV export `(r, z, value)` for plotting.
pub fn scalar_to_csv<W: Write>(w: &mut W, f: &ScalarField) -> io::Result<()> {
    writeln!(w, "r,z,value")?;
    for j in 0..f.grid.n_r() {
        for k in 0..f.grid.n_z {
            writeln!(w, "{},{},{}", f.grid.r(j), f.grid.z(k), f.data[[j, k]])?;
        }
    }
    Ok(())
}

/// Write a generic numeric table with a header row.
pub fn write_csv_table<W: Write>(w: &mut W, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_round_trip_is_bit_exact() {
        let g = RZGrid::new(1.3, 11, 0.8, 7).unwrap();
        let f = ScalarField::from_fn(&g, |r, z| (r * 17.0).sin() * z + 1.0 / 3.0);
        let mut buf = Vec::new();
        write_scalar(&mut buf, &f).unwrap();
        let back = read_scalar(&mut buf.as_slice()).unwrap();
        assert_eq!(back.grid, g);
        assert_eq!(back.data, f.data);
    }

    #[test]
    fn vector_round_trip_is_bit_exact() {
        let g = RZGrid::new(2.0, 5, 1.0, 5).unwrap();
        let f = AxiVectorField::from_fns(&g, |r, z| r * z, |r, _| r, |_, z| z * z);
        let mut buf = Vec::new();
        write_vector(&mut buf, &f).unwrap();
        let back = read_vector(&mut buf.as_slice()).unwrap();
        assert_eq!(back.r, f.r);
        assert_eq!(back.theta, f.theta);
        assert_eq!(back.z, f.z);
    }

    #[test]
    fn component_count_mismatch_detected() {
        let g = RZGrid::new(1.0, 4, 1.0, 4).unwrap();
        let f = ScalarField::zeros(&g);
        let mut buf = Vec::new();
        write_scalar(&mut buf, &f).unwrap();
        assert!(matches!(
            read_vector(&mut buf.as_slice()),
            Err(ContainerError::ComponentCount { expected: 3, found: 1 })
        ));
    }

    #[test]
    fn bad_magic_detected() {
        let buf = vec![0u8; 64];
        assert!(matches!(read_scalar(&mut buf.as_slice()), Err(ContainerError::BadMagic)));
    }
}
