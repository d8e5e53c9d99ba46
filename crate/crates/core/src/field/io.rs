//! Binary field dump: `"HF2D"`, `u32 n`, `f64 h`, `f64 cx`, `f64 cy`, then
//! `n^2` complex samples as little-endian `(re, im)` f64 pairs, row-major.

use num_complex::Complex64;
use std::io::{Read, Write};

use super::{Grid, GridField, Sample};
use crate::error::{Error, Result};

pub const DUMP_MAGIC: &[u8; 4] = b"HF2D";

pub fn write_dump<T: Sample, W: Write>(f: &GridField<T>, mut w: W) -> Result<()> {
    let g = f.grid();
    let n = u32::try_from(g.n()).map_err(|_| Error::Format("grid too large".into()))?;
    w.write_all(DUMP_MAGIC)?;
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&g.h().to_le_bytes())?;
    w.write_all(&g.center()[0].to_le_bytes())?;
    w.write_all(&g.center()[1].to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * g.n());
    for row in f.samples().chunks(g.n()) {
        buf.clear();
        for v in row {
            let c = v.to_complex();
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dump<R: Read>(mut r: R) -> Result<GridField<Complex64>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    let mut f64s = [0.0; 3];
    for v in f64s.iter_mut() {
        r.read_exact(&mut b8)?;
        *v = f64::from_le_bytes(b8);
    }
    let grid = Grid::with_center(n, f64s[0], [f64s[1], f64s[2]]).map_err(|e| Error::Format(e.to_string()))?;
    let mut raw = vec![0u8; 16 * grid.len()];
    r.read_exact(&mut raw)?;
    let data = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    GridField::from_vec(grid, data)
}
