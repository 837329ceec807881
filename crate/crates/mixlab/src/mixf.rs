//! MIXF binary field dumps: magic "MIXF", version u16, dim u16,
//! points_per_axis u32, period f64, then row-major f64 values, all
//! little-endian.

use std::fs;
use std::io::{self, Read};
use std::path::Path;

use mixcore::{ScalarField, TorusGrid};

pub const MAGIC: [u8; 4] = *b"MIXF";
pub const VERSION: u16 = 1;

pub fn write_field(path: &Path, field: &ScalarField) -> io::Result<()> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(4 + 2 + 2 + 4 + 8 + 8 * grid.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u16).to_le_bytes());
    out.extend_from_slice(&(grid.points_per_axis() as u32).to_le_bytes());
    out.extend_from_slice(&grid.period().to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, out)
}

pub fn read_field(path: &Path) -> io::Result<ScalarField> {
    let mut file = fs::File::open(path)?;
    let mut header = [0u8; 20];
    file.read_exact(&mut header)?;
    if header[0..4] != MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "bad magic, not a MIXF file"));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != VERSION {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unsupported MIXF version {version}"),
        ));
    }
    let dim = u16::from_le_bytes([header[6], header[7]]) as usize;
    let n = u32::from_le_bytes([header[8], header[9], header[10], header[11]]) as usize;
    let period = f64::from_le_bytes(header[12..20].try_into().unwrap());
    let grid = TorusGrid::new(dim, n, period)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    let mut raw = Vec::new();
    file.read_to_end(&mut raw)?;
    if raw.len() != 8 * grid.len() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("expected {} values, found {} bytes", grid.len(), raw.len()),
        ));
    }
    let values: Vec<f64> = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScalarField::from_values(grid, values)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))
}

/// Appends `.mixf` round-trip support to experiments that dump checkpoints.
pub fn dump_checkpoints(
    dir: &Path,
    stem: &str,
    times: &[f64],
    states: &[ScalarField],
) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (i, (t, f)) in times.iter().zip(states.iter()).enumerate() {
        let path = dir.join(format!("{stem}_{i:04}_t{t:.6}.mixf"));
        write_field(&path, f)?;
    }
    Ok(())
}
