//! Binary sidecar holding full fields. The file is a sequence of frames,
//! each laid out little-endian as
//!
//! ```text
//! u64 n | f64 L | f64 t | n x (f64 re, f64 im)
//! ```

use std::io::{self, Read, Write};

use nlslab::spectral::{Field, Grid};
use num_complex::Complex64;

pub fn write_frame(mut out: impl Write, u: &Field) -> io::Result<()> {
    let g = u.grid();
    out.write_all(&(g.n() as u64).to_le_bytes())?;
    out.write_all(&g.length().to_le_bytes())?;
    out.write_all(&u.time().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * g.n());
    for z in u.samples() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    out.write_all(&buf)
}

fn read_f64(input: &mut impl Read) -> io::Result<f64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Reads every frame; a truncated trailing frame is an error.
pub fn read_frames(mut input: impl Read) -> io::Result<Vec<Field>> {
    let invalid = |e: nlslab::Error| io::Error::new(io::ErrorKind::InvalidData, e.to_string());
    let mut frames = Vec::new();
    loop {
        let mut nb = [0u8; 8];
        match input.read_exact(&mut nb) {
            Ok(()) => {}
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(frames),
            Err(e) => return Err(e),
        }
        let n = u64::from_le_bytes(nb) as usize;
        let length = read_f64(&mut input)?;
        let t = read_f64(&mut input)?;
        let grid = Grid::new(n, length).map_err(invalid)?;
        let mut raw = vec![0u8; 16 * n];
        input.read_exact(&mut raw)?;
        let samples = raw
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        frames.push(Field::new(grid, samples, t).map_err(invalid)?);
    }
}
