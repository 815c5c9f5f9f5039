use num_complex::Complex64;

use super::field::Field;
use super::fourier::{fft_in_place, ifft_in_place};
use super::grid::Grid;
use crate::error::Result;

/// Symbol `e^{-i t xi^2}` of the free group `e^{i t d_xx}`.
pub fn free_symbol(grid: &Grid, t: f64) -> Vec<Complex64> {
    (0..grid.n())
        .map(|k| {
            let xi = grid.freq(k);
            Complex64::from_polar(1.0, -t * xi * xi)
        })
        .collect()
}

/// Exact free Schrodinger evolution by `t`; the result is stamped at
/// `f.time() + t`.
pub fn free_propagate(f: &Field, t: f64) -> Result<Field> {
    if t == 0.0 {
        return Ok(f.clone());
    }
    let symbol = free_symbol(f.grid(), t);
    let mut buf = f.samples().to_vec();
    fft_in_place(&mut buf);
    buf.iter_mut().zip(&symbol).for_each(|(c, s)| *c *= s);
    ifft_in_place(&mut buf);
    Ok(Field::new(*f.grid(), buf, f.time() + t)?)
}
