//! Discrete Fourier transform on a [`Grid`].
//!
//! Normalization: the forward transform carries no prefactor and the inverse
//! carries `1/n`. With this convention `dx * u_hat[k]` approximates the
//! continuous transform at `xi_k` (up to the phase of the box offset), and
//!
//! ```text
//! sum_j |u_j|^2 dx = sum_k |dx u_hat_k|^2 dxi / (2 pi)
//! ```
//!
//! Plans are cached per thread, so the free functions here are cheap to call
//! repeatedly and safe to call from any thread.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::Field;
use super::grid::Grid;
use crate::error::Result;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(n)
        } else {
            p.plan_fft_inverse(n)
        }
    })
}

/// Unnormalized forward DFT in place.
pub fn fft_in_place(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// Inverse DFT in place, including the `1/n` factor.
pub fn ifft_in_place(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
    let s = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|z| *z *= s);
}

/// Spectral coefficients of a field in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    time: f64,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Grid, time: f64, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.n(), "spectrum length must match the grid");
        Self { grid, time, coeffs }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// `|u_hat_k|^2 dx / n`, the mass carried by each mode.
    pub fn mode_masses(&self) -> Vec<f64> {
        let w = self.grid.dx() / self.grid.n() as f64;
        self.coeffs.iter().map(|c| c.norm_sqr() * w).collect()
    }

    /// Frequency-side Parseval sum `sum |dx u_hat|^2 dxi / 2 pi`.
    pub fn parseval_mass(&self) -> f64 {
        let dx = self.grid.dx();
        let dxi = self.grid.dxi();
        self.coeffs.iter().map(|c| (c * dx).norm_sqr()).sum::<f64>() * dxi / (2.0 * PI)
    }

    pub fn multiply(&mut self, symbol: &[f64]) {
        for (c, m) in self.coeffs.iter_mut().zip(symbol) {
            *c *= m;
        }
    }

    pub fn into_field(self) -> Result<Field> {
        let mut buf = self.coeffs;
        ifft_in_place(&mut buf);
        Field::new(self.grid, buf, self.time)
    }
}

pub fn forward_transform(f: &Field) -> Spectrum {
    let mut buf = f.samples().to_vec();
    fft_in_place(&mut buf);
    Spectrum::new(*f.grid(), f.time(), buf)
}

pub fn inverse_transform(s: &Spectrum) -> Result<Field> {
    s.clone().into_field()
}

/// Symbol of the first derivative, `i xi_k`, with the Nyquist mode zeroed so
/// that real fields have real derivatives.
pub fn derivative_symbol(grid: &Grid) -> Vec<f64> {
    let nyq = grid.nyquist_index();
    (0..grid.n()).map(|k| if k == nyq { 0.0 } else { grid.freq(k) }).collect()
}

/// Spectral derivative samples of `(d/dx - i shift) u`.
pub fn shifted_derivative(f: &Field, shift: f64) -> Vec<Complex64> {
    let symbol = derivative_symbol(f.grid());
    let mut s = forward_transform(f);
    for (c, xi) in s.coeffs_mut().iter_mut().zip(&symbol) {
        *c *= Complex64::new(0.0, xi - shift);
    }
    let mut buf = s.coeffs;
    ifft_in_place(&mut buf);
    buf
}

pub fn derivative(f: &Field) -> Vec<Complex64> {
    shifted_derivative(f, 0.0)
}

/// Multiplies the spectrum of `f` by a real symbol and transforms back.
pub fn apply_symbol(f: &Field, symbol: &[f64]) -> Result<Field> {
    let mut s = forward_transform(f);
    s.multiply(symbol);
    s.into_field()
}
