use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic grid on `[-L/2, L/2)` with its matched frequency lattice.
///
/// Sample `j` sits at `x_j = -L/2 + j dx`. Spectral coefficients are stored
/// in FFT order, so index `k` carries the frequency `2 pi k / L` for
/// `k < n/2` and `2 pi (k - n) / L` otherwise. Index `n/2` is the single
/// Nyquist mode at `-n/2 * dxi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::GridLength(length));
        }
        Ok(Self { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Frequency spacing `2 pi / L`.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Magnitude of the Nyquist frequency, `pi / dx`.
    pub fn nyquist(&self) -> f64 {
        self.dxi() * (self.n / 2) as f64
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed lattice number of FFT index `k`, in `-n/2..n/2`.
    pub fn mode(&self, k: usize) -> i64 {
        let n = self.n as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// FFT index of the signed lattice number `m` (taken modulo `n`).
    pub fn index_of_mode(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    pub fn freq(&self, k: usize) -> f64 {
        self.mode(k) as f64 * self.dxi()
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.freq(k)).collect()
    }

    /// Lattice number of `xi` when it is an integer multiple of `dxi`.
    pub fn lattice_mode(&self, xi: f64) -> Option<i64> {
        let m = xi / self.dxi();
        let r = m.round();
        if (m - r).abs() <= 1e-9 * m.abs().max(1.0) {
            Some(r as i64)
        } else {
            None
        }
    }

    /// Same sample count on a domain `factor` times longer.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.n, self.length * factor)
    }
}
