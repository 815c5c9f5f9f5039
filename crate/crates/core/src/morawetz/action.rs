//! Fast evaluation of two-point forms `int int a(x - y) f(y) g(x) dx dy`.
//!
//! The pair sum is taken over the box without periodic wrap-around. The kernel
//! is split into a constant, a multiple of `sign(x - y)` and an integrable odd
//! remainder: the sign part is a prefix-sum difference and the remainder a
//! zero-padded FFT convolution, giving `O(n log n)` in total.

use num_complex::Complex64;

use super::kernel::{MorawetzKernel, HALF_SQRT_PI};
use crate::spectral::fourier::{fft_in_place, ifft_in_place, shifted_derivative};
use crate::spectral::{Field, Grid};

/// Precomputed kernel spectrum for one grid.
#[derive(Debug, Clone)]
pub struct KernelConvolver {
    grid: Grid,
    kernel: MorawetzKernel,
    decay_hat: Option<Vec<Complex64>>,
}

impl KernelConvolver {
    pub fn new(grid: Grid, kernel: MorawetzKernel) -> Self {
        let n = grid.n();
        let dx = grid.dx();
        let decay_hat = match kernel.profile {
            super::kernel::KernelProfile::Sign => None,
            _ => {
                let mut k = vec![Complex64::new(0.0, 0.0); 2 * n];
                for m in 1..n {
                    k[m] = Complex64::new(kernel.decay(m as f64 * dx), 0.0);
                    k[2 * n - m] = Complex64::new(kernel.decay(-(m as f64) * dx), 0.0);
                }
                fft_in_place(&mut k);
                Some(k)
            }
        };
        Self { grid, kernel, decay_hat }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kernel(&self) -> &MorawetzKernel {
        &self.kernel
    }

    /// `sum_j a(x_i - x_j) f_j dx` for every `i`.
    pub fn potential(&self, f: &[f64]) -> Vec<f64> {
        let n = self.grid.n();
        let dx = self.grid.dx();
        let total: f64 = f.iter().sum();
        let mut out = vec![0.0; n];
        let mut below = 0.0;
        for i in 0..n {
            let above = total - below - f[i];
            out[i] = self.kernel.offset() * total + HALF_SQRT_PI * (below - above);
            below += f[i];
        }
        if let Some(kh) = &self.decay_hat {
            let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            buf.resize(2 * n, Complex64::new(0.0, 0.0));
            fft_in_place(&mut buf);
            buf.iter_mut().zip(kh).for_each(|(b, k)| *b *= k);
            ifft_in_place(&mut buf);
            out.iter_mut().zip(&buf).for_each(|(o, b)| *o += b.re);
        }
        out.iter_mut().for_each(|o| *o *= dx);
        out
    }

    /// `int int a(x - y) f(y) g(x) dx dy`.
    pub fn bilinear(&self, f: &[f64], g: &[f64]) -> f64 {
        let pot = self.potential(f);
        pot.iter().zip(g).map(|(p, v)| p * v).sum::<f64>() * self.grid.dx()
    }
}

/// Momentum density `Im[conj(u) (d/dx - i shift) u]`.
pub fn momentum_density(u: &Field, shift: f64) -> Vec<f64> {
    let du = shifted_derivative(u, shift);
    u.samples().iter().zip(du).map(|(z, d)| (z.conj() * d).im).collect()
}

/// `1/2 int int a(x - y) |u(y)|^2 Im[conj(u) (d/dx - i shift) u](x) dx dy`.
pub fn action_with(conv: &KernelConvolver, u: &Field, xi_shift: f64) -> f64 {
    0.5 * conv.bilinear(&u.density(), &momentum_density(u, xi_shift))
}

pub fn interaction_action(u: &Field, k: &MorawetzKernel, xi_shift: f64) -> f64 {
    action_with(&KernelConvolver::new(*u.grid(), *k), u, xi_shift)
}
