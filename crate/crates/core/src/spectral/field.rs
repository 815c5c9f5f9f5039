use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Complex wavefunction samples on a [`Grid`] at a fixed time.
///
/// Construction rejects non-finite samples, so every `Field` in circulation
/// is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    samples: Vec<Complex64>,
    time: f64,
}

impl Field {
    pub fn new(grid: Grid, samples: Vec<Complex64>, time: f64) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::SampleCount { expected: grid.n(), got: samples.len() });
        }
        if let Some(j) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(j));
        }
        Ok(Self { grid, samples, time })
    }

    pub fn zeros(grid: Grid, time: f64) -> Self {
        Self { grid, samples: vec![Complex64::new(0.0, 0.0); grid.n()], time }
    }

    /// Samples `f(x_j)` at every grid point.
    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.xs().into_iter().map(f).collect(), time)
    }

    /// Real profile `f(x_j)`.
    pub fn from_real_fn(grid: Grid, time: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(grid, time, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Same grid and time, new samples.
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        Self::new(self.grid, samples, self.time)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        self.with_samples(self.samples.iter().map(|&z| f(z)).collect())
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z.conj()).collect(),
            time: self.time,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|z| z * c).collect(), time: self.time }
    }

    /// Spatial reflection `u(x) -> u(-x)` on the centered grid.
    pub fn reflected(&self) -> Self {
        let n = self.grid.n();
        let samples = (0..n).map(|j| self.samples[(n - j) % n]).collect();
        Self { grid: self.grid, samples, time: self.time }
    }

    pub fn density(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus over the outer `n/32` samples on each side of the box.
    pub fn boundary_magnitude(&self) -> f64 {
        let n = self.grid.n();
        let edge = (n / 32).max(1);
        self.samples[..edge]
            .iter()
            .chain(&self.samples[n - edge..])
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Discrete `L^2` distance `(sum |u - v|^2 dx)^(1/2)`.
    pub fn l2_distance(&self, other: &Field) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: f64 = self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((s * self.grid.dx()).sqrt())
    }

    pub fn linear_combination(&self, a: Complex64, other: &Field, b: Complex64) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        self.with_samples(self.samples.iter().zip(&other.samples).map(|(x, y)| a * x + b * y).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_and_wrong_length() {
        let g = Grid::new(8, 1.0).unwrap();
        let mut s = vec![Complex64::new(1.0, 0.0); 8];
        s[3] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(Field::new(g, s, 0.0), Err(Error::NonFinite(3)));
        assert!(matches!(
            Field::new(g, vec![Complex64::new(0.0, 0.0); 7], 0.0),
            Err(Error::SampleCount { expected: 8, got: 7 })
        ));
    }

    #[test]
    fn reflection_maps_x_to_minus_x() {
        let g = Grid::new(16, 4.0).unwrap();
        let u = Field::from_real_fn(g, 0.0, |x| x).unwrap();
        let r = u.reflected();
        for j in 1..16 {
            assert!((r.samples()[j].re + g.x(j)).abs() < 1e-14);
        }
    }
}
