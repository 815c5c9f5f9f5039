//! Scaling and Galilean symmetries.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::integrator::{solve, Trajectory};
use crate::spectral::fourier::{fft_in_place, ifft_in_place};
use crate::spectral::{Field, Grid};

/// Mass-critical dilation `u -> lambda^{-1/2} u(x / lambda)` by a power of two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingMap {
    lambda: f64,
}

impl ScalingMap {
    pub fn new(lambda: f64) -> Result<Self> {
        let e = lambda.log2();
        if !(lambda > 0.0) || e.fract() != 0.0 {
            return Err(Error::ScaleFactor(lambda));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Galilean boost by a lattice frequency `xi0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GalileanBoost {
    xi0: f64,
}

impl GalileanBoost {
    pub fn new(xi0: f64) -> Self {
        Self { xi0 }
    }

    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    fn mode(&self, grid: &Grid) -> Result<i64> {
        grid.lattice_mode(self.xi0).ok_or(Error::OffLattice(self.xi0))
    }
}

/// The rescaled field lives on `Grid(n, lambda L)` with identical sample
/// indices, so the map is exact up to the `lambda^{-1/2}` multiplication.
/// Time is rescaled as `t -> lambda^2 t`.
pub fn apply_scaling(u: &Field, s: ScalingMap) -> Result<Field> {
    let grid = u.grid().rescaled(s.lambda)?;
    let c = s.lambda.powf(-0.5);
    Field::new(grid, u.samples().iter().map(|z| z * c).collect(), u.time() * s.lambda * s.lambda)
}

/// `e^{i x_j xi0}` evaluated from integer phases, so boosts compose exactly
/// up to a single rounding per sample.
fn modulation(grid: &Grid, m: i64) -> Vec<Complex64> {
    let n = grid.n() as i64;
    (0..n)
        .map(|j| {
            // x_j xi0 = (-L/2 + j dx) m dxi = -pi m + 2 pi j m / n
            let frac = (j * m).rem_euclid(n) as f64 / n as f64;
            let half_turn = if m.rem_euclid(2) == 1 { PI } else { 0.0 };
            Complex64::from_polar(1.0, 2.0 * PI * frac + half_turn)
        })
        .collect()
}

/// Pointwise multiplication by `e^{i x xi0}`.
pub fn apply_boost(u: &Field, b: GalileanBoost) -> Result<Field> {
    let m = b.mode(u.grid())?;
    if m == 0 {
        return Ok(u.clone());
    }
    let phase = modulation(u.grid(), m);
    u.with_samples(u.samples().iter().zip(phase).map(|(z, p)| z * p).collect())
}

/// Periodic translation `u(x) -> u(x - shift)` by a spectral phase ramp.
pub fn translate(u: &Field, shift: f64) -> Result<Field> {
    if shift == 0.0 {
        return Ok(u.clone());
    }
    let grid = u.grid();
    let mut buf = u.samples().to_vec();
    fft_in_place(&mut buf);
    let nyq = grid.nyquist_index();
    for (k, c) in buf.iter_mut().enumerate() {
        if k == nyq {
            // real-valued treatment of the unpaired mode
            *c *= (grid.freq(k) * shift).cos();
        } else {
            *c *= Complex64::from_polar(1.0, -grid.freq(k) * shift);
        }
    }
    ifft_in_place(&mut buf);
    u.with_samples(buf)
}

/// Solution-level boost at time `t`:
/// `v(t, x) = e^{-i t xi0^2} e^{i x xi0} u(t, x - 2 xi0 t)`.
pub fn galilean_transform(u: &Field, b: GalileanBoost) -> Result<Field> {
    let t = u.time();
    let shifted = translate(u, 2.0 * b.xi0 * t)?;
    let boosted = apply_boost(&shifted, b)?;
    let phase = Complex64::from_polar(1.0, -t * b.xi0 * b.xi0);
    boosted.map(|z| z * phase)
}

/// Largest `L^2` gap, over saved times, between boosting the data and then
/// solving, and solving and then boosting the solution. The trajectory's own
/// integrator settings are reused for the boosted run.
pub fn boost_trajectory_check(traj: &Trajectory, b: GalileanBoost) -> Result<f64> {
    if b.xi0 == 0.0 {
        return Ok(0.0);
    }
    let v0 = apply_boost(traj.first(), b)?;
    let boosted = solve(&v0, traj.config())?;
    if boosted.grid() != traj.grid() {
        return Err(Error::GridMismatch);
    }
    let mut worst: f64 = 0.0;
    for v in boosted.frames() {
        let u = traj.frame_at(v.time())?;
        let w = galilean_transform(u, b)?;
        worst = worst.max(v.l2_distance(&w)?);
    }
    Ok(worst)
}
