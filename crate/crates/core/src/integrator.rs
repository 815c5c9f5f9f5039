//! Time integration of `i u_t + u_xx = mu |u|^4 u` by symmetric (Strang)
//! splitting, plus a Duhamel-formula validator for finished trajectories.
//!
//! One step is a half free step, the exact nonlinear phase rotation
//! `u -> u exp(-i mu |u|^4 dt)` and another half free step. Both substeps are
//! unitary, so mass is conserved to roundoff unless the optional 2/3-rule
//! dealiasing removes content.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::quadrature::trapezoid;
use crate::spectral::fourier::{derivative_symbol, fft_in_place, ifft_in_place};
use crate::spectral::propagator::free_symbol;
use crate::spectral::{Field, Grid};

/// Sign of the quintic term. `Linear` switches the nonlinearity off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nonlinearity {
    Defocusing,
    Focusing,
    Linear,
}

impl Nonlinearity {
    pub fn mu(self) -> f64 {
        match self {
            Self::Defocusing => 1.0,
            Self::Focusing => -1.0,
            Self::Linear => 0.0,
        }
    }

    pub fn from_mu(mu: i64) -> Result<Self> {
        match mu {
            1 => Ok(Self::Defocusing),
            -1 => Ok(Self::Focusing),
            _ => Err(Error::Config(format!("mu must be +1 or -1, got {mu}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub nonlinearity: Nonlinearity,
    pub dt: f64,
    pub t_end: f64,
    /// Save a frame every this many steps (the final time is always saved).
    pub save_every: usize,
    /// 2/3-rule truncation after the nonlinear substep; the linear flow has
    /// no nonlinear substep and ignores it.
    pub dealias: bool,
    /// Stop once `||u_x||_2` exceeds this multiple of its initial value.
    pub blowup_guard: f64,
    /// Galerkin truncation: modes with `|xi|` above this are zeroed each step.
    pub spectral_cutoff: Option<f64>,
}

impl IntegratorConfig {
    pub fn new(nonlinearity: Nonlinearity, dt: f64, t_end: f64) -> Self {
        Self { nonlinearity, dt, t_end, save_every: 10, dealias: true, blowup_guard: 10.0, spectral_cutoff: None }
    }

    pub fn with_save_every(mut self, save_every: usize) -> Self {
        self.save_every = save_every;
        self
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn with_blowup_guard(mut self, guard: f64) -> Self {
        self.blowup_guard = guard;
        self
    }

    pub fn with_spectral_cutoff(mut self, cutoff: Option<f64>) -> Self {
        self.spectral_cutoff = cutoff;
        self
    }

    /// Combined mask of dealiasing and the spectral cutoff, if any applies.
    pub fn truncation_mask(&self, grid: &Grid) -> Option<Vec<f64>> {
        let dealias = self.dealias && self.nonlinearity != Nonlinearity::Linear;
        let mut mask = dealias.then(|| dealias_mask(grid));
        if let Some(c) = self.spectral_cutoff {
            let m = mask.get_or_insert_with(|| vec![1.0; grid.n()]);
            for (k, v) in m.iter_mut().enumerate() {
                if grid.freq(k).abs() > c {
                    *v = 0.0;
                }
            }
        }
        mask
    }

    /// Number of fixed steps needed to reach `t_end`.
    pub fn steps(&self) -> Result<usize> {
        self.validate()?;
        let s = self.t_end / self.dt;
        let r = s.round();
        if (s - r).abs() > 1e-6 * r.max(1.0) {
            return Err(Error::Config(format!("t_end = {} is not a whole number of steps of dt = {}", self.t_end, self.dt)));
        }
        Ok(r as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.save_every == 0 {
            return Err(Error::Config("save_every must be at least 1".into()));
        }
        if !(self.blowup_guard > 1.0) {
            return Err(Error::Config(format!("blowup_guard must exceed 1, got {}", self.blowup_guard)));
        }
        if let Some(c) = self.spectral_cutoff {
            if !(c > 0.0) {
                return Err(Error::Config(format!("spectral cutoff must be positive, got {c}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    BlowupGuardTripped,
    NumericalFailure,
}

/// Saved frames of one run, in increasing time, all on one grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    frames: Vec<Field>,
    status: Termination,
    config: IntegratorConfig,
}

impl Trajectory {
    pub fn new(frames: Vec<Field>, status: Termination, config: IntegratorConfig) -> Result<Self> {
        let first = frames.first().ok_or_else(|| Error::InsufficientFrames("empty trajectory".into()))?;
        if frames.iter().any(|f| f.grid() != first.grid()) {
            return Err(Error::GridMismatch);
        }
        if frames.windows(2).any(|w| w[1].time() <= w[0].time()) {
            return Err(Error::InsufficientFrames("frame times must increase strictly".into()));
        }
        Ok(Self { frames, status, config })
    }

    pub fn frames(&self) -> &[Field] {
        &self.frames
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(Field::time).collect()
    }

    pub fn status(&self) -> Termination {
        self.status
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.config
    }

    pub fn grid(&self) -> &Grid {
        self.frames[0].grid()
    }

    pub fn first(&self) -> &Field {
        &self.frames[0]
    }

    pub fn last(&self) -> &Field {
        self.frames.last().expect("trajectory is never empty")
    }

    pub fn frame_index(&self, t: f64) -> Result<usize> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.frames.iter().position(|f| (f.time() - t).abs() <= tol).ok_or(Error::UnsavedTime(t))
    }

    pub fn frame_at(&self, t: f64) -> Result<&Field> {
        Ok(&self.frames[self.frame_index(t)?])
    }
}

/// 2/3-rule mask: keeps lattice modes with `|m| <= n/3`.
pub fn dealias_mask(grid: &Grid) -> Vec<f64> {
    let cut = (grid.n() / 3) as i64;
    (0..grid.n()).map(|k| if grid.mode(k).abs() <= cut && k != grid.nyquist_index() { 1.0 } else { 0.0 }).collect()
}

/// Reusable buffers and plans for repeated split steps on one grid.
pub struct SplitStepper {
    grid: Grid,
    mu_dt: f64,
    half: Vec<Complex64>,
    half_masked: Vec<Complex64>,
    deriv_sq: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl SplitStepper {
    pub fn new(grid: Grid, nonlinearity: Nonlinearity, dt: f64, dealias: bool) -> Self {
        let dealias = dealias && nonlinearity != Nonlinearity::Linear;
        Self::with_mask(grid, nonlinearity, dt, dealias.then(|| dealias_mask(&grid)))
    }

    /// Stepper whose second half step also multiplies by `mask`.
    pub fn with_mask(grid: Grid, nonlinearity: Nonlinearity, dt: f64, mask: Option<Vec<f64>>) -> Self {
        let half = free_symbol(&grid, 0.5 * dt);
        let half_masked = match mask {
            Some(m) => half.iter().zip(m).map(|(h, m)| h * m).collect(),
            None => half.clone(),
        };
        let deriv_sq = derivative_symbol(&grid).iter().map(|x| x * x).collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n());
        let inverse = planner.plan_fft_inverse(grid.n());
        let scratch = vec![Complex64::new(0.0, 0.0); forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len())];
        Self { grid, mu_dt: nonlinearity.mu() * dt, half, half_masked, deriv_sq, forward, inverse, scratch }
    }

    fn inverse_normalized(&mut self, buf: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
        let s = 1.0 / self.grid.n() as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }

    /// Advances `buf` by one step in place and returns `||u_x||_2^2` of the
    /// new state, read off the final spectrum.
    pub fn step(&mut self, buf: &mut [Complex64]) -> f64 {
        self.forward.process_with_scratch(buf, &mut self.scratch);
        buf.iter_mut().zip(&self.half).for_each(|(c, h)| *c *= h);
        self.inverse_normalized(buf);
        if self.mu_dt != 0.0 {
            let mu_dt = self.mu_dt;
            buf.iter_mut().for_each(|z| {
                let r2 = z.norm_sqr();
                *z *= Complex64::from_polar(1.0, -mu_dt * r2 * r2);
            });
        }
        self.forward.process_with_scratch(buf, &mut self.scratch);
        buf.iter_mut().zip(&self.half_masked).for_each(|(c, h)| *c *= h);
        let w = self.grid.dx() / (self.grid.n() as f64 * self.grid.n() as f64);
        let h1_sq = buf.iter().zip(&self.deriv_sq).map(|(c, s)| c.norm_sqr() * s).sum::<f64>() * w;
        self.inverse_normalized(buf);
        h1_sq
    }
}

/// One Strang step of size `dt` from `u`.
pub fn strang_step(u: &Field, dt: f64, nonlinearity: Nonlinearity, dealias: bool) -> Result<Field> {
    let mut stepper = SplitStepper::new(*u.grid(), nonlinearity, dt, dealias);
    let mut buf = u.samples().to_vec();
    stepper.step(&mut buf);
    Field::new(*u.grid(), buf, u.time() + dt)
}

fn h1_sq(u: &Field) -> f64 {
    let mut buf = u.samples().to_vec();
    fft_in_place(&mut buf);
    let sym = derivative_symbol(u.grid());
    let n = u.grid().n() as f64;
    buf.iter().zip(sym).map(|(c, s)| c.norm_sqr() * s * s).sum::<f64>() * u.grid().dx() / (n * n)
}

/// Runs the integrator, handing every saved frame to `on_frame` as soon as it
/// is produced. Returns how the run ended.
pub fn solve_streaming(u0: &Field, cfg: &IntegratorConfig, mut on_frame: impl FnMut(&Field)) -> Result<Termination> {
    let steps = cfg.steps()?;
    let grid = *u0.grid();
    let t0 = u0.time();
    let mut stepper = SplitStepper::with_mask(grid, cfg.nonlinearity, cfg.dt, cfg.truncation_mask(&grid));
    let threshold = cfg.blowup_guard * cfg.blowup_guard * h1_sq(u0);
    on_frame(u0);
    let mut buf = u0.samples().to_vec();
    for k in 1..=steps {
        let h1 = stepper.step(&mut buf);
        let t = t0 + k as f64 * cfg.dt;
        if !h1.is_finite() || buf.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Ok(Termination::NumericalFailure);
        }
        let tripped = threshold > 0.0 && h1 > threshold;
        if k % cfg.save_every == 0 || k == steps || tripped {
            on_frame(&Field::new(grid, buf.clone(), t)?);
        }
        if tripped {
            return Ok(Termination::BlowupGuardTripped);
        }
    }
    Ok(Termination::Completed)
}

pub fn solve(u0: &Field, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let mut frames = Vec::new();
    let status = solve_streaming(u0, cfg, |f| frames.push(f.clone()))?;
    Trajectory::new(frames, status, cfg.clone())
}

/// `mu |u|^4 u`.
pub fn nonlinear_term(u: &Field, nonlinearity: Nonlinearity) -> Vec<Complex64> {
    let mu = nonlinearity.mu();
    u.samples().iter().map(|z| z * (mu * z.norm_sqr() * z.norm_sqr())).collect()
}

/// `L^2` norm of the Duhamel defect
/// `u(t) - e^{i(t-t0)D} u(t0) + i int_{t0}^{t} e^{i(t-s)D} F(u(s)) ds`,
/// with the time integral taken by the trapezoid rule over saved frames.
pub fn duhamel_residual(traj: &Trajectory, t0: f64, t: f64) -> Result<f64> {
    let i0 = traj.frame_index(t0)?;
    let i1 = traj.frame_index(t)?;
    if i1 < i0 {
        return Err(Error::Parameter(format!("duhamel window must run forward, got [{t0}, {t}]")));
    }
    if i1 == i0 {
        return Ok(0.0);
    }
    let grid = *traj.grid();
    let frames = &traj.frames()[i0..=i1];
    let tt = frames.last().unwrap().time();
    let nl = traj.config().nonlinearity;

    let mut total = frames.last().unwrap().samples().to_vec();
    fft_in_place(&mut total);
    let mut start = frames[0].samples().to_vec();
    fft_in_place(&mut start);
    let sym = free_symbol(&grid, tt - frames[0].time());
    for ((r, s), p) in total.iter_mut().zip(&start).zip(&sym) {
        *r -= s * p;
    }

    if nl != Nonlinearity::Linear {
        let times: Vec<f64> = frames.iter().map(Field::time).collect();
        let mut weights = vec![0.0; frames.len()];
        for j in 0..frames.len() - 1 {
            let h = 0.5 * (times[j + 1] - times[j]);
            weights[j] += h;
            weights[j + 1] += h;
        }
        debug_assert!((trapezoid(&times, &vec![1.0; times.len()]) - weights.iter().sum::<f64>()).abs() < 1e-9);
        let i = Complex64::new(0.0, 1.0);
        for (f, (&tau, &w)) in frames.iter().zip(times.iter().zip(&weights)) {
            let mut fhat = nonlinear_term(f, nl);
            fft_in_place(&mut fhat);
            let p = free_symbol(&grid, tt - tau);
            for ((r, fh), ph) in total.iter_mut().zip(&fhat).zip(&p) {
                *r += i * w * fh * ph;
            }
        }
    }
    ifft_in_place(&mut total);
    let s: f64 = total.iter().map(Complex64::norm_sqr).sum();
    Ok((s * grid.dx()).sqrt())
}
