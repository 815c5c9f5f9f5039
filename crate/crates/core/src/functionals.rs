//! Scalar functionals of fields and trajectories: conserved quantities,
//! Sobolev and Lebesgue norms, and space-time Strichartz-type norms.

use crate::error::{Error, Result};
use crate::integrator::{Nonlinearity, Trajectory};
use crate::quadrature::{cumulative_trapezoid, interpolate, trapezoid_between};
use crate::spectral::fourier::{derivative_symbol, forward_transform};
use crate::spectral::Field;

/// `sum |u|^2 dx`.
pub fn mass(u: &Field) -> f64 {
    u.samples().iter().map(|z| z.norm_sqr()).sum::<f64>() * u.grid().dx()
}

/// Per-mode weights `|u_hat_k|^2 dx / n`, paired with the derivative symbol.
fn spectral_density(u: &Field) -> (Vec<f64>, Vec<f64>) {
    let s = forward_transform(u);
    (s.mode_masses(), derivative_symbol(u.grid()))
}

/// `1/2 ||u_x||^2 + mu/6 ||u||_6^6`, derivative taken spectrally.
pub fn energy(u: &Field, nonlinearity: Nonlinearity) -> f64 {
    let kinetic = 0.5 * h_s_norm(u, 1, 0.0).powi(2);
    kinetic + nonlinearity.mu() / 6.0 * lebesgue_norm_pow(u, 6.0)
}

/// `Im sum conj(u) u_x dx`.
pub fn momentum(u: &Field) -> f64 {
    let (w, xi) = spectral_density(u);
    w.iter().zip(xi).map(|(a, b)| a * b).sum()
}

/// Homogeneous `H^s` norm of `e^{-i x c} u`, i.e. `||(d/dx - i c)^s u||_2`.
pub fn h_s_norm(u: &Field, s: u32, recenter: f64) -> f64 {
    let (w, xi) = spectral_density(u);
    w.iter().zip(xi).map(|(a, b)| a * (b - recenter).abs().powi(2 * s as i32)).sum::<f64>().sqrt()
}

/// `sum |u|^q dx` for finite `q`.
pub fn lebesgue_norm_pow(u: &Field, q: f64) -> f64 {
    let dx = u.grid().dx();
    if q == 2.0 {
        return mass(u);
    }
    u.samples().iter().map(|z| z.norm_sqr().powf(0.5 * q)).sum::<f64>() * dx
}

/// `||u||_{L^q}`; `q = inf` is the grid maximum.
pub fn lebesgue_norm(u: &Field, q: f64) -> f64 {
    if q.is_infinite() {
        u.max_abs()
    } else {
        lebesgue_norm_pow(u, q).powf(1.0 / q)
    }
}

/// Mixed `L^p_t L^q_x` norm over `[t1, t2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeNorm {
    pub p: f64,
    pub q: f64,
    pub t1: f64,
    pub t2: f64,
}

impl SpaceTimeNorm {
    pub fn new(p: f64, q: f64, t1: f64, t2: f64) -> Result<Self> {
        for (name, e) in [("p", p), ("q", q)] {
            if !(e >= 1.0) {
                return Err(Error::Exponent(format!("{name} must lie in [1, inf], got {e}")));
            }
        }
        if !(t2 >= t1) {
            return Err(Error::Parameter(format!("interval [{t1}, {t2}] is reversed")));
        }
        Ok(Self { p, q, t1, t2 })
    }
}

/// Space-time norm of a sequence of frames sorted by time. The integrand
/// `||u(t)||_q^p` is interpolated linearly between frames, so the value is
/// monotone under inclusion of intervals.
pub fn spacetime_norm_frames(frames: &[Field], nrm: &SpaceTimeNorm) -> Result<f64> {
    let (first, last) = match (frames.first(), frames.last()) {
        (Some(a), Some(b)) => (a.time(), b.time()),
        _ => return Err(Error::InsufficientFrames("no frames".into())),
    };
    let tol = 1e-9 * nrm.t2.abs().max(1.0);
    if nrm.t1 < first - tol || nrm.t2 > last + tol {
        return Err(Error::InsufficientFrames(format!(
            "frames cover [{first}, {last}] but the norm needs [{}, {}]",
            nrm.t1, nrm.t2
        )));
    }
    let ts: Vec<f64> = frames.iter().map(Field::time).collect();
    let norms: Vec<f64> = frames.iter().map(|f| lebesgue_norm(f, nrm.q)).collect();
    if nrm.p.is_infinite() {
        let inside = ts.iter().zip(&norms).filter(|(t, _)| **t >= nrm.t1 && **t <= nrm.t2).map(|(_, v)| *v);
        let ends = [interpolate(&ts, &norms, nrm.t1), interpolate(&ts, &norms, nrm.t2)];
        return Ok(inside.chain(ends).fold(0.0, f64::max));
    }
    let integrand: Vec<f64> = norms.iter().map(|v| v.powf(nrm.p)).collect();
    Ok(trapezoid_between(&ts, &integrand, nrm.t1, nrm.t2).powf(1.0 / nrm.p))
}

pub fn spacetime_norm(traj: &Trajectory, nrm: &SpaceTimeNorm) -> Result<f64> {
    spacetime_norm_frames(traj.frames(), nrm)
}

/// Running `int_0^t int |u|^q dx dt` at every frame.
pub fn running_spacetime_integral(frames: &[Field], q: f64) -> Vec<f64> {
    let ts: Vec<f64> = frames.iter().map(Field::time).collect();
    let ys: Vec<f64> = frames.iter().map(|f| lebesgue_norm_pow(f, q)).collect();
    cumulative_trapezoid(&ts, &ys)
}

/// Running `int int |u|^6`, the quantity whose divergence signals blowup.
pub fn l6_accumulation(traj: &Trajectory) -> Vec<f64> {
    running_spacetime_integral(traj.frames(), 6.0)
}
