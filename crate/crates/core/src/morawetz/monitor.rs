use super::action::{action_with, KernelConvolver};
use super::ioperator::{apply_i, IOperator};
use super::kernel::MorawetzKernel;
use crate::error::{Error, Result};
use crate::functionals::{h_s_norm, lebesgue_norm_pow, mass};
use crate::integrator::{Nonlinearity, Trajectory};
use crate::quadrature::trapezoid;
use crate::spectral::Field;

/// Action of the frequency-truncated field `Iu`.
pub fn truncated_action(u: &Field, op: &IOperator, k: &MorawetzKernel, xi_shift: f64) -> Result<f64> {
    Ok(super::action::interaction_action(&apply_i(u, op)?, k, xi_shift))
}

/// `M(t)` at every saved frame.
pub fn action_series(frames: &[Field], k: &MorawetzKernel) -> Vec<f64> {
    let Some(first) = frames.first() else { return vec![] };
    let conv = KernelConvolver::new(*first.grid(), *k);
    frames.iter().map(|u| action_with(&conv, u, 0.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L8Ratios {
    pub l8_integral: f64,
    /// `int int |u|^8 / (sup_t ||u||_{H1} ||u||_2^3)`.
    pub energy_ratio: f64,
    /// `int int |u|^8 / sup_t |M(t)|`.
    pub action_ratio: f64,
}

fn guarded(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn l8_bound_monitor(traj: &Trajectory, k: &MorawetzKernel) -> Result<L8Ratios> {
    if traj.config().nonlinearity == Nonlinearity::Focusing {
        return Err(Error::Focusing);
    }
    let frames = traj.frames();
    let ts = traj.times();
    let l8: Vec<f64> = frames.iter().map(|u| lebesgue_norm_pow(u, 8.0)).collect();
    let l8_integral = trapezoid(&ts, &l8);
    let h1 = frames.iter().map(|u| h_s_norm(u, 1, 0.0)).fold(0.0, f64::max);
    let m_sup = action_series(frames, k).into_iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(L8Ratios {
        l8_integral,
        energy_ratio: guarded(l8_integral, h1 * mass(traj.first()).powf(1.5)),
        action_ratio: guarded(l8_integral, m_sup),
    })
}
