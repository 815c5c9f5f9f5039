//! Error terms of the frequency-localized action, in the Galilean recentered
//! form. With `w = Iu`, `F = mu |u|^4 u` and the defect
//! `D = mu |w|^4 w - I F`, the three space-time integrands are
//!
//! ```text
//! E1: 1/4 a(x-y) [conj(IF) w - IF conj(w)](y) [conj(w)(d - i xi) w - w (d + i xi) conj(w)](x)
//! E2: 1/4 a(x-y) |w(y)|^2 [D conj((d - i xi) w) + conj(D) (d - i xi) w](x)
//! E3: 1/4 a(x-y) |w(y)|^2 [conj(w) (d - i xi) D + w (d + i xi) conj(D)](x)
//! ```
//!
//! integrated over `x`, `y` and the frames of the window.

use num_complex::Complex64;

use super::action::{action_with, momentum_density, KernelConvolver};
use super::ioperator::{apply_i, IOperator};
use super::kernel::MorawetzKernel;
use crate::concentration::TrackerSample;
use crate::error::{Error, Result};
use crate::integrator::{nonlinear_term, Nonlinearity};
use crate::quadrature::trapezoid;
use crate::spectral::fourier::{apply_symbol, shifted_derivative};
use crate::spectral::Field;

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTerms {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    /// `M_I(end) - M_I(start)` over the window.
    pub delta_action: f64,
    /// Frame gaps where the frequency center moved by more than the local
    /// frequency scale `N(t)`; interpolation across them is unreliable.
    pub flagged_jumps: Vec<usize>,
}

impl ErrorTerms {
    pub fn total_abs(&self) -> f64 {
        self.e1.abs() + self.e2.abs() + self.e3.abs()
    }
}

/// Instantaneous integrands of the three error terms at one frame.
pub fn error_integrands(
    conv: &KernelConvolver,
    u: &Field,
    op: &IOperator,
    nonlinearity: Nonlinearity,
    xi: f64,
) -> Result<[f64; 3]> {
    if nonlinearity == Nonlinearity::Linear {
        return Ok([0.0; 3]);
    }
    let mu = nonlinearity.mu();
    let w = apply_i(u, op)?;
    let f = u.with_samples(nonlinear_term(u, nonlinearity))?;
    let i_f = if op.is_identity_on(u.grid()) { f } else { apply_symbol(&f, &op.multiplier(u.grid()))? };
    let defect: Vec<Complex64> = w
        .samples()
        .iter()
        .zip(i_f.samples())
        .map(|(z, g)| z * (mu * z.norm_sqr() * z.norm_sqr()) - g)
        .collect();
    let defect_field = u.with_samples(defect.clone())?;
    let rho = w.density();
    let j_shift = momentum_density(&w, xi);
    let dw = shifted_derivative(&w, xi);
    let dd = shifted_derivative(&defect_field, xi);

    let y1: Vec<f64> = w.samples().iter().zip(i_f.samples()).map(|(z, g)| (g * z.conj()).im).collect();
    let e1 = conv.bilinear(&y1, &j_shift);

    let x2: Vec<f64> = defect.iter().zip(&dw).map(|(d, v)| (d * v.conj()).re).collect();
    let e2 = 0.5 * conv.bilinear(&rho, &x2);

    let x3: Vec<f64> = w.samples().iter().zip(&dd).map(|(z, v)| (z.conj() * v).re).collect();
    let e3 = 0.5 * conv.bilinear(&rho, &x3);
    Ok([e1, e2, e3])
}

/// Time-integrated error terms over a window of consecutive frames, with
/// the frequency center taken from `track` (one sample per frame).
pub fn commutator_error_terms(
    frames: &[Field],
    op: &IOperator,
    kernel: &MorawetzKernel,
    track: &[TrackerSample],
    nonlinearity: Nonlinearity,
) -> Result<ErrorTerms> {
    if frames.len() < 2 {
        return Err(Error::InsufficientFrames("error terms need at least two frames".into()));
    }
    if track.len() != frames.len() {
        return Err(Error::Parameter(format!(
            "frequency-center series has {} samples for {} frames",
            track.len(),
            frames.len()
        )));
    }
    let conv = KernelConvolver::new(*frames[0].grid(), *kernel);
    let ts: Vec<f64> = frames.iter().map(Field::time).collect();
    let mut cols = [vec![], vec![], vec![]];
    for (u, s) in frames.iter().zip(track) {
        let e = error_integrands(&conv, u, op, nonlinearity, s.xi_center)?;
        for (c, v) in cols.iter_mut().zip(e) {
            c.push(v);
        }
    }
    let flagged_jumps = track
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[1].xi_center - w[0].xi_center).abs() > w[0].n_t.max(w[1].n_t))
        .map(|(i, _)| i)
        .collect();
    let m_first = action_with(&conv, &apply_i(&frames[0], op)?, 0.0);
    let m_last = action_with(&conv, &apply_i(frames.last().unwrap(), op)?, 0.0);
    Ok(ErrorTerms {
        e1: trapezoid(&ts, &cols[0]),
        e2: trapezoid(&ts, &cols[1]),
        e3: trapezoid(&ts, &cols[2]),
        delta_action: m_last - m_first,
        flagged_jumps,
    })
}
