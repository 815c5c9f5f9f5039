use crate::error::{Error, Result};
use crate::spectral::fourier::apply_symbol;
use crate::spectral::projector::bump;
use crate::spectral::{Field, Grid};

/// Smooth low-pass multiplier `chi(xi / (32 M))`: 1 on `|xi| <= 32M`, 0 on
/// `|xi| >= 64M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IOperator {
    m: f64,
}

impl IOperator {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Parameter(format!("I-operator cutoff must be positive, got {m}")));
        }
        Ok(Self { m })
    }

    pub fn cutoff(&self) -> f64 {
        self.m
    }

    /// True when the multiplier is 1 on every lattice frequency.
    pub fn is_identity_on(&self, grid: &Grid) -> bool {
        32.0 * self.m >= grid.nyquist()
    }

    pub fn multiplier(&self, grid: &Grid) -> Vec<f64> {
        if self.is_identity_on(grid) {
            return vec![1.0; grid.n()];
        }
        let mut m: Vec<f64> = (0..grid.n()).map(|k| bump(grid.freq(k) / (32.0 * self.m))).collect();
        m[grid.nyquist_index()] = 0.0;
        m
    }
}

pub fn apply_i(u: &Field, op: &IOperator) -> Result<Field> {
    if op.is_identity_on(u.grid()) {
        return Ok(u.clone());
    }
    apply_symbol(u, &op.multiplier(u.grid()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::mass;
    use crate::spectral::{free_propagate, project, ProjectorSpec};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(512, 16.0 * PI).unwrap()
    }

    fn rough() -> Field {
        Field::from_fn(grid(), 0.0, |x| {
            Complex64::new((-x * x).exp() * (1.0 + (9.0 * x).cos()), 0.4 * (-(x - 1.0).powi(2) * 4.0).exp())
        })
        .unwrap()
    }

    #[test]
    fn identity_above_nyquist() {
        let u = rough();
        let op = IOperator::new(grid().nyquist() / 32.0 + 1.0).unwrap();
        assert_eq!(apply_i(&u, &op).unwrap(), u);
    }

    #[test]
    fn band_limited_fields_pass_unchanged() {
        let op = IOperator::new(0.25).unwrap();
        // spectrum inside |xi| <= 4 < 32 M = 8
        let u = project(&rough(), &ProjectorSpec::Low(2.0)).unwrap();
        let iu = apply_i(&u, &op).unwrap();
        assert!(iu.l2_distance(&u).unwrap() <= 1e-14);
    }

    #[test]
    fn contraction_and_commutes_with_free_flow() {
        let u = rough();
        let op = IOperator::new(0.1).unwrap();
        let iu = apply_i(&u, &op).unwrap();
        assert!(mass(&iu) <= mass(&u));
        let a = apply_i(&free_propagate(&u, 0.3).unwrap(), &op).unwrap();
        let b = free_propagate(&iu, 0.3).unwrap();
        assert!(a.l2_distance(&b).unwrap() <= 1e-12);
    }

    #[test]
    fn rejects_nonpositive_cutoff() {
        assert!(IOperator::new(0.0).is_err());
    }
}
