//! Smooth frequency cutoffs and Littlewood-Paley projectors.

use super::field::Field;
use super::fourier::apply_symbol;
use super::grid::Grid;
use crate::error::{Error, Result};

fn smooth_step_kernel(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// C-infinity step rising from 0 at `s <= 0` to 1 at `s >= 1`.
pub fn smooth_step(s: f64) -> f64 {
    let a = smooth_step_kernel(s);
    let b = smooth_step_kernel(1.0 - s);
    a / (a + b)
}

/// Even cutoff: 1 on `|xi| <= 1`, 0 on `|xi| >= 2`, smooth and monotone in
/// between, with `bump(1.5) = 1/2`.
pub fn bump(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        smooth_step(2.0 - a)
    }
}

/// Which Fourier multiplier to apply.
#[derive(Debug, Clone, PartialEq)]
pub enum ProjectorSpec {
    /// `P_{<=N}`, symbol `bump(xi / N)`.
    Low(f64),
    /// `P_N = P_{<=2N} - P_{<=N}`.
    Dyadic(f64),
    /// `P_{<=hi} - P_{<=lo}`.
    Band { lo: f64, hi: f64 },
    /// `e^{i x xi0} P (e^{-i x xi0} u)`; `center` must lie on the lattice.
    Shifted { center: f64, inner: Box<ProjectorSpec> },
}

impl ProjectorSpec {
    pub fn shifted(center: f64, inner: ProjectorSpec) -> Self {
        Self::Shifted { center, inner: Box::new(inner) }
    }

    fn check_scale(scale: f64, grid: &Grid) -> Result<()> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidProjector(format!("scale must be positive, got {scale}")));
        }
        if scale < grid.dxi() {
            return Err(Error::DegenerateProjector { scale, resolution: grid.dxi() });
        }
        Ok(())
    }

    /// Real symbol in FFT order.
    pub fn multiplier(&self, grid: &Grid) -> Result<Vec<f64>> {
        let low = |n: f64| -> Vec<f64> { (0..grid.n()).map(|k| bump(grid.freq(k) / n)).collect() };
        let mut m = match self {
            Self::Low(n) => {
                Self::check_scale(*n, grid)?;
                low(*n)
            }
            Self::Dyadic(n) => {
                Self::check_scale(*n, grid)?;
                low(2.0 * n).iter().zip(low(*n)).map(|(a, b)| a - b).collect()
            }
            Self::Band { lo, hi } => {
                Self::check_scale(*lo, grid)?;
                Self::check_scale(*hi, grid)?;
                if lo >= hi {
                    return Err(Error::InvalidProjector(format!("band needs lo < hi, got [{lo}, {hi}]")));
                }
                low(*hi).iter().zip(low(*lo)).map(|(a, b)| a - b).collect()
            }
            Self::Shifted { center, inner } => {
                let shift = grid.lattice_mode(*center).ok_or(Error::OffLattice(*center))?;
                let base = inner.multiplier(grid)?;
                // Cyclic translation is exactly conjugation by the modulation
                // e^{i x xi0} on the periodic grid, so the zeroed mode moves too.
                return Ok((0..grid.n()).map(|k| base[grid.index_of_mode(k as i64 - shift)]).collect());
            }
        };
        m[grid.nyquist_index()] = 0.0;
        Ok(m)
    }
}

pub fn project(f: &Field, spec: &ProjectorSpec) -> Result<Field> {
    let m = spec.multiplier(f.grid())?;
    apply_symbol(f, &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::fourier::forward_transform;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn bump_values() {
        assert_eq!(bump(0.5), 1.0);
        assert_eq!(bump(-1.0), 1.0);
        assert_eq!(bump(3.0), 0.0);
        assert_eq!(bump(2.0), 0.0);
        // pinned regression values for the chosen step
        assert!((bump(1.5) - 0.5).abs() < 1e-15);
        assert!((bump(1.25) - 0.935030830871336).abs() < 1e-12);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = bump(1.0 + i as f64 / 1000.0);
            assert!(v <= prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
        for i in 0..100 {
            let x = i as f64 * 0.031;
            assert_eq!(bump(x), bump(-x));
        }
    }

    #[test]
    fn degenerate_and_invalid_specs() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        assert!(matches!(ProjectorSpec::Low(0.5).multiplier(&g), Err(Error::DegenerateProjector { .. })));
        assert!(ProjectorSpec::Band { lo: 4.0, hi: 2.0 }.multiplier(&g).is_err());
        assert!(matches!(
            ProjectorSpec::shifted(0.5, ProjectorSpec::Low(2.0)).multiplier(&g),
            Err(Error::OffLattice(_))
        ));
    }

    #[test]
    fn dyadic_symbol_is_supported_on_annulus() {
        let g = Grid::new(256, 2.0 * PI).unwrap();
        let m = ProjectorSpec::Dyadic(8.0).multiplier(&g).unwrap();
        for (k, v) in m.iter().enumerate() {
            let xi = g.freq(k).abs();
            if xi < 8.0 || xi > 32.0 {
                assert_eq!(*v, 0.0, "xi = {xi}");
            }
            assert!((0.0..=1.0).contains(v));
        }
    }

    #[test]
    fn nyquist_is_zeroed() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let u = Field::from_fn(g, 0.0, |x| Complex64::from_polar(1.0, -16.0 * x)).unwrap();
        let p = project(&u, &ProjectorSpec::Low(100.0)).unwrap();
        let s = forward_transform(&p);
        assert!(s.coeffs()[16].norm() < 1e-12);
    }
}
