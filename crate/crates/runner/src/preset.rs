use nlslab::ground_state::{ground_state, profile_residual, sampled_ground_state};
use nlslab::spectral::{Field, Grid, ProjectorSpec};
use nlslab::strichartz::{member_rng, random_band_limited};
use num_complex::Complex64;

use crate::config::{InitialSection, Preset};
use crate::RunnerError;

/// Largest ODE residual accepted for the soliton preset.
pub const SOLITON_RESIDUAL: f64 = 1e-8;
/// Largest `L^2` distance accepted between the discrete ground state and the
/// sampled closed profile. Larger gaps mean the grid does not resolve `Q`.
pub const SOLITON_PROFILE_GAP: f64 = 1e-6;

/// Builds the initial field; identical inputs give identical samples.
pub fn preset_initial(params: &InitialSection, grid: Grid, seed: u64) -> Result<Field, RunnerError> {
    let p = params;
    let field = match p.preset {
        Preset::Zero => Field::zeros(grid, 0.0),
        Preset::Gaussian => Field::from_fn(grid, 0.0, |x| {
            let r = (x - p.center) / p.sigma;
            Complex64::from_polar(p.amp * (-r * r).exp(), p.xi0 * x)
        })?,
        Preset::Soliton => {
            let q = ground_state(grid)?;
            let r = profile_residual(&q);
            if r > SOLITON_RESIDUAL {
                return Err(RunnerError::Preset(format!(
                    "ground state residual {r:.3e} exceeds {SOLITON_RESIDUAL:e}"
                )));
            }
            let gap = q.l2_distance(&sampled_ground_state(grid))?;
            if gap > SOLITON_PROFILE_GAP {
                return Err(RunnerError::Preset(format!(
                    "discrete ground state is {gap:.3e} from the closed profile (limit {SOLITON_PROFILE_GAP:e}); the grid does not resolve Q"
                )));
            }
            q.scaled(p.amp)
        }
        Preset::Random => {
            let spec = if p.band_lo > 0.0 {
                ProjectorSpec::Band { lo: p.band_lo, hi: p.band_hi }
            } else {
                ProjectorSpec::Low(p.band_hi)
            };
            random_band_limited(grid, &mut member_rng(seed, 0), p.center, p.envelope, &spec)?.scaled(p.amp)
        }
    };
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlslab::functionals::mass;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_mass() {
        let g = Grid::new(1024, 64.0 * PI).unwrap();
        let p = InitialSection { amp: 0.1, ..InitialSection::default() };
        let u = preset_initial(&p, g, 0).unwrap();
        assert!((mass(&u) - 0.01 * (PI / 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn soliton_residual() {
        let g = Grid::new(1024, 32.0).unwrap();
        let p = InitialSection { preset: Preset::Soliton, ..InitialSection::default() };
        let q = preset_initial(&p, g, 0).unwrap();
        assert!(profile_residual(&q) <= SOLITON_RESIDUAL);
    }

    #[test]
    fn soliton_on_a_coarse_grid_is_refused() {
        let p = InitialSection { preset: Preset::Soliton, ..InitialSection::default() };
        for n in [16, 128] {
            let e = preset_initial(&p, Grid::new(n, 32.0).unwrap(), 0).unwrap_err();
            assert!(e.to_string().contains("does not resolve"), "{e}");
        }
        assert!(preset_initial(&p, Grid::new(256, 32.0).unwrap(), 0).is_ok());
    }

    #[test]
    fn random_is_seeded() {
        let g = Grid::new(512, 64.0 * PI).unwrap();
        let p = InitialSection { preset: Preset::Random, amp: 2.0, ..InitialSection::default() };
        let a = preset_initial(&p, g, 7).unwrap();
        assert_eq!(a, preset_initial(&p, g, 7).unwrap());
        assert_ne!(a, preset_initial(&p, g, 8).unwrap());
        assert!((mass(&a) - 4.0).abs() < 1e-12);
    }
}
