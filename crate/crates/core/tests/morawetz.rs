use nlslab::concentration::{track_series, ConcentrationParams};
use nlslab::integrator::{solve, IntegratorConfig, Nonlinearity};
use nlslab::morawetz::*;
use nlslab::spectral::{project, Field, Grid, ProjectorSpec};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Direct `O(n^2)` double sum of the action.
fn brute_force_action(u: &Field, k: &MorawetzKernel, xi: f64) -> f64 {
    let g = u.grid();
    let rho = u.density();
    let p = momentum_density(u, xi);
    let dx = g.dx();
    let mut s = 0.0;
    for i in 0..g.n() {
        for j in 0..g.n() {
            s += k.eval(g.x(i) - g.x(j)) * rho[j] * p[i];
        }
    }
    0.5 * s * dx * dx
}

fn random_packet(g: Grid, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = Field::zeros(g, 0.0);
    for _ in 0..3 {
        let w = nlslab::strichartz::wave_packet(
            g,
            rand::Rng::random_range(&mut rng, -4.0..4.0),
            (rand::Rng::random_range(&mut rng, -3.0f64..3.0) / g.dxi()).round() * g.dxi(),
            rand::Rng::random_range(&mut rng, 0.5..1.5),
            None,
        )
        .unwrap();
        u = u.linear_combination(Complex64::new(1.0, 0.0), &w, Complex64::new(rand::Rng::random_range(&mut rng, 0.2..1.0), 0.3)).unwrap();
    }
    u
}

#[test]
fn fast_action_matches_direct_double_sum() {
    let g = Grid::new(256, 16.0 * PI).unwrap();
    for seed in 0..4 {
        let u = random_packet(g, seed);
        for k in [MorawetzKernel::default_for(g.dx()), MorawetzKernel::odd_erf(1.3), MorawetzKernel::sign(), MorawetzKernel::two_sided_erf(0.7)] {
            for xi in [0.0, 0.75] {
                let fast = interaction_action(&u, &k, xi);
                let slow = brute_force_action(&u, &k, xi);
                assert!((fast - slow).abs() <= 1e-10, "{k:?} seed {seed}: {fast} vs {slow}");
            }
        }
    }
}

#[test]
fn action_is_independent_of_frequency_shift() {
    let g = Grid::new(512, 16.0 * PI).unwrap();
    let u = random_packet(g, 11);
    let k = MorawetzKernel::default_for(g.dx());
    let base = interaction_action(&u, &k, 0.0);
    for xi in [-3.0, 0.4, 2.5, 17.0] {
        assert!((interaction_action(&u, &k, xi) - base).abs() <= 1e-10);
    }
}

#[test]
fn reflection_invariance_and_conjugation_antisymmetry() {
    let g = Grid::new(512, 16.0 * PI).unwrap();
    let u = random_packet(g, 5);
    let k = MorawetzKernel::default_for(g.dx());
    let m = interaction_action(&u, &k, 0.0);
    assert!(m.abs() > 1e-3);
    assert!((interaction_action(&u.reflected(), &k, 0.0) - m).abs() <= 1e-10);
    assert!((interaction_action(&u.conj(), &k, 0.0) + m).abs() <= 1e-10);
}

#[test]
fn defocusing_action_is_monotone() {
    let g = Grid::new(1024, 64.0 * PI).unwrap();
    let k = MorawetzKernel::default_for(g.dx());
    for u0 in [
        Field::from_real_fn(g, 0.0, |x| 0.8 * (-x * x).exp()).unwrap(),
        random_packet(g, 3).scaled(0.7),
    ] {
        let cfg = IntegratorConfig::new(Nonlinearity::Defocusing, 1e-3, 2.0).with_save_every(20);
        let traj = solve(&u0, &cfg).unwrap();
        let ms = action_series(traj.frames(), &k);
        let max_ux = traj.frames().iter().map(|f| {
            nlslab::spectral::fourier::derivative(f).iter().map(|z| z.norm()).fold(0.0, f64::max)
        });
        let scale = nlslab::functionals::mass(&u0).powi(2) * max_ux.fold(0.0, f64::max);
        let worst = ms.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        assert!(worst >= -1e-6 * scale, "{worst} vs scale {scale}");
        assert!(ms.last().unwrap() - ms[0] > 0.0);
    }
}

#[test]
fn truncated_action_is_action_of_low_frequency_field() {
    let g = Grid::new(512, 16.0 * PI).unwrap();
    let u = project(&random_packet(g, 9), &ProjectorSpec::Low(1.0)).unwrap();
    let k = MorawetzKernel::default_for(g.dx());
    let op = IOperator::new(0.25).unwrap();
    assert!((truncated_action(&u, &op, &k, 0.3).unwrap() - interaction_action(&u, &k, 0.3)).abs() <= 1e-12);
    let real = Field::from_real_fn(g, 0.0, |x| (-x * x).exp()).unwrap();
    assert!(truncated_action(&real, &IOperator::new(0.01).unwrap(), &k, 0.0).unwrap().abs() < 1e-15);
}

fn band_limited_run(cutoff: f64, nl: Nonlinearity) -> Vec<Field> {
    let g = Grid::new(512, 16.0 * PI).unwrap();
    let u0 = project(&random_packet(g, 21), &ProjectorSpec::Low(0.5 * cutoff)).unwrap().scaled(0.8);
    let cfg = IntegratorConfig::new(nl, 1e-3, 0.5).with_save_every(25).with_spectral_cutoff(Some(cutoff));
    solve(&u0, &cfg).unwrap().frames().to_vec()
}

#[test]
fn error_terms_vanish_for_band_limited_runs() {
    // spectrum inside |xi| <= 2, so |u|^4 u lives in |xi| <= 10 = 32 M / 5
    let frames = band_limited_run(2.0, Nonlinearity::Defocusing);
    let g = *frames[0].grid();
    let op = IOperator::new(10.0 / 32.0).unwrap();
    assert!(!op.is_identity_on(&g));
    let track = track_series(&frames, &ConcentrationParams::default()).unwrap();
    let k = MorawetzKernel::default_for(g.dx());
    let e = commutator_error_terms(&frames, &op, &k, &track, Nonlinearity::Defocusing).unwrap();
    assert!(e.e1.abs() <= 1e-10 && e.e2.abs() <= 1e-10 && e.e3.abs() <= 1e-10, "{e:?}");
}

#[test]
fn error_terms_of_linear_runs_are_zero() {
    let frames = band_limited_run(4.0, Nonlinearity::Linear);
    let track = track_series(&frames, &ConcentrationParams::default()).unwrap();
    let k = MorawetzKernel::default_for(frames[0].grid().dx());
    let e = commutator_error_terms(&frames, &IOperator::new(0.05).unwrap(), &k, &track, Nonlinearity::Linear).unwrap();
    assert_eq!((e.e1, e.e2, e.e3), (0.0, 0.0, 0.0));
}

#[test]
fn error_terms_are_nonzero_when_truncation_bites() {
    let frames = band_limited_run(8.0, Nonlinearity::Defocusing);
    let track = track_series(&frames, &ConcentrationParams::default()).unwrap();
    let k = MorawetzKernel::default_for(frames[0].grid().dx());
    let e = commutator_error_terms(&frames, &IOperator::new(0.05).unwrap(), &k, &track, Nonlinearity::Defocusing).unwrap();
    assert!(e.total_abs() > 1e-8);
    assert!(e.total_abs().is_finite() && e.delta_action.is_finite());
}

#[test]
fn error_terms_need_matching_track() {
    let frames = band_limited_run(2.0, Nonlinearity::Defocusing);
    let k = MorawetzKernel::default_for(frames[0].grid().dx());
    let op = IOperator::new(1.0).unwrap();
    assert!(commutator_error_terms(&frames, &op, &k, &[], Nonlinearity::Defocusing).is_err());
}

#[test]
fn l8_monitor_contract() {
    let g = Grid::new(512, 32.0 * PI).unwrap();
    let k = MorawetzKernel::default_for(g.dx());
    let zero = solve(&Field::zeros(g, 0.0), &IntegratorConfig::new(Nonlinearity::Defocusing, 1e-2, 0.1)).unwrap();
    let r = l8_bound_monitor(&zero, &k).unwrap();
    assert_eq!((r.energy_ratio, r.action_ratio), (0.0, 0.0));
    let u0 = Field::from_real_fn(g, 0.0, |x| 0.5 * (-x * x).exp()).unwrap();
    let focusing = solve(&u0, &IntegratorConfig::new(Nonlinearity::Focusing, 1e-2, 0.1)).unwrap();
    assert!(matches!(l8_bound_monitor(&focusing, &k), Err(nlslab::Error::Focusing)));
    let defocusing = solve(&u0, &IntegratorConfig::new(Nonlinearity::Defocusing, 1e-3, 1.0).with_save_every(20)).unwrap();
    let r = l8_bound_monitor(&defocusing, &k).unwrap();
    assert!(r.energy_ratio.is_finite() && r.energy_ratio > 0.0);
    assert!(r.action_ratio.is_finite() && r.action_ratio > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fast_action_matches_brute_force_on_random_fields(
        parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64),
        eps in 0.05f64..2.0,
    ) {
        let g = Grid::new(64, 12.0).unwrap();
        let samples = parts.iter().zip(g.xs()).map(|((a, b), x)| Complex64::new(*a, *b) * (-x * x / 8.0).exp()).collect();
        let u = Field::new(g, samples, 0.0).unwrap();
        let k = MorawetzKernel::odd_erf(eps);
        prop_assert!((interaction_action(&u, &k, 0.0) - brute_force_action(&u, &k, 0.0)).abs() <= 1e-10);
    }

    #[test]
    fn i_operator_is_a_contraction(seed in 0u64..1000, m in 0.01f64..2.0) {
        let g = Grid::new(256, 16.0 * PI).unwrap();
        let u = random_packet(g, seed);
        let iu = apply_i(&u, &IOperator::new(m).unwrap()).unwrap();
        prop_assert!(nlslab::functionals::mass(&iu) <= nlslab::functionals::mass(&u) * (1.0 + 1e-14));
    }
}
