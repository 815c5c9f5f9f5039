use nlslab::functionals::{energy, mass, momentum};
use nlslab::ground_state::{ground_state, profile_residual};
use nlslab::integrator::*;
use nlslab::spectral::{Field, Grid};
use nlslab::strichartz::wave_packet;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn gaussian(g: Grid, a: f64) -> Field {
    Field::from_real_fn(g, 0.0, |x| a * (-x * x).exp()).unwrap()
}

fn rel_drift(vals: impl Iterator<Item = f64>, reference: f64) -> f64 {
    vals.map(|v| (v - reference).abs()).fold(0.0, f64::max) / reference.abs()
}

#[test]
fn small_gaussian_energy_drift() {
    let g = Grid::new(1024, 64.0 * PI).unwrap();
    let u0 = gaussian(g, 0.1);
    let traj = solve(&u0, &IntegratorConfig::new(Nonlinearity::Defocusing, 1e-3, 10.0).with_save_every(500)).unwrap();
    assert_eq!(traj.status(), Termination::Completed);
    let e0 = energy(&u0, Nonlinearity::Defocusing);
    let drift = traj.frames().iter().map(|f| (energy(f, Nonlinearity::Defocusing) - e0).abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-8, "{drift}");
}

#[test]
fn energy_drift_is_second_order() {
    let g = Grid::new(512, 32.0 * PI).unwrap();
    let u0 = gaussian(g, 0.8);
    let e0 = energy(&u0, Nonlinearity::Defocusing);
    let drift = |dt: f64| {
        let cfg = IntegratorConfig::new(Nonlinearity::Defocusing, dt, 1.0).with_save_every((0.05 / dt).round() as usize);
        let traj = solve(&u0, &cfg).unwrap();
        rel_drift(traj.frames().iter().map(|f| energy(f, Nonlinearity::Defocusing)), e0)
    };
    let ratio = drift(2e-3) / drift(1e-3);
    assert!((ratio - 4.0).abs() <= 1.0, "{ratio}");
}

#[test]
fn mass_is_conserved_without_dealiasing() {
    let g = Grid::new(512, 32.0 * PI).unwrap();
    let u0 = gaussian(g, 1.0);
    let m0 = mass(&u0);
    let cfg = IntegratorConfig::new(Nonlinearity::Focusing, 1e-3, 0.2).with_dealias(false);
    let traj = solve(&u0, &cfg).unwrap();
    assert!(rel_drift(traj.frames().iter().map(mass), m0) <= 1e-12);
}

#[test]
fn soliton_rotates_in_phase() {
    let g = Grid::new(1024, 32.0).unwrap();
    let q = ground_state(g).unwrap();
    assert!(profile_residual(&q) <= 1e-8);
    let cfg = IntegratorConfig::new(Nonlinearity::Focusing, 1e-4, 1.0).with_save_every(10_000);
    let traj = solve(&q, &cfg).unwrap();
    let rotated = q.map(|z| z * Complex64::from_polar(1.0, 1.0)).unwrap();
    let err = traj.last().l2_distance(&rotated).unwrap();
    assert!(err <= 1e-6, "{err}");
}

#[test]
fn supercritical_mass_blows_up_only_when_focusing() {
    let g = Grid::new(1024, 32.0).unwrap();
    let q = ground_state(g).unwrap();
    let u0 = q.scaled(1.2);
    assert!(energy(&u0, Nonlinearity::Focusing) <= -0.3 * mass(&q));
    let cfg = IntegratorConfig::new(Nonlinearity::Focusing, 1e-4, 1.0).with_save_every(100);
    let traj = solve(&u0, &cfg).unwrap();
    assert_eq!(traj.status(), Termination::BlowupGuardTripped);
    assert!(traj.last().time() < 1.0);

    let cfg = IntegratorConfig::new(Nonlinearity::Defocusing, 1e-4, 1.0).with_save_every(100);
    let traj = solve(&u0, &cfg).unwrap();
    assert_eq!(traj.status(), Termination::Completed);
    let h1 = |f: &Field| nlslab::functionals::h_s_norm(f, 1, 0.0);
    let peak = traj.frames().iter().map(h1).fold(0.0, f64::max);
    assert!(peak <= 2.0 * h1(&u0));
}

#[test]
fn duhamel_residual_is_second_order_in_cadence() {
    let g = Grid::new(512, 32.0 * PI).unwrap();
    let u0 = gaussian(g, 0.9);
    let residual = |every: usize| {
        let cfg = IntegratorConfig::new(Nonlinearity::Defocusing, 1e-4, 0.5).with_save_every(every);
        duhamel_residual(&solve(&u0, &cfg).unwrap(), 0.0, 0.5).unwrap()
    };
    let ratio = residual(100) / residual(50);
    assert!((ratio - 4.0).abs() <= 1.2, "{ratio}");
}

#[test]
fn linear_duhamel_residual_vanishes() {
    let g = Grid::new(256, 16.0 * PI).unwrap();
    let traj = solve(&gaussian(g, 1.0), &IntegratorConfig::new(Nonlinearity::Linear, 1e-2, 1.0).with_save_every(10)).unwrap();
    assert!(duhamel_residual(&traj, 0.0, 1.0).unwrap() <= 1e-12);
    assert_eq!(duhamel_residual(&traj, 0.5, 0.5).unwrap(), 0.0);
    assert!(duhamel_residual(&traj, 0.55, 1.0).is_err());
}

#[test]
fn time_reversal_returns_conjugate_data() {
    let g = Grid::new(512, 32.0 * PI).unwrap();
    let u0 = wave_packet(g, -1.0, 2.0 * g.dxi() * 8.0, 1.0, None).unwrap().scaled(1.2);
    for dealias in [false, true] {
        let cfg = IntegratorConfig::new(Nonlinearity::Defocusing, 1e-3, 0.5).with_save_every(500).with_dealias(dealias);
        let forward = solve(&u0, &cfg).unwrap();
        let back = solve(&forward.last().conj().with_time(0.0), &cfg).unwrap();
        let gap = back.last().conj().l2_distance(&u0).unwrap();
        // the symmetric splitting is exactly reversible; truncation is not
        let tol = if dealias { 1e-6 } else { 1e-11 };
        assert!(gap <= tol, "dealias {dealias}: {gap}");
    }
}

#[test]
fn runs_are_deterministic() {
    let g = Grid::new(256, 16.0 * PI).unwrap();
    let cfg = IntegratorConfig::new(Nonlinearity::Focusing, 1e-3, 0.3).with_save_every(30);
    let a = solve(&gaussian(g, 1.0), &cfg).unwrap();
    let b = solve(&gaussian(g, 1.0), &cfg).unwrap();
    assert_eq!(a.frames(), b.frames());
}

#[test]
fn momentum_is_conserved() {
    let g = Grid::new(512, 32.0 * PI).unwrap();
    let u0 = wave_packet(g, 0.0, 4.0 * g.dxi() * 8.0, 1.0, None).unwrap();
    let p0 = momentum(&u0);
    assert!(p0.abs() > 0.1);
    let traj = solve(&u0, &IntegratorConfig::new(Nonlinearity::Defocusing, 1e-3, 1.0).with_save_every(100)).unwrap();
    assert!(rel_drift(traj.frames().iter().map(momentum), p0) <= 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn one_step_is_unitary_without_dealiasing(
        parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64),
        dt in 1e-4f64..1e-1,
        focusing in any::<bool>(),
    ) {
        let g = Grid::new(64, 8.0).unwrap();
        let u = Field::new(g, parts.iter().map(|(a, b)| Complex64::new(*a, *b)).collect(), 0.0).unwrap();
        let nl = if focusing { Nonlinearity::Focusing } else { Nonlinearity::Defocusing };
        let v = strang_step(&u, dt, nl, false).unwrap();
        prop_assert!((mass(&v) - mass(&u)).abs() <= 1e-12 * mass(&u).max(1e-300));
        prop_assert!((v.time() - u.time() - dt).abs() <= 1e-15);
    }
}
