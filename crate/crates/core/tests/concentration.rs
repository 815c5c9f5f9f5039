use nlslab::concentration::*;
use nlslab::integrator::{solve, IntegratorConfig, Nonlinearity};
use nlslab::spectral::{forward_transform, Field, Grid};
use nlslab::symmetry::{apply_boost, apply_scaling, GalileanBoost, ScalingMap};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Captured mass of the window `[c - r, c + r]` (cell units) by explicit
/// overlap of every cell with the window.
fn captured(masses: &[f64], c: usize, r: f64, periodic: bool) -> f64 {
    let n = masses.len() as i64;
    let mut s = 0.0;
    for d in -(n / 2)..=(n / 2) {
        let j = c as i64 + d;
        let idx = if periodic {
            if d == n / 2 {
                continue; // the cell opposite the center is counted once, at -n/2
            }
            j.rem_euclid(n)
        } else if j < 0 || j >= n {
            continue;
        } else {
            j
        };
        let lo = (d as f64 - 0.5).max(-r);
        let hi = (d as f64 + 0.5).min(r);
        if hi > lo {
            s += masses[idx as usize] * (hi - lo);
        }
    }
    s
}

/// Exhaustive search: bisection for the radius at every center, then the
/// leftmost center among ties.
fn exhaustive(masses: &[f64], target: f64, periodic: bool) -> (usize, f64) {
    let n = masses.len();
    let radii: Vec<f64> = (0..n)
        .map(|c| {
            let (mut lo, mut hi) = (0.0, n as f64);
            if captured(masses, c, hi, periodic) < target {
                return f64::INFINITY;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if captured(masses, c, mid, periodic) >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        })
        .collect();
    let best = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let c = radii.iter().position(|&r| r <= best * (1.0 + 1e-9)).unwrap();
    (c, radii[c])
}

fn check_against_oracle(u: &Field, eta: f64) {
    let g = u.grid();
    let n = g.n();
    let s = track(u, &ConcentrationParams::new(eta, 1.0, 0.1).unwrap()).unwrap();
    let xm: Vec<f64> = u.density().iter().map(|r| r * g.dx()).collect();
    let total: f64 = xm.iter().sum();
    let (c, r) = exhaustive(&xm, (1.0 - eta) * total, true);
    assert_eq!(s.x_center, g.x(c));
    assert!((s.x_radius - r * g.dx()).abs() <= 1e-9 * g.dx(), "{} vs {}", s.x_radius, r * g.dx());

    let modes = forward_transform(u).mode_masses();
    let ordered: Vec<f64> = (0..n).map(|i| modes[(i + n / 2) % n]).collect();
    let total: f64 = ordered.iter().sum();
    let (c, r) = exhaustive(&ordered, (1.0 - eta) * total, false);
    assert_eq!(s.xi_center, (c as f64 - (n / 2) as f64) * g.dxi());
    assert!((s.xi_radius - r * g.dxi()).abs() <= 1e-9 * g.dxi());
}

#[test]
fn tracker_matches_exhaustive_search() {
    let g = Grid::new(128, 16.0).unwrap();
    let u = Field::from_fn(g, 0.0, |x| {
        Complex64::from_polar((-(x - 2.0).powi(2)).exp() + 0.6 * (-(x + 3.0).powi(2) * 2.0).exp(), 1.5 * x)
    })
    .unwrap();
    for eta in [0.05, 0.1, 0.3] {
        check_against_oracle(&u, eta);
    }
}

#[test]
fn exact_ties_pick_the_leftmost_window() {
    // two spikes half a box apart: the windows centered midway on either side tie
    let g = Grid::new(64, 32.0).unwrap();
    let mut samples = vec![Complex64::new(0.0, 0.0); 64];
    samples[10] = Complex64::new(1.0, 0.0);
    samples[42] = Complex64::new(1.0, 0.0);
    let u = Field::new(g, samples, 0.0).unwrap();
    let s = track(&u, &ConcentrationParams::new(0.45, 1.0, 0.1).unwrap()).unwrap();
    assert_eq!(s.x_center, g.x(26));
    check_against_oracle(&u, 0.45);
}

#[test]
fn boost_shifts_frequency_center_exactly() {
    let g = Grid::new(256, 32.0 * PI).unwrap();
    let u = Field::from_real_fn(g, 0.0, |x| (-x * x / 2.0).exp() * (1.0 + 0.3 * x)).unwrap();
    let p = ConcentrationParams::default();
    let a = track(&u, &p).unwrap();
    let xi0 = 12.0 * g.dxi();
    let b = track(&apply_boost(&u, GalileanBoost::new(xi0)).unwrap(), &p).unwrap();
    assert!((b.xi_center - a.xi_center - xi0).abs() <= 1e-12);
    assert!((b.xi_radius - a.xi_radius).abs() <= 1e-12);
    assert!((b.x_radius - a.x_radius).abs() <= 1e-12);
    assert_eq!(b.x_center, a.x_center);
}

#[test]
fn dilation_scales_radii_exactly() {
    let g = Grid::new(256, 32.0 * PI).unwrap();
    let u = Field::from_fn(g, 0.0, |x| Complex64::from_polar((-x * x / 3.0).exp(), 0.5 * x)).unwrap();
    let p = ConcentrationParams::default();
    let a = track(&u, &p).unwrap();
    for lambda in [0.5, 2.0, 4.0] {
        let b = track(&apply_scaling(&u, ScalingMap::new(lambda).unwrap()).unwrap(), &p).unwrap();
        assert!((b.x_radius - lambda * a.x_radius).abs() <= 1e-12 * b.x_radius);
        assert!((b.xi_radius - a.xi_radius / lambda).abs() <= 1e-12 * b.xi_radius);
        assert!((b.n_t - a.n_t / lambda).abs() <= 1e-12 * b.n_t);
    }
}

fn accumulation_frames(density: impl Fn(f64) -> f64, times: &[f64]) -> Vec<Field> {
    // constant profile whose |u|^6 integral per unit time equals density(t)
    let g = Grid::new(64, 8.0).unwrap();
    times
        .iter()
        .map(|&t| {
            let c = (density(t) / g.length()).powf(1.0 / 6.0);
            Field::from_real_fn(g, t, |_| c).unwrap()
        })
        .collect()
}

fn flat_track(frames: &[Field]) -> Vec<TrackerSample> {
    frames
        .iter()
        .map(|f| TrackerSample { t: f.time(), x_center: 0.0, x_radius: 1.0, xi_center: 0.0, xi_radius: 1.0, n_t: 1.0 })
        .collect()
}

#[test]
fn uniform_accumulation_gives_equal_intervals() {
    let times: Vec<f64> = (0..=40).map(|k| k as f64 * 0.1).collect();
    let frames = accumulation_frames(|_| 1.0, &times);
    let p = ConcentrationParams::new(0.1, 1.0, (0.5f64).powf(1.0 / 6.0)).unwrap();
    let parts = partition_small_intervals(&frames, &flat_track(&frames), &p).unwrap();
    assert_eq!(parts.len(), 8);
    for j in &parts {
        assert!((j.end - j.start - 0.5).abs() < 1e-9);
        assert!(!j.partial);
    }
}

#[test]
fn exact_budget_multiple_gives_no_trailing_interval() {
    let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.4).collect();
    let frames = accumulation_frames(|_| 1.0, &times);
    let total = 4.0;
    let p = ConcentrationParams::new(0.1, 1.0, (total / 4.0f64).powf(1.0 / 6.0)).unwrap();
    let parts = partition_small_intervals(&frames, &flat_track(&frames), &p).unwrap();
    assert_eq!(parts.len(), 4);
    assert!(parts.iter().all(|j| !j.partial));
}

#[test]
fn small_total_gives_one_partial_interval() {
    let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.1).collect();
    let frames = accumulation_frames(|_| 1e-3, &times);
    let p = ConcentrationParams::new(0.1, 1.0, 0.5).unwrap();
    let parts = partition_small_intervals(&frames, &flat_track(&frames), &p).unwrap();
    assert_eq!(parts.len(), 1);
    assert!(parts[0].partial);
    assert_eq!((parts[0].start, parts[0].end), (0.0, 1.0));
}

#[test]
fn partition_refines_consistently() {
    let g = Grid::new(1024, 64.0 * PI).unwrap();
    let u0 = Field::from_real_fn(g, 0.0, |x| 0.8 * (-x * x).exp()).unwrap();
    let p = ConcentrationParams::new(0.1, 1.0, 0.3).unwrap();
    let mut cuts = vec![];
    for every in [40, 20] {
        let traj = solve(&u0, &IntegratorConfig::new(Nonlinearity::Defocusing, 1e-3, 2.0).with_save_every(every)).unwrap();
        let track = track_series(traj.frames(), &p).unwrap();
        let parts = partition_small_intervals(traj.frames(), &track, &p).unwrap();
        let again = partition_small_intervals(traj.frames(), &track, &p).unwrap();
        assert_eq!(parts, again);
        cuts.push((parts, every as f64 * 1e-3));
    }
    let (coarse, gap) = &cuts[0];
    let (fine, _) = &cuts[1];
    assert!(coarse.len() > 2);
    assert_eq!(coarse.len(), fine.len());
    for (a, b) in coarse.iter().zip(fine) {
        assert!((a.end - b.end).abs() <= *gap);
    }
}

#[test]
fn soliton_frequency_scale_is_stable_within_intervals() {
    let g = Grid::new(1024, 32.0).unwrap();
    let q = nlslab::ground_state::ground_state(g).unwrap();
    let traj = solve(&q, &IntegratorConfig::new(Nonlinearity::Focusing, 1e-3, 2.0).with_save_every(20)).unwrap();
    let p = ConcentrationParams::new(0.1, 1.0, 0.5).unwrap();
    let track = track_series(traj.frames(), &p).unwrap();
    let parts = partition_small_intervals(traj.frames(), &track, &p).unwrap();
    assert!(parts.len() >= 2);
    for r in interval_n_ratios(&track, &parts) {
        assert!((0.5..=2.0).contains(&r), "{r}");
    }
    let b = bookkeeping(traj.frames(), &track, &parts);
    assert!(b.sum_n_over_n3.unwrap().is_finite());
    assert!(b.xi_drift.abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn radii_shrink_as_eta_grows(parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64), e1 in 0.01f64..0.49, e2 in 0.01f64..0.49) {
        let g = Grid::new(64, 10.0).unwrap();
        let u = Field::new(g, parts.iter().map(|(a, b)| Complex64::new(*a, *b)).collect(), 0.0).unwrap();
        prop_assume!(nlslab::functionals::mass(&u) > 0.0);
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let a = track(&u, &ConcentrationParams::new(lo, 1.0, 0.1).unwrap()).unwrap();
        let b = track(&u, &ConcentrationParams::new(hi, 1.0, 0.1).unwrap()).unwrap();
        prop_assert!(b.x_radius <= a.x_radius * (1.0 + 1e-12));
        prop_assert!(b.xi_radius <= a.xi_radius * (1.0 + 1e-12));
    }

    #[test]
    fn tracker_matches_oracle_on_random_fields(parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 32), eta in 0.02f64..0.45) {
        let g = Grid::new(32, 6.0).unwrap();
        let u = Field::new(g, parts.iter().map(|(a, b)| Complex64::new(*a, *b)).collect(), 0.0).unwrap();
        prop_assume!(nlslab::functionals::mass(&u) > 0.0);
        check_against_oracle(&u, eta);
    }
}
