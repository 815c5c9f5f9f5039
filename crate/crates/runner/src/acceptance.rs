//! The acceptance criteria of the lab and the members of the `strichartz`
//! and `morawetz-ensemble` suites.
//!
//! Every criterion is a [`Member`]: it runs its scenarios, compares the
//! measured values with fixed bounds and reports them as [`Check`]s.
//! Criteria that produce artifacts write them into the suite output
//! directory under fixed names; the rest run in memory.

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use nlslab::concentration::{partition_small_intervals, track, track_series, ConcentrationParams, SmallInterval};
use nlslab::functionals::{energy, mass};
use nlslab::ground_state::{ground_state, profile_residual};
use nlslab::integrator::{solve, IntegratorConfig};
use nlslab::morawetz::{interaction_action, momentum_density, MorawetzKernel};
use nlslab::quadrature::fit_slope;
use nlslab::spectral::fourier::derivative;
use nlslab::spectral::{forward_transform, free_propagate, Field, Grid, ProjectorSpec};
use nlslab::strichartz::{
    bilinear_constant, interp_sweep, is_admissible, member_rng, random_band_limited, wave_packet, BilinearSetup,
    BilinearVariant, InterpSetup,
};
use nlslab::symmetry::{apply_boost, apply_scaling, boost_trajectory_check, GalileanBoost, ScalingMap};
use nlslab::{Nonlinearity, Termination};
use num_complex::Complex64;
use rand::Rng;

use crate::config::{Preset, ScenarioConfig};
use crate::record::{write_bilinear, BilinearRow};
use crate::scenario::{run_with_output, simulate, RunOutput};
use crate::suite::{measure, run_members, Check, Member, MemberReport};
use crate::RunnerError;

pub const ENSEMBLE_SEED: u64 = 2024;
pub const ENSEMBLE_SIZE: usize = 20;
/// Largest accepted `L^8` ratio over the ensemble.
pub const L8_CONSTANT: f64 = 100.0;
pub const STRICHARTZ_SEED: u64 = 7;
pub const STRICHARTZ_ENSEMBLE: usize = 8;
pub const BILINEAR_SCALES: [f64; 6] = [4.0, 8.0, 16.0, 32.0, 64.0, 128.0];
pub const INTERP_HIGH: f64 = 256.0;
pub const INTERP_RATIOS: [f64; 5] = [16.0, 32.0, 64.0, 128.0, 256.0];

/// Criteria whose bound the method cannot reach, with the reason. They are
/// still run and reported.
pub const KNOWN_UNATTAINABLE: [(&str, &str); 1] = [(
    "conservation-momentum-order",
    "the reference data has zero momentum, so its drift is rounding noise and has no dt order",
)];

pub fn criteria() -> Vec<Member> {
    vec![
        Member::new("conservation", conservation),
        Member::new("conservation-momentum-order", |_: &Path| momentum_order()),
        Member::new("soliton", soliton),
        Member::new("dichotomy", dichotomy),
        Member::new("scattering", scattering),
        Member::new("morawetz", morawetz),
        Member::new("symmetry", |_: &Path| symmetry()),
        Member::new("strichartz", strichartz),
        Member::new("concentration", |_: &Path| concentration()),
        Member::new("determinism", determinism),
    ]
}

fn completed(s: Termination) -> bool {
    s == Termination::Completed
}

// ---- reference scenarios ----

/// Defocusing `0.5 e^{-x^2}` on the default box up to `t = 10`, saved every
/// 0.1 time units.
pub fn conservation_config(dt: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(format!("conservation-dt{dt:e}"), 1);
    c.integrator.dt = dt;
    c.integrator.t_end = 10.0;
    c.integrator.save_every = (0.1 / dt).round() as usize;
    c.initial.amp = 0.5;
    c
}

pub fn soliton_config() -> ScenarioConfig {
    let mut c = ScenarioConfig::new("soliton", -1);
    c.grid.length = 32.0;
    c.integrator.dt = 1e-4;
    c.integrator.save_every = 1000;
    c.initial.preset = Preset::Soliton;
    c
}

/// `1.2 Q` under either sign of the nonlinearity.
pub fn dichotomy_config(mu: i64) -> ScenarioConfig {
    let name = if mu < 0 { "dichotomy-focusing" } else { "dichotomy-defocusing" };
    let mut c = ScenarioConfig::new(name, mu);
    c.grid.length = 32.0;
    c.integrator.dt = 1e-4;
    c.initial.preset = Preset::Soliton;
    c.initial.amp = 1.2;
    c
}

/// Small defocusing Gaussian up to `t = 20`. The box is four times the
/// default at the same spacing so that no mass wraps around it.
pub fn scattering_config() -> ScenarioConfig {
    let mut c = ScenarioConfig::new("scattering", 1);
    c.grid.n = 4096;
    c.grid.length = 256.0 * PI;
    c.integrator.t_end = 20.0;
    c.initial.amp = 0.1;
    c
}

/// Seeded small defocusing Gaussian number `k` of the `L^8` ensemble.
pub fn ensemble_config(seed: u64, k: usize) -> ScenarioConfig {
    let mut rng = member_rng(seed, k as u64);
    let mut c = ScenarioConfig::new(format!("ensemble-{k:02}"), 1);
    c.seed = seed;
    c.integrator.t_end = 4.0;
    c.integrator.save_every = 50;
    let dxi = 2.0 * PI / c.grid.length;
    c.initial.amp = rng.random_range(0.2..0.8);
    c.initial.sigma = rng.random_range(0.5..2.0);
    c.initial.center = rng.random_range(-8.0..8.0);
    c.initial.xi0 = rng.random_range(-16i64..=16) as f64 * dxi;
    c
}

/// Defocusing run whose spectrum stays inside `|xi| <= 2`, with an
/// I-operator that is the identity up to `|xi| = 10`.
pub fn band_limited_config(seed: u64) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(format!("band-limited-{seed}"), 1);
    c.seed = seed;
    c.grid.n = 512;
    c.grid.length = 16.0 * PI;
    c.integrator.t_end = 0.5;
    c.integrator.save_every = 25;
    c.integrator.spectral_cutoff = Some(2.0);
    c.initial.preset = Preset::Random;
    c.initial.amp = 0.8;
    c.initial.band_lo = 0.0;
    c.initial.band_hi = 1.0;
    c.morawetz.i_cutoff = Some(10.0 / 32.0);
    c
}

/// Smallest `M(t)` increment in units of `mass^2 sup_t ||u_x||_inf`.
pub fn monotonicity(out: &RunOutput) -> f64 {
    let Some(first) = out.frames.first() else { return 0.0 };
    let ux = out
        .frames
        .iter()
        .map(|u| derivative(u).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let scale = mass(first).powi(2) * ux;
    if scale == 0.0 {
        0.0
    } else {
        out.summary.min_action_increment / scale
    }
}

fn frame_near(out: &RunOutput, t: f64) -> &Field {
    out.frames
        .iter()
        .min_by(|a, b| (a.time() - t).abs().total_cmp(&(b.time() - t).abs()))
        .expect("runs keep their initial frame")
}

// ---- criteria ----

fn conservation(out: &Path) -> MemberReport {
    measure("conservation", Some(30.0), |c| {
        let (_, coarse) = run_with_output(&conservation_config(1e-3), out)?;
        let (_, fine) = run_with_output(&conservation_config(5e-4), out)?;
        let (a, b) = (&coarse.summary, &fine.summary);
        c.push(Check::holds("completed", completed(a.status) && completed(b.status)));
        c.push(Check::at_most("mass_drift", a.mass_drift, 1e-10));
        c.push(Check::at_most("energy_drift", a.energy_drift, 1e-6));
        c.push(Check::at_most("momentum_drift", a.momentum_drift, 1e-6));
        c.push(Check::within("energy_halving_ratio", a.energy_drift / b.energy_drift, 4.0, 1.0));
        Ok(())
    })
}

fn momentum_order() -> MemberReport {
    measure("conservation-momentum-order", Some(30.0), |c| {
        let coarse = simulate(&conservation_config(1e-3))?.summary;
        let fine = simulate(&conservation_config(5e-4))?.summary;
        c.push(Check::within("momentum_halving_ratio", coarse.momentum_drift / fine.momentum_drift, 4.0, 1.0));
        Ok(())
    })
}

fn soliton(out: &Path) -> MemberReport {
    measure("soliton", Some(60.0), |c| {
        let cfg = soliton_config();
        let q = ground_state(cfg.grid()?)?;
        c.push(Check::at_most("profile_residual", profile_residual(&q), 1e-8));
        let (_, run) = run_with_output(&cfg, out)?;
        c.push(Check::holds("completed", completed(run.summary.status)));
        let last = run.frames.last().expect("initial frame");
        let rotated = q.map(|z| z * Complex64::from_polar(1.0, last.time()))?;
        c.push(Check::at_most("phase_error", last.l2_distance(&rotated)?, 1e-6));
        Ok(())
    })
}

fn dichotomy(out: &Path) -> MemberReport {
    measure("dichotomy", Some(60.0), |c| {
        let focusing = dichotomy_config(-1);
        let q = ground_state(focusing.grid()?)?;
        let u0 = q.scaled(focusing.initial.amp);
        c.push(Check::at_most("energy_over_mass_q", energy(&u0, Nonlinearity::Focusing) / mass(&q), -0.3));
        let (_, f) = run_with_output(&focusing, out)?;
        c.push(Check::holds("focusing_guard_tripped", f.summary.status == Termination::BlowupGuardTripped));
        c.push(Check::at_most("trip_time", f.summary.final_time, 1.0 - focusing.integrator.dt));

        let (_, d) = run_with_output(&dichotomy_config(1), out)?;
        c.push(Check::holds("defocusing_completed", completed(d.summary.status)));
        // 1/2 ||u_x||^2 <= E for the defocusing energy
        let bound = (2.0 * energy(&u0, Nonlinearity::Defocusing) * (1.0 + 1e-6)).sqrt();
        let peak = d.records.iter().map(|r| r.h1).fold(0.0, f64::max);
        c.push(Check::at_most("h1_over_energy_bound", peak / bound, 1.0));
        Ok(())
    })
}

fn scattering(out: &Path) -> MemberReport {
    measure("scattering", Some(60.0), |c| {
        let (_, run) = run_with_output(&scattering_config(), out)?;
        c.push(Check::holds("completed", completed(run.summary.status)));
        let pull = |t: f64| {
            let u = frame_near(&run, t);
            free_propagate(u, -u.time())
        };
        c.push(Check::at_most("pullback_difference", pull(10.0)?.l2_distance(&pull(20.0)?)?, 1e-3));
        c.push(Check::at_most("l6_tail_fraction", run.summary.l6_tail_fraction, 0.01));
        Ok(())
    })
}

/// Direct `O(n^2)` double sum of the action.
fn direct_action(u: &Field, k: &MorawetzKernel, xi: f64) -> f64 {
    let g = u.grid();
    let rho = u.density();
    let p = momentum_density(u, xi);
    let mut s = 0.0;
    for (i, pi) in p.iter().enumerate() {
        for (j, rj) in rho.iter().enumerate() {
            s += k.eval(g.x(i) - g.x(j)) * rj * pi;
        }
    }
    0.5 * s * g.dx() * g.dx()
}

/// Sum of three seeded wave packets at lattice frequencies.
fn packets(g: Grid, seed: u64) -> Result<Field, RunnerError> {
    let mut rng = member_rng(seed, 0);
    let mut u = Field::zeros(g, 0.0);
    for _ in 0..3 {
        let xi = (rng.random_range(-3.0..3.0) / g.dxi()).round() * g.dxi();
        let w = wave_packet(g, rng.random_range(-4.0..4.0), xi, rng.random_range(0.5..1.5), None)?;
        let a = Complex64::new(rng.random_range(0.2..1.0), 0.3);
        u = u.linear_combination(Complex64::new(1.0, 0.0), &w, a)?;
    }
    Ok(u)
}

fn morawetz(out: &Path) -> MemberReport {
    measure("morawetz", Some(600.0), |c| {
        let g = Grid::new(256, 16.0 * PI)?;
        let kernels =
            [MorawetzKernel::default_for(g.dx()), MorawetzKernel::odd_erf(1.3), MorawetzKernel::two_sided_erf(0.7), MorawetzKernel::sign()];
        let mut oracle_gap = 0.0f64;
        for seed in 0..3 {
            let u = packets(g, seed)?;
            for k in &kernels {
                for xi in [0.0, 0.75] {
                    oracle_gap = oracle_gap.max((interaction_action(&u, k, xi) - direct_action(&u, k, xi)).abs());
                }
            }
        }
        c.push(Check::at_most("direct_sum_gap", oracle_gap, 1e-10));

        let g = Grid::new(512, 16.0 * PI)?;
        let u = packets(g, 11)?;
        let k = MorawetzKernel::default_for(g.dx());
        let base = interaction_action(&u, &k, 0.0);
        let shift_gap = [-3.0, 0.4, 2.5, 17.0].iter().map(|xi| (interaction_action(&u, &k, *xi) - base).abs()).fold(0.0, f64::max);
        c.push(Check::at_most("shift_gap", shift_gap, 1e-10));

        let mut worst = f64::INFINITY;
        let mut runs = 0usize;
        let mut track_min = |o: &RunOutput| {
            worst = worst.min(monotonicity(o));
            runs += 1;
        };
        for cfg in [conservation_config(1e-3), conservation_config(5e-4), scattering_config(), dichotomy_config(1)] {
            track_min(&simulate(&cfg)?);
        }

        let mut l8_max = 0.0f64;
        let mut finite = true;
        for k in 0..ENSEMBLE_SIZE {
            let (_, o) = run_with_output(&ensemble_config(ENSEMBLE_SEED, k), out)?;
            let r = o.summary.l8.expect("defocusing runs carry L8 ratios");
            finite &= r.energy_ratio.is_finite() && r.action_ratio.is_finite() && completed(o.summary.status);
            l8_max = l8_max.max(r.energy_ratio).max(r.action_ratio);
            track_min(&o);
        }

        let mut err_max = 0.0f64;
        for seed in [1, 2] {
            let (_, o) = run_with_output(&band_limited_config(seed), out)?;
            let e = o.summary.error_terms.as_ref().expect("runs have several frames");
            err_max = err_max.max(e.e1.abs()).max(e.e2.abs()).max(e.e3.abs());
            track_min(&o);
        }

        c.push(Check::at_least(format!("min_dM_over_scale[{runs} runs]"), worst, -1e-6));
        c.push(Check::holds("l8_ratios_finite", finite));
        c.push(Check::at_most("l8_ratio_max", l8_max, L8_CONSTANT));
        c.push(Check::at_most("error_terms_max", err_max, 1e-10));
        Ok(())
    })
}

fn symmetry() -> MemberReport {
    measure("symmetry", Some(120.0), |c| {
        let g = Grid::new(1024, 64.0 * PI)?;
        let u0 = Field::from_real_fn(g, 0.0, |x| 0.5 * (-x * x).exp())?;
        let traj = solve(&u0, &IntegratorConfig::new(Nonlinearity::Defocusing, 1e-3, 2.0).with_save_every(100))?;
        c.push(Check::at_most("galilean_diagram", boost_trajectory_check(&traj, GalileanBoost::new(1.0))?, 1e-6));

        let fields = [
            Field::from_fn(g, 0.0, |x| Complex64::from_polar((-x * x / 3.0).exp(), 0.5 * x))?,
            random_band_limited(g, &mut member_rng(3, 0), 0.0, 4.0, &ProjectorSpec::Band { lo: 1.0, hi: 8.0 })?,
        ];
        let mut mass_gap = 0.0f64;
        for u in &fields {
            for lambda in [0.5, 2.0, 4.0] {
                let v = apply_scaling(u, ScalingMap::new(lambda)?)?;
                mass_gap = mass_gap.max((mass(&v) - mass(u)).abs() / mass(u));
            }
        }
        c.push(Check::at_most("scaling_mass_gap", mass_gap, 1e-12));

        let p = ConcentrationParams::default();
        let g = Grid::new(256, 32.0 * PI)?;
        let u = Field::from_real_fn(g, 0.0, |x| (-x * x / 2.0).exp() * (1.0 + 0.3 * x))?;
        let a = track(&u, &p)?;
        let xi0 = 12.0 * g.dxi();
        let b = track(&apply_boost(&u, GalileanBoost::new(xi0))?, &p)?;
        let boost_gap = [(b.xi_center - a.xi_center - xi0).abs(), (b.xi_radius - a.xi_radius).abs(), (b.x_radius - a.x_radius).abs(), (b.x_center - a.x_center).abs()]
            .into_iter()
            .fold(0.0, f64::max);
        c.push(Check::at_most("tracker_boost_gap", boost_gap, 1e-12));

        let u = Field::from_fn(g, 0.0, |x| Complex64::from_polar((-x * x / 3.0).exp(), 0.5 * x))?;
        let a = track(&u, &p)?;
        let mut dilation_gap = 0.0f64;
        for lambda in [0.5, 2.0, 4.0] {
            let b = track(&apply_scaling(&u, ScalingMap::new(lambda)?)?, &p)?;
            dilation_gap = dilation_gap
                .max((b.x_radius / (lambda * a.x_radius) - 1.0).abs())
                .max((b.xi_radius * lambda / a.xi_radius - 1.0).abs())
                .max((b.n_t * lambda / a.n_t - 1.0).abs());
        }
        c.push(Check::at_most("tracker_dilation_gap", dilation_gap, 1e-12));
        Ok(())
    })
}

fn variant_name(v: BilinearVariant) -> &'static str {
    match v {
        BilinearVariant::Projected => "projected",
        BilinearVariant::Separated => "separated",
    }
}

/// Both bilinear sweeps; the rows go to `bilinear_sweep.csv`.
pub fn bilinear_rows(seed: u64) -> Result<Vec<BilinearRow>, RunnerError> {
    let setup = BilinearSetup::default();
    let mut rows = Vec::new();
    for v in [BilinearVariant::Projected, BilinearVariant::Separated] {
        let est = BILINEAR_SCALES
            .iter()
            .map(|&n| bilinear_constant(n, v, &setup, STRICHARTZ_ENSEMBLE, seed))
            .collect::<Result<Vec<_>, _>>()?;
        let lx: Vec<f64> = BILINEAR_SCALES.iter().map(|n| n.ln()).collect();
        let ly: Vec<f64> = est.iter().map(|e| e.max.ln()).collect();
        let slope = fit_slope(&lx, &ly);
        rows.extend(BILINEAR_SCALES.iter().zip(&est).map(|(&n, e)| BilinearRow {
            variant: variant_name(v).into(),
            n,
            constant: e.max,
            ensemble_mean: e.mean,
            ensemble_size: STRICHARTZ_ENSEMBLE,
            slope,
        }));
    }
    Ok(rows)
}

/// Interpolation sweep rows; `N` holds the scale ratio `N1 / N2`.
pub fn interp_rows(seed: u64) -> Result<Vec<BilinearRow>, RunnerError> {
    let s = interp_sweep(INTERP_HIGH, &INTERP_RATIOS, &InterpSetup::default(), STRICHARTZ_ENSEMBLE, seed)?;
    Ok(s.scales
        .iter()
        .zip(&s.constants)
        .map(|(&n, &constant)| BilinearRow {
            variant: "interpolation".into(),
            n,
            constant,
            ensemble_mean: f64::NAN,
            ensemble_size: STRICHARTZ_ENSEMBLE,
            slope: s.slope,
        })
        .collect())
}

fn slope_of(rows: &[BilinearRow], variant: &str) -> f64 {
    rows.iter().find(|r| r.variant == variant).map_or(f64::NAN, |r| r.slope)
}

fn save_rows(out: &Path, name: &str, rows: &[BilinearRow]) -> Result<(), RunnerError> {
    fs::create_dir_all(out).map_err(|e| RunnerError::io(out, e))?;
    let path = out.join(name);
    let file = File::create(&path).map_err(|e| RunnerError::io(&path, e))?;
    write_bilinear(BufWriter::new(file), rows).map_err(|e| RunnerError::io(&path, e))
}

/// `(p, q, admissible)` with the verdict taken from exact arithmetic.
pub const ADMISSIBILITY_TABLE: [(f64, f64, bool); 12] = [
    (4.0, f64::INFINITY, true),
    (5.0, 10.0, true),
    (6.0, 6.0, true),
    (8.0, 4.0, true),
    (12.0, 3.0, true),
    (f64::INFINITY, 2.0, true),
    (2.0, f64::INFINITY, false),
    (4.0, 4.0, false),
    (6.0, 4.0, false),
    (3.0, 6.0, false),
    (8.0, 8.0, false),
    (1.0, 1.0, false),
];

fn admissibility_mismatches() -> usize {
    ADMISSIBILITY_TABLE.iter().filter(|(p, q, ok)| is_admissible(*p, *q) != *ok).count()
}

fn strichartz(out: &Path) -> MemberReport {
    measure("strichartz", Some(300.0), |c| {
        let rows = bilinear_rows(STRICHARTZ_SEED)?;
        save_rows(out, "bilinear_sweep.csv", &rows)?;
        c.push(Check::within("projected_slope", slope_of(&rows, "projected"), -0.5, 0.15));
        c.push(Check::within("separated_slope", slope_of(&rows, "separated"), -0.5, 0.15));
        let interp = interp_rows(STRICHARTZ_SEED)?;
        save_rows(out, "interp_sweep.csv", &interp)?;
        c.push(Check::within("interp_exponent", slope_of(&interp, "interpolation"), 0.25, 0.1));
        c.push(Check::at_most("admissibility_mismatches", admissibility_mismatches() as f64, 0.0));
        Ok(())
    })
}

pub fn strichartz_members() -> Vec<Member> {
    vec![
        Member::new("bilinear", |out: &Path| {
            measure("bilinear", None, |c| {
                let rows = bilinear_rows(STRICHARTZ_SEED)?;
                save_rows(out, "bilinear_sweep.csv", &rows)?;
                c.push(Check::within("projected_slope", slope_of(&rows, "projected"), -0.5, 0.15));
                c.push(Check::within("separated_slope", slope_of(&rows, "separated"), -0.5, 0.15));
                Ok(())
            })
        }),
        Member::new("interpolation", |out: &Path| {
            measure("interpolation", None, |c| {
                let rows = interp_rows(STRICHARTZ_SEED)?;
                save_rows(out, "interp_sweep.csv", &rows)?;
                c.push(Check::within("interp_exponent", slope_of(&rows, "interpolation"), 0.25, 0.1));
                Ok(())
            })
        }),
        Member::new("seed-stability", |_: &Path| {
            measure("seed-stability", None, |c| {
                let a = bilinear_rows(STRICHARTZ_SEED)?;
                let b = bilinear_rows(STRICHARTZ_SEED + 1)?;
                for v in ["projected", "separated"] {
                    c.push(Check::at_most(format!("{v}_slope_spread"), (slope_of(&a, v) - slope_of(&b, v)).abs(), 0.05));
                }
                Ok(())
            })
        }),
        Member::new("admissibility", |_: &Path| {
            measure("admissibility", None, |c| {
                c.push(Check::at_most("admissibility_mismatches", admissibility_mismatches() as f64, 0.0));
                Ok(())
            })
        }),
    ]
}

pub fn ensemble_members(seed: u64) -> Vec<Member> {
    (0..ENSEMBLE_SIZE)
        .map(|k| {
            let name = format!("ensemble-{k:02}");
            Member::new(name.clone(), move |out: &Path| {
                measure(&name, None, |c| {
                    let (_, o) = run_with_output(&ensemble_config(seed, k), out)?;
                    let r = o.summary.l8.expect("defocusing runs carry L8 ratios");
                    c.push(Check::holds("completed", completed(o.summary.status)));
                    c.push(Check::at_most("l8_energy_ratio", r.energy_ratio, L8_CONSTANT));
                    c.push(Check::at_most("l8_action_ratio", r.action_ratio, L8_CONSTANT));
                    c.push(Check::at_least("min_dM_over_scale", monotonicity(&o), -1e-6));
                    Ok(())
                })
            })
        })
        .collect()
}

// ---- concentration oracle ----

/// Captured mass of the window `[c - r, c + r]`, in cell units, from the
/// explicit overlap of every cell with the window.
fn captured(masses: &[f64], c: usize, r: f64, periodic: bool) -> f64 {
    let n = masses.len() as i64;
    let mut s = 0.0;
    for d in -(n / 2)..=(n / 2) {
        let j = c as i64 + d;
        let idx = if periodic {
            if d == n / 2 {
                continue;
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

/// Bisection for the radius at every center; the leftmost of the tied
/// minima wins.
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
    let c = radii.iter().position(|&r| r <= best * (1.0 + 1e-9)).expect("some window captures the target");
    (c, radii[c])
}

/// Center mismatches and the largest radius gap in cells against the
/// exhaustive search.
fn oracle_gaps(u: &Field, eta: f64) -> Result<(usize, f64), RunnerError> {
    let g = u.grid();
    let n = g.n();
    let s = track(u, &ConcentrationParams::new(eta, 1.0, 0.1)?)?;
    let xm: Vec<f64> = u.density().iter().map(|r| r * g.dx()).collect();
    let (cx, rx) = exhaustive(&xm, (1.0 - eta) * xm.iter().sum::<f64>(), true);
    let modes = forward_transform(u).mode_masses();
    let ordered: Vec<f64> = (0..n).map(|i| modes[(i + n / 2) % n]).collect();
    let (cf, rf) = exhaustive(&ordered, (1.0 - eta) * ordered.iter().sum::<f64>(), false);
    let misses = usize::from(s.x_center != g.x(cx)) + usize::from(s.xi_center != (cf as f64 - (n / 2) as f64) * g.dxi());
    let gap = (s.x_radius / g.dx() - rx).abs().max((s.xi_radius / g.dxi() - rf).abs());
    Ok((misses, gap))
}

fn partition_cuts(u0: &Field, every: usize, p: &ConcentrationParams) -> Result<Vec<SmallInterval>, RunnerError> {
    let traj = solve(u0, &IntegratorConfig::new(Nonlinearity::Defocusing, 1e-3, 2.0).with_save_every(every))?;
    let track = track_series(traj.frames(), p)?;
    Ok(partition_small_intervals(traj.frames(), &track, p)?)
}

fn concentration() -> MemberReport {
    measure("concentration", Some(60.0), |c| {
        let mut cases: Vec<(Field, f64)> = Vec::new();
        let g = Grid::new(128, 16.0)?;
        let two = Field::from_fn(g, 0.0, |x| {
            Complex64::from_polar((-(x - 2.0).powi(2)).exp() + 0.6 * (-(x + 3.0).powi(2) * 2.0).exp(), 1.5 * x)
        })?;
        for eta in [0.05, 0.1, 0.3] {
            cases.push((two.clone(), eta));
        }
        // spikes half a box apart: the two midway windows tie
        let g = Grid::new(64, 32.0)?;
        let mut spikes = vec![Complex64::new(0.0, 0.0); 64];
        spikes[10] = Complex64::new(1.0, 0.0);
        spikes[42] = Complex64::new(1.0, 0.0);
        cases.push((Field::new(g, spikes, 0.0)?, 0.45));
        let g = Grid::new(256, 32.0 * PI)?;
        cases.push((random_band_limited(g, &mut member_rng(5, 0), 0.0, 4.0, &ProjectorSpec::Band { lo: 1.0, hi: 8.0 })?, 0.1));

        let (mut misses, mut gap) = (0usize, 0.0f64);
        for (u, eta) in &cases {
            let (m, r) = oracle_gaps(u, *eta)?;
            misses += m;
            gap = gap.max(r);
        }
        c.push(Check::at_most("center_mismatches", misses as f64, 0.0));
        c.push(Check::at_most("radius_gap_cells", gap, 1e-9));

        let g = Grid::new(1024, 64.0 * PI)?;
        let u0 = Field::from_real_fn(g, 0.0, |x| 0.8 * (-x * x).exp())?;
        let p = ConcentrationParams::new(0.1, 1.0, 0.3)?;
        let coarse = partition_cuts(&u0, 40, &p)?;
        let fine = partition_cuts(&u0, 20, &p)?;
        c.push(Check::holds("partition_repeatable", coarse == partition_cuts(&u0, 40, &p)?));
        c.push(Check::holds("same_interval_count", coarse.len() == fine.len() && coarse.len() > 2));
        let shift = coarse.iter().zip(&fine).map(|(a, b)| (a.end - b.end).abs()).fold(0.0, f64::max);
        c.push(Check::at_most("cut_shift_over_gap", shift / 0.04, 1.0));
        Ok(())
    })
}

// ---- determinism ----

fn determinism_config() -> ScenarioConfig {
    let mut c = ScenarioConfig::new("determinism", 1);
    c.seed = 11;
    c.grid.n = 512;
    c.grid.length = 32.0 * PI;
    c.integrator.save_every = 20;
    c.initial.preset = Preset::Random;
    c.initial.amp = 0.7;
    c
}

fn read(path: &Path) -> Result<Vec<u8>, RunnerError> {
    fs::read(path).map_err(|e| RunnerError::io(path, e))
}

fn determinism(out: &Path) -> MemberReport {
    measure("determinism", None, |c| {
        let root = out.join("determinism");
        let cfg = determinism_config();
        let a = crate::run(&cfg, &root.join("first"))?;
        let b = crate::run(&cfg, &root.join("second"))?;
        c.push(Check::holds("csv_identical", read(&a.csv)? == read(&b.csv)?));

        let members: Vec<Member> = ensemble_members(ENSEMBLE_SEED).into_iter().take(4).collect();
        let serial = run_members(&members, 1, &root.join("jobs1"))?;
        let parallel = run_members(&members, 4, &root.join("jobs4"))?;
        let same_checks = serial.iter().map(|m| &m.checks).eq(parallel.iter().map(|m| &m.checks));
        let mut same_files = true;
        for k in 0..members.len() {
            let name = format!("ensemble-{k:02}.csv");
            same_files &= read(&root.join("jobs1").join(&name))? == read(&root.join("jobs4").join(&name))?;
        }
        c.push(Check::holds("serial_parallel_identical", same_checks && same_files));
        Ok(())
    })
}
