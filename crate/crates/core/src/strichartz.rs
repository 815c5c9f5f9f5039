//! Admissible exponents and Monte-Carlo estimates of linear and bilinear
//! Strichartz constants for the free flow.
//!
//! Free evolution is exact on the lattice, so every estimate is a sampled
//! space-time integral over an explicit time grid. Ensemble maxima are lower
//! bounds for the true suprema.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::functionals::{lebesgue_norm, lebesgue_norm_pow, mass};
use crate::quadrature::{fit_slope, trapezoid};
use crate::spectral::fourier::{fft_in_place, ifft_in_place};
use crate::spectral::propagator::free_symbol;
use crate::spectral::{forward_transform, project, Field, Grid, ProjectorSpec};

/// `2/p = 1/2 - 1/q` within `1e-12` and `p >= 4`.
pub fn is_admissible(p: f64, q: f64) -> bool {
    if !(p >= 1.0 && q >= 1.0) {
        return false;
    }
    p >= 4.0 && (2.0 / p - (0.5 - 1.0 / q)).abs() <= 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissiblePair {
    p: f64,
    q: f64,
}

impl AdmissiblePair {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !is_admissible(p, q) {
            return Err(Error::Exponent(format!("({p}, {q}) is not an admissible pair")));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Evaluates `e^{it Delta} u0` at arbitrary times from one forward transform.
pub struct FreeFlow {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl FreeFlow {
    pub fn new(u0: &Field) -> Self {
        Self { grid: *u0.grid(), coeffs: forward_transform(u0).coeffs().to_vec() }
    }

    pub fn at(&self, t: f64) -> Field {
        let sym = free_symbol(&self.grid, t);
        let mut buf: Vec<Complex64> = self.coeffs.iter().zip(sym).map(|(c, s)| c * s).collect();
        ifft_in_place(&mut buf);
        Field::new(self.grid, buf, t).expect("free evolution of finite data is finite")
    }
}

/// Symmetric grid `t = +-scale * sinh(k h)` reaching `t_max`, dense near 0
/// and geometric in the tails.
pub fn sinh_times(scale: f64, t_max: f64, per_side: usize) -> Vec<f64> {
    let h = (t_max / scale).asinh() / per_side as f64;
    let half: Vec<f64> = (1..=per_side).map(|k| scale * (k as f64 * h).sinh()).collect();
    half.iter().rev().map(|t| -t).chain(std::iter::once(0.0)).chain(half.iter().copied()).collect()
}

pub fn uniform_times(t_max: f64, points: usize) -> Vec<f64> {
    let m = points.max(3) - 1;
    (0..=m).map(|k| -t_max + 2.0 * t_max * k as f64 / m as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeValue {
    pub norm: f64,
    /// Share of `int ||u||_q^p dt` coming from `|t| >= t_max / 2`; it
    /// approximates the share lost beyond the window for `t^{-2}` decay.
    pub tail_fraction: f64,
}

/// `||g(t)||_{L^p_t(times) L^q_x}` for a field-valued map sampled on `times`.
fn sampled_norm(times: &[f64], p: f64, values: impl Fn(f64) -> f64) -> SpaceTimeValue {
    let per_t: Vec<f64> = times.iter().map(|&t| values(t)).collect();
    if p.is_infinite() {
        return SpaceTimeValue { norm: per_t.iter().copied().fold(0.0, f64::max), tail_fraction: 0.0 };
    }
    let integrand: Vec<f64> = per_t.iter().map(|v| v.powf(p)).collect();
    let total = trapezoid(times, &integrand);
    let t_max = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let tail: f64 = times
        .windows(2)
        .zip(integrand.windows(2))
        .filter(|(t, _)| t[0].abs() >= 0.5 * t_max && t[1].abs() >= 0.5 * t_max)
        .map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1]))
        .sum();
    SpaceTimeValue {
        norm: total.powf(1.0 / p),
        tail_fraction: if total > 0.0 { tail / total } else { 0.0 },
    }
}

/// `||e^{it Delta} u0||_{L^p_t L^q_x}` over `times`.
pub fn free_spacetime_norm(u0: &Field, times: &[f64], p: f64, q: f64) -> SpaceTimeValue {
    let flow = FreeFlow::new(u0);
    sampled_norm(times, p, |t| lebesgue_norm(&flow.at(t), q))
}

/// Complex Gaussian noise under a Gaussian envelope, projected and scaled to
/// unit mass. A projector that annihilates the noise gives the zero field.
pub fn random_band_limited(
    grid: Grid,
    rng: &mut impl Rng,
    center: f64,
    envelope: f64,
    spec: &ProjectorSpec,
) -> Result<Field> {
    let samples: Vec<Complex64> = grid
        .xs()
        .iter()
        .map(|x| {
            let w = (-(x - center).powi(2) / (2.0 * envelope * envelope)).exp();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * w
        })
        .collect();
    normalized(project(&Field::new(grid, samples, 0.0)?, spec)?)
}

/// Projected Gaussian packet `e^{i xi0 x} e^{-(x - x0)^2 / (2 w^2)}` of unit
/// mass.
pub fn wave_packet(grid: Grid, x0: f64, xi0: f64, width: f64, spec: Option<&ProjectorSpec>) -> Result<Field> {
    let u = Field::from_fn(grid, 0.0, |x| {
        Complex64::from_polar((-(x - x0).powi(2) / (2.0 * width * width)).exp(), xi0 * x)
    })?;
    let u = match spec {
        Some(s) => project(&u, s)?,
        None => u,
    };
    normalized(u)
}

fn normalized(u: Field) -> Result<Field> {
    let m = mass(&u);
    if m == 0.0 {
        Ok(u)
    } else {
        Ok(u.scaled(m.sqrt().recip()))
    }
}

/// Independent generator for ensemble member `k`; identical for serial and
/// parallel execution.
pub fn member_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleEstimate {
    pub ratios: Vec<f64>,
    /// Running maximum in member order.
    pub running_max: Vec<f64>,
    pub max: f64,
    pub mean: f64,
    /// Largest tail share over the members.
    pub max_tail: f64,
}

impl EnsembleEstimate {
    fn from_members(members: Vec<(f64, f64)>) -> Self {
        let ratios: Vec<f64> = members.iter().map(|m| m.0).collect();
        let mut running_max = Vec::with_capacity(ratios.len());
        let mut best = 0.0f64;
        for r in &ratios {
            best = best.max(*r);
            running_max.push(best);
        }
        let mean = if ratios.is_empty() { 0.0 } else { ratios.iter().sum::<f64>() / ratios.len() as f64 };
        Self {
            max: best,
            mean,
            max_tail: members.iter().map(|m| m.1).fold(0.0, f64::max),
            ratios,
            running_max,
        }
    }
}

/// Box, data and time window for linear estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSetup {
    pub grid: Grid,
    /// Data are projected with `P_{<= band}`.
    pub band: f64,
    pub envelope: f64,
    pub time_scale: f64,
    pub t_max: f64,
    pub per_side: usize,
}

impl Default for LinearSetup {
    fn default() -> Self {
        Self {
            grid: Grid::new(8192, 4096.0).expect("valid default grid"),
            band: 1.0,
            envelope: 2.0,
            time_scale: 1.0,
            t_max: 256.0,
            per_side: 300,
        }
    }
}

impl LinearSetup {
    pub fn times(&self) -> Vec<f64> {
        sinh_times(self.time_scale, self.t_max, self.per_side)
    }
}

/// `||e^{it Delta} u0||_{L^p_t L^q_x} / ||u0||_2`, with the tail share.
pub fn linear_ratio(u0: &Field, pair: AdmissiblePair, times: &[f64]) -> SpaceTimeValue {
    let m = mass(u0);
    if m == 0.0 {
        return SpaceTimeValue { norm: 0.0, tail_fraction: 0.0 };
    }
    let v = free_spacetime_norm(u0, times, pair.p, pair.q);
    SpaceTimeValue { norm: v.norm / m.sqrt(), ..v }
}

/// Ensemble estimate of the linear constant. Member 0 is the Gaussian
/// `e^{-x^2 / (2 envelope^2)}`; the rest are random band-limited fields.
pub fn linear_constant(pair: AdmissiblePair, setup: &LinearSetup, ensemble: usize, seed: u64) -> Result<EnsembleEstimate> {
    let times = setup.times();
    let members: Result<Vec<(f64, f64)>> = (0..ensemble)
        .into_par_iter()
        .map(|k| {
            let u0 = if k == 0 {
                wave_packet(setup.grid, 0.0, 0.0, setup.envelope, None)?
            } else {
                let mut rng = member_rng(seed, k as u64);
                random_band_limited(setup.grid, &mut rng, 0.0, setup.envelope, &ProjectorSpec::Low(setup.band))?
            };
            let v = linear_ratio(&u0, pair, &times);
            Ok((v.norm, v.tail_fraction))
        })
        .collect();
    Ok(EnsembleEstimate::from_members(members?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BilinearVariant {
    /// `||P_N((e^{it Delta} u0)(e^{-it Delta} v0))||_{L^2_{t,x}}` with both
    /// spectra near `+N`, so the product sits at `2N`.
    Projected,
    /// `||(e^{it Delta} u0)(e^{it Delta} v0)||_{L^2_{t,x}}` with spectral
    /// supports a distance `N` apart.
    Separated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearSetup {
    pub length: f64,
    /// Half-width of each data spectrum.
    pub band: f64,
    pub envelope: f64,
    /// Window is `|t| <= span / N`.
    pub span: f64,
    pub time_points: usize,
    pub max_n: usize,
}

impl Default for BilinearSetup {
    fn default() -> Self {
        Self { length: 32.0 * PI, band: 1.0, envelope: 3.0, span: 12.0, time_points: 257, max_n: 1 << 15 }
    }
}

/// Smallest power-of-two grid on `length` whose Nyquist frequency exceeds
/// `1.25 * top`.
fn grid_for(length: f64, top: f64, max_n: usize) -> Result<Grid> {
    let need = (1.25 * top * length / PI).ceil() as usize;
    let n = need.next_power_of_two().max(64);
    if n > max_n {
        return Err(Error::Parameter(format!(
            "frequency {top} needs {n} grid points, above the limit {max_n}"
        )));
    }
    Grid::new(n, length)
}

/// Bilinear ratio for given data and scale on a prepared time grid.
pub fn bilinear_ratio(u0: &Field, v0: &Field, scale: f64, variant: BilinearVariant, times: &[f64]) -> Result<f64> {
    if u0.grid() != v0.grid() {
        return Err(Error::GridMismatch);
    }
    let norms = mass(u0).sqrt() * mass(v0).sqrt();
    if norms == 0.0 {
        return Ok(0.0);
    }
    let grid = *u0.grid();
    let fu = FreeFlow::new(u0);
    let fv = FreeFlow::new(v0);
    let proj = match variant {
        BilinearVariant::Projected => Some(ProjectorSpec::Dyadic(scale).multiplier(&grid)?),
        BilinearVariant::Separated => None,
    };
    let value = sampled_norm(times, 2.0, |t| {
        let a = fu.at(t);
        let b = match variant {
            BilinearVariant::Projected => fv.at(-t),
            BilinearVariant::Separated => fv.at(t),
        };
        let mut prod: Vec<Complex64> = a.samples().iter().zip(b.samples()).map(|(x, y)| x * y).collect();
        if let Some(m) = &proj {
            fft_in_place(&mut prod);
            prod.iter_mut().zip(m).for_each(|(c, s)| *c *= s);
            ifft_in_place(&mut prod);
        }
        (prod.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx()).sqrt()
    });
    Ok(value.norm / norms)
}

/// Data pair for member `k` at scale `n`.
fn bilinear_pair(n: f64, variant: BilinearVariant, setup: &BilinearSetup, grid: Grid, seed: u64, k: usize) -> Result<(Field, Field)> {
    let inner = ProjectorSpec::Low(0.5 * setup.band);
    let (cu, cv) = match variant {
        BilinearVariant::Projected => (n, n),
        BilinearVariant::Separated => (-(0.5 * n + setup.band), 0.5 * n + setup.band),
    };
    let su = ProjectorSpec::shifted(cu, inner.clone());
    let sv = ProjectorSpec::shifted(cv, inner);
    if k == 0 {
        let w = setup.envelope;
        return Ok((wave_packet(grid, 0.0, cu, w, Some(&su))?, wave_packet(grid, 0.0, cv, w, Some(&sv))?));
    }
    let mut rng = member_rng(seed, k as u64);
    let u = random_band_limited(grid, &mut rng, 0.0, setup.envelope, &su)?;
    let v = random_band_limited(grid, &mut rng, 0.0, setup.envelope, &sv)?;
    Ok((u, v))
}

pub fn bilinear_constant(n: f64, variant: BilinearVariant, setup: &BilinearSetup, ensemble: usize, seed: u64) -> Result<EnsembleEstimate> {
    let top = match variant {
        BilinearVariant::Projected => 4.0 * n + 2.0 * setup.band,
        BilinearVariant::Separated => 0.5 * n + 3.0 * setup.band,
    };
    let grid = grid_for(setup.length, top, setup.max_n)?;
    let times = uniform_times(setup.span / n, setup.time_points);
    let members: Result<Vec<(f64, f64)>> = (0..ensemble)
        .into_par_iter()
        .map(|k| {
            let (u, v) = bilinear_pair(n, variant, setup, grid, seed, k)?;
            Ok((bilinear_ratio(&u, &v, n, variant, &times)?, 0.0))
        })
        .collect();
    Ok(EnsembleEstimate::from_members(members?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSweep {
    pub scales: Vec<f64>,
    pub constants: Vec<f64>,
    /// Least-squares slope of `log constant` against `log scale`.
    pub slope: f64,
}

pub fn bilinear_decay(ns: &[f64], variant: BilinearVariant, setup: &BilinearSetup, ensemble: usize, seed: u64) -> Result<ScaleSweep> {
    let constants = ns
        .iter()
        .map(|&n| bilinear_constant(n, variant, setup, ensemble, seed).map(|e| e.max))
        .collect::<Result<Vec<f64>>>()?;
    Ok(sweep(ns.to_vec(), constants))
}

fn sweep(scales: Vec<f64>, constants: Vec<f64>) -> ScaleSweep {
    let lx: Vec<f64> = scales.iter().map(|s| s.ln()).collect();
    let ly: Vec<f64> = constants.iter().map(|c| c.ln()).collect();
    let slope = if constants.iter().all(|c| *c > 0.0) { fit_slope(&lx, &ly) } else { f64::NAN };
    ScaleSweep { scales, constants, slope }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpSetup {
    pub time_points: usize,
    /// Window is `|t| <= span / (N1 N2)`.
    pub span: f64,
    pub max_n: usize,
}

impl Default for InterpSetup {
    fn default() -> Self {
        Self { time_points: 257, span: 6.0, max_n: 1 << 16 }
    }
}

/// Smallest separation ratio `N2 / N1` accepted by [`interp_bilinear`].
pub const MIN_SEPARATION: f64 = 16.0;

/// `||(e^{it Delta} u0)(e^{it Delta} v0)||_{L^3_{t,x}} / (||u0|| ||v0||)`
/// maximized over packets at scales `N1 << N2`. The order of the two scales
/// does not matter.
pub fn interp_bilinear(n1: f64, n2: f64, setup: &InterpSetup, ensemble: usize, seed: u64) -> Result<f64> {
    let (lo, hi) = if n1 <= n2 { (n1, n2) } else { (n2, n1) };
    if !(lo > 0.0) || hi / lo < MIN_SEPARATION {
        return Err(Error::Parameter(format!(
            "scales {lo} and {hi} must be separated by a factor of at least {MIN_SEPARATION}"
        )));
    }
    // slow packet extent ~ 6 / lo; the fast one crosses it within the window
    let length = 2f64.powi((64.0 / (lo * PI)).log2().ceil() as i32) * PI;
    let grid = grid_for(length, 4.0 * hi + 4.0 * lo, setup.max_n)?;
    let times = uniform_times(setup.span / (lo * hi), setup.time_points);
    let members: Result<Vec<(f64, f64)>> = (0..ensemble)
        .into_par_iter()
        .map(|k| {
            let mut rng = member_rng(seed, k as u64);
            let (shift, f_lo, f_hi) = if k == 0 {
                (0.0, 2.0, 2.0)
            } else {
                (rng.random_range(-1.0..1.0) / lo, rng.random_range(1.5..3.0), rng.random_range(1.5..3.0))
            };
            let u = wave_packet(grid, 0.0, snap(&grid, f_lo * lo), 2.0 / lo, Some(&ProjectorSpec::Dyadic(lo)))?;
            let v = wave_packet(grid, shift, snap(&grid, f_hi * hi), 2.0 / hi, Some(&ProjectorSpec::Dyadic(hi)))?;
            Ok((product_l3(&u, &v, &times), 0.0))
        })
        .collect();
    Ok(EnsembleEstimate::from_members(members?).max)
}

fn snap(grid: &Grid, xi: f64) -> f64 {
    (xi / grid.dxi()).round() * grid.dxi()
}

fn product_l3(u: &Field, v: &Field, times: &[f64]) -> f64 {
    let norms = mass(u).sqrt() * mass(v).sqrt();
    if norms == 0.0 {
        return 0.0;
    }
    let fu = FreeFlow::new(u);
    let fv = FreeFlow::new(v);
    let dx = u.grid().dx();
    sampled_norm(times, 3.0, |t| {
        let a = fu.at(t);
        let b = fv.at(t);
        let s: f64 = a.samples().iter().zip(b.samples()).map(|(x, y)| (x * y).norm().powi(3)).sum();
        (s * dx).cbrt()
    })
    .norm
        / norms
}

/// Constants at `N1 = n2 / r` for each ratio `r`, and the fitted exponent of
/// `N1 / N2`.
pub fn interp_sweep(n2: f64, ratios: &[f64], setup: &InterpSetup, ensemble: usize, seed: u64) -> Result<ScaleSweep> {
    let constants = ratios
        .iter()
        .map(|r| interp_bilinear(n2 / r, n2, setup, ensemble, seed))
        .collect::<Result<Vec<f64>>>()?;
    Ok(sweep(ratios.iter().map(|r| 1.0 / r).collect(), constants))
}

/// `int |u|^q dx` of the free evolution at one time; exposed for probes.
pub fn free_lebesgue_pow(u0: &Field, t: f64, q: f64) -> f64 {
    lebesgue_norm_pow(&FreeFlow::new(u0).at(t), q)
}
