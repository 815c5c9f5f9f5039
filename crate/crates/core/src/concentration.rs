//! Operational concentration trackers `x(t)`, `xi(t)`, `N(t)` and the
//! small-interval bookkeeping built on them.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functionals::{lebesgue_norm_pow, running_spacetime_integral};
use crate::quadrature::{interpolate, trapezoid};
use crate::spectral::{forward_transform, Field};

/// Relative slack under which two window radii count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationParams {
    pub eta: f64,
    pub c_eta: f64,
    pub eps0: f64,
}

impl Default for ConcentrationParams {
    fn default() -> Self {
        Self { eta: 0.1, c_eta: 1.0, eps0: 0.1 }
    }
}

impl ConcentrationParams {
    pub fn new(eta: f64, c_eta: f64, eps0: f64) -> Result<Self> {
        let p = Self { eta, c_eta, eps0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 0.5) {
            return Err(Error::Parameter(format!("eta must lie in (0, 1/2), got {}", self.eta)));
        }
        if !(self.c_eta > 0.0 && self.c_eta.is_finite()) {
            return Err(Error::Parameter(format!("C_eta must be positive, got {}", self.c_eta)));
        }
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return Err(Error::Parameter(format!("eps0 must be positive, got {}", self.eps0)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerSample {
    pub t: f64,
    pub x_center: f64,
    pub x_radius: f64,
    pub xi_center: f64,
    pub xi_radius: f64,
    pub n_t: f64,
}

/// Minimal window of sample cells capturing `target` mass.
///
/// Each sample owns a cell of unit width with uniform density, so the mass
/// captured by a window of half-width `r` (in cell units) is piecewise linear
/// in `r`. Returns `(center, radius)` for the smallest radius, taking the
/// first center in index order among ties.
pub fn minimal_window(masses: &[f64], target: f64, periodic: bool) -> (usize, f64) {
    let n = masses.len();
    let radii: Vec<f64> = if periodic {
        let mut prefix = Vec::with_capacity(3 * n + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for i in 0..3 * n {
            acc += masses[i % n];
            prefix.push(acc);
        }
        let total: f64 = masses.iter().sum();
        let sum = |c: usize, k: usize| {
            if 2 * k >= n {
                total
            } else {
                prefix[n + c + k + 1] - prefix[n + c - k]
            }
        };
        (0..n).map(|c| window_radius(|k| sum(c, k), n / 2, target)).collect()
    } else {
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for m in masses {
            acc += m;
            prefix.push(acc);
        }
        let sum = |c: usize, k: usize| prefix[(c + k + 1).min(n)] - prefix[c.saturating_sub(k)];
        (0..n).map(|c| window_radius(|k| sum(c, k), c.max(n - 1 - c), target)).collect()
    };
    pick_leftmost(&radii)
}

/// Smallest `r` with captured mass `>= target`, given the mass `sum(k)` of
/// the `2k + 1` cells around the center.
fn window_radius(sum: impl Fn(usize) -> f64, k_max: usize, target: f64) -> f64 {
    if sum(k_max) < target {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (0usize, k_max);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if sum(mid) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let k = lo;
    if k == 0 {
        return 0.5 * target / sum(0);
    }
    let inner = sum(k - 1);
    k as f64 - 0.5 + (target - inner) / (sum(k) - inner)
}

fn pick_leftmost(radii: &[f64]) -> (usize, f64) {
    let best = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let c = radii.iter().position(|&r| r <= best * (1.0 + TIE_TOLERANCE)).unwrap_or(0);
    (c, radii[c])
}

/// Windows capturing `(1 - eta)` of the mass in space (periodic) and in
/// frequency (on the ordered lattice, without wrap-around).
pub fn track(u: &Field, p: &ConcentrationParams) -> Result<TrackerSample> {
    p.validate()?;
    let grid = u.grid();
    let n = grid.n();
    let dx = grid.dx();
    let x_mass: Vec<f64> = u.density().iter().map(|r| r * dx).collect();
    let total: f64 = x_mass.iter().sum();
    if total == 0.0 {
        return Err(Error::ZeroField);
    }
    let (xc, xr) = minimal_window(&x_mass, (1.0 - p.eta) * total, true);

    let modes = forward_transform(u).mode_masses();
    let ordered: Vec<f64> = (0..n).map(|i| modes[(i + n / 2) % n]).collect();
    let xi_total: f64 = ordered.iter().sum();
    let (kc, kr) = minimal_window(&ordered, (1.0 - p.eta) * xi_total, false);
    let xi_radius = kr * grid.dxi();
    Ok(TrackerSample {
        t: u.time(),
        x_center: grid.x(xc),
        x_radius: xr * dx,
        xi_center: (kc as i64 - (n / 2) as i64) as f64 * grid.dxi(),
        xi_radius,
        n_t: xi_radius / p.c_eta,
    })
}

pub fn track_series(frames: &[Field], p: &ConcentrationParams) -> Result<Vec<TrackerSample>> {
    frames.par_iter().map(|u| track(u, p)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallInterval {
    pub start: f64,
    pub end: f64,
    /// Largest `N(t)` over the interval, including its interpolated ends.
    pub n_j: f64,
    /// `int int |u|^6` over the interval.
    pub l6_mass: f64,
    /// Carries less than the full budget `eps0^6`.
    pub partial: bool,
}

/// Greedy left-to-right cuts where the running `int int |u|^6` reaches
/// successive multiples of `eps0^6`. Cut times are interpolated linearly
/// inside a frame gap.
pub fn partition_small_intervals(
    frames: &[Field],
    track: &[TrackerSample],
    p: &ConcentrationParams,
) -> Result<Vec<SmallInterval>> {
    if frames.len() < 2 {
        return Err(Error::InsufficientFrames("partition needs at least two frames".into()));
    }
    if track.len() != frames.len() {
        return Err(Error::Parameter(format!("{} tracker samples for {} frames", track.len(), frames.len())));
    }
    let ts: Vec<f64> = frames.iter().map(Field::time).collect();
    let cum = running_spacetime_integral(frames, 6.0);
    let total = *cum.last().unwrap();
    let budget = p.eps0.powi(6);
    let ns: Vec<f64> = track.iter().map(|s| s.n_t).collect();

    let mut cuts = vec![ts[0]];
    let mut level = 1.0;
    for i in 0..ts.len() - 1 {
        while cum[i + 1] >= level * budget {
            let target = level * budget;
            let w = if cum[i + 1] > cum[i] { (target - cum[i]) / (cum[i + 1] - cum[i]) } else { 1.0 };
            cuts.push(ts[i] + w.clamp(0.0, 1.0) * (ts[i + 1] - ts[i]));
            level += 1.0;
        }
    }
    let t_end = *ts.last().unwrap();
    let mut full = cuts.len() - 1;
    let mut remainder = total - full as f64 * budget;
    if remainder >= budget * (1.0 - 1e-12) {
        // the last multiple was missed only by rounding
        cuts.push(t_end);
        full += 1;
        remainder = 0.0;
    }
    if full == 0 || (remainder > 1e-12 * budget && *cuts.last().unwrap() < t_end) {
        cuts.push(t_end);
    }
    let count = cuts.len() - 1;
    Ok((0..count)
        .map(|l| {
            let (a, b) = (cuts[l], cuts[l + 1]);
            let partial = l >= full;
            let inside = ts.iter().zip(&ns).filter(|(t, _)| **t >= a && **t <= b).map(|(_, v)| *v);
            let n_j = inside.chain([interpolate(&ts, &ns, a), interpolate(&ts, &ns, b)]).fold(0.0, f64::max);
            SmallInterval { start: a, end: b, n_j, l6_mass: if partial { remainder.max(0.0) } else { budget }, partial }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bookkeeping {
    pub sum_n: f64,
    pub int_n3: f64,
    pub int_n2: f64,
    pub xi_drift: f64,
    pub l6_total: f64,
    /// `int N^2 dt / ||u||_{L^6}^6`.
    pub n2_over_l6: Option<f64>,
    /// `sum N(J_l) / int N^3 dt`.
    pub sum_n_over_n3: Option<f64>,
    /// `|xi(T) - xi(0)| / sum N(J_l)`.
    pub drift_over_sum_n: Option<f64>,
}

fn ratio(a: f64, b: f64) -> Option<f64> {
    (b != 0.0).then(|| a / b)
}

pub fn bookkeeping(frames: &[Field], track: &[TrackerSample], partition: &[SmallInterval]) -> Bookkeeping {
    let ts: Vec<f64> = track.iter().map(|s| s.t).collect();
    let n3: Vec<f64> = track.iter().map(|s| s.n_t.powi(3)).collect();
    let n2: Vec<f64> = track.iter().map(|s| s.n_t.powi(2)).collect();
    let sum_n = partition.iter().map(|j| j.n_j).sum();
    let int_n3 = trapezoid(&ts, &n3);
    let int_n2 = trapezoid(&ts, &n2);
    let xi_drift = match (track.first(), track.last()) {
        (Some(a), Some(b)) => (b.xi_center - a.xi_center).abs(),
        _ => 0.0,
    };
    let l6: Vec<f64> = frames.iter().map(|u| lebesgue_norm_pow(u, 6.0)).collect();
    let fts: Vec<f64> = frames.iter().map(Field::time).collect();
    let l6_total = trapezoid(&fts, &l6);
    Bookkeeping {
        sum_n,
        int_n3,
        int_n2,
        xi_drift,
        l6_total,
        n2_over_l6: ratio(int_n2, l6_total),
        sum_n_over_n3: ratio(sum_n, int_n3),
        drift_over_sum_n: ratio(xi_drift, sum_n),
    }
}

/// `max N / min N` over the tracker samples inside each interval.
pub fn interval_n_ratios(track: &[TrackerSample], partition: &[SmallInterval]) -> Vec<f64> {
    partition
        .iter()
        .map(|j| {
            let (lo, hi) = track
                .iter()
                .filter(|s| s.t >= j.start && s.t <= j.end)
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.n_t), hi.max(s.n_t)));
            if hi == 0.0 {
                1.0
            } else {
                hi / lo
            }
        })
        .collect()
}
