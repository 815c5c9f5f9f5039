//! Composite trapezoid rules on (possibly nonuniform) sample times.

pub fn trapezoid(ts: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(ts.len(), ys.len());
    ts.windows(2).zip(ys.windows(2)).map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1])).sum()
}

/// Running integral, starting at 0 for the first sample.
pub fn cumulative_trapezoid(ts: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(ts.len());
    let mut acc = 0.0;
    if !ts.is_empty() {
        out.push(0.0);
    }
    for (t, y) in ts.windows(2).zip(ys.windows(2)) {
        acc += 0.5 * (t[1] - t[0]) * (y[0] + y[1]);
        out.push(acc);
    }
    out
}

/// Linear interpolation of the samples at `t`, clamped to the end values.
pub fn interpolate(ts: &[f64], ys: &[f64], t: f64) -> f64 {
    match ts.iter().position(|&s| s >= t) {
        None => *ys.last().unwrap_or(&0.0),
        Some(0) => ys[0],
        Some(i) => {
            let w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
            ys[i - 1] + w * (ys[i] - ys[i - 1])
        }
    }
}

/// Integral of the piecewise-linear interpolant of `(ts, ys)` over `[a, b]`.
pub fn trapezoid_between(ts: &[f64], ys: &[f64], a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut knots = vec![(a, interpolate(ts, ys, a))];
    knots.extend(ts.iter().zip(ys).filter(|(t, _)| **t > a && **t < b).map(|(t, y)| (*t, *y)));
    knots.push((b, interpolate(ts, ys, b)));
    knots.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
