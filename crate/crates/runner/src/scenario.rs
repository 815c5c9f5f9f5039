//! Executes one configured scenario and writes its artifacts.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use nlslab::concentration::{bookkeeping, partition_small_intervals, track, Bookkeeping, TrackerSample};
use nlslab::functionals::{energy, h_s_norm, lebesgue_norm_pow, mass, momentum};
use nlslab::integrator::{solve_streaming, Termination, Trajectory};
use nlslab::morawetz::{
    action_with, apply_i, commutator_error_terms, error_integrands, l8_bound_monitor, ErrorTerms, KernelConvolver,
    L8Ratios,
};
use nlslab::spectral::Field;
use nlslab::{Error, Nonlinearity};

use crate::checkpoint;
use crate::config::ScenarioConfig;
use crate::preset::preset_initial;
use crate::record::{DiagnosticRecord, DiagnosticWriter};
use crate::RunnerError;

pub fn exit_code(status: Termination) -> i32 {
    match status {
        Termination::Completed => 0,
        Termination::BlowupGuardTripped => 2,
        Termination::NumericalFailure => 3,
    }
}

pub fn status_name(status: Termination) -> &'static str {
    match status {
        Termination::Completed => "completed",
        Termination::BlowupGuardTripped => "blowup_guard_tripped",
        Termination::NumericalFailure => "numerical_failure",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub status: Termination,
    pub frames: usize,
    pub final_time: f64,
    /// Largest `|u0|` over the outermost samples of the box.
    pub boundary: f64,
    /// Relative drifts over the saved frames.
    pub mass_drift: f64,
    pub energy_drift: f64,
    /// Absolute drift; the momentum of symmetric data is zero.
    pub momentum_drift: f64,
    pub l6_total: f64,
    /// Share of the `L^6` accumulation from the second half of the run.
    pub l6_tail_fraction: f64,
    pub intervals: usize,
    pub bookkeeping: Option<Bookkeeping>,
    pub error_terms: Option<ErrorTerms>,
    pub l8: Option<L8Ratios>,
    /// Smallest increment of `M(t)` between saved frames.
    pub min_action_increment: f64,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        exit_code(self.status)
    }

    fn lines(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("status".into(), format!("\"{}\"", status_name(self.status))),
            ("exit_code".into(), self.exit_code().to_string()),
            ("frames".into(), self.frames.to_string()),
            ("final_time".into(), fmt(self.final_time)),
            ("boundary".into(), fmt(self.boundary)),
            ("mass_drift".into(), fmt(self.mass_drift)),
            ("energy_drift".into(), fmt(self.energy_drift)),
            ("momentum_drift".into(), fmt(self.momentum_drift)),
            ("min_action_increment".into(), fmt(self.min_action_increment)),
            ("l6_total".into(), fmt(self.l6_total)),
            ("l6_tail_fraction".into(), fmt(self.l6_tail_fraction)),
            ("small_intervals".into(), self.intervals.to_string()),
        ];
        if let Some(b) = &self.bookkeeping {
            let opt = |o: Option<f64>| o.map(fmt).unwrap_or_else(|| "\"undefined\"".into());
            v.push(("sum_n".into(), fmt(b.sum_n)));
            v.push(("int_n3".into(), fmt(b.int_n3)));
            v.push(("xi_drift".into(), fmt(b.xi_drift)));
            v.push(("n2_over_l6".into(), opt(b.n2_over_l6)));
            v.push(("sum_n_over_n3".into(), opt(b.sum_n_over_n3)));
            v.push(("drift_over_sum_n".into(), opt(b.drift_over_sum_n)));
        }
        if let Some(e) = &self.error_terms {
            v.push(("err1_integral".into(), fmt(e.e1)));
            v.push(("err2_integral".into(), fmt(e.e2)));
            v.push(("err3_integral".into(), fmt(e.e3)));
            v.push(("delta_morawetz_I".into(), fmt(e.delta_action)));
            v.push(("flagged_frequency_jumps".into(), e.flagged_jumps.len().to_string()));
        }
        if let Some(l) = &self.l8 {
            v.push(("l8_integral".into(), fmt(l.l8_integral)));
            v.push(("l8_energy_ratio".into(), fmt(l.energy_ratio)));
            v.push(("l8_action_ratio".into(), fmt(l.action_ratio)));
        }
        v
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Text of the run manifest: the summary as `#` comment lines followed by
/// the configuration echo, so the manifest is itself a runnable config.
pub fn manifest_text(cfg: &ScenarioConfig, summary: &RunSummary) -> String {
    let mut s = String::from("# nlslab run manifest v1\n");
    for (k, v) in summary.lines() {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s.push('\n');
    s.push_str(&cfg.echo());
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<DiagnosticRecord>,
    pub frames: Vec<Field>,
    pub summary: RunSummary,
}

fn tracked(u: &Field, cfg: &ScenarioConfig) -> Result<TrackerSample, RunnerError> {
    match track(u, &cfg.concentration()?) {
        Ok(s) => Ok(s),
        Err(Error::ZeroField) => Ok(TrackerSample { t: u.time(), x_center: 0.0, x_radius: 0.0, xi_center: 0.0, xi_radius: 0.0, n_t: 0.0 }),
        Err(e) => Err(e.into()),
    }
}

/// Runs the scenario, handing each record and frame to `sink` as soon as
/// it is computed.
pub fn execute(
    cfg: &ScenarioConfig,
    mut sink: impl FnMut(&DiagnosticRecord, &Field) -> io::Result<()>,
) -> Result<RunOutput, RunnerError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let nl = cfg.nonlinearity();
    let u0 = preset_initial(&cfg.initial, grid, cfg.seed)?;
    let icfg = cfg.integrator();
    let kernel = cfg.kernel(&grid);
    let conv = KernelConvolver::new(grid, kernel);
    let op = cfg.i_operator(&grid)?;

    let mut records: Vec<DiagnosticRecord> = Vec::new();
    let mut frames: Vec<Field> = Vec::new();
    let mut samples: Vec<TrackerSample> = Vec::new();
    let mut failure: Option<RunnerError> = None;
    let mut l6_prev: Option<(f64, f64)> = None;
    let mut l6_accum = 0.0;

    let status = solve_streaming(&u0, &icfg, |u| {
        if failure.is_some() {
            return;
        }
        let outcome = (|| -> Result<(DiagnosticRecord, TrackerSample), RunnerError> {
            let s = tracked(u, cfg)?;
            let l6 = lebesgue_norm_pow(u, 6.0);
            if let Some((t_prev, l6_last)) = l6_prev {
                l6_accum += 0.5 * (u.time() - t_prev) * (l6 + l6_last);
            }
            l6_prev = Some((u.time(), l6));
            let [err1, err2, err3] = error_integrands(&conv, u, &op, nl, s.xi_center)?;
            let r = DiagnosticRecord {
                t: u.time(),
                mass: mass(u),
                energy: energy(u, nl),
                momentum: momentum(u),
                h1: h_s_norm(u, 1, 0.0),
                morawetz: action_with(&conv, u, 0.0),
                morawetz_i: action_with(&conv, &apply_i(u, &op)?, s.xi_center),
                err1,
                err2,
                err3,
                l6_accum,
                l8_inst: lebesgue_norm_pow(u, 8.0),
                x_center: s.x_center,
                x_radius: s.x_radius,
                xi_center: s.xi_center,
                xi_radius: s.xi_radius,
                n_t: s.n_t,
            };
            Ok((r, s))
        })();
        match outcome {
            Ok((r, s)) => {
                if let Err(e) = sink(&r, u) {
                    failure = Some(RunnerError::Io { path: PathBuf::from("<output>"), source: e });
                    return;
                }
                records.push(r);
                samples.push(s);
                frames.push(u.clone());
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }

    let summary = summarize(cfg, status, &u0, &records, &frames, &samples)?;
    Ok(RunOutput { records, frames, summary })
}

fn relative_drift(values: impl Iterator<Item = f64>, reference: f64) -> f64 {
    let worst = values.map(|v| (v - reference).abs()).fold(0.0, f64::max);
    if reference == 0.0 {
        worst
    } else {
        worst / reference.abs()
    }
}

fn summarize(
    cfg: &ScenarioConfig,
    status: Termination,
    u0: &Field,
    records: &[DiagnosticRecord],
    frames: &[Field],
    samples: &[TrackerSample],
) -> Result<RunSummary, RunnerError> {
    let first = records[0];
    let last = *records.last().unwrap();
    let l6_total = last.l6_accum;
    let half = 0.5 * (first.t + last.t);
    let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
    let acc: Vec<f64> = records.iter().map(|r| r.l6_accum).collect();
    let at_half = nlslab::quadrature::interpolate(&ts, &acc, half);
    let grid = *u0.grid();
    let nl = cfg.nonlinearity();

    let (intervals, bk, errors) = if frames.len() >= 2 {
        let p = cfg.concentration()?;
        let parts = partition_small_intervals(frames, samples, &p)?;
        let bk = bookkeeping(frames, samples, &parts);
        let errors = commutator_error_terms(frames, &cfg.i_operator(&grid)?, &cfg.kernel(&grid), samples, nl)?;
        (parts.len(), Some(bk), Some(errors))
    } else {
        (0, None, None)
    };
    let l8 = if nl == Nonlinearity::Defocusing {
        let traj = Trajectory::new(frames.to_vec(), status, cfg.integrator())?;
        Some(l8_bound_monitor(&traj, &cfg.kernel(&grid))?)
    } else {
        None
    };

    Ok(RunSummary {
        status,
        frames: records.len(),
        final_time: last.t,
        boundary: u0.boundary_magnitude(),
        mass_drift: relative_drift(records.iter().map(|r| r.mass), first.mass),
        energy_drift: relative_drift(records.iter().map(|r| r.energy), first.energy),
        momentum_drift: records.iter().map(|r| (r.momentum - first.momentum).abs()).fold(0.0, f64::max),
        l6_total,
        l6_tail_fraction: if l6_total > 0.0 { (l6_total - at_half) / l6_total } else { 0.0 },
        intervals,
        bookkeeping: bk,
        error_terms: errors,
        l8,
        min_action_increment: records.windows(2).map(|w| w[1].morawetz - w[0].morawetz).fold(f64::INFINITY, f64::min),
    })
}

/// Computes the scenario without writing anything.
pub fn simulate(cfg: &ScenarioConfig) -> Result<RunOutput, RunnerError> {
    execute(cfg, |_, _| Ok(()))
}

/// Paths written by [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub checkpoint: Option<PathBuf>,
    pub summary: RunSummary,
}

/// File stem derived from the scenario name.
pub fn slug(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect();
    let s = s.trim_matches('-').to_string();
    if s.is_empty() {
        "scenario".into()
    } else {
        s
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, RunnerError> {
    File::create(path).map(BufWriter::new).map_err(|e| RunnerError::io(path, e))
}

/// Runs the scenario and writes `<slug>.csv`, `<slug>.manifest.toml` and,
/// when enabled, the `<slug>.fields.bin` sidecar into `out_dir`.
pub fn run(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunArtifacts, RunnerError> {
    run_with_output(cfg, out_dir).map(|(artifacts, _)| artifacts)
}

/// [`run`] that also hands back the in-memory records and frames.
pub fn run_with_output(cfg: &ScenarioConfig, out_dir: &Path) -> Result<(RunArtifacts, RunOutput), RunnerError> {
    fs::create_dir_all(out_dir).map_err(|e| RunnerError::io(out_dir, e))?;
    let stem = slug(&cfg.scenario);
    let csv = out_dir.join(format!("{stem}.csv"));
    let manifest = out_dir.join(format!("{stem}.manifest.toml"));
    let sidecar = cfg.checkpoint.then(|| out_dir.join(format!("{stem}.fields.bin")));

    let mut writer = DiagnosticWriter::new(create(&csv)?).map_err(|e| RunnerError::io(&csv, e))?;
    let mut fields = sidecar.as_deref().map(create).transpose()?;
    let result = execute(cfg, |r, u| {
        writer.write(r)?;
        if let Some(f) = fields.as_mut() {
            checkpoint::write_frame(f, u)?;
        }
        Ok(())
    });
    let output = result.map_err(|e| match e {
        RunnerError::Io { source, .. } => RunnerError::io(&csv, source),
        other => other,
    })?;
    writer.finish().map_err(|e| RunnerError::io(&csv, e))?;
    if let (Some(f), Some(p)) = (fields.as_mut(), sidecar.as_ref()) {
        f.flush().map_err(|e| RunnerError::io(p, e))?;
    }
    fs::write(&manifest, manifest_text(cfg, &output.summary)).map_err(|e| RunnerError::io(&manifest, e))?;
    let artifacts = RunArtifacts { csv, manifest, checkpoint: sidecar, summary: output.summary.clone() };
    Ok((artifacts, output))
}
