//! Scenario configuration: a TOML document of `key = value` lines under
//! `[section]` headers.
//!
//! ```toml
//! scenario = "gaussian-defocusing"
//! mu = 1
//!
//! [grid]
//! n = 1024
//!
//! [initial]
//! preset = "gaussian"
//! amp = 0.5
//! ```
//!
//! Every key except `scenario` and `mu` has a default. Unknown keys,
//! duplicate keys and type mismatches are rejected with the offending line.

use std::f64::consts::PI;
use std::fmt;

use nlslab::concentration::ConcentrationParams;
use nlslab::integrator::{IntegratorConfig, Nonlinearity};
use nlslab::morawetz::{IOperator, MorawetzKernel};
use nlslab::spectral::Grid;
use serde::{Deserialize, Serialize};

/// One problem found while reading a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    /// 1-based line, when the problem can be pinned to one.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid configuration:{}", render(.0))]
pub struct ConfigError(pub Vec<ConfigIssue>);

fn render(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("\n  {i}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub mu: i64,
    #[serde(default)]
    pub seed: u64,
    /// Write every saved field to a binary sidecar next to the CSV.
    #[serde(default)]
    pub checkpoint: bool,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub concentration: ConcentrationSection,
    #[serde(default)]
    pub morawetz: MorawetzSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub length: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 1024, length: 64.0 * PI }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub dt: f64,
    pub t_end: f64,
    pub save_every: usize,
    pub dealias: bool,
    pub blowup_guard: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_cutoff: Option<f64>,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self { dt: 1e-3, t_end: 1.0, save_every: 100, dealias: true, blowup_guard: 10.0, spectral_cutoff: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Gaussian,
    Soliton,
    Random,
    Zero,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Gaussian, Preset::Soliton, Preset::Random, Preset::Zero];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Gaussian => "gaussian",
            Preset::Soliton => "soliton",
            Preset::Random => "random",
            Preset::Zero => "zero",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }
}

/// Initial data. `gaussian` is `amp e^{-(x-center)^2/sigma^2} e^{i xi0 x}`,
/// `soliton` is `amp Q`, `random` is `amp` times unit-mass band-limited noise
/// in `band_lo <= |xi| <= band_hi` under a Gaussian envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    pub preset: Preset,
    pub amp: f64,
    pub sigma: f64,
    pub center: f64,
    pub xi0: f64,
    pub band_lo: f64,
    pub band_hi: f64,
    pub envelope: f64,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            preset: Preset::Gaussian,
            amp: 1.0,
            sigma: 1.0,
            center: 0.0,
            xi0: 0.0,
            band_lo: 1.0,
            band_hi: 8.0,
            envelope: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcentrationSection {
    pub eta: f64,
    pub eps0: f64,
    pub c_eta: f64,
}

impl Default for ConcentrationSection {
    fn default() -> Self {
        let p = ConcentrationParams::default();
        Self { eta: p.eta, eps0: p.eps0, c_eta: p.c_eta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    OddErf,
    TwoSidedErf,
    Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MorawetzSection {
    pub kernel: KernelChoice,
    /// Kernel width; four grid cells when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// I-operator parameter `M`; the identity when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_cutoff: Option<f64>,
}

impl Default for MorawetzSection {
    fn default() -> Self {
        Self { kernel: KernelChoice::OddErf, epsilon: None, i_cutoff: None }
    }
}

impl ScenarioConfig {
    /// Configuration with every default and the two required keys.
    pub fn new(scenario: impl Into<String>, mu: i64) -> Self {
        Self {
            scenario: scenario.into(),
            mu,
            seed: 0,
            checkpoint: false,
            grid: GridSection::default(),
            integrator: IntegratorSection::default(),
            initial: InitialSection::default(),
            concentration: ConcentrationSection::default(),
            morawetz: MorawetzSection::default(),
        }
    }

    /// Canonical text form; parsing it gives back the same configuration.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        if self.mu < 0 {
            Nonlinearity::Focusing
        } else {
            Nonlinearity::Defocusing
        }
    }

    pub fn grid(&self) -> nlslab::Result<Grid> {
        Grid::new(self.grid.n, self.grid.length)
    }

    pub fn integrator(&self) -> IntegratorConfig {
        let s = &self.integrator;
        IntegratorConfig::new(self.nonlinearity(), s.dt, s.t_end)
            .with_save_every(s.save_every)
            .with_dealias(s.dealias)
            .with_blowup_guard(s.blowup_guard)
            .with_spectral_cutoff(s.spectral_cutoff)
    }

    pub fn concentration(&self) -> nlslab::Result<ConcentrationParams> {
        let c = &self.concentration;
        ConcentrationParams::new(c.eta, c.c_eta, c.eps0)
    }

    pub fn kernel(&self, grid: &Grid) -> MorawetzKernel {
        let eps = self.morawetz.epsilon.unwrap_or(4.0 * grid.dx());
        match self.morawetz.kernel {
            KernelChoice::OddErf => MorawetzKernel::odd_erf(eps),
            KernelChoice::TwoSidedErf => MorawetzKernel::two_sided_erf(eps),
            KernelChoice::Sign => MorawetzKernel::sign(),
        }
    }

    /// The configured I-operator, or one whose cutoff is above Nyquist.
    pub fn i_operator(&self, grid: &Grid) -> nlslab::Result<IOperator> {
        match self.morawetz.i_cutoff {
            Some(m) => IOperator::new(m),
            None => IOperator::new(grid.nyquist() / 16.0),
        }
    }

    /// Constraint checks beyond what the types enforce, with the key each
    /// problem belongs to.
    fn violations(&self) -> Vec<(Option<&'static str>, &'static str, String)> {
        let mut v = Vec::new();
        let mut bad = |section: Option<&'static str>, key: &'static str, msg: String| v.push((section, key, msg));
        if self.mu != 1 && self.mu != -1 {
            bad(None, "mu", format!("μ must be ±1, got {}", self.mu));
        }
        if self.scenario.trim().is_empty() {
            bad(None, "scenario", "scenario name must not be empty".into());
        }
        if let Err(e) = self.grid() {
            let key = if self.grid.n.is_power_of_two() && self.grid.n >= 8 { "length" } else { "n" };
            bad(Some("grid"), key, e.to_string());
        }
        let s = &self.integrator;
        if !(s.dt > 0.0 && s.dt.is_finite()) {
            bad(Some("integrator"), "dt", format!("dt must be positive, got {}", s.dt));
        }
        if !(s.t_end > 0.0 && s.t_end.is_finite()) {
            bad(Some("integrator"), "t_end", format!("t_end must be positive, got {}", s.t_end));
        }
        if s.save_every == 0 {
            bad(Some("integrator"), "save_every", "save_every must be at least 1".into());
        }
        if !(s.blowup_guard > 1.0) {
            bad(Some("integrator"), "blowup_guard", format!("blowup_guard must exceed 1, got {}", s.blowup_guard));
        }
        if let Some(c) = s.spectral_cutoff {
            if !(c > 0.0) {
                bad(Some("integrator"), "spectral_cutoff", format!("spectral_cutoff must be positive, got {c}"));
            }
        }
        if let Err(e) = self.concentration() {
            bad(Some("concentration"), "eta", e.to_string());
        }
        let i = &self.initial;
        if !i.amp.is_finite() {
            bad(Some("initial"), "amp", "amp must be finite".into());
        }
        if !(i.sigma > 0.0) {
            bad(Some("initial"), "sigma", format!("sigma must be positive, got {}", i.sigma));
        }
        if !(i.envelope > 0.0) {
            bad(Some("initial"), "envelope", format!("envelope must be positive, got {}", i.envelope));
        }
        if !(0.0 <= i.band_lo && i.band_lo < i.band_hi) {
            bad(Some("initial"), "band_lo", format!("need 0 <= band_lo < band_hi, got [{}, {}]", i.band_lo, i.band_hi));
        }
        if let Ok(g) = self.grid() {
            if g.lattice_mode(i.xi0).is_none() {
                bad(Some("initial"), "xi0", format!("xi0 = {} is not a multiple of the frequency step {}", i.xi0, g.dxi()));
            }
        }
        if let Some(e) = self.morawetz.epsilon {
            if !(e > 0.0) {
                bad(Some("morawetz"), "epsilon", format!("epsilon must be positive, got {e}"));
            }
        }
        if let Some(m) = self.morawetz.i_cutoff {
            if !(m > 0.0) {
                bad(Some("morawetz"), "i_cutoff", format!("i_cutoff must be positive, got {m}"));
            }
        }
        v
    }

    /// Runs the constraint checks without source text.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let issues: Vec<ConfigIssue> =
            self.violations().into_iter().map(|(_, _, message)| ConfigIssue { line: None, message }).collect();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(issues))
        }
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of_offset(text, s.start));
        ConfigError(vec![ConfigIssue { line, message: e.message().trim().to_string() }])
    })?;
    let issues: Vec<ConfigIssue> = cfg
        .violations()
        .into_iter()
        .map(|(section, key, message)| ConfigIssue { line: line_of_key(text, section, key), message })
        .collect();
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError(issues))
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line where `key` is assigned inside `section` (`None` for the top level).
fn line_of_key(text: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.split(']').next().map(|s| s.trim().to_string());
            continue;
        }
        let Some((lhs, _)) = line.split_once('=') else { continue };
        if current.as_deref() == section && lhs.trim().trim_matches('"') == key {
            return Some(i + 1);
        }
    }
    None
}
