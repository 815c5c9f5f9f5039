//! Named suites of independent members run over a bounded worker pool.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::{acceptance, RunnerError};

pub const SUITES: [&str; 3] = ["acceptance", "strichartz", "morawetz-ensemble"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within { target: f64, tol: f64 },
    /// The value is 1 for yes and 0 for no.
    Holds,
}

/// One measured quantity and the bound it must meet.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub bound: Bound,
}

impl Check {
    pub fn at_most(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { label: label.into(), value, bound: Bound::AtMost(limit) }
    }

    pub fn at_least(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { label: label.into(), value, bound: Bound::AtLeast(limit) }
    }

    pub fn within(label: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self { label: label.into(), value, bound: Bound::Within { target, tol } }
    }

    pub fn holds(label: impl Into<String>, ok: bool) -> Self {
        Self { label: label.into(), value: if ok { 1.0 } else { 0.0 }, bound: Bound::Holds }
    }

    pub fn passed(&self) -> bool {
        let v = self.value;
        match self.bound {
            Bound::AtMost(l) => v <= l,
            Bound::AtLeast(l) => v >= l,
            Bound::Within { target, tol } => (v - target).abs() <= tol,
            Bound::Holds => v == 1.0,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bound {
            Bound::AtMost(l) => write!(f, "{}={:.3e} (<= {l:e})", self.label, self.value),
            Bound::AtLeast(l) => write!(f, "{}={:.3e} (>= {l:e})", self.label, self.value),
            Bound::Within { target, tol } => write!(f, "{}={:.4} ({target} +- {tol})", self.label, self.value),
            Bound::Holds => write!(f, "{}={}", self.label, if self.value == 1.0 { "yes" } else { "no" }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberReport {
    pub name: String,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
    pub error: Option<String>,
}

impl MemberReport {
    pub fn within_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.elapsed <= b)
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(Check::passed) && self.within_budget()
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// `PASS name: check; check [time]`.
    pub fn line(&self) -> String {
        let mut s = format!("{} {}:", if self.passed() { "PASS" } else { "FAIL" }, self.name);
        let parts: Vec<String> = self.checks.iter().map(Check::to_string).collect();
        if !parts.is_empty() {
            s.push(' ');
            s.push_str(&parts.join("; "));
        }
        if let Some(e) = &self.error {
            let _ = write!(s, " error: {e}");
        }
        let _ = write!(s, " [{:.1} s", self.elapsed.as_secs_f64());
        if let Some(b) = self.budget {
            let _ = write!(s, " of {:.0} s", b.as_secs_f64());
        }
        s.push(']');
        s
    }
}

/// Times `body` and collects its checks. An error ends the member early
/// and is reported as a failure.
pub fn measure(
    name: &str,
    budget_secs: Option<f64>,
    body: impl FnOnce(&mut Vec<Check>) -> Result<(), RunnerError>,
) -> MemberReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    let error = body(&mut checks).err().map(|e| e.to_string());
    MemberReport {
        name: name.into(),
        checks,
        elapsed: start.elapsed(),
        budget: budget_secs.map(Duration::from_secs_f64),
        error,
    }
}

type Job = Box<dyn Fn(&Path) -> MemberReport + Send + Sync>;

pub struct Member {
    pub name: String,
    job: Job,
}

impl Member {
    pub fn new(name: impl Into<String>, job: impl Fn(&Path) -> MemberReport + Send + Sync + 'static) -> Self {
        Self { name: name.into(), job: Box::new(job) }
    }

    pub fn run(&self, out_dir: &Path) -> MemberReport {
        (self.job)(out_dir)
    }
}

/// Runs members on `jobs` worker threads. Reports come back in member
/// order whatever the schedule.
pub fn run_members(members: &[Member], jobs: usize, out_dir: &Path) -> Result<Vec<MemberReport>, RunnerError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| RunnerError::Pool(e.to_string()))?;
    Ok(pool.install(|| members.par_iter().map(|m| m.run(out_dir)).collect()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub jobs: usize,
    pub members: Vec<MemberReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.members.iter().all(MemberReport::passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            crate::EXIT_SUITE_FAILED
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for m in &self.members {
            s.push_str(&m.line());
            s.push('\n');
        }
        let failed = self.members.iter().filter(|m| !m.passed()).count();
        let _ = writeln!(s, "suite {}: {} members, {failed} failed, jobs {}", self.suite, self.members.len(), self.jobs);
        s
    }

    /// Every measured value, for comparing two executions of a suite.
    /// Timings are left out.
    pub fn numbers(&self) -> Vec<(String, String, u64)> {
        self.members
            .iter()
            .flat_map(|m| m.checks.iter().map(move |c| (m.name.clone(), c.label.clone(), c.value.to_bits())))
            .collect()
    }
}

pub fn members_of(suite: &str) -> Result<Vec<Member>, RunnerError> {
    match suite {
        "acceptance" => Ok(acceptance::criteria()),
        "strichartz" => Ok(acceptance::strichartz_members()),
        "morawetz-ensemble" => Ok(acceptance::ensemble_members(acceptance::ENSEMBLE_SEED)),
        other => Err(RunnerError::UnknownSuite(other.into())),
    }
}

/// Runs a named suite and writes `suite-<name>.txt` beside the member
/// artifacts in `out_dir`.
pub fn run_suite(name: &str, jobs: usize, out_dir: &Path) -> Result<SuiteReport, RunnerError> {
    let members = members_of(name)?;
    fs::create_dir_all(out_dir).map_err(|e| RunnerError::io(out_dir, e))?;
    let report = SuiteReport { suite: name.into(), jobs: jobs.max(1), members: run_members(&members, jobs, out_dir)? };
    let path = out_dir.join(format!("suite-{name}.txt"));
    fs::write(&path, report.render()).map_err(|e| RunnerError::io(&path, e))?;
    Ok(report)
}
