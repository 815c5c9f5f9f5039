use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nlslab_runner::config::{Preset, ScenarioConfig};
use nlslab_runner::preset::preset_initial;
use nlslab_runner::{output_dir, parse_config, run, run_suite, RunnerError, EXIT_ERROR};

/// Scenario runner for the 1D quintic NLS lab.
#[derive(Parser)]
#[command(name = "nlslab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV and manifest.
    Run {
        config: PathBuf,
        /// Output directory; defaults to $NLSLAB_OUT, then ./nlslab-out.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a suite: acceptance, strichartz or morawetz-ensemble.
    Suite {
        name: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a preset's initial field as x,re,im rows.
    PresetDump {
        name: String,
        /// Take grid, seed and preset parameters from this config.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<ScenarioConfig, RunnerError> {
    let text = fs::read_to_string(path).map_err(|e| RunnerError::io(path, e))?;
    Ok(parse_config(&text)?)
}

fn dump(name: &str, config: Option<&Path>) -> Result<(), RunnerError> {
    let preset = Preset::from_name(name).ok_or_else(|| {
        let known: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
        RunnerError::Preset(format!("unknown preset {name:?}; known presets are {}", known.join(", ")))
    })?;
    let mut cfg = match config {
        Some(p) => load(p)?,
        None => ScenarioConfig::new("preset-dump", 1),
    };
    cfg.initial.preset = preset;
    cfg.validate()?;
    let u = preset_initial(&cfg.initial, cfg.grid()?, cfg.seed)?;
    let mut out = BufWriter::new(io::stdout().lock());
    let stdout = Path::new("<stdout>");
    let write = |out: &mut BufWriter<_>| -> io::Result<()> {
        writeln!(out, "x,re,im")?;
        for (j, z) in u.samples().iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", u.grid().x(j), z.re, z.im)?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| RunnerError::io(stdout, e))
}

fn execute(cli: Cli) -> Result<i32, RunnerError> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load(&config)?;
            let artifacts = run(&cfg, &output_dir(out.as_deref()))?;
            println!("{}", artifacts.csv.display());
            println!("{}", artifacts.manifest.display());
            if let Some(p) = &artifacts.checkpoint {
                println!("{}", p.display());
            }
            Ok(artifacts.summary.exit_code())
        }
        Command::Suite { name, jobs, out } => {
            let report = run_suite(&name, jobs, &output_dir(out.as_deref()))?;
            print!("{}", report.render());
            Ok(report.exit_code())
        }
        Command::PresetDump { name, config } => dump(&name, config.as_deref()).map(|()| 0),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
