//! `chiral-decay`: runs one scenario and writes its CSV tables (and optional SVG
//! plots) to the output directory.

mod config;
mod error;
mod output;
mod scenarios;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{
    BlochArgs, ConfigFile, DecayArgs, EffectiveArgs, FloquetArgs, HofstadterArgs, ManybodyArgs, QuiescenceArgs,
    ScenarioName, VerifyMarkovArgs,
};
use error::CliError;
use scenarios::Artifacts;

/// Worker-count override for parallel sweeps; 0 means one per core.
const THREADS_ENV: &str = "CHIRAL_DECAY_THREADS";
const DEFAULT_OUTPUT_DIR: &str = "chiral-decay-out";

#[derive(Parser, Debug)]
#[command(name = "chiral-decay", version, about = "Decay of discrete levels into chiral and bidirectional baths")]
struct Cli {
    /// TOML file with defaults for any scenario; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV and SVG artifacts.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Also write SVG line plots.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    svg: Option<bool>,
    #[command(subcommand)]
    scenario: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Effective Hamiltonian, its eigenvalues and the decay of the first level.
    Effective(EffectiveArgs),
    /// Survival of a level chain launched from one level.
    Decay(DecayArgs),
    /// Optimal survival bound and resilience times.
    Quiescence(QuiescenceArgs),
    /// Bloch oscillations of an equally spaced ladder.
    Bloch(BlochArgs),
    /// Exact decay into the edge of a Harper–Hofstadter strip.
    Hofstadter(HofstadterArgs),
    /// Exact stroboscopic decay into an anomalous Floquet lattice.
    Floquet(FloquetArgs),
    /// Fermion and boson non-decay probabilities.
    Manybody(ManybodyArgs),
    /// Quadrature check of the Markov decay matrix.
    VerifyMarkov(VerifyMarkovArgs),
}

fn select(cli_scenario: Option<Command>, file: &mut ConfigFile) -> Result<Artifacts, CliError> {
    let command = match cli_scenario {
        Some(c) => c,
        None => match file.scenario {
            Some(ScenarioName::Effective) => Command::Effective(Default::default()),
            Some(ScenarioName::Decay) => Command::Decay(Default::default()),
            Some(ScenarioName::Quiescence) => Command::Quiescence(Default::default()),
            Some(ScenarioName::Bloch) => Command::Bloch(Default::default()),
            Some(ScenarioName::Hofstadter) => Command::Hofstadter(Default::default()),
            Some(ScenarioName::Floquet) => Command::Floquet(Default::default()),
            Some(ScenarioName::Manybody) => Command::Manybody(Default::default()),
            Some(ScenarioName::VerifyMarkov) => Command::VerifyMarkov(Default::default()),
            None => return Err(CliError::Config("no scenario given on the command line or in the config".into())),
        },
    };
    match command {
        Command::Effective(a) => scenarios::effective(a.overlay(file.effective.take().unwrap_or_default()).resolve()),
        Command::Decay(a) => scenarios::decay(a.overlay(file.decay.take().unwrap_or_default()).resolve()),
        Command::Quiescence(a) => {
            scenarios::quiescence(a.overlay(file.quiescence.take().unwrap_or_default()).resolve())
        }
        Command::Bloch(a) => scenarios::bloch(a.overlay(file.bloch.take().unwrap_or_default()).resolve()),
        Command::Hofstadter(a) => {
            scenarios::hofstadter(a.overlay(file.hofstadter.take().unwrap_or_default()).resolve())
        }
        Command::Floquet(a) => scenarios::floquet(a.overlay(file.floquet.take().unwrap_or_default()).resolve()),
        Command::Manybody(a) => scenarios::manybody(a.overlay(file.manybody.take().unwrap_or_default()).resolve()),
        Command::VerifyMarkov(a) => {
            scenarios::verify_markov(a.overlay(file.verify_markov.take().unwrap_or_default()).resolve())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize =
        raw.trim().parse().map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a non-negative integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))
}

fn write_artifacts(dir: &Path, artifacts: &Artifacts, svg: bool) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.display().to_string(), source: e })?;
    for table in &artifacts.tables {
        table.write(dir)?;
    }
    if svg {
        for plot in &artifacts.plots {
            let path = dir.join(&plot.file);
            std::fs::write(&path, plot.render()).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<String, CliError> {
    configure_threads()?;
    let mut file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let output_dir = cli
        .output_dir
        .or_else(|| file.output_dir.take())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let svg = cli.svg.or(file.emit_svg).unwrap_or(false);
    let artifacts = select(cli.scenario, &mut file)?;
    write_artifacts(&output_dir, &artifacts, svg)?;
    Ok(artifacts.summary)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
