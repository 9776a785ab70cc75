//! `semiq` — runs canonical quantum-optics scenarios and reports, side by
//! side, the exact quantum statistics and the statistics a classical-like
//! detector would record.
//!
//! Exit codes: 0 when every check passes, 2 on a numerical or tolerance
//! failure, 1 on configuration or I/O errors.

mod config;
mod report;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::ConfigMap;
use report::ScenarioReport;
use scenarios::{RunError, StateSpec};

#[derive(Parser)]
#[command(
    name = "semiq",
    version,
    about = "Quantum vs classical-detector statistics for canonical quantum-optics experiments"
)]
struct Cli {
    /// Flat `key = value` configuration file; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report path. Written to stdout when omitted. Relative paths resolve
    /// against $SEMIQ_OUT_DIR when that variable is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Structured text, one line per entry.
    Text,
    /// Comma-delimited table with a header row.
    Table,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StateKind {
    Fock,
    Coherent,
    Thermal,
    Squeezed,
}

#[derive(Subcommand)]
enum Command {
    /// Continuous photocounting of a single-mode state: the semiquantum
    /// record is never sub-Poissonian.
    Subpoisson {
        /// State family to prepare.
        #[arg(long, value_enum)]
        state: Option<StateKind>,
        /// Fock index, for `--state fock`.
        #[arg(long)]
        m: Option<usize>,
        /// Coherent amplitude, for `--state coherent`.
        #[arg(long)]
        beta: Option<f64>,
        /// Thermal mean photon number, for `--state thermal`.
        #[arg(long)]
        nbar: Option<f64>,
        /// Squeezing parameter, for `--state squeezed`.
        #[arg(long)]
        r: Option<f64>,
        /// Fock-space dimension override.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// A single photon on a beam splitter: quantum intensities never
    /// coincide, classical-detector records always do.
    Anticorrelation {
        /// Beam-splitter transmission.
        #[arg(long)]
        transmission: Option<f64>,
        /// Beam-splitter phase in radians.
        #[arg(long)]
        phase: Option<f64>,
        /// Per-mode Fock dimension.
        #[arg(long)]
        dim_per_mode: Option<usize>,
        /// Photocount grid extent.
        #[arg(long)]
        grid_max: Option<f64>,
        /// Photocount grid step.
        #[arg(long)]
        grid_step: Option<f64>,
    },
    /// Two photons on a balanced splitter: the coincidence dip versus its
    /// classical-detector washout.
    Hom {
        #[arg(long)]
        dim_per_mode: Option<usize>,
        #[arg(long)]
        grid_max: Option<f64>,
        #[arg(long)]
        grid_step: Option<f64>,
    },
    /// Quadrature statistics of squeezed vacuum: the classical-detector
    /// variance never drops below the vacuum floor.
    Squeezing {
        /// Squeezing parameter.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Deconvolves a measured Husimi function and witnesses negativity for a
    /// Fock state (with a coherent-state control).
    WignerNegativity {
        /// Fock index of the witness state.
        #[arg(long)]
        m: Option<usize>,
        /// Amplitude of the coherent control state.
        #[arg(long)]
        control_beta: Option<f64>,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Randomized classical-closure suite: separable models always invert to
    /// bona fide joint distributions.
    SeparabilitySuite {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
    },
}

fn run(cli: &Cli) -> Result<(ScenarioReport, Vec<(String, String)>), RunError> {
    let cfg = match &cli.config {
        Some(path) => ConfigMap::load(path).map_err(RunError::Config)?,
        None => ConfigMap::empty(),
    };
    let keys = |cfg: &ConfigMap, allowed: &[&str]| cfg.check_keys(allowed).map_err(RunError::Config);
    match &cli.command {
        Command::Subpoisson {
            state,
            m,
            beta,
            nbar,
            r,
            dim,
        } => {
            keys(&cfg, &["state", "m", "beta", "nbar", "r", "dim"])?;
            let kind_name =
                cfg.resolve(state.map(|s| format!("{s:?}")), "state", "Fock".into())
                    .map_err(RunError::Config)?;
            let kind = match kind_name.to_ascii_lowercase().as_str() {
                "fock" => StateKind::Fock,
                "coherent" => StateKind::Coherent,
                "thermal" => StateKind::Thermal,
                "squeezed" => StateKind::Squeezed,
                other => {
                    return Err(RunError::Config(format!("unknown state kind `{other}`")))
                }
            };
            let spec = match kind {
                StateKind::Fock => {
                    StateSpec::Fock(cfg.resolve(*m, "m", 1).map_err(RunError::Config)?)
                }
                StateKind::Coherent => StateSpec::Coherent(
                    cfg.resolve(*beta, "beta", 1.0).map_err(RunError::Config)?,
                ),
                StateKind::Thermal => StateSpec::Thermal(
                    cfg.resolve(*nbar, "nbar", 0.5).map_err(RunError::Config)?,
                ),
                StateKind::Squeezed => {
                    StateSpec::Squeezed(cfg.resolve(*r, "r", 0.5).map_err(RunError::Config)?)
                }
            };
            let dim = cfg.resolve_opt(*dim, "dim").map_err(RunError::Config)?;
            scenarios::subpoisson(spec, dim)
        }
        Command::Anticorrelation {
            transmission,
            phase,
            dim_per_mode,
            grid_max,
            grid_step,
        } => {
            keys(
                &cfg,
                &["transmission", "phase", "dim_per_mode", "grid_max", "grid_step"],
            )?;
            scenarios::anticorrelation(
                cfg.resolve(*transmission, "transmission", 0.5)
                    .map_err(RunError::Config)?,
                cfg.resolve(*phase, "phase", 0.0).map_err(RunError::Config)?,
                cfg.resolve(*dim_per_mode, "dim_per_mode", 6)
                    .map_err(RunError::Config)?,
                cfg.resolve(*grid_max, "grid_max", 25.0)
                    .map_err(RunError::Config)?,
                cfg.resolve(*grid_step, "grid_step", 0.02)
                    .map_err(RunError::Config)?,
            )
        }
        Command::Hom {
            dim_per_mode,
            grid_max,
            grid_step,
        } => {
            keys(&cfg, &["dim_per_mode", "grid_max", "grid_step"])?;
            scenarios::hom(
                cfg.resolve(*dim_per_mode, "dim_per_mode", 6)
                    .map_err(RunError::Config)?,
                cfg.resolve(*grid_max, "grid_max", 25.0)
                    .map_err(RunError::Config)?,
                cfg.resolve(*grid_step, "grid_step", 0.02)
                    .map_err(RunError::Config)?,
            )
        }
        Command::Squeezing { r, dim } => {
            keys(&cfg, &["r", "dim"])?;
            scenarios::squeezing(
                cfg.resolve(*r, "r", 0.5).map_err(RunError::Config)?,
                cfg.resolve_opt(*dim, "dim").map_err(RunError::Config)?,
            )
        }
        Command::WignerNegativity {
            m,
            control_beta,
            dim,
        } => {
            keys(&cfg, &["m", "control_beta", "dim"])?;
            scenarios::wigner_negativity(
                cfg.resolve(*m, "m", 1).map_err(RunError::Config)?,
                cfg.resolve(*control_beta, "control_beta", 1.0)
                    .map_err(RunError::Config)?,
                cfg.resolve_opt(*dim, "dim").map_err(RunError::Config)?,
            )
        }
        Command::SeparabilitySuite { seed, trials } => {
            keys(&cfg, &["seed", "trials"])?;
            scenarios::separability_suite(
                cfg.resolve(*seed, "seed", 7).map_err(RunError::Config)?,
                cfg.resolve(*trials, "trials", 100)
                    .map_err(RunError::Config)?,
            )
        }
    }
}

fn resolve_out_path(out: &PathBuf) -> PathBuf {
    if out.is_relative() {
        if let Ok(dir) = std::env::var("SEMIQ_OUT_DIR") {
            if !dir.is_empty() {
                return PathBuf::from(dir).join(out);
            }
        }
    }
    out.clone()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };

    let (report, artifacts) = match run(&cli) {
        Ok(result) => result,
        Err(RunError::Config(msg)) => {
            eprintln!("semiq: configuration error: {msg}");
            return ExitCode::from(1);
        }
        Err(RunError::Numerics(e)) => {
            eprintln!("semiq: numerical failure: {e}");
            return ExitCode::from(2);
        }
    };

    let rendered = match cli.format {
        Format::Text => report.to_text(),
        Format::Table => report.to_table(),
    };
    match &cli.out {
        Some(out) => {
            let path = resolve_out_path(out);
            if let Err(msg) = report::write_output(&path, &rendered) {
                eprintln!("semiq: {msg}");
                return ExitCode::from(1);
            }
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "semiq".into());
            for (tag, contents) in &artifacts {
                let name = scenarios::field_artifact_name(&stem, tag);
                let sibling = path.with_file_name(name);
                if let Err(msg) = report::write_output(&sibling, contents) {
                    eprintln!("semiq: {msg}");
                    return ExitCode::from(1);
                }
            }
        }
        None => print!("{rendered}"),
    }

    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
