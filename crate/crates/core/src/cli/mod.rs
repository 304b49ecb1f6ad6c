//! Command-line front end: config text format, result files and the
//! `slitwalk` argument parser.
//!
//! Exit codes: 0 on success, 1 for a bad command line or config, 2 when the
//! simulation itself fails.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::experiments::{preset, run, ExperimentConfig, PRESET_NAMES};
pub use config::{parse_config, render_config, ConfigError};
pub use output::{write_outputs, Manifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "slitwalk", version, about = "Coined quantum walks through slits on the diagonal lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a preset or a config file and write result files.
    Run {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (default: config `directory`, then `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = ["csv"])]
        format: Option<String>,
        #[arg(long)]
        filter_nonzero: bool,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// List preset names.
    Presets,
    /// Parse and validate a config file without running it.
    Validate { config: PathBuf },
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Run the CLI on explicit arguments (the first one is the program name).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            EXIT_OK
        }
        Command::Validate { config } => match load(&config) {
            Ok(cfg) => {
                print!("{}", render_config(&cfg));
                EXIT_OK
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                EXIT_CONFIG
            }
        },
        Command::Run { preset: name, config, out, format: _, filter_nonzero, eps, threshold } => {
            let loaded = match (name, config) {
                (Some(name), _) => preset(&name).map_err(|e| e.to_string()),
                (None, Some(path)) => load(&path),
                (None, None) => Err("either --preset or --config is required".into()),
            };
            let mut cfg = match loaded {
                Ok(cfg) => cfg,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return EXIT_CONFIG;
                }
            };
            cfg.output.filter_nonzero |= filter_nonzero;
            if let Some(eps) = eps {
                cfg.output.eps = eps;
            }
            if let Some(t) = threshold {
                cfg.threshold = t;
            }
            if let Err(e) = cfg.validate() {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
            let dir = output::output_dir(out, &cfg.output);
            let result = match run(&cfg) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_RUNTIME;
                }
            };
            match write_outputs(&result, &dir) {
                Ok(manifest) => {
                    for f in &manifest.files {
                        println!("{}  {}", f.sha256, dir.join(&f.path).display());
                    }
                    if let Some(ex) = &result.extrema {
                        println!("maxima: {}  minima: {}", ex.maxima.len(), ex.minima.len());
                    }
                    for a in &result.assumptions {
                        println!("assumption: {a}");
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: writing {}: {e}", dir.display());
                    EXIT_RUNTIME
                }
            }
        }
    }
}
