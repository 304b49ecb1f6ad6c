//! Result files: `field.csv`, `screen.csv`, `extrema.json` and `manifest.json`.
//!
//! Floats are written with `{:.16e}` so reruns are byte-identical. Wall-clock
//! time appears only in the manifest, never in a checksummed file.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cli::config::render_config;
use crate::experiments::{ExperimentResult, OutputOptions};
use crate::measurement::{Extremum, ScreenLine};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: String,
    pub assumptions: Vec<String>,
    pub files: Vec<FileRecord>,
    pub elapsed_seconds: f64,
}

pub fn field_csv(result: &ExperimentResult, options: &OutputOptions) -> String {
    let mut out = String::from("m,n,P\n");
    for (site, p) in result.probability.iter() {
        if options.filter_nonzero && p <= options.eps {
            continue;
        }
        let _ = writeln!(out, "{},{},{:.16e}", site.m, site.n, p);
    }
    out
}

/// Screen intensity per slot. For a column screen the slot is `n`; for an
/// anti-diagonal screen it is the offset `v` of the site `(x + v, x - v)`.
pub fn screen_csv(result: &ExperimentResult, options: &OutputOptions) -> Option<String> {
    let acc = result.screen.as_ref()?;
    let mut out = String::from(match acc.line {
        ScreenLine::Column(_) => "n,intensity\n",
        ScreenLine::AntiDiagonal(_) => "v,intensity\n",
    });
    for (slot, value) in acc.profile() {
        if options.filter_nonzero && value <= options.eps {
            continue;
        }
        let _ = writeln!(out, "{slot},{value:.16e}");
    }
    Some(out)
}

#[derive(Serialize)]
struct ExtremaFile<'a> {
    screen: Option<ScreenLine>,
    window: Option<(usize, usize)>,
    threshold: f64,
    maxima: &'a [Extremum],
    minima: &'a [Extremum],
    min_max_ratio: Option<f64>,
    transmitted_fraction: Option<f64>,
    max_norm_deviation: f64,
}

pub fn extrema_json(result: &ExperimentResult) -> String {
    let empty: &[Extremum] = &[];
    let file = ExtremaFile {
        screen: result.screen.as_ref().map(|s| s.line),
        window: result.screen.as_ref().map(|s| s.window),
        threshold: result.config.threshold,
        maxima: result.extrema.as_ref().map_or(empty, |e| &e.maxima),
        minima: result.extrema.as_ref().map_or(empty, |e| &e.minima),
        min_max_ratio: result.extrema.as_ref().and_then(|e| e.min_max_ratio()),
        transmitted_fraction: result.transmitted_fraction,
        max_norm_deviation: result.max_norm_deviation,
    };
    serde_json::to_string_pretty(&file).expect("serializable") + "\n"
}

fn write_file(dir: &Path, name: &str, contents: &str) -> io::Result<FileRecord> {
    fs::write(dir.join(name), contents)?;
    Ok(FileRecord {
        path: name.to_string(),
        bytes: contents.len(),
        sha256: hex::encode(Sha256::digest(contents.as_bytes())),
    })
}

/// Write every result file into `dir` (created if needed) and return the manifest.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> io::Result<Manifest> {
    fs::create_dir_all(dir)?;
    let options = &result.config.output;
    let mut files = vec![write_file(dir, "field.csv", &field_csv(result, options))?];
    if let Some(screen) = screen_csv(result, options) {
        files.push(write_file(dir, "screen.csv", &screen)?);
    }
    files.push(write_file(dir, "extrema.json", &extrema_json(result))?);
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: render_config(&result.config),
        assumptions: result.assumptions.clone(),
        files,
        elapsed_seconds: result.elapsed.as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("serializable") + "\n";
    fs::write(dir.join("manifest.json"), text)?;
    Ok(manifest)
}

/// Output directory: explicit override, then the config, then `./out`.
pub fn output_dir(override_dir: Option<PathBuf>, options: &OutputOptions) -> PathBuf {
    override_dir
        .or_else(|| options.directory.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}
