//! Experiment config text format.
//!
//! ```text
//! [walk]
//! coin = hadamard            # hadamard | grover | fourier | custom
//! steps = 100
//! initial_m = 0
//! initial_n = 0
//! initial_coin_state = 0.5,0,0,0.5,0,0.5,-0.5,0   # re,im for coins 00,01,10,11
//! coin_matrix = ...          # 32 reals, row-major re,im pairs (custom coin only)
//! radius = 102               # box half-width, default steps + 2
//!
//! [barrier]
//! x = 20
//! orientation = axis         # axis | diagonal
//! cut = entry                # entry | isolated
//! slit = 6,1                 # centre,width; repeat for more slits
//! slit = -6,1
//!
//! [screen]
//! x = 60
//! window_begin = 0
//! window_end = 100
//!
//! [output]
//! directory = out
//! formats = csv
//! filter_nonzero = false
//! eps = 0
//! threshold = 0.05
//! ```
//!
//! Several `key = value` pairs may share a line, and a section header may be
//! followed by pairs on the same line. `#` starts a comment.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::coins::{CoinKind, CoinMatrix};
use crate::experiments::{ExperimentConfig, OutputOptions, ScreenSpec};
use crate::lattice::{CoinState, Site, C64};
use crate::measurement::DEFAULT_THRESHOLD;
use crate::topology::{BarrierOrientation, BarrierSpec, Slit, WallCut};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: unknown key `{key}` in section [{section}]")]
    UnknownKey { line: usize, column: usize, section: String, key: String },
    #[error("invalid config: {0}")]
    Validation(String),
}

#[derive(Debug, Clone)]
struct Entry {
    section: String,
    key: String,
    value: String,
    line: usize,
    column: usize,
}

impl Entry {
    fn error(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::Parse { line: self.line, column: self.column, message: message.into() }
    }

    fn parse<T: FromStr>(&self, what: &str) -> Result<T, ConfigError> {
        self.value
            .parse()
            .map_err(|_| self.error(format!("invalid {what} `{}` for `{}`", self.value, self.key)))
    }

    fn reals(&self, count: usize) -> Result<Vec<f64>, ConfigError> {
        let values: Vec<f64> = self
            .value
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| self.error(format!("`{}` expects comma-separated numbers", self.key)))?;
        if values.len() != count {
            return Err(self.error(format!(
                "`{}` expects {count} numbers, found {}",
                self.key,
                values.len()
            )));
        }
        Ok(values)
    }
}

const SECTIONS: [(&str, &[&str]); 4] = [
    ("walk", &["coin", "steps", "initial_m", "initial_n", "initial_coin_state", "coin_matrix", "radius"]),
    ("barrier", &["x", "orientation", "cut", "slit"]),
    ("screen", &["x", "window_begin", "window_end"]),
    ("output", &["directory", "formats", "filter_nonzero", "eps", "threshold"]),
];

fn tokenize(text: &str) -> Result<(Vec<Entry>, HashSet<String>), ConfigError> {
    let mut entries = Vec::new();
    let mut seen_sections = HashSet::new();
    let mut section: Option<String> = None;
    for (line_idx, raw) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = content.chars().collect();
        let mut i = 0;
        let err = |col: usize, msg: String| ConfigError::Parse { line: line_no, column: col + 1, message: msg };
        while i < chars.len() {
            if chars[i].is_whitespace() {
                i += 1;
                continue;
            }
            if chars[i] == '[' {
                let close = chars[i..]
                    .iter()
                    .position(|&c| c == ']')
                    .ok_or_else(|| err(i, "unterminated section header".into()))?;
                let name: String = chars[i + 1..i + close].iter().collect::<String>().trim().to_string();
                if !SECTIONS.iter().any(|(s, _)| *s == name) {
                    return Err(err(i, format!("unknown section [{name}]")));
                }
                if !seen_sections.insert(name.clone()) {
                    return Err(err(i, format!("section [{name}] appears twice")));
                }
                section = Some(name);
                i += close + 1;
                continue;
            }
            let key_start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            if i == key_start {
                return Err(err(i, format!("unexpected character `{}`", chars[i])));
            }
            let key: String = chars[key_start..i].iter().collect();
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '=' {
                return Err(err(i, format!("expected `=` after `{key}`")));
            }
            i += 1;
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            let value_start = i;
            let mut value = String::new();
            loop {
                while i < chars.len() && !chars[i].is_whitespace() {
                    value.push(chars[i]);
                    i += 1;
                }
                // Allow spaces after commas inside list values.
                let mut j = i;
                while j < chars.len() && chars[j].is_whitespace() {
                    j += 1;
                }
                let continues = value.ends_with(',') || (j < chars.len() && chars[j] == ',');
                if continues && j < chars.len() && j > i {
                    i = j;
                } else {
                    break;
                }
            }
            if value.is_empty() {
                return Err(err(value_start, format!("missing value for `{key}`")));
            }
            let Some(sec) = section.clone() else {
                return Err(err(key_start, format!("`{key}` appears before any section header")));
            };
            entries.push(Entry { section: sec, key, value, line: line_no, column: key_start + 1 });
        }
    }
    Ok((entries, seen_sections))
}

fn parse_bool(e: &Entry) -> Result<bool, ConfigError> {
    match e.value.as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(e.error(format!("invalid boolean `{}` for `{}`", e.value, e.key))),
    }
}

fn complexes(values: &[f64]) -> Vec<C64> {
    values.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

/// Parse and validate config text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let (entries, sections) = tokenize(text)?;
    let mut seen = HashSet::new();
    for e in &entries {
        let allowed = SECTIONS.iter().find(|(s, _)| *s == e.section).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&e.key.as_str()) {
            return Err(ConfigError::UnknownKey {
                line: e.line,
                column: e.column,
                section: e.section.clone(),
                key: e.key.clone(),
            });
        }
        if e.key != "slit" && !seen.insert((e.section.clone(), e.key.clone())) {
            return Err(e.error(format!("duplicate key `{}` in [{}]", e.key, e.section)));
        }
    }
    let find = |section: &str, key: &str| entries.iter().find(|e| e.section == section && e.key == key);
    let missing = |section: &str, key: &str| {
        ConfigError::Validation(format!("section [{section}] needs `{key}`"))
    };

    let coin: CoinKind = match find("walk", "coin") {
        Some(e) => e.value.parse().map_err(|msg: String| e.error(msg))?,
        None => return Err(missing("walk", "coin")),
    };
    let steps: usize = find("walk", "steps").ok_or_else(|| missing("walk", "steps"))?.parse("step count")?;
    let mut config = ExperimentConfig::new(coin, steps);
    let m = find("walk", "initial_m").map(|e| e.parse::<i32>("coordinate")).transpose()?.unwrap_or(0);
    let n = find("walk", "initial_n").map(|e| e.parse::<i32>("coordinate")).transpose()?.unwrap_or(0);
    config.initial_site = Site::new(m, n);
    if let Some(e) = find("walk", "initial_coin_state") {
        let c = complexes(&e.reals(8)?);
        let state: CoinState = [c[0], c[1], c[2], c[3]];
        config.initial_coin_state = Some(state);
    }
    if let Some(e) = find("walk", "coin_matrix") {
        let c = complexes(&e.reals(32)?);
        let matrix: CoinMatrix = std::array::from_fn(|r| std::array::from_fn(|col| c[4 * r + col]));
        config.custom_coin = Some(matrix);
    }
    if let Some(e) = find("walk", "radius") {
        config.box_radius = e.parse("radius")?;
    }

    if sections.contains("barrier") {
        let x: i32 = find("barrier", "x").ok_or_else(|| missing("barrier", "x"))?.parse("barrier position")?;
        let orientation: BarrierOrientation = match find("barrier", "orientation") {
            Some(e) => e.value.parse().map_err(|msg: String| e.error(msg))?,
            None => BarrierOrientation::AxisPerpendicular,
        };
        let cut: WallCut = match find("barrier", "cut") {
            Some(e) => e.value.parse().map_err(|msg: String| e.error(msg))?,
            None => WallCut::default(),
        };
        let mut slits = Vec::new();
        for e in entries.iter().filter(|e| e.section == "barrier" && e.key == "slit") {
            let parts: Vec<&str> = e.value.split(',').map(str::trim).collect();
            let [center, width] = parts.as_slice() else {
                return Err(e.error(format!("slit expects `centre,width`, found `{}`", e.value)));
            };
            let center: i32 = center.parse().map_err(|_| e.error(format!("invalid slit centre `{center}`")))?;
            let width: f64 = width.parse().map_err(|_| e.error(format!("invalid slit width `{width}`")))?;
            slits.push(Slit::new(center, width));
        }
        config.barrier = Some(BarrierSpec { x, slits, orientation, cut });
    }

    if sections.contains("screen") {
        let x: i32 = find("screen", "x").ok_or_else(|| missing("screen", "x"))?.parse("screen position")?;
        let begin = find("screen", "window_begin").map(|e| e.parse("time")).transpose()?.unwrap_or(0);
        let end = find("screen", "window_end").map(|e| e.parse("time")).transpose()?.unwrap_or(steps);
        config.screen = Some(ScreenSpec { x, window: (begin, end) });
    }

    let mut output = OutputOptions::default();
    if let Some(e) = find("output", "directory") {
        output.directory = Some(PathBuf::from(&e.value));
    }
    if let Some(e) = find("output", "formats") {
        let formats: Vec<String> = e.value.split(',').map(|f| f.trim().to_string()).collect();
        if let Some(bad) = formats.iter().find(|f| f.as_str() != "csv") {
            return Err(e.error(format!("unsupported output format `{bad}` (only csv)")));
        }
        output.formats = formats;
    }
    if let Some(e) = find("output", "filter_nonzero") {
        output.filter_nonzero = parse_bool(e)?;
    }
    if let Some(e) = find("output", "eps") {
        output.eps = e.parse("eps")?;
        if output.eps.is_nan() || output.eps < 0.0 {
            return Err(e.error("eps must be non-negative"));
        }
    }
    config.threshold = find("output", "threshold").map(|e| e.parse("threshold")).transpose()?.unwrap_or(DEFAULT_THRESHOLD);
    config.output = output;

    config.validate().map_err(|e| ConfigError::Validation(e.to_string()))?;
    Ok(config)
}

fn join_reals(values: impl IntoIterator<Item = C64>) -> String {
    values
        .into_iter()
        .flat_map(|c| [c.re, c.im])
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Render a config in the text format accepted by [`parse_config`].
pub fn render_config(config: &ExperimentConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[walk]");
    let _ = writeln!(out, "coin = {}", config.coin.name());
    let _ = writeln!(out, "steps = {}", config.steps);
    let _ = writeln!(out, "initial_m = {}", config.initial_site.m);
    let _ = writeln!(out, "initial_n = {}", config.initial_site.n);
    if let Some(state) = config.initial_coin_state {
        let _ = writeln!(out, "initial_coin_state = {}", join_reals(state));
    }
    if let Some(matrix) = config.custom_coin {
        let _ = writeln!(out, "coin_matrix = {}", join_reals(matrix.into_iter().flatten()));
    }
    let _ = writeln!(out, "radius = {}", config.box_radius);
    if let Some(b) = &config.barrier {
        let _ = writeln!(out, "\n[barrier]");
        let _ = writeln!(out, "x = {}", b.x);
        let _ = writeln!(out, "orientation = {}", b.orientation.name());
        let _ = writeln!(out, "cut = {}", b.cut.name());
        for s in &b.slits {
            let _ = writeln!(out, "slit = {},{:?}", s.center, s.width);
        }
    }
    if let Some(s) = &config.screen {
        let _ = writeln!(out, "\n[screen]");
        let _ = writeln!(out, "x = {}", s.x);
        let _ = writeln!(out, "window_begin = {}", s.window.0);
        let _ = writeln!(out, "window_end = {}", s.window.1);
    }
    let o = &config.output;
    let _ = writeln!(out, "\n[output]");
    if let Some(dir) = &o.directory {
        let _ = writeln!(out, "directory = {}", dir.display());
    }
    let _ = writeln!(out, "formats = {}", o.formats.join(","));
    let _ = writeln!(out, "filter_nonzero = {}", o.filter_nonzero);
    let _ = writeln!(out, "eps = {:?}", o.eps);
    let _ = writeln!(out, "threshold = {:?}", config.threshold);
    out
}
