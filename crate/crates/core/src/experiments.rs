//! Experiment configurations, the named presets, and the run driver.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::coins::{CoinKind, CoinMatrix, CoinOperator};
use crate::error::{Error, Result};
use crate::evolution::{evolve, StepObserver};
use crate::lattice::{AmplitudeField, CoinState, Site, C64};
use crate::measurement::{
    find_extrema, probability, region_probability, ProbabilityField, ProfileExtrema,
    ScreenAccumulator, ScreenLine, DEFAULT_THRESHOLD,
};
use crate::topology::{build_barrier, BarrierOrientation, BarrierSpec, LinkSet, Slit, WallCut};

/// Screen position and accumulation window. The screen line is parallel to
/// the barrier: a column for axis barriers (or no barrier), an anti-diagonal
/// `m + n = 2x` for diagonal ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScreenSpec {
    pub x: i32,
    pub window: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputOptions {
    pub directory: Option<PathBuf>,
    pub formats: Vec<String>,
    pub filter_nonzero: bool,
    pub eps: f64,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions { directory: None, formats: vec!["csv".into()], filter_nonzero: false, eps: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub coin: CoinKind,
    /// Required when `coin` is [`CoinKind::Custom`].
    pub custom_coin: Option<CoinMatrix>,
    pub initial_site: Site,
    /// `None` selects [`default_initial_state`].
    pub initial_coin_state: Option<CoinState>,
    pub steps: usize,
    pub barrier: Option<BarrierSpec>,
    pub screen: Option<ScreenSpec>,
    /// Half-width of the simulation box, centred on the initial site.
    pub box_radius: usize,
    /// Relative threshold for screen-profile maxima.
    pub threshold: f64,
    pub output: OutputOptions,
}

impl ExperimentConfig {
    /// Walker from the origin with the default state and a box of radius `steps + 2`.
    pub fn new(coin: CoinKind, steps: usize) -> Self {
        ExperimentConfig {
            coin,
            custom_coin: None,
            initial_site: Site::ORIGIN,
            initial_coin_state: None,
            steps,
            barrier: None,
            screen: None,
            box_radius: steps + 2,
            threshold: DEFAULT_THRESHOLD,
            output: OutputOptions::default(),
        }
    }

    pub fn with_barrier(mut self, barrier: BarrierSpec) -> Self {
        self.barrier = Some(barrier);
        self
    }

    pub fn with_screen(mut self, x: i32, window: (usize, usize)) -> Self {
        self.screen = Some(ScreenSpec { x, window });
        self
    }

    pub fn coin_operator(&self) -> Result<CoinOperator> {
        match self.coin {
            CoinKind::Custom => {
                let entries = self.custom_coin.ok_or_else(|| {
                    Error::InvalidConfig("custom coin selected without coin entries".into())
                })?;
                CoinOperator::custom(entries)
            }
            kind => Ok(CoinOperator::of_kind(kind).expect("built-in coin")),
        }
    }

    pub fn coin_state(&self) -> CoinState {
        self.initial_coin_state.unwrap_or_else(|| default_initial_state(self.coin))
    }

    pub fn barrier_orientation(&self) -> BarrierOrientation {
        self.barrier
            .as_ref()
            .map_or(BarrierOrientation::AxisPerpendicular, |b| b.orientation)
    }

    pub fn screen_line(&self) -> Option<ScreenLine> {
        self.screen.map(|s| match self.barrier_orientation() {
            BarrierOrientation::AxisPerpendicular => ScreenLine::Column(s.x),
            BarrierOrientation::MainDiagonalPerpendicular => ScreenLine::AntiDiagonal(s.x),
        })
    }

    /// Walker position projected on the axis perpendicular to the barrier.
    fn along(&self, site: Site) -> i32 {
        match self.barrier_orientation() {
            BarrierOrientation::AxisPerpendicular => site.m,
            BarrierOrientation::MainDiagonalPerpendicular => (site.m + site.n).div_euclid(2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidConfig(msg));
        if !self.initial_site.is_even() {
            return Err(Error::OddParitySite(self.initial_site));
        }
        let state = self.coin_state();
        let norm_sqr: f64 = state.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-12 {
            return Err(Error::NonNormalizedCoinState { norm_sqr });
        }
        self.coin_operator()?;
        if self.box_radius < self.steps + 2 {
            return invalid(format!(
                "box radius {} is smaller than steps + 2 = {}",
                self.box_radius,
                self.steps + 2
            ));
        }
        if !(0.0..1.0).contains(&self.threshold) {
            return invalid(format!("threshold {} must lie in [0, 1)", self.threshold));
        }
        let r = self.box_radius as i32;
        let start = self.along(self.initial_site);
        if let Some(b) = &self.barrier {
            b.validate()?;
            if (b.x - start).abs() > r {
                return invalid(format!("barrier at {} lies outside the box", b.x));
            }
            if b.cut == WallCut::EntrySide && start >= b.x {
                return invalid(format!(
                    "an entry-side cut expects the walker ({start}) before the barrier ({})",
                    b.x
                ));
            }
        }
        if let Some(s) = &self.screen {
            if (s.x - start).abs() > r {
                return invalid(format!("screen at {} lies outside the box", s.x));
            }
            if s.window.0 > s.window.1 || s.window.1 > self.steps {
                return invalid(format!(
                    "screen window [{}, {}] must satisfy begin <= end <= steps ({})",
                    s.window.0, s.window.1, self.steps
                ));
            }
            if let Some(b) = &self.barrier {
                let between = (start < b.x && b.x < s.x) || (start > b.x && b.x > s.x);
                if !between {
                    return invalid(format!(
                        "barrier at {} must lie strictly between the walker ({}) and the screen ({})",
                        b.x, start, s.x
                    ));
                }
            }
        }
        Ok(())
    }

    /// Notes for every value that is a chosen default rather than an input.
    pub fn assumptions(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.initial_coin_state.is_none() && self.coin != CoinKind::Hadamard {
            out.push(format!("default-initial-state:{}", self.coin.name()));
        }
        if self.screen.is_some() && self.threshold == DEFAULT_THRESHOLD {
            out.push(format!("extremum-threshold:{DEFAULT_THRESHOLD}"));
        }
        if self.barrier_orientation() == BarrierOrientation::MainDiagonalPerpendicular {
            out.push("diagonal-barrier-geometry".into());
        }
        out
    }
}

/// Initial coin state used when a config does not override it.
///
/// Hadamard: `(|0> + i|1>)(|0> + i|1>) / 2`. Grover and Fourier use the
/// maximal-spreading states `(1, -1, -1, 1) / 2` and
/// `(1, (1-i)/sqrt 2, 1, -(1-i)/sqrt 2) / 2`; custom coins fall back to the
/// Hadamard state.
pub fn default_initial_state(kind: CoinKind) -> CoinState {
    let c = |re: f64, im: f64| C64::new(re, im);
    match kind {
        CoinKind::Hadamard | CoinKind::Custom => [c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(-0.5, 0.0)],
        CoinKind::Grover => [c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)],
        CoinKind::Fourier => {
            let s = 0.5 * std::f64::consts::FRAC_1_SQRT_2;
            [c(0.5, 0.0), c(s, -s), c(0.5, 0.0), c(-s, s)]
        }
    }
}

pub const PRESET_NAMES: [&str; 14] = [
    "fig2",
    "fig3_w5",
    "fig3_w9",
    "fig3_w13",
    "fig4",
    "fig5_double",
    "fig5_upper_only",
    "fig5_lower_only",
    "fig6_grover",
    "fig6_upper_only",
    "fig6_lower_only",
    "grover_diagonal",
    "fourier_double",
    "free_hadamard",
];

fn single_slit(width: f64) -> ExperimentConfig {
    ExperimentConfig::new(CoinKind::Hadamard, 100)
        .with_barrier(BarrierSpec::axis(20, vec![Slit::new(0, width)]))
        .with_screen(60, (0, 100))
}

fn double_slit(coin: CoinKind, barrier: i32, screen: i32, steps: usize, centers: &[i32]) -> ExperimentConfig {
    let slits = centers.iter().map(|&c| Slit::new(c, 1.0)).collect();
    ExperimentConfig::new(coin, steps)
        .with_barrier(BarrierSpec::axis(barrier, slits))
        .with_screen(screen, (0, steps))
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        "fig2" => ExperimentConfig::new(CoinKind::Hadamard, 80)
            .with_barrier(BarrierSpec::axis(20, vec![Slit::new(0, 5.0)])),
        "fig3_w5" => single_slit(5.0),
        "fig3_w9" => single_slit(9.0),
        "fig3_w13" => single_slit(13.0),
        "fig4" | "fig5_double" => double_slit(CoinKind::Hadamard, 20, 60, 100, &[6, -6]),
        "fig5_upper_only" => double_slit(CoinKind::Hadamard, 20, 60, 100, &[6]),
        "fig5_lower_only" => double_slit(CoinKind::Hadamard, 20, 60, 100, &[-6]),
        "fig6_grover" => double_slit(CoinKind::Grover, 30, 70, 120, &[6, -6]),
        "fig6_upper_only" => double_slit(CoinKind::Grover, 30, 70, 120, &[6]),
        "fig6_lower_only" => double_slit(CoinKind::Grover, 30, 70, 120, &[-6]),
        "fourier_double" => double_slit(CoinKind::Fourier, 30, 70, 120, &[6, -6]),
        "grover_diagonal" => ExperimentConfig::new(CoinKind::Grover, 120)
            .with_barrier(BarrierSpec::diagonal(30, vec![Slit::new(6, 1.0), Slit::new(-6, 1.0)]))
            .with_screen(70, (0, 120)),
        "free_hadamard" => ExperimentConfig::new(CoinKind::Hadamard, 100),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(cfg)
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub final_field: AmplitudeField,
    pub probability: ProbabilityField,
    pub screen: Option<ScreenAccumulator>,
    pub extrema: Option<ProfileExtrema>,
    /// Probability strictly beyond the barrier at the final step.
    pub transmitted_fraction: Option<f64>,
    /// Largest `|norm - 1|` seen over all observed times.
    pub max_norm_deviation: f64,
    pub assumptions: Vec<String>,
    pub elapsed: Duration,
}

impl ExperimentResult {
    /// Screen profile on the analysed parity class (consecutive entries two slots apart).
    pub fn screen_profile(&self) -> Option<Vec<(i32, f64)>> {
        self.screen.as_ref().map(|s| s.parity_profile(s.line.position()))
    }
}

/// Build the broken-link set for a config (empty without a barrier).
pub fn links_for(config: &ExperimentConfig) -> Result<LinkSet> {
    match &config.barrier {
        None => Ok(LinkSet::new()),
        Some(b) => {
            let s = config.initial_site;
            let half = config.box_radius + (b.x.unsigned_abs() + s.m.unsigned_abs() + s.n.unsigned_abs()) as usize;
            build_barrier(b, half)
        }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentResult> {
    run_observed(config, &mut |_: &AmplitudeField| {})
}

/// Run a config, calling `observer` with the field at `t = 0` and after every step.
pub fn run_observed(config: &ExperimentConfig, observer: &mut dyn StepObserver) -> Result<ExperimentResult> {
    config.validate()?;
    let started = Instant::now();
    let coin = config.coin_operator()?;
    let links = links_for(config)?;
    let field = AmplitudeField::localized_in(
        config.initial_site,
        config.box_radius,
        config.initial_site,
        config.coin_state(),
    )?;

    let mut screen = config.screen_line().zip(config.screen).map(|(line, s)| ScreenAccumulator::new(line, s.window));
    let mut norm_dev = NormTracker::default();
    norm_dev.observe(&field)?;
    observer.observe(&field)?;
    if let Some(acc) = screen.as_mut() {
        acc.observe_if_in_window(&field)?;
    }

    let final_field = {
        let mut observers: Vec<&mut dyn StepObserver> = vec![&mut norm_dev, observer];
        if let Some(acc) = screen.as_mut() {
            observers.push(acc);
        }
        evolve(field, &coin, &links, config.steps, &mut observers)?
    };

    let prob = probability(&final_field);
    let extrema = match &screen {
        Some(acc) => {
            let profile = acc.parity_profile(acc.line.position());
            Some(find_extrema(&profile, config.threshold)?)
        }
        None => None,
    };
    let transmitted_fraction = config
        .barrier
        .as_ref()
        .map(|b| region_probability(&prob, |s| b.beyond(s)));

    Ok(ExperimentResult {
        config: config.clone(),
        final_field,
        probability: prob,
        screen,
        extrema,
        transmitted_fraction,
        max_norm_deviation: norm_dev.worst,
        assumptions: config.assumptions(),
        elapsed: started.elapsed(),
    })
}

#[derive(Default)]
struct NormTracker {
    worst: f64,
}

impl StepObserver for NormTracker {
    fn observe(&mut self, field: &AmplitudeField) -> Result<()> {
        self.worst = self.worst.max((field.norm() - 1.0).abs());
        Ok(())
    }
}

/// Relative L1 distance `|I_double - sum(parts)|_1 / |I_double|_1` over all screen slots.
pub fn relative_l1_deviation(double: &ScreenAccumulator, parts: &[&ScreenAccumulator]) -> Result<f64> {
    for p in parts {
        if p.line != double.line || p.window != double.window {
            return Err(Error::MismatchedScreens(format!(
                "{:?} {:?} vs {:?} {:?}",
                double.line, double.window, p.line, p.window
            )));
        }
    }
    let mut slots: Vec<i32> = double.intensity.keys().copied().collect();
    for p in parts {
        slots.extend(p.intensity.keys().copied());
    }
    slots.sort_unstable();
    slots.dedup();
    let mut diff = 0.0;
    let mut norm = 0.0;
    for n in slots {
        let d = double.get(n);
        let sum: f64 = parts.iter().map(|p| p.get(n)).sum();
        diff += (d - sum).abs();
        norm += d.abs();
    }
    if norm == 0.0 {
        return Err(Error::MismatchedScreens("double-slit screen recorded no intensity".into()));
    }
    Ok(diff / norm)
}

/// Deviation of the double-slit screen from the sum of the two single-slit screens.
pub fn superposition_deviation(
    double: &ExperimentResult,
    upper: &ExperimentResult,
    lower: &ExperimentResult,
) -> Result<f64> {
    let screen = |r: &ExperimentResult| {
        r.screen
            .as_ref()
            .ok_or_else(|| Error::MismatchedScreens("run has no screen".into()))
            .cloned()
    };
    let (d, u, l) = (screen(double)?, screen(upper)?, screen(lower)?);
    let same_geometry = |r: &ExperimentResult| {
        r.config.coin == double.config.coin
            && r.config.steps == double.config.steps
            && r.config.barrier.as_ref().map(|b| (b.x, b.orientation))
                == double.config.barrier.as_ref().map(|b| (b.x, b.orientation))
    };
    if !same_geometry(upper) || !same_geometry(lower) {
        return Err(Error::MismatchedScreens("runs differ in coin, steps or barrier position".into()));
    }
    relative_l1_deviation(&d, &[&u, &l])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_geometry() {
        let fig2 = preset("fig2").unwrap();
        let b = fig2.barrier.as_ref().unwrap();
        assert_eq!((b.x, b.slits.clone()), (20, vec![Slit::new(0, 5.0)]));
        assert_eq!(fig2.steps, 80);
        let fig6 = preset("fig6_grover").unwrap();
        assert_eq!(fig6.steps, 120);
        assert_eq!(fig6.screen.unwrap().x, 70);
        assert!(preset("free_hadamard").unwrap().barrier.is_none());
        assert!(matches!(preset("fig7"), Err(Error::UnknownPreset(_))));
        for name in PRESET_NAMES {
            preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn default_states_are_normalized() {
        let h = default_initial_state(CoinKind::Hadamard);
        assert_eq!(h, [C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(0.0, 0.5), C64::new(-0.5, 0.0)]);
        for kind in [CoinKind::Grover, CoinKind::Fourier] {
            let norm: f64 = default_initial_state(kind).iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn assumptions_are_flagged() {
        assert!(preset("fig2").unwrap().assumptions().is_empty());
        let flags = preset("fig6_grover").unwrap().assumptions();
        assert!(flags.contains(&"default-initial-state:grover".to_string()));
        assert!(flags.iter().any(|f| f.starts_with("extremum-threshold")));
    }

    #[test]
    fn validation_catches_bad_geometry() {
        let behind = preset("fig4").unwrap().with_screen(10, (0, 100));
        assert!(matches!(behind.validate(), Err(Error::InvalidConfig(_))));
        let mut small = preset("fig2").unwrap();
        small.box_radius = 50;
        assert!(small.validate().is_err());
        let mut custom = ExperimentConfig::new(CoinKind::Custom, 4);
        assert!(custom.validate().is_err());
        custom.custom_coin = Some(*CoinOperator::grover().entries());
        assert!(custom.validate().is_ok());
    }

    #[test]
    fn solid_wall_transmits_nothing() {
        let cfg = ExperimentConfig::new(CoinKind::Hadamard, 30)
            .with_barrier(BarrierSpec::axis(6, vec![]))
            .with_screen(12, (0, 30));
        let result = run(&cfg).unwrap();
        assert_eq!(result.transmitted_fraction, Some(0.0));
        assert!(result.screen.unwrap().profile().iter().all(|&(_, v)| v == 0.0));
        assert!(result.max_norm_deviation < 1e-12);
    }

    #[test]
    fn self_comparison_has_zero_deviation() {
        let mut acc = ScreenAccumulator::column(0, (0, 1));
        acc.intensity.insert(0, 0.5);
        acc.intensity.insert(2, 0.25);
        let zero = ScreenAccumulator::column(0, (0, 1));
        assert_eq!(relative_l1_deviation(&acc, &[&acc, &zero]).unwrap(), 0.0);
        let other = ScreenAccumulator::column(2, (0, 1));
        assert!(relative_l1_deviation(&acc, &[&other]).is_err());
    }
}
