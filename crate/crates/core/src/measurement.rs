//! Probability distributions, screen accumulation and profile analysis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::StepObserver;
use crate::lattice::{AmplitudeField, Site};

/// Default relative threshold for accepting a local maximum.
pub const DEFAULT_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityField {
    center: Site,
    radius: usize,
    time: usize,
    values: Vec<f64>,
}

/// Per-site probability `P[m,n] = sum_jk |A[j,k; m,n]|^2`.
pub fn probability(field: &AmplitudeField) -> ProbabilityField {
    ProbabilityField {
        center: field.center(),
        radius: field.radius(),
        time: field.time(),
        values: field
            .data()
            .iter()
            .map(|s| s.iter().map(|a| a.norm_sqr()).sum())
            .collect(),
    }
}

impl ProbabilityField {
    pub fn time(&self) -> usize {
        self.time
    }

    pub fn center(&self) -> Site {
        self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    fn side(&self) -> usize {
        2 * self.radius + 1
    }

    fn index_of(&self, site: Site) -> Option<usize> {
        let r = self.radius as i32;
        let (dm, dn) = (site.m - self.center.m, site.n - self.center.n);
        if dm.abs() > r || dn.abs() > r {
            return None;
        }
        Some((dm + r) as usize * self.side() + (dn + r) as usize)
    }

    /// Zero outside the box and at odd-parity positions.
    pub fn get(&self, site: Site) -> f64 {
        self.index_of(site).map_or(0.0, |i| self.values[i])
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `(site, P)` for every even-parity site of the box in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (Site, f64)> + '_ {
        let side = self.side();
        let r = self.radius as i32;
        self.values.iter().enumerate().filter_map(move |(i, &p)| {
            let site = Site::new(
                (i / side) as i32 - r + self.center.m,
                (i % side) as i32 - r + self.center.n,
            );
            site.is_even().then_some((site, p))
        })
    }

    /// Range of `m` (or `n`) values covered by the box.
    pub fn m_range(&self) -> std::ops::RangeInclusive<i32> {
        let r = self.radius as i32;
        self.center.m - r..=self.center.m + r
    }

    pub fn n_range(&self) -> std::ops::RangeInclusive<i32> {
        let r = self.radius as i32;
        self.center.n - r..=self.center.n + r
    }

    /// Total probability of column `m = x`.
    pub fn column_total(&self, x: i32) -> f64 {
        self.n_range().map(|n| self.get(Site::new(x, n))).sum()
    }
}

/// Rows of column `x` (only sites with `x + n` even), ascending in `n`.
/// With `filter_nonzero`, rows whose value is `<= eps` are dropped.
pub fn column_profile(p: &ProbabilityField, x: i32, filter_nonzero: bool, eps: f64) -> Vec<(i32, f64)> {
    p.n_range()
        .filter(|&n| Site::new(x, n).is_even())
        .map(|n| (n, p.get(Site::new(x, n))))
        .filter(|&(_, v)| !filter_nonzero || v > eps)
        .collect()
}

/// Sum of `P` over the sites accepted by `predicate`.
pub fn region_probability(p: &ProbabilityField, predicate: impl Fn(Site) -> bool) -> f64 {
    p.iter().filter(|&(s, _)| predicate(s)).map(|(_, v)| v).sum()
}

/// Line of sites on which a screen records intensity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "orientation", content = "x")]
pub enum ScreenLine {
    /// Column `m = x`; slot `n` is the site `(x, n)`.
    Column(i32),
    /// Anti-diagonal `m + n = 2x`; slot `v` is the site `(x + v, x - v)`.
    AntiDiagonal(i32),
}

impl ScreenLine {
    pub fn position(self) -> i32 {
        match self {
            ScreenLine::Column(x) | ScreenLine::AntiDiagonal(x) => x,
        }
    }

    pub fn site(self, slot: i32) -> Site {
        match self {
            ScreenLine::Column(x) => Site::new(x, slot),
            ScreenLine::AntiDiagonal(x) => Site::new(x + slot, x - slot),
        }
    }

    /// Slots whose site is even and lies in the box of `center`/`radius`.
    fn slots(self, center: Site, radius: usize) -> Vec<i32> {
        let r = radius as i32;
        let inside = |s: Site| (s.m - center.m).abs() <= r && (s.n - center.n).abs() <= r;
        let span = 2 * r + (center.m.abs() + center.n.abs()) + self.position().abs();
        (-span..=span)
            .filter(|&slot| {
                let s = self.site(slot);
                s.is_even() && inside(s)
            })
            .collect()
    }
}

/// Non-perturbing screen: sums per-slot probability over an inclusive time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenAccumulator {
    pub line: ScreenLine,
    pub window: (usize, usize),
    pub intensity: BTreeMap<i32, f64>,
    observations: usize,
}

impl ScreenAccumulator {
    pub fn new(line: ScreenLine, window: (usize, usize)) -> Self {
        ScreenAccumulator { line, window, intensity: BTreeMap::new(), observations: 0 }
    }

    /// Column screen at `m = x`.
    pub fn column(x: i32, window: (usize, usize)) -> Self {
        Self::new(ScreenLine::Column(x), window)
    }

    pub fn observations(&self) -> usize {
        self.observations
    }

    /// Add the field's current probabilities along the screen line.
    pub fn observe_field(&mut self, field: &AmplitudeField) -> Result<()> {
        let t = field.time();
        if t < self.window.0 || t > self.window.1 {
            return Err(Error::TimeOutsideWindow { time: t, begin: self.window.0, end: self.window.1 });
        }
        for slot in self.line.slots(field.center(), field.radius()) {
            *self.intensity.entry(slot).or_insert(0.0) += field.site_probability(self.line.site(slot));
        }
        self.observations += 1;
        Ok(())
    }

    /// Observe only when the field time falls inside the window.
    pub fn observe_if_in_window(&mut self, field: &AmplitudeField) -> Result<()> {
        if (self.window.0..=self.window.1).contains(&field.time()) {
            self.observe_field(field)
        } else {
            Ok(())
        }
    }

    pub fn get(&self, slot: i32) -> f64 {
        self.intensity.get(&slot).copied().unwrap_or(0.0)
    }

    /// `(slot, intensity)` in ascending slot order.
    pub fn profile(&self) -> Vec<(i32, f64)> {
        self.intensity.iter().map(|(&n, &v)| (n, v)).collect()
    }

    /// Profile restricted to the slots of one parity class, matching `reference`.
    ///
    /// A column screen only ever stores one parity class. An anti-diagonal screen
    /// receives both classes on alternating time steps, so analysis keeps the
    /// class containing `reference` (consecutive entries two slots apart).
    pub fn parity_profile(&self, reference: i32) -> Vec<(i32, f64)> {
        self.intensity
            .iter()
            .filter(|(&n, _)| (n - reference).rem_euclid(2) == 0)
            .map(|(&n, &v)| (n, v))
            .collect()
    }

    /// Merge another accumulator over the same line (window union).
    pub fn merged(&self, other: &ScreenAccumulator) -> Result<ScreenAccumulator> {
        if self.line != other.line {
            return Err(Error::MismatchedScreens(format!("{:?} vs {:?}", self.line, other.line)));
        }
        let mut out = self.clone();
        for (&n, &v) in &other.intensity {
            *out.intensity.entry(n).or_insert(0.0) += v;
        }
        out.window = (self.window.0.min(other.window.0), self.window.1.max(other.window.1));
        out.observations += other.observations;
        Ok(out)
    }
}

/// Functional form of [`ScreenAccumulator::observe_field`].
pub fn screen_observe(acc: &ScreenAccumulator, field: &AmplitudeField) -> Result<ScreenAccumulator> {
    let mut next = acc.clone();
    next.observe_field(field)?;
    Ok(next)
}

impl StepObserver for ScreenAccumulator {
    fn observe(&mut self, field: &AmplitudeField) -> Result<()> {
        self.observe_if_in_window(field)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub n: i32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileExtrema {
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
    pub threshold: f64,
}

impl ProfileExtrema {
    /// Accepted maximum with the largest value.
    pub fn global_max(&self) -> Option<&Extremum> {
        self.maxima.iter().max_by(|a, b| a.value.total_cmp(&b.value))
    }

    /// `min(minima) / max(maxima)`; `None` without interior minima.
    pub fn min_max_ratio(&self) -> Option<f64> {
        let max = self.global_max()?.value;
        let min = self.minima.iter().map(|e| e.value).min_by(f64::total_cmp)?;
        Some(min / max)
    }

    /// Accepted maximum closest to slot `n` (ties go to the lower slot).
    pub fn maximum_nearest(&self, n: i32) -> Option<&Extremum> {
        self.maxima.iter().min_by_key(|e| ((e.n - n).abs(), e.n))
    }

    /// Minima on either side of the maximum nearest to `n`.
    pub fn minima_beside(&self, n: i32) -> Vec<&Extremum> {
        let Some(pos) = self
            .maxima
            .iter()
            .enumerate()
            .min_by_key(|(_, e)| ((e.n - n).abs(), e.n))
            .map(|(i, _)| i)
        else {
            return Vec::new();
        };
        let mut out = Vec::new();
        if pos > 0 {
            out.push(&self.minima[pos - 1]);
        }
        if pos < self.minima.len() {
            out.push(&self.minima[pos]);
        }
        out
    }
}

/// Thresholded local extrema of a profile sampled on consecutive parity rows.
///
/// A maximum is strictly greater than each existing neighbour (endpoints have
/// one) and at least `rel_threshold` times the global maximum. Between each
/// pair of consecutive accepted maxima the lowest entry is reported as a minimum.
pub fn find_extrema(profile: &[(i32, f64)], rel_threshold: f64) -> Result<ProfileExtrema> {
    if profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let values: Vec<f64> = profile.iter().map(|&(_, v)| v).collect();
    let global = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = rel_threshold * global;
    let last = values.len() - 1;
    let peaks: Vec<usize> = (0..values.len())
        .filter(|&i| {
            let v = values[i];
            let left_ok = i == 0 || v > values[i - 1];
            let right_ok = i == last || v > values[i + 1];
            left_ok && right_ok && v >= floor && v > 0.0
        })
        .collect();
    let maxima = peaks
        .iter()
        .map(|&i| Extremum { n: profile[i].0, value: values[i] })
        .collect();
    let minima = peaks
        .windows(2)
        .map(|w| {
            let i = (w[0] + 1..w[1])
                .min_by(|&a, &b| values[a].total_cmp(&values[b]))
                .expect("strict peaks are never adjacent");
            Extremum { n: profile[i].0, value: values[i] }
        })
        .collect();
    Ok(ProfileExtrema { maxima, minima, threshold: rel_threshold })
}
