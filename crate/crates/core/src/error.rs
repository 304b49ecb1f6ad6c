use thiserror::Error;

use crate::lattice::Site;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coin state is not normalized (squared norm {norm_sqr})")]
    NonNormalizedCoinState { norm_sqr: f64 },
    #[error("site ({}, {}) has odd parity; lattice sites need m + n even", .0.m, .0.n)]
    OddParitySite(Site),
    #[error("site ({}, {}) lies outside the radius-{radius} box", .site.m, .site.n)]
    SiteOutsideBox { site: Site, radius: usize },
    #[error("coin operator is not unitary (max |C^dagger C - I| = {residual:e})")]
    NonUnitary { residual: f64 },
    #[error("slits overlap: [{0}, {1}] and [{2}, {3}]")]
    OverlappingSlits(f64, f64, f64, f64),
    #[error("invalid barrier: {0}")]
    InvalidBarrier(String),
    #[error("walker support reaches the box edge at t = {time} (radius {radius})")]
    SupportTouchesBoundary { time: usize, radius: usize },
    #[error("time {time} lies outside the screen window [{begin}, {end}]")]
    TimeOutsideWindow { time: usize, begin: usize, end: usize },
    #[error("cannot find extrema of an empty profile")]
    EmptyProfile,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("screens do not match: {0}")]
    MismatchedScreens(String),
    #[error("dense oracle radius {0} exceeds the limit of 8")]
    RadiusTooLarge(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid experiment: {0}")]
    InvalidConfig(String),
}
