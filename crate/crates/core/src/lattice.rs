//! Walker wavefunction on the diagonal two-dimensional lattice.
//!
//! Sites are integer pairs `(m, n)` with `m + n` even; links join a site to
//! its four diagonal neighbours `(m ± 1, n ± 1)`. Each site carries four coin
//! components `(j, k)`, and component `(j, k)` points toward
//! `(m + (-1)^j, n + (-1)^k)`. Whenever the four components are flattened into
//! an array the index is `2j + k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Four coin components of one site, flattened as `2j + k`.
pub type CoinState = [C64; 4];

const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub m: i32,
    pub n: i32,
}

impl Site {
    pub const ORIGIN: Site = Site { m: 0, n: 0 };

    pub const fn new(m: i32, n: i32) -> Self {
        Site { m, n }
    }

    pub fn is_even(self) -> bool {
        (self.m + self.n).rem_euclid(2) == 0
    }

    /// Neighbour reached by following coin direction `dir`.
    pub fn neighbor(self, dir: CoinIndex) -> Site {
        let (dm, dn) = dir.offset();
        Site::new(self.m + dm, self.n + dn)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoinIndex {
    pub j: u8,
    pub k: u8,
}

impl CoinIndex {
    pub const ALL: [CoinIndex; 4] = [
        CoinIndex { j: 0, k: 0 },
        CoinIndex { j: 0, k: 1 },
        CoinIndex { j: 1, k: 0 },
        CoinIndex { j: 1, k: 1 },
    ];

    /// Panics if either bit is not 0 or 1.
    pub fn new(j: u8, k: u8) -> Self {
        assert!(j < 2 && k < 2, "coin bits must be 0 or 1, got ({j}, {k})");
        CoinIndex { j, k }
    }

    pub fn from_index(index: usize) -> Self {
        Self::ALL[index]
    }

    pub fn index(self) -> usize {
        2 * self.j as usize + self.k as usize
    }

    /// `(1 - j, 1 - k)`: the direction pointing back along the same edge.
    pub fn flip(self) -> Self {
        CoinIndex { j: 1 - self.j, k: 1 - self.k }
    }

    /// `((-1)^j, (-1)^k)`
    pub fn offset(self) -> (i32, i32) {
        (1 - 2 * self.j as i32, 1 - 2 * self.k as i32)
    }
}

/// Dense amplitude storage over the square box `|m - m0|, |n - n0| <= radius`
/// centred on `center`. Odd-parity positions are kept as zero padding and are
/// never written or reported.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeField {
    center: Site,
    radius: usize,
    time: usize,
    data: Vec<CoinState>,
}

impl AmplitudeField {
    /// All-zero field. `center` must have even parity.
    pub fn zeros(center: Site, radius: usize) -> Result<Self> {
        if !center.is_even() {
            return Err(Error::OddParitySite(center));
        }
        let side = 2 * radius + 1;
        Ok(AmplitudeField {
            center,
            radius,
            time: 0,
            data: vec![[C64::new(0.0, 0.0); 4]; side * side],
        })
    }

    /// Walker fully localized at `site` in a box centred on that site.
    pub fn new_localized(site: Site, coin_state: CoinState, radius: usize) -> Result<Self> {
        Self::localized_in(site, radius, site, coin_state)
    }

    /// Walker localized at `site` inside a box centred on `center`.
    pub fn localized_in(
        center: Site,
        radius: usize,
        site: Site,
        coin_state: CoinState,
    ) -> Result<Self> {
        let norm_sqr: f64 = coin_state.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NonNormalizedCoinState { norm_sqr });
        }
        if !site.is_even() {
            return Err(Error::OddParitySite(site));
        }
        let mut field = Self::zeros(center, radius)?;
        let idx = field
            .index_of(site)
            .ok_or(Error::SiteOutsideBox { site, radius })?;
        field.data[idx] = coin_state;
        Ok(field)
    }

    pub fn center(&self) -> Site {
        self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub(crate) fn set_time(&mut self, time: usize) {
        self.time = time;
    }

    /// Number of sites along one side of the box (including odd padding).
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn contains(&self, site: Site) -> bool {
        let r = self.radius as i64;
        (site.m as i64 - self.center.m as i64).abs() <= r
            && (site.n as i64 - self.center.n as i64).abs() <= r
    }

    /// Row-major storage index (rows are `m`, columns are `n`).
    pub fn index_of(&self, site: Site) -> Option<usize> {
        if !self.contains(site) {
            return None;
        }
        let r = self.radius as i32;
        let row = (site.m - self.center.m + r) as usize;
        let col = (site.n - self.center.n + r) as usize;
        Some(row * self.side() + col)
    }

    pub fn site_at(&self, index: usize) -> Site {
        let side = self.side();
        let r = self.radius as i32;
        Site::new(
            (index / side) as i32 - r + self.center.m,
            (index % side) as i32 - r + self.center.n,
        )
    }

    /// Coin components at `site`; zero for odd-parity or out-of-box sites.
    pub fn get(&self, site: Site) -> CoinState {
        match self.index_of(site) {
            Some(i) if site.is_even() => self.data[i],
            _ => [C64::new(0.0, 0.0); 4],
        }
    }

    /// Overwrite the coin components at an even-parity site inside the box.
    pub fn set(&mut self, site: Site, state: CoinState) -> Result<()> {
        if !site.is_even() {
            return Err(Error::OddParitySite(site));
        }
        let idx = self.index_of(site).ok_or(Error::SiteOutsideBox {
            site,
            radius: self.radius,
        })?;
        self.data[idx] = state;
        Ok(())
    }

    pub fn amplitude(&self, site: Site, coin: CoinIndex) -> C64 {
        self.get(site)[coin.index()]
    }

    /// Per-site probability `sum_jk |A_jk|^2`.
    pub fn site_probability(&self, site: Site) -> f64 {
        self.get(site).iter().map(|a| a.norm_sqr()).sum()
    }

    /// Total squared norm over all sites and coin components.
    pub fn norm(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|s| s.iter())
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// Even-parity sites whose probability exceeds `eps`, in storage order.
    pub fn support(&self, eps: f64) -> Vec<Site> {
        self.sites()
            .filter(|&s| self.site_probability(s) > eps)
            .collect()
    }

    /// Every even-parity site of the box in row-major order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.data.len())
            .map(move |i| self.site_at(i))
            .filter(|s| s.is_even())
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for state in &mut out.data {
            for a in state.iter_mut() {
                *a *= factor;
            }
        }
        out
    }

    /// `self + other`; both fields must share the same box. Time is taken from `self`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.center != other.center || self.radius != other.radius {
            return Err(Error::DimensionMismatch {
                expected: self.data.len(),
                found: other.data.len(),
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            for c in 0..4 {
                a[c] += b[c];
            }
        }
        Ok(out)
    }

    /// Largest Chebyshev distance from the centre at which any amplitude is non-zero.
    pub fn support_extent(&self) -> Option<usize> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().any(|a| a.norm_sqr() > 0.0))
            .map(|(i, _)| {
                let s = self.site_at(i);
                (s.m - self.center.m).unsigned_abs().max((s.n - self.center.n).unsigned_abs())
                    as usize
            })
            .max()
    }

    pub(crate) fn data(&self) -> &[CoinState] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [CoinState] {
        &mut self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn localized_hadamard_state() {
        let state = [c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(-0.5, 0.0)];
        let field = AmplitudeField::new_localized(Site::ORIGIN, state, 120).unwrap();
        assert_eq!(field.amplitude(Site::ORIGIN, CoinIndex::new(0, 0)), c(0.5, 0.0));
        assert_eq!(field.amplitude(Site::ORIGIN, CoinIndex::new(0, 1)), c(0.0, 0.5));
        assert_eq!(field.amplitude(Site::ORIGIN, CoinIndex::new(1, 0)), c(0.0, 0.5));
        assert_eq!(field.amplitude(Site::ORIGIN, CoinIndex::new(1, 1)), c(-0.5, 0.0));
        assert_eq!(field.time(), 0);
        assert!((field.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn basis_state() {
        let one = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let field = AmplitudeField::new_localized(Site::ORIGIN, one, 5).unwrap();
        assert_eq!(field.norm(), 1.0);
        assert_eq!(field.support(0.0), vec![Site::ORIGIN]);
        assert!(field.support(2.0).is_empty());
        assert_eq!(field.scaled(c(0.0, 0.0)).norm(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let two = [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            AmplitudeField::new_localized(Site::ORIGIN, two, 5),
            Err(Error::NonNormalizedCoinState { norm_sqr }) if (norm_sqr - 2.0).abs() < 1e-15
        ));
        let one = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(
            AmplitudeField::new_localized(Site::new(1, 0), one, 5),
            Err(Error::OddParitySite(Site::new(1, 0)))
        );
        assert!(matches!(
            AmplitudeField::localized_in(Site::ORIGIN, 3, Site::new(4, 0), one),
            Err(Error::SiteOutsideBox { .. })
        ));
    }

    #[test]
    fn coin_index_conventions() {
        for (i, c) in CoinIndex::ALL.iter().enumerate() {
            assert_eq!(c.index(), i);
            assert_eq!(CoinIndex::from_index(i), *c);
            let (dm, dn) = c.offset();
            assert_eq!(c.flip().offset(), (-dm, -dn));
        }
        assert_eq!(CoinIndex::new(0, 0).offset(), (1, 1));
        assert_eq!(CoinIndex::new(1, 0).offset(), (-1, 1));
    }

    #[test]
    fn odd_sites_are_never_reported() {
        let one = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let field = AmplitudeField::new_localized(Site::ORIGIN, one, 3).unwrap();
        assert!(field.sites().all(Site::is_even));
        assert_eq!(field.sites().count(), 25);
        assert_eq!(field.site_probability(Site::new(1, 0)), 0.0);
    }
}
