//! Broken-link sets, the link functions, and barrier geometries.
//!
//! An intact edge lets the walker cross. A broken edge makes the component
//! that tries to cross it stay on its site with its coin flipped. Breaks are
//! stored as undirected edges, so both endpoints always agree.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CoinIndex, Site};

/// Anything that can answer "is the edge from `site` in direction `dir` broken?".
pub trait LinkTopology: Sync {
    fn is_broken(&self, site: Site, dir: CoinIndex) -> bool;
}

impl<T: LinkTopology + ?Sized> LinkTopology for &T {
    fn is_broken(&self, site: Site, dir: CoinIndex) -> bool {
        (**self).is_broken(site, dir)
    }
}

/// Set of permanently broken undirected edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkSet {
    broken: BTreeSet<(Site, CoinIndex)>,
}

/// Key an edge by its lexicographically smaller endpoint.
fn canonical(site: Site, dir: CoinIndex) -> (Site, CoinIndex) {
    let other = site.neighbor(dir);
    if site <= other {
        (site, dir)
    } else {
        (other, dir.flip())
    }
}

impl LinkSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.broken.len()
    }

    pub fn is_empty(&self) -> bool {
        self.broken.is_empty()
    }

    pub fn break_edge(mut self, site: Site, dir: CoinIndex) -> Self {
        self.insert(site, dir);
        self
    }

    pub fn restore_edge(mut self, site: Site, dir: CoinIndex) -> Self {
        self.broken.remove(&canonical(site, dir));
        self
    }

    pub(crate) fn insert(&mut self, site: Site, dir: CoinIndex) {
        debug_assert!(site.is_even());
        self.broken.insert(canonical(site, dir));
    }

    /// Break all four edges incident to `site`.
    pub fn isolate(mut self, site: Site) -> Self {
        for dir in CoinIndex::ALL {
            self.insert(site, dir);
        }
        self
    }

    pub fn union(mut self, other: &LinkSet) -> Self {
        self.broken.extend(other.broken.iter().copied());
        self
    }

    /// Canonical `(endpoint, direction)` keys of all broken edges.
    pub fn edges(&self) -> impl Iterator<Item = (Site, CoinIndex)> + '_ {
        self.broken.iter().copied()
    }
}

impl LinkTopology for LinkSet {
    fn is_broken(&self, site: Site, dir: CoinIndex) -> bool {
        self.broken.contains(&canonical(site, dir))
    }
}

/// Link function for the `m` direction: `(-1)^j` for an intact edge, 0 for a broken one.
pub fn l1(links: &impl LinkTopology, j: u8, k: u8, m: i32, n: i32) -> i32 {
    let dir = CoinIndex::new(j, k);
    if links.is_broken(Site::new(m, n), dir) {
        0
    } else {
        dir.offset().0
    }
}

/// Link function for the `n` direction: `(-1)^k` for an intact edge, 0 for a broken one.
pub fn l2(links: &impl LinkTopology, j: u8, k: u8, m: i32, n: i32) -> i32 {
    let dir = CoinIndex::new(j, k);
    if links.is_broken(Site::new(m, n), dir) {
        0
    } else {
        dir.offset().1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierOrientation {
    /// Column of sites at `m = x`.
    AxisPerpendicular,
    /// Anti-diagonal of sites `m + n = 2x`, perpendicular to the main diagonal.
    MainDiagonalPerpendicular,
}

impl BarrierOrientation {
    pub fn name(self) -> &'static str {
        match self {
            BarrierOrientation::AxisPerpendicular => "axis",
            BarrierOrientation::MainDiagonalPerpendicular => "diagonal",
        }
    }
}

impl std::str::FromStr for BarrierOrientation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "axis" => Ok(BarrierOrientation::AxisPerpendicular),
            "diagonal" => Ok(BarrierOrientation::MainDiagonalPerpendicular),
            other => Err(format!("unknown orientation `{other}` (expected axis or diagonal)")),
        }
    }
}

/// Which edges of a non-slit wall site are broken.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallCut {
    /// Every edge that does not lead beyond the wall: the walker cannot enter a
    /// wall site from the near side or move along the wall, but the far-side
    /// edges stay intact.
    #[default]
    EntrySide,
    /// All four edges; each wall site becomes an isolated reflector.
    Isolated,
}

impl WallCut {
    pub fn name(self) -> &'static str {
        match self {
            WallCut::EntrySide => "entry",
            WallCut::Isolated => "isolated",
        }
    }
}

impl std::str::FromStr for WallCut {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "entry" => Ok(WallCut::EntrySide),
            "isolated" => Ok(WallCut::Isolated),
            other => Err(format!("unknown cut `{other}` (expected entry or isolated)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slit {
    pub center: i32,
    pub width: f64,
}

impl Slit {
    pub fn new(center: i32, width: f64) -> Self {
        Slit { center, width }
    }

    fn bounds(&self) -> (f64, f64) {
        let half = self.width / 2.0;
        (self.center as f64 - half, self.center as f64 + half)
    }

    pub fn contains(&self, coord: i32) -> bool {
        (coord - self.center).abs() as f64 <= self.width / 2.0
    }
}

/// A wall of cut sites with slits of working sites.
///
/// For the axis orientation the wall is the column `m = x` and slit
/// coordinates are `n`. For the diagonal orientation the wall is the line of
/// sites `(x + v, x - v)` and slit coordinates are the offset `v`. The far
/// side of the wall is the side of larger `m` (axis) or larger `m + n`
/// (diagonal); walkers are expected to arrive from the near side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub x: i32,
    pub slits: Vec<Slit>,
    pub orientation: BarrierOrientation,
    #[serde(default)]
    pub cut: WallCut,
}

impl BarrierSpec {
    pub fn axis(x: i32, slits: Vec<Slit>) -> Self {
        BarrierSpec {
            x,
            slits,
            orientation: BarrierOrientation::AxisPerpendicular,
            cut: WallCut::default(),
        }
    }

    pub fn diagonal(x: i32, slits: Vec<Slit>) -> Self {
        BarrierSpec {
            x,
            slits,
            orientation: BarrierOrientation::MainDiagonalPerpendicular,
            cut: WallCut::default(),
        }
    }

    pub fn with_cut(mut self, cut: WallCut) -> Self {
        self.cut = cut;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for slit in &self.slits {
            if !(slit.width.is_finite() && slit.width > 0.0) {
                return Err(Error::InvalidBarrier(format!(
                    "slit width must be positive, got {}",
                    slit.width
                )));
            }
            if self.orientation == BarrierOrientation::AxisPerpendicular
                && (self.x + slit.center).rem_euclid(2) != 0
            {
                return Err(Error::InvalidBarrier(format!(
                    "slit centre {} is not a site of column {} (x + y must be even)",
                    slit.center, self.x
                )));
            }
        }
        let mut bounds: Vec<(f64, f64)> = self.slits.iter().map(Slit::bounds).collect();
        bounds.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in bounds.windows(2) {
            if pair[1].0 <= pair[0].1 {
                return Err(Error::OverlappingSlits(pair[0].0, pair[0].1, pair[1].0, pair[1].1));
            }
        }
        Ok(())
    }

    pub fn in_slit(&self, coord: i32) -> bool {
        self.slits.iter().any(|s| s.contains(coord))
    }

    /// Site of the barrier line at coordinate `coord` along the line.
    pub fn line_site(&self, coord: i32) -> Site {
        match self.orientation {
            BarrierOrientation::AxisPerpendicular => Site::new(self.x, coord),
            BarrierOrientation::MainDiagonalPerpendicular => {
                Site::new(self.x + coord, self.x - coord)
            }
        }
    }

    /// Line coordinates of the barrier sites within `half_length` of the line centre.
    pub fn line_coords(&self, half_length: usize) -> impl Iterator<Item = i32> + '_ {
        let h = half_length as i32;
        (-h..=h).filter(move |&c| self.line_site(c).is_even())
    }

    /// True when `site` lies strictly on the far side of the wall.
    pub fn beyond(&self, site: Site) -> bool {
        match self.orientation {
            BarrierOrientation::AxisPerpendicular => site.m > self.x,
            BarrierOrientation::MainDiagonalPerpendicular => site.m + site.n > 2 * self.x,
        }
    }
}

/// Axis-perpendicular wall covering rows `|n| <= half_length`.
pub fn barrier_with_slits(spec: &BarrierSpec, half_length: usize) -> Result<LinkSet> {
    if spec.orientation != BarrierOrientation::AxisPerpendicular {
        return Err(Error::InvalidBarrier(
            "barrier_with_slits needs an axis-perpendicular barrier".into(),
        ));
    }
    build_wall(spec, half_length)
}

/// Anti-diagonal wall `m + n = 2x` covering offsets `|v| <= half_length`.
pub fn diagonal_barrier_with_slits(spec: &BarrierSpec, half_length: usize) -> Result<LinkSet> {
    if spec.orientation != BarrierOrientation::MainDiagonalPerpendicular {
        return Err(Error::InvalidBarrier(
            "diagonal_barrier_with_slits needs a main-diagonal-perpendicular barrier".into(),
        ));
    }
    build_wall(spec, half_length)
}

/// Dispatch on the barrier orientation.
pub fn build_barrier(spec: &BarrierSpec, half_length: usize) -> Result<LinkSet> {
    build_wall(spec, half_length)
}

fn build_wall(spec: &BarrierSpec, half_length: usize) -> Result<LinkSet> {
    spec.validate()?;
    let mut links = LinkSet::new();
    for coord in spec.line_coords(half_length) {
        if !spec.in_slit(coord) {
            let site = spec.line_site(coord);
            for dir in CoinIndex::ALL {
                if spec.cut == WallCut::Isolated || !spec.beyond(site.neighbor(dir)) {
                    links.insert(site, dir);
                }
            }
        }
    }
    Ok(links)
}

/// Per-site bitmask of broken directions over a square box, for fast lookups
/// inside the stepper. Optionally closes every edge that leaves the box.
#[derive(Debug, Clone)]
pub struct LinkMask {
    center: Site,
    radius: usize,
    closed_boundary: bool,
    bits: Vec<u8>,
}

impl LinkMask {
    pub fn compile(links: &impl LinkTopology, center: Site, radius: usize) -> Self {
        Self::build(links, center, radius, false)
    }

    /// Like [`LinkMask::compile`], with every box-leaving edge treated as broken.
    pub fn compile_closed(links: &impl LinkTopology, center: Site, radius: usize) -> Self {
        Self::build(links, center, radius, true)
    }

    fn build(links: &impl LinkTopology, center: Site, radius: usize, closed: bool) -> Self {
        let side = 2 * radius + 1;
        let r = radius as i32;
        let mut bits = vec![0u8; side * side];
        for row in 0..side {
            for col in 0..side {
                let site = Site::new(row as i32 - r + center.m, col as i32 - r + center.n);
                if !site.is_even() {
                    continue;
                }
                let mut b = 0u8;
                for dir in CoinIndex::ALL {
                    let nb = site.neighbor(dir);
                    let leaves = (nb.m - center.m).abs() > r || (nb.n - center.n).abs() > r;
                    if links.is_broken(site, dir) || (closed && leaves) {
                        b |= 1 << dir.index();
                    }
                }
                bits[row * side + col] = b;
            }
        }
        LinkMask { center, radius, closed_boundary: closed, bits }
    }

    pub fn center(&self) -> Site {
        self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }
}

impl LinkTopology for LinkMask {
    fn is_broken(&self, site: Site, dir: CoinIndex) -> bool {
        let r = self.radius as i32;
        let (dm, dn) = (site.m - self.center.m, site.n - self.center.n);
        if dm.abs() > r || dn.abs() > r {
            return self.closed_boundary;
        }
        let idx = (dm + r) as usize * (2 * self.radius + 1) + (dn + r) as usize;
        self.bits[idx] & (1 << dir.index()) != 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D00: CoinIndex = CoinIndex { j: 0, k: 0 };
    const D11: CoinIndex = CoinIndex { j: 1, k: 1 };

    #[test]
    fn empty_set_has_no_breaks() {
        let links = LinkSet::new();
        for dir in CoinIndex::ALL {
            assert!(!links.is_broken(Site::new(4, -2), dir));
        }
        assert_eq!(l1(&links, 0, 0, 0, 0), 1);
        assert_eq!(l2(&links, 0, 0, 0, 0), 1);
        assert_eq!(l1(&links, 1, 0, 0, 0), -1);
        assert_eq!(l2(&links, 1, 0, 0, 0), 1);
    }

    #[test]
    fn breaks_are_undirected() {
        let links = LinkSet::new().break_edge(Site::ORIGIN, D00);
        assert!(links.is_broken(Site::new(1, 1), D11));
        assert_eq!(l1(&links, 0, 0, 0, 0), 0);
        assert_eq!(l2(&links, 0, 0, 0, 0), 0);
        assert_eq!(l1(&links, 1, 1, 1, 1), 0);
    }

    #[test]
    fn break_restore_idempotence() {
        let base = LinkSet::new().break_edge(Site::new(2, 0), CoinIndex::new(1, 0));
        let once = base.clone().break_edge(Site::ORIGIN, D00);
        let twice = once.clone().break_edge(Site::ORIGIN, D00);
        assert_eq!(once, twice);
        assert_eq!(once.clone().restore_edge(Site::ORIGIN, D00), base);
        let restored = once.restore_edge(Site::new(1, 1), D11);
        assert!(!restored.is_broken(Site::ORIGIN, D00));
    }

    #[test]
    fn single_slit_opens_three_sites() {
        let spec = BarrierSpec::axis(20, vec![Slit::new(0, 5.0)]).with_cut(WallCut::Isolated);
        let links = barrier_with_slits(&spec, 40).unwrap();
        let open: Vec<i32> = spec
            .line_coords(40)
            .filter(|&n| CoinIndex::ALL.iter().all(|&d| !links.is_broken(Site::new(20, n), d)))
            .collect();
        assert_eq!(open, vec![-2, 0, 2]);
        // Column sites are two rows apart, so isolated sites share no edges.
        assert_eq!(links.len(), (spec.line_coords(40).count() - 3) * 4);
    }

    #[test]
    fn double_slit_sites() {
        let spec = BarrierSpec::axis(20, vec![Slit::new(6, 1.0), Slit::new(-6, 1.0)]);
        let links = barrier_with_slits(&spec, 30).unwrap();
        assert!(!links.is_broken(Site::new(20, 6), D00));
        let open: Vec<i32> = spec
            .line_coords(30)
            .filter(|&n| !links.is_broken(Site::new(20, n), D11))
            .collect();
        assert_eq!(open, vec![-6, 6]);
        // Nothing outside the wall column is touched except through shared edges.
        assert!(!links.is_broken(Site::new(18, 0), D00));
    }

    #[test]
    fn entry_cut_keeps_far_side_edges() {
        let spec = BarrierSpec::axis(20, vec![Slit::new(0, 1.0)]);
        let links = barrier_with_slits(&spec, 10).unwrap();
        let wall_site = Site::new(20, 2);
        assert!(links.is_broken(wall_site, CoinIndex::new(1, 0)));
        assert!(links.is_broken(wall_site, D11));
        assert!(!links.is_broken(wall_site, D00));
        assert!(!links.is_broken(wall_site, CoinIndex::new(0, 1)));
        assert_eq!(links.len(), (spec.line_coords(10).count() - 1) * 2);
    }

    #[test]
    fn solid_wall_cuts_every_crossing() {
        let spec = BarrierSpec::axis(20, vec![]);
        let links = barrier_with_slits(&spec, 10).unwrap();
        for n in -9..=9 {
            let site = Site::new(19, n);
            if site.is_even() {
                assert!(links.is_broken(site, CoinIndex::new(0, 0)));
                assert!(links.is_broken(site, CoinIndex::new(0, 1)));
            }
        }
    }

    #[test]
    fn diagonal_wall_with_one_slit() {
        let spec = BarrierSpec::diagonal(10, vec![Slit::new(0, 1.0)]).with_cut(WallCut::Isolated);
        let links = diagonal_barrier_with_slits(&spec, 20).unwrap();
        let open: Vec<Site> = spec
            .line_coords(20)
            .map(|v| spec.line_site(v))
            .filter(|&s| CoinIndex::ALL.iter().any(|&d| !links.is_broken(s, d)))
            .collect();
        assert_eq!(open, vec![Site::new(10, 10)]);
        assert!(barrier_with_slits(&spec, 20).is_err());

        // Entry cut: only the edge toward (m + 1, n + 1) survives on wall sites,
        // including the edges running along the wall.
        let entry = BarrierSpec::diagonal(10, vec![Slit::new(0, 1.0)]);
        let links = diagonal_barrier_with_slits(&entry, 20).unwrap();
        let wall_site = entry.line_site(2);
        assert!(!links.is_broken(wall_site, D00));
        for d in [CoinIndex::new(0, 1), CoinIndex::new(1, 0), D11] {
            assert!(links.is_broken(wall_site, d));
        }
        assert!(links.is_broken(Site::new(10, 10), CoinIndex::new(1, 0)));
        assert!(!links.is_broken(Site::new(10, 10), D11));
    }

    #[test]
    fn slit_validation() {
        let overlapping = BarrierSpec::axis(20, vec![Slit::new(0, 5.0), Slit::new(2, 1.0)]);
        assert!(matches!(overlapping.validate(), Err(Error::OverlappingSlits(..))));
        let odd = BarrierSpec::axis(20, vec![Slit::new(1, 1.0)]);
        assert!(matches!(odd.validate(), Err(Error::InvalidBarrier(_))));
        let zero = BarrierSpec::axis(20, vec![Slit::new(0, 0.0)]);
        assert!(zero.validate().is_err());
    }

    #[test]
    fn mask_matches_set() {
        let spec = BarrierSpec::axis(4, vec![Slit::new(0, 1.0)]);
        let links = barrier_with_slits(&spec, 8).unwrap().break_edge(Site::new(-2, 2), D11);
        let mask = LinkMask::compile(&links, Site::ORIGIN, 6);
        for m in -6..=6 {
            for n in -6..=6 {
                let s = Site::new(m, n);
                if s.is_even() {
                    for d in CoinIndex::ALL {
                        assert_eq!(mask.is_broken(s, d), links.is_broken(s, d), "{s:?} {d:?}");
                    }
                }
            }
        }
        let closed = LinkMask::compile_closed(&LinkSet::new(), Site::ORIGIN, 2);
        assert!(closed.is_broken(Site::new(2, 0), D00));
        assert!(!closed.is_broken(Site::new(0, 0), D00));
        assert!(closed.is_broken(Site::new(3, 3), D11));
    }
}
