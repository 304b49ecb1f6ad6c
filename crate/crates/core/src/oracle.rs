//! Reference oracles: the explicit evolution matrix on a small box and an
//! independent one-dimensional Hadamard walk.
//!
//! The dense matrix is assembled in scatter form, `U = S (C ⊗ I)`: the coin
//! mixes the components of one site, then the shift moves each component
//! along its edge, or keeps it in place with a flipped coin when the edge is
//! broken. Edges that leave the box are closed so the truncated operator
//! stays unitary. This is a separate code path from the gather-form stepper.
//!
//! Basis ordering: index = `coin * sites + site`, with `coin = 2j + k` and
//! `site` the row-major rank among the even-parity sites of the box.

use crate::coins::CoinOperator;
use crate::error::{Error, Result};
use crate::lattice::{AmplitudeField, CoinIndex, Site, C64};
use crate::topology::LinkTopology;

pub const MAX_DENSE_RADIUS: usize = 8;

#[derive(Debug, Clone)]
pub struct DenseEvolution {
    radius: usize,
    sites: Vec<Site>,
    dim: usize,
    /// Row-major `dim × dim`.
    matrix: Vec<C64>,
}

fn box_sites(radius: usize) -> Vec<Site> {
    let r = radius as i32;
    (-r..=r)
        .flat_map(|m| (-r..=r).map(move |n| Site::new(m, n)))
        .filter(|s| s.is_even())
        .collect()
}

/// Build the evolution matrix on the box `|m|, |n| <= radius` around the origin.
pub fn build_dense(coin: &CoinOperator, links: &impl LinkTopology, radius: usize) -> Result<DenseEvolution> {
    if radius > MAX_DENSE_RADIUS {
        return Err(Error::RadiusTooLarge(radius));
    }
    let sites = box_sites(radius);
    let ns = sites.len();
    let dim = 4 * ns;
    let rank = |s: Site| sites.binary_search(&s).ok();
    let mut matrix = vec![C64::new(0.0, 0.0); dim * dim];
    for (si, &site) in sites.iter().enumerate() {
        for incoming in 0..4 {
            let col = incoming * ns + si;
            for out in CoinIndex::ALL {
                let amp = coin.entry(out.index(), incoming);
                if amp == C64::new(0.0, 0.0) {
                    continue;
                }
                let target = site.neighbor(out);
                let (dest, label) = match rank(target) {
                    Some(ti) if !links.is_broken(site, out) => (ti, out),
                    _ => (si, out.flip()),
                };
                matrix[(label.index() * ns + dest) * dim + col] += amp;
            }
        }
    }
    Ok(DenseEvolution { radius, sites, dim, matrix })
}

impl DenseEvolution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[row * self.dim + col]
    }

    /// `max |(U^† U - I)_{rc}|`
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..d {
                    acc += self.matrix[i * d + r].conj() * self.matrix[i * d + c];
                }
                if r == c {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn column_norms(&self) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|c| (0..d).map(|r| self.matrix[r * d + c].norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    /// Flatten a field on the same box into the oracle basis.
    pub fn to_vector(&self, field: &AmplitudeField) -> Result<Vec<C64>> {
        self.check_box(field)?;
        let ns = self.sites.len();
        let mut v = vec![C64::new(0.0, 0.0); self.dim];
        for (si, &s) in self.sites.iter().enumerate() {
            let state = field.get(s);
            for c in 0..4 {
                v[c * ns + si] = state[c];
            }
        }
        Ok(v)
    }

    pub fn to_field(&self, vector: &[C64], time: usize) -> Result<AmplitudeField> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: vector.len() });
        }
        let ns = self.sites.len();
        let mut field = AmplitudeField::zeros(Site::ORIGIN, self.radius)?;
        for (si, &s) in self.sites.iter().enumerate() {
            field.set(s, std::array::from_fn(|c| vector[c * ns + si]))?;
        }
        field.set_time(time);
        Ok(field)
    }

    pub fn apply_vector(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok(self
            .matrix
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn check_box(&self, field: &AmplitudeField) -> Result<()> {
        if field.center() != Site::ORIGIN || field.radius() != self.radius {
            let side = 2 * field.radius() + 1;
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: 4 * (side * side).div_ceil(2),
            });
        }
        Ok(())
    }
}

/// Matrix-vector product re-expressed as a field one time step later.
pub fn apply_dense(u: &DenseEvolution, field: &AmplitudeField) -> Result<AmplitudeField> {
    let v = u.to_vector(field)?;
    u.to_field(&u.apply_vector(&v)?, field.time() + 1)
}

/// One-dimensional Hadamard walk distribution after `steps` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Walk1d {
    steps: usize,
    probs: Vec<f64>,
}

impl Walk1d {
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Probability at position `m`; zero outside `[-steps, steps]`.
    pub fn at(&self, m: i32) -> f64 {
        let idx = m + self.steps as i32;
        if idx < 0 || idx as usize >= self.probs.len() {
            0.0
        } else {
            self.probs[idx as usize]
        }
    }
}

/// Line walk from the origin with coin `(|0> + i|1>)/sqrt(2)`. Coin 0 moves
/// right, coin 1 moves left, and the Hadamard coin acts before each move.
pub fn walk1d_hadamard(steps: usize) -> Walk1d {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let width = 2 * steps + 1;
    let origin = steps;
    let mut up = vec![C64::new(0.0, 0.0); width];
    let mut down = vec![C64::new(0.0, 0.0); width];
    up[origin] = C64::new(s, 0.0);
    down[origin] = C64::new(0.0, s);
    for _ in 0..steps {
        let mut next_up = vec![C64::new(0.0, 0.0); width];
        let mut next_down = vec![C64::new(0.0, 0.0); width];
        for x in 0..width {
            let (a, b) = (up[x], down[x]);
            if a == C64::new(0.0, 0.0) && b == C64::new(0.0, 0.0) {
                continue;
            }
            next_up[x + 1] += (a + b) * s;
            next_down[x - 1] += (a - b) * s;
        }
        up = next_up;
        down = next_down;
    }
    Walk1d {
        steps,
        probs: up.iter().zip(&down).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::LinkSet;

    #[test]
    fn walk1d_small_times() {
        assert!((walk1d_hadamard(0).at(0) - 1.0).abs() < 1e-15);
        let one = walk1d_hadamard(1);
        assert!((one.at(1) - 0.5).abs() < 1e-15);
        assert!((one.at(-1) - 0.5).abs() < 1e-15);
        assert_eq!(one.at(0), 0.0);
    }

    #[test]
    fn walk1d_is_symmetric_and_normalized() {
        let w = walk1d_hadamard(60);
        let total: f64 = (-60..=60).map(|m| w.at(m)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for m in 0..=60 {
            assert!((w.at(m) - w.at(-m)).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_coin_gives_a_phase_permutation() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let identity = CoinOperator::custom(std::array::from_fn(|r| {
            std::array::from_fn(|c| if r == c { one } else { zero })
        }))
        .unwrap();
        let u = build_dense(&identity, &LinkSet::new(), 1).unwrap();
        for c in 0..u.dim() {
            let nonzero: Vec<usize> = (0..u.dim()).filter(|&r| u.entry(r, c) != zero).collect();
            assert_eq!(nonzero.len(), 1);
            assert_eq!(u.entry(nonzero[0], c).norm(), 1.0);
        }
    }

    #[test]
    fn radius_limit() {
        assert!(matches!(
            build_dense(&CoinOperator::hadamard(), &LinkSet::new(), 9),
            Err(Error::RadiusTooLarge(9))
        ));
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let u = build_dense(&CoinOperator::grover(), &LinkSet::new(), 2).unwrap();
        let zero = AmplitudeField::zeros(Site::ORIGIN, 2).unwrap();
        assert_eq!(apply_dense(&u, &zero).unwrap().norm(), 0.0);
        let wrong = AmplitudeField::zeros(Site::ORIGIN, 3).unwrap();
        assert!(matches!(apply_dense(&u, &wrong), Err(Error::DimensionMismatch { .. })));
        assert!(u.apply_vector(&[C64::new(0.0, 0.0)]).is_err());
    }
}
