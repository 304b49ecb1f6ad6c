//! One-step broken-link evolution and multi-step runs.
//!
//! For every target site `(m, n)` and every `(j, k)` the new component
//! `(1-j, 1-k)` is gathered as
//!
//! ```text
//! A'[1-j,1-k; m,n] = sum_{j'k'} C[j+L1, k+L2; j'k'] · A[j'k'; m+L1, n+L2]
//! ```
//!
//! with coin indices reduced mod 2. An intact edge toward `(j, k)` reads the
//! neighbour with coin row `(1-j, 1-k)`. A broken edge reads the site itself
//! with coin row `(j, k)`, so the blocked component stays put with its coin
//! flipped.

use rayon::prelude::*;

use crate::coins::CoinOperator;
use crate::error::{Error, Result};
use crate::lattice::{AmplitudeField, CoinIndex, Site, C64};
use crate::topology::{LinkMask, LinkTopology};

/// Distance from the box edge that the support must keep before a step.
pub const BOUNDARY_MARGIN: usize = 2;

/// Source site and coin row feeding target component `flip(dir)` at `site`.
#[inline]
pub fn recipe(links: &impl LinkTopology, site: Site, dir: CoinIndex) -> (Site, CoinIndex) {
    if links.is_broken(site, dir) {
        (site, dir)
    } else {
        (site.neighbor(dir), dir.flip())
    }
}

/// Advance the field by one time step. The input is left untouched.
pub fn step(
    field: &AmplitudeField,
    coin: &CoinOperator,
    links: &impl LinkTopology,
) -> Result<AmplitudeField> {
    check_margin(field)?;
    Ok(apply_step(field, coin, links))
}

/// Step without the boundary-margin check. Amplitude outside the box reads as
/// zero, so this is only norm-preserving when the support stays clear of the
/// edge or when `links` closes every box-leaving edge.
pub fn apply_step(
    field: &AmplitudeField,
    coin: &CoinOperator,
    links: &impl LinkTopology,
) -> AmplitudeField {
    let side = field.side();
    let mut next = field.clone();
    next.set_time(field.time() + 1);
    next.data_mut()
        .par_chunks_mut(side)
        .enumerate()
        .for_each(|(row, out)| {
            let first = field.site_at(row * side);
            for (col, cell) in out.iter_mut().enumerate() {
                let site = Site::new(first.m, first.n + col as i32);
                if !site.is_even() {
                    continue;
                }
                for dir in CoinIndex::ALL {
                    let (src, coin_row) = recipe(links, site, dir);
                    cell[dir.flip().index()] = coin.apply_row(coin_row.index(), &field.get(src));
                }
            }
        });
    next
}

fn check_margin(field: &AmplitudeField) -> Result<()> {
    let limit = field.radius().saturating_sub(BOUNDARY_MARGIN);
    match field.support_extent() {
        Some(extent) if extent > limit || field.radius() < BOUNDARY_MARGIN => {
            Err(Error::SupportTouchesBoundary { time: field.time(), radius: field.radius() })
        }
        _ => Ok(()),
    }
}

/// Per-step callback, invoked after every step with the new field.
pub trait StepObserver {
    fn observe(&mut self, field: &AmplitudeField) -> Result<()>;
}

impl<F: FnMut(&AmplitudeField)> StepObserver for F {
    fn observe(&mut self, field: &AmplitudeField) -> Result<()> {
        self(field);
        Ok(())
    }
}

/// Apply [`step`] `steps` times, calling every observer in order after each step.
pub fn evolve(
    field: AmplitudeField,
    coin: &CoinOperator,
    links: &impl LinkTopology,
    steps: usize,
    observers: &mut [&mut dyn StepObserver],
) -> Result<AmplitudeField> {
    if steps == 0 {
        return Ok(field);
    }
    let extent = field.support_extent().unwrap_or(0);
    if extent + steps + BOUNDARY_MARGIN > field.radius() {
        return Err(Error::SupportTouchesBoundary { time: field.time(), radius: field.radius() });
    }
    // The light-cone check above already guarantees the margin at every step.
    let mask = LinkMask::compile(links, field.center(), field.radius());
    let mut current = field;
    for _ in 0..steps {
        current = apply_step(&current, coin, &mask);
        for obs in observers.iter_mut() {
            obs.observe(&current)?;
        }
    }
    Ok(current)
}

/// Componentwise max distance between two fields on the same box.
pub fn max_abs_diff(a: &AmplitudeField, b: &AmplitudeField) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q): (&C64, &C64)| (p - q).norm()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::CoinState;
    use crate::topology::LinkSet;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn hadamard_state() -> CoinState {
        [c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(-0.5, 0.0)]
    }

    #[test]
    fn free_hadamard_first_step() {
        let field = AmplitudeField::new_localized(Site::ORIGIN, hadamard_state(), 5).unwrap();
        let next = step(&field, &CoinOperator::hadamard(), &LinkSet::new()).unwrap();
        assert_eq!(next.time(), 1);
        for (m, n) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            assert!((next.site_probability(Site::new(m, n)) - 0.25).abs() < 1e-15);
        }
        assert_eq!(next.site_probability(Site::ORIGIN), 0.0);
        assert_eq!(field.time(), 0);
    }

    #[test]
    fn isolated_origin_keeps_everything() {
        let links = LinkSet::new().isolate(Site::ORIGIN);
        for coin in [CoinOperator::hadamard(), CoinOperator::grover(), CoinOperator::fourier()] {
            let mut field =
                AmplitudeField::new_localized(Site::ORIGIN, hadamard_state(), 4).unwrap();
            for _ in 0..20 {
                field = step(&field, &coin, &links).unwrap();
                assert!((field.site_probability(Site::ORIGIN) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_coin_streams_along_the_diagonal() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let identity = CoinOperator::custom(std::array::from_fn(|r| {
            std::array::from_fn(|col| if r == col { one } else { zero })
        }))
        .unwrap();
        let mut field =
            AmplitudeField::new_localized(Site::ORIGIN, [one, zero, zero, zero], 12).unwrap();
        for t in 1..=10 {
            field = step(&field, &identity, &LinkSet::new()).unwrap();
            assert_eq!(field.amplitude(Site::new(t, t), CoinIndex::new(0, 0)), one);
            assert_eq!(field.norm(), 1.0);
        }
    }

    #[test]
    fn margin_violation_is_reported() {
        let field = AmplitudeField::new_localized(Site::ORIGIN, hadamard_state(), 1).unwrap();
        assert!(matches!(
            step(&field, &CoinOperator::hadamard(), &LinkSet::new()),
            Err(Error::SupportTouchesBoundary { .. })
        ));
        let field = AmplitudeField::new_localized(Site::ORIGIN, hadamard_state(), 6).unwrap();
        assert!(evolve(field.clone(), &CoinOperator::hadamard(), &LinkSet::new(), 5, &mut []).is_err());
        assert!(evolve(field, &CoinOperator::hadamard(), &LinkSet::new(), 4, &mut []).is_ok());
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let field = AmplitudeField::new_localized(Site::ORIGIN, hadamard_state(), 3).unwrap();
        let out = evolve(field.clone(), &CoinOperator::grover(), &LinkSet::new(), 0, &mut []).unwrap();
        assert_eq!(out, field);
    }

    #[test]
    fn observers_see_every_step_in_order() {
        let field = AmplitudeField::new_localized(Site::ORIGIN, hadamard_state(), 12).unwrap();
        let mut times = Vec::new();
        let mut norms = Vec::new();
        let mut a = |f: &AmplitudeField| times.push(f.time());
        let mut b = |f: &AmplitudeField| norms.push(f.norm());
        let out = evolve(
            field,
            &CoinOperator::hadamard(),
            &LinkSet::new(),
            10,
            &mut [&mut a, &mut b],
        )
        .unwrap();
        assert_eq!(out.time(), 10);
        assert_eq!(times, (1..=10).collect::<Vec<_>>());
        assert!(norms.iter().all(|n| (n - 1.0).abs() < 1e-12));
    }
}
