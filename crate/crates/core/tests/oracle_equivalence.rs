//! The gather-form stepper against the explicit scatter-form matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slitwalk::evolution::{apply_step, max_abs_diff};
use slitwalk::oracle::build_dense;
use slitwalk::topology::LinkMask;
use slitwalk::{AmplitudeField, CoinIndex, CoinOperator, LinkSet, LinkTopology, Site, C64};

fn coins() -> [CoinOperator; 3] {
    [CoinOperator::hadamard(), CoinOperator::grover(), CoinOperator::fourier()]
}

fn random_links(rng: &mut ChaCha8Rng, radius: usize) -> LinkSet {
    let r = radius as i32;
    let mut links = LinkSet::new();
    for _ in 0..rng.gen_range(0..3 * radius) {
        let m = rng.gen_range(-r..=r);
        let n = rng.gen_range(-r..=r);
        if (m + n) % 2 != 0 {
            continue;
        }
        let dir = CoinIndex::from_index(rng.gen_range(0..4));
        links = links.break_edge(Site::new(m, n), dir);
    }
    links
}

fn random_field(rng: &mut ChaCha8Rng, radius: usize) -> AmplitudeField {
    let mut field = AmplitudeField::zeros(Site::ORIGIN, radius).unwrap();
    let sites: Vec<Site> = field.sites().collect();
    for s in sites {
        let state = std::array::from_fn(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        field.set(s, state).unwrap();
    }
    let norm = field.norm();
    field.scaled(C64::new(1.0 / norm.sqrt(), 0.0))
}

#[test]
fn dense_matrix_is_unitary_and_matches_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51175);
    for (ci, coin) in coins().iter().enumerate() {
        for trial in 0..20 {
            let radius = 3 + (trial % 4);
            let links = random_links(&mut rng, radius);
            let u = build_dense(coin, &links, radius).unwrap();
            let residual = u.unitarity_residual();
            assert!(residual <= 1e-12, "coin {ci} trial {trial}: residual {residual:e}");
            let mask = LinkMask::compile_closed(&links, Site::ORIGIN, radius);
            for _ in 0..10 {
                let field = random_field(&mut rng, radius);
                let fast = apply_step(&field, coin, &mask);
                let slow = u.to_field(&u.apply_vector(&u.to_vector(&field).unwrap()).unwrap(), 1).unwrap();
                let diff = max_abs_diff(&fast, &slow);
                assert!(diff <= 1e-12, "coin {ci} trial {trial}: diff {diff:e}");
                assert!((fast.norm() - field.norm()).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn matrix_columns_are_stepped_basis_states() {
    let radius = 3;
    let links = LinkSet::new().isolate(Site::new(1, 1)).break_edge(Site::ORIGIN, CoinIndex::new(1, 0));
    let coin = CoinOperator::fourier();
    let u = build_dense(&coin, &links, radius).unwrap();
    let mask = LinkMask::compile_closed(&links, Site::ORIGIN, radius);
    let zero = AmplitudeField::zeros(Site::ORIGIN, radius).unwrap();
    for col in 0..u.dim() {
        let mut e = vec![C64::new(0.0, 0.0); u.dim()];
        e[col] = C64::new(1.0, 0.0);
        let basis = u.to_field(&e, 0).unwrap();
        let stepped = u.to_vector(&apply_step(&basis, &coin, &mask)).unwrap();
        for (row, v) in stepped.iter().enumerate() {
            assert!((v - u.entry(row, col)).norm() < 1e-15, "entry ({row}, {col})");
        }
    }
    assert_eq!(apply_step(&zero, &coin, &mask).norm(), 0.0);
}

/// Breaks edges as seen from one endpoint only.
struct OneSided(LinkSet);

impl LinkTopology for OneSided {
    fn is_broken(&self, site: Site, dir: CoinIndex) -> bool {
        site.m < site.neighbor(dir).m && self.0.is_broken(site, dir)
    }
}

#[test]
fn inconsistent_links_are_caught_by_the_oracle() {
    let links = OneSided(LinkSet::new().isolate(Site::ORIGIN).isolate(Site::new(2, 0)));
    for coin in coins() {
        let u = build_dense(&coin, &links, 3).unwrap();
        assert!(u.unitarity_residual() > 1e-3);
    }
}

#[test]
fn consistent_sets_keep_columns_normalised() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let links = random_links(&mut rng, 5);
    let u = build_dense(&CoinOperator::grover(), &links, 5).unwrap();
    assert!(u.column_norms().iter().all(|n| (n - 1.0).abs() < 1e-12));
}
