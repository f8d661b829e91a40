//! The brute-force validators against the fast pipeline stages.

use purepoint_core::fixtures;
use purepoint_core::format::parse_model;
use purepoint_core::model::{fixed_seed, validate, Validated, DEFAULT_MAX_POINTS, DEFAULT_SEED_POWER_CAP};
use purepoint_core::numeric::QVec;
use purepoint_core::oracle::{density_series, seed_cross_check, supports_density, DensityOptions};
use purepoint_core::overlap::OverlapOptions;

fn load(name: &str) -> Validated {
    validate(&parse_model(fixtures::get(name).unwrap().text, None).unwrap()).unwrap()
}

#[test]
fn grid_search_finds_every_seed_class() {
    for name in ["period_doubling", "fibonacci_symbolic", "thue_morse", "fibonacci", "domino", "four_letter"] {
        let c = seed_cross_check(&load(name), DEFAULT_SEED_POWER_CAP, &OverlapOptions::default()).unwrap();
        assert!(c.agrees(), "{name}: {} vs {}", c.fast.len(), c.brute.len());
        assert!(!c.fast.is_empty());
    }
}

#[test]
fn zero_translation_is_full_agreement() {
    let v = load("domino");
    assert!(supports_density(&v));
    let (_, xi) = fixed_seed(&v, DEFAULT_SEED_POWER_CAP, DEFAULT_MAX_POINTS).unwrap();
    let xi = v.model.to_flat_point(&xi).unwrap();
    let opts = DensityOptions {
        depth: 10,
        samples: 500,
        ..DensityOptions::default()
    };
    let s = density_series(&v, &xi, &QVec::zero(2), 0, 3, &opts).unwrap();
    assert!(s.heuristic);
    assert_eq!(s.densities, vec![1.0; 3]);
}

#[test]
fn fibonacci_density_tends_to_one() {
    let v = load("fibonacci");
    let (_, xi) = fixed_seed(&v, DEFAULT_SEED_POWER_CAP, DEFAULT_MAX_POINTS).unwrap();
    let xi = v.model.to_flat_point(&xi).unwrap();
    let s = density_series(&v, &xi, &QVec::from_ints(vec![1, 0]), 0, 6, &DensityOptions::default()).unwrap();
    assert!(s.densities.windows(2).all(|w| w[1] >= w[0] - 0.02), "{:?}", s.densities);
    assert!(s.densities[4] >= 0.9, "{:?}", s.densities);
}
