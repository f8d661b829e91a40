//! Randomized invariants of the decision pipeline, each over at least 200
//! cases.

mod support;

use proptest::prelude::*;
use support::*;

proptest! {
    #![proptest_config(config())]

    #[test]
    fn coin_radius(s in constant_length()) { coincidence_radius_is_expansion_volume(s)?; }

    #[test]
    fn recentering(s in constant_length()) { recentering_preserves_verdict_and_radii(s)?; }

    #[test]
    fn closure_fixpoint(s in constant_length()) { graph_is_closed_under_expansion(s)?; }

    #[test]
    fn mirror_symmetry(s in constant_length()) { expansion_commutes_with_mirroring(s)?; }

    #[test]
    fn total_radius(s in constant_length()) { total_radius_is_max_of_parts(s)?; }

    #[test]
    fn boundary_dimension(s in constant_length()) { boundary_dimension_below_space_dimension(s)?; }

    #[test]
    fn prune_invariance(x in graph_with_mask()) { pruning_sinks_keeps_radius(x)?; }

    #[test]
    fn split_radius(x in graph_with_mask()) { split_radius_is_max(x)?; }

    #[test]
    fn charpoly_oracle(g in random_graph()) { spectral_radius_matches_characteristic_polynomial(g)?; }

    #[test]
    fn symbolic_round_trip(s in constant_length()) { symbolic_models_round_trip(s)?; }

    #[test]
    fn model_round_trip(m in random_model()) { random_models_round_trip(m)?; }
}

#[test]
fn charpoly_oracle_sanity() {
    use num_rational::BigRational;
    use num_traits::One;
    use purepoint_core::spectral::WeightedDigraph;
    let g = WeightedDigraph::from_edges(2, [(0, 0, 1), (0, 1, 1), (1, 0, 1)]);
    let p = charpoly(&g);
    assert_eq!(p, vec![-BigRational::one(), -BigRational::one(), BigRational::one()]);
    assert!((largest_real_root(&p) - 1.618_033_988_749_895).abs() < 1e-14);
    let nil = WeightedDigraph::from_edges(3, [(0, 1, 2), (1, 2, 1)]);
    assert_eq!(largest_real_root(&charpoly(&nil)), 0.0);
}
