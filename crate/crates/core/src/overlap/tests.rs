use super::*;
use crate::model::{fixed_seed, suspend_symbolic, validate, SymbolicSubstitution, DEFAULT_SEED_POWER_CAP};
use crate::spectral::{spectral_radius, WeightedDigraph, DEFAULT_TOL};

fn sym(words: &[&str]) -> Validated {
    let s = SymbolicSubstitution::from_words("t", words).unwrap();
    validate(&suspend_symbolic(&s, 128).unwrap()).unwrap()
}

fn key1(i: usize, z: i64, j: usize) -> OverlapKey {
    OverlapKey {
        i,
        j,
        z: QVec::from_rationals(&[num_rational::BigRational::from_integer(z.into())]).unwrap(),
    }
}

#[test]
fn radius_examples() {
    let r = overlap_radius(&sym(&["01", "00"]), 1, DEFAULT_MAX_POINTS).unwrap();
    assert_eq!(r.k, 1);
    assert!((r.e_k - 1.0).abs() < 1e-9 && (r.r - 1.0).abs() < 1e-8);
    let r = overlap_radius(&sym(&["01", "0"]), 1, DEFAULT_MAX_POINTS).unwrap();
    assert!((r.r - 1.618_033_988_7).abs() < 1e-8);
    let r = overlap_radius(&sym(&["000"]), 1, DEFAULT_MAX_POINTS).unwrap();
    assert!((r.e_k - 2.0).abs() < 1e-9 && (r.r - 1.0).abs() < 1e-8);
}

#[test]
fn period_doubling_edges() {
    let v = sym(&["01", "00"]);
    let table = EdgeTable::new(&v).unwrap();
    let mut succ = table.expand(&v, &key1(0, 0, 0), 1.0 + 1e-6).unwrap();
    succ.sort();
    let mut expect = vec![(key1(0, 0, 0), 1), (key1(1, 0, 1), 1), (key1(0, -1, 1), 1), (key1(1, 1, 0), 1)];
    expect.sort();
    assert_eq!(succ, expect);
}

#[test]
fn mirror_symmetry() {
    let v = sym(&["01", "00"]);
    let table = EdgeTable::new(&v).unwrap();
    for z in -2..=2 {
        for i in 0..2 {
            for j in 0..2 {
                let a = table.expand(&v, &key1(i, z, j), 1.0 + 1e-6).unwrap();
                let mut b = table.expand(&v, &key1(j, -z, i), 1.0 + 1e-6).unwrap();
                let mut mirrored: Vec<_> = a
                    .into_iter()
                    .map(|(k, w)| (OverlapKey { i: k.j, j: k.i, z: k.z.neg() }, w))
                    .collect();
                mirrored.sort();
                b.sort();
                assert_eq!(mirrored, b);
            }
        }
    }
}

#[test]
fn period_doubling_graph() {
    let v = sym(&["01", "00"]);
    let seeds: BTreeSet<OverlapKey> = [key1(0, 0, 0)].into_iter().collect();
    let g = build_graph(&v, &seeds, 1.0 + 1e-6, 1000).unwrap();
    // closure stays within |z| ≤ 1
    assert!(g.keys.iter().all(|k| k.z.num()[0].abs() <= k.z.den()));
    let table = EdgeTable::new(&v).unwrap();
    for k in &g.keys {
        for (s, _) in table.expand(&v, k, g.admit).unwrap() {
            assert!(g.index_of(&s).is_some());
        }
    }
    let split = split_graph(&g);
    assert!((spectral_radius(&split.g_coin, DEFAULT_TOL).unwrap() - 2.0).abs() < 1e-8);
}

#[test]
fn seeds_with_zero_alpha_hold_coincidences() {
    let v = sym(&["01", "00"]);
    let (p, xi) = fixed_seed(&v, DEFAULT_SEED_POWER_CAP, DEFAULT_MAX_POINTS).unwrap();
    let xi = v.model.to_flat_point(&xi).unwrap();
    let pts = v.flat.iterate(&[xi], 4 * p, DEFAULT_MAX_POINTS).unwrap();
    let seeds = seed_overlaps(&v, &pts, &[QVec::zero(1)], 1.0).unwrap();
    assert!(seeds.contains(&key1(0, 0, 0)) && seeds.contains(&key1(1, 0, 1)));
}

#[test]
fn fibonacci_basis_and_closure() {
    let v = sym(&["01", "0"]);
    let (p, xi) = fixed_seed(&v, DEFAULT_SEED_POWER_CAP, DEFAULT_MAX_POINTS).unwrap();
    let xi = v.model.to_flat_point(&xi).unwrap();
    let opts = OverlapOptions::default();
    let basis = translation_basis(&v, p, &xi, &opts).unwrap();
    assert_eq!(basis.vectors.len(), 1);
    let r = overlap_radius(&v, p, opts.max_points).unwrap();
    let bound = r.r + r.inv_norm * basis.max_norm(&v) + r.delta;
    let c = pair_closure(&v, p, r.k as usize, &xi, bound, &opts).unwrap();
    assert!(c.n >= 1);
    let seeds = seed_overlaps(&v, &c.witness, &basis.vectors, r.admit()).unwrap();
    let g = build_graph(&v, &seeds, r.admit(), opts.max_vertices).unwrap();
    let split = split_graph(&g);
    assert_eq!(split.coin.iter().filter(|&&c| c).count(), 8);
}

#[test]
fn prune_examples() {
    let chain = WeightedDigraph::from_edges(3, [(0, 1, 1), (1, 2, 1)]);
    assert_eq!(prune_sinks(&chain, &[false; 3]), vec![false; 3]);
    let cycle = WeightedDigraph::from_edges(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)]);
    assert_eq!(prune_sinks(&cycle, &[false; 3]), vec![true; 3]);
    let tail = WeightedDigraph::from_edges(3, [(0, 0, 2), (0, 1, 1), (1, 2, 1)]);
    assert_eq!(prune_sinks(&tail, &[false, false, true]), vec![true, true, true]);
}
