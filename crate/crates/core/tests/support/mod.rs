//! Strategies, oracles and property bodies shared by the property suites
//! and the acceptance run. Random inputs are primitive constant-length
//! substitutions (integer expansion, so always Meyer) and random small
//! multigraphs.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{TestCaseError, TestRunner};
use purepoint_core::format::{emit_model, parse_model};
use purepoint_core::model::{is_primitive, suspend_symbolic, SubstitutionModel, SymbolicSubstitution};
use purepoint_core::numeric::{FMatrix, FVec, NumberField, QVec, Realization, Scalar};
use purepoint_core::overlap::{prune_sinks, split_graph, EdgeTable, OverlapGraph, OverlapKey};
use purepoint_core::pipeline::{check, CheckOptions, Outcome};
use purepoint_core::spectral::{spectral_radius, Verdict, WeightedDigraph, DEFAULT_TOL};
use std::sync::Arc;

pub const CASES: u32 = 200;

pub fn config() -> ProptestConfig {
    ProptestConfig {
        cases: CASES,
        max_global_rejects: 100_000,
        ..ProptestConfig::default()
    }
}

/// Primitive substitutions on 2 or 3 letters with all words of length 2 or 3.
pub fn constant_length() -> impl Strategy<Value = SymbolicSubstitution> {
    (2usize..=3, 2usize..=3)
        .prop_flat_map(|(m, l)| proptest::collection::vec(proptest::collection::vec(0..m, l), m))
        .prop_filter_map("not primitive", |rules| {
            let m = rules.len();
            let alphabet = (0..m).map(|a| a.to_string()).collect();
            let s = SymbolicSubstitution::new("random", alphabet, rules).ok()?;
            is_primitive(&s.incidence()).then_some(s)
        })
}

pub fn run(s: &SymbolicSubstitution, recenter: bool) -> Outcome {
    let model = suspend_symbolic(s, 128).unwrap();
    let opts = CheckOptions {
        recenter,
        ..CheckOptions::default()
    };
    check(&model, &opts).unwrap()
}

fn rho(g: &WeightedDigraph) -> f64 {
    spectral_radius(g, DEFAULT_TOL).unwrap()
}

fn mirror(k: &OverlapKey) -> OverlapKey {
    OverlapKey {
        i: k.j,
        j: k.i,
        z: k.z.neg(),
    }
}

type Checked = Result<(), TestCaseError>;

pub fn coincidence_radius_is_expansion_volume(s: SymbolicSubstitution) -> Checked {
    let out = run(&s, true);
    let r = &out.report;
    prop_assert!(r.caps_hit.is_empty(), "{:?}", r.caps_hit);
    if r.counts.g_coin_size > 0 {
        let c = r.rho_coin.unwrap();
        prop_assert!((c - r.beta).abs() <= 1e-6 * r.beta, "{} vs {}", c, r.beta);
    }
    Ok(())
}

pub fn recentering_preserves_verdict_and_radii(s: SymbolicSubstitution) -> Checked {
    let a = run(&s, true).report;
    let b = run(&s, false).report;
    prop_assert_eq!(a.verdict, b.verdict);
    for (x, y) in [(a.rho_coin, b.rho_coin), (a.rho_res, b.rho_res)] {
        let (x, y) = (x.unwrap_or(0.0), y.unwrap_or(0.0));
        prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{} vs {}", x, y);
    }
    Ok(())
}

pub fn graph_is_closed_under_expansion(s: SymbolicSubstitution) -> Checked {
    let out = run(&s, true);
    let g = out.graph.unwrap();
    let table = EdgeTable::new(&out.validated).unwrap();
    for (n, k) in g.keys.iter().enumerate() {
        let succ = table.expand(&out.validated, k, g.admit).unwrap();
        let mut from_graph: Vec<(usize, u64)> = g.graph.successors(n).to_vec();
        let mut from_table = Vec::new();
        for (t, w) in &succ {
            let idx = g.index_of(t);
            prop_assert!(idx.is_some(), "successor missing from graph");
            from_table.push((idx.unwrap(), *w));
        }
        from_graph.sort();
        from_table.sort();
        prop_assert_eq!(from_graph, from_table);
    }
    Ok(())
}

pub fn expansion_commutes_with_mirroring(s: SymbolicSubstitution) -> Checked {
    let out = run(&s, true);
    let g = out.graph.unwrap();
    let table = EdgeTable::new(&out.validated).unwrap();
    for k in &g.keys {
        let mut a: Vec<(OverlapKey, u64)> = table
            .expand(&out.validated, k, g.admit)
            .unwrap()
            .into_iter()
            .map(|(t, w)| (mirror(&t), w))
            .collect();
        let mut b = table.expand(&out.validated, &mirror(k), g.admit).unwrap();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }
    Ok(())
}

pub fn total_radius_is_max_of_parts(s: SymbolicSubstitution) -> Checked {
    let out = run(&s, true);
    let g = out.graph.unwrap();
    let r = &out.report;
    let whole = rho(&g.graph);
    let parts = r.rho_coin.unwrap_or(0.0).max(r.rho_res.unwrap_or(0.0));
    prop_assert!((whole - parts).abs() <= 1e-9 * whole.max(1.0), "{} vs {}", whole, parts);
    Ok(())
}

pub fn boundary_dimension_below_space_dimension(s: SymbolicSubstitution) -> Checked {
    let r = run(&s, true).report;
    if r.verdict == Verdict::PurePoint {
        if let Some(dim) = r.boundary_dim {
            prop_assert!((0.0..1.0).contains(&dim), "{}", dim);
        }
    } else {
        prop_assert!(r.boundary_dim.is_none());
    }
    Ok(())
}

pub fn pruning_sinks_keeps_radius((g, protect): (WeightedDigraph, Vec<bool>)) -> Checked {
    let protect = &protect[..g.len()];
    let keep = prune_sinks(&g, protect);
    prop_assert!(keep.iter().zip(protect).all(|(k, p)| *k || !*p));
    let (sub, _) = g.induced(&keep);
    prop_assert!((rho(&g) - rho(&sub)).abs() <= 1e-9 * rho(&g).max(1.0));
    Ok(())
}

pub fn split_radius_is_max((g, marks): (WeightedDigraph, Vec<bool>)) -> Checked {
    let n = g.len();
    let keys = (0..n)
        .map(|v| OverlapKey {
            i: v,
            j: if marks[v] { v } else { v + 1 },
            z: QVec::zero(1),
        })
        .collect();
    let og = OverlapGraph {
        keys,
        graph: g.clone(),
        seeds: vec![true; n],
        admit: 1.0,
    };
    let split = split_graph(&og);
    let parts = rho(&split.g_coin).max(rho(&split.g_res));
    prop_assert!((rho(&g) - parts).abs() <= 1e-9 * rho(&g).max(1.0));
    Ok(())
}

pub fn spectral_radius_matches_characteristic_polynomial(g: WeightedDigraph) -> Checked {
    let expect = largest_real_root(&charpoly(&g));
    let got = rho(&g);
    prop_assert!((got - expect).abs() <= 1e-8 * expect.max(1.0), "{} vs {}", got, expect);
    Ok(())
}

pub fn symbolic_models_round_trip(s: SymbolicSubstitution) -> Checked {
    let model = suspend_symbolic(&s, 128).unwrap();
    let back = parse_model(&emit_model(&model), Some(128)).unwrap();
    prop_assert_eq!(back, model);
    Ok(())
}

pub fn random_models_round_trip(m: SubstitutionModel) -> Checked {
    let back = parse_model(&emit_model(&m), Some(128)).unwrap();
    prop_assert_eq!(back, m);
    Ok(())
}

pub fn graph_with_mask() -> impl Strategy<Value = (WeightedDigraph, Vec<bool>)> {
    (random_graph(), proptest::collection::vec(any::<bool>(), 8))
}

fn suite<S: Strategy>(strategy: S, body: fn(S::Value) -> Checked) -> Result<u32, String> {
    let mut runner = TestRunner::new(ProptestConfig {
        failure_persistence: None,
        ..config()
    });
    runner.run(&strategy, body).map_err(|e| e.to_string())?;
    Ok(CASES)
}

/// Every suite by name, for callers without the proptest macros.
pub fn all_suites() -> Vec<(&'static str, Result<u32, String>)> {
    vec![
        ("rho(G_coin) = beta", suite(constant_length(), coincidence_radius_is_expansion_volume)),
        ("recentering invariance", suite(constant_length(), recentering_preserves_verdict_and_radii)),
        ("closure fixpoint", suite(constant_length(), graph_is_closed_under_expansion)),
        ("edge mirror symmetry", suite(constant_length(), expansion_commutes_with_mirroring)),
        ("prune-sink invariance", suite(graph_with_mask(), pruning_sinks_keeps_radius)),
        ("rho(G) = max on pipeline graphs", suite(constant_length(), total_radius_is_max_of_parts)),
        ("rho(G) = max on random splits", suite(graph_with_mask(), split_radius_is_max)),
        ("boundary dimension < d", suite(constant_length(), boundary_dimension_below_space_dimension)),
        ("spectral radius vs characteristic polynomial", suite(random_graph(), spectral_radius_matches_characteristic_polynomial)),
    ]
}

/// Multigraphs on up to 8 vertices with multiplicities up to 3.
pub fn random_graph() -> impl Strategy<Value = WeightedDigraph> {
    (1usize..=8).prop_flat_map(|n| {
        proptest::collection::vec(prop_oneof![6 => Just(0u64), 2 => Just(1u64), 1 => 2u64..=3], n * n).prop_map(move |w| {
            WeightedDigraph::from_edges(n, (0..n * n).map(|t| (t / n, t % n, w[t])))
        })
    })
}

fn golden() -> Arc<NumberField> {
    NumberField::new(vec![BigInt::from(-1), BigInt::from(-1), BigInt::one()], num_complex::Complex64::new(1.6, 0.0), 128).unwrap()
}

fn rat() -> impl Strategy<Value = BigRational> {
    (-20i64..=20, 1i64..=6).prop_map(|(a, b)| BigRational::new(a.into(), b.into()))
}

fn scalar() -> impl Strategy<Value = Vec<BigRational>> {
    proptest::collection::vec(rat(), 2)
}

/// Structurally valid models over the golden field; no tiling condition.
pub fn random_model() -> impl Strategy<Value = SubstitutionModel> {
    (1usize..=2, 1usize..=3).prop_flat_map(|(e, m)| {
        let q = proptest::collection::vec(scalar(), e * e);
        let digits = proptest::collection::vec(proptest::collection::vec(proptest::collection::vec(scalar(), e), 0..3), m * m);
        (q, digits, proptest::option::of(1..=m)).prop_map(move |(q, digits, seed)| {
            let f = golden();
            let s = |c: &Vec<BigRational>| Scalar::new(&f, c.clone());
            let rows = (0..e).map(|r| (0..e).map(|c| s(&q[r * e + c])).collect()).collect();
            let mut table = vec![vec![Vec::new(); m]; m];
            for (t, cell) in digits.iter().enumerate() {
                for d in cell {
                    let v = FVec(d.iter().map(s).collect());
                    if !table[t / m][t % m].contains(&v) {
                        table[t / m][t % m].push(v);
                    }
                }
            }
            let mut model = SubstitutionModel::new("random", f.clone(), FMatrix::from_rows(rows).unwrap(), table, Realization::real_identity(e)).unwrap();
            model.seed_colour = seed.map(|c| c - 1);
            model
        })
    })
}

// ---- dense oracle: exact characteristic polynomial and Sturm bisection ----

/// Coefficients of `det(xI − A)`, constant term first, by Faddeev–LeVerrier.
pub fn charpoly(g: &WeightedDigraph) -> Vec<BigRational> {
    let n = g.len();
    let mut a = vec![vec![0i128; n]; n];
    for (u, v, w) in g.edges() {
        a[u][v] = w as i128;
    }
    let mut c = vec![0i128; n + 1];
    c[n] = 1;
    let mut m = vec![vec![0i128; n]; n];
    for k in 1..=n {
        let mut next = vec![vec![0i128; n]; n];
        for r in 0..n {
            for s in 0..n {
                next[r][s] = (0..n).map(|t| a[r][t] * m[t][s]).sum::<i128>() + if r == s { c[n - k + 1] } else { 0 };
            }
        }
        m = next;
        let trace: i128 = (0..n).map(|r| (0..n).map(|t| a[r][t] * m[t][r]).sum::<i128>()).sum();
        c[n - k] = -trace / k as i128;
    }
    c.into_iter().map(|x| BigRational::from_integer(BigInt::from(x))).collect()
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let lead = r.last().unwrap() / b.last().unwrap();
        let shift = r.len() - 1 - db;
        for (t, bc) in b.iter().enumerate() {
            r[shift + t] = &r[shift + t] - &lead * bc;
        }
        r.pop();
        r = trim(r);
        if r.len() <= db {
            break;
        }
    }
    trim(r)
}

fn quo(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() <= db {
        return vec![BigRational::zero()];
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for shift in (0..q.len()).rev() {
        let lead = &r[shift + db] / b.last().unwrap();
        for (t, bc) in b.iter().enumerate() {
            r[shift + t] = &r[shift + t] - &lead * bc;
        }
        q[shift] = lead;
    }
    trim(q)
}

fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn sturm_chain(p: &[BigRational]) -> Vec<Vec<BigRational>> {
    let d: Vec<BigRational> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
        .collect();
    let mut chain = vec![p.to_vec(), trim(d)];
    loop {
        let n = chain.len();
        if chain[n - 1].len() == 1 {
            break;
        }
        let r = rem(&chain[n - 2], &chain[n - 1]);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn sign_changes(chain: &[Vec<BigRational>], x: &BigRational) -> usize {
    let signs: Vec<bool> = chain
        .iter()
        .map(|q| eval(q, x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Largest real root of a monic polynomial whose roots include a
/// nonnegative real one, to about 1e-15.
pub fn largest_real_root(p: &[BigRational]) -> f64 {
    if p.len() == 1 {
        return 0.0;
    }
    let gcd = sturm_chain(p).pop().unwrap();
    let chain = sturm_chain(&quo(p, &gcd));
    let bound = BigRational::one() + p.iter().map(|c| c.abs()).fold(BigRational::zero(), |a, b| a.max(b));
    let above = |x: &BigRational| sign_changes(&chain, x) - sign_changes(&chain, &bound);
    let mut lo = BigRational::zero();
    if above(&lo) == 0 {
        return 0.0;
    }
    let mut hi = bound.clone();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for _ in 0..60 {
        let mid = (&lo + &hi) * &half;
        if above(&mid) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    num_traits::ToPrimitive::to_f64(&hi).unwrap()
}

