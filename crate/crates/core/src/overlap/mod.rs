//! Potential overlaps: the search radius, return vectors of the fixed seed,
//! the pair closure, the seed classes and the overlap multigraph.

pub mod graph;
pub(crate) mod grid;

pub use graph::{build_graph, edge_expand, prune_sinks, split_graph, EdgeTable, OverlapClass, OverlapGraph, OverlapKey, Split};

use crate::model::{FlatPoint, ModelError, Validated, DEFAULT_MAX_POINTS};
use crate::numeric::{contraction_power, norm, NumericError, QVec};
use grid::Grid;
use rayon::prelude::*;
use std::collections::{BTreeSet, HashSet, VecDeque};
use thiserror::Error;

pub const DEFAULT_MAX_VERTICES: usize = 200_000;
pub const DEFAULT_BASIS_CAP: usize = 12;
pub const DEFAULT_CLOSURE_CAP: usize = 30;

/// Relative widening of float bounds used only to prefilter candidates.
const PREFILTER_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OverlapError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("found only {found} of {d} independent return vectors up to power {cap}")]
    NoBasis { d: usize, found: usize, cap: usize },
    #[error("pair sets did not stabilize up to power {0}")]
    NoClosure(usize),
    #[error("{what} exceeded the cap of {limit}")]
    CapExceeded { what: &'static str, limit: usize },
    #[error("coordinates overflowed 64-bit exact arithmetic")]
    Overflow,
    #[error("bad translation vectors: {0}")]
    BadTranslations(String),
}

impl OverlapError {
    /// True when a resource cap, not a mathematical failure, stopped the run.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            OverlapError::CapExceeded { .. } | OverlapError::Model(ModelError::CapExceeded { .. })
        )
    }
}

#[derive(Clone, Debug)]
pub struct OverlapOptions {
    pub max_vertices: usize,
    pub max_points: usize,
    pub basis_cap: usize,
    pub closure_cap: usize,
}

impl Default for OverlapOptions {
    fn default() -> Self {
        OverlapOptions {
            max_vertices: DEFAULT_MAX_VERTICES,
            max_points: DEFAULT_MAX_POINTS,
            basis_cap: DEFAULT_BASIS_CAP,
            closure_cap: DEFAULT_CLOSURE_CAP,
        }
    }
}

fn round_up(x: f64) -> f64 {
    x * (1.0 + 1e-12) + f64::MIN_POSITIVE
}

/// Search radius `R = e_k·s/(1 − s)` with `s = ‖Q^{−k}‖ < 1`, `k` the least
/// multiple of the seed period that contracts, and `e_k` the realized
/// diameter of all digits of `Φ^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radius {
    pub k: u32,
    pub inv_norm: f64,
    pub e_k: f64,
    pub r: f64,
    pub delta: f64,
}

impl Radius {
    /// Admission bound `R + δ` for overlap classes.
    pub fn admit(&self) -> f64 {
        self.r + self.delta
    }
}

fn diameter(points: &[Vec<f64>]) -> f64 {
    if points.first().map_or(0, Vec::len) == 1 {
        let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        return (hi - lo).max(0.0);
    }
    (0..points.len())
        .into_par_iter()
        .map(|a| {
            points[a + 1..]
                .iter()
                .map(|b| norm(&points[a].iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>()))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

pub fn overlap_radius(v: &Validated, step: usize, max_points: usize) -> Result<Radius, OverlapError> {
    let (k, s) = contraction_power(&v.q_real, step as u32)?;
    let dk = v.flat.digit_power(k as usize, max_points)?;
    let mut all: Vec<&QVec> = dk.iter().flatten().flatten().collect();
    all.sort_unstable();
    all.dedup();
    let real: Vec<Vec<f64>> = all.iter().map(|d| v.realizer.realize_qvec(d)).collect();
    let e_k = round_up(diameter(&real));
    let r = round_up(e_k * s / (1.0 - s));
    Ok(Radius {
        k,
        inv_norm: s,
        e_k,
        r,
        delta: 1e-6 * r.max(1.0),
    })
}

/// `d` independent return vectors of the fixed seed `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationBasis {
    pub vectors: Vec<QVec>,
    /// Power at which the vectors were found; 0 when supplied by the model.
    pub n: usize,
}

impl TranslationBasis {
    pub fn max_norm(&self, v: &Validated) -> f64 {
        self.vectors.iter().map(|a| v.realizer.norm_qvec(a)).fold(0.0, f64::max)
    }
}

/// Greedy selection of linearly independent realized vectors.
fn independent(v: &Validated, candidates: &[QVec], d: usize) -> Vec<QVec> {
    let mut chosen: Vec<QVec> = Vec::new();
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for c in candidates {
        let x = v.realizer.realize_qvec(c);
        let size = norm(&x);
        if size == 0.0 {
            continue;
        }
        let mut r = x.clone();
        for u in &ortho {
            let dot: f64 = r.iter().zip(u).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
        }
        let rn = norm(&r);
        if rn > 1e-9 * size {
            ortho.push(r.iter().map(|a| a / rn).collect());
            chosen.push(c.clone());
            if chosen.len() == d {
                break;
            }
        }
    }
    chosen
}

fn first_positive(x: &[f64]) -> bool {
    x.iter().find(|a| **a != 0.0).is_some_and(|a| *a > 0.0)
}

/// Return vectors `α` with `ξ + α ∈ Φ^n(ξ)` of the seed colour, for the
/// least `n ∈ {p, 2p, …}` yielding `d` independent ones; shortest first.
pub fn translation_basis(v: &Validated, p: usize, xi: &FlatPoint, opts: &OverlapOptions) -> Result<TranslationBasis, OverlapError> {
    let d = v.realizer.dim();
    if let Some(supplied) = &v.model.translations {
        let vectors: Vec<QVec> = supplied
            .iter()
            .map(|a| QVec::from_rationals(&a.flat_coeffs()).ok_or(OverlapError::Overflow))
            .collect::<Result<_, _>>()?;
        if vectors.len() != d || independent(v, &vectors, d).len() != d {
            return Err(OverlapError::BadTranslations(format!(
                "need {d} linearly independent vectors, got {}",
                vectors.len()
            )));
        }
        return Ok(TranslationBasis { vectors, n: 0 });
    }
    let mut cur = vec![xi.clone()];
    let mut found = 0;
    let mut n = 0;
    while n + p <= opts.basis_cap.max(p) {
        n += p;
        cur = v.flat.iterate(&cur, p, opts.max_points)?;
        let mut cands: Vec<(f64, bool, QVec)> = cur
            .iter()
            .filter(|y| y.colour == xi.colour)
            .map(|y| y.pos.checked_sub(&xi.pos).ok_or(OverlapError::Overflow))
            .filter(|a| !matches!(a, Ok(a) if a.is_zero()))
            .map(|a| {
                a.map(|a| {
                    let r = v.realizer.realize_qvec(&a);
                    (norm(&r), !first_positive(&r), a)
                })
            })
            .collect::<Result<_, _>>()?;
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let list: Vec<QVec> = cands.into_iter().map(|c| c.2).collect();
        let chosen = independent(v, &list, d);
        found = chosen.len();
        if found == d {
            return Ok(TranslationBasis { vectors: chosen, n });
        }
    }
    Err(OverlapError::NoBasis {
        d,
        found,
        cap: opts.basis_cap,
    })
}

fn realize_all(v: &Validated, pts: &[FlatPoint]) -> Vec<Vec<f64>> {
    pts.par_iter().map(|p| v.realizer.realize_qvec(&p.pos)).collect()
}

/// Differences `(c_y, c_z, y − z)` over ordered pairs of distinct points
/// within realized distance `bound`.
pub fn pair_set(v: &Validated, pts: &[FlatPoint], bound: f64) -> Result<HashSet<OverlapKey>, OverlapError> {
    let real = realize_all(v, pts);
    let cell = bound.max(1e-9);
    let grid = Grid::new(&real, cell);
    let slack = bound * (1.0 + PREFILTER_SLACK) + PREFILTER_SLACK;
    let found: Option<Vec<Vec<OverlapKey>>> = (0..pts.len())
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            for b in grid.candidates(&real[a], slack) {
                if a == b {
                    continue;
                }
                let approx = norm(&real[a].iter().zip(&real[b]).map(|(x, y)| x - y).collect::<Vec<_>>());
                if approx > slack {
                    continue;
                }
                let z = pts[a].pos.checked_sub(&pts[b].pos)?;
                if v.realizer.norm_qvec(&z) <= bound {
                    out.push(OverlapKey {
                        i: pts[a].colour,
                        j: pts[b].colour,
                        z,
                    });
                }
            }
            Some(out)
        })
        .collect();
    Ok(found.ok_or(OverlapError::Overflow)?.into_iter().flatten().collect())
}

#[derive(Clone, Debug)]
pub struct Closure {
    /// Least `N` with `J(Φ^N(ξ)) = J(Φ^{N+k}(ξ))`.
    pub n: usize,
    /// `Φ^{N+k}(ξ)`, sorted.
    pub witness: Vec<FlatPoint>,
}

/// Iterates `N = p, 2p, …` until the pair set within `bound` stops growing
/// between `Φ^N(ξ)` and `Φ^{N+k}(ξ)`.
pub fn pair_closure(
    v: &Validated,
    p: usize,
    k: usize,
    xi: &FlatPoint,
    bound: f64,
    opts: &OverlapOptions,
) -> Result<Closure, OverlapError> {
    let lag = k.div_ceil(p).max(1);
    let mut history: VecDeque<(usize, HashSet<OverlapKey>)> = VecDeque::new();
    let mut cur = vec![xi.clone()];
    let mut n = 0;
    loop {
        n += p;
        cur = v.flat.iterate(&cur, p, opts.max_points)?;
        let j = pair_set(v, &cur, bound)?;
        if history.len() == lag {
            let (n0, j0) = history.pop_front().unwrap();
            if j0.len() == j.len() && j0 == j {
                return Ok(Closure { n: n0, witness: cur });
            }
            if n0 >= opts.closure_cap {
                return Err(OverlapError::NoClosure(opts.closure_cap));
            }
        }
        history.push_back((n, j));
    }
}

/// Seed classes `(c_y, y − α − z, c_z)` over `y, z` in the witness and the
/// return vectors `α`, admitted when the realized norm is at most `admit`.
pub fn seed_overlaps(v: &Validated, witness: &[FlatPoint], alphas: &[QVec], admit: f64) -> Result<BTreeSet<OverlapKey>, OverlapError> {
    let real = realize_all(v, witness);
    let grid = Grid::new(&real, admit.max(1e-9));
    let slack = admit * (1.0 + PREFILTER_SLACK) + PREFILTER_SLACK;
    let mut out = BTreeSet::new();
    for alpha in alphas {
        let ra = v.realizer.realize_qvec(alpha);
        let found: Option<Vec<Vec<OverlapKey>>> = (0..witness.len())
            .into_par_iter()
            .map(|a| {
                let target: Vec<f64> = real[a].iter().zip(&ra).map(|(x, s)| x - s).collect();
                let mut keys = Vec::new();
                for b in grid.candidates(&target, slack) {
                    let approx = norm(&target.iter().zip(&real[b]).map(|(x, y)| x - y).collect::<Vec<_>>());
                    if approx > slack {
                        continue;
                    }
                    let z = witness[a].pos.checked_sub(alpha)?.checked_sub(&witness[b].pos)?;
                    if v.realizer.norm_qvec(&z) <= admit {
                        keys.push(OverlapKey {
                            i: witness[a].colour,
                            j: witness[b].colour,
                            z,
                        });
                    }
                }
                Some(keys)
            })
            .collect();
        out.extend(found.ok_or(OverlapError::Overflow)?.into_iter().flatten());
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
