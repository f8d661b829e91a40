//! Brute-force cross-checks: windowed patch growth, translation agreement
//! densities, and an exhaustive rederivation of the seed classes.

use crate::model::{fixed_seed, ColouredPointSet, FlatPoint, ModelError, Validated, DEFAULT_MAX_POINTS};
use crate::numeric::{norm, QVec};
use crate::overlap::{
    overlap_radius, pair_closure, seed_overlaps, translation_basis, OverlapError, OverlapKey, OverlapOptions, TranslationBasis,
};
use nalgebra::{DMatrix, DVector};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet};
use thiserror::Error;

/// Default Monte Carlo sample count for lattice densities.
pub const DEFAULT_SAMPLES: usize = 10_000;
const MAX_REJECTIONS: usize = 10_000;
const BASE_POINTS: usize = 1 << 16;
/// Default cap on the witness size of the quadratic seed scan.
pub const DEFAULT_BRUTE_POINTS: usize = 40_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("oracle needs a one-dimensional model or an integer lattice model")]
    UnsupportedModel,
    #[error("{what} exceeded the cap of {limit}")]
    CapExceeded { what: &'static str, limit: usize },
    #[error("coordinates overflowed 64-bit exact arithmetic")]
    Overflow,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Overlap(#[from] OverlapError),
}

/// Axis-aligned box in realized coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| *v >= *l && *v <= *h)
    }

    fn distance(&self, x: &[f64]) -> f64 {
        let gaps: Vec<f64> = x
            .iter()
            .zip(&self.lo)
            .zip(&self.hi)
            .map(|((v, l), h)| (l - v).max(v - h).max(0.0))
            .collect();
        norm(&gaps)
    }

    fn hull(&self, o: &Window) -> Window {
        Window {
            lo: self.lo.iter().zip(&o.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&o.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    fn shifted(&self, t: &[f64]) -> Window {
        Window {
            lo: self.lo.iter().zip(t).map(|(a, s)| a + s).collect(),
            hi: self.hi.iter().zip(t).map(|(a, s)| a + s).collect(),
        }
    }

    /// Central box with each side scaled by `f`.
    fn central(&self, f: f64) -> Window {
        let (lo, hi) = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| {
                let (c, r) = ((l + h) / 2.0, (h - l) / 2.0 * f);
                (c - r, c + r)
            })
            .unzip();
        Window { lo, hi }
    }
}

fn bounding_box(points: &[Vec<f64>]) -> Window {
    let d = points[0].len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in points {
        for t in 0..d {
            lo[t] = lo[t].min(p[t]);
            hi[t] = hi[t].max(p[t]);
        }
    }
    Window { lo, hi }
}

fn mat_vec(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (a * DVector::from_column_slice(x)).iter().copied().collect()
}

/// Grows `Φ^depth(ξ)` lazily: windowed patches, point lookup and uniform
/// tile sampling.
pub struct PatchGrower<'a> {
    v: &'a Validated,
    xi: FlatPoint,
    depth: usize,
    max_points: usize,
    /// `drift[r]`: how far descendants after `r` steps can stray from `Q^r x`
    drift: Vec<f64>,
    powers: Vec<DMatrix<f64>>,
    /// `desc[r][c]`: number of descendants of a colour-`c` point after `r` steps
    desc: Vec<Vec<f64>>,
    /// `Q^{-1}` in flattened coordinates, for parent recovery on lattices
    q_inv: Option<DMatrix<f64>>,
    /// realized `Q^r ξ`
    centres: Vec<Vec<f64>>,
    /// `Φ^base_level(ξ)` in full, where parent walks stop
    base_level: usize,
    base: HashSet<FlatPoint>,
}

impl<'a> PatchGrower<'a> {
    pub fn new(v: &'a Validated, xi: &FlatPoint, depth: usize, max_points: usize) -> Self {
        let dmax = v
            .flat
            .digits
            .iter()
            .flatten()
            .flatten()
            .map(|d| v.realizer.norm_qvec(d))
            .fold(0.0, f64::max);
        let id = DMatrix::identity(v.q_real.nrows(), v.q_real.ncols());
        let mut powers = vec![id];
        let mut drift = vec![0.0];
        let mut acc = 0.0;
        for s in 1..=depth {
            acc += powers[s - 1].clone().singular_values().max() * dmax;
            drift.push(acc * (1.0 + 1e-9) + 1e-9);
            powers.push(&v.q_real * &powers[s - 1]);
        }
        let m = v.flat.m;
        let mut desc = vec![vec![1.0; m]];
        for r in 1..=depth {
            let row = (0..m)
                .map(|c| (0..m).map(|i| v.flat.digits[i][c].len() as f64 * desc[r - 1][i]).sum())
                .collect();
            desc.push(row);
        }
        let (rows, cols, q) = v.flat.q.to_f64();
        let q_inv = DMatrix::from_row_slice(rows, cols, &q).try_inverse();
        let x0 = v.realizer.realize_qvec(&xi.pos);
        let centres = powers.iter().map(|p| mat_vec(p, &x0)).collect();
        let mut base_level = 0;
        let mut base = vec![xi.clone()];
        while base_level < depth {
            match v.flat.apply(&base, BASE_POINTS) {
                Ok(next) => base = next,
                Err(_) => break,
            }
            base_level += 1;
        }
        PatchGrower {
            v,
            xi: xi.clone(),
            depth,
            max_points,
            drift,
            powers,
            desc,
            q_inv,
            centres,
            base_level,
            base: base.into_iter().collect(),
        }
    }

    fn children(&self, pts: &[FlatPoint]) -> Result<Vec<FlatPoint>, OracleError> {
        if pts.len() >= 512 {
            return Ok(self.v.flat.apply(pts, self.max_points)?);
        }
        let flat = &self.v.flat;
        let mut out = Vec::new();
        for p in pts {
            let qx = flat.q.checked_mul_vec(&p.pos).ok_or(OracleError::Overflow)?;
            for i in 0..flat.m {
                for d in &flat.digits[i][p.colour] {
                    out.push(FlatPoint {
                        colour: i,
                        pos: qx.checked_add(d).ok_or(OracleError::Overflow)?,
                    });
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn may_reach(&self, p: &FlatPoint, r: usize, w: &Window) -> bool {
        let x = mat_vec(&self.powers[r], &self.v.realizer.realize_qvec(&p.pos));
        w.distance(&x) <= self.drift[r] * (1.0 + 1e-9) + 1e-9 * (1.0 + norm(&x))
    }

    /// `Φ^depth(ξ) ∩ window`, sorted; levels are pruned to points whose
    /// descendants can still reach the window.
    pub fn grow(&self, window: Option<&Window>) -> Result<Vec<FlatPoint>, OracleError> {
        let k = self.depth;
        let keep = |pts: Vec<FlatPoint>, level: usize| -> Vec<FlatPoint> {
            let Some(w) = window else { return pts };
            if pts.len() < 512 {
                pts.into_iter().filter(|p| self.may_reach(p, k - level, w)).collect()
            } else {
                pts.into_par_iter().filter(|p| self.may_reach(p, k - level, w)).collect()
            }
        };
        let mut cur = keep(vec![self.xi.clone()], 0);
        for level in 1..=k {
            cur = keep(self.children(&cur)?, level);
        }
        if let Some(w) = window {
            cur.retain(|p| w.contains(&self.v.realizer.realize_qvec(&p.pos)));
        }
        Ok(cur)
    }

    /// Colour of the patch point at `y`, if there is one.
    pub fn locate(&self, y: &QVec) -> Result<Option<usize>, OracleError> {
        let x = self.v.realizer.realize_qvec(y);
        let w = Window { lo: x.clone(), hi: x };
        Ok(self.grow(Some(&w))?.into_iter().find(|p| p.pos == *y).map(|p| p.colour))
    }

    /// Whether `(y, c)` lies in `Φ^depth(ξ)`, found by walking parents
    /// `Q^{-1}(y − d)` downwards. Needs integer coordinates.
    pub fn is_member(&self, y: &QVec, c: usize) -> Result<bool, OracleError> {
        self.member_at(y, c, self.depth, &mut HashMap::new())
    }

    fn member_at(&self, y: &QVec, c: usize, level: usize, memo: &mut HashMap<(QVec, usize, usize), bool>) -> Result<bool, OracleError> {
        let key = (y.clone(), c, level);
        if let Some(&known) = memo.get(&key) {
            return Ok(known);
        }
        let found = self.member_uncached(y, c, level, memo)?;
        memo.insert(key, found);
        Ok(found)
    }

    fn member_uncached(&self, y: &QVec, c: usize, level: usize, memo: &mut HashMap<(QVec, usize, usize), bool>) -> Result<bool, OracleError> {
        if level <= self.base_level {
            return Ok(self.base.contains(&FlatPoint { colour: c, pos: y.clone() }));
        }
        let q_inv = self.q_inv.as_ref().ok_or(OracleError::UnsupportedModel)?;
        let flat = &self.v.flat;
        for j in 0..flat.m {
            for d in &flat.digits[c][j] {
                let Some(diff) = y.checked_sub(d) else {
                    return Err(OracleError::Overflow);
                };
                let xf = mat_vec(q_inv, &diff.to_f64());
                if xf.iter().any(|t| t.abs() > 1e15) {
                    return Err(OracleError::Overflow);
                }
                let x = QVec::from_ints(xf.iter().map(|t| t.round() as i64).collect());
                if flat.q.checked_mul_vec(&x).as_ref() != Some(&diff) {
                    continue;
                }
                let gap = norm(
                    &self
                        .v
                        .realizer
                        .realize_qvec(&x)
                        .iter()
                        .zip(&self.centres[level - 1])
                        .map(|(a, b)| a - b)
                        .collect::<Vec<_>>(),
                );
                if gap <= self.drift[level - 1] * (1.0 + 1e-9) + 1e-9 && self.member_at(&x, j, level - 1, memo)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// A tile of `Φ^depth(ξ)` drawn uniformly.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<FlatPoint, OracleError> {
        let mut cur = self.xi.clone();
        for level in 1..=self.depth {
            let kids = self.children(std::slice::from_ref(&cur))?;
            let r = self.depth - level;
            let pick = WeightedIndex::new(kids.iter().map(|p| self.desc[r][p.colour]))
                .map_err(|_| OracleError::UnsupportedModel)?
                .sample(rng);
            cur = kids[pick].clone();
        }
        Ok(cur)
    }

    /// Estimated bounding box: the exact box at a shallow level, mapped
    /// forward by the remaining power of `Q`.
    pub fn bounding_box(&self) -> Result<Window, OracleError> {
        let mut d0 = 0;
        let mut cur = vec![self.xi.clone()];
        while d0 < self.depth {
            let next = self.v.flat.apply(&cur, self.max_points)?;
            if next.len() > 4096 && d0 > 0 {
                break;
            }
            cur = next;
            d0 += 1;
        }
        let real: Vec<Vec<f64>> = cur.iter().map(|p| self.v.realizer.realize_qvec(&p.pos)).collect();
        let b0 = bounding_box(&real);
        let d = b0.lo.len();
        let corners: Vec<Vec<f64>> = (0..1usize << d)
            .map(|mask| {
                let c: Vec<f64> = (0..d)
                    .map(|t| if mask >> t & 1 == 1 { b0.hi[t] } else { b0.lo[t] })
                    .collect();
                mat_vec(&self.powers[self.depth - d0], &c)
            })
            .collect();
        Ok(bounding_box(&corners))
    }
}

/// `Φ^k(ξ) ∩ window` in flattened coordinates, sorted.
pub fn grow_patch_flat(
    v: &Validated,
    xi: &FlatPoint,
    k: usize,
    window: Option<&Window>,
    max_points: usize,
) -> Result<Vec<FlatPoint>, OracleError> {
    PatchGrower::new(v, xi, k, max_points).grow(window)
}

/// `Φ^k(ξ)` restricted to a realized box, as exact coloured points.
pub fn grow_patch(
    v: &Validated,
    xi: &FlatPoint,
    k: usize,
    window: Option<&Window>,
    max_points: usize,
) -> Result<ColouredPointSet, OracleError> {
    Ok(grow_patch_flat(v, xi, k, window, max_points)?
        .iter()
        .map(|p| v.model.from_flat_point(p))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Interval,
    Lattice,
}

fn kind(v: &Validated) -> Result<Kind, OracleError> {
    if v.realizer.dim() == 1 {
        return Ok(Kind::Interval);
    }
    let integral = v.model.field.is_rational()
        && v.flat.q.is_integral()
        && v.flat.digits.iter().flatten().flatten().all(|d| d.den() == 1);
    if integral {
        Ok(Kind::Lattice)
    } else {
        Err(OracleError::UnsupportedModel)
    }
}

/// True for models where the density oracle applies.
pub fn supports_density(v: &Validated) -> bool {
    kind(v).is_ok()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityOptions {
    pub depth: usize,
    pub max_points: usize,
    /// Monte Carlo samples on lattices.
    pub samples: usize,
    pub rng_seed: u64,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions {
            depth: 12,
            max_points: DEFAULT_MAX_POINTS,
            samples: DEFAULT_SAMPLES,
            rng_seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySeries {
    pub alpha_index: usize,
    pub n_values: Vec<u32>,
    pub densities: Vec<f64>,
    pub depth: usize,
    /// Set when point counting stands in for tile volume.
    pub heuristic: bool,
}

/// Fraction of the central 60% of the patch `Φ^depth(ξ)` where it agrees
/// with its translate by `Q^n α`. One-dimensional patches are measured
/// exactly by tile length; lattice patches by sampling tiles uniformly.
pub fn density_estimate(v: &Validated, xi: &FlatPoint, alpha: &QVec, n: u32, opts: &DensityOptions) -> Result<f64, OracleError> {
    Ok(densities(v, xi, alpha, &[n], opts)?[0])
}

/// [`density_estimate`] for several `n` over one patch and one sample.
pub fn densities(v: &Validated, xi: &FlatPoint, alpha: &QVec, ns: &[u32], opts: &DensityOptions) -> Result<Vec<f64>, OracleError> {
    let kind = kind(v)?;
    let grower = PatchGrower::new(v, xi, opts.depth, opts.max_points);
    let w = grower.bounding_box()?.central(0.6);
    let translations = ns
        .iter()
        .map(|&n| {
            let mut t = alpha.clone();
            for _ in 0..n {
                t = v.flat.q.checked_mul_vec(&t).ok_or(OracleError::Overflow)?;
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>, OracleError>>()?;
    match kind {
        Kind::Lattice => {
            let tiles = window_sample(&grower, &w, opts)?;
            translations
                .iter()
                .map(|t| {
                    let hits = tiles
                        .par_iter()
                        .map(|p| {
                            let y = p.pos.checked_add(t).ok_or(OracleError::Overflow)?;
                            grower.is_member(&y, p.colour)
                        })
                        .collect::<Result<Vec<bool>, OracleError>>()?;
                    Ok(hits.iter().filter(|&&h| h).count() as f64 / hits.len().max(1) as f64)
                })
                .collect()
        }
        Kind::Interval => translations.iter().map(|t| interval_density(&grower, &w, t)).collect(),
    }
}

fn interval_density(grower: &PatchGrower, w: &Window, t: &QVec) -> Result<f64, OracleError> {
    let v = grower.v;
    let mut region = w.hull(&w.shifted(&v.realizer.realize_qvec(t)));
    // room for the tile after the last window point
    region.hi[0] += grower.drift[1] * (1.0 + v.beta);
    let patch = grower.grow(Some(&region))?;
    let colour: HashMap<&QVec, usize> = patch.iter().map(|p| (&p.pos, p.colour)).collect();
    let mut pts: Vec<(f64, &FlatPoint)> = patch.iter().map(|p| (v.realizer.realize_qvec(&p.pos)[0], p)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut hit, mut all) = (0.0, 0.0);
    for pair in pts.windows(2) {
        let (x, p) = pair[0];
        if !w.contains(&[x]) {
            continue;
        }
        let len = pair[1].0 - x;
        all += len;
        let y = p.pos.checked_add(t).ok_or(OracleError::Overflow)?;
        if colour.get(&y) == Some(&p.colour) {
            hit += len;
        }
    }
    Ok(if all == 0.0 { 0.0 } else { hit / all })
}

/// Tiles drawn uniformly from the patch, conditioned on lying in `w`.
fn window_sample(grower: &PatchGrower, w: &Window, opts: &DensityOptions) -> Result<Vec<FlatPoint>, OracleError> {
    let realizer = &grower.v.realizer;
    (0..opts.samples as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed.wrapping_add(s.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
            for _ in 0..MAX_REJECTIONS {
                let p = grower.sample(&mut rng)?;
                if w.contains(&realizer.realize_qvec(&p.pos)) {
                    return Ok(p);
                }
            }
            Err(OracleError::CapExceeded {
                what: "window rejections",
                limit: MAX_REJECTIONS,
            })
        })
        .collect()
}

pub fn density_series(v: &Validated, xi: &FlatPoint, alpha: &QVec, alpha_index: usize, n_max: u32, opts: &DensityOptions) -> Result<DensitySeries, OracleError> {
    let kind = kind(v)?;
    let n_values: Vec<u32> = (1..=n_max).collect();
    let densities = densities(v, xi, alpha, &n_values, opts)?;
    Ok(DensitySeries {
        alpha_index,
        n_values,
        densities,
        depth: opts.depth,
        heuristic: kind == Kind::Lattice,
    })
}

/// All classes `(c_y, y − α − z, c_z)` over every ordered pair of
/// `Φ^depth(ξ)` with realized norm at most `admit`, by a plain double loop.
pub fn brute_force_seed_classes(
    v: &Validated,
    xi: &FlatPoint,
    alphas: &[QVec],
    depth: usize,
    admit: f64,
    max_points: usize,
) -> Result<BTreeSet<OverlapKey>, OracleError> {
    let pts = v.flat.iterate(std::slice::from_ref(xi), depth, max_points)?;
    brute_force_classes_in(v, &pts, alphas, admit)
}

/// The double loop of [`brute_force_seed_classes`] over a given point set.
pub fn brute_force_classes_in(v: &Validated, pts: &[FlatPoint], alphas: &[QVec], admit: f64) -> Result<BTreeSet<OverlapKey>, OracleError> {
    if pts.len() > DEFAULT_BRUTE_POINTS {
        return Err(OracleError::CapExceeded {
            what: "brute-force points",
            limit: DEFAULT_BRUTE_POINTS,
        });
    }
    let real: Vec<Vec<f64>> = pts.iter().map(|p| v.realizer.realize_qvec(&p.pos)).collect();
    let loose = admit * (1.0 + 1e-6) + 1e-6;
    let mut out = BTreeSet::new();
    for alpha in alphas {
        let ra = v.realizer.realize_qvec(alpha);
        let found: Option<Vec<Vec<OverlapKey>>> = (0..pts.len())
            .into_par_iter()
            .map(|a| {
                let mut keys = Vec::new();
                for b in 0..pts.len() {
                    let approx: f64 = (0..ra.len())
                        .map(|t| {
                            let x = real[a][t] - ra[t] - real[b][t];
                            x * x
                        })
                        .sum::<f64>()
                        .sqrt();
                    if approx > loose {
                        continue;
                    }
                    let z = pts[a].pos.checked_sub(alpha)?.checked_sub(&pts[b].pos)?;
                    if v.realizer.norm_qvec(&z) <= admit {
                        keys.push(OverlapKey {
                            i: pts[a].colour,
                            j: pts[b].colour,
                            z,
                        });
                    }
                }
                Some(keys)
            })
            .collect();
        out.extend(found.ok_or(OracleError::Overflow)?.into_iter().flatten());
    }
    Ok(out)
}

/// Seed classes found by the grid search next to the quadratic scan, on the
/// closure witness the pipeline would use.
#[derive(Clone, Debug)]
pub struct SeedCheck {
    pub basis: TranslationBasis,
    pub witness_points: usize,
    pub fast: BTreeSet<OverlapKey>,
    pub brute: BTreeSet<OverlapKey>,
}

impl SeedCheck {
    pub fn agrees(&self) -> bool {
        self.fast == self.brute
    }
}

pub fn seed_cross_check(v: &Validated, seed_power_cap: usize, opts: &OverlapOptions) -> Result<SeedCheck, OracleError> {
    let (p, xi) = fixed_seed(v, seed_power_cap, opts.max_points)?;
    let xi = v.model.to_flat_point(&xi)?;
    let basis = translation_basis(v, p, &xi, opts)?;
    let r = overlap_radius(v, p, opts.max_points)?;
    let bound = r.r + r.inv_norm * basis.max_norm(v) + r.delta;
    let closure = pair_closure(v, p, r.k as usize, &xi, bound, opts)?;
    let fast = seed_overlaps(v, &closure.witness, &basis.vectors, r.admit())?;
    let brute = brute_force_classes_in(v, &closure.witness, &basis.vectors, r.admit())?;
    Ok(SeedCheck {
        basis,
        witness_points: closure.witness.len(),
        fast,
        brute,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fixed_seed, suspend_symbolic, validate, SymbolicSubstitution};

    fn setup(words: &[&str]) -> (Validated, FlatPoint) {
        let s = SymbolicSubstitution::from_words("t", words).unwrap();
        let v = validate(&suspend_symbolic(&s, 128).unwrap()).unwrap();
        let (_, xi) = fixed_seed(&v, 6, DEFAULT_MAX_POINTS).unwrap();
        let xi = v.model.to_flat_point(&xi).unwrap();
        (v, xi)
    }

    #[test]
    fn zero_translation_agrees_everywhere() {
        let (v, xi) = setup(&["01", "00"]);
        for n in 1..4 {
            let d = density_estimate(&v, &xi, &QVec::zero(1), n, &DensityOptions::default()).unwrap();
            assert_eq!(d, 1.0);
        }
    }

    #[test]
    fn window_growth_matches_full_patch() {
        let (v, xi) = setup(&["01", "0"]);
        let full = grow_patch_flat(&v, &xi, 12, None, DEFAULT_MAX_POINTS).unwrap();
        let real: Vec<f64> = full.iter().map(|p| v.realizer.realize_qvec(&p.pos)[0]).collect();
        let w = Window {
            lo: vec![20.0],
            hi: vec![60.0],
        };
        let cut = grow_patch_flat(&v, &xi, 12, Some(&w), DEFAULT_MAX_POINTS).unwrap();
        let expect: Vec<FlatPoint> = full
            .iter()
            .zip(&real)
            .filter(|(_, x)| w.contains(&[**x]))
            .map(|(p, _)| p.clone())
            .collect();
        assert_eq!(cut, expect);
        assert!(cut.len() > 10 && cut.len() < full.len());
    }

    #[test]
    fn unsupported_models_rejected() {
        let f = crate::fixtures::get("dekking").unwrap();
        let m = crate::format::parse_model(f.text, None).unwrap();
        let v = validate(&m).unwrap();
        assert!(!supports_density(&v));
    }

    fn unit() -> QVec {
        QVec::from_ints(vec![1])
    }

    #[test]
    fn period_doubling_density_climbs() {
        let (v, xi) = setup(&["01", "00"]);
        let s = density_series(&v, &xi, &unit(), 0, 5, &DensityOptions::default()).unwrap();
        assert!(s.densities.windows(2).all(|w| w[1] >= w[0]));
        assert!(s.densities[4] >= 0.9, "{:?}", s.densities);
        assert!(!s.heuristic);
    }

    #[test]
    fn thue_morse_density_stays_low() {
        let (v, xi) = setup(&["01", "10"]);
        let s = density_series(&v, &xi, &unit(), 0, 6, &DensityOptions::default()).unwrap();
        assert!(s.densities.iter().all(|&d| d <= 0.8), "{:?}", s.densities);
    }

    #[test]
    fn membership_matches_growth() {
        let f = crate::fixtures::get("domino").unwrap();
        let v = validate(&crate::format::parse_model(f.text, None).unwrap()).unwrap();
        let (_, xi) = fixed_seed(&v, 6, DEFAULT_MAX_POINTS).unwrap();
        let xi = v.model.to_flat_point(&xi).unwrap();
        let depth = 11;
        let g = PatchGrower::new(&v, &xi, depth, DEFAULT_MAX_POINTS);
        let pts: HashSet<FlatPoint> = g.grow(None).unwrap().into_iter().collect();
        for x in 0..24 {
            for y in 0..24 {
                for c in 0..v.flat.m {
                    let p = FlatPoint { colour: c, pos: QVec::from_ints(vec![x, y]) };
                    assert_eq!(g.is_member(&p.pos, c).unwrap(), pts.contains(&p));
                }
            }
        }
    }
}
