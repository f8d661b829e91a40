//! Coloured point sets and the matrix function system acting on them.
//!
//! The hot paths work on [`FlatPoint`]s, whose positions are flattened
//! power-basis coordinates in compact [`QVec`] form.

use super::{ModelError, SubstitutionModel};
use crate::numeric::{FVec, QMat, QVec};
use rayon::prelude::*;
use std::collections::BTreeSet;

pub const DEFAULT_MAX_POINTS: usize = 5_000_000;

/// Point of a coloured set, exact position in `K^e`, colour 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColouredPoint {
    pub colour: usize,
    pub pos: FVec,
}

pub type ColouredPointSet = BTreeSet<ColouredPoint>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlatPoint {
    pub colour: usize,
    pub pos: QVec,
}

/// Digit table indexed `[i][j]`.
pub type FlatDigits = Vec<Vec<Vec<QVec>>>;

/// A model in flattened coordinates.
#[derive(Clone, Debug)]
pub struct Flat {
    pub m: usize,
    pub q: QMat,
    pub digits: FlatDigits,
}

fn overflow() -> ModelError {
    ModelError::Overflow
}

impl Flat {
    pub fn from_model(model: &SubstitutionModel) -> Result<Self, ModelError> {
        let q = QMat::from_rationals(&model.q.flat_rational_matrix()).ok_or_else(overflow)?;
        let digits = model
            .digits
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| {
                        cell.iter()
                            .map(|d| QVec::from_rationals(&d.flat_coeffs()).ok_or_else(overflow))
                            .collect()
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Ok(Flat { m: model.m(), q, digits })
    }

    /// One application of the MFS: `(x, j) ↦ (Qx + d, i)` for `d ∈ D_ij`.
    /// Output sorted and deduplicated.
    pub fn apply(&self, pts: &[FlatPoint], max_points: usize) -> Result<Vec<FlatPoint>, ModelError> {
        let bound: usize = pts
            .iter()
            .map(|p| (0..self.m).map(|i| self.digits[i][p.colour].len()).sum::<usize>())
            .sum();
        if bound > max_points {
            return Err(ModelError::CapExceeded {
                what: "points",
                limit: max_points,
            });
        }
        let produced: Option<Vec<Vec<FlatPoint>>> = pts
            .par_iter()
            .map(|p| {
                let qx = self.q.checked_mul_vec(&p.pos)?;
                let mut out = Vec::new();
                for i in 0..self.m {
                    for d in &self.digits[i][p.colour] {
                        out.push(FlatPoint {
                            colour: i,
                            pos: qx.checked_add(d)?,
                        });
                    }
                }
                Some(out)
            })
            .collect();
        let mut all: Vec<FlatPoint> = produced.ok_or_else(overflow)?.into_iter().flatten().collect();
        all.par_sort_unstable();
        all.dedup();
        if all.len() > max_points {
            return Err(ModelError::CapExceeded {
                what: "points",
                limit: max_points,
            });
        }
        Ok(all)
    }

    pub fn iterate(&self, pts: &[FlatPoint], k: usize, max_points: usize) -> Result<Vec<FlatPoint>, ModelError> {
        let mut cur: Vec<FlatPoint> = pts.to_vec();
        cur.sort_unstable();
        cur.dedup();
        for _ in 0..k {
            cur = self.apply(&cur, max_points)?;
        }
        Ok(cur)
    }

    /// `(D^k)_ij = ⋃_n (D_in + Q·(D^{k−1})_nj)`, each cell sorted.
    pub fn digit_power(&self, k: usize, max_points: usize) -> Result<FlatDigits, ModelError> {
        if k == 0 {
            return Err(ModelError::Structure("digit power must be at least 1".into()));
        }
        let mut cur = self.digits.clone();
        for row in cur.iter_mut() {
            for cell in row.iter_mut() {
                cell.sort_unstable();
                cell.dedup();
            }
        }
        for _ in 1..k {
            let mut next: FlatDigits = vec![vec![Vec::new(); self.m]; self.m];
            let mut total = 0usize;
            for (i, next_row) in next.iter_mut().enumerate() {
                for (j, out) in next_row.iter_mut().enumerate() {
                    let mut set = BTreeSet::new();
                    for n in 0..self.m {
                        for p in &cur[n][j] {
                            let qp = self.q.checked_mul_vec(p).ok_or_else(overflow)?;
                            for d in &self.digits[i][n] {
                                set.insert(qp.checked_add(d).ok_or_else(overflow)?);
                            }
                        }
                    }
                    total += set.len();
                    if total > max_points {
                        return Err(ModelError::CapExceeded {
                            what: "digits",
                            limit: max_points,
                        });
                    }
                    *out = set.into_iter().collect();
                }
            }
            cur = next;
        }
        Ok(cur)
    }
}

impl SubstitutionModel {
    pub fn flat(&self) -> Result<Flat, ModelError> {
        Flat::from_model(self)
    }

    pub fn to_flat_point(&self, p: &ColouredPoint) -> Result<FlatPoint, ModelError> {
        Ok(FlatPoint {
            colour: p.colour,
            pos: QVec::from_rationals(&p.pos.flat_coeffs()).ok_or(ModelError::Overflow)?,
        })
    }

    pub fn from_flat_point(&self, p: &FlatPoint) -> ColouredPoint {
        ColouredPoint {
            colour: p.colour,
            pos: FVec::from_flat(&self.field, &p.pos.to_rationals()),
        }
    }
}

/// Exact expanded digit table of `Φ^k`.
pub fn digit_power(model: &SubstitutionModel, k: usize, max_points: usize) -> Result<Vec<Vec<Vec<FVec>>>, ModelError> {
    let flat = model.flat()?.digit_power(k, max_points)?;
    Ok(flat
        .iter()
        .map(|row| {
            row.iter()
                .map(|cell| cell.iter().map(|d| FVec::from_flat(&model.field, &d.to_rationals())).collect())
                .collect()
        })
        .collect())
}

/// `Φ^k` applied to a coloured point set.
pub fn iterate_points(
    model: &SubstitutionModel,
    pts: &ColouredPointSet,
    k: usize,
    max_points: usize,
) -> Result<ColouredPointSet, ModelError> {
    let flat = model.flat()?;
    let start: Vec<FlatPoint> = pts.iter().map(|p| model.to_flat_point(p)).collect::<Result<_, _>>()?;
    let out = flat.iterate(&start, k, max_points)?;
    Ok(out.iter().map(|p| model.from_flat_point(p)).collect())
}
