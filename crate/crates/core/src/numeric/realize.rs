//! Geometric realization ι: K^e → ℝ^d and float operator norms.

use super::field::NumberField;
use super::qvec::QVec;
use super::vector::FVec;
use super::NumericError;
use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Safety inflation applied to computed operator norms.
const NORM_INFLATION: f64 = 1.0 + 1e-9;
pub const MAX_CONTRACTION_POWER: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

/// One output coordinate: `part(σ_embedding(x_component))`, 0-based indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RealizationRow {
    pub component: usize,
    pub embedding: usize,
    pub part: Part,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Realization {
    pub rows: Vec<RealizationRow>,
}

impl Realization {
    pub fn new(rows: Vec<RealizationRow>) -> Self {
        Realization { rows }
    }

    /// Distinguished embedding, real part, for each of `e` components.
    pub fn real_identity(e: usize) -> Self {
        Realization::new(
            (0..e)
                .map(|c| RealizationRow {
                    component: c,
                    embedding: 0,
                    part: Part::Re,
                })
                .collect(),
        )
    }

    /// Real and imaginary part of the distinguished embedding of a single
    /// component.
    pub fn complex_plane() -> Self {
        Realization::new(vec![
            RealizationRow {
                component: 0,
                embedding: 0,
                part: Part::Re,
            },
            RealizationRow {
                component: 0,
                embedding: 0,
                part: Part::Im,
            },
        ])
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Index bounds and the coverage rule: every component needs a row on a
    /// real embedding or both parts of one complex embedding.
    pub fn validate(&self, field: &NumberField, e: usize) -> Result<(), NumericError> {
        let n = field.degree();
        for r in &self.rows {
            if r.component >= e {
                return Err(NumericError::BadRealization(format!(
                    "component {} outside 1..{e}",
                    r.component + 1
                )));
            }
            if r.embedding >= n {
                return Err(NumericError::BadRealization(format!(
                    "embedding {} outside 0..{}",
                    r.embedding,
                    n - 1
                )));
            }
        }
        for c in 0..e {
            let covered = self.rows.iter().any(|r| {
                r.component == c
                    && if field.is_real_embedding(r.embedding) {
                        r.part == Part::Re
                    } else {
                        let other = match r.part {
                            Part::Re => Part::Im,
                            Part::Im => Part::Re,
                        };
                        self.rows
                            .iter()
                            .any(|s| s.component == c && s.embedding == r.embedding && s.part == other)
                    }
            });
            if !covered {
                return Err(NumericError::BadRealization(format!("component {} is not covered", c + 1)));
            }
        }
        Ok(())
    }
}

/// Realization precomputed as a `d × (e·n)` float matrix acting on
/// flattened power-basis coordinates.
#[derive(Clone, Debug)]
pub struct Realizer {
    field: Arc<NumberField>,
    realization: Realization,
    weights: DMatrix<f64>,
}

impl Realizer {
    pub fn new(field: &Arc<NumberField>, e: usize, realization: &Realization) -> Result<Self, NumericError> {
        realization.validate(field, e)?;
        let n = field.degree();
        let d = realization.dim();
        let mut weights = DMatrix::zeros(d, e * n);
        for (row, r) in realization.rows.iter().enumerate() {
            for t in 0..n {
                let z = field.basis_embedding(r.embedding, t).to_c64();
                weights[(row, r.component * n + t)] = match r.part {
                    Part::Re => z.re,
                    Part::Im => z.im,
                };
            }
        }
        let rank = weights.clone().svd(false, false).rank(1e-9 * weights.norm().max(1.0));
        if rank < d {
            return Err(NumericError::BadRealization(format!(
                "realization rows are dependent (rank {rank} < {d})"
            )));
        }
        Ok(Realizer {
            field: field.clone(),
            realization: realization.clone(),
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    /// Realization computed from extended-precision embeddings.
    pub fn realize(&self, x: &FVec) -> Vec<f64> {
        self.realization
            .rows
            .iter()
            .map(|r| {
                let z = x.0[r.component].embed(r.embedding);
                match r.part {
                    Part::Re => z.re,
                    Part::Im => z.im,
                }
            })
            .collect()
    }

    pub fn realize_qvec(&self, v: &QVec) -> Vec<f64> {
        let den = v.den() as f64;
        (0..self.dim())
            .map(|row| {
                let s: f64 = v
                    .num()
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(c, &x)| self.weights[(row, c)] * x as f64)
                    .sum();
                s / den
            })
            .collect()
    }

    pub fn norm_qvec(&self, v: &QVec) -> f64 {
        norm(&self.realize_qvec(v))
    }

    /// The `d×d` real matrix `A` with `A·ι = ι·M` for a ℚ-linear map `M`
    /// given in flattened coordinates.
    pub fn realize_map(&self, m: &[Vec<BigRational>]) -> Result<DMatrix<f64>, NumericError> {
        let size = self.weights.ncols();
        let mf = DMatrix::from_fn(size, size, |r, c| m[r][c].to_f64().unwrap_or(f64::NAN));
        let lm = &self.weights * mf;
        let l = &self.weights;
        let llt = l * l.transpose();
        let inv = llt
            .try_inverse()
            .ok_or_else(|| NumericError::BadRealization("realization matrix is rank deficient".into()))?;
        let a = &lm * l.transpose() * inv;
        let residual = (&a * l - &lm).norm();
        if residual > 1e-8 * lm.norm().max(1.0) {
            return Err(NumericError::BadRealization(format!(
                "realization is not invariant under the expansion (residual {residual:.3e})"
            )));
        }
        Ok(a)
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Spectral norm of `Q^{−k}`, inflated so it bounds the true value.
pub fn inv_op_norm(q: &DMatrix<f64>, k: u32) -> Result<f64, NumericError> {
    let inv = q.clone().try_inverse().ok_or(NumericError::SingularMatrix)?;
    let mut p = DMatrix::identity(q.nrows(), q.ncols());
    for _ in 0..k {
        p = &p * &inv;
    }
    let s = p.singular_values().max();
    Ok(s * NORM_INFLATION)
}

/// Least multiple `k` of `step` with `‖Q^{−k}‖ < 1`, and that norm.
pub fn contraction_power(q: &DMatrix<f64>, step: u32) -> Result<(u32, f64), NumericError> {
    let step = step.max(1);
    let mut k = step;
    while k <= MAX_CONTRACTION_POWER {
        let v = inv_op_norm(q, k)?;
        if v < 1.0 {
            return Ok((k, v));
        }
        k += step;
    }
    Err(NumericError::NotExpansive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::field::Scalar;
    use crate::numeric::vector::FMatrix;
    use num_bigint::BigInt;
    use num_complex::Complex64;

    fn field(c: &[i64], hint: Complex64) -> Arc<NumberField> {
        NumberField::new(c.iter().map(|&x| BigInt::from(x)).collect(), hint, 128).unwrap()
    }

    #[test]
    fn golden_realization() {
        let f = field(&[-1, -1, 1], Complex64::new(1.6, 0.0));
        let r = Realizer::new(&f, 1, &Realization::real_identity(1)).unwrap();
        let x = r.realize(&FVec(vec![Scalar::theta(&f)]));
        assert!((x[0] - 1.618_033_988_7).abs() < 1e-9);
    }

    #[test]
    fn dekking_plane() {
        let f = field(&[1, 1, 0, 1], Complex64::new(0.34, 1.16));
        let r = Realizer::new(&f, 1, &Realization::complex_plane()).unwrap();
        assert_eq!(r.realize(&FVec(vec![Scalar::one(&f)])), vec![1.0, 0.0]);
        let q = FMatrix::scalar(&Scalar::theta(&f), 1).flat_rational_matrix();
        let qr = r.realize_map(&q).unwrap();
        assert!((inv_op_norm(&qr, 1).unwrap() - 0.8260).abs() < 1e-4);
    }

    #[test]
    fn kenyon_solomyak_rows() {
        let f = field(&[3, -4, -1, 1], Complex64::new(2.2, 0.0));
        let minus = f.roots().iter().position(|z| (z.re + 1.912).abs() < 1e-3).unwrap();
        let real = Realization::new(vec![
            RealizationRow {
                component: 0,
                embedding: 0,
                part: Part::Re,
            },
            RealizationRow {
                component: 0,
                embedding: minus,
                part: Part::Re,
            },
        ]);
        let r = Realizer::new(&f, 1, &real).unwrap();
        let x = r.realize(&FVec(vec![Scalar::theta(&f)]));
        assert!((x[0] - 2.19869).abs() < 1e-5 && (x[1] + 1.91223).abs() < 1e-5);
    }

    #[test]
    fn coverage_enforced() {
        let f = field(&[1, 1, 0, 1], Complex64::new(0.34, 1.16));
        let only_re = Realization::new(vec![RealizationRow {
            component: 0,
            embedding: 0,
            part: Part::Re,
        }]);
        assert!(matches!(
            Realizer::new(&f, 1, &only_re),
            Err(NumericError::BadRealization(_))
        ));
    }

    #[test]
    fn scalar_matrix_norms() {
        let q = DMatrix::from_diagonal_element(3, 3, 2.0);
        assert!((inv_op_norm(&q, 1).unwrap() - 0.5).abs() < 1e-8);
        let g = DMatrix::from_element(1, 1, 1.618_033_988_749_895);
        assert!((inv_op_norm(&g, 1).unwrap() - 0.618_034).abs() < 1e-6);
        let id = DMatrix::<f64>::identity(2, 2);
        assert_eq!(contraction_power(&id, 1).unwrap_err(), NumericError::NotExpansive);
    }
}
