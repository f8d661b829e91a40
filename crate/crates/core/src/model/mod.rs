//! Substitution models: digit tables of a matrix function system, their
//! validation, recentering, fixed seeds, and symbolic suspension.

pub mod meyer;
pub mod points;
pub mod suspend;

pub use meyer::{meyer_check, MeyerReport, MeyerStatus};
pub use points::{digit_power, iterate_points, ColouredPoint, ColouredPointSet, Flat, FlatPoint, DEFAULT_MAX_POINTS};
pub use suspend::{suspend_symbolic, SymbolicSubstitution};

use crate::numeric::{norm, FMatrix, FVec, NumberField, NumericError, QVec, Realization, Realizer, Scalar};
use crate::spectral::{self, SpectralError, WeightedDigraph};
use nalgebra::DMatrix;
use std::sync::Arc;
use thiserror::Error;

pub const DEFAULT_SEED_POWER_CAP: usize = 6;
pub const DEFAULT_RECENTER_DEPTH: usize = 3;
/// Relative tolerance of the `|det Q_ℝ| = PF(S)` check.
const VOLUME_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("substitution matrix is not primitive")]
    NotPrimitive,
    #[error("expansion is not expansive: an eigenvalue has modulus {0:.6} <= 1")]
    NotExpansive(f64),
    #[error("|det Q| = {det:.9} differs from the Perron-Frobenius root {pf:.9}")]
    VolumeMismatch { det: f64, pf: f64 },
    #[error("bad realization: {0}")]
    BadRealization(String),
    #[error("malformed model: {0}")]
    Structure(String),
    #[error("no diagonal digit in any power up to {0}")]
    NoFixedPoint(usize),
    #[error("{what} exceeded the cap of {limit}")]
    CapExceeded { what: &'static str, limit: usize },
    #[error("coordinates overflowed 64-bit exact arithmetic")]
    Overflow,
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl ModelError {
    fn from_numeric(e: NumericError) -> Self {
        match e {
            NumericError::BadRealization(s) => ModelError::BadRealization(s),
            other => ModelError::Numeric(other),
        }
    }
}

/// Digit table indexed `[i][j]`, colours 0-based.
pub type DigitTable = Vec<Vec<Vec<FVec>>>;

/// A self-affine substitution: `Q·A_j = ⋃_i (D_ij + A_i)`.
#[derive(Clone, Debug)]
pub struct SubstitutionModel {
    pub name: String,
    pub field: Arc<NumberField>,
    pub q: FMatrix,
    pub digits: DigitTable,
    pub realization: Realization,
    /// Preferred colour of the fixed seed.
    pub seed_colour: Option<usize>,
    /// Return vectors to use instead of the automatic translation basis.
    pub translations: Option<Vec<FVec>>,
}

impl PartialEq for SubstitutionModel {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name
            && self.field.same(&o.field)
            && self.q == o.q
            && self.digits == o.digits
            && self.realization == o.realization
            && self.seed_colour == o.seed_colour
            && self.translations == o.translations
    }
}

impl SubstitutionModel {
    /// Structural checks only: shapes, fields and duplicate digits.
    pub fn new(
        name: impl Into<String>,
        field: Arc<NumberField>,
        q: FMatrix,
        digits: DigitTable,
        realization: Realization,
    ) -> Result<Self, ModelError> {
        let e = q.dim();
        if !q.field().same(&field) {
            return Err(ModelError::Numeric(NumericError::FieldMismatch));
        }
        let m = digits.len();
        if m == 0 {
            return Err(ModelError::Structure("digit table is empty".into()));
        }
        for (i, row) in digits.iter().enumerate() {
            if row.len() != m {
                return Err(ModelError::Structure(format!(
                    "digit row {} has {} entries, expected {m}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, cell) in row.iter().enumerate() {
                for (a, d) in cell.iter().enumerate() {
                    if d.len() != e {
                        return Err(ModelError::Structure(format!(
                            "digit in D_{},{} has length {}, expected {e}",
                            i + 1,
                            j + 1,
                            d.len()
                        )));
                    }
                    if d.0.iter().any(|s| !s.field().same(&field)) {
                        return Err(ModelError::Numeric(NumericError::FieldMismatch));
                    }
                    if cell[..a].contains(d) {
                        return Err(ModelError::Structure(format!("duplicate digit in D_{},{}", i + 1, j + 1)));
                    }
                }
            }
        }
        realization.validate(&field, e).map_err(ModelError::from_numeric)?;
        Ok(SubstitutionModel {
            name: name.into(),
            field,
            q,
            digits,
            realization,
            seed_colour: None,
            translations: None,
        })
    }

    pub fn m(&self) -> usize {
        self.digits.len()
    }

    pub fn e(&self) -> usize {
        self.q.dim()
    }

    pub fn d(&self) -> usize {
        self.realization.dim()
    }

    /// `S_ij = #D_ij`.
    pub fn counts(&self) -> Vec<Vec<u64>> {
        self.digits
            .iter()
            .map(|row| row.iter().map(|c| c.len() as u64).collect())
            .collect()
    }

    pub fn realizer(&self) -> Result<Realizer, ModelError> {
        Realizer::new(&self.field, self.e(), &self.realization).map_err(ModelError::from_numeric)
    }
}

/// Whether some power of the nonnegative matrix is entrywise positive
/// (Wielandt bound `(m−1)²+1`).
pub fn is_primitive(s: &[Vec<u64>]) -> bool {
    let m = s.len();
    let b: Vec<Vec<bool>> = s.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
    let mul = |a: &Vec<Vec<bool>>, c: &Vec<Vec<bool>>| -> Vec<Vec<bool>> {
        (0..m)
            .map(|i| (0..m).map(|j| (0..m).any(|k| a[i][k] && c[k][j])).collect())
            .collect()
    };
    let mut e = (m - 1) * (m - 1) + 1;
    let mut acc: Option<Vec<Vec<bool>>> = None;
    let mut base = b;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => mul(&a, &base),
            });
        }
        base = mul(&base, &base);
        e >>= 1;
    }
    acc.is_some_and(|a| a.iter().flatten().all(|&x| x))
}

/// Perron–Frobenius root of a nonnegative integer matrix.
pub fn perron_root(s: &[Vec<u64>]) -> Result<f64, SpectralError> {
    let m = s.len();
    let g = WeightedDigraph::from_edges(
        m,
        (0..m).flat_map(|i| (0..m).map(move |j| (i, j, s[i][j]))),
    );
    spectral::spectral_radius(&g, spectral::DEFAULT_TOL)
}

/// Findings of [`diagnose`]; all fields are populated even when some check
/// fails.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub primitive: bool,
    pub expansive: bool,
    pub min_eigen_modulus: f64,
    pub det_abs: f64,
    pub pf: f64,
    pub volume_ok: bool,
    pub realization: Result<(), String>,
}

/// A model that passed [`validate`], with its derived float data.
#[derive(Clone, Debug)]
pub struct Validated {
    pub model: SubstitutionModel,
    pub realizer: Realizer,
    pub q_real: DMatrix<f64>,
    /// `|det Q_ℝ|`.
    pub beta: f64,
    pub pf: f64,
    pub flat: Flat,
}

fn realize_q(model: &SubstitutionModel) -> Result<(Realizer, DMatrix<f64>), ModelError> {
    let realizer = model.realizer()?;
    let q_real = realizer
        .realize_map(&model.q.flat_rational_matrix())
        .map_err(ModelError::from_numeric)?;
    Ok((realizer, q_real))
}

pub fn diagnose(model: &SubstitutionModel) -> Diagnostics {
    let s = model.counts();
    let primitive = is_primitive(&s);
    let pf = perron_root(&s).unwrap_or(f64::NAN);
    match realize_q(model) {
        Ok((_, q)) => {
            let min_eigen_modulus = q
                .complex_eigenvalues()
                .iter()
                .map(|z| z.norm())
                .fold(f64::INFINITY, f64::min);
            let det_abs = q.determinant().abs();
            Diagnostics {
                primitive,
                expansive: min_eigen_modulus > 1.0,
                min_eigen_modulus,
                det_abs,
                pf,
                volume_ok: (det_abs - pf).abs() <= VOLUME_TOL * pf.max(1.0),
                realization: Ok(()),
            }
        }
        Err(e) => Diagnostics {
            primitive,
            expansive: false,
            min_eigen_modulus: f64::NAN,
            det_abs: f64::NAN,
            pf,
            volume_ok: false,
            realization: Err(e.to_string()),
        },
    }
}

/// Checks primitivity, realization, expansivity and the volume identity.
pub fn validate(model: &SubstitutionModel) -> Result<Validated, ModelError> {
    let s = model.counts();
    if !is_primitive(&s) {
        return Err(ModelError::NotPrimitive);
    }
    let (realizer, q_real) = realize_q(model)?;
    let min_mod = q_real
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    if min_mod <= 1.0 {
        return Err(ModelError::NotExpansive(min_mod));
    }
    let beta = q_real.determinant().abs();
    let pf = perron_root(&s)?;
    if (beta - pf).abs() > VOLUME_TOL * pf.max(1.0) {
        return Err(ModelError::VolumeMismatch { det: beta, pf });
    }
    let flat = model.flat()?;
    Ok(Validated {
        model: model.clone(),
        realizer,
        q_real,
        beta,
        pf,
        flat,
    })
}

/// Shifts every prototile so its representative point sits near the
/// centroid of its attractor: `D′_ij = D_ij − Q·a_j + a_i`, where `a_j` is
/// the point of `Q^{−depth}·⋃_l (D^depth)_lj` closest to that cloud's
/// realized centroid.
pub fn recenter(v: &Validated, depth: usize, max_points: usize) -> Result<SubstitutionModel, ModelError> {
    let model = &v.model;
    let m = model.m();
    let dp = v.flat.digit_power(depth.max(1), max_points)?;
    let qinv = model.q.inverse()?.pow(depth.max(1) as u32);
    let qinv_flat = crate::numeric::QMat::from_rationals(&qinv.flat_rational_matrix()).ok_or(ModelError::Overflow)?;
    let mut anchors: Vec<QVec> = Vec::with_capacity(m);
    for j in 0..m {
        let mut cloud: Vec<QVec> = Vec::new();
        for row in &dp {
            for d in &row[j] {
                cloud.push(qinv_flat.checked_mul_vec(d).ok_or(ModelError::Overflow)?);
            }
        }
        cloud.sort_unstable();
        cloud.dedup();
        let real: Vec<Vec<f64>> = cloud.iter().map(|p| v.realizer.realize_qvec(p)).collect();
        let dim = v.realizer.dim();
        let centroid: Vec<f64> = (0..dim)
            .map(|t| real.iter().map(|r| r[t]).sum::<f64>() / real.len() as f64)
            .collect();
        let best = (0..cloud.len())
            .min_by(|&a, &b| {
                let da = norm(&real[a].iter().zip(&centroid).map(|(x, c)| x - c).collect::<Vec<_>>());
                let db = norm(&real[b].iter().zip(&centroid).map(|(x, c)| x - c).collect::<Vec<_>>());
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .ok_or_else(|| ModelError::Structure(format!("tile {} has no digits", j + 1)))?;
        anchors.push(cloud.swap_remove(best));
    }
    let field = &model.field;
    let a: Vec<FVec> = anchors.iter().map(|p| FVec::from_flat(field, &p.to_rationals())).collect();
    let qa: Vec<FVec> = a.iter().map(|x| model.q.mul_vec(x)).collect();
    let digits: DigitTable = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    model.digits[i][j]
                        .iter()
                        .map(|d| d.sub(&qa[j]).add(&a[i]))
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut out = model.clone();
    out.digits = digits;
    Ok(out)
}

/// Fixed seed of `Φ^p`: the least `p ≤ cap` with a digit `δ ∈ (D^p)_ii`
/// and `ξ = (I − Q^p)^{−1}·δ`, so `ξ ∈ Φ^p(ξ)`. The colour is the preferred
/// one when it qualifies at that power, otherwise the smallest; the digit
/// is the one of least realized length.
pub fn fixed_seed(v: &Validated, cap: usize, max_points: usize) -> Result<(usize, ColouredPoint), ModelError> {
    let model = &v.model;
    let m = model.m();
    for p in 1..=cap {
        let dp = v.flat.digit_power(p, max_points)?;
        let mut colours: Vec<usize> = (0..m).filter(|&i| !dp[i][i].is_empty()).collect();
        if colours.is_empty() {
            continue;
        }
        if let Some(c) = model.seed_colour {
            if colours.contains(&c) {
                colours = vec![c];
            }
        }
        let i = colours[0];
        let delta = dp[i][i]
            .iter()
            .min_by(|a, b| {
                v.realizer
                    .norm_qvec(a)
                    .total_cmp(&v.realizer.norm_qvec(b))
                    .then(a.cmp(b))
            })
            .unwrap();
        let delta = FVec::from_flat(&model.field, &delta.to_rationals());
        let qp = model.q.pow(p as u32);
        let lhs = FMatrix::identity(&model.field, model.e()).sub(&qp);
        let xi = lhs.solve(&delta)?;
        return Ok((p, ColouredPoint { colour: i, pos: xi }));
    }
    Err(ModelError::NoFixedPoint(cap))
}

/// The model whose single step is `Φ^p`.
pub fn power_model(v: &Validated, p: usize, max_points: usize) -> Result<SubstitutionModel, ModelError> {
    if p == 1 {
        return Ok(v.model.clone());
    }
    let model = &v.model;
    let digits = digit_power(model, p, max_points)?;
    let mut out = SubstitutionModel::new(
        format!("{}^{p}", model.name),
        model.field.clone(),
        model.q.pow(p as u32),
        digits,
        model.realization.clone(),
    )?;
    out.seed_colour = model.seed_colour;
    out.translations = model.translations.clone();
    Ok(out)
}

/// Convenience: `Scalar` vector from integers.
pub fn int_vec(field: &Arc<NumberField>, v: &[i64]) -> FVec {
    FVec(v.iter().map(|&x| Scalar::from_int(field, x)).collect())
}
