//! Meyer property via the Pisot-family criterion on the eigenvalues of Q.

use super::Validated;
use crate::numeric::poly;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

/// Margin on `|γ| − 1` below which a conjugate is treated as on the circle.
const UNIT_MARGIN: f64 = 1e-9;
/// Eigenvalues closer than this (relative) are treated as equal.
const CLUSTER_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeyerStatus {
    Yes,
    No,
    Unknown,
}

impl MeyerStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeyerStatus::Yes => "yes",
            MeyerStatus::No => "no",
            MeyerStatus::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeyerReport {
    pub status: MeyerStatus,
    pub reason: String,
    /// Distinct eigenvalues of `Q_ℝ` with algebraic multiplicities.
    pub eigenvalues: Vec<(Complex64, usize)>,
    /// Minimal polynomial shared by the eigenvalues, when found.
    pub min_poly: Option<Vec<BigInt>>,
}

fn report(status: MeyerStatus, reason: impl Into<String>, eig: Vec<(Complex64, usize)>, p: Option<Vec<BigInt>>) -> MeyerReport {
    MeyerReport {
        status,
        reason: reason.into(),
        eigenvalues: eig,
        min_poly: p,
    }
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= CLUSTER_TOL * a.norm().max(1.0)
}

fn cluster(values: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize, Complex64)> = Vec::new();
    for &z in values {
        match out.iter_mut().find(|(c, _, _)| close(*c, z)) {
            Some(entry) => {
                entry.1 += 1;
                entry.2 += z;
            }
            None => out.push((z, 1, z)),
        }
    }
    let mut res: Vec<(Complex64, usize)> = out.into_iter().map(|(_, k, s)| (s / k as f64, k)).collect();
    res.sort_by(|a, b| {
        b.0.norm()
            .total_cmp(&a.0.norm())
            .then(b.0.re.total_cmp(&a.0.re))
            .then(b.0.im.total_cmp(&a.0.im))
    });
    res
}

fn geometric_multiplicity(q: &DMatrix<f64>, lambda: Complex64) -> usize {
    let d = q.nrows();
    let a = DMatrix::from_fn(d, d, |r, c| {
        let v = Complex64::new(q[(r, c)], 0.0);
        if r == c {
            v - lambda
        } else {
            v
        }
    });
    let scale = q.norm().max(1.0);
    let rank = a.svd(false, false).rank(1e-7 * scale);
    d - rank
}

/// Decides the Meyer property through the Pisot-family criterion: `yes` when
/// `Q_ℝ` is diagonalizable with algebraically conjugate eigenvalues of equal
/// multiplicity forming a Pisot family; `no` when those hypotheses hold and
/// the family condition fails; `unknown` otherwise.
pub fn meyer_check(v: &Validated) -> MeyerReport {
    let q = &v.q_real;
    let eig = cluster(q.complex_eigenvalues().as_slice());
    for &(lambda, alg) in &eig {
        if geometric_multiplicity(q, lambda) != alg {
            return report(MeyerStatus::Unknown, "expansion is not diagonalizable", eig, None);
        }
    }
    let chi = poly::char_poly(&v.model.q.flat_rational_matrix());
    let Some(chi_int) = chi.to_ints() else {
        return report(
            MeyerStatus::No,
            "characteristic polynomial of Q is not integral, so its eigenvalues are not algebraic integers",
            eig,
            None,
        );
    };
    let p = match poly::minimal_polynomial_of_root(&chi_int, eig[0].0) {
        Ok(p) => p,
        Err(e) => return report(MeyerStatus::Unknown, format!("minimal polynomial search failed: {e}"), eig, None),
    };
    let roots = poly::complex_roots_f64(&p.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>());
    let is_root = |z: Complex64| roots.iter().any(|r| close(*r, z));
    if eig.iter().any(|&(z, _)| !is_root(z)) {
        return report(MeyerStatus::Unknown, "eigenvalues are not algebraic conjugates of one another", eig, Some(p));
    }
    if eig.iter().any(|&(_, k)| k != eig[0].1) {
        return report(MeyerStatus::Unknown, "eigenvalue multiplicities differ", eig, Some(p));
    }
    for r in &roots {
        let modulus = r.norm();
        let is_eig = eig.iter().any(|&(z, _)| close(z, *r));
        if is_eig {
            continue;
        }
        if (modulus - 1.0).abs() < UNIT_MARGIN {
            return report(
                MeyerStatus::Unknown,
                format!("conjugate {r:.6} lies within {UNIT_MARGIN:e} of the unit circle"),
                eig,
                Some(p),
            );
        }
        if modulus > 1.0 {
            return report(
                MeyerStatus::No,
                format!("conjugate {r:.6} of modulus {modulus:.6} is not an eigenvalue of Q"),
                eig,
                Some(p),
            );
        }
    }
    report(MeyerStatus::Yes, "eigenvalues form a Pisot family", eig, Some(p))
}
