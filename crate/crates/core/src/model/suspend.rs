//! Suspension of a symbolic substitution into an interval tiling.

use super::{is_primitive, perron_root, DigitTable, ModelError, SubstitutionModel};
use crate::numeric::{poly, FMatrix, FVec, NumberField, Realization, Scalar};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

/// Rules `j → w_1 … w_r` over letters `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicSubstitution {
    pub name: String,
    pub alphabet: Vec<String>,
    pub rules: Vec<Vec<usize>>,
}

impl SymbolicSubstitution {
    pub fn new(name: impl Into<String>, alphabet: Vec<String>, rules: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        let m = alphabet.len();
        if m == 0 || rules.len() != m {
            return Err(ModelError::Structure(format!(
                "{} rules for an alphabet of {m} letters",
                rules.len()
            )));
        }
        if let Some(bad) = rules.iter().flatten().find(|&&x| x >= m) {
            return Err(ModelError::Structure(format!("letter index {bad} outside the alphabet")));
        }
        if let Some(j) = rules.iter().position(Vec::is_empty) {
            return Err(ModelError::Structure(format!("rule for {} is empty", alphabet[j])));
        }
        Ok(SymbolicSubstitution {
            name: name.into(),
            alphabet,
            rules,
        })
    }

    /// Letters written as single characters, e.g. `["01", "00"]`.
    pub fn from_words(name: impl Into<String>, words: &[&str]) -> Result<Self, ModelError> {
        let alphabet: Vec<String> = (0..words.len()).map(|i| i.to_string()).collect();
        let rules = words
            .iter()
            .map(|w| {
                w.chars()
                    .map(|c| {
                        c.to_digit(36)
                            .map(|x| x as usize)
                            .ok_or_else(|| ModelError::Structure(format!("bad letter {c:?}")))
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        SymbolicSubstitution::new(name, alphabet, rules)
    }

    pub fn m(&self) -> usize {
        self.alphabet.len()
    }

    /// `S_ij` = occurrences of letter `i` in the image of `j`.
    pub fn incidence(&self) -> Vec<Vec<u64>> {
        let m = self.m();
        let mut s = vec![vec![0u64; m]; m];
        for (j, w) in self.rules.iter().enumerate() {
            for &i in w {
                s[i][j] += 1;
            }
        }
        s
    }
}

/// Interval tiling of a symbolic substitution over `ℚ(β)`, `β` the
/// Perron–Frobenius root, lengths from the left eigenvector with the first
/// length 1.
pub fn suspend_symbolic(s: &SymbolicSubstitution, precision_bits: u32) -> Result<SubstitutionModel, ModelError> {
    let m = s.m();
    let inc = s.incidence();
    if !is_primitive(&inc) {
        return Err(ModelError::NotPrimitive);
    }
    let beta_f = perron_root(&inc)?;
    let rat = |x: u64| BigRational::from_integer(BigInt::from(x));
    let chi = poly::char_poly(&inc.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect::<Vec<_>>());
    let chi = chi.to_ints().expect("integer matrix has integral characteristic polynomial");
    let min_poly = poly::minimal_polynomial_of_root(&chi, Complex64::new(beta_f, 0.0))?;
    let field = NumberField::new(min_poly, Complex64::new(beta_f, 0.0), precision_bits)?;
    let beta = Scalar::theta(&field);
    // (Sᵀ − β) ℓ = 0 with ℓ_1 = 1: replace one redundant equation by ℓ_1 = 1
    let system: Vec<Vec<Scalar>> = (0..m)
        .map(|j| {
            (0..m)
                .map(|i| {
                    let v = Scalar::from_int(&field, inc[i][j] as i64);
                    if i == j {
                        &v - &beta
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut lengths = None;
    for r in 0..m {
        let mut rows = system.clone();
        rows[r] = (0..m)
            .map(|c| if c == 0 { Scalar::one(&field) } else { Scalar::zero(&field) })
            .collect();
        let mut rhs = FVec::zero(&field, m);
        rhs.0[r] = Scalar::one(&field);
        if let Ok(x) = FMatrix::from_rows(rows)?.solve(&rhs) {
            lengths = Some(x);
            break;
        }
    }
    let lengths = lengths.ok_or_else(|| ModelError::Structure("eigenvector solve failed".into()))?;
    let mut digits: DigitTable = vec![vec![Vec::new(); m]; m];
    for (j, w) in s.rules.iter().enumerate() {
        let mut offset = Scalar::zero(&field);
        for &letter in w {
            digits[letter][j].push(FVec(vec![offset.clone()]));
            offset = &offset + &lengths.0[letter];
        }
    }
    SubstitutionModel::new(
        s.name.clone(),
        field.clone(),
        FMatrix::scalar(&beta, 1),
        digits,
        Realization::real_identity(1),
    )
}
