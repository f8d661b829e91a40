//! JSON model files and symbolic rule files.
//!
//! Field elements are power-basis coefficient arrays of rationals written as
//! `"p/q"` strings (plain integers and bare rationals are accepted on input).
//! Colours, components and embedding indices are 0-based except
//! `seed_colour`, which is 1-based like tile labels.

use crate::model::{suspend_symbolic, ModelError, SubstitutionModel, SymbolicSubstitution};
use crate::numeric::{
    field::rational_to_string, parse_rational, FMatrix, FVec, NumberField, NumericError, Part, Realization, RealizationRow,
    Scalar, DEFAULT_PRECISION_BITS,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

fn schema(msg: impl Into<String>) -> FormatError {
    FormatError::Schema(msg.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rat {
    Int(i64),
    Text(String),
}

impl Rat {
    fn parse(&self) -> Result<BigRational, FormatError> {
        match self {
            Rat::Int(x) => Ok(BigRational::from_integer(BigInt::from(*x))),
            Rat::Text(s) => parse_rational(s).ok_or_else(|| schema(format!("bad rational {s:?}"))),
        }
    }
}

/// A field element: one rational, or power-basis coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Elem {
    Rational(Rat),
    Coeffs(Vec<Rat>),
}

impl Elem {
    fn to_scalar(&self, field: &Arc<NumberField>) -> Result<Scalar, FormatError> {
        let coeffs = match self {
            Elem::Rational(r) => vec![r.parse()?],
            Elem::Coeffs(v) => v.iter().map(Rat::parse).collect::<Result<_, _>>()?,
        };
        if coeffs.len() > field.degree() {
            return Err(schema(format!(
                "field element has {} coefficients, field degree is {}",
                coeffs.len(),
                field.degree()
            )));
        }
        Ok(Scalar::new(field, coeffs))
    }

    fn from_scalar(s: &Scalar) -> Elem {
        let mut c: Vec<Rat> = s.coeffs().iter().map(|q| Rat::Text(rational_to_string(q))).collect();
        while c.len() > 1 && matches!(c.last(), Some(Rat::Text(t)) if t == "0") {
            c.pop();
        }
        Elem::Coeffs(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub min_poly: Vec<i64>,
    pub root_hint: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    pub component: usize,
    pub embedding_index: usize,
    pub part: Part,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub dim: usize,
    pub rank: usize,
    pub field: FieldSpec,
    /// `rank × rank` matrix of field elements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expansion: Option<Vec<Vec<Elem>>>,
    /// Rank-1 shorthand: multiplication by one complex field element acting
    /// on the plane through embedding 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expansion_complex: Option<Elem>,
    /// `digits[i][j]`: list of rank-vectors.
    pub digits: Vec<Vec<Vec<Vec<Elem>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<Vec<RowSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translations: Option<Vec<Vec<Elem>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_colour: Option<usize>,
}

fn vector(field: &Arc<NumberField>, v: &[Elem], e: usize, what: &str) -> Result<FVec, FormatError> {
    if v.len() != e {
        return Err(schema(format!("{what} has length {}, expected rank {e}", v.len())));
    }
    Ok(FVec(v.iter().map(|x| x.to_scalar(field)).collect::<Result<_, _>>()?))
}

impl ModelFile {
    /// Builds the model; `precision_bits` overrides the file's setting.
    pub fn to_model(&self, precision_bits: Option<u32>) -> Result<SubstitutionModel, FormatError> {
        let bits = precision_bits
            .or(self.field.precision_bits)
            .unwrap_or(DEFAULT_PRECISION_BITS);
        let field = NumberField::new(
            self.field.min_poly.iter().map(|&c| BigInt::from(c)).collect(),
            Complex64::new(self.field.root_hint[0], self.field.root_hint[1]),
            bits,
        )?;
        let e = self.rank;
        let (q, default_real) = match (&self.expansion, &self.expansion_complex) {
            (Some(_), Some(_)) => return Err(schema("give either expansion or expansion_complex, not both")),
            (None, None) => return Err(schema("missing expansion")),
            (Some(rows), None) => {
                if rows.len() != e || rows.iter().any(|r| r.len() != e) {
                    return Err(schema(format!("expansion must be {e}x{e}")));
                }
                let rows = rows
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_scalar(&field)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                (FMatrix::from_rows(rows)?, Realization::real_identity(e))
            }
            (None, Some(x)) => {
                if e != 1 {
                    return Err(schema("expansion_complex requires rank 1"));
                }
                (FMatrix::scalar(&x.to_scalar(&field)?, 1), Realization::complex_plane())
            }
        };
        let realization = match &self.realization {
            Some(rows) => Realization::new(
                rows.iter()
                    .map(|r| RealizationRow {
                        component: r.component,
                        embedding: r.embedding_index,
                        part: r.part,
                    })
                    .collect(),
            ),
            None => default_real,
        };
        if realization.dim() != self.dim {
            return Err(schema(format!(
                "dim is {} but the realization has {} rows",
                self.dim,
                realization.dim()
            )));
        }
        let m = self.digits.len();
        if m == 0 || self.digits.iter().any(|r| r.len() != m) {
            return Err(schema("digits must be a nonempty square table"));
        }
        let digits = self
            .digits
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, cell)| {
                        cell.iter()
                            .map(|d| vector(&field, d, e, &format!("digit of D[{i}][{j}]")))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut model = SubstitutionModel::new(self.name.clone(), field.clone(), q, digits, realization)?;
        if let Some(t) = &self.translations {
            model.translations = Some(
                t.iter()
                    .map(|v| vector(&field, v, e, "translation"))
                    .collect::<Result<_, _>>()?,
            );
        }
        if let Some(c) = self.seed_colour {
            if c == 0 || c > m {
                return Err(schema(format!("seed_colour {c} outside 1..={m}")));
            }
            model.seed_colour = Some(c - 1);
        }
        Ok(model)
    }

    pub fn from_model(model: &SubstitutionModel) -> Self {
        let field = &model.field;
        let hint = field.root_hint();
        let vec_elems = |v: &FVec| v.0.iter().map(Elem::from_scalar).collect::<Vec<_>>();
        ModelFile {
            name: model.name.clone(),
            dim: model.d(),
            rank: model.e(),
            field: FieldSpec {
                min_poly: field
                    .min_poly()
                    .iter()
                    .map(|c| c.to_i64().expect("minimal polynomial coefficient fits in i64"))
                    .collect(),
                root_hint: [hint.re, hint.im],
                precision_bits: Some(field.precision_bits()),
            },
            expansion: Some(
                model
                    .q
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(Elem::from_scalar).collect())
                    .collect(),
            ),
            expansion_complex: None,
            digits: model
                .digits
                .iter()
                .map(|row| row.iter().map(|cell| cell.iter().map(vec_elems).collect()).collect())
                .collect(),
            realization: Some(
                model
                    .realization
                    .rows
                    .iter()
                    .map(|r| RowSpec {
                        component: r.component,
                        embedding_index: r.embedding,
                        part: r.part,
                    })
                    .collect(),
            ),
            translations: model.translations.as_ref().map(|t| t.iter().map(vec_elems).collect()),
            seed_colour: model.seed_colour.map(|c| c + 1),
        }
    }
}

/// A word: letter names, or a string whose characters are letter names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Word {
    Chars(String),
    Letters(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolicFile {
    pub name: String,
    pub alphabet: Vec<String>,
    /// `rules[j]` is the image of letter `j`.
    pub rules: Vec<Word>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translations: Option<Vec<Vec<Elem>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_colour: Option<usize>,
}

impl SymbolicFile {
    pub fn to_substitution(&self) -> Result<SymbolicSubstitution, FormatError> {
        let index = |name: &str| {
            self.alphabet
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| schema(format!("letter {name:?} not in the alphabet")))
        };
        let rules = self
            .rules
            .iter()
            .map(|w| match w {
                Word::Chars(s) => s.chars().map(|c| index(&c.to_string())).collect::<Result<Vec<_>, _>>(),
                Word::Letters(v) => v.iter().map(|c| index(c)).collect(),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SymbolicSubstitution::new(self.name.clone(), self.alphabet.clone(), rules)?)
    }

    pub fn to_model(&self, precision_bits: Option<u32>) -> Result<SubstitutionModel, FormatError> {
        let s = self.to_substitution()?;
        let mut model = suspend_symbolic(&s, precision_bits.unwrap_or(DEFAULT_PRECISION_BITS))?;
        if let Some(t) = &self.translations {
            let field = model.field.clone();
            model.translations = Some(
                t.iter()
                    .map(|v| vector(&field, v, 1, "translation"))
                    .collect::<Result<_, _>>()?,
            );
        }
        if let Some(c) = self.seed_colour {
            if c == 0 || c > s.m() {
                return Err(schema(format!("seed_colour {c} outside 1..={}", s.m())));
            }
            model.seed_colour = Some(c - 1);
        }
        Ok(model)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InputFile {
    Model(ModelFile),
    Symbolic(SymbolicFile),
}

impl InputFile {
    /// Symbolic files are recognised by their `rules` key.
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
        let symbolic = value.get("rules").is_some();
        if symbolic {
            serde_json::from_value(value)
                .map(InputFile::Symbolic)
                .map_err(|e| schema(e.to_string()))
        } else {
            serde_json::from_value(value)
                .map(InputFile::Model)
                .map_err(|e| schema(e.to_string()))
        }
    }

    pub fn to_model(&self, precision_bits: Option<u32>) -> Result<SubstitutionModel, FormatError> {
        match self {
            InputFile::Model(m) => m.to_model(precision_bits),
            InputFile::Symbolic(s) => s.to_model(precision_bits),
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, InputFile::Symbolic(_))
    }
}

pub fn parse_model(text: &str, precision_bits: Option<u32>) -> Result<SubstitutionModel, FormatError> {
    InputFile::parse(text)?.to_model(precision_bits)
}

pub fn emit_model(model: &SubstitutionModel) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("model file serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIB: &str = r#"{
        "name": "fib", "dim": 1, "rank": 1,
        "field": {"min_poly": [-1, -1, 1], "root_hint": [1.6, 0]},
        "expansion": [[["0", "1"]]],
        "digits": [[[["0"]], [["0"]]], [[["1"]], []]],
        "translations": [[["-1", "1"]]],
        "seed_colour": 1
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let m = parse_model(FIB, None).unwrap();
        assert_eq!(m.m(), 2);
        assert_eq!(m.seed_colour, Some(0));
        let again = parse_model(&emit_model(&m), None).unwrap();
        assert_eq!(again, m);
        assert_eq!(again.translations, m.translations);
    }

    #[test]
    fn unknown_and_missing_keys_rejected() {
        let extra = FIB.replacen("\"dim\"", "\"colour\": 3, \"dim\"", 1);
        assert!(matches!(parse_model(&extra, None), Err(FormatError::Schema(_))));
        let missing = FIB.replace("\"digits\": [[[[\"0\"]], [[\"0\"]]], [[[\"1\"]], []]],", "");
        assert!(matches!(parse_model(&missing, None), Err(FormatError::Schema(_))));
        assert!(matches!(parse_model("{", None), Err(FormatError::Json(_))));
    }

    #[test]
    fn symbolic_input() {
        let text = r#"{"name": "pd", "alphabet": ["a", "b"], "rules": ["ab", ["a", "a"]]}"#;
        let m = parse_model(text, None).unwrap();
        assert_eq!(m.counts(), vec![vec![1, 2], vec![1, 0]]);
    }
}
