//! Number fields ℚ(θ) in power basis and their exact elements.

use super::hp::HpComplex;
use super::poly::{self, RatPoly, RootUnit};
use super::NumericError;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// Absolute distance below which two roots are considered indistinguishable
/// relative to a hint.
const AMBIGUITY_RADIUS: f64 = 1e-6;

/// ℚ(θ) for a monic irreducible integer polynomial, with every complex
/// embedding. Embedding 0 is the root nearest the construction hint; the
/// rest are ordered by modulus, then real part, then imaginary part, all
/// descending.
pub struct NumberField {
    min_poly: Vec<BigInt>,
    root_hint: Complex64,
    precision_bits: u32,
    roots: Vec<HpComplex>,
    roots_f64: Vec<Complex64>,
    /// `root_powers[k][t] = σ_k(θ)^t` for `t < degree`.
    root_powers: Vec<Vec<HpComplex>>,
    /// `θ^n` in power basis.
    theta_n: Vec<BigInt>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("min_poly", &self.min_poly)
            .field("root", &self.roots_f64[0])
            .field("precision_bits", &self.precision_bits)
            .finish()
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly && self.roots[0].with_bits(64) == other.roots[0].with_bits(64)
    }
}

impl Eq for NumberField {}

fn root_order(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

impl NumberField {
    pub fn new(min_poly: Vec<BigInt>, root_hint: Complex64, precision_bits: u32) -> Result<Arc<Self>, NumericError> {
        let mut p = min_poly;
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        if p.len() < 2 || !p.last().unwrap().is_one() {
            return Err(NumericError::NotMonic);
        }
        if precision_bits < 16 {
            return Err(NumericError::Precision(precision_bits));
        }
        let n = p.len() - 1;
        let roots: Vec<HpComplex> = if n == 1 {
            vec![HpComplex::from_int(&-&p[0], precision_bits)]
        } else {
            if poly::is_reducible(&p)? {
                return Err(NumericError::RejectReducible);
            }
            poly::isolate_roots(&p, precision_bits)?
                .into_iter()
                .flat_map(|u| match u {
                    RootUnit::Real(r) => vec![r],
                    u @ RootUnit::Pair(_) => u.roots(),
                })
                .collect()
        };
        if roots.len() != n {
            return Err(NumericError::BadPolynomial("root count differs from degree".into()));
        }
        let limit = -(precision_bits as i64) / 2;
        for r in &roots {
            let v = r.eval_int_poly(&p);
            if v.log2_abs().is_some_and(|e| e >= limit) {
                return Err(NumericError::Precision(precision_bits));
            }
        }
        let approx: Vec<Complex64> = roots.iter().map(HpComplex::to_c64).collect();
        let near: Vec<usize> = (0..n).filter(|&k| (approx[k] - root_hint).norm() < AMBIGUITY_RADIUS).collect();
        if near.len() >= 2 {
            return Err(NumericError::RejectAmbiguousRoot(format!(
                "{} and {}",
                fmt_c64(approx[near[0]]),
                fmt_c64(approx[near[1]])
            )));
        }
        let best = (0..n)
            .min_by(|&a, &b| {
                (approx[a] - root_hint)
                    .norm()
                    .total_cmp(&(approx[b] - root_hint).norm())
                    .then(root_order(&approx[a], &approx[b]))
            })
            .unwrap();
        let mut rest: Vec<usize> = (0..n).filter(|&k| k != best).collect();
        rest.sort_by(|&a, &b| root_order(&approx[a], &approx[b]));
        let order: Vec<usize> = std::iter::once(best).chain(rest).collect();
        let roots: Vec<HpComplex> = order.iter().map(|&k| roots[k].clone()).collect();
        let roots_f64: Vec<Complex64> = roots.iter().map(HpComplex::to_c64).collect();
        let root_powers = roots
            .iter()
            .map(|r| {
                let mut pw = Vec::with_capacity(n);
                let mut cur = HpComplex::one(precision_bits);
                for _ in 0..n {
                    pw.push(cur.clone());
                    cur = cur.mul(r);
                }
                pw
            })
            .collect();
        Ok(Arc::new(NumberField {
            theta_n: p[..p.len() - 1].iter().map(|c| -c).collect(),
            min_poly: p,
            root_hint,
            precision_bits,
            roots,
            roots_f64,
            root_powers,
        }))
    }

    /// ℚ itself, written as ℚ(θ) with θ a root of `x`.
    pub fn rational() -> Arc<Self> {
        NumberField::new(vec![BigInt::zero(), BigInt::one()], Complex64::new(0.0, 0.0), DEFAULT_PRECISION_BITS)
            .expect("x is a valid minimal polynomial")
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub fn root_hint(&self) -> Complex64 {
        self.root_hint
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots_f64
    }

    pub fn root_hp(&self, k: usize) -> &HpComplex {
        &self.roots[k]
    }

    /// Whether embedding `k` is real.
    pub fn is_real_embedding(&self, k: usize) -> bool {
        self.roots[k].im.is_zero()
    }

    /// `σ_k(θ^t)` in extended precision.
    pub fn basis_embedding(&self, k: usize, t: usize) -> &HpComplex {
        &self.root_powers[k][t]
    }

    pub fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }

    /// Reduce a coefficient vector of any length modulo the minimal polynomial.
    fn reduce(&self, mut c: Vec<BigRational>) -> Vec<BigRational> {
        let n = self.degree();
        if c.len() > n {
            for k in (n..c.len()).rev() {
                let top = std::mem::replace(&mut c[k], BigRational::zero());
                if top.is_zero() {
                    continue;
                }
                // θ^k = θ^(k−n) · θ^n; fold one degree at a time
                for (t, r) in self.theta_n.iter().enumerate() {
                    if !r.is_zero() {
                        c[k - n + t] += &top * BigRational::from_integer(r.clone());
                    }
                }
            }
            c.truncate(n);
        }
        c.resize(n, BigRational::zero());
        c
    }
}

pub(crate) fn fmt_c64(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// Exact element of a number field.
#[derive(Clone)]
pub struct Scalar {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

impl Scalar {
    /// Builds an element from power-basis coefficients, reducing when more
    /// than `degree` coefficients are given.
    pub fn new(field: &Arc<NumberField>, coeffs: Vec<BigRational>) -> Self {
        let coeffs = field.reduce(coeffs);
        Scalar {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Scalar::new(field, Vec::new())
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Scalar::from_rational(field, BigRational::one())
    }

    pub fn from_rational(field: &Arc<NumberField>, q: BigRational) -> Self {
        Scalar::new(field, vec![q])
    }

    pub fn from_int(field: &Arc<NumberField>, n: i64) -> Self {
        Scalar::from_rational(field, BigRational::from_integer(BigInt::from(n)))
    }

    /// The generator θ (for ℚ, the root of the degree-1 polynomial).
    pub fn theta(field: &Arc<NumberField>) -> Self {
        if field.is_rational() {
            let r = -&field.min_poly[0];
            return Scalar::from_rational(field, BigRational::from_integer(r));
        }
        Scalar::new(field, vec![BigRational::zero(), BigRational::one()])
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    fn check(&self, o: &Scalar) -> Result<(), NumericError> {
        if self.field.same(&o.field) {
            Ok(())
        } else {
            Err(NumericError::FieldMismatch)
        }
    }

    pub fn checked_add(&self, o: &Scalar) -> Result<Scalar, NumericError> {
        self.check(o)?;
        Ok(Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, o: &Scalar) -> Result<Scalar, NumericError> {
        self.check(o)?;
        Ok(Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn checked_mul(&self, o: &Scalar) -> Result<Scalar, NumericError> {
        self.check(o)?;
        let n = self.coeffs.len();
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Ok(Scalar::new(&self.field, prod))
    }

    pub fn scale(&self, q: &BigRational) -> Scalar {
        Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn inv(&self) -> Result<Scalar, NumericError> {
        if self.is_zero() {
            return Err(NumericError::DivideByZero);
        }
        if self.field.is_rational() {
            return Ok(Scalar::from_rational(&self.field, self.coeffs[0].recip()));
        }
        let a = RatPoly::new(self.coeffs.clone());
        let m = RatPoly::from_ints(&self.field.min_poly);
        let (g, s, _) = a.xgcd(&m);
        if g.degree() != Some(0) {
            return Err(NumericError::RejectReducible);
        }
        Ok(Scalar::new(&self.field, s.0))
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Scalar, NumericError> {
        self.checked_mul(&o.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<Scalar, NumericError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Scalar::one(&self.field);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(acc)
    }

    /// `σ_k(self)` at the field's working precision.
    pub fn embed_hp(&self, k: usize) -> HpComplex {
        let bits = self.field.precision_bits;
        let mut acc = HpComplex::zero(bits);
        for (t, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c.is_integer() {
                acc = acc.add(&self.field.root_powers[k][t].scale_int(&c.to_integer()));
            } else {
                acc = acc.add(&self.field.root_powers[k][t].scale_rational(c));
            }
        }
        acc
    }

    pub fn embed(&self, k: usize) -> Complex64 {
        self.embed_hp(k).to_c64()
    }

    /// Matrix of multiplication by `self` on the power basis; column `t`
    /// holds the coordinates of `self·θ^t`.
    pub fn multiplication_matrix(&self) -> Vec<Vec<BigRational>> {
        let n = self.field.degree();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        let mut basis = vec![BigRational::zero(); n];
        for t in 0..n {
            basis.iter_mut().for_each(|b| *b = BigRational::zero());
            basis[t] = BigRational::one();
            let prod = &Scalar::new(&self.field, basis.clone()) * self;
            for (r, c) in prod.coeffs.into_iter().enumerate() {
                m[r][t] = c;
            }
        }
        m
    }

    /// The rational value when the element lies in ℚ.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field.same(&other.field)
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on coefficients; a canonical order, not a numeric one.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

macro_rules! panicking_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            /// Panics when the operands live in different fields.
            fn $method(self, o: &Scalar) -> Scalar {
                self.$checked(o).expect("scalar operands from different fields")
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, o: Scalar) -> Scalar {
                (&self).$method(&o)
            }
        }
    };
}

panicking_op!(Add, add, checked_add);
panicking_op!(Sub, sub, checked_sub);
panicking_op!(Mul, mul, checked_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Writes e.g. `1 - 2θ + 1/3θ^2`; `0` for zero.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (t, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let body = fmt_rational(&a);
            match t {
                0 => write!(f, "{body}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{body}")?;
                    }
                    if t == 1 {
                        write!(f, "θ")?;
                    } else {
                        write!(f, "θ^{t}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

/// Parses a rational written as `"p"`, `"p/q"` or a decimal `"1.25"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let digits = frac.len() as u32;
        let i: BigInt = if int.is_empty() || int == "-" { BigInt::zero() } else { int.parse().ok()? };
        let fr: BigInt = if frac.is_empty() { BigInt::zero() } else { frac.parse().ok()? };
        let scale = BigInt::from(10).pow(digits);
        let fr = if neg { -fr } else { fr };
        return Some(BigRational::new(i * &scale + fr, scale));
    }
    Some(BigRational::from_integer(s.parse().ok()?))
}

pub fn rational_to_string(q: &BigRational) -> String {
    fmt_rational(q)
}

/// Float value of a rational, for diagnostics.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
