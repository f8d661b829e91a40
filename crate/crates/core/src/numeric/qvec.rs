//! Compact exact rational vectors: `i64` numerators over one shared positive
//! denominator, always in lowest terms. Used as hash keys and for the hot
//! loops of the overlap closure. Every operation is checked and reports
//! overflow as `None`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct QVec {
    num: Box<[i64]>,
    den: i64,
}

fn normalize(num: Vec<i128>, den: i128) -> Option<QVec> {
    let (mut num, mut den) = (num, den);
    if den < 0 {
        num.iter_mut().for_each(|x| *x = -*x);
        den = -den;
    }
    let g = num.iter().fold(den, |g, x| g.gcd(x));
    if g > 1 {
        num.iter_mut().for_each(|x| *x /= g);
        den /= g;
    }
    let num: Option<Vec<i64>> = num.into_iter().map(|x| i64::try_from(x).ok()).collect();
    Some(QVec {
        num: num?.into_boxed_slice(),
        den: i64::try_from(den).ok()?,
    })
}

impl QVec {
    pub fn zero(n: usize) -> Self {
        QVec {
            num: vec![0; n].into_boxed_slice(),
            den: 1,
        }
    }

    pub fn from_rationals(v: &[BigRational]) -> Option<Self> {
        let den = v.iter().fold(BigInt::from(1), |l, q| l.lcm(q.denom()));
        let num: Option<Vec<i128>> = v
            .iter()
            .map(|q| (q.numer() * (&den / q.denom())).to_i128())
            .collect();
        normalize(num?, den.to_i128()?)
    }

    pub fn from_ints(v: Vec<i64>) -> Self {
        QVec {
            num: v.into_boxed_slice(),
            den: 1,
        }
    }

    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|&x| BigRational::new(BigInt::from(x), BigInt::from(self.den)))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.num.len()
    }

    pub fn num(&self) -> &[i64] {
        &self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|x| *x == 0)
    }

    fn combine(&self, o: &QVec, sign: i128) -> Option<QVec> {
        let (d1, d2) = (self.den as i128, o.den as i128);
        let l = d1.lcm(&d2);
        let (s1, s2) = (l / d1, l / d2);
        let num: Option<Vec<i128>> = self
            .num
            .iter()
            .zip(o.num.iter())
            .map(|(&a, &b)| (a as i128).checked_mul(s1)?.checked_add((b as i128).checked_mul(s2)?.checked_mul(sign)?))
            .collect();
        normalize(num?, l)
    }

    pub fn checked_add(&self, o: &QVec) -> Option<QVec> {
        self.combine(o, 1)
    }

    pub fn checked_sub(&self, o: &QVec) -> Option<QVec> {
        self.combine(o, -1)
    }

    pub fn neg(&self) -> QVec {
        QVec {
            num: self.num.iter().map(|x| -x).collect(),
            den: self.den,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let d = self.den as f64;
        self.num.iter().map(|&x| x as f64 / d).collect()
    }

    /// Floor of each coordinate; a coarse lattice cell used for bucketing.
    pub fn floor_cell(&self) -> Vec<i64> {
        self.num.iter().map(|x| x.div_floor(&self.den)).collect()
    }
}

/// Rational matrix stored as integer numerators over one denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    num: Vec<i64>,
    den: i64,
}

impl QMat {
    pub fn from_rationals(m: &[Vec<BigRational>]) -> Option<Self> {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let den = m.iter().flatten().fold(BigInt::from(1), |l, q| l.lcm(q.denom()));
        let num: Option<Vec<i64>> = m
            .iter()
            .flatten()
            .map(|q| (q.numer() * (&den / q.denom())).to_i64())
            .collect();
        Some(QMat {
            rows,
            cols,
            num: num?,
            den: den.to_i64()?,
        })
    }

    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    /// Row-major entries as floats.
    pub fn to_f64(&self) -> (usize, usize, Vec<f64>) {
        let d = self.den as f64;
        (self.rows, self.cols, self.num.iter().map(|&x| x as f64 / d).collect())
    }

    pub fn checked_mul_vec(&self, v: &QVec) -> Option<QVec> {
        debug_assert_eq!(self.cols, v.dim());
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut acc: i128 = 0;
            for c in 0..self.cols {
                let a = self.num[r * self.cols + c];
                if a != 0 {
                    acc = acc.checked_add((a as i128).checked_mul(v.num[c] as i128)?)?;
                }
            }
            out.push(acc);
        }
        normalize(out, (self.den as i128).checked_mul(v.den as i128)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn normal_form_is_unique() {
        let a = QVec::from_rationals(&[q(1, 2), q(2, 4)]).unwrap();
        let b = QVec::from_rationals(&[q(3, 6), q(1, 2)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.den(), 2);
        let z = QVec::from_rationals(&[q(0, 5), q(0, 1)]).unwrap();
        assert_eq!(z, QVec::zero(2));
    }

    #[test]
    fn arithmetic_round_trip() {
        let a = QVec::from_rationals(&[q(1, 3), q(-5, 2)]).unwrap();
        let b = QVec::from_rationals(&[q(2, 3), q(1, 6)]).unwrap();
        let s = a.checked_add(&b).unwrap();
        assert_eq!(s.to_rationals(), vec![q(1, 1), q(-7, 3)]);
        assert_eq!(s.checked_sub(&b).unwrap(), a);
        assert!(a.checked_sub(&a).unwrap().is_zero());
    }

    #[test]
    fn matrix_vector() {
        let m = QMat::from_rationals(&[vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]]).unwrap();
        let v = QVec::from_rationals(&[q(1, 2), q(1, 1)]).unwrap();
        assert_eq!(m.checked_mul_vec(&v).unwrap().to_rationals(), vec![q(1, 1), q(3, 2)]);
    }

    #[test]
    fn overflow_reported() {
        let big = QVec::from_rationals(&[q(i64::MAX, 1)]).unwrap();
        assert!(big.checked_add(&big).is_none());
    }
}
