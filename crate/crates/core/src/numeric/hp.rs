//! Fixed-point complex numbers over `BigInt` for root refinement and
//! high-precision embeddings.
//!
//! A value is `(re + i·im) / 2^bits`. All operands of a binary operation must
//! share the same `bits`.

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct HpComplex {
    pub re: BigInt,
    pub im: BigInt,
    pub bits: u32,
}

fn shr_round(x: BigInt, bits: u32) -> BigInt {
    if bits == 0 {
        return x;
    }
    let half = BigInt::from(1) << (bits - 1);
    if x.sign() == Sign::Minus {
        -((-x + half) >> bits)
    } else {
        (x + half) >> bits
    }
}

fn f64_to_fixed(x: f64, bits: u32) -> BigInt {
    if x == 0.0 || !x.is_finite() {
        return BigInt::zero();
    }
    let (mantissa, exponent, sign) = num_traits::float::FloatCore::integer_decode(x);
    let mut m = BigInt::from(mantissa);
    let shift = exponent as i64 + bits as i64;
    if shift >= 0 {
        m <<= shift as usize;
    } else {
        m = shr_round(m, (-shift) as u32);
    }
    if sign < 0 {
        -m
    } else {
        m
    }
}

fn fixed_to_f64(x: &BigInt, bits: u32) -> f64 {
    let nbits = x.bits();
    if nbits <= 60 {
        return x.to_f64().unwrap_or(0.0) * 2f64.powf(-(bits as f64));
    }
    let drop = nbits - 60;
    let top = (x >> drop as usize).to_f64().unwrap_or(0.0);
    top * 2f64.powf(drop as f64 - bits as f64)
}

impl HpComplex {
    pub fn zero(bits: u32) -> Self {
        HpComplex {
            re: BigInt::zero(),
            im: BigInt::zero(),
            bits,
        }
    }

    pub fn one(bits: u32) -> Self {
        HpComplex {
            re: BigInt::from(1) << bits as usize,
            im: BigInt::zero(),
            bits,
        }
    }

    pub fn from_c64(z: Complex64, bits: u32) -> Self {
        HpComplex {
            re: f64_to_fixed(z.re, bits),
            im: f64_to_fixed(z.im, bits),
            bits,
        }
    }

    pub fn from_int(n: &BigInt, bits: u32) -> Self {
        HpComplex {
            re: n << bits as usize,
            im: BigInt::zero(),
            bits,
        }
    }

    pub fn from_rational(q: &BigRational, bits: u32) -> Self {
        let num = q.numer() << bits as usize;
        // round-half-away division
        let den = q.denom();
        let twice = (&num << 1usize) + if num.is_negative() { -den } else { den.clone() };
        let re = twice / (den << 1usize);
        HpComplex {
            re,
            im: BigInt::zero(),
            bits,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(fixed_to_f64(&self.re, self.bits), fixed_to_f64(&self.im, self.bits))
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.bits, o.bits);
        HpComplex {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
            bits: self.bits,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.bits, o.bits);
        HpComplex {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
            bits: self.bits,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.bits, o.bits);
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        HpComplex {
            re: shr_round(re, self.bits),
            im: shr_round(im, self.bits),
            bits: self.bits,
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        HpComplex {
            re: &self.re * k,
            im: &self.im * k,
            bits: self.bits,
        }
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        let r = HpComplex::from_rational(q, self.bits);
        self.mul(&r)
    }

    /// `|z|^2` as a fixed-point integer with the same scale.
    pub fn norm_sqr(&self) -> BigInt {
        shr_round(&self.re * &self.re + &self.im * &self.im, self.bits)
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        let den = &o.re * &o.re + &o.im * &o.im;
        if den.is_zero() {
            return None;
        }
        let re = &self.re * &o.re + &self.im * &o.im;
        let im = &self.im * &o.re - &self.re * &o.im;
        Some(HpComplex {
            re: (re << self.bits as usize) / &den,
            im: (im << self.bits as usize) / &den,
            bits: self.bits,
        })
    }

    pub fn conj(&self) -> Self {
        HpComplex {
            re: self.re.clone(),
            im: -&self.im,
            bits: self.bits,
        }
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        if bits >= self.bits {
            let s = (bits - self.bits) as usize;
            HpComplex {
                re: &self.re << s,
                im: &self.im << s,
                bits,
            }
        } else {
            let s = self.bits - bits;
            HpComplex {
                re: shr_round(self.re.clone(), s),
                im: shr_round(self.im.clone(), s),
                bits,
            }
        }
    }

    /// `log2 |z|` rounded down, or `None` for zero. Cheap magnitude probe.
    pub fn log2_abs(&self) -> Option<i64> {
        let m = self.re.bits().max(self.im.bits());
        if m == 0 {
            None
        } else {
            Some(m as i64 - 1 - self.bits as i64)
        }
    }

    /// Evaluate an integer polynomial (ascending coefficients) by Horner.
    pub fn eval_int_poly(&self, coeffs: &[BigInt]) -> Self {
        let mut acc = HpComplex::zero(self.bits);
        for c in coeffs.iter().rev() {
            acc = acc.mul(self).add(&HpComplex::from_int(c, self.bits));
        }
        acc
    }

    /// Value and derivative of an integer polynomial at `self`.
    pub fn eval_int_poly_with_derivative(&self, coeffs: &[BigInt]) -> (Self, Self) {
        let mut p = HpComplex::zero(self.bits);
        let mut dp = HpComplex::zero(self.bits);
        for c in coeffs.iter().rev() {
            dp = dp.mul(self).add(&p);
            p = p.mul(self).add(&HpComplex::from_int(c, self.bits));
        }
        (p, dp)
    }
}

impl fmt::Debug for HpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_c64();
        write!(f, "Hp({:.17e} + {:.17e}i @{}b)", z.re, z.im, self.bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_f64() {
        for &x in &[0.0, 1.0, -2.5, 1e-12, 3.25e7, -0.1] {
            let z = HpComplex::from_c64(Complex64::new(x, -x / 3.0), 128);
            let back = z.to_c64();
            assert!((back.re - x).abs() <= 1e-15 * x.abs().max(1e-300));
            assert!((back.im + x / 3.0).abs() <= 1e-15 * x.abs().max(1e-300));
        }
    }

    #[test]
    fn mul_div_inverse() {
        let a = HpComplex::from_c64(Complex64::new(1.25, -0.75), 160);
        let b = HpComplex::from_c64(Complex64::new(-3.5, 0.125), 160);
        let q = a.mul(&b).div(&b).unwrap();
        let err = q.sub(&a);
        assert!(err.log2_abs().is_none_or(|e| e < -150));
    }

    #[test]
    fn rational_conversion() {
        let third = BigRational::new(1.into(), 3.into());
        let z = HpComplex::from_rational(&third, 200);
        let three = HpComplex::from_int(&BigInt::from(3), 200);
        let err = z.mul(&three).sub(&HpComplex::one(200));
        assert!(err.log2_abs().is_none_or(|e| e < -195));
    }
}
