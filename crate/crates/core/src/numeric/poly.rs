//! Univariate polynomials over ℚ and ℤ, complex root isolation, and a
//! root-subset factor search for small degrees.

use super::hp::HpComplex;
use super::NumericError;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Polynomial with rational coefficients, ascending powers, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly(pub Vec<BigRational>);

impl RatPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        RatPoly(c)
    }

    pub fn from_ints(c: &[BigInt]) -> Self {
        RatPoly::new(c.iter().map(|x| BigRational::from_integer(x.clone())).collect())
    }

    pub fn zero() -> Self {
        RatPoly(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigRational> {
        self.0.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let z = BigRational::zero();
        RatPoly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let z = BigRational::zero();
        RatPoly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&z) - o.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        RatPoly::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.lead().unwrap().clone();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut quo = vec![BigRational::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = &rem[k] / &lead;
            if c.is_zero() {
                continue;
            }
            for (i, di) in d.0.iter().enumerate() {
                rem[k - dd + i] -= &c * di;
            }
            quo[k - dd] = c;
        }
        rem.truncate(dd);
        (RatPoly::new(quo), RatPoly::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => RatPoly::zero(),
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended Euclid: returns `(g, s, t)` with `s·self + t·o = g`, `g` monic.
    pub fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let one = RatPoly::new(vec![BigRational::one()]);
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (one.clone(), RatPoly::zero());
        let (mut t0, mut t1) = (RatPoly::zero(), one);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.lead().cloned() {
            None => (r0, s0, t0),
            Some(l) => {
                let inv = l.recip();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }

    pub fn derivative(&self) -> Self {
        RatPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Integer coefficients if every coefficient is integral.
    pub fn to_ints(&self) -> Option<Vec<BigInt>> {
        self.0
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * z + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// `self / gcd(self, self')`, monic.
    pub fn squarefree_part(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        self.divrem(&g).0.monic()
    }
}

/// Characteristic polynomial `det(xI − A)` of a square rational matrix
/// (Faddeev–LeVerrier). Ascending and monic.
pub fn char_poly(a: &[Vec<BigRational>]) -> RatPoly {
    let n = a.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for (l, ail) in a[i].iter().enumerate() {
                    if !ail.is_zero() && !m[l][j].is_zero() {
                        s += ail * &m[l][j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        m = next;
        // c_{n−k} = −tr(A·M_k)/k
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                if !a[i][l].is_zero() && !m[l][i].is_zero() {
                    tr += &a[i][l] * &m[l][i];
                }
            }
        }
        coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
    }
    RatPoly::new(coeffs)
}

/// All complex roots of a polynomial with real coefficients (Aberth–Ehrlich
/// iteration followed by Newton polishing). Accurate for simple roots.
pub fn complex_roots_f64(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last().is_some_and(|x| *x == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let c: Vec<f64> = c.iter().map(|x| x / lead).collect();
    if n == 1 {
        return vec![Complex64::new(-c[0], 0.0)];
    }
    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    // Fujiwara-style bound for the starting circle
    let bound = (0..n)
        .map(|i| (c[i].abs()).powf(1.0 / (n - i) as f64))
        .fold(0.0f64, f64::max)
        * 2.0;
    let radius = bound.max(1e-3) * 0.5;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, ang)
        })
        .collect();
    for _ in 0..2000 {
        let mut worst = 0.0f64;
        for k in 0..n {
            let (p, dp) = eval(z[k]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += 1.0 / (z[k] - z[j]);
                }
            }
            let corr = ratio / (1.0 - ratio * s);
            if corr.is_finite() {
                z[k] -= corr;
                worst = worst.max(corr.norm() / z[k].norm().max(1.0));
            }
        }
        if worst < 1e-15 {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zk);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *zk -= step;
        }
    }
    z
}

/// A real root or a conjugate pair `(z, z̄)` with `Im z > 0`.
#[derive(Clone, Debug)]
pub enum RootUnit {
    Real(HpComplex),
    Pair(HpComplex),
}

impl RootUnit {
    pub fn degree(&self) -> usize {
        match self {
            RootUnit::Real(_) => 1,
            RootUnit::Pair(_) => 2,
        }
    }

    pub fn roots(&self) -> Vec<HpComplex> {
        match self {
            RootUnit::Real(r) => vec![r.clone()],
            RootUnit::Pair(z) => vec![z.clone(), z.conj()],
        }
    }
}

fn newton_refine(coeffs: &[BigInt], start: &HpComplex, target_bits: u32) -> HpComplex {
    let mut z = start.clone();
    for _ in 0..200 {
        let (p, dp) = z.eval_int_poly_with_derivative(coeffs);
        let Some(step) = p.div(&dp) else { break };
        z = z.sub(&step);
        match step.log2_abs() {
            None => break,
            Some(e) if e < -(target_bits as i64) => break,
            _ => {}
        }
    }
    z
}

/// Roots of a squarefree integer polynomial grouped into real roots and
/// conjugate pairs, each refined to `bits` fractional bits.
pub fn isolate_roots(coeffs: &[BigInt], bits: u32) -> Result<Vec<RootUnit>, NumericError> {
    let f: Vec<f64> = coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    if f.iter().any(|x| !x.is_finite()) {
        return Err(NumericError::BadPolynomial("coefficients too large".into()));
    }
    let approx = complex_roots_f64(&f);
    let work = bits + 64;
    let mut units = Vec::new();
    let mut used = vec![false; approx.len()];
    for k in 0..approx.len() {
        if used[k] {
            continue;
        }
        let z = approx[k];
        let scale = z.norm().max(1.0);
        if z.im.abs() < 1e-7 * scale {
            used[k] = true;
            let start = HpComplex::from_c64(Complex64::new(z.re, 0.0), work);
            units.push(RootUnit::Real(newton_refine(coeffs, &start, work - 8)));
            continue;
        }
        // match with the closest root to the conjugate
        let partner = (0..approx.len())
            .filter(|&j| j != k && !used[j])
            .min_by(|&a, &b| {
                let da = (approx[a] - z.conj()).norm();
                let db = (approx[b] - z.conj()).norm();
                da.total_cmp(&db)
            })
            .ok_or_else(|| NumericError::BadPolynomial("unpaired complex root".into()))?;
        used[k] = true;
        used[partner] = true;
        let upper = if z.im > 0.0 { z } else { approx[partner] };
        let upper = Complex64::new(upper.re, upper.im.abs());
        let start = HpComplex::from_c64(upper, work);
        units.push(RootUnit::Pair(newton_refine(coeffs, &start, work - 8)));
    }
    // reduce to requested precision
    Ok(units
        .into_iter()
        .map(|u| match u {
            RootUnit::Real(r) => RootUnit::Real(r.with_bits(bits)),
            RootUnit::Pair(z) => RootUnit::Pair(z.with_bits(bits)),
        })
        .collect())
}

/// Product of `(x − r)` over the roots in the chosen units, rounded to
/// integers when every coefficient is within `1e-6` of one.
fn candidate_factor(units: &[&RootUnit]) -> Option<Vec<BigInt>> {
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for u in units {
        for r in u.roots() {
            let r = r.to_c64();
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            poly = next;
        }
    }
    poly.iter()
        .map(|c| {
            let rc = c.re.round();
            let tol = 1e-6 * c.re.abs().max(1.0);
            ((c.re - rc).abs() < tol && c.im.abs() < tol).then(|| BigInt::from(rc as i64))
        })
        .collect()
}

fn divides_exactly(poly: &[BigInt], factor: &[BigInt]) -> bool {
    let (_, r) = RatPoly::from_ints(poly).divrem(&RatPoly::from_ints(factor));
    r.is_zero()
}

const MAX_UNITS: usize = 22;

/// Enumerate unit subsets by increasing degree, calling `accept` on each
/// exact monic integer divisor; stops at the first accepted divisor.
fn search_factors<F>(
    poly: &[BigInt],
    units: &[RootUnit],
    max_degree: usize,
    mut accept: F,
) -> Result<Option<(Vec<BigInt>, Vec<usize>)>, NumericError>
where
    F: FnMut(&[usize]) -> bool,
{
    if units.len() > MAX_UNITS {
        return Err(NumericError::BadPolynomial(format!(
            "factor search limited to {MAX_UNITS} root groups"
        )));
    }
    let mut masks: Vec<(usize, u32)> = (1u32..(1u32 << units.len()))
        .map(|mask| {
            let deg = (0..units.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| units[i].degree())
                .sum();
            (deg, mask)
        })
        .filter(|(deg, _)| *deg <= max_degree)
        .collect();
    masks.sort();
    for (_, mask) in masks {
        let idx: Vec<usize> = (0..units.len()).filter(|i| mask & (1 << i) != 0).collect();
        if !accept(&idx) {
            continue;
        }
        let chosen: Vec<&RootUnit> = idx.iter().map(|&i| &units[i]).collect();
        if let Some(f) = candidate_factor(&chosen) {
            if divides_exactly(poly, &f) {
                return Ok(Some((f, idx)));
            }
        }
    }
    Ok(None)
}

/// Whether a monic integer polynomial of degree ≥ 2 factors over ℚ.
/// Degree-1 polynomials are irreducible.
pub fn is_reducible(poly: &[BigInt]) -> Result<bool, NumericError> {
    let p = RatPoly::from_ints(poly);
    let n = p.degree().unwrap_or(0);
    if n <= 1 {
        return Ok(false);
    }
    if p.squarefree_part().degree() != Some(n) {
        return Ok(true);
    }
    let units = isolate_roots(poly, 64)?;
    let found = search_factors(poly, &units, n / 2, |_| true)?;
    Ok(found.is_some())
}

/// Minimal polynomial (monic, integer) of the root of `poly` closest to
/// `near`. `poly` must be monic with integer coefficients.
pub fn minimal_polynomial_of_root(poly: &[BigInt], near: Complex64) -> Result<Vec<BigInt>, NumericError> {
    let sf = RatPoly::from_ints(poly).squarefree_part();
    let sf_int = sf
        .to_ints()
        .ok_or_else(|| NumericError::BadPolynomial("squarefree part is not integral".into()))?;
    let units = isolate_roots(&sf_int, 64)?;
    let target = units
        .iter()
        .enumerate()
        .min_by(|a, b| {
            let da = a.1.roots().iter().map(|r| (r.to_c64() - near).norm()).fold(f64::INFINITY, f64::min);
            let db = b.1.roots().iter().map(|r| (r.to_c64() - near).norm()).fold(f64::INFINITY, f64::min);
            da.total_cmp(&db)
        })
        .map(|(i, _)| i)
        .ok_or_else(|| NumericError::BadPolynomial("constant polynomial has no roots".into()))?;
    let n = sf.degree().unwrap_or(0);
    let found = search_factors(&sf_int, &units, n, |idx| idx.contains(&target))?;
    found
        .map(|(f, _)| f)
        .ok_or_else(|| NumericError::BadPolynomial("no integral factor found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn golden_roots() {
        let r = complex_roots_f64(&[-1.0, -1.0, 1.0]);
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[1] - 1.618_033_988_749_895).abs() < 1e-14);
        assert!((re[0] + 0.618_033_988_749_895).abs() < 1e-14);
    }

    #[test]
    fn reducibility() {
        assert!(is_reducible(&ints(&[-1, 0, 1])).unwrap());
        assert!(!is_reducible(&ints(&[-1, -1, 1])).unwrap());
        assert!(!is_reducible(&ints(&[1, 1, 0, 1])).unwrap());
        // (x^2+1)(x^2-2)
        assert!(is_reducible(&ints(&[-2, 0, -1, 0, 1])).unwrap());
        // x^4 - x^3 - x^2 - x - 1 is irreducible
        assert!(!is_reducible(&ints(&[-1, -1, -1, -1, 1])).unwrap());
        // repeated factor
        assert!(is_reducible(&ints(&[1, -2, 1])).unwrap());
    }

    #[test]
    fn minimal_polynomial_picks_factor() {
        // (x - 2)(x + 1) → root 2 has minimal polynomial x − 2
        let m = minimal_polynomial_of_root(&ints(&[-2, -1, 1]), Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(m, ints(&[-2, 1]));
        // (x^2 − x − 1)(x + 1)^2
        let p = RatPoly::from_ints(&ints(&[-1, -1, 1]))
            .mul(&RatPoly::from_ints(&ints(&[1, 2, 1])))
            .to_ints()
            .unwrap();
        let m = minimal_polynomial_of_root(&p, Complex64::new(1.6, 0.0)).unwrap();
        assert_eq!(m, ints(&[-1, -1, 1]));
    }

    #[test]
    fn char_poly_of_fibonacci_matrix() {
        let q = |x: i64| BigRational::from_integer(BigInt::from(x));
        let a = vec![vec![q(1), q(1)], vec![q(1), q(0)]];
        assert_eq!(char_poly(&a).to_ints().unwrap(), ints(&[-1, -1, 1]));
    }

    #[test]
    fn xgcd_inverts_modulo() {
        let p = RatPoly::from_ints(&ints(&[-1, -1, 1]));
        let a = RatPoly::from_ints(&ints(&[0, 1]));
        let (g, s, _) = a.xgcd(&p);
        assert_eq!(g.degree(), Some(0));
        let (_, r) = a.mul(&s).divrem(&p);
        assert_eq!(r, RatPoly::from_ints(&ints(&[1])));
    }

    #[test]
    fn isolated_roots_meet_precision() {
        let p = ints(&[1, 1, 0, 1]);
        let units = isolate_roots(&p, 128).unwrap();
        assert_eq!(units.iter().map(RootUnit::degree).sum::<usize>(), 3);
        for u in &units {
            for r in u.roots() {
                let v = r.eval_int_poly(&p);
                assert!(v.log2_abs().is_none_or(|e| e < -64), "{v:?}");
            }
        }
    }
}
