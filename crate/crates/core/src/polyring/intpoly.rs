//! Dense integer polynomials in `q`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rug::integer::Order;
use rug::{Complex, Integer};

/// Polynomials with at most this many nonzero terms take the sparse product path.
const SPARSE_TERMS: usize = 4;
/// Below this operand length schoolbook multiplication beats Kronecker packing.
const KRONECKER_MIN_LEN: usize = 48;

/// An integer polynomial `γ₀ + γ₁q + ⋯ + γ_N q^N` stored densely.
///
/// The highest stored coefficient is always nonzero; the zero polynomial has
/// no stored coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<Integer>,
}

fn trim(coeffs: &mut Vec<Integer>) {
    while coeffs.last().is_some_and(|c| *c == 0) {
        coeffs.pop();
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        trim(&mut coeffs);
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    pub fn constant(c: impl Into<Integer>) -> Self {
        Self::new(vec![c.into()])
    }

    pub fn monomial(c: impl Into<Integer>, k: usize) -> Self {
        let c = c.into();
        if c == 0 {
            return IntPoly::default();
        }
        let mut coeffs = vec![Integer::new(); k + 1];
        coeffs[k] = c;
        IntPoly { coeffs }
    }

    /// `q^k`.
    pub fn q_pow(k: usize) -> Self {
        Self::monomial(1, k)
    }

    /// Sum of `c·q^e` over the given terms.
    pub fn from_terms(terms: &[(i64, usize)]) -> Self {
        let len = terms.iter().map(|&(_, e)| e + 1).max().unwrap_or(0);
        let mut coeffs = vec![Integer::new(); len];
        for &(c, e) in terms {
            coeffs[e] += c;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Integer> {
        self.coeffs
    }

    /// Coefficient of `q^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Integer {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// Degree, or `None` for the zero polynomial (degree −∞).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == 1)
    }

    /// Number of stored coefficients (degree + 1).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of nonzero coefficients.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| **c != 0).count()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Integer)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| **c != 0)
    }

    pub fn shift(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::default();
        }
        let mut coeffs = vec![Integer::new(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    pub fn scale(&self, c: &Integer) -> IntPoly {
        if *c == 0 {
            return IntPoly::default();
        }
        IntPoly { coeffs: self.coeffs.iter().map(|x| Integer::from(x * c)).collect() }
    }

    /// `Σ_{i≥1} i·|γᵢ|`, the Lipschitz constant of the polynomial on the unit circle.
    pub fn weighted_coeff_sum(&self) -> Integer {
        let mut acc = Integer::new();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            acc += Integer::from(c.abs_ref()) * i as u64;
        }
        acc
    }

    /// `Σ |γᵢ|`.
    pub fn abs_coeff_sum(&self) -> Integer {
        self.coeffs.iter().map(|c| Integer::from(c.abs_ref())).sum()
    }

    pub fn max_abs_coeff_bits(&self) -> u32 {
        self.coeffs.iter().map(|c| c.significant_bits()).max().unwrap_or(0)
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| *c >= 0)
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| Integer::from(c * i as u64)).collect(),
        )
    }

    pub fn eval_integer(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Horner evaluation at `x`, carried at the precision of `x`.
    pub fn eval_complex(&self, x: &Complex) -> Complex {
        let prec = x.prec();
        let mut acc = Complex::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Reduction modulo `q^m − 1`; the result has degree `< m`.
    pub fn fold_cyclic(&self, m: usize) -> IntPoly {
        assert!(m >= 1, "fold modulus must be positive");
        if self.coeffs.len() <= m {
            return self.clone();
        }
        let mut out = vec![Integer::new(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                out[i % m] += c;
            }
        }
        IntPoly::new(out)
    }

    /// Quotient and remainder on division by a monic polynomial.
    pub fn div_rem_monic(&self, divisor: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (IntPoly::default(), self.clone());
        }
        let low: Vec<(usize, &Integer)> =
            divisor.coeffs[..dd].iter().enumerate().filter(|(_, c)| **c != 0).collect();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Integer::new(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            if rem[k] == 0 {
                continue;
            }
            let c = std::mem::take(&mut rem[k]);
            for &(i, g) in &low {
                rem[k - dd + i] -= &c * g;
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        (IntPoly::new(quot), IntPoly::new(rem))
    }

    /// Remainder on division by a monic polynomial.
    pub fn rem_monic(&self, divisor: &IntPoly) -> IntPoly {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return self.clone();
        }
        let low: Vec<(usize, &Integer)> =
            divisor.coeffs[..dd].iter().enumerate().filter(|(_, c)| **c != 0).collect();
        let mut rem = self.coeffs.clone();
        for k in (dd..rem.len()).rev() {
            if rem[k] == 0 {
                continue;
            }
            let c = std::mem::take(&mut rem[k]);
            for &(i, g) in &low {
                rem[k - dd + i] -= &c * g;
            }
        }
        rem.truncate(dd);
        IntPoly::new(rem)
    }

    pub fn pow(&self, mut e: u32) -> IntPoly {
        let mut base = self.clone();
        let mut acc = IntPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

fn add_into(acc: &mut Vec<Integer>, other: &[Integer]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), Integer::new());
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

fn sub_into(acc: &mut Vec<Integer>, other: &[Integer]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), Integer::new());
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a -= b;
    }
}

fn mul_sparse(sparse: &[Integer], dense: &[Integer]) -> Vec<Integer> {
    let mut out = vec![Integer::new(); sparse.len() + dense.len() - 1];
    for (i, c) in sparse.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        if *c == 1 {
            for (j, d) in dense.iter().enumerate() {
                out[i + j] += d;
            }
        } else {
            for (j, d) in dense.iter().enumerate() {
                out[i + j] += c * d;
            }
        }
    }
    out
}

fn mul_schoolbook(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let mut out = vec![Integer::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Splits into (positive part, magnitudes of the negative part).
fn split_sign(v: &[Integer]) -> (Vec<Integer>, Option<Vec<Integer>>) {
    if v.iter().all(|c| *c >= 0) {
        return (v.to_vec(), None);
    }
    let mut pos = Vec::with_capacity(v.len());
    let mut neg = Vec::with_capacity(v.len());
    for c in v {
        if *c >= 0 {
            pos.push(c.clone());
            neg.push(Integer::new());
        } else {
            pos.push(Integer::new());
            neg.push(Integer::from(-c));
        }
    }
    (pos, Some(neg))
}

fn pack(v: &[Integer], slot_limbs: usize) -> Integer {
    let mut limbs = vec![0u64; v.len() * slot_limbs];
    for (i, c) in v.iter().enumerate() {
        if *c != 0 {
            c.write_digits(&mut limbs[i * slot_limbs..(i + 1) * slot_limbs], Order::Lsf);
        }
    }
    Integer::from_digits(&limbs, Order::Lsf)
}

fn unpack(x: &Integer, len: usize, slot_limbs: usize) -> Vec<Integer> {
    let limbs = x.to_digits::<u64>(Order::Lsf);
    (0..len)
        .map(|i| {
            let lo = (i * slot_limbs).min(limbs.len());
            let hi = ((i + 1) * slot_limbs).min(limbs.len());
            Integer::from_digits(&limbs[lo..hi], Order::Lsf)
        })
        .collect()
}

/// Product of two nonnegative coefficient vectors via a single big-integer product.
fn kronecker_unsigned(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let bits_a = a.iter().map(|c| c.significant_bits()).max().unwrap_or(0) as usize;
    let bits_b = b.iter().map(|c| c.significant_bits()).max().unwrap_or(0) as usize;
    let len_bits = (usize::BITS - a.len().min(b.len()).leading_zeros()) as usize;
    let slot_bits = bits_a + bits_b + len_bits + 1;
    let slot_limbs = slot_bits.div_ceil(64);
    let pa = pack(a, slot_limbs);
    let pb = pack(b, slot_limbs);
    let prod = Integer::from(&pa * &pb);
    unpack(&prod, a.len() + b.len() - 1, slot_limbs)
}

fn mul_kronecker(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let (ap, an) = split_sign(a);
    let (bp, bn) = split_sign(b);
    let mut out = kronecker_unsigned(&ap, &bp);
    if let Some(an) = &an {
        sub_into(&mut out, &kronecker_unsigned(an, &bp));
        if let Some(bn) = &bn {
            add_into(&mut out, &kronecker_unsigned(an, bn));
        }
    }
    if let Some(bn) = &bn {
        sub_into(&mut out, &kronecker_unsigned(&ap, bn));
    }
    out
}

fn mul_coeffs(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let ta = a.iter().filter(|c| **c != 0).count();
    let tb = b.iter().filter(|c| **c != 0).count();
    if ta <= SPARSE_TERMS || tb <= SPARSE_TERMS {
        return if ta <= tb { mul_sparse(a, b) } else { mul_sparse(b, a) };
    }
    if a.len().min(b.len()) < KRONECKER_MIN_LEN {
        return mul_schoolbook(a, b);
    }
    mul_kronecker(a, b)
}

impl<'a> Add<&'a IntPoly> for &'a IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let mut coeffs = self.coeffs.clone();
        add_into(&mut coeffs, &rhs.coeffs);
        IntPoly::new(coeffs)
    }
}

impl Add for IntPoly {
    type Output = IntPoly;
    fn add(mut self, rhs: IntPoly) -> IntPoly {
        add_into(&mut self.coeffs, &rhs.coeffs);
        trim(&mut self.coeffs);
        self
    }
}

impl<'a> Sub<&'a IntPoly> for &'a IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let mut coeffs = self.coeffs.clone();
        sub_into(&mut coeffs, &rhs.coeffs);
        IntPoly::new(coeffs)
    }
}

impl Sub for IntPoly {
    type Output = IntPoly;
    fn sub(mut self, rhs: IntPoly) -> IntPoly {
        sub_into(&mut self.coeffs, &rhs.coeffs);
        trim(&mut self.coeffs);
        self
    }
}

impl<'a> Mul<&'a IntPoly> for &'a IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::new(mul_coeffs(&self.coeffs, &rhs.coeffs))
    }
}

impl Mul for IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: IntPoly) -> IntPoly {
        &self * &rhs
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly { coeffs: self.coeffs.iter().map(|c| Integer::from(-c)).collect() }
    }
}

impl Neg for IntPoly {
    type Output = IntPoly;
    fn neg(mut self) -> IntPoly {
        for c in &mut self.coeffs {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Zero for IntPoly {
    fn zero() -> Self {
        IntPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for IntPoly {
    fn one() -> Self {
        IntPoly::constant(1)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.terms() {
            let neg = *c < 0;
            let mag = Integer::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (i, mag == 1) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}q")?,
                (_, true) => write!(f, "q^{i}")?,
                (_, false) => write!(f, "{mag}q^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn normalization_trims_zeros() {
        let z = p(&[0, 0, 0]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert_eq!(p(&[1, 2, 0]).degree(), Some(1));
    }

    #[test]
    fn small_products() {
        assert_eq!(&p(&[1, 1]) * &p(&[1, 0, 1]), p(&[1, 1, 1, 1]));
        assert_eq!(&IntPoly::q_pow(3) * &IntPoly::q_pow(5), IntPoly::q_pow(8));
        let a = p(&[3, -1, 4]);
        assert_eq!(&a + &IntPoly::zero(), a);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn kronecker_matches_schoolbook_with_signs() {
        let a: Vec<Integer> = (0..90).map(|i| Integer::from((i * 7919 % 101) as i64 - 50)).collect();
        let b: Vec<Integer> =
            (0..70).map(|i| Integer::from(i as i64 - 31) * Integer::from(1u64 << 40)).collect();
        assert_eq!(mul_kronecker(&a, &b), mul_schoolbook(&a, &b));
        assert_eq!(mul_kronecker(&b, &b), mul_schoolbook(&b, &b));
    }

    #[test]
    fn weighted_sums() {
        assert_eq!(p(&[1, 0, 1]).weighted_coeff_sum(), 2);
        assert_eq!(IntPoly::constant(7).weighted_coeff_sum(), 0);
        assert_eq!(IntPoly::zero().weighted_coeff_sum(), 0);
        assert_eq!(p(&[0, 1, 0, 2]).weighted_coeff_sum(), 7);
        assert_eq!(p(&[0, -3, 0, 2]).weighted_coeff_sum(), 9);
    }

    #[test]
    fn monic_division_round_trips() {
        let num = p(&[5, -3, 0, 2, 7, 1]);
        let den = p(&[1, 1, 1]);
        let (q, r) = num.div_rem_monic(&den);
        assert!(r.degree().map_or(true, |d| d < 2));
        assert_eq!(&(&q * &den) + &r, num);
        assert_eq!(num.rem_monic(&den), r);
    }

    #[test]
    fn cyclic_fold_sums_residue_classes() {
        assert_eq!(p(&[1, 2, 3, 4, 5]).fold_cyclic(2), p(&[9, 6]));
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(p(&[1, -1, 0, 2]).to_string(), "1 - q + 2q^3");
        assert_eq!(IntPoly::zero().to_string(), "0");
    }
}
