//! Cyclotomic polynomials and the quotient rings `ℤ[q]/Φₘ(q)`.
//!
//! Two elements of `ℤ[q]/Φₘ` are equal exactly when the underlying polynomials
//! agree at every primitive `m`-th root of unity, so every "for all primitive
//! roots" statement becomes a single equality of reduced representatives.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use rug::{Complex, Integer};

use super::intpoly::IntPoly;
use super::PolyError;
use crate::arith::{divisors, euler_phi, gcd};
use crate::numeric::root_of_unity;

/// `Φₘ` together with the data needed to reduce modulo it.
pub struct CyclotomicModulus {
    order: u64,
    phi: IntPoly,
    powers: OnceLock<Vec<IntPoly>>,
}

impl CyclotomicModulus {
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn poly(&self) -> &IntPoly {
        &self.phi
    }

    /// `deg Φₘ = φ(m)`.
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    /// Reduces an arbitrary polynomial to its representative of degree `< φ(m)`.
    pub fn reduce_poly(&self, p: &IntPoly) -> IntPoly {
        p.fold_cyclic(self.order as usize).rem_monic(&self.phi)
    }

    /// `q^k mod Φₘ` for `0 ≤ k < m`.
    pub fn powers(&self) -> &[IntPoly] {
        self.powers.get_or_init(|| {
            let m = self.order as usize;
            let mut out = Vec::with_capacity(m);
            let mut cur = IntPoly::constant(1).rem_monic(&self.phi);
            for _ in 0..m {
                let next = cur.shift(1).rem_monic(&self.phi);
                out.push(std::mem::replace(&mut cur, next));
            }
            out
        })
    }
}

impl fmt::Debug for CyclotomicModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phi_{}", self.order)
    }
}

fn cache() -> &'static Mutex<HashMap<u64, Arc<CyclotomicModulus>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CyclotomicModulus>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The shared modulus `Φₘ`, computed once per order.
pub fn modulus(m: u64) -> Arc<CyclotomicModulus> {
    assert!(m >= 1, "cyclotomic order must be positive");
    if let Some(hit) = cache().lock().expect("cyclotomic cache poisoned").get(&m) {
        return Arc::clone(hit);
    }
    // q^m − 1 divided by the product of Φ_d over the proper divisors of m.
    let mut divisor_product = IntPoly::constant(1);
    for d in divisors(m) {
        if d < m {
            divisor_product = &divisor_product * modulus(d).poly();
        }
    }
    let target = &IntPoly::q_pow(m as usize) - &IntPoly::constant(1);
    let (phi, rem) = target.div_rem_monic(&divisor_product);
    debug_assert!(rem.is_zero());
    debug_assert_eq!(phi.degree(), Some(euler_phi(m) as usize));
    let built = Arc::new(CyclotomicModulus { order: m, phi, powers: OnceLock::new() });
    let mut guard = cache().lock().expect("cyclotomic cache poisoned");
    Arc::clone(guard.entry(m).or_insert(built))
}

/// `Φₘ(q)`.
pub fn cyclotomic_poly(m: u64) -> IntPoly {
    modulus(m).poly().clone()
}

/// An element of `ℤ[q]/Φₘ(q)` with a fully reduced representative.
#[derive(Clone)]
pub struct CycloElem {
    modulus: Arc<CyclotomicModulus>,
    rep: IntPoly,
}

/// `p mod Φₘ`.
pub fn reduce(p: &IntPoly, m: u64) -> CycloElem {
    let modulus = modulus(m);
    let rep = modulus.reduce_poly(p);
    CycloElem { modulus, rep }
}

impl CycloElem {
    pub fn new(modulus: Arc<CyclotomicModulus>, p: &IntPoly) -> Self {
        let rep = modulus.reduce_poly(p);
        CycloElem { modulus, rep }
    }

    pub fn from_int(modulus: Arc<CyclotomicModulus>, c: impl Into<Integer>) -> Self {
        let p = IntPoly::constant(c);
        Self::new(modulus, &p)
    }

    pub fn zero(m: u64) -> Self {
        CycloElem { modulus: modulus(m), rep: IntPoly::default() }
    }

    pub fn one(m: u64) -> Self {
        Self::from_int(modulus(m), 1)
    }

    /// `q^k`; negative exponents are taken modulo `m`.
    pub fn q_pow(modulus: Arc<CyclotomicModulus>, k: i64) -> Self {
        let idx = k.rem_euclid(modulus.order as i64) as usize;
        let rep = modulus.powers()[idx].clone();
        CycloElem { modulus, rep }
    }

    /// `Σ c·q^e`, using the cached power table.
    pub fn from_terms(modulus: Arc<CyclotomicModulus>, terms: &[(i64, u64)]) -> Self {
        let m = modulus.order;
        let mut acc = IntPoly::default();
        for &(c, e) in terms {
            let pw = &modulus.powers()[(e % m) as usize];
            acc = &acc + &pw.scale(&Integer::from(c));
        }
        CycloElem { modulus, rep: acc }
    }

    pub fn order(&self) -> u64 {
        self.modulus.order
    }

    pub fn modulus(&self) -> &Arc<CyclotomicModulus> {
        &self.modulus
    }

    pub fn rep(&self) -> &IntPoly {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rep.is_one()
    }

    fn check_same(&self, other: &CycloElem) {
        assert_eq!(
            self.modulus.order, other.modulus.order,
            "mixing cyclotomic orders {} and {}",
            self.modulus.order, other.modulus.order
        );
    }

    /// Complex conjugation `q ↦ q⁻¹`, an automorphism of the field.
    pub fn conj(&self) -> CycloElem {
        let m = self.modulus.order as usize;
        let mut coeffs = vec![Integer::new(); m];
        for (i, c) in self.rep.terms() {
            coeffs[(m - i % m) % m] += c;
        }
        CycloElem::new(Arc::clone(&self.modulus), &IntPoly::new(coeffs))
    }

    /// Value at `exp(2πik/m)`, evaluated by Horner's rule at `precision` bits.
    pub fn to_complex(&self, k: i64, precision: u32) -> Result<Complex, PolyError> {
        let m = self.modulus.order;
        if gcd(k.unsigned_abs(), m) != 1 {
            return Err(PolyError::NotCoprime { k, m });
        }
        if precision < 64 {
            return Err(PolyError::PrecisionTooLow(precision));
        }
        Ok(self.rep.eval_complex(&root_of_unity(k, m, precision)))
    }

    /// Finds `(c, K)` with `self ≡ c·q^K`, `0 ≤ K < m`, if such a normal form exists.
    pub fn as_scaled_monomial(&self) -> Option<(Integer, u64)> {
        if self.rep.is_zero() {
            return None;
        }
        for (k, pw) in self.modulus.powers().iter().enumerate() {
            if pw.len() != self.rep.len() {
                continue;
            }
            let (idx, lead) = match pw.terms().next() {
                Some(t) => t,
                None => continue,
            };
            let target = self.rep.coeff(idx);
            if !target.is_divisible(lead) {
                continue;
            }
            let c = Integer::from(target.div_exact_ref(lead));
            if pw.scale(&c) == self.rep {
                return Some((c, k as u64));
            }
        }
        None
    }

    pub fn pow(&self, mut e: u64) -> CycloElem {
        let mut base = self.clone();
        let mut acc = CycloElem::from_int(Arc::clone(&self.modulus), 1);
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

impl PartialEq for CycloElem {
    fn eq(&self, other: &Self) -> bool {
        self.modulus.order == other.modulus.order && self.rep == other.rep
    }
}

impl Eq for CycloElem {}

impl<'a> Add<&'a CycloElem> for &'a CycloElem {
    type Output = CycloElem;
    fn add(self, rhs: &CycloElem) -> CycloElem {
        self.check_same(rhs);
        CycloElem { modulus: Arc::clone(&self.modulus), rep: &self.rep + &rhs.rep }
    }
}

impl<'a> Sub<&'a CycloElem> for &'a CycloElem {
    type Output = CycloElem;
    fn sub(self, rhs: &CycloElem) -> CycloElem {
        self.check_same(rhs);
        CycloElem { modulus: Arc::clone(&self.modulus), rep: &self.rep - &rhs.rep }
    }
}

impl<'a> Mul<&'a CycloElem> for &'a CycloElem {
    type Output = CycloElem;
    fn mul(self, rhs: &CycloElem) -> CycloElem {
        self.check_same(rhs);
        if self.rep.is_one() {
            return rhs.clone();
        }
        if rhs.rep.is_one() {
            return self.clone();
        }
        let prod = &self.rep * &rhs.rep;
        CycloElem { modulus: Arc::clone(&self.modulus), rep: self.modulus.reduce_poly(&prod) }
    }
}

impl Neg for &CycloElem {
    type Output = CycloElem;
    fn neg(self) -> CycloElem {
        CycloElem { modulus: Arc::clone(&self.modulus), rep: -&self.rep }
    }
}

impl fmt::Debug for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] mod Phi_{}", self.rep, self.modulus.order)
    }
}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{abs, pow2};

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_poly(1), IntPoly::from_i64s(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2), IntPoly::from_i64s(&[1, 1]));
        assert_eq!(cyclotomic_poly(4), IntPoly::from_i64s(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(6), IntPoly::from_i64s(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(12), IntPoly::from_i64s(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn reduction_examples() {
        assert!(reduce(&IntPoly::q_pow(6), 6).is_one());
        assert!(reduce(&IntPoly::from_i64s(&[1, 1, 1]), 3).is_zero());
        assert!(reduce(&IntPoly::from_i64s(&[1, 1, 1, 1, 1]), 5).is_zero());
    }

    #[test]
    fn conjugation_inverts_q() {
        let m = modulus(7);
        let q = CycloElem::q_pow(Arc::clone(&m), 1);
        assert!((&q * &q.conj()).is_one());
        let x = CycloElem::from_terms(Arc::clone(&m), &[(3, 1), (-2, 5)]);
        assert_eq!(x.conj().conj(), x);
    }

    #[test]
    fn monomial_normal_form() {
        let m = modulus(9);
        let x = CycloElem::q_pow(Arc::clone(&m), 7);
        let y = &x * &CycloElem::from_int(Arc::clone(&m), -2);
        assert_eq!(y.as_scaled_monomial(), Some((Integer::from(-2), 7)));
        let z = CycloElem::from_terms(m, &[(1, 0), (1, 1)]);
        assert_eq!(z.as_scaled_monomial(), None);
    }

    #[test]
    fn to_complex_rejects_non_coprime() {
        let e = reduce(&IntPoly::q_pow(1), 6);
        assert!(matches!(e.to_complex(2, 128), Err(PolyError::NotCoprime { .. })));
        let i = reduce(&IntPoly::q_pow(1), 4).to_complex(1, 128).unwrap();
        let want = Complex::with_val(128, (0, 1));
        assert!(abs(&Complex::with_val(128, &i - &want)) < pow2(-100, 128));
    }
}
