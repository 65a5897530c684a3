//! Regular continued fractions `[0; e₁, e₂, …]` with exact convergents and tail bounds.
//!
//! Partial quotients may be towers of twos too large to write down; those support only
//! comparisons and log-scale error bounds.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

/// Largest bit length materialized eagerly.
pub const MATERIALIZE_BITS: u64 = 1 << 20;

/// `tower(0, top) = top`, `tower(k, top) = 2^{tower(k−1, top)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerTower {
    pub twos: u32,
    pub top: u64,
}

impl PowerTower {
    pub fn new(twos: u32, top: u64) -> Self {
        assert!(twos >= 1 && top >= 1, "a power tower needs at least one two and a positive top");
        PowerTower { twos, top }
    }

    /// `log₂` of the value: one fewer two.
    pub fn log2(&self) -> Quotient {
        Quotient::from_tower(self.twos - 1, self.top)
    }

    /// Applies `log₂` `k` times (with `k < twos`).
    pub fn iterated_log2(&self, k: u32) -> Quotient {
        assert!(k <= self.twos, "cannot take more logarithms than there are twos");
        Quotient::from_tower(self.twos - k, self.top)
    }

    /// The value, if it has at most `max_bits` bits.
    pub fn materialize(&self, max_bits: u64) -> Option<Integer> {
        tower_value(self.twos, self.top, max_bits)
    }

    pub fn cmp_integer(&self, n: &Integer) -> Ordering {
        match self.materialize(n.significant_bits() as u64 + 1) {
            Some(v) => v.cmp(n),
            None => Ordering::Greater,
        }
    }
}

impl fmt::Display for PowerTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for _ in 0..self.twos {
            write!(f, "2^")?;
        }
        write!(f, "{}", self.top)
    }
}

fn tower_value(twos: u32, top: u64, max_bits: u64) -> Option<Integer> {
    if twos == 0 {
        return Some(Integer::from(top));
    }
    let exp = tower_value(twos - 1, top, 64)?;
    let e = exp.to_u64()?;
    if e >= max_bits {
        return None;
    }
    Some(Integer::from(1) << u32::try_from(e).ok()?)
}

/// A partial quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Quotient {
    Int(Integer),
    Tower(PowerTower),
}

impl Quotient {
    /// Materialized when it fits in [`MATERIALIZE_BITS`].
    pub fn from_tower(twos: u32, top: u64) -> Quotient {
        if twos == 0 {
            return Quotient::Int(Integer::from(top));
        }
        let t = PowerTower::new(twos, top);
        match t.materialize(MATERIALIZE_BITS) {
            Some(v) => Quotient::Int(v),
            None => Quotient::Tower(t),
        }
    }

    pub fn as_integer(&self) -> Option<&Integer> {
        match self {
            Quotient::Int(n) => Some(n),
            Quotient::Tower(_) => None,
        }
    }

    pub fn cmp_integer(&self, n: &Integer) -> Ordering {
        match self {
            Quotient::Int(v) => v.cmp(n),
            Quotient::Tower(t) => t.cmp_integer(n),
        }
    }

    /// `⌊log₂⌋`, as a quotient again (towers lose one level).
    pub fn floor_log2(&self) -> Quotient {
        match self {
            Quotient::Int(v) => Quotient::Int(Integer::from(v.significant_bits().saturating_sub(1))),
            Quotient::Tower(t) => t.log2(),
        }
    }
}

impl fmt::Display for Quotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quotient::Int(v) => write!(f, "{v}"),
            Quotient::Tower(t) => write!(f, "{t}"),
        }
    }
}

impl From<Integer> for Quotient {
    fn from(v: Integer) -> Self {
        Quotient::Int(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RcfError {
    #[error("partial quotient e_{index} is a power tower and cannot be materialized")]
    TowerQuotient { index: usize },
    #[error("partial quotients must be at least 1 (e_{index} is not)")]
    ZeroQuotient { index: usize },
    #[error("index {index} exceeds the {available} known partial quotients")]
    IndexOutOfRange { index: usize, available: usize },
    #[error("known partial quotients cannot certify the requested accuracy")]
    Insufficient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub c: Integer,
    pub d: Integer,
}

impl Convergent {
    pub fn to_rational(&self) -> Rational {
        Rational::from((self.c.clone(), self.d.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegCF {
    /// `quotients[i−1] = eᵢ`.
    pub quotients: Vec<Quotient>,
    /// The listed quotients are the entire expansion.
    pub terminates: bool,
}

impl RegCF {
    pub fn new(quotients: Vec<Quotient>, terminates: bool) -> Result<Self, RcfError> {
        for (i, q) in quotients.iter().enumerate() {
            if q.cmp_integer(&Integer::from(1)) == Ordering::Less {
                return Err(RcfError::ZeroQuotient { index: i + 1 });
            }
        }
        Ok(RegCF { quotients, terminates })
    }

    pub fn from_integers(es: &[u64], terminates: bool) -> Result<Self, RcfError> {
        Self::new(es.iter().map(|&e| Quotient::Int(Integer::from(e))).collect(), terminates)
    }

    /// `eᵢ`, 1-based.
    pub fn quotient(&self, i: usize) -> Option<&Quotient> {
        i.checked_sub(1).and_then(|k| self.quotients.get(k))
    }

    /// Number of leading quotients that are plain integers.
    pub fn materialized_len(&self) -> usize {
        self.quotients.iter().take_while(|q| matches!(q, Quotient::Int(_))).count()
    }
}

/// `cᵢ/dᵢ` for `i = 0..=k`.
pub fn convergents(r: &RegCF, k: usize) -> Result<Vec<Convergent>, RcfError> {
    if k > r.quotients.len() {
        return Err(RcfError::IndexOutOfRange { index: k, available: r.quotients.len() });
    }
    let (mut c2, mut c1) = (Integer::from(1), Integer::new());
    let (mut d2, mut d1) = (Integer::new(), Integer::from(1));
    let mut out = vec![Convergent { c: c1.clone(), d: d1.clone() }];
    for i in 1..=k {
        let e = r.quotient(i).unwrap().as_integer().ok_or(RcfError::TowerQuotient { index: i })?;
        let c = Integer::from(e * &c1) + &c2;
        let d = Integer::from(e * &d1) + &d2;
        debug_assert_eq!(Integer::from(c.gcd_ref(&d)), 1);
        c2 = std::mem::replace(&mut c1, c.clone());
        d2 = std::mem::replace(&mut d1, d.clone());
        out.push(Convergent { c, d });
    }
    Ok(out)
}

/// Upper bound on `|t − cᵢ/dᵢ|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErrorBound {
    /// `t = cᵢ/dᵢ` exactly.
    Zero,
    /// `|t − cᵢ/dᵢ| < b`.
    Below(Rational),
    /// `|t − cᵢ/dᵢ| < 2^{−x}`.
    BelowPow2(Quotient),
}

impl ErrorBound {
    /// Whether the bound is at most `eps`.
    pub fn certifies(&self, eps: &Rational) -> bool {
        match self {
            ErrorBound::Zero => true,
            ErrorBound::Below(b) => b <= eps,
            ErrorBound::BelowPow2(x) => {
                // 2^{−x} ≤ eps  ⟸  x ≥ ⌈log₂(1/eps)⌉
                let inv = Rational::from(eps.recip_ref());
                let need = Integer::from(inv.ceil_ref()).significant_bits();
                x.cmp_integer(&Integer::from(need)) != Ordering::Less
            }
        }
    }

    pub fn certifies_pow2(&self, bits: u32) -> bool {
        self.certifies(&Rational::from((Integer::from(1), Integer::from(1) << bits)))
    }
}

/// `1/(dᵢ²·e_{i+1})`, or `1/dᵢ²` when `e_{i+1}` is not known.
pub fn tail_error_bound(r: &RegCF, i: usize) -> Result<ErrorBound, RcfError> {
    if r.terminates && i == r.quotients.len() {
        return Ok(ErrorBound::Zero);
    }
    let conv = convergents(r, i)?;
    let d = &conv[i].d;
    let d2 = Integer::from(d.square_ref());
    match r.quotient(i + 1) {
        Some(Quotient::Int(e)) => Ok(ErrorBound::Below(Rational::from((Integer::from(1), d2 * e)))),
        Some(Quotient::Tower(t)) => {
            let mut x = t.log2();
            if let Quotient::Int(v) = &mut x {
                *v += 2 * (d.significant_bits() - 1);
            }
            Ok(ErrorBound::BelowPow2(x))
        }
        None => Ok(ErrorBound::Below(Rational::from((Integer::from(1), d2)))),
    }
}

/// The deepest materializable convergent with its certified bound.
pub fn deepest(r: &RegCF) -> Result<(Convergent, ErrorBound), RcfError> {
    let k = r.materialized_len();
    let conv = convergents(r, k)?.pop().expect("index 0 is always present");
    Ok((conv, tail_error_bound(r, k)?))
}

/// `t` to `precision` bits; the result is within `2^{−precision}` plus half an ulp.
pub fn value(r: &RegCF, precision: u32) -> Result<Float, RcfError> {
    let (conv, bound) = deepest(r)?;
    if !bound.certifies_pow2(precision) {
        return Err(RcfError::Insufficient);
    }
    Ok(Float::with_val(precision, conv.to_rational()))
}

/// `eᵢ` = a tower of `i` twos with `i` on top, for `i = 1..=levels`.
pub fn tower_number(levels: usize) -> RegCF {
    assert!(levels >= 1, "need at least one level");
    let qs = (1..=levels).map(|i| Quotient::from_tower(i as u32, i as u64)).collect();
    RegCF { quotients: qs, terminates: false }
}

/// Correctly rounded decimal expansion with `n_digits` after the point.
pub fn decimal_digits(r: &RegCF, n_digits: usize) -> Result<String, RcfError> {
    let (conv, bound) = deepest(r)?;
    let eps = Rational::from((Integer::from(1), Integer::from(10).pow(n_digits as u32 + 2)));
    if !bound.certifies(&eps) {
        return Err(RcfError::Insufficient);
    }
    let slack = if bound == ErrorBound::Zero { Rational::new() } else { eps };
    let scale = Integer::from(10).pow(n_digits as u32);
    let x = conv.to_rational() * &scale;
    let slack = slack * &scale;
    let round = |v: Rational| Integer::from((v + Rational::from((1, 2))).floor_ref());
    let lo = round(Rational::from(&x - &slack));
    let hi = round(Rational::from(&x + &slack));
    if lo != hi {
        return Err(RcfError::Insufficient);
    }
    let (int, frac) = lo.div_rem_euc(scale);
    Ok(format!("{int}.{:0>width$}", frac.to_string(), width = n_digits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_convergents() {
        let r = RegCF::from_integers(&[2, 16], true).unwrap();
        let c = convergents(&r, 2).unwrap();
        assert_eq!((c[2].c.clone(), c[2].d.clone()), (Integer::from(16), Integer::from(33)));
        assert!(matches!(RegCF::from_integers(&[2, 0], true), Err(RcfError::ZeroQuotient { index: 2 })));
    }

    #[test]
    fn fibonacci_ratios() {
        let r = RegCF::from_integers(&[1; 20], false).unwrap();
        let c = convergents(&r, 20).unwrap();
        let (mut f0, mut f1) = (Integer::from(0), Integer::from(1));
        for conv in &c {
            assert_eq!(conv.c, f0);
            assert_eq!(conv.d, f1);
            let f2 = Integer::from(&f0 + &f1);
            f0 = std::mem::replace(&mut f1, f2);
        }
    }

    #[test]
    fn tower_quotients() {
        let t = tower_number(4);
        assert_eq!(t.quotients[0], Quotient::Int(Integer::from(2)));
        assert_eq!(t.quotients[1], Quotient::Int(Integer::from(16)));
        assert_eq!(t.quotients[2], Quotient::Int(Integer::from(1) << 256u32));
        assert_eq!(t.quotients[3], Quotient::Tower(PowerTower { twos: 4, top: 4 }));
        let d3 = convergents(&t, 3).unwrap()[3].d.clone();
        assert_eq!(d3, Integer::from(33) * (Integer::from(1) << 256u32) + 2);
        assert!(matches!(convergents(&t, 4), Err(RcfError::TowerQuotient { index: 4 })));
    }

    #[test]
    fn tower_log_bound() {
        let t = tower_number(4);
        let ErrorBound::BelowPow2(Quotient::Int(x)) = tail_error_bound(&t, 3).unwrap() else {
            panic!("expected a materialized exponent");
        };
        // 2^{−x} with x > 2^65536 > 70·log₂10
        assert!(x > Integer::from(1) << 65536u32);
        assert!(x.significant_bits() > 233);
        let e5 = PowerTower::new(5, 5);
        assert_eq!(e5.cmp_integer(&(Integer::from(1) << 100000u32)), Ordering::Greater);
        assert_eq!(PowerTower::new(2, 2).cmp_integer(&Integer::from(16)), Ordering::Equal);
        assert_eq!(format!("{}", PowerTower::new(3, 3)), "2^2^2^3");
    }

    #[test]
    fn bounds() {
        let r = RegCF::from_integers(&[2, 16, 3], false).unwrap();
        let b = tail_error_bound(&r, 1).unwrap();
        assert_eq!(b, ErrorBound::Below(Rational::from((1, 64))));
        let err = Rational::from((1, 2)) - Rational::from((16, 33));
        assert!(err < Rational::from((1, 64)));
        let ones = RegCF::from_integers(&[1, 1, 1, 1], false).unwrap();
        let c = convergents(&ones, 2).unwrap();
        assert_eq!(
            tail_error_bound(&ones, 2).unwrap(),
            ErrorBound::Below(Rational::from((Integer::from(1), Integer::from(c[2].d.square_ref()))))
        );
    }

    #[test]
    fn values_and_digits() {
        let half = RegCF::from_integers(&[2], true).unwrap();
        assert_eq!(value(&half, 64).unwrap(), 0.5);
        assert_eq!(decimal_digits(&half, 5).unwrap(), "0.50000");
        let ones = RegCF::from_integers(&[1; 120], false).unwrap();
        let v = value(&ones, 100).unwrap();
        let phi_inv = (5f64.sqrt() - 1.0) / 2.0;
        assert!((v.to_f64() - phi_inv).abs() < 1e-15);
        assert!(matches!(value(&ones, 400), Err(RcfError::Insufficient)));
        let t = tower_number(4);
        assert_eq!(decimal_digits(&t, 24).unwrap(), "0.484848484848484848484848");
    }

    #[test]
    fn determinant_and_enclosure() {
        let t = tower_number(4);
        let c = convergents(&t, 3).unwrap();
        let v = value(&t, 2000).unwrap();
        for i in 1..c.len() {
            let det = Integer::from(&c[i].c * &c[i - 1].d) - Integer::from(&c[i - 1].c * &c[i].d);
            assert_eq!(det, if i % 2 == 1 { 1 } else { -1 });
        }
        let exact = c[3].to_rational();
        assert!(c[2].to_rational() < exact);
        assert!(Float::with_val(2000, c[1].to_rational()) > v);
    }
}
