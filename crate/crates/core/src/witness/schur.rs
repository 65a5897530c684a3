//! Schur's closed form for `K` at roots of unity, against the periodic-limit evaluation.

use rug::{Complex, Float};

use super::WitnessError;
use crate::arith::{gcd, legendre};
use crate::cf_engine::{periodic_limit, MobiusClass, PeriodicLimit};
use crate::families::{make_family, CycloFamily, FamilyName};
use crate::numeric::{abs, pow2, root_of_unity};

#[derive(Debug, Clone)]
pub enum SchurValue {
    Diverges,
    Value(Complex),
}

impl SchurValue {
    pub fn value(&self) -> Option<&Complex> {
        match self {
            SchurValue::Value(z) => Some(z),
            SchurValue::Diverges => None,
        }
    }
}

/// `λ·x^{(1−λσm)/5}·K(λ)` at `x = exp(2πik/m)`.
pub fn schur_value(m: u64, k: i64, precision: u32) -> Result<SchurValue, WitnessError> {
    assert!(m >= 1, "m must be positive");
    if gcd(k.unsigned_abs(), m) != 1 {
        return Err(WitnessError::NotCoprime { k, m });
    }
    if m % 5 == 0 {
        return Ok(SchurValue::Diverges);
    }
    let lambda = legendre(m as i64, 5) as i64;
    let sigma = (m % 5) as i64;
    let num = 1 - lambda * sigma * m as i64;
    if num % 5 != 0 {
        return Err(WitnessError::NonIntegerExponent(m));
    }
    let e = num / 5;
    let phi = (Float::with_val(precision, 5).sqrt() + 1u32) / 2u32;
    let k_lambda = if lambda == 1 { phi } else { Float::with_val(precision, phi.recip_ref()) };
    let x_e = root_of_unity((k * e).rem_euclid(m as i64), m, precision);
    Ok(SchurValue::Value(x_e * k_lambda * lambda))
}

#[derive(Debug, Clone)]
pub struct SchurCheck {
    pub m: u64,
    pub k: i64,
    pub formula: SchurValue,
    pub periodic: PeriodicLimit,
    /// `|periodic − formula|` when both are finite.
    pub difference: Option<Float>,
    pub agrees: bool,
}

fn check_at(m: u64, k: i64, precision: u32) -> Result<SchurCheck, WitnessError> {
    let formula = schur_value(m, k, precision)?;
    let family = CycloFamily::new(make_family(FamilyName::K), m);
    let periodic = periodic_limit(&family, m as usize, k, precision)?;
    let tol = pow2(-(precision as i32) / 2, precision);
    let (difference, agrees) = match (&formula, periodic.limit.as_ref().and_then(|l| l.finite())) {
        (SchurValue::Value(f), Some(p)) => {
            let d = abs(&Complex::with_val(precision, p - f));
            let ok = d <= tol;
            (Some(d), ok)
        }
        (SchurValue::Diverges, None) => (None, true),
        _ => (None, false),
    };
    Ok(SchurCheck { m, k, formula, periodic, difference, agrees })
}

/// Compares at `k = 1`.
pub fn schur_check(m: u64, precision: u32) -> Result<SchurCheck, WitnessError> {
    check_at(m, 1, precision)
}

/// Every primitive root `k` of order `m`.
pub fn schur_k_sweep(m: u64, precision: u32) -> Result<Vec<SchurCheck>, WitnessError> {
    (1..=m.max(1)).filter(|&k| gcd(k, m) == 1).map(|k| check_at(m, k as i64, precision)).collect()
}

impl SchurCheck {
    pub fn class(&self) -> MobiusClass {
        self.periodic.class
    }
}
