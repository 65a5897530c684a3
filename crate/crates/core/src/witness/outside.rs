//! The limits of the even and odd approximants of `K` outside the unit circle.

use rug::{Complex, Float, Rational};

use super::WitnessError;
use crate::cf_engine::evaluate_numeric;
use crate::families::{make_family, FamilyAt, FamilyName};
use crate::numeric::{abs, Point};

/// Approximants used for each inner evaluation.
const INNER_TERMS: usize = 400;

#[derive(Debug, Clone)]
pub struct OutsideReport {
    pub q: Point,
    pub j_max: usize,
    pub precision: u32,
    /// `K_{2j_max+1}(q)` and `K_{2j_max}(q)`.
    pub odd: Complex,
    pub even: Complex,
    /// `1/K(−1/q)`.
    pub inv_k_neg_inv: Complex,
    /// `K(1/q⁴)`.
    pub k_inv_fourth: Complex,
    /// `|K_odd − 1/K(−1/q)|` and `|K_even − K(1/q⁴)/q|`.
    pub odd_vs_inv_k_neg_inv: Float,
    pub even_vs_k_inv_fourth_over_q: Float,
    /// `|K_even − 1/K(−1/q)|` and `|K_odd − q·K(1/q⁴)|`.
    pub even_vs_inv_k_neg_inv: Float,
    pub odd_vs_q_k_inv_fourth: Float,
    /// All numeric runs agreed at `P` and `2P` and the inner ones settled.
    pub reliable: bool,
}

fn k_at(point: Point, n: usize, precision: u32) -> Result<(Complex, Complex, bool), WitnessError> {
    let run = evaluate_numeric(&FamilyAt::new(make_family(FamilyName::K), point), n, precision)?;
    let last = run.approximants[n].clone();
    let prev = run.approximants[n - 1].clone();
    let ok = !run.any_unreliable() && last.is_some() && prev.is_some();
    let nan = || Complex::with_val(precision, (f64::NAN, f64::NAN));
    Ok((last.unwrap_or_else(nan), prev.unwrap_or_else(nan), ok))
}

/// Compares both parity subsequences of `K` at `q` against the two inside-circle values.
pub fn outside_circle_check(q: &Point, j_max: usize, precision: u32) -> Result<OutsideReport, WitnessError> {
    if q.modulus_squared() <= Rational::from((121, 100)) || matches!(q, Point::Circle(_)) {
        return Err(WitnessError::MarginViolation);
    }
    let j_max = j_max.max(1);
    let p = precision;
    let (odd, even, outer_ok) = k_at(q.clone(), 2 * j_max + 1, p)?;
    let (k_neg_inv, k_neg_inv_prev, ok1) = k_at(q.recip().neg(), INNER_TERMS, p)?;
    let (k_inv_fourth, k_inv_fourth_prev, ok2) = k_at(q.pow(4).recip(), INNER_TERMS, p)?;
    let settled = abs(&Complex::with_val(p, &k_neg_inv - &k_neg_inv_prev)) < Float::with_val(p, 1e-60)
        && abs(&Complex::with_val(p, &k_inv_fourth - &k_inv_fourth_prev)) < Float::with_val(p, 1e-60);

    let qv = q.value(p);
    let inv_k_neg_inv = Complex::with_val(p, k_neg_inv.recip_ref());
    let over_q = Complex::with_val(p, &k_inv_fourth / &qv);
    let times_q = Complex::with_val(p, &k_inv_fourth * &qv);
    let dist = |a: &Complex, b: &Complex| abs(&Complex::with_val(p, a - b));
    Ok(OutsideReport {
        q: q.clone(),
        j_max,
        precision,
        odd_vs_inv_k_neg_inv: dist(&odd, &inv_k_neg_inv),
        even_vs_k_inv_fourth_over_q: dist(&even, &over_q),
        even_vs_inv_k_neg_inv: dist(&even, &inv_k_neg_inv),
        odd_vs_q_k_inv_fourth: dist(&odd, &times_q),
        odd,
        even,
        inv_k_neg_inv,
        k_inv_fourth,
        reliable: outer_ok && ok1 && ok2 && settled,
    })
}
