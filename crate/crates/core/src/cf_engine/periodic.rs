//! Limits of continued fractions that are periodic at a root of unity.
//!
//! The period map `w ↦ t₁∘⋯∘t_p(w)` with `tₙ(w) = aₙ/(bₙ + w)` has matrix
//! `T = ∏ [[0, aₙ], [1, bₙ]]`, built exactly in `ℤ[q]/Φₘ`. Parabolic and real
//! trace²/det tests are decided exactly; only the final comparisons against 0 and
//! 4 are numeric.

use rug::{Complex, Float};

use super::{Approximants, CfCoeffs, CfError, CfRing};
use crate::numeric::{abs, pow2};
use crate::polyring::CycloElem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MobiusClass {
    Loxodromic,
    Parabolic,
    Elliptic,
}

impl MobiusClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MobiusClass::Loxodromic => "loxodromic",
            MobiusClass::Parabolic => "parabolic",
            MobiusClass::Elliptic => "elliptic",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Limit {
    Finite(Complex),
    Infinity,
}

impl Limit {
    pub fn finite(&self) -> Option<&Complex> {
        match self {
            Limit::Finite(z) => Some(z),
            Limit::Infinity => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PeriodicLimit {
    pub class: MobiusClass,
    pub period: usize,
    /// Period matrix `[[α, β], [γ, δ]]`, exact.
    pub matrix: [CycloElem; 4],
    pub trace: Complex,
    pub det: Complex,
    pub trace_sq_over_det: Complex,
    /// Residues `r` whose starting value sits on the repelling fixed point.
    pub pinned_residues: Vec<usize>,
    /// `Some` exactly when the approximants converge classically.
    pub limit: Option<Limit>,
}

impl PeriodicLimit {
    pub fn converges(&self) -> bool {
        self.limit.is_some()
    }
}

fn to_c(e: &CycloElem, k: i64, prec: u32) -> Result<Complex, CfError> {
    Ok(e.to_complex(k, prec)?)
}

/// Projective point `(x : y)` of the eigenvector for eigenvalue `lambda`.
fn eigenvector(m: &[Complex; 4], lambda: &Complex, prec: u32) -> (Complex, Complex) {
    let [alpha, beta, gamma, delta] = m;
    let v1 = (Complex::with_val(prec, lambda - delta), gamma.clone());
    let v2 = (beta.clone(), Complex::with_val(prec, lambda - alpha));
    let n1 = Float::with_val(prec, abs(&v1.0) + abs(&v1.1));
    let n2 = Float::with_val(prec, abs(&v2.0) + abs(&v2.1));
    if n1 >= n2 {
        v1
    } else {
        v2
    }
}

fn projective_value(b0: &Complex, v: &(Complex, Complex), prec: u32) -> Limit {
    let scale = Float::with_val(prec, abs(&v.0) + abs(&v.1));
    if abs(&v.1) <= pow2(-(prec as i32) / 2, prec) * scale {
        Limit::Infinity
    } else {
        let w = Complex::with_val(prec, &v.0 / &v.1);
        Limit::Finite(Complex::with_val(prec, b0 + &w))
    }
}

/// Classifies the period map at `q = exp(2πik/m)` and returns the classical limit if it exists.
pub fn periodic_limit<C>(c: &C, period: usize, k: i64, precision: u32) -> Result<PeriodicLimit, CfError>
where
    C: CfCoeffs<CycloElem> + ?Sized,
{
    if precision < 64 {
        return Err(CfError::PrecisionTooLow(precision));
    }
    assert!(period >= 1, "period must be positive");
    let b0 = c.b0();
    let one = b0.one_like();
    let zero = b0.zero_like();

    let mut coeffs = Vec::with_capacity(period);
    for n in 1..=period {
        let (a, b) = (c.a(n), c.b(n));
        if a.is_zero() {
            return Err(CfError::ZeroPartialNumerator { n });
        }
        if c.a(n + period) != a || c.b(n + period) != b {
            return Err(CfError::NotPeriodic { period, n });
        }
        coeffs.push((a, b));
    }

    // S_r = t₁⋯t_r = [[A_{r−1}, A_r], [B_{r−1}, B_r]]; S₀ = I.
    let (mut alpha, mut beta, mut gamma, mut delta) = (one.clone(), zero.clone(), zero, one);
    let mut starts = Vec::with_capacity(period);
    for (a, b) in &coeffs {
        starts.push((beta.clone(), delta.clone()));
        let nb = alpha.ring_mul(a).ring_add(&beta.ring_mul(b));
        let nd = gamma.ring_mul(a).ring_add(&delta.ring_mul(b));
        alpha = std::mem::replace(&mut beta, nb);
        gamma = std::mem::replace(&mut delta, nd);
    }
    let tr = &alpha + &delta;
    let det = &(&alpha * &delta) - &(&beta * &gamma);
    let tr_sq = &tr * &tr;
    let four_det = &det * &CycloElem::from_int(det.modulus().clone(), 4);
    let disc = &tr_sq - &four_det;

    let prec = precision;
    let tr_c = to_c(&tr, k, prec)?;
    let det_c = to_c(&det, k, prec)?;
    let x_c = Complex::with_val(prec, &Complex::with_val(prec, &tr_c * &tr_c) / &det_c);
    let mc = [to_c(&alpha, k, prec)?, to_c(&beta, k, prec)?, to_c(&gamma, k, prec)?, to_c(&delta, k, prec)?];
    let b0_c = to_c(&b0, k, prec)?;

    let class = if disc.is_zero() {
        MobiusClass::Parabolic
    } else {
        // x = tr²/det is real iff tr²·conj(det) is fixed by conjugation.
        let n = &tr_sq * &det.conj();
        if n.conj() != n {
            MobiusClass::Loxodromic
        } else {
            let x = x_c.real().clone();
            let tol = pow2(-(prec as i32) / 4, prec);
            let near_four = Float::with_val(prec, &x - 4u32).abs() < tol;
            let near_zero = !tr.is_zero() && Float::with_val(prec, x.abs_ref()) < tol;
            if near_four || near_zero {
                return Err(CfError::Boundary { precision });
            }
            if tr.is_zero() || (x > 0 && x < 4) {
                MobiusClass::Elliptic
            } else {
                MobiusClass::Loxodromic
            }
        }
    };

    let mut pinned = Vec::new();
    let limit = match class {
        MobiusClass::Elliptic => None,
        MobiusClass::Parabolic => {
            let half_tr = Complex::with_val(prec, &tr_c / 2u32);
            Some(projective_value(&b0_c, &eigenvector(&mc, &half_tr, prec), prec))
        }
        MobiusClass::Loxodromic => {
            let disc_c = to_c(&disc, k, prec)?;
            let s = disc_c.sqrt();
            let l1 = Complex::with_val(prec, &Complex::with_val(prec, &tr_c + &s) / 2u32);
            let l2 = Complex::with_val(prec, &Complex::with_val(prec, &tr_c - &s) / 2u32);
            let (attract, repel) = if abs(&l1) >= abs(&l2) { (l1, l2) } else { (l2, l1) };
            let v_att = eigenvector(&mc, &attract, prec);
            let v_rep = eigenvector(&mc, &repel, prec);
            let rep_norm = Float::with_val(prec, abs(&v_rep.0) + abs(&v_rep.1));
            let tol = pow2(-(prec as i32) / 4, prec);
            for (r, (a_r, b_r)) in starts.iter().enumerate() {
                let (a_c, b_c) = (to_c(a_r, k, prec)?, to_c(b_r, k, prec)?);
                let cross = Complex::with_val(
                    prec,
                    &Complex::with_val(prec, &a_c * &v_rep.1) - &Complex::with_val(prec, &b_c * &v_rep.0),
                );
                let start_norm = Float::with_val(prec, abs(&a_c) + abs(&b_c));
                if abs(&cross) <= Float::with_val(prec, &tol * &start_norm) * &rep_norm {
                    pinned.push(r);
                }
            }
            if pinned.is_empty() {
                Some(projective_value(&b0_c, &v_att, prec))
            } else {
                None
            }
        }
    };

    Ok(PeriodicLimit {
        class,
        period,
        matrix: [alpha, beta, gamma, delta],
        trace: tr_c,
        det: det_c,
        trace_sq_over_det: x_c,
        pinned_residues: pinned,
        limit,
    })
}

/// Value of a continued fraction cut off by its first vanishing partial numerator.
#[derive(Debug, Clone)]
pub struct TruncatedValue {
    /// Index `n` of the first `aₙ = 0`.
    pub zero_at: usize,
    pub value: Limit,
}

/// If some `aₙ` (`n ≤ n_limit`) vanishes, every later approximant equals `Pₙ₋₁/Qₙ₋₁`.
pub fn truncated_value<C>(
    c: &C,
    n_limit: usize,
    k: i64,
    precision: u32,
) -> Result<Option<TruncatedValue>, CfError>
where
    C: CfCoeffs<CycloElem> + ?Sized,
{
    let Some(zero_at) = (1..=n_limit).find(|&n| c.a(n).is_zero()) else {
        return Ok(None);
    };
    let s = Approximants::run(c, zero_at - 1);
    let value = if s.q_curr.is_zero() {
        Limit::Infinity
    } else {
        let p = to_c(&s.p_curr, k, precision)?;
        let q = to_c(&s.q_curr, k, precision)?;
        Limit::Finite(Complex::with_val(precision, &p / &q))
    };
    Ok(Some(TruncatedValue { zero_at, value }))
}
