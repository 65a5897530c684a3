//! The continued-fraction recurrence `b₀ + K aₙ/bₙ` over any coefficient ring.
//!
//! The same engine runs in `ℤ[q]` ([`IntPoly`]), in `ℤ[q]/Φₘ` ([`CycloElem`]),
//! in MPFR complex arithmetic ([`rug::Complex`]) and in machine floating point
//! (`num_complex::Complex<f32 | f64>`).
//!
//! Approximants start from `P₋₁ = 1, Q₋₁ = 0, P₀ = b₀, Q₀ = 1`, the convention
//! under which `PₙQₙ₋₁ − Pₙ₋₁Qₙ = (−1)^{n−1} a₁⋯aₙ`.

mod periodic;

pub use periodic::{periodic_limit, truncated_value, Limit, MobiusClass, PeriodicLimit, TruncatedValue};

use num_traits::Float as NumFloat;
use rug::{Complex, Float};

use crate::numeric::{abs, pow2};
use crate::polyring::{CycloElem, IntPoly};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CfError {
    #[error("division hazard: |Q_{index}| is below the working tolerance")]
    DivisionHazard { index: usize },
    #[error("partial numerator a_{n} vanishes inside the period")]
    ZeroPartialNumerator { n: usize },
    #[error("coefficients are not periodic with period {period} (first mismatch at n = {n})")]
    NotPeriodic { period: usize, n: usize },
    #[error("classification is on the parabolic/elliptic boundary at {precision} bits; raise precision")]
    Boundary { precision: u32 },
    #[error("continued fraction is not of the form K aₙ/1 (b₀ = 0, bₙ = 1)")]
    NotWorpitzkyForm,
    #[error("precision {0} bits is below the 64-bit minimum")]
    PrecisionTooLow(u32),
    #[error(transparent)]
    Poly(#[from] crate::polyring::PolyError),
}

/// Coefficient domains the recurrence can run in.
pub trait CfRing: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn ring_add(&self, rhs: &Self) -> Self;
    fn ring_sub(&self, rhs: &Self) -> Self;
    fn ring_mul(&self, rhs: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    /// Exact equality in exact domains; agreement to working tolerance in numeric ones.
    fn agrees_with(&self, other: &Self) -> bool;
}

impl CfRing for IntPoly {
    fn zero_like(&self) -> Self {
        IntPoly::default()
    }
    fn one_like(&self) -> Self {
        IntPoly::constant(1)
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn agrees_with(&self, other: &Self) -> bool {
        self == other
    }
}

impl CfRing for CycloElem {
    fn zero_like(&self) -> Self {
        CycloElem::from_int(self.modulus().clone(), 0)
    }
    fn one_like(&self) -> Self {
        CycloElem::from_int(self.modulus().clone(), 1)
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn agrees_with(&self, other: &Self) -> bool {
        self == other
    }
}

impl CfRing for Complex {
    fn zero_like(&self) -> Self {
        Complex::new(self.prec())
    }
    fn one_like(&self) -> Self {
        Complex::with_val(self.prec(), 1)
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        Complex::with_val(self.prec(), self + rhs)
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        Complex::with_val(self.prec(), self - rhs)
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        Complex::with_val(self.prec(), self * rhs)
    }
    fn ring_neg(&self) -> Self {
        Complex::with_val(self.prec(), -self)
    }
    fn agrees_with(&self, other: &Self) -> bool {
        let prec = self.prec().0.min(other.prec().0);
        let diff = abs(&Complex::with_val(prec, self - other));
        let scale = abs(other).max(&Float::with_val(prec, 1));
        diff <= pow2(-(prec as i32) / 2, prec) * scale
    }
}

impl<T: NumFloat> CfRing for num_complex::Complex<T> {
    fn zero_like(&self) -> Self {
        num_complex::Complex::new(T::zero(), T::zero())
    }
    fn one_like(&self) -> Self {
        num_complex::Complex::new(T::one(), T::zero())
    }
    fn ring_add(&self, rhs: &Self) -> Self {
        *self + *rhs
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        *self - *rhs
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    fn ring_neg(&self) -> Self {
        -*self
    }
    fn agrees_with(&self, other: &Self) -> bool {
        let tol = T::epsilon().sqrt();
        (*self - *other).norm() <= tol * other.norm().max(T::one())
    }
}

/// `b₀`, `aₙ`, `bₙ` in one coefficient domain.
pub trait CfCoeffs<T> {
    fn b0(&self) -> T;
    fn a(&self, n: usize) -> T;
    fn b(&self, n: usize) -> T;
}

/// Coefficients given by closures.
pub struct FnCoeffs<F, G, H> {
    pub b0: F,
    pub a: G,
    pub b: H,
}

impl<T, F, G, H> CfCoeffs<T> for FnCoeffs<F, G, H>
where
    F: Fn() -> T,
    G: Fn(usize) -> T,
    H: Fn(usize) -> T,
{
    fn b0(&self) -> T {
        (self.b0)()
    }
    fn a(&self, n: usize) -> T {
        (self.a)(n)
    }
    fn b(&self, n: usize) -> T {
        (self.b)(n)
    }
}

/// Complex coefficients that can be re-rounded at any precision, as needed by
/// the two-precision reliability policy.
pub trait ComplexCoeffs {
    fn b0(&self, prec: u32) -> Complex;
    fn a(&self, n: usize, prec: u32) -> Complex;
    fn b(&self, n: usize, prec: u32) -> Complex;
}

impl<F, G, H> ComplexCoeffs for FnCoeffs<F, G, H>
where
    F: Fn(u32) -> Complex,
    G: Fn(usize, u32) -> Complex,
    H: Fn(usize, u32) -> Complex,
{
    fn b0(&self, prec: u32) -> Complex {
        (self.b0)(prec)
    }
    fn a(&self, n: usize, prec: u32) -> Complex {
        (self.a)(n, prec)
    }
    fn b(&self, n: usize, prec: u32) -> Complex {
        (self.b)(n, prec)
    }
}

/// Fixes a precision so that [`ComplexCoeffs`] can drive the generic engine.
pub struct AtPrecision<'a, C: ?Sized> {
    pub coeffs: &'a C,
    pub prec: u32,
}

impl<C: ComplexCoeffs + ?Sized> CfCoeffs<Complex> for AtPrecision<'_, C> {
    fn b0(&self) -> Complex {
        self.coeffs.b0(self.prec)
    }
    fn a(&self, n: usize) -> Complex {
        self.coeffs.a(n, self.prec)
    }
    fn b(&self, n: usize) -> Complex {
        self.coeffs.b(n, self.prec)
    }
}

/// The recurrence state at index `n`, plus the running product `χₙ = a₁⋯aₙ`.
#[derive(Clone, Debug)]
pub struct Approximants<T> {
    pub n: usize,
    pub p_curr: T,
    pub p_prev: T,
    pub q_curr: T,
    pub q_prev: T,
    pub chi: T,
}

impl<T: CfRing> Approximants<T> {
    pub fn init<C: CfCoeffs<T> + ?Sized>(c: &C) -> Self {
        let b0 = c.b0();
        let one = b0.one_like();
        let zero = b0.zero_like();
        Approximants { n: 0, p_prev: one.clone(), p_curr: b0, q_prev: zero, q_curr: one.clone(), chi: one }
    }

    /// `Pₙ = bₙPₙ₋₁ + aₙPₙ₋₂`, `Qₙ = bₙQₙ₋₁ + aₙQₙ₋₂`.
    pub fn step<C: CfCoeffs<T> + ?Sized>(&mut self, c: &C) {
        let n = self.n + 1;
        let a = c.a(n);
        let b = c.b(n);
        let p_next = b.ring_mul(&self.p_curr).ring_add(&a.ring_mul(&self.p_prev));
        let q_next = b.ring_mul(&self.q_curr).ring_add(&a.ring_mul(&self.q_prev));
        self.p_prev = std::mem::replace(&mut self.p_curr, p_next);
        self.q_prev = std::mem::replace(&mut self.q_curr, q_next);
        self.chi = self.chi.ring_mul(&a);
        self.n = n;
    }

    pub fn advance_to<C: CfCoeffs<T> + ?Sized>(&mut self, c: &C, n: usize) {
        while self.n < n {
            self.step(c);
        }
    }

    /// State after `n` steps.
    pub fn run<C: CfCoeffs<T> + ?Sized>(c: &C, n: usize) -> Self {
        let mut s = Self::init(c);
        s.advance_to(c, n);
        s
    }

    /// `PₙQₙ₋₁ − Pₙ₋₁Qₙ`.
    pub fn determinant(&self) -> T {
        self.p_curr.ring_mul(&self.q_prev).ring_sub(&self.p_prev.ring_mul(&self.q_curr))
    }
}

/// Checks `PₙQₙ₋₁ − Pₙ₋₁Qₙ = (−1)^{n−1} χₙ`.
pub fn determinant_check<T: CfRing>(s: &Approximants<T>, chi_n: &T) -> bool {
    if s.n == 0 {
        // P₀Q₋₁ − P₋₁Q₀ = −1 = (−1)^{−1}·χ₀.
        return s.determinant().agrees_with(&chi_n.ring_neg());
    }
    let expected = if s.n % 2 == 1 { chi_n.clone() } else { chi_n.ring_neg() };
    s.determinant().agrees_with(&expected)
}

/// `|Pₙ/Qₙ − Pₙ₋₁/Qₙ₋₁|`, refusing when either denominator is below `2^{−P/2}`.
pub fn approximant_gap(s: &Approximants<Complex>) -> Result<Float, CfError> {
    let prec = s.q_curr.prec().0;
    let tol = pow2(-(prec as i32) / 2, prec);
    if abs(&s.q_curr) < tol {
        return Err(CfError::DivisionHazard { index: s.n });
    }
    if abs(&s.q_prev) < tol {
        return Err(CfError::DivisionHazard { index: s.n.saturating_sub(1) });
    }
    let w1 = Complex::with_val(prec, &s.p_curr / &s.q_curr);
    let w0 = Complex::with_val(prec, &s.p_prev / &s.q_prev);
    Ok(abs(&Complex::with_val(prec, &w1 - &w0)))
}

fn approximant_value(p: &Complex, q: &Complex, prec: u32) -> Option<Complex> {
    let aq = abs(q);
    let scale = abs(p).max(&Float::with_val(prec, 1));
    if aq.is_zero() || aq < pow2(-(prec as i32) / 2, prec) * scale {
        None
    } else {
        Some(Complex::with_val(prec, p / q))
    }
}

fn approximant_sequence<C: ComplexCoeffs + ?Sized>(c: &C, n_max: usize, prec: u32) -> Vec<Option<Complex>> {
    let coeffs = AtPrecision { coeffs: c, prec };
    let mut s = Approximants::init(&coeffs);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(approximant_value(&s.p_curr, &s.q_curr, prec));
    for _ in 0..n_max {
        s.step(&coeffs);
        out.push(approximant_value(&s.p_curr, &s.q_curr, prec));
    }
    out
}

/// Forward-recurrence approximants with the two-precision reliability flags.
#[derive(Clone, Debug)]
pub struct NumericRun {
    pub precision: u32,
    /// `Pₙ/Qₙ` for `n = 0..=n_max`; `None` where `Qₙ` vanishes to working tolerance.
    pub approximants: Vec<Option<Complex>>,
    /// `true` where the `P` and `2P` runs disagree beyond `2^{−P/2}` relative.
    pub unreliable: Vec<bool>,
    /// Largest `|wₙ − wₙ₋₁|` over the last quarter; `None` if an approximant there is infinite.
    pub tail_spread: Option<Float>,
    /// Tail spread exceeds `2^{−P/4}`.
    pub non_cauchy: bool,
}

impl NumericRun {
    pub fn last(&self) -> Option<&Complex> {
        self.approximants.last().and_then(|w| w.as_ref())
    }

    pub fn any_unreliable(&self) -> bool {
        self.unreliable.iter().any(|&u| u)
    }
}

/// Evaluates approximants at `precision` and again at `2·precision`, flagging disagreements.
pub fn evaluate_numeric<C: ComplexCoeffs + ?Sized>(
    c: &C,
    n_max: usize,
    precision: u32,
) -> Result<NumericRun, CfError> {
    if precision < 64 {
        return Err(CfError::PrecisionTooLow(precision));
    }
    let n_max = n_max.max(1);
    let lo = approximant_sequence(c, n_max, precision);
    let hi = approximant_sequence(c, n_max, 2 * precision);
    let rel_tol = pow2(-(precision as i32) / 2, precision);
    let unreliable = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => {
                let diff = abs(&Complex::with_val(precision, a - b));
                let scale = abs(b).max(&Float::with_val(precision, 1));
                diff > Float::with_val(precision, &rel_tol * &scale)
            }
            (None, None) => false,
            _ => true,
        })
        .collect();

    let window = (n_max / 4).max(1);
    let mut spread = Some(Float::new(precision));
    for n in (n_max + 1 - window)..=n_max {
        match (&lo[n - 1], &lo[n], &mut spread) {
            (Some(a), Some(b), Some(s)) => {
                let d = abs(&Complex::with_val(precision, b - a));
                if d > *s {
                    *s = d;
                }
            }
            _ => spread = None,
        }
    }
    let non_cauchy = match &spread {
        Some(s) => *s > pow2(-(precision as i32) / 4, precision),
        None => true,
    };
    Ok(NumericRun { precision, approximants: lo, unreliable, tail_spread: spread, non_cauchy })
}

/// Outcome of checking Worpitzky's hypothesis `|aₙ| ≤ 1/4` and its disc conclusion.
#[derive(Clone, Debug)]
pub struct WorpitzkyReport {
    pub n_checked: usize,
    /// First `n` with `|aₙ| > 1/4`, if any.
    pub violation: Option<usize>,
    /// Every approximant `wₙ` (n ≤ n_max) lies in `|w| < 1/2`.
    pub all_in_disc: bool,
    pub max_modulus: Float,
    pub final_approximant: Complex,
}

impl WorpitzkyReport {
    pub fn hypothesis_holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Worpitzky's criterion for `K aₙ/1`.
pub fn worpitzky_check<C: ComplexCoeffs + ?Sized>(
    c: &C,
    n_max: usize,
    precision: u32,
) -> Result<WorpitzkyReport, CfError> {
    if precision < 64 {
        return Err(CfError::PrecisionTooLow(precision));
    }
    let exact = AtPrecision { coeffs: c, prec: precision };
    if !exact.b0().is_zero() {
        return Err(CfError::NotWorpitzkyForm);
    }
    let quarter = Float::with_val(precision, 0.25);
    let mut violation = None;
    for n in 1..=n_max {
        if exact.b(n) != 1 {
            return Err(CfError::NotWorpitzkyForm);
        }
        if violation.is_none() && abs(&exact.a(n)) > quarter {
            violation = Some(n);
        }
    }
    let mut s = Approximants::init(&exact);
    let half = Float::with_val(precision, 0.5);
    let mut all_in_disc = true;
    let mut max_modulus = Float::new(precision);
    let mut last = Complex::new(precision);
    for _ in 0..n_max {
        s.step(&exact);
        match approximant_value(&s.p_curr, &s.q_curr, precision) {
            Some(w) => {
                let r = abs(&w);
                if r >= half {
                    all_in_disc = false;
                }
                if r > max_modulus {
                    max_modulus = r;
                }
                last = w;
            }
            None => all_in_disc = false,
        }
    }
    Ok(WorpitzkyReport { n_checked: n_max, violation, all_in_disc, max_modulus, final_approximant: last })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;
    use rug::Rational;

    fn k_family() -> FnCoeffs<impl Fn() -> IntPoly, impl Fn(usize) -> IntPoly, impl Fn(usize) -> IntPoly> {
        FnCoeffs { b0: || IntPoly::constant(1), a: IntPoly::q_pow, b: |_| IntPoly::constant(1) }
    }

    #[test]
    fn first_steps_of_k() {
        let c = k_family();
        let mut s = Approximants::init(&c);
        assert!(s.p_curr.is_one() && s.q_curr.is_one());
        s.step(&c);
        assert_eq!(s.p_curr, IntPoly::from_i64s(&[1, 1]));
        assert!(s.q_curr.is_one());
        assert!(determinant_check(&s, &IntPoly::q_pow(1)));
        s.step(&c);
        assert_eq!(s.p_curr, IntPoly::from_i64s(&[1, 1, 1]));
        assert_eq!(s.q_curr, IntPoly::from_i64s(&[1, 0, 1]));
        assert_eq!(s.determinant(), IntPoly::monomial(-1, 3));
        assert!(determinant_check(&s, &IntPoly::q_pow(3)));
        assert!(!determinant_check(&s, &IntPoly::q_pow(2)));
    }

    #[test]
    fn zero_numerator_freezes_ratio() {
        let c = FnCoeffs {
            b0: || Complex::with_val(128, 2),
            a: |n: usize| Complex::with_val(128, if n == 3 { 0.0 } else { 0.5 }),
            b: |_| Complex::with_val(128, 1),
        };
        let s2 = Approximants::run(&c, 2);
        let s3 = Approximants::run(&c, 3);
        let w2 = Complex::with_val(128, &s2.p_curr / &s2.q_curr);
        let w3 = Complex::with_val(128, &s3.p_curr / &s3.q_curr);
        assert!(w2.agrees_with(&w3));
        assert!(approximant_gap(&s3).unwrap() < pow2(-100, 128));
    }

    #[test]
    fn f64_engine_agrees_with_mpfr() {
        let q = 0.1f64;
        let c64 = FnCoeffs {
            b0: || num_complex::Complex64::new(1.0, 0.0),
            a: move |n: usize| num_complex::Complex64::new(q.powi(n as i32), 0.0),
            b: |_| num_complex::Complex64::new(1.0, 0.0),
        };
        let s = Approximants::run(&c64, 20);
        let w20 = s.p_curr / s.q_curr;
        let w19 = s.p_prev / s.q_prev;
        assert!((w20 - w19).norm() < 1e-15);
        let c = FnCoeffs {
            b0: |p: u32| Complex::with_val(p, 1),
            a: |n: usize, p: u32| Complex::with_val(p, Rational::from((1, 10)).pow(n as u32).clone()),
            b: |_, p: u32| Complex::with_val(p, 1),
        };
        let run = evaluate_numeric(&c, 20, 128).unwrap();
        let hp = run.last().unwrap();
        assert!((hp.real().to_f64() - w20.re).abs() < 1e-14);
    }

    #[test]
    fn worpitzky_constant_quarter() {
        let c = FnCoeffs {
            b0: |p: u32| Complex::new(p),
            a: |_, p: u32| Complex::with_val(p, 0.25),
            b: |_, p: u32| Complex::with_val(p, 1),
        };
        let r = worpitzky_check(&c, 400, 128).unwrap();
        assert!(r.hypothesis_holds() && r.all_in_disc);
        let want = (2f64.sqrt() - 1.0) / 2.0;
        assert!((r.final_approximant.real().to_f64() - want).abs() < 1e-5);

        let bad = FnCoeffs {
            b0: |p: u32| Complex::new(p),
            a: |_, p: u32| Complex::with_val(p, 0.3),
            b: |_, p: u32| Complex::with_val(p, 1),
        };
        assert_eq!(worpitzky_check(&bad, 10, 128).unwrap().violation, Some(1));
    }
}
