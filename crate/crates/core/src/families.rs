//! The five q-continued-fraction families and their root-of-unity data.
//!
//! | family | b₀    | aₙ                                   | bₙ             | (j, d) | n(m)   | C₁ | C₂ |
//! |--------|-------|--------------------------------------|----------------|--------|--------|----|----|
//! | K      | 1     | qⁿ                                   | 1              | (1, 5) | m − 1  | 1  | 1  |
//! | S1     | 1     | a₂ₖ₋₁ = q^{2k−1}, a₂ₖ = q^k + q^{2k}    | 1              | (1, 4) | 2m − 1 | 1  | 1  |
//! | S2     | 1     | a₂ₖ₋₁ = q^{2k−1} + q^{4k−2}, a₂ₖ = q^{4k} | 1           | (1, 8) | 2m − 1 | 2  | 1  |
//! | S3     | 1     | qⁿ + q^{2n}                          | 1              | (1, 6) | m − 1  | 1  | 1  |
//! | GG     | 1 + q | q^{2n}                               | 1 + q^{2n+1}   | -      | -      | -  | -  |
//!
//! GG carries no proved root-of-unity data and only takes part in exploration.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rug::{Complex, Integer, Rational};

use crate::cf_engine::{CfCoeffs, CfRing, ComplexCoeffs};
use crate::numeric::Point;
use crate::polyring::{modulus, CycloElem, CyclotomicModulus, IntPoly};

/// `c·q^e`.
pub type Term = (i64, u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyName {
    K,
    S1,
    S2,
    S3,
    GG,
}

impl FamilyName {
    pub const ALL: [FamilyName; 5] =
        [FamilyName::K, FamilyName::S1, FamilyName::S2, FamilyName::S3, FamilyName::GG];
    pub const PROVED: [FamilyName; 4] = [FamilyName::K, FamilyName::S1, FamilyName::S2, FamilyName::S3];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyName::K => "K",
            FamilyName::S1 => "S1",
            FamilyName::S2 => "S2",
            FamilyName::S3 => "S3",
            FamilyName::GG => "GG",
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyName {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "K" | "RR" => Ok(FamilyName::K),
            "S1" => Ok(FamilyName::S1),
            "S2" => Ok(FamilyName::S2),
            "S3" => Ok(FamilyName::S3),
            "GG" => Ok(FamilyName::GG),
            _ => Err(FamilyError::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Proved,
    Conjectural,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("unknown family `{0}` (expected K, S1, S2, S3 or GG)")]
    UnknownName(String),
    #[error("family {0} has no proved root-of-unity data")]
    NoTableData(FamilyName),
    #[error("m = {m} is not admissible for {family}: need m ≡ {j} (mod {d}) and m > 1")]
    NotAdmissible { family: FamilyName, m: u64, j: u64, d: u64 },
    #[error("m = {0} must be odd and at least 3")]
    EvenOrder(u64),
}

/// A closed form `0` or `±q^e` (exponent reduced mod m).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    Zero,
    SignedPower { sign: i8, exp: u64 },
}

impl ClosedForm {
    pub fn to_cyclo(self, modulus: &Arc<CyclotomicModulus>) -> CycloElem {
        match self {
            ClosedForm::Zero => CycloElem::from_int(modulus.clone(), 0),
            ClosedForm::SignedPower { sign, exp } => {
                CycloElem::from_terms(modulus.clone(), &[(sign as i64, exp)])
            }
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedForm::Zero => write!(f, "0"),
            ClosedForm::SignedPower { sign, exp } => {
                let s = if *sign < 0 { "-" } else { "" };
                match exp {
                    0 => write!(f, "{s}1"),
                    1 => write!(f, "{s}q"),
                    e => write!(f, "{s}q^{e}"),
                }
            }
        }
    }
}

/// One continued-fraction family with its constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySpec {
    pub name: FamilyName,
}

pub fn make_family(name: FamilyName) -> FamilySpec {
    FamilySpec { name }
}

impl FamilySpec {
    pub fn parse(name: &str) -> Result<Self, FamilyError> {
        Ok(make_family(name.parse()?))
    }

    pub fn status(&self) -> Status {
        match self.name {
            FamilyName::GG => Status::Conjectural,
            _ => Status::Proved,
        }
    }

    pub fn is_proved(&self) -> bool {
        self.status() == Status::Proved
    }

    /// Congruence class `(j, d)` of the admissible orders.
    pub fn congruence(&self) -> Option<(u64, u64)> {
        match self.name {
            FamilyName::K => Some((1, 5)),
            FamilyName::S1 => Some((1, 4)),
            FamilyName::S2 => Some((1, 8)),
            FamilyName::S3 => Some((1, 6)),
            FamilyName::GG => None,
        }
    }

    pub fn n_of_m(&self, m: u64) -> Option<u64> {
        match self.name {
            FamilyName::K | FamilyName::S3 => Some(m - 1),
            FamilyName::S1 | FamilyName::S2 => Some(2 * m - 1),
            FamilyName::GG => None,
        }
    }

    pub fn c1(&self) -> Option<Rational> {
        match self.name {
            FamilyName::S2 => Some(Rational::from(2)),
            FamilyName::GG => None,
            _ => Some(Rational::from(1)),
        }
    }

    pub fn c2(&self) -> Option<Rational> {
        match self.name {
            FamilyName::GG => None,
            _ => Some(Rational::from(1)),
        }
    }

    /// Gap threshold `C₁/(2(1+C₂)²)`.
    pub fn gap_threshold(&self) -> Option<Rational> {
        let (c1, c2) = (self.c1()?, self.c2()?);
        let denom = Rational::from(&c2 + 1u32).square() * 2u32;
        Some(c1 / denom)
    }

    pub fn b0_terms(&self) -> Vec<Term> {
        match self.name {
            FamilyName::GG => vec![(1, 0), (1, 1)],
            _ => vec![(1, 0)],
        }
    }

    pub fn a_terms(&self, n: usize) -> Vec<Term> {
        assert!(n >= 1, "partial numerators start at n = 1");
        let n = n as u64;
        match self.name {
            FamilyName::K => vec![(1, n)],
            FamilyName::S1 => {
                if n % 2 == 1 {
                    vec![(1, n)]
                } else {
                    let k = n / 2;
                    vec![(1, k), (1, 2 * k)]
                }
            }
            FamilyName::S2 => {
                if n % 2 == 1 {
                    let k = n.div_ceil(2);
                    vec![(1, 2 * k - 1), (1, 4 * k - 2)]
                } else {
                    vec![(1, 2 * n)]
                }
            }
            FamilyName::S3 => vec![(1, n), (1, 2 * n)],
            FamilyName::GG => vec![(1, 2 * n)],
        }
    }

    pub fn b_terms(&self, n: usize) -> Vec<Term> {
        match self.name {
            FamilyName::GG => vec![(1, 0), (1, 2 * n as u64 + 1)],
            _ => vec![(1, 0)],
        }
    }

    pub fn a_poly(&self, n: usize) -> IntPoly {
        terms_poly(&self.a_terms(n))
    }

    pub fn b_poly(&self, n: usize) -> IntPoly {
        terms_poly(&self.b_terms(n))
    }

    pub fn b0_poly(&self) -> IntPoly {
        terms_poly(&self.b0_terms())
    }

    /// All coefficients have nonnegative integer coefficients (true for every family here).
    pub fn has_nonnegative_terms(&self) -> bool {
        self.b0_terms().iter().all(|t| t.0 >= 0)
    }

    /// Period of `(aₙ, bₙ)` at a primitive m-th root of unity.
    pub fn period_at(&self, m: u64) -> usize {
        match self.name {
            FamilyName::S1 | FamilyName::S2 => 2 * m as usize,
            _ => m as usize,
        }
    }

    /// `m ≡ j (mod d)` and `m > 1`, for a proved family.
    pub fn check_admissible(&self, m: u64) -> Result<(), FamilyError> {
        let (j, d) = self.congruence().ok_or(FamilyError::NoTableData(self.name))?;
        if m <= 1 || m % d != j % d {
            return Err(FamilyError::NotAdmissible { family: self.name, m, j, d });
        }
        Ok(())
    }

    pub fn admissible_orders(&self, m_min: u64, m_max: u64) -> Vec<u64> {
        (m_min.max(2)..=m_max).filter(|&m| self.check_admissible(m).is_ok()).collect()
    }

    /// Expected `(Q_{n(m)−1}, Q_{n(m)})` at primitive m-th roots.
    pub fn expected_table(&self, m: u64) -> Result<(ClosedForm, ClosedForm), FamilyError> {
        self.check_admissible(m)?;
        let pow = |sign: i8, exp: u64| ClosedForm::SignedPower { sign, exp: exp % m };
        Ok(match self.name {
            FamilyName::K => (ClosedForm::Zero, pow(1, (m - 1) / 5)),
            FamilyName::S1 => {
                let sign = if ((m - 1) / 4) % 2 == 0 { 1 } else { -1 };
                (pow(1, 0), pow(sign, (m * m - 1) / 8))
            }
            FamilyName::S2 => (pow(1, 0), pow(1, (m - 1) / 2)),
            FamilyName::S3 => (ClosedForm::Zero, pow(1, (m - 1) / 3)),
            FamilyName::GG => unreachable!("GG has no congruence data"),
        })
    }
}

fn terms_poly(terms: &[Term]) -> IntPoly {
    let t: Vec<(i64, usize)> = terms.iter().map(|&(c, e)| (c, e as usize)).collect();
    IntPoly::from_terms(&t)
}

impl CfCoeffs<IntPoly> for FamilySpec {
    fn b0(&self) -> IntPoly {
        self.b0_poly()
    }
    fn a(&self, n: usize) -> IntPoly {
        self.a_poly(n)
    }
    fn b(&self, n: usize) -> IntPoly {
        self.b_poly(n)
    }
}

/// A family reduced modulo `Φₘ`.
pub struct CycloFamily {
    pub family: FamilySpec,
    pub modulus: Arc<CyclotomicModulus>,
}

impl CycloFamily {
    pub fn new(family: FamilySpec, m: u64) -> Self {
        CycloFamily { family, modulus: modulus(m) }
    }
}

impl CfCoeffs<CycloElem> for CycloFamily {
    fn b0(&self) -> CycloElem {
        CycloElem::from_terms(self.modulus.clone(), &self.family.b0_terms())
    }
    fn a(&self, n: usize) -> CycloElem {
        CycloElem::from_terms(self.modulus.clone(), &self.family.a_terms(n))
    }
    fn b(&self, n: usize) -> CycloElem {
        CycloElem::from_terms(self.modulus.clone(), &self.family.b_terms(n))
    }
}

/// A family evaluated at an exactly specified point, at any precision.
pub struct FamilyAt {
    pub family: FamilySpec,
    pub point: Point,
    cache: RefCell<HashMap<u32, Vec<Complex>>>,
}

impl FamilyAt {
    pub fn new(family: FamilySpec, point: Point) -> Self {
        FamilyAt { family, point, cache: RefCell::new(HashMap::new()) }
    }

    /// `q^e`, from a per-precision table extended by multiplication. Circle points are
    /// re-anchored exactly every `ANCHOR` exponents.
    fn power(&self, e: usize, prec: u32) -> Complex {
        const ANCHOR: usize = 64;
        let mut cache = self.cache.borrow_mut();
        let table = cache.entry(prec).or_insert_with(|| vec![Complex::with_val(prec, 1)]);
        while table.len() <= e {
            let i = table.len();
            let next = match &self.point {
                _ if i == 1 => self.point.value(prec),
                Point::Circle(_) if i % ANCHOR == 0 => self.point.pow(i as u32).value(prec),
                _ => Complex::with_val(prec, &table[i - 1] * &table[1]),
            };
            table.push(next);
        }
        table[e].clone()
    }

    fn eval_terms(&self, terms: &[Term], prec: u32) -> Complex {
        let mut acc = Complex::new(prec);
        for &(c, e) in terms {
            let e = usize::try_from(e).expect("exponent exceeds usize");
            acc += self.power(e, prec) * c;
        }
        acc
    }
}

impl ComplexCoeffs for FamilyAt {
    fn b0(&self, prec: u32) -> Complex {
        self.eval_terms(&self.family.b0_terms(), prec)
    }
    fn a(&self, n: usize, prec: u32) -> Complex {
        self.eval_terms(&self.family.a_terms(n), prec)
    }
    fn b(&self, n: usize, prec: u32) -> Complex {
        self.eval_terms(&self.family.b_terms(n), prec)
    }
}

/// `χₙ = a₁⋯aₙ` in `ℤ[q]`.
pub fn chi_poly(f: &FamilySpec, n: usize) -> IntPoly {
    (1..=n).fold(IntPoly::constant(1), |acc, i| &acc * &f.a_poly(i))
}

/// Dense element of `ℤ[q]/(q^m − 1)`, where multiplying by a sparse polynomial is cheap.
struct CyclicPoly {
    m: usize,
    coeffs: Vec<Integer>,
}

impl CyclicPoly {
    fn one(m: usize) -> Self {
        let mut coeffs = vec![Integer::new(); m];
        coeffs[0] = Integer::from(1);
        CyclicPoly { m, coeffs }
    }

    fn mul_terms(&mut self, terms: &[Term]) {
        let mut out = vec![Integer::new(); self.m];
        for &(c, e) in terms {
            let shift = (e % self.m as u64) as usize;
            for (i, x) in self.coeffs.iter().enumerate() {
                if *x != 0 {
                    out[(i + shift) % self.m] += x * c;
                }
            }
        }
        self.coeffs = out;
    }

    fn reduce(self) -> CycloElem {
        let md = modulus(self.m as u64);
        CycloElem::new(md, &IntPoly::new(self.coeffs))
    }
}

/// `χ_n mod Φₘ`, accumulated modulo `q^m − 1`.
pub fn chi_mod(f: &FamilySpec, n: usize, m: u64) -> CycloElem {
    let mut acc = CyclicPoly::one(m as usize);
    for i in 1..=n {
        acc.mul_terms(&f.a_terms(i));
    }
    acc.reduce()
}

/// `(Q_{n−1}, Q_n)` by the denominator recurrence alone.
pub fn denominators<T: CfRing, C: CfCoeffs<T> + ?Sized>(c: &C, n: usize) -> (T, T) {
    let b0 = c.b0();
    let (mut prev, mut curr) = (b0.zero_like(), b0.one_like());
    for i in 1..=n {
        let next = c.b(i).ring_mul(&curr).ring_add(&c.a(i).ring_mul(&prev));
        prev = std::mem::replace(&mut curr, next);
    }
    (prev, curr)
}

/// Exact check of the two denominators at one order against their closed forms.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub m: u64,
    pub family: FamilyName,
    pub n_of_m: u64,
    pub expected_nm_minus1: ClosedForm,
    pub expected_nm: ClosedForm,
    /// Exponent of `q` in the expected `Q_{n(m)}`, reduced mod m.
    pub q_power_nm: u64,
    pub sign: i8,
    pub residue_nm_minus1: CycloElem,
    pub residue_nm: CycloElem,
    pub matches: bool,
}

pub fn table_check(f: &FamilySpec, m: u64) -> Result<TableRow, FamilyError> {
    let (exp_prev, exp_curr) = f.expected_table(m)?;
    let n = f.n_of_m(m).expect("proved families define n(m)");
    let cf = CycloFamily::new(*f, m);
    let (q_prev, q_curr) = denominators(&cf, n as usize);
    let matches = q_prev == exp_prev.to_cyclo(&cf.modulus) && q_curr == exp_curr.to_cyclo(&cf.modulus);
    let (sign, q_power_nm) = match exp_curr {
        ClosedForm::SignedPower { sign, exp } => (sign, exp),
        ClosedForm::Zero => (0, 0),
    };
    Ok(TableRow {
        m,
        family: f.name,
        n_of_m: n,
        expected_nm_minus1: exp_prev,
        expected_nm: exp_curr,
        q_power_nm,
        sign,
        residue_nm_minus1: q_prev,
        residue_nm: q_curr,
        matches,
    })
}

/// `∏_{i=1}^{m−1} (1 + qⁱ) ≡ 1 (mod Φₘ)` for odd `m ≥ 3`.
pub fn product_identity_check(m: u64) -> Result<bool, FamilyError> {
    Ok(product_identity_residue(m)?.is_one())
}

pub fn product_identity_residue(m: u64) -> Result<CycloElem, FamilyError> {
    if m < 3 || m % 2 == 0 {
        return Err(FamilyError::EvenOrder(m));
    }
    let mut acc = CyclicPoly::one(m as usize);
    for i in 1..m {
        acc.mul_terms(&[(1, 0), (1, i)]);
    }
    Ok(acc.reduce())
}

/// Outcome of the exact `|χ_{n(m)}| = C₁` check.
#[derive(Debug, Clone)]
pub struct ChiCheck {
    pub m: u64,
    pub family: FamilyName,
    /// `(c, K)` with `χ_{n(m)} ≡ c·q^K`.
    pub normal_form: Option<(Integer, u64)>,
    pub residue: CycloElem,
    pub passes: bool,
}

pub fn chi_magnitude_check(f: &FamilySpec, m: u64) -> Result<ChiCheck, FamilyError> {
    f.check_admissible(m)?;
    let n = f.n_of_m(m).expect("proved families define n(m)") as usize;
    let residue = chi_mod(f, n, m);
    let normal_form = residue.as_scaled_monomial().filter(|(c, _)| c.significant_bits() <= 2);
    let c1 = f.c1().expect("proved families define C1");
    let passes = normal_form.as_ref().is_some_and(|(c, _)| Rational::from(c.abs_ref()) == c1);
    Ok(ChiCheck { m, family: f.name, normal_form, residue, passes })
}
