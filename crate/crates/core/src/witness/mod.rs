//! Finite prefixes of the divergence construction, with their inequality chains checked
//! at high precision; Schur's evaluation; the outside-circle limits; the GG comparison.

mod gg;
mod outside;
mod schur;

pub use gg::{gg_explore, Expectation, GgReport, GgRow, SideResult, BANNER as GG_BANNER};
pub use outside::{outside_circle_check, OutsideReport};
pub use schur::{schur_check, schur_k_sweep, schur_value, SchurCheck, SchurValue};

use rug::float::Constant;
use rug::{Complex, Float, Integer, Rational};

use crate::cf_engine::{Approximants, AtPrecision, CfError};
use crate::families::{chi_magnitude_check, table_check, FamilyAt, FamilyError, FamilyName, FamilySpec};
use crate::lipschitz::{tail_constants, Flavor};
use crate::numeric::{abs, pow2, Point};
use crate::rcf::{convergents, Quotient, RcfError, RegCF};

/// Default largest `n*` for which κ and α are computed exactly.
pub const DEFAULT_CONSTRUCT_CAP: u64 = 200_000;
/// Default largest `n*` for which a stage is checked numerically.
pub const DEFAULT_VERIFY_CAP: u64 = 6_000;
/// `log₂φ` rounded down.
const LOG2_PHI_LOWER: (u64, u64) = (6942, 10_000);

#[derive(Debug, thiserror::Error)]
pub enum WitnessError {
    #[error("family {0} has no proved root-of-unity data")]
    NotProved(FamilyName),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error(transparent)]
    Rcf(#[from] RcfError),
    #[error("at least one stage is required")]
    NoStages,
    #[error("stage {0} does not exist or cannot be verified at this scale")]
    StageNotVerifiable(usize),
    #[error("precision {given} bits is below the {needed} bits the stage needs")]
    PrecisionTooLow { given: u32, needed: u32 },
    #[error("k = {k} is not coprime to m = {m}")]
    NotCoprime { k: i64, m: u64 },
    #[error("exponent (1 − λσm)/5 is not an integer for m = {0}")]
    NonIntegerExponent(u64),
    #[error("|q| must exceed 1.1")]
    MarginViolation,
    #[error("free quotient {name} = {value} violates the congruence conditions")]
    BadFreeQuotient { name: &'static str, value: Integer },
}

/// Which quotients to use and how far to go.
#[derive(Debug, Clone)]
pub struct WitnessPlan {
    pub family: FamilySpec,
    pub stages: usize,
    /// `e₁`; defaults to `j`.
    pub e1: Option<Integer>,
    /// `e₂`; defaults to 1.
    pub e2: Option<Integer>,
    /// Every `e_{2i+1}`, `i ≥ 1`; defaults to `d`.
    pub odd: Option<Integer>,
    pub construct_cap: u64,
    pub verify_cap: u64,
}

impl WitnessPlan {
    pub fn new(family: FamilySpec, stages: usize) -> Self {
        WitnessPlan {
            family,
            stages,
            e1: None,
            e2: None,
            odd: None,
            construct_cap: DEFAULT_CONSTRUCT_CAP,
            verify_cap: DEFAULT_VERIFY_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageStatus {
    /// κ and α are exact and the numerics are in reach.
    Verifiable,
    /// κ and α are exact but `n*` is past the verification cap.
    ExactNotVerified,
    /// Only a log-scale lower bound on `e_{2i+2}` is known.
    ConstructedNotVerified,
    NotConstructed,
}

impl StageStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            StageStatus::Verifiable => "verifiable",
            StageStatus::ExactNotVerified => "constructed, not verified (exact constants)",
            StageStatus::ConstructedNotVerified => "constructed, not verified",
            StageStatus::NotConstructed => "not constructed",
        }
    }
}

/// One stage `i` of the construction, before any numerics.
#[derive(Debug, Clone)]
pub struct StageSkeleton {
    pub index: usize,
    pub status: StageStatus,
    /// `c_{2i+1}`, `d_{2i+1}`.
    pub c_odd: Option<Integer>,
    pub d_odd: Option<Integer>,
    /// `d_{2i}`.
    pub d_even_prev: Option<Integer>,
    pub n_star: Option<Integer>,
    pub kappa: Option<Integer>,
    pub kappa_prev: Option<Integer>,
    pub alpha: Option<Integer>,
    /// `⌈(2π/d²)·max{κ, 2α/C₁}⌉`.
    pub e_bound: Option<Integer>,
    /// `e_{2i+2} = e_bound + 1`.
    pub e_next: Option<Integer>,
    /// `log₂ e_{2i+2} ≥` this, when only a lower bound is known.
    pub log2_e_lower_bound: Option<Integer>,
}

impl StageSkeleton {
    fn empty(index: usize) -> Self {
        StageSkeleton {
            index,
            status: StageStatus::NotConstructed,
            c_odd: None,
            d_odd: None,
            d_even_prev: None,
            n_star: None,
            kappa: None,
            kappa_prev: None,
            alpha: None,
            e_bound: None,
            e_next: None,
            log2_e_lower_bound: None,
        }
    }

    /// `2·⌈log₂κ⌉ + 128`.
    pub fn required_precision(&self) -> Option<u32> {
        let k = self.kappa.as_ref()?;
        let ceil_log2 = if k.is_power_of_two() { k.significant_bits() - 1 } else { k.significant_bits() };
        Some(2 * ceil_log2 + 128)
    }
}

/// A constructed prefix and its stages.
#[derive(Debug, Clone)]
pub struct Witness {
    pub plan: WitnessPlan,
    /// `[0; e₁, …, e_L]` with a trailing `e_L = d` after the last exact even quotient.
    pub prefix: RegCF,
    pub stages: Vec<StageSkeleton>,
}

impl Witness {
    /// The rational `c_L/d_L` standing in for `t`.
    pub fn representative(&self) -> Rational {
        let k = self.prefix.materialized_len();
        convergents(&self.prefix, k).expect("materialized prefix").pop().unwrap().to_rational()
    }

    pub fn stage(&self, i: usize) -> Option<&StageSkeleton> {
        i.checked_sub(1).and_then(|k| self.stages.get(k))
    }
}

fn n_star_of(f: &FamilySpec, d: &Integer) -> Integer {
    match f.name {
        FamilyName::K | FamilyName::S3 => Integer::from(d - 1u32),
        _ => Integer::from(d * 2u32) - 1u32,
    }
}

fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `⌈(2π/d²)·max{κ, 2α/C₁}⌉`, computed with enough bits to be exact.
fn e_bound(kappa: &Integer, alpha: &Integer, c1: &Rational, d: &Integer) -> Integer {
    let two_alpha = Rational::from(alpha * Integer::from(2)) / c1;
    let kq = Rational::from(kappa.clone());
    let m = if kq >= two_alpha { kq } else { two_alpha };
    let prec = (m.numer().significant_bits() + 2 * d.significant_bits() + 128).max(256);
    let val =
        Float::with_val(prec, &m) * pi(prec) * 2u32 / Float::with_val(prec, Integer::from(d.square_ref()));
    let ceil = val.ceil();
    ceil.to_integer().expect("finite bound")
}

/// Lower bound on `log₂ e_bound` from `κₙ ≥ φ^{n−1} − 1`, valid for every family here.
fn log2_e_lower(n_star: &Integer, d: &Integer) -> Integer {
    let (num, den) = LOG2_PHI_LOWER;
    let phi_part = Integer::from(n_star - 1u32) * num / den;
    // log₂(2π) − 1 > 1
    phi_part + 1u32 - Integer::from(2 * d.significant_bits())
}

/// Builds the prefix and per-stage data.
pub fn build_witness(plan: &WitnessPlan) -> Result<Witness, WitnessError> {
    let f = plan.family;
    let (j, dd) = f.congruence().ok_or(WitnessError::NotProved(f.name))?;
    let c1 = f.c1().expect("proved family");
    if plan.stages == 0 {
        return Err(WitnessError::NoStages);
    }
    let e1 = plan.e1.clone().unwrap_or_else(|| Integer::from(j));
    let e2 = plan.e2.clone().unwrap_or_else(|| Integer::from(1));
    let odd = plan.odd.clone().unwrap_or_else(|| Integer::from(dd));
    if e1 < 1 || Integer::from(&e1 % dd) != j % dd {
        return Err(WitnessError::BadFreeQuotient { name: "e1", value: e1 });
    }
    if e2 < 1 {
        return Err(WitnessError::BadFreeQuotient { name: "e2", value: e2 });
    }
    if odd < 1 || Integer::from(&odd % dd) != 0 {
        return Err(WitnessError::BadFreeQuotient { name: "e_odd", value: odd });
    }

    let mut qs: Vec<Quotient> = vec![e1.into(), e2.into(), odd.clone().into()];
    let mut stages = Vec::with_capacity(plan.stages);
    let mut open = true;
    for i in 1..=plan.stages {
        let mut st = StageSkeleton::empty(i);
        if !open {
            stages.push(st);
            continue;
        }
        let r = RegCF { quotients: qs.clone(), terminates: true };
        let conv = convergents(&r, 2 * i + 1)?;
        let d_odd = conv[2 * i + 1].d.clone();
        debug_assert_eq!(Integer::from(&d_odd % dd), j % dd);
        let n_star = n_star_of(&f, &d_odd);
        st.c_odd = Some(conv[2 * i + 1].c.clone());
        st.d_even_prev = Some(conv[2 * i].d.clone());
        st.n_star = Some(n_star.clone());
        match n_star.to_u64().filter(|&n| n <= plan.construct_cap) {
            Some(n) => {
                let n = n as usize;
                let (kp, k) = tail_constants(&f, Flavor::Kappa, n).expect("nonnegative family");
                let (_, a) = tail_constants(&f, Flavor::Alpha, n).expect("nonnegative family");
                let eb = e_bound(&k, &a, &c1, &d_odd);
                let en = Integer::from(&eb + 1u32);
                st.status = if (n as u64) <= plan.verify_cap {
                    StageStatus::Verifiable
                } else {
                    StageStatus::ExactNotVerified
                };
                st.kappa = Some(k);
                st.kappa_prev = Some(kp);
                st.alpha = Some(a);
                st.e_bound = Some(eb);
                st.e_next = Some(en.clone());
                qs.push(en.into());
                if i < plan.stages {
                    qs.push(odd.clone().into());
                }
            }
            None => {
                st.status = StageStatus::ConstructedNotVerified;
                st.log2_e_lower_bound = Some(log2_e_lower(&n_star, &d_odd));
                open = false;
            }
        }
        st.d_odd = Some(d_odd);
        stages.push(st);
    }
    if matches!(qs.len() % 2, 0) {
        qs.push(odd.into());
    }
    Ok(Witness { plan: plan.clone(), prefix: RegCF { quotients: qs, terminates: true }, stages })
}

/// Flags for each link of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageChecks {
    pub nqm: bool,
    pub nq: bool,
    pub qnb: bool,
    pub qnb1: bool,
    pub fqm: bool,
    pub fnb: bool,
    pub gap: bool,
    pub tdif: bool,
    pub aldif: bool,
}

impl StageChecks {
    pub fn all(&self) -> bool {
        self.nqm
            && self.nq
            && self.qnb
            && self.qnb1
            && self.fqm
            && self.fnb
            && self.gap
            && self.tdif
            && self.aldif
    }

    pub fn named(&self) -> [(&'static str, bool); 9] {
        [
            ("nqm", self.nqm),
            ("nq", self.nq),
            ("qnb", self.qnb),
            ("qnb1", self.qnb1),
            ("fqm", self.fqm),
            ("fnb", self.fnb),
            ("gap", self.gap),
            ("tdif", self.tdif),
            ("aldif", self.aldif),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub n: usize,
    pub q_abs: Float,
    /// `|Pₙ/Qₙ − Pₙ₋₁/Qₙ₋₁|`; `None` where a denominator vanishes to working precision.
    pub gap: Option<Float>,
}

/// Measured values and verdicts for one stage.
#[derive(Debug, Clone)]
pub struct StageReport {
    pub index: usize,
    pub family: FamilyName,
    pub d_odd: Integer,
    pub c_odd: Integer,
    pub n_star: usize,
    pub kappa: Integer,
    pub kappa_prev: Integer,
    pub alpha: Integer,
    pub e_bound: Integer,
    pub e_next: Integer,
    pub precision: u32,
    pub t: Rational,
    /// `|t − c/d|` at the representative.
    pub t_distance: Float,
    /// `1/(d²·e_{2i+2})`, valid for every `t` with this prefix.
    pub t_distance_uniform: Float,
    /// `|y − xᵢ|`.
    pub point_distance: Float,
    pub q_n_y: Float,
    pub q_nm1_y: Float,
    pub chi_y: Float,
    pub q_n_x: Float,
    pub q_nm1_x: Float,
    pub chi_x: Float,
    pub dq_n: Float,
    pub dq_nm1: Float,
    pub dchi_abs: Float,
    /// Extra room covering every `t` in the cylinder of the prefix through `e_{2i+2}`.
    pub slack_q: Float,
    pub slack_q_prev: Float,
    pub slack_chi: Float,
    pub gap: Float,
    /// Lower bound on the gap over the whole cylinder.
    pub gap_lower: Float,
    pub threshold: Rational,
    pub checks: StageChecks,
    /// The `P` and `2P` runs agree.
    pub reliable: bool,
    pub congruence_ok: bool,
    pub trajectory: Vec<TrajectoryPoint>,
}

impl StageReport {
    pub fn passed(&self) -> bool {
        self.checks.all() && self.reliable && self.congruence_ok
    }
}

struct Run {
    q_n: Complex,
    q_nm1: Complex,
    chi: Complex,
    gap: Option<Float>,
    trajectory: Vec<TrajectoryPoint>,
}

fn approx_gap(s: &Approximants<Complex>, prec: u32) -> Option<Float> {
    let tol = pow2(-(prec as i32) / 2, prec);
    if abs(&s.q_curr) < tol || abs(&s.q_prev) < tol {
        return None;
    }
    let w1 = Complex::with_val(prec, &s.p_curr / &s.q_curr);
    let w0 = Complex::with_val(prec, &s.p_prev / &s.q_prev);
    Some(abs(&Complex::with_val(prec, w1 - w0)))
}

fn run_at(f: &FamilySpec, point: Point, n: usize, prec: u32, keep: bool) -> Run {
    let fam = FamilyAt::new(*f, point);
    let c = AtPrecision { coeffs: &fam, prec };
    let mut s = Approximants::init(&c);
    let mut trajectory = Vec::new();
    for _ in 0..n {
        s.step(&c);
        if keep {
            trajectory.push(TrajectoryPoint { n: s.n, q_abs: abs(&s.q_curr), gap: approx_gap(&s, prec) });
        }
    }
    Run { gap: approx_gap(&s, prec), q_n: s.q_curr, q_nm1: s.q_prev, chi: s.chi, trajectory }
}

fn agree(a: &Float, b: &Float, prec: u32) -> bool {
    let diff = Float::with_val(prec, a - b).abs();
    let scale = Float::with_val(prec, b.clone().abs()).max(&Float::with_val(prec, 1));
    diff <= pow2(-(prec as i32) / 2, prec) * scale
}

/// Verifies stage `i` at the representative `t`.
pub fn verify_stage(w: &Witness, i: usize, precision: u32) -> Result<StageReport, WitnessError> {
    verify_stage_at(w, i, &w.representative(), precision)
}

/// Verifies stage `i` at a caller-chosen `t`.
pub fn verify_stage_at(
    w: &Witness,
    i: usize,
    t: &Rational,
    precision: u32,
) -> Result<StageReport, WitnessError> {
    let f = w.plan.family;
    let st = w.stage(i).ok_or(WitnessError::StageNotVerifiable(i))?;
    if st.status != StageStatus::Verifiable {
        return Err(WitnessError::StageNotVerifiable(i));
    }
    let needed = st.required_precision().expect("verifiable stage has κ");
    if precision < needed {
        return Err(WitnessError::PrecisionTooLow { given: precision, needed });
    }
    let (j, dd) = f.congruence().expect("proved family");
    let c1 = f.c1().expect("proved family");
    let c2 = f.c2().expect("proved family");
    let threshold = f.gap_threshold().expect("proved family");
    let d_odd = st.d_odd.clone().unwrap();
    let c_odd = st.c_odd.clone().unwrap();
    let n = st.n_star.as_ref().unwrap().to_usize().unwrap();
    let kappa = st.kappa.clone().unwrap();
    let kappa_prev = st.kappa_prev.clone().unwrap();
    let alpha = st.alpha.clone().unwrap();
    let e_next = st.e_next.clone().unwrap();
    let p = precision;

    let x_t = Rational::from((c_odd.clone(), d_odd.clone()));
    let y_pt = Point::Circle(t.clone());
    let x_pt = Point::Circle(x_t.clone());

    let ry = run_at(&f, y_pt.clone(), n, p, true);
    let rx = run_at(&f, x_pt.clone(), n, p, false);
    let ry2 = run_at(&f, y_pt.clone(), n, 2 * p, false);
    let rx2 = run_at(&f, x_pt.clone(), n, 2 * p, false);

    let q_n_y = abs(&ry.q_n);
    let q_nm1_y = abs(&ry.q_nm1);
    let chi_y = abs(&ry.chi);
    let q_n_x = abs(&rx.q_n);
    let q_nm1_x = abs(&rx.q_nm1);
    let chi_x = abs(&rx.chi);
    let dq_n = abs(&Complex::with_val(p, &ry.q_n - &rx.q_n));
    let dq_nm1 = abs(&Complex::with_val(p, &ry.q_nm1 - &rx.q_nm1));
    let dchi_abs = Float::with_val(p, &chi_y - &chi_x).abs();

    let reliable = agree(&q_n_y, &abs(&ry2.q_n), p)
        && agree(&q_nm1_y, &abs(&ry2.q_nm1), p)
        && agree(&chi_y, &abs(&ry2.chi), p)
        && agree(&q_n_x, &abs(&rx2.q_n), p)
        && agree(&q_nm1_x, &abs(&rx2.q_nm1), p)
        && agree(&chi_x, &abs(&rx2.chi), p)
        && match (&ry.gap, &ry2.gap) {
            (Some(a), Some(b)) => agree(a, b, p),
            _ => false,
        };

    let t_distance = Float::with_val(p, Rational::from(t - &x_t).abs());
    let d_f = Float::with_val(p, &d_odd);
    let t_distance_uniform = Float::with_val(p, 1) / (Float::with_val(p, d_f.square_ref()) * &e_next);
    let point_distance = abs(&Complex::with_val(p, y_pt.value(p) - x_pt.value(p)));

    // Every t sharing the prefix through e_{2i+2} lies within 1/(d_{2i+2}(d_{2i+2} + d_{2i+1})) of ours.
    let d_even = Integer::from(&e_next * &d_odd) + st.d_even_prev.as_ref().unwrap();
    let rho =
        Float::with_val(p, 1) / Float::with_val(p, Integer::from(&d_even * Integer::from(&d_even + &d_odd)));
    let two_pi_rho = Float::with_val(p, pi(p) * 2u32) * &rho;
    let slack_q = Float::with_val(p, &two_pi_rho * &kappa);
    let slack_q_prev = Float::with_val(p, &two_pi_rho * &kappa_prev);
    let slack_chi = Float::with_val(p, &two_pi_rho * &alpha);

    let one = Float::with_val(p, 1);
    let c1_f = Float::with_val(p, &c1);
    let half_c1 = Float::with_val(p, &c1_f / 2u32);
    let bound_q = Float::with_val(p, Rational::from(&c2 + 1u32));

    let gap = ry.gap.clone().unwrap_or_else(|| Float::with_val(p, 0));
    let gap_lower = {
        let num = Float::with_val(p, &chi_y - &slack_chi);
        let den = Float::with_val(p, &q_n_y + &slack_q) * Float::with_val(p, &q_nm1_y + &slack_q_prev);
        Float::with_val(p, num / den)
    };

    let two_pi = Float::with_val(p, pi(p) * 2u32);
    let tdif = Float::with_val(p, &t_distance_uniform * &two_pi) * &kappa < 1;
    let aldif = Float::with_val(p, &t_distance_uniform * &two_pi)
        * Float::with_val(p, Integer::from(&alpha * 2u32))
        < c1_f;

    let checks = StageChecks {
        nqm: Float::with_val(p, &dq_n + &slack_q) < one,
        nq: Float::with_val(p, &dq_nm1 + &slack_q_prev) < one,
        qnb: Float::with_val(p, &q_n_y + &slack_q) < bound_q,
        qnb1: Float::with_val(p, &q_nm1_y + &slack_q_prev) < bound_q,
        fqm: Float::with_val(p, &dchi_abs + &slack_chi) < half_c1,
        fnb: Float::with_val(p, &chi_y - &slack_chi) > half_c1,
        gap: gap_lower > Float::with_val(p, &threshold) && gap > Float::with_val(p, &threshold),
        tdif,
        aldif,
    };

    Ok(StageReport {
        index: i,
        family: f.name,
        congruence_ok: Integer::from(&d_odd % dd) == j % dd,
        d_odd,
        c_odd,
        n_star: n,
        kappa,
        kappa_prev,
        alpha,
        e_bound: st.e_bound.clone().unwrap(),
        e_next,
        precision: p,
        t: t.clone(),
        t_distance,
        t_distance_uniform,
        point_distance,
        q_n_y,
        q_nm1_y,
        chi_y,
        q_n_x,
        q_nm1_x,
        chi_x,
        dq_n,
        dq_nm1,
        dchi_abs,
        slack_q,
        slack_q_prev,
        slack_chi,
        gap,
        gap_lower,
        threshold,
        checks,
        reliable,
        trajectory: ry.trajectory,
    })
}

/// Both exact root-of-unity hypotheses at order `m`.
pub fn root_of_unity_checks(f: &FamilySpec, m: u64) -> Result<bool, WitnessError> {
    if !f.is_proved() {
        return Err(WitnessError::NotProved(f.name));
    }
    let row = table_check(f, m)?;
    let chi = chi_magnitude_check(f, m)?;
    Ok(row.matches && chi.passes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::make_family;
    use crate::lipschitz::family_sequence;

    #[test]
    fn k_stage_one_prefix() {
        let k = make_family(FamilyName::K);
        let w = build_witness(&WitnessPlan::new(k, 1)).unwrap();
        let st = &w.stages[0];
        assert_eq!(st.d_odd.clone().unwrap(), 11);
        assert_eq!(st.n_star.clone().unwrap(), 10);
        assert!(st.alpha.clone().unwrap() >= 55);
        let exact = family_sequence(&k, Flavor::Kappa, 10);
        assert_eq!(st.kappa.as_ref().unwrap(), exact.get(10).unwrap());
        assert_eq!(st.kappa_prev.as_ref().unwrap(), exact.get(9).unwrap());
        // ⌈(2π/121)·max{κ₁₀, 110}⌉
        let want = (2.0 * std::f64::consts::PI / 121.0 * exact.get(10).unwrap().to_f64().max(110.0)).ceil();
        assert_eq!(st.e_bound.clone().unwrap(), want as i64);
        assert_eq!(w.prefix.quotients.len(), 5);
    }

    #[test]
    fn s3_prefix() {
        let w = build_witness(&WitnessPlan::new(make_family(FamilyName::S3), 1)).unwrap();
        assert_eq!(w.stages[0].d_odd.clone().unwrap(), 13);
    }

    #[test]
    fn gates() {
        assert!(matches!(
            build_witness(&WitnessPlan::new(make_family(FamilyName::GG), 1)),
            Err(WitnessError::NotProved(FamilyName::GG))
        ));
        let mut plan = WitnessPlan::new(make_family(FamilyName::K), 1);
        plan.odd = Some(Integer::from(4));
        assert!(matches!(build_witness(&plan), Err(WitnessError::BadFreeQuotient { .. })));
    }

    #[test]
    fn k_stage_one_verifies() {
        let w = build_witness(&WitnessPlan::new(make_family(FamilyName::K), 1)).unwrap();
        let r = verify_stage(&w, 1, 512).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert!(r.gap > 0.125);
        assert_eq!(r.trajectory.len(), 10);
    }

    #[test]
    fn coincident_points_have_zero_differences() {
        let w = build_witness(&WitnessPlan::new(make_family(FamilyName::K), 1)).unwrap();
        let st = &w.stages[0];
        let x = Rational::from((st.c_odd.clone().unwrap(), st.d_odd.clone().unwrap()));
        let r = verify_stage_at(&w, 1, &x, 256).unwrap();
        assert!(r.dq_n.is_zero() && r.dq_nm1.is_zero() && r.dchi_abs.is_zero());
        assert!(r.checks.nqm && r.checks.nq && r.checks.fqm);
    }

    #[test]
    fn precision_gate() {
        let w = build_witness(&WitnessPlan::new(make_family(FamilyName::S2), 1)).unwrap();
        assert!(matches!(verify_stage(&w, 1, 64), Err(WitnessError::PrecisionTooLow { .. })));
    }

    #[test]
    fn root_checks() {
        assert!(root_of_unity_checks(&make_family(FamilyName::K), 11).unwrap());
        assert!(root_of_unity_checks(&make_family(FamilyName::S1), 13).unwrap());
        assert!(matches!(
            root_of_unity_checks(&make_family(FamilyName::K), 7),
            Err(WitnessError::Family(FamilyError::NotAdmissible { .. }))
        ));
    }
}
