//! Exploratory comparison of GG and S2 at roots of unity.
//!
//! The pattern under test: at primitive m-th roots both agree (same finite limit, or both
//! diverge) unless `m ≡ 2 (mod 4)`, where GG diverges and S2 converges. Nothing here is
//! asserted; exceptions are listed.

use rug::{Complex, Float};

use crate::arith::gcd;
use crate::cf_engine::CfError;
use crate::cf_engine::{periodic_limit, truncated_value, Limit, MobiusClass};
use crate::families::{make_family, CycloFamily, FamilyName, FamilySpec};
use crate::numeric::{abs, pow2};

pub const BANNER: &str = "CONJECTURE-EXPLORATION";

#[derive(Debug, Clone)]
pub enum SideResult {
    /// Converges to a finite value.
    Finite {
        value: Complex,
        class: Option<MobiusClass>,
        terminates_at: Option<usize>,
    },
    /// Converges to ∞.
    Infinite {
        class: Option<MobiusClass>,
        terminates_at: Option<usize>,
    },
    Divergent {
        class: MobiusClass,
        pinned_residues: Vec<usize>,
    },
    /// Too close to a classification boundary at this precision.
    Undecided(String),
}

impl SideResult {
    pub fn converges_finite(&self) -> bool {
        matches!(self, SideResult::Finite { .. })
    }

    /// Short label: `converges`, `infinite`, `diverges` or `undecided`.
    pub fn label(&self) -> &'static str {
        match self {
            SideResult::Finite { .. } => "converges",
            SideResult::Infinite { .. } => "infinite",
            SideResult::Divergent { .. } => "diverges",
            SideResult::Undecided(_) => "undecided",
        }
    }

    pub fn value(&self) -> Option<&Complex> {
        match self {
            SideResult::Finite { value, .. } => Some(value),
            _ => None,
        }
    }
}

fn classify(f: &FamilySpec, m: u64, k: i64, precision: u32) -> SideResult {
    let cf = CycloFamily::new(*f, m);
    let period = f.period_at(m);
    match truncated_value(&cf, period, k, precision) {
        Ok(Some(t)) => {
            return match t.value {
                Limit::Finite(value) => {
                    SideResult::Finite { value, class: None, terminates_at: Some(t.zero_at) }
                }
                Limit::Infinity => SideResult::Infinite { class: None, terminates_at: Some(t.zero_at) },
            }
        }
        Ok(None) => {}
        Err(e) => return SideResult::Undecided(e.to_string()),
    }
    match periodic_limit(&cf, period, k, precision) {
        Ok(r) => match r.limit {
            Some(Limit::Finite(value)) => {
                SideResult::Finite { value, class: Some(r.class), terminates_at: None }
            }
            Some(Limit::Infinity) => SideResult::Infinite { class: Some(r.class), terminates_at: None },
            None => SideResult::Divergent { class: r.class, pinned_residues: r.pinned_residues },
        },
        Err(CfError::Boundary { precision }) => {
            SideResult::Undecided(format!("classification boundary at {precision} bits"))
        }
        Err(e) => SideResult::Undecided(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Agree,
    GgDivergesS2Converges,
}

#[derive(Debug, Clone)]
pub struct GgRow {
    pub m: u64,
    pub k: i64,
    pub expectation: Expectation,
    pub gg: SideResult,
    pub s2: SideResult,
    /// Both finite and equal, or both non-convergent.
    pub agree: bool,
    pub difference: Option<Float>,
    /// Observation matches the conjectured pattern.
    pub consistent: bool,
}

#[derive(Debug, Clone)]
pub struct GgReport {
    pub banner: &'static str,
    pub m_min: u64,
    pub m_max: u64,
    pub precision: u32,
    /// One row per `(m, k)`, `k` running over all primitive roots.
    pub rows: Vec<GgRow>,
}

impl GgReport {
    pub fn exceptions(&self) -> impl Iterator<Item = &GgRow> {
        self.rows.iter().filter(|r| !r.consistent)
    }

    /// Orders `m` with at least one inconsistent root.
    pub fn exceptional_orders(&self) -> Vec<u64> {
        let mut ms: Vec<u64> = self.exceptions().map(|r| r.m).collect();
        ms.dedup();
        ms
    }
}

fn compare(m: u64, k: i64, precision: u32) -> GgRow {
    let gg = classify(&make_family(FamilyName::GG), m, k, precision);
    let s2 = classify(&make_family(FamilyName::S2), m, k, precision);
    let expectation = if m % 4 == 2 { Expectation::GgDivergesS2Converges } else { Expectation::Agree };
    let tol = pow2(-(precision as i32) / 4, precision);
    let (agree, difference) = match (&gg, &s2) {
        (SideResult::Finite { value: a, .. }, SideResult::Finite { value: b, .. }) => {
            let d = abs(&Complex::with_val(precision, a - b));
            (d <= tol, Some(d))
        }
        (SideResult::Undecided(_), _) | (_, SideResult::Undecided(_)) => (false, None),
        (a, b) => (!a.converges_finite() && !b.converges_finite(), None),
    };
    let consistent = match expectation {
        Expectation::Agree => agree,
        Expectation::GgDivergesS2Converges => !gg.converges_finite() && s2.converges_finite(),
    };
    GgRow { m, k, expectation, gg, s2, agree, difference, consistent }
}

/// Classifies GG and S2 for every primitive m-th root, `m_min ≤ m ≤ m_max`.
pub fn gg_explore(m_min: u64, m_max: u64, precision: u32) -> GgReport {
    let mut rows = Vec::new();
    for m in m_min.max(1)..=m_max {
        for k in (1..=m).filter(|&k| gcd(k, m) == 1) {
            rows.push(compare(m, k as i64, precision));
        }
    }
    GgReport { banner: BANNER, m_min, m_max, precision, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_one_both_converge_to_the_same_value() {
        let r = gg_explore(1, 1, 256);
        let row = &r.rows[0];
        assert!(row.gg.converges_finite() && row.s2.converges_finite());
        assert!(row.agree, "{:?}", row.difference);
    }

    #[test]
    fn order_two_is_reported_not_asserted() {
        let r = gg_explore(2, 2, 256);
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].expectation, Expectation::GgDivergesS2Converges);
        assert_eq!(r.banner, BANNER);
    }
}
