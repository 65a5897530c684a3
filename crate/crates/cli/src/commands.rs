use std::fs;
use std::time::Instant;

use qcf_core::cf_engine::Limit;
use qcf_core::families::{product_identity_residue, table_check};
use qcf_core::numeric::Point;
use qcf_core::rcf::{decimal_digits, tower_number};
use qcf_core::witness::{
    build_witness, gg_explore, outside_circle_check, schur_check, verify_stage, Expectation, SchurValue,
    SideResult, StageReport, StageStatus, WitnessError, WitnessPlan, GG_BANNER,
};
use qcf_core::{make_family, FamilyName, FamilySpec};
use rug::{Float, Rational};
use serde::Serialize;

use crate::report::{
    int, rational, residue, ComplexValue, ConfigEcho, Decimal, Report, Summary, Table, Timestamp, TOOL,
    VERSION,
};
use crate::{Cli, Command, Format, Opts};

const MIN_PRECISION: u32 = 64;
const MAX_DIGITS: usize = 100_000;
const OUTSIDE_TOLERANCE: f64 = 1e-25;
const TOWER_REFERENCE: &str = concat!(
    "0.484848484848484848484848484848484848484848484848484848484",
    "84848484848484848484849277885083112437522992318812011"
);
const GG_CONJECTURE: &str =
    "at primitive m-th roots GG and S2 agree unless m = 2 (mod 4), where GG diverges and S2 converges";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
    #[error("rendering csv: {0}")]
    Csv(#[from] csv::Error),
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

struct Rendered {
    json: String,
    table: Table,
    passed: bool,
}

struct Ctx<'a> {
    command: &'static str,
    opts: &'a Opts,
    started: Instant,
    started_utc: String,
    item_ms: Vec<u128>,
}

impl<'a> Ctx<'a> {
    fn timed<T>(&mut self, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.item_ms.push(t.elapsed().as_millis());
        out
    }

    fn echo(&self, families: Vec<String>) -> ConfigEcho {
        ConfigEcho {
            command: self.command,
            families,
            m_min: None,
            m_max: None,
            stages: None,
            precision: None,
            digits: None,
            q: Vec::new(),
            j_max: None,
            format: self.opts.format.as_str(),
            out: self.opts.out.clone(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn finish<T: Serialize, X: Serialize>(
        self,
        config: ConfigEcho,
        banner: Option<&'static str>,
        results: Vec<T>,
        flags: Vec<bool>,
        details: Option<X>,
        table: Table,
        never_fails: bool,
    ) -> Result<Rendered, CliError> {
        let summary = Summary::from_flags(flags);
        let passed = never_fails || summary.all_passed;
        let report = Report {
            tool: TOOL,
            version: VERSION,
            banner,
            config,
            results,
            summary,
            details,
            timestamp: Timestamp {
                started_utc: self.started_utc,
                elapsed_ms: self.started.elapsed().as_millis(),
                item_elapsed_ms: self.item_ms,
            },
        };
        let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        Ok(Rendered { json, table, passed })
    }
}

fn precision(opts: &Opts, default: u32) -> u32 {
    opts.precision.unwrap_or(default)
}

fn m_range(opts: &Opts, min: u64, max: u64) -> Result<(u64, u64), CliError> {
    let lo = opts.m_min.unwrap_or(min);
    let hi = opts.m_max.unwrap_or(max);
    if lo > hi {
        return Err(usage(format!("empty m-range {lo}..={hi}")));
    }
    Ok((lo, hi))
}

fn proved_families(opts: &Opts) -> Result<Vec<FamilySpec>, CliError> {
    let Some(list) = &opts.family else {
        return Ok(FamilyName::PROVED.map(make_family).to_vec());
    };
    list.split(',')
        .map(|s| {
            let f = FamilySpec::parse(s.trim()).map_err(usage)?;
            if !f.is_proved() {
                return Err(usage(format!("family {} has no root-of-unity table data", f.name)));
            }
            Ok(f)
        })
        .collect()
}

fn single_proved_family(opts: &Opts) -> Result<FamilySpec, CliError> {
    if opts.family.is_none() {
        return Ok(make_family(FamilyName::K));
    }
    match proved_families(opts)?.as_slice() {
        [f] => Ok(*f),
        _ => Err(usage("exactly one family is expected")),
    }
}

pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let opts = &cli.opts;
    if let Some(p) = opts.precision {
        if p < MIN_PRECISION {
            return Err(usage(format!("precision must be at least {MIN_PRECISION} bits, got {p}")));
        }
    }
    let command = match cli.command {
        Command::VerifyTable => "verify-table",
        Command::Witness => "witness",
        Command::Schur => "schur",
        Command::ProductIdentity => "product-identity",
        Command::CorollaryDigits => "corollary-digits",
        Command::OutsideLimits => "outside-limits",
        Command::GgExplore => "gg-explore",
    };
    let ctx = Ctx {
        command,
        opts,
        started: Instant::now(),
        started_utc: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        item_ms: Vec::new(),
    };
    let r = match cli.command {
        Command::VerifyTable => verify_table(ctx)?,
        Command::Witness => witness(ctx)?,
        Command::Schur => schur(ctx)?,
        Command::ProductIdentity => product_identity(ctx)?,
        Command::CorollaryDigits => corollary_digits(ctx)?,
        Command::OutsideLimits => outside_limits(ctx)?,
        Command::GgExplore => gg(ctx)?,
    };
    let text = match opts.format {
        Format::Json => r.json,
        Format::Csv => r.table.to_csv()?,
    };
    match &opts.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(r.passed)
}

#[derive(Serialize)]
struct TableRowOut {
    family: String,
    m: u64,
    n_of_m: u64,
    expected_q_n_minus_1: String,
    expected_q_n: String,
    residue_q_n_minus_1: Vec<String>,
    residue_q_n: Vec<String>,
    matches: bool,
}

fn verify_table(mut ctx: Ctx) -> Result<Rendered, CliError> {
    let families = proved_families(ctx.opts)?;
    let (lo, hi) = m_range(ctx.opts, 2, 201)?;
    let mut rows = Vec::new();
    let mut table = Table::new(&["family", "m", "n", "expected_q_n_minus_1", "expected_q_n", "matches"]);
    for f in &families {
        for m in f.admissible_orders(lo, hi) {
            let r = ctx.timed(|| table_check(f, m)).map_err(usage)?;
            table.push(vec![
                f.name.to_string(),
                m.to_string(),
                r.n_of_m.to_string(),
                r.expected_nm_minus1.to_string(),
                r.expected_nm.to_string(),
                r.matches.to_string(),
            ]);
            rows.push(TableRowOut {
                family: f.name.to_string(),
                m,
                n_of_m: r.n_of_m,
                expected_q_n_minus_1: r.expected_nm_minus1.to_string(),
                expected_q_n: r.expected_nm.to_string(),
                residue_q_n_minus_1: residue(&r.residue_nm_minus1),
                residue_q_n: residue(&r.residue_nm),
                matches: r.matches,
            });
        }
    }
    let mut config = ctx.echo(families.iter().map(|f| f.name.to_string()).collect());
    config.m_min = Some(lo);
    config.m_max = Some(hi);
    let flags = rows.iter().map(|r| r.matches).collect();
    ctx.finish(config, None, rows, flags, None::<()>, table, false)
}

#[derive(Serialize)]
struct CheckOut {
    name: &'static str,
    passed: bool,
}

#[derive(Serialize)]
struct VerificationOut {
    precision: u32,
    t: String,
    t_distance: Decimal,
    t_distance_uniform: Decimal,
    point_distance: Decimal,
    q_n_y: Decimal,
    q_n_minus_1_y: Decimal,
    chi_y: Decimal,
    q_n_x: Decimal,
    q_n_minus_1_x: Decimal,
    chi_x: Decimal,
    slack_q: Decimal,
    slack_q_prev: Decimal,
    slack_chi: Decimal,
    gap: Decimal,
    gap_lower: Decimal,
    threshold: String,
    checks: Vec<CheckOut>,
    reliable: bool,
    congruence_ok: bool,
    passed: bool,
}

impl VerificationOut {
    fn of(r: &StageReport) -> Self {
        VerificationOut {
            precision: r.precision,
            t: rational(&r.t),
            t_distance: Decimal::of(&r.t_distance),
            t_distance_uniform: Decimal::of(&r.t_distance_uniform),
            point_distance: Decimal::of(&r.point_distance),
            q_n_y: Decimal::of(&r.q_n_y),
            q_n_minus_1_y: Decimal::of(&r.q_nm1_y),
            chi_y: Decimal::of(&r.chi_y),
            q_n_x: Decimal::of(&r.q_n_x),
            q_n_minus_1_x: Decimal::of(&r.q_nm1_x),
            chi_x: Decimal::of(&r.chi_x),
            slack_q: Decimal::of(&r.slack_q),
            slack_q_prev: Decimal::of(&r.slack_q_prev),
            slack_chi: Decimal::of(&r.slack_chi),
            gap: Decimal::of(&r.gap),
            gap_lower: Decimal::of(&r.gap_lower),
            threshold: rational(&r.threshold),
            checks: r.checks.named().into_iter().map(|(name, passed)| CheckOut { name, passed }).collect(),
            reliable: r.reliable,
            congruence_ok: r.congruence_ok,
            passed: r.passed(),
        }
    }
}

#[derive(Serialize)]
struct StageOut {
    index: usize,
    status: &'static str,
    c_odd: Option<String>,
    d_odd: Option<String>,
    d_even_prev: Option<String>,
    n_star: Option<String>,
    kappa: Option<String>,
    kappa_prev: Option<String>,
    alpha: Option<String>,
    e_bound: Option<String>,
    e_next: Option<String>,
    log2_e_lower_bound: Option<String>,
    verification: Option<VerificationOut>,
    error: Option<String>,
}

#[derive(Serialize)]
struct WitnessDetails {
    family: String,
    threshold: String,
    prefix: Vec<String>,
    verified_stages: Vec<usize>,
}

/// Dyadic thresholds print exactly through `f64`.
fn threshold_decimal(r: &Rational) -> String {
    format!("{}", r.to_f64())
}

fn witness(mut ctx: Ctx) -> Result<Rendered, CliError> {
    let f = single_proved_family(ctx.opts)?;
    let stages = ctx.opts.stages.unwrap_or(1);
    let min_prec = precision(ctx.opts, 256);
    let w = build_witness(&WitnessPlan::new(f, stages)).map_err(usage)?;
    let threshold = f.gap_threshold().expect("proved family");
    let mut rows = Vec::new();
    let mut flags = Vec::new();
    let mut verified = Vec::new();
    let mut deepest: Option<StageReport> = None;
    for st in &w.stages {
        let s = |x: &Option<rug::Integer>| x.as_ref().map(int);
        let mut row = StageOut {
            index: st.index,
            status: st.status.as_str(),
            c_odd: s(&st.c_odd),
            d_odd: s(&st.d_odd),
            d_even_prev: s(&st.d_even_prev),
            n_star: s(&st.n_star),
            kappa: s(&st.kappa),
            kappa_prev: s(&st.kappa_prev),
            alpha: s(&st.alpha),
            e_bound: s(&st.e_bound),
            e_next: s(&st.e_next),
            log2_e_lower_bound: s(&st.log2_e_lower_bound),
            verification: None,
            error: None,
        };
        if st.status == StageStatus::Verifiable {
            let prec = st.required_precision().unwrap_or(0).max(min_prec);
            match ctx.timed(|| verify_stage(&w, st.index, prec)) {
                Ok(r) => {
                    flags.push(r.passed());
                    verified.push(st.index);
                    row.verification = Some(VerificationOut::of(&r));
                    deepest = Some(r);
                }
                Err(e @ WitnessError::Cf(_)) => {
                    flags.push(false);
                    row.error = Some(e.to_string());
                }
                Err(e) => return Err(usage(e)),
            }
        }
        rows.push(row);
    }
    let mut table = Table::new(&["n", "|Q_n(y)|", "gap", "threshold"]);
    if let Some(r) = &deepest {
        let thr = threshold_decimal(&threshold);
        for p in &r.trajectory {
            table.push(vec![
                p.n.to_string(),
                Decimal::of(&p.q_abs).value,
                p.gap.as_ref().map(|g| Decimal::of(g).value).unwrap_or_default(),
                thr.clone(),
            ]);
        }
    }
    let details = WitnessDetails {
        family: f.name.to_string(),
        threshold: rational(&threshold),
        prefix: w.prefix.quotients.iter().map(|q| q.to_string()).collect(),
        verified_stages: verified,
    };
    let mut config = ctx.echo(vec![f.name.to_string()]);
    config.stages = Some(stages);
    config.precision = Some(min_prec);
    ctx.finish(config, None, rows, flags, Some(details), table, false)
}

#[derive(Serialize)]
struct SchurRow {
    m: u64,
    k: i64,
    class: &'static str,
    pinned_residues: Vec<usize>,
    formula: Option<ComplexValue>,
    periodic_limit: &'static str,
    periodic_value: Option<ComplexValue>,
    difference: Option<Decimal>,
    agrees: bool,
}

fn schur(mut ctx: Ctx) -> Result<Rendered, CliError> {
    let (lo, hi) = m_range(ctx.opts, 1, 50)?;
    if lo == 0 {
        return Err(usage("m must be positive"));
    }
    let prec = precision(ctx.opts, 256);
    let mut rows = Vec::new();
    let mut table = Table::new(&[
        "m",
        "k",
        "class",
        "formula_re",
        "formula_im",
        "periodic_re",
        "periodic_im",
        "difference",
        "agrees",
    ]);
    for m in lo..=hi {
        let c = ctx.timed(|| schur_check(m, prec)).map_err(usage)?;
        let formula = match &c.formula {
            SchurValue::Value(z) => Some(ComplexValue::of(z)),
            SchurValue::Diverges => None,
        };
        let (kind, value) = match &c.periodic.limit {
            Some(Limit::Finite(z)) => ("finite", Some(ComplexValue::of(z))),
            Some(Limit::Infinity) => ("infinity", None),
            None => ("diverges", None),
        };
        let cell = |v: &Option<ComplexValue>, re: bool| {
            v.as_ref().map(|z| if re { z.re.value.clone() } else { z.im.value.clone() }).unwrap_or_default()
        };
        let difference = c.difference.as_ref().map(Decimal::of);
        table.push(vec![
            m.to_string(),
            c.k.to_string(),
            c.class().as_str().to_string(),
            cell(&formula, true),
            cell(&formula, false),
            cell(&value, true),
            cell(&value, false),
            difference.as_ref().map(|d| d.value.clone()).unwrap_or_default(),
            c.agrees.to_string(),
        ]);
        rows.push(SchurRow {
            m,
            k: c.k,
            class: c.class().as_str(),
            pinned_residues: c.periodic.pinned_residues.clone(),
            formula,
            periodic_limit: kind,
            periodic_value: value,
            difference,
            agrees: c.agrees,
        });
    }
    let mut config = ctx.echo(vec![FamilyName::K.to_string()]);
    config.m_min = Some(lo);
    config.m_max = Some(hi);
    config.precision = Some(prec);
    let flags = rows.iter().map(|r| r.agrees).collect();
    ctx.finish(config, None, rows, flags, None::<()>, table, false)
}

#[derive(Serialize)]
struct ProductRow {
    m: u64,
    holds: bool,
    residue: Vec<String>,
}

fn product_identity(mut ctx: Ctx) -> Result<Rendered, CliError> {
    let (lo, hi) = m_range(ctx.opts, 3, 501)?;
    let mut rows = Vec::new();
    let mut table = Table::new(&["m", "holds"]);
    for m in (lo.max(3)..=hi).filter(|m| m % 2 == 1) {
        let r = ctx.timed(|| product_identity_residue(m)).map_err(usage)?;
        let holds = r.is_one();
        table.push(vec![m.to_string(), holds.to_string()]);
        rows.push(ProductRow { m, holds, residue: residue(&r) });
    }
    let mut config = ctx.echo(Vec::new());
    config.m_min = Some(lo);
    config.m_max = Some(hi);
    let flags = rows.iter().map(|r| r.holds).collect();
    ctx.finish(config, None, rows, flags, None::<()>, table, false)
}

#[derive(Serialize)]
struct DigitsRow {
    digits: usize,
    expansion: String,
    reference_digits_compared: usize,
    matches_reference: bool,
}

fn corollary_digits(mut ctx: Ctx) -> Result<Rendered, CliError> {
    let n = ctx.opts.digits.unwrap_or(110);
    if n == 0 || n > MAX_DIGITS {
        return Err(usage(format!("digits must be in 1..={MAX_DIGITS}")));
    }
    let expansion = ctx.timed(|| decimal_digits(&tower_number(4), n)).map_err(usage)?;
    let compared = expansion.len().min(TOWER_REFERENCE.len());
    let matches = expansion[..compared] == TOWER_REFERENCE[..compared];
    let mut table = Table::new(&["digits", "expansion"]);
    table.push(vec![n.to_string(), expansion.clone()]);
    let row = DigitsRow {
        digits: n,
        expansion,
        reference_digits_compared: compared - 2,
        matches_reference: matches,
    };
    let mut config = ctx.echo(Vec::new());
    config.digits = Some(n);
    ctx.finish(config, None, vec![row], vec![matches], None::<()>, table, false)
}

#[derive(Serialize)]
struct OutsideRow {
    q: String,
    j_max: usize,
    precision: u32,
    odd: ComplexValue,
    even: ComplexValue,
    inv_k_neg_inv: ComplexValue,
    k_inv_fourth: ComplexValue,
    odd_vs_inv_k_neg_inv: Decimal,
    even_vs_k_inv_fourth_over_q: Decimal,
    even_vs_inv_k_neg_inv: Decimal,
    odd_vs_q_k_inv_fourth: Decimal,
    tolerance: String,
    reliable: bool,
    even_to_inv_k_neg_inv: bool,
    odd_to_q_k_inv_fourth: bool,
    passed: bool,
}

fn outside_limits(mut ctx: Ctx) -> Result<Rendered, CliError> {
    let qs: Vec<String> =
        if ctx.opts.q.is_empty() { vec!["2".into(), "-3".into()] } else { ctx.opts.q.clone() };
    let j_max = ctx.opts.j_max.unwrap_or(200);
    let prec = precision(ctx.opts, 256);
    let mut rows = Vec::new();
    let mut table = Table::new(&[
        "q",
        "odd_re",
        "even_re",
        "odd_vs_inv_k_neg_inv",
        "even_vs_k_inv_fourth_over_q",
        "even_vs_inv_k_neg_inv",
        "odd_vs_q_k_inv_fourth",
        "passed",
    ]);
    for s in &qs {
        let q: Rational = s.parse().map_err(|_| usage(format!("cannot parse q = {s}")))?;
        let r = ctx.timed(|| outside_circle_check(&Point::real(q.clone()), j_max, prec)).map_err(usage)?;
        let tol = Float::with_val(prec, OUTSIDE_TOLERANCE);
        let even_ok = r.even_vs_inv_k_neg_inv < tol;
        let odd_ok = r.odd_vs_q_k_inv_fourth < tol;
        let passed = r.reliable && even_ok && odd_ok;
        let row = OutsideRow {
            q: rational(&q),
            j_max: r.j_max,
            precision: r.precision,
            odd: ComplexValue::of(&r.odd),
            even: ComplexValue::of(&r.even),
            inv_k_neg_inv: ComplexValue::of(&r.inv_k_neg_inv),
            k_inv_fourth: ComplexValue::of(&r.k_inv_fourth),
            odd_vs_inv_k_neg_inv: Decimal::of(&r.odd_vs_inv_k_neg_inv),
            even_vs_k_inv_fourth_over_q: Decimal::of(&r.even_vs_k_inv_fourth_over_q),
            even_vs_inv_k_neg_inv: Decimal::of(&r.even_vs_inv_k_neg_inv),
            odd_vs_q_k_inv_fourth: Decimal::of(&r.odd_vs_q_k_inv_fourth),
            tolerance: format!("{OUTSIDE_TOLERANCE:e}"),
            reliable: r.reliable,
            even_to_inv_k_neg_inv: even_ok,
            odd_to_q_k_inv_fourth: odd_ok,
            passed,
        };
        table.push(vec![
            row.q.clone(),
            row.odd.re.value.clone(),
            row.even.re.value.clone(),
            row.odd_vs_inv_k_neg_inv.value.clone(),
            row.even_vs_k_inv_fourth_over_q.value.clone(),
            row.even_vs_inv_k_neg_inv.value.clone(),
            row.odd_vs_q_k_inv_fourth.value.clone(),
            passed.to_string(),
        ]);
        rows.push(row);
    }
    let mut config = ctx.echo(vec![FamilyName::K.to_string()]);
    config.q = rows.iter().map(|r| r.q.clone()).collect();
    config.j_max = Some(j_max);
    config.precision = Some(prec);
    let flags = rows.iter().map(|r| r.passed).collect();
    ctx.finish(config, None, rows, flags, None::<()>, table, false)
}

#[derive(Serialize)]
struct SideOut {
    outcome: &'static str,
    value: Option<ComplexValue>,
    class: Option<&'static str>,
    terminates_at: Option<usize>,
    pinned_residues: Vec<usize>,
    note: Option<String>,
}

impl SideOut {
    fn of(s: &SideResult) -> Self {
        let mut out = SideOut {
            outcome: s.label(),
            value: s.value().map(ComplexValue::of),
            class: None,
            terminates_at: None,
            pinned_residues: Vec::new(),
            note: None,
        };
        match s {
            SideResult::Finite { class, terminates_at, .. }
            | SideResult::Infinite { class, terminates_at } => {
                out.class = class.map(|c| c.as_str());
                out.terminates_at = *terminates_at;
            }
            SideResult::Divergent { class, pinned_residues } => {
                out.class = Some(class.as_str());
                out.pinned_residues = pinned_residues.clone();
            }
            SideResult::Undecided(why) => out.note = Some(why.clone()),
        }
        out
    }
}

#[derive(Serialize)]
struct GgRowOut {
    m: u64,
    k: i64,
    expectation: &'static str,
    gg: SideOut,
    s2: SideOut,
    agree: bool,
    difference: Option<Decimal>,
    consistent: bool,
}

#[derive(Serialize)]
struct GgDetails {
    conjecture: &'static str,
    exceptions: usize,
    exceptional_orders: Vec<u64>,
}

fn gg(mut ctx: Ctx) -> Result<Rendered, CliError> {
    let (lo, hi) = m_range(ctx.opts, 1, 60)?;
    let prec = precision(ctx.opts, 256);
    let report = ctx.timed(|| gg_explore(lo, hi, prec));
    let mut table = Table::new(&["m", "k", "expectation", "gg", "s2", "agree", "consistent", "difference"]);
    let rows: Vec<GgRowOut> = report
        .rows
        .iter()
        .map(|r| {
            let expectation = match r.expectation {
                Expectation::Agree => "agree",
                Expectation::GgDivergesS2Converges => "gg-diverges-s2-converges",
            };
            let difference = r.difference.as_ref().map(Decimal::of);
            table.push(vec![
                r.m.to_string(),
                r.k.to_string(),
                expectation.to_string(),
                r.gg.label().to_string(),
                r.s2.label().to_string(),
                r.agree.to_string(),
                r.consistent.to_string(),
                difference.as_ref().map(|d| d.value.clone()).unwrap_or_default(),
            ]);
            GgRowOut {
                m: r.m,
                k: r.k,
                expectation,
                gg: SideOut::of(&r.gg),
                s2: SideOut::of(&r.s2),
                agree: r.agree,
                difference,
                consistent: r.consistent,
            }
        })
        .collect();
    let details = GgDetails {
        conjecture: GG_CONJECTURE,
        exceptions: report.exceptions().count(),
        exceptional_orders: report.exceptional_orders(),
    };
    let mut config = ctx.echo(vec![FamilyName::GG.to_string(), FamilyName::S2.to_string()]);
    config.m_min = Some(lo);
    config.m_max = Some(hi);
    config.precision = Some(prec);
    let flags = rows.iter().map(|r| r.consistent).collect();
    ctx.finish(config, Some(GG_BANNER), rows, flags, Some(details), table, true)
}
