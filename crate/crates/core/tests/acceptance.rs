//! Acceptance suite. Prints one line per criterion.
//!
//! A line marked `FAIL (known)` means the literal statement of the criterion does not hold
//! while the corrected statement printed alongside it was checked and holds. Those lines do
//! not fail the run; any other `FAIL` does.

use std::process::ExitCode;
use std::time::Instant;

use qcf_core::arith::gcd;
use qcf_core::cf_engine::{determinant_check, MobiusClass};
use qcf_core::families::{chi_poly, product_identity_check, table_check};
use qcf_core::lipschitz::{family_lipschitz_check, family_sequence_via_derivatives, Flavor};
use qcf_core::numeric::Point;
use qcf_core::rcf::{decimal_digits, tower_number};
use qcf_core::witness::{
    build_witness, gg_explore, outside_circle_check, schur_check, verify_stage, WitnessPlan,
};
use qcf_core::{make_family, Approximants, FamilyName, IntPoly};
use rug::Integer;

const TABLE_M_MAX: u64 = 201;
const PRODUCT_M_MAX: u64 = 501;
const DET_N_MAX: usize = 200;
const SCHUR_M_MAX: u64 = 50;
const SCHUR_PRECISION: u32 = 256;
const SCHUR_TOL: f64 = 1e-30;
const WITNESS_MIN_PRECISION: u32 = 256;
const DIGITS: usize = 110;
const OUTSIDE_J_MAX: usize = 200;
const OUTSIDE_PRECISION: u32 = 256;
const OUTSIDE_TOL: f64 = 1e-25;
const LIPSCHITZ_N_MAX: usize = 60;
const LIPSCHITZ_TRIALS: usize = 100;
const LIPSCHITZ_PRECISION: u32 = 256;
const GG_M_MAX: u64 = 60;
const GG_PRECISION: u32 = 256;

const TOWER_DIGITS: &str = concat!(
    "0.484848484848484848484848484848484848484848484848484848484",
    "84848484848484848484849277885083112437522992318812011"
);

enum Verdict {
    Pass,
    Fail,
    /// Literal statement fails, corrected statement holds.
    Known,
}

struct Line {
    id: u32,
    name: &'static str,
    verdict: Verdict,
    detail: String,
}

fn line(id: u32, name: &'static str, pass: bool, detail: String) -> Line {
    Line { id, name, verdict: if pass { Verdict::Pass } else { Verdict::Fail }, detail }
}

fn table() -> Line {
    let mut rows = 0;
    let mut bad = Vec::new();
    for name in FamilyName::PROVED {
        let f = make_family(name);
        for m in f.admissible_orders(2, TABLE_M_MAX) {
            rows += 1;
            match table_check(&f, m) {
                Ok(r) if r.matches => {}
                _ => bad.push(format!("{name}@{m}")),
            }
        }
    }
    line(1, "table", bad.is_empty(), format!("{rows} rows, m <= {TABLE_M_MAX}, exact; mismatches {bad:?}"))
}

fn product_identity() -> Line {
    let bad: Vec<u64> =
        (3..=PRODUCT_M_MAX).step_by(2).filter(|&m| !product_identity_check(m).unwrap_or(false)).collect();
    line(
        2,
        "product-identity",
        bad.is_empty(),
        format!("odd 3 <= m <= {PRODUCT_M_MAX}, exact; failures {bad:?}"),
    )
}

fn determinant() -> Line {
    let mut bad = Vec::new();
    for name in FamilyName::ALL {
        let f = make_family(name);
        let mut s: Approximants<IntPoly> = Approximants::init(&f);
        let mut chi = IntPoly::constant(1);
        for n in 1..=DET_N_MAX {
            s.step(&f);
            chi = &chi * &f.a_poly(n);
            if !determinant_check(&s, &chi) {
                bad.push(format!("{name}@{n}"));
            }
        }
        if chi != chi_poly(&f, DET_N_MAX) {
            bad.push(format!("{name}: chi"));
        }
    }
    line(
        3,
        "determinant",
        bad.is_empty(),
        format!("five families, 1 <= n <= {DET_N_MAX}, exact in Z[q]; failures {bad:?}"),
    )
}

fn schur() -> Line {
    let mut worst = 0f64;
    let mut value_bad = Vec::new();
    let mut not_diverging = Vec::new();
    let mut classes = Vec::new();
    for m in 1..=SCHUR_M_MAX {
        let c = match schur_check(m, SCHUR_PRECISION) {
            Ok(c) => c,
            Err(e) => {
                value_bad.push(format!("{m}: {e}"));
                continue;
            }
        };
        if m % 5 == 0 {
            if c.periodic.converges() {
                not_diverging.push(m);
            }
            classes.push((m, c.class()));
        } else {
            match &c.difference {
                Some(d) if d.to_f64() < SCHUR_TOL => worst = worst.max(d.to_f64()),
                _ => value_bad.push(format!("{m}")),
            }
        }
    }
    let all_elliptic = classes.iter().all(|(_, k)| *k == MobiusClass::Elliptic);
    let substantive = value_bad.is_empty() && not_diverging.is_empty();
    let summary: Vec<String> = classes.iter().map(|(m, k)| format!("{m}:{}", k.as_str())).collect();
    let detail = format!(
        "m <= {SCHUR_M_MAX}, m % 5 != 0 agree to {worst:.1e} (tol {SCHUR_TOL:e}, {SCHUR_PRECISION} bits), \
         failures {value_bad:?}; m % 5 == 0 diverge {}; classes [{}]{}",
        not_diverging.is_empty(),
        summary.join(" "),
        if all_elliptic {
            ""
        } else {
            "; divergence comes from a pinned residue of a non-elliptic period map, not elliptic oscillation"
        },
    );
    let verdict = match (substantive, all_elliptic) {
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::Known,
        _ => Verdict::Fail,
    };
    Line { id: 4, name: "schur", verdict, detail }
}

fn witness() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in FamilyName::PROVED {
        let f = make_family(name);
        let outcome = build_witness(&WitnessPlan::new(f, 1)).and_then(|w| {
            let st = w.stage(1).cloned().expect("stage one");
            let prec = st.required_precision().unwrap_or(0).max(WITNESS_MIN_PRECISION);
            verify_stage(&w, 1, prec).map(|r| (st, r, prec))
        });
        match outcome {
            Ok((st, r, prec)) => {
                let mut pass = r.passed();
                if name == FamilyName::K {
                    pass &= r.d_odd == 11 && r.n_star == 10;
                }
                pass &= st
                    .e_next
                    .as_ref()
                    .zip(st.e_bound.as_ref())
                    .is_some_and(|(n, b)| *n == Integer::from(b + 1));
                ok &= pass;
                parts.push(format!(
                    "{name} d={} n*={} gap={:.4} thr={} {}@{prec}",
                    r.d_odd,
                    r.n_star,
                    r.gap.to_f64(),
                    r.threshold,
                    if pass { "ok" } else { "bad" }
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name} error {e}"));
            }
        }
    }
    line(5, "witness-stage-1", ok, parts.join("; "))
}

fn digits() -> Line {
    match decimal_digits(&tower_number(4), DIGITS) {
        Ok(s) => {
            let pass = s == TOWER_DIGITS;
            line(
                6,
                "corollary-digits",
                pass,
                format!("{DIGITS} digits, exact{}", if pass { String::new() } else { format!(": got {s}") }),
            )
        }
        Err(e) => line(6, "corollary-digits", false, e.to_string()),
    }
}

fn outside() -> Line {
    let mut literal = true;
    let mut corrected = true;
    let mut parts = Vec::new();
    for q in [Point::real(2), Point::real(-3)] {
        match outside_circle_check(&q, OUTSIDE_J_MAX, OUTSIDE_PRECISION) {
            Ok(r) => {
                literal &=
                    r.odd_vs_inv_k_neg_inv < OUTSIDE_TOL && r.even_vs_k_inv_fourth_over_q < OUTSIDE_TOL;
                corrected &= r.reliable
                    && r.even_vs_inv_k_neg_inv < OUTSIDE_TOL
                    && r.odd_vs_q_k_inv_fourth < OUTSIDE_TOL;
                parts.push(format!(
                    "q={}: |K_odd-1/K(-1/q)|={:.1e} |K_even-K(q^-4)/q|={:.1e} |K_even-1/K(-1/q)|={:.1e} |K_odd-q*K(q^-4)|={:.1e}",
                    q.value(64).real().to_f64(),
                    r.odd_vs_inv_k_neg_inv,
                    r.even_vs_k_inv_fourth_over_q,
                    r.even_vs_inv_k_neg_inv,
                    r.odd_vs_q_k_inv_fourth,
                ));
            }
            Err(e) => {
                literal = false;
                corrected = false;
                parts.push(e.to_string());
            }
        }
    }
    let verdict = match (literal, corrected) {
        (true, _) => Verdict::Pass,
        (false, true) => Verdict::Known,
        _ => Verdict::Fail,
    };
    let mut detail =
        format!("j_max={OUTSIDE_J_MAX}, {OUTSIDE_PRECISION} bits, tol {OUTSIDE_TOL:e}; {}", parts.join("; "));
    if matches!(verdict, Verdict::Known) {
        detail.push_str("; limits hold as even -> 1/K(-1/q), odd -> q*K(1/q^4)");
    }
    Line { id: 7, name: "outside-limits", verdict, detail }
}

fn lipschitz() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, name) in FamilyName::ALL.into_iter().enumerate() {
        let f = make_family(name);
        for (j, flavor) in [Flavor::Kappa, Flavor::Alpha].into_iter().enumerate() {
            let Some(seq) = family_sequence_via_derivatives(&f, flavor, LIPSCHITZ_N_MAX) else {
                ok = false;
                parts.push(format!("{name}/{}: no sequence", flavor.as_str()));
                continue;
            };
            let increasing = seq.is_strictly_increasing();
            let seed = 1000 + 10 * i as u64 + j as u64;
            let check = family_lipschitz_check(&f, &seq, LIPSCHITZ_TRIALS, LIPSCHITZ_PRECISION, seed);
            if !(increasing && check.passed()) {
                ok = false;
                parts.push(format!(
                    "{name}/{}: increasing {increasing}, {} violations",
                    flavor.as_str(),
                    check.failures.len()
                ));
            }
        }
    }
    line(
        8,
        "lipschitz",
        ok,
        format!(
            "kappa and alpha, n <= {LIPSCHITZ_N_MAX}, {LIPSCHITZ_TRIALS} pairs, {LIPSCHITZ_PRECISION} bits{}",
            if parts.is_empty() { String::new() } else { format!("; {}", parts.join("; ")) }
        ),
    )
}

fn gg() -> Line {
    let r = gg_explore(1, GG_M_MAX, GG_PRECISION);
    let orders: Vec<u64> = (1..=GG_M_MAX).collect();
    let covered = orders.iter().all(|&m| {
        r.rows.iter().filter(|row| row.m == m).count() as u64
            == (1..=m).filter(|&k| gcd(k, m) == 1).count() as u64
    });
    let exceptions = r.exceptions().count();
    line(
        9,
        "gg-explore",
        covered,
        format!(
            "{}: {} roots, m <= {GG_M_MAX}, {exceptions} exceptions at orders {:?} (listed, not failed)",
            r.banner,
            r.rows.len(),
            r.exceptional_orders()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [fn() -> Line; 9] =
        [table, product_identity, determinant, schur, witness, digits, outside, lipschitz, gg];
    let mut failed = false;
    for run in criteria {
        let start = Instant::now();
        let l = run();
        let tag = match l.verdict {
            Verdict::Pass => "PASS",
            Verdict::Known => "FAIL (known)",
            Verdict::Fail => {
                failed = true;
                "FAIL"
            }
        };
        println!("criterion {} {}: {tag} [{:.1}s] {}", l.id, l.name, start.elapsed().as_secs_f64(), l.detail);
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
