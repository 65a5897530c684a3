use proptest::prelude::*;
use qcf_core::arith::{divisors, gcd};
use qcf_core::cf_engine::{determinant_check, FnCoeffs};
use qcf_core::families::{chi_magnitude_check, table_check};
use qcf_core::lipschitz::{build, lipschitz_bound_check, Flavor};
use qcf_core::numeric::{abs, root_of_unity};
use qcf_core::polyring::{cyclotomic_poly, reduce};
use qcf_core::rcf::{convergents, tail_error_bound, value, ErrorBound, RegCF};
use qcf_core::{make_family, Approximants, FamilyName, IntPoly};
use rug::{Complex, Float, Integer, Rational};

fn poly(max_len: usize) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-50i64..50, 0..max_len).prop_map(|c| IntPoly::from_i64s(&c))
}

fn order() -> impl Strategy<Value = u64> {
    1u64..60
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_is_a_ring_homomorphism(a in poly(120), b in poly(120), m in order()) {
        let (ra, rb) = (reduce(&a, m), reduce(&b, m));
        prop_assert_eq!(reduce(&(&a * &b), m), &ra * &rb);
        prop_assert_eq!(reduce(&(&a + &b), m), &ra + &rb);
        prop_assert_eq!(reduce(&(&a - &b), m), &ra - &rb);
    }

    #[test]
    fn cyclotomic_factorization(m in 1u64..300) {
        let prod = divisors(m).into_iter().fold(IntPoly::constant(1), |acc, d| &acc * &cyclotomic_poly(d));
        let want = &IntPoly::q_pow(m as usize) - &IntPoly::constant(1);
        prop_assert_eq!(prod, want);
    }

    #[test]
    fn residue_evaluates_like_the_polynomial(p in poly(200), m in 2u64..40, k in 1i64..40) {
        prop_assume!(gcd(k as u64, m) == 1);
        let prec = 192;
        let z = root_of_unity(k, m, prec);
        let direct = p.eval_complex(&z);
        let via = reduce(&p, m).to_complex(k, prec).unwrap();
        let scale = Float::with_val(prec, p.abs_coeff_sum()).max(&Float::with_val(prec, 1));
        let err = abs(&Complex::with_val(prec, &direct - &via));
        prop_assert!(err <= scale * Float::with_val(prec, Float::i_exp(1, -150)));
    }

    #[test]
    fn determinant_identity_for_arbitrary_coefficients(
        b0 in poly(6),
        a in prop::collection::vec(poly(6), 1..25),
        b in prop::collection::vec(poly(6), 25),
    ) {
        let c = FnCoeffs {
            b0: || b0.clone(),
            a: |n: usize| a[n - 1].clone(),
            b: |n: usize| b[n - 1].clone(),
        };
        let mut s = Approximants::init(&c);
        let mut chi = IntPoly::constant(1);
        prop_assert!(determinant_check(&s, &chi));
        for n in 1..=a.len() {
            s.step(&c);
            chi = &chi * &a[n - 1];
            prop_assert!(determinant_check(&s, &chi), "n = {}", n);
        }
    }

    #[test]
    fn weighted_sums_bound_circle_differences(
        polys in prop::collection::vec(poly(40), 1..8),
        seed in any::<u64>(),
    ) {
        let mut ps = polys;
        ps.insert(0, IntPoly::constant(1));
        for i in 1..ps.len() {
            let bump = IntPoly::monomial(i as i64 * 1000, i);
            ps[i] = &ps[i] + &bump;
        }
        let Ok(seq) = build(&ps, Flavor::Kappa) else { return Ok(()); };
        prop_assert!(seq.is_strictly_increasing());
        let check = lipschitz_bound_check(&ps, &seq, 6, 128, seed);
        prop_assert!(check.passed(), "{:?}", check.failures);
    }

    #[test]
    fn convergents_alternate_and_enclose(es in prop::collection::vec(1u64..1000, 2..30)) {
        let r = RegCF::from_integers(&es, true).unwrap();
        let k = es.len();
        let c = convergents(&r, k).unwrap();
        for i in 1..c.len() {
            let det = Integer::from(&c[i].c * &c[i - 1].d) - Integer::from(&c[i - 1].c * &c[i].d);
            prop_assert_eq!(det, if i % 2 == 1 { 1 } else { -1 });
        }
        let exact = c[k].to_rational();
        let v = value(&r, 256).unwrap();
        prop_assert!(Float::with_val(256, &v - &exact).abs() < Float::with_val(64, Float::i_exp(1, -200)));
        for i in 1..k {
            let err = Rational::from(&exact - &c[i].to_rational()).abs();
            match tail_error_bound(&r, i).unwrap() {
                ErrorBound::Zero => prop_assert_eq!(err, 0),
                ErrorBound::Below(b) => prop_assert!(err < b),
                ErrorBound::BelowPow2(_) => prop_assert!(false, "integer quotients"),
            }
        }
    }

    #[test]
    fn table_rows_hold_past_the_tabulated_range(i in 0usize..4, r in 0u64..60) {
        let f = make_family(FamilyName::PROVED[i]);
        let (j, d) = f.congruence().unwrap();
        let m = j + d * (201 / d + 1 + r);
        prop_assume!(f.check_admissible(m).is_ok());
        prop_assert!(table_check(&f, m).unwrap().matches, "{} at {}", f.name, m);
        prop_assert!(chi_magnitude_check(&f, m).unwrap().passes);
    }
}
