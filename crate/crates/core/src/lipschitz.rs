//! Strictly increasing Lipschitz constants for `Qₙ`, `Pₙ` and `χₙ` on the unit circle.
//!
//! For `f = Σ γᵢqⁱ` and `|x| = |y| = 1`, `|f(x) − f(y)| ≤ (Σ i|γᵢ|)·|x − y|`, so
//! `δₙ = max{Σ i|γᵢ|, 1, δₙ₋₁ + 1}` is a valid constant that also increases strictly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float, Integer, Rational};

use crate::cf_engine::{Approximants, AtPrecision};
use crate::families::{FamilyAt, FamilySpec, Term};
use crate::numeric::{abs, pow2, Point};
use crate::polyring::IntPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Constants for `Qₙ`.
    Kappa,
    /// Constants for `Pₙ`.
    Nu,
    /// Constants for `χₙ`.
    Alpha,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Kappa, Flavor::Nu, Flavor::Alpha];

    /// First index of the underlying polynomial sequence.
    pub fn first_index(self) -> usize {
        match self {
            Flavor::Alpha => 1,
            _ => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Kappa => "kappa",
            Flavor::Nu => "nu",
            Flavor::Alpha => "alpha",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LipschitzError {
    #[error("cannot build a Lipschitz sequence from an empty polynomial list")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LipschitzSeq {
    pub flavor: Flavor,
    /// Index of `values[0]`.
    pub start: usize,
    pub values: Vec<Integer>,
}

impl LipschitzSeq {
    pub fn get(&self, n: usize) -> Option<&Integer> {
        n.checked_sub(self.start).and_then(|i| self.values.get(i))
    }

    pub fn last_index(&self) -> usize {
        self.start + self.values.len() - 1
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Builds `δ` from precomputed weighted coefficient sums.
pub fn build_from_sums(
    sums: &[Integer],
    flavor: Flavor,
    start: usize,
) -> Result<LipschitzSeq, LipschitzError> {
    if sums.is_empty() {
        return Err(LipschitzError::Empty);
    }
    let mut values: Vec<Integer> = Vec::with_capacity(sums.len());
    for s in sums {
        let floor = match values.last() {
            Some(prev) => Integer::from(prev + 1u32),
            None => Integer::from(1),
        };
        values.push(if *s > floor { s.clone() } else { floor });
    }
    Ok(LipschitzSeq { flavor, start, values })
}

pub fn build(polys: &[IntPoly], flavor: Flavor) -> Result<LipschitzSeq, LipschitzError> {
    let sums: Vec<Integer> = polys.iter().map(IntPoly::weighted_coeff_sum).collect();
    build_from_sums(&sums, flavor, flavor.first_index())
}

/// The exact polynomials `Q₀..Q_N`, `P₀..P_N` or `χ₁..χ_N`.
pub fn family_polys(f: &FamilySpec, flavor: Flavor, n_max: usize) -> Vec<IntPoly> {
    let mut s = Approximants::<IntPoly>::init(f);
    let mut out = Vec::with_capacity(n_max + 1);
    let pick = |s: &Approximants<IntPoly>| match flavor {
        Flavor::Kappa => s.q_curr.clone(),
        Flavor::Nu => s.p_curr.clone(),
        Flavor::Alpha => s.chi.clone(),
    };
    if flavor != Flavor::Alpha {
        out.push(pick(&s));
    }
    for _ in 0..n_max {
        s.step(f);
        out.push(pick(&s));
    }
    out
}

pub fn family_sequence(f: &FamilySpec, flavor: Flavor, n_max: usize) -> LipschitzSeq {
    build(&family_polys(f, flavor, n_max), flavor).expect("n_max ≥ 1 gives a nonempty list")
}

/// `(g(1), g'(1))` as exact integers.
#[derive(Clone, Debug)]
struct Jet {
    v: Integer,
    d: Integer,
}

impl Jet {
    fn of_terms(terms: &[Term]) -> Jet {
        let mut v = Integer::new();
        let mut d = Integer::new();
        for &(c, e) in terms {
            v += c;
            d += Integer::from(c) * e;
        }
        Jet { v, d }
    }

    fn mul(&self, o: &Jet) -> Jet {
        Jet {
            v: Integer::from(&self.v * &o.v),
            d: Integer::from(&self.v * &o.d) + Integer::from(&self.d * &o.v),
        }
    }

    fn add(&self, o: &Jet) -> Jet {
        Jet { v: Integer::from(&self.v + &o.v), d: Integer::from(&self.d + &o.d) }
    }
}

/// Visits the weighted coefficient sums `g'(1)` of the chosen sequence in order, running the
/// recurrence on `(g(1), g'(1))`. Exact when every coefficient is nonnegative, which holds for
/// all five families; returns `false` without visiting anything otherwise.
pub fn for_each_weighted_sum(
    f: &FamilySpec,
    flavor: Flavor,
    n_max: usize,
    mut visit: impl FnMut(usize, &Integer),
) -> bool {
    let nonneg = |t: &[Term]| t.iter().all(|x| x.0 >= 0);
    if !nonneg(&f.b0_terms()) || !(1..=n_max).all(|n| nonneg(&f.a_terms(n)) && nonneg(&f.b_terms(n))) {
        return false;
    }
    let one = Jet { v: Integer::from(1), d: Integer::new() };
    let zero = Jet { v: Integer::new(), d: Integer::new() };
    let (mut p_prev, mut p_curr) = (one.clone(), Jet::of_terms(&f.b0_terms()));
    let (mut q_prev, mut q_curr) = (zero, one.clone());
    let mut chi = one;
    let pick = |p: &Jet, q: &Jet, c: &Jet| -> Integer {
        match flavor {
            Flavor::Kappa => q.d.clone(),
            Flavor::Nu => p.d.clone(),
            Flavor::Alpha => c.d.clone(),
        }
    };
    if flavor != Flavor::Alpha {
        visit(0, &pick(&p_curr, &q_curr, &chi));
    }
    for n in 1..=n_max {
        let a = Jet::of_terms(&f.a_terms(n));
        let b = Jet::of_terms(&f.b_terms(n));
        if flavor != Flavor::Alpha {
            let q_next = b.mul(&q_curr).add(&a.mul(&q_prev));
            q_prev = std::mem::replace(&mut q_curr, q_next);
            if flavor == Flavor::Nu {
                let p_next = b.mul(&p_curr).add(&a.mul(&p_prev));
                p_prev = std::mem::replace(&mut p_curr, p_next);
            }
        }
        chi = chi.mul(&a);
        visit(n, &pick(&p_curr, &q_curr, &chi));
    }
    true
}

pub fn weighted_sums_via_derivatives(f: &FamilySpec, flavor: Flavor, n_max: usize) -> Option<Vec<Integer>> {
    let mut out = Vec::with_capacity(n_max + 1);
    for_each_weighted_sum(f, flavor, n_max, |_, s| out.push(s.clone())).then_some(out)
}

/// `(δ_{n−1}, δₙ)` without storing the whole sequence.
pub fn tail_constants(f: &FamilySpec, flavor: Flavor, n: usize) -> Option<(Integer, Integer)> {
    assert!(n > flavor.first_index(), "need two indices");
    let mut prev = Integer::new();
    let mut curr: Option<Integer> = None;
    let ok = for_each_weighted_sum(f, flavor, n, |_, s| {
        let floor = match &curr {
            Some(c) => Integer::from(c + 1u32),
            None => Integer::from(1),
        };
        let next = if *s > floor { s.clone() } else { floor };
        if let Some(c) = curr.replace(next) {
            prev = c;
        }
    });
    ok.then(|| (prev, curr.expect("at least one value")))
}

pub fn family_sequence_via_derivatives(f: &FamilySpec, flavor: Flavor, n_max: usize) -> Option<LipschitzSeq> {
    let sums = weighted_sums_via_derivatives(f, flavor, n_max)?;
    build_from_sums(&sums, flavor, flavor.first_index()).ok()
}

/// Outcome of the randomized circle check.
#[derive(Debug, Clone)]
pub struct LipschitzCheck {
    pub trials: usize,
    pub indices_checked: usize,
    /// `(n, trial)` pairs violating the bound.
    pub failures: Vec<(usize, usize)>,
}

impl LipschitzCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A random pair on the circle with `t` given to 64 bits. Odd trials pick a nearby partner.
fn random_pair(rng: &mut ChaCha8Rng, trial: usize) -> (Point, Point) {
    let tx = Rational::from((Integer::from(rng.gen::<u64>()), Integer::from(1) << 64u32));
    let ty = if trial % 2 == 0 {
        Rational::from((Integer::from(rng.gen::<u64>()), Integer::from(1) << 64u32))
    } else {
        let shift: u32 = rng.gen_range(4..40);
        let delta = Rational::from((Integer::from(rng.gen::<u32>()), Integer::from(1) << (32 + shift)));
        Rational::from(&tx + &delta)
    };
    (Point::Circle(tx), Point::Circle(ty))
}

fn within_bound(fx: &Complex, fy: &Complex, delta: &Integer, dist: &Float, tol: &Float, prec: u32) -> bool {
    let lhs = abs(&Complex::with_val(prec, fx - fy));
    let rhs = Float::with_val(prec, dist * delta) + tol;
    lhs <= rhs
}

/// Checks `|fₙ(x) − fₙ(y)| ≤ δₙ|x − y| + 2^{−P/2}` for random circle pairs, with `fₙ = polys[i]`
/// and `δₙ = seq.values[i]`.
pub fn lipschitz_bound_check(
    polys: &[IntPoly],
    seq: &LipschitzSeq,
    trials: usize,
    precision: u32,
    seed: u64,
) -> LipschitzCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = pow2(-(precision as i32) / 2, precision);
    let mut failures = Vec::new();
    for trial in 0..trials {
        let (x, y) = random_pair(&mut rng, trial);
        let (xv, yv) = (x.value(precision), y.value(precision));
        let dist = abs(&Complex::with_val(precision, &xv - &yv));
        for (i, (p, delta)) in polys.iter().zip(&seq.values).enumerate() {
            if !within_bound(&p.eval_complex(&xv), &p.eval_complex(&yv), delta, &dist, &tol, precision) {
                failures.push((seq.start + i, trial));
            }
        }
    }
    LipschitzCheck { trials, indices_checked: polys.len().min(seq.values.len()), failures }
}

/// Same check for a family's own sequence, evaluating `Qₙ`, `Pₙ`, `χₙ` through the recurrence.
pub fn family_lipschitz_check(
    f: &FamilySpec,
    seq: &LipschitzSeq,
    trials: usize,
    precision: u32,
    seed: u64,
) -> LipschitzCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = pow2(-(precision as i32) / 2, precision);
    let n_max = seq.last_index();
    let mut failures = Vec::new();
    let values_at = |p: Point| -> Vec<Complex> {
        let fam = FamilyAt::new(*f, p);
        let coeffs = AtPrecision { coeffs: &fam, prec: precision };
        let mut s = Approximants::init(&coeffs);
        let mut out = Vec::with_capacity(n_max + 1);
        let pick = |s: &Approximants<Complex>| match seq.flavor {
            Flavor::Kappa => s.q_curr.clone(),
            Flavor::Nu => s.p_curr.clone(),
            Flavor::Alpha => s.chi.clone(),
        };
        out.push(pick(&s));
        for _ in 0..n_max {
            s.step(&coeffs);
            out.push(pick(&s));
        }
        out
    };
    for trial in 0..trials {
        let (x, y) = random_pair(&mut rng, trial);
        let dist = abs(&Complex::with_val(precision, x.value(precision) - y.value(precision)));
        let (fx, fy) = (values_at(x), values_at(y));
        for n in seq.start..=n_max {
            let delta = seq.get(n).expect("index within sequence");
            if !within_bound(&fx[n], &fy[n], delta, &dist, &tol, precision) {
                failures.push((n, trial));
            }
        }
    }
    LipschitzCheck { trials, indices_checked: seq.len(), failures }
}

/// `true` iff `δₙ ≥ weighted_coeff_sum(polys[n])` for every index.
pub fn dominates(polys: &[IntPoly], seq: &LipschitzSeq) -> bool {
    polys.len() == seq.values.len()
        && polys.iter().zip(&seq.values).all(|(p, d)| *d >= p.weighted_coeff_sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilyName};

    #[test]
    fn k_kappa_start() {
        let k = make_family(FamilyName::K);
        let polys = family_polys(&k, Flavor::Kappa, 2);
        assert_eq!(polys[2], IntPoly::from_i64s(&[1, 0, 1]));
        let seq = build(&polys, Flavor::Kappa).unwrap();
        assert_eq!(seq.values, vec![Integer::from(1), Integer::from(2), Integer::from(3)]);
    }

    #[test]
    fn k_alpha_start() {
        let seq = family_sequence(&make_family(FamilyName::K), Flavor::Alpha, 3);
        assert_eq!(seq.start, 1);
        assert_eq!(seq.values, vec![Integer::from(1), Integer::from(3), Integer::from(6)]);
    }

    #[test]
    fn constant_sequence_is_pure_floor() {
        let polys = vec![IntPoly::constant(7); 5];
        let seq = build(&polys, Flavor::Nu).unwrap();
        let want: Vec<Integer> = (1..=5).map(Integer::from).collect();
        assert_eq!(seq.values, want);
        assert!(matches!(build(&[], Flavor::Nu), Err(LipschitzError::Empty)));
    }

    #[test]
    fn derivative_route_matches_expansion() {
        for name in FamilyName::ALL {
            let f = make_family(name);
            for flavor in Flavor::ALL {
                let a = family_sequence(&f, flavor, 40);
                let b = family_sequence_via_derivatives(&f, flavor, 40).unwrap();
                assert_eq!(a, b, "{name} {flavor:?}");
                let (prev, last) = tail_constants(&f, flavor, 40).unwrap();
                assert_eq!(&last, a.get(40).unwrap());
                assert_eq!(&prev, a.get(39).unwrap());
            }
        }
    }

    #[test]
    fn identity_polynomial_bound() {
        let polys = vec![IntPoly::q_pow(1)];
        let seq = LipschitzSeq { flavor: Flavor::Kappa, start: 0, values: vec![Integer::from(1)] };
        assert!(lipschitz_bound_check(&polys, &seq, 20, 128, 3).passed());
    }

    #[test]
    fn k_q10_random_pairs() {
        let k = make_family(FamilyName::K);
        let polys = family_polys(&k, Flavor::Kappa, 10);
        let seq = build(&polys, Flavor::Kappa).unwrap();
        assert!(dominates(&polys, &seq));
        assert!(lipschitz_bound_check(
            &polys[10..],
            &LipschitzSeq { flavor: Flavor::Kappa, start: 10, values: seq.values[10..].to_vec() },
            100,
            256,
            11
        )
        .passed());
        assert!(family_lipschitz_check(&k, &seq, 20, 256, 5).passed());
    }

    #[test]
    fn undersized_constant_is_caught() {
        let polys = vec![IntPoly::q_pow(5)];
        let seq = LipschitzSeq { flavor: Flavor::Kappa, start: 0, values: vec![Integer::from(1)] };
        assert!(!lipschitz_bound_check(&polys, &seq, 20, 128, 9).passed());
    }
}
