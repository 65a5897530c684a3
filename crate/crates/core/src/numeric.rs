//! High-precision complex helpers on top of MPFR/MPC.

use std::cmp::Ordering;

use rug::float::Constant;
use rug::{Complex, Float, Rational};

/// Guard bits added internally when forming transcendental values.
const GUARD_BITS: u32 = 32;

/// `exp(2πi·t)` for an exact rational `t`, rounded to `prec` bits.
pub fn unit_circle_point(t: &Rational, prec: u32) -> Complex {
    let (frac, _) = t.clone().fract_floor(rug::Integer::new());
    let work = prec + GUARD_BITS;
    let mut angle = Float::with_val(work, Constant::Pi);
    angle *= 2;
    angle *= &frac;
    let (sin, cos) = angle.sin_cos(Float::new(work));
    Complex::with_val(prec, (cos, sin))
}

/// `exp(2πik/m)`.
pub fn root_of_unity(k: i64, m: u64, prec: u32) -> Complex {
    unit_circle_point(&Rational::from((k, m as i64)), prec)
}

pub fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// `2^e` at the given precision.
pub fn pow2(e: i32, prec: u32) -> Float {
    Float::with_val(prec, 1) << e
}

/// A point of the complex plane given exactly, so it can be re-rounded at any precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    /// `re + i·im` with rational parts.
    Rational { re: Rational, im: Rational },
    /// `exp(2πi·t)` for rational `t`.
    Circle(Rational),
}

impl Point {
    pub fn real(re: impl Into<Rational>) -> Self {
        Point::Rational { re: re.into(), im: Rational::new() }
    }

    pub fn circle(t: impl Into<Rational>) -> Self {
        Point::Circle(t.into())
    }

    pub fn root_of_unity(k: i64, m: u64) -> Self {
        Point::Circle(Rational::from((k, m as i64)))
    }

    pub fn value(&self, prec: u32) -> Complex {
        match self {
            Point::Rational { re, im } => Complex::with_val(prec, (re, im)),
            Point::Circle(t) => unit_circle_point(t, prec),
        }
    }

    /// Modulus as an exact comparison against 1, where decidable exactly.
    pub fn cmp_unit_modulus(&self) -> Ordering {
        match self {
            Point::Rational { re, im } => {
                let n = Rational::from(re * re) + Rational::from(im * im);
                n.cmp(&Rational::from(1))
            }
            Point::Circle(_) => Ordering::Equal,
        }
    }

    /// `|z|²` exactly for rational points.
    pub fn modulus_squared(&self) -> Rational {
        match self {
            Point::Rational { re, im } => Rational::from(re * re) + Rational::from(im * im),
            Point::Circle(_) => Rational::from(1),
        }
    }

    /// `1/z` (exact).
    pub fn recip(&self) -> Point {
        match self {
            Point::Rational { re, im } => {
                let n = self.modulus_squared();
                Point::Rational { re: Rational::from(re / &n), im: -Rational::from(im / &n) }
            }
            Point::Circle(t) => Point::Circle(-t.clone()),
        }
    }

    pub fn neg(&self) -> Point {
        match self {
            Point::Rational { re, im } => Point::Rational { re: -re.clone(), im: -im.clone() },
            Point::Circle(t) => Point::Circle(Rational::from(t + Rational::from((1, 2)))),
        }
    }

    /// `z^k` for `k ≥ 0` (exact).
    pub fn pow(&self, k: u32) -> Point {
        match self {
            Point::Rational { re, im } => {
                let mut acc = (Rational::from(1), Rational::new());
                for _ in 0..k {
                    let nr = Rational::from(&acc.0 * re) - Rational::from(&acc.1 * im);
                    let ni = Rational::from(&acc.0 * im) + Rational::from(&acc.1 * re);
                    acc = (nr, ni);
                }
                Point::Rational { re: acc.0, im: acc.1 }
            }
            Point::Circle(t) => Point::Circle(Rational::from(t * k)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_root_is_i() {
        let z = root_of_unity(1, 4, 128);
        assert!(Float::with_val(128, z.real().abs_ref()) < pow2(-120, 128));
        assert!(Float::with_val(128, z.imag() - 1u32).abs() < pow2(-120, 128));
    }

    #[test]
    fn circle_point_reduces_mod_one() {
        let a = unit_circle_point(&Rational::from((7, 3)), 200);
        let b = unit_circle_point(&Rational::from((1, 3)), 200);
        assert!(abs(&Complex::with_val(200, &a - &b)) < pow2(-190, 200));
    }

    #[test]
    fn exact_point_algebra() {
        let q = Point::real(2);
        assert_eq!(q.recip(), Point::real(Rational::from((1, 2))));
        assert_eq!(q.neg().recip(), Point::real(Rational::from((-1, 2))));
        assert_eq!(q.pow(4).recip(), Point::real(Rational::from((1, 16))));
        assert_eq!(q.cmp_unit_modulus(), Ordering::Greater);
    }
}
