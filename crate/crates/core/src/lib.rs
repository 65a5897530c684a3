//! Exact and certified numerics for q-continued fractions at roots of unity.

pub mod arith;
pub mod cf_engine;
pub mod families;
pub mod lipschitz;
pub mod numeric;
pub mod polyring;
pub mod rcf;
pub mod witness;

pub use cf_engine::{Approximants, CfCoeffs, CfError, CfRing, ComplexCoeffs};
pub use families::{make_family, FamilyName, FamilySpec};
pub use polyring::{CycloElem, IntPoly};

/// High-precision complex scalar (MPC).
pub type HpComplex = rug::Complex;
/// Double-precision complex scalar.
pub type Complex64 = num_complex::Complex64;

pub type PolyApproximants = Approximants<IntPoly>;
pub type CycloApproximants = Approximants<CycloElem>;
pub type ComplexApproximants = Approximants<HpComplex>;
