//! Exact arithmetic in `ℤ[q]` and in the cyclotomic quotients `ℤ[q]/Φₘ(q)`.

mod cyclo;
mod intpoly;

pub use cyclo::{cyclotomic_poly, modulus, reduce, CycloElem, CyclotomicModulus};
pub use intpoly::IntPoly;

use rug::Integer;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("k = {k} is not coprime to m = {m}")]
    NotCoprime { k: i64, m: u64 },
    #[error("precision {0} bits is below the 64-bit minimum")]
    PrecisionTooLow(u32),
}

/// `Σ_{i=1}^{deg p} i·|γᵢ|`.
pub fn weighted_coeff_sum(p: &IntPoly) -> Integer {
    p.weighted_coeff_sum()
}
