//! Linear and polynomial algebra over F₂.

mod linalg;
mod poly;
mod series;

pub use linalg::{F2Matrix, F2Vector};
pub use poly::{F2Poly, Monomial, WeightedPolyRing};
pub use series::{series_of_ring, PoincareSeries};

/// Binomial coefficient mod 2 via Lucas: C(a,b) is odd iff the bits of b are a subset of the bits of a.
#[inline]
pub fn binom_mod2(a: u64, b: u64) -> bool {
    b & !a == 0
}

/// Binomial coefficient mod 2 for possibly negative top argument, using C(a,b)=0 for a<0 unless b=0.
#[inline]
pub fn binom_mod2_signed(a: i64, b: i64) -> bool {
    if b < 0 {
        return false;
    }
    if b == 0 {
        return true;
    }
    if a < 0 {
        return false;
    }
    binom_mod2(a as u64, b as u64)
}

/// Number of ones in the binary expansion.
#[inline]
pub fn alpha(n: u64) -> u32 {
    n.count_ones()
}
