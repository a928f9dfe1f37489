//! Exact rational coefficients.
//!
//! Everything in this crate is computed over arbitrary-precision rationals;
//! there is no floating point anywhere. `BigRational` keeps values in lowest
//! terms with a positive denominator, which makes equality checks exact.

use num::bigint::BigInt;
use num::rational::BigRational;

pub type Scalar = BigRational;

/// The integer `v` as a scalar.
pub fn int(v: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(v))
}

/// The fraction `num / den`. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
