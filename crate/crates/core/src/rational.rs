//! Exact rational scalars used for structure constants and concave-function
//! parameters.

use alloc::string::String;
use alloc::string::ToString;
use num_rational::Ratio;
use num_traits::Signed;

/// The scalar type for structure constants and apartment coordinates.
///
/// Everything in this crate stays tiny (denominators divide 6, numerators
/// bounded by small products of root-string lengths), so `i64` rationals are
/// ample.
pub type Rational = Ratio<i64>;

/// Smallest integer `≥ r`.
pub fn ceil_int(r: Rational) -> i64 {
    r.ceil().to_integer()
}

/// Parses `"2"`, `"-1/2"`, `"3/4"` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().ok()?;
        let d: i64 = den.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        Some(Rational::new(n, d))
    } else {
        let n: i64 = s.parse().ok()?;
        Some(Rational::from_integer(n))
    }
}

/// Canonical text form: integers print bare, otherwise `num/den`.
pub fn format_rational(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

/// True when `denom(r)` divides `bound` (the concave-function denominator
/// policy and the structure-constant denominator invariant).
pub fn denominator_divides(r: Rational, bound: i64) -> bool {
    r.denom().is_positive() && bound % r.denom() == 0
}
