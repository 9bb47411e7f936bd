//! Exact rational and dyadic-rational arithmetic, and the distance to the
//! nearest integer `d_Z(t) = min_k |k - t|`.
//!
//! Every coordinate and coefficient in the crate is a [`Rational`]. Values of
//! the form `k / 2^n` get their own type, [`DyadicRational`], because the
//! induction grids of the verifier only make sense on dyadic points and a
//! silent conversion from an arbitrary fraction would hide bugs.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DyadicError {
    #[error("{0} is not a dyadic rational (denominator is not a power of two)")]
    NotDyadic(Rational),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
}

/// Shorthand for `num / den` as a [`Rational`]. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer-valued [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^k` as a [`BigInt`].
pub fn pow2(k: u32) -> BigInt {
    BigInt::one() << (k as usize)
}

/// Exact conversion of a finite `f64` into a [`Rational`].
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Nearest `f64` to a rational (correct up to the final rounding of the
/// quotient of two doubles, which is ample for plotting and reports).
pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Very large numerator/denominator: shift both down before dividing.
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let ns = (n >> shift as usize).to_f64().unwrap_or(f64::NAN);
    let ds = (d >> shift as usize).to_f64().unwrap_or(f64::NAN);
    ns / ds
}

/// Distance from `t` to the nearest integer, computed by floor division.
///
/// The result always lies in `[0, 1/2]`.
pub fn dist_to_integers(t: &Rational) -> Rational {
    let frac = t - t.floor();
    let other = Rational::one() - &frac;
    if frac <= other {
        frac
    } else {
        other
    }
}

/// A dyadic rational `mantissa / 2^exponent` in canonical form: either the
/// mantissa is odd or the exponent is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    mantissa: BigInt,
    exponent: u32,
}

impl DyadicRational {
    pub fn new(mantissa: impl Into<BigInt>, exponent: u32) -> Self {
        let mut mantissa = mantissa.into();
        let mut exponent = exponent;
        if mantissa.is_zero() {
            return DyadicRational {
                mantissa,
                exponent: 0,
            };
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        let drop = tz.min(exponent as u64) as u32;
        if drop > 0 {
            mantissa >>= drop as usize;
            exponent -= drop;
        }
        DyadicRational { mantissa, exponent }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        DyadicRational::new(n, 0)
    }

    /// Fails when the reduced denominator of `r` is not a power of two.
    pub fn from_rational(r: &Rational) -> Result<Self, DyadicError> {
        let den = r.denom();
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz as usize) != BigInt::one() {
            return Err(DyadicError::NotDyadic(r.clone()));
        }
        Ok(DyadicRational::new(r.numer().clone(), tz as u32))
    }

    /// Largest dyadic with the given exponent that does not exceed `r`.
    pub fn floor_of(r: &Rational, exponent: u32) -> Self {
        let scaled = r * Rational::from_integer(pow2(exponent));
        DyadicRational::new(scaled.floor().to_integer(), exponent)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.mantissa.clone(), pow2(self.exponent))
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.to_rational())
    }

    /// `2^k * self`, exactly.
    pub fn scale_pow2(&self, k: u32) -> Self {
        if k <= self.exponent {
            DyadicRational::new(self.mantissa.clone(), self.exponent - k)
        } else {
            DyadicRational::new(&self.mantissa << (k - self.exponent) as usize, 0)
        }
    }

    /// Fractional part `self - floor(self)`, still dyadic.
    pub fn frac(&self) -> Self {
        let den = pow2(self.exponent);
        DyadicRational::new(self.mantissa.mod_floor(&den), self.exponent)
    }
}

impl From<&DyadicRational> for Rational {
    fn from(d: &DyadicRational) -> Rational {
        d.to_rational()
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}/2^{}", self.mantissa, self.exponent)
        }
    }
}

/// [`dist_to_integers`] on a dyadic argument.
pub fn dist_to_integers_dyadic(t: &DyadicRational) -> Rational {
    dist_to_integers(&t.to_rational())
}

/// `2^k * t` for a dyadic `t`.
pub fn dyadic_scale_pow2(t: &DyadicRational, k: u32) -> DyadicRational {
    t.scale_pow2(k)
}

/// Checks the midpoint identity that makes `d_Z` affine between consecutive
/// points of the grid `2^-n Z` after scaling by `2^k`:
///
/// `d(2^k (2l+1) / 2^(n+1)) == (d(2^k (l+1) / 2^n) + d(2^k l / 2^n)) / 2`
///
/// for `0 <= k < n` and `0 <= l < 2^n`.
pub fn dz_midpoint_identity(n: u32, ell: &BigInt, k: u32) -> Result<bool, DyadicError> {
    if n == 0 {
        return Err(DyadicError::OutOfRange("n must be positive".into()));
    }
    if k >= n {
        return Err(DyadicError::OutOfRange(format!(
            "k = {k} must satisfy k < n = {n}"
        )));
    }
    if ell.is_negative() || *ell >= pow2(n) {
        return Err(DyadicError::OutOfRange(format!(
            "l = {ell} must lie in [0, 2^{n})"
        )));
    }
    let two_k = Rational::from_integer(pow2(k));
    let mid = Rational::new(BigInt::from(2) * ell + 1u32, pow2(n + 1)) * &two_k;
    let right = Rational::new(ell + 1u32, pow2(n)) * &two_k;
    let left = Rational::new(ell.clone(), pow2(n)) * &two_k;
    let lhs = dist_to_integers(&mid);
    let rhs = (dist_to_integers(&right) + dist_to_integers(&left)) / int(2);
    Ok(lhs == rhs)
}
