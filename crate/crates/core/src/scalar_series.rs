//! Scalar error terms: the Takagi function `T`, the Tabor functions `tau_alpha`
//! and the general series `phi_perp(t, x) = sum_n 2 d(2^n t) phi(x / 2^n)`.
//!
//! Floating evaluation reduces the argument modulo one before every term.
//! Doubling and taking the fractional part are exact in binary floating point,
//! so the reduced argument is the exact fractional part of `2^n t`. Every
//! finite double is a dyadic rational, which means the reduced argument
//! eventually hits zero; once it does, all remaining terms vanish and the
//! reported error bound is zero.
//!
//! The truncation bound for `tau_alpha` after the terms `n = 0..=N` is
//! `2^(-alpha (N+1)) / (1 - 2^(-alpha))`, which follows from `0 <= 2 d <= 1`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::{dist_to_integers, pow2, rational_to_f64, DyadicRational, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("argument must be finite, got {0}")]
    NonFinite(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("exponent alpha must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error("coefficient must be nonnegative")]
    NegativeCoefficient,
    #[error("tabulated phi has no summability certificate")]
    MissingCertificate,
    #[error("summability certificate does not hold: {0}")]
    InvalidCertificate(String),
    #[error("tabulated phi is too short to reach tolerance {tol} (best bound {best})")]
    ToleranceUnreachable { tol: f64, best: f64 },
    #[error("grid size and iteration count must be positive")]
    EmptyGrid,
}

/// A truncated series value together with a rigorous bound on the omitted
/// tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub error_bound: f64,
    /// Number of terms summed (indices `0..terms_used`).
    pub terms_used: usize,
}

/// Either an exact rational or a floating approximation.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarValue {
    Exact(Rational),
    Real(f64),
}

impl ScalarValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ScalarValue::Exact(r) => rational_to_f64(r),
            ScalarValue::Real(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            ScalarValue::Exact(r) => Some(r),
            ScalarValue::Real(_) => None,
        }
    }
}

/// Norm used to turn a vector argument into the scalar `||u||`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    Euclidean,
    L1,
    Max,
}

impl Norm {
    pub fn eval_f64(&self, u: &[Rational]) -> f64 {
        let v: Vec<f64> = u.iter().map(rational_to_f64).collect();
        match self {
            Norm::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::Max => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    /// `||u||^power` as an exact rational, when that value is rational.
    pub fn pow_exact(&self, u: &[Rational], power: u32) -> Option<Rational> {
        match self {
            Norm::L1 => Some(pow_rational(
                &u.iter().map(|x| x.abs()).fold(Rational::zero(), |a, b| a + b),
                power,
            )),
            Norm::Max => Some(pow_rational(
                &u.iter()
                    .map(|x| x.abs())
                    .fold(Rational::zero(), |a, b| if b > a { b } else { a }),
                power,
            )),
            Norm::Euclidean => {
                let sq = u.iter().map(|x| x * x).fold(Rational::zero(), |a, b| a + b);
                if power % 2 == 0 {
                    Some(pow_rational(&sq, power / 2))
                } else {
                    rational_sqrt(&sq).map(|r| pow_rational(&r, power))
                }
            }
        }
    }
}

fn pow_rational(r: &Rational, power: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..power {
        acc *= r;
    }
    acc
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// `Some(k)` when `alpha` is the positive integer `k`.
pub fn integer_alpha(alpha: f64) -> Option<u32> {
    if alpha > 0.0 && alpha <= 4096.0 && alpha.fract() == 0.0 {
        Some(alpha as u32)
    } else {
        None
    }
}

/// Geometric-decay certificate for a tabulated `phi`: from `from_index` on,
/// consecutive samples shrink at least by the factor `ratio < 1`, and the
/// untabulated tail is assumed to keep doing so.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub ratio: f64,
    pub from_index: usize,
}

/// A nonnegative error function `phi` on `D - D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum PhiSpec {
    /// `phi(u) = coefficient * ||u||^alpha`.
    Power {
        #[serde(with = "crate::json::rational")]
        coefficient: Rational,
        alpha: f64,
    },
    /// Samples `phi(x / 2^n)` for `n = 0, 1, ...` along one fixed orbit.
    Table {
        samples: Vec<f64>,
        certificate: Option<DecayCertificate>,
    },
}

impl PhiSpec {
    pub fn power(coefficient: Rational, alpha: f64) -> Result<Self, SeriesError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(SeriesError::BadAlpha(alpha));
        }
        if coefficient.is_negative() {
            return Err(SeriesError::NegativeCoefficient);
        }
        Ok(PhiSpec::Power { coefficient, alpha })
    }

    pub fn validate(&self) -> Result<(), SeriesError> {
        match self {
            PhiSpec::Power { coefficient, alpha } => {
                PhiSpec::power(coefficient.clone(), *alpha).map(|_| ())
            }
            PhiSpec::Table {
                samples,
                certificate,
            } => check_table(samples, certificate.as_ref()),
        }
    }

    /// `phi(u)` exactly, if it is rational. Only the power form can be
    /// evaluated at arbitrary points.
    pub fn eval_exact(&self, u: &[Rational], norm: Norm) -> Option<Rational> {
        match self {
            PhiSpec::Power { coefficient, alpha } => {
                if coefficient.is_zero() {
                    return Some(Rational::zero());
                }
                let k = integer_alpha(*alpha)?;
                Some(coefficient * norm.pow_exact(u, k)?)
            }
            PhiSpec::Table { .. } => None,
        }
    }

    pub fn eval_f64(&self, u: &[Rational], norm: Norm) -> Option<f64> {
        match self {
            PhiSpec::Power { coefficient, alpha } => {
                Some(rational_to_f64(coefficient) * norm.eval_f64(u).powf(*alpha))
            }
            PhiSpec::Table { .. } => None,
        }
    }

    /// Copy of a power-form `phi` with the coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Option<PhiSpec> {
        match self {
            PhiSpec::Power { coefficient, alpha } => Some(PhiSpec::Power {
                coefficient: coefficient * factor,
                alpha: *alpha,
            }),
            PhiSpec::Table { .. } => None,
        }
    }
}

fn check_table(samples: &[f64], cert: Option<&DecayCertificate>) -> Result<(), SeriesError> {
    let cert = cert.ok_or(SeriesError::MissingCertificate)?;
    if samples.is_empty() {
        return Err(SeriesError::InvalidCertificate("no samples".into()));
    }
    if let Some(bad) = samples.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(SeriesError::InvalidCertificate(format!(
            "sample {bad} is not a nonnegative number"
        )));
    }
    if !(cert.ratio >= 0.0 && cert.ratio < 1.0) {
        return Err(SeriesError::InvalidCertificate(format!(
            "ratio {} is not in [0, 1)",
            cert.ratio
        )));
    }
    for n in cert.from_index..samples.len().saturating_sub(1) {
        if samples[n + 1] > cert.ratio * samples[n] {
            return Err(SeriesError::InvalidCertificate(format!(
                "sample {} exceeds ratio times sample {}",
                n + 1,
                n
            )));
        }
    }
    Ok(())
}

fn check_args(t: f64, tol: f64) -> Result<(), SeriesError> {
    if !t.is_finite() {
        return Err(SeriesError::NonFinite(t));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(SeriesError::BadTolerance(tol));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<(), SeriesError> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(SeriesError::BadAlpha(alpha))
    }
}

/// `d_Z` in floating point; exact for every finite double.
pub fn dist_to_integers_f64(t: f64) -> f64 {
    let f = t - t.floor();
    f.min(1.0 - f)
}

/// Tail bound of `tau_alpha` after the terms `0..=last`.
pub fn tau_tail_bound(alpha: f64, last: usize) -> f64 {
    let q = (-alpha).exp2();
    (-alpha * (last as f64 + 1.0)).exp2() / (1.0 - q)
}

/// Smallest index `N` with `tau_tail_bound(alpha, N) <= tol`.
pub fn tau_truncation_index(alpha: f64, tol: f64) -> usize {
    let q = (-alpha).exp2();
    let guess = ((1.0 / (tol * (1.0 - q))).log2() / alpha).ceil() - 1.0;
    let mut n = if guess.is_finite() && guess > 0.0 {
        guess as usize
    } else {
        0
    };
    // Correct for rounding in the closed-form guess.
    while n > 0 && tau_tail_bound(alpha, n - 1) <= tol {
        n -= 1;
    }
    while tau_tail_bound(alpha, n) > tol {
        n += 1;
    }
    n
}

/// Sums `weight(n) * d(2^n t)` for `n = 0..=last`, stopping early once the
/// reduced argument reaches zero.
fn reduced_sum(t: f64, last: usize, weight: impl Fn(usize) -> f64) -> (f64, usize, bool) {
    let mut x = t - t.floor();
    let mut acc = 0.0;
    for n in 0..=last {
        if x == 0.0 {
            return (acc, n, true);
        }
        acc += weight(n) * x.min(1.0 - x);
        x = 2.0 * x;
        x -= x.floor();
    }
    (acc, last + 1, x == 0.0)
}

/// The Takagi function `T(t) = sum_n d(2^n t) / 2^n`.
pub fn takagi(t: f64, tol: f64) -> Result<SeriesValue, SeriesError> {
    check_args(t, tol)?;
    // Tail after index N is at most 2^-(N+1).
    let mut last = 0usize;
    while (-(last as f64 + 1.0)).exp2() > tol {
        last += 1;
    }
    let (value, terms_used, finished) = reduced_sum(t, last, |n| (-(n as f64)).exp2());
    let error_bound = if finished {
        0.0
    } else {
        (-(last as f64 + 1.0)).exp2()
    };
    Ok(SeriesValue {
        value,
        error_bound,
        terms_used,
    })
}

/// `tau_alpha(t) = sum_n 2^(1 - alpha n) d(2^n t)`.
pub fn tau_alpha(alpha: f64, t: f64, tol: f64) -> Result<SeriesValue, SeriesError> {
    check_alpha(alpha)?;
    check_args(t, tol)?;
    let last = tau_truncation_index(alpha, tol);
    let (value, terms_used, finished) =
        reduced_sum(t, last, |n| (1.0 - alpha * n as f64).exp2());
    let error_bound = if finished {
        0.0
    } else {
        tau_tail_bound(alpha, last)
    };
    Ok(SeriesValue {
        value,
        error_bound,
        terms_used,
    })
}

/// `tau_alpha` at a dyadic point, where the series is a finite sum. The sum
/// is exact when `alpha` is a positive integer.
pub fn tau_alpha_dyadic(alpha: f64, t: &DyadicRational) -> Result<ScalarValue, SeriesError> {
    check_alpha(alpha)?;
    let m = t.exponent();
    match integer_alpha(alpha) {
        Some(k) => {
            let mut acc = Rational::zero();
            for n in 0..m {
                let d = dist_to_integers(&t.scale_pow2(n).to_rational());
                acc += d * Rational::new(BigInt::from(2), pow2(k * n));
            }
            Ok(ScalarValue::Exact(acc))
        }
        None => {
            let mut acc = 0.0;
            for n in 0..m {
                let d = rational_to_f64(&dist_to_integers(&t.scale_pow2(n).to_rational()));
                acc += (1.0 - alpha * n as f64).exp2() * d;
            }
            Ok(ScalarValue::Real(acc))
        }
    }
}

/// Rational enclosure `[lo, hi]` of `tau_k(t)` for a positive integer
/// exponent `k` and any rational `t`: the partial sum over `n = 0..=last` and
/// that sum plus the exact tail bound `2^(-k (last+1)) / (1 - 2^-k)`.
pub fn tau_alpha_enclosure(k: u32, t: &Rational, last: u32) -> (Rational, Rational) {
    assert!(k > 0, "exponent must be positive");
    let mut acc = Rational::zero();
    let mut x = t - t.floor();
    let two = Rational::from_integer(BigInt::from(2));
    for n in 0..=last {
        if x.is_zero() {
            return (acc.clone(), acc);
        }
        acc += dist_to_integers(&x) * Rational::new(BigInt::from(2), pow2(k * n));
        x = &x * &two;
        x = &x - x.floor();
    }
    if x.is_zero() {
        return (acc.clone(), acc);
    }
    let q = Rational::new(BigInt::one(), pow2(k));
    let tail = Rational::new(BigInt::one(), pow2(k * (last + 1))) / (Rational::one() - q);
    let hi = &acc + tail;
    (acc, hi)
}

/// `phi_perp(t, x) = sum_n 2 d(2^n t) phi(x / 2^n)`.
///
/// For the power form this is `c * x_norm^alpha * tau_alpha(t)`. For the table
/// form `x_norm` is ignored: the samples already describe `phi` along the
/// orbit `x / 2^n` of one fixed `x`.
pub fn phi_perp(phi: &PhiSpec, t: f64, x_norm: f64, tol: f64) -> Result<SeriesValue, SeriesError> {
    check_args(t, tol)?;
    match phi {
        PhiSpec::Power { coefficient, alpha } => {
            check_alpha(*alpha)?;
            if coefficient.is_negative() {
                return Err(SeriesError::NegativeCoefficient);
            }
            if !(x_norm.is_finite() && x_norm >= 0.0) {
                return Err(SeriesError::NonFinite(x_norm));
            }
            let scale = rational_to_f64(coefficient) * x_norm.powf(*alpha);
            if scale == 0.0 {
                return Ok(SeriesValue {
                    value: 0.0,
                    error_bound: 0.0,
                    terms_used: 0,
                });
            }
            let tau = tau_alpha(*alpha, t, tol / scale)?;
            Ok(SeriesValue {
                value: scale * tau.value,
                error_bound: scale * tau.error_bound,
                terms_used: tau.terms_used,
            })
        }
        PhiSpec::Table {
            samples,
            certificate,
        } => {
            check_table(samples, certificate.as_ref())?;
            let ratio = certificate.map(|c| c.ratio).unwrap_or(0.0);
            let len = samples.len();
            let beyond = samples[len - 1] * ratio / (1.0 - ratio);
            // suffix[n] = sum of samples[n..]
            let mut suffix = vec![0.0; len + 1];
            for n in (0..len).rev() {
                suffix[n] = suffix[n + 1] + samples[n];
            }
            let bound_after = |last: usize| suffix[last + 1] + beyond;
            let last = (0..len).find(|&n| bound_after(n) <= tol).ok_or(
                SeriesError::ToleranceUnreachable {
                    tol,
                    best: bound_after(len - 1),
                },
            )?;
            let (value, terms_used, finished) = reduced_sum(t, last, |n| 2.0 * samples[n]);
            Ok(SeriesValue {
                value,
                error_bound: if finished { 0.0 } else { bound_after(last) },
                terms_used,
            })
        }
    }
}

/// Result of iterating the contraction `g -> 2 d(t) + 2^-alpha g(2t mod 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointTable {
    /// `(t, g(t))` on the grid `t = j / grid_size`, `j = 0..=grid_size`.
    pub rows: Vec<(f64, f64)>,
    /// A priori sup-distance to `tau_alpha` after the performed iterations.
    pub sup_error_bound: f64,
}

/// Picard iteration for the functional equation of `tau_alpha`, started at
/// `g = 0`. The grid `j / grid_size` is closed under `t -> 2t mod 1`, so no
/// interpolation is needed. Intended as an independent cross-check of
/// [`tau_alpha`].
pub fn tau_fixed_point(
    alpha: f64,
    grid_size: usize,
    iterations: usize,
) -> Result<FixedPointTable, SeriesError> {
    check_alpha(alpha)?;
    if grid_size == 0 || iterations == 0 {
        return Err(SeriesError::EmptyGrid);
    }
    let g_n = grid_size;
    let contraction = (-alpha).exp2();
    let base: Vec<f64> = (0..=g_n)
        .map(|j| 2.0 * dist_to_integers_f64(j as f64 / g_n as f64))
        .collect();
    let doubled: Vec<usize> = (0..=g_n).map(|j| (2 * j) % g_n).collect();
    let mut g = vec![0.0; g_n + 1];
    for _ in 0..iterations {
        g = (0..=g_n)
            .map(|j| base[j] + contraction * g[doubled[j]])
            .collect();
    }
    let sup_tau = 1.0 / (1.0 - contraction);
    Ok(FixedPointTable {
        rows: (0..=g_n).map(|j| (j as f64 / g_n as f64, g[j])).collect(),
        sup_error_bound: contraction.powi(iterations as i32) * sup_tau,
    })
}
