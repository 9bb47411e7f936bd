//! Set-valued maps and their Tabor and Takagi transforms.
//!
//! For a map `S` the Tabor transform is
//!
//! ```text
//! S⊥(t, x) = cl ⋃_n Σ_{k<=n} 2 d(2^k t) S(x / 2^k)
//! ```
//!
//! and the Takagi transform is `cl ⋃_n Σ_{k<=n} 2^-k S(2 d(2^k t) u)`. At a
//! dyadic `t = l / 2^m` every coefficient `d(2^k t)` with `k >= m` vanishes,
//! so the union stabilises after `m` terms and the truncated value is the
//! transform itself.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::{
    dist_to_integers, int, pow2, rational_from_f64, rational_to_f64, DyadicRational, Rational,
};
use crate::report::InclusionReport;
use crate::scalar_series::{integer_alpha, phi_perp, tau_alpha_enclosure, Norm, PhiSpec, SeriesError};
use crate::setarith::{
    add_cone, default_t_grid, is_closedly_k_convex, is_closedly_k_starshaped, minkowski_sum,
    scale, scale_vec, subset_of, union_subset_of, ConeSpec, GeneratorSet, SetError, SetUnion,
    Vector,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("point {0} lies outside the domain")]
    OutsideDomain(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("phi({0}) is not rational, so the set cannot be formed exactly")]
    NonRational(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("invalid family: {0}")]
    Invalid(String),
}

fn show(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(crate::json::rational_text).collect();
    format!("({})", parts.join(", "))
}

/// A box `Π [lo_i, hi_i]` with rational corners.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DomainRepr>", into = "Vec<DomainRepr>")]
pub struct Domain {
    lo: Vector,
    hi: Vector,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct DomainRepr(#[serde(with = "crate::json::vector")] Vec<Rational>);

impl TryFrom<Vec<DomainRepr>> for Domain {
    type Error = TransformError;
    fn try_from(v: Vec<DomainRepr>) -> Result<Self, TransformError> {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for DomainRepr(pair) in v {
            match <[Rational; 2]>::try_from(pair) {
                Ok([a, b]) => {
                    lo.push(a);
                    hi.push(b);
                }
                Err(_) => return Err(TransformError::Invalid("domain bounds must be pairs".into())),
            }
        }
        Domain::new(lo, hi)
    }
}

impl From<Domain> for Vec<DomainRepr> {
    fn from(d: Domain) -> Self {
        d.lo.into_iter()
            .zip(d.hi)
            .map(|(a, b)| DomainRepr(vec![a, b]))
            .collect()
    }
}

impl Domain {
    pub fn new(lo: Vector, hi: Vector) -> Result<Self, TransformError> {
        if lo.is_empty() || lo.len() != hi.len() || lo.len() > crate::setarith::MAX_DIM {
            return Err(TransformError::Invalid("domain must be a box of dimension 1 to 3".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(TransformError::Invalid("domain has lo > hi".into()));
        }
        Ok(Domain { lo, hi })
    }

    pub fn interval(lo: Rational, hi: Rational) -> Result<Self, TransformError> {
        Domain::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &Vector {
        &self.lo
    }

    pub fn hi(&self) -> &Vector {
        &self.hi
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (a, b))| a <= v && v <= b)
    }

    /// The box `D - D`.
    pub fn differences(&self) -> Domain {
        let w: Vector = self.hi.iter().zip(&self.lo).map(|(b, a)| b - a).collect();
        Domain {
            lo: w.iter().map(|v| -v).collect(),
            hi: w,
        }
    }

    /// `lo + s (hi - lo)` coordinate-wise.
    pub fn point_at(&self, s: &Rational) -> Vector {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| a + s * (b - a))
            .collect()
    }

    fn check(&self, x: &[Rational]) -> Result<(), TransformError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(TransformError::OutsideDomain(show(x)))
        }
    }
}

/// One polynomial piece, valid from `from` (inclusive) up to the next piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    #[serde(with = "crate::json::opt_rational", default)]
    pub from: Option<Rational>,
    /// Coefficients in ascending powers.
    #[serde(with = "crate::json::vector")]
    pub coeffs: Vec<Rational>,
}

/// A real function of one variable, polynomial on left-closed pieces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Piece>", into = "Vec<Piece>")]
pub struct PiecewisePoly {
    pieces: Vec<Piece>,
}

impl TryFrom<Vec<Piece>> for PiecewisePoly {
    type Error = TransformError;
    fn try_from(pieces: Vec<Piece>) -> Result<Self, TransformError> {
        PiecewisePoly::new(pieces)
    }
}

impl From<PiecewisePoly> for Vec<Piece> {
    fn from(p: PiecewisePoly) -> Self {
        p.pieces
    }
}

impl PiecewisePoly {
    /// The first piece must start at `-inf` (`from = None`) and the remaining
    /// breakpoints must increase strictly.
    pub fn new(pieces: Vec<Piece>) -> Result<Self, TransformError> {
        let first = pieces
            .first()
            .ok_or_else(|| TransformError::Invalid("no polynomial pieces".into()))?;
        if first.from.is_some() {
            return Err(TransformError::Invalid("first piece must start at -inf".into()));
        }
        let mut last: Option<&Rational> = None;
        for p in &pieces[1..] {
            let b = p
                .from
                .as_ref()
                .ok_or_else(|| TransformError::Invalid("only the first piece may be unbounded".into()))?;
            if last.is_some_and(|l| l >= b) {
                return Err(TransformError::Invalid("breakpoints must increase".into()));
            }
            last = Some(b);
        }
        Ok(PiecewisePoly { pieces })
    }

    pub fn polynomial(coeffs: Vec<Rational>) -> Self {
        PiecewisePoly {
            pieces: vec![Piece { from: None, coeffs }],
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let piece = self
            .pieces
            .iter()
            .rev()
            .find(|p| p.from.as_ref().map_or(true, |b| b <= x))
            .expect("first piece covers everything");
        piece
            .coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn negate(&self) -> Self {
        PiecewisePoly {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    from: p.from.clone(),
                    coeffs: p.coeffs.iter().map(|c| -c).collect(),
                })
                .collect(),
        }
    }
}

/// The shape of a set-valued map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilyKind {
    /// `x ↦ [f(x), ∞)` in `R^1`.
    Epigraph { f: PiecewisePoly },
    /// `x ↦ (-∞, f(x)]` in `R^1`.
    Hypograph { f: PiecewisePoly },
    /// `u ↦ phi(u) S0 + K`.
    Template {
        phi: PhiSpec,
        s0: GeneratorSet,
        k: ConeSpec,
        #[serde(default)]
        norm: Norm,
    },
    Constant { set: GeneratorSet },
    Singleton0 { dim: usize },
}

impl FamilyKind {
    pub fn epigraph(coeffs: Vec<Rational>) -> Self {
        FamilyKind::Epigraph {
            f: PiecewisePoly::polynomial(coeffs),
        }
    }

    pub fn hypograph(coeffs: Vec<Rational>) -> Self {
        FamilyKind::Hypograph {
            f: PiecewisePoly::polynomial(coeffs),
        }
    }

    pub fn template(phi: PhiSpec, s0: GeneratorSet, k: ConeSpec) -> Self {
        FamilyKind::Template {
            phi,
            s0,
            k,
            norm: Norm::default(),
        }
    }

    /// Dimension of the values.
    pub fn value_dim(&self) -> usize {
        match self {
            FamilyKind::Epigraph { .. } | FamilyKind::Hypograph { .. } => 1,
            FamilyKind::Template { s0, .. } => s0.dim(),
            FamilyKind::Constant { set } => set.dim(),
            FamilyKind::Singleton0 { dim } => *dim,
        }
    }

    pub fn validate(&self) -> Result<(), TransformError> {
        match self {
            FamilyKind::Template { phi, s0, k, .. } => {
                phi.validate()?;
                if s0.dim() != k.dim() {
                    return Err(TransformError::Invalid("S0 and K differ in dimension".into()));
                }
                Ok(())
            }
            FamilyKind::Singleton0 { dim } if !(1..=3).contains(dim) => {
                Err(SetError::BadDimension(*dim).into())
            }
            _ => Ok(()),
        }
    }

    /// The value at `x`, without a domain check.
    pub fn eval(&self, x: &[Rational]) -> Result<GeneratorSet, TransformError> {
        let one_d = |x: &[Rational]| -> Result<Rational, TransformError> {
            match x {
                [v] => Ok(v.clone()),
                _ => Err(SetError::DimensionMismatch {
                    expected: 1,
                    got: x.len(),
                }
                .into()),
            }
        };
        match self {
            FamilyKind::Epigraph { f } => Ok(GeneratorSet::new(
                1,
                vec![vec![f.eval(&one_d(x)?)]],
                vec![vec![int(1)]],
            )?),
            FamilyKind::Hypograph { f } => Ok(GeneratorSet::new(
                1,
                vec![vec![f.eval(&one_d(x)?)]],
                vec![vec![int(-1)]],
            )?),
            FamilyKind::Template { phi, s0, k, norm } => {
                let c = phi
                    .eval_exact(x, *norm)
                    .ok_or_else(|| TransformError::NonRational(show(x)))?;
                Ok(add_cone(&scale(&c, s0)?, k)?)
            }
            FamilyKind::Constant { set } => Ok(set.clone()),
            FamilyKind::Singleton0 { dim } => Ok(GeneratorSet::zero(*dim)),
        }
    }

    /// `x ↦ -S(x)`, reflecting epigraphs into hypographs of `-f`.
    pub fn negate(&self) -> FamilyKind {
        match self {
            FamilyKind::Epigraph { f } => FamilyKind::Hypograph { f: f.negate() },
            FamilyKind::Hypograph { f } => FamilyKind::Epigraph { f: f.negate() },
            FamilyKind::Template { phi, s0, k, norm } => FamilyKind::Template {
                phi: phi.clone(),
                s0: s0.negate(),
                k: k.negate(),
                norm: *norm,
            },
            FamilyKind::Constant { set } => FamilyKind::Constant { set: set.negate() },
            FamilyKind::Singleton0 { dim } => FamilyKind::Singleton0 { dim: *dim },
        }
    }

    /// Swaps epigraph and hypograph while keeping `f`.
    pub fn flip_orientation(&self) -> FamilyKind {
        match self {
            FamilyKind::Epigraph { f } => FamilyKind::Hypograph { f: f.clone() },
            FamilyKind::Hypograph { f } => FamilyKind::Epigraph { f: f.clone() },
            other => other.clone(),
        }
    }

    /// Copy with a power-form `phi` coefficient multiplied by `factor`.
    pub fn scale_phi(&self, factor: &Rational) -> Option<FamilyKind> {
        match self {
            FamilyKind::Template { phi, s0, k, norm } => Some(FamilyKind::Template {
                phi: phi.scaled(factor)?,
                s0: s0.clone(),
                k: k.clone(),
                norm: *norm,
            }),
            _ => None,
        }
    }
}

/// A set-valued map together with the domain it may be evaluated on.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFamily {
    pub kind: FamilyKind,
    pub domain: Option<Domain>,
}

impl SetFamily {
    pub fn new(kind: FamilyKind) -> Self {
        SetFamily { kind, domain: None }
    }

    pub fn on(kind: FamilyKind, domain: Domain) -> Self {
        SetFamily {
            kind,
            domain: Some(domain),
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Result<GeneratorSet, TransformError> {
        if let Some(d) = &self.domain {
            d.check(x)?;
        }
        self.kind.eval(x)
    }

    pub fn value_dim(&self) -> usize {
        self.kind.value_dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    pub value: SetUnion,
    /// Largest term index included.
    pub truncation_n: u32,
    /// Whether `value` is the full transform rather than a truncation.
    pub exact: bool,
    /// Sup-norm bound on the omitted terms, for power-form templates.
    pub tail_certificate: Option<f64>,
}

impl TransformResult {
    /// The single convex part, when the union collapsed to one.
    pub fn as_set(&self) -> Option<&GeneratorSet> {
        self.value.as_single()
    }
}

/// Exponent `m` of `t = l / 2^m` in lowest terms, if `t` is dyadic.
pub fn dyadic_exponent(t: &Rational) -> Option<u32> {
    DyadicRational::from_rational(t).ok().map(|d| d.exponent())
}

/// `2 d(2^k t)` for `k = 0..=n`, exactly.
pub fn tabor_weights(t: &Rational, n: u32) -> Vec<Rational> {
    let two = int(2);
    let mut x = t - t.floor();
    let mut out = Vec::with_capacity(n as usize + 1);
    for _ in 0..=n {
        out.push(&two * dist_to_integers(&x));
        x = &x * &two;
        x = &x - x.floor();
    }
    out
}

fn template_tail(kind: &FamilyKind, x: &[Rational], n: u32) -> Option<f64> {
    match kind {
        FamilyKind::Template {
            phi: PhiSpec::Power { coefficient, alpha },
            s0,
            norm,
            ..
        } => {
            let scale = rational_to_f64(coefficient) * norm.eval_f64(x).powf(*alpha);
            let tail = crate::scalar_series::tau_tail_bound(*alpha, n as usize);
            Some(scale * tail * rational_to_f64(&s0.point_radius()))
        }
        _ => None,
    }
}

fn union_of_partial_sums(terms: Vec<GeneratorSet>) -> Result<SetUnion, TransformError> {
    let mut parts = Vec::with_capacity(terms.len());
    let mut acc: Option<GeneratorSet> = None;
    for term in terms {
        let next = match acc {
            None => term,
            Some(a) => minkowski_sum(&a, &term)?,
        };
        parts.push(next.clone());
        acc = Some(next);
    }
    Ok(SetUnion::new(parts)?.simplify())
}

/// `⋃_{n<=N} Σ_{k<=n} 2 d(2^k t) S(x / 2^k)`.
pub fn tabor_transform(
    s: &SetFamily,
    t: &Rational,
    x: &[Rational],
    n: u32,
) -> Result<TransformResult, TransformError> {
    if let Some(d) = &s.domain {
        d.check(x)?;
    }
    let weights = tabor_weights(t, n);
    let mut terms = Vec::with_capacity(weights.len());
    for (k, c) in weights.iter().enumerate() {
        let arg = scale_vec(&Rational::new(1.into(), pow2(k as u32)), &x.to_vec());
        let value = s.eval(&arg)?;
        terms.push(scale(c, &value)?);
    }
    let exact = match dyadic_exponent(t) {
        Some(m) => n + 1 >= m,
        None => false,
    };
    Ok(TransformResult {
        value: union_of_partial_sums(terms)?,
        truncation_n: n,
        exact,
        tail_certificate: if exact {
            Some(0.0)
        } else {
            template_tail(&s.kind, x, n)
        },
    })
}

/// `⋃_{n<=N} Σ_{k<=n} 2^-k S(2 d(2^k t) u)`.
pub fn takagi_transform(
    s: &SetFamily,
    t: &Rational,
    u: &[Rational],
    n: u32,
) -> Result<TransformResult, TransformError> {
    let weights = tabor_weights(t, n);
    let mut terms = Vec::with_capacity(weights.len());
    for (k, c) in weights.iter().enumerate() {
        let arg = scale_vec(c, &u.to_vec());
        let value = s.eval(&arg)?;
        terms.push(scale(&Rational::new(1.into(), pow2(k as u32)), &value)?);
    }
    // Past the dyadic exponent every argument is zero; the tail is then
    // Σ 2^-k S(0), which adds nothing when S(0) is a cone.
    let zero = vec![Rational::zero(); u.len()];
    let at_zero = s.eval(&zero).ok();
    let exact = match (dyadic_exponent(t), at_zero) {
        (Some(m), Some(z)) if z.points().iter().all(|p| p.iter().all(|v| v.is_zero())) => {
            if z.rays().is_empty() {
                n + 1 >= m
            } else {
                n >= m
            }
        }
        _ => false,
    };
    Ok(TransformResult {
        value: union_of_partial_sums(terms)?,
        truncation_n: n,
        exact,
        tail_certificate: if exact { Some(0.0) } else { None },
    })
}

/// `phi_perp(t, x)` as a rational enclosure `[lo, hi]`.
///
/// Exact (`lo == hi`) at dyadic `t` for a power-form `phi` with an integer
/// exponent whose value `||x||^alpha` is rational. Rational non-dyadic `t`
/// gives an enclosure of width below `2^-60` times the scale. Anything else
/// goes through the floating series, widened by its error bound.
pub fn phi_perp_enclosure(
    phi: &PhiSpec,
    norm: Norm,
    t: &Rational,
    x: &[Rational],
) -> Result<(Rational, Rational), TransformError> {
    phi.validate()?;
    if let PhiSpec::Power { coefficient, alpha } = phi {
        if let Some(k) = integer_alpha(*alpha) {
            if let Some(p) = norm.pow_exact(x, k) {
                let c = coefficient * p;
                let last = match dyadic_exponent(t) {
                    Some(m) => m,
                    None => 64 / k + 1,
                };
                let (lo, hi) = tau_alpha_enclosure(k, t, last);
                return Ok((&c * lo, &c * hi));
            }
        }
    }
    let tf = rational_to_f64(t);
    let v = phi_perp(phi, tf, norm.eval_f64(x), 1e-14)?;
    let slack = v.error_bound + 1e-12 * v.value.abs().max(1.0);
    let lo = rational_from_f64((v.value - slack).max(0.0)).unwrap_or_else(Rational::zero);
    let hi = rational_from_f64(v.value + slack)
        .ok_or_else(|| TransformError::NonRational(show(x)))?;
    Ok((lo, hi))
}

/// Closed form `φ⊥(t, x) S0 + K` of the Tabor transform of a template map.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    pub scalar_lo: Rational,
    pub scalar_hi: Rational,
    /// `scalar_lo * S0 + K`; contained in the transform.
    pub inner: GeneratorSet,
    /// `scalar_hi * S0 + K`; contains the transform.
    pub outer: GeneratorSet,
    pub exact: bool,
}

/// Checks that `S0` is closedly `K`-convex and closedly `K`-starshaped on
/// the default `t` grid.
pub fn check_template_hypotheses(s0: &GeneratorSet, k: &ConeSpec) -> Result<(), TransformError> {
    if s0.dim() != k.dim() {
        return Err(TransformError::Invalid("S0 and K differ in dimension".into()));
    }
    let grid = default_t_grid();
    if !is_closedly_k_convex(s0, k, &grid)? {
        return Err(TransformError::Hypothesis("S0 is not closedly K-convex".into()));
    }
    if !is_closedly_k_starshaped(s0, k, None, &grid)? {
        return Err(TransformError::Hypothesis("S0 is not closedly K-starshaped".into()));
    }
    Ok(())
}

pub fn tabor_closed_form(
    phi: &PhiSpec,
    s0: &GeneratorSet,
    k: &ConeSpec,
    norm: Norm,
    t: &Rational,
    x: &[Rational],
) -> Result<ClosedForm, TransformError> {
    if t.is_integer() {
        return Err(TransformError::Hypothesis(format!(
            "the closed form needs a non-integer t, got {t}"
        )));
    }
    check_template_hypotheses(s0, k)?;
    let (lo, hi) = phi_perp_enclosure(phi, norm, t, x)?;
    let inner = add_cone(&scale(&lo, s0)?, k)?;
    let outer = add_cone(&scale(&hi, s0)?, k)?;
    Ok(ClosedForm {
        exact: lo == hi,
        scalar_lo: lo,
        scalar_hi: hi,
        inner,
        outer,
    })
}

/// Compares the transform of `u ↦ φ(u) S0 + K` with its closed form at a
/// dyadic `t`: first `transform ⊆ outer`, then `inner ⊆ transform`.
pub fn prop_tab_equivalence_check(
    phi: &PhiSpec,
    s0: &GeneratorSet,
    k: &ConeSpec,
    norm: Norm,
    t: &DyadicRational,
    x: &[Rational],
    n: u32,
) -> Result<(InclusionReport, InclusionReport), TransformError> {
    let tr = t.to_rational();
    let cf = tabor_closed_form(phi, s0, k, norm, &tr, x)?;
    let family = SetFamily::new(FamilyKind::Template {
        phi: phi.clone(),
        s0: s0.clone(),
        k: k.clone(),
        norm,
    });
    let transform = tabor_transform(&family, &tr, x, n)?;
    let forward = subset_of(&transform.value, &cf.outer)?.with_id("prop-tab-forward");
    let reverse = union_subset_of(&cf.inner, &transform.value)?.with_id("prop-tab-reverse");
    Ok((forward, reverse))
}

/// A sequence `(S_k)` for the serial `K`-Cauchy probe.
#[derive(Debug, Clone, PartialEq)]
pub enum SetSequence {
    /// `S_k = lambda_k S + K`.
    Scaled {
        lambdas: Vec<Rational>,
        set: GeneratorSet,
    },
    Explicit(Vec<GeneratorSet>),
}

impl SetSequence {
    /// `lambda_k = 2^-k` for `k = 0..=n_max`.
    pub fn geometric(set: GeneratorSet, n_max: usize) -> Self {
        SetSequence::Scaled {
            lambdas: (0..=n_max)
                .map(|k| Rational::new(1.into(), pow2(k as u32)))
                .collect(),
            set,
        }
    }

    fn terms(&self, k: &ConeSpec, n_max: usize) -> Result<Vec<GeneratorSet>, TransformError> {
        match self {
            SetSequence::Scaled { lambdas, set } => {
                if lambdas.len() <= n_max {
                    return Err(TransformError::Invalid(format!(
                        "need {} coefficients, got {}",
                        n_max + 1,
                        lambdas.len()
                    )));
                }
                if lambdas.iter().any(|l| l.is_negative()) {
                    return Err(TransformError::Invalid("coefficients must be nonnegative".into()));
                }
                lambdas[..=n_max]
                    .iter()
                    .map(|l| Ok(add_cone(&scale(l, set)?, k)?))
                    .collect()
            }
            SetSequence::Explicit(sets) => {
                if sets.len() <= n_max {
                    return Err(TransformError::Invalid(format!(
                        "need {} sets, got {}",
                        n_max + 1,
                        sets.len()
                    )));
                }
                Ok(sets[..=n_max].to_vec())
            }
        }
    }
}

/// For each `eps`, the least `m <= n_max` with `Σ_{k=m}^{n} S_k ⊆ [-eps, eps]^d + K`
/// for every `m <= n <= n_max`, or `None` when no such `m` exists.
pub fn serially_k_cauchy_probe(
    seq: &SetSequence,
    k: &ConeSpec,
    eps_list: &[Rational],
    n_max: usize,
) -> Result<Vec<(Rational, Option<usize>)>, TransformError> {
    let terms = seq.terms(k, n_max)?;
    let dim = k.dim();
    // tails[m] = [Σ_{k=m}^{n} S_k for n = m..=n_max]
    let mut tails = Vec::with_capacity(n_max + 1);
    for m in 0..=n_max {
        let mut acc = terms[m].clone();
        let mut row = vec![acc.clone()];
        for term in &terms[m + 1..] {
            acc = minkowski_sum(&acc, term)?;
            row.push(acc.clone());
        }
        tails.push(row);
    }
    let mut out = Vec::with_capacity(eps_list.len());
    for eps in eps_list {
        if !eps.is_positive() {
            return Err(TransformError::Invalid("eps must be positive".into()));
        }
        let target = add_cone(&GeneratorSet::linf_ball(dim, eps), k)?;
        let mut found = None;
        for (m, row) in tails.iter().enumerate() {
            let mut ok = true;
            for s in row {
                if !subset_of(s, &target)?.passed() {
                    ok = false;
                    break;
                }
            }
            if ok {
                found = Some(m);
                break;
            }
        }
        out.push((eps.clone(), found));
    }
    Ok(out)
}
