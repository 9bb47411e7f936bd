//! Exact polyhedral sets in `R^d`, `d <= 3`, in generator form
//! `conv(points) + cone(rays)`.
//!
//! Minkowski sums and nonnegative scalings act generator-wise, so they are
//! exact and cheap. Membership and ray containment reduce to rational linear
//! feasibility, solved by [`crate::lp`]. Finitely generated sets are closed,
//! so the closure operator is the identity on this representation and
//! `cl(S + K)` is just `S + K`.
//!
//! Every constructor returns an irredundant representation: duplicate and
//! redundant generators are removed and rays are normalized to unit sup norm.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::Rational;
use crate::lp::{feasible_point, maximize, LpOutcome};
use crate::report::{Generator, InclusionReport, Margin, Verdict, Witness};

pub type Vector = Vec<Rational>;

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetError {
    #[error("dimension must be between 1 and 3, got {0}")]
    BadDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("a generator set needs at least one point")]
    NoPoints,
    #[error("a set union needs at least one part")]
    EmptyUnion,
    #[error("scaling factor must be nonnegative")]
    NegativeScale,
    #[error("parameter t = {0} lies outside [0, 1]")]
    OutsideUnitInterval(String),
}

fn check_dim(dim: usize) -> Result<(), SetError> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(SetError::BadDimension(dim))
    }
}

fn check_len(expected: usize, got: usize) -> Result<(), SetError> {
    if expected == got {
        Ok(())
    } else {
        Err(SetError::DimensionMismatch { expected, got })
    }
}

fn lex_cmp(a: &Vector, b: &Vector) -> Ordering {
    a.iter().cmp(b.iter())
}

/// Scales a nonzero ray so that its largest absolute coordinate is one.
fn normalize_ray(r: &Vector) -> Vector {
    let m = r
        .iter()
        .map(|x| x.abs())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    r.iter().map(|x| x / &m).collect()
}

pub fn add_vec(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(t: &Rational, a: &[Rational]) -> Vector {
    a.iter().map(|x| t * x).collect()
}

pub fn neg_vec(a: &[Rational]) -> Vector {
    a.iter().map(|x| -x).collect()
}

/// Closed interval view of a one-dimensional set; `None` is infinite.
#[derive(Debug, Clone, PartialEq)]
struct Interval {
    lo: Option<Rational>,
    hi: Option<Rational>,
}

impl Interval {
    fn contains(&self, p: &Rational) -> bool {
        self.lo.as_ref().map_or(true, |lo| lo <= p) && self.hi.as_ref().map_or(true, |hi| p <= hi)
    }

    /// Depth inside (nonnegative) or minus the distance outside.
    fn slack(&self, p: &Rational) -> Margin {
        let below = self.lo.as_ref().map(|lo| p - lo);
        let above = self.hi.as_ref().map(|hi| hi - p);
        match (below, above) {
            (None, None) => Margin::PosInfinity,
            (Some(a), None) | (None, Some(a)) => Margin::Exact(a),
            (Some(a), Some(b)) => Margin::Exact(if a < b { a } else { b }),
        }
    }
}

/// `conv(points) + cone(rays)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorSetRepr", into = "GeneratorSetRepr")]
pub struct GeneratorSet {
    dim: usize,
    points: Vec<Vector>,
    rays: Vec<Vector>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorSetRepr {
    dim: usize,
    #[serde(with = "crate::json::vectors")]
    points: Vec<Vector>,
    #[serde(with = "crate::json::vectors", default)]
    rays: Vec<Vector>,
}

impl TryFrom<GeneratorSetRepr> for GeneratorSet {
    type Error = SetError;
    fn try_from(r: GeneratorSetRepr) -> Result<Self, SetError> {
        GeneratorSet::new(r.dim, r.points, r.rays)
    }
}

impl From<GeneratorSet> for GeneratorSetRepr {
    fn from(s: GeneratorSet) -> Self {
        GeneratorSetRepr {
            dim: s.dim,
            points: s.points,
            rays: s.rays,
        }
    }
}

impl GeneratorSet {
    /// Builds `conv(points) + cone(rays)`. Zero rays are dropped.
    pub fn new(dim: usize, points: Vec<Vector>, rays: Vec<Vector>) -> Result<Self, SetError> {
        check_dim(dim)?;
        if points.is_empty() {
            return Err(SetError::NoPoints);
        }
        for v in points.iter().chain(&rays) {
            check_len(dim, v.len())?;
        }
        let rays = rays
            .into_iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect();
        Ok(Self::canonical(dim, points, rays))
    }

    pub fn point(p: Vector) -> Result<Self, SetError> {
        GeneratorSet::new(p.len(), vec![p], vec![])
    }

    pub fn zero(dim: usize) -> Self {
        GeneratorSet {
            dim,
            points: vec![vec![Rational::zero(); dim]],
            rays: vec![],
        }
    }

    /// The closed interval `[lo, hi]` in `R^1`.
    pub fn interval(lo: Rational, hi: Rational) -> Self {
        GeneratorSet::canonical(1, vec![vec![lo], vec![hi]], vec![])
    }

    /// The sup-norm ball `[-eps, eps]^dim`.
    pub fn linf_ball(dim: usize, eps: &Rational) -> Self {
        let mut corners = vec![vec![]];
        for _ in 0..dim {
            corners = corners
                .into_iter()
                .flat_map(|c: Vector| {
                    let mut a = c.clone();
                    a.push(-eps.clone());
                    let mut b = c;
                    b.push(eps.clone());
                    [a, b]
                })
                .collect();
        }
        GeneratorSet::canonical(dim, corners, vec![])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    fn canonical(dim: usize, points: Vec<Vector>, rays: Vec<Vector>) -> Self {
        if dim == 1 {
            return Self::canonical_1d(points, rays);
        }
        let mut rays: Vec<Vector> = rays.iter().map(normalize_ray).collect();
        rays.sort_by(lex_cmp);
        rays.dedup();
        let mut i = 0;
        while i < rays.len() {
            let others: Vec<Vector> = rays
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, r)| r.clone())
                .collect();
            if ray_in_cone(dim, &rays[i], &others) {
                rays.remove(i);
            } else {
                i += 1;
            }
        }
        let mut points = points;
        points.sort_by(lex_cmp);
        points.dedup();
        let mut i = 0;
        while i < points.len() && points.len() > 1 {
            let others: Vec<Vector> = points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| p.clone())
                .collect();
            if lp_contains(dim, &others, &rays, &points[i]) {
                points.remove(i);
            } else {
                i += 1;
            }
        }
        GeneratorSet { dim, points, rays }
    }

    fn canonical_1d(points: Vec<Vector>, rays: Vec<Vector>) -> Self {
        let up = rays.iter().any(|r| r[0].is_positive());
        let down = rays.iter().any(|r| r[0].is_negative());
        let lo = points.iter().map(|p| &p[0]).min().cloned().unwrap();
        let hi = points.iter().map(|p| &p[0]).max().cloned().unwrap();
        let one = Rational::one();
        let (points, rays) = match (up, down) {
            (true, true) => (vec![vec![Rational::zero()]], vec![vec![-one.clone()], vec![one]]),
            (true, false) => (vec![vec![lo]], vec![vec![one]]),
            (false, true) => (vec![vec![hi]], vec![vec![-one]]),
            (false, false) if lo == hi => (vec![vec![lo]], vec![]),
            (false, false) => (vec![vec![lo], vec![hi]], vec![]),
        };
        GeneratorSet {
            dim: 1,
            points,
            rays,
        }
    }

    fn interval_view(&self) -> Interval {
        debug_assert_eq!(self.dim, 1);
        let up = self.rays.iter().any(|r| r[0].is_positive());
        let down = self.rays.iter().any(|r| r[0].is_negative());
        let lo = self.points.iter().map(|p| &p[0]).min().cloned();
        let hi = self.points.iter().map(|p| &p[0]).max().cloned();
        Interval {
            lo: if down { None } else { lo },
            hi: if up { None } else { hi },
        }
    }

    /// Lower and upper end of a one-dimensional set (`None` when infinite).
    pub fn bounds_1d(&self) -> Option<(Option<Rational>, Option<Rational>)> {
        if self.dim != 1 {
            return None;
        }
        let iv = self.interval_view();
        Some((iv.lo, iv.hi))
    }

    pub fn translate(&self, y: &Vector) -> Result<Self, SetError> {
        check_len(self.dim, y.len())?;
        Ok(GeneratorSet {
            dim: self.dim,
            points: self.points.iter().map(|p| add_vec(p, y)).collect(),
            rays: self.rays.clone(),
        })
    }

    /// Pointwise negation `-A`.
    pub fn negate(&self) -> Self {
        GeneratorSet::canonical(
            self.dim,
            self.points.iter().map(|v| neg_vec(v)).collect(),
            self.rays.iter().map(|v| neg_vec(v)).collect(),
        )
    }

    /// Sup-norm radius of the point generators.
    pub fn point_radius(&self) -> Rational {
        self.points
            .iter()
            .flat_map(|p| p.iter().map(|x| x.abs()))
            .fold(Rational::zero(), |a, b| if b > a { b } else { a })
    }
}

/// `cone(rays) = { sum mu_j r_j : mu >= 0 }`, always containing zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ConeRepr", into = "ConeRepr")]
pub struct ConeSpec {
    dim: usize,
    rays: Vec<Vector>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeRepr {
    dim: usize,
    #[serde(with = "crate::json::vectors", default)]
    rays: Vec<Vector>,
}

impl TryFrom<ConeRepr> for ConeSpec {
    type Error = SetError;
    fn try_from(r: ConeRepr) -> Result<Self, SetError> {
        ConeSpec::new(r.dim, r.rays)
    }
}

impl From<ConeSpec> for ConeRepr {
    fn from(c: ConeSpec) -> Self {
        ConeRepr {
            dim: c.dim,
            rays: c.rays,
        }
    }
}

impl ConeSpec {
    pub fn new(dim: usize, rays: Vec<Vector>) -> Result<Self, SetError> {
        let set = GeneratorSet::new(dim, vec![vec![Rational::zero(); dim]], rays)?;
        Ok(ConeSpec {
            dim,
            rays: set.rays,
        })
    }

    pub fn trivial(dim: usize) -> Self {
        ConeSpec { dim, rays: vec![] }
    }

    /// `cone{r}` for a single direction.
    pub fn ray(r: Vector) -> Result<Self, SetError> {
        ConeSpec::new(r.len(), vec![r])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    pub fn to_set(&self) -> GeneratorSet {
        GeneratorSet {
            dim: self.dim,
            points: vec![vec![Rational::zero(); self.dim]],
            rays: self.rays.clone(),
        }
    }

    pub fn contains(&self, v: &Vector) -> bool {
        v.iter().all(|x| x.is_zero()) || ray_in_cone(self.dim, v, &self.rays)
    }

    /// `self ⊆ other` as cones.
    pub fn is_subcone_of(&self, other: &ConeSpec) -> bool {
        self.dim == other.dim && self.rays.iter().all(|r| other.contains(r))
    }

    /// Set equality of the generated cones.
    pub fn same_cone(&self, other: &ConeSpec) -> bool {
        self.is_subcone_of(other) && other.is_subcone_of(self)
    }

    /// Cone generated by both lists of rays.
    pub fn join(&self, other: &ConeSpec) -> Result<ConeSpec, SetError> {
        check_len(self.dim, other.dim)?;
        ConeSpec::new(
            self.dim,
            self.rays.iter().chain(&other.rays).cloned().collect(),
        )
    }

    pub fn negate(&self) -> ConeSpec {
        ConeSpec {
            dim: self.dim,
            rays: self.rays.iter().map(|v| neg_vec(v)).collect(),
        }
    }
}

/// A finite union of generator sets of one dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetUnion {
    parts: Vec<GeneratorSet>,
}

impl SetUnion {
    pub fn new(parts: Vec<GeneratorSet>) -> Result<Self, SetError> {
        let first = parts.first().ok_or(SetError::EmptyUnion)?;
        let dim = first.dim;
        for p in &parts {
            check_len(dim, p.dim)?;
        }
        Ok(SetUnion { parts })
    }

    pub fn single(set: GeneratorSet) -> Self {
        SetUnion { parts: vec![set] }
    }

    pub fn dim(&self) -> usize {
        self.parts[0].dim
    }

    pub fn parts(&self) -> &[GeneratorSet] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<GeneratorSet> {
        self.parts
    }

    /// The single convex part, if the union has exactly one.
    pub fn as_single(&self) -> Option<&GeneratorSet> {
        match self.parts.as_slice() {
            [one] => Some(one),
            _ => None,
        }
    }

    /// Drops duplicate parts and parts contained in another part. The set
    /// represented does not change.
    pub fn simplify(&self) -> SetUnion {
        let mut parts: Vec<GeneratorSet> = Vec::new();
        for p in &self.parts {
            if !parts.contains(p) {
                parts.push(p.clone());
            }
        }
        let mut i = 0;
        while i < parts.len() && parts.len() > 1 {
            let absorbed = (0..parts.len())
                .filter(|&j| j != i)
                .any(|j| set_subset(&parts[i], &parts[j]));
            if absorbed {
                parts.remove(i);
            } else {
                i += 1;
            }
        }
        SetUnion { parts }
    }

    /// `self + b`, part by part.
    pub fn add_set(&self, b: &GeneratorSet) -> Result<SetUnion, SetError> {
        let parts = self
            .parts
            .iter()
            .map(|p| minkowski_sum(p, b))
            .collect::<Result<Vec<_>, _>>()?;
        SetUnion::new(parts)
    }

    /// `self + other` for two unions: the union of all pairwise sums.
    pub fn add_union(&self, other: &SetUnion) -> Result<SetUnion, SetError> {
        let mut parts = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                parts.push(minkowski_sum(a, b)?);
            }
        }
        SetUnion::new(parts)
    }
}

/// Anything that can appear on the left of an inclusion.
pub trait SetLike {
    fn parts(&self) -> &[GeneratorSet];
    fn dim(&self) -> usize {
        self.parts()[0].dim
    }
}

impl SetLike for GeneratorSet {
    fn parts(&self) -> &[GeneratorSet] {
        std::slice::from_ref(self)
    }
}

impl SetLike for SetUnion {
    fn parts(&self) -> &[GeneratorSet] {
        &self.parts
    }
}

/// `A + B`, generator-wise.
pub fn minkowski_sum(a: &GeneratorSet, b: &GeneratorSet) -> Result<GeneratorSet, SetError> {
    check_len(a.dim, b.dim)?;
    let mut points = Vec::with_capacity(a.points.len() * b.points.len());
    for p in &a.points {
        for q in &b.points {
            points.push(add_vec(p, q));
        }
    }
    let rays = a.rays.iter().chain(&b.rays).cloned().collect();
    Ok(GeneratorSet::canonical(a.dim, points, rays))
}

/// Sum of a nonempty list of sets.
pub fn minkowski_sum_all<'a>(
    sets: impl IntoIterator<Item = &'a GeneratorSet>,
) -> Result<Option<GeneratorSet>, SetError> {
    let mut acc: Option<GeneratorSet> = None;
    for s in sets {
        acc = Some(match acc {
            None => s.clone(),
            Some(a) => minkowski_sum(&a, s)?,
        });
    }
    Ok(acc)
}

/// `t A` for `t >= 0`, with the convention `0 A = {0}`.
pub fn scale(t: &Rational, a: &GeneratorSet) -> Result<GeneratorSet, SetError> {
    if t.is_negative() {
        return Err(SetError::NegativeScale);
    }
    if t.is_zero() {
        return Ok(GeneratorSet::zero(a.dim));
    }
    Ok(GeneratorSet {
        dim: a.dim,
        points: a.points.iter().map(|p| scale_vec(t, p)).collect(),
        rays: a.rays.clone(),
    })
}

/// `A + K`.
pub fn add_cone(a: &GeneratorSet, k: &ConeSpec) -> Result<GeneratorSet, SetError> {
    check_len(a.dim, k.dim)?;
    if k.rays.is_empty() {
        return Ok(a.clone());
    }
    Ok(GeneratorSet::canonical(
        a.dim,
        a.points.clone(),
        a.rays.iter().chain(&k.rays).cloned().collect(),
    ))
}

fn lp_contains(dim: usize, points: &[Vector], rays: &[Vector], p: &Vector) -> bool {
    if points.is_empty() {
        return false;
    }
    let np = points.len();
    let nv = np + rays.len();
    let mut a = Vec::with_capacity(dim + 1);
    for i in 0..dim {
        let mut row = Vec::with_capacity(nv);
        row.extend(points.iter().map(|q| q[i].clone()));
        row.extend(rays.iter().map(|r| r[i].clone()));
        a.push(row);
    }
    let mut sum_row = vec![Rational::one(); np];
    sum_row.extend((0..rays.len()).map(|_| Rational::zero()));
    a.push(sum_row);
    let mut b: Vec<Rational> = p.clone();
    b.push(Rational::one());
    feasible_point(&a, &b).is_some()
}

fn ray_in_cone(dim: usize, r: &Vector, rays: &[Vector]) -> bool {
    if r.iter().all(|x| x.is_zero()) {
        return true;
    }
    if rays.is_empty() {
        return false;
    }
    if dim == 1 {
        return rays.iter().any(|q| q[0].is_positive() == r[0].is_positive());
    }
    let a: Vec<Vector> = (0..dim)
        .map(|i| rays.iter().map(|q| q[i].clone()).collect())
        .collect();
    feasible_point(&a, r).is_some()
}

/// `p ∈ conv(A.points) + cone(A.rays)`, exactly.
pub fn contains_point(a: &GeneratorSet, p: &Vector) -> Result<bool, SetError> {
    check_len(a.dim, p.len())?;
    if a.dim == 1 {
        return Ok(a.interval_view().contains(&p[0]));
    }
    Ok(lp_contains(a.dim, &a.points, &a.rays, p))
}

/// Sup-norm distance from `p` to `B` (zero when `p ∈ B`).
fn linf_distance(b: &GeneratorSet, p: &Vector) -> Rational {
    let d = b.dim;
    let np = b.points.len();
    let nr = b.rays.len();
    // variables: lambda (np), mu (nr), e+ (d), e- (d), slack (d), r
    let nv = np + nr + 3 * d + 1;
    let r_col = nv - 1;
    let mut a = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..d {
        let mut row = vec![Rational::zero(); nv];
        for (j, q) in b.points.iter().enumerate() {
            row[j] = q[i].clone();
        }
        for (j, q) in b.rays.iter().enumerate() {
            row[np + j] = q[i].clone();
        }
        row[np + nr + i] = Rational::one();
        row[np + nr + d + i] = -Rational::one();
        a.push(row);
        rhs.push(p[i].clone());
    }
    for i in 0..d {
        let mut row = vec![Rational::zero(); nv];
        row[np + nr + i] = Rational::one();
        row[np + nr + d + i] = Rational::one();
        row[np + nr + 2 * d + i] = Rational::one();
        row[r_col] = -Rational::one();
        a.push(row);
        rhs.push(Rational::zero());
    }
    let mut row = vec![Rational::zero(); nv];
    for v in row.iter_mut().take(np) {
        *v = Rational::one();
    }
    a.push(row);
    rhs.push(Rational::one());
    let mut c = vec![Rational::zero(); nv];
    c[r_col] = -Rational::one();
    match maximize(&a, &rhs, &c) {
        LpOutcome::Optimal { value, .. } => -value,
        other => unreachable!("distance program is always solvable: {other:?}"),
    }
}

/// Largest `r` with `p + r [-1, 1]^d ⊆ B`, for `p ∈ B`.
fn linf_depth(b: &GeneratorSet, p: &Vector) -> Margin {
    let d = b.dim;
    let np = b.points.len();
    let nr = b.rays.len();
    let block = np + nr;
    let corners: Vec<Vec<i32>> = (0..(1u32 << d))
        .map(|mask| {
            (0..d)
                .map(|i| if mask & (1 << i) != 0 { 1 } else { -1 })
                .collect()
        })
        .collect();
    let nv = corners.len() * block + 1;
    let r_col = nv - 1;
    let mut a = Vec::new();
    let mut rhs = Vec::new();
    for (ci, corner) in corners.iter().enumerate() {
        let off = ci * block;
        for i in 0..d {
            let mut row = vec![Rational::zero(); nv];
            for (j, q) in b.points.iter().enumerate() {
                row[off + j] = q[i].clone();
            }
            for (j, q) in b.rays.iter().enumerate() {
                row[off + np + j] = q[i].clone();
            }
            row[r_col] = Rational::from_integer((-corner[i]).into());
            a.push(row);
            rhs.push(p[i].clone());
        }
        let mut row = vec![Rational::zero(); nv];
        for v in row.iter_mut().skip(off).take(np) {
            *v = Rational::one();
        }
        a.push(row);
        rhs.push(Rational::one());
    }
    let mut c = vec![Rational::zero(); nv];
    c[r_col] = Rational::one();
    match maximize(&a, &rhs, &c) {
        LpOutcome::Optimal { value, .. } => Margin::Exact(value),
        LpOutcome::Unbounded => Margin::PosInfinity,
        LpOutcome::Infeasible => Margin::Exact(-linf_distance(b, p)),
    }
}

/// Signed slack of a point: depth inside `B`, or minus the distance to it.
pub fn point_slack(b: &GeneratorSet, p: &Vector) -> Result<Margin, SetError> {
    check_len(b.dim, p.len())?;
    if b.dim == 1 {
        return Ok(b.interval_view().slack(&p[0]));
    }
    if lp_contains(b.dim, &b.points, &b.rays, p) {
        Ok(linf_depth(b, p))
    } else {
        Ok(Margin::Exact(-linf_distance(b, p)))
    }
}

/// Whether `r` is a recession direction of `B`.
pub fn is_recession_direction(b: &GeneratorSet, r: &Vector) -> bool {
    ray_in_cone(b.dim, r, &b.rays)
}

fn set_subset(a: &GeneratorSet, b: &GeneratorSet) -> bool {
    a.rays.iter().all(|r| ray_in_cone(b.dim, r, &b.rays))
        && a.points.iter().all(|p| contains_point(b, p).unwrap_or(false))
}

/// Exact decision of `A ⊆ B` for a convex right-hand side.
///
/// `A` may be a union; it is contained in `B` iff every point generator of
/// every part lies in `B` and every ray is a recession direction of `B`.
/// The margin is the smallest generator slack and, on failure, the witness is
/// the generator attaining it (first in part/index order among ties).
pub fn subset_of(a: &impl SetLike, b: &GeneratorSet) -> Result<InclusionReport, SetError> {
    check_len(b.dim, a.dim())?;
    let mut margin = Margin::PosInfinity;
    let mut worst: Option<Witness> = None;
    for (pi, part) in a.parts().iter().enumerate() {
        for (ri, r) in part.rays.iter().enumerate() {
            if !ray_in_cone(b.dim, r, &b.rays) && margin != Margin::NegInfinity {
                margin = Margin::NegInfinity;
                worst = Some(Witness::generator(pi, ri, Generator::Ray(r.clone())));
            }
        }
        for (qi, p) in part.points.iter().enumerate() {
            let s = point_slack(b, p)?;
            if s.cmp_margin(&margin) == Ordering::Less {
                margin = s;
                worst = Some(Witness::generator(pi, qi, Generator::Point(p.clone())));
            }
        }
    }
    let verdict = if margin.is_negative() {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    let mut report = InclusionReport::new("subset", verdict, margin);
    if verdict.is_fail() {
        report.witness = worst;
    }
    Ok(report)
}

/// Sup-norm excess of `A` over `B`: the least `r >= 0` with
/// `A ⊆ B + [-r, r]^d`, or `None` when a ray of `A` is not a recession
/// direction of `B`.
pub fn linf_excess(a: &impl SetLike, b: &GeneratorSet) -> Result<Option<Rational>, SetError> {
    check_len(b.dim, a.dim())?;
    let mut worst = Rational::zero();
    for part in a.parts() {
        if !part.rays.iter().all(|r| ray_in_cone(b.dim, r, &b.rays)) {
            return Ok(None);
        }
        for p in &part.points {
            let e = if b.dim == 1 {
                match b.interval_view().slack(&p[0]) {
                    Margin::Exact(m) if m.is_negative() => -m,
                    _ => Rational::zero(),
                }
            } else if lp_contains(b.dim, &b.points, &b.rays, p) {
                Rational::zero()
            } else {
                linf_distance(b, p)
            };
            if e > worst {
                worst = e;
            }
        }
    }
    Ok(Some(worst))
}

/// `A ⊆ B` with a union on the right.
///
/// A part of `A` inside a single part of `B` is settled exactly, and so is a
/// point generator lying outside every part of `B`. Otherwise only generator
/// membership in the union is established and the verdict is
/// [`Verdict::Approximate`].
pub fn union_subset_of(a: &impl SetLike, b: &SetUnion) -> Result<InclusionReport, SetError> {
    let b = b.simplify();
    if let Some(single) = b.as_single() {
        return subset_of(a, single);
    }
    check_len(b.dim(), a.dim())?;
    let mut verdict = Verdict::Pass;
    let mut margin = Margin::PosInfinity;
    let mut witness = None;
    for (pi, part) in a.parts().iter().enumerate() {
        let mut best: Option<Margin> = None;
        for target in b.parts() {
            let r = subset_of(part, target)?;
            if r.passed() {
                best = Some(best.map_or(r.margin.clone(), |m| m.max(r.margin)));
            }
        }
        if let Some(m) = best {
            margin = margin.min(m);
            continue;
        }
        for (qi, p) in part.points.iter().enumerate() {
            let mut s = Margin::NegInfinity;
            for target in b.parts() {
                s = s.max(point_slack(target, p)?);
            }
            if s.is_negative() && !verdict.is_fail() {
                verdict = Verdict::Fail;
                witness = Some(Witness::generator(pi, qi, Generator::Point(p.clone())));
            }
            margin = margin.min(s);
        }
        for (ri, r) in part.rays.iter().enumerate() {
            if !b.parts().iter().any(|t| ray_in_cone(t.dim, r, &t.rays)) && !verdict.is_fail() {
                verdict = Verdict::Fail;
                margin = Margin::NegInfinity;
                witness = Some(Witness::generator(pi, ri, Generator::Ray(r.clone())));
            }
        }
        verdict = verdict.combine(Verdict::Approximate);
    }
    let mut report = InclusionReport::new("subset", verdict, margin);
    report.witness = witness;
    if verdict == Verdict::Approximate {
        report.note = Some("generator membership in a union".into());
    }
    Ok(report)
}

/// Set equality of two convex generator sets.
pub fn set_equal(a: &GeneratorSet, b: &GeneratorSet) -> bool {
    a.dim == b.dim && set_subset(a, b) && set_subset(b, a)
}

/// `rec(A) = cone(A.rays)` for a finitely generated set.
pub fn recession_cone(a: &GeneratorSet) -> ConeSpec {
    ConeSpec {
        dim: a.dim,
        rays: a.rays.clone(),
    }
}

fn check_grid(t_grid: &[Rational]) -> Result<(), SetError> {
    for t in t_grid {
        if t.is_negative() || *t > Rational::one() {
            return Err(SetError::OutsideUnitInterval(t.to_string()));
        }
    }
    Ok(())
}

fn holds(r: &InclusionReport) -> bool {
    !r.verdict.is_fail()
}

/// `t A + (1 - t) A ⊆ A + K` for every `t` on the grid. For a union the
/// right-hand side is a union too; a verdict that is only approximate counts
/// as holding.
pub fn is_closedly_k_convex(
    a: &impl SetLike,
    k: &ConeSpec,
    t_grid: &[Rational],
) -> Result<bool, SetError> {
    check_grid(t_grid)?;
    check_len(a.dim(), k.dim)?;
    let rhs = SetUnion::new(
        a.parts()
            .iter()
            .map(|p| add_cone(p, k))
            .collect::<Result<_, _>>()?,
    )?;
    for t in t_grid {
        let s = Rational::one() - t;
        let mut lhs = Vec::new();
        for p in a.parts() {
            for q in a.parts() {
                lhs.push(minkowski_sum(&scale(t, p)?, &scale(&s, q)?)?);
            }
        }
        if !holds(&union_subset_of(&SetUnion::new(lhs)?, &rhs)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `t A + (1 - t) y ⊆ A + K` for every `t` on the grid; `y` defaults to zero.
pub fn is_closedly_k_starshaped(
    a: &impl SetLike,
    k: &ConeSpec,
    y: Option<&Vector>,
    t_grid: &[Rational],
) -> Result<bool, SetError> {
    check_grid(t_grid)?;
    check_len(a.dim(), k.dim)?;
    let zero = vec![Rational::zero(); a.dim()];
    let y = y.unwrap_or(&zero);
    check_len(a.dim(), y.len())?;
    let rhs = SetUnion::new(
        a.parts()
            .iter()
            .map(|p| add_cone(p, k))
            .collect::<Result<_, _>>()?,
    )?;
    for t in t_grid {
        let shift = scale_vec(&(Rational::one() - t), y);
        let lhs = a
            .parts()
            .iter()
            .map(|p| scale(t, p).and_then(|s| s.translate(&shift)))
            .collect::<Result<Vec<_>, _>>()?;
        if !holds(&union_subset_of(&SetUnion::new(lhs)?, &rhs)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A bounded `H` with `A ⊆ H + K`, when the representation provides one:
/// `H = conv(A.points)` works exactly when every ray of `A` lies in `K`.
pub fn k_lower_bound_witness(a: &GeneratorSet, k: &ConeSpec) -> Option<GeneratorSet> {
    if a.dim != k.dim {
        return None;
    }
    if a.rays.iter().all(|r| k.contains(r)) {
        Some(GeneratorSet::canonical(a.dim, a.points.clone(), vec![]))
    } else {
        None
    }
}

/// The default `t` grid `{0, 1/4, 1/2, 3/4, 1}` used by predicate checks.
pub fn default_t_grid() -> Vec<Rational> {
    (0..=4)
        .map(|i| Rational::new(i.into(), 4.into()))
        .collect()
}
