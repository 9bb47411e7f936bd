//! Checkers for convexity- and concavity-type inclusions of a set-valued map
//! `F` with error maps `A`, `B` and cone `K`.
//!
//! Everything at dyadic `t` is decided exactly. Statements at other `t` are
//! certified up to a recorded sup-norm inflation obtained by moving to a
//! nearby dyadic `s <= t` and bounding how far each side moves.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::{int, pow2, rat, rational_to_f64, DyadicRational, Rational};
use crate::report::{aggregate, InclusionReport, Margin, Verdict, Witness};
use crate::setarith::{
    add_cone, contains_point, is_closedly_k_convex, is_closedly_k_starshaped,
    k_lower_bound_witness, linf_excess, minkowski_sum, minkowski_sum_all, point_slack, scale, scale_vec,
    sub_vec, subset_of, union_subset_of, ConeSpec, GeneratorSet, SetError, SetUnion, Vector,
    default_t_grid,
};
use crate::transform::{
    check_template_hypotheses, tabor_closed_form, tabor_transform,
    tabor_weights, Domain, FamilyKind, SetFamily, SetSequence, TransformError,
    serially_k_cauchy_probe,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("regularity probe failed: {0}")]
    Probe(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

impl VerifyError {
    pub fn is_hypothesis(&self) -> bool {
        matches!(
            self,
            VerifyError::Hypothesis(_)
                | VerifyError::Probe(_)
                | VerifyError::Transform(TransformError::Hypothesis(_))
        )
    }
}

pub type Result<T> = std::result::Result<T, VerifyError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Convex,
    Concave,
}

/// Coefficient on the `B` side of the convex induction step: `d_Z` as
/// printed (`cvn-a`) or `2 d_Z` as on the `A` side (`cvn-b`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reading {
    CvnA,
    #[default]
    CvnB,
}

impl FromStr for Reading {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cvn-a" => Ok(Reading::CvnA),
            "cvn-b" => Ok(Reading::CvnB),
            other => Err(format!("unknown reading {other:?}, expected cvn-a or cvn-b")),
        }
    }
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reading::CvnA => "cvn-a",
            Reading::CvnB => "cvn-b",
        })
    }
}

fn default_extension_tol() -> f64 {
    1e-6
}

fn default_dyadic_exponent() -> u32 {
    24
}

fn default_probe_eps() -> Vec<Rational> {
    vec![rat(1, 4), rat(1, 16)]
}

fn default_mesh_exponent() -> u32 {
    8
}

fn default_cauchy_n_max() -> usize {
    16
}

fn default_depth() -> u32 {
    6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Largest inflation accepted for a statement at non-dyadic `t`.
    #[serde(default = "default_extension_tol")]
    pub extension: f64,
    /// Starting exponent `e` of the dyadic `s = floor(t 2^e) / 2^e`.
    #[serde(default = "default_dyadic_exponent")]
    pub dyadic_exponent: u32,
    /// Box radii used by the regularity probes.
    #[serde(default = "default_probe_eps", with = "crate::json::vector")]
    pub probe_eps: Vec<Rational>,
    /// The semicontinuity probe uses the mesh `2^-mesh_exponent Z`.
    #[serde(default = "default_mesh_exponent")]
    pub mesh_exponent: u32,
    #[serde(default = "default_cauchy_n_max")]
    pub cauchy_n_max: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            extension: default_extension_tol(),
            dyadic_exponent: default_dyadic_exponent(),
            probe_eps: default_probe_eps(),
            mesh_exponent: default_mesh_exponent(),
            cauchy_n_max: default_cauchy_n_max(),
        }
    }
}

/// A sample pair `(x, y)` written as `[x, y]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pair(#[serde(with = "crate::json::vectors")] pub Vec<Vector>);

impl Pair {
    pub fn new(x: Vector, y: Vector) -> Self {
        Pair(vec![x, y])
    }

    pub fn x(&self) -> &Vector {
        &self.0[0]
    }

    pub fn y(&self) -> &Vector {
        &self.0[1]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub theorem: Theorem,
    pub domain: Domain,
    pub f: FamilyKind,
    pub a: FamilyKind,
    pub b: FamilyKind,
    pub k: ConeSpec,
    /// When absent, [`default_pairs`] of the domain are used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_pairs: Option<Vec<Pair>>,
    #[serde(default = "default_depth")]
    pub dyadic_depth: u32,
    #[serde(default, with = "crate::json::vector")]
    pub real_t_list: Vec<Rational>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub reading: Reading,
}

/// Endpoints, midpoint and golden-section points of the domain diagonal.
pub fn default_pairs(d: &Domain) -> Vec<Pair> {
    let g = rat(233, 377);
    let lo = d.point_at(&Rational::zero());
    let hi = d.point_at(&Rational::one());
    let mid = d.point_at(&rat(1, 2));
    let a = d.point_at(&(Rational::one() - &g));
    let b = d.point_at(&g);
    vec![
        Pair::new(lo.clone(), hi.clone()),
        Pair::new(lo.clone(), mid.clone()),
        Pair::new(mid, hi),
        Pair::new(a, b.clone()),
        Pair::new(lo, b),
    ]
}

fn mix(t: &Rational, x: &[Rational], y: &[Rational]) -> Vector {
    x.iter()
        .zip(y)
        .map(|(a, b)| t * a + (Rational::one() - t) * b)
        .collect()
}

fn unit_t(t: &Rational) -> Result<()> {
    if t.is_negative() || *t > Rational::one() {
        Err(VerifyError::Invalid(format!("t = {t} is outside [0, 1]")))
    } else {
        Ok(())
    }
}

impl Scenario {
    pub fn new(theorem: Theorem, domain: Domain, f: FamilyKind, a: FamilyKind, b: FamilyKind, k: ConeSpec) -> Self {
        Scenario {
            name: String::new(),
            theorem,
            domain,
            f,
            a,
            b,
            k,
            sample_pairs: None,
            dyadic_depth: default_depth(),
            real_t_list: Vec::new(),
            tolerances: Tolerances::default(),
            reading: Reading::default(),
        }
    }

    pub fn with_pairs(mut self, pairs: Vec<(Vector, Vector)>) -> Self {
        self.sample_pairs = Some(pairs.into_iter().map(|(x, y)| Pair::new(x, y)).collect());
        self
    }

    pub fn pairs(&self) -> Vec<Pair> {
        match &self.sample_pairs {
            Some(p) => p.clone(),
            None => default_pairs(&self.domain),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for fam in [&self.f, &self.a, &self.b] {
            fam.validate()?;
        }
        let yd = self.k.dim();
        for (name, fam) in [("f", &self.f), ("a", &self.a), ("b", &self.b)] {
            if fam.value_dim() != yd {
                return Err(VerifyError::Invalid(format!(
                    "{name} takes values in dimension {}, K has dimension {yd}",
                    fam.value_dim()
                )));
            }
        }
        if matches!(self.f, FamilyKind::Epigraph { .. } | FamilyKind::Hypograph { .. })
            && self.domain.dim() != 1
        {
            return Err(VerifyError::Invalid("graph maps need a one-dimensional domain".into()));
        }
        for p in self.pairs() {
            if p.0.len() != 2 {
                return Err(VerifyError::Invalid("a sample pair needs exactly two points".into()));
            }
            for v in &p.0 {
                if !self.domain.contains(v) {
                    return Err(VerifyError::Invalid("sample point outside the domain".into()));
                }
            }
        }
        if self.pairs().is_empty() {
            return Err(VerifyError::Invalid("no sample pairs".into()));
        }
        for t in &self.real_t_list {
            unit_t(t)?;
        }
        if self.tolerances.probe_eps.iter().any(|e| !e.is_positive()) {
            return Err(VerifyError::Invalid("probe radii must be positive".into()));
        }
        if !(self.tolerances.extension > 0.0) {
            return Err(VerifyError::Invalid("extension tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn fam_f(&self) -> SetFamily {
        SetFamily::on(self.f.clone(), self.domain.clone())
    }

    pub fn fam_a(&self) -> SetFamily {
        SetFamily::on(self.a.clone(), self.domain.differences())
    }

    pub fn fam_b(&self) -> SetFamily {
        SetFamily::on(self.b.clone(), self.domain.differences())
    }

    fn f_at(&self, x: &[Rational]) -> Result<GeneratorSet> {
        Ok(self.fam_f().eval(x)?)
    }

    fn a_at(&self, u: &[Rational]) -> Result<GeneratorSet> {
        Ok(self.fam_a().eval(u)?)
    }

    fn b_at(&self, u: &[Rational]) -> Result<GeneratorSet> {
        Ok(self.fam_b().eval(u)?)
    }

    /// `t F(x) + (1 - t) F(y)`.
    fn mix_f(&self, t: &Rational, x: &[Rational], y: &[Rational]) -> Result<GeneratorSet> {
        let fx = scale(t, &self.f_at(x)?)?;
        let fy = scale(&(Rational::one() - t), &self.f_at(y)?)?;
        Ok(minkowski_sum(&fx, &fy)?)
    }

    /// `Σ_{k<n} c_k S(u / 2^k)` with `c_k = factor * d(2^k t)`.
    fn weighted_sum(
        &self,
        fam: &SetFamily,
        t: &Rational,
        u: &[Rational],
        n: u32,
        half: bool,
    ) -> Result<GeneratorSet> {
        if n == 0 {
            return Ok(GeneratorSet::zero(self.k.dim()));
        }
        let weights = tabor_weights(t, n - 1);
        let mut terms = Vec::with_capacity(n as usize);
        for (k, w) in weights.iter().enumerate() {
            let c = if half { w / int(2) } else { w.clone() };
            let arg = scale_vec(&Rational::new(1.into(), pow2(k as u32)), &u.to_vec());
            terms.push(scale(&c, &fam.eval(&arg)?)?);
        }
        Ok(minkowski_sum_all(&terms)?.expect("at least one term"))
    }

    /// Arguments `u / 2^k` for every pair and `k <= depth`, plus `0`.
    fn sampled_differences(&self, depth: u32) -> Vec<Vector> {
        let mut out = vec![vec![Rational::zero(); self.domain.dim()]];
        for p in self.pairs() {
            let u = sub_vec(p.x(), p.y());
            for k in 0..=depth {
                let v = scale_vec(&Rational::new(1.into(), pow2(k)), &u);
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

fn predicate_report(id: &str, ok: bool, note: impl Into<String>) -> InclusionReport {
    if ok {
        InclusionReport::new(id, Verdict::Pass, Margin::zero())
    } else {
        InclusionReport::new(id, Verdict::Fail, Margin::NegInfinity).with_note(note)
    }
}

fn per_pair<F>(sc: &Scenario, id: &str, check: F) -> Result<InclusionReport>
where
    F: Fn(&Vector, &Vector) -> Result<InclusionReport> + Sync,
{
    let pairs = sc.pairs();
    let results: Vec<Result<InclusionReport>> = pairs
        .par_iter()
        .map(|p| {
            check(p.x(), p.y()).map(|r| {
                let (x, y) = (p.x().clone(), p.y().clone());
                r.map_witness(|w| w.at_pair(&x, &y))
            })
        })
        .collect();
    let reports = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(aggregate(id, reports))
}

/// `(F(x) + F(y))/2 + A(x-y) ⊆ F((x+y)/2) + B(x-y)` on every sample pair.
pub fn check_jensen_convexity(sc: &Scenario) -> Result<InclusionReport> {
    let half = rat(1, 2);
    per_pair(sc, "jensen-convexity", |x, y| {
        let u = sub_vec(x, y);
        let lhs = minkowski_sum(&sc.mix_f(&half, x, y)?, &sc.a_at(&u)?)?;
        let rhs = minkowski_sum(&sc.f_at(&mix(&half, x, y))?, &sc.b_at(&u)?)?;
        Ok(subset_of(&lhs, &rhs)?)
    })
}

/// `F((x+y)/2) + A(x-y) ⊆ (F(x) + F(y))/2 + B(x-y)` on every sample pair.
pub fn check_jensen_concavity(sc: &Scenario) -> Result<InclusionReport> {
    let half = rat(1, 2);
    per_pair(sc, "jensen-concavity", |x, y| {
        let u = sub_vec(x, y);
        let lhs = minkowski_sum(&sc.f_at(&mix(&half, x, y))?, &sc.a_at(&u)?)?;
        let rhs = minkowski_sum(&sc.mix_f(&half, x, y)?, &sc.b_at(&u)?)?;
        Ok(subset_of(&lhs, &rhs)?)
    })
}

pub fn check_jensen(sc: &Scenario) -> Result<InclusionReport> {
    match sc.theorem {
        Theorem::Convex => check_jensen_convexity(sc),
        Theorem::Concave => check_jensen_concavity(sc),
    }
}

/// The standing hypotheses, in order: the Jensen-type inclusion, `K ⊆ rec B(u)`,
/// `0 ∈ A(u) + K`, and closed `K`-convexity of the values that need it.
pub fn hypothesis_reports(sc: &Scenario) -> Result<Vec<InclusionReport>> {
    sc.validate()?;
    let mut out = vec![check_jensen(sc)?];
    let us = sc.sampled_differences(sc.dyadic_depth);

    let mut rec_ok = true;
    let mut zero_report = InclusionReport::new("zero-in-a-plus-k", Verdict::Pass, Margin::PosInfinity);
    let mut convex_ok = true;
    let grid = default_t_grid();
    for u in &us {
        let b = sc.b_at(u)?;
        if !sc.k.rays().iter().all(|r| crate::setarith::is_recession_direction(&b, r)) {
            rec_ok = false;
        }
        if !is_closedly_k_convex(&b, &sc.k, &grid)? {
            convex_ok = false;
        }
        let a = add_cone(&sc.a_at(u)?, &sc.k)?;
        let zero = vec![Rational::zero(); sc.k.dim()];
        let slack = point_slack(&a, &zero)?;
        if slack.cmp_margin(&zero_report.margin).is_lt() {
            zero_report.margin = slack.clone();
            if slack.is_negative() {
                zero_report.verdict = Verdict::Fail;
                zero_report.witness = Some(Witness {
                    x: Some(u.clone()),
                    ..Witness::default()
                });
            }
        }
    }
    out.push(predicate_report("k-in-rec-b", rec_ok, "a ray of K is not a recession direction of B(u)"));
    out.push(zero_report);
    out.push(predicate_report("b-values-k-convex", convex_ok, "B(u) is not closedly K-convex"));
    if sc.theorem == Theorem::Concave {
        let mut ok = true;
        for p in sc.pairs() {
            for v in [p.x(), p.y()] {
                if !is_closedly_k_convex(&sc.f_at(v)?, &sc.k, &grid)? {
                    ok = false;
                }
            }
        }
        out.push(predicate_report("f-values-k-convex", ok, "F(x) is not closedly K-convex"));
    }
    Ok(out)
}

fn induction_cells(n_max: u32) -> Vec<(u32, u64)> {
    (1..=n_max)
        .flat_map(|n| (0..=(1u64 << n)).map(move |m| (n, m)))
        .collect()
}

fn run_cells<F>(id: &str, n_max: u32, cell: F) -> Result<InclusionReport>
where
    F: Fn(u32, u64, &Rational) -> Result<InclusionReport> + Sync,
{
    let results: Vec<Result<InclusionReport>> = induction_cells(n_max)
        .par_iter()
        .map(|&(n, m)| {
            let t = Rational::new(m.into(), pow2(n));
            cell(n, m, &t).map(|r| r.map_witness(|w| w.at_cell(n, m).at_t(&t)))
        })
        .collect();
    let reports = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(aggregate(id, reports))
}

/// Every cell `(n, m)` with `1 <= n <= n_max`, `0 <= m <= 2^n` of the convex
/// induction statement
///
/// `t F(x) + (1-t) F(y) + Σ_{k<n} 2 d(2^k t) A(u/2^k) ⊆ F(tx + (1-t)y) + Σ_{k<n} c d(2^k t) B(u/2^k)`
///
/// with `t = m / 2^n`, `u = x - y`, and `c = 1` or `2` by `reading`.
pub fn dyadic_induction_check_convex(
    sc: &Scenario,
    x: &[Rational],
    y: &[Rational],
    n_max: u32,
    reading: Reading,
) -> Result<InclusionReport> {
    let u = sub_vec(x, y);
    let (fa, fb) = (sc.fam_a(), sc.fam_b());
    let report = run_cells("induction-convex", n_max, |n, _m, t| {
        let lhs = minkowski_sum(&sc.mix_f(t, x, y)?, &sc.weighted_sum(&fa, t, &u, n, false)?)?;
        let b = sc.weighted_sum(&fb, t, &u, n, reading == Reading::CvnA)?;
        let rhs = minkowski_sum(&sc.f_at(&mix(t, x, y))?, &b)?;
        Ok(subset_of(&lhs, &rhs)?)
    })?;
    Ok(report
        .map_witness(|w| w.at_pair(x, y))
        .with_id(format!("induction-convex[{reading}]")))
}

/// Mirror of [`dyadic_induction_check_convex`] for
///
/// `F(tx + (1-t)y) + Σ_{k<n} 2 d(2^k t) A(u/2^k) ⊆ t F(x) + (1-t) F(y) + Σ_{k<n} 2 d(2^k t) B(u/2^k)`.
pub fn dyadic_induction_check_concave(
    sc: &Scenario,
    x: &[Rational],
    y: &[Rational],
    n_max: u32,
) -> Result<InclusionReport> {
    let u = sub_vec(x, y);
    let (fa, fb) = (sc.fam_a(), sc.fam_b());
    let report = run_cells("induction-concave", n_max, |n, _m, t| {
        let lhs = minkowski_sum(&sc.f_at(&mix(t, x, y))?, &sc.weighted_sum(&fa, t, &u, n, false)?)?;
        let rhs = minkowski_sum(&sc.mix_f(t, x, y)?, &sc.weighted_sum(&fb, t, &u, n, false)?)?;
        Ok(subset_of(&lhs, &rhs)?)
    })?;
    Ok(report.map_witness(|w| w.at_pair(x, y)))
}

pub fn dyadic_induction_check(
    sc: &Scenario,
    x: &[Rational],
    y: &[Rational],
    n_max: u32,
    reading: Reading,
) -> Result<InclusionReport> {
    match sc.theorem {
        Theorem::Convex => dyadic_induction_check_convex(sc, x, y, n_max, reading),
        Theorem::Concave => dyadic_induction_check_concave(sc, x, y, n_max),
    }
}

fn zero_in_a_plus_k(sc: &Scenario, u: &[Rational], m: u32) -> Result<()> {
    for k in 0..=m {
        let v = scale_vec(&Rational::new(1.into(), pow2(k)), &u.to_vec());
        let a = add_cone(&sc.a_at(&v)?, &sc.k)?;
        if !contains_point(&a, &vec![Rational::zero(); sc.k.dim()])? {
            return Err(VerifyError::Hypothesis(format!(
                "0 is not in A(u) + K at u = {:?}",
                v.iter().map(crate::json::rational_text).collect::<Vec<_>>()
            )));
        }
    }
    Ok(())
}

fn perp(fam: &SetFamily, t: &DyadicRational, u: &[Rational]) -> Result<SetUnion> {
    let n = t.exponent();
    Ok(tabor_transform(fam, &t.to_rational(), u, n)?.value)
}

fn conclusion(
    sc: &Scenario,
    x: &[Rational],
    y: &[Rational],
    t: &DyadicRational,
    theorem: Theorem,
) -> Result<InclusionReport> {
    let tr = t.to_rational();
    unit_t(&tr)?;
    let u = sub_vec(x, y);
    zero_in_a_plus_k(sc, &u, t.exponent())?;
    let a_perp = perp(&sc.fam_a(), t, &u)?;
    let b_perp = perp(&sc.fam_b(), t, &u)?;
    let mixed = sc.mix_f(&tr, x, y)?;
    let at_point = sc.f_at(&mix(&tr, x, y))?;
    let (lhs, rhs) = match theorem {
        Theorem::Convex => (a_perp.add_set(&mixed)?, b_perp.add_set(&at_point)?),
        Theorem::Concave => (a_perp.add_set(&at_point)?, b_perp.add_set(&mixed)?),
    };
    let id = match theorem {
        Theorem::Convex => "conclusion-convex",
        Theorem::Concave => "conclusion-concave",
    };
    Ok(union_subset_of(&lhs, &rhs)?
        .with_id(id)
        .map_witness(|w| w.at_pair(x, y).at_t(&tr)))
}

/// `t F(x) + (1-t) F(y) + A⊥(t, x-y) ⊆ F(tx + (1-t)y) + B⊥(t, x-y)` at a
/// dyadic `t ∈ [0, 1]`. Refuses to run unless `0 ∈ A(u) + K` along the
/// orbit `u / 2^k`.
pub fn check_convexity_conclusion(
    sc: &Scenario,
    x: &[Rational],
    y: &[Rational],
    t: &DyadicRational,
) -> Result<InclusionReport> {
    conclusion(sc, x, y, t, Theorem::Convex)
}

/// `F(tx + (1-t)y) + A⊥(t, x-y) ⊆ t F(x) + (1-t) F(y) + B⊥(t, x-y)`.
pub fn check_concavity_conclusion(
    sc: &Scenario,
    x: &[Rational],
    y: &[Rational],
    t: &DyadicRational,
) -> Result<InclusionReport> {
    conclusion(sc, x, y, t, Theorem::Concave)
}

pub fn check_conclusion(
    sc: &Scenario,
    x: &[Rational],
    y: &[Rational],
    t: &DyadicRational,
) -> Result<InclusionReport> {
    conclusion(sc, x, y, t, sc.theorem)
}

/// Dyadic points `l / 2^e` of `[0, 1]` with `e <= max_exponent`, ordered by
/// exponent and then numerator, each listed once.
pub fn dyadic_grid(max_exponent: u32) -> Vec<DyadicRational> {
    let mut out = vec![DyadicRational::from_integer(0), DyadicRational::from_integer(1)];
    for e in 1..=max_exponent {
        for l in (1..(1u64 << e)).step_by(2) {
            out.push(DyadicRational::new(l, e));
        }
    }
    out
}

/// The conclusion at every dyadic `t` with exponent `<= max_exponent` on every
/// sample pair.
pub fn conclusion_sweep(sc: &Scenario, max_exponent: u32) -> Result<InclusionReport> {
    let grid = dyadic_grid(max_exponent);
    let id = match sc.theorem {
        Theorem::Convex => "conclusion-convex",
        Theorem::Concave => "conclusion-concave",
    };
    per_pair(sc, id, |x, y| {
        let results: Vec<Result<InclusionReport>> = grid
            .par_iter()
            .map(|t| check_conclusion(sc, x, y, t))
            .collect();
        Ok(aggregate(id, results.into_iter().collect::<Result<Vec<_>>>()?))
    })
}

fn excess(p: &GeneratorSet, q: &GeneratorSet) -> Result<Option<Rational>> {
    Ok(linf_excess(p, q)?)
}

/// Inner and outer sets for `S⊥(t, u) + K`.
fn perp_mod_k(sc: &Scenario, kind: &FamilyKind, t: &Rational, u: &[Rational]) -> Result<(GeneratorSet, GeneratorSet)> {
    let k = &sc.k;
    if t.is_integer() {
        let z = k.to_set();
        return Ok((z.clone(), z));
    }
    match kind {
        FamilyKind::Singleton0 { .. } => Ok((k.to_set(), k.to_set())),
        FamilyKind::Constant { set }
            if set.points().iter().all(|p| p.iter().all(|v| v.is_zero())) =>
        {
            let s = add_cone(set, k)?;
            Ok((s.clone(), s))
        }
        FamilyKind::Template { phi, s0, k: kt, norm } => {
            let joined = kt.join(k)?;
            let cf = tabor_closed_form(phi, s0, &joined, *norm, t, u)?;
            Ok((cf.inner, cf.outer))
        }
        other => {
            if let Ok(d) = DyadicRational::from_rational(t) {
                let fam = SetFamily::on(other.clone(), sc.domain.differences());
                let v = tabor_transform(&fam, t, u, d.exponent())?.value;
                let parts: Vec<GeneratorSet> = v
                    .parts()
                    .iter()
                    .map(|p| add_cone(p, k))
                    .collect::<std::result::Result<_, _>>()?;
                if let Some(one) = SetUnion::new(parts)?.simplify().as_single() {
                    return Ok((one.clone(), one.clone()));
                }
            }
            Err(VerifyError::Invalid(
                "the transform at non-dyadic t needs a template, a constant cone or the zero map".into(),
            ))
        }
    }
}

/// `(lhs, rhs)` of the inclusion at `t`, both taken modulo `K`, with the
/// left side outer and the right side inner.
fn sides_mod_k(
    sc: &Scenario,
    x: &[Rational],
    y: &[Rational],
    t: &Rational,
    theorem: Theorem,
) -> Result<(GeneratorSet, GeneratorSet)> {
    let u = sub_vec(x, y);
    let (_, a_out) = perp_mod_k(sc, &sc.a, t, &u)?;
    let (b_in, _) = perp_mod_k(sc, &sc.b, t, &u)?;
    let mixed = sc.mix_f(t, x, y)?;
    let at_point = sc.f_at(&mix(t, x, y))?;
    Ok(match theorem {
        Theorem::Convex => (minkowski_sum(&mixed, &a_out)?, minkowski_sum(&at_point, &b_in)?),
        Theorem::Concave => (minkowski_sum(&at_point, &a_out)?, minkowski_sum(&mixed, &b_in)?),
    })
}

/// Semicontinuity of `F` at `p` along `h`: for each radius `eps`, the largest
/// `delta = 2^-j` such that `F(p + t h) ⊆ F(p) + [-eps, eps]^d + K` for every
/// mesh point `t = i 2^-E < delta` with `p + t h` in the domain. `None` when
/// even the first mesh point fails.
pub fn directional_usc_probe(
    f: &SetFamily,
    p: &[Rational],
    h: &[Rational],
    k: &ConeSpec,
    eps_list: &[Rational],
    mesh_exponent: u32,
) -> Result<Vec<(Rational, Option<Rational>)>> {
    let base = add_cone(&f.eval(p)?, k)?;
    let steps = 1u64 << mesh_exponent;
    let mesh: Vec<Rational> = (1..steps)
        .map(|i| Rational::new(i.into(), pow2(mesh_exponent)))
        .collect();
    let margins: Vec<Option<Margin>> = mesh
        .par_iter()
        .map(|t| -> Result<Option<Margin>> {
            let q: Vector = p.iter().zip(h).map(|(a, b)| a + t * b).collect();
            if f.domain.as_ref().is_some_and(|d| !d.contains(&q)) {
                return Ok(None);
            }
            Ok(Some(subset_of(&f.eval(&q)?, &base)?.margin))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(eps_list.len());
    for eps in eps_list {
        let bound = Margin::Exact(-eps.clone());
        let first_bad = mesh
            .iter()
            .zip(&margins)
            .find(|(_, m)| m.as_ref().is_some_and(|m| m.cmp_margin(&bound).is_lt()))
            .map(|(t, _)| t.clone());
        let delta = match first_bad {
            None => Some(Rational::one()),
            Some(tf) => {
                let mut d = Rational::one();
                while d > tf {
                    d /= int(2);
                }
                (d > Rational::new(1.into(), pow2(mesh_exponent))).then_some(d)
            }
        };
        out.push((eps.clone(), delta));
    }
    Ok(out)
}

/// Continuity of `tau ↦ tau S + (1 - tau) T` modulo `K`: for each radius
/// `eps`, the largest `delta = 2^-j` with `j <= max_exponent` such that
/// `tau S + (1-tau) T ⊆ sigma S + (1-sigma) T + [-eps, eps]^d + K` for all
/// sampled `tau`, `sigma` with `|tau - sigma| < delta`. The samples lie on the
/// grid `delta/4 Z ∩ [0, 1]`, paired at distance `3 delta/4` in both
/// orders. `None` when no such `delta` is found.
pub fn directional_continuity_probe(
    s: &GeneratorSet,
    t: &GeneratorSet,
    k: &ConeSpec,
    eps_list: &[Rational],
    max_exponent: u32,
) -> Result<Vec<(Rational, Option<Rational>)>> {
    let mix = |tau: &Rational| -> Result<GeneratorSet> {
        Ok(minkowski_sum(&scale(tau, s)?, &scale(&(Rational::one() - tau), t)?)?)
    };
    // worst[j] = largest sampled excess for delta = 2^-j, None if unbounded
    let mut worst: Vec<Option<Rational>> = Vec::new();
    let mut out = Vec::new();
    for eps in eps_list {
        let mut delta = None;
        for j in 0..=max_exponent {
            if worst.len() <= j as usize {
                let cells = 1u64 << (j + 2);
                let step = Rational::new(1.into(), pow2(j + 2));
                let sets: Vec<(GeneratorSet, GeneratorSet)> = (0..=cells)
                    .into_par_iter()
                    .map(|i| -> Result<_> {
                        let m = mix(&(&step * Rational::from_integer(i.into())))?;
                        let target = add_cone(&m, k)?;
                        Ok((m, target))
                    })
                    .collect::<Result<_>>()?;
                let pairs: Vec<(usize, usize)> = (0..=cells as usize)
                    .flat_map(|i| {
                        [3usize].into_iter().flat_map(move |d| {
                            let mut v = Vec::new();
                            if i + d <= cells as usize {
                                v.push((i, i + d));
                                v.push((i + d, i));
                            }
                            v
                        })
                    })
                    .collect();
                let excesses = pairs
                    .par_iter()
                    .map(|&(a, b)| excess(&sets[a].0, &sets[b].1))
                    .collect::<Result<Vec<_>>>()?;
                let w = excesses.into_iter().try_fold(Rational::zero(), |acc, e| {
                    e.map(|e| if e > acc { e } else { acc })
                });
                worst.push(w);
            }
            if worst[j as usize].as_ref().is_some_and(|w| w <= eps) {
                delta = Some(Rational::new(1.into(), pow2(j)));
                break;
            }
        }
        out.push((eps.clone(), delta));
    }
    Ok(out)
}

fn starshaped_and_bounded(set: &GeneratorSet, k: &ConeSpec, anchor: Option<&Vector>) -> Result<bool> {
    Ok(k_lower_bound_witness(set, k).is_some()
        && is_closedly_k_starshaped(set, k, anchor, &default_t_grid())?)
}

/// Regularity hypotheses of the real-`t` extension, checked at the data the
/// extension at `(x, y, t)` touches.
fn regularity_gate(sc: &Scenario, x: &[Rational], y: &[Rational], t: &Rational) -> Result<()> {
    let k = &sc.k;
    let p_t = mix(t, x, y);
    for v in [x.to_vec(), y.to_vec(), p_t.clone()] {
        let fv = sc.f_at(&v)?;
        let anchor = fv.points()[0].clone();
        if !starshaped_and_bounded(&fv, k, Some(&anchor))? {
            return Err(VerifyError::Hypothesis(
                "F(x) is not closedly K-starshaped and K-lower bounded".into(),
            ));
        }
        if sc.theorem == Theorem::Concave && !is_closedly_k_convex(&fv, k, &default_t_grid())? {
            return Err(VerifyError::Hypothesis("F(x) is not closedly K-convex".into()));
        }
    }
    let h = sub_vec(y, x);
    if h.iter().any(|v| !v.is_zero()) {
        let probe = directional_usc_probe(
            &sc.fam_f(),
            &p_t,
            &h,
            k,
            &sc.tolerances.probe_eps,
            sc.tolerances.mesh_exponent,
        )?;
        if let Some((eps, _)) = probe.iter().find(|(_, d)| d.is_none()) {
            return Err(VerifyError::Probe(format!(
                "F is not directionally K-upper semicontinuous at radius {eps}"
            )));
        }
    }
    let u = sub_vec(x, y);
    let a = sc.a_at(&u)?;
    let b = sc.b_at(&u)?;
    if !starshaped_and_bounded(&a, k, None)? || !starshaped_and_bounded(&b, k, None)? {
        return Err(VerifyError::Hypothesis(
            "A(u) or B(u) is not closedly K-starshaped and K-lower bounded".into(),
        ));
    }
    let n_max = sc.tolerances.cauchy_n_max;
    for (name, fam) in [("A", sc.fam_a()), ("B", sc.fam_b())] {
        let terms = (0..=n_max)
            .map(|j| fam.eval(&scale_vec(&Rational::new(1.into(), pow2(j as u32)), &u)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let table = serially_k_cauchy_probe(
            &SetSequence::Explicit(terms),
            k,
            &sc.tolerances.probe_eps,
            n_max,
        )?;
        if table.iter().any(|(_, m)| m.is_none()) {
            return Err(VerifyError::Probe(format!(
                "the sequence {name}(u / 2^k) is not serially K-Cauchy up to index {n_max}"
            )));
        }
    }
    Ok(())
}

fn extension(
    sc: &Scenario,
    x: &[Rational],
    y: &[Rational],
    t: &Rational,
    tol: f64,
    theorem: Theorem,
) -> Result<InclusionReport> {
    unit_t(t)?;
    let id = match theorem {
        Theorem::Convex => "extension-convex",
        Theorem::Concave => "extension-concave",
    };
    if let Ok(d) = DyadicRational::from_rational(t) {
        let mut r = conclusion(sc, x, y, &d, theorem)?.with_id(id);
        r.inflation = Some(0.0);
        return Ok(r);
    }
    regularity_gate(sc, x, y, t)?;
    let (lhs_t, rhs_t) = sides_mod_k(sc, x, y, t, theorem)?;
    let tol_r = crate::dyadic::rational_from_f64(tol)
        .ok_or_else(|| VerifyError::Invalid("tolerance must be finite".into()))?;
    let mut exponent = sc.tolerances.dyadic_exponent.max(1);
    let (s, inflation) = loop {
        let s = DyadicRational::floor_of(t, exponent);
        let sr = s.to_rational();
        let (lhs_s, rhs_s) = sides_mod_k(sc, x, y, &sr, theorem)?;
        let e1 = excess(&lhs_t, &lhs_s)?;
        let e2 = excess(&rhs_s, &rhs_t)?;
        if let (Some(e1), Some(e2)) = (e1, e2) {
            let total = e1 + e2;
            if total <= tol_r {
                break (s, total);
            }
        }
        exponent += 4;
        if exponent > 96 {
            return Err(VerifyError::Probe(format!(
                "no dyadic s within 2^-96 of t = {t} keeps the inflation below {tol}"
            )));
        }
    };
    let at_s = conclusion(sc, x, y, &s, theorem)?;
    let direct = subset_of(&lhs_t, &rhs_t)?;
    let inflation_f = rational_to_f64(&inflation);
    let beyond = direct
        .margin
        .cmp_margin(&Margin::Exact(-inflation.clone()))
        .is_lt();
    let mut report = if at_s.verdict.is_fail() {
        at_s.with_id(id)
    } else if beyond {
        let mut r = InclusionReport::new(id, Verdict::Fail, direct.margin.clone());
        r.witness = direct.witness.clone().map(|w| w.at_pair(x, y).at_t(t));
        r.with_note("violation at t exceeds the recorded inflation")
    } else {
        let mut r = InclusionReport::new(id, Verdict::Approximate, at_s.margin.clone());
        r.note = Some(format!("certified through s = {s}"));
        r
    };
    report.inflation = Some(inflation_f);
    Ok(report)
}

/// `t F(x) + (1-t) F(y) + A⊥(t, x-y) ⊆ F(tx + (1-t)y) + B⊥(t, x-y) + K` at a
/// rational `t`, certified through a dyadic `s <= t`.
///
/// At dyadic `t` this is [`check_convexity_conclusion`] with zero inflation.
/// Otherwise the regularity hypotheses are probed first, then the exact
/// verdict at `s` is combined with the sup-norm distances by which both sides
/// move between `s` and `t`; their sum is the recorded inflation and must not
/// exceed `tol`.
pub fn bernstein_doetsch_extension_convex(
    sc: &Scenario,
    x: &[Rational],
    y: &[Rational],
    t: &Rational,
    tol: f64,
) -> Result<InclusionReport> {
    extension(sc, x, y, t, tol, Theorem::Convex)
}

/// Mirror of [`bernstein_doetsch_extension_convex`] for
/// `F(tx + (1-t)y) + A⊥(t, x-y) ⊆ t F(x) + (1-t) F(y) + B⊥(t, x-y) + K`.
pub fn bernstein_doetsch_extension_concave(
    sc: &Scenario,
    x: &[Rational],
    y: &[Rational],
    t: &Rational,
    tol: f64,
) -> Result<InclusionReport> {
    extension(sc, x, y, t, tol, Theorem::Concave)
}

pub fn extension_sweep(sc: &Scenario) -> Result<InclusionReport> {
    let id = match sc.theorem {
        Theorem::Convex => "extension-convex",
        Theorem::Concave => "extension-concave",
    };
    let tol = sc.tolerances.extension;
    per_pair(sc, id, |x, y| {
        let reports = sc
            .real_t_list
            .iter()
            .map(|t| extension(sc, x, y, t, tol, sc.theorem))
            .collect::<Result<Vec<_>>>()?;
        Ok(aggregate(id, reports))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corollary {
    Convex1,
    Convex2,
    Concave1,
    Concave2,
    Convex1Plus,
    Convex2Plus,
    Concave1Plus,
    Concave2Plus,
}

impl Corollary {
    pub const ALL: [Corollary; 8] = [
        Corollary::Convex1,
        Corollary::Convex2,
        Corollary::Concave1,
        Corollary::Concave2,
        Corollary::Convex1Plus,
        Corollary::Convex2Plus,
        Corollary::Concave1Plus,
        Corollary::Concave2Plus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Corollary::Convex1 => "Convex+1",
            Corollary::Convex2 => "Convex+2",
            Corollary::Concave1 => "Concave+1",
            Corollary::Concave2 => "Concave+2",
            Corollary::Convex1Plus => "Convex+1+",
            Corollary::Convex2Plus => "Convex+2+",
            Corollary::Concave1Plus => "Concave+1+",
            Corollary::Concave2Plus => "Concave+2+",
        }
    }

    fn theorem(&self) -> Theorem {
        match self {
            Corollary::Convex1 | Corollary::Convex2 | Corollary::Convex1Plus | Corollary::Convex2Plus => {
                Theorem::Convex
            }
            _ => Theorem::Concave,
        }
    }

    /// Error on the right (`B = φ S0 + K`) rather than on the left.
    fn error_on_b(&self) -> bool {
        matches!(
            self,
            Corollary::Convex1 | Corollary::Concave1 | Corollary::Convex1Plus | Corollary::Concave1Plus
        )
    }

    fn real_t(&self) -> bool {
        matches!(
            self,
            Corollary::Convex1Plus | Corollary::Convex2Plus | Corollary::Concave1Plus | Corollary::Concave2Plus
        )
    }
}

impl FromStr for Corollary {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Corollary::ALL
            .iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| format!("unknown corollary {s:?}"))
    }
}

impl fmt::Display for Corollary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Rebuilds `A` and `B` from the template found in the scenario (in `B` for
/// the first variants, in `A` for the second) and checks the corollary's
/// conclusion: at every dyadic `t` with exponent `<= depth` for the plain
/// variants, and at `real_t_list` through the extension for the `+` variants.
pub fn corollary_suite(sc: &Scenario, which: Corollary, depth: u32) -> Result<InclusionReport> {
    let source = if which.error_on_b() { &sc.b } else { &sc.a };
    let FamilyKind::Template { phi, s0, norm, .. } = source else {
        return Err(VerifyError::Invalid(format!(
            "{which} needs a template map in {}",
            if which.error_on_b() { "b" } else { "a" }
        )));
    };
    let k = sc.k.clone();
    phi.validate().map_err(TransformError::from)?;
    check_template_hypotheses(s0, &k).map_err(|e| VerifyError::Hypothesis(e.to_string()))?;
    if which.real_t() && k_lower_bound_witness(s0, &k).is_none() {
        return Err(VerifyError::Hypothesis("S0 is not closedly K-lower bounded".into()));
    }
    let dim = k.dim();
    let template = |cone: ConeSpec| FamilyKind::Template {
        phi: phi.clone(),
        s0: s0.clone(),
        k: cone,
        norm: *norm,
    };
    let mut rebuilt = sc.clone();
    rebuilt.theorem = which.theorem();
    if which.error_on_b() {
        rebuilt.a = FamilyKind::Singleton0 { dim };
        rebuilt.b = template(k.clone());
    } else {
        rebuilt.a = template(ConeSpec::trivial(dim));
        rebuilt.b = FamilyKind::Constant { set: k.to_set() };
    }
    let premise = check_jensen(&rebuilt)?;
    if premise.verdict.is_fail() {
        return Err(VerifyError::Hypothesis(format!("premise of {which}: {premise}")));
    }
    let id = format!("corollary[{which}]");
    if which.real_t() {
        let ts = if sc.real_t_list.is_empty() {
            vec![rat(1, 3)]
        } else {
            sc.real_t_list.clone()
        };
        let mut reports = Vec::new();
        for p in rebuilt.pairs() {
            for t in &ts {
                reports.push(extension(&rebuilt, p.x(), p.y(), t, sc.tolerances.extension, rebuilt.theorem)?);
            }
        }
        return Ok(aggregate(&id, reports));
    }
    let grid = dyadic_grid(depth);
    let results: Vec<Result<InclusionReport>> = rebuilt
        .pairs()
        .par_iter()
        .flat_map_iter(|p| grid.iter().map(move |t| (p.clone(), t.clone())))
        .map(|(p, t)| {
            let (x, y) = (p.x(), p.y());
            let tr = t.to_rational();
            let u = sub_vec(x, y);
            let error = if tr.is_integer() {
                k.to_set()
            } else {
                tabor_closed_form(phi, s0, &k, *norm, &tr, &u)?.outer
            };
            let mixed = rebuilt.mix_f(&tr, x, y)?;
            let at_point = rebuilt.f_at(&mix(&tr, x, y))?;
            let kset = k.to_set();
            let (lhs, rhs) = match which {
                Corollary::Convex1 => (mixed, minkowski_sum(&at_point, &error)?),
                Corollary::Convex2 => (minkowski_sum(&mixed, &error)?, minkowski_sum(&at_point, &kset)?),
                Corollary::Concave1 => (at_point, minkowski_sum(&mixed, &error)?),
                _ => (minkowski_sum(&at_point, &error)?, minkowski_sum(&mixed, &kset)?),
            };
            Ok(subset_of(&lhs, &rhs)?.map_witness(|w| w.at_pair(x, y).at_t(&tr)))
        })
        .collect();
    Ok(aggregate(&id, results.into_iter().collect::<Result<Vec<_>>>()?))
}

/// Copy of the scenario with `B`'s template coefficient multiplied by
/// `1 - delta`, or, when `B` is no template, `A`'s multiplied by `1 + delta`.
pub fn mutate(sc: &Scenario, delta: &Rational) -> Result<Scenario> {
    let mut out = sc.clone();
    if let Some(b) = sc.b.scale_phi(&(Rational::one() - delta)) {
        out.b = b;
    } else if let Some(a) = sc.a.scale_phi(&(Rational::one() + delta)) {
        out.a = a;
    } else {
        return Err(VerifyError::Invalid("no template coefficient to perturb".into()));
    }
    out.name = format!("{} (mutated by {delta})", sc.name);
    Ok(out)
}

fn first_failure(sc: &Scenario, depth: u32) -> Result<Option<InclusionReport>> {
    let grid = dyadic_grid(depth);
    let pairs = sc.pairs();
    for t in &grid {
        let found: Vec<Result<InclusionReport>> = pairs
            .par_iter()
            .map(|p| check_conclusion(sc, p.x(), p.y(), t))
            .collect();
        for r in found {
            let r = r?;
            if r.verdict.is_fail() {
                return Ok(Some(r));
            }
        }
    }
    Ok(None)
}

/// Negative controls. The unperturbed scenario must pass its hypotheses and
/// its conclusion sweep; then each mutation from `grid` is searched for the
/// first failing dyadic `t` (by exponent, then numerator) and pair. A
/// mutation report fails exactly when the mutation was caught.
pub fn mutation_search(sc: &Scenario, grid: &[Rational], depth: u32) -> Result<Vec<InclusionReport>> {
    let mut out = Vec::new();
    for r in hypothesis_reports(sc)? {
        if r.verdict.is_fail() {
            out.push(r.with_id("mutation-gate").with_note("hypothesis fails before any mutation"));
            return Ok(out);
        }
    }
    let control = match first_failure(sc, depth)? {
        Some(r) => r.with_id("mutation-control"),
        None => InclusionReport::new("mutation-control", Verdict::Pass, Margin::zero()),
    };
    out.push(control);
    for delta in grid {
        let mutated = mutate(sc, delta)?;
        let id = format!("mutation[{}]", crate::json::rational_text(delta));
        let r = match first_failure(&mutated, depth)? {
            Some(r) => r.with_id(id),
            None => InclusionReport::new(id, Verdict::Pass, Margin::zero())
                .with_note("mutation not detected"),
        };
        out.push(r);
    }
    Ok(out)
}

/// Convexity of `F`, `A`, `B`, `K` in epigraph form corresponds to concavity
/// of the hypograph form with `-A`, `-B`, `-K` and the same `f`.
pub fn orientation_dual(sc: &Scenario) -> Scenario {
    let mut out = sc.clone();
    out.theorem = match sc.theorem {
        Theorem::Convex => Theorem::Concave,
        Theorem::Concave => Theorem::Convex,
    };
    out.f = sc.f.flip_orientation();
    out.a = sc.a.negate();
    out.b = sc.b.negate();
    out.k = sc.k.negate();
    out
}

pub fn rational_list(values: &[i64], den: i64) -> Vec<Rational> {
    values.iter().map(|v| rat(*v, den)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_series::PhiSpec;

    fn up() -> ConeSpec {
        ConeSpec::ray(vec![int(1)]).unwrap()
    }

    fn down() -> ConeSpec {
        ConeSpec::ray(vec![int(-1)]).unwrap()
    }

    fn unit_domain() -> Domain {
        Domain::interval(int(-1), int(1)).unwrap()
    }

    fn square() -> Vec<Rational> {
        vec![int(0), int(0), int(1)]
    }

    fn neg_square() -> Vec<Rational> {
        vec![int(0), int(0), int(-1)]
    }

    fn quarter() -> PhiSpec {
        PhiSpec::power(rat(1, 4), 2.0).unwrap()
    }

    fn point(v: i64) -> GeneratorSet {
        GeneratorSet::point(vec![int(v)]).unwrap()
    }

    fn pairs() -> Vec<(Vector, Vector)> {
        vec![
            (vec![int(0)], vec![int(1)]),
            (vec![int(-1)], vec![int(1)]),
            (vec![rat(1, 4)], vec![rat(3, 4)]),
        ]
    }

    fn sharp() -> Scenario {
        Scenario::new(
            Theorem::Convex,
            unit_domain(),
            FamilyKind::epigraph(square()),
            FamilyKind::template(quarter(), point(-1), ConeSpec::trivial(1)),
            FamilyKind::Constant { set: up().to_set() },
            up(),
        )
        .with_pairs(pairs())
    }

    fn plain(coeffs: Vec<Rational>) -> Scenario {
        Scenario::new(
            Theorem::Convex,
            unit_domain(),
            FamilyKind::epigraph(coeffs),
            FamilyKind::Singleton0 { dim: 1 },
            FamilyKind::Constant { set: up().to_set() },
            up(),
        )
    }

    #[test]
    fn jensen_examples() {
        let r = check_jensen_convexity(&plain(square()).with_pairs(pairs())).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.margin, Margin::Exact(rat(1, 16)));
        let r = check_jensen_convexity(&plain(neg_square()).with_pairs(vec![(vec![int(0)], vec![int(1)])])).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.margin, Margin::Exact(rat(-1, 4)));
        let w = r.witness.unwrap();
        assert_eq!(w.x, Some(vec![int(0)]));
        let r = check_jensen_convexity(&plain(vec![int(3), int(-2)])).unwrap();
        assert_eq!(r.margin, Margin::zero());
    }

    #[test]
    fn concavity_examples() {
        let sc = Scenario::new(
            Theorem::Concave,
            unit_domain(),
            FamilyKind::epigraph(neg_square()),
            FamilyKind::Singleton0 { dim: 1 },
            FamilyKind::template(quarter(), point(1), up()),
            up(),
        )
        .with_pairs(pairs());
        let r = check_jensen_concavity(&sc).unwrap();
        assert_eq!((r.verdict, r.margin), (Verdict::Pass, Margin::zero()));
        let hyp = Scenario::new(
            Theorem::Concave,
            unit_domain(),
            FamilyKind::hypograph(square()),
            FamilyKind::Singleton0 { dim: 1 },
            FamilyKind::Constant { set: down().to_set() },
            down(),
        )
        .with_pairs(pairs());
        assert!(check_jensen_concavity(&hyp).unwrap().passed());
    }

    #[test]
    fn sharp_induction_and_conclusion() {
        let sc = sharp();
        for p in sc.pairs() {
            let r = dyadic_induction_check_convex(&sc, p.x(), p.y(), 5, Reading::CvnB).unwrap();
            assert_eq!((r.verdict, r.margin.clone()), (Verdict::Pass, Margin::zero()), "{r}");
        }
        let r = conclusion_sweep(&sc, 6).unwrap();
        assert_eq!((r.verdict, r.margin), (Verdict::Pass, Margin::zero()));
    }

    #[test]
    fn readings_differ_for_template_b() {
        let sc = Scenario::new(
            Theorem::Convex,
            unit_domain(),
            FamilyKind::epigraph(neg_square()),
            FamilyKind::Singleton0 { dim: 1 },
            FamilyKind::template(quarter(), point(-1), up()),
            up(),
        )
        .with_pairs(pairs());
        assert!(check_jensen_convexity(&sc).unwrap().passed());
        let (x, y) = (vec![int(0)], vec![int(1)]);
        assert!(dyadic_induction_check_convex(&sc, &x, &y, 4, Reading::CvnB).unwrap().passed());
        let r = dyadic_induction_check_convex(&sc, &x, &y, 4, Reading::CvnA).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert_eq!((w.n, w.m), (Some(1), Some(1)));
    }

    #[test]
    fn trivial_endpoints() {
        let sc = sharp();
        for t in [DyadicRational::from_integer(0), DyadicRational::from_integer(1)] {
            let r = check_convexity_conclusion(&sc, &[int(0)], &[int(1)], &t).unwrap();
            assert!(r.passed());
        }
    }

    #[test]
    fn conclusion_gate() {
        let mut sc = sharp();
        sc.a = FamilyKind::Constant { set: point(1) };
        let err = check_convexity_conclusion(&sc, &[int(0)], &[int(1)], &DyadicRational::new(1, 1)).unwrap_err();
        assert!(err.is_hypothesis());
    }

    #[test]
    fn extension_on_sharp_scenario() {
        let sc = sharp();
        for t in [rat(1, 3), rat(2, 5)] {
            let r = bernstein_doetsch_extension_convex(&sc, &[int(0)], &[int(1)], &t, 1e-6).unwrap();
            assert_eq!(r.verdict, Verdict::Approximate, "{r}");
            assert!(r.inflation.unwrap() <= 1e-6);
        }
        let r = bernstein_doetsch_extension_convex(&sc, &[int(0)], &[int(1)], &rat(3, 8), 1e-6).unwrap();
        assert_eq!((r.verdict, r.inflation), (Verdict::Pass, Some(0.0)));
        let bad = mutate(&sc, &rat(1, 1000)).unwrap();
        let r = bernstein_doetsch_extension_convex(&bad, &[int(0)], &[int(1)], &rat(1, 3), 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn usc_probe_examples() {
        let f = SetFamily::on(FamilyKind::epigraph(square()), unit_domain());
        let r = directional_usc_probe(&f, &[rat(1, 2)], &[int(1)], &up(), &[rat(1, 10)], 8).unwrap();
        assert!(r[0].1.is_some());
        let c = SetFamily::new(FamilyKind::Constant { set: point(3) });
        let r = directional_usc_probe(&c, &[int(0)], &[int(1)], &ConeSpec::trivial(1), &[rat(1, 100)], 6).unwrap();
        assert_eq!(r[0].1, Some(int(1)));
        let step = crate::transform::PiecewisePoly::new(vec![
            crate::transform::Piece { from: None, coeffs: vec![int(1)] },
            crate::transform::Piece { from: Some(int(0)), coeffs: vec![int(0)] },
        ])
        .unwrap();
        let epi = SetFamily::on(FamilyKind::Epigraph { f: step.clone() }, unit_domain());
        let r = directional_usc_probe(&epi, &[int(0)], &[int(-1)], &up(), &[rat(1, 10)], 6).unwrap();
        assert!(r[0].1.is_some());
        let hypo = SetFamily::on(FamilyKind::Hypograph { f: step }, unit_domain());
        let r = directional_usc_probe(&hypo, &[int(0)], &[int(-1)], &down(), &[rat(1, 10)], 6).unwrap();
        assert_eq!(r[0].1, None);
    }

    #[test]
    fn continuity_probe_examples() {
        let s = GeneratorSet::interval(int(0), int(1));
        let t = point(0);
        let r = directional_continuity_probe(&s, &t, &ConeSpec::trivial(1), &[rat(1, 4)], 5).unwrap();
        assert!(r[0].1.is_some());
        let ray = up().to_set();
        let r = directional_continuity_probe(&ray, &t, &ConeSpec::trivial(1), &[rat(1, 4)], 5).unwrap();
        assert_eq!(r[0].1, None);
    }

    #[test]
    fn corollaries() {
        let sc = sharp();
        let r = corollary_suite(&sc, Corollary::Convex2, 6).unwrap();
        assert_eq!((r.verdict, r.margin), (Verdict::Pass, Margin::zero()));
        let approx = Scenario::new(
            Theorem::Convex,
            unit_domain(),
            FamilyKind::epigraph(square()),
            FamilyKind::Singleton0 { dim: 1 },
            FamilyKind::template(PhiSpec::power(int(1), 2.0).unwrap(), point(-1), up()),
            up(),
        )
        .with_pairs(pairs());
        let r = corollary_suite(&approx, Corollary::Convex1, 5).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let concave = Scenario::new(
            Theorem::Concave,
            unit_domain(),
            FamilyKind::hypograph(neg_square()),
            FamilyKind::Singleton0 { dim: 1 },
            FamilyKind::template(quarter(), point(1), down()),
            down(),
        )
        .with_pairs(pairs());
        let r = corollary_suite(&concave, Corollary::Concave1, 5).unwrap();
        assert_eq!((r.verdict, r.margin), (Verdict::Pass, Margin::zero()));
        let r = corollary_suite(&sc, Corollary::Convex2Plus, 0).unwrap();
        assert_eq!(r.verdict, Verdict::Approximate);
    }

    #[test]
    fn mutations() {
        let sc = sharp();
        let reports = mutation_search(&sc, &[rat(1, 1000)], 4).unwrap();
        assert_eq!(reports[0].verdict, Verdict::Pass);
        assert_eq!(reports[1].verdict, Verdict::Fail);
        let bad = plain(neg_square()).with_pairs(pairs());
        let reports = mutation_search(&bad, &[rat(1, 1000)], 4).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].check_id, "mutation-gate");
    }

    #[test]
    fn duality_on_sharp_scenario() {
        let sc = sharp();
        let dual = orientation_dual(&sc);
        assert_eq!(
            check_jensen(&sc).unwrap().margin,
            check_jensen(&dual).unwrap().margin
        );
        let r = conclusion_sweep(&dual, 5).unwrap();
        assert_eq!((r.verdict, r.margin), (Verdict::Pass, Margin::zero()));
    }

    #[test]
    fn default_pairs_lie_in_domain() {
        let d = unit_domain();
        for p in default_pairs(&d) {
            assert!(d.contains(p.x()) && d.contains(p.y()));
        }
    }
}
