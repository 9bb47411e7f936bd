//! Verdicts, signed margins and witnesses for inclusion checks.

use std::cmp::Ordering;
use std::fmt;

use serde_json::{json, Value};

use crate::dyadic::{rational_to_f64, Rational};
use crate::json::{rational_pair, rational_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Passed up to an explicit approximation: generator membership in a
    /// union, or an inclusion certified only within a recorded inflation.
    Approximate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Approximate => "approximate",
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail)
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    /// Fail dominates Approximate, which dominates Pass.
    pub fn combine(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Approximate, _) | (_, Verdict::Approximate) => Verdict::Approximate,
            _ => Verdict::Pass,
        }
    }
}

/// Signed inclusion margin: nonnegative when the inclusion holds.
///
/// For a point generator it is the sup-norm depth of the point inside the
/// right-hand set, or minus its sup-norm distance to that set when outside.
/// A ray generator that is not a recession direction of the right-hand side
/// has margin minus infinity.
#[derive(Debug, Clone, PartialEq)]
pub enum Margin {
    Exact(Rational),
    Real(f64),
    PosInfinity,
    NegInfinity,
}

impl Margin {
    pub fn zero() -> Margin {
        Margin::Exact(Rational::from_integer(0.into()))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Margin::Exact(r) => rational_to_f64(r),
            Margin::Real(v) => *v,
            Margin::PosInfinity => f64::INFINITY,
            Margin::NegInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Margin::Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Margin::Exact(r) => *r < Rational::from_integer(0.into()),
            Margin::Real(v) => *v < 0.0,
            Margin::PosInfinity => false,
            Margin::NegInfinity => true,
        }
    }

    pub fn cmp_margin(&self, other: &Margin) -> Ordering {
        use Margin::*;
        match (self, other) {
            (Exact(a), Exact(b)) => a.cmp(b),
            (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
            (NegInfinity, _) | (_, PosInfinity) => Ordering::Less,
            (PosInfinity, _) | (_, NegInfinity) => Ordering::Greater,
            (a, b) => a
                .to_f64()
                .partial_cmp(&b.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }

    pub fn min(self, other: Margin) -> Margin {
        if other.cmp_margin(&self) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Margin) -> Margin {
        if other.cmp_margin(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Margin::Exact(r) => json!({ "exact": rational_pair(r), "approx": rational_to_f64(r) }),
            Margin::Real(v) => json!({ "real": v }),
            Margin::PosInfinity => json!("+inf"),
            Margin::NegInfinity => json!("-inf"),
        }
    }
}

impl fmt::Display for Margin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Margin::Exact(r) => write!(f, "{}", rational_text(r)),
            Margin::Real(v) => write!(f, "{v:e}"),
            Margin::PosInfinity => write!(f, "+inf"),
            Margin::NegInfinity => write!(f, "-inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Point(Vec<Rational>),
    Ray(Vec<Rational>),
}

impl Generator {
    fn to_json(&self) -> Value {
        let (kind, v) = match self {
            Generator::Point(v) => ("point", v),
            Generator::Ray(v) => ("ray", v),
        };
        json!({ "kind": kind, "coords": v.iter().map(rational_pair).collect::<Vec<_>>() })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, v) = match self {
            Generator::Point(v) => ("point", v),
            Generator::Ray(v) => ("ray", v),
        };
        let coords: Vec<String> = v.iter().map(rational_text).collect();
        write!(f, "{kind}({})", coords.join(", "))
    }
}

/// Where an inclusion failed (or, for a pass, the location of interest).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Witness {
    pub x: Option<Vec<Rational>>,
    pub y: Option<Vec<Rational>>,
    pub t: Option<Rational>,
    pub n: Option<u32>,
    pub m: Option<u64>,
    /// Index of the union part of the left-hand side.
    pub part: Option<usize>,
    /// Index of the generator within that part.
    pub index: Option<usize>,
    pub generator: Option<Generator>,
}

impl Witness {
    pub fn generator(part: usize, index: usize, g: Generator) -> Witness {
        Witness {
            part: Some(part),
            index: Some(index),
            generator: Some(g),
            ..Witness::default()
        }
    }

    pub fn at_pair(mut self, x: &[Rational], y: &[Rational]) -> Witness {
        self.x = Some(x.to_vec());
        self.y = Some(y.to_vec());
        self
    }

    pub fn at_t(mut self, t: &Rational) -> Witness {
        self.t = Some(t.clone());
        self
    }

    pub fn at_cell(mut self, n: u32, m: u64) -> Witness {
        self.n = Some(n);
        self.m = Some(m);
        self
    }

    pub fn to_json(&self) -> Value {
        let vec = |v: &Option<Vec<Rational>>| {
            v.as_ref()
                .map(|v| v.iter().map(rational_pair).collect::<Vec<_>>())
        };
        json!({
            "x": vec(&self.x),
            "y": vec(&self.y),
            "t": self.t.as_ref().map(rational_pair),
            "n": self.n,
            "m": self.m,
            "part": self.part,
            "index": self.index,
            "generator": self.generator.as_ref().map(Generator::to_json),
        })
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut bits = Vec::new();
        let vec = |v: &[Rational]| {
            v.iter()
                .map(rational_text)
                .collect::<Vec<_>>()
                .join(", ")
        };
        if let Some(x) = &self.x {
            bits.push(format!("x=({})", vec(x)));
        }
        if let Some(y) = &self.y {
            bits.push(format!("y=({})", vec(y)));
        }
        if let Some(t) = &self.t {
            bits.push(format!("t={}", rational_text(t)));
        }
        if let (Some(n), Some(m)) = (self.n, self.m) {
            bits.push(format!("n={n} m={m}"));
        }
        if let Some(g) = &self.generator {
            bits.push(format!("{g}"));
        }
        write!(f, "{}", bits.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InclusionReport {
    pub check_id: String,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub margin: Margin,
    /// Size of the sup-norm inflation the verdict relies on, if any.
    pub inflation: Option<f64>,
    pub note: Option<String>,
}

impl InclusionReport {
    pub fn new(check_id: impl Into<String>, verdict: Verdict, margin: Margin) -> Self {
        InclusionReport {
            check_id: check_id.into(),
            verdict,
            witness: None,
            margin,
            inflation: None,
            note: None,
        }
    }

    pub fn passed(&self) -> bool {
        !self.verdict.is_fail()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.check_id = id.into();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn map_witness(mut self, f: impl FnOnce(Witness) -> Witness) -> Self {
        if let Some(w) = self.witness.take() {
            self.witness = Some(f(w));
        }
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check_id": self.check_id,
            "verdict": self.verdict.as_str(),
            "margin": self.margin.to_json(),
            "witness": self.witness.as_ref().map(Witness::to_json),
            "inflation": self.inflation,
            "note": self.note,
        })
    }
}

impl fmt::Display for InclusionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} margin={}",
            self.verdict.as_str().to_uppercase(),
            self.check_id,
            self.margin
        )?;
        if let Some(i) = self.inflation {
            write!(f, " inflation={i:e}")?;
        }
        if let Some(w) = &self.witness {
            write!(f, " witness: {w}")?;
        }
        if let Some(n) = &self.note {
            write!(f, " ({n})")?;
        }
        Ok(())
    }
}

/// Folds per-cell reports into one: the verdicts combine, the margin is the
/// minimum, and the witness comes from the first failing report in order.
pub fn aggregate(check_id: &str, reports: impl IntoIterator<Item = InclusionReport>) -> InclusionReport {
    let mut out = InclusionReport::new(check_id, Verdict::Pass, Margin::PosInfinity);
    for r in reports {
        if r.verdict.is_fail() && !out.verdict.is_fail() {
            out.witness = r.witness.clone();
            out.note = r.note.clone();
        }
        out.verdict = out.verdict.combine(r.verdict);
        out.margin = out.margin.min(r.margin);
        if let Some(i) = r.inflation {
            out.inflation = Some(out.inflation.map_or(i, |o: f64| o.max(i)));
        }
    }
    out
}
