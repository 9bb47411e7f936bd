//! Command-line front end.
//!
//! ```text
//! tabor-sva eval --function tau --alpha 2 --grid 1001 --out tau2.csv
//! tabor-sva verify scenarios/sharp_tau2.json --depth 6 --text
//! tabor-sva set-dump scenarios/sharp_tau2.json --t 3/8 --x 0 --y 1
//! ```
//!
//! `verify` exits with 0 when every non-mutation check passes, 1 when an
//! inclusion fails, 2 on a malformed scenario or bad usage and 3 when a
//! hypothesis gate rejects the scenario.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::dyadic::{rational_to_f64, DyadicRational, Rational};
use crate::json::{parse_rational, rational_text};
use crate::report::{InclusionReport, Verdict};
use crate::scalar_series::{phi_perp, takagi, tau_alpha, PhiSpec, SeriesValue};
use crate::setarith::{add_cone, minkowski_sum, scale, sub_vec, GeneratorSet, SetUnion};
use crate::transform::tabor_transform;
use crate::verify::{
    corollary_suite, dyadic_induction_check, hypothesis_reports, conclusion_sweep,
    extension_sweep, mutation_search, Corollary, Reading, Scenario, Theorem, VerifyError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tabor-sva", version, about = "Tabor error terms and convexity checks for set-valued maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Function {
    Takagi,
    Tau,
    #[value(name = "phi_perp")]
    PhiPerp,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate T, tau_alpha or phi_perp on a uniform grid of [0, 1] as CSV.
    Eval {
        #[arg(long, value_enum)]
        function: Function,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Coefficient c of phi(u) = c |u|^alpha, as `num/den`.
        #[arg(long, default_value = "1")]
        coefficient: String,
        #[arg(long, default_value_t = 1.0)]
        x_norm: f64,
        /// Number of grid points, endpoints included.
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the checks of a scenario file and print one report per line.
    Verify {
        scenario: PathBuf,
        /// Dyadic depth of the induction and conclusion sweeps; 0 runs only
        /// the hypothesis checks.
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long, value_parser = parse_reading)]
        reading: Option<Reading>,
        #[arg(long, conflicts_with = "text")]
        json: bool,
        #[arg(long)]
        text: bool,
    },
    /// Write the generators of A⊥, B⊥ and both sides of the conclusion at a
    /// dyadic t as CSV.
    SetDump {
        scenario: PathBuf,
        #[arg(long)]
        t: String,
        /// Comma-separated rational coordinates.
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_reading(s: &str) -> Result<Reading, String> {
    s.parse()
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read or write {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("CSV output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(e) if e.is_hypothesis() => EXIT_HYPOTHESIS,
            _ => EXIT_USAGE,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Hypotheses,
    Induction,
    Conclusions,
    Extensions,
    Corollaries,
    Mutations,
}

/// Run directives stored next to the scenario.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDirectives {
    /// Stages to run; all of them when absent. The order is fixed regardless.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<Stage>>,
    /// Overrides the scenario's `dyadic_depth`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(default)]
    pub corollaries: Vec<String>,
    #[serde(default, with = "crate::json::vector")]
    pub mutation_grid: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    #[serde(default)]
    pub run: RunDirectives,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("scenario: {e}")))?;
        file.scenario
            .validate()
            .map_err(|e| CliError::Usage(format!("scenario: {e}")))?;
        for c in &file.run.corollaries {
            c.parse::<Corollary>().map_err(CliError::Usage)?;
        }
        if file.run.mutation_grid.iter().any(|d| {
            *d <= Rational::from_integer(0.into()) || *d >= Rational::from_integer(1.into())
        }) {
            return Err(CliError::Usage("mutation_grid entries must lie in (0, 1)".into()));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text)
    }

    fn wants(&self, stage: Stage) -> bool {
        self.run.checks.as_ref().map_or(true, |c| c.contains(&stage))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub depth: Option<u32>,
    pub reading: Option<Reading>,
}

/// One line of `verify` output.
#[derive(Debug, Clone)]
pub struct Record {
    pub stage: Stage,
    pub report: InclusionReport,
    /// Whether the record counts toward the exit status.
    pub binding: bool,
}

impl Record {
    fn to_json(&self) -> serde_json::Value {
        let mut v = self.report.to_json();
        v["stage"] = json!(self.stage);
        v["binding"] = json!(self.binding);
        v
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub records: Vec<Record>,
    /// Set when a stage could not run, with the reason.
    pub halted: Option<String>,
    pub exit_code: i32,
}

fn stage_error(e: VerifyError) -> (String, i32) {
    let code = if e.is_hypothesis() { EXIT_HYPOTHESIS } else { EXIT_USAGE };
    (e.to_string(), code)
}

/// Runs the stages of a scenario file in their fixed order: hypotheses,
/// induction, dyadic conclusions, real-t extensions, corollaries, mutations.
pub fn run_verify(file: &ScenarioFile, opts: &VerifyOptions) -> VerifyOutcome {
    let mut sc = file.scenario.clone();
    if let Some(r) = opts.reading {
        sc.reading = r;
    }
    let depth = opts.depth.or(file.run.depth).unwrap_or(sc.dyadic_depth);
    let mut records = Vec::new();
    let push = |records: &mut Vec<Record>, stage, report, binding| {
        records.push(Record {
            stage,
            report,
            binding,
        })
    };
    let finish = |records: Vec<Record>, halted: Option<(String, i32)>| {
        let failed = records
            .iter()
            .any(|r| r.binding && r.report.verdict.is_fail());
        let exit_code = match &halted {
            Some((_, code)) => *code,
            None if failed => EXIT_FAIL,
            None => EXIT_OK,
        };
        VerifyOutcome {
            records,
            halted: halted.map(|h| h.0),
            exit_code,
        }
    };

    match hypothesis_reports(&sc) {
        Ok(reports) => {
            let gate_failed = reports.iter().any(|r| r.verdict.is_fail());
            for r in reports {
                push(&mut records, Stage::Hypotheses, r, true);
            }
            if gate_failed {
                return finish(records, Some(("hypothesis gate failed".into(), EXIT_HYPOTHESIS)));
            }
        }
        Err(e) => return finish(records, Some(stage_error(e))),
    }
    if depth == 0 {
        return finish(records, None);
    }

    if file.wants(Stage::Induction) {
        let readings: Vec<(Reading, bool)> = match sc.theorem {
            Theorem::Convex => {
                let other = match sc.reading {
                    Reading::CvnA => Reading::CvnB,
                    Reading::CvnB => Reading::CvnA,
                };
                vec![(sc.reading, true), (other, false)]
            }
            Theorem::Concave => vec![(sc.reading, true)],
        };
        for p in sc.pairs() {
            for &(reading, binding) in &readings {
                match dyadic_induction_check(&sc, p.x(), p.y(), depth, reading) {
                    Ok(r) => push(&mut records, Stage::Induction, r, binding),
                    Err(e) => return finish(records, Some(stage_error(e))),
                }
            }
        }
    }
    if file.wants(Stage::Conclusions) {
        match conclusion_sweep(&sc, depth) {
            Ok(r) => push(&mut records, Stage::Conclusions, r, true),
            Err(e) => return finish(records, Some(stage_error(e))),
        }
    }
    if file.wants(Stage::Extensions) && !sc.real_t_list.is_empty() {
        match extension_sweep(&sc) {
            Ok(r) => push(&mut records, Stage::Extensions, r, true),
            Err(e) => return finish(records, Some(stage_error(e))),
        }
    }
    if file.wants(Stage::Corollaries) {
        for name in &file.run.corollaries {
            let which: Corollary = name.parse().expect("validated on load");
            match corollary_suite(&sc, which, depth) {
                Ok(r) => push(&mut records, Stage::Corollaries, r, true),
                Err(e) => return finish(records, Some(stage_error(e))),
            }
        }
    }
    if file.wants(Stage::Mutations) && !file.run.mutation_grid.is_empty() {
        match mutation_search(&sc, &file.run.mutation_grid, depth) {
            Ok(reports) => {
                for r in reports {
                    push(&mut records, Stage::Mutations, r, false);
                }
            }
            Err(e) => {
                let r = InclusionReport::new(
                    "mutation-error",
                    Verdict::Fail,
                    crate::report::Margin::NegInfinity,
                )
                .with_note(e.to_string());
                push(&mut records, Stage::Mutations, r, false);
            }
        }
    }
    finish(records, None)
}

/// Writes the records and a closing summary.
pub fn write_outcome(
    out: &mut dyn Write,
    name: &str,
    outcome: &VerifyOutcome,
    format: OutputFormat,
) -> io::Result<()> {
    let binding = outcome.records.iter().filter(|r| r.binding).count();
    let failed = outcome
        .records
        .iter()
        .filter(|r| r.binding && r.report.verdict.is_fail())
        .count();
    match format {
        OutputFormat::Json => {
            for r in &outcome.records {
                writeln!(out, "{}", r.to_json())?;
            }
            let summary = json!({
                "summary": {
                    "scenario": name,
                    "checks": binding,
                    "failed": failed,
                    "halted": outcome.halted,
                    "exit_code": outcome.exit_code,
                }
            });
            writeln!(out, "{summary}")?;
        }
        OutputFormat::Text => {
            for r in &outcome.records {
                let tag = if r.binding { "" } else { " (informational)" };
                writeln!(out, "{:<12} {}{tag}", format!("{:?}", r.stage).to_lowercase(), r.report)?;
            }
            if let Some(h) = &outcome.halted {
                writeln!(out, "halted: {h}")?;
            }
            writeln!(
                out,
                "{name}: {failed} of {binding} checks failed, exit {}",
                outcome.exit_code
            )?;
        }
    }
    Ok(())
}

fn eval_point(function: Function, phi: &PhiSpec, alpha: f64, x_norm: f64, t: f64, tol: f64) -> Result<SeriesValue, CliError> {
    let r = match function {
        Function::Takagi => takagi(t, tol),
        Function::Tau => tau_alpha(alpha, t, tol),
        Function::PhiPerp => phi_perp(phi, t, x_norm, tol),
    };
    r.map_err(|e| CliError::Usage(e.to_string()))
}

/// Rows `(t, value, error_bound)` on `t_i = i / (grid - 1)`.
pub fn eval_table(
    function: Function,
    alpha: f64,
    coefficient: &Rational,
    x_norm: f64,
    grid: usize,
    tol: f64,
) -> Result<Vec<(f64, SeriesValue)>, CliError> {
    if grid < 2 {
        return Err(CliError::Usage("--grid needs at least two points".into()));
    }
    let phi = PhiSpec::power(coefficient.clone(), alpha).map_err(|e| CliError::Usage(e.to_string()))?;
    let last = (grid - 1) as f64;
    (0..grid)
        .map(|i| {
            let t = i as f64 / last;
            eval_point(function, &phi, alpha, x_norm, t, tol).map(|v| (t, v))
        })
        .collect()
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).map_err(io_err(p))?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn write_eval_csv(rows: &[(f64, SeriesValue)], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "value", "error_bound"])?;
    for (t, v) in rows {
        w.write_record([t.to_string(), v.value.to_string(), v.error_bound.to_string()])?;
    }
    w.flush().map_err(|e| CliError::Io {
        path: "output".into(),
        source: e,
    })?;
    Ok(())
}

fn parse_vector(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',')
        .map(|c| parse_rational(c).map_err(|e| CliError::Usage(format!("coordinate {c:?}: {e}"))))
        .collect()
}

/// Named blocks `A_perp`, `B_perp`, `lhs`, `rhs` of the conclusion at a
/// dyadic `t`. Both sides are shown with `K` added, which leaves the
/// inclusion between them unchanged.
pub fn set_dump_blocks(
    sc: &Scenario,
    t: &DyadicRational,
    x: &[Rational],
    y: &[Rational],
) -> Result<Vec<(&'static str, SetUnion)>, CliError> {
    let tr = t.to_rational();
    let u = sub_vec(x, y);
    let n = t.exponent();
    let a = tabor_transform(&sc.fam_a(), &tr, &u, n).map_err(VerifyError::from)?.value;
    let b = tabor_transform(&sc.fam_b(), &tr, &u, n).map_err(VerifyError::from)?.value;
    let one = Rational::from_integer(1.into());
    let p: Vec<Rational> = x
        .iter()
        .zip(y)
        .map(|(a, b)| &tr * a + (&one - &tr) * b)
        .collect();
    let fam_f = sc.fam_f();
    let f = |v: &[Rational]| fam_f.eval(v).map_err(VerifyError::from);
    let mixed = minkowski_sum(&scale(&tr, &f(x)?).map_err(VerifyError::from)?, &scale(&(&one - &tr), &f(y)?).map_err(VerifyError::from)?)
        .map_err(VerifyError::from)?;
    let at_point = f(&p)?;
    let (left, right) = match sc.theorem {
        Theorem::Convex => (a.add_set(&mixed), b.add_set(&at_point)),
        Theorem::Concave => (a.add_set(&at_point), b.add_set(&mixed)),
    };
    let mod_k = |s: SetUnion| -> Result<SetUnion, CliError> {
        let parts: Vec<GeneratorSet> = s
            .parts()
            .iter()
            .map(|p| add_cone(p, &sc.k))
            .collect::<Result<_, _>>()
            .map_err(VerifyError::from)?;
        Ok(SetUnion::new(parts).map_err(VerifyError::from)?.simplify())
    };
    let left = mod_k(left.map_err(VerifyError::from)?)?;
    let right = mod_k(right.map_err(VerifyError::from)?)?;
    Ok(vec![("A_perp", a), ("B_perp", b), ("lhs", left), ("rhs", right)])
}

pub fn write_set_dump_csv(blocks: &[(&str, SetUnion)], dim: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["block".to_string(), "part".into(), "kind".into(), "index".into()];
    for i in 0..dim {
        header.push(format!("c{i}"));
        header.push(format!("c{i}_exact"));
    }
    w.write_record(&header)?;
    for (name, union) in blocks {
        for (pi, part) in union.parts().iter().enumerate() {
            let gens = part
                .points()
                .iter()
                .map(|g| ("point", g))
                .chain(part.rays().iter().map(|g| ("ray", g)));
            for (gi, (kind, g)) in gens.enumerate() {
                let mut row = vec![name.to_string(), pi.to_string(), kind.to_string(), gi.to_string()];
                for c in g {
                    row.push(rational_to_f64(c).to_string());
                    row.push(rational_text(c));
                }
                w.write_record(&row)?;
            }
        }
    }
    w.flush().map_err(|e| CliError::Io {
        path: "output".into(),
        source: e,
    })?;
    Ok(())
}

/// Runs a parsed command and returns the process exit code. Reports go to
/// `out`, diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Eval {
            function,
            alpha,
            coefficient,
            x_norm,
            grid,
            tol,
            out: path,
        } => {
            let c = parse_rational(&coefficient).map_err(CliError::Usage)?;
            let rows = eval_table(function, alpha, &c, x_norm, grid, tol)?;
            match path {
                Some(p) => write_eval_csv(&rows, &mut open_out(Some(&p))?)?,
                None => write_eval_csv(&rows, out)?,
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            scenario,
            depth,
            reading,
            json: _,
            text,
        } => {
            let file = ScenarioFile::load(&scenario)?;
            let outcome = run_verify(&file, &VerifyOptions { depth, reading });
            let format = if text { OutputFormat::Text } else { OutputFormat::Json };
            let name = if file.scenario.name.is_empty() {
                scenario.display().to_string()
            } else {
                file.scenario.name.clone()
            };
            write_outcome(out, &name, &outcome, format).map_err(|e| CliError::Io {
                path: "output".into(),
                source: e,
            })?;
            Ok(outcome.exit_code)
        }
        Command::SetDump {
            scenario,
            t,
            x,
            y,
            out: path,
        } => {
            let file = ScenarioFile::load(&scenario)?;
            let sc = &file.scenario;
            let tr = parse_rational(&t).map_err(CliError::Usage)?;
            let td = DyadicRational::from_rational(&tr)
                .map_err(|_| CliError::Usage(format!("t = {t} is not dyadic")))?;
            if tr < Rational::from_integer(0.into()) || tr > Rational::from_integer(1.into()) {
                return Err(CliError::Usage(format!("t = {t} is outside [0, 1]")));
            }
            let (x, y) = (parse_vector(&x)?, parse_vector(&y)?);
            if !sc.domain.contains(&x) || !sc.domain.contains(&y) {
                return Err(CliError::Usage("x and y must lie in the domain".into()));
            }
            let blocks = set_dump_blocks(sc, &td, &x, &y)?;
            match path {
                Some(p) => write_set_dump_csv(&blocks, sc.k.dim(), &mut open_out(Some(&p))?)?,
                None => write_set_dump_csv(&blocks, sc.k.dim(), out)?,
            }
            Ok(EXIT_OK)
        }
    }
}
