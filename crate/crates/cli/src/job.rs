use std::fmt;

use dequant_core::dequant::{
    dequantize_extended, dequantize_operator, gvh_matrix_deviation, gvh_obstruction, manifold_for,
    quantize_with, Metaplectic,
};
use dequant_core::geom::{Manifold, ManifoldKind};
use dequant_core::opalg::{coordinate_form, LocalOperator, SystemKind, TensorOperator};
use dequant_core::pathint::{
    exact_partition, extrapolate_transfer, reduced_sum_partition, slicing_compare,
    transfer_partition, PartitionResult, TimeContour, TransferMode, TransferSource,
};
use dequant_core::Error;
use num::complex::Complex64;
use serde_json::{Map, Value};

use crate::output::{self, complex, real, text, Report};
use crate::parse::{parse_expression, parse_symbol, ParseError, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Dequantize,
    Quantize,
    Partition,
    SlicingCompare,
    Gvh,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Dequantize => "dequantize",
            Command::Quantize => "quantize",
            Command::Partition => "partition",
            Command::SlicingCompare => "slicing-compare",
            Command::Gvh => "gvh",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartitionMethod {
    Exact,
    Reduced,
    Transfer,
    #[default]
    All,
}

/// Everything one invocation needs.
#[derive(Debug, Clone)]
pub struct JobSpec {
    pub command: Command,
    pub expression: Option<String>,
    pub systems: SystemConfig,
    /// Boson Fock truncation; defaults to the operator's boson degree plus 40.
    pub truncation: Option<usize>,
    pub beta: f64,
    pub time: f64,
    /// Integral of the time profile; replaces `time` in the phase when set.
    pub theta: Option<f64>,
    pub method: PartitionMethod,
    pub mode: TransferMode,
    pub slices: Vec<usize>,
    pub cutoff: Option<u64>,
    pub metaplectic: Metaplectic,
    /// Guard band for the truncated-matrix residual check of `gvh`.
    pub guard: usize,
    pub format: Format,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            expression: None,
            systems: SystemConfig::default(),
            truncation: None,
            beta: 0.0,
            time: 0.0,
            theta: None,
            method: PartitionMethod::All,
            mode: TransferMode::MatrixElementExp,
            slices: Vec::new(),
            cutoff: None,
            metaplectic: Metaplectic::On,
            guard: 6,
            format: Format::Json,
        }
    }

    pub fn with_expression(mut self, expr: &str) -> Self {
        self.expression = Some(expr.to_string());
        self
    }
}

/// Exit status and captured streams of one job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum JobError {
    Usage(String),
    Parse(ParseError, String),
    Domain(Error, String),
}

type JobResult<T> = Result<T, JobError>;

fn domain(subexpression: impl Into<String>) -> impl FnOnce(Error) -> JobError {
    let s = subexpression.into();
    move |e| JobError::Domain(e, s)
}

/// Runs one job; never panics on bad input.
pub fn run(job: &JobSpec) -> Outcome {
    let mut warnings = String::new();
    match execute(job, &mut warnings) {
        Ok(report) => Outcome {
            code: 0,
            stdout: report.render(job.format),
            stderr: warnings,
        },
        Err(err) => failure(job, err, warnings),
    }
}

fn failure(job: &JobSpec, err: JobError, mut stderr: String) -> Outcome {
    let (code, name, detail, sub) = match err {
        JobError::Usage(m) => {
            stderr.push_str(&format!("error: {}\n", m));
            return Outcome {
                code: 1,
                stdout: String::new(),
                stderr,
            };
        }
        JobError::Parse(e, source) => {
            let at = e.position();
            let line = source.lines().nth(at.line - 1).unwrap_or("");
            let caret = format!("{}^", " ".repeat(at.column - 1));
            stderr.push_str(&format!(
                "error[{}]: {}\n  | {}\n  | {}\n",
                e.name(),
                e,
                line,
                caret
            ));
            (1, e.name(), e.to_string(), line.to_string())
        }
        JobError::Domain(e, sub) => {
            stderr.push_str(&format!(
                "error[{}]: {}\n  in: {}\n",
                e.name(),
                e.detail(),
                sub
            ));
            (2, e.name(), e.detail(), sub)
        }
    };
    let stdout = if job.format == Format::Json {
        let mut m = Map::new();
        m.insert("command".into(), text(job.command.to_string()));
        m.insert("error".into(), text(name));
        m.insert("detail".into(), text(detail));
        m.insert("subexpression".into(), text(sub));
        output::json(&Value::Object(m))
    } else {
        String::new()
    };
    Outcome {
        code,
        stdout,
        stderr,
    }
}

fn execute(job: &JobSpec, warnings: &mut String) -> JobResult<Report> {
    if !(job.beta >= 0.0 && job.beta.is_finite()) {
        return Err(JobError::Usage(format!(
            "--beta must be a finite number >= 0, got {}",
            job.beta
        )));
    }
    if job.metaplectic == Metaplectic::Off && job.command != Command::Dequantize {
        return Err(JobError::Usage(
            "--metaplectic off is only available for dequantize".into(),
        ));
    }
    match job.command {
        Command::Dequantize => dequantize(job, warnings),
        Command::Quantize => quantize(job),
        Command::Partition => partition(job),
        Command::SlicingCompare => compare(job),
        Command::Gvh => gvh(job),
    }
}

fn expression(job: &JobSpec) -> JobResult<&str> {
    job.expression
        .as_deref()
        .ok_or_else(|| JobError::Usage(format!("{} needs --expr", job.command)))
}

fn operator(job: &JobSpec) -> JobResult<TensorOperator> {
    let src = expression(job)?;
    parse_expression(src, &job.systems).map_err(|e| JobError::Parse(e, src.to_string()))
}

fn systems_value(op: &TensorOperator) -> Value {
    Value::Array(op.systems().iter().map(|k| text(k.to_string())).collect())
}

/// Narrows a failure down to the smallest local piece that fails on its own.
fn offending<T>(
    op: &TensorOperator,
    check: impl Fn(&TensorOperator) -> dequant_core::Result<T>,
) -> String {
    let mut candidates: Vec<LocalOperator> = Vec::new();
    if op.systems().len() > 1 {
        for j in 0..op.systems().len() {
            candidates.extend(op.local_slices(j));
        }
    }
    if let Some(local) = op.local() {
        for (mono, c) in local.monomials() {
            candidates.push(LocalOperator::from_mono(local.kind(), mono, c));
        }
    }
    candidates
        .into_iter()
        .find(|l| check(&TensorOperator::from_local(l.clone())).is_err())
        .map_or_else(|| op.to_string(), |l| l.to_string())
}

fn dequantize(job: &JobSpec, warnings: &mut String) -> JobResult<Report> {
    let op = operator(job)?;
    let mut r = Report::new("dequantize");
    r.set("operator", text(op.to_string()))
        .set("systems", systems_value(&op));
    let first_order = op.local().filter(|l| coordinate_form(l).order() <= 1);
    if job.metaplectic == Metaplectic::Off {
        warnings.push_str(
            "warning: metaplectic correction disabled; this symbol is a negative control and \
             does not reproduce the quantum partition function\n",
        );
    }
    match first_order {
        Some(local) => {
            let res = dequantize_operator(&local, job.metaplectic).map_err(|e| {
                let sub = offending(&op, |t| {
                    dequantize_operator(&t.local().expect("single subsystem"), job.metaplectic)
                });
                JobError::Domain(e, sub)
            })?;
            r.set("route", text("first_order"))
                .set(
                    "metaplectic",
                    text(if job.metaplectic == Metaplectic::On {
                        "on"
                    } else {
                        "off"
                    }),
                )
                .set("symbol", text(res.symbol.to_string()))
                .set("holomorphic_part", text(res.holomorphic_part.to_string()))
                .set("xi_z", text(res.field.xi_z.to_string()))
                .set("xi_zb", text(res.field.xi_zbar.to_string()))
                .set("polarization_ok", Value::Bool(res.polarization_ok));
        }
        None => {
            if job.metaplectic == Metaplectic::Off {
                return Err(JobError::Domain(
                    Error::Unsupported(
                        "--metaplectic off applies to first-order single-subsystem operators"
                            .into(),
                    ),
                    op.to_string(),
                ));
            }
            let ext = dequantize_extended(&op)
                .map_err(|e| JobError::Domain(e, offending(&op, dequantize_extended)))?;
            let generators = ext
                .generators()
                .iter()
                .map(|g| {
                    let mut m = Map::new();
                    m.insert("system".into(), text(g.kind().to_string()));
                    m.insert("generator".into(), text(g.operator().to_string()));
                    m.insert("symbol".into(), text(g.symbol().to_string()));
                    Value::Object(m)
                })
                .collect();
            r.set("route", text("generator_polynomial"))
                .set("metaplectic", text("on"))
                .set("symbol", text(ext.render()))
                .set("generators", Value::Array(generators));
        }
    }
    Ok(r)
}

fn manifold_text(m: &Manifold) -> String {
    match m.kind() {
        ManifoldKind::Plane => "plane".into(),
        ManifoldKind::Sphere(s) => format!("sphere:{}", s),
    }
}

fn quantize(job: &JobSpec) -> JobResult<Report> {
    let src = expression(job)?;
    let f = parse_symbol(src).map_err(|e| JobError::Parse(e, src.to_string()))?;
    let kind = match (job.systems.systems.as_deref(), job.systems.spin) {
        (Some([k]), _) => *k,
        (Some(_), _) => {
            return Err(JobError::Usage(
                "quantize works on a single phase space".into(),
            ))
        }
        (None, Some(s)) => SystemKind::Spin(s),
        (None, None) => SystemKind::Boson,
    };
    let m = manifold_for(kind);
    let form = quantize_with(&f, &m, Metaplectic::On).map_err(domain(f.to_string()))?;
    let mut r = Report::new("quantize");
    r.set("symbol", text(f.to_string()))
        .set("manifold", text(manifold_text(&m)))
        .set("form", text(form.to_string()))
        .set("c", text(form.c().to_string()))
        .set("v", text(form.v().to_string()));
    Ok(r)
}

fn contour(job: &JobSpec) -> JobResult<TimeContour> {
    match job.theta {
        Some(theta) => TimeContour::with_profile(job.beta, job.time, theta),
        None => TimeContour::new(job.beta, job.time),
    }
    .map_err(|e| JobError::Usage(e.detail()))
}

fn truncation(job: &JobSpec, op: &TensorOperator) -> usize {
    job.truncation.unwrap_or(op.boson_degree() as usize + 40)
}

fn contour_value(c: &TimeContour) -> Value {
    let mut m = Map::new();
    m.insert("beta".into(), real(c.beta()));
    m.insert("time".into(), real(c.time()));
    m.insert("theta".into(), real(c.profile_integral()));
    m.insert("tau".into(), complex(c.tau()));
    Value::Object(m)
}

fn row(method: &str, value: Complex64, exact: Complex64) -> Value {
    let mut m = Map::new();
    m.insert("method".into(), text(method));
    m.insert("value".into(), complex(value));
    m.insert("abs_err_vs_exact".into(), real((value - exact).norm()));
    m.insert("phase_offset".into(), real((value / exact).arg()));
    Value::Object(m)
}

fn skipped_value(skipped: &[(String, String)]) -> Value {
    Value::Array(
        skipped
            .iter()
            .map(|(method, reason)| {
                let mut m = Map::new();
                m.insert("method".into(), text(method.clone()));
                m.insert("reason".into(), text(reason.clone()));
                Value::Object(m)
            })
            .collect(),
    )
}

fn partition_header(name: &str, op: &TensorOperator, c: &TimeContour, d: usize) -> Report {
    let mut r = Report::new(name);
    r.table = Some("rows");
    r.set("operator", text(op.to_string()))
        .set("systems", systems_value(op))
        .set("contour", contour_value(c))
        .set("truncation", Value::from(d));
    r
}

fn partition(job: &JobSpec) -> JobResult<Report> {
    let op = operator(job)?;
    let c = contour(job)?;
    let d = truncation(job, &op);
    let src = op.to_string();
    let exact = exact_partition(&op, &c, d).map_err(domain(src.clone()))?;
    let z0 = exact.value;
    let strict = job.method != PartitionMethod::All;
    let mut rows = vec![row("exact", z0, z0)];
    let mut skipped = Vec::new();
    let mut keep = |name: String,
                    res: dequant_core::Result<PartitionResult>,
                    sub: &dyn Fn() -> String| match res {
        Ok(p) => {
            rows.push(row(&name, p.value, z0));
            Ok(())
        }
        Err(e) if strict => Err(JobError::Domain(e, sub())),
        Err(e) => {
            skipped.push((name, format!("{}: {}", e.name(), e.detail())));
            Ok(())
        }
    };
    let mut cutoff = None;
    if matches!(job.method, PartitionMethod::Reduced | PartitionMethod::All) {
        let res = dequantize_extended(&op)
            .and_then(|e| e.to_spectral())
            .and_then(|p| reduced_sum_partition(&p, &c, job.cutoff));
        cutoff = res.as_ref().ok().and_then(|p| p.cutoff);
        keep("reduced_sum".into(), res, &|| {
            offending(&op, |t| {
                dequantize_extended(t).and_then(|e| e.to_spectral())
            })
        })?;
    }
    if matches!(job.method, PartitionMethod::Transfer | PartitionMethod::All) {
        let slices = if job.slices.is_empty() {
            vec![64]
        } else {
            job.slices.clone()
        };
        let kernel = matches!(
            job.mode,
            TransferMode::NormalKernel | TransferMode::DiagonalKernel
        );
        let symbol = if kernel {
            match dequantize_extended(&op).map(|e| e.single_symbol()) {
                Ok(Some(h)) => Some(Ok(h)),
                Ok(None) => Some(Err(Error::Unsupported(format!(
                    "{} transfer needs a single-subsystem operator",
                    job.mode
                )))),
                Err(e) => Some(Err(e)),
            }
        } else {
            None
        };
        let manifold = manifold_for(op.systems()[0]);
        let run_one = |n: Option<usize>| -> dequant_core::Result<PartitionResult> {
            let source = match &symbol {
                None => TransferSource::Operator(&op),
                Some(Ok(h)) => TransferSource::Symbol(h, &manifold),
                Some(Err(e)) => return Err(e.clone()),
            };
            match n {
                Some(n) => transfer_partition(source, &c, n, d, job.mode),
                None => extrapolate_transfer(source, &c, &slices, d, job.mode),
            }
        };
        for &n in &slices {
            keep(
                format!("transfer:{}:N={}", job.mode, n),
                run_one(Some(n)),
                &|| src.clone(),
            )?;
        }
        if slices.len() >= 2 {
            keep(
                format!("transfer:{}:richardson", job.mode),
                run_one(None),
                &|| src.clone(),
            )?;
        }
    }
    let mut r = partition_header("partition", &op, &c, d);
    if let Some(m) = cutoff {
        r.set("cutoff", Value::from(m));
    }
    r.set("rows", Value::Array(rows));
    if !skipped.is_empty() {
        r.set("skipped", skipped_value(&skipped));
    }
    Ok(r)
}

fn compare(job: &JobSpec) -> JobResult<Report> {
    let op = operator(job)?;
    let c = contour(job)?;
    let d = truncation(job, &op);
    let schedule = if job.slices.is_empty() {
        vec![64, 128, 256, 512]
    } else {
        job.slices.clone()
    };
    let table = slicing_compare(&op, &c, &schedule, d).map_err(domain(op.to_string()))?;
    let exact = table.rows[0].value;
    let rows = table
        .rows
        .iter()
        .map(|r| row(&r.method, r.value, exact))
        .collect();
    let mut r = partition_header("slicing-compare", &op, &c, d);
    r.set("rows", Value::Array(rows));
    r.set("skipped", skipped_value(&table.skipped));
    Ok(r)
}

fn gvh(job: &JobSpec) -> JobResult<Report> {
    let report = gvh_obstruction();
    let d = job.truncation.unwrap_or(30);
    if job.guard + 2 > d {
        return Err(JobError::Usage(format!(
            "--guard {} leaves no block inside truncation {}",
            job.guard, d
        )));
    }
    let value = report.residual_value.to_c64();
    let mut r = Report::new("gvh");
    r.set(
        "quadratic_homomorphism_ok",
        Value::Bool(report.quadratic_homomorphism_ok),
    )
    .set("residual_is_scalar", Value::Bool(report.residual_is_scalar))
    .set("residual", text(report.residual_value.to_string()))
    .set("residual_value", complex(value))
    .set(
        "cubic_difference",
        text(report.cubic_difference.to_string()),
    )
    .set("matrix_truncation", Value::from(d))
    .set("matrix_guard", Value::from(job.guard))
    .set(
        "matrix_max_deviation",
        real(gvh_matrix_deviation(d, job.guard, value)),
    );
    Ok(r)
}
