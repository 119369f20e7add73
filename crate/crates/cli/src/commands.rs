//! The four subcommands.

use std::io::Read;
use std::path::{Path, PathBuf};

use fading_laguerre::coefficients::{
    coefficient_estimates, empirical_moments, fit_spec, parse_samples, FamilyParams,
    MomentProvider, DEFAULT_FAMILY_K_MAX,
};
use fading_laguerre::ncx2::{ncx2_cdf_oracle, ncx2_pdf_reference, Ncx2Params};
use fading_laguerre::oracle::integrate;
use fading_laguerre::reference::{family_cdf, family_pdf};
use fading_laguerre::series::{cdf_parts, choose_truncation, pdf_at, to_power_variable};
use fading_laguerre::validation::{self, Bound, Fault, Level, ValidationConfig};
use fading_laguerre::{CoefficientVector, Error};
use serde_json::{json, Map, Value};

use crate::doc::{resolve, Resolved, Source, SpecDoc};
use crate::output::{csv_line, json_num, num};
use crate::{Cli, CliError, Command, FaultArg, Format, LevelArg, Outcome, ReferenceKind};

const REFERENCE_QUADRATURE_TOL: f64 = 1e-13;

pub fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    if let Some(t) = cli.common.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Usage(format!(
                "--tol must be finite and > 0, got {t}"
            )));
        }
    }
    let format = cli.common.format;
    match &cli.command {
        Command::Eval { spec } => {
            let (doc, base) = load_doc(spec.as_deref(), stdin)?;
            eval(
                &doc,
                base.as_deref(),
                cli.common.tol,
                format.unwrap_or(Format::Csv),
            )
        }
        Command::Fit {
            family,
            params,
            samples,
            alpha,
            n_max,
        } => {
            let out = match (family, samples) {
                (Some(name), _) => fit_family(&family_from_args(name, params)?, *alpha, *n_max)?,
                (None, Some(path)) => {
                    let alpha =
                        alpha.ok_or_else(|| CliError::Usage("--samples needs --alpha".into()))?;
                    fit_samples(path, alpha, *n_max)?
                }
                (None, None) => {
                    return Err(CliError::Usage("fit needs --family or --samples".into()))
                }
            };
            Ok(done(
                out.render(format.unwrap_or(Format::Json)),
                String::new(),
                0,
            ))
        }
        Command::Converge {
            spec,
            n_list,
            reference,
        } => {
            let (doc, base) = load_doc(spec.as_deref(), stdin)?;
            converge(
                &doc,
                base.as_deref(),
                n_list,
                *reference,
                format.unwrap_or(Format::Csv),
            )
        }
        Command::Validate {
            level,
            inject_fault,
        } => {
            let mut config = ValidationConfig {
                level: match level {
                    LevelArg::Quick => Level::Quick,
                    LevelArg::Full => Level::Full,
                },
                fault: inject_fault.map(|FaultArg::DropGammaTerm| Fault::DropGammaTerm),
                ..ValidationConfig::default()
            };
            if let Some(seed) = cli.common.seed {
                config.seed = seed;
            }
            Ok(validate(config, format))
        }
    }
}

fn done(stdout: String, stderr: String, code: u8) -> Outcome {
    Outcome {
        stdout,
        stderr,
        code,
    }
}

fn warnings_text(warnings: &[String]) -> String {
    warnings.iter().map(|w| format!("warning: {w}\n")).collect()
}

/// Reads a distribution document from `path` or standard input; returns it with
/// the directory relative sample paths resolve against.
fn load_doc(
    path: Option<&Path>,
    stdin: &mut dyn Read,
) -> Result<(SpecDoc, Option<PathBuf>), CliError> {
    match path {
        Some(p) if p != Path::new("-") => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::Io(format!("cannot read spec document {}: {e}", p.display()))
            })?;
            let base = p.parent().map(Path::to_path_buf);
            Ok((SpecDoc::from_json(&text)?, base))
        }
        _ => {
            let mut text = String::new();
            stdin
                .read_to_string(&mut text)
                .map_err(|e| CliError::Io(format!("cannot read standard input: {e}")))?;
            Ok((SpecDoc::from_json(&text)?, std::env::current_dir().ok()))
        }
    }
}

/// `KEY=VALUE` pairs into family parameters.
pub fn family_from_args(name: &str, params: &[String]) -> Result<FamilyParams, CliError> {
    let mut object = Map::new();
    object.insert("name".into(), Value::String(name.to_string()));
    for p in params {
        let (key, value) = p
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--param expects KEY=VALUE, got {p:?}")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--param {key}: not a number: {value:?}")))?;
        let number = serde_json::Number::from_f64(v)
            .ok_or_else(|| CliError::Usage(format!("--param {key}: value must be finite")))?;
        if object
            .insert(key.trim().to_string(), Value::Number(number))
            .is_some()
        {
            return Err(CliError::Usage(format!("--param {key} given twice")));
        }
    }
    let family: FamilyParams = serde_json::from_value(Value::Object(object))
        .map_err(|e| CliError::Usage(format!("family {name}: {e}")))?;
    family
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(family)
}

/// Truncates to the smallest order whose dropped terms stay below `tol`
/// over the grid's power-variable range.
fn truncate(
    resolved: &Resolved,
    grid_max: f64,
    tol: f64,
) -> Result<(CoefficientVector, Vec<String>), CliError> {
    let x_max = to_power_variable(grid_max, &resolved.spec)?;
    let report = choose_truncation(&resolved.spec, &resolved.coeffs, x_max, tol);
    // A capacity cap only matters when the series ran out of terms.
    let mut warnings = Vec::new();
    if !report.converged {
        warnings.extend(resolved.warnings.iter().cloned());
        warnings.push(format!(
            "series did not reach tolerance {tol:e} within {} terms; last term {:e}",
            resolved.coeffs.capacity(),
            report.last_term_magnitude
        ));
    }
    Ok((resolved.coeffs.truncated(report.n_used), warnings))
}

fn eval(
    doc: &SpecDoc,
    base: Option<&Path>,
    tol: Option<f64>,
    format: Format,
) -> Result<Outcome, CliError> {
    let resolved = resolve(doc, base)?;
    let (coeffs, warnings) = truncate(&resolved, doc.grid.max, tol.unwrap_or(doc.tolerance()))?;
    let spec = &resolved.spec;
    let mut rows = Vec::with_capacity(doc.grid.count);
    for r in doc.grid.points() {
        let pdf = match pdf_at(spec, &coeffs, r) {
            Ok(v) => v,
            // Integrable singularity at the origin.
            Err(Error::Domain(_)) if r == 0.0 && spec.singular_at_origin() => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        let (series, gamma) = cdf_parts(spec, &coeffs, r)?;
        rows.push([r, pdf, series + gamma, series, gamma]);
    }
    let stdout = match format {
        Format::Csv => {
            let mut out = csv_line(&["r", "pdf", "cdf", "series_part", "gamma_part"]);
            for row in &rows {
                out += &csv_line(&row.map(num));
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|[r, pdf, cdf, series, gamma]| {
                    json!({"r": r, "pdf": json_num(*pdf), "cdf": cdf, "series_part": series, "gamma_part": gamma})
                })
                .collect();
            let value = json!({
                "alpha": spec.alpha(), "b": spec.b(), "beta": spec.beta(),
                "n_used": coeffs.capacity(),
                "rows": rows,
            });
            serde_json::to_string_pretty(&value).expect("serializable") + "\n"
        }
    };
    Ok(done(stdout, warnings_text(&warnings), 0))
}

/// Fitted basis and coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOutput {
    pub alpha: f64,
    pub b: f64,
    pub beta: f64,
    pub coefficients: Vec<f64>,
    pub cancellation_flags: Vec<bool>,
}

impl FitOutput {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let value = json!({
                    "alpha": self.alpha,
                    "b": self.b,
                    "beta": self.beta,
                    "coefficients": self.coefficients.iter().map(|&c| json_num(c)).collect::<Vec<_>>(),
                    "cancellation_flags": self.cancellation_flags,
                });
                serde_json::to_string_pretty(&value).expect("serializable") + "\n"
            }
            Format::Csv => {
                let mut out = csv_line(&[
                    "alpha",
                    "b",
                    "beta",
                    "n",
                    "coefficient",
                    "cancellation_flag",
                ]);
                for (n, (c, flag)) in self
                    .coefficients
                    .iter()
                    .zip(&self.cancellation_flags)
                    .enumerate()
                {
                    out += &csv_line(&[
                        num(self.alpha),
                        num(self.b),
                        num(self.beta),
                        n.to_string(),
                        num(*c),
                        flag.to_string(),
                    ]);
                }
                out
            }
        }
    }
}

fn fit_with(provider: &MomentProvider, alpha: f64, n_max: usize) -> Result<FitOutput, CliError> {
    let spec = fit_spec(provider, alpha)?;
    let estimates = coefficient_estimates(provider, &spec, n_max)?;
    Ok(FitOutput {
        alpha: spec.alpha(),
        b: spec.b(),
        beta: spec.beta(),
        coefficients: estimates.iter().map(|e| e.value).collect(),
        cancellation_flags: estimates.iter().map(|e| e.unreliable()).collect(),
    })
}

pub fn fit_family(
    family: &FamilyParams,
    alpha: Option<f64>,
    n_max: usize,
) -> Result<FitOutput, CliError> {
    let natural = family.natural_alpha();
    if alpha.is_some_and(|a| a != natural) {
        return Err(CliError::Usage(format!(
            "{} moments are available for alpha = {natural} only",
            family.name()
        )));
    }
    let provider = MomentProvider::family(*family, n_max.clamp(2, DEFAULT_FAMILY_K_MAX))?;
    fit_with(&provider, natural, n_max)
}

pub fn fit_samples(path: &Path, alpha: f64, n_max: usize) -> Result<FitOutput, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read sample file {}: {e}", path.display())))?;
    let samples = parse_samples(&text)?;
    let provider = empirical_moments(&samples, alpha, n_max.max(2))?;
    fit_with(&provider, alpha, n_max)
}

type Evaluator = Box<dyn Fn(f64) -> fading_laguerre::Result<f64>>;

/// Reference distribution function on a sorted grid.
fn reference_values(
    source: &Source,
    kind: ReferenceKind,
    grid: &[f64],
) -> Result<Vec<f64>, CliError> {
    let (cdf, pdf): (Evaluator, Evaluator) = match *source {
        Source::Family { family } => (
            Box::new(move |r| family_cdf(&family, r)),
            Box::new(move |r| family_pdf(&family, r)),
        ),
        Source::Ncx2Mapping { nu, lambda } => {
            let p = Ncx2Params::new(nu, lambda)?;
            (
                Box::new(move |r| ncx2_cdf_oracle(&p, r)),
                Box::new(move |r| ncx2_pdf_reference(&p, r)),
            )
        }
        Source::Empirical { .. } => {
            return Err(CliError::Usage(
                "an empirical source has no reference distribution".into(),
            ))
        }
    };
    match kind {
        ReferenceKind::Oracle => grid
            .iter()
            .map(|&r| {
                cdf(r).map_err(|e| match e {
                    Error::Capability(m) => {
                        CliError::Usage(format!("{m}; try --reference quadrature"))
                    }
                    other => other.into(),
                })
            })
            .collect(),
        ReferenceKind::Quadrature => {
            let mut out = Vec::with_capacity(grid.len());
            let (mut lo, mut acc) = (0.0, 0.0);
            for &r in grid {
                acc += integrate(
                    |t| pdf(t).unwrap_or(f64::NAN),
                    lo,
                    r,
                    REFERENCE_QUADRATURE_TOL,
                )?
                .value;
                lo = r;
                out.push(acc);
            }
            Ok(out)
        }
    }
}

fn converge(
    doc: &SpecDoc,
    base: Option<&Path>,
    n_list: &[usize],
    kind: ReferenceKind,
    format: Format,
) -> Result<Outcome, CliError> {
    let resolved = resolve(doc, base)?;
    let grid = doc.grid.points();
    let reference = reference_values(&doc.source, kind, &grid)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n > resolved.coeffs.capacity() {
            return Err(CliError::Usage(format!(
                "N = {n} exceeds the coefficient capacity {}",
                resolved.coeffs.capacity()
            )));
        }
        let coeffs = resolved.coeffs.truncated(n);
        let mut worst: f64 = 0.0;
        for (&r, &want) in grid.iter().zip(&reference) {
            let (series, gamma) = cdf_parts(&resolved.spec, &coeffs, r)?;
            worst = worst.max((series + gamma - want).abs());
        }
        rows.push((n, worst));
    }
    let stdout = match format {
        Format::Csv => {
            let mut out = csv_line(&["N", "max_abs_cdf_error"]);
            for (n, e) in &rows {
                out += &csv_line(&[n.to_string(), num(*e)]);
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(n, e)| json!({"N": n, "max_abs_cdf_error": e}))
                .collect();
            serde_json::to_string_pretty(&rows).expect("serializable") + "\n"
        }
    };
    Ok(done(stdout, warnings_text(&resolved.warnings), 0))
}

fn validate(config: ValidationConfig, format: Option<Format>) -> Outcome {
    let report = validation::run(config);
    let code = if report.all_passed() { 0 } else { 1 };
    let bound_parts = |b: Bound| match b {
        Bound::AtMost(v) => ("at_most", v),
        Bound::AtLeast(v) => ("at_least", v),
    };
    let stdout = match format {
        None => format!("{report}\n"),
        Some(Format::Csv) => {
            let mut out = csv_line(&["check", "measured", "bound_kind", "bound", "passed"]);
            for o in &report.outcomes {
                let (kind, bound) = bound_parts(o.bound);
                out += &csv_line(&[
                    o.name.to_string(),
                    num(o.measured),
                    kind.into(),
                    num(bound),
                    o.passed.to_string(),
                ]);
            }
            out
        }
        Some(Format::Json) => {
            let rows: Vec<Value> = report
                .outcomes
                .iter()
                .map(|o| {
                    let (kind, bound) = bound_parts(o.bound);
                    json!({
                        "check": o.name, "measured": json_num(o.measured), "bound_kind": kind,
                        "bound": json_num(bound), "passed": o.passed, "detail": o.detail,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&rows).expect("serializable") + "\n"
        }
    };
    let stderr = report
        .failed()
        .map(|o| format!("failed check: {}\n", o.name))
        .collect();
    done(stdout, stderr, code)
}
