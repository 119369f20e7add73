//! Distribution spec documents (JSON) and their resolution into a series.

use std::path::{Path, PathBuf};

use fading_laguerre::coefficients::{
    coefficient_estimates, empirical_moments, fit_spec, parse_samples, FamilyParams, MomentProvider,
};
use fading_laguerre::ncx2::{series_mapping, Ncx2Params};
use fading_laguerre::{CoefficientVector, SeriesSpec};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_N_MAX: usize = 64;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Largest accepted coefficient capacity and grid size.
pub const MAX_N_MAX: usize = 256;
pub const MAX_GRID_COUNT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Family {
        family: FamilyParams,
    },
    /// Sample file, one value per line; relative paths resolve against the document's directory.
    Empirical {
        path: PathBuf,
        alpha: f64,
    },
    Ncx2Mapping {
        nu: f64,
        lambda: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDoc {
    pub alpha: f64,
    pub b: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDoc {
    pub source: Source,
    #[serde(default)]
    pub series: Option<SeriesDoc>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub n_max: Option<usize>,
    pub grid: Grid,
}

fn spec_error(msg: impl Into<String>) -> CliError {
    CliError::Spec(msg.into())
}

fn invalid(e: fading_laguerre::Error) -> CliError {
    CliError::Spec(e.to_string())
}

impl SpecDoc {
    /// Parses and checks a document without touching the file system.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let doc: SpecDoc = serde_json::from_str(text).map_err(|e| spec_error(e.to_string()))?;
        doc.check()?;
        Ok(doc)
    }

    fn check(&self) -> Result<(), CliError> {
        let g = self.grid;
        if g.count < 2 || g.count > MAX_GRID_COUNT {
            return Err(spec_error(format!(
                "grid count must lie in [2, {MAX_GRID_COUNT}], got {}",
                g.count
            )));
        }
        if !(g.min.is_finite() && g.max.is_finite() && g.min >= 0.0 && g.max > g.min) {
            return Err(spec_error(format!(
                "grid needs finite 0 <= min < max, got [{}, {}]",
                g.min, g.max
            )));
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(spec_error(format!(
                    "tolerance must be finite and > 0, got {t}"
                )));
            }
        }
        if self.n_max.is_some_and(|n| n > MAX_N_MAX) {
            return Err(spec_error(format!("n_max above the supported {MAX_N_MAX}")));
        }
        match &self.source {
            Source::Family { family } => family.validate().map_err(invalid)?,
            Source::Empirical { alpha, .. } => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(spec_error(format!(
                        "alpha must be finite and > 0, got {alpha}"
                    )));
                }
            }
            Source::Ncx2Mapping { nu, lambda } => {
                Ncx2Params::new(*nu, *lambda).map_err(invalid)?;
                if self.series.is_some() {
                    return Err(spec_error(
                        "the ncx2 mapping fixes the series basis; drop \"series\"",
                    ));
                }
            }
        }
        if let Some(s) = self.series {
            SeriesSpec::new(s.alpha, s.b, s.beta).map_err(invalid)?;
        }
        Ok(())
    }

    pub fn n_max(&self) -> usize {
        self.n_max.unwrap_or(DEFAULT_N_MAX)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(DEFAULT_TOLERANCE)
    }
}

/// A document turned into a concrete basis and coefficient vector.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub spec: SeriesSpec,
    /// Coefficients up to the capacity that passed the cancellation check.
    pub coeffs: CoefficientVector,
    pub warnings: Vec<String>,
}

fn read_samples(path: &Path, base: Option<&Path>) -> Result<Vec<f64>, CliError> {
    let full = match base {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    };
    let text = std::fs::read_to_string(&full)
        .map_err(|e| CliError::Io(format!("cannot read sample file {}: {e}", full.display())))?;
    Ok(parse_samples(&text)?)
}

/// Provider, basis and coefficient capacity for a moment-based source.
fn moment_series(
    provider: MomentProvider,
    alpha: f64,
    explicit: Option<SeriesDoc>,
    n_max: usize,
) -> Result<Resolved, CliError> {
    let spec = match explicit {
        Some(s) => SeriesSpec::new(s.alpha, s.b, s.beta)?,
        None => fit_spec(&provider, alpha)?,
    };
    let estimates = coefficient_estimates(&provider, &spec, n_max)?;
    let mut warnings = Vec::new();
    let usable = estimates
        .iter()
        .position(|e| e.unreliable())
        .unwrap_or(estimates.len());
    if usable < estimates.len() {
        warnings.push(format!(
            "coefficient C_{usable} lost too many digits to cancellation; capacity reduced to {}",
            usable - 1
        ));
    }
    let coeffs = CoefficientVector::new(estimates[..usable].iter().map(|e| e.value).collect())?;
    Ok(Resolved {
        spec,
        coeffs,
        warnings,
    })
}

/// Builds the series. `base` is the directory relative sample paths resolve against.
pub fn resolve(doc: &SpecDoc, base: Option<&Path>) -> Result<Resolved, CliError> {
    let n_max = doc.n_max();
    match &doc.source {
        Source::Family { family } => {
            let provider = MomentProvider::family(*family, n_max.max(2))?;
            if let Some(s) = doc.series {
                if s.alpha != family.natural_alpha() {
                    return Err(spec_error(format!(
                        "{} moments are provided for alpha = {}, series asks for {}",
                        family.name(),
                        family.natural_alpha(),
                        s.alpha
                    )));
                }
            }
            moment_series(provider, family.natural_alpha(), doc.series, n_max)
        }
        Source::Empirical { path, alpha } => {
            let samples = read_samples(path, base)?;
            let provider = empirical_moments(&samples, *alpha, n_max.max(2))?;
            if let Some(s) = doc.series {
                if s.alpha != *alpha {
                    return Err(spec_error(format!(
                        "series alpha {} differs from the sample alpha {alpha}",
                        s.alpha
                    )));
                }
            }
            moment_series(provider, *alpha, doc.series, n_max)
        }
        Source::Ncx2Mapping { nu, lambda } => {
            let p = Ncx2Params::new(*nu, *lambda)?;
            let (spec, coeffs) = series_mapping(&p, n_max).map_err(invalid)?;
            Ok(Resolved {
                spec,
                coeffs,
                warnings: Vec::new(),
            })
        }
    }
}
