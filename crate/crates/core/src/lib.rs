//! Laguerre polynomial-series representation of small-scale fading envelope
//! distributions.
//!
//! An envelope `R` is mapped to `x = R^α / b` and its density is expanded in
//! generalized Laguerre polynomials `L_n^β(x)` against the weight
//! `x^β e^{−x}`. The expansion coefficients come from envelope moments
//! ([`coefficients`]); the density and distribution function are evaluated
//! by [`series`]. The noncentral chi-square law is worked out in full in
//! [`ncx2`], and [`oracle`] holds the independent checks used to validate
//! everything ([`validation`] bundles them into a runnable suite).

// `!(x > 0.0)` is how NaN gets rejected alongside non-positive values, and
// quadrature tables keep their published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod coefficients;
mod dd;
pub mod error;
pub mod ncx2;
pub mod oracle;
pub mod reference;
pub mod series;
pub mod specfun;
pub mod validation;

pub use coefficients::{
    coefficient, coefficient_vector, empirical_moments, family_moment, fit_spec, parse_samples,
    FamilyParams, MomentProvider,
};
pub use error::{Error, Result};
pub use ncx2::Ncx2Params;
pub use series::{
    cdf_at, cdf_parts, choose_truncation, pdf_at, CoefficientVector, SeriesSpec, TruncationReport,
};
