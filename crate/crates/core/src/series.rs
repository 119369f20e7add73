//! The unified Laguerre-series density and distribution function of a
//! fading envelope `R`, expressed in the power variable `x = r^α / b`.
//!
//! Density:
//!
//! ```text
//! f_R(r) = α / b^(β+1) · r^(α(β+1)−1) · e^(−x) · Σ_{n≥0} C_n · n!/Γ(n+β+1) · L_n^β(x)
//! ```
//!
//! Distribution function (term-by-term integral of the density):
//!
//! ```text
//! F_R(R) = x^(β+1) e^(−x) Σ_{n≥1} C_n · Γ(n)/Γ(n+β+1) · L_{n−1}^{β+1}(x)  +  P(β+1, x)
//! ```
//!
//! The `n = 0` term of the density integrates to the incomplete-gamma part;
//! it cannot be folded into the polynomial sum because `L_{−1}` does not exist.

use crate::error::{domain, Error, Result};
use crate::specfun::{fill_laguerre, log_gamma, reg_lower_gamma};

/// Transform and basis parameters `(α, b, β)` of a series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSpec {
    alpha: f64,
    b: f64,
    beta: f64,
}

impl SeriesSpec {
    pub fn new(alpha: f64, b: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return domain(format!("alpha must be finite and > 0, got {alpha}"));
        }
        if !(b.is_finite() && b > 0.0) {
            return domain(format!("b must be finite and > 0, got {b}"));
        }
        if !(beta.is_finite() && beta > -1.0) {
            return domain(format!("beta must be finite and > -1, got {beta}"));
        }
        Ok(Self { alpha, b, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// True when the density has an integrable singularity at `r = 0`.
    pub fn singular_at_origin(&self) -> bool {
        self.alpha * (self.beta + 1.0) < 1.0
    }
}

/// Expansion coefficients `C_0 .. C_N`, with `C_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    c: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        match c.first() {
            None => return Err(Error::Data("coefficient vector is empty".into())),
            Some(&c0) if c0 != 1.0 => {
                return Err(Error::Data(format!("C_0 must be exactly 1, got {c0}")))
            }
            _ => {}
        }
        if let Some(n) = c.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("C_{n} is not finite")));
        }
        Ok(Self { c })
    }

    /// The single-term series `[1, 0, …, 0]` of length `n_max + 1`.
    pub fn leading_only(n_max: usize) -> Self {
        let mut c = vec![0.0; n_max + 1];
        c[0] = 1.0;
        Self { c }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    /// Highest coefficient index held.
    pub fn capacity(&self) -> usize {
        self.c.len() - 1
    }

    /// A copy keeping `C_0 .. C_n` (or everything, if `n` exceeds the capacity).
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            c: self.c[..=n.min(self.capacity())].to_vec(),
        }
    }
}

/// Outcome of [`choose_truncation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    /// Highest coefficient index to keep.
    pub n_used: usize,
    /// Probe-grid maximum of `|term n_used|` of the distribution series (0 when `n_used = 0`).
    pub last_term_magnitude: f64,
    /// Sum of probe-grid maxima of every discarded term up to the capacity.
    pub tail_estimate: f64,
    pub converged: bool,
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Power variable `x = r^α / b`.
pub fn to_power_variable(r: f64, spec: &SeriesSpec) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return domain(format!("envelope value must be >= 0, got {r}"));
    }
    Ok(r.powf(spec.alpha) / spec.b)
}

/// Truncated series density at envelope value `r`.
pub fn pdf_at(spec: &SeriesSpec, coeffs: &CoefficientVector, r: f64) -> Result<f64> {
    let x = to_power_variable(r, spec)?;
    let exponent = spec.alpha * (spec.beta + 1.0) - 1.0;
    if r == 0.0 {
        if exponent > 0.0 {
            return Ok(0.0);
        }
        if exponent < 0.0 {
            return domain("density is singular at r = 0 when alpha(beta+1) < 1");
        }
    }
    let mut laguerre = Vec::with_capacity(coeffs.c.len());
    fill_laguerre(coeffs.capacity(), spec.beta, x, &mut laguerre);

    // weight_n = n!/Γ(n+β+1) · Γ(β+1), by the ratio n/(n+β).
    let mut weight = 1.0;
    let mut acc = CompensatedSum::default();
    for (n, (&c, &l)) in coeffs.c.iter().zip(&laguerre).enumerate() {
        if n > 0 {
            weight *= n as f64 / (n as f64 + spec.beta);
        }
        acc.add(c * weight * l);
    }
    let log_prefactor =
        spec.alpha.ln() - (spec.beta + 1.0) * spec.b.ln() - x - log_gamma(spec.beta + 1.0)?
            + if exponent == 0.0 {
                0.0
            } else {
                exponent * r.ln()
            };
    let value = log_prefactor.exp() * acc.value();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numerical(format!(
            "density series is not finite at r = {r}"
        )))
    }
}

/// The polynomial-series part and the incomplete-gamma part of the
/// distribution function; their sum is [`cdf_at`].
pub fn cdf_parts(spec: &SeriesSpec, coeffs: &CoefficientVector, r: f64) -> Result<(f64, f64)> {
    let x = to_power_variable(r, spec)?;
    if x == 0.0 {
        return Ok((0.0, 0.0));
    }
    let gamma_part = reg_lower_gamma(spec.beta + 1.0, x)?;
    let series_part = if coeffs.capacity() == 0 {
        0.0
    } else if x.is_infinite() {
        return Err(Error::Numerical(format!(
            "power variable overflows at R = {r}"
        )));
    } else {
        let mut laguerre = Vec::with_capacity(coeffs.c.len());
        fill_laguerre(coeffs.capacity() - 1, spec.beta + 1.0, x, &mut laguerre);
        let sum = series_sum(spec.beta, &coeffs.c, &laguerre);
        let log_prefactor = (spec.beta + 1.0) * x.ln() - x - log_gamma(spec.beta + 2.0)?;
        log_prefactor.exp() * sum
    };
    if !series_part.is_finite() {
        return Err(Error::Numerical(format!(
            "distribution series is not finite at R = {r}"
        )));
    }
    Ok((series_part, gamma_part))
}

// Σ_{n≥1} C_n · Γ(n)Γ(β+2)/Γ(n+β+1) · L_{n−1}^{β+1}(x); `laguerre[k]` holds L_k.
fn series_sum(beta: f64, c: &[f64], laguerre: &[f64]) -> f64 {
    let mut weight = 1.0;
    let mut acc = CompensatedSum::default();
    for n in 1..c.len() {
        if n > 1 {
            let m = (n - 1) as f64;
            weight *= m / (m + beta + 1.0);
        }
        acc.add(c[n] * weight * laguerre[n - 1]);
    }
    acc.value()
}

/// Truncated distribution function. Not clamped: a value outside `[0, 1]`
/// points at a truncation or coefficient problem.
pub fn cdf_at(spec: &SeriesSpec, coeffs: &CoefficientVector, r: f64) -> Result<f64> {
    let (series, gamma) = cdf_parts(spec, coeffs, r)?;
    Ok(series + gamma)
}

/// [`cdf_at`] clamped to `[0, 1]`; the flag is set when clamping changed the value.
pub fn cdf_clamped(spec: &SeriesSpec, coeffs: &CoefficientVector, r: f64) -> Result<(f64, bool)> {
    let raw = cdf_at(spec, coeffs, r)?;
    let clamped = raw.clamp(0.0, 1.0);
    Ok((clamped, clamped != raw))
}

/// Magnitudes `max_x |term n|` of the distribution series for `n = 1..=capacity`
/// over `probes` points of `(0, x_max]`; index 0 of the result is unused (0).
fn term_maxima(
    spec: &SeriesSpec,
    coeffs: &CoefficientVector,
    x_max: f64,
    probes: usize,
) -> Vec<f64> {
    let cap = coeffs.capacity();
    let mut maxima = vec![0.0; cap + 1];
    if cap == 0 || x_max <= 0.0 {
        return maxima;
    }
    let log_g = log_gamma(spec.beta + 2.0).unwrap_or(0.0);
    let mut laguerre = Vec::with_capacity(cap);
    for i in 1..=probes {
        let x = x_max * i as f64 / probes as f64;
        fill_laguerre(cap - 1, spec.beta + 1.0, x, &mut laguerre);
        let prefactor = ((spec.beta + 1.0) * x.ln() - x - log_g).exp();
        let mut weight = 1.0;
        for n in 1..=cap {
            if n > 1 {
                let m = (n - 1) as f64;
                weight *= m / (m + spec.beta + 1.0);
            }
            let term = (prefactor * coeffs.c[n] * weight * laguerre[n - 1]).abs();
            let term = if term.is_nan() { f64::INFINITY } else { term };
            maxima[n] = f64::max(maxima[n], term);
        }
    }
    maxima
}

/// Number of probe points used by [`choose_truncation`].
pub const TRUNCATION_PROBES: usize = 64;
const CONSECUTIVE_SMALL_TERMS: usize = 3;

/// Smallest truncation order whose next three distribution-series terms all
/// stay below `tol` on a probe grid of `(0, x_max]` (power-variable units).
pub fn choose_truncation(
    spec: &SeriesSpec,
    coeffs: &CoefficientVector,
    x_max: f64,
    tol: f64,
) -> TruncationReport {
    let cap = coeffs.capacity();
    let maxima = term_maxima(spec, coeffs, x_max, TRUNCATION_PROBES);
    let small = |n: usize| maxima[n] < tol;
    let found = (0..=cap.saturating_sub(CONSECUTIVE_SMALL_TERMS))
        .take_while(|&n| n + CONSECUTIVE_SMALL_TERMS <= cap)
        .find(|&n| (n + 1..=n + CONSECUTIVE_SMALL_TERMS).all(small));
    let (n_used, converged) = match found {
        Some(n) => (n, true),
        None => (cap, false),
    };
    TruncationReport {
        n_used,
        last_term_magnitude: maxima[n_used],
        tail_estimate: maxima[n_used + 1..].iter().fold(0.0, |acc, t| acc + t),
        converged,
    }
}
