//! Noncentral chi-square distribution: Bessel-form reference density,
//! Laguerre density and distribution series, Poisson-mixture reference
//! distribution function and a seeded sampler.
//!
//! The Laguerre forms are the unified series with `α = 1`, `b = 2`,
//! `β = ν/2 − 1` and `C_n = (−λ/2)^n / n!`; [`series_mapping`] builds that
//! pair for use with [`crate::series`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use crate::error::{domain, Error, Result};
use crate::series::{CoefficientVector, CompensatedSum, SeriesSpec};
use crate::specfun::{bessel_i, fill_laguerre, log_gamma, reg_lower_gamma};

const POISSON_TAIL: f64 = 1e-14;

/// Degrees of freedom `ν > 0` and noncentrality `λ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ncx2Params {
    nu: f64,
    lambda: f64,
}

impl Ncx2Params {
    pub fn new(nu: f64, lambda: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return domain(format!("nu must be finite and > 0, got {nu}"));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return domain(format!("lambda must be finite and >= 0, got {lambda}"));
        }
        Ok(Self { nu, lambda })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mean(&self) -> f64 {
        self.nu + self.lambda
    }

    pub fn variance(&self) -> f64 {
        2.0 * (self.nu + 2.0 * self.lambda)
    }
}

/// The series basis `(1, 2, ν/2 − 1)` and coefficients `(−λ/2)^n/n!` for `n ≤ n_max`.
///
/// Fails when a coefficient overflows, which takes a very large `λ`.
pub fn series_mapping(p: &Ncx2Params, n_max: usize) -> Result<(SeriesSpec, CoefficientVector)> {
    let spec = SeriesSpec::new(1.0, 2.0, p.nu / 2.0 - 1.0).expect("nu > 0 gives beta > -1");
    let mut c = Vec::with_capacity(n_max + 1);
    c.push(1.0);
    for n in 1..=n_max {
        let next = c[n - 1] * (-p.lambda / 2.0) / n as f64;
        if !next.is_finite() {
            return Err(Error::Numerical(format!(
                "coefficient C_{n} overflows for lambda = {}",
                p.lambda
            )));
        }
        c.push(next);
    }
    Ok((spec, CoefficientVector::new(c)?))
}

/// Density from the modified-Bessel closed form (central chi-square form at `λ = 0`).
pub fn ncx2_pdf_reference(p: &Ncx2Params, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("reference density needs finite r > 0, got {r}"));
    }
    let half_nu = p.nu / 2.0;
    if p.lambda == 0.0 {
        let log = (half_nu - 1.0) * r.ln()
            - r / 2.0
            - half_nu * std::f64::consts::LN_2
            - log_gamma(half_nu)?;
        return Ok(log.exp());
    }
    let order = half_nu - 1.0;
    let bessel = bessel_i(order, (p.lambda * r).sqrt())?;
    let log = -(r + p.lambda) / 2.0 - std::f64::consts::LN_2
        + (p.nu / 4.0 - 0.5) * (r.ln() - p.lambda.ln())
        + bessel.ln();
    Ok(log.exp())
}

/// Truncated Laguerre density series, terms `j = 0..=n_max`:
/// `(e^{−r/2}/2)(r/2)^{ν/2−1} Σ_j (−λ/2)^j/Γ(ν/2+j) · L_j^{ν/2−1}(r/2)`.
pub fn ncx2_pdf_series(p: &Ncx2Params, r: f64, n_max: usize) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return domain(format!("r must be >= 0, got {r}"));
    }
    let half_nu = p.nu / 2.0;
    let mu = half_nu - 1.0;
    let x = r / 2.0;
    if r == 0.0 {
        if p.nu > 2.0 {
            return Ok(0.0);
        }
        if p.nu < 2.0 {
            return domain("density is singular at r = 0 for nu < 2");
        }
    }
    let mut laguerre = Vec::with_capacity(n_max + 1);
    fill_laguerre(n_max, mu, x, &mut laguerre);
    // (−λ/2)^j Γ(ν/2)/Γ(ν/2+j)
    let mut weight = 1.0;
    let mut acc = CompensatedSum::default();
    for (j, l) in laguerre.iter().enumerate() {
        if j > 0 {
            weight *= (-p.lambda / 2.0) / (half_nu + (j - 1) as f64);
        }
        acc.add(weight * l);
    }
    let power = if mu == 0.0 { 0.0 } else { mu * x.ln() };
    let log_prefactor = -x - std::f64::consts::LN_2 + power - log_gamma(half_nu)?;
    let value = log_prefactor.exp() * acc.value();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numerical(format!(
            "density series is not finite at r = {r}"
        )))
    }
}

/// The series part and incomplete-gamma part of the Laguerre distribution
/// series, terms `n = 1..=n_max`.
pub fn ncx2_cdf_series_parts(p: &Ncx2Params, r: f64, n_max: usize) -> Result<(f64, f64)> {
    if r.is_nan() || r < 0.0 {
        return domain(format!("R must be >= 0, got {r}"));
    }
    if r == 0.0 {
        return Ok((0.0, 0.0));
    }
    let half_nu = p.nu / 2.0;
    let x = r / 2.0;
    let gamma_part = reg_lower_gamma(half_nu, x)?;
    if n_max == 0 || p.lambda == 0.0 {
        return Ok((0.0, gamma_part));
    }
    let mut laguerre = Vec::with_capacity(n_max);
    fill_laguerre(n_max - 1, half_nu, x, &mut laguerre);
    // v_n = (−λ/2)^n Γ(1+ν/2)/Γ(n+ν/2); term n carries v_n / n.
    let mut v = -p.lambda / 2.0;
    let mut acc = CompensatedSum::default();
    for n in 1..=n_max {
        if n > 1 {
            v *= (-p.lambda / 2.0) / (half_nu + (n - 1) as f64);
        }
        acc.add(v / n as f64 * laguerre[n - 1]);
    }
    let log_prefactor = half_nu * x.ln() - x - log_gamma(half_nu + 1.0)?;
    let series_part = log_prefactor.exp() * acc.value();
    if !series_part.is_finite() {
        return Err(Error::Numerical(format!(
            "distribution series is not finite at R = {r}"
        )));
    }
    Ok((series_part, gamma_part))
}

/// Truncated Laguerre distribution series.
pub fn ncx2_cdf_series(p: &Ncx2Params, r: f64, n_max: usize) -> Result<f64> {
    let (s, g) = ncx2_cdf_series_parts(p, r, n_max)?;
    Ok(s + g)
}

/// Reference distribution function as a Poisson mixture of central
/// chi-square laws: `Σ_k e^{−λ/2}(λ/2)^k/k! · P(ν/2+k, R/2)`.
///
/// Summation starts at the Poisson mode and walks outwards until the
/// remaining weight on each side is below `1e-14`.
pub fn ncx2_cdf_oracle(p: &Ncx2Params, r: f64) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return domain(format!("R must be >= 0, got {r}"));
    }
    let half_nu = p.nu / 2.0;
    let x = r / 2.0;
    if r == 0.0 {
        return Ok(0.0);
    }
    if p.lambda == 0.0 {
        return reg_lower_gamma(half_nu, x);
    }
    let mean = p.lambda / 2.0;
    let mode = mean.floor() as usize;
    let log_weight =
        |k: usize| -mean + k as f64 * mean.ln() - log_gamma(k as f64 + 1.0).unwrap_or(0.0);
    let w_mode = log_weight(mode).exp();

    let mut acc = CompensatedSum::default();
    acc.add(w_mode * reg_lower_gamma(half_nu + mode as f64, x)?);
    let mut covered = w_mode;

    // Upper side: weights decrease geometrically with ratio mean/(k+1) < 1.
    let mut w = w_mode;
    let mut k = mode;
    loop {
        k += 1;
        w *= mean / k as f64;
        if w == 0.0 {
            break;
        }
        acc.add(w * reg_lower_gamma(half_nu + k as f64, x)?);
        covered += w;
        let ratio = mean / (k + 1) as f64;
        if w * ratio / (1.0 - ratio) < POISSON_TAIL {
            break;
        }
    }
    // Lower side.
    let mut w = w_mode;
    let mut k = mode;
    while k > 0 {
        w *= k as f64 / mean;
        k -= 1;
        acc.add(w * reg_lower_gamma(half_nu + k as f64, x)?);
        covered += w;
        let ratio = k as f64 / mean;
        if k == 0 || w * ratio / (1.0 - ratio).max(f64::EPSILON) < POISSON_TAIL {
            break;
        }
    }
    debug_assert!(
        (covered - 1.0).abs() < 1e-9,
        "Poisson weights cover {covered}"
    );
    Ok(acc.value())
}

/// `count` draws: `K ~ Poisson(λ/2)`, then a gamma variate with shape `ν/2 + K` and scale 2.
pub fn ncx2_sample(p: &Ncx2Params, seed: u64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Data("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poisson = if p.lambda > 0.0 {
        Some(Poisson::new(p.lambda / 2.0).map_err(|e| Error::Domain(e.to_string()))?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let k = poisson.as_ref().map_or(0.0, |d| d.sample(&mut rng));
        let gamma = Gamma::new(p.nu / 2.0 + k, 2.0).map_err(|e| Error::Domain(e.to_string()))?;
        out.push(gamma.sample(&mut rng));
    }
    Ok(out)
}
