//! Closed-form envelope densities and distribution functions of the
//! built-in families, used as references for convergence studies.

use crate::coefficients::FamilyParams;
use crate::error::{domain, Error, Result};
use crate::ncx2::{ncx2_cdf_oracle, ncx2_pdf_reference, Ncx2Params};
use crate::specfun::{bessel_i, log_gamma, reg_lower_gamma};

/// For the chi-type families `R² = σ² Y` with `Y` noncentral chi-square.
fn chi_representation(family: &FamilyParams) -> Option<(f64, Ncx2Params)> {
    match *family {
        FamilyParams::Rician { k, omega } => {
            let var = omega / (2.0 * (k + 1.0));
            Some((var, Ncx2Params::new(2.0, 2.0 * k).ok()?))
        }
        FamilyParams::KappaMu { kappa, mu, omega } => {
            let var = omega / (2.0 * mu * (1.0 + kappa));
            Some((var, Ncx2Params::new(2.0 * mu, 2.0 * mu * kappa).ok()?))
        }
        _ => None,
    }
}

/// Closed-form density of the envelope at `r > 0`.
pub fn family_pdf(family: &FamilyParams, r: f64) -> Result<f64> {
    family.validate()?;
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("reference density needs finite r > 0, got {r}"));
    }
    if let Some((var, chi)) = chi_representation(family) {
        return Ok(ncx2_pdf_reference(&chi, r * r / var)? * 2.0 * r / var);
    }
    let value = match *family {
        FamilyParams::Rayleigh { omega } => 2.0 * r / omega * (-r * r / omega).exp(),
        FamilyParams::Weibull { shape, scale } => {
            let z = r / scale;
            shape / scale * z.powf(shape - 1.0) * (-z.powf(shape)).exp()
        }
        FamilyParams::NakagamiM { m, omega } => {
            let log = std::f64::consts::LN_2 + m * (m / omega).ln() + (2.0 * m - 1.0) * r.ln()
                - m * r * r / omega
                - log_gamma(m)?;
            log.exp()
        }
        FamilyParams::AlphaMu { alpha, mu, r_hat } => {
            let z = r / r_hat;
            let log = alpha.ln() + mu * mu.ln() + (alpha * mu - 1.0) * z.ln()
                - r_hat.ln()
                - mu * z.powf(alpha)
                - log_gamma(mu)?;
            log.exp()
        }
        FamilyParams::Hoyt { q, omega } => {
            let q2 = q * q;
            let z = (1.0 - q2 * q2) * r * r / (4.0 * q2 * omega);
            let log = ((1.0 + q2) * r / (q * omega)).ln()
                - (1.0 + q2) * (1.0 + q2) * r * r / (4.0 * q2 * omega)
                + bessel_i(0.0, z)?.ln();
            log.exp()
        }
        FamilyParams::Ncx2 { nu, lambda } => ncx2_pdf_reference(&Ncx2Params::new(nu, lambda)?, r)?,
        FamilyParams::Rician { .. } | FamilyParams::KappaMu { .. } => unreachable!(),
    };
    Ok(value)
}

/// Closed-form (or Poisson-mixture) distribution function, where one exists.
///
/// The Hoyt family has none here; use quadrature of [`family_pdf`] instead.
pub fn family_cdf(family: &FamilyParams, r: f64) -> Result<f64> {
    family.validate()?;
    if r.is_nan() || r < 0.0 {
        return domain(format!("R must be >= 0, got {r}"));
    }
    if let Some((var, chi)) = chi_representation(family) {
        return ncx2_cdf_oracle(&chi, r * r / var);
    }
    match *family {
        FamilyParams::Rayleigh { omega } => Ok(-(-r * r / omega).exp_m1()),
        FamilyParams::Weibull { shape, scale } => Ok(-(-(r / scale).powf(shape)).exp_m1()),
        FamilyParams::NakagamiM { m, omega } => reg_lower_gamma(m, m * r * r / omega),
        FamilyParams::AlphaMu { alpha, mu, r_hat } => {
            reg_lower_gamma(mu, mu * (r / r_hat).powf(alpha))
        }
        FamilyParams::Ncx2 { nu, lambda } => ncx2_cdf_oracle(&Ncx2Params::new(nu, lambda)?, r),
        FamilyParams::Hoyt { .. } => Err(Error::Capability(
            "no closed-form distribution function for the hoyt family".into(),
        )),
        FamilyParams::Rician { .. } | FamilyParams::KappaMu { .. } => unreachable!(),
    }
}
