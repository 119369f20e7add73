//! Expansion coefficients from envelope moments.
//!
//! With `X = R^α / b` the coefficients are `C_n = E[L_n^β(X)]`, which the
//! finite-sum form of the Laguerre polynomial turns into
//!
//! ```text
//! C_n = Σ_{k=0..n} C(n+β, n−k) · (−1)^k / k! · E_R[R^{αk}] / b^k
//! ```
//!
//! The sum alternates and cancels by many orders of magnitude once `n`
//! grows, so moments, weights and the accumulation are all carried in
//! double-double arithmetic.

use crate::dd::DoubleDouble as Dd;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::series::{CoefficientVector, SeriesSpec};

/// Coefficients whose largest summand exceeds `max(|C_n|, 1)` by more than
/// this factor are reported as unreliable.
pub const CANCELLATION_LIMIT: f64 = 1e12;

/// Default largest moment order served by a closed-form provider.
pub const DEFAULT_FAMILY_K_MAX: usize = 256;

const ALPHA_MATCH_REL: f64 = 1e-12;

/// Fading envelope families with closed-form power moments.
///
/// Each family is bound to one transform exponent, see [`FamilyParams::natural_alpha`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyParams {
    Rayleigh {
        omega: f64,
    },
    Weibull {
        shape: f64,
        scale: f64,
    },
    NakagamiM {
        m: f64,
        omega: f64,
    },
    /// `alpha`, `mu` and the α-root mean value `r_hat`.
    AlphaMu {
        alpha: f64,
        mu: f64,
        r_hat: f64,
    },
    Hoyt {
        q: f64,
        omega: f64,
    },
    Rician {
        k: f64,
        omega: f64,
    },
    KappaMu {
        kappa: f64,
        mu: f64,
        omega: f64,
    },
    /// Noncentral chi-square with `nu` degrees of freedom and noncentrality `lambda`.
    Ncx2 {
        nu: f64,
        lambda: f64,
    },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        domain(format!("{name} must be finite and > 0, got {v}"))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        domain(format!("{name} must be finite and >= 0, got {v}"))
    }
}

impl FamilyParams {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilyParams::Rayleigh { omega } => positive("omega", omega),
            FamilyParams::Weibull { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)
            }
            FamilyParams::NakagamiM { m, omega } => {
                positive("m", m)?;
                positive("omega", omega)
            }
            FamilyParams::AlphaMu { alpha, mu, r_hat } => {
                positive("alpha", alpha)?;
                positive("mu", mu)?;
                positive("r_hat", r_hat)
            }
            FamilyParams::Hoyt { q, omega } => {
                if !(q.is_finite() && q > 0.0 && q <= 1.0) {
                    return domain(format!("q must lie in (0, 1], got {q}"));
                }
                positive("omega", omega)
            }
            FamilyParams::Rician { k, omega } => {
                non_negative("k", k)?;
                positive("omega", omega)
            }
            FamilyParams::KappaMu { kappa, mu, omega } => {
                non_negative("kappa", kappa)?;
                positive("mu", mu)?;
                positive("omega", omega)
            }
            FamilyParams::Ncx2 { nu, lambda } => {
                positive("nu", nu)?;
                non_negative("lambda", lambda)
            }
        }
    }

    /// The transform exponent whose power moments are elementary for this family.
    pub fn natural_alpha(&self) -> f64 {
        match *self {
            FamilyParams::Weibull { shape, .. } => shape,
            FamilyParams::AlphaMu { alpha, .. } => alpha,
            FamilyParams::Ncx2 { .. } => 1.0,
            _ => 2.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyParams::Rayleigh { .. } => "rayleigh",
            FamilyParams::Weibull { .. } => "weibull",
            FamilyParams::NakagamiM { .. } => "nakagami_m",
            FamilyParams::AlphaMu { .. } => "alpha_mu",
            FamilyParams::Hoyt { .. } => "hoyt",
            FamilyParams::Rician { .. } => "rician",
            FamilyParams::KappaMu { .. } => "kappa_mu",
            FamilyParams::Ncx2 { .. } => "ncx2",
        }
    }

    /// `E_R[R^{αk}]` at the natural exponent, in double-double.
    fn moment_dd(&self, k: usize) -> Dd {
        let one = Dd::ONE;
        if k == 0 {
            return one;
        }
        match *self {
            FamilyParams::Rayleigh { omega } => Dd::from(omega).powi(k) * factorial(k),
            FamilyParams::Weibull { shape, scale } => {
                Dd::from(scale.powf(shape)).powi(k) * factorial(k)
            }
            FamilyParams::NakagamiM { m, omega } => {
                (Dd::from(omega) / m).powi(k) * rising(Dd::from(m), k)
            }
            FamilyParams::AlphaMu { alpha, mu, r_hat } => {
                (Dd::from(r_hat.powf(alpha)) / mu).powi(k) * rising(Dd::from(mu), k)
            }
            FamilyParams::Hoyt { q, omega } => {
                let denom = Dd::ONE + Dd::from(q) * q;
                let var_x = Dd::from(omega) / denom;
                let var_y = var_x * q * q;
                let mut acc = Dd::ZERO;
                let mut binom = one;
                for j in 0..=k {
                    if j > 0 {
                        binom = binom * ((k - j + 1) as f64) / (j as f64);
                    }
                    acc += binom
                        * var_x.powi(j)
                        * double_factorial_odd(j)
                        * var_y.powi(k - j)
                        * double_factorial_odd(k - j);
                }
                acc
            }
            FamilyParams::Rician { k: rice_k, omega } => {
                let var = Dd::from(omega) / (Dd::from(2.0) * (Dd::from(rice_k) + 1.0));
                var.powi(k) * ncx2_raw_moment_dd(Dd::from(2.0), Dd::from(2.0) * rice_k, k)
            }
            FamilyParams::KappaMu { kappa, mu, omega } => {
                let two_mu = Dd::from(2.0) * mu;
                let var = Dd::from(omega) / (two_mu * (Dd::from(kappa) + 1.0));
                var.powi(k) * ncx2_raw_moment_dd(two_mu, two_mu * kappa, k)
            }
            FamilyParams::Ncx2 { nu, lambda } => {
                ncx2_raw_moment_dd(Dd::from(nu), Dd::from(lambda), k)
            }
        }
    }
}

fn factorial(k: usize) -> Dd {
    (1..=k).fold(Dd::ONE, |acc, i| acc * i as f64)
}

/// Rising factorial `a (a+1) … (a+k−1)`.
fn rising(a: Dd, k: usize) -> Dd {
    (0..k).fold(Dd::ONE, |acc, i| acc * (a + i as f64))
}

/// `(2j−1)!!`, the `2j`-th moment of a standard normal.
fn double_factorial_odd(j: usize) -> Dd {
    (1..=j).fold(Dd::ONE, |acc, i| acc * (2 * i - 1) as f64)
}

/// Raw moment `E[Y^k]` of a noncentral chi-square variable,
/// `2^k Σ_j C(k,j) (λ/2)^j Γ(ν/2+k)/Γ(ν/2+j)`.
fn ncx2_raw_moment_dd(nu: Dd, lambda: Dd, k: usize) -> Dd {
    let half_nu = nu / 2.0;
    let half_lambda = lambda / 2.0;
    let mut acc = Dd::ZERO;
    let mut binom = Dd::ONE;
    for j in 0..=k {
        if j > 0 {
            binom = binom * ((k - j + 1) as f64) / (j as f64);
        }
        // Γ(ν/2+k)/Γ(ν/2+j) = (ν/2+j)(ν/2+j+1)…(ν/2+k−1)
        let ratio = rising(half_nu + j as f64, k - j);
        acc += binom * half_lambda.powi(j) * ratio;
    }
    acc * Dd::from(2.0).powi(k)
}

/// Closed-form `E_R[R^{αk}]` for a family at its natural exponent.
pub fn family_moment(family: &FamilyParams, alpha: f64, k: usize) -> Result<f64> {
    family.validate()?;
    check_pairing(family, alpha)?;
    finite_moment(family.moment_dd(k), k)
}

fn check_pairing(family: &FamilyParams, alpha: f64) -> Result<()> {
    let natural = family.natural_alpha();
    if (alpha - natural).abs() > ALPHA_MATCH_REL * natural {
        return Err(Error::Capability(format!(
            "{} moments are provided for alpha = {natural}, not {alpha}",
            family.name()
        )));
    }
    Ok(())
}

fn finite_moment(m: Dd, k: usize) -> Result<f64> {
    let v = m.to_f64();
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Numerical(format!(
            "moment of order {k} is not a positive finite number"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum MomentSource {
    Family(FamilyParams),
    Empirical(Vec<Dd>),
}

/// A source of envelope moments `k ↦ E_R[R^{αk}]` for `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentProvider {
    source: MomentSource,
    alpha: f64,
    k_max: usize,
}

impl MomentProvider {
    /// Closed-form moments of `family` at its natural exponent.
    pub fn family(family: FamilyParams, k_max: usize) -> Result<Self> {
        family.validate()?;
        Ok(Self {
            source: MomentSource::Family(family),
            alpha: family.natural_alpha(),
            k_max,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn moment(&self, k: usize) -> Result<f64> {
        finite_moment(self.moment_dd(k)?, k)
    }

    fn moment_dd(&self, k: usize) -> Result<Dd> {
        if k > self.k_max {
            return Err(Error::Capability(format!(
                "moment order {k} exceeds the provider limit {}",
                self.k_max
            )));
        }
        Ok(match &self.source {
            MomentSource::Family(f) => f.moment_dd(k),
            MomentSource::Empirical(m) => m[k],
        })
    }
}

/// Sample moments `mean(r^{αk})` for `k = 0..=k_max`.
pub fn empirical_moments(samples: &[f64], alpha: f64, k_max: usize) -> Result<MomentProvider> {
    if samples.is_empty() {
        return Err(Error::Data("no samples".into()));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return domain(format!("alpha must be finite and > 0, got {alpha}"));
    }
    if let Some((i, v)) = samples
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
    {
        return Err(Error::Data(format!(
            "sample {i} is not a finite nonnegative value: {v}"
        )));
    }
    let mut sums = vec![Dd::ZERO; k_max + 1];
    for &r in samples {
        let v = Dd::from(r.powf(alpha));
        let mut p = Dd::ONE;
        for s in sums.iter_mut() {
            *s += p;
            p *= v;
        }
    }
    let n = samples.len() as f64;
    let mut moments: Vec<Dd> = sums.into_iter().map(|s| s / n).collect();
    moments[0] = Dd::ONE;
    Ok(MomentProvider {
        source: MomentSource::Empirical(moments),
        alpha,
        k_max,
    })
}

/// Parse a sample file: one nonnegative decimal per line, blank lines and
/// lines starting with `#` ignored.
pub fn parse_samples(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::Data(format!("line {}: not a number: {line:?}", idx + 1)))?;
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Data(format!(
                "line {}: sample must be finite and >= 0",
                idx + 1
            )));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Data("sample file holds no values".into()));
    }
    Ok(out)
}

/// How envelope moments are converted into moments of the power variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentScaling {
    /// `E[X^k] = E_R[R^{αk}] / b^k`.
    Corrected,
    /// `E[X^k] = E_R[R^{αk}] / b`, the misprinted relation; kept to show it
    /// gives wrong coefficients.
    Misprinted,
}

/// A coefficient together with its cancellation diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientEstimate {
    pub value: f64,
    /// Largest summand magnitude over `max(|C_n|, 1)`.
    pub cancellation_ratio: f64,
}

impl CoefficientEstimate {
    pub fn unreliable(&self) -> bool {
        !(self.cancellation_ratio <= CANCELLATION_LIMIT)
    }
}

fn check_provider(provider: &MomentProvider, spec: &SeriesSpec, n: usize) -> Result<()> {
    if (provider.alpha - spec.alpha()).abs() > ALPHA_MATCH_REL * spec.alpha() {
        return domain(format!(
            "provider moments are for alpha = {}, series uses alpha = {}",
            provider.alpha,
            spec.alpha()
        ));
    }
    if n > provider.k_max {
        return Err(Error::Capability(format!(
            "C_{n} needs moments up to order {n}, provider stops at {}",
            provider.k_max
        )));
    }
    Ok(())
}

fn estimate(
    provider: &MomentProvider,
    spec: &SeriesSpec,
    n: usize,
    scaling: MomentScaling,
) -> Result<CoefficientEstimate> {
    check_provider(provider, spec, n)?;
    let beta = Dd::from(spec.beta());
    let b = Dd::from(spec.b());
    // weight_k = C(n+β, n−k) / k!, starting from C(n+β, n) = Π (β+i)/i.
    let mut weight = (1..=n).fold(Dd::ONE, |acc, i| acc * (beta + i as f64) / i as f64);
    let mut b_pow = Dd::ONE;
    let mut acc = Dd::ZERO;
    let mut largest = 0.0f64;
    for k in 0..=n {
        if k > 0 {
            weight = weight * ((n - k + 1) as f64) / ((beta + k as f64) * k as f64);
            b_pow *= b;
        }
        let moment = provider.moment_dd(k)?;
        let scaled = match scaling {
            MomentScaling::Corrected => moment / b_pow,
            MomentScaling::Misprinted => moment / b,
        };
        let term = if k % 2 == 0 {
            weight * scaled
        } else {
            -(weight * scaled)
        };
        largest = largest.max(term.to_f64().abs());
        acc += term;
    }
    let value = if n == 0 && scaling == MomentScaling::Corrected {
        1.0
    } else {
        acc.to_f64()
    };
    if !value.is_finite() || !largest.is_finite() {
        return Err(Error::Numerical(format!("C_{n} is not finite")));
    }
    Ok(CoefficientEstimate {
        value,
        cancellation_ratio: largest / value.abs().max(1.0),
    })
}

/// `C_n` from the provider's moments.
pub fn coefficient(provider: &MomentProvider, spec: &SeriesSpec, n: usize) -> Result<f64> {
    Ok(estimate(provider, spec, n, MomentScaling::Corrected)?.value)
}

/// `C_n` with an explicit moment scaling rule.
pub fn coefficient_with_scaling(
    provider: &MomentProvider,
    spec: &SeriesSpec,
    n: usize,
    scaling: MomentScaling,
) -> Result<f64> {
    Ok(estimate(provider, spec, n, scaling)?.value)
}

/// `C_0 ..= C_{n_max}` with their cancellation diagnostics.
pub fn coefficient_estimates(
    provider: &MomentProvider,
    spec: &SeriesSpec,
    n_max: usize,
) -> Result<Vec<CoefficientEstimate>> {
    check_provider(provider, spec, n_max)?;
    (0..=n_max)
        .map(|n| estimate(provider, spec, n, MomentScaling::Corrected))
        .collect()
}

pub fn coefficient_vector(
    provider: &MomentProvider,
    spec: &SeriesSpec,
    n_max: usize,
) -> Result<CoefficientVector> {
    let values = coefficient_estimates(provider, spec, n_max)?
        .into_iter()
        .map(|e| e.value)
        .collect();
    CoefficientVector::new(values)
}

/// Choose `(b, β)` so that `C_1 = C_2 = 0`:
/// `b = (μ₂ − μ₁²)/μ₁`, `β = μ₁²/(μ₂ − μ₁²) − 1` with `μ_j = E_R[R^{jα}]`.
pub fn fit_spec(provider: &MomentProvider, alpha: f64) -> Result<SeriesSpec> {
    if (provider.alpha - alpha).abs() > ALPHA_MATCH_REL * alpha {
        return domain(format!(
            "provider moments are for alpha = {}, fit requested alpha = {alpha}",
            provider.alpha
        ));
    }
    if provider.k_max < 2 {
        return Err(Error::Capability(
            "moment fit needs moments of order 1 and 2".into(),
        ));
    }
    let m1 = provider.moment_dd(1)?;
    let m2 = provider.moment_dd(2)?;
    let var = m2 - m1 * m1;
    if !(m1.to_f64() > 0.0) || !(var.to_f64() > 1e-12 * m2.to_f64()) {
        return Err(Error::Fit(format!(
            "second moment {} does not exceed the squared first moment {}",
            m2.to_f64(),
            (m1 * m1).to_f64()
        )));
    }
    let b = (var / m1).to_f64();
    let beta = (m1 * m1 / var - 1.0).to_f64();
    SeriesSpec::new(alpha, b, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ncx2_spec(nu: f64) -> SeriesSpec {
        SeriesSpec::new(1.0, 2.0, nu / 2.0 - 1.0).unwrap()
    }

    #[test]
    fn leading_coefficient_is_one() {
        let p = MomentProvider::family(FamilyParams::NakagamiM { m: 1.3, omega: 2.0 }, 10).unwrap();
        let spec = SeriesSpec::new(2.0, 0.7, 0.4).unwrap();
        assert_eq!(coefficient(&p, &spec, 0).unwrap(), 1.0);
    }

    #[test]
    fn rayleigh_coefficients_vanish() {
        let p = MomentProvider::family(FamilyParams::Rayleigh { omega: 1.0 }, 10).unwrap();
        let spec = SeriesSpec::new(2.0, 1.0, 0.0).unwrap();
        for n in 1..=10 {
            assert!(coefficient(&p, &spec, n).unwrap().abs() <= 1e-10, "n={n}");
        }
        let v = coefficient_vector(&p, &spec, 5).unwrap();
        assert_eq!(v.as_slice()[0], 1.0);
        assert!(v.as_slice()[1..].iter().all(|c| c.abs() <= 1e-10));
    }

    #[test]
    fn ncx2_special_case_coefficients() {
        let p = MomentProvider::family(
            FamilyParams::Ncx2 {
                nu: 4.0,
                lambda: 2.0,
            },
            10,
        )
        .unwrap();
        let spec = ncx2_spec(4.0);
        let mut expected = 1.0;
        for n in 0..=8 {
            if n > 0 {
                expected *= -1.0 / n as f64;
            }
            let got = coefficient(&p, &spec, n).unwrap();
            assert!(
                (got - expected).abs() <= 1e-12 * expected.abs(),
                "n={n}: {got}"
            );
        }
        let v = coefficient_vector(&p, &spec, 3).unwrap();
        let want = [1.0, -1.0, 0.5, -1.0 / 6.0];
        for (g, w) in v.as_slice().iter().zip(want) {
            assert!((g - w).abs() < 1e-9);
        }
        assert_eq!(coefficient_vector(&p, &spec, 0).unwrap().as_slice(), &[1.0]);
    }

    #[test]
    fn coefficient_errors() {
        let p = MomentProvider::family(FamilyParams::Rayleigh { omega: 1.0 }, 4).unwrap();
        let spec = SeriesSpec::new(2.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            coefficient(&p, &spec, 5),
            Err(Error::Capability(_))
        ));
        let wrong = SeriesSpec::new(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(coefficient(&p, &wrong, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn misprinted_scaling_is_visibly_wrong() {
        let p = MomentProvider::family(FamilyParams::Rayleigh { omega: 2.0 }, 4).unwrap();
        let spec = SeriesSpec::new(2.0, 2.0, 0.0).unwrap();
        let good = coefficient_with_scaling(&p, &spec, 1, MomentScaling::Corrected).unwrap();
        let bad = coefficient_with_scaling(&p, &spec, 1, MomentScaling::Misprinted).unwrap();
        assert!(good.abs() < 1e-14);
        assert!((bad + 0.5).abs() < 1e-14);
    }

    #[test]
    fn family_moment_examples() {
        let fams = [
            FamilyParams::Rayleigh { omega: 2.0 },
            FamilyParams::Weibull {
                shape: 3.0,
                scale: 1.5,
            },
            FamilyParams::NakagamiM { m: 2.5, omega: 1.0 },
            FamilyParams::AlphaMu {
                alpha: 1.5,
                mu: 2.0,
                r_hat: 1.0,
            },
            FamilyParams::Hoyt { q: 0.5, omega: 1.0 },
            FamilyParams::Rician { k: 3.0, omega: 1.0 },
            FamilyParams::KappaMu {
                kappa: 2.0,
                mu: 1.5,
                omega: 1.0,
            },
            FamilyParams::Ncx2 {
                nu: 3.0,
                lambda: 1.0,
            },
        ];
        for f in fams {
            assert_eq!(family_moment(&f, f.natural_alpha(), 0).unwrap(), 1.0);
        }
        let r = FamilyParams::Rayleigh { omega: 2.0 };
        assert_eq!(family_moment(&r, 2.0, 3).unwrap(), 48.0);
        let c = FamilyParams::Ncx2 {
            nu: 2.0,
            lambda: 0.0,
        };
        assert_eq!(family_moment(&c, 1.0, 2).unwrap(), 8.0);
        assert!(matches!(
            family_moment(&r, 1.0, 1),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn ncx2_low_moments_match_known_forms() {
        let (nu, lambda) = (4.0, 2.0);
        let f = FamilyParams::Ncx2 { nu, lambda };
        assert!((family_moment(&f, 1.0, 1).unwrap() - (nu + lambda)).abs() < 1e-13);
        let second = (nu + lambda) * (nu + lambda) + 2.0 * (nu + 2.0 * lambda);
        assert!((family_moment(&f, 1.0, 2).unwrap() - second).abs() < 1e-12);
    }

    #[test]
    fn family_second_moments_equal_omega() {
        for f in [
            FamilyParams::Hoyt { q: 0.3, omega: 1.7 },
            FamilyParams::Rician { k: 4.0, omega: 1.7 },
            FamilyParams::KappaMu {
                kappa: 0.8,
                mu: 2.2,
                omega: 1.7,
            },
            FamilyParams::NakagamiM { m: 0.7, omega: 1.7 },
        ] {
            assert!(
                (family_moment(&f, 2.0, 1).unwrap() - 1.7).abs() < 1e-14,
                "{f:?}"
            );
        }
    }

    #[test]
    fn invalid_family_parameters() {
        assert!(FamilyParams::Hoyt { q: 1.5, omega: 1.0 }
            .validate()
            .is_err());
        assert!(FamilyParams::Rician {
            k: -1.0,
            omega: 1.0
        }
        .validate()
        .is_err());
        assert!(MomentProvider::family(
            FamilyParams::Ncx2 {
                nu: 0.0,
                lambda: 1.0
            },
            4
        )
        .is_err());
    }

    #[test]
    fn empirical_moment_examples() {
        let p = empirical_moments(&[1.0, 1.0, 1.0], 2.0, 3).unwrap();
        assert_eq!(p.moment(3).unwrap(), 1.0);
        let p = empirical_moments(&[0.0, 2.0], 1.0, 1).unwrap();
        assert_eq!(p.moment(1).unwrap(), 1.0);
        assert_eq!(p.moment(0).unwrap(), 1.0);
        assert!(matches!(p.moment(2), Err(Error::Capability(_))));
        assert!(matches!(
            empirical_moments(&[], 1.0, 2),
            Err(Error::Data(_))
        ));
        assert!(matches!(
            empirical_moments(&[1.0, -0.1], 1.0, 2),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn fit_examples() {
        let p = MomentProvider::family(FamilyParams::Rayleigh { omega: 1.0 }, 4).unwrap();
        let s = fit_spec(&p, 2.0).unwrap();
        assert!((s.b() - 1.0).abs() < 1e-15 && s.beta().abs() < 1e-15);

        let p = MomentProvider::family(FamilyParams::NakagamiM { m: 2.5, omega: 1.0 }, 4).unwrap();
        let s = fit_spec(&p, 2.0).unwrap();
        assert!((s.b() - 0.4).abs() < 1e-15 && (s.beta() - 1.5).abs() < 1e-14);

        let p = MomentProvider::family(
            FamilyParams::Ncx2 {
                nu: 4.0,
                lambda: 2.0,
            },
            4,
        )
        .unwrap();
        let s = fit_spec(&p, 1.0).unwrap();
        assert!((s.b() - 16.0 / 6.0).abs() < 1e-14 && (s.beta() - 1.25).abs() < 1e-14);
        for n in 1..=2 {
            assert!(coefficient(&p, &s, n).unwrap().abs() <= 1e-10);
        }
    }

    #[test]
    fn fit_rejects_degenerate_moments() {
        let p = empirical_moments(&[1.7, 1.7, 1.7], 2.0, 4).unwrap();
        assert!(matches!(fit_spec(&p, 2.0), Err(Error::Fit(_))));
        let p = empirical_moments(&[0.0, 0.0], 2.0, 4).unwrap();
        assert!(matches!(fit_spec(&p, 2.0), Err(Error::Fit(_))));
        let p = MomentProvider::family(FamilyParams::Rayleigh { omega: 1.0 }, 1).unwrap();
        assert!(matches!(fit_spec(&p, 2.0), Err(Error::Capability(_))));
    }

    #[test]
    fn sample_file_parsing() {
        let text = "# measured envelope\n0.5\n\n  1.25  \n# trailing comment\n3e-1\n";
        assert_eq!(parse_samples(text).unwrap(), vec![0.5, 1.25, 0.3]);
        assert!(matches!(parse_samples("1.0\nabc\n"), Err(Error::Data(_))));
        assert!(matches!(parse_samples("-1.0\n"), Err(Error::Data(_))));
        assert!(matches!(parse_samples("inf\n"), Err(Error::Data(_))));
        assert!(matches!(parse_samples("# nothing\n"), Err(Error::Data(_))));
    }

    #[test]
    fn cancellation_diagnostic() {
        let p = MomentProvider::family(
            FamilyParams::Ncx2 {
                nu: 7.0,
                lambda: 0.5,
            },
            64,
        )
        .unwrap();
        let spec = ncx2_spec(7.0);
        let est = coefficient_estimates(&p, &spec, 60).unwrap();
        assert!(!est[5].unreliable());
        assert!(est[60].unreliable());
        assert!(est.iter().all(|e| e.cancellation_ratio >= 0.0));
    }

    #[test]
    fn serde_family_tags() {
        let f: FamilyParams =
            serde_json::from_str(r#"{"name":"nakagami_m","m":2.5,"omega":1}"#).unwrap();
        assert_eq!(f, FamilyParams::NakagamiM { m: 2.5, omega: 1.0 });
        assert!(
            serde_json::from_str::<FamilyParams>(r#"{"name":"rayleigh","omega":1,"x":2}"#).is_err()
        );
    }
}
