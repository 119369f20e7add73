//! The runnable validation suite: every check compares a library result
//! with an independent oracle and reports the measured error against a
//! fixed bound.

use std::fmt;

use crate::coefficients::{
    coefficient, coefficient_vector, coefficient_with_scaling, fit_spec, FamilyParams,
    MomentProvider, MomentScaling, DEFAULT_FAMILY_K_MAX,
};
use crate::error::{Error, Result};
use crate::ncx2::{
    ncx2_cdf_oracle, ncx2_cdf_series_parts, ncx2_pdf_reference, ncx2_pdf_series, ncx2_sample,
    series_mapping, Ncx2Params,
};
use crate::oracle::{derivative_check, dkw_check, exponential_tail_cutoff, integrate};
use crate::series::{cdf_parts, choose_truncation, pdf_at, CoefficientVector, SeriesSpec};
use crate::specfun::{gen_binomial, laguerre_batch, log_gamma, reg_lower_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

/// Deliberate defects, used to show the suite catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Evaluate distribution functions without the incomplete-gamma term.
    DropGammaTerm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationConfig {
    pub seed: u64,
    pub level: Level,
    pub fault: Option<Fault>,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_611,
            level: Level::Quick,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

impl Bound {
    fn admits(self, v: f64) -> bool {
        match self {
            Bound::AtMost(b) => v <= b,
            Bound::AtLeast(b) => v >= b,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(b) => write!(f, "<= {b:e}"),
            Bound::AtLeast(b) => write!(f, ">= {b:e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub measured: f64,
    pub bound: Bound,
    pub passed: bool,
    /// Failure context, empty on success.
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{tag} {:<28} measured {:<24e} bound {}",
            self.name, self.measured, self.bound
        )?;
        if !self.detail.is_empty() {
            write!(f, "  ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            writeln!(f, "{o}")?;
        }
        let failed = self.failed().count();
        write!(f, "{} checks, {} failed", self.outcomes.len(), failed)
    }
}

fn outcome(name: &'static str, bound: Bound, measured: Result<(f64, String)>) -> CheckOutcome {
    match measured {
        Ok((m, detail)) => {
            let passed = bound.admits(m);
            CheckOutcome {
                name,
                measured: m,
                bound,
                passed,
                detail: if passed { String::new() } else { detail },
            }
        }
        Err(e) => CheckOutcome {
            name,
            measured: f64::NAN,
            bound,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// A series under test: basis, coefficients and a typical power-variable range.
struct Case {
    label: String,
    spec: SeriesSpec,
    coeffs: CoefficientVector,
}

struct Suite {
    config: ValidationConfig,
}

impl Suite {
    fn grid_len(&self) -> usize {
        match self.config.level {
            Level::Quick => 10,
            Level::Full => 20,
        }
    }

    fn degree(&self) -> usize {
        match self.config.level {
            Level::Quick => 5,
            Level::Full => 8,
        }
    }

    fn cdf(&self, c: &Case, r: f64) -> Result<f64> {
        let (series, gamma) = cdf_parts(&c.spec, &c.coeffs, r)?;
        Ok(match self.config.fault {
            Some(Fault::DropGammaTerm) => series,
            None => series + gamma,
        })
    }

    fn ncx2_cdf(&self, p: &Ncx2Params, r: f64, n: usize) -> Result<f64> {
        let (series, gamma) = ncx2_cdf_series_parts(p, r, n)?;
        Ok(match self.config.fault {
            Some(Fault::DropGammaTerm) => series,
            None => series + gamma,
        })
    }

    fn cases(&self) -> Result<Vec<Case>> {
        let mut out = Vec::new();
        for family in [
            FamilyParams::Rayleigh { omega: 1.0 },
            FamilyParams::NakagamiM { m: 2.5, omega: 1.0 },
            FamilyParams::Weibull {
                shape: 3.0,
                scale: 1.0,
            },
            FamilyParams::Ncx2 {
                nu: 4.0,
                lambda: 2.0,
            },
        ] {
            let provider = MomentProvider::family(family, DEFAULT_FAMILY_K_MAX)?;
            let spec = fit_spec(&provider, family.natural_alpha())?;
            let coeffs = coefficient_vector(&provider, &spec, 24)?;
            out.push(Case {
                label: format!("{} fitted", family.name()),
                spec,
                coeffs,
            });
        }
        let p = Ncx2Params::new(4.0, 2.0)?;
        let (spec, coeffs) = series_mapping(&p, 40)?;
        out.push(Case {
            label: "ncx2 special-case mapping".into(),
            spec,
            coeffs,
        });
        Ok(out)
    }

    /// Envelope values where the power variable runs over `(0, x_hi]`.
    fn envelope_grid(&self, spec: &SeriesSpec, x_hi: f64) -> Vec<f64> {
        let n = self.grid_len();
        (1..=n)
            .map(|i| (x_hi * i as f64 / n as f64 * spec.b()).powf(1.0 / spec.alpha()))
            .collect()
    }

    fn orthogonality(&self) -> Result<(f64, String)> {
        let deg = self.degree();
        let mut worst = (0.0, String::new());
        for beta in [0.0, 0.5, 1.7, 3.0] {
            let upper = exponential_tail_cutoff(beta + 2.0 * deg as f64, 1e4, 1e-13);
            for l in 0..=deg {
                for n in l..=deg {
                    let integrand = |x: f64| {
                        let v = laguerre_batch(deg, beta, x)
                            .map(|b| b.values[l] * b.values[n])
                            .unwrap_or(f64::NAN);
                        x.powf(beta) * (-x).exp() * v
                    };
                    let q = integrate(integrand, 0.0, upper, 1e-12)?;
                    let diag = |k: usize| -> Result<f64> {
                        Ok(log_gamma(1.0 + beta)?.exp() * gen_binomial(k, beta)?)
                    };
                    let expected = if l == n { diag(n)? } else { 0.0 };
                    let err = (q.value - expected).abs() / (diag(l)? * diag(n)?).sqrt();
                    if err > worst.0 {
                        worst = (err, format!("beta={beta}, l={l}, n={n}"));
                    }
                }
            }
        }
        Ok(worst)
    }

    fn weight_omission(&self) -> Result<(f64, String)> {
        let beta = 2.0;
        let upper = exponential_tail_cutoff(2.0, 10.0, 1e-13);
        let q = integrate(
            |x| {
                let l1 = 1.0 + beta - x;
                (-x).exp() * l1 * l1
            },
            0.0,
            upper,
            1e-12,
        )?;
        let correct = log_gamma(1.0 + beta)?.exp() * gen_binomial(1, beta)?;
        Ok((
            (q.value - correct).abs() / correct,
            format!("unweighted {} vs {correct}", q.value),
        ))
    }

    fn cdf_pdf_consistency(&self) -> Result<(f64, String)> {
        let mut worst = (0.0, String::new());
        for case in self.cases()? {
            let grid = self.envelope_grid(&case.spec, 20.0);
            let mut lo = 0.0;
            let mut integral = 0.0;
            for &r in &grid {
                let q = integrate(
                    |t| pdf_at(&case.spec, &case.coeffs, t).unwrap_or(f64::NAN),
                    lo,
                    r,
                    1e-13,
                )?;
                integral += q.value;
                lo = r;
                let err = (self.cdf(&case, r)? - integral).abs();
                if err > worst.0 {
                    worst = (err, format!("{} at R={r}", case.label));
                }
            }
        }
        Ok(worst)
    }

    fn derivative_consistency(&self) -> Result<(f64, String)> {
        let mut worst = (0.0, String::new());
        for case in self.cases()? {
            let points: Vec<f64> = self
                .envelope_grid(&case.spec, 8.0)
                .into_iter()
                .skip(1)
                .collect();
            let report = derivative_check(
                |r| self.cdf(&case, r).unwrap_or(f64::NAN),
                |r| pdf_at(&case.spec, &case.coeffs, r).unwrap_or(f64::NAN),
                &points,
                1e-4,
                1e-5,
            );
            if report.max_relative_deviation > worst.0 {
                worst = (
                    report.max_relative_deviation,
                    format!("{} at R={}", case.label, report.worst_point),
                );
            }
        }
        Ok(worst)
    }

    fn normalization(&self) -> Result<(f64, String)> {
        let mut worst = (0.0, String::new());
        for case in self.cases()? {
            let r = (50.0 * case.spec.b()).powf(1.0 / case.spec.alpha());
            let err = (1.0 - self.cdf(&case, r)?).abs();
            if err > worst.0 {
                worst = (err, case.label.clone());
            }
        }
        Ok(worst)
    }

    fn tail_points() -> [f64; 3] {
        [100.0, 120.0, 160.0]
    }

    fn tail_series_part(&self) -> Result<(f64, String)> {
        let p = Ncx2Params::new(4.0, 2.0)?;
        let (spec, coeffs) = series_mapping(&p, 40)?;
        let mut worst: f64 = 0.0;
        for r in Self::tail_points() {
            worst = worst.max(cdf_parts(&spec, &coeffs, r)?.0.abs());
        }
        Ok((worst, String::new()))
    }

    fn tail_gamma_part(&self) -> Result<(f64, String)> {
        let p = Ncx2Params::new(4.0, 2.0)?;
        let (spec, coeffs) = series_mapping(&p, 40)?;
        let mut worst: f64 = 0.0;
        for r in Self::tail_points() {
            worst = worst.max(1.0 - cdf_parts(&spec, &coeffs, r)?.1);
        }
        Ok((worst, String::new()))
    }

    /// How far a distribution function without the gamma term falls short of 1.
    fn gamma_free_gap(&self) -> Result<(f64, String)> {
        let p = Ncx2Params::new(4.0, 2.0)?;
        let (spec, coeffs) = series_mapping(&p, 40)?;
        let mut smallest = f64::INFINITY;
        for r in Self::tail_points() {
            smallest = smallest.min(1.0 - cdf_parts(&spec, &coeffs, r)?.0);
        }
        Ok((smallest, String::new()))
    }

    fn special_case_coefficients(&self) -> Result<(f64, String)> {
        let mut worst = (0.0, String::new());
        for nu in [1.0, 4.0, 7.0] {
            for lambda in [0.5, 2.0, 5.0] {
                let provider = MomentProvider::family(FamilyParams::Ncx2 { nu, lambda }, 12)?;
                let spec = SeriesSpec::new(1.0, 2.0, nu / 2.0 - 1.0)?;
                let mut expected = 1.0;
                for n in 0..=12 {
                    if n > 0 {
                        expected *= -lambda / 2.0 / n as f64;
                    }
                    let got = coefficient(&provider, &spec, n)?;
                    let err = ((got - expected) / expected).abs();
                    if err > worst.0 {
                        worst = (err, format!("nu={nu}, lambda={lambda}, n={n}"));
                    }
                }
            }
        }
        Ok(worst)
    }

    fn lambda_zero_coefficients(&self) -> Result<(f64, String)> {
        let mut worst: f64 = 0.0;
        for nu in [1.0, 4.0, 7.0] {
            let provider = MomentProvider::family(FamilyParams::Ncx2 { nu, lambda: 0.0 }, 12)?;
            let spec = SeriesSpec::new(1.0, 2.0, nu / 2.0 - 1.0)?;
            for n in 1..=12 {
                worst = worst.max(coefficient(&provider, &spec, n)?.abs());
            }
        }
        Ok((worst, String::new()))
    }

    fn mixture_oracle_agreement(&self) -> Result<(f64, String)> {
        let mut worst = (0.0, String::new());
        for nu in [1.0, 4.0, 7.0] {
            for lambda in [0.5, 2.0, 5.0] {
                let p = Ncx2Params::new(nu, lambda)?;
                let r_max = p.mean() + 8.0 * p.variance().sqrt();
                let (spec, coeffs) = series_mapping(&p, 64)?;
                let t = choose_truncation(&spec, &coeffs, r_max / spec.b(), 1e-10);
                if !t.converged {
                    return Err(Error::Convergence(format!(
                        "nu={nu}, lambda={lambda}: no truncation within 64 terms"
                    )));
                }
                let n = self.grid_len();
                for i in 1..=n {
                    let r = r_max * i as f64 / n as f64;
                    let err = (self.ncx2_cdf(&p, r, t.n_used)? - ncx2_cdf_oracle(&p, r)?).abs();
                    if err > worst.0 {
                        worst = (
                            err,
                            format!("nu={nu}, lambda={lambda}, R={r}, N={}", t.n_used),
                        );
                    }
                }
            }
        }
        Ok(worst)
    }

    fn lambda_zero_collapse(&self) -> Result<(f64, String)> {
        let mut worst: f64 = 0.0;
        for nu in [1.0, 4.0, 7.0] {
            let p = Ncx2Params::new(nu, 0.0)?;
            for i in 0..=self.grid_len() {
                let r = 2.0 * i as f64;
                worst = worst
                    .max((self.ncx2_cdf(&p, r, 40)? - reg_lower_gamma(nu / 2.0, r / 2.0)?).abs());
            }
        }
        Ok((worst, String::new()))
    }

    fn unification(&self) -> Result<(f64, String)> {
        let mut worst = (0.0, String::new());
        for nu in [1.0, 2.0, 4.0, 7.0] {
            for lambda in [0.0, 0.5, 2.0, 5.0] {
                let p = Ncx2Params::new(nu, lambda)?;
                let (spec, coeffs) = series_mapping(&p, 40)?;
                let case = Case {
                    label: String::new(),
                    spec,
                    coeffs,
                };
                for i in 1..=self.grid_len() {
                    let r = 2.0 * i as f64;
                    let err = (self.ncx2_cdf(&p, r, 40)? - self.cdf(&case, r)?).abs();
                    if err > worst.0 {
                        worst = (err, format!("nu={nu}, lambda={lambda}, R={r}"));
                    }
                }
            }
        }
        Ok(worst)
    }

    fn bessel_reference(&self) -> Result<(f64, String)> {
        let mut worst = (0.0, String::new());
        for (nu, lambda) in [(4.0, 2.0), (1.0, 0.5), (7.0, 5.0), (2.5, 3.0)] {
            let p = Ncx2Params::new(nu, lambda)?;
            let n = 3 * self.grid_len();
            for i in 0..=n {
                let r = 0.1 + (30.0 - 0.1) * i as f64 / n as f64;
                let err = (ncx2_pdf_series(&p, r, 40)? - ncx2_pdf_reference(&p, r)?).abs();
                if err > worst.0 {
                    worst = (err, format!("nu={nu}, lambda={lambda}, r={r}"));
                }
            }
        }
        Ok(worst)
    }

    fn pdf_series_normalization(&self) -> Result<(f64, String)> {
        let mut worst = (0.0, String::new());
        for (nu, lambda) in [(4.0, 2.0), (1.0, 0.5), (7.0, 5.0)] {
            let p = Ncx2Params::new(nu, lambda)?;
            let q = integrate(
                |r| ncx2_pdf_series(&p, r, 40).unwrap_or(f64::NAN),
                0.0,
                200.0,
                1e-11,
            )?;
            let err = (q.value - 1.0).abs();
            if err > worst.0 {
                worst = (err, format!("nu={nu}, lambda={lambda}"));
            }
        }
        Ok(worst)
    }

    fn rayleigh(omega: f64) -> Result<(MomentProvider, SeriesSpec)> {
        Ok((
            MomentProvider::family(FamilyParams::Rayleigh { omega }, 16)?,
            SeriesSpec::new(2.0, omega, 0.0)?,
        ))
    }

    fn rayleigh_exactness(&self) -> Result<(f64, String)> {
        let mut worst: f64 = 0.0;
        for omega in [1.0, 2.0, 0.5] {
            let (p, spec) = Self::rayleigh(omega)?;
            for n in 1..=10 {
                worst = worst.max(coefficient(&p, &spec, n)?.abs());
            }
        }
        Ok((worst, String::new()))
    }

    fn rayleigh_cdf(&self) -> Result<(f64, String)> {
        let mut worst: f64 = 0.0;
        for omega in [1.0, 2.0] {
            let (p, spec) = Self::rayleigh(omega)?;
            let case = Case {
                label: String::new(),
                coeffs: coefficient_vector(&p, &spec, 10)?,
                spec,
            };
            for i in 0..=self.grid_len() {
                let r = 0.25 * i as f64;
                worst = worst.max((self.cdf(&case, r)? + (-r * r / omega).exp_m1()).abs());
            }
        }
        Ok((worst, String::new()))
    }

    fn misprinted_scaling(&self) -> Result<(f64, String)> {
        let (p, spec) = Self::rayleigh(2.0)?;
        Ok((
            coefficient_with_scaling(&p, &spec, 1, MomentScaling::Misprinted)?.abs(),
            String::new(),
        ))
    }

    fn monte_carlo(&self) -> Result<(f64, String, f64)> {
        let p = Ncx2Params::new(4.0, 2.0)?;
        let mut samples = ncx2_sample(&p, self.config.seed, 100_000)?;
        samples.sort_by(f64::total_cmp);
        let report = dkw_check(
            &samples,
            |r| self.ncx2_cdf(&p, r, 40).unwrap_or(f64::NAN),
            1.0 - 1e-6,
        )?;
        Ok((
            report.max_deviation,
            format!("seed {}", self.config.seed),
            report.band,
        ))
    }

    fn moment_fit(&self) -> Result<(f64, String)> {
        let mut worst = (0.0, String::new());
        for family in fit_families() {
            let provider = MomentProvider::family(family, 2)?;
            let spec = fit_spec(&provider, family.natural_alpha())?;
            for n in 1..=2 {
                let c = coefficient(&provider, &spec, n)?.abs();
                if c > worst.0 {
                    worst = (c, format!("{family:?}, n={n}"));
                }
            }
        }
        Ok(worst)
    }
}

/// Three parameter points for each built-in family.
pub fn fit_families() -> [FamilyParams; 24] {
    use FamilyParams::*;
    [
        Rayleigh { omega: 0.5 },
        Rayleigh { omega: 1.0 },
        Rayleigh { omega: 3.0 },
        Weibull {
            shape: 0.8,
            scale: 2.0,
        },
        Weibull {
            shape: 1.5,
            scale: 1.0,
        },
        Weibull {
            shape: 3.0,
            scale: 1.0,
        },
        NakagamiM { m: 0.6, omega: 1.0 },
        NakagamiM { m: 2.5, omega: 1.0 },
        NakagamiM { m: 5.0, omega: 2.0 },
        AlphaMu {
            alpha: 1.5,
            mu: 2.0,
            r_hat: 1.0,
        },
        AlphaMu {
            alpha: 2.5,
            mu: 0.8,
            r_hat: 1.2,
        },
        AlphaMu {
            alpha: 3.0,
            mu: 1.5,
            r_hat: 0.7,
        },
        Hoyt { q: 0.3, omega: 1.0 },
        Hoyt { q: 0.6, omega: 1.5 },
        Hoyt { q: 0.9, omega: 0.8 },
        Rician { k: 0.5, omega: 1.0 },
        Rician { k: 3.0, omega: 1.0 },
        Rician {
            k: 10.0,
            omega: 2.0,
        },
        KappaMu {
            kappa: 0.5,
            mu: 1.5,
            omega: 1.0,
        },
        KappaMu {
            kappa: 2.0,
            mu: 0.8,
            omega: 1.0,
        },
        KappaMu {
            kappa: 5.0,
            mu: 2.0,
            omega: 1.3,
        },
        Ncx2 {
            nu: 4.0,
            lambda: 2.0,
        },
        Ncx2 {
            nu: 1.0,
            lambda: 0.5,
        },
        Ncx2 {
            nu: 7.0,
            lambda: 5.0,
        },
    ]
}

/// Runs every check; the report lists measured error against its bound.
pub fn run(config: ValidationConfig) -> ValidationReport {
    let s = Suite { config };
    let mut outcomes = vec![
        outcome("orthogonality", Bound::AtMost(1e-8), s.orthogonality()),
        outcome(
            "weight_omission_witness",
            Bound::AtLeast(0.10),
            s.weight_omission(),
        ),
        outcome(
            "cdf_pdf_consistency",
            Bound::AtMost(1e-8),
            s.cdf_pdf_consistency(),
        ),
        outcome(
            "derivative_consistency",
            Bound::AtMost(1e-5),
            s.derivative_consistency(),
        ),
        outcome("normalization", Bound::AtMost(1e-6), s.normalization()),
        outcome(
            "tail_series_part",
            Bound::AtMost(1e-6),
            s.tail_series_part(),
        ),
        outcome("tail_gamma_part", Bound::AtMost(1e-8), s.tail_gamma_part()),
        outcome(
            "gamma_free_cdf_gap",
            Bound::AtLeast(0.99),
            s.gamma_free_gap(),
        ),
        outcome(
            "special_case_coefficients",
            Bound::AtMost(1e-8),
            s.special_case_coefficients(),
        ),
        outcome(
            "lambda_zero_coefficients",
            Bound::AtMost(1e-14),
            s.lambda_zero_coefficients(),
        ),
        outcome(
            "mixture_oracle_agreement",
            Bound::AtMost(1e-6),
            s.mixture_oracle_agreement(),
        ),
        outcome(
            "lambda_zero_collapse",
            Bound::AtMost(1e-12),
            s.lambda_zero_collapse(),
        ),
        outcome("unification", Bound::AtMost(1e-12), s.unification()),
        outcome(
            "bessel_reference_pdf",
            Bound::AtMost(1e-8),
            s.bessel_reference(),
        ),
        outcome(
            "pdf_series_normalization",
            Bound::AtMost(1e-8),
            s.pdf_series_normalization(),
        ),
        outcome(
            "rayleigh_exactness",
            Bound::AtMost(1e-10),
            s.rayleigh_exactness(),
        ),
        outcome("rayleigh_cdf", Bound::AtMost(1e-12), s.rayleigh_cdf()),
        outcome(
            "misprinted_scaling_witness",
            Bound::AtLeast(0.1),
            s.misprinted_scaling(),
        ),
    ];
    outcomes.push(match s.monte_carlo() {
        Ok((dev, detail, band)) => {
            outcome("monte_carlo_dkw", Bound::AtMost(band), Ok((dev, detail)))
        }
        Err(e) => outcome("monte_carlo_dkw", Bound::AtMost(f64::NAN), Err(e)),
    });
    outcomes.push(outcome("moment_fit", Bound::AtMost(1e-10), s.moment_fit()));
    ValidationReport { outcomes }
}
