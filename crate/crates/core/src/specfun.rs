//! Scalar special functions used by the series formulas.
//!
//! Everything here is real-argument only: log-gamma, generalized binomial
//! coefficients, generalized Laguerre polynomials, the regularized lower
//! incomplete gamma function and the modified Bessel function of the first
//! kind.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Iteration cap for the incomplete gamma series and continued fraction.
pub const GAMMA_MAX_ITER: usize = 10_000;
const GAMMA_REL_EPS: f64 = 1e-15;
const BESSEL_MAX_ITER: usize = 10_000;

fn lanczos_sum(z: f64) -> f64 {
    let mut x = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    x
}

/// Natural logarithm of the gamma function for `a > 0`.
///
/// Below 171 the argument is reduced to `[1, 2)` by the recurrence and the
/// gamma value itself is formed, so integer arguments give `ln((a−1)!)` to
/// rounding level. Larger arguments use the Stirling series.
pub fn log_gamma(a: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return domain(format!("log_gamma requires a finite a > 0, got {a}"));
    }
    Ok(log_gamma_pos(a))
}

fn gamma_unit_interval(w: f64) -> f64 {
    if w == 1.0 {
        return 1.0;
    }
    let z = w - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

fn log_gamma_pos(a: f64) -> f64 {
    if a < 0.5 {
        // Reflection: Γ(a)Γ(1−a) = π / sin(πa).
        return PI.ln() - (PI * a).sin().ln() - log_gamma_pos(1.0 - a);
    }
    if a < 1.0 {
        return gamma_unit_interval(a + 1.0).ln() - a.ln();
    }
    if a < 171.0 {
        let mut w = a;
        let mut prod = 1.0;
        while w >= 2.0 {
            w -= 1.0;
            prod *= w;
        }
        return (prod * gamma_unit_interval(w)).ln();
    }
    let inv = 1.0 / a;
    let inv2 = inv * inv;
    let correction =
        inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    (a - 0.5) * a.ln() - a + HALF_LN_2PI + correction
}

/// Generalized binomial coefficient `C(n + beta, n) = Γ(n+β+1) / (n! Γ(β+1))`.
pub fn gen_binomial(n: usize, beta: f64) -> Result<f64> {
    if !beta.is_finite() || beta <= -1.0 {
        return domain(format!("gen_binomial requires beta > -1, got {beta}"));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let n = n as f64;
    let log = log_gamma_pos(n + beta + 1.0) - log_gamma_pos(n + 1.0) - log_gamma_pos(beta + 1.0);
    let value = log.exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Range(format!("C({n}+{beta}, {n}) overflows")))
    }
}

fn check_laguerre_args(mu: f64, x: f64) -> Result<()> {
    if !mu.is_finite() || mu <= -1.0 {
        return domain(format!("Laguerre order must satisfy mu > -1, got {mu}"));
    }
    if !x.is_finite() || x < 0.0 {
        return domain(format!(
            "Laguerre argument must be finite and >= 0, got {x}"
        ));
    }
    Ok(())
}

/// `L_0^μ(x) .. L_N^μ(x)` evaluated at a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct LaguerreBatch {
    pub mu: f64,
    pub x: f64,
    pub values: Vec<f64>,
}

impl LaguerreBatch {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }
}

/// Generalized Laguerre polynomial `L_n^μ(x)` by the upward three-term recurrence.
pub fn laguerre(n: usize, mu: f64, x: f64) -> Result<f64> {
    check_laguerre_args(mu, x)?;
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + mu - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + mu - x) * cur - (k + mu) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    if cur.is_finite() {
        Ok(cur)
    } else {
        Err(Error::Range(format!("L_{n}^{mu}({x}) overflows")))
    }
}

/// All of `L_0^μ(x) .. L_{n_max}^μ(x)` from one pass of the recurrence.
pub fn laguerre_batch(n_max: usize, mu: f64, x: f64) -> Result<LaguerreBatch> {
    check_laguerre_args(mu, x)?;
    let mut values = Vec::with_capacity(n_max + 1);
    fill_laguerre(n_max, mu, x, &mut values);
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Range(format!("L_{bad}^{mu}({x}) overflows")));
    }
    Ok(LaguerreBatch { mu, x, values })
}

/// Unchecked recurrence into a caller-owned buffer (arguments already validated).
pub(crate) fn fill_laguerre(n_max: usize, mu: f64, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if n_max == 0 {
        return;
    }
    out.push(1.0 + mu - x);
    for k in 1..n_max {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + mu - x) * out[k] - (kf + mu) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
}

/// Regularized lower incomplete gamma function `P(a, x) = γ(a, x) / Γ(a)`.
///
/// Power series below `x = a + 1`, Lentz continued fraction for the
/// complement above it.
pub fn reg_lower_gamma(a: f64, x: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return domain(format!("reg_lower_gamma requires a > 0, got {a}"));
    }
    if x.is_nan() || x < 0.0 {
        return domain(format!("reg_lower_gamma requires x >= 0, got {x}"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let log_prefactor = a * x.ln() - x - log_gamma_pos(a);
    let p = if x < a + 1.0 {
        lower_gamma_series(a, x)? * log_prefactor.exp()
    } else {
        1.0 - upper_gamma_fraction(a, x)? * log_prefactor.exp()
    };
    Ok(p.clamp(0.0, 1.0))
}

fn lower_gamma_series(a: f64, x: f64) -> Result<f64> {
    let mut denom = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..GAMMA_MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_REL_EPS {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!(
        "incomplete gamma series for a={a}, x={x} exceeded {GAMMA_MAX_ITER} terms"
    )))
}

fn upper_gamma_fraction(a: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=GAMMA_MAX_ITER {
        let i = i as f64;
        let an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_REL_EPS {
            return Ok(h);
        }
    }
    Err(Error::Convergence(format!(
        "incomplete gamma continued fraction for a={a}, x={x} exceeded {GAMMA_MAX_ITER} terms"
    )))
}

/// Modified Bessel function of the first kind `I_ν(z)` by its ascending series.
///
/// Slow but dependable; meant for reference densities with `z` up to a few
/// dozen, not for hot loops.
pub fn bessel_i(order: f64, z: f64) -> Result<f64> {
    if !order.is_finite() || order <= -1.0 {
        return domain(format!("bessel_i requires order > -1, got {order}"));
    }
    if !z.is_finite() || z < 0.0 {
        return domain(format!("bessel_i requires finite z >= 0, got {z}"));
    }
    if z == 0.0 {
        return if order == 0.0 {
            Ok(1.0)
        } else if order > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::Range(format!("I_{order}(0) is infinite")))
        };
    }
    let half = z / 2.0;
    let quarter_sq = half * half;
    let mut term = (order * half.ln() - log_gamma_pos(order + 1.0)).exp();
    let mut sum = term;
    for k in 0..BESSEL_MAX_ITER {
        let k = k as f64;
        term *= quarter_sq / ((k + 1.0) * (k + order + 1.0));
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Range(format!("I_{order}({z}) overflows")));
        }
        if term < sum * 1e-16 && k + 1.0 > half {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!(
        "I_{order}({z}) series did not converge"
    )))
}
