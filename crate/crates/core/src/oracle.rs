//! Independent checking machinery: adaptive Gauss–Kronrod quadrature,
//! a Dvoretzky–Kiefer–Wolfowitz band test for empirical CDFs and a
//! central-difference derivative check.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

/// Evaluation budget of [`integrate`].
pub const MAX_EVALUATIONS: usize = 1_000_000;

// 21-point Kronrod rule with its embedded 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], …, XGK[9]).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const EVALS_PER_RULE: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Segment> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for i in 0..10 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[i] * (f1 + f2);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::Numerical(format!(
            "integrand is not finite on [{lo}, {hi}]"
        )));
    }
    Ok(Segment {
        lo,
        hi,
        value,
        error,
    })
}

/// Globally adaptive Gauss–Kronrod (10/21) quadrature of `f` over `[lo, hi]`
/// to absolute tolerance `tol`.
///
/// The rule never evaluates the endpoints, so integrable endpoint
/// singularities are handled by repeated bisection towards them.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<QuadratureResult> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return domain(format!(
            "integration bounds must be finite with lo <= hi, got [{lo}, {hi}]"
        ));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be > 0, got {tol}"));
    }
    if lo == hi {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let first = kronrod(&f, lo, hi)?;
    let mut evaluations = EVALS_PER_RULE;
    let mut total_value = first.value;
    let mut total_error = first.error;
    let mut heap = BinaryHeap::from([first]);
    while total_error > tol {
        if evaluations + 2 * EVALS_PER_RULE > MAX_EVALUATIONS {
            return Err(Error::Convergence(format!(
                "quadrature error {total_error:e} above {tol:e} after {evaluations} evaluations"
            )));
        }
        let worst = heap.pop().expect("heap holds every live segment");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            return Err(Error::Convergence(format!(
                "quadrature cannot subdivide [{}, {}] further; error {total_error:e}",
                worst.lo, worst.hi
            )));
        }
        let left = kronrod(&f, worst.lo, mid)?;
        let right = kronrod(&f, mid, worst.hi)?;
        evaluations += 2 * EVALS_PER_RULE;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if total_error <= tol {
            // Re-sum to shed drift from the running updates.
            total_value = heap.iter().map(|s| s.value).sum();
            total_error = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(QuadratureResult {
        value: total_value,
        error_estimate: total_error,
        evaluations,
    })
}

/// Upper cut-off `X` for integrands bounded by `amplitude · x^power · e^{−x}`
/// such that the discarded tail is below `tol / 10`.
///
/// Uses `∫_X^∞ x^p e^{−x} dx ≤ 2 X^p e^{−X}` for `X ≥ 2p`.
pub fn exponential_tail_cutoff(power: f64, amplitude: f64, tol: f64) -> f64 {
    let target = (tol / 10.0 / (2.0 * amplitude.max(f64::MIN_POSITIVE))).ln();
    let mut x = (2.0 * power).max(1.0);
    while power * x.ln() - x > target {
        x += 1.0;
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DkwReport {
    pub max_deviation: f64,
    pub band: f64,
    pub passed: bool,
}

/// DKW half-width `sqrt(ln(2/δ) / 2n)` at confidence `1 − δ`.
pub fn dkw_band(n: usize, confidence: f64) -> f64 {
    let delta = 1.0 - confidence;
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

/// Sup-distance between the ECDF of sorted `samples` and `cdf`, compared
/// against the DKW band.
pub fn dkw_check<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, confidence: f64) -> Result<DkwReport> {
    if samples.len() < 100 {
        return Err(Error::Data(format!(
            "DKW check needs >= 100 samples, got {}",
            samples.len()
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return domain(format!("confidence must lie in (0, 1), got {confidence}"));
    }
    if samples.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Data("samples must be sorted ascending".into()));
    }
    let n = samples.len() as f64;
    let mut max_deviation = 0.0f64;
    for (i, &s) in samples.iter().enumerate() {
        let f = cdf(s);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        max_deviation = max_deviation.max(above).max(below);
    }
    let band = dkw_band(samples.len(), confidence);
    Ok(DkwReport {
        max_deviation,
        band,
        passed: max_deviation <= band,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeReport {
    /// Largest `|fd − g| / |g|` over the points (absolute deviation where `g = 0`).
    pub max_relative_deviation: f64,
    pub worst_point: f64,
    pub passed: bool,
}

/// Compares the central difference `(f(x+h) − f(x−h)) / 2h` with `g(x)`.
pub fn derivative_check<F, G>(f: F, g: G, points: &[f64], h: f64, tol: f64) -> DerivativeReport
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut worst = 0.0f64;
    let mut worst_point = f64::NAN;
    for &x in points {
        let fd = (f(x + h) - f(x - h)) / (2.0 * h);
        let claimed = g(x);
        let dev = if claimed == 0.0 {
            fd.abs()
        } else {
            ((fd - claimed) / claimed).abs()
        };
        let dev = if dev.is_nan() { f64::INFINITY } else { dev };
        if dev >= worst {
            worst = dev;
            worst_point = x;
        }
    }
    DerivativeReport {
        max_relative_deviation: worst,
        worst_point,
        passed: worst <= tol,
    }
}
