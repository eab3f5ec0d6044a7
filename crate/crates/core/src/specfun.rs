//! Real special functions on the positive half-line: Gamma, log-Gamma,
//! digamma and harmonic numbers.
//!
//! Gamma uses a fixed Lanczos approximation (g = 7, nine terms) with the
//! recurrence `Γ(t) = Γ(t + 1) / t` below 1/2. Digamma shifts its argument
//! upwards with `ψ(t) = ψ(t + 1) − 1/t` and finishes with the asymptotic
//! Bernoulli expansion, which is accurate to below 1e-16 once the argument
//! exceeds 10.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant to 20 significant digits.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
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
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;
/// Largest integer n with (n − 1)! finite in f64.
const MAX_FACTORIAL_ARG: f64 = 171.0;

/// Tolerances for the series-based reference evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFunPrecision {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SpecFunPrecision {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 100_000,
        }
    }
}

impl SpecFunPrecision {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::Config(format!("rel_tol must be positive, got {rel_tol}")));
        }
        if max_terms < 100 {
            return Err(Error::Config(format!("max_terms must be at least 100, got {max_terms}")));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

fn check_positive(op: &'static str, t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("argument must be finite and positive, got {t}")))
    }
}

fn is_small_integer(t: f64) -> bool {
    t.fract() == 0.0 && t <= MAX_FACTORIAL_ARG
}

/// (n − 1)! by exact repeated multiplication.
fn factorial_of_pred(n: f64) -> f64 {
    let mut acc = 1.0;
    let mut k = 2.0;
    while k < n {
        acc *= k;
        k += 1.0;
    }
    acc
}

/// Returns (ln of the Lanczos series sum, shifted base `x + g + 1/2`, x = t − 1).
fn lanczos_parts(t: f64) -> (f64, f64, f64) {
    let x = t - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    (sum.ln(), x + LANCZOS_G + 0.5, x)
}

pub fn gamma(t: f64) -> Result<f64> {
    check_positive("gamma", t)?;
    if is_small_integer(t) {
        return Ok(factorial_of_pred(t));
    }
    if t < 0.5 {
        return Ok(gamma(t + 1.0)? / t);
    }
    let (ln_sum, base, x) = lanczos_parts(t);
    Ok((HALF_LN_TWO_PI + (x + 0.5) * base.ln() - base + ln_sum).exp())
}

pub fn log_gamma(t: f64) -> Result<f64> {
    check_positive("log_gamma", t)?;
    if is_small_integer(t) {
        return Ok(factorial_of_pred(t).ln());
    }
    if t < 0.5 {
        return Ok(log_gamma(t + 1.0)? - t.ln());
    }
    let (ln_sum, base, x) = lanczos_parts(t);
    Ok(HALF_LN_TWO_PI + (x + 0.5) * base.ln() - base + ln_sum)
}

/// ψ(t) = Γ'(t)/Γ(t).
pub fn digamma(t: f64) -> Result<f64> {
    check_positive("digamma", t)?;
    let mut shift = 0.0;
    let mut x = t;
    while x < 10.0 {
        shift += 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli tail: B_{2k} / (2k x^{2k}), k = 1..7, Horner in 1/x².
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32_760.0 - inv2 / 12.0))))));
    Ok(x.ln() - 0.5 / x - tail - shift)
}

/// Digamma from `−γ + Σ_{j≥1} (1/j − 1/(t − 1 + j))`, truncated after
/// `max_terms` terms plus a midpoint estimate of the remainder.
///
/// Slow; kept as a reference for checking [`digamma`].
pub fn digamma_series(t: f64, precision: &SpecFunPrecision) -> Result<f64> {
    check_positive("digamma_series", t)?;
    let a = t - 1.0;
    let terms = precision.max_terms;
    // Each term as a/(j(j + a)) avoids cancelling 1/j against 1/(j + a);
    // summed smallest first.
    let mut sum = 0.0;
    for j in (1..=terms).rev() {
        let j = j as f64;
        sum += a / (j * (j + a));
    }
    let edge = terms as f64 + 0.5;
    let remainder = ((edge + a) / edge).ln();
    Ok(-EULER_GAMMA + sum + remainder)
}

/// H_m = Σ_{k=1}^{m} 1/k, with H_0 = 0.
pub fn harmonic(m: i64) -> Result<f64> {
    if m < 0 {
        return Err(Error::domain("harmonic", format!("index must be non-negative, got {m}")));
    }
    Ok((1..=m).rev().map(|k| 1.0 / k as f64).sum())
}
