//! Pointwise evaluation of the power-type integrand
//! `F_p(s) = [1 + coef |s|^{p/(p−1)}]^γ`, its q-exponential form, the
//! exponential integrand it approximates, and the correction term `H` that
//! closes the two-sided bound `1 + coef^γ |s|^{p*} ≤ F_p(s) ≤ … + H(s)`.

use crate::constants::{alpha_n, ClosedFormConstants, ExponentPair, MAX_LN};
use crate::error::{Error, Result};

fn check_finite(op: &'static str, s: f64) -> Result<()> {
    if s.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { op, radius: None })
    }
}

fn exp_checked(op: &'static str, log_value: f64) -> Result<f64> {
    if log_value > MAX_LN {
        Err(Error::Overflow {
            op,
            log_value,
            radius: None,
        })
    } else {
        Ok(log_value.exp())
    }
}

/// `exp(log_scale + power · ln|s|)`, returning 0 at `s = 0`.
fn scaled_power(log_scale: f64, power: f64, s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        (log_scale + power * s.abs().ln()).exp()
    }
}

/// Evaluator for one exponent pair; immutable once built.
///
/// With `b = coef |s|^{p/(p−1)}` the elementary bound for `(1 + b)^γ`
/// fixes the correction constants as `C1 = γ 2^{γ−1} coef` and
/// `C2 = γ 2^{γ−1} coef^{γ−1}`. They are stored as logarithms because
/// `2^{γ−1}` overflows long before `p` reaches `N`.
#[derive(Debug, Clone)]
pub struct FpEvaluator {
    pair: ExponentPair,
    consts: ClosedFormConstants,
    log_coef: f64,
    log_c1: Option<f64>,
    log_c2: Option<f64>,
}

impl FpEvaluator {
    pub fn new(pair: ExponentPair) -> Result<Self> {
        let consts = ClosedFormConstants::new(&pair)?;
        let log_coef = consts.log_coef();
        let g = pair.gamma_exp();
        let (log_c1, log_c2) = if pair.level_formula_valid() {
            let base = g.ln() + (g - 1.0) * std::f64::consts::LN_2;
            (Some(base + log_coef), Some(base + (g - 1.0) * log_coef))
        } else {
            (None, None)
        };
        Ok(Self {
            pair,
            consts,
            log_coef,
            log_c1,
            log_c2,
        })
    }

    pub fn pair(&self) -> &ExponentPair {
        &self.pair
    }

    pub fn constants(&self) -> &ClosedFormConstants {
        &self.consts
    }

    pub fn coef(&self) -> f64 {
        self.consts.coef
    }

    pub fn log_leading(&self) -> f64 {
        self.consts.log_leading
    }

    /// `C1`; `+∞` when it exceeds the f64 range. `None` below the threshold.
    pub fn c1(&self) -> Option<f64> {
        self.log_c1.map(f64::exp)
    }

    pub fn c2(&self) -> Option<f64> {
        self.log_c2.map(f64::exp)
    }

    /// `ln F_p(s)`; finite for every finite `s`.
    pub fn log_f_p(&self, s: f64) -> f64 {
        let b = scaled_power(self.log_coef, self.pair.p_conj(), s);
        self.pair.gamma_exp() * b.ln_1p()
    }

    pub fn f_p(&self, s: f64) -> Result<f64> {
        check_finite("f_p", s)?;
        exp_checked("f_p", self.log_f_p(s))
    }

    /// `1 + coef^γ |s|^{p*}`, the lower bound for `F_p(s)`.
    pub fn lower_bound(&self, s: f64) -> Result<f64> {
        check_finite("lower_bound", s)?;
        if s == 0.0 {
            return Ok(1.0);
        }
        let log_term = self.consts.log_leading + self.pair.p_star() * s.abs().ln();
        Ok(1.0 + exp_checked("lower_bound", log_term)?)
    }

    /// `H(s) = C1 |s|^{p/(p−1)} + C2 |s|^{p* − p/(p−1)}`.
    pub fn h_correction(&self, s: f64) -> Result<f64> {
        check_finite("h_correction", s)?;
        self.pair.require_level_formula("h_correction")?;
        let (Some(log_c1), Some(log_c2)) = (self.log_c1, self.log_c2) else {
            unreachable!("correction constants exist whenever the threshold holds")
        };
        if s == 0.0 {
            return Ok(0.0);
        }
        let ln_s = s.abs().ln();
        let pc = self.pair.p_conj();
        let first = exp_checked("h_correction", log_c1 + pc * ln_s)?;
        let second = exp_checked("h_correction", log_c2 + (self.pair.p_star() - pc) * ln_s)?;
        Ok(first + second)
    }

    /// `q` for which `F_p(s) = exp_q(α_p |s|^{p/(p−1)})`.
    pub fn q_index(&self) -> f64 {
        1.0 - 1.0 / self.pair.gamma_exp()
    }
}

/// Tsallis q-exponential `[1 + (1−q) r]^{1/(1−q)}`.
pub fn q_exp(q: f64, r: f64) -> Result<f64> {
    if !q.is_finite() || !r.is_finite() || q == 1.0 || r < 0.0 {
        return Err(Error::domain("q_exp", format!("need finite q ≠ 1 and r ≥ 0, got q = {q}, r = {r}")));
    }
    let arg = (1.0 - q) * r;
    if 1.0 + arg <= 0.0 {
        return Err(Error::domain("q_exp", format!("1 + (1−q) r = {} is not positive", 1.0 + arg)));
    }
    exp_checked("q_exp", arg.ln_1p() / (1.0 - q))
}

/// `exp(α_N |s|^{N/(N−1)})`.
pub fn mt_integrand(s: f64, dim: i64) -> Result<f64> {
    check_finite("mt_integrand", s)?;
    exp_checked("mt_integrand", log_mt_integrand(s, dim)?)
}

pub fn log_mt_integrand(s: f64, dim: i64) -> Result<f64> {
    let a = alpha_n(dim)?;
    let n = dim as f64;
    Ok(scaled_power(a.ln(), n / (n - 1.0), s))
}

/// Two-sided bound `a^g + b^g ≤ (a+b)^g ≤ a^g + b^g + g 2^{g−1}(a b^{g−1} + a^{g−1} b)`
/// for `a, b > 0`, `g > 1`. Returns `(lower, upper)`.
pub fn elementary_power_bounds(a: f64, b: f64, g: f64) -> Result<(f64, f64)> {
    let ok = a.is_finite() && b.is_finite() && g.is_finite() && a > 0.0 && b > 0.0 && g > 1.0;
    if !ok {
        return Err(Error::domain(
            "elementary_power_bounds",
            format!("need a, b > 0 and g > 1, got a = {a}, b = {b}, g = {g}"),
        ));
    }
    let lower = a.powf(g) + b.powf(g);
    let cross = g * 2f64.powf(g - 1.0) * (a * b.powf(g - 1.0) + a.powf(g - 1.0) * b);
    Ok((lower, lower + cross))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn ev(n: i64, p: f64) -> FpEvaluator {
        FpEvaluator::new(ExponentPair::new(n, p).unwrap()).unwrap()
    }

    #[test]
    fn f_p_basic_values() {
        let e = ev(2, 1.5);
        assert_eq!(e.f_p(0.0).unwrap(), 1.0);
        // coef = α_p/2 and γ = 2 here; value from mpmath
        assert!(rel(e.f_p(1.0).unwrap(), 1_638.502_291_752_753_864_7) < 1e-13);
        let alpha_p = e.constants().alpha_p;
        assert!(rel(e.f_p(1.0).unwrap(), (1.0 + alpha_p / 2.0).powi(2)) < 1e-13);
        assert!(rel(ev(3, 2.0).f_p(1.0).unwrap(), 2_496.841_830_634_555_223_8) < 1e-13);
        assert!(rel(ev(2, 1.6).f_p(1.0).unwrap(), 3_555.601_613_982_457_695_9) < 1e-13);
    }

    #[test]
    fn f_p_small_argument_keeps_precision() {
        let e = ev(3, 2.0);
        let s: f64 = 1e-12;
        // F_p(s) − 1 ≈ γ coef |s|^{p'} to first order
        let approx = e.pair().gamma_exp() * e.coef() * s.powf(e.pair().p_conj());
        assert!(rel(e.log_f_p(s), approx) < 1e-9);
    }

    #[test]
    fn f_p_overflow_is_reported() {
        let e = ev(2, 1.5);
        assert!(matches!(e.f_p(1e80), Err(Error::Overflow { .. })));
        assert!(matches!(e.f_p(f64::NAN), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn f_p_even_and_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let n = rng.gen_range(2..=6);
            let p = rng.gen_range(1.05..n as f64 - 0.05);
            let e = ev(n, p);
            let mut samples: Vec<f64> = (0..50).map(|_| rng.gen_range(0.0..3.0)).collect();
            samples.sort_by(f64::total_cmp);
            let mut last = 0.0;
            for s in samples {
                let v = e.log_f_p(s);
                assert_eq!(v, e.log_f_p(-s));
                assert!(v >= last && v >= 0.0);
                last = v;
            }
        }
    }

    #[test]
    fn q_exp_identities() {
        assert_eq!(q_exp(0.5, 0.0).unwrap(), 1.0);
        assert_eq!(q_exp(1.7, 0.0).unwrap(), 1.0);
        assert!(rel(q_exp(1.0 - 1e-8, 2.0).unwrap(), 2f64.exp()) < 1e-6);
        assert!(q_exp(1.0, 1.0).is_err());
        assert!(q_exp(3.0, 1.0).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..500 {
            let n = rng.gen_range(2..=5);
            let p = rng.gen_range(1.1..n as f64 - 0.1);
            let e = ev(n, p);
            let s: f64 = rng.gen_range(-3.0..3.0);
            let r = e.constants().alpha_p * s.abs().powf(e.pair().p_conj());
            let via_q = q_exp(e.q_index(), r);
            if let (Ok(a), Ok(b)) = (e.f_p(s), via_q) {
                assert!(rel(a, b) < 1e-10, "N = {n}, p = {p}, s = {s}");
            }
        }
    }

    #[test]
    fn mt_integrand_values() {
        assert_eq!(mt_integrand(0.0, 2).unwrap(), 1.0);
        assert!(rel(mt_integrand(1.0, 2).unwrap(), (4.0 * PI).exp()) < 1e-14);
        assert!(mt_integrand(100.0, 2).is_err());
    }

    #[test]
    fn pointwise_convergence_to_exponential() {
        for s in [0.3, 1.0, 2.0] {
            let target = mt_integrand(s, 2).unwrap();
            let mut last = f64::INFINITY;
            for k in 1..=6 {
                let gap = (ev(2, 2.0 - 10f64.powi(-k)).f_p(s).unwrap() - target).abs();
                assert!(gap < last, "s = {s}, k = {k}");
                last = gap;
            }
        }
    }

    #[test]
    fn h_correction_values() {
        let e = ev(2, 1.6);
        assert_eq!(e.h_correction(0.0).unwrap(), 0.0);
        // mpmath arithmetic from C1, C2
        assert!(rel(e.h_correction(2.0).unwrap(), 99_508.634_012_284_067_53) < 1e-12);
        assert!(matches!(ev(2, 1.2).h_correction(1.0), Err(Error::Precondition { .. })));
        assert!(ev(2, 1.2).c1().is_none());
    }

    #[test]
    fn sandwich_holds_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let e = ev(3, 2.2);
        for _ in 0..10_000 {
            let s: f64 = rng.gen_range(-4.0..4.0);
            let f = e.f_p(s).unwrap();
            let lo = e.lower_bound(s).unwrap();
            let hi = lo + e.h_correction(s).unwrap();
            assert!(lo <= f * (1.0 + 1e-12), "s = {s}");
            assert!(f <= hi * (1.0 + 1e-12), "s = {s}");
        }
    }

    #[test]
    fn leading_asymptotics() {
        let e = ev(2, 1.5);
        let mut last = f64::INFINITY;
        for s in [1e3_f64, 1e4, 1e6] {
            let ln_ratio = e.log_f_p(s) - e.pair().p_star() * s.ln();
            let drift = (ln_ratio - e.log_leading()).abs();
            assert!(drift < last);
            last = drift;
        }
        assert!(last < 1e-10);
    }

    #[test]
    fn elementary_bounds() {
        let (lo, hi) = elementary_power_bounds(1.0, 1.0, 2.0).unwrap();
        assert_eq!((lo, hi), (2.0, 10.0));
        let (lo, hi) = elementary_power_bounds(3.0, 0.1, 1.5).unwrap();
        let mid = 3.1_f64.powf(1.5);
        assert!(lo <= mid && mid <= hi);
        assert!(elementary_power_bounds(0.0, 1.0, 2.0).is_err());
        assert!(elementary_power_bounds(1.0, 1.0, 1.0).is_err());
    }
}
