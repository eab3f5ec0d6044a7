//! Closed-form scalars attached to a dimension `N` and exponent `p`.
//!
//! Everything that involves the diverging power `γ = N(p−1)/(N−p)` is
//! evaluated as `exp(γ · ln x)`; no quantity here is ever computed at
//! `p = N` itself. The usable range documented for the `p → N` limits is
//! `p ≤ N − 1e-8`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{gamma, harmonic, log_gamma};

/// Largest natural log that still exponentiates to a finite f64.
pub const MAX_LN: f64 = 709.782_712_893_384;

/// A dimension `N ≥ 2` together with an exponent `1 < p < N` and the
/// exponents derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPair {
    dim: u32,
    p: f64,
    p_star: f64,
    p_conj: f64,
    gamma_exp: f64,
    level_formula_valid: bool,
}

impl ExponentPair {
    pub fn new(dim: i64, p: f64) -> Result<Self> {
        if dim < 2 || dim > 1_000 {
            return Err(Error::domain("ExponentPair", format!("dimension must be in [2, 1000], got {dim}")));
        }
        let n = dim as f64;
        if !p.is_finite() || p <= 1.0 || p >= n {
            return Err(Error::domain(
                "ExponentPair",
                format!("exponent must satisfy 1 < p < N = {dim}, got p = {p}"),
            ));
        }
        Ok(Self {
            dim: dim as u32,
            p,
            p_star: n * p / (n - p),
            p_conj: p / (p - 1.0),
            gamma_exp: n * (p - 1.0) / (n - p),
            level_formula_valid: p > level_threshold(dim as u32),
        })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn n(&self) -> f64 {
        f64::from(self.dim)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Critical Sobolev exponent `Np/(N−p)`.
    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    /// Hölder conjugate `p/(p−1)`.
    pub fn p_conj(&self) -> f64 {
        self.p_conj
    }

    /// `γ = N(p−1)/(N−p)`, the outer power of `F_p`.
    pub fn gamma_exp(&self) -> f64 {
        self.gamma_exp
    }

    /// Whether `p > 2N/(N+1)`, i.e. `γ > 1`. The closed form of the
    /// concentration level and the `H` correction need this.
    pub fn level_formula_valid(&self) -> bool {
        self.level_formula_valid
    }

    pub(crate) fn require_level_formula(&self, op: &'static str) -> Result<()> {
        if self.level_formula_valid {
            Ok(())
        } else {
            Err(Error::precondition(
                op,
                format!(
                    "requires p > 2N/(N+1) = {:.6} (N = {}, p = {})",
                    level_threshold(self.dim),
                    self.dim,
                    self.p
                ),
            ))
        }
    }
}

/// `2N/(N+1)`.
pub fn level_threshold(dim: u32) -> f64 {
    let n = f64::from(dim);
    2.0 * n / (n + 1.0)
}

/// Volume of the unit ball in `R^N`, `π^{N/2} / Γ(1 + N/2)`.
pub fn ball_volume(dim: i64) -> Result<f64> {
    if dim < 1 {
        return Err(Error::domain("ball_volume", format!("dimension must be ≥ 1, got {dim}")));
    }
    let half = dim as f64 / 2.0;
    Ok(PI.powf(half) / gamma(1.0 + half)?)
}

/// Surface measure of the unit sphere `S^{N−1}`, equal to `N · |B|`.
pub fn sphere_measure(dim: i64) -> Result<f64> {
    Ok(dim as f64 * ball_volume(dim)?)
}

/// Critical Moser exponent `α_N = N ω_{N−1}^{1/(N−1)}`.
pub fn alpha_n(dim: i64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::domain("alpha_n", format!("dimension must be ≥ 2, got {dim}")));
    }
    let n = dim as f64;
    Ok(n * sphere_measure(dim)?.powf(1.0 / (n - 1.0)))
}

/// `α_p = (α_N^{(N−1)/N} |B|^{1/p − 1/N})^{p/(p−1)}`, in log space.
pub fn alpha_p(pair: &ExponentPair) -> Result<f64> {
    Ok(log_alpha_p(pair)?.exp())
}

fn log_alpha_p(pair: &ExponentPair) -> Result<f64> {
    let n = pair.n();
    let dim = i64::from(pair.dim());
    let inner = (n - 1.0) / n * alpha_n(dim)?.ln() + (1.0 / pair.p() - 1.0 / n) * ball_volume(dim)?.ln();
    Ok(pair.p_conj() * inner)
}

fn log_sobolev_constant(pair: &ExponentPair) -> Result<f64> {
    let n = pair.n();
    let p = pair.p();
    let bracket = log_gamma(n / p)? + log_gamma(n + 1.0 - n / p)? - log_gamma(n)? - log_gamma(1.0 + n / 2.0)?;
    let log_s = 0.5 * PI.ln() + n.ln() / p + (p - 1.0) / p * ((n - p) / (p - 1.0)).ln() + bracket / n;
    if !log_s.is_finite() {
        return Err(Error::NonFinite {
            op: "sobolev_constant",
            radius: None,
        });
    }
    Ok(log_s)
}

/// Sharp Sobolev constant `S_p = inf ‖∇u‖_p / ‖u‖_{p*}` (Aubin–Talenti),
/// from its Gamma-function closed form.
pub fn sobolev_constant(pair: &ExponentPair) -> Result<f64> {
    Ok(log_sobolev_constant(pair)?.exp())
}

fn exp_checked(op: &'static str, log_value: f64) -> Result<f64> {
    if !log_value.is_finite() {
        return Err(Error::NonFinite { op, radius: None });
    }
    if log_value > MAX_LN {
        return Err(Error::Overflow {
            op,
            log_value,
            radius: None,
        });
    }
    Ok(log_value.exp())
}

/// Concentration level `M_p = |B| + [coef]^γ S_p^{−p*}` with
/// `coef = (N−p)/(N(p−1)) α_p`. Requires `p > 2N/(N+1)`.
pub fn concentration_level(pair: &ExponentPair) -> Result<f64> {
    pair.require_level_formula("concentration_level")?;
    let vol = ball_volume(i64::from(pair.dim()))?;
    let log_coef = log_alpha_p(pair)? - pair.gamma_exp().ln();
    let log_excess = pair.gamma_exp() * log_coef - pair.p_star() * log_sobolev_constant(pair)?;
    Ok(vol + exp_checked("concentration_level", log_excess)?)
}

/// `ln[Γ(N) / (Γ(N/p) Γ(N+1−N/p))]`. Divided by `t = (N−p)/p` it tends
/// to `ψ(N) − ψ(1) = H_{N−1}` as `p → N`.
pub fn log_gamma_ratio(pair: &ExponentPair) -> Result<f64> {
    let n = pair.n();
    let p = pair.p();
    let t = (n - p) / p;
    if t < 0.5 {
        // Γ(N)/(Γ(1+t) Γ(N−t)) = [sin(πt)/(πt)] / Π_{j<N} (1 − t/j), free of
        // the cancellation between the three log-Gammas near p = N
        let product: f64 = (1..pair.dim()).map(|j| (-t / f64::from(j)).ln_1p()).sum();
        return Ok(-product - log_x_over_sin(PI * t));
    }
    Ok(log_gamma(n)? - log_gamma(n / p)? - log_gamma(n + 1.0 - n / p)?)
}

/// `ln(x / sin x)` for `0 ≤ x < π`.
fn log_x_over_sin(x: f64) -> f64 {
    if x < 0.05 {
        let x2 = x * x;
        x2 * (1.0 / 6.0 + x2 * (1.0 / 180.0 + x2 * (1.0 / 2835.0 + x2 * (1.0 / 37800.0 + x2 / 467775.0))))
    } else {
        -(x.sin() / x).ln()
    }
}

/// `M_p = |B| (1 + [Γ(N) / (Γ(N/p) Γ(N+1−N/p))]^{p/(N−p)})`, the
/// simplified Gamma-ratio form of [`concentration_level`].
pub fn concentration_level_gamma_form(pair: &ExponentPair) -> Result<f64> {
    pair.require_level_formula("concentration_level_gamma_form")?;
    let vol = ball_volume(i64::from(pair.dim()))?;
    let power = pair.p() / (pair.n() - pair.p());
    let excess = exp_checked("concentration_level_gamma_form", power * log_gamma_ratio(pair)?)?;
    Ok(vol * (1.0 + excess))
}

/// Carleson–Chang level `|B| (1 + e^{H_{N−1}})`.
pub fn carleson_chang_limit(dim: i64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::domain("carleson_chang_limit", format!("dimension must be ≥ 2, got {dim}")));
    }
    Ok(ball_volume(dim)? * (1.0 + harmonic(dim - 1)?.exp()))
}

/// Every closed-form scalar for one exponent pair.
///
/// `leading = coef^γ` underflows to zero for `p` very close to `N`; the
/// log form `log_leading` is always finite and is what the evaluators use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormConstants {
    pub vol_ball: f64,
    pub omega: f64,
    pub alpha_n: f64,
    pub alpha_p: f64,
    pub coef: f64,
    pub log_leading: f64,
    pub leading: f64,
    pub sobolev: f64,
    pub m_p: Option<f64>,
    pub m_p_gamma_form: Option<f64>,
    pub cc_limit: f64,
}

impl ClosedFormConstants {
    pub fn new(pair: &ExponentPair) -> Result<Self> {
        let dim = i64::from(pair.dim());
        let vol_ball = ball_volume(dim)?;
        let log_alpha = log_alpha_p(pair)?;
        let log_coef = log_alpha - pair.gamma_exp().ln();
        let log_leading = pair.gamma_exp() * log_coef;
        let (m_p, m_p_gamma_form) = if pair.level_formula_valid() {
            (Some(concentration_level(pair)?), Some(concentration_level_gamma_form(pair)?))
        } else {
            (None, None)
        };
        Ok(Self {
            vol_ball,
            omega: sphere_measure(dim)?,
            alpha_n: alpha_n(dim)?,
            alpha_p: log_alpha.exp(),
            coef: log_coef.exp(),
            log_leading,
            leading: log_leading.exp(),
            sobolev: sobolev_constant(pair)?,
            m_p,
            m_p_gamma_form,
            cc_limit: carleson_chang_limit(dim)?,
        })
    }

    pub fn log_coef(&self) -> f64 {
        self.coef.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::digamma;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn pair(n: i64, p: f64) -> ExponentPair {
        ExponentPair::new(n, p).unwrap()
    }

    #[test]
    fn exponent_pair_rejects_out_of_range() {
        assert!(ExponentPair::new(1, 0.5).is_err());
        assert!(ExponentPair::new(2, 1.0).is_err());
        assert!(ExponentPair::new(2, 2.0).is_err());
        assert!(ExponentPair::new(2, 2.5).is_err());
        assert!(ExponentPair::new(3, f64::NAN).is_err());
        assert!(!pair(2, 1.2).level_formula_valid());
        assert!(pair(2, 1.5).level_formula_valid());
        // exactly at 2N/(N+1) the closed form is not available
        assert!(!pair(2, 4.0 / 3.0).level_formula_valid());
    }

    #[test]
    fn exponent_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let n = rng.gen_range(2..=10);
            let p = rng.gen_range(1.0001..(n as f64 - 1e-4));
            let e = pair(n, p);
            assert!(e.p_star() > e.p());
            assert!(e.gamma_exp() > 0.0);
            assert!(rel(e.gamma_exp() * e.p_conj(), e.p_star()) < 1e-12);
        }
    }

    #[test]
    fn ball_volumes() {
        assert!(rel(ball_volume(2).unwrap(), PI) < 1e-15);
        assert!(rel(ball_volume(3).unwrap(), 4.0 * PI / 3.0) < 1e-14);
        assert!(rel(ball_volume(4).unwrap(), PI * PI / 2.0) < 1e-15);
        assert!(ball_volume(0).is_err());
        for n in 2..=10 {
            assert!(rel(sphere_measure(n).unwrap(), n as f64 * ball_volume(n).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn alpha_n_values() {
        assert!(rel(alpha_n(2).unwrap(), 4.0 * PI) < 1e-15);
        assert!(rel(alpha_n(3).unwrap(), 10.634_723_105_433_096) < 1e-14);
        assert!(rel(alpha_n(4).unwrap(), 4.0 * (2.0 * PI * PI).cbrt()) < 1e-14);
        assert!(alpha_n(1).is_err());
    }

    #[test]
    fn alpha_p_values() {
        // mpmath at 40 digits
        assert!(rel(alpha_p(&pair(2, 1.5)).unwrap(), 78.956_835_208_714_868_951) < 1e-13);
        assert!(rel(alpha_p(&pair(3, 2.0)).unwrap(), 37.699_111_843_077_518_862) < 1e-13);
        // direct evaluation of the displayed form
        let a2 = 4.0 * PI;
        let direct = (a2.sqrt() * PI.powf(1.0 / 6.0)).powi(3);
        assert!(rel(alpha_p(&pair(2, 1.5)).unwrap(), direct) < 1e-13);
        for n in 2..=6 {
            let near = alpha_p(&pair(n, n as f64 - 1e-8)).unwrap();
            assert!(rel(near, alpha_n(n).unwrap()) < 1e-6);
        }
    }

    #[test]
    fn sobolev_constant_values() {
        let s32 = sobolev_constant(&pair(3, 2.0)).unwrap();
        assert!(rel(s32, 2.340_492_275_042_011_727_8) < 1e-13);
        // sqrt(3π)·(√π/4)^{1/3}
        let hand = (3.0 * PI).sqrt() * (PI.sqrt() / 4.0).cbrt();
        assert!(rel(s32, hand) < 1e-13);
        assert!(rel(sobolev_constant(&pair(2, 1.5)).unwrap(), 2.526_183_904_594_745_735_3) < 1e-13);
        assert!(rel(sobolev_constant(&pair(2, 1.6)).unwrap(), 2.142_977_112_928_323_445_5) < 1e-13);
    }

    #[test]
    fn concentration_level_values() {
        let e = pair(2, 1.5);
        let m = concentration_level(&e).unwrap();
        assert!(rel(m, 9.138_532_478_590_267_490_5) < 1e-12);
        assert!(rel(concentration_level_gamma_form(&e).unwrap(), 9.138_532_478_590_267_490_5) < 1e-12);
        let g43 = gamma(4.0 / 3.0).unwrap();
        let g53 = gamma(5.0 / 3.0).unwrap();
        assert!(rel(m, PI * (1.0 + (1.0 / (g43 * g53)).powi(3))) < 1e-12);
        assert!(rel(concentration_level(&pair(3, 2.0)).unwrap(), 16.260_987_369_682_748_305) < 1e-12);
        assert!(matches!(concentration_level(&pair(2, 1.2)), Err(Error::Precondition { .. })));
        assert!(concentration_level_gamma_form(&pair(2, 1.2)).is_err());
    }

    #[test]
    fn dual_forms_agree_on_grid() {
        for n in 2..=6 {
            let lo = level_threshold(n as u32);
            let nf = n as f64;
            for i in 1..=20 {
                let p = lo + (nf - lo) * i as f64 / 21.0;
                let e = pair(n, p);
                let a = concentration_level(&e).unwrap();
                let b = concentration_level_gamma_form(&e).unwrap();
                assert!(rel(a, b) < 1e-9, "N = {n}, p = {p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn dual_forms_agree_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(2..=6);
            let lo = level_threshold(n as u32);
            let p = rng.gen_range(lo + 1e-3..n as f64 - 1e-3);
            let e = pair(n, p);
            let a = concentration_level(&e).unwrap();
            let b = concentration_level_gamma_form(&e).unwrap();
            assert!(rel(a, b) < 1e-9, "N = {n}, p = {p}");
        }
    }

    #[test]
    fn carleson_chang_values() {
        let e = std::f64::consts::E;
        assert!(rel(carleson_chang_limit(2).unwrap(), PI * (1.0 + e)) < 1e-14);
        assert!(rel(carleson_chang_limit(2).unwrap(), 11.681_326_876_263_360_304) < 1e-14);
        assert!(rel(carleson_chang_limit(3).unwrap(), 4.0 * PI / 3.0 * (1.0 + 1.5_f64.exp())) < 1e-14);
        assert!(carleson_chang_limit(1).is_err());
    }

    #[test]
    fn level_tends_to_carleson_chang() {
        let cc = carleson_chang_limit(2).unwrap();
        let m = concentration_level(&pair(2, 2.0 - 1e-6)).unwrap();
        assert!(rel(m, cc) < 1e-4);
        let mg = concentration_level_gamma_form(&pair(2, 2.0 - 1e-6)).unwrap();
        assert!(mg.is_finite() && rel(mg, cc) < 1e-4);
        let mut last = f64::INFINITY;
        for k in 1..=6 {
            let gap = (concentration_level(&pair(2, 2.0 - 10f64.powi(-k))).unwrap() - cc).abs();
            assert!(gap < last, "k = {k}");
            last = gap;
        }
    }

    #[test]
    fn gamma_ratio_slope_is_harmonic() {
        for n in 2..=6 {
            let e = pair(n, n as f64 - 1e-5);
            let t = (e.n() - e.p()) / e.p();
            let slope = log_gamma_ratio(&e).unwrap() / t;
            let h = harmonic(n - 1).unwrap();
            assert!((slope - h).abs() < 1e-3, "N = {n}");
            let psi = digamma(e.n()).unwrap() - digamma(1.0).unwrap();
            assert!((psi - h).abs() < 1e-12);
        }
    }

    #[test]
    fn bundle_is_consistent() {
        let c = ClosedFormConstants::new(&pair(2, 1.5)).unwrap();
        assert!(rel(c.omega, 2.0 * c.vol_ball) < 1e-12);
        assert!(rel(c.leading, c.coef.powf(2.0)) < 1e-12);
        assert!(c.m_p.is_some() && c.m_p_gamma_form.is_some());
        let low = ClosedFormConstants::new(&pair(2, 1.2)).unwrap();
        assert!(low.m_p.is_none());
        for v in [low.vol_ball, low.omega, low.alpha_n, low.alpha_p, low.coef, low.leading, low.sobolev, low.cc_limit] {
            assert!(v > 0.0);
        }
    }
}
