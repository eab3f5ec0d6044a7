//! Radial functions on the unit ball and the integrals built on them.
//!
//! Every ball integral is reduced to `ω_{N−1} ∫₀¹ r^{N−1} g(r) dr`. For
//! piecewise-linear profiles the gradient integrals are summed in closed
//! form per segment; everything else goes through the graded
//! Gauss–Legendre rule of [`QuadratureSpec`].

mod profile;
mod quadrature;

pub use profile::{FnShape, PiecewiseLinear, RadialProfile, RadialShape};
pub use quadrature::{gauss_legendre, pairwise_sum, QuadratureSpec, RadialRule};

use crate::constants::{alpha_n, ball_volume, sphere_measure, ExponentPair};
use crate::error::{Error, Result};
use crate::functional::{mt_integrand, FpEvaluator};

fn omega(dim: u32) -> Result<f64> {
    sphere_measure(i64::from(dim))
}

fn ball_rule(u: &RadialProfile, dim: u32, quad: &QuadratureSpec, hi: f64) -> Result<RadialRule> {
    quad.validate()?;
    Ok(quad.radial_rule(dim, omega(dim)?, 0.0, hi, &u.breakpoints()))
}

/// `ω_{N−1} ∫₀^hi r^{N−1} |v'(r)|^q dr`.
fn gradient_energy(u: &RadialProfile, dim: u32, q: f64, hi: f64, quad: &QuadratureSpec) -> Result<f64> {
    if let Some(pwl) = u.as_piecewise_linear() {
        return Ok(pwl.gradient_energy(dim, omega(dim)?, q, hi));
    }
    let rule = ball_rule(u, dim, quad, hi)?;
    rule.integrate(|r| {
        let d = u.derivative(r);
        if d.is_finite() {
            Ok(d.abs().powf(q))
        } else {
            Err(Error::NonFinite {
                op: "grad_norm",
                radius: Some(r),
            })
        }
    })
}

/// `‖∇u‖_{L^q(B)}` for any exponent `q ≥ 1`.
pub fn grad_norm(u: &RadialProfile, dim: u32, q: f64, quad: &QuadratureSpec) -> Result<f64> {
    grad_norm_within(u, dim, q, 1.0, quad)
}

/// `‖∇u‖_{L^q(B_ρ)}`, the gradient norm restricted to the ball of radius `ρ`.
pub fn grad_norm_within(u: &RadialProfile, dim: u32, q: f64, radius: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::domain("grad_norm", format!("exponent must be ≥ 1, got {q}")));
    }
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(Error::domain("grad_norm", format!("radius must lie in (0, 1], got {radius}")));
    }
    Ok(gradient_energy(u, dim, q, radius, quad)?.powf(1.0 / q))
}

pub fn grad_p_norm(u: &RadialProfile, pair: &ExponentPair, quad: &QuadratureSpec) -> Result<f64> {
    grad_norm(u, pair.dim(), pair.p(), quad)
}

/// `∫_B |u|^q dx`.
pub fn power_integral(u: &RadialProfile, q: f64, dim: u32, quad: &QuadratureSpec) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::domain("lq_norm", format!("exponent must be ≥ 1, got {q}")));
    }
    ball_rule(u, dim, quad, 1.0)?.integrate(|r| Ok(u.value(r).abs().powf(q)))
}

/// `‖u‖_{L^q(B)}`.
pub fn lq_norm(u: &RadialProfile, q: f64, dim: u32, quad: &QuadratureSpec) -> Result<f64> {
    Ok(power_integral(u, q, dim, quad)?.powf(1.0 / q))
}

/// `∫_B g(u(x)) dx` for an arbitrary pointwise integrand `g`.
pub fn integrate_with<G>(u: &RadialProfile, dim: u32, quad: &QuadratureSpec, g: G) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    ball_rule(u, dim, quad, 1.0)?.integrate(|r| g(u.value(r)))
}

/// `∫_B F_p(u) dx`.
pub fn integrate_f_p(u: &RadialProfile, ev: &FpEvaluator, quad: &QuadratureSpec) -> Result<f64> {
    integrate_with(u, ev.pair().dim(), quad, |s| ev.f_p(s))
}

/// `∫_B exp(α_N |u|^{N/(N−1)}) dx`.
pub fn integrate_mt(u: &RadialProfile, dim: u32, quad: &QuadratureSpec) -> Result<f64> {
    let d = i64::from(dim);
    integrate_with(u, dim, quad, |s| mt_integrand(s, d))
}

/// `∫_B H(u) dx`; needs `p > 2N/(N+1)`.
pub fn integrate_h(u: &RadialProfile, ev: &FpEvaluator, quad: &QuadratureSpec) -> Result<f64> {
    ev.pair().require_level_formula("integrate_h")?;
    integrate_with(u, ev.pair().dim(), quad, |s| ev.h_correction(s))
}

/// `(r^{−k} − 1)/k` with `k = (N−q)/(q−1)`, i.e. `∫_r^1 s^{−(N−1)/(q−1)} ds`;
/// equals `ln(1/r)` when `q = N`.
fn radial_weight_integral(dim: u32, q: f64, r: f64) -> f64 {
    let k = (f64::from(dim) - q) / (q - 1.0);
    let l = -r.ln();
    if k == 0.0 {
        l
    } else {
        (k * l).exp_m1() / k
    }
}

/// Coefficient `c(r)` of the pointwise bound `|u(r)| ≤ c(r) ‖∇u‖_{L^p(B)}`
/// for radial functions with zero trace and `1 < p < N`:
/// `c(r) = (|B|^{1/p−1/N} α_N^{(N−1)/N})^{−1} {N (p−1)/(N−p) (r^{−(N−p)/(p−1)} − 1)}^{(p−1)/p}`.
pub fn radial_bound(pair: &ExponentPair, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain("radial_bound", format!("radius must lie in (0, 1), got {r}")));
    }
    let dim = i64::from(pair.dim());
    let n = pair.n();
    let p = pair.p();
    let scale = ball_volume(dim)?.powf(1.0 / p - 1.0 / n) * alpha_n(dim)?.powf((n - 1.0) / n);
    let inner = n * radial_weight_integral(pair.dim(), p, r);
    let c = inner.powf((p - 1.0) / p) / scale;
    if !c.is_finite() {
        return Err(Error::Overflow {
            op: "radial_bound",
            log_value: ((p - 1.0) / p) * inner.ln(),
            radius: Some(r),
        });
    }
    Ok(c)
}

/// Alvino coefficient `α_N^{−(N−1)/N} (N ln(1/r))^{(N−1)/N}`, the `p = N` case.
pub fn alvino_bound(dim: u32, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain("alvino_bound", format!("radius must lie in (0, 1), got {r}")));
    }
    let n = f64::from(dim);
    let e = (n - 1.0) / n;
    Ok(alpha_n(i64::from(dim))?.powf(-e) * (-n * r.ln()).powf(e))
}

/// The three quantities in `|v(r)| ≤ ∫_r^1 |v'| ≤ (∫_r^1 s^{N−1}|v'|^q)^{1/q} (∫_r^1 s^{−(N−1)/(q−1)})^{(q−1)/q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderChain {
    pub value: f64,
    pub path_integral: f64,
    pub holder_bound: f64,
}

/// Evaluates [`HolderChain`] at radius `r` for exponent `1 < q ≤ N`.
pub fn holder_chain(u: &RadialProfile, dim: u32, q: f64, r: f64, quad: &QuadratureSpec) -> Result<HolderChain> {
    if !(r > 0.0 && r < 1.0) || !(q > 1.0) {
        return Err(Error::domain("holder_chain", format!("need r in (0, 1) and q > 1, got r = {r}, q = {q}")));
    }
    let path_rule = quad.radial_rule(1, 1.0, r, 1.0, &u.breakpoints());
    let path_integral = path_rule.integrate(|s| Ok(u.derivative(s).abs()))?;
    let energy_rule = quad.radial_rule(dim, 1.0, r, 1.0, &u.breakpoints());
    let energy = energy_rule.integrate(|s| Ok(u.derivative(s).abs().powf(q)))?;
    let holder_bound = energy.powf(1.0 / q) * radial_weight_integral(dim, q, r).powf((q - 1.0) / q);
    Ok(HolderChain {
        value: u.value(r).abs(),
        path_integral,
        holder_bound,
    })
}

/// Both forms of the pointwise radial bound at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaPoint {
    pub radius: f64,
    pub value: f64,
    pub bound: f64,
    /// `(bound − |u(r)|) / bound`.
    pub margin: f64,
    /// `N ln(1/r) − ln F_p(u(r)/‖∇u‖_p)`, i.e. the log form `F_p(·) ≤ r^{−N}`.
    pub fp_margin: f64,
    /// `|ln F_p(c(r)) − N ln(1/r)|`; zero when the two forms are equivalent.
    pub equivalence_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialLemmaReport {
    pub grad_norm: f64,
    pub points: Vec<LemmaPoint>,
}

impl RadialLemmaReport {
    pub fn worst_margin(&self) -> f64 {
        self.points
            .iter()
            .flat_map(|p| [p.margin, p.fp_margin])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.worst_margin() >= -slack
    }
}

pub fn radial_lemma_check(
    u: &RadialProfile,
    pair: &ExponentPair,
    radii: &[f64],
    quad: &QuadratureSpec,
) -> Result<RadialLemmaReport> {
    let norm = grad_p_norm(u, pair, quad)?;
    if norm == 0.0 {
        return Err(Error::Degenerate {
            op: "radial_lemma_check",
            detail: "profile has zero gradient norm".into(),
        });
    }
    let ev = FpEvaluator::new(*pair)?;
    let n = pair.n();
    let points = radii
        .iter()
        .map(|&r| {
            let c = radial_bound(pair, r)?;
            let value = u.value(r).abs();
            let bound = c * norm;
            let log_target = -n * r.ln();
            Ok(LemmaPoint {
                radius: r,
                value,
                bound,
                margin: (bound - value) / bound,
                fp_margin: log_target - ev.log_f_p(value / norm),
                equivalence_residual: (ev.log_f_p(c) - log_target).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialLemmaReport { grad_norm: norm, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn tent() -> RadialProfile {
        PiecewiseLinear::tent(1.0).into()
    }

    fn smooth_tent() -> RadialProfile {
        RadialProfile::analytic(FnShape::new(|r: f64| 1.0 - r, |_| -1.0))
    }

    fn pair(n: i64, p: f64) -> ExponentPair {
        ExponentPair::new(n, p).unwrap()
    }

    fn random_pwl(rng: &mut ChaCha8Rng) -> PiecewiseLinear {
        let k = rng.gen_range(3..=30);
        let mut knots: Vec<f64> = (0..k - 2).map(|_| rng.gen_range(0.0..1.0)).collect();
        knots.push(0.0);
        knots.push(1.0);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let values = knots.iter().map(|_| rng.gen_range(-2.0..2.0)).collect();
        PiecewiseLinear::with_zero_boundary(knots, values).unwrap()
    }

    #[test]
    fn tent_norms() {
        let q = QuadratureSpec::default();
        assert!((grad_p_norm(&tent(), &pair(2, 1.5), &q).unwrap() - PI.powf(1.0 / 1.5)).abs() < 1e-14);
        // N = 2, p = 2: (2π ∫ r dr)^{1/2} = √π, through the analytic path too
        let two = grad_norm(&smooth_tent(), 2, 2.0, &q).unwrap();
        assert!((two - PI.sqrt()).abs() < 1e-12);
        assert!((grad_norm(&tent(), 2, 2.0, &q).unwrap() - PI.sqrt()).abs() < 1e-14);
        // 2π ∫ r(1 − r) dr = π/3
        assert!((lq_norm(&tent(), 1.0, 2, &q).unwrap() - PI / 3.0).abs() < 1e-12);
        let zero: RadialProfile = PiecewiseLinear::zero().into();
        assert_eq!(grad_norm(&zero, 3, 2.0, &q).unwrap(), 0.0);
        assert_eq!(lq_norm(&zero, 2.0, 3, &q).unwrap(), 0.0);
    }

    #[test]
    fn zero_profile_integrals() {
        let q = QuadratureSpec::default();
        let zero: RadialProfile = PiecewiseLinear::zero().into();
        for (n, p) in [(2, 1.5), (3, 2.2), (5, 4.0)] {
            let ev = FpEvaluator::new(pair(n, p)).unwrap();
            let vol = ball_volume(n).unwrap();
            assert!((integrate_f_p(&zero, &ev, &q).unwrap() - vol).abs() < 1e-10 * vol);
            assert!((integrate_mt(&zero, n as u32, &q).unwrap() - vol).abs() < 1e-10 * vol);
            assert_eq!(integrate_h(&zero, &ev, &q).unwrap(), 0.0);
        }
    }

    #[test]
    fn h_integral_needs_threshold() {
        let ev = FpEvaluator::new(pair(2, 1.2)).unwrap();
        assert!(matches!(integrate_h(&tent(), &ev, &QuadratureSpec::default()), Err(Error::Precondition { .. })));
        let ev = FpEvaluator::new(pair(2, 1.5)).unwrap();
        let h = integrate_h(&tent(), &ev, &QuadratureSpec::default()).unwrap();
        assert!(h > 0.0 && h.is_finite());
    }

    #[test]
    fn overflow_reports_radius() {
        let ev = FpEvaluator::new(pair(2, 1.5)).unwrap();
        let huge: RadialProfile = PiecewiseLinear::tent(1e90).into();
        match integrate_f_p(&huge, &ev, &QuadratureSpec::default()) {
            Err(Error::Overflow { radius: Some(r), .. }) => assert!(r > 0.0 && r < 1.0),
            other => panic!("expected overflow with radius, got {other:?}"),
        }
    }

    #[test]
    fn pwl_gradient_is_mesh_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let coarse = QuadratureSpec::new(5, 4, 1.0, 1e-3).unwrap();
        for _ in 0..50 {
            let p = random_pwl(&mut rng);
            let exact = grad_norm(&p.clone().into(), 3, 2.5, &coarse).unwrap();
            let (pv, pd) = (p.clone(), p.clone());
            let via_quad = RadialProfile::analytic(
                FnShape::new(move |r| pv.value(r), move |r| pd.derivative(r)).with_breakpoints(p.knots().to_vec()),
            );
            let quad = grad_norm(&via_quad, 3, 2.5, &QuadratureSpec::default()).unwrap();
            assert!((exact - quad).abs() <= 1e-12 * exact.max(1.0));
        }
    }

    #[test]
    fn norms_scale_linearly() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let q = QuadratureSpec::default();
        for _ in 0..20 {
            let u: RadialProfile = random_pwl(&mut rng).into();
            let c: f64 = rng.gen_range(-5.0..5.0);
            let g = grad_norm(&u.scaled(c), 3, 2.0, &q).unwrap();
            assert!((g - c.abs() * grad_norm(&u, 3, 2.0, &q).unwrap()).abs() < 1e-11 * (1.0 + g));
            let l = lq_norm(&u.scaled(c), 4.0, 3, &q).unwrap();
            assert!((l - c.abs() * lq_norm(&u, 4.0, 3, &q).unwrap()).abs() < 1e-11 * (1.0 + l));
        }
    }

    #[test]
    fn sobolev_inequality_for_random_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let q = QuadratureSpec::default();
        for _ in 0..100 {
            let n = rng.gen_range(2..=5);
            let p = rng.gen_range(1.1..n as f64 - 0.1);
            let e = pair(n, p);
            let s = crate::constants::sobolev_constant(&e).unwrap();
            let u: RadialProfile = random_pwl(&mut rng).into();
            let lhs = s * lq_norm(&u, e.p_star(), n as u32, &q).unwrap();
            assert!(lhs <= grad_p_norm(&u, &e, &q).unwrap() + 1e-6);
        }
    }

    #[test]
    fn radial_lemma_on_tent() {
        let e = pair(2, 1.5);
        let report = radial_lemma_check(&tent(), &e, &[0.5], &QuadratureSpec::default()).unwrap();
        assert!(report.holds(1e-9));
        let pt = report.points[0];
        assert!(pt.margin > 0.0 && pt.fp_margin > 0.0);
        assert!(pt.equivalence_residual < 1e-10);
        let zero: RadialProfile = PiecewiseLinear::zero().into();
        assert!(matches!(
            radial_lemma_check(&zero, &e, &[0.5], &QuadratureSpec::default()),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn radial_bound_is_the_holder_bound() {
        // ω^{−1/p} ((r^{−k} − 1)/k)^{(p−1)/p} written two ways
        for (n, p) in [(2, 1.5), (3, 2.5), (4, 1.7)] {
            let e = pair(n, p);
            let om = sphere_measure(n).unwrap();
            for r in [0.01, 0.3, 0.9] {
                let direct = om.powf(-1.0 / p) * radial_weight_integral(n as u32, p, r).powf((p - 1.0) / p);
                assert!((radial_bound(&e, r).unwrap() - direct).abs() < 1e-12 * direct);
            }
        }
    }

    #[test]
    fn radial_bound_tends_to_alvino() {
        for n in 2..=5u32 {
            let e = pair(i64::from(n), f64::from(n) - 1e-6);
            for i in 0..=8 {
                let r = 0.1 + 0.1 * f64::from(i);
                let a = radial_bound(&e, r).unwrap();
                let b = alvino_bound(n, r).unwrap();
                assert!((a - b).abs() / b < 1e-3, "N = {n}, r = {r}");
            }
        }
    }

    #[test]
    fn holder_chain_is_ordered() {
        let u = tent();
        let c = holder_chain(&u, 3, 2.0, 0.25, &QuadratureSpec::default()).unwrap();
        assert!((c.value - 0.75).abs() < 1e-15);
        assert!((c.path_integral - 0.75).abs() < 1e-12);
        assert!(c.path_integral <= c.holder_bound + 1e-12);
    }
}
