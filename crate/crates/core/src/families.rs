//! Explicit profile families: the modified Aubin–Talenti bubble, the
//! truncated-logarithm Moser profile and the two-bubble sequence.

use crate::constants::{ball_volume, sphere_measure, ExponentPair};
use crate::error::{Error, Result};
use crate::radial::{grad_p_norm, PiecewiseLinear, QuadratureSpec, RadialProfile, RadialShape};
use crate::specfun::log_gamma;

/// Concentration scales used by the sweeps unless overridden.
pub const DEFAULT_EPSILONS: [f64; 7] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

/// Scale factors used by the two-bubble study.
pub const DEFAULT_BUBBLE_SCALES: [u32; 4] = [2, 8, 32, 128];

/// The Aubin–Talenti bubble `U(ρ) = (1 + ρ^{p'})^{−(N−p)/p}` on ℝ^N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AubinTalenti {
    pair: ExponentPair,
}

impl AubinTalenti {
    pub fn new(pair: ExponentPair) -> Self {
        Self { pair }
    }

    pub fn pair(&self) -> &ExponentPair {
        &self.pair
    }

    fn decay(&self) -> f64 {
        (self.pair.n() - self.pair.p()) / self.pair.p()
    }

    pub fn value(&self, rho: f64) -> f64 {
        (-self.decay() * rho.powf(self.pair.p_conj()).ln_1p()).exp()
    }

    /// `U'(ρ) = −((N−p)/(p−1)) ρ^{p'−1} (1 + ρ^{p'})^{−N/p}`.
    pub fn derivative(&self, rho: f64) -> f64 {
        let (n, p, pc) = (self.pair.n(), self.pair.p(), self.pair.p_conj());
        if rho <= 0.0 {
            return 0.0;
        }
        -((n - p) / (p - 1.0)) * rho.powf(pc - 1.0) * (-(n / p) * rho.powf(pc).ln_1p()).exp()
    }

    fn log_beta(a: f64, b: f64) -> Result<f64> {
        Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
    }

    /// `‖∇U‖_{L^p(ℝ^N)}` in closed form via the Beta function.
    pub fn full_space_grad_norm(&self) -> Result<f64> {
        let (n, p, pc) = (self.pair.n(), self.pair.p(), self.pair.p_conj());
        let om = sphere_measure(i64::from(self.pair.dim()))?;
        let log_int = p * ((n - p) / (p - 1.0)).ln() + (om / pc).ln() + Self::log_beta(n + 1.0 - n / p, n / p - 1.0)?;
        Ok((log_int / p).exp())
    }

    /// `‖U‖_{L^{p*}(ℝ^N)}` in closed form.
    pub fn full_space_lq_norm(&self) -> Result<f64> {
        let (n, p, pc) = (self.pair.n(), self.pair.p(), self.pair.p_conj());
        let om = sphere_measure(i64::from(self.pair.dim()))?;
        let log_int = (om / pc).ln() + Self::log_beta(n - n / p, n / p)?;
        Ok((log_int / self.pair.p_star()).exp())
    }
}

/// `W(r) = K ε^{−(N−p)/p} (U(r/ε) − U(1/ε))` with `K = 1/‖∇U‖_{L^p(B_{1/ε})}`,
/// so that `W(1) = 0` and `‖∇W‖_{L^p(B)} = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedAubinTalenti {
    base: AubinTalenti,
    epsilon: f64,
    normalization: f64,
    amplitude: f64,
    offset: f64,
}

impl ModifiedAubinTalenti {
    pub fn new(pair: ExponentPair, epsilon: f64, quad: &QuadratureSpec) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::domain("make_modified_at", format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        quad.validate()?;
        let base = AubinTalenti::new(pair);
        let dim = pair.dim();
        let om = sphere_measure(i64::from(dim))?;
        // ∫_{B_{1/ε}} |∇U|^p = ε^{−N} ω ∫₀¹ r^{N−1} |U'(r/ε)|^p dr
        let rule = quad.radial_rule(dim, om, 0.0, 1.0, &Self::scale_breaks(epsilon));
        let scaled = rule
            .integrate(|r| Ok(base.derivative(r / epsilon).abs().powf(pair.p())))
            .map_err(|e| match e {
                Error::NonFinite { radius, .. } => Error::NonFinite {
                    op: "make_modified_at",
                    radius,
                },
                other => other,
            })?;
        let energy = scaled * epsilon.powf(-pair.n());
        if !(energy > 0.0 && energy.is_finite()) {
            return Err(Error::Degenerate {
                op: "make_modified_at",
                detail: format!("gradient energy {energy} at epsilon {epsilon}"),
            });
        }
        let normalization = energy.powf(-1.0 / pair.p());
        let amplitude = normalization * epsilon.powf(-base.decay());
        Ok(Self {
            base,
            epsilon,
            normalization,
            amplitude,
            offset: base.value(1.0 / epsilon),
        })
    }

    fn scale_breaks(epsilon: f64) -> Vec<f64> {
        (-2..=2)
            .map(|j| epsilon * 10f64.powi(j))
            .filter(|&r| r > 0.0 && r < 1.0)
            .collect()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn base(&self) -> &AubinTalenti {
        &self.base
    }

    /// `K = 1/‖∇U‖_{L^p(B_{1/ε})}`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// `ε^{−(N−p)/p} U(1/ε)`, the boundary correction before scaling by `K`.
    pub fn tail(&self) -> f64 {
        self.epsilon.powf(-self.base.decay()) * self.offset
    }
}

impl RadialShape for ModifiedAubinTalenti {
    fn value(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        self.amplitude * (self.base.value(r / self.epsilon) - self.offset)
    }

    fn derivative(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        self.amplitude / self.epsilon * self.base.derivative(r / self.epsilon)
    }

    fn breakpoints(&self) -> Vec<f64> {
        Self::scale_breaks(self.epsilon)
    }
}

pub fn make_modified_at(pair: &ExponentPair, epsilon: f64, quad: &QuadratureSpec) -> Result<RadialProfile> {
    Ok(RadialProfile::analytic(ModifiedAubinTalenti::new(*pair, epsilon, quad)?))
}

/// Plateau/log profile `c·t` on `[0, e^{−t}]`, `c·ln(1/r)` on `[e^{−t}, 1]`
/// with `c = (ω_{N−1} t)^{−1/N}`, which gives `‖∇v‖_{L^N(B)} = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserProfile {
    dim: u32,
    t: f64,
    height: f64,
}

impl MoserProfile {
    pub fn new(dim: u32, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain("make_moser", format!("t must be positive and finite, got {t}")));
        }
        let om = sphere_measure(i64::from(dim))?;
        Ok(Self {
            dim,
            t,
            height: (om * t).powf(-1.0 / f64::from(dim)),
        })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// The slope constant `c`.
    pub fn height(&self) -> f64 {
        self.height
    }

    /// Plateau edge `e^{−t}`.
    pub fn plateau_radius(&self) -> f64 {
        (-self.t).exp()
    }
}

impl RadialShape for MoserProfile {
    fn value(&self, r: f64) -> f64 {
        if r >= 1.0 {
            0.0
        } else if r <= self.plateau_radius() {
            self.height * self.t
        } else {
            -self.height * r.ln()
        }
    }

    fn derivative(&self, r: f64) -> f64 {
        if r >= 1.0 || r < self.plateau_radius() {
            0.0
        } else {
            -self.height / r
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.plateau_radius()]
    }
}

pub fn make_moser(dim: u32, t: f64) -> Result<RadialProfile> {
    Ok(RadialProfile::analytic(MoserProfile::new(dim, t)?))
}

/// `c (1 − r)` with `‖∇·‖_{L^p(B)}^p = 1/2`.
pub fn half_energy_tent(pair: &ExponentPair) -> Result<PiecewiseLinear> {
    let vol = ball_volume(i64::from(pair.dim()))?;
    Ok(PiecewiseLinear::tent((0.5 / vol).powf(1.0 / pair.p())))
}

/// `u_n = C_n (φ + n^{(N−p)/p} ψ(n ·))` together with its normalization.
#[derive(Debug, Clone)]
pub struct TwoBubble {
    pub n: u32,
    pub normalization: f64,
    pub profile: RadialProfile,
}

#[derive(Debug)]
struct BubbleSum {
    phi: RadialProfile,
    psi: RadialProfile,
    n: f64,
    amplitude: f64,
    factor: f64,
}

impl RadialShape for BubbleSum {
    fn value(&self, r: f64) -> f64 {
        self.factor * (self.phi.value(r) + self.amplitude * self.psi.value(self.n * r))
    }

    fn derivative(&self, r: f64) -> f64 {
        self.factor * (self.phi.derivative(r) + self.amplitude * self.n * self.psi.derivative(self.n * r))
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.phi.breakpoints();
        b.extend(self.psi.breakpoints().into_iter().map(|r| r / self.n));
        // support edge of ψ(n ·)
        b.push(1.0 / self.n);
        b
    }
}

pub fn make_two_bubble(
    pair: &ExponentPair,
    n: u32,
    phi: &RadialProfile,
    psi: &RadialProfile,
    quad: &QuadratureSpec,
) -> Result<TwoBubble> {
    if n < 1 {
        return Err(Error::domain("make_two_bubble", "scale n must be ≥ 1"));
    }
    for (name, f) in [("phi", phi), ("psi", psi)] {
        let e = grad_p_norm(f, pair, quad)?.powf(pair.p());
        if (e - 0.5).abs() > 1e-8 {
            return Err(Error::precondition(
                "make_two_bubble",
                format!("{name} must have gradient energy 1/2, got {e}"),
            ));
        }
    }
    let nf = f64::from(n);
    let amplitude = nf.powf((pair.n() - pair.p()) / pair.p());
    let raw = match (phi.as_piecewise_linear(), psi.as_piecewise_linear()) {
        (Some(a), Some(b)) => {
            let mut knots: Vec<f64> = a.knots().iter().copied().chain(b.knots().iter().map(|k| k / nf)).collect();
            knots.sort_by(f64::total_cmp);
            knots.dedup();
            let values = knots.iter().map(|&r| a.value(r) + amplitude * b.value(nf * r)).collect();
            RadialProfile::from(PiecewiseLinear::with_zero_boundary(knots, values)?)
        }
        _ => RadialProfile::analytic(BubbleSum {
            phi: phi.clone(),
            psi: psi.clone(),
            n: nf,
            amplitude,
            factor: 1.0,
        }),
    };
    let norm = grad_p_norm(&raw, pair, quad)?;
    if norm == 0.0 {
        return Err(Error::Degenerate {
            op: "make_two_bubble",
            detail: "combined profile has zero gradient".into(),
        });
    }
    let normalization = 1.0 / norm;
    Ok(TwoBubble {
        n,
        normalization,
        profile: raw.scaled(normalization),
    })
}
