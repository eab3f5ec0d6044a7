use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A radial shape `v(r)` on `[0, 1]` with an exact derivative.
///
/// Values outside `[0, 1]` are the zero extension. `breakpoints` lists the
/// radii where `v` or `v'` is not smooth, so quadrature can split there.
pub trait RadialShape: Debug + Send + Sync {
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Continuous piecewise-linear profile with `v(1) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    /// `knots` must start at 0, end at 1 and increase strictly; the last
    /// value must be exactly zero.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::domain(
                "PiecewiseLinear",
                format!("need matching knots/values of length ≥ 2, got {} and {}", knots.len(), values.len()),
            ));
        }
        if knots[0] != 0.0 || *knots.last().unwrap() != 1.0 {
            return Err(Error::domain("PiecewiseLinear", "knots must start at 0 and end at 1"));
        }
        if !knots.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("PiecewiseLinear", "knots must be strictly increasing"));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                op: "PiecewiseLinear",
                radius: None,
            });
        }
        if *values.last().unwrap() != 0.0 {
            return Err(Error::domain("PiecewiseLinear", "boundary value v(1) must be zero"));
        }
        Ok(Self { knots, values })
    }

    /// Same as [`PiecewiseLinear::new`] but overwrites the last value with zero.
    pub fn with_zero_boundary(knots: Vec<f64>, mut values: Vec<f64>) -> Result<Self> {
        if let Some(last) = values.last_mut() {
            *last = 0.0;
        }
        Self::new(knots, values)
    }

    /// The tent `c (1 − r)`.
    pub fn tent(height: f64) -> Self {
        Self {
            knots: vec![0.0, 1.0],
            values: vec![height, 0.0],
        }
    }

    pub fn zero() -> Self {
        Self::tent(0.0)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(k, v)| (v[1] - v[0]) / (k[1] - k[0]))
    }

    fn segment(&self, r: f64) -> usize {
        // index i with knots[i] <= r < knots[i+1]
        match self.knots.binary_search_by(|k| k.total_cmp(&r)) {
            Ok(i) => i.min(self.knots.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.knots.len() - 2),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        if r <= 0.0 {
            return self.values[0];
        }
        let i = self.segment(r);
        let t = (r - self.knots[i]) / (self.knots[i + 1] - self.knots[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if !(0.0..1.0).contains(&r) {
            return 0.0;
        }
        let i = self.segment(r);
        (self.values[i + 1] - self.values[i]) / (self.knots[i + 1] - self.knots[i])
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            knots: self.knots.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `ω_{N−1} Σ |slope_i|^q (r_{i+1}^N − r_i^N)/N` over `[0, hi]`, exact.
    pub fn gradient_energy(&self, dim: u32, omega: f64, q: f64, hi: f64) -> f64 {
        let n = f64::from(dim);
        let terms: Vec<f64> = self
            .knots
            .windows(2)
            .zip(self.slopes())
            .filter(|(k, _)| k[0] < hi)
            .map(|(k, slope)| slope.abs().powf(q) * (k[1].min(hi).powf(n) - k[0].powf(n)) / n)
            .collect();
        omega * crate::radial::quadrature::pairwise_sum(&terms)
    }
}

/// A radial profile on the unit ball: either an analytic family member or
/// a piecewise-linear function with exact gradient integrals.
#[derive(Debug, Clone)]
pub enum RadialProfile {
    Analytic(Arc<dyn RadialShape>),
    PiecewiseLinear(PiecewiseLinear),
}

impl RadialProfile {
    pub fn analytic<S: RadialShape + 'static>(shape: S) -> Self {
        RadialProfile::Analytic(Arc::new(shape))
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Analytic(s) => s.value(r),
            RadialProfile::PiecewiseLinear(p) => p.value(r),
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Analytic(s) => s.derivative(r),
            RadialProfile::PiecewiseLinear(p) => p.derivative(r),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            RadialProfile::Analytic(s) => s.breakpoints(),
            RadialProfile::PiecewiseLinear(p) => p.knots().to_vec(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match self {
            RadialProfile::Analytic(s) => RadialProfile::analytic(Scaled {
                inner: Arc::clone(s),
                factor: c,
            }),
            RadialProfile::PiecewiseLinear(p) => RadialProfile::PiecewiseLinear(p.scaled(c)),
        }
    }

    pub fn as_piecewise_linear(&self) -> Option<&PiecewiseLinear> {
        match self {
            RadialProfile::PiecewiseLinear(p) => Some(p),
            RadialProfile::Analytic(_) => None,
        }
    }
}

impl From<PiecewiseLinear> for RadialProfile {
    fn from(p: PiecewiseLinear) -> Self {
        RadialProfile::PiecewiseLinear(p)
    }
}

#[derive(Debug)]
struct Scaled {
    inner: Arc<dyn RadialShape>,
    factor: f64,
}

impl RadialShape for Scaled {
    fn value(&self, r: f64) -> f64 {
        self.factor * self.inner.value(r)
    }

    fn derivative(&self, r: f64) -> f64 {
        self.factor * self.inner.derivative(r)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

/// Closure-backed analytic shape, handy for one-off smooth profiles.
pub struct FnShape<V, D> {
    value: V,
    derivative: D,
    breakpoints: Vec<f64>,
}

impl<V, D> FnShape<V, D>
where
    V: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    pub fn new(value: V, derivative: D) -> Self {
        Self {
            value,
            derivative,
            breakpoints: Vec::new(),
        }
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }
}

impl<V, D> Debug for FnShape<V, D> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnShape").field("breakpoints", &self.breakpoints).finish()
    }
}

impl<V, D> RadialShape for FnShape<V, D>
where
    V: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    fn value(&self, r: f64) -> f64 {
        if r >= 1.0 {
            0.0
        } else {
            (self.value)(r)
        }
    }

    fn derivative(&self, r: f64) -> f64 {
        if r >= 1.0 {
            0.0
        } else {
            (self.derivative)(r)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}
