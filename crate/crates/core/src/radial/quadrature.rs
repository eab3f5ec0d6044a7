use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Composite Gauss–Legendre rule on a mesh graded toward `r = 0`.
///
/// The mesh is one core cell `[0, cutoff]` followed by `panels` cells with
/// edges `r_k = cutoff^{(1 − k/panels)^{grading}}`, `k = 0..=panels`.
/// `grading = 1` is a plain geometric mesh; larger values shrink the
/// log-widths toward `r = 1` and widen them next to the cutoff, where
/// profiles are flat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub grading: f64,
    pub cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels: 200,
            nodes_per_panel: 16,
            grading: 2.0,
            cutoff: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn new(panels: usize, nodes_per_panel: usize, grading: f64, cutoff: f64) -> Result<Self> {
        let spec = Self {
            panels,
            nodes_per_panel,
            grading,
            cutoff,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 1 {
            return Err(Error::Config("quadrature needs at least one panel".into()));
        }
        if !(2..=64).contains(&self.nodes_per_panel) {
            return Err(Error::Config(format!(
                "nodes_per_panel must be in [2, 64], got {}",
                self.nodes_per_panel
            )));
        }
        if !(self.grading >= 1.0) || !self.grading.is_finite() {
            return Err(Error::Config(format!("grading must be ≥ 1, got {}", self.grading)));
        }
        if !(self.cutoff > 0.0 && self.cutoff < 1.0) {
            return Err(Error::Config(format!("cutoff must lie in (0, 1), got {}", self.cutoff)));
        }
        Ok(())
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels;
        self
    }

    /// Mesh edges on `[0, 1]`, starting with `0` and `cutoff`, ending with `1`.
    pub fn edges(&self) -> Vec<f64> {
        let ln_cut = self.cutoff.ln();
        let mut edges = Vec::with_capacity(self.panels + 2);
        edges.push(0.0);
        for k in 0..=self.panels {
            let x = 1.0 - k as f64 / self.panels as f64;
            edges.push((ln_cut * x.powf(self.grading)).exp());
        }
        *edges.last_mut().unwrap() = 1.0;
        edges
    }

    /// Width of the first graded cell next to the core `[0, cutoff]`.
    pub fn smallest_cell(&self) -> f64 {
        let e = self.edges();
        e[2] - e[1]
    }

    /// Rule for `ω_{N−1} ∫_lo^hi r^{N−1} f(r) dr`, splitting cells at every
    /// breakpoint inside `(lo, hi)`.
    pub fn radial_rule(&self, dim: u32, omega: f64, lo: f64, hi: f64, breakpoints: &[f64]) -> RadialRule {
        let mut cuts: Vec<f64> = self
            .edges()
            .into_iter()
            .chain(breakpoints.iter().copied())
            .filter(|&r| r > lo && r < hi)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1e-300));

        let (gx, gw) = gauss_legendre(self.nodes_per_panel);
        let power = f64::from(dim) - 1.0;
        let mut nodes = Vec::with_capacity(cuts.len() * gx.len());
        let mut weights = Vec::with_capacity(cuts.len() * gx.len());
        for cell in cuts.windows(2) {
            let (a, b) = (cell[0], cell[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, w) in gx.iter().zip(&gw) {
                let r = mid + half * x;
                nodes.push(r);
                weights.push(omega * r.powf(power) * w * half);
            }
        }
        RadialRule { nodes, weights }
    }
}

/// Nodes and weights for `ω_{N−1} ∫ r^{N−1} f(r) dr`, weights already
/// carrying the radial Jacobian.
#[derive(Debug, Clone)]
pub struct RadialRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut terms = Vec::with_capacity(self.nodes.len());
        for (&r, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(r).map_err(|e| e.at_radius(r))?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    op: "radial quadrature",
                    radius: Some(r),
                });
            }
            terms.push(w * v);
        }
        Ok(pairwise_sum(&terms))
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(n, x);
            let dx = p / (nf * (x * p - pm1) / (x * x - 1.0));
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, pm1) = legendre_pair(n, x);
        let dp = nf * (x * p - pm1) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// (P_n(x), P_{n−1}(x)) by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Pairwise (cascade) summation with a fixed split, so the result depends
/// only on the order of the input.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
