//! Finite sweeps over the limit statements, with trend assertions.
//!
//! Every sweep returns an [`ExperimentReport`]: uniform rows of
//! `(series, parameter, aux, computed, target, gaps)` plus named checks.
//! Grid points are evaluated in parallel and assembled in grid order.

mod sweeps;
mod verify;

use std::time::Duration;

use rand::Rng;

use crate::error::{Error, Result};
use crate::radial::PiecewiseLinear;

pub use sweeps::{
    pointwise_limit_study, semicontinuity_study, sweep_concentration, sweep_mp_limit, two_bubble_study,
};
pub use verify::{default_sandwich_pairs, verify_suite, Suite, VERIFY_SLACK};

/// Number of non-decreasing steps tolerated in a "decreasing" trend.
pub const TREND_ALLOWANCE: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub series: String,
    pub parameter: f64,
    pub aux: Option<f64>,
    pub computed: f64,
    pub target: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
}

impl ReportRow {
    pub fn new(series: impl Into<String>, parameter: f64, aux: Option<f64>, computed: f64, target: f64) -> Self {
        let abs_gap = (computed - target).abs();
        Self {
            series: series.into(),
            parameter,
            aux,
            computed,
            target,
            abs_gap,
            rel_gap: abs_gap / target.abs().max(1e-300),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Counts toward [`ExperimentReport::passed`].
    Assertion,
    /// Recorded observation; never fails the report.
    Finding,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn assertion(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Assertion,
            passed,
            detail: detail.into(),
        }
    }

    pub fn finding(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Finding,
            passed: holds,
            detail: detail.into(),
        }
    }
}

/// Result of one sweep. `elapsed` is excluded from equality so repeated
/// runs compare equal.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub experiment: String,
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<ReportRow>,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl PartialEq for ExperimentReport {
    fn eq(&self, other: &Self) -> bool {
        self.experiment == other.experiment
            && self.metadata == other.metadata
            && self.rows == other.rows
            && self.checks == other.checks
    }
}

impl ExperimentReport {
    pub(crate) fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.into(),
            metadata: Vec::new(),
            rows: Vec::new(),
            checks: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub(crate) fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.kind == CheckKind::Assertion).all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.kind == CheckKind::Assertion && !c.passed)
    }

    pub fn series<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a ReportRow> + 'a {
        self.rows.iter().filter(move |r| r.series == name)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Count steps `v[i] → v[i+1]` that fail to decrease strictly; steps between
/// two exact zeros are not counted.
pub fn non_decreasing_steps(values: &[f64]) -> usize {
    values
        .windows(2)
        .filter(|w| !(w[1] < w[0]) && !(w[0] == 0.0 && w[1] == 0.0))
        .count()
}

/// Assertion that `values` decrease with at most `allowance` bad steps.
/// Fewer than two values skip the trend.
pub fn decreasing_check(name: &str, values: &[f64], allowance: usize) -> Check {
    if values.len() < 2 {
        return Check::assertion(name, true, "trend skipped: fewer than two grid points");
    }
    let bad = non_decreasing_steps(values);
    Check::assertion(
        name,
        bad <= allowance,
        format!("{bad} non-decreasing step(s) of {}, {allowance} allowed", values.len() - 1),
    )
}

pub(crate) fn check_grid(op: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain(op, "grid is empty"));
    }
    if !grid.iter().all(|x| x.is_finite()) {
        return Err(Error::domain(op, "grid has non-finite entries"));
    }
    let up = grid.windows(2).all(|w| w[0] < w[1]);
    let down = grid.windows(2).all(|w| w[0] > w[1]);
    if !(up || down) {
        return Err(Error::domain(op, "grid must be strictly monotone"));
    }
    Ok(())
}

/// `count` points from `a` to `b` with constant ratio.
pub fn geometric_grid(a: f64, b: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::Config(format!("grid needs at least two points, got {count}")));
    }
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) || a == b {
        return Err(Error::Config(format!("geometric grid needs distinct positive ends, got {a}:{b}")));
    }
    let (la, lb) = (a.ln(), b.ln());
    let mut grid: Vec<f64> = (0..count)
        .map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp())
        .collect();
    grid[0] = a;
    grid[count - 1] = b;
    Ok(grid)
}

/// `count` points from `a` to `b` whose distances to `limit` are geometric,
/// so the grid accumulates at `b` when `b` is near `limit`.
pub fn grid_toward(limit: f64, a: f64, b: f64, count: usize) -> Result<Vec<f64>> {
    let mut grid: Vec<f64> = geometric_grid(limit - a, limit - b, count)?
        .into_iter()
        .map(|d| limit - d)
        .collect();
    grid[0] = a;
    grid[count - 1] = b;
    Ok(grid)
}

/// Random continuous piecewise-linear profile with zero trace:
/// 3 to 30 knots (including both ends), values uniform in `[−2, 2]`.
pub fn random_profile<R: Rng + ?Sized>(rng: &mut R) -> PiecewiseLinear {
    let k = rng.gen_range(3..=30);
    let mut knots: Vec<f64> = (0..k - 2).map(|_| rng.gen_range(0.0..1.0)).collect();
    knots.push(0.0);
    knots.push(1.0);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let values = knots.iter().map(|_| rng.gen_range(-2.0..=2.0)).collect();
    PiecewiseLinear::with_zero_boundary(knots, values).expect("sorted knots on [0, 1]")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_gaps() {
        let r = ReportRow::new("x", 1.0, None, 3.0, 2.0);
        assert_eq!(r.abs_gap, 1.0);
        assert_eq!(r.rel_gap, 0.5);
        let z = ReportRow::new("x", 1.0, None, 1e-310, 0.0);
        assert_eq!(z.rel_gap, 1e-310 / 1e-300);
    }

    #[test]
    fn trend_counting() {
        assert_eq!(non_decreasing_steps(&[3.0, 2.0, 1.0]), 0);
        assert_eq!(non_decreasing_steps(&[3.0, 3.0, 1.0, 2.0]), 2);
        assert_eq!(non_decreasing_steps(&[0.0, 0.0, 0.0]), 0);
        assert!(decreasing_check("t", &[3.0, 4.0, 1.0], 1).passed);
        assert!(!decreasing_check("t", &[3.0, 4.0, 5.0], 1).passed);
        assert!(decreasing_check("t", &[3.0], 0).passed);
    }

    #[test]
    fn grids() {
        let g = geometric_grid(1e-1, 1e-4, 4).unwrap();
        assert_eq!(g[0], 1e-1);
        assert_eq!(g[3], 1e-4);
        assert!((g[1] - 1e-2).abs() < 1e-16);
        let p = grid_toward(2.0, 1.9, 1.9999, 5).unwrap();
        assert_eq!(p[4], 1.9999);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert!(((2.0 - p[2]) - 10f64.powf(-2.5)).abs() < 1e-12);
        assert!(geometric_grid(1.0, 2.0, 1).is_err());
        assert!(check_grid("t", &[1.0, 3.0, 2.0]).is_err());
        assert!(check_grid("t", &[]).is_err());
    }

    #[test]
    fn report_equality_ignores_time() {
        let mut a = ExperimentReport::new("x");
        a.rows.push(ReportRow::new("s", 1.0, None, 1.0, 1.0));
        let mut b = a.clone();
        b.elapsed = Duration::from_secs(3);
        assert_eq!(a, b);
        a.checks.push(Check::finding("f", false, ""));
        assert!(a.passed());
        a.checks.push(Check::assertion("g", false, ""));
        assert!(!a.passed());
    }
}
