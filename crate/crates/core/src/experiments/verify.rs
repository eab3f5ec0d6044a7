use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{random_profile, Check, ExperimentReport, ReportRow};
use crate::constants::{level_threshold, ExponentPair};
use crate::error::{Error, Result};
use crate::functional::{elementary_power_bounds, FpEvaluator};
use crate::radial::{alvino_bound, grad_norm, radial_bound, radial_lemma_check, QuadratureSpec, RadialProfile};

/// Margins below `−VERIFY_SLACK` count as violations.
pub const VERIFY_SLACK: f64 = 1e-9;

const RADII_PER_TRIAL: usize = 10;
const LOG_F_CEILING: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    RadialLemma,
    Sandwich,
    Elementary,
    Alvino,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::RadialLemma, Suite::Sandwich, Suite::Elementary, Suite::Alvino];

    pub fn name(self) -> &'static str {
        match self {
            Suite::RadialLemma => "radial-lemma",
            Suite::Sandwich => "sandwich",
            Suite::Elementary => "elementary",
            Suite::Alvino => "alvino",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}; expected radial-lemma, sandwich, elementary or alvino")))
    }
}

/// Twenty pairs above the level threshold: `N = 2..=6`, `p` at 20%, 40%,
/// 60% and 80% of the way from the threshold to `N`.
pub fn default_sandwich_pairs() -> Vec<ExponentPair> {
    (2..=6)
        .flat_map(|n: i64| {
            let lo = level_threshold(n as u32);
            [0.2, 0.4, 0.6, 0.8].map(move |t| ExponentPair::new(n, lo + (n as f64 - lo) * t).expect("inside (1, N)"))
        })
        .collect()
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn random_pair<R: Rng>(rng: &mut R) -> ExponentPair {
    let n = rng.gen_range(2..=6i64);
    let p = rng.gen_range(1.2..n as f64 - 0.05);
    ExponentPair::new(n, p).expect("inside (1, N)")
}

/// Largest `s` with `ln F_p(s) ≤ 600`, by bisection.
fn s_ceiling(ev: &FpEvaluator) -> f64 {
    let mut hi = 1.0;
    while ev.log_f_p(hi) < LOG_F_CEILING {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ev.log_f_p(mid) < LOG_F_CEILING {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn elementary_trial(rng: &mut ChaCha8Rng) -> Result<(u32, f64)> {
    let a = log_uniform(rng, 1e-3, 1e3);
    let b = log_uniform(rng, 1e-3, 1e3);
    let g = rng.gen_range(1.01..8.0);
    let (lower, upper) = elementary_power_bounds(a, b, g)?;
    let v = (a + b).powf(g);
    Ok((0, ((v - lower) / v).min((upper - v) / upper)))
}

fn sandwich_trial(rng: &mut ChaCha8Rng, ev: &FpEvaluator, s_max: f64) -> Result<(u32, f64)> {
    let s = log_uniform(rng, 1e-6 * s_max, s_max) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let f = ev.f_p(s)?;
    let lower = ev.lower_bound(s)?;
    let upper = lower + ev.h_correction(s)?;
    Ok((ev.pair().dim(), ((f - lower) / f).min((upper - f) / upper)))
}

fn radial_trial(rng: &mut ChaCha8Rng, pair: Option<ExponentPair>, quad: &QuadratureSpec) -> Result<(u32, f64)> {
    let pair = pair.unwrap_or_else(|| random_pair(rng));
    let u: RadialProfile = random_profile(rng).into();
    let radii: Vec<f64> = (0..RADII_PER_TRIAL).map(|_| log_uniform(rng, 1e-4, 0.999)).collect();
    match radial_lemma_check(&u, &pair, &radii, quad) {
        Ok(report) => Ok((pair.dim(), report.worst_margin())),
        // an all-zero draw has nothing to check
        Err(Error::Degenerate { .. }) => Ok((pair.dim(), f64::INFINITY)),
        Err(e) => Err(e),
    }
}

fn alvino_trial(rng: &mut ChaCha8Rng, dim: Option<u32>, quad: &QuadratureSpec) -> Result<(u32, f64)> {
    let dim = dim.unwrap_or_else(|| rng.gen_range(2..=6));
    let n = f64::from(dim);
    let u: RadialProfile = random_profile(rng).into();
    let norm = grad_norm(&u, dim, n, quad)?;
    let near = ExponentPair::new(i64::from(dim), n - 1e-6)?;
    let mut worst = f64::INFINITY;
    for _ in 0..RADII_PER_TRIAL {
        let r = log_uniform(rng, 1e-4, 0.999);
        let bound = alvino_bound(dim, r)? * norm;
        if bound > 0.0 {
            worst = worst.min((bound - u.value(r).abs()) / bound);
        }
        let r = rng.gen_range(0.1..=0.9);
        let a = alvino_bound(dim, r)?;
        worst = worst.min(1e-3 - (radial_bound(&near, r)? - a).abs() / a);
    }
    Ok((dim, worst))
}

/// Randomized inequality suite. Each trial reports its worst relative
/// margin; the suite passes when every margin is at least `−VERIFY_SLACK`.
///
/// `pair` pins the exponent pair (sandwich, radial-lemma) or the
/// dimension (alvino); otherwise pairs are drawn per trial, or taken
/// round-robin from [`default_sandwich_pairs`] for the sandwich suite.
pub fn verify_suite(
    name: &str,
    trials: usize,
    seed: u64,
    pair: Option<ExponentPair>,
    quad: &QuadratureSpec,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let suite: Suite = name.parse()?;
    if trials < 1 {
        return Err(Error::Config("verify needs at least one trial".into()));
    }
    quad.validate()?;
    let evaluators = match suite {
        Suite::Sandwich => {
            let pairs = match pair {
                Some(p) => {
                    p.require_level_formula("verify sandwich")?;
                    vec![p]
                }
                None => default_sandwich_pairs(),
            };
            pairs
                .into_iter()
                .map(|p| {
                    let ev = FpEvaluator::new(p)?;
                    let s_max = s_ceiling(&ev);
                    Ok((ev, s_max))
                })
                .collect::<Result<Vec<_>>>()?
        }
        _ => Vec::new(),
    };

    let margins = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            match suite {
                Suite::Elementary => elementary_trial(&mut rng),
                Suite::Sandwich => {
                    let (ev, s_max) = &evaluators[t % evaluators.len()];
                    sandwich_trial(&mut rng, ev, *s_max)
                }
                Suite::RadialLemma => radial_trial(&mut rng, pair, quad),
                Suite::Alvino => alvino_trial(&mut rng, pair.map(|p| p.dim()), quad),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new("verify_suite");
    report.meta("suite", suite.name());
    report.meta("trials", trials);
    report.meta("seed", seed);
    if let Some(p) = pair {
        report.meta("dim", p.dim());
        report.meta("p", p.p());
    }
    let mut worst = f64::INFINITY;
    let mut violations = 0usize;
    for (t, &(dim, margin)) in margins.iter().enumerate() {
        worst = worst.min(margin);
        if !(margin >= -VERIFY_SLACK) {
            violations += 1;
        }
        let aux = (dim > 0).then_some(f64::from(dim));
        report.rows.push(ReportRow::new(suite.name(), t as f64, aux, margin, 0.0));
    }
    report.meta("violations", violations);
    report.checks.push(Check::assertion(
        "all margins above slack",
        violations == 0,
        format!("{violations} violation(s), worst margin {worst:e}"),
    ));
    report.elapsed = start.elapsed();
    Ok(report)
}
