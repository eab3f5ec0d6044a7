//! Multi-start gradient ascent for `∫F_p(u)` over `‖∇u‖_p ≤ 1` on
//! piecewise-linear radial profiles.
//!
//! `F_p` is increasing in `|s|`, so the constraint is always active and
//! each candidate `v` is evaluated as `v/‖∇v‖_p`. The objective is then
//! scale-invariant and the search runs over shapes only.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constants::{sphere_measure, ExponentPair};
use crate::error::{Error, Result};
use crate::families::{make_modified_at, DEFAULT_EPSILONS};
use crate::functional::FpEvaluator;
use crate::radial::{integrate_f_p, pairwise_sum, PiecewiseLinear, QuadratureSpec, RadialProfile};

/// Radius of the first interior knot.
pub const FIRST_KNOT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitKind {
    Tent,
    MoserLike,
    AubinTalenti(f64),
    Random,
}

impl fmt::Display for InitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitKind::Tent => write!(f, "tent"),
            InitKind::MoserLike => write!(f, "moser-like"),
            InitKind::AubinTalenti(eps) => write!(f, "aubin-talenti({eps:e})"),
            InitKind::Random => write!(f, "random"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximizerConfig {
    /// Free knot values; the mesh has `knots + 1` vertices with `v = 0` at `r = 1`.
    pub knots: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub step_shrink: f64,
    /// Stop when one accepted step improves the objective by less than `tol` (relative).
    pub tol: f64,
    /// Central-difference step, relative to `max(1, |v_i|)`.
    pub fd_step: f64,
    pub seed: u64,
    pub inits: Vec<InitKind>,
}

impl Default for MaximizerConfig {
    fn default() -> Self {
        Self {
            knots: 32,
            max_iters: 100,
            step_init: 0.5,
            step_shrink: 0.5,
            tol: 1e-9,
            fd_step: 1e-6,
            seed: 0,
            inits: vec![
                InitKind::Tent,
                InitKind::MoserLike,
                InitKind::AubinTalenti(1e-1),
                InitKind::AubinTalenti(1e-2),
                InitKind::AubinTalenti(1e-3),
                InitKind::Random,
            ],
        }
    }
}

impl MaximizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.knots < 3 {
            return Err(Error::Config(format!("knots must be ≥ 3, got {}", self.knots)));
        }
        if !(self.tol > 0.0) || !(self.fd_step > 0.0) || !(self.step_init > 0.0) {
            return Err(Error::Config("tol, fd_step and step_init must be positive".into()));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::Config(format!("step_shrink must lie in (0, 1), got {}", self.step_shrink)));
        }
        if self.inits.is_empty() {
            return Err(Error::Config("at least one initialization is required".into()));
        }
        for init in &self.inits {
            if let InitKind::AubinTalenti(eps) = init {
                if !(*eps > 0.0 && *eps < 1.0) {
                    return Err(Error::Config(format!("aubin-talenti epsilon must lie in (0, 1), got {eps}")));
                }
            }
        }
        Ok(())
    }
}

/// `0`, then `knots` points geometric from [`FIRST_KNOT`] to `1`.
pub fn geometric_knots(knots: usize) -> Vec<f64> {
    let mut r = vec![0.0];
    let ln_first = FIRST_KNOT.ln();
    for i in 0..knots {
        r.push((ln_first * (1.0 - i as f64 / (knots - 1) as f64)).exp());
    }
    *r.last_mut().unwrap() = 1.0;
    r
}

/// `v ↦ ∫_B F_p(v/‖∇v‖_p)` for knot values on a fixed mesh.
#[derive(Debug, Clone)]
pub struct RescaledObjective {
    pair: ExponentPair,
    ev: FpEvaluator,
    knots: Vec<f64>,
    omega: f64,
    /// Quadrature nodes as (segment, local coordinate, weight).
    nodes: Vec<(usize, f64, f64)>,
}

impl RescaledObjective {
    pub fn new(pair: ExponentPair, knots: Vec<f64>, quad: &QuadratureSpec) -> Result<Self> {
        PiecewiseLinear::new(knots.clone(), vec![0.0; knots.len()])?;
        quad.validate()?;
        let omega = sphere_measure(i64::from(pair.dim()))?;
        let rule = quad.radial_rule(pair.dim(), omega, 0.0, 1.0, &knots);
        let nodes = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&r, &w)| {
                let i = knots.partition_point(|&k| k <= r).clamp(1, knots.len() - 1) - 1;
                (i, (r - knots[i]) / (knots[i + 1] - knots[i]), w)
            })
            .collect();
        Ok(Self {
            ev: FpEvaluator::new(pair)?,
            pair,
            knots,
            omega,
            nodes,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn free_len(&self) -> usize {
        self.knots.len() - 1
    }

    fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.free_len() {
            return Err(Error::domain(
                "RescaledObjective",
                format!("expected {} knot values, got {}", self.free_len(), values.len()),
            ));
        }
        Ok(())
    }

    pub fn profile(&self, values: &[f64]) -> Result<PiecewiseLinear> {
        self.check_len(values)?;
        let mut v = values.to_vec();
        v.push(0.0);
        PiecewiseLinear::new(self.knots.clone(), v)
    }

    fn energy(&self, values: &[f64]) -> f64 {
        let p = self.pair.p();
        let n = self.pair.n();
        let terms: Vec<f64> = (0..self.free_len())
            .map(|i| {
                let next = values.get(i + 1).copied().unwrap_or(0.0);
                let slope = (next - values[i]) / (self.knots[i + 1] - self.knots[i]);
                slope.abs().powf(p) * (self.knots[i + 1].powf(n) - self.knots[i].powf(n)) / n
            })
            .collect();
        self.omega * pairwise_sum(&terms)
    }

    pub fn grad_norm(&self, values: &[f64]) -> Result<f64> {
        self.check_len(values)?;
        Ok(self.energy(values).powf(1.0 / self.pair.p()))
    }

    /// Values rescaled to unit gradient norm.
    pub fn normalized(&self, values: &[f64]) -> Result<Vec<f64>> {
        let norm = self.grad_norm(values)?;
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Degenerate {
                op: "RescaledObjective",
                detail: format!("gradient norm {norm} cannot be normalized"),
            });
        }
        Ok(values.iter().map(|v| v / norm).collect())
    }

    pub fn value(&self, values: &[f64]) -> Result<f64> {
        let v = self.normalized(values)?;
        let mut terms = Vec::with_capacity(self.nodes.len());
        for &(i, t, w) in &self.nodes {
            let a = v[i];
            let b = v.get(i + 1).copied().unwrap_or(0.0);
            terms.push(w * self.ev.f_p(a + t * (b - a))?);
        }
        let total = pairwise_sum(&terms);
        if !total.is_finite() {
            return Err(Error::NonFinite {
                op: "RescaledObjective",
                radius: None,
            });
        }
        Ok(total)
    }

    /// Radius inside which half of the gradient energy of `v` lies.
    pub fn half_energy_radius(&self, values: &[f64]) -> Result<f64> {
        self.check_len(values)?;
        let p = self.pair.p();
        let n = self.pair.n();
        let total = self.energy(values);
        if total == 0.0 {
            return Ok(1.0);
        }
        let mut acc = 0.0;
        for i in 0..self.free_len() {
            let next = values.get(i + 1).copied().unwrap_or(0.0);
            let slope = (next - values[i]) / (self.knots[i + 1] - self.knots[i]);
            let density = self.omega * slope.abs().powf(p) / n;
            let (a, b) = (self.knots[i].powf(n), self.knots[i + 1].powf(n));
            let seg = density * (b - a);
            if acc + seg >= 0.5 * total && seg > 0.0 {
                let need = (0.5 * total - acc) / density;
                return Ok((a + need).powf(1.0 / n));
            }
            acc += seg;
        }
        Ok(1.0)
    }
}

/// Central-difference gradient of the rescaled objective with respect to
/// knot values; component `i` uses the step `h · max(1, |v_i|)`.
pub fn finite_diff_gradient(objective: &RescaledObjective, values: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::domain("finite_diff_gradient", format!("h must be positive, got {h}")));
    }
    // rejects the zero profile
    objective.normalized(values)?;
    (0..values.len())
        .into_par_iter()
        .map(|i| {
            let step = h * values[i].abs().max(1.0);
            let mut plus = values.to_vec();
            let mut minus = values.to_vec();
            plus[i] += step;
            minus[i] -= step;
            Ok((objective.value(&plus)? - objective.value(&minus)?) / (2.0 * step))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    /// Half the gradient energy sits inside the first mesh cell.
    Concentrating,
    IterationCapped,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Converged => "converged",
            Outcome::Concentrating => "concentrating",
            Outcome::IterationCapped => "iteration-capped",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub start: usize,
    pub iteration: usize,
    pub objective: f64,
    pub half_energy_radius: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StartResult {
    pub init: InitKind,
    pub initial_value: f64,
    pub value: f64,
    pub iterations: usize,
    pub outcome: Outcome,
    pub half_energy_radius: f64,
    /// Unit-norm knot values of the final iterate.
    pub values: Vec<f64>,
    /// `∫F_p(W_ε)` of the exact analytic profile, for Aubin–Talenti starts.
    pub analytic_value: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct MaximizeResult {
    pub profile: RadialProfile,
    pub value: f64,
    pub winner: usize,
    /// True when the best point is the analytic `W_ε` of the winning start
    /// rather than its piecewise-linear iterate.
    pub winner_is_analytic: bool,
    pub starts: Vec<StartResult>,
    pub trace: Vec<TraceEntry>,
}

impl MaximizeResult {
    pub fn outcome(&self) -> Outcome {
        self.starts[self.winner].outcome
    }
}

fn initial_values(init: InitKind, knots: &[f64], pair: &ExponentPair, seed: u64, index: usize, quad: &QuadratureSpec) -> Result<Vec<f64>> {
    let free = &knots[..knots.len() - 1];
    Ok(match init {
        InitKind::Tent => free.iter().map(|r| 1.0 - r).collect(),
        InitKind::MoserLike => {
            let t: f64 = 4.0;
            free.iter().map(|&r| if r <= 0.0 { t } else { t.min(-r.ln()) }).collect()
        }
        InitKind::AubinTalenti(eps) => {
            let w = make_modified_at(pair, eps, quad)?;
            free.iter().map(|&r| w.value(r)).collect()
        }
        InitKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            free.iter().map(|_| rng.gen_range(0.0..1.0)).collect()
        }
    })
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn ascend(
    objective: &RescaledObjective,
    cfg: &MaximizerConfig,
    index: usize,
    init: InitKind,
    quad: &QuadratureSpec,
) -> Result<(StartResult, Vec<TraceEntry>)> {
    let pair = objective.pair;
    let abort = |it: usize, e: Error| Error::Degenerate {
        op: "maximize",
        detail: format!("start {index} ({init}), iteration {it}: {e}"),
    };
    let raw = initial_values(init, objective.knots(), &pair, cfg.seed, index, quad)?;
    let mut v = objective.normalized(&raw)?;
    let mut j = objective.value(&v).map_err(|e| abort(0, e))?;
    let initial_value = j;
    let analytic_value = match init {
        InitKind::AubinTalenti(eps) => {
            let w = make_modified_at(&pair, eps, quad)?;
            Some(integrate_f_p(&w, &FpEvaluator::new(pair)?, quad)?)
        }
        _ => None,
    };
    let first_cell = objective.knots()[1];
    let mut step = cfg.step_init;
    let mut radius = objective.half_energy_radius(&v)?;
    let mut trace = vec![TraceEntry {
        start: index,
        iteration: 0,
        objective: j,
        half_energy_radius: radius,
        step: 0.0,
    }];
    let mut outcome = Outcome::IterationCapped;
    let mut iterations = 0;
    for it in 1..=cfg.max_iters {
        if radius < first_cell {
            outcome = Outcome::Concentrating;
            break;
        }
        let g = finite_diff_gradient(objective, &v, cfg.fd_step).map_err(|e| abort(it, e))?;
        let gn = l2(&g);
        if !(gn > 0.0) {
            outcome = Outcome::Converged;
            break;
        }
        let scale = l2(&v) / gn;
        let mut accepted = None;
        while step >= 1e-12 {
            let cand: Vec<f64> = v.iter().zip(&g).map(|(x, d)| x + step * scale * d).collect();
            let cand = objective.normalized(&cand).map_err(|e| abort(it, e))?;
            let jc = objective.value(&cand).map_err(|e| abort(it, e))?;
            if jc > j {
                accepted = Some((cand, jc));
                break;
            }
            step *= cfg.step_shrink;
        }
        let Some((cand, jc)) = accepted else {
            outcome = Outcome::Converged;
            break;
        };
        let improvement = (jc - j) / j;
        v = cand;
        j = jc;
        iterations = it;
        radius = objective.half_energy_radius(&v)?;
        trace.push(TraceEntry {
            start: index,
            iteration: it,
            objective: j,
            half_energy_radius: radius,
            step,
        });
        step = (step / cfg.step_shrink).min(cfg.step_init);
        if improvement < cfg.tol {
            outcome = Outcome::Converged;
            break;
        }
    }
    if outcome == Outcome::IterationCapped && radius < first_cell {
        outcome = Outcome::Concentrating;
    }
    Ok((
        StartResult {
            init,
            initial_value,
            value: j,
            iterations,
            outcome,
            half_energy_radius: radius,
            values: v,
            analytic_value,
        },
        trace,
    ))
}

/// Runs every configured start and returns the best feasible point found.
pub fn maximize(pair: &ExponentPair, cfg: &MaximizerConfig, quad: &QuadratureSpec) -> Result<MaximizeResult> {
    cfg.validate()?;
    let objective = RescaledObjective::new(*pair, geometric_knots(cfg.knots), quad)?;
    let runs = cfg
        .inits
        .par_iter()
        .enumerate()
        .map(|(i, &init)| ascend(&objective, cfg, i, init, quad))
        .collect::<Result<Vec<_>>>()?;
    let (starts, traces): (Vec<_>, Vec<_>) = runs.into_iter().unzip();

    let mut winner = 0;
    let mut best = f64::NEG_INFINITY;
    let mut analytic = false;
    for (i, s) in starts.iter().enumerate() {
        if s.value > best {
            (winner, best, analytic) = (i, s.value, false);
        }
        if let Some(a) = s.analytic_value {
            if a > best {
                (winner, best, analytic) = (i, a, true);
            }
        }
    }
    let profile = match (analytic, starts[winner].init) {
        (true, InitKind::AubinTalenti(eps)) => make_modified_at(pair, eps, quad)?,
        _ => objective.profile(&starts[winner].values)?.into(),
    };
    Ok(MaximizeResult {
        profile,
        value: best,
        winner,
        winner_is_analytic: analytic,
        starts,
        trace: traces.into_iter().flatten().collect(),
    })
}

/// `max_ε ∫F_p(W_ε)` over the default concentration grid, the lower end
/// of the bracket reported next to maximizer results.
pub fn best_family_value(pair: &ExponentPair, quad: &QuadratureSpec) -> Result<f64> {
    let ev = FpEvaluator::new(*pair)?;
    DEFAULT_EPSILONS
        .par_iter()
        .map(|&eps| integrate_f_p(&make_modified_at(pair, eps, quad)?, &ev, quad))
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ball_volume;
    use crate::radial::{grad_p_norm, integrate_f_p};

    fn setup(knots: usize) -> (ExponentPair, RescaledObjective, QuadratureSpec) {
        let pair = ExponentPair::new(2, 1.5).unwrap();
        let quad = QuadratureSpec::default();
        let obj = RescaledObjective::new(pair, geometric_knots(knots), &quad).unwrap();
        (pair, obj, quad)
    }

    fn sample(obj: &RescaledObjective) -> Vec<f64> {
        obj.knots()[..obj.free_len()].iter().map(|r| (1.0 - r) * (1.0 + 0.3 * (5.0 * r).sin())).collect()
    }

    #[test]
    fn knots_are_geometric() {
        let k = geometric_knots(10);
        assert_eq!(k.len(), 11);
        assert_eq!(k[0], 0.0);
        assert!((k[1] - FIRST_KNOT).abs() < 1e-20);
        assert_eq!(k[10], 1.0);
        let ratios: Vec<f64> = k[1..].windows(2).map(|w| w[1] / w[0]).collect();
        assert!(ratios.iter().all(|r| (r - ratios[0]).abs() < 1e-9));
    }

    #[test]
    fn objective_matches_generic_integral() {
        let (pair, obj, quad) = setup(16);
        let v = sample(&obj);
        let u = RadialProfile::from(obj.profile(&obj.normalized(&v).unwrap()).unwrap());
        assert!((grad_p_norm(&u, &pair, &quad).unwrap() - 1.0).abs() < 1e-12);
        let direct = integrate_f_p(&u, &FpEvaluator::new(pair).unwrap(), &quad).unwrap();
        assert!((obj.value(&v).unwrap() - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn scale_invariance_and_degenerate_input() {
        let (_, obj, _) = setup(16);
        let v = sample(&obj);
        let j = obj.value(&v).unwrap();
        for c in [1e-3, 0.7, 42.0] {
            let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
            assert!((obj.value(&scaled).unwrap() - j).abs() < 1e-10 * j);
        }
        let zero = vec![0.0; obj.free_len()];
        assert!(matches!(obj.value(&zero), Err(Error::Degenerate { .. })));
        assert!(matches!(finite_diff_gradient(&obj, &zero, 1e-6), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn gradient_is_odd_and_step_stable() {
        let (_, obj, _) = setup(12);
        let v = obj.normalized(&sample(&obj)).unwrap();
        let g = finite_diff_gradient(&obj, &v, 1e-5).unwrap();
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let gn = finite_diff_gradient(&obj, &neg, 1e-5).unwrap();
        assert!(g.iter().zip(&gn).all(|(a, b)| *a == -*b));
        let fine = finite_diff_gradient(&obj, &v, 1e-6).unwrap();
        // components at the smallest knots sit below the difference-quotient
        // resolution (true size ~ r^{N−1}, rounding ~ ε J / (h r²))
        let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut compared = 0;
        for (a, b) in g.iter().zip(&fine) {
            if a.abs() >= 1e-2 * scale {
                compared += 1;
                assert!((a - b).abs() <= 1e-3 * a.abs().max(b.abs()), "{a} vs {b}");
            }
        }
        assert!(compared >= 5);
        // one-sided check
        let i = 3;
        let h = 1e-7;
        let mut plus = v.clone();
        plus[i] += h;
        let one_sided = (obj.value(&plus).unwrap() - obj.value(&v).unwrap()) / h;
        assert!((one_sided - g[i]).abs() < 1e-4 * g[i].abs().max(1.0));
    }

    #[test]
    fn half_energy_radius_of_tent() {
        let (_, obj, _) = setup(64);
        let tent: Vec<f64> = obj.knots()[..obj.free_len()].iter().map(|r| 1.0 - r).collect();
        // energy ∝ r^N, so half of it lies inside 2^{−1/2}
        let r = obj.half_energy_radius(&tent).unwrap();
        assert!((r - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn short_run_is_monotone_and_feasible() {
        let (pair, _, quad) = setup(8);
        let cfg = MaximizerConfig {
            knots: 12,
            max_iters: 8,
            inits: vec![InitKind::Tent, InitKind::AubinTalenti(1e-1), InitKind::Random],
            ..MaximizerConfig::default()
        };
        let res = maximize(&pair, &cfg, &quad).unwrap();
        assert!(res.value >= ball_volume(2).unwrap());
        for s in &res.starts {
            assert!(s.value >= s.initial_value);
            let u = RadialProfile::from(
                RescaledObjective::new(pair, geometric_knots(cfg.knots), &quad)
                    .unwrap()
                    .profile(&s.values)
                    .unwrap(),
            );
            assert!((grad_p_norm(&u, &pair, &quad).unwrap() - 1.0).abs() < 1e-8);
        }
        for w in res.trace.windows(2) {
            if w[0].start == w[1].start {
                assert!(w[1].objective > w[0].objective);
            }
        }
        let at = res.starts[1].analytic_value.unwrap();
        assert!(res.value >= at);
        let again = maximize(&pair, &cfg, &quad).unwrap();
        assert_eq!(res.starts, again.starts);
        assert_eq!(res.trace, again.trace);
    }

    #[test]
    fn config_validation() {
        let bad = MaximizerConfig {
            knots: 2,
            ..MaximizerConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = MaximizerConfig {
            step_shrink: 1.0,
            ..MaximizerConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = MaximizerConfig {
            inits: vec![InitKind::AubinTalenti(2.0)],
            ..MaximizerConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
