use std::time::Instant;

use rayon::prelude::*;

use super::{check_grid, decreasing_check, Check, ExperimentReport, ReportRow, TREND_ALLOWANCE};
use crate::constants::{
    ball_volume, carleson_chang_limit, concentration_level, concentration_level_gamma_form, level_threshold,
    sobolev_constant, ExponentPair,
};
use crate::error::{Error, Result};
use crate::families::{make_two_bubble, AubinTalenti, ModifiedAubinTalenti};
use crate::functional::{mt_integrand, FpEvaluator};
use crate::radial::{
    grad_norm, grad_p_norm, integrate_f_p, integrate_h, integrate_mt, power_integral, PiecewiseLinear,
    QuadratureSpec, RadialProfile,
};

fn quad_meta(report: &mut ExperimentReport, quad: &QuadratureSpec) {
    report.meta("panels", quad.panels);
    report.meta("nodes_per_panel", quad.nodes_per_panel);
    report.meta("grading", quad.grading);
    report.meta("cutoff", quad.cutoff);
}

fn gaps<'a>(report: &'a ExperimentReport, series: &'a str) -> Vec<f64> {
    report.series(series).map(|r| r.abs_gap).collect()
}

/// `M_p` in both closed forms against the Carleson–Chang level along a
/// `p`-grid approaching `N`.
pub fn sweep_mp_limit(dim: u32, p_grid: &[f64]) -> Result<ExperimentReport> {
    let start = Instant::now();
    check_grid("sweep_mp_limit", p_grid)?;
    let n = f64::from(dim);
    let lo = level_threshold(dim);
    if let Some(&p) = p_grid.iter().find(|&&p| !(p > lo && p < n)) {
        return Err(Error::precondition(
            "sweep_mp_limit",
            format!("p = {p} lies outside ({lo}, {n})"),
        ));
    }
    let cc = carleson_chang_limit(i64::from(dim))?;
    let values = p_grid
        .par_iter()
        .map(|&p| {
            let pair = ExponentPair::new(i64::from(dim), p)?;
            Ok((p, concentration_level(&pair)?, concentration_level_gamma_form(&pair)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new("sweep_mp_limit");
    report.meta("dim", dim);
    report.meta("points", p_grid.len());
    for &(p, direct, gamma_form) in &values {
        report.rows.push(ReportRow::new("direct", p, Some(n - p), direct, cc));
        report.rows.push(ReportRow::new("gamma_form", p, Some(n - p), gamma_form, cc));
    }
    // the direct form subtracts two terms of size ~p*, so its rounding grows like p*·ε
    let agree = values.iter().all(|&(p, a, b)| {
        let p_star = n * p / (n - p);
        (a - b).abs() / b <= 1e-9 + 32.0 * f64::EPSILON * p_star
    });
    let worst_forms = values
        .iter()
        .map(|&(_, a, b)| (a - b).abs() / b)
        .fold(0.0, f64::max);
    report.checks.push(Check::assertion(
        "forms agree",
        agree,
        format!("max relative difference {worst_forms:e}"),
    ));
    let g = gaps(&report, "gamma_form");
    report.checks.push(decreasing_check("gap decreasing", &g, TREND_ALLOWANCE));
    let (p_last, last_gap) = (values.last().unwrap().0, *g.last().unwrap());
    let bound = cc * (n - p_last);
    report.checks.push(Check::assertion(
        "terminal gap",
        last_gap <= bound,
        format!("gap {last_gap:e} against CC(N)·(N − p) = {bound:e}"),
    ));
    report.elapsed = start.elapsed();
    Ok(report)
}

struct ConcentrationPoint {
    eps: f64,
    grad: f64,
    normalization: f64,
    tail: f64,
    lq: f64,
    f: f64,
    h: f64,
}

/// Modified Aubin–Talenti family along `eps_grid`: gradient norm,
/// `∫|W|^{p*}` against `S_p^{−p*}`, `∫F_p(W)` against `M_p` and `∫H(W)`.
pub fn sweep_concentration(pair: &ExponentPair, eps_grid: &[f64], quad: &QuadratureSpec) -> Result<ExperimentReport> {
    let start = Instant::now();
    pair.require_level_formula("sweep_concentration")?;
    check_grid("sweep_concentration", eps_grid)?;
    quad.validate()?;
    let ev = FpEvaluator::new(*pair)?;
    let consts = ev.constants().clone();
    let m_p = consts.m_p.ok_or_else(|| Error::precondition("sweep_concentration", "level undefined"))?;
    let target_lq = (-pair.p_star() * sobolev_constant(pair)?.ln()).exp();
    let target_k = 1.0 / AubinTalenti::new(*pair).full_space_grad_norm()?;
    let dim = pair.dim();

    let points = eps_grid
        .par_iter()
        .map(|&eps| {
            let family = ModifiedAubinTalenti::new(*pair, eps, quad)?;
            let w = RadialProfile::analytic(family);
            Ok(ConcentrationPoint {
                eps,
                grad: grad_p_norm(&w, pair, quad)?,
                normalization: family.normalization(),
                tail: family.tail(),
                lq: power_integral(&w, pair.p_star(), dim, quad)?,
                f: integrate_f_p(&w, &ev, quad)?,
                h: integrate_h(&w, &ev, quad)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new("sweep_concentration");
    report.meta("dim", dim);
    report.meta("p", pair.p());
    quad_meta(&mut report, quad);
    let mut sandwich_ok = true;
    let mut max_excess = f64::NEG_INFINITY;
    for pt in &points {
        let lower = consts.vol_ball + consts.leading * pt.lq;
        let upper = lower + pt.h;
        sandwich_ok &= lower <= pt.f * (1.0 + 1e-12) && pt.f <= upper * (1.0 + 1e-12);
        max_excess = max_excess.max((pt.f - m_p) / m_p);
        let e = pt.eps;
        report.rows.extend([
            ReportRow::new("grad_norm", e, None, pt.grad, 1.0),
            ReportRow::new("normalization", e, None, pt.normalization, target_k),
            ReportRow::new("tail", e, None, pt.tail, 0.0),
            ReportRow::new("lq_power", e, None, pt.lq, target_lq),
            ReportRow::new("f_p", e, None, pt.f, m_p),
            ReportRow::new("h", e, None, pt.h, 0.0),
            ReportRow::new("sandwich_lower", e, None, lower, pt.f),
            ReportRow::new("sandwich_upper", e, None, upper, pt.f),
        ]);
    }
    let worst_grad = gaps(&report, "grad_norm").into_iter().fold(0.0, f64::max);
    report.checks.push(Check::assertion(
        "unit gradient norm",
        worst_grad <= 1e-8,
        format!("max |‖∇W‖ − 1| = {worst_grad:e}"),
    ));
    for (name, series) in [
        ("normalization gap decreasing", "normalization"),
        ("tail decreasing", "tail"),
        ("lq gap decreasing", "lq_power"),
        ("f_p gap decreasing", "f_p"),
        ("h decreasing", "h"),
    ] {
        report.checks.push(decreasing_check(name, &gaps(&report, series), TREND_ALLOWANCE));
    }
    report.checks.push(Check::assertion(
        "f_p within sandwich",
        sandwich_ok,
        "|B| + leading·∫|W|^{p*} ≤ ∫F_p(W) ≤ that + ∫H(W)",
    ));
    report.checks.push(Check::finding(
        "f_p at most M_p",
        max_excess <= 1e-9,
        format!("max (∫F_p(W) − M_p)/M_p = {max_excess:e}"),
    ));
    report.elapsed = start.elapsed();
    Ok(report)
}

/// `F_p(s)` against `exp(α_N |s|^{N/(N−1)})` pointwise, and `∫F_p(u)`
/// against `∫exp(α_N |u|^{N/(N−1)})` for the fixed profile `u = (1 − r)/2`.
pub fn pointwise_limit_study(dim: u32, s_values: &[f64], p_grid: &[f64], quad: &QuadratureSpec) -> Result<ExperimentReport> {
    let start = Instant::now();
    check_grid("pointwise_limit_study", p_grid)?;
    if let Some(s) = s_values.iter().find(|s| !s.is_finite()) {
        return Err(Error::domain("pointwise_limit_study", format!("s = {s} is not finite")));
    }
    let d = i64::from(dim);
    let u: RadialProfile = PiecewiseLinear::tent(0.5).into();
    let g_u = integrate_mt(&u, dim, quad)?;
    let per_p = p_grid
        .par_iter()
        .map(|&p| {
            let ev = FpEvaluator::new(ExponentPair::new(d, p)?)?;
            let pointwise = s_values
                .iter()
                .map(|&s| Ok((s, ev.f_p(s)?, mt_integrand(s, d)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((p, pointwise, integrate_f_p(&u, &ev, quad)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new("pointwise_limit_study");
    report.meta("dim", dim);
    quad_meta(&mut report, quad);
    for (i, &s) in s_values.iter().enumerate() {
        let rows: Vec<ReportRow> = per_p
            .iter()
            .map(|(p, pts, _)| ReportRow::new("pointwise", *p, Some(s), pts[i].1, pts[i].2))
            .collect();
        let g: Vec<f64> = rows.iter().map(|r| r.abs_gap).collect();
        report.checks.push(decreasing_check(&format!("pointwise gap decreasing at s = {s}"), &g, TREND_ALLOWANCE));
        report.rows.extend(rows);
    }
    for (p, _, f) in &per_p {
        report.rows.push(ReportRow::new("profile", *p, None, *f, g_u));
    }
    report.checks.push(decreasing_check("profile gap decreasing", &gaps(&report, "profile"), TREND_ALLOWANCE));
    report.elapsed = start.elapsed();
    Ok(report)
}

/// For each named profile with `‖∇u‖_{L^N} ≤ 1`: the Hölder step
/// `‖∇u‖_p ≤ |B|^{1/p−1/N} ‖∇u‖_N` and the rescaled functional
/// `∫F_p(|B|^{−(1/p−1/N)} u)` against `∫exp(α_N |u|^{N/(N−1)})`.
pub fn semicontinuity_study(
    dim: u32,
    p_grid: &[f64],
    profiles: &[(String, RadialProfile)],
    quad: &QuadratureSpec,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    check_grid("semicontinuity_study", p_grid)?;
    let d = i64::from(dim);
    let n = f64::from(dim);
    let vol = ball_volume(d)?;
    let mut report = ExperimentReport::new("semicontinuity_study");
    report.meta("dim", dim);
    report.meta("profiles", profiles.len());
    quad_meta(&mut report, quad);
    let mut worst_holder = f64::INFINITY;
    for (name, u) in profiles {
        let g_n = grad_norm(u, dim, n, quad)?;
        if g_n > 1.0 + 1e-10 {
            return Err(Error::precondition(
                "semicontinuity_study",
                format!("profile {name} has ‖∇u‖_N = {g_n} > 1"),
            ));
        }
        let g_u = integrate_mt(u, dim, quad)?;
        let per_p = p_grid
            .par_iter()
            .map(|&p| {
                let ev = FpEvaluator::new(ExponentPair::new(d, p)?)?;
                let scale = vol.powf(1.0 / p - 1.0 / n);
                let holder = (grad_norm(u, dim, p, quad)?, scale * g_n);
                let rescaled = integrate_f_p(&u.scaled(1.0 / scale), &ev, quad)?;
                Ok((p, holder, rescaled))
            })
            .collect::<Result<Vec<_>>>()?;
        let holder_series = format!("holder:{name}");
        let rescaled_series = format!("rescaled:{name}");
        for &(p, (lhs, rhs), rescaled) in &per_p {
            worst_holder = worst_holder.min((rhs - lhs) / rhs.max(1.0));
            report.rows.push(ReportRow::new(holder_series.as_str(), p, None, lhs, rhs));
            report.rows.push(ReportRow::new(rescaled_series.as_str(), p, None, rescaled, g_u));
        }
        report.checks.push(decreasing_check(
            &format!("rescaled gap decreasing for {name}"),
            &gaps(&report, &rescaled_series),
            TREND_ALLOWANCE,
        ));
    }
    report.checks.push(Check::assertion(
        "holder step",
        worst_holder >= -1e-10,
        format!("worst relative margin {worst_holder:e}"),
    ));
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Two-bubble sequence along `scales`: `C_n` against 1 and `∫|u_n|^{p*}`
/// against `∫|φ|^{p*} + ∫|ψ|^{p*}`.
pub fn two_bubble_study(
    pair: &ExponentPair,
    scales: &[u32],
    phi: &RadialProfile,
    psi: &RadialProfile,
    quad: &QuadratureSpec,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let as_f: Vec<f64> = scales.iter().map(|&n| f64::from(n)).collect();
    check_grid("two_bubble_study", &as_f)?;
    let dim = pair.dim();
    let ps = pair.p_star();
    let target = power_integral(phi, ps, dim, quad)? + power_integral(psi, ps, dim, quad)?;
    let per_n = scales
        .par_iter()
        .map(|&n| {
            let b = make_two_bubble(pair, n, phi, psi, quad)?;
            Ok((n, b.normalization, power_integral(&b.profile, ps, dim, quad)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = ExperimentReport::new("two_bubble_study");
    report.meta("dim", dim);
    report.meta("p", pair.p());
    quad_meta(&mut report, quad);
    for &(n, c, lq) in &per_n {
        report.rows.push(ReportRow::new("normalization", f64::from(n), None, c, 1.0));
        report.rows.push(ReportRow::new("lq_power", f64::from(n), None, lq, target));
    }
    report.checks.push(decreasing_check("normalization gap decreasing", &gaps(&report, "normalization"), TREND_ALLOWANCE));
    report.checks.push(decreasing_check("lq gap decreasing", &gaps(&report, "lq_power"), TREND_ALLOWANCE));
    report.elapsed = start.elapsed();
    Ok(report)
}
