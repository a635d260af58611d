//! Minimum miss probability subject to a transmission budget `P_t = p0` and
//! a false-alarm cap `P_F <= beta`.
//!
//! Plain censoring searches the threshold pair directly. The randomised
//! schemes keep those thresholds, move along the constant-rate line `g(f)`
//! at the plain-censoring fusion threshold, and then re-tighten `t`.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::model::{DesignPoint, FeasibleRange, RatePath, Scheme, Thresholds};
use crate::normal;
use crate::perf::{PerfEstimate, SemiAnalyticModel};
use crate::search::{argmin, golden_section, linspace};
use crate::workspace::{Variant, Workspace};

/// Finite-difference step in `f`.
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crt1Variant {
    /// Optimise the first scheme while the FC fuses as plain censoring.
    MismatchedFc,
    /// Optimise with the FC aware of `(g, f)`, searching `f` and `t` jointly.
    FullSearch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemOSpec {
    pub p0: f64,
    pub beta: f64,
    pub scheme: Scheme,
    pub variant: Crt1Variant,
}

impl ProblemOSpec {
    pub fn new(variant: Variant, p0: f64, beta: f64) -> Self {
        let crt1 = if variant == Variant::Crt1 { Crt1Variant::FullSearch } else { Crt1Variant::MismatchedFc };
        Self { p0, beta, scheme: variant.scheme(), variant: crt1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p0 > 0.0 && self.p0 <= 1.0) {
            return Err(invalid(format!("p0 must lie in (0, 1], got {}", self.p0)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(invalid(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        Ok(())
    }

    pub fn label(&self) -> Variant {
        match (self.scheme, self.variant) {
            (Scheme::PureCensoring, _) => Variant::PureCensoring,
            (Scheme::Crt2, _) => Variant::Crt2,
            (Scheme::Crt1, Crt1Variant::MismatchedFc) => Variant::Crt1Mismatched,
            (Scheme::Crt1, Crt1Variant::FullSearch) => Variant::Crt1,
        }
    }
}

/// Plain-censoring optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureSolution {
    pub design: DesignPoint,
    pub estimate: PerfEstimate,
}

impl PureSolution {
    pub fn thresholds(&self) -> Thresholds {
        self.design.thresholds
    }

    pub fn t(&self) -> f64 {
        self.design.t
    }
}

/// Thresholds with lower threshold `tau2` and H0 transmission rate `p0`.
pub fn pure_thresholds(ws: &Workspace, p0: f64, tau2: f64) -> Option<Thresholds> {
    let sw = ws.cfg.sigma_w();
    let below = normal::cdf(tau2 / sw);
    if p0 >= 1.0 {
        return Thresholds::new(tau2, tau2).ok();
    }
    if below >= p0 {
        return None;
    }
    let tau1 = sw * normal::isf(p0 - below);
    Thresholds::new(tau1.max(tau2), tau2).ok()
}

/// Lower-threshold grid `[-4 sigma_w + A/2, A/2]`.
pub fn tau2_grid(ws: &Workspace, n: usize) -> Vec<f64> {
    let half = ws.cfg.amplitude / 2.0;
    linspace(half - 4.0 * ws.cfg.sigma_w(), half, n)
}

/// `(t, P_M)` of plain censoring with `t` set by the false-alarm cap.
fn pure_point(model: &SemiAnalyticModel, beta: f64) -> (f64, f64) {
    let t = model.min_t_for_pf(0.0, 1.0, beta);
    (t, model.estimate(0.0, 1.0, t).pm)
}

/// Resolution of the plain-censoring threshold search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureSearch {
    pub grid: usize,
    pub golden_iters: usize,
}

impl PureSearch {
    pub fn from_settings(ws: &Workspace) -> Self {
        Self { grid: ws.settings.tau_grid, golden_iters: ws.settings.golden_iters }
    }
}

/// Plain-censoring design for problem (O).
pub fn solve_pure_censoring_o(ws: &Workspace, p0: f64, beta: f64) -> Result<PureSolution> {
    solve_pure_censoring_o_with(ws, p0, beta, PureSearch::from_settings(ws))
}

pub fn solve_pure_censoring_o_with(ws: &Workspace, p0: f64, beta: f64, search: PureSearch) -> Result<PureSolution> {
    ProblemOSpec { p0, beta, scheme: Scheme::PureCensoring, variant: Crt1Variant::MismatchedFc }.validate()?;
    let grid = tau2_grid(ws, search.grid.max(3));
    // Coarse pass on the bank prefix; only its ranking is used.
    let coarse: Vec<f64> = grid
        .par_iter()
        .map(|&tau2| match pure_thresholds(ws, p0, tau2) {
            Some(thr) => pure_point(&ws.coarse_pure_model(&thr), beta).1,
            None => f64::INFINITY,
        })
        .collect();
    let pts: Vec<(f64, f64)> = grid.iter().copied().zip(coarse.iter().copied()).collect();
    let best = argmin(&pts).ok_or_else(|| Error::Infeasible(format!("no threshold pair reaches P_t = {p0}")))?;
    let i = grid.iter().position(|&x| x == best.0).expect("grid point");
    let lo = i.saturating_sub(2);
    let mut hi = (i + 2).min(grid.len() - 1);
    while hi > i && !coarse[hi].is_finite() {
        hi -= 1;
    }
    let full = |tau2: f64| match pure_thresholds(ws, p0, tau2) {
        Some(thr) => pure_point(&ws.pure_model(&thr), beta).1,
        None => f64::INFINITY,
    };
    let mut seen: Vec<(f64, f64)> = grid[lo..=hi].par_iter().map(|&x| (x, full(x))).collect();
    if hi > lo {
        seen.extend(golden_section(full, grid[lo], grid[hi], search.golden_iters));
    }
    let (tau2, _) = argmin(&seen).ok_or_else(|| Error::Infeasible("threshold refinement failed".into()))?;
    let thr = pure_thresholds(ws, p0, tau2).expect("feasible refined point");
    let model = ws.pure_model(&thr);
    let (t, _) = pure_point(&model, beta);
    Ok(PureSolution { design: DesignPoint::pure(thr, t), estimate: model.estimate(0.0, 1.0, t) })
}

/// Residuals of the stage-1 optimality conditions in `f`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KktResidualsO {
    /// `|dP_M/df + lambda dP_F/df + mu1 - mu2|`.
    pub stationarity: f64,
    pub lambda_slack: f64,
    pub pf_violation: f64,
    pub mu1_slack: f64,
    pub mu2_slack: f64,
}

impl KktResidualsO {
    pub fn as_array(&self) -> [f64; 5] {
        [self.stationarity, self.lambda_slack, self.pf_violation, self.mu1_slack, self.mu2_slack]
    }

    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktSolution {
    pub f_star: f64,
    pub g_star: f64,
    pub t_star: f64,
    /// Fusion threshold at which stage 1 ran and the certificate is taken.
    pub t_stage1: f64,
    pub lambda: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// `dP_M/df`, `dP_F/df` along `g(f)` at the certificate point.
    pub dpm_df: f64,
    pub dpf_df: f64,
    pub residuals: KktResidualsO,
    /// Minimiser before the tie rule moved towards larger `f`, with its
    /// stationarity residual at the same `t`.
    pub f_untied: f64,
    pub untied_stationarity: f64,
    pub range: FeasibleRange,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrtSolution {
    pub variant: Variant,
    pub design: DesignPoint,
    pub estimate: PerfEstimate,
    pub kkt: KktSolution,
    /// Whether stage 2 met `|P_F - beta| < max(1e-4, 2 se)`.
    pub stage2_ok: bool,
}

/// Central differences of `(P_M, P_F)` along `g(f)` at fixed `t`.
pub fn path_derivatives(model: &SemiAnalyticModel, path: &RatePath, f: f64, t: f64) -> (f64, f64) {
    let at = |x: f64| {
        let w = model.class_weights(path.g(x), x);
        (model.pm(&w, t), model.pf(&w, t))
    };
    let (m1, f1) = at(f + FD_STEP);
    let (m0, f0) = at(f - FD_STEP);
    ((m1 - m0) / (2.0 * FD_STEP), (f1 - f0) / (2.0 * FD_STEP))
}

/// Residual vector for given multipliers at `(f, t)`.
#[allow(clippy::too_many_arguments)]
pub fn kkt_residuals_o(
    model: &SemiAnalyticModel,
    path: &RatePath,
    range: &FeasibleRange,
    beta: f64,
    f: f64,
    t: f64,
    lambda: f64,
    mu1: f64,
    mu2: f64,
) -> KktResidualsO {
    let (dpm, dpf) = path_derivatives(model, path, f, t);
    let pf = model.pf(&model.class_weights(path.g(f), f), t);
    KktResidualsO {
        stationarity: (dpm + lambda * dpf + mu1 - mu2).abs(),
        lambda_slack: (lambda * (pf - beta)).abs(),
        pf_violation: (pf - beta).max(0.0),
        mu1_slack: (mu1 * (f - range.hi)).abs(),
        mu2_slack: (mu2 * (range.lo - f)).abs(),
    }
}

/// Candidate `(lambda, mu1, mu2)` on the active constraints, each cancelling
/// the gradient with a single non-negative multiplier, plus the all-zero set.
fn multiplier_candidates(dpm: f64, dpf: f64, pf_active: bool, at_hi: bool, at_lo: bool) -> Vec<(f64, f64, f64)> {
    let mut out = vec![(0.0, 0.0, 0.0)];
    if pf_active && dpf != 0.0 && -dpm / dpf >= 0.0 {
        out.push((-dpm / dpf, 0.0, 0.0));
    }
    if at_hi && dpm <= 0.0 {
        out.push((0.0, -dpm, 0.0));
    }
    if at_lo && dpm >= 0.0 {
        out.push((0.0, 0.0, dpm));
    }
    out
}

fn certificate(
    model: &SemiAnalyticModel,
    path: &RatePath,
    range: FeasibleRange,
    beta: f64,
    f: f64,
    t: f64,
) -> (f64, f64, f64, f64, f64, KktResidualsO) {
    let (dpm, dpf) = path_derivatives(model, path, f, t);
    let est = model.estimate(path.g(f), f, t);
    let pf_active = (est.pf - beta).abs() <= (2.0 * est.pf_se).max(1e-4);
    let at_hi = (f - range.hi).abs() < 1e-9;
    let at_lo = (f - range.lo).abs() < 1e-9;
    // A nearly flat P_F makes its multiplier explode; the full residual
    // decides between the candidates.
    let ((lambda, mu1, mu2), res) = multiplier_candidates(dpm, dpf, pf_active, at_hi, at_lo)
        .into_iter()
        .map(|(l, a, b)| ((l, a, b), kkt_residuals_o(model, path, &range, beta, f, t, l, a, b)))
        .min_by(|x, y| x.1.max().total_cmp(&y.1.max()))
        .expect("zero candidate");
    (lambda, mu1, mu2, dpm, dpf, res)
}

/// Stage 1 with a fixed FC rule: scan, refine, then apply the tie rule.
/// Returns the refined minimiser and the tie-broken choice.
fn stage1(
    model: &SemiAnalyticModel,
    path: &RatePath,
    range: FeasibleRange,
    beta: f64,
    t: f64,
    n: usize,
    iters: usize,
) -> Result<(f64, f64)> {
    let objective = |f: f64| {
        let w = model.class_weights(path.g(f), f);
        if model.pf(&w, t) <= beta {
            model.pm(&w, t)
        } else {
            f64::INFINITY
        }
    };
    let grid = linspace(range.lo, range.hi, n);
    let pts: Vec<(f64, f64)> = grid.iter().map(|&f| (f, objective(f))).collect();
    let best = argmin(&pts).ok_or_else(|| Error::Infeasible(format!("P_F exceeds {beta} at every admissible f")))?;
    let i = grid.iter().position(|&x| x == best.0).expect("grid point");
    let (a, b) = (grid[i.saturating_sub(1)], grid[(i + 1).min(grid.len() - 1)]);
    let mut seen = pts.clone();
    if b > a {
        seen.extend(golden_section(objective, a, b, iters));
    }
    let (f_best, pm_best) = argmin(&seen).expect("non-empty");
    Ok((f_best, tie_break(model, path, &pts, f_best, pm_best, t)))
}

/// Largest scanned `f` whose `P_M` is within one standard error of the
/// minimum, the error being that of the paired difference.
fn tie_break(model: &SemiAnalyticModel, path: &RatePath, pts: &[(f64, f64)], f_best: f64, pm_best: f64, t: f64) -> f64 {
    let mut out = f_best;
    for &(f, pm) in pts {
        if f > out && pm.is_finite() {
            let se = model.pm_diff_se((path.g(f_best), f_best), (path.g(f), f), t);
            if pm <= pm_best + se {
                out = f;
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn finish(
    model: &SemiAnalyticModel,
    variant: Variant,
    path: &RatePath,
    range: FeasibleRange,
    beta: f64,
    f: f64,
    f_untied: f64,
    t_stage1: f64,
    cert_t: f64,
) -> CrtSolution {
    let g = path.g(f).clamp(0.0, 1.0);
    let t = model.min_t_for_pf(g, f, beta);
    let estimate = model.estimate(g, f, t);
    let (lambda, mu1, mu2, dpm_df, dpf_df, residuals) = certificate(model, path, range, beta, f, cert_t);
    let untied = certificate(model, path, range, beta, f_untied, cert_t).5;
    let design = DesignPoint { thresholds: model.thresholds, g, f, t, scheme: variant.scheme() };
    CrtSolution {
        variant,
        design,
        estimate,
        kkt: KktSolution {
            f_star: f,
            g_star: g,
            t_star: t,
            t_stage1,
            lambda,
            mu1,
            mu2,
            dpm_df,
            dpf_df,
            residuals,
            f_untied,
            untied_stationarity: untied.stationarity,
            range,
        },
        stage2_ok: (estimate.pf - beta).abs() < (2.0 * estimate.pf_se).max(1e-4),
    }
}

/// Minimum of `P_M` along `g(f)` when the FC knows `(g, f)` and `t` meets the
/// false-alarm cap at every point. Returns the scanned grid and the refined
/// minimiser with its value.
pub(crate) fn crt1_full_scan(
    ws: &Workspace,
    thr: &Thresholds,
    path: &RatePath,
    range: FeasibleRange,
    beta: f64,
    n: usize,
    iters: usize,
) -> (Vec<(f64, f64)>, f64, f64) {
    let eval = |f: f64| {
        let g = path.g(f).clamp(0.0, 1.0);
        let m = ws.crt1_model(thr, g, f);
        let t = m.min_t_for_pf(g, f, beta);
        m.estimate(g, f, t).pm
    };
    let grid = linspace(range.lo, range.hi, n);
    let pts: Vec<(f64, f64)> = grid.par_iter().map(|&f| (f, eval(f))).collect();
    let best = argmin(&pts).expect("non-empty grid");
    let i = grid.iter().position(|&x| x == best.0).expect("grid point");
    let (a, b) = (grid[i.saturating_sub(1)], grid[(i + 1).min(grid.len() - 1)]);
    let mut seen = pts.clone();
    if b > a {
        seen.extend(golden_section(eval, a, b, iters));
    }
    let (f_best, pm_best) = argmin(&seen).expect("non-empty");
    (pts, f_best, pm_best)
}

/// Randomised-scheme design at the plain-censoring thresholds.
pub fn solve_crt_o(ws: &Workspace, spec: &ProblemOSpec, pure: &PureSolution) -> Result<CrtSolution> {
    spec.validate()?;
    let thr = pure.thresholds();
    let path = RatePath::new(&ws.cfg, &thr, spec.p0)?;
    let range = path.feasible_range()?;
    let s = &ws.settings;
    let variant = spec.label();
    match variant {
        Variant::PureCensoring => Err(invalid("plain censoring has no randomisation to optimise")),
        Variant::Crt2 | Variant::Crt1Mismatched => {
            let model = if variant == Variant::Crt2 { ws.crt2_model(&thr) } else { ws.pure_model(&thr) };
            let t_d = pure.t();
            let (f_best, f) = stage1(&model, &path, range, spec.beta, t_d, s.f_grid, s.golden_iters)?;
            Ok(finish(&model, variant, &path, range, spec.beta, f, f_best, t_d, t_d))
        }
        Variant::Crt1 => {
            let (pts, f_best, pm_best) =
                crt1_full_scan(ws, &thr, &path, range, spec.beta, s.joint_f_grid, s.golden_iters.min(20));
            let m_best = ws.crt1_model(&thr, path.g(f_best).clamp(0.0, 1.0), f_best);
            let t_best = m_best.min_t_for_pf(path.g(f_best).clamp(0.0, 1.0), f_best, spec.beta);
            let f = tie_break(&m_best, &path, &pts, f_best, pm_best, t_best);
            let model = if f == f_best { m_best } else { ws.crt1_model(&thr, path.g(f).clamp(0.0, 1.0), f) };
            let t = model.min_t_for_pf(path.g(f).clamp(0.0, 1.0), f, spec.beta);
            Ok(finish(&model, variant, &path, range, spec.beta, f, f_best, t, t))
        }
    }
}
