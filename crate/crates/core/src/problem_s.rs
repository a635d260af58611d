//! Minimum H0 transmission rate subject to `P_M <= alpha` and `P_F <= beta`.
//!
//! Plain censoring is solved as the smallest budget `p0` whose problem-(O)
//! optimum meets the miss cap. The randomised schemes keep those thresholds
//! and alternate between a signomial program in `(g, f)` at fixed `t`,
//! solved by successive AGM condensation into geometric programs, and a
//! one-dimensional adjustment of `t`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::gp::{
    solve_gp_2var, verify_feasibility_chain, ChainReport, GpProblem, Monomial, Posynomial, SignomialConstraint,
};
use crate::model::{interval_probs, DesignPoint, Hypothesis, IntervalProbs, RatePath, Thresholds};
use crate::perf::{PerfEstimate, SemiAnalyticModel};
use crate::poly::BasisPolynomial;
use crate::problem_o::{crt1_full_scan, solve_pure_censoring_o_with, PureSearch, PureSolution};
use crate::rng::{stream, Domain};
use crate::search::{argmin, golden_section, linspace};
use crate::workspace::{Variant, Workspace};

/// Bisection tolerance on the plain-censoring budget.
const P0_TOL: f64 = 1e-4;
/// Relative slack below which a performance constraint counts as binding.
const BINDING_TOL: f64 = 1e-3;
/// Points per run at which `P'' >= P'` is asserted.
const DOMINANCE_SAMPLES: usize = 1000;
/// Step for the finite-difference gradients of the certificate.
const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSSpec {
    pub alpha: f64,
    pub beta: f64,
    pub variant: Variant,
    /// Lower box bound for `g` and `f` inside the geometric programs.
    pub epsilon_box: f64,
}

impl ProblemSSpec {
    pub fn new(variant: Variant, alpha: f64, beta: f64, epsilon_box: f64) -> Self {
        Self { alpha, beta, variant, epsilon_box }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(invalid(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if !(self.epsilon_box > 0.0 && self.epsilon_box < 0.1) {
            return Err(invalid(format!("epsilon_box must lie in (0, 0.1), got {}", self.epsilon_box)));
        }
        Ok(())
    }
}

/// Plain censoring for problem (S): the smallest `p0` whose (O) optimum has
/// `P_M <= alpha`. The (O) optimum is non-increasing in `p0`, which makes the
/// budget a valid bisection variable over the threshold pairs.
pub fn solve_pure_censoring_s(ws: &Workspace, alpha: f64, beta: f64) -> Result<PureSolution> {
    ProblemSSpec::new(Variant::PureCensoring, alpha, beta, 1e-3).validate()?;
    let coarse = PureSearch { grid: ws.settings.tau_grid.min(61), golden_iters: ws.settings.golden_iters.min(8) };
    let at = |p0: f64, search| solve_pure_censoring_o_with(ws, p0, beta, search);
    let top = at(1.0, coarse)?;
    if top.estimate.pm > alpha {
        return Err(Error::Infeasible(format!(
            "plain censoring cannot reach P_M <= {alpha} at P_F <= {beta} (best {:.4})",
            top.estimate.pm
        )));
    }
    let (mut lo, mut hi, mut best) = (0.0, 1.0, top);
    while hi - lo > P0_TOL {
        let mid = 0.5 * (lo + hi);
        match at(mid, coarse) {
            Ok(s) if s.estimate.pm <= alpha => {
                hi = mid;
                best = s;
            }
            _ => lo = mid,
        }
    }
    // Polish at full resolution; keep the coarse design if that loses the cap.
    match at(hi, PureSearch::from_settings(ws)) {
        Ok(s) if s.estimate.pm <= alpha => Ok(s),
        _ => Ok(best),
    }
}

/// `g P(R0|H0) + f P(R-|H0)`, the part of `P_t` that depends on `(g, f)`.
fn rate_objective(h0: &IntervalProbs) -> Posynomial {
    Posynomial::new(vec![
        Monomial { coef: h0.censor, exp_g: 1.0, exp_f: 0.0 },
        Monomial { coef: h0.below, exp_g: 0.0, exp_f: 1.0 },
    ])
}

/// How an outer iteration chose its condensation start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartSource {
    /// The initialisation GP on the dominating posynomials.
    Initialisation,
    /// Best feasible point of a grid scan, used when the initialisation GP
    /// has no solution.
    GridFallback,
    /// The previous outer iterate, kept because it beat the fresh start.
    Previous,
}

impl StartSource {
    pub fn name(self) -> &'static str {
        match self {
            StartSource::Initialisation => "ini",
            StartSource::GridFallback => "grid",
            StartSource::Previous => "previous",
        }
    }
}

/// One accepted point of the condensation loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpIterate {
    pub outer: usize,
    pub inner: usize,
    pub g: f64,
    pub f: f64,
    pub t: f64,
    /// `g P(R0|H0) + f P(R-|H0)`.
    pub objective: f64,
    pub pm_chain: ChainReport,
    pub pf_chain: ChainReport,
    pub start: StartSource,
}

/// Miss and false-alarm constraints at one fusion threshold.
#[derive(Debug, Clone)]
pub struct ConstraintPair {
    pub pm: BasisPolynomial,
    pub pf: BasisPolynomial,
    pub pm_sig: SignomialConstraint,
    pub pf_sig: SignomialConstraint,
}

impl ConstraintPair {
    pub fn at(model: &SemiAnalyticModel, t: f64, alpha: f64, beta: f64) -> Self {
        let (pm, pf) = model.polynomials(t);
        let sig = |p: &BasisPolynomial, cap| {
            let e = p.expand();
            SignomialConstraint { pos: e.positive_part(), neg: e.negative_part(), cap }
        };
        Self { pm_sig: sig(&pm, alpha), pf_sig: sig(&pf, beta), pm, pf }
    }

    fn feasible(&self, g: f64, f: f64) -> bool {
        self.pm_sig.true_slack(g, f) >= -1e-10 && self.pf_sig.true_slack(g, f) >= -1e-10
    }
}

/// Start point from the posynomial bounds that replace `1 - x` by `1/(4x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Initialisation {
    pub g: f64,
    pub f: f64,
    pub source: StartSource,
}

/// Solves the initialisation GP. If it is infeasible, falls back to the
/// cheapest feasible point of a grid on `[eps, 1]^2`, then to the plain
/// censoring corner.
pub fn solve_s_ini(
    cons: &ConstraintPair,
    h0: &IntervalProbs,
    alpha: f64,
    beta: f64,
    eps: f64,
    seed: u64,
) -> Initialisation {
    let dom_m = cons.pm.dominating_posynomial();
    let dom_f = cons.pf.dominating_posynomial();
    let mut rng = stream(seed, Domain::Audit, 0);
    for _ in 0..DOMINANCE_SAMPLES {
        let (g, f): (f64, f64) = (rng.gen_range(eps..=1.0), rng.gen_range(eps..=1.0));
        for (d, p) in [(&dom_m, &cons.pm), (&dom_f, &cons.pf)] {
            let (dv, pv) = (d.eval(g, f), p.eval(g, f));
            assert!(dv >= pv - 1e-12 * pv.abs().max(1.0), "dominating bound fails at ({g}, {f}): {dv} < {pv}");
        }
    }
    let mut constraints = Vec::new();
    for (p, cap) in [(dom_m, alpha), (dom_f, beta)] {
        if !p.terms.is_empty() {
            constraints.push((p, cap));
        }
    }
    let problem = GpProblem { objective: rate_objective(h0), constraints, lower: eps };
    if let Ok(s) = solve_gp_2var(&problem, 0.5, 0.5) {
        if cons.feasible(s.g, s.f) {
            return Initialisation { g: s.g, f: s.f, source: StartSource::Initialisation };
        }
    }
    let n = 101;
    let obj = rate_objective(h0);
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..n {
        for j in 0..n {
            let g = eps + (1.0 - eps) * i as f64 / (n - 1) as f64;
            let f = eps + (1.0 - eps) * j as f64 / (n - 1) as f64;
            if cons.feasible(g, f) {
                let v = obj.eval(g, f);
                if best.is_none_or(|b| v < b.2) {
                    best = Some((g, f, v));
                }
            }
        }
    }
    match best {
        Some((g, f, _)) => Initialisation { g, f, source: StartSource::GridFallback },
        None => {
            log::warn!("no feasible start found; using the plain-censoring corner");
            Initialisation { g: eps, f: 1.0, source: StartSource::GridFallback }
        }
    }
}

/// Successive condensation at fixed `t` from a feasible `(g, f)`.
fn condense_loop(
    cons: &ConstraintPair,
    h0: &IntervalProbs,
    spec: &ProblemSSpec,
    tol: f64,
    max_iter: usize,
    start: (f64, f64),
) -> Vec<(f64, f64, ChainReport, ChainReport)> {
    let obj = rate_objective(h0);
    let (mut g, mut f) = start;
    let mut out = Vec::new();
    for _ in 0..max_iter {
        let mut constraints = Vec::new();
        let mut condensed = Vec::new();
        for sig in [&cons.pm_sig, &cons.pf_sig] {
            if sig.pos.terms.is_empty() {
                condensed.push(None);
                continue;
            }
            let c = sig.condense(g, f);
            constraints.push((c.as_posynomial(), sig.cap));
            condensed.push(Some(c));
        }
        let problem = GpProblem { objective: obj.clone(), constraints, lower: spec.epsilon_box };
        let Ok(sol) = solve_gp_2var(&problem, g, f) else { break };
        let chain = |i: usize, sig: &SignomialConstraint| match &condensed[i] {
            Some(c) => verify_feasibility_chain(sig, c, sol.g, sol.f),
            None => ChainReport { condensed: sig.cap, ratio: sig.cap, original: sig.true_slack(sol.g, sol.f) },
        };
        let (cm, cf) = (chain(0, &cons.pm_sig), chain(1, &cons.pf_sig));
        // Keep the current point if the GP would step outside the true set.
        if !cons.feasible(sol.g, sol.f) || obj.eval(sol.g, sol.f) > obj.eval(g, f) + 1e-12 {
            break;
        }
        let step = (sol.g - g).abs().max((sol.f - f).abs());
        g = sol.g;
        f = sol.f;
        out.push((g, f, cm, cf));
        if step < tol {
            break;
        }
    }
    out
}

/// Multipliers ordered `[lambda_M, lambda_F, mu_g0, mu_g1, mu_f0, mu_f1]`:
/// the two performance caps, then `g >= 0`, `g <= 1`, `f >= 0`, `f <= 1`.
pub type MultipliersS = [f64; 6];

/// Stationarity in `g` and `f` and the six complementary-slackness products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResidualsS {
    pub stationarity: [f64; 2],
    pub complementarity: [f64; 6],
    pub violation: f64,
}

impl KktResidualsS {
    pub fn max(&self) -> f64 {
        self.stationarity.iter().chain(&self.complementarity).fold(self.violation, |a, &b| a.max(b.abs()))
    }
}

/// Value and finite-difference gradients of `P_M`, `P_F` at fixed `t`.
/// Steps turn one-sided at the box edges.
fn grads(model: &SemiAnalyticModel, g: f64, f: f64, t: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let at = |g: f64, f: f64| {
        let w = model.class_weights(g, f);
        [model.pm(&w, t), model.pf(&w, t)]
    };
    let d = |x: f64, sel: usize| {
        let (a, b) = ((x - FD_STEP).max(0.0), (x + FD_STEP).min(1.0));
        let (pa, pb) = if sel == 0 { (at(a, f), at(b, f)) } else { (at(g, a), at(g, b)) };
        [(pb[0] - pa[0]) / (b - a), (pb[1] - pa[1]) / (b - a)]
    };
    let (dg, df) = (d(g, 0), d(f, 1));
    (at(g, f), [dg[0], df[0]], [dg[1], df[1]])
}

/// Constraint gradients in the order of [`MultipliersS`].
fn constraint_grads(dpm: [f64; 2], dpf: [f64; 2]) -> [[f64; 2]; 6] {
    [dpm, dpf, [-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]]
}

/// Residuals of the (S) optimality conditions at `(g, f)` and fixed `t`.
#[allow(clippy::too_many_arguments)]
pub fn kkt_residuals_s(
    model: &SemiAnalyticModel,
    h0: &IntervalProbs,
    g: f64,
    f: f64,
    t: f64,
    alpha: f64,
    beta: f64,
    mult: &MultipliersS,
) -> KktResidualsS {
    let (p, dpm, dpf) = grads(model, g, f, t);
    let a = constraint_grads(dpm, dpf);
    let mut stat = [h0.censor, h0.below];
    for (m, ai) in mult.iter().zip(&a) {
        stat[0] += m * ai[0];
        stat[1] += m * ai[1];
    }
    let values = [p[0] - alpha, p[1] - beta, -g, g - 1.0, -f, f - 1.0];
    let mut comp = [0.0; 6];
    for i in 0..6 {
        comp[i] = (mult[i] * values[i]).abs();
    }
    KktResidualsS {
        stationarity: [stat[0].abs(), stat[1].abs()],
        complementarity: comp,
        violation: values.iter().fold(0.0f64, |a, &v| a.max(v)),
    }
}

/// Non-negative least squares over the active constraints. Two equations, so
/// supports of size at most two are enumerated exhaustively.
pub fn fit_multipliers_s(
    model: &SemiAnalyticModel,
    h0: &IntervalProbs,
    g: f64,
    f: f64,
    t: f64,
    active: [bool; 6],
) -> MultipliersS {
    let (_, dpm, dpf) = grads(model, g, f, t);
    let a = constraint_grads(dpm, dpf);
    let c = [h0.censor, h0.below];
    let resid = |m: &MultipliersS| {
        let mut r = c;
        for (mi, ai) in m.iter().zip(&a) {
            r[0] += mi * ai[0];
            r[1] += mi * ai[1];
        }
        r[0] * r[0] + r[1] * r[1]
    };
    let idx: Vec<usize> = (0..6).filter(|&i| active[i]).collect();
    let mut best = ([0.0; 6], resid(&[0.0; 6]));
    let mut consider = |m: MultipliersS| {
        if m.iter().all(|&v| v >= 0.0 && v.is_finite()) {
            let r = resid(&m);
            if r < best.1 {
                best = (m, r);
            }
        }
    };
    for &i in &idx {
        // Least squares of c + m a_i = 0 in one variable.
        let n2 = a[i][0] * a[i][0] + a[i][1] * a[i][1];
        if n2 > 0.0 {
            let mut m = [0.0; 6];
            m[i] = -(c[0] * a[i][0] + c[1] * a[i][1]) / n2;
            consider(m);
        }
    }
    for (k, &i) in idx.iter().enumerate() {
        for &j in &idx[k + 1..] {
            let det = a[i][0] * a[j][1] - a[j][0] * a[i][1];
            if det.abs() > 1e-300 {
                let mut m = [0.0; 6];
                m[i] = (-c[0] * a[j][1] + c[1] * a[j][0]) / det;
                m[j] = (-a[i][0] * c[1] + a[i][1] * c[0]) / det;
                consider(m);
            }
        }
    }
    best.0
}

/// Optimality certificate of a (S) design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReportS {
    pub multipliers: MultipliersS,
    pub residuals: KktResidualsS,
    pub active: [bool; 6],
}

/// Fits multipliers over the constraints active at `(g, f, t)` and reports
/// the residuals. A cap counts as active within `max(1e-4, 2 se)`.
pub fn certify_s(model: &SemiAnalyticModel, h0: &IntervalProbs, g: f64, f: f64, t: f64, alpha: f64, beta: f64) -> KktReportS {
    let est = model.estimate(g, f, t);
    let near = |v: f64, cap: f64, se: f64| (v - cap).abs() <= (2.0 * se).max(1e-4);
    let active = [
        near(est.pm, alpha, est.pm_se),
        near(est.pf, beta, est.pf_se),
        g <= 1e-9,
        g >= 1.0 - 1e-9,
        f <= 1e-9,
        f >= 1.0 - 1e-9,
    ];
    let multipliers = fit_multipliers_s(model, h0, g, f, t, active);
    KktReportS { multipliers, residuals: kkt_residuals_s(model, h0, g, f, t, alpha, beta, &multipliers), active }
}

#[derive(Debug, Clone)]
pub struct CrtSSolution {
    pub variant: Variant,
    pub design: DesignPoint,
    pub estimate: PerfEstimate,
    pub trace: Vec<GpIterate>,
    pub outer_iterations: usize,
    /// Whether `t` settled to relative change `< 1e-3` within `max_outer`.
    pub converged: bool,
    pub kkt: KktReportS,
}

/// Picks `t` for the next outer iteration from which cap binds at `(g, f)`.
fn adjust_t(model: &SemiAnalyticModel, g: f64, f: f64, t: f64, alpha: f64, beta: f64) -> f64 {
    let est = model.estimate(g, f, t);
    let sm = (alpha - est.pm) / alpha;
    let sf = (beta - est.pf) / beta;
    if sf < BINDING_TOL && sf < sm {
        // False-alarm cap binds: raise t until the miss cap binds instead.
        model.max_t_for_pm(g, f, alpha)
    } else {
        // Miss cap binds, or both are slack: lower t until P_F = beta.
        model.min_t_for_pf(g, f, beta)
    }
}

/// Snaps `g -> 0` and `f -> 1` when that keeps both caps and does not raise
/// the objective by more than `1e-6`.
fn snap(model: &SemiAnalyticModel, h0: &IntervalProbs, g: f64, f: f64, t: f64, alpha: f64, beta: f64) -> (f64, f64, f64) {
    let obj = |g: f64, f: f64| g * h0.censor + f * h0.below;
    let base = obj(g, f);
    let mut best = (g, f, t);
    for (cg, cf) in [(0.0, 1.0), (0.0, f), (g, 1.0)] {
        if obj(cg, cf) > base + 1e-6 {
            continue;
        }
        let ct = model.min_t_for_pf(cg, cf, beta);
        let e = model.estimate(cg, cf, ct);
        if e.pm <= alpha && e.pf <= beta {
            best = (cg, cf, ct);
            break;
        }
    }
    best
}

/// Runs the outer loop at fixed thresholds with `model` defining `P_M`, `P_F`.
fn outer_loop(
    ws: &Workspace,
    model: &SemiAnalyticModel,
    spec: &ProblemSSpec,
    t_d: f64,
    h0: &IntervalProbs,
) -> (f64, f64, f64, Vec<GpIterate>, usize, bool) {
    let s = &ws.settings;
    let obj = |g: f64, f: f64| g * h0.censor + f * h0.below;
    let mut t = t_d;
    let mut prev: Option<(f64, f64)> = None;
    let mut trace = Vec::new();
    let mut best: Option<(f64, f64, f64)> = None;
    let mut converged = false;
    let mut outer = 0;
    while outer < s.max_outer {
        outer += 1;
        let cons = ConstraintPair::at(model, t, spec.alpha, spec.beta);
        let ini = solve_s_ini(&cons, h0, spec.alpha, spec.beta, spec.epsilon_box, s.seed);
        let mut start = ((ini.g, ini.f), ini.source);
        if let Some((g, f)) = prev {
            if cons.feasible(g, f) && (!cons.feasible(ini.g, ini.f) || obj(g, f) < obj(ini.g, ini.f)) {
                start = ((g, f), StartSource::Previous);
            }
        }
        let steps = condense_loop(&cons, h0, spec, s.condense_tol, s.max_condense, start.0);
        let (g, f) = steps.last().map_or(start.0, |x| (x.0, x.1));
        for (inner, (sg, sf, cm, cf)) in steps.into_iter().enumerate() {
            trace.push(GpIterate {
                outer,
                inner: inner + 1,
                g: sg,
                f: sf,
                t,
                objective: obj(sg, sf),
                pm_chain: cm,
                pf_chain: cf,
                start: start.1,
            });
        }
        if cons.feasible(g, f) && best.is_none_or(|b| obj(g, f) < obj(b.0, b.1)) {
            best = Some((g, f, t));
        }
        let t_next = adjust_t(model, g, f, t, spec.alpha, spec.beta);
        // The adjusted t keeps both caps at (g, f) by construction.
        if best.is_some_and(|b| b.0 == g && b.1 == f) {
            best = Some((g, f, t_next));
        }
        prev = Some((g, f));
        let change = (t_next - t).abs() / t.abs().max(1e-300);
        t = t_next;
        if change < 1e-3 {
            converged = true;
            break;
        }
    }
    let (g, f, t) = best.unwrap_or((0.0, 1.0, t_d));
    (g, f, t, trace, outer, converged)
}

/// Randomised-scheme design for problem (S) at the plain-censoring thresholds.
pub fn solve_crt_s(ws: &Workspace, spec: &ProblemSSpec, pure: &PureSolution) -> Result<CrtSSolution> {
    spec.validate()?;
    let thr = pure.thresholds();
    let h0 = interval_probs(&ws.cfg, &thr, Hypothesis::H0);
    let model = match spec.variant {
        Variant::PureCensoring => return Err(invalid("plain censoring has no randomisation to optimise")),
        Variant::Crt2 => ws.crt2_model(&thr),
        Variant::Crt1Mismatched | Variant::Crt1 => ws.pure_model(&thr),
    };
    let (g, f, t, trace, outer, converged) = outer_loop(ws, &model, spec, pure.t(), &h0);
    let (g, f, t) = snap(&model, &h0, g, f, t, spec.alpha, spec.beta);
    let kkt = certify_s(&model, &h0, g, f, t, spec.alpha, spec.beta);
    let mut sol = CrtSSolution {
        variant: spec.variant,
        design: DesignPoint { thresholds: thr, g, f, t, scheme: spec.variant.scheme() },
        estimate: model.estimate(g, f, t),
        trace,
        outer_iterations: outer,
        converged,
        kkt,
    };
    polish(ws, spec, &thr, &h0, &model, &mut sol)?;
    Ok(sol)
}

/// Smallest `P_M` along `g(f)` for a fixed FC model, with `t` re-tightened to
/// the false-alarm cap at every point.
fn fixed_model_scan(model: &SemiAnalyticModel, path: &RatePath, lo: f64, hi: f64, beta: f64, n: usize, iters: usize) -> (f64, f64) {
    let eval = |f: f64| {
        let g = path.g(f).clamp(0.0, 1.0);
        let t = model.min_t_for_pf(g, f, beta);
        model.estimate(g, f, t).pm
    };
    let grid = linspace(lo, hi, n);
    let pts: Vec<(f64, f64)> = grid.par_iter().map(|&f| (f, eval(f))).collect();
    let best = argmin(&pts).expect("non-empty grid");
    let i = grid.iter().position(|&x| x == best.0).expect("grid point");
    let (a, b) = (grid[i.saturating_sub(1)], grid[(i + 1).min(grid.len() - 1)]);
    let mut seen = pts;
    if b > a {
        seen.extend(golden_section(eval, a, b, iters));
    }
    argmin(&seen).expect("non-empty")
}

/// Lowers the budget below the current design while some point of the
/// constant-rate line still meets the miss cap with `t` re-tightened to the
/// false-alarm cap. The alternation above cannot leave a point where both
/// caps bind at fixed `t`; this search can, because it moves `t` with `(g, f)`.
fn polish(
    ws: &Workspace,
    spec: &ProblemSSpec,
    thr: &Thresholds,
    h0: &IntervalProbs,
    model: &SemiAnalyticModel,
    sol: &mut CrtSSolution,
) -> Result<()> {
    let s = &ws.settings;
    let aware = spec.variant == Variant::Crt1;
    let attempt = |p: f64| -> Option<(f64, f64)> {
        let path = RatePath::new(&ws.cfg, thr, p).ok()?;
        let range = path.feasible_range().ok()?;
        let (f, pm) = if aware {
            let (_, f, pm) = crt1_full_scan(ws, thr, &path, range, spec.beta, s.joint_f_grid.min(21), s.golden_iters.min(12));
            (f, pm)
        } else {
            fixed_model_scan(model, &path, range.lo, range.hi, spec.beta, s.f_grid.min(61), s.golden_iters.min(16))
        };
        (pm <= spec.alpha).then(|| (path.g(f).clamp(0.0, 1.0), f))
    };
    let mut hi = h0.above + sol.design.g * h0.censor + sol.design.f * h0.below;
    let mut best = None;
    let mut lo = (hi - 0.1).max(h0.above);
    while let Some(x) = attempt(lo) {
        best = Some(x);
        hi = lo;
        if lo <= h0.above {
            break;
        }
        lo = (lo - 0.1).max(h0.above);
    }
    while hi - lo > P0_TOL {
        let mid = 0.5 * (lo + hi);
        match attempt(mid) {
            Some(x) => {
                hi = mid;
                best = Some(x);
            }
            None => lo = mid,
        }
    }
    let Some((g, f)) = best else {
        if aware {
            // The aware FC still needs its own model at the unchanged design.
            let (g, f) = (sol.design.g, sol.design.f);
            let m = ws.crt1_model(thr, g, f);
            let t = m.min_t_for_pf(g, f, spec.beta);
            let estimate = m.estimate(g, f, t);
            if estimate.pm <= spec.alpha {
                sol.design.t = t;
                sol.estimate = estimate;
                sol.kkt = certify_s(&m, h0, g, f, t, spec.alpha, spec.beta);
            }
        }
        return Ok(());
    };
    let owned;
    let m = if aware {
        owned = ws.crt1_model(thr, g, f);
        &owned
    } else {
        model
    };
    let t = m.min_t_for_pf(g, f, spec.beta);
    // An aware FC model is specific to (g, f), so corner snaps need their own.
    let (g, f, t) = if aware { (g, f, t) } else { snap(m, h0, g, f, t, spec.alpha, spec.beta) };
    let estimate = m.estimate(g, f, t);
    if estimate.pm > spec.alpha {
        return Err(Error::Infeasible("budget polish lost the miss cap".into()));
    }
    sol.design = DesignPoint { thresholds: *thr, g, f, t, scheme: spec.variant.scheme() };
    sol.estimate = estimate;
    sol.kkt = certify_s(m, h0, g, f, t, spec.alpha, spec.beta);
    Ok(())
}
