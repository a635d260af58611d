//! Numerical checks of the derivative signs at `f = 1` that make randomised
//! transmission worthwhile, and of the interior-optimum conditions they
//! imply.
//!
//! Finite differences run along the constant-rate line `g(f)` at the
//! plain-censoring fusion threshold, on shared channel banks. Their noise
//! floor is three times the spread over independently seeded banks. The
//! first-scheme derivative is also assembled term by term from stand-alone
//! category simulations, which shares no samples with the banks.

use std::collections::HashMap;

use serde::Serialize;

use crate::composition::multinomial;
use crate::error::Result;
use crate::fusion::AssumedModel;
use crate::gaussian::{IntervalCounts, RectangleTable};
use crate::model::{DesignPoint, Hypothesis, NetworkConfig, RatePath, Scheme};
use crate::perf::{estimate_pu, CategoryVector, SemiAnalyticModel};
use crate::problem_o::{path_derivatives, CrtSolution, PureSolution};
use crate::workspace::{SolverSettings, Workspace};

/// Seeds behind the finite-difference noise floor.
pub const NOISE_SEEDS: u64 = 5;
/// Spanning mass below which observations count as confined to two
/// consecutive intervals.
pub const SPANNING_MASS_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub dpm_df: f64,
    pub dpf_df: f64,
    pub dpm_se: f64,
    pub dpf_se: f64,
    /// Ratio sums with the one-below-silent interval probabilities on top and
    /// the all-sent ones below, summed over the below-sent count. The largest
    /// value over the above count is kept.
    pub gamma_m: f64,
    pub gamma_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeReport {
    pub rho: f64,
    pub p0: f64,
    pub tau2: f64,
    pub dpm_df_at_1: f64,
    pub dpf_df_at_1: f64,
    /// Three times the sample deviation over [`NOISE_SEEDS`] bank seeds.
    pub noise_pm: f64,
    pub noise_pf: f64,
    /// H1 probability that some sensor is below and another above.
    pub spanning_mass: f64,
    /// `-dg/df` on the constant-rate line.
    pub slope: f64,
    pub closed_form: Option<ClosedForm>,
}

impl DerivativeReport {
    pub fn two_consecutive(&self) -> bool {
        self.spanning_mass < SPANNING_MASS_TOL
    }

    pub fn tau2_negative(&self) -> bool {
        self.tau2 < 0.0
    }

    /// Finite difference and closed form within three combined standard
    /// errors, the finite-difference error being `noise / 3`.
    pub fn routes_agree(&self) -> Option<bool> {
        self.closed_form.map(|c| {
            let sm = (c.dpm_se.powi(2) + (self.noise_pm / 3.0).powi(2)).sqrt();
            let sf = (c.dpf_se.powi(2) + (self.noise_pf / 3.0).powi(2)).sqrt();
            (self.dpm_df_at_1 - c.dpm_df).abs() <= 3.0 * sm && (self.dpf_df_at_1 - c.dpf_df).abs() <= 3.0 * sf
        })
    }
}

/// H1 mass of assignments with at least one sensor below and one above.
pub fn spanning_mass(cfg: &NetworkConfig, table: &RectangleTable) -> f64 {
    IntervalCounts::all(cfg.k)
        .into_iter()
        .filter(|c| c.below > 0 && c.above > 0)
        .map(|c| multinomial(&[c.below, c.censor, c.above]) * table.get(c))
        .sum()
}

fn sample_sd(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Finite differences at `f = 1` for the main bank and the spread over
/// extra seeds.
fn fd_with_floor(
    ws: &Workspace,
    pure: &PureSolution,
    p0: f64,
    build: impl Fn(&Workspace) -> SemiAnalyticModel,
) -> Result<((f64, f64), (f64, f64))> {
    let path = RatePath::new(&ws.cfg, &pure.thresholds(), p0)?;
    let main = path_derivatives(&build(ws), &path, 1.0, pure.t());
    let mut pm = Vec::new();
    let mut pf = Vec::new();
    for i in 0..NOISE_SEEDS {
        let settings = SolverSettings { seed: ws.settings.seed.wrapping_add(1000 + i), ..ws.settings.clone() };
        let other = Workspace::new(&ws.cfg, &settings)?;
        let d = path_derivatives(&build(&other), &path, 1.0, pure.t());
        pm.push(d.0);
        pf.push(d.1);
    }
    Ok((main, (3.0 * sample_sd(&pm), 3.0 * sample_sd(&pf))))
}

fn base_report(ws: &Workspace, pure: &PureSolution, p0: f64, fd: ((f64, f64), (f64, f64))) -> Result<DerivativeReport> {
    let thr = pure.thresholds();
    let path = RatePath::new(&ws.cfg, &thr, p0)?;
    let h1 = ws.cache.table(&ws.cfg, ws.cfg.rho, &thr, Hypothesis::H1);
    Ok(DerivativeReport {
        rho: ws.cfg.rho,
        p0,
        tau2: thr.tau2,
        dpm_df_at_1: fd.0 .0,
        dpf_df_at_1: fd.0 .1,
        noise_pm: fd.1 .0,
        noise_pf: fd.1 .1,
        spanning_mass: spanning_mass(&ws.cfg, &h1),
        slope: -path.dg_df(),
        closed_form: None,
    })
}

/// First scheme with the FC fusing as plain censoring.
pub fn check_theorem1(ws: &Workspace, pure: &PureSolution, p0: f64) -> Result<DerivativeReport> {
    let fd = fd_with_floor(ws, pure, p0, |w| w.pure_model(&pure.thresholds()))?;
    let mut report = base_report(ws, pure, p0, fd)?;
    report.closed_form = Some(closed_form_derivative_b(ws, pure, p0)?);
    Ok(report)
}

/// Second scheme, whose FC knows the randomisation bits.
pub fn check_theorem2(ws: &Workspace, pure: &PureSolution, p0: f64) -> Result<DerivativeReport> {
    let fd = fd_with_floor(ws, pure, p0, |w| w.crt2_model(&pure.thresholds()))?;
    base_report(ws, pure, p0, fd)
}

/// First-scheme derivatives at `f = 1` from the categories that survive
/// differentiation there. With `a = [above, censor-silent, censor-sent,
/// below-silent, below-sent]` and `g' = dg/df`:
///
/// * no silent-below and no sent-censor sensor: weight `-a[1] g' + a[4]`,
/// * exactly one sent-censor sensor: weight `g'`,
/// * exactly one silent-below sensor: weight `-1`,
///
/// each times the multinomial count, the interval probability and the
/// fusion outcome of that category.
pub fn closed_form_derivative_b(ws: &Workspace, pure: &PureSolution, p0: f64) -> Result<ClosedForm> {
    let cfg = &ws.cfg;
    let k = cfg.k;
    let thr = pure.thresholds();
    let path = RatePath::new(cfg, &thr, p0)?;
    let gp = path.dg_df();
    let tables = [
        ws.cache.table(cfg, cfg.rho, &thr, Hypothesis::H1),
        ws.cache.table(cfg, cfg.rho, &thr, Hypothesis::H0),
    ];
    let design = DesignPoint::pure(thr, pure.t());
    let assumed = AssumedModel::censoring(cfg.rho);
    let s = &ws.settings;
    let mut cache: HashMap<[usize; 5], (f64, f64)> = HashMap::new();
    let mut pu = |a: [usize; 5]| -> Result<(f64, f64)> {
        if let Some(v) = cache.get(&a) {
            return Ok(*v);
        }
        let v = estimate_pu(cfg, &design, &CategoryVector::Crt1(a), &assumed, s.n_mc_pu, s.seed, s.quadrature_nodes)?;
        cache.insert(a, v);
        Ok(v)
    };
    let px = |a: [usize; 5], h: usize| tables[h].get(CategoryVector::Crt1(a).interval_counts());

    let (mut dm, mut df, mut vm, mut vf) = (0.0, 0.0, 0.0, 0.0);
    let (mut gamma_m, mut gamma_f) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for a1 in 0..=k {
        let (mut gm_num, mut gm_den, mut gf_num, mut gf_den) = (0.0, 0.0, 0.0, 0.0);
        for a5 in 0..=k - a1 {
            let n = k - a1 - a5;
            let a00 = [a1, n, 0, 0, a5];
            let mut terms = vec![(a00, -(n as f64) * gp + a5 as f64)];
            if n >= 1 {
                let a10 = [a1, n - 1, 1, 0, a5];
                let a01 = [a1, n - 1, 0, 1, a5];
                terms.push((a10, gp));
                terms.push((a01, -1.0));
                let w = multinomial(&a10);
                let diff = pu(a10)?.0 - pu(a01)?.0;
                gm_num += w * diff * px(a01, 0);
                gm_den += w * diff * px(a00, 0);
                gf_num += w * diff * px(a01, 1);
                gf_den += w * diff * px(a00, 1);
            }
            for (a, weight) in terms {
                let (p, se) = pu(a)?;
                let c = multinomial(&a) * weight;
                dm += c * px(a, 0) * (1.0 - p);
                df += c * px(a, 1) * p;
                vm += (c * px(a, 0) * se).powi(2);
                vf += (c * px(a, 1) * se).powi(2);
            }
        }
        if gm_den != 0.0 {
            gamma_m = gamma_m.max(gm_num / gm_den);
        }
        if gf_den != 0.0 {
            gamma_f = gamma_f.max(gf_num / gf_den);
        }
    }
    Ok(ClosedForm {
        dpm_df: dm,
        dpf_df: df,
        dpm_se: vm.sqrt(),
        dpf_se: vf.sqrt(),
        gamma_m,
        gamma_f,
    })
}

/// Position of family `l` (1 to 6) with bit `m` in a second-scheme
/// category vector.
fn family(l: usize, m: usize) -> usize {
    2 * (l - 1) + m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapClaim {
    Negligible,
    Positive,
}

/// Least favourable no-alarm gap between second-scheme categories that
/// differ in one sensor, over the categories that survive differentiation
/// at `f = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoryGap {
    pub check: &'static str,
    pub claim: GapClaim,
    pub value: f64,
    pub se: f64,
}

impl CategoryGap {
    pub fn holds(&self) -> bool {
        match self.claim {
            GapClaim::Negligible => self.value.abs() <= 3.0 * self.se,
            GapClaim::Positive => self.value > 3.0 * self.se,
        }
    }
}

const CHECKS: [(&str, GapClaim); 4] = [
    ("t2_censor_rate_bit_gap", GapClaim::Negligible),
    ("t2_censor_silent_vs_sent", GapClaim::Positive),
    ("t2_above_censor_bit_gap", GapClaim::Negligible),
    ("t2_above_rate_bit_gap", GapClaim::Positive),
];

/// No-alarm gaps behind the second-scheme derivative signs, at the
/// plain-censoring design:
///
/// * a silent censored sensor with `r_f = 1` against one with `r_f = 0`,
///   claimed negligible,
/// * a silent censored sensor against one sent by `r_g = 1`, both with
///   `r_f = 1`, claimed positive,
/// * an above sensor with `r_f = 1` and `r_g = 1` against `r_g = 0`, claimed
///   negligible,
/// * an above sensor with `r_f = 1, r_g = 0` against `r_f = 0, r_g = 1`,
///   claimed positive.
///
/// The pairs share interval counts, so each gap alone separates their
/// terms.
pub fn second_scheme_category_gaps(ws: &Workspace, pure: &PureSolution) -> Result<Vec<CategoryGap>> {
    let cfg = &ws.cfg;
    let k = cfg.k;
    let design = DesignPoint::pure(pure.thresholds(), pure.t());
    let assumed = AssumedModel::censoring(cfg.rho);
    let s = &ws.settings;
    let mut cache: HashMap<[usize; 12], (f64, f64)> = HashMap::new();
    let mut no_alarm = |a: [usize; 12]| -> Result<(f64, f64)> {
        if let Some(v) = cache.get(&a) {
            return Ok(*v);
        }
        let (p, se) = estimate_pu(cfg, &design, &CategoryVector::Crt2(a), &assumed, s.n_mc_pu, s.seed, s.quadrature_nodes)?;
        cache.insert(a, (1.0 - p, se));
        Ok((1.0 - p, se))
    };
    let with = |base: [usize; 12], extra: &[(usize, usize)]| {
        let mut a = base;
        for &(i, n) in extra {
            a[i] += n;
        }
        a
    };
    // Gap and standard error per check, in the order of `CHECKS`.
    let mut seen: [Vec<(f64, f64)>; 4] = Default::default();
    let gap = |x: (f64, f64), y: (f64, f64)| (x.0 - y.0, x.1.hypot(y.1));
    for l1 in 0..k {
        for l2 in 0..k - l1 {
            let base = with([0; 12], &[(family(1, 0), l1), (family(2, 1), l2), (family(5, 0), k - 1 - l1 - l2)]);
            let silent = no_alarm(with(base, &[(family(2, 1), 1)]))?;
            seen[0].push(gap(silent, no_alarm(with(base, &[(family(2, 0), 1)]))?));
            seen[1].push(gap(silent, no_alarm(with(base, &[(family(3, 1), 1)]))?));
        }
    }
    for kp in 1..=k {
        for a21 in 0..=k - kp {
            let base = with([0; 12], &[(family(2, 1), a21), (family(5, 0), k - kp - a21), (family(1, 0), kp - 1)]);
            let rate_bit = no_alarm(with(base, &[(family(1, 0), 1)]))?;
            seen[2].push(gap(no_alarm(with(base, &[(family(1, 1), 1)]))?, rate_bit));
            seen[3].push(gap(rate_bit, no_alarm(with(base, &[(family(6, 1), 1)]))?));
        }
    }
    let z = |&(v, se): &(f64, f64)| v / se.max(1e-15);
    Ok(CHECKS
        .iter()
        .zip(seen)
        .map(|(&(check, claim), gaps)| {
            // Least favourable to the claim: largest |z| or smallest z.
            let key = |g: &(f64, f64)| match claim {
                GapClaim::Negligible => -z(g).abs(),
                GapClaim::Positive => z(g),
            };
            let (value, se) = gaps.into_iter().min_by(|a, b| key(a).total_cmp(&key(b))).expect("at least one category");
            CategoryGap { check, claim, value, se }
        })
        .collect())
}

/// Verification lines for the category gaps; asserted only when `tau2 < 0`.
pub fn category_gap_lines(rho: f64, p0: f64, tau2: f64, gaps: &[CategoryGap]) -> Vec<VerifyLine> {
    gaps.iter()
        .map(|g| VerifyLine {
            check: g.check,
            rho,
            p0,
            tau2,
            value: g.value,
            tolerance: 3.0 * g.se,
            outcome: if tau2 < 0.0 { Outcome::of(g.holds()) } else { Outcome::ConditionUnmet },
        })
        .collect()
}

/// One row of the interior-optimum table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryRow {
    pub scheme: Scheme,
    pub rho: f64,
    pub p0: f64,
    pub tau2: f64,
    pub spanning_mass: f64,
    pub f_star: f64,
    pub g_star: f64,
    pub interior: bool,
    /// Whether a sufficient condition for an interior optimum holds: small
    /// spanning mass for either scheme, or `tau2 < 0` for the second.
    pub predicted: bool,
}

impl CorollaryRow {
    /// Sufficient conditions only: a prediction must be met, an interior
    /// optimum without one is not a contradiction.
    pub fn consistent(&self) -> bool {
        !self.predicted || self.interior
    }
}

pub fn corollary_row(ws: &Workspace, pure: &PureSolution, sol: &CrtSolution, p0: f64) -> CorollaryRow {
    let thr = pure.thresholds();
    let h1 = ws.cache.table(&ws.cfg, ws.cfg.rho, &thr, Hypothesis::H1);
    let mass = spanning_mass(&ws.cfg, &h1);
    let scheme = sol.variant.scheme();
    let cond_a = mass < SPANNING_MASS_TOL;
    let predicted = match scheme {
        Scheme::Crt2 => cond_a || thr.tau2 < 0.0,
        _ => cond_a,
    };
    let f = sol.design.f;
    CorollaryRow {
        scheme,
        rho: ws.cfg.rho,
        p0,
        tau2: thr.tau2,
        spanning_mass: mass,
        f_star: f,
        g_star: sol.design.g,
        interior: f > 1e-9 && f < 1.0 - 1e-9,
        predicted,
    }
}

/// Whether an interior stage-1 optimum for the mismatched FC turned into a
/// resolved miss-probability gain for the aware FC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaOneCheck {
    pub stage1_interior: bool,
    pub pm_pure: f64,
    pub pm_crt1: f64,
    pub combined_se: f64,
}

impl LemmaOneCheck {
    pub fn holds(&self) -> bool {
        !self.stage1_interior || self.pm_crt1 < self.pm_pure - 3.0 * self.combined_se
    }
}

pub fn check_lemma1(pure: &PureSolution, mismatched: &CrtSolution, full: &CrtSolution) -> LemmaOneCheck {
    let f = mismatched.kkt.f_star;
    LemmaOneCheck {
        stage1_interior: f > 1e-9 && f < 1.0 - 1e-9,
        pm_pure: pure.estimate.pm,
        pm_crt1: full.estimate.pm,
        combined_se: (pure.estimate.pm_se.powi(2) + full.estimate.pm_se.powi(2)).sqrt(),
    }
}

/// Outcome of one verification line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// The check's precondition does not hold, so nothing is asserted.
    ConditionUnmet,
}

impl Outcome {
    fn of(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::ConditionUnmet => "condition_unmet",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyLine {
    pub check: &'static str,
    pub rho: f64,
    pub p0: f64,
    pub tau2: f64,
    pub value: f64,
    /// Noise floor or standard error the value is judged against.
    pub tolerance: f64,
    pub outcome: Outcome,
}

/// Finite differences smaller than this are round-off whatever the seed
/// spread says.
pub const ROUNDOFF: f64 = 1e-10;

/// Positive beyond its noise floor. A bare sign test would accept round-off.
pub fn resolved_positive(value: f64, noise: f64) -> bool {
    value > noise.max(ROUNDOFF)
}

/// Verification lines for the first-scheme derivative report.
pub fn theorem1_lines(r: &DerivativeReport) -> Vec<VerifyLine> {
    let line = |check, value, tolerance, outcome| VerifyLine { check, rho: r.rho, p0: r.p0, tau2: r.tau2, value, tolerance, outcome };
    let mut out = vec![line("t1_dpf_positive", r.dpf_df_at_1, r.noise_pf, Outcome::of(resolved_positive(r.dpf_df_at_1, r.noise_pf)))];
    out.push(line(
        "t1_dpm_flat",
        r.dpm_df_at_1,
        5.0 * r.noise_pm,
        if r.two_consecutive() { Outcome::of(r.dpm_df_at_1.abs() < 5.0 * r.noise_pm) } else { Outcome::ConditionUnmet },
    ));
    if let Some(c) = r.closed_form {
        let agree = r.routes_agree().unwrap_or(false);
        out.push(line("t1_closed_form_pm", c.dpm_df, c.dpm_se, Outcome::of(agree)));
        out.push(line("t1_closed_form_pf", c.dpf_df, c.dpf_se, Outcome::of(agree)));
        let cap = r.p0 / (1.0 - r.p0);
        out.push(line("t1_gamma_f_below_rate_ratio", c.gamma_f, cap, Outcome::of(c.gamma_f < cap)));
    }
    out
}

/// Verification lines for the second-scheme derivative report.
pub fn theorem2_lines(r: &DerivativeReport) -> Vec<VerifyLine> {
    let line = |check, value, tolerance, outcome| VerifyLine { check, rho: r.rho, p0: r.p0, tau2: r.tau2, value, tolerance, outcome };
    let judge = |v, n| if r.tau2_negative() { Outcome::of(resolved_positive(v, n)) } else { Outcome::ConditionUnmet };
    vec![
        line("t2_dpm_positive", r.dpm_df_at_1, r.noise_pm, judge(r.dpm_df_at_1, r.noise_pm)),
        line("t2_dpf_positive", r.dpf_df_at_1, r.noise_pf, judge(r.dpf_df_at_1, r.noise_pf)),
    ]
}

pub fn corollary_line(row: &CorollaryRow) -> VerifyLine {
    VerifyLine {
        check: match row.scheme {
            Scheme::Crt2 => "corollary_crt2_interior",
            _ => "corollary_crt1_interior",
        },
        rho: row.rho,
        p0: row.p0,
        tau2: row.tau2,
        value: row.f_star,
        tolerance: row.spanning_mass,
        outcome: if row.predicted { Outcome::of(row.interior) } else { Outcome::ConditionUnmet },
    }
}

pub fn lemma1_line(rho: f64, p0: f64, tau2: f64, c: &LemmaOneCheck) -> VerifyLine {
    VerifyLine {
        check: "lemma1_crt1_gain",
        rho,
        p0,
        tau2,
        value: c.pm_pure - c.pm_crt1,
        tolerance: 3.0 * c.combined_se,
        outcome: if c.stage1_interior { Outcome::of(c.holds()) } else { Outcome::ConditionUnmet },
    }
}

/// Runs every derivative check on one network, and with `solve` also the
/// interior-optimum and first-scheme gain checks.
pub fn verify_point(ws: &Workspace, p0: f64, beta: f64, solve: bool) -> Result<Vec<VerifyLine>> {
    let pure = crate::problem_o::solve_pure_censoring_o(ws, p0, beta)?;
    let mut out = theorem1_lines(&check_theorem1(ws, &pure, p0)?);
    out.extend(theorem2_lines(&check_theorem2(ws, &pure, p0)?));
    out.extend(category_gap_lines(ws.cfg.rho, p0, pure.thresholds().tau2, &second_scheme_category_gaps(ws, &pure)?));
    if solve {
        use crate::problem_o::{solve_crt_o, ProblemOSpec};
        use crate::workspace::Variant;
        let crt2 = solve_crt_o(ws, &ProblemOSpec::new(Variant::Crt2, p0, beta), &pure)?;
        let mism = solve_crt_o(ws, &ProblemOSpec::new(Variant::Crt1Mismatched, p0, beta), &pure)?;
        let full = solve_crt_o(ws, &ProblemOSpec::new(Variant::Crt1, p0, beta), &pure)?;
        out.push(corollary_line(&corollary_row(ws, &pure, &crt2, p0)));
        out.push(corollary_line(&corollary_row(ws, &pure, &mism, p0)));
        out.push(lemma1_line(ws.cfg.rho, p0, pure.thresholds().tau2, &check_lemma1(&pure, &mism, &full)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Thresholds;
    use crate::quadrature::GaussHermite;

    #[test]
    fn round_off_is_not_a_positive_derivative() {
        assert!(!resolved_positive(1.7e-14, 1.4e-14));
        assert!(!resolved_positive(0.004, 0.005));
        assert!(resolved_positive(0.01, 0.002));
    }

    #[test]
    fn spanning_mass_vanishes_for_one_sensor_and_grows_with_spread() {
        let thr = Thresholds::new(0.6, -0.1).unwrap();
        let gh = GaussHermite::new(64);
        let one = NetworkConfig::from_snr_db(1, 1.0, 10.0, 5.0, 0.0).unwrap();
        let t = RectangleTable::for_hypothesis(&one, 0.0, &thr, Hypothesis::H1, &gh);
        assert_eq!(spanning_mass(&one, &t), 0.0);
        let five = NetworkConfig::from_snr_db(5, 1.0, 10.0, 5.0, 0.0).unwrap();
        let independent = spanning_mass(&five, &RectangleTable::for_hypothesis(&five, 0.0, &thr, Hypothesis::H1, &gh));
        let correlated = spanning_mass(&five, &RectangleTable::for_hypothesis(&five, 0.9, &thr, Hypothesis::H1, &gh));
        assert!(independent > correlated && correlated > 0.0, "{independent} {correlated}");
    }
}
