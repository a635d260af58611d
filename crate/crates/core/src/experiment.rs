//! Sweeps over network and constraint parameters, written as CSV.
//!
//! Every sweep point gets its own [`Workspace`], so its numbers depend only
//! on the point and the seed, never on the worker that ran it. Rows are
//! buffered and written in sweep order.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ExperimentId, ExperimentSpec, NetworkSection, Problem};
use crate::error::{Error, Result};
use crate::fusion::AssumedModel;
use crate::model::DesignPoint;
use crate::perf::{perf_oracle, PerfEstimate};
use crate::problem_o::{solve_crt_o, solve_pure_censoring_o, ProblemOSpec};
use crate::problem_s::{solve_crt_s, solve_pure_censoring_s, CrtSSolution, ProblemSSpec};
use crate::workspace::{SolverSettings, Variant, Workspace};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "CENSORNET_WORKERS";

/// One solve: a network, a problem, its budget and the false-alarm cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub problem: Problem,
    pub snr_c_db: f64,
    pub snr_h_db: f64,
    pub rho: f64,
    /// `p0` for problem O, `alpha` for problem S.
    pub budget: f64,
    pub beta: f64,
    /// Design at `rho = 0` and evaluate at `rho`, plain censoring only.
    pub mismatch: bool,
}

/// Cartesian block of sweep points sharing a problem and sensing SNR.
#[derive(Debug, Clone)]
struct Block {
    problem: Problem,
    snr_c_db: f64,
    snr_h_db: Vec<f64>,
    rho: Vec<f64>,
    budget: Vec<f64>,
    beta: Vec<f64>,
    mismatch: bool,
}

impl Block {
    fn new(problem: Problem, snr_c_db: f64, snr_h_db: &[f64], rho: &[f64], budget: &[f64], beta: &[f64]) -> Self {
        Self {
            problem,
            snr_c_db,
            snr_h_db: snr_h_db.to_vec(),
            rho: rho.to_vec(),
            budget: budget.to_vec(),
            beta: beta.to_vec(),
            mismatch: false,
        }
    }

    fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for &snr_h_db in &self.snr_h_db {
            for &beta in &self.beta {
                for &budget in &self.budget {
                    for &rho in &self.rho {
                        out.push(SweepPoint {
                            problem: self.problem,
                            snr_c_db: self.snr_c_db,
                            snr_h_db,
                            rho,
                            budget,
                            beta,
                            mismatch: self.mismatch,
                        });
                    }
                }
            }
        }
        out
    }
}

const SNR_H_SWEEP: [f64; 9] = [0.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0, 17.5, 20.0];
const BETA_SWEEP: [f64; 6] = [0.005, 0.01, 0.02, 0.03, 0.05, 0.1];
const RHO_SWEEP: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

fn preset(spec: &ExperimentSpec) -> Vec<Block> {
    use Problem::{O, S};
    let n = &spec.network;
    match spec.experiment {
        ExperimentId::Table1 => vec![Block::new(O, 10.0, &[5.0], &[0.5, 0.7], &[0.4, 0.6, 0.8], &[0.01])],
        ExperimentId::Table2 => vec![Block::new(O, 10.0, &[10.0], &[0.5], &[0.4, 0.6, 0.8], &[0.01])],
        ExperimentId::Table3 => vec![
            Block::new(O, 10.0, &[5.0], &RHO_SWEEP, &[0.4], &[0.01]),
            Block::new(O, 12.0, &[5.0], &[0.0], &[0.4, 0.5, 0.8], &[0.01]),
        ],
        ExperimentId::Table4 => {
            let mut b = Block::new(O, 10.0, &[5.0], &[0.0, 0.1, 0.3, 0.5, 0.7, 0.9], &[0.4, 0.6, 0.8], &[0.01]);
            b.mismatch = true;
            vec![b]
        }
        ExperimentId::Table5 => vec![
            Block::new(S, 10.0, &[5.0], &RHO_SWEEP, &[0.1], &[0.01]),
            Block::new(S, 12.0, &[5.0], &[0.0], &[0.025], &[0.01]),
        ],
        ExperimentId::FigPmVsSnrh => vec![Block::new(O, 10.0, &SNR_H_SWEEP, &[0.5], &[0.4], &[0.01])],
        ExperimentId::FigPmVsBeta => vec![Block::new(O, 10.0, &[10.0], &[0.5], &[0.4], &BETA_SWEEP)],
        ExperimentId::FigPtVsSnrh => vec![Block::new(S, 10.0, &SNR_H_SWEEP, &[0.5], &[0.06], &[0.01])],
        ExperimentId::FigPtVsBeta => vec![Block::new(S, 10.0, &[10.0], &[0.5], &[0.06], &BETA_SWEEP)],
        ExperimentId::Custom => {
            let budget = if spec.problem == O { 0.4 } else { 0.1 };
            vec![Block::new(spec.problem, n.snr_c_db, &[n.snr_h_db], &[n.rho], &[budget], &[0.01])]
        }
    }
}

/// Sweep points of an experiment in output order, after overrides.
pub fn sweep_points(spec: &ExperimentSpec) -> Vec<SweepPoint> {
    let s = &spec.sweeps;
    preset(spec)
        .into_iter()
        .flat_map(|mut b| {
            if let Some(v) = &s.snr_h_db {
                b.snr_h_db = v.clone();
            }
            if let Some(v) = &s.rho {
                b.rho = v.clone();
            }
            if let Some(v) = &s.beta {
                b.beta = v.clone();
            }
            let budget = if b.problem == Problem::O { &s.p0 } else { &s.alpha };
            if let Some(v) = budget {
                b.budget = v.clone();
            }
            b.points()
        })
        .collect()
}

/// One CSV line. Optional fields are empty when the solve failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub experiment: &'static str,
    pub problem: &'static str,
    pub scheme: &'static str,
    pub snr_c_db: f64,
    pub snr_h_db: f64,
    pub rho: f64,
    /// Correlation assumed by the FC rule.
    pub rho_fc: f64,
    pub p0: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub g: Option<f64>,
    pub f: Option<f64>,
    pub t: Option<f64>,
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
    pub pm: Option<f64>,
    pub pm_se: Option<f64>,
    pub pf: Option<f64>,
    pub pf_se: Option<f64>,
    pub pt: Option<f64>,
    pub pt_se: Option<f64>,
    /// `oracle` when end-to-end simulation produced the numbers, else `semi`.
    pub route: &'static str,
    /// `ok`, `infeasible` or `nonconverged`.
    pub status: &'static str,
}

/// Column order of every CSV written here.
pub const CSV_COLUMNS: [&str; 23] = [
    "experiment", "problem", "scheme", "snr_c_db", "snr_h_db", "rho", "rho_fc", "p0", "alpha", "beta", "g", "f", "t",
    "tau1", "tau2", "pm", "pm_se", "pf", "pf_se", "pt", "pt_se", "route", "status",
];

impl Row {
    fn blank(id: ExperimentId, point: &SweepPoint, variant: Variant, status: &'static str) -> Self {
        let (p0, alpha) = match point.problem {
            Problem::O => (Some(point.budget), None),
            Problem::S => (None, Some(point.budget)),
        };
        Row {
            experiment: id.name(),
            problem: point.problem.name(),
            scheme: variant.name(),
            snr_c_db: point.snr_c_db,
            snr_h_db: point.snr_h_db,
            rho: point.rho,
            rho_fc: if point.mismatch { 0.0 } else { point.rho },
            p0,
            alpha,
            beta: point.beta,
            g: None,
            f: None,
            t: None,
            tau1: None,
            tau2: None,
            pm: None,
            pm_se: None,
            pf: None,
            pf_se: None,
            pt: None,
            pt_se: None,
            route: "semi",
            status,
        }
    }

    fn fill(mut self, design: &DesignPoint, est: &PerfEstimate, route: &'static str) -> Self {
        self.g = Some(design.g);
        self.f = Some(design.f);
        self.t = Some(design.t);
        self.tau1 = Some(design.thresholds.tau1);
        self.tau2 = Some(design.thresholds.tau2);
        self.pm = Some(est.pm);
        self.pm_se = Some(est.pm_se);
        self.pf = Some(est.pf);
        self.pf_se = Some(est.pf_se);
        self.pt = Some(est.pt);
        self.pt_se = Some(est.pt_se);
        self.route = route;
        self
    }
}

fn status_of(err: &Error) -> &'static str {
    match err {
        Error::Infeasible(_) => "infeasible",
        _ => "nonconverged",
    }
}

/// Row for a solved design, certified end to end when the oracle is enabled.
fn solved_row(ws: &Workspace, id: ExperimentId, point: &SweepPoint, variant: Variant, design: &DesignPoint, semi: &PerfEstimate, ok: bool) -> Row {
    let status = if ok { "ok" } else { "nonconverged" };
    let row = Row::blank(id, point, variant, status);
    match ws.certify(variant, design, point.beta) {
        Some(c) => row.fill(&c.design, &c.estimate, "oracle"),
        None => row.fill(design, semi, "semi"),
    }
}

/// Solves one point for all four designs (plain censoring only when the
/// point studies correlation mismatch).
pub fn run_point(id: ExperimentId, network: &NetworkSection, settings: &SolverSettings, point: &SweepPoint) -> Result<Vec<Row>> {
    Ok(run_point_traced(id, network, settings, point)?.0)
}

/// [`run_point`] plus the iterate traces of the randomised problem-S solves,
/// tagged with the scheme name.
/// GP iterates of one scheme.
pub type SchemeTrace = (&'static str, TraceRow);

pub fn run_point_traced(
    id: ExperimentId,
    network: &NetworkSection,
    settings: &SolverSettings,
    point: &SweepPoint,
) -> Result<(Vec<Row>, Vec<SchemeTrace>)> {
    let cfg = network.network(point.snr_c_db, point.snr_h_db, point.rho)?;
    if point.mismatch {
        return Ok((vec![run_mismatch_point(id, network, settings, point)?], Vec::new()));
    }
    let ws = Workspace::new(&cfg, settings)?;
    let mut rows = Vec::with_capacity(Variant::ALL.len());
    let mut traces = Vec::new();
    match point.problem {
        Problem::O => {
            let pure = match solve_pure_censoring_o(&ws, point.budget, point.beta) {
                Ok(p) => p,
                Err(e) => return Ok((Variant::ALL.iter().map(|&v| Row::blank(id, point, v, status_of(&e))).collect(), traces)),
            };
            rows.push(solved_row(&ws, id, point, Variant::PureCensoring, &pure.design, &pure.estimate, true));
            for v in [Variant::Crt2, Variant::Crt1Mismatched, Variant::Crt1] {
                rows.push(match solve_crt_o(&ws, &ProblemOSpec::new(v, point.budget, point.beta), &pure) {
                    Ok(s) => solved_row(&ws, id, point, v, &s.design, &s.estimate, s.stage2_ok),
                    Err(e) => Row::blank(id, point, v, status_of(&e)),
                });
            }
        }
        Problem::S => {
            let pure = match solve_pure_censoring_s(&ws, point.budget, point.beta) {
                Ok(p) => p,
                Err(e) => return Ok((Variant::ALL.iter().map(|&v| Row::blank(id, point, v, status_of(&e))).collect(), traces)),
            };
            rows.push(solved_row(&ws, id, point, Variant::PureCensoring, &pure.design, &pure.estimate, true));
            for v in [Variant::Crt2, Variant::Crt1Mismatched, Variant::Crt1] {
                let spec = ProblemSSpec::new(v, point.budget, point.beta, settings.epsilon_box);
                rows.push(match solve_crt_s(&ws, &spec, &pure) {
                    Ok(s) => {
                        traces.extend(trace_rows(&s).into_iter().map(|t| (v.name(), t)));
                        solved_row(&ws, id, point, v, &s.design, &s.estimate, s.converged)
                    }
                    Err(e) => Row::blank(id, point, v, status_of(&e)),
                });
            }
        }
    }
    Ok((rows, traces))
}

/// Oracle trials used for mismatch evaluation when certification is off.
const MISMATCH_FALLBACK_MC: usize = 200_000;

/// Plain censoring designed for independent noise, evaluated under the true
/// correlation with an FC that still assumes independence.
pub fn run_mismatch_point(id: ExperimentId, network: &NetworkSection, settings: &SolverSettings, point: &SweepPoint) -> Result<Row> {
    let design_cfg = network.network(point.snr_c_db, point.snr_h_db, 0.0)?;
    let true_cfg = design_cfg.with_rho(point.rho);
    let ws = Workspace::new(&design_cfg, settings)?;
    let row = Row::blank(id, point, Variant::PureCensoring, "ok");
    let pure = match solve_pure_censoring_o(&ws, point.budget, point.beta) {
        Ok(p) => p,
        Err(e) => return Ok(Row { status: status_of(&e), ..row }),
    };
    let design = ws.certify(Variant::PureCensoring, &pure.design, point.beta).map_or(pure.design, |c| c.design);
    let n = if settings.n_mc_oracle > 0 { settings.n_mc_oracle } else { MISMATCH_FALLBACK_MC };
    let est = perf_oracle(&true_cfg, &design, &AssumedModel::censoring(0.0), n, settings.seed, settings.quadrature_nodes);
    Ok(row.fill(&design, &est, "oracle"))
}

/// `(p0, rho)` grid of mismatch rows for one network.
pub fn run_mismatch(network: &NetworkSection, settings: &SolverSettings, beta: f64, p0: &[f64], rho: &[f64]) -> Result<Vec<Row>> {
    let mut out = Vec::new();
    for &p in p0 {
        for &r in rho {
            let point = SweepPoint {
                problem: Problem::O,
                snr_c_db: network.snr_c_db,
                snr_h_db: network.snr_h_db,
                rho: r,
                budget: p,
                beta,
                mismatch: true,
            };
            out.push(run_mismatch_point(ExperimentId::Table4, network, settings, &point)?);
        }
    }
    Ok(out)
}

/// Worker count: explicit value, then [`WORKERS_ENV`], then all cores.
pub fn resolve_workers(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()))
        .filter(|&n| n > 0)
        .unwrap_or_else(num_cpus)
}

fn num_cpus() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Rows of every sweep point, in sweep order.
pub fn run_rows(spec: &ExperimentSpec) -> Result<Vec<Row>> {
    use rayon::prelude::*;
    spec.validate()?;
    let points = sweep_points(spec);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_workers(spec.workers))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let per_point: Vec<Result<Vec<Row>>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| {
                let rows = run_point(spec.experiment, &spec.network, &spec.settings, p);
                log::info!(
                    "{} {} snr_h={} rho={} budget={} beta={}: {}",
                    spec.experiment.name(),
                    p.problem.name(),
                    p.snr_h_db,
                    p.rho,
                    p.budget,
                    p.beta,
                    if rows.is_ok() { "done" } else { "error" }
                );
                rows
            })
            .collect()
    });
    let mut out = Vec::new();
    for r in per_point {
        out.extend(r?);
    }
    Ok(out)
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs an experiment and writes `<out_dir>/<id>.csv`. Figure experiments
/// also get one `<id>_<scheme>.csv` per curve. Returns the files written.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    let rows = run_rows(spec)?;
    let id = spec.experiment.name();
    let main = spec.out_dir.join(format!("{id}.csv"));
    write_csv(&main, &rows)?;
    let mut files = vec![main];
    if id.starts_with("fig_") {
        for v in Variant::ALL {
            let curve: Vec<Row> = rows.iter().filter(|r| r.scheme == v.name()).cloned().collect();
            let path = spec.out_dir.join(format!("{id}_{}.csv", v.name()));
            write_csv(&path, &curve)?;
            files.push(path);
        }
    }
    Ok(files)
}

/// Iterate trace of a CRT solve of problem S.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub outer: usize,
    pub inner: usize,
    pub g: f64,
    pub f: f64,
    pub t: f64,
    pub objective: f64,
    pub pm_slack: f64,
    pub pf_slack: f64,
    pub start: &'static str,
}

pub fn trace_rows(sol: &CrtSSolution) -> Vec<TraceRow> {
    sol.trace
        .iter()
        .map(|it| TraceRow {
            outer: it.outer,
            inner: it.inner,
            g: it.g,
            f: it.f,
            t: it.t,
            objective: it.objective,
            pm_slack: it.pm_chain.original,
            pf_slack: it.pf_chain.original,
            start: it.start.name(),
        })
        .collect()
}
