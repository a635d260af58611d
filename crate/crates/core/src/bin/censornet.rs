use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use censornet::analysis::{verify_point, Outcome, VerifyLine};
use censornet::config::{apply_overrides, load_config, CliOverrides, ExperimentId, ExperimentSpec, Problem};
use censornet::experiment::{resolve_workers, run_experiment, run_point_traced, Row, SweepPoint, WORKERS_ENV};
use censornet::workspace::{Variant, Workspace};
use censornet::Result;

#[derive(Parser)]
#[command(name = "censornet", version, about = "Censoring and randomised transmission for distributed detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a table or figure sweep and write CSV files.
    Run {
        /// table1..table5, fig_pm_vs_snrh, fig_pm_vs_beta, fig_pt_vs_snrh, fig_pt_vs_beta or custom.
        experiment: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        n_mc_oracle: Option<usize>,
        #[arg(long)]
        n_mc_pu: Option<usize>,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
    },
    /// Minimise the miss probability under a transmission budget.
    SolveO {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long, default_value_t = 0.4)]
        p0: f64,
    },
    /// Minimise the transmission probability under a miss cap.
    SolveS {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long)]
        max_outer: Option<usize>,
        /// Where to write the iterate trace of a randomised design.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check the derivative signs at f = 1 and, with --solve, the
    /// interior-optimum conditions.
    Verify {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.3, 0.5, 0.7, 0.9])]
        rho_list: Vec<f64>,
        #[arg(long, default_value_t = 0.4)]
        p0: f64,
        #[arg(long, default_value_t = 0.01)]
        beta: f64,
        #[arg(long)]
        solve: bool,
        /// CSV report path; the text summary always goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct NetArgs {
    /// Key-value file supplying defaults; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    snr_c_db: Option<f64>,
    #[arg(long)]
    snr_h_db: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_mc_oracle: Option<usize>,
    #[arg(long)]
    n_mc_pu: Option<usize>,
}

impl NetArgs {
    fn spec(&self) -> Result<ExperimentSpec> {
        let spec = match &self.config {
            Some(p) => load_config(p)?,
            None => ExperimentSpec::new(ExperimentId::Custom),
        };
        let mut spec = apply_overrides(
            spec,
            &CliOverrides { seed: self.seed, n_mc_oracle: self.n_mc_oracle, n_mc_pu: self.n_mc_pu, ..Default::default() },
        )?;
        let n = &mut spec.network;
        n.snr_c_db = self.snr_c_db.unwrap_or(n.snr_c_db);
        n.snr_h_db = self.snr_h_db.unwrap_or(n.snr_h_db);
        n.rho = self.rho.unwrap_or(n.rho);
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Pure,
    Crt1,
    Crt2,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Crt1Arg {
    /// FC aware of the randomisation probabilities.
    Full,
    /// FC fusing as if `g = 0, f = 1`.
    FcF1,
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::All)]
    scheme: SchemeArg,
    /// First-scheme FC model; ignored for the other schemes.
    #[arg(long, value_enum, default_value_t = Crt1Arg::Full)]
    variant: Crt1Arg,
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
}

impl DesignArgs {
    fn variants(&self) -> Vec<Variant> {
        match self.scheme {
            SchemeArg::All => Variant::ALL.to_vec(),
            SchemeArg::Pure => vec![Variant::PureCensoring],
            SchemeArg::Crt2 => vec![Variant::Crt2],
            SchemeArg::Crt1 => vec![match self.variant {
                Crt1Arg::Full => Variant::Crt1,
                Crt1Arg::FcF1 => Variant::Crt1Mismatched,
            }],
        }
    }
}

fn print_rows(rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn point(spec: &ExperimentSpec, problem: Problem, budget: f64, beta: f64) -> SweepPoint {
    let n = &spec.network;
    SweepPoint { problem, snr_c_db: n.snr_c_db, snr_h_db: n.snr_h_db, rho: n.rho, budget, beta, mismatch: false }
}

fn solve(spec: &ExperimentSpec, design: &DesignArgs, problem: Problem, budget: f64, trace: Option<PathBuf>) -> Result<()> {
    let wanted = design.variants();
    let (rows, traces) =
        run_point_traced(ExperimentId::Custom, &spec.network, &spec.settings, &point(spec, problem, budget, design.beta))?;
    if let Some(path) = trace {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["scheme", "outer", "inner", "g", "f", "t", "objective", "pm_slack", "pf_slack", "start"])?;
        for (name, t) in traces.iter().filter(|(name, _)| wanted.iter().any(|v| v.name() == *name)) {
            w.write_record([
                name.to_string(),
                t.outer.to_string(),
                t.inner.to_string(),
                t.g.to_string(),
                t.f.to_string(),
                t.t.to_string(),
                t.objective.to_string(),
                t.pm_slack.to_string(),
                t.pf_slack.to_string(),
                t.start.to_string(),
            ])?;
        }
        w.flush()?;
    }
    let rows: Vec<Row> = rows.into_iter().filter(|r| wanted.iter().any(|v| v.name() == r.scheme)).collect();
    print_rows(&rows)
}

fn verify(net: &NetArgs, rho_list: &[f64], p0: f64, beta: f64, with_solvers: bool, out: Option<PathBuf>) -> Result<bool> {
    let spec = net.spec()?;
    let n = &spec.network;
    let mut lines: Vec<VerifyLine> = Vec::new();
    for &rho in rho_list {
        let cfg = n.network(n.snr_c_db, n.snr_h_db, rho)?;
        let ws = Workspace::new(&cfg, &spec.settings)?;
        lines.extend(verify_point(&ws, p0, beta, with_solvers)?);
    }
    let stdout = std::io::stdout();
    let mut h = stdout.lock();
    for l in &lines {
        writeln!(
            h,
            "{:<28} rho={:<4} p0={:<4} tau2={:+.4} value={:+.3e} tol={:.3e} {}",
            l.check,
            l.rho,
            l.p0,
            l.tau2,
            l.value,
            l.tolerance,
            l.outcome.name().to_uppercase()
        )?;
    }
    if let Some(path) = out {
        let mut w = csv::Writer::from_path(path)?;
        for l in &lines {
            w.serialize(l)?;
        }
        w.flush()?;
    }
    Ok(lines.iter().all(|l| l.outcome != Outcome::Fail))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { experiment, config, seed, out, n_mc_oracle, n_mc_pu, workers } => (|| {
            let id: ExperimentId = experiment.parse()?;
            let spec = match &config {
                Some(p) => load_config(p)?,
                None => ExperimentSpec::new(id),
            };
            let spec = apply_overrides(
                spec,
                &CliOverrides { experiment: Some(id), seed, out_dir: out, n_mc_oracle, n_mc_pu, workers },
            )?;
            log::info!("running {} with {} workers", id.name(), resolve_workers(spec.workers));
            for f in run_experiment(&spec)? {
                println!("{}", f.display());
            }
            Ok(true)
        })(),
        Command::SolveO { net, design, p0 } => net.spec().and_then(|spec| solve(&spec, &design, Problem::O, p0, None)).map(|_| true),
        Command::SolveS { net, design, alpha, max_outer, trace } => (|| {
            let mut spec = net.spec()?;
            if let Some(m) = max_outer {
                spec.settings.max_outer = m;
            }
            solve(&spec, &design, Problem::S, alpha, trace)
        })()
        .map(|_| true),
        Command::Verify { net, rho_list, p0, beta, solve, out } => verify(&net, &rho_list, p0, beta, solve, out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
