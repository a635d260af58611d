//! Experiment configuration: a flat TOML file of `key = value` lines,
//! overridable from the command line.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{invalid, Error, Result};
use crate::model::{db_to_linear, dbm_to_watts, NetworkConfig};
use crate::workspace::SolverSettings;

/// Experiment presets plus the free-form sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    Table1,
    Table2,
    Table3,
    Table4,
    Table5,
    FigPmVsSnrh,
    FigPmVsBeta,
    FigPtVsSnrh,
    FigPtVsBeta,
    Custom,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 10] = [
        ExperimentId::Table1,
        ExperimentId::Table2,
        ExperimentId::Table3,
        ExperimentId::Table4,
        ExperimentId::Table5,
        ExperimentId::FigPmVsSnrh,
        ExperimentId::FigPmVsBeta,
        ExperimentId::FigPtVsSnrh,
        ExperimentId::FigPtVsBeta,
        ExperimentId::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Table1 => "table1",
            ExperimentId::Table2 => "table2",
            ExperimentId::Table3 => "table3",
            ExperimentId::Table4 => "table4",
            ExperimentId::Table5 => "table5",
            ExperimentId::FigPmVsSnrh => "fig_pm_vs_snrh",
            ExperimentId::FigPmVsBeta => "fig_pm_vs_beta",
            ExperimentId::FigPtVsSnrh => "fig_pt_vs_snrh",
            ExperimentId::FigPtVsBeta => "fig_pt_vs_beta",
            ExperimentId::Custom => "custom",
        }
    }
}

impl std::str::FromStr for ExperimentId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

/// Which optimisation problem a sweep point solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    /// Minimise the miss probability under a transmission budget `p0`.
    O,
    /// Minimise the transmission probability under a miss cap `alpha`.
    S,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::O => "o",
            Problem::S => "s",
        }
    }
}

impl std::str::FromStr for Problem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "o" => Ok(Problem::O),
            "s" => Ok(Problem::S),
            other => Err(invalid(format!("problem must be `o` or `s`, got `{other}`"))),
        }
    }
}

/// Physical parameters shared by every sweep point unless a sweep overrides
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSection {
    pub k: usize,
    pub amplitude: f64,
    pub sigma_v2_dbm: f64,
    pub snr_c_db: f64,
    pub snr_h_db: f64,
    pub rho: f64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self { k: 5, amplitude: 1.0, sigma_v2_dbm: -50.0, snr_c_db: 10.0, snr_h_db: 5.0, rho: 0.5 }
    }
}

impl NetworkSection {
    /// Linear-unit network for one sweep point.
    pub fn network(&self, snr_c_db: f64, snr_h_db: f64, rho: f64) -> Result<NetworkConfig> {
        let sigma_v2 = dbm_to_watts(self.sigma_v2_dbm);
        let cfg = NetworkConfig {
            k: self.k,
            amplitude: self.amplitude,
            sigma_w2: self.amplitude * self.amplitude / db_to_linear(snr_c_db),
            rho,
            sigma_h2: sigma_v2 * db_to_linear(snr_h_db),
            sigma_v2,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Sweep axes. `None` keeps the experiment preset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOverrides {
    pub rho: Option<Vec<f64>>,
    pub p0: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    pub snr_h_db: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: ExperimentId,
    /// Problem solved by `custom`; presets fix their own.
    pub problem: Problem,
    pub network: NetworkSection,
    pub sweeps: SweepOverrides,
    pub out_dir: PathBuf,
    pub workers: Option<usize>,
    pub settings: SolverSettings,
}

impl ExperimentSpec {
    pub fn new(experiment: ExperimentId) -> Self {
        Self {
            experiment,
            problem: Problem::O,
            network: NetworkSection::default(),
            sweeps: SweepOverrides::default(),
            out_dir: PathBuf::from("results"),
            workers: None,
            settings: SolverSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = &self.network;
        if n.k == 0 || n.k > 12 {
            return Err(invalid(format!("k must lie in 1..=12, got {}", n.k)));
        }
        for (key, v) in [("amplitude", n.amplitude)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{key} must be positive, got {v}")));
            }
        }
        for (key, v) in [("sigma_v2_dbm", n.sigma_v2_dbm), ("snr_c_db", n.snr_c_db), ("snr_h_db", n.snr_h_db)] {
            if !v.is_finite() {
                return Err(invalid(format!("{key} must be finite, got {v}")));
            }
        }
        check_rho("rho", n.rho)?;
        let s = &self.sweeps;
        for (key, list) in [("rho_list", &s.rho), ("p0_list", &s.p0), ("alpha_list", &s.alpha), ("beta_list", &s.beta), ("snr_h_list", &s.snr_h_db)] {
            let Some(list) = list else { continue };
            if list.is_empty() {
                return Err(invalid(format!("{key} must not be empty")));
            }
            for &v in list {
                match key {
                    "rho_list" => check_rho(key, v)?,
                    "snr_h_list" if !v.is_finite() => return Err(invalid(format!("{key} entries must be finite, got {v}"))),
                    "snr_h_list" => {}
                    _ if !(v > 0.0 && v < 1.0) => return Err(invalid(format!("{key} entries must lie in (0, 1), got {v}"))),
                    _ => {}
                }
            }
        }
        let st = &self.settings;
        for (key, v) in [("n_mc_pu", st.n_mc_pu), ("quadrature_nodes", st.quadrature_nodes), ("max_outer", st.max_outer)] {
            if v == 0 {
                return Err(invalid(format!("{key} must be positive")));
            }
        }
        if self.workers == Some(0) {
            return Err(invalid("workers must be positive"));
        }
        Ok(())
    }
}

fn check_rho(key: &str, v: f64) -> Result<()> {
    if !(0.0..1.0).contains(&v) {
        return Err(invalid(format!("{key} must lie in [0, 1), got {v}")));
    }
    Ok(())
}

/// Raw file contents. Every key is optional; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<String>,
    problem: Option<String>,
    k: Option<usize>,
    amplitude: Option<f64>,
    sigma_v2_dbm: Option<f64>,
    snr_c_db: Option<f64>,
    snr_h_db: Option<f64>,
    rho: Option<f64>,
    rho_list: Option<Vec<f64>>,
    p0_list: Option<Vec<f64>>,
    alpha_list: Option<Vec<f64>>,
    beta_list: Option<Vec<f64>>,
    snr_h_list: Option<Vec<f64>>,
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
    workers: Option<usize>,
    n_mc_pu: Option<usize>,
    n_mc_oracle: Option<usize>,
    quadrature_nodes: Option<usize>,
    cache_enabled: Option<bool>,
    max_outer: Option<usize>,
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CliOverrides {
    pub experiment: Option<ExperimentId>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub n_mc_oracle: Option<usize>,
    pub n_mc_pu: Option<usize>,
    pub workers: Option<usize>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses a configuration text. `line` in parse errors is 1-based.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let experiment = match &raw.experiment {
        Some(id) => id.parse()?,
        None => ExperimentId::Custom,
    };
    let mut spec = ExperimentSpec::new(experiment);
    if let Some(p) = &raw.problem {
        spec.problem = p.parse()?;
    }
    let n = &mut spec.network;
    n.k = raw.k.unwrap_or(n.k);
    n.amplitude = raw.amplitude.unwrap_or(n.amplitude);
    n.sigma_v2_dbm = raw.sigma_v2_dbm.unwrap_or(n.sigma_v2_dbm);
    n.snr_c_db = raw.snr_c_db.unwrap_or(n.snr_c_db);
    n.snr_h_db = raw.snr_h_db.unwrap_or(n.snr_h_db);
    n.rho = raw.rho.unwrap_or(n.rho);
    spec.sweeps = SweepOverrides {
        rho: raw.rho_list,
        p0: raw.p0_list,
        alpha: raw.alpha_list,
        beta: raw.beta_list,
        snr_h_db: raw.snr_h_list,
    };
    if let Some(d) = raw.out_dir {
        spec.out_dir = d;
    }
    spec.workers = raw.workers;
    let st = &mut spec.settings;
    st.seed = raw.seed.unwrap_or(st.seed);
    st.n_mc_pu = raw.n_mc_pu.unwrap_or(st.n_mc_pu);
    st.n_mc_oracle = raw.n_mc_oracle.unwrap_or(st.n_mc_oracle);
    st.quadrature_nodes = raw.quadrature_nodes.unwrap_or(st.quadrature_nodes);
    st.cache_enabled = raw.cache_enabled.unwrap_or(st.cache_enabled);
    st.max_outer = raw.max_outer.unwrap_or(st.max_outer);
    spec.validate()?;
    Ok(spec)
}

pub fn load_config(path: &Path) -> Result<ExperimentSpec> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Applies command-line values on top of a loaded spec and re-validates.
pub fn apply_overrides(mut spec: ExperimentSpec, cli: &CliOverrides) -> Result<ExperimentSpec> {
    if let Some(id) = cli.experiment {
        spec.experiment = id;
    }
    if let Some(seed) = cli.seed {
        spec.settings.seed = seed;
    }
    if let Some(d) = &cli.out_dir {
        spec.out_dir = d.clone();
    }
    if let Some(n) = cli.n_mc_oracle {
        spec.settings.n_mc_oracle = n;
    }
    if let Some(n) = cli.n_mc_pu {
        spec.settings.n_mc_pu = n;
    }
    if cli.workers.is_some() {
        spec.workers = cli.workers;
    }
    spec.validate()?;
    Ok(spec)
}
