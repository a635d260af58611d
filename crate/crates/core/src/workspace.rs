//! Shared state for the solvers: settings, rectangle tables and channel
//! banks for one network configuration.

use crate::fusion::AssumedModel;
use crate::gaussian::RectangleCache;
use crate::model::{DesignPoint, NetworkConfig, Scheme, Thresholds};
use crate::perf::{simulate_oracle, OracleSamples, PerfEstimate, SemiAnalyticModel, SymbolBanks};
use crate::Result;

/// Monte Carlo budgets and search resolutions.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    /// Trials per symbol pattern for the semi-analytic route.
    pub n_mc_pu: usize,
    /// Trials per hypothesis for end-to-end certification; 0 skips it.
    pub n_mc_oracle: usize,
    pub seed: u64,
    pub quadrature_nodes: usize,
    pub cache_enabled: bool,
    /// Threshold grid size for plain censoring.
    pub tau_grid: usize,
    /// Trials per pattern used by the coarse threshold scan.
    pub coarse_n_mc: usize,
    /// `f` grid size for the stage-1 scan.
    pub f_grid: usize,
    /// `f` grid size when every point needs its own FC rule.
    pub joint_f_grid: usize,
    pub golden_iters: usize,
    pub max_outer: usize,
    pub epsilon_box: f64,
    pub condense_tol: f64,
    pub max_condense: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            n_mc_pu: 20_000,
            n_mc_oracle: 1_000_000,
            seed: 1,
            quadrature_nodes: 64,
            cache_enabled: true,
            tau_grid: 201,
            coarse_n_mc: 4_000,
            f_grid: 201,
            joint_f_grid: 41,
            golden_iters: 30,
            max_outer: 30,
            epsilon_box: 1e-3,
            condense_tol: 1e-4,
            max_condense: 50,
        }
    }
}

/// Which of the four compared designs a result belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    PureCensoring,
    Crt2,
    /// First scheme optimised with the FC fusing as if `g = 0, f = 1`.
    Crt1Mismatched,
    /// First scheme with the FC aware of `(g, f)`.
    Crt1,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::PureCensoring, Variant::Crt2, Variant::Crt1Mismatched, Variant::Crt1];

    pub fn name(self) -> &'static str {
        match self {
            Variant::PureCensoring => "pure_censoring",
            Variant::Crt2 => "crt2",
            Variant::Crt1Mismatched => "crt1_fc_f1",
            Variant::Crt1 => "crt1",
        }
    }

    pub fn scheme(self) -> Scheme {
        match self {
            Variant::PureCensoring => Scheme::PureCensoring,
            Variant::Crt2 => Scheme::Crt2,
            Variant::Crt1Mismatched | Variant::Crt1 => Scheme::Crt1,
        }
    }

    /// The FC rule used when the design `(g, f)` is deployed.
    pub fn fc_model(self, rho_fc: f64, g: f64, f: f64) -> AssumedModel {
        match self {
            Variant::Crt1 => AssumedModel::randomized(rho_fc, g, f),
            _ => AssumedModel::censoring(rho_fc),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| crate::error::invalid(format!("unknown scheme `{s}`")))
    }
}

/// A design re-checked end to end, with `t` recalibrated so the simulated
/// false-alarm rate meets its cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified {
    pub design: DesignPoint,
    pub estimate: PerfEstimate,
}

#[derive(Debug)]
pub struct Workspace {
    pub cfg: NetworkConfig,
    pub settings: SolverSettings,
    pub cache: RectangleCache,
    pub banks: SymbolBanks,
    pub coarse: SymbolBanks,
}

impl Workspace {
    pub fn new(cfg: &NetworkConfig, settings: &SolverSettings) -> Result<Self> {
        cfg.validate()?;
        if settings.n_mc_pu == 0 {
            return Err(crate::error::invalid("n_mc_pu must be positive"));
        }
        let banks = SymbolBanks::generate(cfg, settings.n_mc_pu, settings.seed);
        let coarse = banks.prefix(settings.coarse_n_mc.max(1));
        Ok(Self {
            cfg: cfg.clone(),
            settings: settings.clone(),
            cache: RectangleCache::new(settings.quadrature_nodes, settings.cache_enabled),
            banks,
            coarse,
        })
    }

    /// Plain censoring (and the first scheme fused as plain censoring).
    pub fn pure_model(&self, thr: &Thresholds) -> SemiAnalyticModel {
        SemiAnalyticModel::crt1(&self.cfg, thr, &self.banks, &AssumedModel::censoring(self.cfg.rho), &self.cache)
    }

    pub fn coarse_pure_model(&self, thr: &Thresholds) -> SemiAnalyticModel {
        SemiAnalyticModel::crt1(&self.cfg, thr, &self.coarse, &AssumedModel::censoring(self.cfg.rho), &self.cache)
    }

    /// First scheme with the FC aware of `(g, f)`.
    pub fn crt1_model(&self, thr: &Thresholds, g: f64, f: f64) -> SemiAnalyticModel {
        let assumed = AssumedModel::randomized(self.cfg.rho, g, f);
        SemiAnalyticModel::crt1(&self.cfg, thr, &self.banks, &assumed, &self.cache)
    }

    pub fn crt2_model(&self, thr: &Thresholds) -> SemiAnalyticModel {
        SemiAnalyticModel::crt2(&self.cfg, thr, &self.banks, self.cfg.rho, &self.cache)
    }

    /// End-to-end samples for `design` deployed as `variant`.
    pub fn oracle(&self, variant: Variant, design: &DesignPoint) -> OracleSamples {
        let assumed = variant.fc_model(self.cfg.rho, design.g, design.f);
        let mut d = *design;
        d.scheme = variant.scheme();
        simulate_oracle(&self.cfg, &d, &assumed, self.settings.n_mc_oracle, self.settings.seed, self.settings.quadrature_nodes)
    }

    /// Oracle check with `t` reset to the smallest value meeting `beta`.
    pub fn certify(&self, variant: Variant, design: &DesignPoint, beta: f64) -> Option<Certified> {
        if self.settings.n_mc_oracle == 0 {
            return None;
        }
        let samples = self.oracle(variant, design);
        let ln_t = samples.min_ln_t_for_pf(beta);
        let mut d = *design;
        d.t = ln_t.exp();
        Some(Certified { design: d, estimate: samples.estimate_ln(ln_t) })
    }
}
