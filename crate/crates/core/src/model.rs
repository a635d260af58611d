//! Sensor observation model, quantisation intervals and the randomised
//! transmission map.

use crate::error::{invalid, Error, Result};
use crate::normal;

/// Noise variance of the fusion-centre receiver when none is configured, in
/// watts (-50 dBm).
pub const DEFAULT_SIGMA_V2: f64 = 1e-8;

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    H0,
    H1,
}

impl Hypothesis {
    /// Mean of every sensor observation under this hypothesis.
    pub fn mean(self, amplitude: f64) -> f64 {
        match self {
            Hypothesis::H0 => 0.0,
            Hypothesis::H1 => amplitude,
        }
    }
}

/// Network-wide physical parameters. Every variance is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Number of sensors.
    pub k: usize,
    /// Signal amplitude `A` under H1.
    pub amplitude: f64,
    /// Observation-noise variance.
    pub sigma_w2: f64,
    /// Pairwise correlation of the observation noise, in `[0, 1)`.
    pub rho: f64,
    /// Rayleigh fading power.
    pub sigma_h2: f64,
    /// Receiver-noise variance at the fusion centre.
    pub sigma_v2: f64,
}

impl NetworkConfig {
    /// Builds a configuration from sensing and channel SNRs in dB, with the
    /// default receiver-noise level.
    pub fn from_snr_db(k: usize, amplitude: f64, snr_c_db: f64, snr_h_db: f64, rho: f64) -> Result<Self> {
        let cfg = Self {
            k,
            amplitude,
            sigma_w2: amplitude * amplitude / db_to_linear(snr_c_db),
            rho,
            sigma_h2: DEFAULT_SIGMA_V2 * db_to_linear(snr_h_db),
            sigma_v2: DEFAULT_SIGMA_V2,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("K must be at least 1"));
        }
        if self.k > 12 {
            return Err(invalid(format!("K = {} is beyond the supported range 1..=12", self.k)));
        }
        for (name, v) in [
            ("A", self.amplitude),
            ("sigma_w2", self.sigma_w2),
            ("sigma_h2", self.sigma_h2),
            ("sigma_v2", self.sigma_v2),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(invalid(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        Ok(())
    }

    pub fn sigma_w(&self) -> f64 {
        self.sigma_w2.sqrt()
    }

    pub fn snr_c_db(&self) -> f64 {
        linear_to_db(self.amplitude * self.amplitude / self.sigma_w2)
    }

    pub fn snr_h_db(&self) -> f64 {
        linear_to_db(self.sigma_h2 / self.sigma_v2)
    }

    pub fn with_rho(&self, rho: f64) -> Self {
        Self { rho, ..self.clone() }
    }

    pub fn with_snr_h_db(&self, snr_h_db: f64) -> Self {
        Self { sigma_h2: self.sigma_v2 * db_to_linear(snr_h_db), ..self.clone() }
    }

    pub fn with_snr_c_db(&self, snr_c_db: f64) -> Self {
        Self { sigma_w2: self.amplitude * self.amplitude / db_to_linear(snr_c_db), ..self.clone() }
    }
}

/// Quantiser thresholds with `tau2 <= tau1`. `tau2 = -inf` leaves the lower
/// interval empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub tau1: f64,
    pub tau2: f64,
}

impl Thresholds {
    pub fn new(tau1: f64, tau2: f64) -> Result<Self> {
        if tau1.is_nan() || tau2.is_nan() || tau2 > tau1 {
            return Err(invalid(format!("thresholds need tau2 <= tau1, got tau1={tau1}, tau2={tau2}")));
        }
        Ok(Self { tau1, tau2 })
    }
}

/// The quantisation interval an observation falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Interval {
    /// `x < tau2`.
    Below,
    /// `tau2 <= x <= tau1`.
    Censor,
    /// `x > tau1`.
    Above,
}

impl Interval {
    pub const ALL: [Interval; 3] = [Interval::Below, Interval::Censor, Interval::Above];

    /// Decision value `d` in `{-1, 0, +1}`.
    pub fn value(self) -> i8 {
        match self {
            Interval::Below => -1,
            Interval::Censor => 0,
            Interval::Above => 1,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Transmitted symbol `u` in `{-1, 0, +1}`; `Silent` means no transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Minus,
    Silent,
    Plus,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Minus, Symbol::Silent, Symbol::Plus];

    pub fn value(self) -> f64 {
        match self {
            Symbol::Minus => -1.0,
            Symbol::Silent => 0.0,
            Symbol::Plus => 1.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    PureCensoring,
    Crt1,
    Crt2,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::PureCensoring => "pure",
            Scheme::Crt1 => "crt1",
            Scheme::Crt2 => "crt2",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pure" | "pure-censoring" | "censoring" => Ok(Scheme::PureCensoring),
            "crt1" | "crt-i" => Ok(Scheme::Crt1),
            "crt2" | "crt-ii" => Ok(Scheme::Crt2),
            other => Err(invalid(format!("unknown scheme `{other}`"))),
        }
    }
}

/// A complete operating point of the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignPoint {
    pub thresholds: Thresholds,
    pub g: f64,
    pub f: f64,
    /// Fusion threshold on the likelihood ratio.
    pub t: f64,
    pub scheme: Scheme,
}

impl DesignPoint {
    pub fn pure(thresholds: Thresholds, t: f64) -> Self {
        Self { thresholds, g: 0.0, f: 1.0, t, scheme: Scheme::PureCensoring }
    }
}

pub fn classify_observation(x: f64, thr: &Thresholds) -> Interval {
    if x > thr.tau1 {
        Interval::Above
    } else if x < thr.tau2 {
        Interval::Below
    } else {
        Interval::Censor
    }
}

/// Randomised transmission map. `r_g` decides whether a censored sensor sends
/// `-1`; `r_f` decides whether a sensor below `tau2` sends `-1`.
pub fn map_symbol(d: Interval, r_g: bool, r_f: bool) -> Symbol {
    match d {
        Interval::Above => Symbol::Plus,
        Interval::Censor if r_g => Symbol::Minus,
        Interval::Below if r_f => Symbol::Minus,
        _ => Symbol::Silent,
    }
}

/// Marginal probabilities of the three intervals for one sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalProbs {
    pub below: f64,
    pub censor: f64,
    pub above: f64,
}

impl IntervalProbs {
    pub fn get(&self, i: Interval) -> f64 {
        match i {
            Interval::Below => self.below,
            Interval::Censor => self.censor,
            Interval::Above => self.above,
        }
    }
}

/// Per-interval probabilities for a Gaussian with the given mean and standard
/// deviation.
pub(crate) fn gaussian_interval_probs(mean: f64, sd: f64, thr: &Thresholds) -> IntervalProbs {
    let a = (thr.tau2 - mean) / sd;
    let b = (thr.tau1 - mean) / sd;
    IntervalProbs { below: normal::cdf(a), censor: normal::interval(a, b), above: normal::sf(b) }
}

pub fn interval_probs(cfg: &NetworkConfig, thr: &Thresholds, hyp: Hypothesis) -> IntervalProbs {
    gaussian_interval_probs(hyp.mean(cfg.amplitude), cfg.sigma_w(), thr)
}

/// Per-sensor transmission and censoring rates under H0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateProbs {
    pub transmit: f64,
    pub censor: f64,
}

pub fn rate_probs(cfg: &NetworkConfig, thr: &Thresholds, g: f64, f: f64) -> RateProbs {
    let p = interval_probs(cfg, thr, Hypothesis::H0);
    let transmit = p.above + g * p.censor + f * p.below;
    RateProbs { transmit, censor: 1.0 - transmit }
}

/// Admissible `f` values for which the implied `g` stays in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleRange {
    /// Unclamped bounds from the rate line.
    pub l0: f64,
    pub l1: f64,
    /// Bounds clamped to `[0, 1]`.
    pub lo: f64,
    pub hi: f64,
}

impl FeasibleRange {
    pub fn contains(&self, f: f64) -> bool {
        f >= self.lo && f <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The line `g(f)` that keeps the H0 transmission rate at `target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePath {
    pub probs: IntervalProbs,
    pub target: f64,
}

impl RatePath {
    pub fn new(cfg: &NetworkConfig, thr: &Thresholds, target: f64) -> Result<Self> {
        let probs = interval_probs(cfg, thr, Hypothesis::H0);
        if probs.censor <= 0.0 {
            return Err(invalid("censoring interval has zero probability; g is undetermined"));
        }
        Ok(Self { probs, target })
    }

    pub fn g(&self, f: f64) -> f64 {
        (self.target - self.probs.above - f * self.probs.below) / self.probs.censor
    }

    pub fn dg_df(&self) -> f64 {
        -self.probs.below / self.probs.censor
    }

    /// `f` range with `0 <= g(f) <= 1` and `0 <= f <= 1`.
    pub fn feasible_range(&self) -> Result<FeasibleRange> {
        let p = &self.probs;
        if p.below <= 0.0 {
            let g = self.g(0.0);
            return if (0.0..=1.0).contains(&g) {
                Ok(FeasibleRange { l0: f64::NEG_INFINITY, l1: f64::INFINITY, lo: 0.0, hi: 1.0 })
            } else {
                Err(Error::Infeasible(format!("rate target {} unreachable: g = {g}", self.target)))
            };
        }
        let l0 = (self.target - 1.0 + p.below) / p.below;
        let l1 = (self.target - p.above) / p.below;
        let range = FeasibleRange { l0, l1, lo: l0.max(0.0), hi: l1.min(1.0) };
        if range.lo > range.hi {
            return Err(Error::Infeasible(format!(
                "rate target {} unreachable: f range [{}, {}] is empty",
                self.target, range.lo, range.hi
            )));
        }
        Ok(range)
    }
}

/// `g` and `dg/df` on the constant-rate line through `f`.
pub fn g_of_f(cfg: &NetworkConfig, thr: &Thresholds, target: f64, f: f64) -> Result<(f64, f64)> {
    let path = RatePath::new(cfg, thr, target)?;
    let g = path.g(f);
    if !(-1e-12..=1.0 + 1e-12).contains(&g) {
        return Err(Error::Infeasible(format!("f = {f} implies g = {g} outside [0, 1]")));
    }
    Ok((g.clamp(0.0, 1.0), path.dg_df()))
}

pub fn feasible_f_range(cfg: &NetworkConfig, thr: &Thresholds, target: f64) -> Result<FeasibleRange> {
    RatePath::new(cfg, thr, target)?.feasible_range()
}
