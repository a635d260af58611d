//! Detection performance: semi-analytic sums over sensor categories and an
//! end-to-end Monte Carlo oracle.
//!
//! The semi-analytic route enumerates how many sensors fall in each
//! (interval, random decision) category. The interval-assignment probability
//! of a category vector is exact (quadrature); only the fusion-centre alarm
//! probability `P_u` of the induced symbol pattern is simulated. Category
//! vectors sharing a symbol pattern share one `P_u` estimate, so the number
//! of simulated classes is 21 (first scheme, `K = 5`) or 2002 (second).
//!
//! Each class stores its sorted log-ratio samples, which makes `P_u(t)` a
//! binary search for any fusion threshold `t`.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::composition::{compositions, multinomial};
use crate::error::{invalid, Result};
use crate::fusion::{symbol_log_offsets, AssumedModel, FusionWeights, LrEngine, SensorMap, SymbolEvidence};
use crate::gaussian::{CountIndex, IntervalCounts, RectangleCache, RectangleTable};
use crate::model::{
    classify_observation, map_symbol, rate_probs, DesignPoint, Hypothesis, Interval, NetworkConfig, Scheme, Symbol,
    Thresholds,
};
use crate::poly::{basis, BasisExps, BasisPolynomial};
use crate::rng::{self, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    SemiAnalytic,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfEstimate {
    pub pm: f64,
    pub pf: f64,
    /// Per-sensor transmission rate under H0.
    pub pt: f64,
    pub pc: f64,
    pub pm_se: f64,
    pub pf_se: f64,
    pub pt_se: f64,
    pub n_samples: usize,
    pub route: Route,
}

/// Counts of sensors per category.
///
/// First scheme, index order: `[above, censor-silent, censor-sent,
/// below-silent, below-sent]`. Second scheme: the twelve `(interval, r_f,
/// r_g)` combinations in the order of [`CRT2_CATEGORIES`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CategoryVector {
    Crt1([usize; 5]),
    Crt2([usize; 12]),
}

/// Interval and symbol of each first-scheme category.
pub const CRT1_CATEGORIES: [(Interval, Symbol); 5] = [
    (Interval::Above, Symbol::Plus),
    (Interval::Censor, Symbol::Silent),
    (Interval::Censor, Symbol::Minus),
    (Interval::Below, Symbol::Silent),
    (Interval::Below, Symbol::Minus),
];

/// `(interval, r_f, r_g)` of each second-scheme category. Pairs are ordered
/// `[m = 0, m = 1]` for each of the six families.
pub const CRT2_CATEGORIES: [(Interval, bool, bool); 12] = [
    (Interval::Above, true, false),
    (Interval::Above, true, true),
    (Interval::Censor, false, false),
    (Interval::Censor, true, false),
    (Interval::Censor, false, true),
    (Interval::Censor, true, true),
    (Interval::Below, false, false),
    (Interval::Below, false, true),
    (Interval::Below, true, false),
    (Interval::Below, true, true),
    (Interval::Above, false, false),
    (Interval::Above, false, true),
];

impl CategoryVector {
    pub fn total(&self) -> usize {
        match self {
            CategoryVector::Crt1(a) => a.iter().sum(),
            CategoryVector::Crt2(a) => a.iter().sum(),
        }
    }

    pub fn interval_counts(&self) -> IntervalCounts {
        match self {
            CategoryVector::Crt1(a) => IntervalCounts::new(a[3] + a[4], a[1] + a[2], a[0]),
            CategoryVector::Crt2(a) => {
                let mut c = IntervalCounts::new(0, 0, 0);
                for (n, (d, _, _)) in a.iter().zip(CRT2_CATEGORIES) {
                    match d {
                        Interval::Below => c.below += n,
                        Interval::Censor => c.censor += n,
                        Interval::Above => c.above += n,
                    }
                }
                c
            }
        }
    }

    /// Exponents of `[(1-g), g, (1-f), f]` in the category weight.
    pub fn basis_exps(&self) -> BasisExps {
        match self {
            CategoryVector::Crt1(a) => [a[1] as u32, a[2] as u32, a[3] as u32, a[4] as u32],
            CategoryVector::Crt2(a) => {
                let k = self.total() as u32;
                let (ag, af) = crt2_random_counts(a);
                [k - ag as u32, ag as u32, k - af as u32, af as u32]
            }
        }
    }

    /// Sensors as `(transmitted symbol, FC map)` pairs, in a canonical order.
    fn sensors(&self, fc_map: &SensorMap) -> Vec<(Symbol, SensorMap)> {
        let mut out = Vec::with_capacity(self.total());
        match self {
            CategoryVector::Crt1(a) => {
                for (n, (_, u)) in a.iter().zip(CRT1_CATEGORIES) {
                    out.extend(std::iter::repeat_n((u, *fc_map), *n));
                }
            }
            CategoryVector::Crt2(a) => {
                for (n, (d, rf, rg)) in a.iter().zip(CRT2_CATEGORIES) {
                    let u = map_symbol(d, rg, rf);
                    out.extend(std::iter::repeat_n((u, SensorMap::known(rf, rg)), *n));
                }
            }
        }
        out
    }
}

/// Number of sensors with `r_g = 1` and with `r_f = 1`.
pub fn crt2_random_counts(a: &[usize; 12]) -> (usize, usize) {
    // Index pairs per the category table.
    let ag = a[1] + a[4] + a[5] + a[7] + a[9] + a[11];
    let af = a[0] + a[1] + a[3] + a[5] + a[8] + a[9];
    (ag, af)
}

/// Sorted log-ratio samples per symbol-pattern class.
#[derive(Debug, Clone)]
pub struct PuTable {
    n: usize,
    samples: Vec<Vec<f32>>,
}

impl PuTable {
    pub fn from_samples(samples: Vec<Vec<f32>>) -> Self {
        let n = samples.first().map_or(0, Vec::len);
        let mut samples = samples;
        samples.iter_mut().for_each(|s| s.sort_by(f32::total_cmp));
        Self { n, samples }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> usize {
        self.samples.len()
    }

    /// Fraction of samples of `class` with `ln LR > ln_t`.
    #[inline]
    pub fn alarm(&self, class: usize, ln_t: f64) -> f64 {
        let s = &self.samples[class];
        let below = s.partition_point(|&x| (x as f64) <= ln_t);
        (s.len() - below) as f64 / s.len() as f64
    }

    fn range(&self) -> (f64, f64) {
        let lo = self.samples.iter().filter_map(|s| s.first()).fold(f64::INFINITY, |a, &b| a.min(b as f64));
        let hi = self.samples.iter().filter_map(|s| s.last()).fold(f64::NEG_INFINITY, |a, &b| a.max(b as f64));
        (lo - 1.0, hi + 1.0)
    }
}

fn draw_cn(r: &mut impl Rng, sd: f64) -> Complex64 {
    let a: f64 = StandardNormal.sample(r);
    let b: f64 = StandardNormal.sample(r);
    Complex64::new(a * sd, b * sd)
}

/// Received-signal log offsets for `n` trials of one symbol pattern.
fn channel_offsets(cfg: &NetworkConfig, symbols: &[Symbol], n: usize, mut r: impl Rng) -> Vec<[f64; 2]> {
    let sh = (cfg.sigma_h2 / 2.0).sqrt();
    let sv = (cfg.sigma_v2 / 2.0).sqrt();
    let mut out = Vec::with_capacity(n * symbols.len());
    for _ in 0..n {
        for &u in symbols {
            let h = draw_cn(&mut r, sh);
            let v = draw_cn(&mut r, sv);
            out.push(symbol_log_offsets(h * u.value() + v, h, cfg.sigma_v2));
        }
    }
    out
}

/// Symbol counts `(minus, silent, plus)` of a pattern class.
fn pattern_symbols(minus: usize, silent: usize, plus: usize) -> Vec<Symbol> {
    let mut s = vec![Symbol::Minus; minus];
    s.extend(std::iter::repeat_n(Symbol::Silent, silent));
    s.extend(std::iter::repeat_n(Symbol::Plus, plus));
    s
}

/// Channel draws for every `(minus, silent, plus)` symbol pattern. They do not
/// depend on thresholds or on the FC rule, so one bank serves every design
/// evaluated on the same channel.
#[derive(Debug, Clone)]
pub struct SymbolBanks {
    index: CountIndex,
    n: usize,
    /// Indexed by `(minus, silent)`; empty for invalid entries.
    evidence: Vec<Vec<SymbolEvidence>>,
}

impl SymbolBanks {
    pub fn generate(cfg: &NetworkConfig, n: usize, seed: u64) -> Self {
        let index = CountIndex { k: cfg.k };
        let classes = IntervalCounts::all(cfg.k);
        let built: Vec<(usize, Vec<SymbolEvidence>)> = classes
            .par_iter()
            .map(|c| {
                // Reuse the count triple as (minus, silent, plus).
                let id = index.at(c.below, c.censor);
                let symbols = pattern_symbols(c.below, c.censor, c.above);
                let off = channel_offsets(cfg, &symbols, n, rng::stream(seed, Domain::ChannelBank, id as u64));
                (id, off.into_iter().map(SymbolEvidence::new).collect())
            })
            .collect();
        let mut evidence = vec![Vec::new(); index.len()];
        for (id, e) in built {
            evidence[id] = e;
        }
        Self { index, n, evidence }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.index.k
    }

    /// The first `n` trials of every bank.
    pub fn prefix(&self, n: usize) -> Self {
        let n = n.min(self.n);
        let k = self.index.k;
        let evidence = self.evidence.iter().map(|e| e[..e.len().min(n * k)].to_vec()).collect();
        Self { index: self.index, n, evidence }
    }

    fn class_id(&self, minus: usize, silent: usize) -> usize {
        self.index.at(minus, silent)
    }

    /// Log-ratio table with the same FC map on every sensor.
    pub fn pu_table(&self, weights: &FusionWeights, map: &SensorMap) -> PuTable {
        let k = self.index.k;
        let samples: Vec<Vec<f32>> = self
            .evidence
            .par_iter()
            .map(|ev| {
                if ev.is_empty() {
                    return Vec::new();
                }
                let mut engine = LrEngine::new(weights);
                ev.chunks(k).map(|o| engine.ln_lr_evidence_uniform(o, map) as f32).collect()
            })
            .collect();
        PuTable::from_samples(samples)
    }
}

/// One category vector reduced to what the sums need.
#[derive(Debug, Clone, Copy, PartialEq)]
struct CategoryTerm {
    m_px1: f64,
    m_px0: f64,
    class: usize,
    exps: BasisExps,
}

/// Per-class weights at a fixed `(g, f)`.
#[derive(Debug, Clone)]
pub struct ClassWeights {
    w1: Vec<f64>,
    w0: Vec<f64>,
}

/// Semi-analytic performance of one scheme at fixed thresholds.
#[derive(Debug, Clone)]
pub struct SemiAnalyticModel {
    pub scheme: Scheme,
    pub thresholds: Thresholds,
    categories: Vec<CategoryTerm>,
    pu: PuTable,
    /// Channel bank behind each class. Classes on one bank are correlated.
    groups: Vec<usize>,
    cfg: NetworkConfig,
}

impl SemiAnalyticModel {
    /// First scheme (or plain censoring) with the FC rule given by `assumed`.
    pub fn crt1(
        cfg: &NetworkConfig,
        thr: &Thresholds,
        banks: &SymbolBanks,
        assumed: &AssumedModel,
        cache: &RectangleCache,
    ) -> Self {
        let fc = FusionWeights::from_tables(
            &cache.table(cfg, assumed.rho_fc, thr, Hypothesis::H1),
            &cache.table(cfg, assumed.rho_fc, thr, Hypothesis::H0),
        );
        let pu = banks.pu_table(&fc, &SensorMap::randomized(assumed.g_fc, assumed.f_fc));
        let t1 = cache.table(cfg, cfg.rho, thr, Hypothesis::H1);
        let t0 = cache.table(cfg, cfg.rho, thr, Hypothesis::H0);
        let categories = compositions(cfg.k, 5)
            .into_iter()
            .map(|a| {
                let cv = CategoryVector::Crt1([a[0], a[1], a[2], a[3], a[4]]);
                let m = multinomial(&a);
                let ic = cv.interval_counts();
                CategoryTerm {
                    m_px1: m * t1.get(ic),
                    m_px0: m * t0.get(ic),
                    // (minus, silent) of the transmitted pattern.
                    class: banks.class_id(a[2] + a[4], a[1] + a[3]),
                    exps: cv.basis_exps(),
                }
            })
            .collect();
        let groups = (0..pu.classes()).collect();
        Self { scheme: Scheme::Crt1, thresholds: *thr, categories, pu, groups, cfg: cfg.clone() }
    }

    /// Second scheme: the FC knows each sensor's random decisions. Classes
    /// read the channel bank of their symbol pattern, so at `g = 0, f = 1`
    /// the result coincides with [`Self::crt1`] under plain censoring.
    pub fn crt2(
        cfg: &NetworkConfig,
        thr: &Thresholds,
        banks: &SymbolBanks,
        rho_fc: f64,
        cache: &RectangleCache,
    ) -> Self {
        let fc = FusionWeights::from_tables(
            &cache.table(cfg, rho_fc, thr, Hypothesis::H1),
            &cache.table(cfg, rho_fc, thr, Hypothesis::H0),
        );
        let t1 = cache.table(cfg, cfg.rho, thr, Hypothesis::H1);
        let t0 = cache.table(cfg, cfg.rho, thr, Hypothesis::H0);
        let classes = crt2_classes(cfg.k);
        let rank: HashMap<Vec<usize>, usize> = classes.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let built: Vec<(usize, Vec<f32>)> = classes
            .par_iter()
            .map(|c| {
                let mut sensors = crt2_class_sensors(c);
                // Bank trials list minus, silent, plus sensors in that order.
                sensors.sort_by_key(|s| s.0);
                let minus = sensors.iter().filter(|s| s.0 == Symbol::Minus).count();
                let silent = sensors.iter().filter(|s| s.0 == Symbol::Silent).count();
                let maps: Vec<SensorMap> = sensors.iter().map(|s| s.1).collect();
                let group = banks.class_id(minus, silent);
                let mut engine = LrEngine::new(&fc);
                let lr = banks.evidence[group].chunks(cfg.k).map(|o| engine.ln_lr_evidence(o, &maps) as f32).collect();
                (group, lr)
            })
            .collect();
        let groups = built.iter().map(|b| b.0).collect();
        let pu = PuTable::from_samples(built.into_iter().map(|b| b.1).collect());
        let categories = compositions(cfg.k, 12)
            .into_iter()
            .map(|a| {
                let arr: [usize; 12] = a.clone().try_into().expect("12 categories");
                let cv = CategoryVector::Crt2(arr);
                let m = multinomial(&a);
                let ic = cv.interval_counts();
                CategoryTerm {
                    m_px1: m * t1.get(ic),
                    m_px0: m * t0.get(ic),
                    class: rank[&crt2_class_of(&arr)],
                    exps: cv.basis_exps(),
                }
            })
            .collect();
        Self { scheme: Scheme::Crt2, thresholds: *thr, categories, pu, groups, cfg: cfg.clone() }
    }

    pub fn n_per_class(&self) -> usize {
        self.pu.n()
    }

    pub fn n_classes(&self) -> usize {
        self.pu.classes()
    }

    pub fn class_weights(&self, g: f64, f: f64) -> ClassWeights {
        let mut w1 = vec![0.0; self.pu.classes()];
        let mut w0 = vec![0.0; self.pu.classes()];
        for c in &self.categories {
            let b = basis(&c.exps, g, f);
            w1[c.class] += c.m_px1 * b;
            w0[c.class] += c.m_px0 * b;
        }
        ClassWeights { w1, w0 }
    }

    pub fn pm(&self, w: &ClassWeights, t: f64) -> f64 {
        let lt = t.ln();
        w.w1.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(c, x)| x * (1.0 - self.pu.alarm(c, lt))).sum()
    }

    pub fn pf(&self, w: &ClassWeights, t: f64) -> f64 {
        let lt = t.ln();
        w.w0.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(c, x)| x * self.pu.alarm(c, lt)).sum()
    }

    /// Detection probabilities with standard errors. Classes reading one
    /// channel bank are treated as perfectly correlated, which bounds the
    /// variance from above; distinct banks are independent.
    pub fn estimate(&self, g: f64, f: f64, t: f64) -> PerfEstimate {
        let w = self.class_weights(g, f);
        let lt = t.ln();
        let (mut pm, mut pf) = (0.0, 0.0);
        let mut sd_m = vec![0.0; self.pu.classes()];
        let mut sd_f = vec![0.0; self.pu.classes()];
        for c in 0..self.pu.classes() {
            if w.w1[c] == 0.0 && w.w0[c] == 0.0 {
                continue;
            }
            let p = self.pu.alarm(c, lt);
            let sd = self.sd(p);
            pm += w.w1[c] * (1.0 - p);
            pf += w.w0[c] * p;
            sd_m[self.groups[c]] += w.w1[c] * sd;
            sd_f[self.groups[c]] += w.w0[c] * sd;
        }
        let rate = rate_probs(&self.cfg, &self.thresholds, g, f);
        PerfEstimate {
            pm,
            pf,
            pt: rate.transmit,
            pc: rate.censor,
            pm_se: sd_m.iter().map(|x| x * x).sum::<f64>().sqrt(),
            pf_se: sd_f.iter().map(|x| x * x).sum::<f64>().sqrt(),
            pt_se: 0.0,
            n_samples: self.pu.n() * self.pu.classes(),
            route: Route::SemiAnalytic,
        }
    }

    fn sd(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.pu.n() as f64).sqrt()
    }

    /// Standard error of `P_M(a) - P_M(b)` at a shared `t`. Both points read
    /// the same samples, so only the weight differences carry noise.
    pub fn pm_diff_se(&self, a: (f64, f64), b: (f64, f64), t: f64) -> f64 {
        let wa = self.class_weights(a.0, a.1);
        let wb = self.class_weights(b.0, b.1);
        let lt = t.ln();
        let mut sd = vec![0.0; self.pu.classes()];
        for c in 0..self.pu.classes() {
            let dw = (wa.w1[c] - wb.w1[c]).abs();
            if dw > 0.0 {
                sd[self.groups[c]] += dw * self.sd(self.pu.alarm(c, lt));
            }
        }
        sd.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Miss and false-alarm probabilities as polynomials in `(g, f)` at `t`.
    pub fn polynomials(&self, t: f64) -> (BasisPolynomial, BasisPolynomial) {
        let lt = t.ln();
        let alarms: Vec<f64> = (0..self.pu.classes()).map(|c| self.pu.alarm(c, lt)).collect();
        let mut pm = BasisPolynomial::new();
        let mut pf = BasisPolynomial::new();
        for c in &self.categories {
            let p = alarms[c.class];
            pm.add(c.exps, c.m_px1 * (1.0 - p));
            pf.add(c.exps, c.m_px0 * p);
        }
        (pm, pf)
    }

    /// Smallest `t` with `P_F <= beta` at `(g, f)`.
    pub fn min_t_for_pf(&self, g: f64, f: f64, beta: f64) -> f64 {
        let w = self.class_weights(g, f);
        let (mut lo, mut hi) = self.pu.range();
        if self.pf(&w, lo.exp()) <= beta {
            return lo.exp();
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.pf(&w, mid.exp()) <= beta {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        hi.exp()
    }

    /// Largest `t` with `P_M <= alpha` at `(g, f)`.
    pub fn max_t_for_pm(&self, g: f64, f: f64, alpha: f64) -> f64 {
        let w = self.class_weights(g, f);
        let (mut lo, mut hi) = self.pu.range();
        if self.pm(&w, hi.exp()) <= alpha {
            return hi.exp();
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.pm(&w, mid.exp()) <= alpha {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        lo.exp()
    }
}

/// The ten `(r_f, r_g, symbol)` combinations a second-scheme sensor can show.
pub fn crt2_type_symbols() -> Vec<(bool, bool, Symbol)> {
    let mut out = Vec::new();
    for rf in [false, true] {
        for rg in [false, true] {
            let mut seen: Vec<Symbol> = Interval::ALL.iter().map(|&d| map_symbol(d, rg, rf)).collect();
            seen.sort();
            seen.dedup();
            for u in seen {
                out.push((rf, rg, u));
            }
        }
    }
    out
}

fn crt2_classes(k: usize) -> Vec<Vec<usize>> {
    compositions(k, crt2_type_symbols().len())
}

fn crt2_class_of(a: &[usize; 12]) -> Vec<usize> {
    let types = crt2_type_symbols();
    let mut key = vec![0; types.len()];
    for (n, (d, rf, rg)) in a.iter().zip(CRT2_CATEGORIES) {
        let u = map_symbol(d, rg, rf);
        let pos = types.iter().position(|&t| t == (rf, rg, u)).expect("known type");
        key[pos] += n;
    }
    key
}

fn crt2_class_sensors(class: &[usize]) -> Vec<(Symbol, SensorMap)> {
    let mut out = Vec::new();
    for (n, (rf, rg, u)) in class.iter().zip(crt2_type_symbols()) {
        out.extend(std::iter::repeat_n((u, SensorMap::known(rf, rg)), *n));
    }
    out
}

fn cat_stream_id(cat: &CategoryVector, k: usize) -> u64 {
    let counts: &[usize] = match cat {
        CategoryVector::Crt1(a) => a,
        CategoryVector::Crt2(a) => a,
    };
    let tag = u64::from(matches!(cat, CategoryVector::Crt2(_)));
    counts.iter().fold(tag, |acc, &n| acc * (k as u64 + 1) + n as u64)
}

/// Alarm probability `P(LR > t)` for the symbol pattern induced by one
/// category vector, simulated on its own stream.
pub fn estimate_pu(
    cfg: &NetworkConfig,
    design: &DesignPoint,
    cat: &CategoryVector,
    assumed: &AssumedModel,
    n_mc: usize,
    seed: u64,
    nodes: usize,
) -> Result<(f64, f64)> {
    if cat.total() != cfg.k {
        return Err(invalid(format!("category vector covers {} sensors, expected {}", cat.total(), cfg.k)));
    }
    let gh = crate::quadrature::GaussHermite::new(nodes);
    let fc = FusionWeights::new(cfg, &design.thresholds, assumed.rho_fc, &gh);
    let sensors = cat.sensors(&SensorMap::randomized(assumed.g_fc, assumed.f_fc));
    let symbols: Vec<Symbol> = sensors.iter().map(|s| s.0).collect();
    let maps: Vec<SensorMap> = sensors.iter().map(|s| s.1).collect();
    let id = cat_stream_id(cat, cfg.k);
    let off = channel_offsets(cfg, &symbols, n_mc, rng::stream(seed, Domain::Category, id));
    let mut engine = LrEngine::new(&fc);
    let lt = design.t.ln();
    let hits = off.chunks(cfg.k).filter(|o| engine.ln_lr_offsets(o, &maps) > lt).count() as f64;
    let p = hits / n_mc as f64;
    Ok((p, (p * (1.0 - p) / n_mc as f64).sqrt()))
}

/// Monte Carlo settings shared by the semi-analytic constructors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub n_mc_pu: usize,
    pub seed: u64,
    pub nodes: usize,
}

/// First-scheme performance at a design point (plain censoring when
/// `g = 0, f = 1`).
pub fn perf_semianalytic_crt1(
    cfg: &NetworkConfig,
    design: &DesignPoint,
    assumed: &AssumedModel,
    mc: McSettings,
) -> PerfEstimate {
    let cache = RectangleCache::new(mc.nodes, true);
    let banks = SymbolBanks::generate(cfg, mc.n_mc_pu, mc.seed);
    SemiAnalyticModel::crt1(cfg, &design.thresholds, &banks, assumed, &cache).estimate(design.g, design.f, design.t)
}

pub fn perf_semianalytic_crt2(cfg: &NetworkConfig, design: &DesignPoint, rho_fc: f64, mc: McSettings) -> PerfEstimate {
    let cache = RectangleCache::new(mc.nodes, true);
    let banks = SymbolBanks::generate(cfg, mc.n_mc_pu, mc.seed);
    SemiAnalyticModel::crt2(cfg, &design.thresholds, &banks, rho_fc, &cache)
        .estimate(design.g, design.f, design.t)
}

/// Monomial coefficients of `(P_M, P_F)` at the design's thresholds and `t`.
pub fn extract_signed_coeffs(
    model: &SemiAnalyticModel,
    t: f64,
) -> (crate::poly::SignedBivariatePolynomial, crate::poly::SignedBivariatePolynomial) {
    let (pm, pf) = model.polynomials(t);
    (pm.expand(), pf.expand())
}

/// Sorted log-ratio samples of a full end-to-end simulation.
#[derive(Debug, Clone)]
pub struct OracleSamples {
    ln_lr_h0: Vec<f64>,
    ln_lr_h1: Vec<f64>,
    pt: f64,
    pt_se: f64,
}

impl OracleSamples {
    pub fn n(&self) -> usize {
        self.ln_lr_h0.len()
    }

    fn above(sorted: &[f64], ln_t: f64) -> f64 {
        let below = sorted.partition_point(|&x| x <= ln_t);
        (sorted.len() - below) as f64 / sorted.len() as f64
    }

    pub fn pf(&self, t: f64) -> f64 {
        Self::above(&self.ln_lr_h0, t.ln())
    }

    pub fn pm(&self, t: f64) -> f64 {
        1.0 - Self::above(&self.ln_lr_h1, t.ln())
    }

    /// Smallest `ln t` with `P_F <= beta`.
    pub fn min_ln_t_for_pf(&self, beta: f64) -> f64 {
        let n = self.ln_lr_h0.len();
        let allowed = (beta * n as f64).floor() as usize;
        if allowed >= n {
            return f64::NEG_INFINITY;
        }
        // Exactly the samples strictly above the cut raise an alarm.
        self.ln_lr_h0[n - 1 - allowed]
    }

    pub fn estimate(&self, t: f64) -> PerfEstimate {
        self.estimate_ln(t.ln())
    }

    pub fn estimate_ln(&self, ln_t: f64) -> PerfEstimate {
        let n = self.n() as f64;
        let pm = 1.0 - Self::above(&self.ln_lr_h1, ln_t);
        let pf = Self::above(&self.ln_lr_h0, ln_t);
        PerfEstimate {
            pm,
            pf,
            pt: self.pt,
            pc: 1.0 - self.pt,
            pm_se: (pm * (1.0 - pm) / n).sqrt(),
            pf_se: (pf * (1.0 - pf) / n).sqrt(),
            pt_se: self.pt_se,
            n_samples: self.n(),
            route: Route::Oracle,
        }
    }
}

/// End-to-end simulation of the network at a design point.
///
/// The FC rule follows `design.scheme`: plain censoring, the first scheme
/// with probabilities `assumed.(g_fc, f_fc)`, or the second scheme with
/// known decisions. Every scheme consumes the random stream identically,
/// so runs with the same seed share observations and channels.
pub fn simulate_oracle(
    cfg: &NetworkConfig,
    design: &DesignPoint,
    assumed: &AssumedModel,
    n_mc: usize,
    seed: u64,
    nodes: usize,
) -> OracleSamples {
    let gh = crate::quadrature::GaussHermite::new(nodes);
    let fc = FusionWeights::new(cfg, &design.thresholds, assumed.rho_fc, &gh);
    let (g, f) = match design.scheme {
        Scheme::PureCensoring => (0.0, 1.0),
        _ => (design.g, design.f),
    };
    let fc_map = match design.scheme {
        Scheme::PureCensoring => SensorMap::censoring(),
        _ => SensorMap::randomized(assumed.g_fc, assumed.f_fc),
    };
    let blocks = n_mc.div_ceil(rng::BLOCK);
    let run = |hyp: Hypothesis| -> (Vec<f64>, Vec<f64>) {
        let parts: Vec<(Vec<f64>, Vec<f64>)> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let id = 2 * b as u64 + u64::from(hyp == Hypothesis::H1);
                let mut r = rng::stream(seed, Domain::Oracle, id);
                let count = rng::BLOCK.min(n_mc - b * rng::BLOCK);
                let mut engine = LrEngine::new(&fc);
                let mean = hyp.mean(cfg.amplitude);
                let a = cfg.rho.sqrt() * cfg.sigma_w();
                let s = (1.0 - cfg.rho).sqrt() * cfg.sigma_w();
                let sh = (cfg.sigma_h2 / 2.0).sqrt();
                let sv = (cfg.sigma_v2 / 2.0).sqrt();
                let k = cfg.k;
                let mut lrs = Vec::with_capacity(count);
                let mut rates = Vec::with_capacity(count);
                let mut off = [[0.0; 2]; 12];
                let mut maps = [fc_map; 12];
                for _ in 0..count {
                    let z0: f64 = StandardNormal.sample(&mut r);
                    let mut d = [Interval::Censor; 12];
                    for dk in d.iter_mut().take(k) {
                        let e: f64 = StandardNormal.sample(&mut r);
                        *dk = classify_observation(mean + a * z0 + s * e, &design.thresholds);
                    }
                    let mut rg = [false; 12];
                    let mut rf = [false; 12];
                    for x in rg.iter_mut().take(k) {
                        *x = r.gen::<f64>() < g;
                    }
                    for x in rf.iter_mut().take(k) {
                        *x = r.gen::<f64>() < f;
                    }
                    let mut sent = 0usize;
                    for i in 0..k {
                        let u = map_symbol(d[i], rg[i], rf[i]);
                        sent += usize::from(u != Symbol::Silent);
                        let h = draw_cn(&mut r, sh);
                        let v = draw_cn(&mut r, sv);
                        off[i] = symbol_log_offsets(h * u.value() + v, h, cfg.sigma_v2);
                        if design.scheme == Scheme::Crt2 {
                            maps[i] = SensorMap::known(rf[i], rg[i]);
                        }
                    }
                    lrs.push(engine.ln_lr_offsets(&off[..k], &maps[..k]));
                    rates.push(sent as f64 / k as f64);
                }
                (lrs, rates)
            })
            .collect();
        let mut lrs = Vec::with_capacity(n_mc);
        let mut rates = Vec::with_capacity(n_mc);
        for (l, r) in parts {
            lrs.extend(l);
            rates.extend(r);
        }
        (lrs, rates)
    };
    let (mut h0, rates) = run(Hypothesis::H0);
    let (mut h1, _) = run(Hypothesis::H1);
    h0.sort_by(f64::total_cmp);
    h1.sort_by(f64::total_cmp);
    let n = rates.len() as f64;
    let pt = rates.iter().sum::<f64>() / n;
    let var = rates.iter().map(|x| (x - pt).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    OracleSamples { ln_lr_h0: h0, ln_lr_h1: h1, pt, pt_se: (var / n).sqrt() }
}

/// End-to-end estimate at the design's own threshold.
pub fn perf_oracle(
    cfg: &NetworkConfig,
    design: &DesignPoint,
    assumed: &AssumedModel,
    n_mc: usize,
    seed: u64,
    nodes: usize,
) -> PerfEstimate {
    simulate_oracle(cfg, design, assumed, n_mc, seed, nodes).estimate(design.t)
}

/// Interval table shortcut used by analysis code.
pub fn interval_table(cfg: &NetworkConfig, thr: &Thresholds, hyp: Hypothesis, cache: &RectangleCache) -> std::sync::Arc<RectangleTable> {
    cache.table(cfg, cfg.rho, thr, hyp)
}
