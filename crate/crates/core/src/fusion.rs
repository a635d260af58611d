//! Likelihood-ratio fusion at the fusion centre.
//!
//! The FC sees `y_k = u_k h_k + v_k` with known fading gains. Summing over
//! the hidden interval of each sensor, the ratio is
//!
//! ```text
//! LR = sum_d P(d | H1) prod_k q_k(d_k) / sum_d P(d | H0) prod_k q_k(d_k)
//! ```
//!
//! where `q_k(i)` is the likelihood of `y_k` given that sensor `k` fell in
//! interval `i`, marginalised over whatever symbol randomisation the FC
//! assumes. `P(d | H)` depends on the interval counts only, so the sum over
//! `3^K` assignments collapses into a polynomial recursion over sensors that
//! tracks `(below, censor)` counts.

use num_complex::Complex64;

use crate::gaussian::{CountIndex, RectangleTable};
use crate::model::{Hypothesis, Interval, NetworkConfig, Symbol, Thresholds};
use crate::quadrature::GaussHermite;

/// Likelihood ratios are saturated to `[exp(-LN_LR_CAP), exp(LN_LR_CAP)]`.
pub const LN_LR_CAP: f64 = 690.0;

/// What the FC believes about the sensors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumedModel {
    /// Correlation used for the interval-assignment weights.
    pub rho_fc: f64,
    /// Probability the FC assumes a censored sensor sends `-1`.
    pub g_fc: f64,
    /// Probability the FC assumes a sensor below `tau2` sends `-1`.
    pub f_fc: f64,
}

impl AssumedModel {
    /// FC that treats every sensor as a plain censoring sensor.
    pub fn censoring(rho_fc: f64) -> Self {
        Self { rho_fc, g_fc: 0.0, f_fc: 1.0 }
    }

    pub fn randomized(rho_fc: f64, g_fc: f64, f_fc: f64) -> Self {
        Self { rho_fc, g_fc, f_fc }
    }
}

/// Fading gains and received samples for one fusion interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: Vec<Complex64>,
    pub y: Vec<Complex64>,
}

/// Circularly-symmetric complex Gaussian density of `y` given symbol `u`.
pub fn symbol_likelihood(y: Complex64, u: Symbol, h: Complex64, sigma_v2: f64) -> f64 {
    let d = y - h * u.value();
    (-d.norm_sqr() / sigma_v2).exp() / (std::f64::consts::PI * sigma_v2)
}

/// `ln f(y | -1) - ln f(y | 0)` and `ln f(y | +1) - ln f(y | 0)`.
pub fn symbol_log_offsets(y: Complex64, h: Complex64, sigma_v2: f64) -> [f64; 2] {
    let r = (y * h.conj()).re;
    let a = h.norm_sqr();
    [(-2.0 * r - a) / sigma_v2, (2.0 * r - a) / sigma_v2]
}

/// Channel evidence for one received signal: the log offsets
/// `[ell(-1), 0, ell(+1)]` and their exponentials scaled so the largest is one.
/// Both depend only on the channel draw, so banks store them once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolEvidence {
    pub ell: [f64; 3],
    pub e: [f64; 3],
}

impl SymbolEvidence {
    pub fn new(offsets: [f64; 2]) -> Self {
        let ell = [offsets[0], 0.0, offsets[1]];
        let m = ell[0].max(0.0).max(ell[2]);
        Self { ell, e: [(ell[0] - m).exp(), (-m).exp(), (ell[2] - m).exp()] }
    }

    pub fn offsets(&self) -> [f64; 2] {
        [self.ell[0], self.ell[2]]
    }
}

/// Below this the scaled exponentials may have lost the relevant entries.
const UNDERFLOW_GUARD: f64 = 1e-200;

/// How the FC maps a sensor's hidden interval to the symbol it expects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SensorMap {
    /// Interval determines the symbol, indexed by interval.
    Deterministic([Symbol; 3]),
    /// `emit[interval][symbol]` probabilities.
    Mixture { emit: [[f64; 3]; 3], allowed: [bool; 3] },
}

impl SensorMap {
    pub fn censoring() -> Self {
        SensorMap::Deterministic([Symbol::Minus, Symbol::Silent, Symbol::Plus])
    }

    /// Sensor whose random decisions are known to the FC.
    pub fn known(r_f: bool, r_g: bool) -> Self {
        SensorMap::Deterministic([
            if r_f { Symbol::Minus } else { Symbol::Silent },
            if r_g { Symbol::Minus } else { Symbol::Silent },
            Symbol::Plus,
        ])
    }

    /// Sensor randomising with probabilities `(g, f)` unknown per trial.
    pub fn randomized(g: f64, f: f64) -> Self {
        if g == 0.0 && f == 1.0 {
            return Self::censoring();
        }
        let emit = [[f, 1.0 - f, 0.0], [g, 1.0 - g, 0.0], [0.0, 0.0, 1.0]];
        let mut allowed = [false; 3];
        for row in &emit {
            for (s, &p) in row.iter().enumerate() {
                allowed[s] |= p > 0.0;
            }
        }
        SensorMap::Mixture { emit, allowed }
    }

    /// `q(i)` for each interval, scaled so the largest entry is one.
    #[inline]
    pub fn interval_weights(&self, offsets: [f64; 2]) -> [f64; 3] {
        let ell = [offsets[0], 0.0, offsets[1]];
        match self {
            SensorMap::Deterministic(sym) => {
                let l = [ell[sym[0].index()], ell[sym[1].index()], ell[sym[2].index()]];
                let m = l[0].max(l[1]).max(l[2]);
                [(l[0] - m).exp(), (l[1] - m).exp(), (l[2] - m).exp()]
            }
            SensorMap::Mixture { emit, allowed } => {
                let mut m = f64::NEG_INFINITY;
                for s in 0..3 {
                    if allowed[s] {
                        m = m.max(ell[s]);
                    }
                }
                let e = [(ell[0] - m).exp(), (ell[1] - m).exp(), (ell[2] - m).exp()];
                let mut q = [0.0; 3];
                for i in 0..3 {
                    q[i] = emit[i][0] * e[0] + emit[i][1] * e[1] + emit[i][2] * e[2];
                }
                let mx = q[0].max(q[1]).max(q[2]);
                [q[0] / mx, q[1] / mx, q[2] / mx]
            }
        }
    }
}

impl SensorMap {
    /// [`Self::interval_weights`] from precomputed evidence.
    #[inline]
    pub fn weights_from(&self, ev: &SymbolEvidence) -> [f64; 3] {
        let e = &ev.e;
        let q = match self {
            SensorMap::Deterministic(sym) => [e[sym[0].index()], e[sym[1].index()], e[sym[2].index()]],
            SensorMap::Mixture { emit, .. } => {
                let mut q = [0.0; 3];
                for i in 0..3 {
                    q[i] = emit[i][0] * e[0] + emit[i][1] * e[1] + emit[i][2] * e[2];
                }
                q
            }
        };
        let mx = q[0].max(q[1]).max(q[2]);
        if mx > UNDERFLOW_GUARD {
            let inv = 1.0 / mx;
            [q[0] * inv, q[1] * inv, q[2] * inv]
        } else {
            self.interval_weights(ev.offsets())
        }
    }
}

/// Interval-assignment weights `P(d | H1)` and `P(d | H0)` as the FC sees them.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionWeights {
    index: CountIndex,
    px1: Vec<f64>,
    px0: Vec<f64>,
}

impl FusionWeights {
    pub fn new(cfg: &NetworkConfig, thr: &Thresholds, rho_fc: f64, gh: &GaussHermite) -> Self {
        let t1 = RectangleTable::for_hypothesis(cfg, rho_fc, thr, Hypothesis::H1, gh);
        let t0 = RectangleTable::for_hypothesis(cfg, rho_fc, thr, Hypothesis::H0, gh);
        Self::from_tables(&t1, &t0)
    }

    pub fn from_tables(h1: &RectangleTable, h0: &RectangleTable) -> Self {
        assert_eq!(h1.k(), h0.k());
        Self { index: CountIndex { k: h1.k() }, px1: h1.flat().to_vec(), px0: h0.flat().to_vec() }
    }

    pub fn k(&self) -> usize {
        self.index.k
    }
}

/// Saturated log-likelihood ratio.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LikelihoodRatio {
    pub ln: f64,
}

impl LikelihoodRatio {
    pub fn value(&self) -> f64 {
        self.ln.exp()
    }
}

/// Likelihood-ratio evaluator bound to one set of FC weights.
#[derive(Debug, Clone)]
pub struct LrEngine<'a> {
    weights: &'a FusionWeights,
}

impl<'a> LrEngine<'a> {
    pub fn new(weights: &'a FusionWeights) -> Self {
        Self { weights }
    }

    /// Log-ratio from per-sensor interval weights `[below, censor, above]`.
    ///
    /// Builds the coefficients of `prod_k (qb_k x + qz_k y + qa_k)`, whose
    /// `x^b y^z` entry sums the weights of assignments with `b` sensors below
    /// and `z` censored.
    pub fn ln_lr(&mut self, q: &[[f64; 3]]) -> f64 {
        let w = self.weights;
        debug_assert_eq!(q.len(), w.index.k);
        let (num, den) = match q.len() {
            1 => accumulate::<2>(q, w),
            2 => accumulate::<3>(q, w),
            3 => accumulate::<4>(q, w),
            4 => accumulate::<5>(q, w),
            5 => accumulate::<6>(q, w),
            6 => accumulate::<7>(q, w),
            7 => accumulate::<8>(q, w),
            8 => accumulate::<9>(q, w),
            9 => accumulate::<10>(q, w),
            10 => accumulate::<11>(q, w),
            11 => accumulate::<12>(q, w),
            12 => accumulate::<13>(q, w),
            k => panic!("unsupported sensor count {k}"),
        };
        saturate_ln_ratio(num, den)
    }

    /// Log-ratio for received offsets with one FC map per sensor.
    pub fn ln_lr_offsets(&mut self, offsets: &[[f64; 2]], maps: &[SensorMap]) -> f64 {
        let mut q = [[0.0; 3]; 12];
        let k = offsets.len();
        for i in 0..k {
            q[i] = maps[i].interval_weights(offsets[i]);
        }
        self.ln_lr(&q[..k])
    }

    /// Same as [`Self::ln_lr_offsets`] with one map shared by every sensor.
    pub fn ln_lr_offsets_uniform(&mut self, offsets: &[[f64; 2]], map: &SensorMap) -> f64 {
        let mut q = [[0.0; 3]; 12];
        let k = offsets.len();
        for i in 0..k {
            q[i] = map.interval_weights(offsets[i]);
        }
        self.ln_lr(&q[..k])
    }

    /// Log-ratio from precomputed evidence, one map per sensor.
    pub fn ln_lr_evidence(&mut self, ev: &[SymbolEvidence], maps: &[SensorMap]) -> f64 {
        let mut q = [[0.0; 3]; 12];
        let k = ev.len();
        for i in 0..k {
            q[i] = maps[i].weights_from(&ev[i]);
        }
        self.ln_lr(&q[..k])
    }

    pub fn ln_lr_evidence_uniform(&mut self, ev: &[SymbolEvidence], map: &SensorMap) -> f64 {
        let mut q = [[0.0; 3]; 12];
        let k = ev.len();
        for i in 0..k {
            q[i] = map.weights_from(&ev[i]);
        }
        self.ln_lr(&q[..k])
    }
}

/// `(sum P_x1 c, sum P_x0 c)` for `S = K + 1`; sized at compile time so the
/// short loops unroll.
#[inline]
fn accumulate<const S: usize>(q: &[[f64; 3]], w: &FusionWeights) -> (f64, f64) {
    let mut c = [[0.0f64; S]; S];
    c[0][0] = 1.0;
    for (n, &[qb, qz, qa]) in q.iter().enumerate().take(S - 1) {
        let done = n + 1;
        // Descending order keeps every read on last round's values.
        for b in (1..=done).rev() {
            for z in (1..=done - b).rev() {
                c[b][z] = c[b][z] * qa + c[b - 1][z] * qb + c[b][z - 1] * qz;
            }
            c[b][0] = c[b][0] * qa + c[b - 1][0] * qb;
        }
        for z in (1..=done).rev() {
            c[0][z] = c[0][z] * qa + c[0][z - 1] * qz;
        }
        c[0][0] *= qa;
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (b, row) in c.iter().enumerate() {
        let p1 = &w.px1[b * S..b * S + S - b];
        let p0 = &w.px0[b * S..b * S + S - b];
        for z in 0..S - b {
            num += p1[z] * row[z];
            den += p0[z] * row[z];
        }
    }
    (num, den)
}

fn saturate_ln_ratio(num: f64, den: f64) -> f64 {
    match (num > 0.0, den > 0.0) {
        (true, true) => {
            let r = num / den;
            let ln = if r.is_normal() { r.ln() } else { num.ln() - den.ln() };
            ln.clamp(-LN_LR_CAP, LN_LR_CAP)
        }
        (true, false) => LN_LR_CAP,
        (false, true) => -LN_LR_CAP,
        (false, false) => 0.0,
    }
}

fn offsets_of(real: &ChannelRealization, cfg: &NetworkConfig) -> Vec<[f64; 2]> {
    real.y.iter().zip(&real.h).map(|(&y, &h)| symbol_log_offsets(y, h, cfg.sigma_v2)).collect()
}

/// Ratio when every sensor is a plain censoring sensor.
pub fn lr_pure_censoring(real: &ChannelRealization, cfg: &NetworkConfig, weights: &FusionWeights) -> LikelihoodRatio {
    let off = offsets_of(real, cfg);
    LikelihoodRatio { ln: LrEngine::new(weights).ln_lr_offsets_uniform(&off, &SensorMap::censoring()) }
}

/// Ratio when the FC knows only the randomisation probabilities.
pub fn lr_crt1(
    real: &ChannelRealization,
    cfg: &NetworkConfig,
    weights: &FusionWeights,
    g_fc: f64,
    f_fc: f64,
) -> LikelihoodRatio {
    let off = offsets_of(real, cfg);
    LikelihoodRatio { ln: LrEngine::new(weights).ln_lr_offsets_uniform(&off, &SensorMap::randomized(g_fc, f_fc)) }
}

/// Ratio when the FC knows each sensor's random decisions.
pub fn lr_crt2(
    real: &ChannelRealization,
    cfg: &NetworkConfig,
    weights: &FusionWeights,
    r_f: &[bool],
    r_g: &[bool],
) -> LikelihoodRatio {
    let off = offsets_of(real, cfg);
    let maps: Vec<SensorMap> = r_f.iter().zip(r_g).map(|(&f, &g)| SensorMap::known(f, g)).collect();
    LikelihoodRatio { ln: LrEngine::new(weights).ln_lr_offsets(&off, &maps) }
}

/// Global decision: `true` (declare H1) iff `LR > t`.
pub fn fuse(lr: LikelihoodRatio, t: f64) -> bool {
    lr.ln > t.ln()
}

/// Interval order used by [`SensorMap`] rows.
pub const INTERVAL_ORDER: [Interval; 3] = [Interval::Below, Interval::Censor, Interval::Above];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::rectangle_prob;
    use crate::model::map_symbol;

    fn cfg(rho: f64) -> NetworkConfig {
        NetworkConfig::from_snr_db(4, 1.0, 10.0, 5.0, rho).unwrap()
    }

    fn realization(k: usize, seed: u64, scale: f64) -> ChannelRealization {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut n = || -> f64 { StandardNormal.sample(&mut r) };
        let h: Vec<Complex64> = (0..k).map(|_| Complex64::new(n(), n()) * scale).collect();
        let y: Vec<Complex64> = (0..k).map(|i| h[i] * [1.0, 0.0, -1.0][i % 3] + Complex64::new(n(), n()) * 0.7e-4).collect();
        ChannelRealization { h, y }
    }

    fn all_assignments(k: usize) -> Vec<Vec<Interval>> {
        let mut out = vec![vec![]];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|a: Vec<Interval>| {
                    INTERVAL_ORDER.iter().map(move |&d| {
                        let mut b = a.clone();
                        b.push(d);
                        b
                    })
                })
                .collect();
        }
        out
    }

    /// Literal triple sum over assignments and random decisions.
    fn brute_force_crt1(real: &ChannelRealization, c: &NetworkConfig, thr: &Thresholds, g: f64, f: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for a in all_assignments(c.k) {
            let p1 = rectangle_prob(c, thr, &a, Hypothesis::H1, 64).unwrap();
            let p0 = rectangle_prob(c, thr, &a, Hypothesis::H0, 64).unwrap();
            let mut prod = 1.0;
            for (k, &d) in a.iter().enumerate() {
                let mut s = 0.0;
                for rg in [false, true] {
                    for rf in [false, true] {
                        let pr = (if rg { g } else { 1.0 - g }) * (if rf { f } else { 1.0 - f });
                        if pr == 0.0 {
                            continue;
                        }
                        let u = map_symbol(d, rg, rf);
                        s += pr * symbol_likelihood(real.y[k], u, real.h[k], c.sigma_v2);
                    }
                }
                prod *= s;
            }
            num += p1 * prod;
            den += p0 * prod;
        }
        num / den
    }

    fn brute_force_crt2(real: &ChannelRealization, c: &NetworkConfig, thr: &Thresholds, rf: &[bool], rg: &[bool]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for a in all_assignments(c.k) {
            let p1 = rectangle_prob(c, thr, &a, Hypothesis::H1, 64).unwrap();
            let p0 = rectangle_prob(c, thr, &a, Hypothesis::H0, 64).unwrap();
            let prod: f64 = a
                .iter()
                .enumerate()
                .map(|(k, &d)| symbol_likelihood(real.y[k], map_symbol(d, rg[k], rf[k]), real.h[k], c.sigma_v2))
                .product();
            num += p1 * prod;
            den += p0 * prod;
        }
        num / den
    }

    #[test]
    fn likelihood_ratio_of_symbols_closed_form() {
        let y = Complex64::new(1.3e-4, -0.4e-4);
        let h = Complex64::new(0.9e-4, 0.2e-4);
        let s2 = 1e-8;
        let ratio = symbol_likelihood(y, Symbol::Plus, h, s2) / symbol_likelihood(y, Symbol::Silent, h, s2);
        let want = ((2.0 * (y * h.conj()).re - h.norm_sqr()) / s2).exp();
        assert!((ratio / want - 1.0).abs() < 1e-12);
        let off = symbol_log_offsets(y, h, s2);
        assert!((off[1] - want.ln()).abs() < 1e-9);
    }

    #[test]
    fn recursion_matches_enumeration() {
        let thr = Thresholds::new(0.6, -0.1).unwrap();
        let gh = GaussHermite::new(64);
        for &rho in &[0.0, 0.5, 0.8] {
            let c = cfg(rho);
            let w = FusionWeights::new(&c, &thr, rho, &gh);
            for seed in 0..5 {
                let real = realization(c.k, seed, 1e-4);
                for &(g, f) in &[(0.0, 1.0), (0.3, 0.6), (1.0, 0.0), (0.0, 0.0)] {
                    let got = lr_crt1(&real, &c, &w, g, f).value();
                    let want = brute_force_crt1(&real, &c, &thr, g, f);
                    assert!((got / want - 1.0).abs() < 1e-9, "rho={rho} g={g} f={f}: {got} vs {want}");
                }
                let rf = [true, false, true, false];
                let rg = [false, false, true, true];
                let got = lr_crt2(&real, &c, &w, &rf, &rg).value();
                let want = brute_force_crt2(&real, &c, &thr, &rf, &rg);
                assert!((got / want - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn censoring_rules_coincide() {
        let c = cfg(0.5);
        let thr = Thresholds::new(0.6, -0.1).unwrap();
        let w = FusionWeights::new(&c, &thr, 0.5, &GaussHermite::new(64));
        let real = realization(c.k, 9, 1e-4);
        let a = lr_pure_censoring(&real, &c, &w);
        let b = lr_crt1(&real, &c, &w, 0.0, 1.0);
        let d = lr_crt2(&real, &c, &w, &[true; 4], &[false; 4]);
        assert_eq!(a, b);
        assert!((a.ln - d.ln).abs() < 1e-12);
    }

    #[test]
    fn saturates_instead_of_overflowing() {
        let c = cfg(0.5);
        let thr = Thresholds::new(0.6, -0.1).unwrap();
        let w = FusionWeights::new(&c, &thr, 0.5, &GaussHermite::new(64));
        // Huge gain and a strong +1 reception on every sensor.
        let h = vec![Complex64::new(1.0, 0.0); 4];
        let y = h.clone();
        let lr = lr_pure_censoring(&ChannelRealization { h, y }, &c, &w);
        assert!(lr.ln.is_finite() && lr.value().is_finite());
        assert!(fuse(lr, 1.0));
    }

    #[test]
    fn tie_declares_h0() {
        let lr = LikelihoodRatio { ln: 2.0_f64.ln() };
        assert!(!fuse(lr, 2.0));
        assert!(fuse(lr, 1.999));
    }
}
