//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use censornet::fusion::{symbol_likelihood, ChannelRealization, INTERVAL_ORDER};
use censornet::gaussian::rectangle_prob;
use censornet::model::{map_symbol, DesignPoint, Hypothesis, Interval, NetworkConfig, Thresholds};
use censornet::perf::SemiAnalyticModel;
use censornet::workspace::{SolverSettings, Variant, Workspace};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NODES: usize = 64;

pub fn assignments(k: usize) -> Vec<Vec<Interval>> {
    (0..3usize.pow(k as u32))
        .map(|mut code| {
            (0..k)
                .map(|_| {
                    let d = INTERVAL_ORDER[code % 3];
                    code /= 3;
                    d
                })
                .collect()
        })
        .collect()
}

pub fn network(k: usize, rho: f64, snr_c: f64) -> NetworkConfig {
    NetworkConfig::from_snr_db(k, 1.0, snr_c, 5.0, rho).unwrap()
}

/// Received signals for a random symbol pattern, at the scale of the
/// default channel.
pub fn realization(cfg: &NetworkConfig, seed: u64) -> ChannelRealization {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let s = (cfg.sigma_h2 / 2.0).sqrt();
    let n = (cfg.sigma_v2 / 2.0).sqrt();
    let mut c = |scale: f64| Complex64::new(r.gen::<f64>() - 0.5, r.gen::<f64>() - 0.5) * (scale * 3.0);
    let h: Vec<Complex64> = (0..cfg.k).map(|_| c(s)).collect();
    let y = h.iter().enumerate().map(|(i, &hk)| hk * [1.0, 0.0, -1.0][i % 3] + c(n)).collect();
    ChannelRealization { h, y }
}

/// `sum_a P_x(a) prod_k P(y_k | a_k)` with the per-sensor law summed over
/// the random bits, each bit pattern mapped to its symbol.
pub fn literal_sum(cfg: &NetworkConfig, thr: &Thresholds, real: &ChannelRealization, hyp: Hypothesis, bits: &dyn Fn(usize, Interval) -> Vec<(f64, bool, bool)>) -> f64 {
    assignments(cfg.k)
        .into_iter()
        .map(|a| {
            let px = rectangle_prob(cfg, thr, &a, hyp, NODES).unwrap();
            let likelihood: f64 = a
                .iter()
                .enumerate()
                .map(|(k, &d)| {
                    bits(k, d)
                        .into_iter()
                        .map(|(p, rg, rf)| p * symbol_likelihood(real.y[k], map_symbol(d, rg, rf), real.h[k], cfg.sigma_v2))
                        .sum::<f64>()
                })
                .product();
            px * likelihood
        })
        .sum()
}

pub const POINTS: usize = 20;
/// Designs share a threshold pair in groups of this size, so the expensive
/// second-scheme tables are built only a few times.
pub const PER_THRESHOLD: usize = 10;

pub fn route_workspace() -> Workspace {
    let cfg = NetworkConfig::from_snr_db(5, 1.0, 10.0, 5.0, 0.5).unwrap();
    let settings = SolverSettings { n_mc_pu: 8_000, n_mc_oracle: 100_000, seed: 11, ..SolverSettings::default() };
    Workspace::new(&cfg, &settings).unwrap()
}

/// Largest semi-analytic vs simulation deviation, in combined standard
/// errors, over random designs.
pub fn route_deviation(variant: Variant, seed: u64) -> f64 {
    let ws = route_workspace();
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut thr = Thresholds::new(0.6, -0.1).unwrap();
    let mut crt2: Option<SemiAnalyticModel> = None;
    let mut worst = 0.0f64;
    for i in 0..POINTS {
        if i % PER_THRESHOLD == 0 {
            thr = Thresholds::new(r.gen_range(0.4..0.9), r.gen_range(-0.3..0.3)).unwrap();
            crt2 = None;
        }
        let (g, f) = match variant {
            Variant::PureCensoring => (0.0, 1.0),
            _ => (r.gen_range(0.0..=1.0), r.gen_range(0.0..=1.0)),
        };
        let model = match variant {
            Variant::PureCensoring | Variant::Crt1Mismatched => ws.pure_model(&thr),
            Variant::Crt1 => ws.crt1_model(&thr, g, f),
            Variant::Crt2 => crt2.get_or_insert_with(|| ws.crt2_model(&thr)).clone(),
        };
        let beta = r.gen_range(0.005..0.2);
        let t = model.min_t_for_pf(g, f, beta);
        let semi = model.estimate(g, f, t);
        let mut design = DesignPoint::pure(thr, t);
        design.g = g;
        design.f = f;
        let oracle = ws.oracle(variant, &design).estimate(t);
        for (name, a, sa, b, sb) in [
            ("pm", semi.pm, semi.pm_se, oracle.pm, oracle.pm_se),
            ("pf", semi.pf, semi.pf_se, oracle.pf, oracle.pf_se),
        ] {
            let z = (a - b).abs() / (sa * sa + sb * sb).sqrt().max(1e-12);
            if z > worst {
                eprintln!("{} point {i} {name}: semi {a} ± {sa}, oracle {b} ± {sb} (g={g}, f={f}, t={t}, {thr:?})", variant.name());
            }
            worst = worst.max(z);
        }
    }
    eprintln!("{}: largest deviation {worst:.2} combined SE", variant.name());
    worst
}

