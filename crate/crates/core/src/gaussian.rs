//! Joint interval probabilities of equicorrelated Gaussian observations.
//!
//! With pairwise correlation `rho` the noise has the one-factor form
//! `w_k = sigma_w (sqrt(rho) z0 + sqrt(1 - rho) e_k)`, so conditional on the
//! common factor `z0` the sensors are independent. Joint probabilities of an
//! interval assignment are one-dimensional integrals over `z0`, evaluated
//! with Gauss-Hermite quadrature.

use std::collections::HashMap;
use std::sync::Mutex;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::model::{gaussian_interval_probs, Hypothesis, Interval, NetworkConfig, Thresholds};
use crate::quadrature::GaussHermite;
use crate::rng::{self, Domain};

/// How many sensors fall in each interval. For an exchangeable joint law
/// the probability of an assignment depends on these counts only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalCounts {
    pub below: usize,
    pub censor: usize,
    pub above: usize,
}

impl IntervalCounts {
    pub fn new(below: usize, censor: usize, above: usize) -> Self {
        Self { below, censor, above }
    }

    pub fn of(assignment: &[Interval]) -> Self {
        let mut c = Self::new(0, 0, 0);
        for d in assignment {
            match d {
                Interval::Below => c.below += 1,
                Interval::Censor => c.censor += 1,
                Interval::Above => c.above += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.below + self.censor + self.above
    }

    /// Every count triple summing to `k`, in a fixed order.
    pub fn all(k: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity((k + 1) * (k + 2) / 2);
        for below in 0..=k {
            for censor in 0..=k - below {
                out.push(Self::new(below, censor, k - below - censor));
            }
        }
        out
    }
}

/// Dense `(K+1) x (K+1)` layout indexed by `(below, censor)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountIndex {
    pub k: usize,
}

impl CountIndex {
    pub fn len(&self) -> usize {
        (self.k + 1) * (self.k + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn at(&self, below: usize, censor: usize) -> usize {
        below * (self.k + 1) + censor
    }
}

/// Probabilities of every specific interval assignment for one hypothesis,
/// tabulated by counts.
#[derive(Debug, Clone, PartialEq)]
pub struct RectangleTable {
    index: CountIndex,
    probs: Vec<f64>,
}

impl RectangleTable {
    /// Table for observations with common mean `mean`, noise standard
    /// deviation `sigma_w` and correlation `rho`.
    pub fn new(k: usize, mean: f64, sigma_w: f64, rho: f64, thr: &Thresholds, gh: &GaussHermite) -> Self {
        let index = CountIndex { k };
        let mut probs = vec![0.0; index.len()];
        let shift = rho.sqrt() * sigma_w;
        let sd = (1.0 - rho).sqrt() * sigma_w;
        let nodes: Vec<(f64, f64, f64, f64)> = if rho == 0.0 {
            let p = gaussian_interval_probs(mean, sd, thr);
            vec![(1.0, p.below, p.censor, p.above)]
        } else {
            gh.nodes()
                .iter()
                .zip(gh.weights())
                .map(|(&z, &w)| {
                    let p = gaussian_interval_probs(mean + shift * z, sd, thr);
                    (w, p.below, p.censor, p.above)
                })
                .collect()
        };
        for c in IntervalCounts::all(k) {
            probs[index.at(c.below, c.censor)] = nodes
                .iter()
                .map(|&(w, pb, pz, pa)| {
                    w * pb.powi(c.below as i32) * pz.powi(c.censor as i32) * pa.powi(c.above as i32)
                })
                .sum();
        }
        Self { index, probs }
    }

    pub fn for_hypothesis(cfg: &NetworkConfig, rho: f64, thr: &Thresholds, hyp: Hypothesis, gh: &GaussHermite) -> Self {
        Self::new(cfg.k, hyp.mean(cfg.amplitude), cfg.sigma_w(), rho, thr, gh)
    }

    pub fn k(&self) -> usize {
        self.index.k
    }

    pub fn get(&self, c: IntervalCounts) -> f64 {
        self.probs[self.index.at(c.below, c.censor)]
    }

    /// Flat `(below, censor)` layout used by the fusion recursion.
    pub fn flat(&self) -> &[f64] {
        &self.probs
    }
}

/// Probability that the sensors fall in exactly the given intervals.
pub fn rectangle_prob(
    cfg: &NetworkConfig,
    thr: &Thresholds,
    assignment: &[Interval],
    hyp: Hypothesis,
    nodes: usize,
) -> Result<f64> {
    if assignment.len() != cfg.k {
        return Err(invalid(format!("assignment has {} entries, expected K = {}", assignment.len(), cfg.k)));
    }
    if nodes == 0 {
        return Err(invalid("quadrature needs at least one node"));
    }
    let c = IntervalCounts::of(assignment);
    let table = RectangleTable::for_hypothesis(cfg, cfg.rho, thr, hyp, &GaussHermite::new(nodes));
    Ok(table.get(c))
}

type CacheKey = (usize, [i64; 5], bool, usize);

fn quantize(x: f64) -> i64 {
    if x == f64::INFINITY {
        i64::MAX
    } else if x == f64::NEG_INFINITY {
        i64::MIN
    } else {
        (x * 1e12).round() as i64
    }
}

/// Memoises rectangle tables on quantised thresholds.
#[derive(Debug)]
pub struct RectangleCache {
    enabled: bool,
    nodes: usize,
    rule: GaussHermite,
    map: Mutex<HashMap<CacheKey, std::sync::Arc<RectangleTable>>>,
}

impl RectangleCache {
    pub fn new(nodes: usize, enabled: bool) -> Self {
        Self { enabled, nodes, rule: GaussHermite::new(nodes), map: Mutex::new(HashMap::new()) }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn rule(&self) -> &GaussHermite {
        &self.rule
    }

    pub fn table(
        &self,
        cfg: &NetworkConfig,
        rho: f64,
        thr: &Thresholds,
        hyp: Hypothesis,
    ) -> std::sync::Arc<RectangleTable> {
        let build = || std::sync::Arc::new(RectangleTable::for_hypothesis(cfg, rho, thr, hyp, &self.rule));
        if !self.enabled {
            return build();
        }
        let key = (
            cfg.k,
            [
                quantize(thr.tau1),
                quantize(thr.tau2),
                quantize(cfg.amplitude),
                quantize(cfg.sigma_w2),
                quantize(rho),
            ],
            hyp == Hypothesis::H1,
            self.nodes,
        );
        if let Some(t) = self.map.lock().expect("cache lock").get(&key) {
            return t.clone();
        }
        let t = build();
        self.map.lock().expect("cache lock").insert(key, t.clone());
        t
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Draws `n` observation vectors under `hyp`.
pub fn sample_observations(cfg: &NetworkConfig, hyp: Hypothesis, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mean = hyp.mean(cfg.amplitude);
    let a = cfg.rho.sqrt() * cfg.sigma_w();
    let b = (1.0 - cfg.rho).sqrt() * cfg.sigma_w();
    let mut out = Vec::with_capacity(n);
    let mut block = 0u64;
    while out.len() < n {
        let mut r = rng::stream(seed, Domain::Observations, block);
        for _ in 0..rng::BLOCK.min(n - out.len()) {
            let z0: f64 = StandardNormal.sample(&mut r);
            out.push(
                (0..cfg.k)
                    .map(|_| {
                        let e: f64 = StandardNormal.sample(&mut r);
                        mean + a * z0 + b * e
                    })
                    .collect(),
            );
        }
        block += 1;
    }
    out
}
