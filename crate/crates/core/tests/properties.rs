//! Randomised invariants of the probability model, the fusion rule and the
//! GP building blocks.

mod common;

use common::{assignments, literal_sum, network, realization, NODES};
use censornet::fusion::{lr_crt1, lr_crt2, FusionWeights};
use censornet::gaussian::rectangle_prob;
use censornet::gp::{condense_agm, Monomial, Posynomial};
use censornet::model::{rate_probs, Hypothesis, Interval, RatePath, Thresholds};
use censornet::poly::BasisPolynomial;
use censornet::quadrature::GaussHermite;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn thresholds() -> impl Strategy<Value = Thresholds> {
    (-0.5f64..1.5, 0.01f64..1.0).prop_map(|(tau2, width)| Thresholds::new(tau2 + width, tau2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rectangle_probabilities_are_complete(k in 1usize..=4, rho in 0.0f64..0.95, thr in thresholds(), h1 in any::<bool>()) {
        let cfg = network(k, rho, 10.0);
        let hyp = if h1 { Hypothesis::H1 } else { Hypothesis::H0 };
        let total: f64 = assignments(k).iter().map(|a| rectangle_prob(&cfg, &thr, a, hyp, NODES).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "total {total}");
    }

    #[test]
    fn first_scheme_ratio_matches_literal_sum(k in 1usize..=3, rho in 0.0f64..0.9, thr in thresholds(), g in 0.0f64..=1.0, f in 0.0f64..=1.0, seed in any::<u64>()) {
        let cfg = network(k, rho, 10.0);
        let real = realization(&cfg, seed);
        let w = FusionWeights::new(&cfg, &thr, rho, &GaussHermite::new(NODES));
        let bits = |_: usize, _: Interval| vec![
            ((1.0 - g) * (1.0 - f), false, false),
            (g * (1.0 - f), true, false),
            ((1.0 - g) * f, false, true),
            (g * f, true, true),
        ];
        let want = literal_sum(&cfg, &thr, &real, Hypothesis::H1, &bits) / literal_sum(&cfg, &thr, &real, Hypothesis::H0, &bits);
        let got = lr_crt1(&real, &cfg, &w, g, f).value();
        prop_assert!((got / want - 1.0).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn second_scheme_ratio_matches_literal_sum(k in 1usize..=2, rho in 0.0f64..0.9, thr in thresholds(), rf in prop::collection::vec(any::<bool>(), 2), rg in prop::collection::vec(any::<bool>(), 2), seed in any::<u64>()) {
        let cfg = network(k, rho, 10.0);
        let real = realization(&cfg, seed);
        let w = FusionWeights::new(&cfg, &thr, rho, &GaussHermite::new(NODES));
        let bits = |i: usize, _: Interval| vec![(1.0, rg[i], rf[i])];
        let want = literal_sum(&cfg, &thr, &real, Hypothesis::H1, &bits) / literal_sum(&cfg, &thr, &real, Hypothesis::H0, &bits);
        let got = lr_crt2(&real, &cfg, &w, &rf[..k], &rg[..k]).value();
        prop_assert!((got / want - 1.0).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn rate_path_keeps_transmission_rate(rho in 0.0f64..0.9, thr in thresholds(), target in 0.05f64..0.95, u in 0.0f64..=1.0) {
        let cfg = network(5, rho, 10.0);
        let path = RatePath::new(&cfg, &thr, target).unwrap();
        if let Ok(range) = path.feasible_range() {
            let f = range.lo + u * range.width();
            let g = path.g(f);
            prop_assert!((-1e-9..=1.0 + 1e-9).contains(&g));
            prop_assert!((rate_probs(&cfg, &thr, g, f).transmit - target).abs() < 1e-12);
        }
    }

    #[test]
    fn agm_monomial_never_exceeds_its_posynomial(
        terms in prop::collection::vec((0.01f64..10.0, -3.0f64..3.0, -3.0f64..3.0), 1..6),
        g0 in 0.01f64..1.0,
        f0 in 0.01f64..1.0,
        seed in any::<u64>(),
    ) {
        let p = Posynomial::new(terms.iter().map(|&(coef, exp_g, exp_f)| Monomial { coef, exp_g, exp_f }).collect());
        let m = condense_agm(&p, g0, f0).monomial;
        prop_assert!((m.eval(g0, f0) / p.eval(g0, f0) - 1.0).abs() < 1e-10);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let (g, f) = (r.gen_range(1e-3..1.0), r.gen_range(1e-3..1.0));
            prop_assert!(m.eval(g, f) <= p.eval(g, f) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn dominating_posynomial_bounds_nonnegative_sums(
        terms in prop::collection::vec(((0u32..4, 0u32..4, 0u32..4, 0u32..4), 0.0f64..1.0), 1..8),
        seed in any::<u64>(),
    ) {
        let mut b = BasisPolynomial::new();
        for ((a, c, d, e), coef) in terms {
            b.add([a, c, d, e], coef);
        }
        let dom = b.dominating_posynomial();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let (g, f) = (r.gen_range(1e-3..=1.0), r.gen_range(1e-3..=1.0));
            prop_assert!(dom.eval(g, f) >= b.eval(g, f) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn expansion_is_exact(terms in prop::collection::vec(((0u32..4, 0u32..4, 0u32..4, 0u32..4), 0.0f64..1.0), 1..8), g in 0.0f64..=1.0, f in 0.0f64..=1.0) {
        let mut b = BasisPolynomial::new();
        for ((a, c, d, e), coef) in terms {
            b.add([a, c, d, e], coef);
        }
        prop_assert!((b.expand().eval(g, f) - b.eval(g, f)).abs() < 1e-10);
    }
}

#[test]
fn inverted_thresholds_are_rejected() {
    assert!(Thresholds::new(-0.1, 0.2).is_err());
}

#[test]
fn zero_amplitude_makes_hypotheses_identical() {
    let mut cfg = network(3, 0.5, 10.0);
    cfg.amplitude = 1e-300;
    let thr = Thresholds::new(0.5, -0.1).unwrap();
    for a in assignments(3) {
        let p1 = rectangle_prob(&cfg, &thr, &a, Hypothesis::H1, NODES).unwrap();
        let p0 = rectangle_prob(&cfg, &thr, &a, Hypothesis::H0, NODES).unwrap();
        assert!((p1 - p0).abs() < 1e-15);
    }
}
