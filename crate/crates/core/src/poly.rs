//! Polynomials in the randomisation probabilities `(g, f)`.
//!
//! Detection probabilities are sums of terms
//! `c (1-g)^a g^b (1-f)^c f^d` with non-negative `c`. [`BasisPolynomial`]
//! keeps that form; [`SignedBivariatePolynomial`] is its monomial expansion
//! split into positive and negative parts.

use std::collections::BTreeMap;

use crate::composition::binomial;
use crate::gp::{Monomial, Posynomial};

/// Exponents of `[(1-g), g, (1-f), f]`.
pub type BasisExps = [u32; 4];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BasisPolynomial {
    terms: BTreeMap<BasisExps, f64>,
}

impl BasisPolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, exps: BasisExps, coef: f64) {
        if coef != 0.0 {
            *self.terms.entry(exps).or_insert(0.0) += coef;
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisExps, &f64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, g: f64, f: f64) -> f64 {
        self.terms.iter().map(|(e, c)| c * basis(e, g, f)).sum()
    }

    /// Expands into monomials `g^m f^n`.
    pub fn expand(&self) -> SignedBivariatePolynomial {
        let degree = self
            .terms
            .keys()
            .map(|e| (e[0] + e[1]).max(e[2] + e[3]) as usize)
            .max()
            .unwrap_or(0);
        let mut out = SignedBivariatePolynomial::zero(degree);
        for (e, &c) in &self.terms {
            for i in 0..=e[0] {
                let cg = binomial(e[0] as usize, i as usize);
                for j in 0..=e[2] {
                    let cf = binomial(e[2] as usize, j as usize);
                    let v = c * cg * cf;
                    let m = (e[1] + i) as usize;
                    let n = (e[3] + j) as usize;
                    if (i + j) % 2 == 0 {
                        out.pos[n * (degree + 1) + m] += v;
                    } else {
                        out.neg[n * (degree + 1) + m] += v;
                    }
                }
            }
        }
        out.cancel();
        out
    }

    /// Posynomial upper bound from `1 - x <= 1 / (4x)` applied to every
    /// `(1-g)` and `(1-f)` factor. Valid for `g, f > 0`.
    pub fn dominating_posynomial(&self) -> Posynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(_, &c)| c > 0.0)
            .map(|(e, &c)| Monomial {
                coef: c * 0.25f64.powi((e[0] + e[2]) as i32),
                exp_g: e[1] as f64 - e[0] as f64,
                exp_f: e[3] as f64 - e[2] as f64,
            })
            .collect();
        Posynomial::new(terms)
    }
}

#[inline]
pub fn basis(e: &BasisExps, g: f64, f: f64) -> f64 {
    (1.0 - g).powi(e[0] as i32) * g.powi(e[1] as i32) * (1.0 - f).powi(e[2] as i32) * f.powi(e[3] as i32)
}

/// `P = P1 - P2` with `P1 = sum pos[n][m] f^n g^m`, `P2 = sum neg[n][m] f^n g^m`,
/// both with non-negative coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedBivariatePolynomial {
    pub degree: usize,
    /// Indexed `n * (degree + 1) + m` for `f^n g^m`.
    pub pos: Vec<f64>,
    pub neg: Vec<f64>,
}

impl SignedBivariatePolynomial {
    pub fn zero(degree: usize) -> Self {
        let len = (degree + 1) * (degree + 1);
        Self { degree, pos: vec![0.0; len], neg: vec![0.0; len] }
    }

    /// Keeps at most one of `pos[i]`, `neg[i]` non-zero.
    fn cancel(&mut self) {
        for (p, n) in self.pos.iter_mut().zip(self.neg.iter_mut()) {
            let d = *p - *n;
            if d >= 0.0 {
                *p = d;
                *n = 0.0;
            } else {
                *p = 0.0;
                *n = -d;
            }
        }
    }

    pub fn positive_part(&self) -> Posynomial {
        self.part(&self.pos)
    }

    pub fn negative_part(&self) -> Posynomial {
        self.part(&self.neg)
    }

    fn part(&self, coefs: &[f64]) -> Posynomial {
        let d = self.degree + 1;
        let terms = coefs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0.0)
            .map(|(i, &c)| Monomial { coef: c, exp_g: (i % d) as f64, exp_f: (i / d) as f64 })
            .collect();
        Posynomial::new(terms)
    }

    pub fn eval(&self, g: f64, f: f64) -> f64 {
        self.positive_part().eval(g, f) - self.negative_part().eval(g, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sensor_expansion_by_hand() {
        // K = 1 censoring-randomised sensor:
        // c1 + c2 (1-g) + c3 g + c4 (1-f) + c5 f
        //   = (c1 + c2 + c4) + (c3 - c2) g + (c5 - c4) f.
        let c = [0.3, 0.2, 0.05, 0.25, 0.1];
        let mut p = BasisPolynomial::new();
        p.add([0, 0, 0, 0], c[0]);
        p.add([1, 0, 0, 0], c[1]);
        p.add([0, 1, 0, 0], c[2]);
        p.add([0, 0, 1, 0], c[3]);
        p.add([0, 0, 0, 1], c[4]);
        let s = p.expand();
        let d = s.degree + 1;
        assert!((s.pos[0] - (c[0] + c[1] + c[3])).abs() < 1e-15);
        assert!((s.neg[1] - (c[1] - c[2])).abs() < 1e-15);
        assert!((s.neg[d] - (c[3] - c[4])).abs() < 1e-15);
        assert_eq!(s.pos[1], 0.0);
    }

    #[test]
    fn expansion_preserves_values() {
        let mut p = BasisPolynomial::new();
        p.add([2, 1, 0, 2], 0.7);
        p.add([0, 0, 3, 1], 0.2);
        p.add([1, 1, 1, 1], 1.3);
        let s = p.expand();
        for &(g, f) in &[(0.1, 0.9), (0.5, 0.5), (0.0, 1.0), (0.8, 0.2)] {
            assert!((s.eval(g, f) - p.eval(g, f)).abs() < 1e-12);
        }
    }

    #[test]
    fn dominating_posynomial_bounds_from_above() {
        let mut p = BasisPolynomial::new();
        p.add([2, 1, 1, 0], 0.4);
        p.add([0, 2, 2, 1], 0.9);
        let d = p.dominating_posynomial();
        for &(g, f) in &[(0.01, 0.9), (0.5, 0.5), (0.3, 0.99), (0.9, 0.1)] {
            assert!(d.eval(g, f) >= p.eval(g, f));
        }
        // Tight at g = f = 1/2.
        assert!((d.eval(0.5, 0.5) - p.eval(0.5, 0.5)).abs() < 1e-12);
    }
}
