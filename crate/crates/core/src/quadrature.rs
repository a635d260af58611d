//! Gauss-Hermite rule for expectations over a standard normal variable.

/// Nodes and weights with `sum_j w_j g(z_j) ~= E[g(Z)]`, `Z ~ N(0, 1)`.
///
/// The weights sum to one, so a constant integrand is reproduced exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds an `n`-point rule by Newton iteration on the physicists' Hermite
    /// polynomial, then rescales to the probabilists' normalisation.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        let pim4 = std::f64::consts::PI.powf(-0.25);
        let mut x_phys = vec![0.0; n];
        let mut w_phys = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        let mut z = 0.0_f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x_phys[0],
                3 => 1.91 * z - 0.91 * x_phys[1],
                _ => 2.0 * z - x_phys[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x_phys[i] = z;
            x_phys[n - 1 - i] = -z;
            w_phys[i] = 2.0 / (pp * pp);
            w_phys[n - 1 - i] = w_phys[i];
        }
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut nodes: Vec<f64> = x_phys.iter().map(|x| x * sqrt2).collect();
        let mut weights: Vec<f64> = w_phys.iter().map(|w| w / sqrt_pi).collect();
        // Normalise away the residual rounding so that sum(w) == 1 to the last ulp.
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        nodes.reverse();
        weights.reverse();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E[g(Z)]` under the rule.
    pub fn expect(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * g(z))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_normal_moments() {
        for &n in &[2usize, 5, 16, 64, 128] {
            let gh = GaussHermite::new(n);
            assert!((gh.expect(|_| 1.0) - 1.0).abs() < 1e-14);
            assert!(gh.expect(|z| z).abs() < 1e-12);
            assert!((gh.expect(|z| z * z) - 1.0).abs() < 1e-12);
            if n >= 3 {
                assert!((gh.expect(|z| z.powi(4)) - 3.0).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn nodes_sorted_and_symmetric() {
        let gh = GaussHermite::new(64);
        for w in gh.nodes().windows(2) {
            assert!(w[0] < w[1]);
        }
        for i in 0..32 {
            assert!((gh.nodes()[i] + gh.nodes()[63 - i]).abs() < 1e-12);
        }
        assert!(gh.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn smooth_expectation() {
        // E[exp(Z)] = exp(1/2).
        let gh = GaussHermite::new(32);
        assert!((gh.expect(f64::exp) - 0.5_f64.exp()).abs() < 1e-13);
    }
}
