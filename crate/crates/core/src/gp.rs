//! Two-variable geometric programming and arithmetic-geometric mean
//! condensation of signomial constraints.
//!
//! Programs are solved in log coordinates `p = ln g`, `q = ln f`, where
//! every posynomial constraint becomes a convex log-sum-exp function. The
//! solver is a standard log-barrier method with damped Newton steps; the
//! 2-3 dimensional linear systems are solved directly.

use crate::error::{Error, Result};

/// `coef * g^exp_g * f^exp_f` with `coef > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub exp_g: f64,
    pub exp_f: f64,
}

impl Monomial {
    pub fn eval(&self, g: f64, f: f64) -> f64 {
        self.coef * g.powf(self.exp_g) * f.powf(self.exp_f)
    }

    fn ln_coef(&self) -> f64 {
        self.coef.ln()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Posynomial {
    pub terms: Vec<Monomial>,
}

impl Posynomial {
    pub fn new(terms: Vec<Monomial>) -> Self {
        Self { terms: terms.into_iter().filter(|t| t.coef > 0.0).collect() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![Monomial { coef: c, exp_g: 0.0, exp_f: 0.0 }])
    }

    pub fn eval(&self, g: f64, f: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(g, f)).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.terms.iter().map(|t| Monomial { coef: t.coef * s, ..*t }).collect())
    }

    pub fn plus(&self, other: &Posynomial) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::new(terms)
    }

    /// Every term divided by `m`.
    pub fn divided_by(&self, m: &Monomial) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| Monomial { coef: t.coef / m.coef, exp_g: t.exp_g - m.exp_g, exp_f: t.exp_f - m.exp_f })
                .collect(),
        )
    }

    /// `ln P` with gradient and Hessian in log coordinates.
    fn lse(&self, x: [f64; 2]) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let z: Vec<f64> = self.terms.iter().map(|t| t.ln_coef() + t.exp_g * x[0] + t.exp_f * x[1]).collect();
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = z.iter().map(|zi| (zi - m).exp()).collect();
        let s: f64 = w.iter().sum();
        let val = m + s.ln();
        let mut grad = [0.0; 2];
        let mut second = [[0.0; 2]; 2];
        for (t, wi) in self.terms.iter().zip(&w) {
            let p = wi / s;
            let a = [t.exp_g, t.exp_f];
            for i in 0..2 {
                grad[i] += p * a[i];
                for j in 0..2 {
                    second[i][j] += p * a[i] * a[j];
                }
            }
        }
        let mut hess = second;
        for i in 0..2 {
            for j in 0..2 {
                hess[i][j] -= grad[i] * grad[j];
            }
        }
        (val, grad, hess)
    }
}

/// Result of condensing a posynomial into a monomial at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedMonomial {
    pub monomial: Monomial,
    /// Share of each term at the expansion point; sums to one.
    pub weights: Vec<f64>,
}

/// Best local monomial lower bound `prod (u_i / nu_i)^nu_i` of a posynomial,
/// exact at `(g, f)`.
pub fn condense_agm(p: &Posynomial, g: f64, f: f64) -> CondensedMonomial {
    let vals: Vec<f64> = p.terms.iter().map(|t| t.eval(g, f)).collect();
    let total: f64 = vals.iter().sum();
    let weights: Vec<f64> = vals.iter().map(|v| v / total).collect();
    let mut ln_c = 0.0;
    let mut exp_g = 0.0;
    let mut exp_f = 0.0;
    for (t, &nu) in p.terms.iter().zip(&weights) {
        if nu > 0.0 {
            ln_c += nu * (t.coef.ln() - nu.ln());
            exp_g += nu * t.exp_g;
            exp_f += nu * t.exp_f;
        }
    }
    CondensedMonomial { monomial: Monomial { coef: ln_c.exp(), exp_g, exp_f }, weights }
}

/// Signomial constraint `pos - neg <= cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignomialConstraint {
    pub pos: Posynomial,
    pub neg: Posynomial,
    pub cap: f64,
}

impl SignomialConstraint {
    /// `1 + neg / cap`, the denominator of the equivalent ratio form.
    pub fn denominator(&self) -> Posynomial {
        Posynomial::constant(1.0).plus(&self.neg.scaled(1.0 / self.cap))
    }

    pub fn value(&self, g: f64, f: f64) -> f64 {
        self.pos.eval(g, f) - self.neg.eval(g, f)
    }

    pub fn true_slack(&self, g: f64, f: f64) -> f64 {
        self.cap - self.value(g, f)
    }

    pub fn ratio_slack(&self, g: f64, f: f64) -> f64 {
        self.cap - self.pos.eval(g, f) / self.denominator().eval(g, f)
    }

    /// GP-compatible restriction built at `(g, f)`.
    pub fn condense(&self, g: f64, f: f64) -> CondensedConstraint {
        let c = condense_agm(&self.denominator(), g, f);
        CondensedConstraint { numerator: self.pos.clone(), monomial: c.monomial, weights: c.weights, cap: self.cap, point: (g, f) }
    }
}

/// `numerator / monomial <= cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedConstraint {
    pub numerator: Posynomial,
    pub monomial: Monomial,
    pub weights: Vec<f64>,
    pub cap: f64,
    pub point: (f64, f64),
}

impl CondensedConstraint {
    pub fn as_posynomial(&self) -> Posynomial {
        self.numerator.divided_by(&self.monomial)
    }

    pub fn slack(&self, g: f64, f: f64) -> f64 {
        self.cap - self.as_posynomial().eval(g, f)
    }
}

/// Slacks along the chain condensed => ratio => true signomial constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainReport {
    pub condensed: f64,
    pub ratio: f64,
    pub original: f64,
}

impl ChainReport {
    /// The implication holds up to `tol`: a satisfied condensed constraint
    /// must not be looser than the constraints it restricts.
    pub fn consistent(&self, tol: f64) -> bool {
        if self.condensed >= -tol {
            self.ratio >= -tol && self.original >= -tol && self.ratio + tol >= self.condensed
        } else {
            true
        }
    }
}

pub fn verify_feasibility_chain(
    constraint: &SignomialConstraint,
    condensed: &CondensedConstraint,
    g: f64,
    f: f64,
) -> ChainReport {
    ChainReport {
        condensed: condensed.slack(g, f),
        ratio: constraint.ratio_slack(g, f),
        original: constraint.true_slack(g, f),
    }
}

/// `min objective(g, f)` s.t. `constraints_j(g, f) <= cap_j`, `lower <= g, f <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GpProblem {
    pub objective: Posynomial,
    pub constraints: Vec<(Posynomial, f64)>,
    pub lower: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpSolution {
    pub g: f64,
    pub f: f64,
    pub objective: f64,
    /// Stationarity residual of the log-coordinate Lagrangian.
    pub kkt_residual: f64,
    /// Multipliers of the posynomial constraints, in input order.
    pub duals: Vec<f64>,
    /// `cap_j - constraint_j(g, f)` in input order.
    pub slacks: Vec<f64>,
}

/// Convex function in log coordinates with value, gradient and Hessian.
enum Cons<'a> {
    Lse(&'a Posynomial, f64),
    /// `sign * x[axis] + offset <= 0`.
    Linear { axis: usize, sign: f64, offset: f64 },
}

impl Cons<'_> {
    fn eval(&self, x: [f64; 2]) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        match self {
            Cons::Lse(p, cap) => {
                let (v, g, h) = p.lse(x);
                (v - cap.ln(), g, h)
            }
            Cons::Linear { axis, sign, offset } => {
                let mut g = [0.0; 2];
                g[*axis] = *sign;
                (sign * x[*axis] + offset, g, [[0.0; 2]; 2])
            }
        }
    }
}

fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let m = a[row][col] / a[col][col];
            let (top, bottom) = a.split_at_mut(row);
            for (x, &p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= m * p;
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Barrier minimisation of `tau * obj(z) - sum ln(-c_j(z))` over `z` in
/// dimension `dim`, where `eval` returns `(obj, grad, hess)` and the list of
/// constraint `(value, grad, hess)` triples.
type Eval<'a> = dyn Fn(&[f64]) -> ((f64, Vec<f64>, Vec<Vec<f64>>), Vec<(f64, Vec<f64>, Vec<Vec<f64>>)>) + 'a;

fn barrier_solve(eval: &Eval, mut z: Vec<f64>, stop: impl Fn(&[f64]) -> bool) -> (Vec<f64>, f64) {
    let dim = z.len();
    let phi = |z: &[f64], tau: f64| -> Option<f64> {
        let ((o, _, _), cs) = eval(z);
        let mut v = tau * o;
        for (c, _, _) in cs {
            // Also rejects NaN.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(c < 0.0) {
                return None;
            }
            v -= (-c).ln();
        }
        Some(v)
    };
    let ncons = eval(&z).1.len() as f64;
    let mut tau = 1.0;
    loop {
        for _ in 0..200 {
            let ((_, og, oh), cs) = eval(&z);
            let mut grad: Vec<f64> = og.iter().map(|v| tau * v).collect();
            let mut hess: Vec<Vec<f64>> = oh.iter().map(|r| r.iter().map(|v| tau * v).collect()).collect();
            for (c, cg, ch) in &cs {
                let s = -c;
                for i in 0..dim {
                    grad[i] += cg[i] / s;
                    for j in 0..dim {
                        hess[i][j] += cg[i] * cg[j] / (s * s) + ch[i][j] / s;
                    }
                }
            }
            for (i, row) in hess.iter_mut().enumerate() {
                row[i] += 1e-14 * (1.0 + row[i].abs());
            }
            let step = match solve_linear(hess, grad.iter().map(|v| -v).collect()) {
                Some(s) => s,
                None => break,
            };
            let decrement: f64 = -grad.iter().zip(&step).map(|(a, b)| a * b).sum::<f64>();
            if decrement / 2.0 < 1e-13 {
                break;
            }
            let base = phi(&z, tau).expect("iterate stays strictly feasible");
            let mut alpha = 1.0;
            let mut moved = false;
            while alpha > 1e-14 {
                let cand: Vec<f64> = z.iter().zip(&step).map(|(a, b)| a + alpha * b).collect();
                if let Some(v) = phi(&cand, tau) {
                    if v <= base - 0.25 * alpha * decrement {
                        z = cand;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }
        if stop(&z) || ncons / tau < 1e-10 {
            return (z, tau);
        }
        tau *= 10.0;
    }
}

/// Solves a two-variable GP from a starting guess `(g0, f0)`.
pub fn solve_gp_2var(problem: &GpProblem, g0: f64, f0: f64) -> Result<GpSolution> {
    let lo = problem.lower.ln();
    let mut cons: Vec<Cons> = problem.constraints.iter().map(|(p, cap)| Cons::Lse(p, *cap)).collect();
    for axis in 0..2 {
        cons.push(Cons::Linear { axis, sign: 1.0, offset: 0.0 });
        cons.push(Cons::Linear { axis, sign: -1.0, offset: lo });
    }
    for (p, _) in &problem.constraints {
        if p.terms.is_empty() {
            return Err(Error::InvalidConfig("empty posynomial constraint".into()));
        }
    }
    let clamp = |v: f64| v.clamp(problem.lower, 1.0).ln();
    let x0 = [clamp(g0), clamp(f0)];
    let interior = |x: [f64; 2]| cons.iter().all(|c| c.eval(x).0 < -1e-12);

    let start = if interior(x0) {
        x0
    } else {
        // Phase I: minimise s subject to c_j(x) <= s, nudging x0 off the box.
        let x0 = [x0[0].clamp(lo + 1e-9, -1e-9), x0[1].clamp(lo + 1e-9, -1e-9)];
        let s0 = cons.iter().map(|c| c.eval(x0).0).fold(f64::NEG_INFINITY, f64::max) + 1.0;
        let eval = |z: &[f64]| {
            let x = [z[0], z[1]];
            let obj = (z[2], vec![0.0, 0.0, 1.0], vec![vec![0.0; 3]; 3]);
            let mut list: Vec<(f64, Vec<f64>, Vec<Vec<f64>>)> = cons
                .iter()
                .map(|c| {
                    let (v, g, h) = c.eval(x);
                    (v - z[2], vec![g[0], g[1], -1.0], vec![vec![h[0][0], h[0][1], 0.0], vec![h[1][0], h[1][1], 0.0], vec![0.0; 3]])
                })
                .collect();
            // Keeps the auxiliary variable bounded below.
            list.push((-1.0 - z[2], vec![0.0, 0.0, -1.0], vec![vec![0.0; 3]; 3]));
            (obj, list)
        };
        let (z, _) = barrier_solve(&eval, vec![x0[0], x0[1], s0], |z| z[2] < -1e-6);
        let x = [z[0], z[1]];
        if !interior(x) {
            return Err(Error::Infeasible("geometric program has no strictly feasible point".into()));
        }
        x
    };

    let eval = |z: &[f64]| {
        let x = [z[0], z[1]];
        let (v, g, h) = problem.objective.lse(x);
        let list = cons
            .iter()
            .map(|c| {
                let (v, g, h) = c.eval(x);
                (v, g.to_vec(), h.iter().map(|r| r.to_vec()).collect())
            })
            .collect();
        ((v, g.to_vec(), h.iter().map(|r| r.to_vec()).collect()), list)
    };
    let (z, tau) = barrier_solve(&eval, start.to_vec(), |_| false);
    let x = [z[0], z[1]];
    let (_, og, _) = problem.objective.lse(x);
    let mut stat = og;
    let mut duals = Vec::new();
    for c in &cons {
        let (v, g, _) = c.eval(x);
        let lam = 1.0 / (tau * -v);
        for i in 0..2 {
            stat[i] += lam * g[i];
        }
        duals.push(lam);
    }
    duals.truncate(problem.constraints.len());
    let (g, f) = (x[0].exp(), x[1].exp());
    Ok(GpSolution {
        g,
        f,
        objective: problem.objective.eval(g, f),
        kkt_residual: stat[0].abs().max(stat[1].abs()),
        duals,
        slacks: problem.constraints.iter().map(|(p, cap)| cap - p.eval(g, f)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(coef: f64, exp_g: f64, exp_f: f64) -> Monomial {
        Monomial { coef, exp_g, exp_f }
    }

    #[test]
    fn agm_bound_is_exact_at_point_and_below_elsewhere() {
        let p = Posynomial::new(vec![mono(1.0, 0.0, 0.0), mono(0.3, 1.0, 2.0), mono(2.0, -1.0, 0.5)]);
        let c = condense_agm(&p, 0.4, 0.7);
        assert!((c.monomial.eval(0.4, 0.7) / p.eval(0.4, 0.7) - 1.0).abs() < 1e-12);
        assert!((c.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        for i in 1..40 {
            for j in 1..40 {
                let (g, f) = (i as f64 / 40.0, j as f64 / 40.0);
                assert!(c.monomial.eval(g, f) <= p.eval(g, f) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn single_active_monomial_constraint() {
        // min f s.t. 4 f^-1 <= 10  =>  f = 0.4.
        let problem = GpProblem {
            objective: Posynomial::new(vec![mono(1.0, 0.0, 1.0)]),
            constraints: vec![(Posynomial::new(vec![mono(4.0, 0.0, -1.0)]), 10.0)],
            lower: 1e-3,
        };
        let s = solve_gp_2var(&problem, 0.9, 0.9).unwrap();
        assert!((s.f - 0.4).abs() < 1e-6, "{s:?}");
        assert!(s.slacks[0] >= -1e-8);
        assert!(s.kkt_residual < 1e-6);
    }

    #[test]
    fn detects_infeasibility() {
        let problem = GpProblem {
            objective: Posynomial::new(vec![mono(1.0, 1.0, 0.0)]),
            constraints: vec![(Posynomial::new(vec![mono(5.0, 1.0, 1.0)]), 1e-9)],
            lower: 1e-3,
        };
        assert!(solve_gp_2var(&problem, 0.5, 0.5).is_err());
    }

    #[test]
    fn phase_one_from_infeasible_guess() {
        // min g + f s.t. 0.05 g^-1 f^-1 <= 1, start far outside.
        let problem = GpProblem {
            objective: Posynomial::new(vec![mono(1.0, 1.0, 0.0), mono(1.0, 0.0, 1.0)]),
            constraints: vec![(Posynomial::new(vec![mono(0.05, -1.0, -1.0)]), 1.0)],
            lower: 1e-3,
        };
        let s = solve_gp_2var(&problem, 0.01, 0.01).unwrap();
        let want = 0.05f64.sqrt();
        assert!((s.g - want).abs() < 1e-5 && (s.f - want).abs() < 1e-5, "{s:?}");
    }
}
