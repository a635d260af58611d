//! Weak compositions and multinomial coefficients.

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `n! / (a_1! ... a_m!)` where `n = sum a_i`.
pub fn multinomial(parts: &[usize]) -> f64 {
    let n: usize = parts.iter().sum();
    parts.iter().fold(factorial(n), |acc, &a| acc / factorial(a))
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    multinomial(&[k, n - k])
}

/// Every vector of `parts` non-negative integers summing to `total`, in
/// lexicographic order.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; parts];
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for a in (0..=left).rev() {
            cur[pos] = a;
            rec(pos + 1, left - a, cur, out);
        }
    }
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, total, &mut cur, &mut out);
    out
}

/// Number of weak compositions, `C(total + parts - 1, parts - 1)`.
pub fn count_compositions(total: usize, parts: usize) -> usize {
    binomial(total + parts - 1, parts - 1).round() as usize
}
