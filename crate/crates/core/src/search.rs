//! One-dimensional search helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimisation of `f` on `[a, b]`. Returns every point it
/// evaluated so callers can apply their own acceptance rule.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, iters: usize) -> Vec<(f64, f64)> {
    let (mut a, mut b) = (a, b);
    let mut seen = Vec::with_capacity(iters + 2);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    seen.push((c, fc));
    seen.push((d, fd));
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            seen.push((c, fc));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            seen.push((d, fd));
        }
    }
    seen
}

/// Smallest evaluated point, ties going to the larger abscissa.
pub fn argmin(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    points
        .iter()
        .copied()
        .filter(|p| p.1.is_finite())
        .min_by(|x, y| x.1.total_cmp(&y.1).then(y.0.total_cmp(&x.0)))
}

/// `n` evenly spaced points covering `[a, b]`; a single point when `a == b`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 || a == b {
        return vec![b];
    }
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}
