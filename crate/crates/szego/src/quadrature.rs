//! Gauss–Legendre rules and composite panels on the real line.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Roots of `P_n` are found by Newton's method from the Chebyshev-like
/// initial guesses `cos(π(k - 1/4)/(n + 1/2))`, with `P_n` and `P_n'` from
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n.div_ceil(2) {
        let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule on `[-r, r]`: `panels` Gauss panels of `order` nodes each.
///
/// Breakpoints equidistribute the density
/// `ρ(x) = 1/(1 + |x|) + Σ_k 1/(|x - s_k| + d_k)` for the given singularity
/// locations `s_k + i·(±d_k)`, so panels shrink near poles close to the real
/// axis and grow geometrically in the far field.
pub fn graded_rule(r: f64, panels: usize, order: usize, singular: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let cum = |x: f64| -> f64 {
        let mut f = x.signum() * x.abs().ln_1p();
        for &(s, d) in singular {
            let d = d.max(1e-12);
            f += (x - s).signum() * ((x - s).abs() / d).ln_1p();
        }
        f
    };
    let (f0, f1) = (cum(-r), cum(r));
    let mut breaks = Vec::with_capacity(panels + 1);
    breaks.push(-r);
    for k in 1..panels {
        let target = f0 + (f1 - f0) * k as f64 / panels as f64;
        let (mut lo, mut hi) = (-r, r);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cum(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
                break;
            }
        }
        breaks.push(0.5 * (lo + hi));
    }
    breaks.push(r);
    let (x, w) = gauss_legendre(order);
    let mut out = Vec::with_capacity(panels * order);
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (xi, wi) in x.iter().zip(&w) {
            out.push((c + h * xi, h * wi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_point_rule_integrates_degree_nine() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn graded_rule_resolves_near_pole() {
        // ∫ dx/((x-1)² + d²) over [-R, R] ≈ π/d.
        let d = 1e-3;
        let r = 1e3;
        let rule = graded_rule(r, 128, 16, &[(1.0, d)]);
        let s: f64 = rule.iter().map(|&(x, w)| w / ((x - 1.0).powi(2) + d * d)).sum();
        let exact = ((r - 1.0) / d).atan() / d + ((r + 1.0) / d).atan() / d;
        assert!((s - exact).abs() < 1e-10 * exact);
    }
}
