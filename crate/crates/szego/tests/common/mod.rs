//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use szego::{c64, BlaschkeProduct, HerglotzData, Level, RationalFunction, SpectralData, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random spectral data with `n` levels; each level carries up to
/// `max_extra` Herglotz poles, so its dimension is at most `1 + max_extra`.
pub fn random_data(rng: &mut impl Rng, n: usize, max_extra: usize) -> SpectralData {
    let mut lambdas: Vec<f64> = Vec::with_capacity(n);
    let mut lam = rng.gen_range(1.5..3.0);
    for _ in 0..n {
        lambdas.push(lam);
        lam *= rng.gen_range(0.45..0.8);
    }
    let levels = lambdas
        .into_iter()
        .map(|lambda| {
            let extra = rng.gen_range(0..=max_extra);
            let mut poles: Vec<f64> = Vec::new();
            while poles.len() < extra {
                let a = rng.gen_range(-2.0..2.0);
                if poles.iter().all(|&p: &f64| (p - a).abs() > 0.3) {
                    poles.push(a);
                }
            }
            let residues = (0..extra).map(|_| rng.gen_range(0.2..1.5)).collect();
            Level {
                lambda,
                phi: rng.gen_range(-PI..PI),
                omega: c64(rng.gen_range(-0.3..0.3), rng.gen_range(0.03..0.4)),
                b: HerglotzData::new(poles, residues, 0.0).unwrap(),
            }
        })
        .collect();
    SpectralData { levels }
}

/// Random Hardy symbol of pole degree `deg`; with `double` one pole is
/// doubled.
pub fn random_symbol(rng: &mut impl Rng, deg: usize, double: bool) -> RationalFunction {
    let mut u = RationalFunction::zero();
    let mut placed: Vec<C64> = Vec::new();
    let mut remaining = deg;
    while remaining > 0 {
        let z = c64(rng.gen_range(-2.0..2.0), -rng.gen_range(0.3..1.5));
        if placed.iter().any(|p| (p - z).norm() < 0.4) {
            continue;
        }
        placed.push(z);
        let order = if double && remaining >= 2 && placed.len() == 1 { 2 } else { 1 };
        for k in 1..=order {
            let c = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let c = if k == order && c.norm() < 0.2 { c + c64(0.5, 0.0) } else { c };
            u = u.add(&RationalFunction::pole(z, k, c));
        }
        remaining -= order;
    }
    u
}

/// Random normalized Blaschke product of the given degree.
pub fn random_blaschke(rng: &mut impl Rng, deg: usize) -> BlaschkeProduct {
    let zeros = (0..deg)
        .map(|_| c64(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0)))
        .collect();
    BlaschkeProduct::new(zeros).unwrap()
}

/// Real probe grid plus a few points in the upper half-plane.
pub fn probe_grid() -> Vec<C64> {
    let mut out: Vec<C64> = (0..64).map(|k| c64(-8.0 + 16.0 * k as f64 / 63.0 + 0.013, 0.0)).collect();
    out.extend((0..16).map(|k| c64(-3.0 + 0.4 * k as f64, 0.5)));
    out
}

/// `max |f - g| / max |g|` over the probe grid.
pub fn sup_rel_error(f: &RationalFunction, g: &RationalFunction) -> f64 {
    let grid = probe_grid();
    let num = grid.iter().map(|&x| (f.eval(x) - g.eval(x)).norm()).fold(0.0, f64::max);
    let den = grid.iter().map(|&x| g.eval(x).norm()).fold(0.0, f64::max);
    num / den
}

/// Simple-spectrum data whose symbol is spatially wide: `ν² ∈ [10⁴, 4·10⁴]`
/// puts the poles far from the real axis, so `‖u'‖` is small and the growth
/// injected by a small perturbation level is visible on `t ≤ 10⁴`.
pub fn random_wide_simple_data(rng: &mut impl Rng, n: usize) -> SpectralData {
    let mut lam = rng.gen_range(0.35..0.5);
    let levels = (0..n)
        .map(|_| {
            let lambda = lam;
            lam *= rng.gen_range(0.6..0.8);
            let nu_sq: f64 = rng.gen_range(1.0e4..4.0e4);
            let im = (lambda * nu_sq).powi(2) / (4.0 * PI);
            Level {
                lambda,
                phi: rng.gen_range(-PI..PI),
                omega: c64(im * rng.gen_range(-0.3..0.3), im),
                b: HerglotzData::zero(),
            }
        })
        .collect();
    SpectralData { levels }
}

/// Adaptive Simpson quadrature of a complex integrand on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> C64, a: f64, b: f64, tol: f64) -> C64 {
    fn step(f: &dyn Fn(f64) -> C64, a: f64, b: f64, fa: C64, fm: C64, fb: C64, whole: C64, tol: f64, depth: u32) -> C64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
        let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫ f conj g` over the real line: adaptive Simpson on `[-10⁴, 10⁴]`,
/// split at the real parts of the poles, plus the tail `2 a conj(b)/R`
/// from the leading `1/x` coefficients `a`, `b`.
pub fn quad_inner(f: &RationalFunction, g: &RationalFunction) -> C64 {
    let r = 1e4;
    let lead = |h: &RationalFunction| -> C64 { h.poles().iter().map(|p| p.coeffs[0]).sum() };
    let mut cuts: Vec<f64> = f.poles().iter().chain(g.poles()).map(|p| p.z.re).filter(|x| x.abs() < r).collect();
    cuts.extend([-r, r, -10.0, 10.0, -100.0, 100.0]);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let integrand = |x: f64| f.eval(c64(x, 0.0)) * g.eval(c64(x, 0.0)).conj();
    let body: C64 = cuts.windows(2).map(|w| adaptive_simpson(&integrand, w[0], w[1], 1e-13)).sum();
    body + lead(f) * lead(g).conj() * (2.0 / r)
}

/// `i κ (1 + ψ)/(1 - ψ)` at `x`, with `κ = Σ Im a_j`, evaluated pointwise.
pub fn herglotz_pointwise(psi: &BlaschkeProduct, x: C64) -> C64 {
    let kappa: f64 = psi.zeros().iter().map(|a| a.im).sum();
    let v = psi.eval(x);
    c64(0.0, kappa) * (c64(1.0, 0.0) + v) / (c64(1.0, 0.0) - v)
}

/// Largest difference between two Herglotz data sets of equal degree, in
/// poles, residues and constant; infinite when the degrees differ.
pub fn herglotz_distance(a: &HerglotzData, b: &HerglotzData) -> f64 {
    if a.degree() != b.degree() {
        return f64::INFINITY;
    }
    let pole = a.poles.iter().zip(&b.poles).map(|(x, y)| (x - y).abs());
    let res = a.residues.iter().zip(&b.residues).map(|(x, y)| (x - y).abs());
    pole.chain(res).fold((a.b - b.b).abs(), f64::max)
}
