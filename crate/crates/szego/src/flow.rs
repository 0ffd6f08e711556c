//! Cubic Szegő flow in spectral coordinates.
//!
//! Along `i u_t = P₊(|u|²u)` the data move linearly:
//! `φ_j(t) = φ_j(0) + λ_j² t` and `Re ω_j(t) = Re ω_j(0) + λ_j⁴ν_j⁴ t/2π`,
//! everything else being conserved. The symbol at time `t` is therefore
//! obtained by one inverse reconstruction, with no time stepping. The
//! finite-difference residual of the equation serves as an independent
//! check, and Sobolev norms along the flow diagnose growth.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::Serialize;

use crate::blaschke::{level_b, BlaschkeProduct};
use crate::error::{Result, SzegoError};
use crate::hankel::HankelOperator;
use crate::inverse::{reconstruct_u, InverseSolution, Level, SpectralData};
use crate::quadrature::graded_rule;
use crate::rational::RationalFunction;
use crate::{c64, C64};

/// Half-width of the quadrature window of [`flow_residual`].
pub const RESIDUAL_WINDOW: f64 = 1e3;
const RESIDUAL_PANELS: usize = 128;
const RESIDUAL_ORDER: usize = 16;

/// Spectral data advanced by time `t`.
pub fn evolve(sd: &SpectralData, t: f64) -> SpectralData {
    let levels = sd
        .levels
        .iter()
        .map(|l| {
            let nu_sq = l.nu_sq();
            let l2 = l.lambda * l.lambda;
            Level {
                lambda: l.lambda,
                phi: l.phi + l2 * t,
                omega: l.omega + l2 * l2 * nu_sq * nu_sq * t / (2.0 * PI),
                b: l.b.clone(),
            }
        })
        .collect();
    SpectralData { levels }
}

/// A point on a flow line, stored as initial data plus elapsed time so that
/// composition is addition of times.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    sd0: SpectralData,
    t: f64,
}

impl FlowState {
    pub fn new(sd0: SpectralData) -> Result<Self> {
        sd0.validate()?;
        Ok(Self { sd0, t: 0.0 })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn initial(&self) -> &SpectralData {
        &self.sd0
    }

    /// The state `s` time units later.
    pub fn advance(&self, s: f64) -> Self {
        Self { sd0: self.sd0.clone(), t: self.t + s }
    }

    pub fn data(&self) -> SpectralData {
        evolve(&self.sd0, self.t)
    }

    pub fn symbol(&self) -> Result<RationalFunction> {
        reconstruct_u(&self.data())
    }
}

/// `P₊(|u|²u)` written as `u·H_u u + H_u² u`, with both Hankel actions taken
/// on coordinates in `K_θ`.
pub fn szego_rhs(u: &RationalFunction) -> Result<RationalFunction> {
    if u.trimmed(1e-14).poles().is_empty() && u.poly().is_zero() {
        return Ok(RationalFunction::zero());
    }
    let h = HankelOperator::build(u)?;
    let hu = h.apply(h.symbol_coords());
    let h2u = h.apply(&hu);
    let space = h.space();
    Ok(h.symbol().mul(&space.from_coords(&hu)).add(&space.from_coords(&h2u)))
}

/// `P₊(u ū u)` by plain rational algebra.
pub fn szego_rhs_direct(u: &RationalFunction) -> Result<RationalFunction> {
    u.mul(&u.conj_reflect()).mul(u).hardy_project()
}

/// `P₊(|u|²u)(x)` from the data alone:
/// `u(x)·(1/2πi)⟨Q⁻¹λ², 𝟙⟩ + (1/2πi)⟨Q⁻¹λ³e^{-iφ}, 𝟙⟩`.
pub fn szego_rhs_spectral(sol: &InverseSolution, x: C64) -> Result<C64> {
    let sd = sol.data();
    let n = sd.len();
    let l2 = DVector::from_iterator(n, sd.levels.iter().map(|l| c64(l.lambda * l.lambda, 0.0)));
    let l3 = DVector::from_iterator(n, sd.levels.iter().map(|l| C64::from_polar(l.lambda.powi(3), -l.phi)));
    Ok(sol.eval_u(x)? * sol.eval_functional(x, &l2)? + sol.eval_functional(x, &l3)?)
}

/// `‖i(u_{t+h} - u_{t-h})/2h - P₊(|u_t|²u_t)‖` in `L²(ℝ)`.
///
/// The integral over `[-R, R]` uses a composite Gauss rule graded towards
/// the poles of the three symbols; the two tails are estimated by
/// `|D(±R)|² R`, exact for `1/x` decay.
pub fn flow_residual(sd: &SpectralData, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(SzegoError::InvalidInput("flow residual step must be positive".into()));
    }
    if sd.is_empty() {
        return Ok(0.0);
    }
    let up = reconstruct_u(&evolve(sd, t + h))?;
    let um = reconstruct_u(&evolve(sd, t - h))?;
    let u0 = reconstruct_u(&evolve(sd, t))?;
    let rhs = szego_rhs(&u0)?;
    let i2h = c64(0.0, 1.0 / (2.0 * h));
    let defect = |x: C64| (up.eval(x) - um.eval(x)) * i2h - rhs.eval(x);
    let singular: Vec<(f64, f64)> = [&up, &um, &u0]
        .iter()
        .flat_map(|u| u.poles().iter().map(|p| (p.z.re, p.z.im.abs())))
        .collect();
    let r = RESIDUAL_WINDOW;
    let rule = graded_rule(r, RESIDUAL_PANELS, RESIDUAL_ORDER, &singular);
    let mut acc: f64 = rule.iter().map(|&(x, w)| w * defect(c64(x, 0.0)).norm_sqr()).sum();
    acc += (defect(c64(r, 0.0)).norm_sqr() + defect(c64(-r, 0.0)).norm_sqr()) * r;
    Ok(acc.sqrt())
}

/// `(‖u‖, ‖u'‖)` in `L²(ℝ)` by residues.
pub fn h1_norm(u: &RationalFunction) -> Result<(f64, f64)> {
    Ok((u.l2_norm()?, u.derivative().l2_norm()?))
}

/// The conserved norm `‖u(t)‖ = (Σ λ_j² ν_j²)^{1/2}`.
pub fn conserved_l2(sd: &SpectralData) -> f64 {
    sd.levels
        .iter()
        .map(|l| l.lambda * l.lambda * l.nu_sq())
        .sum::<f64>()
        .sqrt()
}

/// Norms along a flow line.
#[derive(Clone, Debug, Default, Serialize)]
pub struct GrowthSeries {
    pub times: Vec<f64>,
    pub l2_norms: Vec<f64>,
    /// `‖∂ₓu(t)‖`.
    pub dx_norms: Vec<f64>,
    /// Full `H¹` norm `(‖u‖² + ‖∂ₓu‖²)^{1/2}`.
    pub h1_norms: Vec<f64>,
    /// Relative drift of `‖u(t)‖` from its conserved value.
    pub residuals: Vec<f64>,
}

impl GrowthSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Indices of the top decade `t ≥ t_max/10`.
    fn top_decade(&self) -> Vec<usize> {
        let tmax = self.times.last().copied().unwrap_or(0.0);
        (0..self.len()).filter(|&k| self.times[k] >= tmax / 10.0).collect()
    }

    /// Least-squares slope of `log ‖∂ₓu‖` against `log t` on the top decade.
    pub fn slope(&self) -> f64 {
        let idx = self.top_decade();
        let pts: Vec<(f64, f64)> = idx
            .iter()
            .map(|&k| (self.times[k].ln(), self.dx_norms[k].ln()))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }

    /// `max ‖∂ₓu‖ / min ‖∂ₓu‖` over the whole series.
    pub fn dx_spread(&self) -> f64 {
        let max = self.dx_norms.iter().copied().fold(0.0, f64::max);
        let min = self.dx_norms.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// `(min, max)` of `‖∂ₓu(t)‖/t` on the top decade.
    pub fn growth_band(&self) -> (f64, f64) {
        self.top_decade()
            .iter()
            .map(|&k| self.dx_norms[k] / self.times[k])
            .fold((f64::INFINITY, 0.0), |(lo, hi), r| (lo.min(r), hi.max(r)))
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// `n` log-spaced times from `t_min` to `t_max`.
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0) || !(t_max > t_min) || n < 2 {
        return Err(SzegoError::InvalidInput("need 0 < t_min < t_max and at least two points".into()));
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    Ok((0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect())
}

/// Norms of `u(t)` on the grid. Grid points are independent and are split
/// across threads.
pub fn turbulence_scan(sd: &SpectralData, t_grid: &[f64]) -> Result<GrowthSeries> {
    sd.validate()?;
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SzegoError::InvalidInput("time grid must be strictly increasing".into()));
    }
    let l2_ref = conserved_l2(sd);
    let point = |t: f64| -> Result<(f64, f64)> {
        let u = reconstruct_u(&evolve(sd, t))?;
        h1_norm(&u)
    };
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(t_grid.len().max(1));
    let chunk = t_grid.len().div_ceil(workers.max(1)).max(1);
    let results: Vec<Result<(f64, f64)>> = std::thread::scope(|s| {
        let handles: Vec<_> = t_grid
            .chunks(chunk)
            .map(|ts| s.spawn(move || ts.iter().map(|&t| point(t)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("scan worker panicked"))
            .collect()
    });
    let mut out = GrowthSeries::default();
    for (&t, r) in t_grid.iter().zip(results) {
        let (l2, dx) = r?;
        out.times.push(t);
        out.l2_norms.push(l2);
        out.dx_norms.push(dx);
        out.h1_norms.push(l2.hypot(dx));
        out.residuals.push(if l2_ref > 0.0 { (l2 - l2_ref).abs() / l2_ref } else { l2 });
    }
    Ok(out)
}

/// Appends the level `(λ = ε, φ = 0, ω = i)` carried by the doubled factor
/// `((x - i)/(x + i))²`, whose `b` is `-(ε/√4π)/x`.
pub fn perturb(sd: &SpectralData, eps: f64) -> Result<SpectralData> {
    sd.validate()?;
    let min_lambda = sd.levels.iter().map(|l| l.lambda).fold(f64::INFINITY, f64::min);
    if !(eps > 0.0) || !(eps < min_lambda) {
        return Err(SzegoError::InvalidInput(format!(
            "perturbation needs 0 < ε < min λ = {min_lambda}"
        )));
    }
    let psi = BlaschkeProduct::new(vec![c64(0.0, 1.0), c64(0.0, 1.0)])?;
    let nu_sq = (4.0 * PI).sqrt() / eps;
    let mut out = sd.clone();
    out.levels.push(Level { lambda: eps, phi: 0.0, omega: c64(0.0, 1.0), b: level_b(&psi, nu_sq)? });
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::HerglotzData;

    fn worked() -> SpectralData {
        SpectralData {
            levels: vec![Level { lambda: 1.0, phi: 0.0, omega: c64(0.0, 1.0 / (4.0 * PI)), b: HerglotzData::zero() }],
        }
    }

    #[test]
    fn unit_time_step_of_worked_data() {
        let l = &evolve(&worked(), 1.0).levels[0];
        assert_eq!(l.phi, 1.0);
        assert!((l.omega - c64(1.0 / (2.0 * PI), 1.0 / (4.0 * PI))).norm() < 1e-16);
    }

    #[test]
    fn rhs_routes_agree_on_worked_symbol() {
        let u = reconstruct_u(&worked()).unwrap();
        let a = szego_rhs(&u).unwrap();
        let b = szego_rhs_direct(&u).unwrap();
        assert_eq!(a.poles().len(), 1);
        assert_eq!(a.poles()[0].order(), 2);
        assert!(a.sub(&b).l2_norm().unwrap() < 1e-10 * b.l2_norm().unwrap());
    }

    #[test]
    fn perturbation_level() {
        let p = perturb(&worked(), 0.1).unwrap();
        let b = &p.levels[1].b;
        assert!(b.poles[0].abs() < 1e-12);
        assert!((b.residues[0] - 0.1 / (4.0 * PI).sqrt()).abs() < 1e-12);
        assert!(perturb(&worked(), 1.0).is_err());
    }
}
