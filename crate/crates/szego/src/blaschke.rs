//! Finite Blaschke products of the upper half-plane and their Herglotz data.
//!
//! A normalized product `ψ(x) = Π (x - a_j)/(x - conj a_j)` with zeros
//! `a_j ∈ ℂ₊` tends to `1` at infinity, so `1 - ψ` lies in the model space
//! `K_ψ`. Attached to `ψ` is the real rational Herglotz function
//!
//! `h(x) = i (‖1-ψ‖²/4π) (1+ψ)/(1-ψ) + (Λ2/Λ1 - Λ1/2) = x + Σ c_k/(α_k - x)`
//!
//! whose constant term vanishes and which is unchanged under Frostman shifts
//! of `ψ`. [`psi_from_b`] inverts the correspondence for a chosen
//! representative `(κ, B)` of the Frostman class.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SzegoError};
use crate::linalg;
use crate::rational::{
    canonical_cmp, cluster_roots, ComplexPolynomial, RationalFunction, Root, CLUSTER_TOL,
    MERGE_TOL,
};
use crate::C64;

const ONE: C64 = C64::new(1.0, 0.0);

/// Imaginary parts of computed Herglotz poles below this bound (relative to
/// `1 + |α|`) are snapped to zero.
pub const REAL_SNAP_TOL: f64 = 1e-9;

/// A real rational Herglotz function `B + Σ_k c_k/(α_k - x)` with real poles
/// and non-negative residues.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct HerglotzData {
    pub poles: Vec<f64>,
    pub residues: Vec<f64>,
    #[serde(rename = "B", default, skip_serializing_if = "is_zero")]
    pub b: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl HerglotzData {
    /// Validates and sorts the poles ascending.
    pub fn new(poles: Vec<f64>, residues: Vec<f64>, b: f64) -> Result<Self> {
        let d = Self { poles, residues, b };
        d.validate()?;
        Ok(d.canonical())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if self.poles.len() != self.residues.len() {
            return Err(SzegoError::InvalidInput(format!(
                "herglotz data has {} poles but {} residues",
                self.poles.len(),
                self.residues.len()
            )));
        }
        if self.poles.iter().chain(&self.residues).any(|v| !v.is_finite()) || !self.b.is_finite() {
            return Err(SzegoError::InvalidInput("herglotz data is not finite".into()));
        }
        if let Some(c) = self.residues.iter().find(|&&c| c < 0.0) {
            return Err(SzegoError::InvalidInput(format!("negative herglotz residue {c}")));
        }
        let mut sorted = self.poles.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[1] - w[0] <= MERGE_TOL * (1.0 + w[0].abs())) {
            return Err(SzegoError::InvalidInput("repeated herglotz pole".into()));
        }
        Ok(())
    }

    /// Poles sorted ascending with residues permuted alongside.
    pub fn canonical(&self) -> Self {
        let mut idx: Vec<usize> = (0..self.poles.len()).collect();
        idx.sort_by(|&i, &j| self.poles[i].total_cmp(&self.poles[j]));
        Self {
            // Adding 0.0 turns -0.0 into 0.0.
            poles: idx.iter().map(|&i| self.poles[i] + 0.0).collect(),
            residues: idx.iter().map(|&i| self.residues[i]).collect(),
            b: self.b,
        }
    }

    pub fn degree(&self) -> usize {
        self.poles.len()
    }

    pub fn eval(&self, x: C64) -> C64 {
        let mut s = C64::new(self.b, 0.0);
        for (&a, &c) in self.poles.iter().zip(&self.residues) {
            s += c / (a - x);
        }
        s
    }

    pub fn derivative(&self, x: C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (&a, &c) in self.poles.iter().zip(&self.residues) {
            let d = a - x;
            s += c / (d * d);
        }
        s
    }

    /// Multiplies residues and the constant by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            poles: self.poles.clone(),
            residues: self.residues.iter().map(|c| c * s).collect(),
            b: self.b * s,
        }
    }
}

/// Finite Blaschke product `phase · Π (x - a_j)/(x - conj a_j)` on the upper
/// half-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<C64>,
    phase: C64,
}

impl BlaschkeProduct {
    /// Normalized product (value `1` at infinity). Zeros are listed with
    /// repetition and must lie in the open upper half-plane.
    pub fn new(mut zeros: Vec<C64>) -> Result<Self> {
        if let Some(z) = zeros.iter().find(|z| !(z.im > 0.0) || !z.re.is_finite()) {
            return Err(SzegoError::InvalidInput(format!(
                "blaschke zero {z} is not in the upper half-plane"
            )));
        }
        for z in zeros.iter_mut() {
            z.re += 0.0;
        }
        zeros.sort_by(canonical_cmp);
        Ok(Self { zeros, phase: ONE })
    }

    /// Product with a unimodular constant factor.
    pub fn with_phase(zeros: Vec<C64>, phase: C64) -> Result<Self> {
        if (phase.norm() - 1.0).abs() > 1e-12 {
            return Err(SzegoError::InvalidInput("blaschke phase is not unimodular".into()));
        }
        let mut b = Self::new(zeros)?;
        b.phase = phase;
        Ok(b)
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn phase(&self) -> C64 {
        self.phase
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_normalized(&self) -> bool {
        (self.phase - ONE).norm() <= 1e-12
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.zeros
            .iter()
            .fold(self.phase, |acc, &a| acc * (x - a) / (x - a.conj()))
    }

    /// Zeros grouped by coincidence, with multiplicities.
    pub fn zero_roots(&self) -> Vec<Root> {
        cluster_roots(&self.zeros, MERGE_TOL)
    }

    /// `Π (x - a_j)`.
    pub fn numerator(&self) -> ComplexPolynomial {
        ComplexPolynomial::from_roots(&self.zeros)
    }

    /// `Π (x - conj a_j)`.
    pub fn denominator(&self) -> ComplexPolynomial {
        let c: Vec<C64> = self.zeros.iter().map(|a| a.conj()).collect();
        ComplexPolynomial::from_roots(&c)
    }

    /// Partial-fraction form.
    pub fn to_rational(&self) -> RationalFunction {
        let poles: Vec<Root> = self
            .zero_roots()
            .into_iter()
            .map(|r| Root { z: r.z.conj(), multiplicity: r.multiplicity })
            .collect();
        RationalFunction::from_numerator_and_roots(&self.numerator().scale(self.phase), ONE, &poles)
            .expect("blaschke denominator is monic")
    }

    /// `‖1 - ψ‖² = 4π Σ Im a_j` for a normalized product.
    pub fn one_minus_norm_sq(&self) -> f64 {
        4.0 * PI * self.zeros.iter().map(|a| a.im).sum::<f64>()
    }

    /// `(Λ1, Λ2)` of the expansion `ψ = 1 + Λ1/x + Λ2/x² + …`.
    pub fn laurent_coeffs(&self) -> (C64, C64) {
        // Product of 1 + d_j/x + d_j a'_j/x² with d_j = conj a_j - a_j.
        let mut l1 = C64::new(0.0, 0.0);
        let mut l2 = C64::new(0.0, 0.0);
        for &a in &self.zeros {
            let d = a.conj() - a;
            l2 += l1 * d + d * a.conj();
            l1 += d;
        }
        (l1 * self.phase, l2 * self.phase)
    }

    /// `Λ2/Λ1 - Λ1/2`, the constant that removes the constant term of the
    /// Herglotz combination.
    pub fn herglotz_shift(&self) -> f64 {
        let (l1, l2) = self.laurent_coeffs();
        (l2 / l1 - l1 * 0.5).re
    }

    /// Frostman shift `((1 - conj w)/(w - 1)) (w - ψ)/(1 - conj w ψ)` for
    /// `|w| < 1`; the result is again normalized.
    pub fn frostman_shift(&self, w: C64) -> Result<Self> {
        self.require_normalized("frostman shift")?;
        if !(w.norm() < 1.0) {
            return Err(SzegoError::InvalidInput(format!("frostman parameter |w| = {} ≥ 1", w.norm())));
        }
        if self.zeros.is_empty() {
            return Ok(self.clone());
        }
        let p = self.numerator().sub(&self.denominator().scale(w));
        let roots = p.roots()?;
        let zeros = expand_roots(&roots);
        Self::new(zeros)
    }

    fn require_normalized(&self, what: &str) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(SzegoError::InvalidInput(format!("{what} requires a normalized blaschke product")))
        }
    }
}

fn expand_roots(roots: &[Root]) -> Vec<C64> {
    roots
        .iter()
        .flat_map(|r| std::iter::repeat_n(r.z, r.multiplicity))
        .collect()
}

/// `i (‖1-ψ‖²/4π) (1+ψ)/(1-ψ) = x + B + Σ c_k/(α_k - x)` with the constant `B`
/// kept (no normalization of the constant term).
pub fn herglotz_raw(psi: &BlaschkeProduct) -> Result<HerglotzData> {
    psi.require_normalized("herglotz function")?;
    if psi.degree() == 0 {
        return Err(SzegoError::InvalidInput("herglotz function of a constant".into()));
    }
    let kappa = psi.one_minus_norm_sq() / (4.0 * PI);
    let num = psi.numerator();
    let den = psi.denominator();
    let sum = den.add(&num).scale(C64::new(0.0, kappa));
    let diff = den.sub(&num);
    let pf = RationalFunction::partial_fractions(&sum, &diff)?;
    let poly = pf.poly().coeffs();
    let slope = poly.get(1).copied().unwrap_or_default();
    if (slope - ONE).norm() > 1e-8 {
        return Err(SzegoError::Inconsistent(format!("herglotz slope {slope} differs from 1")));
    }
    let b_raw = poly.first().copied().unwrap_or_default().re;
    let dd = diff.derivative();
    let mut poles = Vec::with_capacity(pf.poles().len());
    let mut residues = Vec::with_capacity(pf.poles().len());
    for p in pf.poles() {
        if p.order() != 1 {
            return Err(SzegoError::Inconsistent("herglotz pole is not simple".into()));
        }
        if p.z.im.abs() > REAL_SNAP_TOL * (1.0 + p.z.norm()) {
            return Err(SzegoError::Inconsistent(format!("herglotz pole {} is not real", p.z)));
        }
        // Real Newton polish on diff, which is i·(real polynomial) on ℝ.
        let mut x = p.z.re;
        for _ in 0..2 {
            let step = (diff.eval(C64::new(x, 0.0)) / dd.eval(C64::new(x, 0.0))).re;
            if step.is_finite() {
                x -= step;
            }
        }
        // c = 2κ / Σ_j 2 Im a_j / |α - a_j|²
        let s: f64 = psi
            .zeros()
            .iter()
            .map(|a| 2.0 * a.im / (C64::new(x, 0.0) - a).norm_sqr())
            .sum();
        poles.push(x);
        residues.push(2.0 * kappa / s);
    }
    Ok(HerglotzData { poles, residues, b: b_raw }.canonical())
}

/// The Frostman-invariant Herglotz function of a normalized `ψ`, returned as
/// the data of `h(x) - x = Σ c_k/(α_k - x)` (its constant slot is zero).
pub fn herglotz_of(psi: &BlaschkeProduct) -> Result<HerglotzData> {
    let mut h = herglotz_raw(psi)?;
    h.b = 0.0;
    Ok(h)
}

/// Level function `b = (h - x)/ν²` attached to `ψ` and a norm `ν² > 0`.
pub fn level_b(psi: &BlaschkeProduct, nu_sq: f64) -> Result<HerglotzData> {
    if !(nu_sq > 0.0) {
        return Err(SzegoError::InvalidInput("level norm must be positive".into()));
    }
    Ok(herglotz_of(psi)?.scaled(1.0 / nu_sq))
}

/// Normalized `ψ = (h - iκ)/(h + iκ)` with `h(x) = x + B + ν² b(x)`.
///
/// The zeros solve `h(x) = iκ`; they are the eigenvalues of an arrowhead
/// matrix, refined by two Newton steps. Poles of `b` with zero residue are
/// ignored. The constant slot of `b` itself is not used.
pub fn psi_from_b(b: &HerglotzData, nu_sq: f64, kappa: f64, big_b: f64) -> Result<BlaschkeProduct> {
    b.validate()?;
    if !(nu_sq > 0.0) || !(kappa > 0.0) || !big_b.is_finite() {
        return Err(SzegoError::InvalidInput("psi_from_b needs ν² > 0, κ > 0, finite B".into()));
    }
    let active: Vec<(f64, f64)> = b
        .poles
        .iter()
        .zip(&b.residues)
        .filter(|(_, &c)| c > 0.0)
        .map(|(&a, &c)| (a, c * nu_sq))
        .collect();
    let n = active.len() + 1;
    let mut k = DMatrix::<C64>::zeros(n, n);
    k[(0, 0)] = C64::new(-big_b, kappa);
    for (idx, &(a, c)) in active.iter().enumerate() {
        let s = c.sqrt();
        k[(0, idx + 1)] = C64::new(-s, 0.0);
        k[(idx + 1, 0)] = C64::new(-s, 0.0);
        k[(idx + 1, idx + 1)] = C64::new(a, 0.0);
    }
    let mut zeros = linalg::eigenvalues(&k)?;
    let target = C64::new(0.0, kappa);
    let h = |x: C64| {
        x + big_b + active.iter().map(|&(a, c)| c / (a - x)).sum::<C64>()
    };
    let dh = |x: C64| {
        ONE + active.iter().map(|&(a, c)| c / ((a - x) * (a - x))).sum::<C64>()
    };
    for z in zeros.iter_mut() {
        for _ in 0..2 {
            let f = h(*z) - target;
            let step = f / dh(*z);
            let cand = *z - step;
            if cand.re.is_finite() && (h(cand) - target).norm() <= f.norm() {
                *z = cand;
            }
        }
    }
    let zeros = expand_roots(&cluster_roots(&zeros, CLUSTER_TOL));
    BlaschkeProduct::new(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn elementary_factor_laurent_and_norm() {
        let psi = BlaschkeProduct::new(vec![c64(0.0, 1.0)]).unwrap();
        let (l1, l2) = psi.laurent_coeffs();
        assert!((l1 - c64(0.0, -2.0)).norm() < 1e-15);
        assert!((l2 - c64(-2.0, 0.0)).norm() < 1e-15);
        assert!((psi.one_minus_norm_sq() - 4.0 * PI).abs() < 1e-13);
        let r = psi.to_rational();
        let (m1, m2) = r.laurent_coeffs();
        assert!((m1 - l1).norm() < 1e-14 && (m2 - l2).norm() < 1e-14);
    }

    #[test]
    fn frostman_shift_of_elementary_factor() {
        let psi = BlaschkeProduct::new(vec![c64(0.0, 1.0)]).unwrap();
        let t = psi.frostman_shift(c64(0.5, 0.0)).unwrap();
        assert!((t.zeros()[0] - c64(0.0, 3.0)).norm() < 1e-12);
    }

    #[test]
    fn herglotz_of_squared_factor() {
        let psi = BlaschkeProduct::new(vec![c64(0.0, 1.0), c64(0.0, 1.0)]).unwrap();
        let h = herglotz_raw(&psi).unwrap();
        assert_eq!(h.poles.len(), 1);
        assert!(h.poles[0].abs() < 1e-12);
        assert!((h.residues[0] - 1.0).abs() < 1e-12);
        assert!(h.b.abs() < 1e-12);
        assert!(psi.herglotz_shift().abs() < 1e-12);
    }

    #[test]
    fn psi_from_zero_b_is_elementary() {
        let psi = psi_from_b(&HerglotzData::zero(), 1.0, 1.0, 0.0).unwrap();
        assert_eq!(psi.degree(), 1);
        assert!((psi.zeros()[0] - c64(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn level_b_of_squared_factor() {
        let eps: f64 = 0.1;
        let nu_sq = (4.0 * PI).sqrt() / eps;
        let psi = BlaschkeProduct::new(vec![c64(0.0, 1.0), c64(0.0, 1.0)]).unwrap();
        let b = level_b(&psi, nu_sq).unwrap();
        assert!((b.residues[0] - eps / (4.0 * PI).sqrt()).abs() < 1e-13);
        assert!(b.poles[0].abs() < 1e-12);
    }
}
